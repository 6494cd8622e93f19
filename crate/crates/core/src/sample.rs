//! Raw bivariate samples and their componentwise ranks.

use alloc::vec::Vec;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Axis, Error, Result};

/// A validated sample `(x_1, y_1), …, (x_n, y_n)` with `n >= 2` and finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSample {
    pairs: Vec<(f64, f64)>,
}

impl BivariateSample {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::DegenerateSample { n: pairs.len(), required: 2 });
        }
        for (row, &(x, y)) in pairs.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { row, axis: Axis::X });
            }
            if !y.is_finite() {
                return Err(Error::NonFinite { row, axis: Axis::Y });
            }
        }
        Ok(Self { pairs })
    }

    pub fn from_columns(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::ShapeMismatch { expected: xs.len(), found: ys.len() });
        }
        Self::new(xs.iter().copied().zip(ys.iter().copied()).collect())
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn into_pairs(self) -> Vec<(f64, f64)> {
        self.pairs
    }
}

/// How duplicated coordinate values are handled when ranking.
///
/// Midranks are deliberately not offered: the grid-count construction of the
/// empirical copula needs both rank vectors to be permutations of `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Reject samples with duplicated x- or y-values.
    #[default]
    Error,
    /// Break ties by a seeded uniform shuffle among the tied entries.
    Random,
}

impl FromStr for TiePolicy {
    type Err = &'static str;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "error" => Ok(TiePolicy::Error),
            "random" => Ok(TiePolicy::Random),
            "midrank" => Err("midrank tie handling is not supported: ranks must form a permutation"),
            _ => Err("expected one of `error`, `random`"),
        }
    }
}

/// Componentwise ranks `(r_k, s_k)`, each coordinate a permutation of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoSample {
    rank_pairs: Vec<(usize, usize)>,
    tie_policy: TiePolicy,
    ties_broken: usize,
}

impl PseudoSample {
    /// Builds a pseudo sample from explicit ranks, checking the permutation invariant.
    pub fn from_ranks(rank_pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n = rank_pairs.len();
        if n < 2 {
            return Err(Error::DegenerateSample { n, required: 2 });
        }
        let mut seen_r = alloc::vec![usize::MAX; n];
        let mut seen_s = alloc::vec![usize::MAX; n];
        for (row, &(r, s)) in rank_pairs.iter().enumerate() {
            if r == 0 || r > n {
                return Err(Error::InvalidParameter { name: "x-rank", value: r as f64 });
            }
            if s == 0 || s > n {
                return Err(Error::InvalidParameter { name: "y-rank", value: s as f64 });
            }
            if seen_r[r - 1] != usize::MAX {
                return Err(Error::TiesPresent { axis: Axis::X, first_row: seen_r[r - 1], second_row: row });
            }
            if seen_s[s - 1] != usize::MAX {
                return Err(Error::TiesPresent { axis: Axis::Y, first_row: seen_s[s - 1], second_row: row });
            }
            seen_r[r - 1] = row;
            seen_s[s - 1] = row;
        }
        Ok(Self { rank_pairs, tie_policy: TiePolicy::Error, ties_broken: 0 })
    }

    pub fn n(&self) -> usize {
        self.rank_pairs.len()
    }

    pub fn rank_pairs(&self) -> &[(usize, usize)] {
        &self.rank_pairs
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy
    }

    /// Number of observations whose rank was decided by the random tie breaker.
    pub fn ties_broken(&self) -> usize {
        self.ties_broken
    }

    /// `perm[r - 1] = s` for the observation with x-rank `r`.
    pub fn y_rank_by_x_rank(&self) -> Vec<usize> {
        let mut perm = alloc::vec![0; self.n()];
        for &(r, s) in &self.rank_pairs {
            perm[r - 1] = s;
        }
        perm
    }
}

/// Componentwise ranks of `sample`.
///
/// With [`TiePolicy::Random`] the ranks inside every group of equal values are
/// assigned by a shuffle driven by `rng_seed` (0 when absent), so the result is
/// deterministic given the seed.
pub fn rank_transform(sample: &BivariateSample, tie_policy: TiePolicy, rng_seed: Option<u64>) -> Result<PseudoSample> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::DegenerateSample { n, required: 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed.unwrap_or(0));
    let xs = sample.xs();
    let ys = sample.ys();
    let (rx, broken_x) = ranks_of(&xs, Axis::X, tie_policy, &mut rng)?;
    let (ry, broken_y) = ranks_of(&ys, Axis::Y, tie_policy, &mut rng)?;
    Ok(PseudoSample { rank_pairs: rx.into_iter().zip(ry).collect(), tie_policy, ties_broken: broken_x + broken_y })
}

fn ranks_of(values: &[f64], axis: Axis, policy: TiePolicy, rng: &mut ChaCha8Rng) -> Result<(Vec<usize>, usize)> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let mut broken = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            match policy {
                TiePolicy::Error => {
                    return Err(Error::TiesPresent {
                        axis,
                        first_row: order[start].min(order[start + 1]),
                        second_row: order[start].max(order[start + 1]),
                    });
                }
                TiePolicy::Random => {
                    order[start..end].shuffle(rng);
                    broken += end - start;
                }
            }
        }
        start = end;
    }

    let mut ranks = alloc::vec![0; n];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = pos + 1;
    }
    Ok((ranks, broken))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(p: &[(f64, f64)]) -> BivariateSample {
        BivariateSample::new(p.to_vec()).unwrap()
    }

    #[test]
    fn monotone_relabeling() {
        let ps = rank_transform(&sample(&[(1.0, 10.0), (2.0, 5.0), (3.0, 7.0)]), TiePolicy::Error, None).unwrap();
        assert_eq!(ps.rank_pairs(), &[(1, 3), (2, 1), (3, 2)]);
    }

    #[test]
    fn order_reversal() {
        let ps = rank_transform(&sample(&[(5.0, 5.0), (1.0, 1.0)]), TiePolicy::Error, None).unwrap();
        assert_eq!(ps.rank_pairs(), &[(2, 2), (1, 1)]);
    }

    #[test]
    fn ties_rejected() {
        let err = rank_transform(&sample(&[(1.0, 1.0), (1.0, 2.0)]), TiePolicy::Error, None).unwrap_err();
        assert_eq!(err, Error::TiesPresent { axis: Axis::X, first_row: 0, second_row: 1 });
    }

    #[test]
    fn random_ties_are_seeded_permutations() {
        let s = sample(&[(1.0, 3.0), (1.0, 3.0), (1.0, 2.0), (0.0, 3.0)]);
        let a = rank_transform(&s, TiePolicy::Random, Some(7)).unwrap();
        let b = rank_transform(&s, TiePolicy::Random, Some(7)).unwrap();
        assert_eq!(a, b);
        assert!(PseudoSample::from_ranks(a.rank_pairs().to_vec()).is_ok());
        assert_eq!(a.rank_pairs()[3].0, 1);
        assert_eq!(a.rank_pairs()[2].1, 1);
        assert_eq!(a.ties_broken(), 6);
    }

    #[test]
    fn degenerate_and_non_finite() {
        assert!(matches!(BivariateSample::new(alloc::vec![(0.0, 0.0)]), Err(Error::DegenerateSample { .. })));
        assert!(matches!(
            BivariateSample::new(alloc::vec![(0.0, 0.0), (f64::NAN, 1.0)]),
            Err(Error::NonFinite { row: 1, axis: Axis::X })
        ));
    }

    #[test]
    fn midrank_is_refused() {
        assert!("midrank".parse::<TiePolicy>().is_err());
        assert_eq!("random".parse::<TiePolicy>(), Ok(TiePolicy::Random));
    }
}
