use condcopula_core::{
    d_infty_grid, kernel_sup_distance, rank_transform, BernsteinModel, BivariateSample, CheckerboardModel, CopulaSpec,
    EmpiricalCopula, KernelEvaluator, MarkovKernel, TiePolicy,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn empirical(spec: CopulaSpec, n: usize, seed: u64) -> EmpiricalCopula {
    let sample = BivariateSample::new(spec.sample_seeded(n, seed).unwrap()).unwrap();
    EmpiricalCopula::new(&rank_transform(&sample, TiePolicy::Error, None).unwrap())
}

fn evaluators() -> Vec<KernelEvaluator> {
    let amh = CopulaSpec::amh(0.75).unwrap();
    let clayton = CopulaSpec::clayton(2.0).unwrap();
    let ec = empirical(amh, 400, 17);
    vec![
        amh.into(),
        CopulaSpec::pi().into(),
        CopulaSpec::m().into(),
        CheckerboardModel::from_copula(|u, v| clayton.cdf_unchecked(u, v), 9).unwrap().into(),
        CheckerboardModel::from_empirical(&ec, 15).unwrap().into(),
        BernsteinModel::from_copula(|u, v| amh.cdf_unchecked(u, v), 12).unwrap().into(),
        BernsteinModel::from_empirical(&ec, 15).unwrap().into(),
    ]
}

#[test]
fn kernels_are_distribution_functions_in_y() {
    for k in evaluators() {
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!(k.eval(x, 0.0).unwrap().abs() < 1e-10);
            assert!((k.eval(x, 1.0).unwrap() - 1.0).abs() < 1e-10);
            let mut prev = 0.0;
            for j in 0..=100 {
                let v = k.eval(x, j as f64 / 100.0).unwrap();
                assert!(v >= prev - 1e-10, "{k:?} not monotone at x={x}");
                prev = v;
            }
        }
    }
}

#[test]
fn empirical_checkerboards_are_doubly_stochastic() {
    for (seed, res) in [(1u64, 4usize), (2, 9), (3, 23), (4, 40)] {
        let ec = empirical(CopulaSpec::clayton(2.0).unwrap(), 997, seed);
        let board = CheckerboardModel::from_empirical(&ec, res).unwrap();
        let m = board.masses();
        for k in 0..res {
            let row: f64 = m.row(k).iter().sum();
            let col: f64 = (0..res).map(|i| m[(i, k)]).sum();
            assert!((row - 1.0 / res as f64).abs() <= 1e-12);
            assert!((col - 1.0 / res as f64).abs() <= 1e-12);
        }
        assert!(m.as_slice().iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn checkerboard_masses_match_rectangle_differences_of_the_empirical_copula() {
    let ec = empirical(CopulaSpec::amh(-0.5).unwrap(), 250, 8);
    for res in [2, 6, 11] {
        let fast = CheckerboardModel::from_empirical(&ec, res).unwrap();
        let direct = CheckerboardModel::from_copula(|u, v| ec.eval(u, v).unwrap(), res).unwrap();
        assert!(fast.masses().max_abs_diff(direct.masses()) < 1e-13);
    }
}

#[test]
fn disintegration_of_empirical_checkerboard() {
    let ec = empirical(CopulaSpec::amh(0.4).unwrap(), 300, 21);
    let res = 8;
    let board = CheckerboardModel::from_empirical(&ec, res).unwrap();
    let nf = res as f64;
    for i0 in 1..=res {
        for j0 in 0..=res {
            let y = j0 as f64 / nf;
            let acc: f64 = (1..=i0).map(|i| board.kernel((i as f64 - 0.5) / nf, y).unwrap()).sum::<f64>() / nf;
            let expected = ec.eval(i0 as f64 / nf, y).unwrap();
            assert!((acc - expected).abs() < 1e-10);
        }
    }
}

#[test]
fn sampler_goodness_of_fit() {
    for (spec, seed) in [
        (CopulaSpec::amh(0.75).unwrap(), 101u64),
        (CopulaSpec::clayton(2.0).unwrap(), 102),
        (CopulaSpec::pi(), 103),
        (CopulaSpec::m(), 104),
    ] {
        let ec = empirical(spec, 100_000, seed);
        let grid = ec.grid_at_resolution(50);
        let d = d_infty_grid(
            |u, v| grid[((u * 50.0).round() as usize, (v * 50.0).round() as usize)],
            |u, v| spec.cdf_unchecked(u, v),
            50,
        )
        .unwrap();
        assert!(d < 0.01, "{spec:?}: {d}");
    }
}

#[test]
fn independent_sampler_has_no_rank_correlation() {
    let n = 100_000;
    let sample = BivariateSample::new(CopulaSpec::pi().sample_seeded(n, 5).unwrap()).unwrap();
    let pseudo = rank_transform(&sample, TiePolicy::Error, None).unwrap();
    let nf = n as f64;
    let d2: f64 = pseudo.rank_pairs().iter().map(|&(r, s)| (r as f64 - s as f64).powi(2)).sum();
    let rho = 1.0 - 6.0 * d2 / (nf * (nf * nf - 1.0));
    assert!(rho.abs() < 0.02, "{rho}");
}

#[test]
fn empirical_copula_of_comonotone_sample_is_close_to_m() {
    let ec = empirical(CopulaSpec::m(), 1000, 77);
    let d = d_infty_grid(|u, v| ec.eval(u, v).unwrap(), f64::min, 100).unwrap();
    // observed 0.001 on this seed
    assert!(d < 0.05, "{d}");
}

#[test]
fn simpson_integrated_kernels_reproduce_cdfs() {
    let nodes = 2001;
    let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| {
        let h = (b - a) / (nodes - 1) as f64;
        let mut acc = f(a) + f(b);
        for k in 1..nodes - 1 {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
        }
        acc * h / 3.0
    };
    let families = [CopulaSpec::amh(0.75).unwrap(), CopulaSpec::amh(-0.6).unwrap(), CopulaSpec::pi()];
    for spec in families {
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            for j in 0..=20 {
                let y = j as f64 / 20.0;
                let integral = simpson(&|t| spec.kernel(t, y).unwrap(), 0.0, x);
                assert!((integral - spec.cdf(x, y).unwrap()).abs() < 1e-6);
            }
        }
    }
    // Clayton away from the singular column: C(x, y) − C(x0, y) = ∫_{x0}^x K
    let clayton = CopulaSpec::clayton(2.0).unwrap();
    let x0 = 0.05;
    for i in 1..=20 {
        let x = x0 + (1.0 - x0) * i as f64 / 20.0;
        for j in 0..=20 {
            let y = j as f64 / 20.0;
            let integral = simpson(&|t| clayton.kernel(t, y).unwrap(), x0, x);
            let expected = clayton.cdf(x, y).unwrap() - clayton.cdf(x0, y).unwrap();
            assert!((integral - expected).abs() < 1e-6);
        }
    }
    // M: ∫₀ˣ 1{t ≤ y} dt = min(x, y)
    for i in 0..=20 {
        for j in 0..=20 {
            let (x, y) = (i as f64 / 20.0, j as f64 / 20.0);
            let integral = x.min(y);
            assert!((integral - CopulaSpec::m().cdf(x, y).unwrap()).abs() < 1e-15);
        }
    }
}

#[test]
fn closed_form_kernels_are_monotone() {
    let clayton = CopulaSpec::clayton(2.0).unwrap();
    for spec in [CopulaSpec::amh(0.75).unwrap(), CopulaSpec::amh(-1.0).unwrap(), clayton] {
        for i in 1..=100 {
            let x = 0.01 + 0.99 * i as f64 / 100.0;
            let mut prev = spec.kernel(x, 0.0).unwrap();
            assert_eq!(prev, 0.0);
            for j in 1..=200 {
                let v = spec.kernel(x, j as f64 / 200.0).unwrap();
                assert!(v >= prev);
                prev = v;
            }
            assert!((prev - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn minimum_copula_half_gap() {
    for res in [4usize, 16, 64] {
        let board = CheckerboardModel::from_copula(f64::min, res).unwrap();
        let ys: Vec<f64> = (0..=4000).map(|j| j as f64 / 4000.0).collect();
        let best = (0..=1000)
            .map(|i| i as f64 / 1000.0)
            .filter(|x| ((x * res as f64).round() - x * res as f64).abs() > 1e-9)
            .map(|x| {
                // the supremum in y is attained at the in-cell point y = x
                let mut pts: Vec<(f64, f64)> = ys.iter().map(|&y| (x, y)).collect();
                pts.push((x, x));
                kernel_sup_distance(&CopulaSpec::m(), &board, &pts).unwrap()
            })
            .fold(0.0, f64::max);
        assert!(best >= 0.5 - 1e-9, "N={res}: {best}");
    }
}

fn random_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.random(), rng.random())).collect()
}

#[test]
fn product_copula_is_a_fixed_point() {
    for res in [2, 7, 30] {
        let cb = CheckerboardModel::from_copula(|u, v| u * v, res).unwrap();
        let bn = BernsteinModel::from_copula(|u, v| u * v, res).unwrap();
        for (x, y) in random_points(1000, res as u64) {
            assert!((cb.kernel(x, y).unwrap() - y).abs() < 1e-12);
            assert!((bn.kernel(x, y).unwrap() - y).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lipschitz_transfer(theta in -0.9f64..0.95, clayton_theta in 0.2f64..6.0, res in 2usize..25, seed in 0u64..1000) {
        let a1 = CopulaSpec::amh(theta).unwrap();
        let a2 = CopulaSpec::clayton(clayton_theta).unwrap();
        let d = d_infty_grid(|u, v| a1.cdf_unchecked(u, v), |u, v| a2.cdf_unchecked(u, v), res).unwrap();
        let bound = 2.0 * res as f64 * d;
        let pts = random_points(1000, seed);
        let cb1 = CheckerboardModel::from_copula(|u, v| a1.cdf_unchecked(u, v), res).unwrap();
        let cb2 = CheckerboardModel::from_copula(|u, v| a2.cdf_unchecked(u, v), res).unwrap();
        prop_assert!(kernel_sup_distance(&cb1, &cb2, &pts).unwrap() <= bound + 1e-12);
        let b1 = BernsteinModel::from_copula(|u, v| a1.cdf_unchecked(u, v), res).unwrap();
        let b2 = BernsteinModel::from_copula(|u, v| a2.cdf_unchecked(u, v), res).unwrap();
        prop_assert!(kernel_sup_distance(&b1, &b2, &pts).unwrap() <= bound + 1e-12);
    }

    #[test]
    fn empirical_copula_margins_and_bounds(n in 2usize..80, seed in 0u64..10_000, u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
        let ec = empirical(CopulaSpec::amh(0.3).unwrap(), n, seed);
        prop_assert!((ec.eval(u, 1.0).unwrap() - u).abs() < 1e-12);
        prop_assert!((ec.eval(1.0, v).unwrap() - v).abs() < 1e-12);
        let c = ec.eval(u, v).unwrap();
        prop_assert!(c >= -1e-12 && c <= u.min(v) + 1e-12);
        prop_assert!(c >= u + v - 1.0 - 1e-12);
    }

    #[test]
    fn empirical_grid_is_two_increasing(n in 2usize..40, seed in 0u64..10_000) {
        let ec = empirical(CopulaSpec::clayton(1.0).unwrap(), n, seed);
        for i in 1..=n {
            for j in 1..=n {
                let vol = ec.count(i, j) as i64 - ec.count(i - 1, j) as i64 - ec.count(i, j - 1) as i64
                    + ec.count(i - 1, j - 1) as i64;
                prop_assert!(vol >= 0);
            }
            prop_assert_eq!(ec.count(i, n), i);
            prop_assert_eq!(ec.count(n, i), i);
        }
    }

    #[test]
    fn bernstein_kernel_is_continuous(x in 0.0f64..1.0, y in 0.0f64..1.0, seed in 0u64..500) {
        let ec = empirical(CopulaSpec::amh(0.75).unwrap(), 200, seed);
        let b = BernsteinModel::from_empirical(&ec, 10).unwrap();
        let h = 1e-9;
        let (x2, y2) = ((x + h).min(1.0), (y + h).min(1.0));
        prop_assert!((b.kernel(x, y).unwrap() - b.kernel(x2, y2).unwrap()).abs() < 1e-6);
    }
}
