//! Versioned little-endian binary model files.
//!
//! Layout: magic `CBCOPMDL`, `u16` format version, `u8` method
//! (0 checkerboard, 1 Bernstein), `u64` resolution `N`, `f64` exponent `s`,
//! `u64` sample size `n`, `u64` ties broken, `u8` bounded-response flag,
//! `f64` bound (NaN when absent), then the payload (`N²` row-major masses or
//! the `(N+1)²` Bernstein grid), the sorted x values and the sorted y values.

use std::io::{Read, Write};

use condcopula_core::{BernsteinModel, CheckerboardModel, FittedModel, Grid, Payload, RegularityNote};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"CBCOPMDL";
pub const FORMAT_VERSION: u16 = 1;

const METHOD_CHECKERBOARD: u8 = 0;
const METHOD_BERNSTEIN: u8 = 1;

pub fn write_model<W: Write>(model: &FittedModel, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    let (tag, values): (u8, &[f64]) = match model.payload() {
        Payload::Checkerboard(cb) => (METHOD_CHECKERBOARD, cb.masses().as_slice()),
        Payload::Bernstein(b) => (METHOD_BERNSTEIN, b.grid().as_slice()),
    };
    w.write_all(&[tag])?;
    w.write_all(&(model.resolution().get() as u64).to_le_bytes())?;
    w.write_all(&model.resolution().s_exponent().to_le_bytes())?;
    w.write_all(&(model.n() as u64).to_le_bytes())?;
    w.write_all(&(model.ties_broken() as u64).to_le_bytes())?;
    let note = model.regularity_note();
    w.write_all(&[note.bounded_response as u8])?;
    w.write_all(&note.bound.unwrap_or(f64::NAN).to_le_bytes())?;
    for v in values.iter().chain(model.x_sorted()).chain(model.y_order_stats()) {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn to_bytes(model: &FittedModel) -> Vec<u8> {
    let mut buf = Vec::new();
    write_model(model, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

pub fn read_model<R: Read>(mut r: R) -> Result<FittedModel> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

pub fn from_bytes(bytes: &[u8]) -> Result<FittedModel> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(8)? != MAGIC {
        return Err(Error::ModelFormat("not a model file (bad magic)".into()));
    }
    let version = u16::from_le_bytes(cur.array()?);
    if version != FORMAT_VERSION {
        return Err(Error::ModelFormat(format!("unsupported format version {version}")));
    }
    let tag = cur.take(1)?[0];
    let res = usize_of(u64::from_le_bytes(cur.array()?))?;
    let s = f64::from_le_bytes(cur.array()?);
    let n = usize_of(u64::from_le_bytes(cur.array()?))?;
    let ties = usize_of(u64::from_le_bytes(cur.array()?))?;
    let bounded = cur.take(1)?[0] != 0;
    let bound = f64::from_le_bytes(cur.array()?);
    let side = match tag {
        METHOD_CHECKERBOARD => res,
        METHOD_BERNSTEIN => res.checked_add(1).ok_or_else(|| Error::ModelFormat("resolution overflow".into()))?,
        other => return Err(Error::ModelFormat(format!("unknown method tag {other}"))),
    };
    let payload_len = side.checked_mul(side).ok_or_else(|| Error::ModelFormat("resolution overflow".into()))?;
    let values = cur.f64s(payload_len)?;
    let xs = cur.f64s(n)?;
    let ys = cur.f64s(n)?;
    if cur.pos != bytes.len() {
        return Err(Error::ModelFormat(format!("{} trailing bytes", bytes.len() - cur.pos)));
    }
    let payload = match tag {
        METHOD_CHECKERBOARD => Payload::Checkerboard(CheckerboardModel::from_masses(res, values)?),
        _ => Payload::Bernstein(BernsteinModel::from_copula_grid(Grid::from_vec(side, side, values)?)?),
    };
    let note = RegularityNote { bounded_response: bounded, bound: (!bound.is_nan()).then_some(bound) };
    Ok(FittedModel::from_parts(s, payload, xs, ys)?.with_ties_broken(ties).with_regularity_note(note))
}

fn usize_of(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::ModelFormat(format!("length {v} does not fit this platform")))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::ModelFormat("truncated file".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const K: usize>(&mut self) -> Result<[u8; K]> {
        Ok(self.take(K)?.try_into().expect("slice has length K"))
    }

    fn f64s(&mut self, count: usize) -> Result<Vec<f64>> {
        let len = count.checked_mul(8).ok_or_else(|| Error::ModelFormat("length overflow".into()))?;
        let raw = self.take(len)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect())
    }
}
