//! Binary trajectory snapshots.
//!
//! Little-endian throughout:
//!
//! ```text
//! magic     8 bytes  "CCSNAP01"
//! n_len     u64
//! m_len     u64
//! n0, m0    i64, i64   lattice coordinates of grid position (0, 0)
//! dtype     u32        1 = complex128 as (re, im) f64 pairs
//! count     u64        number of snapshots
//! then per snapshot:
//!   t       f64
//!   data    n_len·m_len complex values, row-major in (n, m)
//! ```

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticeState2D;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"CCSNAP01";
pub const DTYPE_COMPLEX128: u32 = 1;

pub struct SnapshotWriter<W: Write> {
    inner: W,
    dims: (usize, usize),
    expected: u64,
    written: u64,
}

impl<W: Write> SnapshotWriter<W> {
    pub fn new(
        mut inner: W,
        dims: (usize, usize),
        offset: (i64, i64),
        count: usize,
    ) -> Result<Self> {
        inner.write_all(SNAPSHOT_MAGIC)?;
        inner.write_all(&(dims.0 as u64).to_le_bytes())?;
        inner.write_all(&(dims.1 as u64).to_le_bytes())?;
        inner.write_all(&offset.0.to_le_bytes())?;
        inner.write_all(&offset.1.to_le_bytes())?;
        inner.write_all(&DTYPE_COMPLEX128.to_le_bytes())?;
        inner.write_all(&(count as u64).to_le_bytes())?;
        Ok(SnapshotWriter {
            inner,
            dims,
            expected: count as u64,
            written: 0,
        })
    }

    pub fn push(&mut self, t: f64, state: &LatticeState2D) -> Result<()> {
        if state.dims() != self.dims {
            return Err(Error::shape(
                format!("{:?}", self.dims),
                format!("{:?}", state.dims()),
            ));
        }
        if self.written == self.expected {
            return Err(Error::invalid(format!(
                "more than the declared {} snapshots",
                self.expected
            )));
        }
        let mut buf = Vec::with_capacity(8 + 16 * state.amplitudes().len());
        buf.extend_from_slice(&t.to_le_bytes());
        for a in state.amplitudes() {
            buf.extend_from_slice(&a.re.to_le_bytes());
            buf.extend_from_slice(&a.im.to_le_bytes());
        }
        self.inner.write_all(&buf)?;
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        if self.written != self.expected {
            return Err(Error::invalid(format!(
                "declared {} snapshots, wrote {}",
                self.expected, self.written
            )));
        }
        self.inner.flush()?;
        Ok(self.inner)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub dims: (usize, usize),
    pub offset: (i64, i64),
    pub snapshots: Vec<(f64, LatticeState2D)>,
}

fn read_array<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_snapshots<R: Read>(mut r: R) -> Result<SnapshotFile> {
    if &read_array::<8>(&mut r)? != SNAPSHOT_MAGIC {
        return Err(Error::invalid("not a snapshot file"));
    }
    let n_len = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let m_len = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let n0 = i64::from_le_bytes(read_array(&mut r)?);
    let m0 = i64::from_le_bytes(read_array(&mut r)?);
    let dtype = u32::from_le_bytes(read_array(&mut r)?);
    if dtype != DTYPE_COMPLEX128 {
        return Err(Error::Unsupported(format!("snapshot dtype {dtype}")));
    }
    let count = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let sites = n_len
        .checked_mul(m_len)
        .ok_or_else(|| Error::invalid("snapshot dimensions overflow"))?;
    let mut raw = vec![0u8; 16 * sites];
    let mut snapshots = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let t = f64::from_le_bytes(read_array(&mut r)?);
        r.read_exact(&mut raw)?;
        let amplitudes = raw
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        snapshots.push((
            t,
            LatticeState2D::from_vec(n_len, m_len, amplitudes)?.with_offset(n0, m0),
        ));
    }
    Ok(SnapshotFile {
        dims: (n_len, m_len),
        offset: (n0, m0),
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let a = LatticeState2D::random(3, 5, 1).with_offset(-1, 4);
        let b = LatticeState2D::random(3, 5, 2).with_offset(-1, 4);
        let mut w = SnapshotWriter::new(Vec::new(), (3, 5), (-1, 4), 2).unwrap();
        w.push(0.0, &a).unwrap();
        w.push(2.5, &b).unwrap();
        let bytes = w.finish().unwrap();
        assert_eq!(bytes.len(), 8 + 8 * 4 + 4 + 8 + 2 * (8 + 16 * 15));
        let file = read_snapshots(bytes.as_slice()).unwrap();
        assert_eq!(file.dims, (3, 5));
        assert_eq!(file.offset, (-1, 4));
        assert_eq!(file.snapshots, vec![(0.0, a), (2.5, b)]);
    }

    #[test]
    fn count_and_shape_enforced() {
        let mut w = SnapshotWriter::new(Vec::new(), (2, 2), (0, 0), 1).unwrap();
        assert!(w.push(0.0, &LatticeState2D::zeros(2, 3)).is_err());
        assert!(SnapshotWriter::new(Vec::new(), (2, 2), (0, 0), 1)
            .unwrap()
            .finish()
            .is_err());
        assert!(read_snapshots(&b"CCSNAP02"[..]).is_err());
        let mut truncated = SnapshotWriter::new(Vec::new(), (2, 2), (0, 0), 1).unwrap();
        truncated.push(1.0, &LatticeState2D::zeros(2, 2)).unwrap();
        let bytes = truncated.finish().unwrap();
        assert!(read_snapshots(&bytes[..bytes.len() - 1]).is_err());
    }
}
