//! Spreading along `m` against confinement along `n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::LatticeState2D;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadingMoments {
    /// `Σ |ψ_{n,m}|² (m − m_c)² / ‖ψ‖²`.
    pub m_second_moment: f64,
    /// `Σ |ψ_{n,m}|² (n − n_c)² / ‖ψ‖²`.
    pub n_second_moment: f64,
    /// `‖ψ‖₂⁴ / Σ |ψ_{n,m}|⁴`.
    pub participation_ratio: f64,
}

/// `|ψ|²`-weighted centroid in lattice coordinates.
pub fn centroid(state: &LatticeState2D) -> Result<(f64, f64)> {
    let (n0, m0) = state.offset();
    let mut total = 0.0;
    let (mut cn, mut cm) = (0.0, 0.0);
    for n in 0..state.n_len() {
        for (m, a) in state.row(n).iter().enumerate() {
            let w = a.norm_sqr();
            total += w;
            cn += w * (n0 + n as i64) as f64;
            cm += w * (m0 + m as i64) as f64;
        }
    }
    if total == 0.0 {
        return Err(Error::invalid("zero state has no centroid"));
    }
    Ok((cn / total, cm / total))
}

/// Second moments about `origin = (n_c, m_c)` (lattice coordinates, usually
/// the centroid of the initial state) and the participation ratio.
pub fn spreading_moments(state: &LatticeState2D, origin: (f64, f64)) -> Result<SpreadingMoments> {
    let (n0, m0) = state.offset();
    let (mut total, mut quartic, mut mm, mut nn) = (0.0, 0.0, 0.0, 0.0);
    for n in 0..state.n_len() {
        let dn = (n0 + n as i64) as f64 - origin.0;
        for (m, a) in state.row(n).iter().enumerate() {
            let dm = (m0 + m as i64) as f64 - origin.1;
            let w = a.norm_sqr();
            total += w;
            quartic += w * w;
            mm += w * dm * dm;
            nn += w * dn * dn;
        }
    }
    if total == 0.0 {
        return Err(Error::invalid("spreading moments of the zero state"));
    }
    Ok(SpreadingMoments {
        m_second_moment: mm / total,
        n_second_moment: nn / total,
        participation_ratio: total * total / quartic,
    })
}
