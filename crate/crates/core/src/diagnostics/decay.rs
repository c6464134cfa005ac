//! Dispersive decay traces, power-law fits and the mixed-norm chain
//!
//! ```text
//! ‖ψ(t)‖_{ℓ∞_{n,m}} ≤ ‖‖ψ(t)‖_{ℓ²_n}‖_{ℓ∞_m}
//!                   = ‖‖e^{i(-Δ_m)t}ψ₀‖_{ℓ²_n}‖_{ℓ∞_m}
//!                   ≤ ‖‖e^{i(-Δ_m)t}ψ₀‖_{ℓ∞_m}‖_{ℓ²_n}
//! ```
//!
//! with `‖‖ψ₀‖_{ℓ¹_m}‖_{ℓ²_n} ≤ ‖ψ₀‖_{ℓ¹}` closing the estimate.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{wrap_free_length, PropagatorPlan};
use crate::japanese_bracket;
use crate::lattice::{apply_h2d, LatticeState2D};

/// Default fit window.
pub const FIT_WINDOW: (f64, f64) = (20.0, 200.0);
/// Minimum number of samples inside a fit window.
pub const MIN_FIT_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecaySnapshot {
    pub t: f64,
    pub sup_norm: f64,
    /// `‖‖ψ(t)‖_{ℓ²_n}‖_{ℓ∞_m}`.
    pub l2n_linfm: f64,
    /// `‖‖ψ(t)‖_{ℓ∞_m}‖_{ℓ²_n}`.
    pub linfm_l2n: f64,
    /// `max_m |‖ψ(t)‖_{ℓ²_n} − ‖e^{i(-Δ_m)t}ψ₀‖_{ℓ²_n}|`.
    pub fiber_isometry_residual: f64,
    pub l2_norm: f64,
    /// `⟨Hψ(t), ψ(t)⟩`.
    pub energy: f64,
    /// `‖Hψ(t)‖²`.
    pub energy_second_moment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialNorms {
    pub l1: f64,
    pub l1m_l2n: f64,
    pub l2: f64,
    pub linf: f64,
}

impl InitialNorms {
    pub fn of(psi0: &LatticeState2D) -> Self {
        InitialNorms {
            l1: psi0.norm_l1(),
            l1m_l2n: psi0.norm_l1m_l2n(),
            l2: psi0.norm_l2(),
            linf: psi0.norm_linf(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayTrace {
    pub initial: InitialNorms,
    pub snapshots: Vec<DecaySnapshot>,
}

/// Tolerances for [`DecayTrace::check_chain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainTolerance {
    /// Relative slack on each inequality, for rounding.
    pub slack: f64,
    /// Absolute bound on the fiber isometry residual.
    pub isometry: f64,
}

impl Default for ChainTolerance {
    fn default() -> Self {
        ChainTolerance {
            slack: 1e-12,
            isometry: 1e-10,
        }
    }
}

/// Worst margins of the mixed-norm chain over a trace; a check passes when
/// its margin is nonpositive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainReport {
    /// `max_t (sup − l2n_linfm)`.
    pub sup_vs_l2n_linfm: f64,
    /// `max_t (l2n_linfm − linfm_l2n)`.
    pub l2n_linfm_vs_linfm_l2n: f64,
    /// `‖‖ψ₀‖_{ℓ¹_m}‖_{ℓ²_n} − ‖ψ₀‖_{ℓ¹}`.
    pub l1m_l2n_vs_l1: f64,
    pub max_isometry_residual: f64,
    pub passed: bool,
}

impl DecayTrace {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn sup_norms(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.sup_norm).collect()
    }

    pub fn check_chain(&self, tol: ChainTolerance) -> ChainReport {
        let slack = |x: f64| tol.slack * x.abs().max(f64::MIN_POSITIVE);
        let mut a = f64::NEG_INFINITY;
        let mut b = f64::NEG_INFINITY;
        let mut iso = 0.0f64;
        let mut ok = true;
        for s in &self.snapshots {
            a = a.max(s.sup_norm - s.l2n_linfm);
            b = b.max(s.l2n_linfm - s.linfm_l2n);
            iso = iso.max(s.fiber_isometry_residual);
            ok &= s.sup_norm <= s.l2n_linfm + slack(s.l2n_linfm);
            ok &= s.l2n_linfm <= s.linfm_l2n + slack(s.linfm_l2n);
            ok &= s.sup_norm <= s.l2_norm + slack(s.l2_norm);
        }
        let c = self.initial.l1m_l2n - self.initial.l1;
        ok &= self.initial.l1m_l2n <= self.initial.l1 + slack(self.initial.l1);
        ok &= iso <= tol.isometry;
        ChainReport {
            sup_vs_l2n_linfm: a,
            l2n_linfm_vs_linfm_l2n: b,
            l1m_l2n_vs_l1: c,
            max_isometry_residual: iso,
            passed: ok,
        }
    }

    /// Largest drift of `‖ψ(t)‖₂`, `⟨Hψ,ψ⟩` and `‖Hψ‖²` from the first snapshot.
    pub fn conservation_drift(&self) -> (f64, f64, f64) {
        let Some(first) = self.snapshots.first() else {
            return (0.0, 0.0, 0.0);
        };
        self.snapshots
            .iter()
            .fold((0.0, 0.0, 0.0), |(n, e, e2), s| {
                (
                    f64::max(n, (s.l2_norm - first.l2_norm).abs()),
                    f64::max(e, (s.energy - first.energy).abs()),
                    f64::max(
                        e2,
                        (s.energy_second_moment - first.energy_second_moment).abs(),
                    ),
                )
            })
    }

    /// CSV with columns `t,sup_norm,l2n_linfm,linfm_l2n,l2_norm,energy`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,sup_norm,l2n_linfm,linfm_l2n,l2_norm,energy")?;
        for s in &self.snapshots {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                s.t, s.sup_norm, s.l2n_linfm, s.linfm_l2n, s.l2_norm, s.energy
            )?;
        }
        Ok(())
    }
}

/// Range of `m` indices carrying nonzero amplitude.
fn m_support_width(state: &LatticeState2D) -> usize {
    let zero = num_complex::Complex64::new(0.0, 0.0);
    let mut lo = usize::MAX;
    let mut hi = 0;
    for n in 0..state.n_len() {
        let row = state.row(n);
        if let Some(first) = row.iter().position(|a| *a != zero) {
            lo = lo.min(first);
            hi = hi.max(row.iter().rposition(|a| *a != zero).expect("nonzero entry"));
        }
    }
    if lo == usize::MAX {
        0
    } else {
        hi - lo + 1
    }
}

/// Evolves `psi0` to each time with the factorized propagator and records the
/// norms of the mixed-norm chain.
pub fn record_decay(
    plan: &PropagatorPlan,
    psi0: &LatticeState2D,
    times: &[f64],
) -> Result<DecayTrace> {
    if times.is_empty() {
        return Err(Error::invalid("no times requested"));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "times must be finite, nonnegative and strictly ascending",
        ));
    }
    let t_max = *times.last().expect("nonempty");
    let required = wrap_free_length(t_max, m_support_width(psi0));
    if psi0.m_len() < required {
        return Err(Error::WindowTooSmall {
            required,
            actual: psi0.m_len(),
        });
    }
    let initial = InitialNorms::of(psi0);
    let snapshots = times
        .iter()
        .map(|&t| decay_snapshot(plan, psi0, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayTrace { initial, snapshots })
}

/// Norms of the mixed-norm chain at one time. The chain holds on any
/// truncation; only the decay rate needs a wrap-free grid.
pub fn decay_snapshot(
    plan: &PropagatorPlan,
    psi0: &LatticeState2D,
    t: f64,
) -> Result<DecaySnapshot> {
    let mut free_only = psi0.clone();
    plan.sweep_m(&mut free_only, t)?;
    let mut psi = free_only.clone();
    plan.sweep_n(&mut psi, t)?;
    let residual = psi
        .column_l2_norms()
        .iter()
        .zip(free_only.column_l2_norms())
        .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let h_psi = apply_h2d(&psi, plan.a1(), plan.a2())?;
    Ok(DecaySnapshot {
        t,
        sup_norm: psi.norm_linf(),
        l2n_linfm: psi.norm_l2n_linfm(),
        linfm_l2n: psi.norm_linfm_l2n(),
        fiber_isometry_residual: residual,
        l2_norm: psi.norm_l2(),
        energy: h_psi.inner(&psi).re,
        energy_second_moment: h_psi.norm_l2().powi(2),
    })
}

/// `n` times geometrically spaced on `[t_lo, t_hi]`.
pub fn log_spaced_times(t_lo: f64, t_hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t_lo];
    }
    let (a, b) = (t_lo.ln(), t_hi.ln());
    // endpoints exact, so they survive window filtering
    (0..n)
        .map(|k| match k {
            0 => t_lo,
            k if k == n - 1 => t_hi,
            k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Least-squares power law `sup_norm ≈ prefactor · ⟨t⟩^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    /// RMS residual in log-log coordinates.
    pub residual: f64,
    pub samples: usize,
}

impl DecayFit {
    pub fn predict(&self, t: f64) -> f64 {
        self.prefactor * japanese_bracket(t).powf(self.exponent)
    }

    /// Largest `sup_norm(t) / (ℓ¹·prefactor·⟨t⟩^exponent)` over the fit window;
    /// at most 1 when the bound holds with the given exponent.
    pub fn bound_ratio(&self, trace: &DecayTrace, exponent: f64) -> f64 {
        let scale = trace.initial.l1 * self.prefactor;
        trace
            .snapshots
            .iter()
            .filter(|s| s.t >= self.window.0 && s.t <= self.window.1)
            .map(|s| s.sup_norm / (scale * japanese_bracket(s.t).powf(exponent)))
            .fold(0.0, f64::max)
    }
}

pub fn fit_decay_exponent(trace: &DecayTrace, window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::invalid(format!(
            "degenerate fit window [{lo}, {hi}]"
        )));
    }
    let points: Vec<(f64, f64)> = trace
        .snapshots
        .iter()
        .filter(|s| s.t >= lo && s.t <= hi)
        .map(|s| (s.t, s.sup_norm))
        .collect();
    if points.len() < MIN_FIT_SAMPLES {
        return Err(Error::invalid(format!(
            "fit window [{lo}, {hi}] holds {} samples, need {MIN_FIT_SAMPLES}",
            points.len()
        )));
    }
    if points.iter().any(|&(_, s)| s.is_nan() || s <= 0.0) {
        return Err(Error::invalid(
            "sup norms must be positive to fit a power law",
        ));
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|&(t, s)| (japanese_bracket(t).ln(), s.ln()))
        .collect();
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("fit window times are all equal"));
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xy
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(DecayFit {
        exponent: slope,
        prefactor: intercept.exp(),
        window,
        residual,
        samples: xy.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{bessel_j_orders, FreeMethod};
    use crate::operator::{Boundary, Operator1D};

    fn synthetic(times: &[f64], f: impl Fn(f64) -> f64) -> DecayTrace {
        DecayTrace {
            initial: InitialNorms {
                l1: 1.0,
                l1m_l2n: 1.0,
                l2: 1.0,
                linf: 1.0,
            },
            snapshots: times
                .iter()
                .map(|&t| DecaySnapshot {
                    t,
                    sup_norm: f(t),
                    l2n_linfm: f(t),
                    linfm_l2n: f(t),
                    fiber_isometry_residual: 0.0,
                    l2_norm: 1.0,
                    energy: 0.0,
                    energy_second_moment: 0.0,
                })
                .collect(),
        }
    }

    #[test]
    fn log_times_hit_endpoints_exactly() {
        let t = log_spaced_times(20.0, 200.0, 40);
        assert_eq!((t[0], t[39]), (20.0, 200.0));
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn exact_power_law_recovered() {
        let times = log_spaced_times(20.0, 200.0, 30);
        let trace = synthetic(&times, |t| 7.0 * japanese_bracket(t).powf(-1.0 / 3.0));
        let fit = fit_decay_exponent(&trace, FIT_WINDOW).unwrap();
        assert!((fit.exponent + 1.0 / 3.0).abs() < 1e-6);
        assert!((fit.prefactor - 7.0).abs() < 1e-6);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn fit_rejections() {
        let trace = synthetic(&log_spaced_times(20.0, 200.0, 5), |t| 1.0 / t);
        assert!(fit_decay_exponent(&trace, FIT_WINDOW).is_err());
        let trace = synthetic(&log_spaced_times(20.0, 200.0, 10), |_| 0.0);
        assert!(fit_decay_exponent(&trace, FIT_WINDOW).is_err());
        assert!(fit_decay_exponent(&trace, (5.0, 5.0)).is_err());
    }

    #[test]
    fn free_chain_sup_norm_is_bessel_max() {
        let m_len = 512;
        let a1 = Operator1D::free(2, Boundary::Dirichlet).unwrap();
        let plan = PropagatorPlan::new(&a1, m_len, FreeMethod::DftMultiplier).unwrap();
        // all weight on n = 0; the n-part only mixes two sites
        let mut psi0 = LatticeState2D::zeros(2, m_len);
        psi0.set(0, m_len / 2, num_complex::Complex64::new(1.0, 0.0));
        let free_plan = PropagatorPlan::new(&a1, m_len, FreeMethod::BesselKernel).unwrap();
        let times = [0.0, 1.0, 10.0, 50.0];
        let trace = record_decay(&plan, &psi0, &times).unwrap();
        let via_kernel = record_decay(&free_plan, &psi0, &times).unwrap();
        assert!((trace.snapshots[0].sup_norm - 1.0).abs() < 1e-14);
        for (s, k) in trace.snapshots.iter().zip(&via_kernel.snapshots) {
            // column norm over the two n-sites is the free modulus |J_m(2t)|
            let j = bessel_j_orders(400, 2.0 * s.t);
            let bessel_max = j.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            assert!((s.l2n_linfm - bessel_max).abs() < 1e-12, "t={}", s.t);
            assert!((s.l2n_linfm - k.l2n_linfm).abs() < 1e-10);
        }
        assert!(trace.check_chain(ChainTolerance::default()).passed);
    }

    #[test]
    fn wrap_free_check_names_grid() {
        let a1 = Operator1D::free(2, Boundary::Dirichlet).unwrap();
        let plan = PropagatorPlan::new(&a1, 64, FreeMethod::DftMultiplier).unwrap();
        let psi0 = LatticeState2D::delta(2, 64, 0, 32);
        match record_decay(&plan, &psi0, &[1.0, 100.0]) {
            Err(Error::WindowTooSmall {
                required,
                actual: 64,
            }) => assert_eq!(required, wrap_free_length(100.0, 1)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(record_decay(&plan, &psi0, &[2.0, 1.0]).is_err());
    }
}
