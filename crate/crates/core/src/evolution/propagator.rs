//! Eigenbasis propagator of `A₁` and the factorized 2D propagator
//! `e^{iHt} = e^{iA₁t} e^{i(-Δ_m)t}`.

use num_complex::Complex64;

use super::free::{apply_dense, FreeMethod, FreePropagator};
use crate::error::{Error, Result};
use crate::lattice::LatticeState2D;
use crate::operator::Operator1D;
use crate::spectral::{eigh_tridiagonal, EigenSystem};

/// `Σ_j e^{iλ_j t} ⟨v_j, χ⟩ v_j`.
pub fn evolve_1d_eigen(es: &EigenSystem, chi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    let coefficients: Vec<Complex64> = es
        .project(chi)?
        .into_iter()
        .zip(es.eigenvalues())
        .map(|(c, &lambda)| c * Complex64::from_polar(1.0, lambda * t))
        .collect();
    Ok(es.synthesize(&coefficients))
}

/// Row-major matrix of `V diag(e^{iλt}) Vᵀ`.
pub fn eigen_propagator_matrix(es: &EigenSystem, t: f64) -> Vec<Complex64> {
    let n = es.size();
    let mut u = vec![Complex64::new(0.0, 0.0); n * n];
    for (j, &lambda) in es.eigenvalues().iter().enumerate() {
        let phase = Complex64::from_polar(1.0, lambda * t);
        let v = es.eigenvector(j);
        for (r, &vr) in v.iter().enumerate() {
            let pr = phase * vr;
            for (slot, &vc) in u[r * n..(r + 1) * n].iter_mut().zip(v) {
                *slot += pr * vc;
            }
        }
    }
    u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepOrder {
    /// `n`-fibers first, then `m`-fibers.
    #[default]
    NThenM,
    MThenN,
}

/// Everything needed to apply `e^{iHt}` for one splitting `A₁ ⊗ I + I ⊗ (-Δ_m)`.
#[derive(Debug, Clone)]
pub struct PropagatorPlan {
    es1: EigenSystem,
    a2: Operator1D,
    free: FreePropagator,
}

impl PropagatorPlan {
    /// `a1` acts along `n`; the free chain along `m` has `m_len` sites and the
    /// boundary implied by `method`.
    pub fn new(a1: &Operator1D, m_len: usize, method: FreeMethod) -> Result<Self> {
        Ok(PropagatorPlan {
            es1: eigh_tridiagonal(a1)?,
            a2: Operator1D::free(m_len, method.boundary())?,
            free: FreePropagator::new(m_len, method)?,
        })
    }

    pub fn es1(&self) -> &EigenSystem {
        &self.es1
    }

    pub fn a1(&self) -> &Operator1D {
        self.es1.source()
    }

    /// The finite free chain matching the `m`-axis method, for energies and
    /// for the direct oracle.
    pub fn a2(&self) -> &Operator1D {
        &self.a2
    }

    pub fn method(&self) -> FreeMethod {
        self.free.method()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.es1.size(), self.free.len())
    }

    fn check(&self, state: &LatticeState2D) -> Result<()> {
        if state.dims() != self.dims() {
            let (n, m) = self.dims();
            let (sn, sm) = state.dims();
            return Err(Error::shape(format!("{n}×{m} state"), format!("{sn}×{sm}")));
        }
        Ok(())
    }

    /// `(I ⊗ e^{i(-Δ_m)t})ψ`: every `m`-fiber through the free propagator.
    pub fn sweep_m(&self, state: &mut LatticeState2D, t: f64) -> Result<()> {
        self.check(state)?;
        self.free.evolve_fibers(state.amplitudes_mut(), t)
    }

    /// `(e^{iA₁t} ⊗ I)ψ`: every `n`-fiber through the eigenbasis propagator.
    pub fn sweep_n(&self, state: &mut LatticeState2D, t: f64) -> Result<()> {
        self.check(state)?;
        let (n_len, m_len) = state.dims();
        let u = eigen_propagator_matrix(&self.es1, t);
        let mut column = vec![Complex64::new(0.0, 0.0); n_len];
        let mut image = column.clone();
        for m in 0..m_len {
            for (n, c) in column.iter_mut().enumerate() {
                *c = state.get(n, m);
            }
            apply_dense(&u, &column, &mut image);
            state.set_column(m, &image);
        }
        Ok(())
    }

    pub fn evolve(&self, state: &LatticeState2D, t: f64) -> Result<LatticeState2D> {
        self.evolve_ordered(state, t, SweepOrder::default())
    }

    pub fn evolve_ordered(
        &self,
        state: &LatticeState2D,
        t: f64,
        order: SweepOrder,
    ) -> Result<LatticeState2D> {
        let mut out = state.clone();
        match order {
            SweepOrder::NThenM => {
                self.sweep_n(&mut out, t)?;
                self.sweep_m(&mut out, t)?;
            }
            SweepOrder::MThenN => {
                self.sweep_m(&mut out, t)?;
                self.sweep_n(&mut out, t)?;
            }
        }
        Ok(out)
    }
}

pub fn evolve_2d_factorized(
    state: &LatticeState2D,
    plan: &PropagatorPlan,
    t: f64,
) -> Result<LatticeState2D> {
    plan.evolve(state, t)
}
