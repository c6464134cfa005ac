//! Direct `e^{iHt}` for the assembled 2D operator, independent of the
//! factorization: dense diagonalization up to a size cap, Chebyshev expansion
//! beyond it.

use num_complex::Complex64;

use super::bessel::bessel_j_orders;
use crate::error::{Error, Result};
use crate::lattice::{apply_h2d, LatticeState2D};
use crate::operator::Operator1D;
use crate::spectral::{dense_symmetric_eigen, Atom, SpectralMeasure, MERGE_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectOptions {
    /// Largest `N·M` handled by dense diagonalization.
    pub dense_cap: usize,
    /// Use the Chebyshev path above the cap instead of failing.
    pub allow_chebyshev: bool,
    /// Certified bound on the Chebyshev truncation error.
    pub chebyshev_tolerance: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        DirectOptions {
            dense_cap: 4096,
            allow_chebyshev: true,
            chebyshev_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub enum DirectPropagator {
    Dense {
        dims: (usize, usize),
        eigenvalues: Vec<f64>,
        vectors: Vec<f64>,
    },
    Chebyshev {
        a1: Operator1D,
        a2: Operator1D,
        radius: f64,
        tolerance: f64,
    },
}

impl DirectPropagator {
    pub fn new(a1: &Operator1D, a2: &Operator1D, options: &DirectOptions) -> Result<Self> {
        let sites = a1.size() * a2.size();
        if sites <= options.dense_cap {
            Self::dense(a1, a2)
        } else if options.allow_chebyshev {
            Ok(Self::chebyshev(a1, a2, options.chebyshev_tolerance))
        } else {
            Err(Error::CapExceeded(sites, options.dense_cap))
        }
    }

    /// Diagonalizes the `NM×NM` matrix whose columns are `H` applied to the
    /// lattice basis vectors.
    pub fn dense(a1: &Operator1D, a2: &Operator1D) -> Result<Self> {
        let (n_len, m_len) = (a1.size(), a2.size());
        let sites = n_len * m_len;
        let mut matrix = vec![0.0; sites * sites];
        for col in 0..sites {
            let e = LatticeState2D::delta(n_len, m_len, col / m_len, col % m_len);
            let image = apply_h2d(&e, a1, a2)?;
            for (row, v) in image.amplitudes().iter().enumerate() {
                matrix[row * sites + col] = v.re;
            }
        }
        let (eigenvalues, vectors) = dense_symmetric_eigen(sites, &matrix)?;
        Ok(DirectPropagator::Dense {
            dims: (n_len, m_len),
            eigenvalues,
            vectors,
        })
    }

    pub fn chebyshev(a1: &Operator1D, a2: &Operator1D, tolerance: f64) -> Self {
        DirectPropagator::Chebyshev {
            a1: a1.clone(),
            a2: a2.clone(),
            radius: a1.norm_bound() + a2.norm_bound(),
            tolerance,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            DirectPropagator::Dense { dims, .. } => *dims,
            DirectPropagator::Chebyshev { a1, a2, .. } => (a1.size(), a2.size()),
        }
    }

    /// Eigenpairs of the dense path, eigenvector `j` contiguous.
    pub fn dense_eigenpairs(&self) -> Option<(&[f64], &[f64])> {
        match self {
            DirectPropagator::Dense {
                eigenvalues,
                vectors,
                ..
            } => Some((eigenvalues, vectors)),
            DirectPropagator::Chebyshev { .. } => None,
        }
    }

    /// `⟨P(·)ψ, ψ⟩` of the assembled operator: atoms `|⟨u_k, ψ⟩|²` at the
    /// eigenvalues `λ_k`, merged within [`MERGE_TOLERANCE`]. Dense path only.
    pub fn spectral_measure(&self, state: &LatticeState2D) -> Result<SpectralMeasure> {
        if state.dims() != self.dims() {
            return Err(Error::shape(
                format!("{:?}", self.dims()),
                format!("{:?}", state.dims()),
            ));
        }
        let DirectPropagator::Dense {
            eigenvalues,
            vectors,
            ..
        } = self
        else {
            return Err(Error::Unsupported(
                "spectral measure needs the dense direct path".into(),
            ));
        };
        let sites = eigenvalues.len();
        let psi = state.amplitudes();
        let atoms = eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &lambda)| {
                let v = &vectors[j * sites..(j + 1) * sites];
                let c: Complex64 = v.iter().zip(psi).map(|(a, b)| b * *a).sum();
                Atom::real(lambda, c.norm_sqr())
            })
            .collect();
        Ok(SpectralMeasure::atomic(atoms).merged(MERGE_TOLERANCE))
    }

    pub fn evolve(&self, state: &LatticeState2D, t: f64) -> Result<LatticeState2D> {
        if state.dims() != self.dims() {
            return Err(Error::shape(
                format!("{:?}", self.dims()),
                format!("{:?}", state.dims()),
            ));
        }
        match self {
            DirectPropagator::Dense {
                eigenvalues,
                vectors,
                ..
            } => {
                let sites = eigenvalues.len();
                let psi = state.amplitudes();
                let mut out = vec![Complex64::new(0.0, 0.0); sites];
                for (j, &lambda) in eigenvalues.iter().enumerate() {
                    let v = &vectors[j * sites..(j + 1) * sites];
                    let c: Complex64 = v.iter().zip(psi).map(|(a, b)| b * *a).sum();
                    let c = c * Complex64::from_polar(1.0, lambda * t);
                    for (o, a) in out.iter_mut().zip(v) {
                        *o += c * *a;
                    }
                }
                let (n0, m0) = state.offset();
                Ok(
                    LatticeState2D::from_vec(state.n_len(), state.m_len(), out)?
                        .with_offset(n0, m0),
                )
            }
            DirectPropagator::Chebyshev {
                a1,
                a2,
                radius,
                tolerance,
            } => chebyshev_evolve(state, a1, a2, *radius, *tolerance, t),
        }
    }
}

/// Number of Chebyshev terms after which `Σ_{k>K} 2|J_k(τ)|` is below `tol`,
/// using `|J_k(τ)| ≤ (|τ|/2)^k / k!`.
pub fn chebyshev_terms(tau: f64, tol: f64) -> usize {
    let half = 0.5 * tau.abs();
    let mut log_term = 0.0; // log((|τ|/2)^k / k!) at k
    let mut k = 0usize;
    loop {
        k += 1;
        log_term += half.max(f64::MIN_POSITIVE).ln() - (k as f64).ln();
        let ratio = half / (k as f64 + 1.0);
        if ratio <= 0.5 {
            // geometric tail from term k+1 on
            let next = log_term + half.max(f64::MIN_POSITIVE).ln() - (k as f64 + 1.0).ln();
            let tail = 2.0 * next.exp() / (1.0 - ratio);
            if tail < tol {
                return k;
            }
        }
    }
}

/// `e^{iHt}ψ = Σ_k c_k i^k J_k(Rt) T_k(H/R) ψ` with `c_0 = 1`, `c_k = 2`.
fn chebyshev_evolve(
    state: &LatticeState2D,
    a1: &Operator1D,
    a2: &Operator1D,
    radius: f64,
    tol: f64,
    t: f64,
) -> Result<LatticeState2D> {
    let tau = radius * t;
    let terms = chebyshev_terms(tau, tol);
    let j = bessel_j_orders(terms, tau);
    let apply_scaled = |x: &LatticeState2D| -> Result<LatticeState2D> {
        let mut y = apply_h2d(x, a1, a2)?;
        y.scale(Complex64::new(1.0 / radius, 0.0));
        Ok(y)
    };
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];

    let mut prev = state.clone();
    let mut out = state.clone();
    out.scale(Complex64::new(j[0], 0.0));
    if terms == 0 {
        return Ok(out);
    }
    let mut cur = apply_scaled(state)?;
    for k in 1..=terms {
        let coeff = i_pow[k % 4] * (2.0 * j[k]);
        for (o, c) in out.amplitudes_mut().iter_mut().zip(cur.amplitudes()) {
            *o += coeff * c;
        }
        if k == terms {
            break;
        }
        let mut next = apply_scaled(&cur)?;
        for (nx, p) in next.amplitudes_mut().iter_mut().zip(prev.amplitudes()) {
            *nx = 2.0 * *nx - p;
        }
        prev = cur;
        cur = next;
    }
    Ok(out)
}

pub fn evolve_2d_direct(
    state: &LatticeState2D,
    a1: &Operator1D,
    a2: &Operator1D,
    t: f64,
) -> Result<LatticeState2D> {
    evolve_2d_direct_with(state, a1, a2, t, &DirectOptions::default())
}

pub fn evolve_2d_direct_with(
    state: &LatticeState2D,
    a1: &Operator1D,
    a2: &Operator1D,
    t: f64,
    options: &DirectOptions,
) -> Result<LatticeState2D> {
    DirectPropagator::new(a1, a2, options)?.evolve(state, t)
}
