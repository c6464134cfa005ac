//! Propagators `e^{i(-Δ)t}` of the free chain.
//!
//! The symbol of `-Δ` is `-2cos θ`, so on a periodic chain of length `M` the
//! propagator multiplies Fourier mode `k` by `e^{-2it·cos(2πk/M)}`; on the
//! infinite lattice it is convolution with `K_d(t) = (-i)^d J_d(2t)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::bessel::bessel_j_orders;
use super::propagator::eigen_propagator_matrix;
use crate::error::{Error, Result};
use crate::operator::{Boundary, Operator1D};
use crate::spectral::{eigh_tridiagonal, EigenSystem};

/// Largest kernel tail mass `Σ_{|d|>K} |K_d(t)|²` tolerated when truncating
/// the Bessel kernel.
pub const KERNEL_TAIL_MASS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeMethod {
    /// Exact on a periodic chain.
    #[default]
    DftMultiplier,
    /// Infinite-lattice kernel restricted to the window.
    BesselKernel,
    /// Exact on a Dirichlet chain, via its eigenbasis.
    Eigen,
}

impl FreeMethod {
    /// Boundary of the finite chain the method is exact for. The Bessel
    /// kernel models the infinite lattice, which a Dirichlet window matches
    /// while the state stays away from its ends.
    pub fn boundary(self) -> Boundary {
        match self {
            FreeMethod::DftMultiplier => Boundary::Periodic,
            FreeMethod::BesselKernel | FreeMethod::Eigen => Boundary::Dirichlet,
        }
    }
}

/// Reusable free propagator for chains of fixed length.
#[derive(Clone)]
pub struct FreePropagator {
    len: usize,
    kind: Kind,
}

#[derive(Clone)]
enum Kind {
    Dft {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    Bessel,
    Eigen(EigenSystem),
}

impl std::fmt::Debug for FreePropagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FreePropagator")
            .field("len", &self.len)
            .field("method", &self.method())
            .finish()
    }
}

impl FreePropagator {
    pub fn new(len: usize, method: FreeMethod) -> Result<Self> {
        if len < 2 {
            return Err(Error::invalid(format!(
                "free chain length must be at least 2, got {len}"
            )));
        }
        let kind = match method {
            FreeMethod::DftMultiplier => {
                let mut planner = FftPlanner::new();
                Kind::Dft {
                    forward: planner.plan_fft_forward(len),
                    inverse: planner.plan_fft_inverse(len),
                }
            }
            FreeMethod::BesselKernel => Kind::Bessel,
            FreeMethod::Eigen => Kind::Eigen(eigh_tridiagonal(&Operator1D::free(
                len,
                Boundary::Dirichlet,
            )?)?),
        };
        Ok(FreePropagator { len, kind })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn method(&self) -> FreeMethod {
        match self.kind {
            Kind::Dft { .. } => FreeMethod::DftMultiplier,
            Kind::Bessel => FreeMethod::BesselKernel,
            Kind::Eigen(_) => FreeMethod::Eigen,
        }
    }

    /// Evolves each of the given fibers (consecutive chunks of `len`) in place.
    pub fn evolve_fibers(&self, fibers: &mut [Complex64], t: f64) -> Result<()> {
        if !fibers.len().is_multiple_of(self.len) {
            return Err(Error::shape(
                format!("multiple of {}", self.len),
                fibers.len(),
            ));
        }
        match &self.kind {
            Kind::Dft { forward, inverse } => {
                let scale = 1.0 / self.len as f64;
                let multiplier: Vec<Complex64> = (0..self.len)
                    .map(|k| {
                        Complex64::from_polar(
                            scale,
                            -2.0 * t * (2.0 * PI * k as f64 / self.len as f64).cos(),
                        )
                    })
                    .collect();
                let mut scratch = vec![Complex64::new(0.0, 0.0); forward.get_inplace_scratch_len()];
                for fiber in fibers.chunks_mut(self.len) {
                    forward.process_with_scratch(fiber, &mut scratch);
                    for (a, w) in fiber.iter_mut().zip(&multiplier) {
                        *a *= w;
                    }
                    inverse.process_with_scratch(fiber, &mut scratch);
                }
            }
            Kind::Bessel => {
                let kernel = BesselKernel::new(t);
                for fiber in fibers.chunks_mut(self.len) {
                    let out = kernel.apply(fiber)?;
                    fiber.copy_from_slice(&out);
                }
            }
            Kind::Eigen(es) => {
                let u = eigen_propagator_matrix(es, t);
                let mut out = vec![Complex64::new(0.0, 0.0); self.len];
                for fiber in fibers.chunks_mut(self.len) {
                    apply_dense(&u, fiber, &mut out);
                    fiber.copy_from_slice(&out);
                }
            }
        }
        Ok(())
    }
}

/// `out = U x` for a row-major square `U`.
pub(crate) fn apply_dense(u: &[Complex64], x: &[Complex64], out: &mut [Complex64]) {
    let n = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        *o = u[i * n..(i + 1) * n]
            .iter()
            .zip(x)
            .map(|(a, b)| a * b)
            .sum();
    }
}

/// Kernel tail mass below which the Bessel kernel itself is cut off; far
/// beneath rounding of the retained entries.
const KERNEL_CUTOFF_MASS: f64 = 1e-32;

/// Truncated infinite-lattice kernel `K_d(t)` for `d = 0..=K` (even in `d`),
/// together with the half-width the window must hold around the support.
#[derive(Debug, Clone)]
pub struct BesselKernel {
    values: Vec<Complex64>,
    required_half_width: usize,
}

impl BesselKernel {
    pub fn new(t: f64) -> Self {
        let x = 2.0 * t;
        let max_order = (x.abs() + 60.0 + 12.0 * x.abs().cbrt()).ceil() as usize;
        let j = bessel_j_orders(max_order, x);
        // tail[d] = Σ_{|k|>d} J_k²
        let mut tail = vec![0.0; max_order + 1];
        for d in (0..max_order).rev() {
            tail[d] = tail[d + 1] + 2.0 * j[d + 1] * j[d + 1];
        }
        let first_below = |mass: f64| tail.iter().position(|&m| m < mass).unwrap_or(max_order);
        let half_width = first_below(KERNEL_CUTOFF_MASS);
        // (-i)^d
        let phase = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        BesselKernel {
            values: (0..=half_width).map(|d| phase[d % 4] * j[d]).collect(),
            required_half_width: first_below(KERNEL_TAIL_MASS),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Smallest `K` with `Σ_{|d|>K} |K_d(t)|² <` [`KERNEL_TAIL_MASS`].
    pub fn required_half_width(&self) -> usize {
        self.required_half_width
    }

    /// Convolves one window; contributions leaving the window carry less than
    /// the tolerated tail mass and are dropped.
    pub fn apply(&self, fiber: &[Complex64]) -> Result<Vec<Complex64>> {
        let len = fiber.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; len];
        let Some(lo) = fiber.iter().position(|a| *a != zero) else {
            return Ok(out);
        };
        let hi = fiber
            .iter()
            .rposition(|a| *a != zero)
            .expect("nonzero entry");
        let need = self.required_half_width;
        if lo < need || hi + need >= len {
            return Err(Error::WindowTooSmall {
                required: hi - lo + 1 + 2 * need,
                actual: len,
            });
        }
        for (j, a) in fiber.iter().enumerate().take(hi + 1).skip(lo) {
            for (d, k) in self.values.iter().enumerate() {
                if j + d < len {
                    out[j + d] += k * a;
                }
                if d > 0 && d <= j {
                    out[j - d] += k * a;
                }
            }
        }
        Ok(out)
    }
}

/// One-shot free evolution of a single chain.
pub fn evolve_free_1d(phi: &[Complex64], t: f64, method: FreeMethod) -> Result<Vec<Complex64>> {
    let prop = FreePropagator::new(phi.len(), method)?;
    let mut out = phi.to_vec();
    prop.evolve_fibers(&mut out, t)?;
    Ok(out)
}

/// Smallest periodic length keeping a state of the given support width free
/// of wrap-around up to `t_max`: the group speed of `-Δ` is at most 2, so the
/// front travels `2·t_max` each way, plus a margin for the Airy tail.
pub fn wrap_free_length(t_max: f64, support_width: usize) -> usize {
    let t = t_max.abs();
    let margin = 16.0 + 8.0 * t.cbrt();
    support_width + (4.0 * t + 2.0 * margin).ceil() as usize
}
