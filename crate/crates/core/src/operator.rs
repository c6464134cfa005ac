//! Finite truncations of `A₁ = -Δ + V` and of the free chain `-Δ_m`.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential1D;

/// Hopping amplitude of every off-diagonal entry.
pub const HOPPING: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Missing neighbours are zero.
    #[default]
    Dirichlet,
    /// Site `N-1` couples to site `0`.
    Periodic,
}

/// Symmetric `N×N` truncation with stencil `-(χ_{n+1} + χ_{n-1}) + d_n χ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator1D {
    diagonal: Vec<f64>,
    boundary: Boundary,
}

/// Builds the truncation of `A₁` from a sampled potential, or of `-Δ` when
/// `potential` is `None`.
pub fn build_operator_1d(
    potential: Option<&Potential1D>,
    size: usize,
    boundary: Boundary,
) -> Result<Operator1D> {
    match potential {
        Some(p) if p.len() != size => {
            Err(Error::shape(format!("potential of length {size}"), p.len()))
        }
        Some(p) => Operator1D::new(p.values().to_vec(), boundary),
        None => Operator1D::free(size, boundary),
    }
}

impl Operator1D {
    pub fn new(diagonal: Vec<f64>, boundary: Boundary) -> Result<Self> {
        if diagonal.len() < 2 {
            return Err(Error::invalid(format!(
                "operator size must be at least 2, got {}",
                diagonal.len()
            )));
        }
        if diagonal.iter().any(|d| !d.is_finite()) {
            return Err(Error::invalid("operator diagonal must be finite"));
        }
        Ok(Operator1D { diagonal, boundary })
    }

    /// Free chain `-Δ`.
    pub fn free(size: usize, boundary: Boundary) -> Result<Self> {
        Self::new(vec![0.0; size], boundary)
    }

    pub fn schrodinger(potential: &Potential1D, boundary: Boundary) -> Result<Self> {
        Self::new(potential.values().to_vec(), boundary)
    }

    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> f64 {
        HOPPING
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_free(&self) -> bool {
        self.diagonal.iter().all(|&d| d == 0.0)
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.diagonal.iter().fold(0.0f64, |acc, d| acc.max(d.abs())) + 2.0 * HOPPING.abs()
    }

    /// Writes `A x` into `out`. Generic over real and complex amplitudes.
    pub fn apply_into<T>(&self, x: &[T], out: &mut [T])
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    {
        let n = self.size();
        assert_eq!(x.len(), n, "vector length must match operator size");
        assert_eq!(out.len(), n, "output length must match operator size");
        for i in 0..n {
            let mut acc = x[i] * self.diagonal[i];
            if i + 1 < n {
                acc = acc + x[i + 1] * HOPPING;
            } else if self.boundary == Boundary::Periodic {
                acc = acc + x[0] * HOPPING;
            }
            if i > 0 {
                acc = acc + x[i - 1] * HOPPING;
            } else if self.boundary == Boundary::Periodic {
                acc = acc + x[n - 1] * HOPPING;
            }
            out[i] = acc;
        }
    }

    pub fn apply<T>(&self, x: &[T]) -> Result<Vec<T>>
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    {
        if x.len() != self.size() {
            return Err(Error::shape(self.size(), x.len()));
        }
        let mut out = x.to_vec();
        self.apply_into(x, &mut out);
        Ok(out)
    }

    /// Dense row-major matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.size();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] += self.diagonal[i];
            let neighbours = [
                (i + 1 < n)
                    .then(|| i + 1)
                    .or((self.boundary == Boundary::Periodic).then_some(0)),
                (i > 0)
                    .then(|| i - 1)
                    .or((self.boundary == Boundary::Periodic).then_some(n - 1)),
            ];
            for j in neighbours.into_iter().flatten() {
                a[i * n + j] += HOPPING;
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_dirichlet_stencil() {
        let op = Operator1D::free(3, Boundary::Dirichlet).unwrap();
        assert_eq!(op.apply(&[1.0, 0.0, 0.0]).unwrap(), vec![0.0, -1.0, 0.0]);
    }

    #[test]
    fn free_periodic_wraps() {
        let op = Operator1D::free(3, Boundary::Periodic).unwrap();
        assert_eq!(op.apply(&[1.0, 0.0, 0.0]).unwrap(), vec![0.0, -1.0, -1.0]);
    }

    #[test]
    fn constant_potential_shift() {
        let p = Potential1D::new(0, vec![5.0; 3]).unwrap();
        let op = build_operator_1d(Some(&p), 3, Boundary::Dirichlet).unwrap();
        assert_eq!(op.apply(&[0.0, 1.0, 0.0]).unwrap(), vec![-1.0, 5.0, -1.0]);
    }

    #[test]
    fn dense_matches_stencil() {
        for boundary in [Boundary::Dirichlet, Boundary::Periodic] {
            for n in [2, 3, 7] {
                let op = Operator1D::new((0..n).map(|k| k as f64 * 0.3 - 1.0).collect(), boundary)
                    .unwrap();
                let dense = op.to_dense();
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(dense[i * n + j], dense[j * n + i]);
                    }
                }
                let x: Vec<f64> = (0..n).map(|k| (k as f64 + 1.0).sin()).collect();
                let y = op.apply(&x).unwrap();
                for i in 0..n {
                    let dy: f64 = (0..n).map(|j| dense[i * n + j] * x[j]).sum();
                    assert!((dy - y[i]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn size_errors() {
        assert!(Operator1D::free(1, Boundary::Dirichlet).is_err());
        let p = Potential1D::new(0, vec![0.0; 4]).unwrap();
        assert!(build_operator_1d(Some(&p), 5, Boundary::Dirichlet).is_err());
        let op = Operator1D::free(3, Boundary::Dirichlet).unwrap();
        assert!(op.apply(&[1.0, 2.0]).is_err());
    }
}
