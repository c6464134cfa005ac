//! Complex amplitudes on an `N×M` grid and the matrix-free 2D operator.
//!
//! Storage is row-major in `(n, m)`: the `m`-fiber at fixed `n` is contiguous.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::operator::Operator1D;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState2D {
    n_len: usize,
    m_len: usize,
    offset: (i64, i64),
    amplitudes: Vec<Complex64>,
}

impl LatticeState2D {
    pub fn zeros(n_len: usize, m_len: usize) -> Self {
        LatticeState2D {
            n_len,
            m_len,
            offset: (0, 0),
            amplitudes: vec![Complex64::new(0.0, 0.0); n_len * m_len],
        }
    }

    pub fn from_vec(n_len: usize, m_len: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != n_len * m_len {
            return Err(Error::shape(n_len * m_len, amplitudes.len()));
        }
        Ok(LatticeState2D {
            n_len,
            m_len,
            offset: (0, 0),
            amplitudes,
        })
    }

    pub fn from_fn(
        n_len: usize,
        m_len: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut amplitudes = Vec::with_capacity(n_len * m_len);
        for n in 0..n_len {
            for m in 0..m_len {
                amplitudes.push(f(n, m));
            }
        }
        LatticeState2D {
            n_len,
            m_len,
            offset: (0, 0),
            amplitudes,
        }
    }

    /// Unit mass at grid position `(n, m)`.
    pub fn delta(n_len: usize, m_len: usize, n: usize, m: usize) -> Self {
        let mut s = Self::zeros(n_len, m_len);
        s.amplitudes[n * m_len + m] = Complex64::new(1.0, 0.0);
        s
    }

    /// `χ ⊗ φ`, i.e. `ψ_{n,m} = χ_n φ_m`.
    pub fn pure_tensor(chi: &[Complex64], phi: &[Complex64]) -> Self {
        Self::from_fn(chi.len(), phi.len(), |n, m| chi[n] * phi[m])
    }

    /// Entries with independent real and imaginary parts uniform on `[-1, 1]`.
    pub fn random(n_len: usize, m_len: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut unit = || (rng.next_u64() >> 11) as f64 * (2.0 / (1u64 << 53) as f64) - 1.0;
        Self::from_fn(n_len, m_len, |_, _| Complex64::new(unit(), unit()))
    }

    pub fn with_offset(mut self, n0: i64, m0: i64) -> Self {
        self.offset = (n0, m0);
        self
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n_len, self.m_len)
    }

    pub fn n_len(&self) -> usize {
        self.n_len
    }

    pub fn m_len(&self) -> usize {
        self.m_len
    }

    /// Lattice coordinates of grid position `(0, 0)`.
    pub fn offset(&self) -> (i64, i64) {
        self.offset
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.amplitudes[n * self.m_len + m]
    }

    pub fn set(&mut self, n: usize, m: usize, value: Complex64) {
        self.amplitudes[n * self.m_len + m] = value;
    }

    /// The `m`-fiber at fixed `n`.
    pub fn row(&self, n: usize) -> &[Complex64] {
        &self.amplitudes[n * self.m_len..(n + 1) * self.m_len]
    }

    /// The `n`-fiber at fixed `m` (copied).
    pub fn column(&self, m: usize) -> Vec<Complex64> {
        (0..self.n_len).map(|n| self.get(n, m)).collect()
    }

    pub fn set_column(&mut self, m: usize, values: &[Complex64]) {
        for (n, v) in values.iter().enumerate() {
            self.set(n, m, *v);
        }
    }

    /// `⟨self, other⟩ = Σ self · conj(other)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm()).sum()
    }

    pub fn norm_linf(&self) -> f64 {
        self.amplitudes.iter().fold(0.0, |acc, a| acc.max(a.norm()))
    }

    /// `‖ψ‖_{ℓ²_n}` for every `m`.
    pub fn column_l2_norms(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.m_len];
        for n in 0..self.n_len {
            for (s, a) in acc.iter_mut().zip(self.row(n)) {
                *s += a.norm_sqr();
            }
        }
        acc.into_iter().map(f64::sqrt).collect()
    }

    /// `‖‖ψ‖_{ℓ²_n}‖_{ℓ∞_m}`.
    pub fn norm_l2n_linfm(&self) -> f64 {
        self.column_l2_norms().into_iter().fold(0.0, f64::max)
    }

    /// `‖‖ψ‖_{ℓ∞_m}‖_{ℓ²_n}`.
    pub fn norm_linfm_l2n(&self) -> f64 {
        (0..self.n_len)
            .map(|n| {
                let sup = self.row(n).iter().fold(0.0f64, |acc, a| acc.max(a.norm()));
                sup * sup
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `‖‖ψ‖_{ℓ¹_m}‖_{ℓ²_n}`.
    pub fn norm_l1m_l2n(&self) -> f64 {
        (0..self.n_len)
            .map(|n| {
                let s: f64 = self.row(n).iter().map(|a| a.norm()).sum();
                s * s
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    /// `‖self - other‖₂`.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `Hψ = (A₁ ⊗ I)ψ + (I ⊗ A₂)ψ`: `a1` acts along `n`, `a2` along `m`.
pub fn apply_h2d(
    state: &LatticeState2D,
    a1: &Operator1D,
    a2: &Operator1D,
) -> Result<LatticeState2D> {
    let (n_len, m_len) = state.dims();
    if a1.size() != n_len || a2.size() != m_len {
        return Err(Error::shape(
            format!("{n_len}×{m_len} operators"),
            format!("{}×{}", a1.size(), a2.size()),
        ));
    }
    let mut out = LatticeState2D::zeros(n_len, m_len).with_offset(state.offset.0, state.offset.1);
    for n in 0..n_len {
        let start = n * m_len;
        a2.apply_into(state.row(n), &mut out.amplitudes[start..start + m_len]);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); n_len];
    let mut image = column.clone();
    for m in 0..m_len {
        for (n, c) in column.iter_mut().enumerate() {
            *c = state.get(n, m);
        }
        a1.apply_into(&column, &mut image);
        for (n, v) in image.iter().enumerate() {
            out.amplitudes[n * m_len + m] += v;
        }
    }
    Ok(out)
}

/// `⟨Hψ, ψ⟩`, real for self-adjoint `H`.
pub fn energy_expectation(state: &LatticeState2D, a1: &Operator1D, a2: &Operator1D) -> Result<f64> {
    Ok(apply_h2d(state, a1, a2)?.inner(state).re)
}

/// `⟨H²ψ, ψ⟩ = ‖Hψ‖²`.
pub fn energy_second_moment(
    state: &LatticeState2D,
    a1: &Operator1D,
    a2: &Operator1D,
) -> Result<f64> {
    Ok(apply_h2d(state, a1, a2)?.norm_l2().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Boundary;
    use crate::potential::{sample_potential, PotentialSpec, Window};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn free_stencil_on_delta() {
        let a1 = Operator1D::free(5, Boundary::Dirichlet).unwrap();
        let a2 = Operator1D::free(5, Boundary::Dirichlet).unwrap();
        let out = apply_h2d(&LatticeState2D::delta(5, 5, 2, 2), &a1, &a2).unwrap();
        for n in 0..5usize {
            for m in 0..5usize {
                let expected = if n.abs_diff(2) + m.abs_diff(2) == 1 {
                    -1.0
                } else {
                    0.0
                };
                assert_eq!(out.get(n, m), c(expected));
            }
        }
        // corner delta keeps only in-grid neighbours
        let out = apply_h2d(&LatticeState2D::delta(5, 5, 0, 0), &a1, &a2).unwrap();
        assert!((out.norm_l2().powi(2) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn expectation_is_real() {
        let p = sample_potential(
            &PotentialSpec::almost_mathieu(3.0, 0.2),
            Window::from_origin(8),
        )
        .unwrap();
        let a1 = Operator1D::schrodinger(&p, Boundary::Dirichlet).unwrap();
        let a2 = Operator1D::free(8, Boundary::Periodic).unwrap();
        let psi = LatticeState2D::random(8, 8, 7);
        let e = apply_h2d(&psi, &a1, &a2).unwrap().inner(&psi);
        assert!(e.im.abs() <= 1e-12);
    }

    #[test]
    fn tensor_formula() {
        let p = sample_potential(
            &PotentialSpec::RandomIid {
                width: 1.5,
                seed: 3,
            },
            Window::from_origin(6),
        )
        .unwrap();
        let a1 = Operator1D::schrodinger(&p, Boundary::Dirichlet).unwrap();
        let a2 = Operator1D::free(9, Boundary::Periodic).unwrap();
        let chi: Vec<Complex64> = (0..6)
            .map(|k| Complex64::new((k as f64).cos(), 0.5 * k as f64))
            .collect();
        let phi: Vec<Complex64> = (0..9)
            .map(|k| Complex64::new(1.0 / (k as f64 + 1.0), -(k as f64).sin()))
            .collect();
        let h = apply_h2d(&LatticeState2D::pure_tensor(&chi, &phi), &a1, &a2).unwrap();
        let a1chi = a1.apply(&chi).unwrap();
        let a2phi = a2.apply(&phi).unwrap();
        for n in 0..6 {
            for m in 0..9 {
                let expected = a1chi[n] * phi[m] + chi[n] * a2phi[m];
                assert!((h.get(n, m) - expected).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn shape_mismatch() {
        let a1 = Operator1D::free(4, Boundary::Dirichlet).unwrap();
        let a2 = Operator1D::free(5, Boundary::Dirichlet).unwrap();
        assert!(apply_h2d(&LatticeState2D::zeros(5, 4), &a1, &a2).is_err());
    }

    #[test]
    fn mixed_norms() {
        let s = LatticeState2D::from_fn(2, 3, |n, m| c((n * 3 + m) as f64));
        // rows (0,1,2), (3,4,5)
        assert_eq!(s.norm_linf(), 5.0);
        assert!((s.norm_l2n_linfm() - 29f64.sqrt()).abs() < 1e-15);
        assert!((s.norm_linfm_l2n() - 29f64.sqrt()).abs() < 1e-15);
        assert!((s.norm_l1m_l2n() - (9.0f64 + 144.0).sqrt()).abs() < 1e-15);
        assert_eq!(s.norm_l1(), 15.0);
    }
}
