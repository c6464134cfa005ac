use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{Boundary, Operator1D};

/// Iterations allowed per eigenvalue in the implicit QL sweep.
pub const QL_MAX_ITERATIONS: usize = 60;

/// Largest periodic truncation handed to the dense fallback.
pub const DENSE_FALLBACK_CAP: usize = 4096;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a truncation.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    // eigenvector j occupies vectors[j*n..(j+1)*n]
    vectors: Vec<f64>,
    source: Operator1D,
}

impl EigenSystem {
    pub fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, j: usize) -> &[f64] {
        let n = self.size();
        &self.vectors[j * n..(j + 1) * n]
    }

    pub fn source(&self) -> &Operator1D {
        &self.source
    }

    /// Coefficients `⟨v_j, x⟩ = Σ_k v_j[k] x[k]` for every `j`.
    pub fn project(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.size();
        if x.len() != n {
            return Err(Error::shape(n, x.len()));
        }
        Ok((0..n)
            .map(|j| self.eigenvector(j).iter().zip(x).map(|(v, a)| a * *v).sum())
            .collect())
    }

    /// `Σ_j c_j v_j`.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, c) in coefficients.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.eigenvector(j)) {
                *o += c * *v;
            }
        }
        out
    }

    /// `max_j ‖A v_j − λ_j v_j‖₂`.
    pub fn max_residual(&self) -> f64 {
        let n = self.size();
        let mut image = vec![0.0; n];
        (0..n)
            .map(|j| {
                let v = self.eigenvector(j);
                self.source.apply_into(v, &mut image);
                image
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a - self.eigenvalues[j] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max_{i,j} |⟨v_i, v_j⟩ − δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let dot: f64 = self
                    .eigenvector(i)
                    .iter()
                    .zip(self.eigenvector(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Full eigendecomposition of a 1D truncation.
///
/// Dirichlet truncations are tridiagonal and go through implicit QL with
/// Wilkinson-type shifts. The periodic corner breaks tridiagonality, so those
/// use a dense symmetric solver.
pub fn eigh_tridiagonal(op: &Operator1D) -> Result<EigenSystem> {
    let n = op.size();
    let (eigenvalues, vectors) = match op.boundary() {
        Boundary::Dirichlet => {
            let mut d = op.diagonal().to_vec();
            let mut e = vec![op.off_diagonal(); n];
            e[n - 1] = 0.0;
            let mut z = identity(n);
            tql_implicit(&mut d, &mut e, &mut z)?;
            sort_pairs(d, z)
        }
        Boundary::Periodic => {
            if n > DENSE_FALLBACK_CAP {
                return Err(Error::Unsupported(format!(
                    "periodic truncation of size {n} exceeds dense fallback cap {DENSE_FALLBACK_CAP}"
                )));
            }
            dense_symmetric_eigen(n, &op.to_dense())?
        }
    };
    Ok(EigenSystem {
        eigenvalues,
        vectors,
        source: op.clone(),
    })
}

/// Dense symmetric eigendecomposition of a row-major `n×n` matrix. Returns
/// ascending eigenvalues and eigenvectors laid out contiguously.
pub fn dense_symmetric_eigen(n: usize, matrix: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if matrix.len() != n * n {
        return Err(Error::shape(n * n, matrix.len()));
    }
    let a = Mat::<f64>::from_fn(n, n, |i, j| matrix[i * n + j]);
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence {
            iterations: 0,
            residual: f64::NAN,
        })?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let values: Vec<f64> = (0..n).map(|j| s[j]).collect();
    let mut vectors = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            vectors[j * n + k] = u[(k, j)];
        }
    }
    Ok(sort_pairs(values, vectors))
}

fn identity(n: usize) -> Vec<f64> {
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    z
}

fn sort_pairs(values: Vec<f64>, vectors: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut sorted_vectors = Vec::with_capacity(n * n);
    for &j in &order {
        sorted_vectors.extend_from_slice(&vectors[j * n..(j + 1) * n]);
    }
    (order.iter().map(|&j| values[j]).collect(), sorted_vectors)
}

/// Implicit QL on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e[i]` couples `i` and `i+1` (`e[n-1]` unused).
/// `z` starts as the identity; on return `z[j*n..]` is the eigenvector of
/// `d[j]`. Eigenvalues are left unsorted.
fn tql_implicit(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > QL_MAX_ITERATIONS {
                return Err(Error::NoConvergence {
                    iterations,
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (head, tail) = z.split_at_mut((i + 1) * n);
                let zi = &mut head[i * n..];
                let zi1 = &mut tail[..n];
                for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *b;
                    *b = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn two_site_hopping() {
        let es = eigh_tridiagonal(&Operator1D::free(2, Boundary::Dirichlet).unwrap()).unwrap();
        assert!((es.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((es.eigenvalues()[1] - 1.0).abs() < 1e-15);
    }

    /// Cyclic Jacobi rotations on the dense matrix: an oracle sharing no code
    /// with the QL sweep.
    fn jacobi_eigenvalues(n: usize, mut a: Vec<f64>) -> Vec<f64> {
        for _ in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .map(|(i, j)| a[i * n + j].powi(2))
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn free_dirichlet_closed_form() {
        let closed = |n: usize| -> Vec<f64> {
            let mut v: Vec<f64> = (1..=n)
                .map(|k| -2.0 * (k as f64 * PI / (n as f64 + 1.0)).cos())
                .collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let op8 = Operator1D::free(8, Boundary::Dirichlet).unwrap();
        let jacobi = jacobi_eigenvalues(8, op8.to_dense());
        for (a, b) in jacobi.iter().zip(closed(8)) {
            assert!((a - b).abs() < 1e-12);
        }
        for n in [8, 100, 513] {
            let es = eigh_tridiagonal(&Operator1D::free(n, Boundary::Dirichlet).unwrap()).unwrap();
            for (a, b) in es.eigenvalues().iter().zip(closed(n)) {
                assert!((a - b).abs() < 1e-10, "n={n}");
            }
            assert!(es.max_residual() < 1e-10 * 4.0);
            assert!(es.orthonormality_defect() < 1e-10);
        }
    }

    #[test]
    fn constant_shift() {
        let free = eigh_tridiagonal(&Operator1D::free(17, Boundary::Dirichlet).unwrap()).unwrap();
        let shifted =
            eigh_tridiagonal(&Operator1D::new(vec![2.5; 17], Boundary::Dirichlet).unwrap())
                .unwrap();
        for (a, b) in free.eigenvalues().iter().zip(shifted.eigenvalues()) {
            assert!((b - a - 2.5).abs() < 1e-13);
        }
    }

    #[test]
    fn periodic_and_random_invariants() {
        let diag: Vec<f64> = (0..40)
            .map(|k| 3.0 * (2.0 * PI * crate::GOLDEN_MEAN * k as f64).cos())
            .collect();
        for boundary in [Boundary::Dirichlet, Boundary::Periodic] {
            let op = Operator1D::new(diag.clone(), boundary).unwrap();
            let es = eigh_tridiagonal(&op).unwrap();
            assert!(es.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
            assert!(es.max_residual() <= 1e-10 * op.norm_bound());
            assert!(es.orthonormality_defect() < 1e-10);
            let jacobi = jacobi_eigenvalues(40, op.to_dense());
            for (a, b) in es.eigenvalues().iter().zip(jacobi) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn periodic_free_closed_form() {
        let m = 12;
        let es = eigh_tridiagonal(&Operator1D::free(m, Boundary::Periodic).unwrap()).unwrap();
        let mut closed: Vec<f64> = (0..m)
            .map(|k| -2.0 * (2.0 * PI * k as f64 / m as f64).cos())
            .collect();
        closed.sort_by(f64::total_cmp);
        for (a, b) in es.eigenvalues().iter().zip(closed) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn project_synthesize_roundtrip() {
        let op = Operator1D::new(vec![0.3, -1.0, 2.0, 0.0, 1.1], Boundary::Dirichlet).unwrap();
        let es = eigh_tridiagonal(&op).unwrap();
        let x: Vec<Complex64> = (0..5)
            .map(|k| Complex64::new(k as f64, 1.0 - k as f64))
            .collect();
        let back = es.synthesize(&es.project(&x).unwrap());
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).norm() < 1e-13);
        }
        assert!(es.project(&x[..4]).is_err());
    }
}
