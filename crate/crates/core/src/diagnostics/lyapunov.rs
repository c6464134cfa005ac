//! Transfer-matrix Lyapunov exponents of the 1D operator `A₁`.
//!
//! A solution of `A₁χ = Eχ` obeys `χ_{n+1} = (V_n − E)χ_n − χ_{n−1}`, i.e.
//! `(χ_{n+1}, χ_n) = T_n(E)(χ_n, χ_{n−1})` with `T_n = [[V_n − E, −1], [1, 0]]`.
//! The matrix `[[E − V_n, −1], [1, 0]]` is conjugate to `−T_n` by
//! `diag(1, −1)`, so both give the same exponent.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{Boundary, Operator1D};
use crate::potential::{sample_potential, PotentialSpec, Window};
use crate::spectral::eigh_tridiagonal;

/// Steps between renormalizations of the running product.
pub const RENORMALIZE_EVERY: usize = 32;
/// Shortest product length accepted.
pub const MIN_LENGTH: usize = 1000;

const CHUNK: usize = 1 << 16;

/// `(1/L) log ‖T_L(E) ⋯ T_1(E)‖` with the potential sampled on `[1, L]`.
pub fn lyapunov_exponent(spec: &PotentialSpec, energy: f64, length: usize) -> Result<f64> {
    if length < MIN_LENGTH {
        return Err(Error::invalid(format!(
            "transfer product length {length} below minimum {MIN_LENGTH}"
        )));
    }
    if !energy.is_finite() {
        return Err(Error::invalid("energy must be finite"));
    }
    let mut p = [[1.0f64, 0.0], [0.0, 1.0]];
    let mut log_scale = 0.0;
    let mut step = 0usize;
    let mut start = 1i64;
    while step < length {
        let len = CHUNK.min(length - step);
        let v = sample_potential(spec, Window::new(start, len))?;
        for &vn in v.values() {
            let a = vn - energy;
            p = [
                [a * p[0][0] - p[1][0], a * p[0][1] - p[1][1]],
                [p[0][0], p[0][1]],
            ];
            step += 1;
            if step.is_multiple_of(RENORMALIZE_EVERY) {
                let s = p.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::Numerical(format!(
                        "transfer product degenerated at step {step}"
                    )));
                }
                for x in p.iter_mut().flatten() {
                    *x /= s;
                }
                log_scale += s.ln();
            }
        }
        start += len as i64;
    }
    let norm = operator_norm(&p);
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::Numerical("transfer product degenerated".into()));
    }
    Ok((log_scale + norm.ln()) / length as f64)
}

fn operator_norm(p: &[[f64; 2]; 2]) -> f64 {
    let frob = p.iter().flatten().map(|x| x * x).sum::<f64>();
    let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    let disc = (frob * frob - 4.0 * det * det).max(0.0).sqrt();
    (0.5 * (frob + disc)).sqrt()
}

/// Eigenvalues of the Dirichlet truncation on `[0, size)` whose eigenvectors
/// are centred in the middle half of the window, thinned to at most `count`
/// evenly spread values. Avoids boundary states sitting in spectral gaps.
pub fn on_spectrum_energies(spec: &PotentialSpec, size: usize, count: usize) -> Result<Vec<f64>> {
    let potential = sample_potential(spec, Window::from_origin(size))?;
    let es = eigh_tridiagonal(&Operator1D::schrodinger(&potential, Boundary::Dirichlet)?)?;
    let interior: Vec<f64> = (0..es.size())
        .filter(|&j| {
            let centroid: f64 = es
                .eigenvector(j)
                .iter()
                .enumerate()
                .map(|(k, v)| k as f64 * v * v)
                .sum();
            centroid >= size as f64 / 4.0 && centroid <= 3.0 * size as f64 / 4.0
        })
        .map(|j| es.eigenvalues()[j])
        .collect();
    if interior.is_empty() || count == 0 {
        return Ok(Vec::new());
    }
    let take = count.min(interior.len());
    if take == 1 {
        return Ok(vec![interior[interior.len() / 2]]);
    }
    Ok((0..take)
        .map(|i| interior[i * (interior.len() - 1) / (take - 1)])
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovPoint {
    pub energy: f64,
    pub gamma: f64,
    pub length: usize,
}

/// Independent energies evaluated on scoped worker threads.
pub fn lyapunov_scan(
    spec: &PotentialSpec,
    energies: &[f64],
    length: usize,
    threads: usize,
) -> Result<Vec<LyapunovPoint>> {
    let threads = threads.max(1).min(energies.len().max(1));
    let chunk = energies.len().div_ceil(threads).max(1);
    let results: Vec<Result<Vec<LyapunovPoint>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = energies
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&energy| {
                            Ok(LyapunovPoint {
                                energy,
                                gamma: lyapunov_exponent(spec, energy, length)?,
                                length,
                            })
                        })
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("lyapunov worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(energies.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// CSV with columns `E,gamma,L`.
pub fn write_scan_csv<W: Write>(points: &[LyapunovPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "E,gamma,L")?;
    for p in points {
        writeln!(out, "{:e},{:e},{}", p.energy, p.gamma, p.length)?;
    }
    Ok(())
}
