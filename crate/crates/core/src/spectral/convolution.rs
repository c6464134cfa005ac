//! Spectral measures of 1D truncations and the tensor-convolution
//! construction of 2D spectral measures.
//!
//! For `H = A₁ ⊗ I + I ⊗ A₂` and pure tensors the matrix elements of the
//! spectral projections factor as a convolution,
//!
//! ```text
//! ⟨P(·) χ⊗φ, χ'⊗φ'⟩ = ⟨P₁(·) χ, χ'⟩ ∗ ⟨P₂(·) φ, φ'⟩,
//! ```
//!
//! and sesquilinearity extends this to finite sums of pure tensors.

use num_complex::Complex64;

use super::eigen::EigenSystem;
use super::measure::{
    check_lost, deposit, Atom, Density, EnergyGrid, SpectralMeasure, DEFAULT_BINS, MERGE_TOLERANCE,
};
use crate::error::{Error, Result};

/// `⟨P(·)χ, φ⟩` with atoms `(λ_j, ⟨v_j, χ⟩·conj⟨v_j, φ⟩)`: linear in `χ`,
/// conjugate-linear in `φ`.
pub fn spectral_measure_1d(
    es: &EigenSystem,
    chi: &[Complex64],
    phi: &[Complex64],
) -> Result<SpectralMeasure> {
    let c = es.project(chi)?;
    let d = es.project(phi)?;
    Ok(measure_from_coefficients(es, &c, &d))
}

fn measure_from_coefficients(
    es: &EigenSystem,
    c: &[Complex64],
    d: &[Complex64],
) -> SpectralMeasure {
    SpectralMeasure::atomic(
        es.eigenvalues()
            .iter()
            .zip(c.iter().zip(d))
            .map(|(&e, (a, b))| Atom::new(e, a * b.conj()))
            .collect(),
    )
}

/// Convolution `μ ∗ ν`.
///
/// Atom pairs give atoms at summed energies with product weights. Every part
/// involving a density is integrated exactly onto `grid` (the covering grid
/// when `None`); mass falling outside it is an error.
pub fn convolve_measures(
    mu: &SpectralMeasure,
    nu: &SpectralMeasure,
    grid: Option<&EnergyGrid>,
) -> Result<SpectralMeasure> {
    let mut atoms = Vec::with_capacity(mu.atoms().len() * nu.atoms().len());
    for a in mu.atoms() {
        for b in nu.atoms() {
            atoms.push(Atom::new(a.energy + b.energy, a.weight * b.weight));
        }
    }
    if mu.density().is_none() && nu.density().is_none() {
        return Ok(SpectralMeasure::atomic(atoms));
    }

    let grid = match grid {
        Some(g) => *g,
        None => EnergyGrid::covering(mu, nu, DEFAULT_BINS)?,
    };
    let mut mass = vec![Complex64::new(0.0, 0.0); grid.bins];
    let mut lost = Complex64::new(0.0, 0.0);
    let mut atom_by_density = |atoms: &[Atom], d: &Density, out: &mut [Complex64]| {
        let h = d.grid().width();
        for a in atoms {
            for k in 0..d.grid().bins {
                let m = d.bin_mass(k) * a.weight;
                if m != Complex64::new(0.0, 0.0) {
                    lost += deposit(out, &grid, a.energy + d.grid().left_edge(k), 0.0, h, m);
                }
            }
        }
    };
    if let Some(d) = nu.density() {
        atom_by_density(mu.atoms(), d, &mut mass);
    }
    if let Some(d) = mu.density() {
        atom_by_density(nu.atoms(), d, &mut mass);
    }
    if let (Some(dm), Some(dn)) = (mu.density(), nu.density()) {
        let (p, q) = (dm.grid().width(), dn.grid().width());
        for i in 0..dm.grid().bins {
            for j in 0..dn.grid().bins {
                let m = dm.bin_mass(i) * dn.bin_mass(j);
                if m != Complex64::new(0.0, 0.0) {
                    lost += deposit(
                        &mut mass,
                        &grid,
                        dm.grid().left_edge(i) + dn.grid().left_edge(j),
                        p,
                        q,
                        m,
                    );
                }
            }
        }
    }
    let expected = mu.total_mass() * nu.total_mass();
    check_lost(lost, expected, &grid)?;
    let h = grid.width();
    let density = Density::new(grid, mass.into_iter().map(|m| m / h).collect())?;
    Ok(SpectralMeasure::new(atoms, Some(density)))
}

/// One term `α χ ⊗ φ` of a finite combination of pure tensors.
#[derive(Debug, Clone)]
pub struct PureTensorTerm {
    pub alpha: Complex64,
    pub chi: Vec<Complex64>,
    pub phi: Vec<Complex64>,
}

impl PureTensorTerm {
    pub fn new(alpha: Complex64, chi: Vec<Complex64>, phi: Vec<Complex64>) -> Self {
        PureTensorTerm { alpha, chi, phi }
    }
}

/// Spectral measure `⟨P(·)ψ, ψ⟩` of `ψ = Σ_j α_j χ_j ⊗ φ_j` for the separable
/// operator with parts `es1` (along `n`) and `es2` (along `m`).
pub fn spectral_measure_2d(
    es1: &EigenSystem,
    es2: &EigenSystem,
    psi: &[PureTensorTerm],
) -> Result<SpectralMeasure> {
    spectral_measure_2d_cross(es1, es2, psi, psi)
}

/// `⟨P(·)ψ, ψ'⟩ = Σ_{j,k} α_j conj(α'_k) ⟨P₁(·)χ_j, χ'_k⟩ ∗ ⟨P₂(·)φ_j, φ'_k⟩`,
/// linear in `ψ` and conjugate-linear in `ψ'`, with atoms merged within
/// [`MERGE_TOLERANCE`].
pub fn spectral_measure_2d_cross(
    es1: &EigenSystem,
    es2: &EigenSystem,
    psi: &[PureTensorTerm],
    psi_prime: &[PureTensorTerm],
) -> Result<SpectralMeasure> {
    if psi.is_empty() || psi_prime.is_empty() {
        return Err(Error::invalid("empty combination of pure tensors"));
    }
    // (α, eigen-coefficients of χ, eigen-coefficients of φ)
    type Projected = (Complex64, Vec<Complex64>, Vec<Complex64>);
    let project = |terms: &[PureTensorTerm]| -> Result<Vec<Projected>> {
        terms
            .iter()
            .map(|t| Ok((t.alpha, es1.project(&t.chi)?, es2.project(&t.phi)?)))
            .collect()
    };
    let left = project(psi)?;
    let right = if std::ptr::eq(psi, psi_prime) {
        left.clone()
    } else {
        project(psi_prime)?
    };

    let mut parts = Vec::with_capacity(left.len() * right.len());
    for (alpha, c1, c2) in &left {
        for (beta, d1, d2) in &right {
            let mu1 = measure_from_coefficients(es1, c1, d1);
            let mu2 = measure_from_coefficients(es2, c2, d2);
            parts.push(convolve_measures(&mu1, &mu2, None)?.scaled(alpha * beta.conj()));
        }
    }
    Ok(SpectralMeasure::sum(&parts)?.merged(MERGE_TOLERANCE))
}
