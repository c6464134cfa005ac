//! The 2D spectral measure of a separable operator as a convolution of 1D
//! measures, checked against diagonalizing the assembled 2D matrix.

use coupled_chains::evolution::DirectPropagator;
use coupled_chains::harness::state_from_terms;
use coupled_chains::spectral::{
    atom_discrepancy, convolve_measures, eigh_tridiagonal, spectral_measure_1d,
    spectral_measure_2d, PureTensorTerm, MERGE_TOLERANCE,
};
use coupled_chains::{
    sample_potential, Boundary, Complex64, LatticeState2D, Operator1D, PotentialSpec, Window,
};

pub fn run_example() -> coupled_chains::Result<()> {
    let (n, m) = (24, 20);
    let v = sample_potential(
        &PotentialSpec::almost_mathieu(3.0, 0.3),
        Window::from_origin(n),
    )?;
    let a1 = Operator1D::schrodinger(&v, Boundary::Dirichlet)?;
    let a2 = Operator1D::free(m, Boundary::Dirichlet)?;
    let (es1, es2) = (eigh_tridiagonal(&a1)?, eigh_tridiagonal(&a2)?);

    let chi = LatticeState2D::random(1, n, 1).amplitudes().to_vec();
    let phi = LatticeState2D::random(1, m, 2).amplitudes().to_vec();
    let mut delta = vec![Complex64::new(0.0, 0.0); n];
    delta[n / 2] = Complex64::new(1.0, 0.0);
    let terms = vec![
        PureTensorTerm::new(Complex64::new(1.0, 0.0), chi.clone(), phi.clone()),
        PureTensorTerm::new(Complex64::new(0.0, 0.7), delta, phi.clone()),
    ];

    let mu = spectral_measure_1d(&es1, &chi, &chi)?;
    let nu = spectral_measure_1d(&es2, &phi, &phi)?;
    let conv = convolve_measures(&mu, &nu, None)?;
    println!(
        "mass(μ∗ν) = {:.12}, mass(μ)·mass(ν) = {:.12}",
        conv.total_mass().re,
        (mu.total_mass() * nu.total_mass()).re
    );

    let direct = DirectPropagator::dense(&a1, &a2)?;
    let single = direct.spectral_measure(&LatticeState2D::pure_tensor(&chi, &phi))?;
    let two = direct.spectral_measure(&state_from_terms(n, m, &terms))?;
    let via_tensor = spectral_measure_2d(&es1, &es2, &terms)?;
    println!(
        "pure tensor: {} atoms, discrepancy vs dense {:.2e}",
        single.atoms().len(),
        atom_discrepancy(&conv.merged(MERGE_TOLERANCE), &single, MERGE_TOLERANCE)
    );
    println!(
        "two terms:   {} atoms, discrepancy vs dense {:.2e}",
        two.atoms().len(),
        atom_discrepancy(&via_tensor, &two, MERGE_TOLERANCE)
    );
    Ok(())
}

fn main() -> coupled_chains::Result<()> {
    run_example()
}
