//! Largest atom of the 2D spectral measure at δ⊗δ as the free direction
//! grows: it shrinks like 1/M, the finite-size trace of continuous spectrum.

use coupled_chains::spectral::{
    eigh_tridiagonal, max_atom_weight, spectral_measure_2d, PureTensorTerm,
};
use coupled_chains::{sample_potential, Boundary, Complex64, Operator1D, PotentialSpec, Window};

fn delta(len: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); len];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

pub fn run_example() -> coupled_chains::Result<()> {
    let n = 64;
    let v = sample_potential(
        &PotentialSpec::almost_mathieu(3.0, 0.0),
        Window::from_origin(n),
    )?;
    let es1 = eigh_tridiagonal(&Operator1D::schrodinger(&v, Boundary::Dirichlet)?)?;
    let mut points = Vec::new();
    for m in [64usize, 128, 256, 512] {
        let es2 = eigh_tridiagonal(&Operator1D::free(m, Boundary::Periodic)?)?;
        let term = PureTensorTerm::new(Complex64::new(1.0, 0.0), delta(n, n / 2), delta(m, 0));
        let w = max_atom_weight(&spectral_measure_2d(&es1, &es2, &[term])?);
        println!(
            "M = {m:>3}: max atom weight {w:.4e}, M·w = {:.4}",
            m as f64 * w
        );
        points.push(((m as f64).ln(), w.ln()));
    }
    let k = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / k, sy / k);
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    println!("log-log slope {slope:.4}");
    Ok(())
}

fn main() -> coupled_chains::Result<()> {
    run_example()
}
