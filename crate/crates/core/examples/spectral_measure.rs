//! 1D spectral measures: the free chain against its arcsine density, and the
//! almost-Mathieu chain at a site.

use coupled_chains::spectral::{eigh_tridiagonal, spectral_measure_1d, EnergyGrid};
use coupled_chains::{sample_potential, Boundary, Complex64, Operator1D, PotentialSpec, Window};

pub fn run_example() -> coupled_chains::Result<()> {
    let n = 400;
    let es = eigh_tridiagonal(&Operator1D::free(n, Boundary::Periodic)?)?;
    let mut delta = vec![Complex64::new(0.0, 0.0); n];
    delta[0] = Complex64::new(1.0, 0.0);
    let mu = spectral_measure_1d(&es, &delta, &delta)?;
    let hist = mu.histogram(EnergyGrid::new(-2.0, 2.0, 8)?)?;
    let density = hist.density().expect("histogram has a density");
    println!("free chain, δ₀, N = {n}: histogram vs arcsine 1/(π√(4−E²))");
    for k in 0..density.grid().bins {
        let (a, b) = (density.grid().left_edge(k), density.grid().left_edge(k + 1));
        let exact = ((b / 2.0).asin() - (a / 2.0).asin()) / std::f64::consts::PI;
        println!(
            "  [{a:+.1}, {b:+.1})  {:.4}  {exact:.4}",
            density.bin_mass(k).re
        );
    }

    let n = 128;
    let v = sample_potential(
        &PotentialSpec::almost_mathieu(3.0, 0.0),
        Window::from_origin(n),
    )?;
    let es = eigh_tridiagonal(&Operator1D::schrodinger(&v, Boundary::Dirichlet)?)?;
    let mut delta = vec![Complex64::new(0.0, 0.0); n];
    delta[n / 2] = Complex64::new(1.0, 0.0);
    let mu = spectral_measure_1d(&es, &delta, &delta)?;
    let mut atoms: Vec<_> = mu.atoms().to_vec();
    atoms.sort_by(|a, b| b.weight.re.total_cmp(&a.weight.re));
    println!(
        "\nalmost Mathieu a=3, δ at n={}: {} atoms, mass {:.12}",
        n / 2,
        atoms.len(),
        mu.total_mass().re
    );
    println!("  heaviest atoms (localized eigenvectors near the site):");
    for a in atoms.iter().take(5) {
        println!("    E = {:+.6}  weight {:.6}", a.energy, a.weight.re);
    }
    println!(
        "  residual {:.1e}, orthonormality {:.1e}",
        es.max_residual(),
        es.orthonormality_defect()
    );
    Ok(())
}

fn main() -> coupled_chains::Result<()> {
    run_example()
}
