//! Transfer-matrix Lyapunov exponents of almost-Mathieu chains on and off the
//! localized side, at energies taken from a truncation's spectrum.

use coupled_chains::diagnostics::{lyapunov_scan, on_spectrum_energies};
use coupled_chains::PotentialSpec;

pub fn run_example() -> coupled_chains::Result<()> {
    let length = 100_000;
    for a in [3.0, 1.0] {
        let spec = PotentialSpec::almost_mathieu(a, 0.0);
        let energies = on_spectrum_energies(&spec, 256, 6)?;
        let points = lyapunov_scan(&spec, &energies, length, 4)?;
        println!("a = {a}: log(a/2) = {:+.4}", (a / 2.0f64).ln());
        for p in &points {
            println!("  E = {:+.4}  γ = {:+.4}", p.energy, p.gamma);
        }
    }
    Ok(())
}

fn main() -> coupled_chains::Result<()> {
    run_example()
}
