//! Sup-norm decay of δ data for the coupled lattice and fitted exponent,
//! together with the mixed-norm chain behind the estimate.

use coupled_chains::diagnostics::{
    fit_decay_exponent, log_spaced_times, record_decay, ChainTolerance, FIT_WINDOW,
};
use coupled_chains::evolution::{wrap_free_length, FreeMethod, PropagatorPlan};
use coupled_chains::{
    sample_potential, Boundary, LatticeState2D, Operator1D, PotentialSpec, Window,
};

pub fn run_example() -> coupled_chains::Result<()> {
    let n = 32;
    let m = wrap_free_length(FIT_WINDOW.1, 1).next_power_of_two();
    let v = sample_potential(
        &PotentialSpec::almost_mathieu(3.0, 0.0),
        Window::from_origin(n),
    )?;
    let plan = PropagatorPlan::new(
        &Operator1D::schrodinger(&v, Boundary::Dirichlet)?,
        m,
        FreeMethod::DftMultiplier,
    )?;
    let psi0 = LatticeState2D::delta(n, m, n / 2, m / 2);

    let trace = record_decay(
        &plan,
        &psi0,
        &log_spaced_times(FIT_WINDOW.0, FIT_WINDOW.1, 30),
    )?;
    let fit = fit_decay_exponent(&trace, FIT_WINDOW)?;
    println!("{n}×{m} lattice, AMO a=3 along n, δ data");
    for s in trace.snapshots.iter().step_by(6) {
        println!(
            "  t={:>7.2}  sup={:.4e}  fit={:.4e}",
            s.t,
            s.sup_norm,
            fit.predict(s.t)
        );
    }
    println!(
        "exponent {:.3} (free-chain value −1/3), log-log rms {:.3}",
        fit.exponent, fit.residual
    );
    println!(
        "max sup/(ℓ¹·C·⟨t⟩^(-1/4)) = {:.3}",
        fit.bound_ratio(&trace, -0.25)
    );
    let chain = trace.check_chain(ChainTolerance::default());
    println!(
        "mixed-norm chain holds: {}, isometry residual {:.1e}",
        chain.passed, chain.max_isometry_residual
    );
    Ok(())
}

fn main() -> coupled_chains::Result<()> {
    run_example()
}
