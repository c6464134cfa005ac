//! `e^{iHt}` as a chain propagator along n times a free propagator along m,
//! compared with the direct propagator of the assembled operator.

use coupled_chains::evolution::{DirectPropagator, FreeMethod, PropagatorPlan, SweepOrder};
use coupled_chains::lattice::energy_expectation;
use coupled_chains::{
    sample_potential, Boundary, LatticeState2D, Operator1D, PotentialSpec, Window,
};

pub fn run_example() -> coupled_chains::Result<()> {
    let (n, m) = (24, 24);
    let v = sample_potential(
        &PotentialSpec::RandomIid {
            width: 2.0,
            seed: 3,
        },
        Window::from_origin(n),
    )?;
    let a1 = Operator1D::schrodinger(&v, Boundary::Dirichlet)?;
    let psi = LatticeState2D::random(n, m, 8);
    let norm0 = psi.norm_l2();

    for method in [FreeMethod::Eigen, FreeMethod::DftMultiplier] {
        let plan = PropagatorPlan::new(&a1, m, method)?;
        let direct = DirectPropagator::dense(plan.a1(), plan.a2())?;
        let e0 = energy_expectation(&psi, plan.a1(), plan.a2())?;
        println!("{method:?} along m ({:?}):", method.boundary());
        for t in [0.5, 2.0, 10.0] {
            let a = plan.evolve_ordered(&psi, t, SweepOrder::NThenM)?;
            let b = plan.evolve_ordered(&psi, t, SweepOrder::MThenN)?;
            let d = direct.evolve(&psi, t)?;
            println!(
                "  t={t:>4}: ‖fact − direct‖ = {:.1e}, order swap {:.1e}, Δ‖ψ‖ {:.1e}, ΔE {:.1e}",
                a.distance(&d),
                a.distance(&b),
                (a.norm_l2() - norm0).abs(),
                (energy_expectation(&a, plan.a1(), plan.a2())? - e0).abs()
            );
        }
    }
    Ok(())
}

fn main() -> coupled_chains::Result<()> {
    run_example()
}
