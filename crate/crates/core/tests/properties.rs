use coupled_chains::evolution::{DirectPropagator, FreeMethod, PropagatorPlan, SweepOrder};
use coupled_chains::harness::{
    read_snapshots, ExperimentConfig, Family, InitialState, Preset, SnapshotWriter,
};
use coupled_chains::lattice::energy_expectation;
use coupled_chains::spectral::{
    atom_discrepancy, convolve_measures, eigh_tridiagonal, spectral_measure_2d,
    spectral_measure_2d_cross, Atom, PureTensorTerm, SpectralMeasure, MERGE_TOLERANCE,
};
use coupled_chains::{
    apply_h2d, sample_potential, Boundary, Complex64, LatticeState2D, Operator1D, PotentialSpec,
    Window,
};
use proptest::prelude::*;

fn c64() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn cvec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(c64(), len)
}

fn atomic_measure() -> impl Strategy<Value = SpectralMeasure> {
    prop::collection::vec((-4.0..4.0f64, c64()), 1..24).prop_map(|atoms| {
        SpectralMeasure::atomic(atoms.into_iter().map(|(e, w)| Atom::new(e, w)).collect())
    })
}

fn diagonal(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, len)
}

fn boundary() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Dirichlet), Just(Boundary::Periodic)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_mass_is_multiplicative(mu in atomic_measure(), nu in atomic_measure()) {
        let conv = convolve_measures(&mu, &nu, None).unwrap();
        prop_assert!((conv.total_mass() - mu.total_mass() * nu.total_mass()).norm() <= 1e-10);
    }

    #[test]
    fn convolution_commutes_and_translates(mu in atomic_measure(), nu in atomic_measure(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let conv = convolve_measures(&mu, &nu, None).unwrap();
        let swapped = convolve_measures(&nu, &mu, None).unwrap();
        prop_assert!(atom_discrepancy(&conv, &swapped, MERGE_TOLERANCE) <= 1e-12);
        let shifted = convolve_measures(&mu.translated(a), &nu.translated(b), None).unwrap();
        prop_assert!(atom_discrepancy(&shifted, &conv.translated(a + b), MERGE_TOLERANCE) <= 1e-12);
    }

    #[test]
    fn dirac_is_the_unit(mu in atomic_measure()) {
        let conv = convolve_measures(&mu, &SpectralMeasure::dirac(0.0), None).unwrap();
        prop_assert!(atom_discrepancy(&conv, &mu.merged(MERGE_TOLERANCE), MERGE_TOLERANCE) <= 1e-12);
    }

    #[test]
    fn measure_csv_round_trips(mu in atomic_measure()) {
        let mut buf = Vec::new();
        mu.write_csv(&mut buf).unwrap();
        let back = SpectralMeasure::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.atoms().len(), mu.atoms().len());
        prop_assert!(atom_discrepancy(&back, &mu, 0.0) == 0.0);
    }

    #[test]
    fn cross_measure_is_sesquilinear(
        d1 in diagonal(5), chi in cvec(5), phi in cvec(4), chi2 in cvec(5), phi2 in cvec(4), c in c64()
    ) {
        let es1 = eigh_tridiagonal(&Operator1D::new(d1, Boundary::Dirichlet).unwrap()).unwrap();
        let es2 = eigh_tridiagonal(&Operator1D::free(4, Boundary::Periodic).unwrap()).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let psi = [PureTensorTerm::new(one, chi.clone(), phi.clone())];
        let psi2 = [PureTensorTerm::new(one, chi2.clone(), phi2.clone())];
        let base = spectral_measure_2d_cross(&es1, &es2, &psi, &psi2).unwrap();

        let scaled_left = spectral_measure_2d_cross(&es1, &es2, &[PureTensorTerm::new(c, chi.clone(), phi.clone())], &psi2).unwrap();
        prop_assert!(atom_discrepancy(&scaled_left, &base.scaled(c), MERGE_TOLERANCE) <= 1e-12);
        let scaled_right = spectral_measure_2d_cross(&es1, &es2, &psi, &[PureTensorTerm::new(c, chi2.clone(), phi2.clone())]).unwrap();
        prop_assert!(atom_discrepancy(&scaled_right, &base.scaled(c.conj()), MERGE_TOLERANCE) <= 1e-12);

        // Hermitian symmetry: ⟨P ψ', ψ⟩ = conj⟨P ψ, ψ'⟩
        let flipped = spectral_measure_2d_cross(&es1, &es2, &psi2, &psi).unwrap();
        let conj = SpectralMeasure::atomic(base.atoms().iter().map(|a| Atom::new(a.energy, a.weight.conj())).collect());
        prop_assert!(atom_discrepancy(&flipped, &conj, MERGE_TOLERANCE) <= 1e-12);

        // additivity in the left argument
        let both = spectral_measure_2d_cross(&es1, &es2, &[psi[0].clone(), PureTensorTerm::new(c, chi2.clone(), phi2.clone())], &psi2).unwrap();
        let parts = SpectralMeasure::sum([&base, &spectral_measure_2d_cross(&es1, &es2, &psi2, &psi2).unwrap().scaled(c)]).unwrap();
        prop_assert!(atom_discrepancy(&both, &parts, MERGE_TOLERANCE) <= 1e-12);
    }

    #[test]
    fn measure_of_combination_has_norm_mass(d1 in diagonal(6), chi in cvec(6), phi in cvec(5), chi2 in cvec(6), phi2 in cvec(5), c in c64()) {
        let es1 = eigh_tridiagonal(&Operator1D::new(d1, Boundary::Dirichlet).unwrap()).unwrap();
        let es2 = eigh_tridiagonal(&Operator1D::free(5, Boundary::Dirichlet).unwrap()).unwrap();
        let terms = vec![
            PureTensorTerm::new(Complex64::new(1.0, 0.0), chi, phi),
            PureTensorTerm::new(c, chi2, phi2),
        ];
        let mu = spectral_measure_2d(&es1, &es2, &terms).unwrap();
        let psi = coupled_chains::harness::state_from_terms(6, 5, &terms);
        prop_assert!((mu.total_mass() - psi.norm_l2().powi(2)).norm() <= 1e-10);
        prop_assert!(mu.atoms().iter().all(|a| a.weight.re >= -1e-12 && a.weight.im.abs() <= 1e-12));
    }

    #[test]
    fn h2d_is_separable_on_pure_tensors(d1 in diagonal(6), b1 in boundary(), b2 in boundary(), chi in cvec(6), phi in cvec(7)) {
        let a1 = Operator1D::new(d1, b1).unwrap();
        let a2 = Operator1D::free(7, b2).unwrap();
        let h = apply_h2d(&LatticeState2D::pure_tensor(&chi, &phi), &a1, &a2).unwrap();
        let a1chi = a1.apply(&chi).unwrap();
        let a2phi = a2.apply(&phi).unwrap();
        let expected = LatticeState2D::from_fn(6, 7, |n, m| a1chi[n] * phi[m] + chi[n] * a2phi[m]);
        prop_assert!(h.distance(&expected) <= 1e-12);
    }

    #[test]
    fn h2d_obeys_the_operator_bound(d1 in diagonal(8), psi in cvec(48)) {
        let v = coupled_chains::Potential1D::new(0, d1).unwrap();
        let a1 = Operator1D::schrodinger(&v, Boundary::Dirichlet).unwrap();
        let a2 = Operator1D::free(6, Boundary::Dirichlet).unwrap();
        let state = LatticeState2D::from_vec(8, 6, psi).unwrap();
        let h = apply_h2d(&state, &a1, &a2).unwrap();
        prop_assert!(h.norm_l2() <= (4.0 + v.sup_norm()) * state.norm_l2() * (1.0 + 1e-12));
        // self-adjoint: ⟨Hψ, ψ⟩ real
        prop_assert!(h.inner(&state).im.abs() <= 1e-10 * (1.0 + state.norm_l2().powi(2)));
    }

    #[test]
    fn eigensystems_are_orthonormal(d in diagonal(12), b in boundary()) {
        let es = eigh_tridiagonal(&Operator1D::new(d, b).unwrap()).unwrap();
        prop_assert!(es.max_residual() <= 1e-12);
        prop_assert!(es.orthonormality_defect() <= 1e-12);
        prop_assert!(es.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn evolution_group_law_and_unitarity(
        d1 in diagonal(6),
        method in prop_oneof![Just(FreeMethod::Eigen), Just(FreeMethod::DftMultiplier)],
        psi in cvec(48),
        s in -5.0..5.0f64,
        t in -5.0..5.0f64,
    ) {
        let a1 = Operator1D::new(d1, Boundary::Dirichlet).unwrap();
        let plan = PropagatorPlan::new(&a1, 8, method).unwrap();
        let psi = LatticeState2D::from_vec(6, 8, psi).unwrap();
        let st = plan.evolve(&plan.evolve(&psi, s).unwrap(), t).unwrap();
        let direct = plan.evolve(&psi, s + t).unwrap();
        prop_assert!(st.distance(&direct) <= 1e-10 * (1.0 + psi.norm_l2()));
        prop_assert!((direct.norm_l2() - psi.norm_l2()).abs() <= 1e-12 * (1.0 + psi.norm_l2()));
        let e0 = energy_expectation(&psi, plan.a1(), plan.a2()).unwrap();
        let e1 = energy_expectation(&direct, plan.a1(), plan.a2()).unwrap();
        prop_assert!((e1 - e0).abs() <= 1e-10 * (1.0 + e0.abs()));
        let swapped = plan.evolve_ordered(&psi, t, SweepOrder::MThenN).unwrap();
        prop_assert!(swapped.distance(&plan.evolve(&psi, t).unwrap()) <= 1e-10 * (1.0 + psi.norm_l2()));
    }

    #[test]
    fn factorized_matches_direct_on_small_grids(d1 in diagonal(5), psi in cvec(30), t in 0.0..8.0f64) {
        let a1 = Operator1D::new(d1, Boundary::Dirichlet).unwrap();
        let plan = PropagatorPlan::new(&a1, 6, FreeMethod::DftMultiplier).unwrap();
        let psi = LatticeState2D::from_vec(5, 6, psi).unwrap();
        let direct = DirectPropagator::dense(plan.a1(), plan.a2()).unwrap();
        prop_assert!(plan.evolve(&psi, t).unwrap().distance(&direct.evolve(&psi, t).unwrap()) <= 1e-9);
    }

    #[test]
    fn overlapping_windows_agree(seed in any::<u64>(), start in -1000i64..1000, shift in 0usize..20) {
        for spec in [
            PotentialSpec::RandomIid { width: 1.5, seed },
            PotentialSpec::almost_mathieu(2.5, (seed % 1000) as f64 * 1e-3),
        ] {
            let wide = sample_potential(&spec, Window::new(start, 40)).unwrap();
            let narrow = sample_potential(&spec, Window::new(start + shift as i64, 10)).unwrap();
            prop_assert_eq!(&wide.values()[shift..shift + 10], narrow.values());
        }
    }

    #[test]
    fn config_round_trips(
        seed in 0..=i64::MAX as u64,
        n in 2usize..200,
        m in 2usize..200,
        amplitude in -10.0..10.0f64,
        theta in -7.0..7.0f64,
        times in prop::collection::btree_set(0u32..10_000, 1..8),
        family in prop_oneof![Just(Family::Constant), Just(Family::AlmostMathieu), Just(Family::RandomIid)],
        periodic in any::<bool>(),
    ) {
        let mut c = ExperimentConfig::preset(Preset::CoupledDecay);
        c.seed = seed;
        c.lattice.n = n;
        c.lattice.m = m;
        c.lattice.initial = InitialState::TwoTerm;
        c.lattice.boundary_m = if periodic { Boundary::Periodic } else { Boundary::Dirichlet };
        c.potential.family = family;
        c.potential.amplitude = amplitude;
        c.potential.theta = theta;
        c.time.times = Some(times.into_iter().map(|k| k as f64 * 0.37).collect());
        c.validate().unwrap();
        let text = c.to_toml_string().unwrap();
        prop_assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn snapshots_round_trip(n in 1usize..5, m in 1usize..5, count in 0usize..4, seed in any::<u64>()) {
        let states: Vec<(f64, LatticeState2D)> = (0..count)
            .map(|k| (k as f64 * 0.5, LatticeState2D::random(n, m, seed.wrapping_add(k as u64)).with_offset(-3, 7)))
            .collect();
        let mut w = SnapshotWriter::new(Vec::new(), (n, m), (-3, 7), count).unwrap();
        for (t, s) in &states {
            w.push(*t, s).unwrap();
        }
        let file = read_snapshots(w.finish().unwrap().as_slice()).unwrap();
        prop_assert_eq!(file.snapshots, states);
    }
}
