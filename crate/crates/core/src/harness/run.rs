//! Command dispatch and artifact writing.
//!
//! Every artifact is a pure function of the config, so identical configs give
//! byte-identical outputs whatever the thread count.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use super::config::{Command, ExperimentConfig, InitialState, SnapshotFormat};
use super::snapshot::SnapshotWriter;
use crate::diagnostics::{
    decay_snapshot, fit_decay_exponent, lyapunov_scan, on_spectrum_energies, record_decay,
    write_scan_csv, ChainReport, ChainTolerance, DecayTrace, InitialNorms,
};
use crate::error::{Error, Result};
use crate::evolution::{
    wrap_free_length, DirectOptions, DirectPropagator, FreeMethod, PropagatorPlan, SweepOrder,
};
use crate::lattice::{apply_h2d, energy_expectation, LatticeState2D};
use crate::operator::Operator1D;
use crate::potential::{sample_potential, Potential1D, PotentialSpec, Window};
use crate::spectral::{
    atom_discrepancy, convolve_measures, eigh_tridiagonal, spectral_measure_1d,
    spectral_measure_2d, EigenSystem, PureTensorTerm, MERGE_TOLERANCE,
};

/// Probe times of the verify suite.
pub const VERIFY_TIMES: [f64; 5] = [0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Success,
    Validation,
    NumericalCheck,
    Io,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Validation => 1,
            ExitStatus::NumericalCheck => 2,
            ExitStatus::Io => 3,
        }
    }

    pub fn of_error(err: &Error) -> Self {
        match err {
            Error::Io(_) => ExitStatus::Io,
            Error::NoConvergence { .. } | Error::Numerical(_) | Error::LostMass { .. } => {
                ExitStatus::NumericalCheck
            }
            _ => ExitStatus::Validation,
        }
    }
}

/// One named invariant with its measured residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `residual ≤ tolerance`; NaN fails.
    pub fn within(name: &str, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: Command,
    pub artifacts: Vec<PathBuf>,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn failed(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }

    pub fn status(&self) -> ExitStatus {
        if self.checks.iter().all(|c| c.passed) {
            ExitStatus::Success
        } else {
            ExitStatus::NumericalCheck
        }
    }
}

/// Runs the configured command and writes its artifacts under `output.dir`.
/// Failed numerical checks are reported in the result, not as an error.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let mut out = Output::create(&config.output.dir)?;
    let setup = Setup::new(config)?;
    let checks = match config.command {
        Command::Spectrum => spectrum(config, &setup, &mut out)?,
        Command::Convolve => convolve(config, &setup, &mut out)?,
        Command::Evolve => evolve(config, &setup, &mut out)?,
        Command::DecayFit => decay_fit(config, &setup, &mut out)?,
        Command::Lyapunov => lyapunov(config, &setup, &mut out)?,
        Command::Verify => verify(config, &setup, &mut out)?,
    };
    Ok(RunReport {
        command: config.command,
        artifacts: out.artifacts,
        checks,
    })
}

struct Output {
    dir: PathBuf,
    artifacts: Vec<PathBuf>,
}

impl Output {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Output {
            dir: dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    fn file(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let file = File::create(&path)?;
        self.artifacts.push(path);
        Ok(BufWriter::new(file))
    }

    fn write(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    ) -> Result<()> {
        let mut w = self.file(name)?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }
}

struct Setup {
    spec: PotentialSpec,
    potential: Potential1D,
    a1: Operator1D,
    a2: Operator1D,
    method: FreeMethod,
}

impl Setup {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        let spec = config.potential.to_spec(config.seed);
        let potential = sample_potential(&spec, Window::from_origin(config.lattice.n))?;
        let a1 = Operator1D::schrodinger(&potential, config.lattice.boundary_n)?;
        let method = config.lattice.method();
        let a2 = Operator1D::free(config.lattice.m, method.boundary())?;
        Ok(Setup {
            spec,
            potential,
            a1,
            a2,
            method,
        })
    }
}

// Offsets keep the state streams apart from the random potential stream.
fn state_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_add(k.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn unit_random(len: usize, seed: u64) -> Vec<Complex64> {
    let v = LatticeState2D::random(1, len, seed);
    let norm = v.norm_l2();
    v.amplitudes().iter().map(|a| a / norm).collect()
}

fn unit_delta(len: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); len];
    v[k] = Complex64::new(1.0, 0.0);
    v
}

/// The initial state as a combination of pure tensors.
pub fn initial_terms(
    kind: InitialState,
    es1: &EigenSystem,
    m_len: usize,
    seed: u64,
) -> Vec<PureTensorTerm> {
    let n_len = es1.size();
    let one = Complex64::new(1.0, 0.0);
    let delta = || {
        PureTensorTerm::new(
            one,
            unit_delta(n_len, n_len / 2),
            unit_delta(m_len, m_len / 2),
        )
    };
    let random = |alpha| {
        PureTensorTerm::new(
            alpha,
            unit_random(n_len, state_seed(seed, 1)),
            unit_random(m_len, state_seed(seed, 2)),
        )
    };
    match kind {
        InitialState::Delta => vec![delta()],
        InitialState::Random => vec![random(one)],
        InitialState::TwoTerm => vec![delta(), random(Complex64::new(0.0, 0.5))],
        InitialState::EigenTensor => {
            let v0 = es1
                .eigenvector(0)
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect();
            vec![PureTensorTerm::new(one, v0, unit_delta(m_len, m_len / 2))]
        }
    }
}

/// `Σ_j α_j χ_j ⊗ φ_j` on the grid.
pub fn state_from_terms(n_len: usize, m_len: usize, terms: &[PureTensorTerm]) -> LatticeState2D {
    LatticeState2D::from_fn(n_len, m_len, |n, m| {
        terms.iter().map(|t| t.alpha * t.chi[n] * t.phi[m]).sum()
    })
}

fn write_eigenvalues(w: &mut impl Write, values: &[f64]) -> io::Result<()> {
    writeln!(w, "j,E")?;
    for (j, e) in values.iter().enumerate() {
        writeln!(w, "{j},{e:e}")?;
    }
    Ok(())
}

fn eigen_checks(es: &EigenSystem, axis: &str, tol: f64) -> [Check; 2] {
    let scale = 1.0 + es.source().norm_bound();
    [
        Check::within(
            &format!("eigen_residual_{axis}"),
            es.max_residual(),
            tol * scale,
        ),
        Check::within(
            &format!("orthonormality_{axis}"),
            es.orthonormality_defect(),
            tol,
        ),
    ]
}

fn spectrum(config: &ExperimentConfig, s: &Setup, out: &mut Output) -> Result<Vec<Check>> {
    let es1 = eigh_tridiagonal(&s.a1)?;
    let es2 = eigh_tridiagonal(&s.a2)?;
    let terms = initial_terms(config.lattice.initial, &es1, config.lattice.m, config.seed);
    let first = &terms[0];
    let mu1 = spectral_measure_1d(&es1, &first.chi, &first.chi)?;
    let mu2 = spectral_measure_1d(&es2, &first.phi, &first.phi)?;

    out.write("potential.csv", |w| s.potential.write_csv(w))?;
    out.write("eigenvalues_n.csv", |w| {
        write_eigenvalues(w, es1.eigenvalues())
    })?;
    out.write("eigenvalues_m.csv", |w| {
        write_eigenvalues(w, es2.eigenvalues())
    })?;
    out.write("measure_n.csv", |w| mu1.write_csv(w))?;
    out.write("measure_m.csv", |w| mu2.write_csv(w))?;

    let tol = &config.tolerances;
    let sq = |v: &[Complex64]| v.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let mut checks = Vec::new();
    checks.extend(eigen_checks(&es1, "n", tol.eigen));
    checks.extend(eigen_checks(&es2, "m", tol.eigen));
    checks.push(Check::within(
        "measure_mass_n",
        (mu1.total_mass() - sq(&first.chi)).norm(),
        tol.mass,
    ));
    checks.push(Check::within(
        "measure_mass_m",
        (mu2.total_mass() - sq(&first.phi)).norm(),
        tol.mass,
    ));
    let range = |es: &EigenSystem| [es.eigenvalues()[0], es.eigenvalues()[es.size() - 1]];
    out.json(
        "spectrum.json",
        &json!({
            "n": config.lattice.n,
            "m": config.lattice.m,
            "boundary_n": config.lattice.boundary_n,
            "boundary_m": s.a2.boundary(),
            "spectrum_n": range(&es1),
            "spectrum_m": range(&es2),
            "atoms_n": mu1.atoms().len(),
            "atoms_m": mu2.atoms().len(),
            "checks": checks,
        }),
    )?;
    Ok(checks)
}

fn convolve(config: &ExperimentConfig, s: &Setup, out: &mut Output) -> Result<Vec<Check>> {
    let (n_len, m_len) = (config.lattice.n, config.lattice.m);
    let es1 = eigh_tridiagonal(&s.a1)?;
    let es2 = eigh_tridiagonal(&s.a2)?;
    let terms = initial_terms(config.lattice.initial, &es1, m_len, config.seed);
    let mu1 = spectral_measure_1d(&es1, &terms[0].chi, &terms[0].chi)?;
    let mu2 = spectral_measure_1d(&es2, &terms[0].phi, &terms[0].phi)?;
    let conv = spectral_measure_2d(&es1, &es2, &terms)?;
    let psi = state_from_terms(n_len, m_len, &terms);

    out.write("measure_n.csv", |w| mu1.write_csv(w))?;
    out.write("measure_m.csv", |w| mu2.write_csv(w))?;
    out.write("convolution.csv", |w| conv.write_csv(w))?;

    let tol = &config.tolerances;
    let norm_sq = psi.norm_l2().powi(2);
    let mut checks = vec![Check::within(
        "convolution_mass",
        (conv.total_mass() - norm_sq).norm(),
        tol.mass,
    )];
    let mut discrepancy = None;
    let mut direct_atoms = None;
    if n_len * m_len <= config.lattice.dense_cap {
        let direct = DirectPropagator::dense(&s.a1, &s.a2)?.spectral_measure(&psi)?;
        out.write("direct.csv", |w| direct.write_csv(w))?;
        let d = atom_discrepancy(&conv, &direct, MERGE_TOLERANCE);
        checks.push(Check::within("tensor_identity", d, tol.measure));
        discrepancy = Some(d);
        direct_atoms = Some(direct.atoms().len());
    }
    out.json(
        "convolve.json",
        &json!({
            "n": n_len,
            "m": m_len,
            "terms": terms.len(),
            "atoms_convolution": conv.atoms().len(),
            "atoms_direct": direct_atoms,
            "mass_convolution": [conv.total_mass().re, conv.total_mass().im],
            "norm_squared": norm_sq,
            "direct_computed": discrepancy.is_some(),
            "max_discrepancy": discrepancy,
            "checks": checks,
        }),
    )?;
    Ok(checks)
}

fn write_state_csv(w: &mut impl Write, t: f64, state: &LatticeState2D) -> io::Result<()> {
    let (n0, m0) = state.offset();
    let m_len = state.m_len();
    for (k, a) in state.amplitudes().iter().enumerate() {
        let (n, m) = ((k / m_len) as i64 + n0, (k % m_len) as i64 + m0);
        writeln!(w, "{t:e},{n},{m},{:e},{:e}", a.re, a.im)?;
    }
    Ok(())
}

fn evolve(config: &ExperimentConfig, s: &Setup, out: &mut Output) -> Result<Vec<Check>> {
    let plan = PropagatorPlan::new(&s.a1, config.lattice.m, s.method)?;
    let terms = initial_terms(
        config.lattice.initial,
        plan.es1(),
        config.lattice.m,
        config.seed,
    );
    let psi0 = state_from_terms(config.lattice.n, config.lattice.m, &terms);
    let times = config.time.resolved();
    let every = config.time.snapshot_every;
    let kept = times.len().div_ceil(every);

    let norm0 = psi0.norm_l2();
    let energy0 = energy_expectation(&psi0, plan.a1(), plan.a2())?;
    let (mut norm_drift, mut energy_drift) = (0.0f64, 0.0f64);

    enum Sink {
        Csv(BufWriter<File>),
        Binary(SnapshotWriter<BufWriter<File>>),
    }
    let mut sink = match config.output.snapshot_format {
        SnapshotFormat::Csv => {
            let mut w = out.file("trajectory.csv")?;
            writeln!(w, "t,n,m,re,im")?;
            Sink::Csv(w)
        }
        SnapshotFormat::Binary => Sink::Binary(SnapshotWriter::new(
            out.file("snapshots.bin")?,
            psi0.dims(),
            psi0.offset(),
            kept,
        )?),
    };
    for (k, &t) in times.iter().enumerate() {
        let psi = plan.evolve(&psi0, t)?;
        norm_drift = norm_drift.max((psi.norm_l2() - norm0).abs());
        energy_drift =
            energy_drift.max((energy_expectation(&psi, plan.a1(), plan.a2())? - energy0).abs());
        if k % every == 0 {
            match &mut sink {
                Sink::Csv(w) => write_state_csv(w, t, &psi)?,
                Sink::Binary(w) => w.push(t, &psi)?,
            }
        }
    }
    match sink {
        Sink::Csv(mut w) => w.flush()?,
        Sink::Binary(w) => {
            w.finish()?;
        }
    }

    let tol = config.tolerances.conservation;
    let checks = vec![
        Check::within("norm_conservation", norm_drift, tol),
        Check::within("energy_conservation", energy_drift, tol),
    ];
    out.json(
        "conservation.json",
        &json!({
            "method": s.method,
            "times": times.len(),
            "snapshots": kept,
            "initial_norm": norm0,
            "initial_energy": energy0,
            "max_norm_drift": norm_drift,
            "max_energy_drift": energy_drift,
            "checks": checks,
        }),
    )?;
    Ok(checks)
}

fn chain_checks(report: &ChainReport, tol: &super::config::Tolerances) -> [Check; 2] {
    let margin = report
        .sup_vs_l2n_linfm
        .max(report.l2n_linfm_vs_linfm_l2n)
        .max(report.l1m_l2n_vs_l1);
    [
        Check {
            name: "mixed_norm_chain".into(),
            residual: margin,
            tolerance: tol.chain_slack,
            passed: report.passed,
        },
        Check::within("fiber_isometry", report.max_isometry_residual, tol.isometry),
    ]
}

fn decay_fit(config: &ExperimentConfig, s: &Setup, out: &mut Output) -> Result<Vec<Check>> {
    let plan = PropagatorPlan::new(&s.a1, config.lattice.m, s.method)?;
    let terms = initial_terms(
        config.lattice.initial,
        plan.es1(),
        config.lattice.m,
        config.seed,
    );
    let psi0 = state_from_terms(config.lattice.n, config.lattice.m, &terms);
    let times = config.time.resolved();
    let trace = record_decay(&plan, &psi0, &times)?;
    let [lo, hi] = config.time.fit_window;
    let fit = fit_decay_exponent(&trace, (lo, hi))?;
    let tol = &config.tolerances;
    let chain = trace.check_chain(ChainTolerance {
        slack: tol.chain_slack,
        isometry: tol.isometry,
    });
    let (norm_drift, energy_drift, _) = trace.conservation_drift();

    out.write("decay_trace.csv", |w| trace.write_csv(w))?;
    let mut checks = chain_checks(&chain, tol).to_vec();
    checks.push(Check::within(
        "norm_conservation",
        norm_drift,
        tol.conservation,
    ));
    checks.push(Check::within(
        "energy_conservation",
        energy_drift,
        tol.conservation,
    ));
    out.json(
        "decay_fit.json",
        &json!({
            "exponent": fit.exponent,
            "prefactor": fit.prefactor,
            "window": fit.window,
            "residual": fit.residual,
            "samples": fit.samples,
            "bound_ratio_quarter": fit.bound_ratio(&trace, -0.25),
            "initial": trace.initial,
            "chain": chain,
            "wrap_free_length": wrap_free_length(*times.last().expect("validated"), 1),
            "checks": checks,
        }),
    )?;
    Ok(checks)
}

fn lyapunov(config: &ExperimentConfig, s: &Setup, out: &mut Output) -> Result<Vec<Check>> {
    let y = &config.lyapunov;
    let energies = on_spectrum_energies(&s.spec, y.sample_size, y.energies)?;
    if energies.is_empty() {
        return Err(Error::Numerical(
            "no eigenvalues with interior eigenvectors".into(),
        ));
    }
    let points = lyapunov_scan(&s.spec, &energies, y.length, config.threads)?;
    out.write("lyapunov.csv", |w| write_scan_csv(&points, w))?;
    Ok(Vec::new())
}

fn verify(config: &ExperimentConfig, s: &Setup, out: &mut Output) -> Result<Vec<Check>> {
    let (n_len, m_len) = (config.lattice.n, config.lattice.m);
    let tol = &config.tolerances;
    let plan = PropagatorPlan::new(&s.a1, m_len, s.method)?;
    let es1 = plan.es1();
    let es2 = eigh_tridiagonal(plan.a2())?;
    let mut checks = Vec::new();
    checks.extend(eigen_checks(es1, "n", tol.eigen));
    checks.extend(eigen_checks(&es2, "m", tol.eigen));

    let mut psi = LatticeState2D::random(n_len, m_len, state_seed(config.seed, 3));
    psi.scale(Complex64::new(1.0 / psi.norm_l2(), 0.0));
    let bound = 4.0 + s.potential.sup_norm();
    let h_norm = apply_h2d(&psi, plan.a1(), plan.a2())?.norm_l2();
    checks.push(Check::within(
        "operator_bound",
        h_norm - bound,
        tol.chain_slack * bound,
    ));

    let direct = DirectPropagator::new(
        plan.a1(),
        plan.a2(),
        &DirectOptions {
            dense_cap: config.lattice.dense_cap,
            allow_chebyshev: true,
            chebyshev_tolerance: tol.chebyshev,
        },
    )?;
    let energy0 = energy_expectation(&psi, plan.a1(), plan.a2())?;
    let (mut fact, mut order, mut norm_drift, mut energy_drift) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &t in &VERIFY_TIMES {
        let a = plan.evolve_ordered(&psi, t, SweepOrder::NThenM)?;
        let b = plan.evolve_ordered(&psi, t, SweepOrder::MThenN)?;
        fact = fact.max(a.distance(&direct.evolve(&psi, t)?));
        order = order.max(a.distance(&b));
        norm_drift = norm_drift.max((a.norm_l2() - 1.0).abs());
        energy_drift =
            energy_drift.max((energy_expectation(&a, plan.a1(), plan.a2())? - energy0).abs());
    }
    let composed = plan.evolve(&plan.evolve(&psi, 1.0)?, 2.0)?;
    let group = composed.distance(&plan.evolve(&psi, 3.0)?);
    checks.push(Check::within(
        "factorization_vs_direct",
        fact,
        tol.factorization,
    ));
    checks.push(Check::within("sweep_order", order, tol.factorization));
    checks.push(Check::within("group_law", group, tol.factorization));
    checks.push(Check::within(
        "norm_conservation",
        norm_drift,
        tol.conservation,
    ));
    checks.push(Check::within(
        "energy_conservation",
        energy_drift,
        tol.conservation,
    ));

    let random = initial_terms(InitialState::Random, es1, m_len, config.seed);
    let mu1 = spectral_measure_1d(es1, &random[0].chi, &random[0].chi)?;
    let mu2 = spectral_measure_1d(&es2, &random[0].phi, &random[0].phi)?;
    let conv = convolve_measures(&mu1, &mu2, None)?;
    let swapped = convolve_measures(&mu2, &mu1, None)?;
    checks.push(Check::within(
        "convolution_mass",
        (conv.total_mass() - mu1.total_mass() * mu2.total_mass()).norm(),
        tol.mass,
    ));
    checks.push(Check::within(
        "convolution_commutativity",
        atom_discrepancy(&conv, &swapped, MERGE_TOLERANCE),
        tol.measure,
    ));
    if direct.dense_eigenpairs().is_some() {
        let terms = initial_terms(InitialState::TwoTerm, es1, m_len, config.seed);
        let via_tensor = spectral_measure_2d(es1, &es2, &terms)?;
        let direct_measure = direct.spectral_measure(&state_from_terms(n_len, m_len, &terms))?;
        checks.push(Check::within(
            "tensor_identity",
            atom_discrepancy(&via_tensor, &direct_measure, MERGE_TOLERANCE),
            tol.measure,
        ));
    }

    let delta = state_from_terms(
        n_len,
        m_len,
        &initial_terms(InitialState::Delta, es1, m_len, config.seed),
    );
    let trace = DecayTrace {
        initial: InitialNorms::of(&delta),
        snapshots: VERIFY_TIMES
            .iter()
            .map(|&t| decay_snapshot(&plan, &delta, t))
            .collect::<Result<_>>()?,
    };
    let chain = trace.check_chain(ChainTolerance {
        slack: tol.chain_slack,
        isometry: tol.isometry,
    });
    checks.extend(chain_checks(&chain, tol));

    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    out.json(
        "verify.json",
        &json!({
            "n": n_len,
            "m": m_len,
            "m_method": s.method,
            "direct_path": if direct.dense_eigenpairs().is_some() { "dense" } else { "chebyshev" },
            "passed": failed.is_empty(),
            "failed": failed,
            "checks": checks,
        }),
    )?;
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Preset;

    fn in_temp(mut config: ExperimentConfig) -> (tempfile::TempDir, ExperimentConfig) {
        let dir = tempfile::tempdir().unwrap();
        config.output.dir = dir.path().to_path_buf();
        (dir, config)
    }

    #[test]
    fn free_verify_passes() {
        let (_dir, config) = in_temp(ExperimentConfig::preset(Preset::FreeVerify));
        let report = run(&config).unwrap();
        assert_eq!(
            report.status(),
            ExitStatus::Success,
            "{:?}",
            report.failed()
        );
        assert!(report.checks.iter().any(|c| c.name == "tensor_identity"));
    }

    #[test]
    fn spectrum_and_convolve_write_artifacts() {
        let mut config = ExperimentConfig::default();
        config.lattice.n = 8;
        config.lattice.m = 6;
        config.lattice.initial = InitialState::TwoTerm;
        for command in [Command::Spectrum, Command::Convolve] {
            config.command = command;
            let (dir, c) = in_temp(config.clone());
            let report = run(&c).unwrap();
            assert_eq!(
                report.status(),
                ExitStatus::Success,
                "{command:?} {:?}",
                report.failed()
            );
            for a in &report.artifacts {
                assert!(a.starts_with(dir.path()) && a.exists());
            }
        }
    }

    #[test]
    fn evolve_binary_snapshots_read_back() {
        let mut config = ExperimentConfig {
            command: Command::Evolve,
            ..ExperimentConfig::default()
        };
        config.lattice.n = 4;
        config.lattice.m = 8;
        config.time.times = Some(vec![0.0, 0.5, 1.0]);
        config.time.snapshot_every = 2;
        config.output.snapshot_format = SnapshotFormat::Binary;
        let (dir, c) = in_temp(config);
        assert_eq!(run(&c).unwrap().status(), ExitStatus::Success);
        let file = super::super::snapshot::read_snapshots(
            File::open(dir.path().join("snapshots.bin")).unwrap(),
        )
        .unwrap();
        assert_eq!(file.snapshots.len(), 2);
        assert_eq!(file.snapshots[1].0, 1.0);
        assert!((file.snapshots[1].1.norm_l2() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_statuses() {
        assert_eq!(
            ExitStatus::of_error(&Error::config("lattice.n", "x")).code(),
            1
        );
        assert_eq!(
            ExitStatus::of_error(&Error::Numerical("x".into())).code(),
            2
        );
        assert_eq!(
            ExitStatus::of_error(&io::Error::other("x").into()).code(),
            3
        );
        let mut config = ExperimentConfig::default();
        config.lattice.m = 1;
        assert!(matches!(run(&config), Err(Error::Config { .. })));
    }

    #[test]
    fn tight_tolerance_fails_by_name() {
        let mut config = ExperimentConfig::preset(Preset::FreeVerify);
        config.lattice.n = 6;
        config.lattice.m = 6;
        config.tolerances.factorization = 1e-300;
        let (_dir, c) = in_temp(config);
        let report = run(&c).unwrap();
        assert_eq!(report.status(), ExitStatus::NumericalCheck);
        assert!(report.failed().contains(&"factorization_vs_direct"));
    }
}
