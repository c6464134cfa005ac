//! Experiment configuration, read from and written to TOML.
//!
//! ```toml
//! command = "decay-fit"
//! seed = 7
//!
//! [potential]
//! family = "almost_mathieu"
//! amplitude = 3.0
//!
//! [lattice]
//! n = 64
//! m = 1024
//! boundary_m = "periodic"
//!
//! [time]
//! t_min = 20.0
//! t_max = 200.0
//! samples = 40
//! ```
//!
//! Every key is optional; omitted keys take the defaults below.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::FreeMethod;
use crate::operator::Boundary;
use crate::potential::PotentialSpec;
use crate::GOLDEN_MEAN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Convolve,
    Evolve,
    DecayFit,
    Lyapunov,
    #[default]
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Convolve => "convolve",
            Command::Evolve => "evolve",
            Command::DecayFit => "decay-fit",
            Command::Lyapunov => "lyapunov",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Family {
    Constant,
    #[default]
    AlmostMathieu,
    Quasiperiodic,
    RandomIid,
    Explicit,
}

/// Flat view of [`PotentialSpec`]; only the keys of the chosen family are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    pub family: Family,
    pub amplitude: f64,
    pub omega: f64,
    pub theta: f64,
    /// Level of the constant family.
    pub value: f64,
    /// Half-width of the random family.
    pub width: f64,
    pub values: Vec<f64>,
    pub profile: Vec<f64>,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig {
            family: Family::AlmostMathieu,
            amplitude: 3.0,
            omega: GOLDEN_MEAN,
            theta: 0.0,
            value: 0.0,
            width: 1.0,
            values: Vec::new(),
            profile: Vec::new(),
        }
    }
}

impl PotentialConfig {
    pub fn free() -> Self {
        PotentialConfig {
            family: Family::Constant,
            value: 0.0,
            ..Self::default()
        }
    }

    /// The random family draws from the experiment seed.
    pub fn to_spec(&self, seed: u64) -> PotentialSpec {
        match self.family {
            Family::Constant => PotentialSpec::Constant { value: self.value },
            Family::AlmostMathieu => PotentialSpec::AlmostMathieu {
                amplitude: self.amplitude,
                frequency: self.omega,
                phase: self.theta,
            },
            Family::Quasiperiodic => PotentialSpec::Quasiperiodic {
                amplitude: self.amplitude,
                frequency: self.omega,
                phase: self.theta,
                profile: self.profile.clone(),
            },
            Family::RandomIid => PotentialSpec::RandomIid {
                width: self.width,
                seed,
            },
            Family::Explicit => PotentialSpec::Explicit {
                values: self.values.clone(),
            },
        }
    }
}

/// Initial data, placed at the grid centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `δ_{N/2} ⊗ δ_{M/2}`.
    #[default]
    Delta,
    /// Pure tensor of seeded random unit vectors.
    Random,
    /// `δ ⊗ δ + (i/2)·(random ⊗ random)`.
    TwoTerm,
    /// Lowest eigenvector of `A₁` tensored with `δ_{M/2}`: the `n`-part only
    /// picks up a phase, so the decay is that of the free chain alone.
    EigenTensor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub n: usize,
    pub m: usize,
    pub boundary_n: Boundary,
    pub boundary_m: Boundary,
    /// Free propagator along `m`; defaults to the exact one for `boundary_m`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_method: Option<FreeMethod>,
    pub initial: InitialState,
    /// Largest `N·M` diagonalized densely by the direct oracle.
    pub dense_cap: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            n: 16,
            m: 16,
            boundary_n: Boundary::Dirichlet,
            boundary_m: Boundary::Dirichlet,
            m_method: None,
            initial: InitialState::Delta,
            dense_cap: 4096,
        }
    }
}

impl LatticeConfig {
    pub fn method(&self) -> FreeMethod {
        self.m_method.unwrap_or(match self.boundary_m {
            Boundary::Dirichlet => FreeMethod::Eigen,
            Boundary::Periodic => FreeMethod::DftMultiplier,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    /// Explicit times; when present the generated grid is ignored.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    pub spacing: Spacing,
    /// Write every k-th trajectory snapshot (conservation is checked at all).
    pub snapshot_every: usize,
    pub fit_window: [f64; 2],
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            times: None,
            t_min: 20.0,
            t_max: 200.0,
            samples: 40,
            spacing: Spacing::Log,
            snapshot_every: 1,
            fit_window: [20.0, 200.0],
        }
    }
}

impl TimeConfig {
    pub fn resolved(&self) -> Vec<f64> {
        if let Some(times) = &self.times {
            return times.clone();
        }
        match (self.spacing, self.samples) {
            (_, 1) => vec![self.t_min],
            (Spacing::Log, n) => crate::diagnostics::log_spaced_times(self.t_min, self.t_max, n),
            (Spacing::Linear, n) => (0..n)
                .map(|k| self.t_min + (self.t_max - self.t_min) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub snapshot_format: SnapshotFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            snapshot_format: SnapshotFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Factorized vs direct propagator, in `ℓ²`.
    pub factorization: f64,
    /// Atom-weight discrepancy of convolved vs direct 2D measures.
    pub measure: f64,
    /// `|mass(μ∗ν) − mass(μ)·mass(ν)|`.
    pub mass: f64,
    /// Drift of `‖ψ‖₂` and `⟨Hψ,ψ⟩`.
    pub conservation: f64,
    /// `n`-fiber isometry step of the mixed-norm chain.
    pub isometry: f64,
    /// Relative slack on norm inequalities.
    pub chain_slack: f64,
    /// Eigen residual and orthonormality, relative to the operator bound.
    pub eigen: f64,
    pub chebyshev: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            factorization: 1e-8,
            measure: 1e-10,
            mass: 1e-10,
            conservation: 1e-9,
            isometry: 1e-10,
            chain_slack: 1e-12,
            eigen: 1e-10,
            chebyshev: 1e-12,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 8] {
        [
            ("factorization", self.factorization),
            ("measure", self.measure),
            ("mass", self.mass),
            ("conservation", self.conservation),
            ("isometry", self.isometry),
            ("chain_slack", self.chain_slack),
            ("eigen", self.eigen),
            ("chebyshev", self.chebyshev),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovConfig {
    /// Transfer-matrix product length `L`.
    pub length: usize,
    /// Number of on-spectrum energies.
    pub energies: usize,
    /// Truncation size whose eigenvalues supply the energies.
    pub sample_size: usize,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        LyapunovConfig {
            length: 1_000_000,
            energies: 16,
            sample_size: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    /// Worker threads for embarrassingly parallel scans; results do not
    /// depend on it.
    pub threads: usize,
    pub potential: PotentialConfig,
    pub lattice: LatticeConfig,
    pub time: TimeConfig,
    pub output: OutputConfig,
    pub tolerances: Tolerances,
    pub lyapunov: LyapunovConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: Command::default(),
            seed: 0,
            threads: 1,
            potential: PotentialConfig::default(),
            lattice: LatticeConfig::default(),
            time: TimeConfig::default(),
            output: OutputConfig::default(),
            tolerances: Tolerances::default(),
            lyapunov: LyapunovConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "kebab-case")]
pub enum Preset {
    /// Free chain decay on a wrap-free periodic grid.
    FreeChainDecay,
    /// AMO(a=3) coupled to a free chain, δ data.
    CoupledDecay,
    /// AMO(a=3) on 64×64, two-term state, against the dense oracle.
    TensorConvolution,
    /// AMO(a=3) transfer-matrix scan.
    Localization,
    /// Invariant suite on a small free lattice.
    FreeVerify,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let mut c = ExperimentConfig::default();
        match preset {
            Preset::FreeChainDecay => {
                c.command = Command::DecayFit;
                c.potential = PotentialConfig::free();
                c.lattice.n = 2;
                c.lattice.m = 1024;
                c.lattice.boundary_m = Boundary::Periodic;
                c.lattice.initial = InitialState::EigenTensor;
            }
            Preset::CoupledDecay => {
                c.command = Command::DecayFit;
                c.lattice.n = 64;
                c.lattice.m = 1024;
                c.lattice.boundary_m = Boundary::Periodic;
            }
            Preset::TensorConvolution => {
                c.command = Command::Convolve;
                c.lattice.n = 64;
                c.lattice.m = 64;
                c.lattice.initial = InitialState::TwoTerm;
            }
            Preset::Localization => {
                c.command = Command::Lyapunov;
            }
            Preset::FreeVerify => {
                c.command = Command::Verify;
                c.potential = PotentialConfig::free();
            }
        }
        c
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let key = e
                .span()
                .map_or_else(|| "<document>".to_string(), |s| key_at(text, s.start));
            Error::config(key, e.message().trim().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<document>", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }

    /// Checks every key; the error names the first offending one.
    pub fn validate(&self) -> Result<()> {
        // TOML integers are signed 64-bit
        if i64::try_from(self.seed).is_err() {
            return Err(Error::config("seed", "must be at most 2^63 - 1"));
        }
        let p = &self.potential;
        for (key, x) in [
            ("potential.amplitude", p.amplitude),
            ("potential.omega", p.omega),
            ("potential.theta", p.theta),
            ("potential.value", p.value),
            ("potential.width", p.width),
        ] {
            if !x.is_finite() {
                return Err(Error::config(key, "must be finite"));
            }
        }
        match p.family {
            Family::RandomIid if p.width < 0.0 => {
                return Err(Error::config("potential.width", "must be nonnegative"))
            }
            Family::Explicit if p.values.len() < self.lattice.n => {
                return Err(Error::config(
                    "potential.values",
                    format!(
                        "{} values do not cover n = {}",
                        p.values.len(),
                        self.lattice.n
                    ),
                ))
            }
            Family::Explicit if p.values.iter().any(|v| !v.is_finite()) => {
                return Err(Error::config("potential.values", "must be finite"))
            }
            Family::Quasiperiodic if p.profile.len() < 4 => {
                return Err(Error::config(
                    "potential.profile",
                    "needs at least 4 samples",
                ))
            }
            _ => {}
        }

        let l = &self.lattice;
        if l.n < 2 {
            return Err(Error::config(
                "lattice.n",
                format!("must be at least 2, got {}", l.n),
            ));
        }
        if l.m < 2 {
            return Err(Error::config(
                "lattice.m",
                format!("must be at least 2, got {}", l.m),
            ));
        }
        if l.method().boundary() != l.boundary_m {
            return Err(Error::config(
                "lattice.m_method",
                format!(
                    "{:?} does not match boundary_m = {:?}",
                    l.method(),
                    l.boundary_m
                ),
            ));
        }

        let t = &self.time;
        if let Some(times) = &t.times {
            if times.is_empty() {
                return Err(Error::config("time.times", "must not be empty"));
            }
            if times.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::config(
                    "time.times",
                    "must be finite and nonnegative",
                ));
            }
            if times.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config("time.times", "must be strictly ascending"));
            }
        } else {
            if !(t.t_min.is_finite() && t.t_min >= 0.0) {
                return Err(Error::config(
                    "time.t_min",
                    "must be finite and nonnegative",
                ));
            }
            if t.spacing == Spacing::Log && t.t_min <= 0.0 {
                return Err(Error::config(
                    "time.t_min",
                    "must be positive for log spacing",
                ));
            }
            if t.samples == 0 {
                return Err(Error::config("time.samples", "must be at least 1"));
            }
            if !(t.t_max.is_finite()
                && (t.t_max > t.t_min || (t.samples == 1 && t.t_max >= t.t_min)))
            {
                return Err(Error::config("time.t_max", "must exceed time.t_min"));
            }
        }
        if t.snapshot_every == 0 {
            return Err(Error::config("time.snapshot_every", "must be at least 1"));
        }
        let [lo, hi] = t.fit_window;
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
            return Err(Error::config(
                "time.fit_window",
                "must be an ascending pair of nonnegative times",
            ));
        }

        for (name, x) in self.tolerances.entries() {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::config(
                    format!("tolerances.{name}"),
                    "must be positive",
                ));
            }
        }

        let y = &self.lyapunov;
        if y.length < crate::diagnostics::lyapunov::MIN_LENGTH {
            return Err(Error::config(
                "lyapunov.length",
                format!(
                    "must be at least {}",
                    crate::diagnostics::lyapunov::MIN_LENGTH
                ),
            ));
        }
        if y.energies == 0 {
            return Err(Error::config("lyapunov.energies", "must be at least 1"));
        }
        if y.sample_size < 2 {
            return Err(Error::config("lyapunov.sample_size", "must be at least 2"));
        }
        if self.threads == 0 {
            return Err(Error::config("threads", "must be at least 1"));
        }
        Ok(())
    }
}

/// Dotted key of the TOML entry containing byte offset `pos`, best effort.
fn key_at(text: &str, pos: usize) -> String {
    let mut section = String::new();
    let mut key = String::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if trimmed.starts_with('[') {
            section = trimmed
                .trim_matches(|c| c == '[' || c == ']')
                .trim()
                .to_string();
            key.clear();
        } else if let Some((k, _)) = trimmed.split_once('=') {
            key = k.trim().to_string();
        }
        offset += line.len();
        if offset > pos {
            break;
        }
    }
    match (section.is_empty(), key.is_empty()) {
        (_, true) => section,
        (true, false) => key,
        (false, false) => format!("{section}.{key}"),
    }
}

/// Command-line overrides applied on top of a config file or preset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub command: Option<Command>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub t_max: Option<f64>,
    pub family: Option<Family>,
    pub amplitude: Option<f64>,
    pub omega: Option<f64>,
    pub theta: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(c) = self.command {
            config.command = c;
        }
        if let Some(out) = &self.out {
            config.output.dir = out.clone();
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(k) = self.threads {
            config.threads = k;
        }
        if let Some(n) = self.n {
            config.lattice.n = n;
        }
        if let Some(m) = self.m {
            config.lattice.m = m;
        }
        if let Some(t) = self.t_max {
            config.time.t_max = t;
            if let Some(times) = &mut config.time.times {
                times.retain(|x| *x <= t);
            }
        }
        if let Some(f) = self.family {
            config.potential.family = f;
        }
        if let Some(a) = self.amplitude {
            config.potential.amplitude = a;
        }
        if let Some(w) = self.omega {
            config.potential.omega = w;
        }
        if let Some(th) = self.theta {
            config.potential.theta = th;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(err: Error) -> String {
        match err {
            Error::Config { key, .. } => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_is_default() {
        let c = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn presets_round_trip() {
        for p in Preset::value_variants() {
            let c = ExperimentConfig::preset(*p);
            c.validate().unwrap();
            let text = c.to_toml_string().unwrap();
            assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c, "{text}");
        }
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(
            key_of(ExperimentConfig::from_toml_str("[lattice]\nn = 1\n").unwrap_err()),
            "lattice.n"
        );
        assert_eq!(
            key_of(ExperimentConfig::from_toml_str("[time]\ntimes = [1.0, 0.5]\n").unwrap_err()),
            "time.times"
        );
        assert_eq!(
            key_of(ExperimentConfig::from_toml_str("[tolerances]\nmeasure = -1.0\n").unwrap_err()),
            "tolerances.measure"
        );
        assert_eq!(
            key_of(
                ExperimentConfig::from_toml_str(
                    "[lattice]\nboundary_m = \"periodic\"\nm_method = \"eigen\"\n"
                )
                .unwrap_err()
            ),
            "lattice.m_method"
        );
        let err =
            ExperimentConfig::from_toml_str("[potential]\namplitude = \"big\"\n").unwrap_err();
        assert_eq!(key_of(err), "potential.amplitude");
        let err = ExperimentConfig::from_toml_str("[lattice]\nsize = 3\n").unwrap_err();
        assert!(err.to_string().contains("size"), "{err}");
    }

    #[test]
    fn overrides_win() {
        let mut c = ExperimentConfig::preset(Preset::CoupledDecay);
        c.time.times = Some(vec![1.0, 5.0, 50.0]);
        Overrides {
            n: Some(8),
            t_max: Some(10.0),
            family: Some(Family::RandomIid),
            ..Overrides::default()
        }
        .apply(&mut c);
        assert_eq!(c.lattice.n, 8);
        assert_eq!(c.time.times, Some(vec![1.0, 5.0]));
        assert!(matches!(
            c.potential.to_spec(3),
            PotentialSpec::RandomIid { seed: 3, .. }
        ));
    }

    #[test]
    fn generated_times() {
        let t = TimeConfig {
            spacing: Spacing::Linear,
            t_min: 0.0,
            t_max: 2.0,
            samples: 3,
            ..TimeConfig::default()
        };
        assert_eq!(t.resolved(), vec![0.0, 1.0, 2.0]);
        let log = TimeConfig::default().resolved();
        assert_eq!(log.len(), 40);
        assert!((log[0] - 20.0).abs() < 1e-12 && (log[39] - 200.0).abs() < 1e-9);
    }
}
