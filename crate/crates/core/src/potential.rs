//! Bounded real potentials `{V_n}` and their sampling on finite windows.
//!
//! Quasi-periodic families use the convention `V_n = a·V(2πωn + θ)`: the
//! frequency `ω` is measured in turns, so the golden mean gives the usual
//! almost-Mathieu operator `V_n = a·cos(2πωn + θ)`.

use std::f64::consts::PI;
use std::io::{self, Write};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative size of the upper Fourier band above which a profile counts as
/// under-resolved.
pub const PROFILE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PotentialSpec {
    Constant {
        value: f64,
    },
    /// `a·V(2πωn + θ)` where `V` is given by equally spaced samples of a
    /// smooth 2π-periodic function starting at angle 0.
    Quasiperiodic {
        amplitude: f64,
        frequency: f64,
        phase: f64,
        profile: Vec<f64>,
    },
    AlmostMathieu {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// i.i.d. uniform on `[-width, width]`. The value at site `n` depends only
    /// on `(seed, n)`, so overlapping windows agree.
    RandomIid {
        width: f64,
        seed: u64,
    },
    /// `values[k]` is `V_k`, for `k ≥ 0`.
    Explicit {
        values: Vec<f64>,
    },
}

impl PotentialSpec {
    pub fn almost_mathieu(amplitude: f64, phase: f64) -> Self {
        PotentialSpec::AlmostMathieu {
            amplitude,
            frequency: crate::GOLDEN_MEAN,
            phase,
        }
    }

    pub fn zero() -> Self {
        PotentialSpec::Constant { value: 0.0 }
    }

    fn validate(&self) -> Result<()> {
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "potential parameter `{name}` is not finite"
                )))
            }
        };
        match self {
            PotentialSpec::Constant { value } => finite("value", *value),
            PotentialSpec::Quasiperiodic {
                amplitude,
                frequency,
                phase,
                profile,
            } => {
                finite("amplitude", *amplitude)?;
                finite("frequency", *frequency)?;
                finite("phase", *phase)?;
                if profile.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("profile contains non-finite samples"));
                }
                Ok(())
            }
            PotentialSpec::AlmostMathieu {
                amplitude,
                frequency,
                phase,
            } => {
                finite("amplitude", *amplitude)?;
                finite("frequency", *frequency)?;
                finite("phase", *phase)
            }
            PotentialSpec::RandomIid { width, .. } => {
                finite("width", *width)?;
                if *width < 0.0 {
                    return Err(Error::invalid("random width must be nonnegative"));
                }
                Ok(())
            }
            PotentialSpec::Explicit { values } => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid(
                        "explicit potential contains non-finite values",
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Contiguous index window `[start, start + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: i64,
    pub len: usize,
}

impl Window {
    pub fn new(start: i64, len: usize) -> Self {
        Window { start, len }
    }

    /// `[0, len)`.
    pub fn from_origin(len: usize) -> Self {
        Window { start: 0, len }
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let start = self.start;
        (0..self.len as i64).map(move |k| start + k)
    }
}

/// Sampled potential on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential1D {
    start: i64,
    values: Vec<f64>,
}

impl Potential1D {
    pub fn new(start: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("potential window is empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("potential values must be finite"));
        }
        Ok(Potential1D { start, values })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(0, vec![0.0; len])
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `sup |V_n|` over the window.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// CSV with columns `n,V_n`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,V_n")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(out, "{},{}", self.start + k as i64, v)?;
        }
        Ok(())
    }
}

pub fn sample_potential(spec: &PotentialSpec, window: Window) -> Result<Potential1D> {
    spec.validate()?;
    if window.len == 0 {
        return Err(Error::invalid("potential window is empty"));
    }
    let values = match spec {
        PotentialSpec::Constant { value } => vec![*value; window.len],
        PotentialSpec::AlmostMathieu {
            amplitude,
            frequency,
            phase,
        } => window
            .indices()
            .map(|n| amplitude * (2.0 * PI * frequency * n as f64 + phase).cos())
            .collect(),
        PotentialSpec::Quasiperiodic {
            amplitude,
            frequency,
            phase,
            profile,
        } => {
            let interp = TrigInterpolant::new(profile)?;
            window
                .indices()
                .map(|n| amplitude * interp.eval(2.0 * PI * frequency * n as f64 + phase))
                .collect()
        }
        PotentialSpec::RandomIid { width, seed } => random_window(*width, *seed, window),
        PotentialSpec::Explicit { values } => {
            let end = window.start + window.len as i64;
            if window.start < 0 || end > values.len() as i64 {
                return Err(Error::invalid(format!(
                    "window [{}, {end}) exceeds explicit potential of length {}",
                    window.start,
                    values.len()
                )));
            }
            values[window.start as usize..end as usize].to_vec()
        }
    };
    Potential1D::new(window.start, values)
}

fn random_window(width: f64, seed: u64, window: Window) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // one u64 (two 32-bit words) per site, site n at word 2·(n - i64::MIN)
    let offset = (window.start as i128 - i64::MIN as i128) as u128;
    rng.set_word_pos(2 * offset);
    (0..window.len)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            width * (2.0 * u - 1.0)
        })
        .collect()
}

/// Trigonometric interpolant of equally spaced samples on `[0, 2π)`.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigInterpolant {
    pub fn new(samples: &[f64]) -> Result<Self> {
        let k_len = samples.len();
        if k_len < 4 {
            return Err(Error::invalid(
                "quasi-periodic profile needs at least 4 samples",
            ));
        }
        let inv = 1.0 / k_len as f64;
        let mean = samples.iter().sum::<f64>() * inv;
        let half = k_len / 2;
        let mut cos = Vec::with_capacity(half);
        let mut sin = Vec::with_capacity(half);
        for k in 1..=half {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, s) in samples.iter().enumerate() {
                let x = 2.0 * PI * (k * j) as f64 * inv;
                a += s * x.cos();
                b += s * x.sin();
            }
            let nyquist = k_len.is_multiple_of(2) && k == half;
            let scale = if nyquist { inv } else { 2.0 * inv };
            cos.push(a * scale);
            sin.push(if nyquist { 0.0 } else { b * scale });
        }

        let magnitude = |k: usize| cos[k - 1].abs() + sin[k - 1].abs();
        let total: f64 = mean.abs() + (1..=half).map(magnitude).sum::<f64>();
        let upper: f64 = (half / 2 + 1..=half).map(magnitude).sum();
        if upper > PROFILE_TOLERANCE * total.max(f64::MIN_POSITIVE) {
            return Err(Error::invalid(format!(
                "profile of {k_len} samples is under-resolved: upper-band Fourier mass {upper:e}"
            )));
        }
        Ok(TrigInterpolant { mean, cos, sin })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = self.mean;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let kx = (k + 1) as f64 * x;
            acc += a * kx.cos() + b * kx.sin();
        }
        acc
    }
}
