//! Finite complex Borel measures on the real line: atoms plus an optional
//! piecewise-constant density.

use std::io::{self, BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Atoms closer than this in energy are merged before reporting.
pub const MERGE_TOLERANCE: f64 = 1e-9;
/// Default number of bins of a covering grid.
pub const DEFAULT_BINS: usize = 512;
/// Guard band added on both sides of a covering grid.
pub const GRID_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub energy: f64,
    pub weight: Complex64,
}

impl Atom {
    pub fn new(energy: f64, weight: Complex64) -> Self {
        Atom { energy, weight }
    }

    pub fn real(energy: f64, weight: f64) -> Self {
        Atom::new(energy, Complex64::new(weight, 0.0))
    }
}

/// Uniform grid of `bins` cells on `[e_min, e_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid {
    pub e_min: f64,
    pub e_max: f64,
    pub bins: usize,
}

impl EnergyGrid {
    pub fn new(e_min: f64, e_max: f64, bins: usize) -> Result<Self> {
        if !(e_min.is_finite() && e_max.is_finite() && e_min < e_max) || bins == 0 {
            return Err(Error::invalid(format!(
                "bad energy grid [{e_min}, {e_max}] with {bins} bins"
            )));
        }
        Ok(EnergyGrid { e_min, e_max, bins })
    }

    pub fn width(&self) -> f64 {
        (self.e_max - self.e_min) / self.bins as f64
    }

    pub fn left_edge(&self, k: usize) -> f64 {
        self.e_min + k as f64 * self.width()
    }

    /// Grid over the Minkowski sum of the supports of `mu` and `nu`, widened
    /// by [`GRID_GUARD`].
    pub fn covering(mu: &SpectralMeasure, nu: &SpectralMeasure, bins: usize) -> Result<Self> {
        let (a_lo, a_hi) = mu
            .support()
            .ok_or_else(|| Error::invalid("measure has empty support"))?;
        let (b_lo, b_hi) = nu
            .support()
            .ok_or_else(|| Error::invalid("measure has empty support"))?;
        EnergyGrid::new(a_lo + b_lo - GRID_GUARD, a_hi + b_hi + GRID_GUARD, bins)
    }
}

/// Density values (mass per unit energy) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    grid: EnergyGrid,
    values: Vec<Complex64>,
}

impl Density {
    pub fn new(grid: EnergyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.bins {
            return Err(Error::shape(grid.bins, values.len()));
        }
        Ok(Density { grid, values })
    }

    pub fn grid(&self) -> &EnergyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Mass carried by bin `k`.
    pub fn bin_mass(&self, k: usize) -> Complex64 {
        self.values[k] * self.grid.width()
    }

    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.width()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    atoms: Vec<Atom>,
    density: Option<Density>,
    total_mass: Complex64,
}

impl SpectralMeasure {
    /// Atoms are sorted by energy; the total mass is cached.
    pub fn new(mut atoms: Vec<Atom>, density: Option<Density>) -> Self {
        atoms.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        let total_mass = atoms.iter().map(|a| a.weight).sum::<Complex64>()
            + density
                .as_ref()
                .map_or(Complex64::new(0.0, 0.0), Density::integral);
        SpectralMeasure {
            atoms,
            density,
            total_mass,
        }
    }

    pub fn atomic(atoms: Vec<Atom>) -> Self {
        Self::new(atoms, None)
    }

    pub fn dirac(energy: f64) -> Self {
        Self::atomic(vec![Atom::real(energy, 1.0)])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn total_mass(&self) -> Complex64 {
        self.total_mass
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.density.is_none()
    }

    /// Smallest interval containing every atom and the density grid.
    pub fn support(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        if let (Some(first), Some(last)) = (self.atoms.first(), self.atoms.last()) {
            lo = first.energy;
            hi = last.energy;
        }
        if let Some(d) = &self.density {
            lo = lo.min(d.grid.e_min);
            hi = hi.max(d.grid.e_max);
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Merges runs of atoms whose consecutive energy gaps are at most `tol`.
    /// A merged atom sits at the mean energy of its run.
    pub fn merged(&self, tol: f64) -> SpectralMeasure {
        let atoms = merge_sorted(&self.atoms, tol);
        SpectralMeasure {
            atoms,
            density: self.density.clone(),
            total_mass: self.total_mass,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> SpectralMeasure {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.energy, a.weight * factor))
            .collect();
        let density = self.density.as_ref().map(|d| Density {
            grid: d.grid,
            values: d.values.iter().map(|v| v * factor).collect(),
        });
        SpectralMeasure::new(atoms, density)
    }

    pub fn translated(&self, shift: f64) -> SpectralMeasure {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new(a.energy + shift, a.weight))
            .collect();
        let density = self.density.as_ref().map(|d| Density {
            grid: EnergyGrid {
                e_min: d.grid.e_min + shift,
                e_max: d.grid.e_max + shift,
                bins: d.grid.bins,
            },
            values: d.values.clone(),
        });
        SpectralMeasure::new(atoms, density)
    }

    /// Sum of measures. Densities must live on the same grid.
    pub fn sum<'a>(
        measures: impl IntoIterator<Item = &'a SpectralMeasure>,
    ) -> Result<SpectralMeasure> {
        let mut atoms = Vec::new();
        let mut density: Option<Density> = None;
        for m in measures {
            atoms.extend_from_slice(&m.atoms);
            if let Some(d) = &m.density {
                match &mut density {
                    None => density = Some(d.clone()),
                    Some(acc) if acc.grid == d.grid => {
                        for (a, v) in acc.values.iter_mut().zip(&d.values) {
                            *a += v;
                        }
                    }
                    Some(_) => {
                        return Err(Error::invalid("cannot add densities on different grids"))
                    }
                }
            }
        }
        Ok(SpectralMeasure::new(atoms, density))
    }

    /// Moves all atoms into the density on `grid`.
    pub fn histogram(&self, grid: EnergyGrid) -> Result<SpectralMeasure> {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.bins];
        let mut lost = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            let x = (a.energy - grid.e_min) / grid.width();
            if x < 0.0 || a.energy > grid.e_max {
                lost += a.weight;
                continue;
            }
            let k = (x.floor() as usize).min(grid.bins - 1);
            values[k] += a.weight / grid.width();
        }
        if let Some(d) = &self.density {
            let mut scratch = vec![Complex64::new(0.0, 0.0); grid.bins];
            for k in 0..d.grid.bins {
                lost += deposit(
                    &mut scratch,
                    &grid,
                    d.grid.left_edge(k),
                    0.0,
                    d.grid.width(),
                    d.bin_mass(k),
                );
            }
            for (v, s) in values.iter_mut().zip(scratch) {
                *v += s / grid.width();
            }
        }
        check_lost(lost, self.total_mass, &grid)?;
        Ok(SpectralMeasure::new(
            Vec::new(),
            Some(Density::new(grid, values)?),
        ))
    }

    /// CSV rows `kind,E,weight_re,weight_im` ordered by energy; bin rows carry
    /// the bin's left edge and its mass.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "kind,E,weight_re,weight_im")?;
        let mut rows: Vec<(f64, bool, Complex64)> = self
            .atoms
            .iter()
            .map(|a| (a.energy, false, a.weight))
            .collect();
        if let Some(d) = &self.density {
            rows.extend((0..d.grid.bins).map(|k| (d.grid.left_edge(k), true, d.bin_mass(k))));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (e, is_bin, w) in rows {
            let kind = if is_bin { "bin" } else { "atom" };
            writeln!(out, "{kind},{e:e},{:e},{:e}", w.re, w.im)?;
        }
        Ok(())
    }

    /// Reads the atom rows written by [`SpectralMeasure::write_csv`]. Bin rows
    /// are rebuilt into a density when at least two bins are present.
    pub fn read_csv<R: BufRead>(input: R) -> Result<SpectralMeasure> {
        let mut atoms = Vec::new();
        let mut bins: Vec<(f64, Complex64)> = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::invalid(e.to_string()))?;
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::invalid(format!(
                    "line {}: expected 4 fields",
                    lineno + 1
                )));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))
            };
            let (e, w) = (
                num(fields[1])?,
                Complex64::new(num(fields[2])?, num(fields[3])?),
            );
            match fields[0] {
                "atom" => atoms.push(Atom::new(e, w)),
                "bin" => bins.push((e, w)),
                other => {
                    return Err(Error::invalid(format!(
                        "line {}: unknown kind `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        let density = match bins.len() {
            0 => None,
            1 => return Err(Error::invalid("a single bin does not determine its width")),
            b => {
                let width = bins[1].0 - bins[0].0;
                let grid = EnergyGrid::new(bins[0].0, bins[0].0 + width * b as f64, b)?;
                Some(Density::new(
                    grid,
                    bins.iter().map(|(_, m)| m / width).collect(),
                )?)
            }
        };
        Ok(SpectralMeasure::new(atoms, density))
    }
}

fn merge_sorted(atoms: &[Atom], tol: f64) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    let mut run_energy_sum = 0.0;
    let mut run_len = 0usize;
    let mut last_energy = f64::NEG_INFINITY;
    for a in atoms {
        if run_len > 0 && a.energy - last_energy <= tol {
            let cur = out.last_mut().expect("open run");
            cur.weight += a.weight;
            run_energy_sum += a.energy;
            run_len += 1;
            cur.energy = run_energy_sum / run_len as f64;
        } else {
            out.push(*a);
            run_energy_sum = a.energy;
            run_len = 1;
        }
        last_energy = a.energy;
    }
    out
}

/// Largest `|weight|` after merging atoms within [`MERGE_TOLERANCE`].
pub fn max_atom_weight(mu: &SpectralMeasure) -> f64 {
    merge_sorted(mu.atoms(), MERGE_TOLERANCE)
        .iter()
        .fold(0.0, |acc, a| acc.max(a.weight.norm()))
}

/// Largest discrepancy between the atomic parts of two measures.
///
/// The atoms of `mu` and `-nu` are pooled and clustered with gap `tol`, so
/// different splittings of degenerate clusters compare equal.
pub fn atom_discrepancy(mu: &SpectralMeasure, nu: &SpectralMeasure, tol: f64) -> f64 {
    let mut pooled: Vec<Atom> = mu.atoms().to_vec();
    pooled.extend(nu.atoms().iter().map(|a| Atom::new(a.energy, -a.weight)));
    pooled.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    merge_sorted(&pooled, tol)
        .iter()
        .fold(0.0, |acc, a| acc.max(a.weight.norm()))
}

/// Spreads `mass` over `grid` following the law of `lo + U₁ + U₂` with
/// `U₁ ~ Uniform[0, p]`, `U₂ ~ Uniform[0, q]` (either width may be zero).
/// Adds the mass per bin into `out` and returns the part outside the grid.
pub(crate) fn deposit(
    out: &mut [Complex64],
    grid: &EnergyGrid,
    lo: f64,
    p: f64,
    q: f64,
    mass: Complex64,
) -> Complex64 {
    let cdf = |x: f64| box_sum_cdf(x - lo, p, q);
    let h = grid.width();
    let hi = lo + p + q;
    let first = ((lo - grid.e_min) / h).floor().max(0.0) as usize;
    let last = (((hi - grid.e_min) / h).ceil().max(0.0) as usize).min(grid.bins);
    let mut placed = 0.0;
    for (k, slot) in out.iter_mut().enumerate().take(last).skip(first) {
        let frac = cdf(grid.e_min + (k + 1) as f64 * h) - cdf(grid.e_min + k as f64 * h);
        if frac != 0.0 {
            *slot += mass * frac;
            placed += frac;
        }
    }
    mass * (1.0 - placed)
}

/// CDF at `u` of the sum of independent uniforms on `[0, p]` and `[0, q]`.
fn box_sum_cdf(u: f64, p: f64, q: f64) -> f64 {
    let (p, q) = if p <= q { (p, q) } else { (q, p) };
    if u <= 0.0 {
        return 0.0;
    }
    if u >= p + q {
        return 1.0;
    }
    if p == 0.0 {
        return if q == 0.0 { 1.0 } else { u / q };
    }
    if u < p {
        u * u / (2.0 * p * q)
    } else if u <= q {
        (u - 0.5 * p) / q
    } else {
        let v = p + q - u;
        1.0 - v * v / (2.0 * p * q)
    }
}

pub(crate) fn check_lost(lost: Complex64, total: Complex64, grid: &EnergyGrid) -> Result<()> {
    if lost.norm() > 1e-12 * total.norm().max(1.0) {
        return Err(Error::LostMass {
            lost: lost.norm(),
            e_min: grid.e_min,
            e_max: grid.e_max,
        });
    }
    Ok(())
}
