//! TOML run configuration.
//!
//! ```toml
//! [lattice]
//! dim = 3                     # or: basis = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
//!
//! [potential.a]
//! modes = [{ n = [0, 1, 0], cos = [0.3, 0.0, 0.0] }]
//!
//! [potential.v]
//! file = "v.coef"             # or: grid = "v.grid", grid_cutoff = 20.0
//!
//! [basis]
//! radius = 4.0                # |2πN| ≤ 2π·radius; or: cutoff = 25.1
//! ```
//!
//! Relative file paths resolve against the directory holding the config.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditions::{AveragingMeasure, SphereGrid};
use crate::error::{Error, Result};
use crate::fiber::PlaneWaveBasis;
use crate::lattice::Lattice;
use crate::potential::{fourier_coefficients, parse_coefficients, parse_grid, SampledField, TrigPolynomial, XGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub gamma: GammaSpec,
    #[serde(default = "default_measure")]
    pub measure: AveragingMeasure,
    #[serde(default)]
    pub basis: BasisSpec,
    #[serde(default)]
    pub grids: GridSpec,
    #[serde(default)]
    pub bands: BandsSpec,
    #[serde(default)]
    pub thomas: ThomasSpec,
    #[serde(default)]
    pub probes: ProbeSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_measure() -> AveragingMeasure {
    AveragingMeasure::Dirac
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub dim: Option<usize>,
    /// Rows are the period vectors `E_1, …, E_n`.
    pub basis: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    /// Magnetic potential, `n` components; zero when absent.
    pub a: Option<FieldSource>,
    /// Electric potential; zero when absent.
    pub v: Option<FieldSource>,
    /// Second electric part, added to `v` for the weighted bound probe.
    pub v2: Option<FieldSource>,
    /// Multiplier for the weak-norm probe; defaults to `v`.
    pub w: Option<FieldSource>,
}

/// Exactly one of `file`, `grid` or `modes`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSource {
    pub file: Option<PathBuf>,
    pub grid: Option<PathBuf>,
    /// Fourier cutoff used when reading `grid`.
    pub grid_cutoff: Option<f64>,
    pub modes: Option<Vec<ModeSpec>>,
}

/// `Σ_j (cos_j cos 2π(N,x) + sin_j sin 2π(N,x)) e_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub n: Vec<i64>,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSpec {
    /// Fixed direction; when absent the best-ranked direction is searched.
    pub coords: Option<Vec<i64>>,
    #[serde(default = "one")]
    pub search: i64,
}

impl Default for GammaSpec {
    fn default() -> Self {
        GammaSpec {
            coords: None,
            search: 1,
        }
    }
}

fn one() -> i64 {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    pub cutoff: Option<f64>,
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub x_resolution: usize,
    pub sphere_points: usize,
    /// Samples per axis when a trig polynomial is tabulated for weak norms.
    pub sample: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x_resolution: 16,
            sphere_points: 32,
            sample: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandsSpec {
    /// Path vertices in fractional reciprocal coordinates.
    pub path: Vec<Vec<f64>>,
    pub points_per_segment: usize,
    pub flat_tolerance: f64,
}

impl Default for BandsSpec {
    fn default() -> Self {
        BandsSpec {
            path: Vec::new(),
            points_per_segment: 8,
            flat_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThomasSpec {
    pub kappas: Vec<f64>,
    pub lambda: f64,
    /// Cartesian quasimomentum on the face `|(k, γ)| = π`.
    pub k: Option<Vec<f64>>,
}

impl Default for ThomasSpec {
    fn default() -> Self {
        ThomasSpec {
            kappas: vec![5.0, 10.0, 20.0, 40.0],
            lambda: 0.0,
            k: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSpec {
    pub seed: u64,
    pub battery: usize,
    pub names: Vec<String>,
    pub kappas: Vec<f64>,
    /// Cartesian quasimomentum for the spinor probes; a generic point on the
    /// face when absent.
    pub k: Option<Vec<f64>>,
    pub epsilons: Vec<f64>,
    pub relative_epsilons: Vec<f64>,
    /// `(κ, a)` pairs.
    pub bernstein: Vec<[f64; 2]>,
    pub dirac_kappas: Vec<f64>,
    pub projection_samples: usize,
    pub threshold_a: f64,
    pub threshold_delta: f64,
}

pub const PROBE_NAMES: [&str; 8] = [
    "thm12",
    "lemma11",
    "bernstein",
    "relative_bound",
    "thm11",
    "dirac_square",
    "projections",
    "thm31",
];

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            seed: 1,
            battery: crate::verify::DEFAULT_BATTERY,
            names: PROBE_NAMES.iter().map(|s| s.to_string()).collect(),
            kappas: vec![10.0, 20.0, 40.0],
            k: None,
            epsilons: vec![0.0, 0.05, 0.1, 0.2, 0.4],
            relative_epsilons: vec![0.0, 0.01, 0.1, 1.0],
            bernstein: vec![[32.0, 6.0], [32.0, 12.0], [32.0, 8.0], [64.0, 8.0]],
            dirac_kappas: vec![0.0, 3.0, 10.0],
            projection_samples: 100,
            threshold_a: 0.5,
            threshold_delta: 0.25,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
}

/// A scalar or vector field as a trig polynomial, plus grid samples when the
/// source was a grid file.
#[derive(Debug, Clone)]
pub struct LoadedField {
    pub poly: TrigPolynomial,
    pub sampled: Option<SampledField>,
}

impl LoadedField {
    /// Grid samples for weak norms, tabulating the polynomial if needed.
    pub fn samples(&self, per_axis: usize) -> Result<SampledField> {
        match &self.sampled {
            Some(s) => Ok(s.clone()),
            None => self.poly.sample(&vec![per_axis; self.poly.dim()]),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` and resolves relative source paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p.as_mut() {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
        };
        let p = &mut self.potential;
        for src in [&mut p.a, &mut p.v, &mut p.v2, &mut p.w].into_iter().flatten() {
            fix(&mut src.file);
            fix(&mut src.grid);
        }
        fix(&mut self.output.dir);
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim()?;
        match (self.basis.cutoff, self.basis.radius) {
            (None, None) => {}
            (Some(c), None) | (None, Some(c)) if c > 0.0 && c.is_finite() => {}
            _ => return Err(Error::Parse("[basis] takes one positive `cutoff` or `radius`".into())),
        }
        if let Some(g) = &self.gamma.coords {
            if g.len() != n || g.iter().all(|&m| m == 0) {
                return Err(Error::Parse(format!("gamma must be {n} integers, not all zero")));
            }
        }
        if let AveragingMeasure::Windowed { h, outer } = self.measure {
            AveragingMeasure::windowed(h, outer)?;
        }
        for name in &self.probes.names {
            if !PROBE_NAMES.contains(&name.as_str()) {
                return Err(Error::Parse(format!(
                    "unknown probe `{name}`; known: {}",
                    PROBE_NAMES.join(", ")
                )));
            }
        }
        let p = &self.potential;
        for (label, src) in [("a", &p.a), ("v", &p.v), ("v2", &p.v2), ("w", &p.w)] {
            if let Some(s) = src {
                let count = s.file.is_some() as u8 + s.grid.is_some() as u8 + s.modes.is_some() as u8;
                if count != 1 {
                    return Err(Error::Parse(format!(
                        "potential.{label} needs exactly one of file, grid, modes"
                    )));
                }
                if s.grid.is_some() && s.grid_cutoff.is_none() {
                    return Err(Error::Parse(format!(
                        "potential.{label}: grid sources need grid_cutoff"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> Result<usize> {
        match (&self.lattice.basis, self.lattice.dim) {
            (Some(b), Some(d)) if b.len() != d => Err(Error::Parse("lattice dim disagrees with basis".into())),
            (Some(b), _) => Ok(b.len()),
            (None, Some(d)) if d >= 1 => Ok(d),
            _ => Err(Error::Parse("[lattice] needs `dim` or `basis`".into())),
        }
    }

    pub fn lattice(&self) -> Result<Lattice> {
        match &self.lattice.basis {
            Some(b) => Lattice::new(b.clone()),
            None => Ok(Lattice::cubic(self.dim()?)),
        }
    }

    pub fn cutoff(&self) -> f64 {
        self.basis
            .cutoff
            .unwrap_or_else(|| 2.0 * PI * self.basis.radius.unwrap_or(1.0))
    }

    pub fn plane_wave_basis(&self, lattice: &Lattice) -> Result<PlaneWaveBasis> {
        PlaneWaveBasis::new(lattice, self.cutoff())
    }

    pub fn x_grid(&self) -> XGrid {
        XGrid::new(self.grids.x_resolution)
    }

    pub fn sphere_grid(&self) -> SphereGrid {
        SphereGrid::new(self.grids.sphere_points)
    }

    pub fn magnetic(&self, lattice: &Lattice) -> Result<LoadedField> {
        load_field(self.potential.a.as_ref(), lattice, lattice.dim())
    }

    pub fn electric(&self, lattice: &Lattice) -> Result<LoadedField> {
        load_field(self.potential.v.as_ref(), lattice, 1)
    }

    pub fn electric_second(&self, lattice: &Lattice) -> Result<LoadedField> {
        load_field(self.potential.v2.as_ref(), lattice, 1)
    }

    pub fn multiplier(&self, lattice: &Lattice) -> Result<LoadedField> {
        match &self.potential.w {
            Some(_) => load_field(self.potential.w.as_ref(), lattice, 1),
            None => self.electric(lattice),
        }
    }

    /// Cartesian path points, `points_per_segment` per leg plus the endpoint.
    pub fn k_path(&self, lattice: &Lattice) -> Result<Vec<Vec<f64>>> {
        let verts = &self.bands.path;
        let n = lattice.dim();
        if verts.iter().any(|v| v.len() != n) {
            return Err(Error::Parse(format!("path vertices need {n} coordinates")));
        }
        if verts.len() < 2 {
            return Err(Error::Parse("[bands] path needs at least two vertices".into()));
        }
        let steps = self.bands.points_per_segment.max(1);
        let mut out = Vec::new();
        for w in verts.windows(2) {
            for s in 0..steps {
                let t = s as f64 / steps as f64;
                let frac: Vec<f64> = w[0].iter().zip(&w[1]).map(|(a, b)| a + t * (b - a)).collect();
                out.push(lattice.k_from_fractional(&frac));
            }
        }
        out.push(lattice.k_from_fractional(verts.last().expect("two vertices")));
        Ok(out)
    }
}

fn load_field(src: Option<&FieldSource>, lattice: &Lattice, components: usize) -> Result<LoadedField> {
    let Some(src) = src else {
        return Ok(LoadedField {
            poly: TrigPolynomial::zero(lattice, components),
            sampled: None,
        });
    };
    let read =
        |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("cannot read {}: {e}", p.display())));
    let field = if let Some(path) = &src.file {
        LoadedField {
            poly: parse_coefficients(&read(path)?, lattice, components)?,
            sampled: None,
        }
    } else if let Some(path) = &src.grid {
        let sampled = parse_grid(&read(path)?, lattice)?;
        if sampled.components() != components {
            return Err(Error::DimensionMismatch(format!(
                "{} has {} components, expected {components}",
                path.display(),
                sampled.components()
            )));
        }
        let poly = fourier_coefficients(&sampled, src.grid_cutoff.unwrap_or(0.0))?;
        LoadedField {
            poly,
            sampled: Some(sampled),
        }
    } else {
        let mut poly = TrigPolynomial::zero(lattice, components);
        for m in src.modes.as_deref().unwrap_or_default() {
            if m.n.len() != lattice.dim() || m.cos.len() > components || m.sin.len() > components {
                return Err(Error::Parse(format!(
                    "mode {:?} does not fit {components} components",
                    m.n
                )));
            }
            let at = |v: &[f64], j: usize| v.get(j).copied().unwrap_or(0.0);
            let c: Vec<Complex64> = (0..components)
                .map(|j| {
                    if m.n.iter().all(|&x| x == 0) {
                        Complex64::new(at(&m.cos, j), 0.0)
                    } else {
                        Complex64::new(at(&m.cos, j) / 2.0, -at(&m.sin, j) / 2.0)
                    }
                })
                .collect();
            poly.add_real_mode(&m.n, &c);
        }
        LoadedField { poly, sampled: None }
    };
    field.poly.check_real()?;
    Ok(field)
}
