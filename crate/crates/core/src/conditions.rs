//! The transverse-flatness functional θ, the Fourier-sum criterion, and the
//! search over lattice directions γ.
//!
//! Both averages in θ are diagonal in Fourier space: the ξ-average over the
//! closed line keeps the modes with `(N, γ) = 0`, and integrating against an
//! even measure μ along `ẽ` multiplies mode `N` by `μ̂(2π(N, ẽ))`. θ is then
//!
//! ```text
//! θ = (|γ|/π) · max_{x, ẽ} | Σ_{N≠0, (N,γ)=0} μ̂(2π(N,ẽ)) A_N e^{2πi(N,x)} |
//! ```
//!
//! with the maxima taken over finite grids.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::lattice::{dot, norm, DirectionFrame, Lattice};
use crate::potential::{TrigPolynomial, XGrid};

/// An even measure on ℝ whose Fourier transform is 1 on `(−h, h)`, stored
/// through that transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AveragingMeasure {
    Dirac,
    /// `μ̂ = 1` on `|p| ≤ h`, raised-cosine taper to 0 on `[h, outer]`.
    Windowed {
        h: f64,
        outer: f64,
    },
}

impl AveragingMeasure {
    pub fn windowed(h: f64, outer: f64) -> Result<Self> {
        if !(h > 0.0 && outer >= h && outer.is_finite()) {
            return Err(Error::NotInMh(format!(
                "window needs 0 < h <= H, got h = {h}, H = {outer}"
            )));
        }
        Ok(AveragingMeasure::Windowed { h, outer })
    }

    /// `μ̂(p) = ∫ e^{ipt} dμ(t)`.
    pub fn transform(&self, p: f64) -> f64 {
        match *self {
            AveragingMeasure::Dirac => 1.0,
            AveragingMeasure::Windowed { h, outer } => {
                let a = p.abs();
                if a <= h {
                    1.0
                } else if a >= outer {
                    0.0
                } else {
                    0.5 * (1.0 + (PI * (a - h) / (outer - h)).cos())
                }
            }
        }
    }

    /// Density of a windowed measure; `None` for the Dirac measure.
    pub fn density(&self, t: f64) -> Option<f64> {
        match *self {
            AveragingMeasure::Dirac => None,
            AveragingMeasure::Windowed { h, outer } => {
                let c = 0.5 * (h + outer);
                let w = outer - h;
                let sharp = c / PI * sinc(c * t);
                if w == 0.0 {
                    return Some(sharp);
                }
                // indicator of [-c, c] convolved with a cosine bump of width w
                let alpha = PI / w;
                let a = t.abs();
                let bump = alpha * alpha * 0.5 * w * sinc(0.5 * w * (a - alpha)) / (a + alpha);
                Some(sharp * bump)
            }
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            AveragingMeasure::Dirac => "dirac".to_string(),
            AveragingMeasure::Windowed { h, outer } => format!("windowed(h = {h}, H = {outer})"),
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Outcome of [`validate_measure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub measure: AveragingMeasure,
    pub flat_samples: usize,
    pub total_variation: f64,
    /// Mass of `|μ|` on the outermost dyadic shell of the truncated t-range.
    pub truncation_residual: f64,
    /// Ratio of the outer to the inner dyadic tail mass; about 1/4 for
    /// `t^{-3}` decay, about 1 for the non-integrable `t^{-1}` decay.
    pub tail_ratio: f64,
    pub t_max: f64,
}

const TAIL_RATIO_LIMIT: f64 = 0.5;

/// Checks the flat-window identity on a `p`-grid of `(−h, h)`, evenness, and
/// (for windowed measures) integrability of the density.
pub fn validate_measure(mu: &AveragingMeasure, samples: usize) -> Result<MeasureReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let (h, outer) = match *mu {
        AveragingMeasure::Dirac => {
            return Ok(MeasureReport {
                measure: *mu,
                flat_samples: samples,
                total_variation: 1.0,
                truncation_residual: 0.0,
                tail_ratio: 0.0,
                t_max: 0.0,
            })
        }
        AveragingMeasure::Windowed { h, outer } => (h, outer),
    };
    if !(h > 0.0 && outer >= h) {
        return Err(Error::NotInMh(format!(
            "window needs 0 < h <= H, got h = {h}, H = {outer}"
        )));
    }
    for i in 0..samples {
        let p = -h + 2.0 * h * (i as f64 + 0.5) / samples as f64;
        if mu.transform(p) != 1.0 {
            return Err(Error::NotInMh(format!("transform differs from 1 at p = {p}")));
        }
        if mu.transform(p) != mu.transform(-p) {
            return Err(Error::NotInMh(format!("transform not even at p = {p}")));
        }
    }

    // |μ| integrated by Simpson's rule on [0, T], doubled by evenness
    let t_max = 256.0 * PI / h;
    let step_target = 2.0 * PI / (16.0 * outer);
    let shell = |lo: f64, hi: f64| -> f64 {
        let mut intervals = ((hi - lo) / step_target).ceil() as usize;
        intervals += intervals % 2;
        let dt = (hi - lo) / intervals as f64;
        let f = |t: f64| mu.density(t).unwrap_or(0.0).abs();
        let mut s = f(lo) + f(hi);
        for i in 1..intervals {
            let wgt = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += wgt * f(lo + i as f64 * dt);
        }
        2.0 * s * dt / 3.0
    };
    let core = shell(0.0, t_max / 4.0);
    let inner_tail = shell(t_max / 4.0, t_max / 2.0);
    let outer_tail = shell(t_max / 2.0, t_max);
    let tail_ratio = outer_tail / inner_tail.max(f64::MIN_POSITIVE);
    if tail_ratio > TAIL_RATIO_LIMIT {
        return Err(Error::NotInMh(format!(
            "density tail does not decay integrably (dyadic tail ratio {tail_ratio:.3})"
        )));
    }
    Ok(MeasureReport {
        measure: *mu,
        flat_samples: samples,
        total_variation: core + inner_tail + outer_tail,
        truncation_residual: outer_tail,
        tail_ratio,
        t_max,
    })
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `e`.
pub fn transverse_basis(e: &[f64]) -> Vec<Vec<f64>> {
    let n = e.len();
    let mut frame = vec![e.to_vec()];
    for axis in 0..n {
        let mut v = vec![0.0; n];
        v[axis] = 1.0;
        for u in &frame {
            let c = dot(&v, u);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= c * ui;
            }
        }
        let len = norm(&v);
        if len > 1e-8 {
            frame.push(v.iter().map(|x| x / len).collect());
        }
        if frame.len() == n {
            break;
        }
    }
    frame.remove(0);
    frame
}

/// Grid on the unit sphere of the hyperplane `γ⊥`: `points` azimuths, and
/// `points/2 + 1` polar angles per extra dimension when `n > 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereGrid {
    pub points: usize,
}

impl SphereGrid {
    pub fn new(points: usize) -> Self {
        SphereGrid { points }
    }

    /// Unit vectors `ẽ` with `(ẽ, γ) = 0`.
    pub fn directions(&self, frame: &DirectionFrame) -> Result<Vec<Vec<f64>>> {
        let n = frame.e.len();
        if n < 3 || self.points == 0 {
            return Err(Error::EmptySphereGrid(n));
        }
        let basis = transverse_basis(&frame.e);
        let polar_steps = self.points / 2 + 1;
        let polar_count = n - 3;
        let mut out = Vec::new();
        let mut counters = vec![0usize; polar_count];
        loop {
            for az in 0..self.points {
                let phi = 2.0 * PI * az as f64 / self.points as f64;
                // hyperspherical coordinates in the transverse basis
                let mut coords = Vec::with_capacity(n - 1);
                let mut sin_prod = 1.0;
                for &c in &counters {
                    let theta = PI * c as f64 / (polar_steps - 1).max(1) as f64;
                    coords.push(sin_prod * theta.cos());
                    sin_prod *= theta.sin();
                }
                coords.push(sin_prod * phi.cos());
                coords.push(sin_prod * phi.sin());
                let mut v = vec![0.0; n];
                for (c, b) in coords.iter().zip(&basis) {
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi += c * bi;
                    }
                }
                out.push(v);
            }
            let mut axis = 0;
            loop {
                if axis == polar_count {
                    return Ok(out);
                }
                counters[axis] += 1;
                if counters[axis] < polar_steps {
                    break;
                }
                counters[axis] = 0;
                axis += 1;
            }
        }
    }
}

/// θ together with the grid point where the maximum is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub theta: f64,
    pub argmax_x_fractional: Vec<f64>,
    pub argmax_direction: Vec<f64>,
    pub x_resolution: usize,
    pub sphere_points: usize,
}

/// Evaluates θ by the Fourier-multiplier formula on the given grids.
pub fn theta(
    a: &TrigPolynomial,
    frame: &DirectionFrame,
    mu: &AveragingMeasure,
    x_grid: XGrid,
    sphere_grid: SphereGrid,
) -> Result<ThetaValue> {
    a.check_real()?;
    let n = a.dim();
    let directions = sphere_grid.directions(frame)?;
    let lat = a.lattice();
    let modes: Vec<(Vec<i64>, Vec<f64>, &Vec<Complex64>)> = a
        .iter()
        .filter(|(k, _)| k.iter().any(|&m| m != 0) && frame.pairing(k) == 0)
        .map(|(k, v)| (k.clone(), lat.reciprocal_vector(k), v))
        .collect();

    let shape = x_grid.shape(n);
    let points: Vec<Vec<f64>> = (0..shape.len()).map(|i| shape.fractional(i)).collect();
    let d = a.components();

    // phases e^{2πi(N,x)} per (x, mode), shared across directions
    let phases: Vec<Vec<Complex64>> = exec::map(&points, |x| {
        modes
            .iter()
            .map(|(k, _, _)| {
                let arg: f64 = k.iter().zip(x).map(|(&m, xi)| m as f64 * xi).sum();
                Complex64::from_polar(1.0, 2.0 * PI * arg)
            })
            .collect()
    });

    let per_direction: Vec<(f64, usize)> = exec::map(&directions, |et| {
        let weights: Vec<f64> = modes
            .iter()
            .map(|(_, cart, _)| mu.transform(2.0 * PI * dot(cart, et)))
            .collect();
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (xi, ph) in phases.iter().enumerate() {
            let mut mag2 = 0.0;
            for c in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for ((w, (_, _, v)), p) in weights.iter().zip(&modes).zip(ph) {
                    s += v[c] * p * *w;
                }
                mag2 += s.re * s.re;
            }
            if mag2 > best.0 {
                best = (mag2, xi);
            }
        }
        best
    });

    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (di, &(val, xi)) in per_direction.iter().enumerate() {
        if val > best.0 {
            best = (val, xi, di);
        }
    }
    Ok(ThetaValue {
        theta: frame.gamma_norm / PI * best.0.max(0.0).sqrt(),
        argmax_x_fractional: points[best.1].clone(),
        argmax_direction: directions[best.2].clone(),
        x_resolution: x_grid.resolution,
        sphere_points: sphere_grid.points,
    })
}

/// `Σ_{N≠0, (N,γ)=0} ‖A_N‖` and the bound `π/|γ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierCriterion {
    pub sum: f64,
    pub bound: f64,
}

impl FourierCriterion {
    pub fn satisfied(&self) -> bool {
        self.sum < self.bound
    }
}

pub fn fourier_criterion(a: &TrigPolynomial, frame: &DirectionFrame) -> FourierCriterion {
    let sum = a
        .iter()
        .filter(|(k, _)| k.iter().any(|&m| m != 0) && frame.pairing(k) == 0)
        .map(|(_, v)| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, |acc, x| acc + x);
    FourierCriterion {
        sum,
        bound: PI / frame.gamma_norm,
    }
}

/// Evaluation of both conditions for one direction γ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub gamma_coords: Vec<i64>,
    pub gamma_norm: f64,
    pub theta: f64,
    pub theta_ok: bool,
    pub fourier_sum: f64,
    pub fourier_bound: f64,
    pub fourier_ok: bool,
    pub measure: AveragingMeasure,
    pub measure_description: String,
    pub grids: GridMetadata,
    pub argmax_x_fractional: Vec<f64>,
    pub argmax_direction: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub x_resolution: usize,
    pub sphere_points: usize,
}

pub fn condition_report(
    a: &TrigPolynomial,
    frame: &DirectionFrame,
    mu: &AveragingMeasure,
    x_grid: XGrid,
    sphere_grid: SphereGrid,
) -> Result<ConditionReport> {
    let t = theta(a, frame, mu, x_grid, sphere_grid)?;
    let fc = fourier_criterion(a, frame);
    Ok(ConditionReport {
        gamma_coords: frame.gamma_coords.clone(),
        gamma_norm: frame.gamma_norm,
        theta: t.theta,
        theta_ok: t.theta < 1.0,
        fourier_sum: fc.sum,
        fourier_bound: fc.bound,
        fourier_ok: fc.satisfied(),
        measure: *mu,
        measure_description: mu.describe(),
        grids: GridMetadata {
            x_resolution: x_grid.resolution,
            sphere_points: sphere_grid.points,
        },
        argmax_x_fractional: t.argmax_x_fractional,
        argmax_direction: t.argmax_direction,
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Primitive lattice directions with coordinates in `[−max, max]ⁿ`, one per
/// `±γ` pair (first nonzero coordinate positive), in lexicographic order.
pub fn primitive_directions(n: usize, max_coord: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut c = vec![-max_coord; n];
    loop {
        let first = c.iter().find(|&&m| m != 0).copied();
        if first.is_some_and(|f| f > 0) && c.iter().fold(0, |g, &m| gcd(g, m)) == 1 {
            out.push(c.clone());
        }
        let mut axis = n;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            c[axis] += 1;
            if c[axis] <= max_coord {
                break;
            }
            c[axis] = -max_coord;
        }
    }
}

/// Evaluates both conditions for every primitive γ in the coordinate box and
/// returns the reports sorted by θ; values within 1e-12 count as equal and
/// are ordered by `|γ|`, then lexicographically.
pub fn search_gamma(
    a: &TrigPolynomial,
    lattice: &Lattice,
    max_coord: i64,
    mu: &AveragingMeasure,
    x_grid: XGrid,
    sphere_grid: SphereGrid,
) -> Result<Vec<ConditionReport>> {
    if max_coord < 1 {
        return Err(Error::InvalidArgument(format!(
            "search box must be at least 1, got {max_coord}"
        )));
    }
    let candidates = primitive_directions(lattice.dim(), max_coord);
    let mut reports = candidates
        .iter()
        .map(|g| {
            let frame = DirectionFrame::new(lattice, g)?;
            condition_report(a, &frame, mu, x_grid, sphere_grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let bucket = |t: f64| (t / 1e-12).round();
    reports.sort_by(|x, y| {
        bucket(x.theta)
            .total_cmp(&bucket(y.theta))
            .then(x.gamma_norm.total_cmp(&y.gamma_norm))
            .then(x.gamma_coords.cmp(&y.gamma_coords))
    });
    Ok(reports)
}
