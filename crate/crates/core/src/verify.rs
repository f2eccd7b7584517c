//! Empirical checks of the operator inequalities on truncated spaces.
//!
//! Each probe draws a seeded battery of coefficient vectors, measures the
//! ratio between the two sides of an inequality and reports its extremes.
//! Existential constants are never used as thresholds; only monotonicity in
//! the sweep parameters and exact identities are asserted.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::battery;
use crate::error::{Error, Result};
use crate::exec;
use crate::fiber::{g_factors, FiberPoint, PlaneWaveBasis, Weight};
use crate::lattice::{dot, enumerate_ball, norm, DirectionFrame, Lattice, ReciprocalIndex, DEFAULT_INDEX_CAP};
use crate::linalg;
use crate::potential::{directional_norm, weak_norm, SampledField, TrigPolynomial, XGrid};
use crate::spectrum::{thomas_probe, weighted_operator};

pub const MIN_BATTERY: usize = 32;
pub const DEFAULT_BATTERY: usize = 64;
/// Allowed growth between consecutive κ in the decay checks.
pub const KAPPA_SLACK: f64 = 0.10;
/// Allowed deviation in the Bernstein scaling checks.
pub const BERNSTEIN_SLACK: f64 = 0.25;
pub const IDENTITY_TOL: f64 = 1e-10;

/// Extremes for one parameter setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<f64>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Battery index attaining `max_ratio`.
    pub argmax: Option<usize>,
    pub samples: usize,
    /// A closed-form upper bound for `max_ratio`, where one is known.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub probe: String,
    pub k: Vec<Vec<f64>>,
    pub cutoff: f64,
    pub seed: u64,
    pub battery: usize,
    pub rows: Vec<RatioRow>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// The probe's monotonicity assertion.
    pub monotone: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub identity_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quadrature_error: Option<f64>,
    pub pass: bool,
}

impl RatioReport {
    fn new(probe: &str, k: Vec<Vec<f64>>, cutoff: f64, seed: u64, battery: usize, rows: Vec<RatioRow>) -> Self {
        let max_ratio = rows.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
        let min_ratio = rows.iter().map(|r| r.min_ratio).fold(f64::INFINITY, f64::min);
        RatioReport {
            probe: probe.to_string(),
            k,
            cutoff,
            seed,
            battery,
            rows,
            max_ratio,
            min_ratio: if min_ratio.is_finite() { min_ratio } else { 0.0 },
            monotone: true,
            identity_residual: None,
            quadrature_error: None,
            pass: true,
        }
    }

    fn finite(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.max_ratio.is_finite() && r.min_ratio.is_finite() && r.max_ratio >= 0.0 && r.min_ratio >= 0.0)
    }
}

fn check_battery(size: usize) -> Result<()> {
    if size < MIN_BATTERY {
        return Err(Error::InvalidArgument(format!(
            "battery size must be at least {MIN_BATTERY}, got {size}"
        )));
    }
    Ok(())
}

fn row(ratios: &[f64]) -> RatioRow {
    let (mut argmax, mut max) = (None, 0.0);
    for (i, r) in ratios.iter().enumerate() {
        if argmax.is_none() || *r > max {
            argmax = Some(i);
            max = *r;
        }
    }
    RatioRow {
        kappa: None,
        epsilon: None,
        a: None,
        max_ratio: max,
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min).min(max),
        argmax,
        samples: ratios.len(),
        bound: None,
    }
}

/// The exact quadratic form `φ†Sφ` of multiplication by a scalar polynomial
/// `S` on the basis span.
struct Multiplier {
    entries: Vec<(usize, usize, Complex64)>,
}

impl Multiplier {
    fn new(s: &TrigPolynomial, basis: &PlaneWaveBasis) -> Self {
        let mut entries = Vec::new();
        for (i, n) in basis.indices().iter().enumerate() {
            for (p, c) in s.iter() {
                let target: Vec<i64> = n.coords.iter().zip(p).map(|(a, b)| a - b).collect();
                if let Some(j) = basis.index_of(&target) {
                    entries.push((i, j, c[0]));
                }
            }
        }
        Multiplier { entries }
    }

    fn form(&self, phi: &[Complex64]) -> f64 {
        self.entries
            .iter()
            .map(|(i, j, c)| (phi[*i].conj() * c * phi[*j]).re)
            .sum::<f64>()
            .max(0.0)
    }

    /// `‖fφ‖` when built from `|f|²`; exact since the product is not truncated.
    fn norm_of_product(&self, phi: &[Complex64]) -> f64 {
        self.form(phi).sqrt()
    }
}

fn weighted_norm(weights: &[f64], phi: &[Complex64]) -> f64 {
    weights
        .iter()
        .zip(phi)
        .map(|(w, z)| w * z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// The battery with the constant mode first (when the basis contains it).
fn battery_with_constant(basis: &PlaneWaveBasis, size: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let zero = vec![0i64; basis.lattice().dim()];
    let mut out = Vec::with_capacity(size);
    let start = if let Some(i) = basis.index_of(&zero) {
        let mut e = vec![Complex64::new(0.0, 0.0); basis.len()];
        e[i] = Complex64::new(1.0, 0.0);
        out.push(e);
        1
    } else {
        0
    };
    out.extend(exec::map_range(size - start, |t| {
        battery::complex_gaussian(&mut battery::sample_rng(seed, t as u64), basis.len())
    }));
    out
}

fn random_battery(len: usize, size: usize, seed: u64) -> Vec<Vec<Complex64>> {
    exec::map_range(size, |t| {
        battery::complex_gaussian(&mut battery::sample_rng(seed, t as u64), len)
    })
}

fn non_increasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack) + 1e-15)
}

/// `‖Wφ‖ ≤ C̃ ‖W‖_{n,w} ‖L^{1/2}φ‖` on each Thomas fiber. `w_poly` realises the
/// multiplication, `w_sampled` supplies the weak-`Lⁿ` norm.
#[allow(clippy::too_many_arguments)]
pub fn probe_thm12(
    w_poly: &TrigPolynomial,
    w_sampled: &SampledField,
    frame: &DirectionFrame,
    basis: &PlaneWaveBasis,
    kappas: &[f64],
    k: Option<Vec<f64>>,
    battery_size: usize,
    seed: u64,
) -> Result<RatioReport> {
    check_battery(battery_size)?;
    if w_poly.components() != 1 || w_sampled.components() != 1 {
        return Err(Error::DimensionMismatch("W must be scalar".into()));
    }
    w_poly.check_real()?;
    let n = basis.lattice().dim();
    let w_norm = weak_norm(w_sampled, n as f64)?;
    let k = k.unwrap_or_else(|| FiberPoint::default_thomas_k(frame));
    let mult = Multiplier::new(&w_poly.squared_magnitude(), basis);
    let phis = random_battery(basis.len(), battery_size, seed);
    let sup_bound = w_poly.l1_mass();
    let mut rows = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let fp = FiberPoint::thomas(k.clone(), kappa, frame.clone())?;
        let l = g_factors(basis, &fp)?.l();
        let ratios = exec::map(&phis, |phi| {
            let top = mult.norm_of_product(phi);
            if top == 0.0 {
                0.0
            } else {
                top / (w_norm * weighted_norm(&l, phi))
            }
        });
        let mut r = row(&ratios);
        r.kappa = Some(kappa);
        if w_norm > 0.0 {
            r.bound = Some(sup_bound * (frame.gamma_norm / (2.0 * PI * kappa)).sqrt() / w_norm);
        }
        rows.push(r);
    }
    let mut report = RatioReport::new("thm12", vec![k], basis.cutoff(), seed, battery_size, rows);
    let maxes: Vec<f64> = report.rows.iter().map(|r| r.max_ratio).collect();
    report.monotone = non_increasing(&maxes, KAPPA_SLACK);
    let bounded = report
        .rows
        .iter()
        .all(|r| r.bound.is_none_or(|b| r.max_ratio <= b * (1.0 + 1e-12)));
    report.pass = report.finite() && report.monotone && bounded;
    Ok(report)
}

/// Smallest `C_ε` with `‖Vφ‖ ≤ ‖V‖_{2,γ}(ε‖p∥φ‖ + C_ε‖φ‖)` over the battery
/// and all `k` in `k_list`, where `p∥ = k∥ + 2πN∥`. Basis vectors are
/// orthonormal, so no cell-volume factor appears.
#[allow(clippy::too_many_arguments)]
pub fn probe_lemma11(
    v: &TrigPolynomial,
    frame: &DirectionFrame,
    basis: &PlaneWaveBasis,
    k_list: &[Vec<f64>],
    epsilons: &[f64],
    x_grid: XGrid,
    battery_size: usize,
    seed: u64,
) -> Result<RatioReport> {
    check_battery(battery_size)?;
    if v.components() != 1 {
        return Err(Error::DimensionMismatch("V must be scalar".into()));
    }
    if k_list.is_empty() || epsilons.iter().any(|e| !(*e >= 0.0)) || epsilons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "need k values and ascending nonnegative epsilons".into(),
        ));
    }
    let v_norm = directional_norm(v, frame, 2, x_grid)?;
    let mult = Multiplier::new(&v.squared_magnitude(), basis);
    let phis = battery_with_constant(basis, battery_size, seed);
    // per (k, φ): ‖Vφ‖/‖V‖, ‖p∥φ‖, ‖φ‖
    let mut parts = Vec::new();
    for k in k_list {
        let fp = FiberPoint::new(k.clone(), 0.0, frame.clone())?;
        let par: Vec<f64> = basis
            .indices()
            .iter()
            .map(|n| fp.split_momentum(&n.cartesian).0.powi(2))
            .collect();
        parts.extend(exec::map(&phis, |phi| {
            let top = if v_norm > 0.0 {
                mult.norm_of_product(phi) / v_norm
            } else {
                0.0
            };
            (top, weighted_norm(&par, phi), linalg::vec_norm(phi))
        }));
    }
    let rows = epsilons
        .iter()
        .map(|&eps| {
            let ratios: Vec<f64> = parts.iter().map(|(t, p, n)| ((t - eps * p) / n).max(0.0)).collect();
            let mut r = row(&ratios);
            r.epsilon = Some(eps);
            r
        })
        .collect();
    let mut report = RatioReport::new("lemma11", k_list.to_vec(), basis.cutoff(), seed, battery_size, rows);
    let c: Vec<f64> = report.rows.iter().map(|r| r.max_ratio).collect();
    report.monotone = non_increasing(&c, 0.0);
    report.pass = report.finite() && report.monotone;
    Ok(report)
}

/// `𝒦_a`: indices with `|κ − |k⊥ + 2πN⊥|| ≤ a` and `|k∥ + 2πN∥| ≤ a`.
pub fn bernstein_indices(lattice: &Lattice, fiber: &FiberPoint, a: f64) -> Result<Vec<ReciprocalIndex>> {
    let reach = (a * a + (fiber.kappa + a).powi(2)).sqrt() + norm(&fiber.k);
    let ball = enumerate_ball(lattice, reach, None, DEFAULT_INDEX_CAP)?;
    Ok(ball
        .into_iter()
        .filter(|n| {
            let (par, perp) = fiber.split_momentum(&n.cartesian);
            par.abs() <= a && (fiber.kappa - perp).abs() <= a
        })
        .collect())
}

/// `‖F‖_{L^q(K)}` of `F = Σ F_N e^{2πi(N,x)}/v^{1/2}` by the rectangle rule on
/// a grid with `oversample·(2 max|N_j| + 1)` points per axis.
pub fn lq_norm(lattice: &Lattice, modes: &[Vec<i64>], coeffs: &[Complex64], q: f64, oversample: usize) -> Result<f64> {
    let n = lattice.dim();
    if modes.is_empty() {
        return Ok(0.0);
    }
    let extents: Vec<usize> = (0..n)
        .map(|j| {
            let m = modes.iter().map(|c| c[j].unsigned_abs() as usize).max().unwrap_or(0);
            oversample.max(1) * (2 * m + 1)
        })
        .collect();
    let total: usize = extents.iter().product();
    let mut grid = vec![Complex64::new(0.0, 0.0); total];
    // first axis fastest
    let mut strides = vec![1usize; n];
    for j in 1..n {
        strides[j] = strides[j - 1] * extents[j - 1];
    }
    for (c, z) in modes.iter().zip(coeffs) {
        let pos: usize = c
            .iter()
            .zip(&extents)
            .zip(&strides)
            .map(|((&m, &e), &s)| m.rem_euclid(e as i64) as usize * s)
            .sum();
        grid[pos] += z;
    }
    let mut planner = FftPlanner::<f64>::new();
    for j in 0..n {
        let fft = planner.plan_fft_inverse(extents[j]);
        let mut line = vec![Complex64::new(0.0, 0.0); extents[j]];
        for start in 0..total {
            if !(start / strides[j]).is_multiple_of(extents[j]) {
                continue;
            }
            for (t, slot) in line.iter_mut().enumerate() {
                *slot = grid[start + t * strides[j]];
            }
            fft.process(&mut line);
            for (t, value) in line.iter().enumerate() {
                grid[start + t * strides[j]] = *value;
            }
        }
    }
    let v = lattice.cell_volume();
    let mean: f64 = grid.iter().map(|z| z.norm().powf(q)).sum::<f64>() / total as f64;
    Ok((v * mean).powf(1.0 / q) / v.sqrt())
}

/// The Bernstein-type bound `‖F‖_q ≤ C a^{1/2+1/n} κ^{1/2−1/n} ‖F‖_2`,
/// `q = 2n/(n−2)`, for `F` spectrally supported in `𝒦_a`.
pub fn probe_bernstein(
    lattice: &Lattice,
    fiber: &FiberPoint,
    a: f64,
    battery_size: usize,
    seed: u64,
) -> Result<RatioReport> {
    check_battery(battery_size)?;
    let n = lattice.dim();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("the L^q bound needs n >= 3, got {n}")));
    }
    let diam = lattice.reciprocal_diameter();
    let kappa = fiber.kappa;
    if kappa < 4.0 * PI * diam || a < PI * diam || a > kappa / 2.0 {
        return Err(Error::Guard(format!(
            "need kappa >= 4 pi diam = {:.6} and pi diam = {:.6} <= a <= kappa/2, got kappa = {kappa}, a = {a}",
            4.0 * PI * diam,
            PI * diam
        )));
    }
    let q = 2.0 * n as f64 / (n as f64 - 2.0);
    let modes: Vec<Vec<i64>> = bernstein_indices(lattice, fiber, a)?
        .into_iter()
        .map(|i| i.coords)
        .collect();
    let scale = a.powf(0.5 + 1.0 / n as f64) * kappa.powf(0.5 - 1.0 / n as f64);
    let mut rows_out = Vec::new();
    let mut quadrature_error = None;
    if modes.is_empty() {
        rows_out.push(RatioRow {
            kappa: Some(kappa),
            epsilon: None,
            a: Some(a),
            max_ratio: 0.0,
            min_ratio: 0.0,
            argmax: None,
            samples: 0,
            bound: None,
        });
    } else {
        let phis = random_battery(modes.len(), battery_size, seed);
        let ratios = exec::map(&phis, |f| -> Result<f64> {
            Ok(lq_norm(lattice, &modes, f, q, 4)? / (scale * linalg::vec_norm(f)))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let coarse = lq_norm(lattice, &modes, &phis[0], q, 4)?;
        let fine = lq_norm(lattice, &modes, &phis[0], q, 8)?;
        quadrature_error = Some((coarse - fine).abs() / fine);
        let mut r = row(&ratios);
        r.kappa = Some(kappa);
        r.a = Some(a);
        rows_out.push(r);
    }
    let mut report = RatioReport::new(
        "bernstein",
        vec![fiber.k.clone()],
        kappa + a,
        seed,
        battery_size,
        rows_out,
    );
    report.quadrature_error = quadrature_error;
    report.pass = report.finite();
    Ok(report)
}

/// Runs [`probe_bernstein`] over `(κ, a)` pairs and checks the scaling:
/// doubling `a` at fixed `κ` changes the envelope by at most
/// `2^{1/2+1/n}(1 + slack)`, doubling `κ` at fixed `a` does not raise it
/// beyond the slack.
pub fn bernstein_sweep(
    lattice: &Lattice,
    k: &[f64],
    frame: &DirectionFrame,
    settings: &[(f64, f64)],
    battery_size: usize,
    seed: u64,
) -> Result<RatioReport> {
    let mut rows = Vec::new();
    let mut quad: f64 = 0.0;
    for &(kappa, a) in settings {
        let fp = FiberPoint::new(k.to_vec(), kappa, frame.clone())?;
        let r = probe_bernstein(lattice, &fp, a, battery_size, seed)?;
        quad = quad.max(r.quadrature_error.unwrap_or(0.0));
        rows.extend(r.rows);
    }
    let cutoff = settings.iter().map(|(k, a)| k + a).fold(0.0, f64::max);
    let mut report = RatioReport::new("bernstein", vec![k.to_vec()], cutoff, seed, battery_size, rows);
    report.quadrature_error = Some(quad);
    let n = lattice.dim() as f64;
    let factor = 2f64.powf(0.5 + 1.0 / n) * (1.0 + BERNSTEIN_SLACK);
    let mut monotone = true;
    for x in &report.rows {
        for y in &report.rows {
            let (kx, ax, ky, ay) = (
                x.kappa.unwrap_or(0.0),
                x.a.unwrap_or(0.0),
                y.kappa.unwrap_or(0.0),
                y.a.unwrap_or(0.0),
            );
            if x.samples == 0 || y.samples == 0 {
                continue;
            }
            if kx == ky && (ay - 2.0 * ax).abs() < 1e-12 {
                monotone &= y.max_ratio <= x.max_ratio * factor && x.max_ratio <= y.max_ratio * factor;
            }
            if ax == ay && (ky - 2.0 * kx).abs() < 1e-12 {
                monotone &= y.max_ratio <= x.max_ratio * (1.0 + BERNSTEIN_SLACK);
            }
        }
    }
    report.monotone = monotone;
    report.pass = report.finite() && monotone;
    Ok(report)
}

/// Smallest `C_ε` with `‖|A|φ‖ ≤ ε(Σ_j ‖∂_jφ‖²)^{1/2} + C_ε‖φ‖` at `k = 0`.
pub fn probe_relative_bound(
    a: &TrigPolynomial,
    basis: &PlaneWaveBasis,
    epsilons: &[f64],
    battery_size: usize,
    seed: u64,
) -> Result<RatioReport> {
    check_battery(battery_size)?;
    a.check_real()?;
    if epsilons.iter().any(|e| !(*e >= 0.0)) || epsilons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "epsilons must be ascending and nonnegative".into(),
        ));
    }
    let mult = Multiplier::new(&a.squared_magnitude(), basis);
    let grad: Vec<f64> = basis
        .indices()
        .iter()
        .map(|n| 4.0 * PI * PI * dot(&n.cartesian, &n.cartesian))
        .collect();
    let phis = battery_with_constant(basis, battery_size, seed);
    let parts = exec::map(&phis, |phi| {
        (
            mult.norm_of_product(phi),
            weighted_norm(&grad, phi),
            linalg::vec_norm(phi),
        )
    });
    let rows = epsilons
        .iter()
        .map(|&eps| {
            let ratios: Vec<f64> = parts.iter().map(|(t, g, n)| ((t - eps * g) / n).max(0.0)).collect();
            let mut r = row(&ratios);
            r.epsilon = Some(eps);
            r
        })
        .collect();
    let dim = basis.lattice().dim();
    let mut report = RatioReport::new(
        "relative_bound",
        vec![vec![0.0; dim]],
        basis.cutoff(),
        seed,
        battery_size,
        rows,
    );
    let c: Vec<f64> = report.rows.iter().map(|r| r.max_ratio).collect();
    report.monotone = non_increasing(&c, 0.0);
    report.pass = report.finite() && report.monotone;
    Ok(report)
}

/// The weighted invertibility bound with `V = V₁ + V₂`. Each row carries the
/// exact infimum `s_min` as `min_ratio` and the battery maximum of
/// `‖L^{-1/2}(M − λ)φ‖/‖L^{1/2}φ‖` as `max_ratio`; the report also checks
/// `sup_{‖L^{1/2}ψ‖ ≤ 1} |ψ†Mφ| = ‖L^{-1/2}Mφ‖` at the explicit maximiser.
#[allow(clippy::too_many_arguments)]
pub fn probe_thm11(
    a: &TrigPolynomial,
    v1: &TrigPolynomial,
    v2: &TrigPolynomial,
    lambda: f64,
    frame: &DirectionFrame,
    basis: &PlaneWaveBasis,
    kappas: &[f64],
    k: Option<Vec<f64>>,
    battery_size: usize,
    seed: u64,
) -> Result<RatioReport> {
    check_battery(battery_size)?;
    let v = v1.add(v2)?;
    let thomas = thomas_probe(a, &v, lambda, frame, basis, kappas, k)?;
    let phis = random_battery(basis.len(), battery_size, seed);
    let mut rows = Vec::with_capacity(kappas.len());
    let mut residual: f64 = 0.0;
    for (&kappa, &s_min) in kappas.iter().zip(&thomas.s_min) {
        let fp = FiberPoint::thomas(thomas.k.clone(), kappa, frame.clone())?;
        let weighted = weighted_operator(a, &v, lambda, &fp, basis)?;
        let half = crate::fiber::diagonal_power_real(basis, &fp, Weight::L, 0.5)?;
        let inv_half: Vec<f64> = half.iter().map(|h| 1.0 / h).collect();
        let samples = exec::map(&phis, |phi| {
            // Mφ = L^{1/2} W L^{1/2} φ with W the weighted operator
            let u: Vec<Complex64> = phi.iter().zip(&half).map(|(z, h)| z * h).collect();
            let wu = linalg::matvec(&weighted, &u);
            let dual = linalg::vec_norm(&wu);
            let m_phi: Vec<Complex64> = wu.iter().zip(&half).map(|(z, h)| z * h).collect();
            let psi: Vec<Complex64> = m_phi.iter().zip(&inv_half).map(|(z, h)| z * h * h / dual).collect();
            let psi_weight = weighted_norm(&half.iter().map(|h| h * h).collect::<Vec<_>>(), &psi);
            let pairing: Complex64 = psi.iter().zip(&m_phi).map(|(p, m)| p.conj() * m).sum();
            let res = (pairing.norm() - dual).abs().max((psi_weight - 1.0).abs() * dual) / dual.max(1e-300);
            (dual / linalg::vec_norm(&u), res)
        });
        let ratios: Vec<f64> = samples.iter().map(|s| s.0).collect();
        residual = samples.iter().map(|s| s.1).fold(residual, f64::max);
        let mut r = row(&ratios);
        r.kappa = Some(kappa);
        r.min_ratio = s_min;
        rows.push(r);
    }
    let mut report = RatioReport::new(
        "thm11",
        vec![thomas.k.clone()],
        basis.cutoff(),
        seed,
        battery_size,
        rows,
    );
    report.identity_residual = Some(residual);
    report.monotone = thomas.tail_min > 0.0;
    report.pass = report.finite() && report.monotone && residual < IDENTITY_TOL;
    Ok(report)
}
