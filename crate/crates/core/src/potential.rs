//! Periodic scalar and vector fields.
//!
//! Fields are held either as a [`TrigPolynomial`] (finite Fourier series in
//! `Λ*`) or as a [`SampledField`] on a uniform grid of the cell `K`. The
//! coefficient convention is `φ_N = v(K)^{-1} ∫_K φ(x) e^{-2πi(N,x)} dx`, so a
//! polynomial evaluates as `Σ_N φ_N e^{2πi(N,x)}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::lattice::{decompose, enumerate_indices, norm, DirectionFrame, Lattice};

/// Relative tolerance for the conjugate-symmetry check of real fields.
pub const REALNESS_TOL: f64 = 1e-12;
/// Imaginary residual (relative to the coefficient ℓ¹ mass) above which
/// evaluation reports a non-real field.
pub const IMAG_RESIDUAL_TOL: f64 = 1e-10;

/// A finite Fourier series with `d` complex components per index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    lattice: Lattice,
    components: usize,
    coeffs: BTreeMap<Vec<i64>, Vec<Complex64>>,
}

impl TrigPolynomial {
    pub fn zero(lattice: &Lattice, components: usize) -> Self {
        TrigPolynomial {
            lattice: lattice.clone(),
            components,
            coeffs: BTreeMap::new(),
        }
    }

    /// Constant field with value `c` (one entry per component).
    pub fn constant(lattice: &Lattice, c: &[f64]) -> Self {
        let mut p = Self::zero(lattice, c.len());
        p.set(
            vec![0; lattice.dim()],
            c.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        );
        p
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Overwrites the coefficient at `coords`.
    pub fn set(&mut self, coords: Vec<i64>, value: Vec<Complex64>) {
        assert_eq!(coords.len(), self.dim(), "index dimension");
        assert_eq!(value.len(), self.components, "component count");
        self.coeffs.insert(coords, value);
    }

    /// Adds `value` at `coords`.
    pub fn add_at(&mut self, coords: &[i64], value: &[Complex64]) {
        let d = self.components;
        let entry = self
            .coeffs
            .entry(coords.to_vec())
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); d]);
        for (e, v) in entry.iter_mut().zip(value) {
            *e += v;
        }
    }

    /// Adds the real mode `c e^{2πi(N,x)} + c̄ e^{-2πi(N,x)}`; at `N = 0` only
    /// the real part of `c` is added.
    pub fn add_real_mode(&mut self, coords: &[i64], c: &[Complex64]) {
        if coords.iter().all(|&m| m == 0) {
            let re: Vec<Complex64> = c.iter().map(|z| Complex64::new(z.re, 0.0)).collect();
            self.add_at(coords, &re);
            return;
        }
        self.add_at(coords, c);
        let neg: Vec<i64> = coords.iter().map(|m| -m).collect();
        let conj: Vec<Complex64> = c.iter().map(|z| z.conj()).collect();
        self.add_at(&neg, &conj);
    }

    pub fn coeff(&self, coords: &[i64]) -> Option<&[Complex64]> {
        self.coeffs.get(coords).map(Vec::as_slice)
    }

    /// Iterates over stored coefficients in lexicographic index order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Vec<Complex64>)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The mean value (coefficient at `N = 0`).
    pub fn mean(&self) -> Vec<Complex64> {
        self.coeff(&vec![0; self.dim()])
            .map(<[Complex64]>::to_vec)
            .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); self.components])
    }

    /// `max |2πN|` over the nonzero support (0 for constants and the zero field).
    pub fn degree(&self) -> f64 {
        self.coeffs
            .iter()
            .filter(|(_, v)| v.iter().any(|z| z.norm() > 0.0))
            .map(|(k, _)| 2.0 * PI * norm(&self.lattice.reciprocal_vector(k)))
            .fold(0.0, f64::max)
    }

    /// Largest absolute lattice coordinate in the nonzero support, per axis.
    pub fn max_coords(&self) -> Vec<i64> {
        let mut out = vec![0; self.dim()];
        for (k, v) in &self.coeffs {
            if v.iter().any(|z| z.norm() > 0.0) {
                for (o, m) in out.iter_mut().zip(k) {
                    *o = (*o).max(m.abs());
                }
            }
        }
        out
    }

    /// Sum of coefficient magnitudes (an upper bound on `sup |f|`).
    pub fn l1_mass(&self) -> f64 {
        self.coeffs
            .values()
            .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .sum()
    }

    /// Checks `coeff(−N) = conj(coeff(N))` componentwise.
    pub fn check_real(&self) -> Result<()> {
        let scale = self.l1_mass().max(f64::MIN_POSITIVE);
        let zero = vec![Complex64::new(0.0, 0.0); self.components];
        for (k, v) in &self.coeffs {
            let neg: Vec<i64> = k.iter().map(|m| -m).collect();
            let w = self.coeffs.get(&neg).unwrap_or(&zero);
            for (a, b) in v.iter().zip(w) {
                if (a - b.conj()).norm() > REALNESS_TOL * scale {
                    return Err(Error::NonRealField(format!(
                        "coefficient at {k:?} is not conjugate to the one at {neg:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Complex value `Σ_N c_N e^{2πi(N,x)}` at the Cartesian point `x`.
    pub fn evaluate_complex(&self, x: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.components];
        for (k, v) in &self.coeffs {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * self.lattice.pairing(k, x));
            for (o, c) in out.iter_mut().zip(v) {
                *o += c * phase;
            }
        }
        out
    }

    /// Real value at `x`; fails if the imaginary residual is not negligible.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        let z = self.evaluate_complex(x);
        let tol = IMAG_RESIDUAL_TOL * self.l1_mass().max(1.0);
        z.iter()
            .map(|c| {
                if c.im.abs() > tol {
                    Err(Error::NonRealField(format!(
                        "imaginary residual {:e} at x = {x:?}",
                        c.im
                    )))
                } else {
                    Ok(c.re)
                }
            })
            .collect()
    }

    /// Value at fractional coordinates `f` (the point `Σ f_j E_j`), computed
    /// directly in lattice coordinates.
    pub fn evaluate_fractional_complex(&self, frac: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.components];
        for (k, v) in &self.coeffs {
            let arg: f64 = k.iter().zip(frac).map(|(&m, f)| m as f64 * f).sum();
            let phase = Complex64::from_polar(1.0, 2.0 * PI * arg);
            for (o, c) in out.iter_mut().zip(v) {
                *o += c * phase;
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            for z in v.iter_mut() {
                *z *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_at(k, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.components != other.components || self.lattice != other.lattice {
            return Err(Error::DimensionMismatch(format!(
                "fields with {} and {} components on {} lattices",
                self.components,
                other.components,
                if self.lattice == other.lattice {
                    "equal"
                } else {
                    "different"
                }
            )));
        }
        Ok(())
    }

    /// Component `j` as a scalar polynomial.
    pub fn component(&self, j: usize) -> Self {
        let mut out = Self::zero(&self.lattice, 1);
        for (k, v) in &self.coeffs {
            out.coeffs.insert(k.clone(), vec![v[j]]);
        }
        out
    }

    /// Pointwise product with a scalar polynomial (exact coefficient convolution).
    pub fn mul_scalar_field(&self, scalar: &Self) -> Result<Self> {
        if scalar.components != 1 || scalar.lattice != self.lattice {
            return Err(Error::DimensionMismatch(
                "expected a scalar field on the same lattice".into(),
            ));
        }
        let mut out = Self::zero(&self.lattice, self.components);
        for (p, u) in &self.coeffs {
            for (q, s) in &scalar.coeffs {
                let key: Vec<i64> = p.iter().zip(q).map(|(a, b)| a + b).collect();
                let val: Vec<Complex64> = u.iter().map(|z| z * s[0]).collect();
                out.add_at(&key, &val);
            }
        }
        Ok(out)
    }

    /// `Σ_j f_j(x)²` as a scalar polynomial; equals `|f|²` for real fields.
    pub fn squared_magnitude(&self) -> Self {
        let mut out = Self::zero(&self.lattice, 1);
        for (p, u) in &self.coeffs {
            for (q, w) in &self.coeffs {
                let key: Vec<i64> = p.iter().zip(q).map(|(a, b)| a + b).collect();
                let val: Complex64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
                out.add_at(&key, &[val]);
            }
        }
        out
    }

    /// `∂f/∂x_j` (Cartesian `j`), exact in coefficient space.
    pub fn derivative(&self, j: usize) -> Self {
        let mut out = self.clone();
        for (k, v) in out.coeffs.iter_mut() {
            let nj = self.lattice.reciprocal_vector(k)[j];
            let factor = Complex64::new(0.0, 2.0 * PI * nj);
            for z in v.iter_mut() {
                *z *= factor;
            }
        }
        out
    }

    /// Drops coefficients whose norm is at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        let mut out = self.clone();
        out.coeffs
            .retain(|_, v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() > tol);
        out
    }

    /// Samples the field (real parts) on a uniform grid of `K`.
    pub fn sample(&self, shape: &[usize]) -> Result<SampledField> {
        let grid = GridShape::new(shape.to_vec())?;
        let d = self.components;
        let per_point = exec::map_range(grid.len(), |idx| {
            let frac = grid.fractional(idx);
            self.evaluate_fractional_complex(&frac)
                .into_iter()
                .map(|z| z.re)
                .collect::<Vec<f64>>()
        });
        let samples = per_point.into_iter().flatten().collect();
        SampledField::new(&self.lattice, shape.to_vec(), d, samples)
    }
}

/// Grid extents `(m_1, …, m_n)` with the first axis varying fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridShape(Vec<usize>);

impl GridShape {
    pub fn new(shape: Vec<usize>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::EmptyGrid);
        }
        Ok(GridShape(shape))
    }

    pub fn extents(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Integer grid coordinates of the flat index `idx`.
    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        self.0
            .iter()
            .map(|&m| {
                let i = idx % m;
                idx /= m;
                i
            })
            .collect()
    }

    /// Fractional coordinates `i_j / m_j` of the flat index `idx`.
    pub fn fractional(&self, idx: usize) -> Vec<f64> {
        self.unravel(idx)
            .iter()
            .zip(&self.0)
            .map(|(&i, &m)| i as f64 / m as f64)
            .collect()
    }
}

/// Real `d`-vector samples at the uniform grid points `Σ (i_j/m_j) E_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    lattice: Lattice,
    shape: GridShape,
    components: usize,
    samples: Vec<f64>,
}

impl SampledField {
    pub fn new(lattice: &Lattice, shape: Vec<usize>, components: usize, samples: Vec<f64>) -> Result<Self> {
        if shape.len() != lattice.dim() {
            return Err(Error::DimensionMismatch(format!(
                "grid has {} axes, lattice dimension is {}",
                shape.len(),
                lattice.dim()
            )));
        }
        let shape = GridShape::new(shape)?;
        if components == 0 {
            return Err(Error::DimensionMismatch("fields need at least one component".into()));
        }
        if samples.len() != shape.len() * components {
            return Err(Error::DimensionMismatch(format!(
                "expected {} samples, got {}",
                shape.len() * components,
                samples.len()
            )));
        }
        Ok(SampledField {
            lattice: lattice.clone(),
            shape,
            components,
            samples,
        })
    }

    /// Builds a sampled field by evaluating `f` at fractional coordinates.
    pub fn from_fn(
        lattice: &Lattice,
        shape: Vec<usize>,
        components: usize,
        f: impl Fn(&[f64]) -> Vec<f64>,
    ) -> Result<Self> {
        let grid = GridShape::new(shape.clone())?;
        let mut samples = Vec::with_capacity(grid.len() * components);
        for idx in 0..grid.len() {
            let v = f(&grid.fractional(idx));
            if v.len() != components {
                return Err(Error::DimensionMismatch(
                    "callback returned wrong component count".into(),
                ));
            }
            samples.extend(v);
        }
        Self::new(lattice, shape, components, samples)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn point(&self, idx: usize) -> &[f64] {
        &self.samples[idx * self.components..(idx + 1) * self.components]
    }

    /// Euclidean magnitude at each grid point.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.samples
            .chunks(self.components)
            .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect()
    }

    /// Ordinary `L^p(K)` norm of `|f|` by the grid rule.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let cell = self.lattice.cell_volume() / self.shape.len() as f64;
        let sum: f64 = self.magnitudes().iter().map(|w| w.powf(p)).sum();
        (sum * cell).powf(1.0 / p)
    }
}

/// Fourier coefficients of a sampled field for all `|2πN| ≤ cutoff`.
pub fn fourier_coefficients(f: &SampledField, cutoff: f64) -> Result<TrigPolynomial> {
    let lat = f.lattice();
    let indices = enumerate_indices(lat, cutoff)?;
    let n = lat.dim();
    let extents = f.shape().extents().to_vec();

    let mut needed = vec![0i64; n];
    for idx in &indices {
        for (nd, m) in needed.iter_mut().zip(&idx.coords) {
            *nd = (*nd).max(m.abs());
        }
    }
    for (axis, (&m, &need)) in extents.iter().zip(&needed).enumerate() {
        if (m as i64) < 2 * need + 1 {
            return Err(Error::AliasingRisk {
                axis,
                grid: m,
                needed: need,
            });
        }
    }

    // per-axis phase tables e^{-2πi n i / m}
    let tables: Vec<BTreeMap<i64, Vec<Complex64>>> = (0..n)
        .map(|axis| {
            let m = extents[axis];
            (-needed[axis]..=needed[axis])
                .map(|freq| {
                    let row = (0..m)
                        .map(|i| Complex64::from_polar(1.0, -2.0 * PI * (freq * i as i64) as f64 / m as f64))
                        .collect();
                    (freq, row)
                })
                .collect()
        })
        .collect();

    let d = f.components();
    let total = f.shape().len();
    let scale = 1.0 / total as f64;
    let raw: Vec<Vec<Complex64>> = exec::map(&indices, |idx| {
        let rows: Vec<&Vec<Complex64>> = idx
            .coords
            .iter()
            .enumerate()
            .map(|(axis, m)| &tables[axis][m])
            .collect();
        let mut acc = vec![Complex64::new(0.0, 0.0); d];
        let mut grid_idx = vec![0usize; n];
        for p in 0..total {
            let mut phase = Complex64::new(1.0, 0.0);
            for axis in 0..n {
                phase *= rows[axis][grid_idx[axis]];
            }
            for (a, v) in acc.iter_mut().zip(f.point(p)) {
                *a += phase * v;
            }
            for axis in 0..n {
                grid_idx[axis] += 1;
                if grid_idx[axis] < extents[axis] {
                    break;
                }
                grid_idx[axis] = 0;
            }
        }
        acc.iter().map(|z| z * scale).collect()
    });

    let mut by_coords: BTreeMap<Vec<i64>, Vec<Complex64>> = indices.iter().map(|i| i.coords.clone()).zip(raw).collect();

    // enforce conjugate symmetry
    let keys: Vec<Vec<i64>> = by_coords.keys().cloned().collect();
    let mut sym = BTreeMap::new();
    for k in &keys {
        let neg: Vec<i64> = k.iter().map(|m| -m).collect();
        let a = &by_coords[k];
        let b = &by_coords[&neg];
        let v: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| (x + y.conj()) * 0.5).collect();
        sym.insert(k.clone(), v);
    }
    by_coords = sym;

    let peak = f.magnitudes().into_iter().fold(0.0, f64::max);
    let drop_tol = 1e-13 * peak.max(f64::MIN_POSITIVE);
    let mut out = TrigPolynomial::zero(lat, d);
    for (k, v) in by_coords {
        if v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() > drop_tol {
            out.set(k, v);
        }
    }
    Ok(out)
}

/// Tensor-product Fejér window `Π_j max(0, 1 − |2πN_j|/r)` on Cartesian components.
pub fn fejer_window(cartesian: &[f64], r: f64) -> f64 {
    cartesian
        .iter()
        .map(|nj| (1.0 - (2.0 * PI * nj).abs() / r).max(0.0))
        .product()
}

/// Split `A = A⁽⁰⁾ + A⁽¹⁾` into a smooth part and a residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Mollified {
    pub smooth: TrigPolynomial,
    pub residual: TrigPolynomial,
}

/// Convolution with the nonnegative Fejér kernel of scale `r`: diagonal in
/// Fourier space with multiplier [`fejer_window`].
pub fn mollify(a: &TrigPolynomial, r: f64) -> Result<Mollified> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mollifier scale must be positive, got {r}"
        )));
    }
    let mut smooth = TrigPolynomial::zero(a.lattice(), a.components());
    let mut residual = TrigPolynomial::zero(a.lattice(), a.components());
    for (k, v) in a.iter() {
        let w = fejer_window(&a.lattice().reciprocal_vector(k), r);
        if w > 0.0 {
            smooth.set(k.clone(), v.iter().map(|z| z * w).collect());
        }
        if w < 1.0 {
            residual.set(k.clone(), v.iter().map(|z| z * (1.0 - w)).collect());
        }
    }
    Ok(Mollified { smooth, residual })
}

/// Mollifies a sampled field after analysing it up to the window support.
pub fn mollify_sampled(f: &SampledField, r: f64) -> Result<Mollified> {
    let cutoff = r * (f.lattice().dim() as f64).sqrt();
    let poly = fourier_coefficients(f, cutoff)?;
    mollify(&poly, r)
}

/// Weak-`L^p` norm `sup_t t·v({|f| > t})^{1/p}` for the empirical grid measure.
pub fn weak_norm(f: &SampledField, p: f64) -> Result<f64> {
    weak_norm_tail(f, p, 1.0)
}

/// The weak-norm supremum restricted to superlevel sets of measure at most
/// `tail_fraction·v(K)`, a finite-resolution stand-in for `‖f‖^{(∞)}_{p,w}`.
/// Returns 0 when the tail holds no grid cell.
pub fn weak_norm_tail(f: &SampledField, p: f64, tail_fraction: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("weak norm needs p >= 1, got {p}")));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let mut w = f.magnitudes();
    if w.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let m = w.len();
    w.sort_by(|a, b| b.total_cmp(a));
    let cell = f.lattice().cell_volume() / m as f64;
    let keep = ((tail_fraction * m as f64) * (1.0 + 1e-12)).floor() as usize;
    Ok(w.iter()
        .take(keep.min(m))
        .enumerate()
        .map(|(i, wi)| wi * ((i + 1) as f64 * cell).powf(1.0 / p))
        .fold(0.0, f64::max))
}

/// Keeps exactly the modes with `(N, γ) = 0`: the average `∫₀¹ f(x − ξγ) dξ`.
pub fn line_average(f: &TrigPolynomial, frame: &DirectionFrame) -> TrigPolynomial {
    let mut out = TrigPolynomial::zero(f.lattice(), f.components());
    for (k, v) in f.iter() {
        if frame.pairing(k) == 0 {
            out.set(k.clone(), v.clone());
        }
    }
    out
}

/// Uniform grid of `resolution` points per lattice axis on which suprema over
/// `x ∈ K` are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct XGrid {
    pub resolution: usize,
}

impl XGrid {
    pub fn new(resolution: usize) -> Self {
        XGrid { resolution }
    }

    pub fn shape(&self, n: usize) -> GridShape {
        GridShape::new(vec![self.resolution.max(1); n]).expect("positive extents")
    }
}

/// `ess sup_x (∫₀¹ |f(x − ξγ)|^p dξ)^{1/p}` for `p ∈ {1, 2}`, with `|·|` the
/// Euclidean magnitude of the (real) field.
pub fn directional_norm(f: &TrigPolynomial, frame: &DirectionFrame, p: u32, grid: XGrid) -> Result<f64> {
    let n = f.dim();
    let shape = grid.shape(n);
    match p {
        2 => {
            let averaged = line_average(&f.squared_magnitude(), frame);
            let values = exec::map_range(shape.len(), |idx| {
                averaged.evaluate_fractional_complex(&shape.fractional(idx))[0].re
            });
            Ok(values.into_iter().fold(0.0f64, f64::max).max(0.0).sqrt())
        }
        1 => {
            // group modes by m = (N, γ): f(x − ξγ) = Σ_m b_m(x) e^{-2πi m ξ}
            let max_m = f.iter().map(|(k, _)| frame.pairing(k).abs()).max().unwrap_or(0);
            let nodes = 256usize.max(32 * max_m as usize);
            let d = f.components();
            let values = exec::map_range(shape.len(), |idx| {
                let frac = shape.fractional(idx);
                let mut groups: BTreeMap<i64, Vec<Complex64>> = BTreeMap::new();
                for (k, v) in f.iter() {
                    let arg: f64 = k.iter().zip(&frac).map(|(&m, x)| m as f64 * x).sum();
                    let phase = Complex64::from_polar(1.0, 2.0 * PI * arg);
                    let g = groups
                        .entry(frame.pairing(k))
                        .or_insert_with(|| vec![Complex64::new(0.0, 0.0); d]);
                    for (gi, c) in g.iter_mut().zip(v) {
                        *gi += c * phase;
                    }
                }
                let mut total = 0.0;
                for q in 0..nodes {
                    let xi = q as f64 / nodes as f64;
                    let mut mag2 = 0.0;
                    for c in 0..d {
                        let val: f64 = groups
                            .iter()
                            .map(|(m, b)| (b[c] * Complex64::from_polar(1.0, -2.0 * PI * *m as f64 * xi)).re)
                            .sum();
                        mag2 += val * val;
                    }
                    total += mag2.sqrt();
                }
                total / nodes as f64
            });
            Ok(values.into_iter().fold(0.0, f64::max))
        }
        _ => Err(Error::InvalidArgument(format!(
            "directional norm supports p = 1 or 2, got {p}"
        ))),
    }
}

/// Splits `x` along the frame; re-exported for callers that work with fields.
pub fn split(x: &[f64], frame: &DirectionFrame) -> (f64, Vec<f64>) {
    decompose(x, frame)
}

// ----------------------------------------------------------------------------
// file formats

/// Parses a coefficient file: one record per line, `n` integers followed by
/// `2·d` decimals (re/im per component); `#` starts a comment.
pub fn parse_coefficients(text: &str, lattice: &Lattice, components: usize) -> Result<TrigPolynomial> {
    let n = lattice.dim();
    let mut out = TrigPolynomial::zero(lattice, components);
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != n + 2 * components {
            return Err(Error::Parse(format!(
                "line {}: expected {} fields, found {}",
                lineno + 1,
                n + 2 * components,
                fields.len()
            )));
        }
        let coords = fields[..n]
            .iter()
            .map(|s| s.parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        let nums = fields[n..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        let value: Vec<Complex64> = nums.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        out.add_at(&coords, &value);
    }
    Ok(out)
}

pub fn write_coefficients(p: &TrigPolynomial) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# {} components; index coords then re im per component",
        p.components()
    );
    for (k, v) in p.iter() {
        let mut parts: Vec<String> = k.iter().map(|m| m.to_string()).collect();
        for z in v {
            parts.push(format!("{:.17e}", z.re));
            parts.push(format!("{:.17e}", z.im));
        }
        let _ = writeln!(s, "{}", parts.join(" "));
    }
    s
}

/// Parses a grid file: header `m_1 … m_n d`, then `Π m_j` lines of `d`
/// decimals with the first axis varying fastest.
pub fn parse_grid(text: &str, lattice: &Lattice) -> Result<SampledField> {
    let n = lattice.dim();
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("missing grid header".into()))?;
    let dims = header
        .split_whitespace()
        .map(|s| s.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("grid header: {e}")))?;
    if dims.len() != n + 1 {
        return Err(Error::Parse(format!(
            "grid header needs {} extents and a component count",
            n
        )));
    }
    let (shape, d) = (dims[..n].to_vec(), dims[n]);
    let mut samples = Vec::new();
    for (row, line) in lines.enumerate() {
        let vals = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("grid row {}: {e}", row + 1)))?;
        if vals.len() != d {
            return Err(Error::Parse(format!(
                "grid row {}: expected {d} values, found {}",
                row + 1,
                vals.len()
            )));
        }
        samples.extend(vals);
    }
    SampledField::new(lattice, shape, d, samples)
}

pub fn write_grid(f: &SampledField) -> String {
    let mut s = String::new();
    let header: Vec<String> = f
        .shape()
        .extents()
        .iter()
        .map(|m| m.to_string())
        .chain(std::iter::once(f.components().to_string()))
        .collect();
    let _ = writeln!(s, "{}", header.join(" "));
    for chunk in f.samples().chunks(f.components()) {
        let row: Vec<String> = chunk.iter().map(|v| format!("{v:.17e}")).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}
