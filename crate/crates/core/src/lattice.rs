//! Period and reciprocal lattices, plane-wave index enumeration, and the
//! parallel/transverse split relative to a lattice direction.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of reciprocal indices a single enumeration may return.
pub const DEFAULT_INDEX_CAP: usize = 200_000;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A Bravais lattice `Λ` with basis `E_j` and its reciprocal `Λ*` with
/// `(E*_j, E_l) = δ_jl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    basis: Vec<Vec<f64>>,
    reciprocal_basis: Vec<Vec<f64>>,
    cell_volume: f64,
    reciprocal_cell_volume: f64,
    reciprocal_diameter: f64,
}

impl Lattice {
    /// Builds the lattice from `n` basis vectors given in Cartesian coordinates.
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = basis.len();
        if n < 1 {
            return Err(Error::DegenerateLattice("empty basis".into()));
        }
        if basis.iter().any(|row| row.len() != n) {
            return Err(Error::DegenerateLattice(format!("expected {n} vectors of length {n}")));
        }
        if basis.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateLattice("non-finite basis entry".into()));
        }
        // rows are E_j
        let b = DMatrix::from_fn(n, n, |i, j| basis[i][j]);
        let det = b.determinant();
        let scale: f64 = basis.iter().map(|row| norm(row)).product();
        if !(det.abs() > 1e-12 * scale) {
            return Err(Error::DegenerateLattice(format!(
                "basis vectors are linearly dependent (det = {det:e})"
            )));
        }
        let inv = b
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateLattice("basis matrix not invertible".into()))?;
        // E*_j is the j-th column of B^{-1}
        let reciprocal_basis: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| inv[(i, j)]).collect()).collect();

        let lat = Lattice {
            reciprocal_diameter: parallelepiped_diameter(&reciprocal_basis),
            basis,
            reciprocal_basis,
            cell_volume: det.abs(),
            reciprocal_cell_volume: 1.0 / det.abs(),
        };
        let residual = lat.biorthogonality_residual();
        if residual > 1e-12 {
            return Err(Error::DegenerateLattice(format!(
                "biorthogonality residual {residual:e} too large; basis is ill-conditioned"
            )));
        }
        Ok(lat)
    }

    /// The hypercubic lattice `ℤⁿ`.
    pub fn cubic(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(basis).expect("identity basis is regular")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn reciprocal_basis(&self) -> &[Vec<f64>] {
        &self.reciprocal_basis
    }

    /// `v(K)`.
    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// `v(K*)`.
    pub fn reciprocal_cell_volume(&self) -> f64 {
        self.reciprocal_cell_volume
    }

    /// Diameter of the parallelepiped spanned by the `E*_j`.
    pub fn reciprocal_diameter(&self) -> f64 {
        self.reciprocal_diameter
    }

    pub fn biorthogonality_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for l in 0..n {
                let target = if j == l { 1.0 } else { 0.0 };
                worst = worst.max((dot(&self.reciprocal_basis[j], &self.basis[l]) - target).abs());
            }
        }
        worst
    }

    /// Cartesian coordinates of `Σ m_j E*_j`.
    pub fn reciprocal_vector(&self, coords: &[i64]) -> Vec<f64> {
        combine(&self.reciprocal_basis, coords.iter().map(|&m| m as f64))
    }

    /// Cartesian coordinates of `Σ m_j E_j`.
    pub fn lattice_vector(&self, coords: &[i64]) -> Vec<f64> {
        combine(&self.basis, coords.iter().map(|&m| m as f64))
    }

    /// Cartesian point `Σ f_j E_j` for fractional coordinates `f`.
    pub fn point_from_fractional(&self, frac: &[f64]) -> Vec<f64> {
        combine(&self.basis, frac.iter().copied())
    }

    /// Quasimomentum `2π Σ f_j E*_j` for fractional coordinates `f` in the `E*` basis.
    pub fn k_from_fractional(&self, frac: &[f64]) -> Vec<f64> {
        combine(&self.reciprocal_basis, frac.iter().map(|f| 2.0 * PI * f))
    }

    /// `(N, x)` for `N = Σ m_j E*_j`.
    pub fn pairing(&self, coords: &[i64], x: &[f64]) -> f64 {
        coords
            .iter()
            .zip(&self.reciprocal_basis)
            .map(|(&m, es)| m as f64 * dot(es, x))
            .sum()
    }
}

fn combine(vectors: &[Vec<f64>], weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let n = vectors.first().map_or(0, |v| v.len());
    let mut out = vec![0.0; n];
    for (w, v) in weights.zip(vectors) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += w * x;
        }
    }
    out
}

fn parallelepiped_diameter(vectors: &[Vec<f64>]) -> f64 {
    // max over δ ∈ {-1,0,1}^n of |Σ δ_j v_j|
    let n = vectors.len();
    let total = 3usize.pow(n as u32);
    let mut best = 0.0f64;
    for code in 0..total {
        let mut c = code;
        let weights: Vec<f64> = (0..n)
            .map(|_| {
                let d = (c % 3) as f64 - 1.0;
                c /= 3;
                d
            })
            .collect();
        best = best.max(norm(&combine(vectors, weights.into_iter())));
    }
    best
}

/// A point `N ∈ Λ*` with integer coordinates in the `E*` basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReciprocalIndex {
    pub coords: Vec<i64>,
    pub cartesian: Vec<f64>,
}

impl ReciprocalIndex {
    pub fn new(lat: &Lattice, coords: Vec<i64>) -> Self {
        let cartesian = lat.reciprocal_vector(&coords);
        ReciprocalIndex { coords, cartesian }
    }

    pub fn negated(&self) -> Self {
        ReciprocalIndex {
            coords: self.coords.iter().map(|c| -c).collect(),
            cartesian: self.cartesian.iter().map(|c| -c).collect(),
        }
    }
}

/// All `N ∈ Λ*` with `|2πN| ≤ cutoff`, in lexicographic order of coordinates.
pub fn enumerate_indices(lat: &Lattice, cutoff: f64) -> Result<Vec<ReciprocalIndex>> {
    enumerate_indices_capped(lat, cutoff, DEFAULT_INDEX_CAP)
}

pub fn enumerate_indices_capped(lat: &Lattice, cutoff: f64, cap: usize) -> Result<Vec<ReciprocalIndex>> {
    enumerate_ball(lat, cutoff, None, cap)
}

/// Indices `N` with `|2π(N + shift)| ≤ cutoff`, lexicographic in `N`.
pub(crate) fn enumerate_ball(
    lat: &Lattice,
    cutoff: f64,
    shift: Option<&[i64]>,
    cap: usize,
) -> Result<Vec<ReciprocalIndex>> {
    if !(cutoff > 0.0) || !cutoff.is_finite() {
        return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cutoff}")));
    }
    let n = lat.dim();
    let radius = cutoff / (2.0 * PI);
    let r2 = radius * radius * (1.0 + 1e-12);
    // |m_j| = |(N, E_j)| ≤ |N| |E_j|
    let bounds: Vec<i64> = lat
        .basis()
        .iter()
        .map(|e| (radius * norm(e) * (1.0 + 1e-12)).floor() as i64)
        .collect();
    let zero = vec![0i64; n];
    let shift = shift.unwrap_or(&zero);

    let mut out = Vec::new();
    let mut m: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        // m runs over N + shift
        let v = lat.reciprocal_vector(&m);
        if dot(&v, &v) <= r2 {
            let coords = m.iter().zip(shift).map(|(a, s)| a - s).collect();
            out.push(ReciprocalIndex::new(lat, coords));
            if out.len() > cap {
                return Err(Error::BasisTooLarge { count: out.len(), cap });
            }
        }
        // odometer, last coordinate fastest
        let mut axis = n;
        loop {
            if axis == 0 {
                out.sort_by(|a, b| a.coords.cmp(&b.coords));
                return Ok(out);
            }
            axis -= 1;
            if m[axis] < bounds[axis] {
                m[axis] += 1;
                break;
            }
            m[axis] = -bounds[axis];
        }
    }
}

/// Direction frame `γ ∈ Λ \ {0}`, `e = γ/|γ|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionFrame {
    pub gamma_coords: Vec<i64>,
    pub gamma: Vec<f64>,
    pub e: Vec<f64>,
    pub gamma_norm: f64,
}

impl DirectionFrame {
    pub fn new(lat: &Lattice, gamma_coords: &[i64]) -> Result<Self> {
        if gamma_coords.len() != lat.dim() {
            return Err(Error::InvalidDirection(format!(
                "gamma has {} coordinates, lattice dimension is {}",
                gamma_coords.len(),
                lat.dim()
            )));
        }
        if gamma_coords.iter().all(|&c| c == 0) {
            return Err(Error::InvalidDirection("gamma must be nonzero".into()));
        }
        let gamma = lat.lattice_vector(gamma_coords);
        let gamma_norm = norm(&gamma);
        let e = gamma.iter().map(|g| g / gamma_norm).collect();
        Ok(DirectionFrame {
            gamma_coords: gamma_coords.to_vec(),
            gamma,
            e,
            gamma_norm,
        })
    }

    /// `(N, γ)` for `N ∈ Λ*`; an integer because `γ ∈ Λ`.
    pub fn pairing(&self, n_coords: &[i64]) -> i64 {
        n_coords.iter().zip(&self.gamma_coords).map(|(a, b)| a * b).sum()
    }
}

/// Splits `x` into `x∥ = (x, e)` and `x⊥ = x − (x, e) e`.
pub fn decompose(x: &[f64], frame: &DirectionFrame) -> (f64, Vec<f64>) {
    let par = dot(x, &frame.e);
    let perp = x.iter().zip(&frame.e).map(|(xi, ei)| xi - par * ei).collect();
    (par, perp)
}
