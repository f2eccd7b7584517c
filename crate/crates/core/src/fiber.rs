//! Plane-wave matrices of the fiber operators at complex quasimomentum
//! `k + iκe`.
//!
//! Basis functions are `e^{2πi(N,x)}/√v(K)`, orthonormal in `L²(K)`, so a
//! multiplication operator by `f` has entries `f_{N−M}` and coefficient
//! vectors carry `L²` norms directly.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::lattice::{dot, enumerate_ball, DirectionFrame, Lattice, ReciprocalIndex, DEFAULT_INDEX_CAP};
use crate::potential::TrigPolynomial;

/// Tolerance of the `|(k, γ)| = π` guard.
pub const THOMAS_GUARD_TOL: f64 = 1e-12;
/// Smallest admissible `|k⊥ + 2πN⊥|` for the transverse projections.
pub const TRANSVERSE_GUARD_TOL: f64 = 1e-10;

/// A complex quasimomentum `k + iκe` with `e = γ/|γ|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberPoint {
    pub k: Vec<f64>,
    pub kappa: f64,
    pub frame: DirectionFrame,
}

impl FiberPoint {
    pub fn new(k: Vec<f64>, kappa: f64, frame: DirectionFrame) -> Result<Self> {
        if k.len() != frame.e.len() {
            return Err(Error::DimensionMismatch(format!(
                "k has {} components, dimension is {}",
                k.len(),
                frame.e.len()
            )));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "kappa must be finite and >= 0, got {kappa}"
            )));
        }
        Ok(FiberPoint { k, kappa, frame })
    }

    /// A real fiber (`κ = 0`); the direction is irrelevant and set to `E_1`.
    pub fn real(lattice: &Lattice, k: Vec<f64>) -> Result<Self> {
        let mut g = vec![0; lattice.dim()];
        g[0] = 1;
        Self::new(k, 0.0, DirectionFrame::new(lattice, &g)?)
    }

    /// A fiber on the face `|(k, γ)| = π`; fails the guard otherwise.
    pub fn thomas(k: Vec<f64>, kappa: f64, frame: DirectionFrame) -> Result<Self> {
        let fp = Self::new(k, kappa, frame)?;
        if !fp.on_thomas_face() {
            return Err(Error::Guard(format!(
                "|(k, gamma)| = {} differs from pi",
                dot(&fp.k, &fp.frame.gamma).abs()
            )));
        }
        Ok(fp)
    }

    /// The centre of the face: `k = π γ/|γ|²`.
    pub fn default_thomas_k(frame: &DirectionFrame) -> Vec<f64> {
        let s = PI / (frame.gamma_norm * frame.gamma_norm);
        frame.gamma.iter().map(|g| s * g).collect()
    }

    pub fn on_thomas_face(&self) -> bool {
        (dot(&self.k, &self.frame.gamma).abs() - PI).abs() <= THOMAS_GUARD_TOL * PI
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.k.clone(), kappa, self.frame.clone())
    }

    /// `p = k + 2πN` for the Cartesian reciprocal vector `N`.
    pub fn momentum(&self, n_cart: &[f64]) -> Vec<f64> {
        self.k.iter().zip(n_cart).map(|(k, n)| k + 2.0 * PI * n).collect()
    }

    /// `(p∥, |p⊥|)` for `p = k + 2πN`.
    pub fn split_momentum(&self, n_cart: &[f64]) -> (f64, f64) {
        let p = self.momentum(n_cart);
        let par = dot(&p, &self.frame.e);
        let perp2 = (dot(&p, &p) - par * par).max(0.0);
        (par, perp2.sqrt())
    }

    /// The complexified square `(p + iκe)² = |p|² − κ² + 2iκ(p, e)`.
    pub fn complex_square(&self, n_cart: &[f64]) -> Complex64 {
        let p = self.momentum(n_cart);
        Complex64::new(
            dot(&p, &p) - self.kappa * self.kappa,
            2.0 * self.kappa * dot(&p, &self.frame.e),
        )
    }
}

/// Galerkin truncation: all `N` with `|2π(N + shift)| ≤ cutoff`.
#[derive(Debug, Clone)]
pub struct PlaneWaveBasis {
    lattice: Lattice,
    cutoff: f64,
    shift: Vec<i64>,
    indices: Vec<ReciprocalIndex>,
    lookup: HashMap<Vec<i64>, usize>,
}

impl PlaneWaveBasis {
    pub fn new(lattice: &Lattice, cutoff: f64) -> Result<Self> {
        Self::shifted(lattice, cutoff, &vec![0; lattice.dim()])
    }

    /// Ball centred at `−shift`; used to re-centre the basis after a
    /// reciprocal translation `k ↦ k + 2π·shift`.
    pub fn shifted(lattice: &Lattice, cutoff: f64, shift: &[i64]) -> Result<Self> {
        let indices = enumerate_ball(lattice, cutoff, Some(shift), DEFAULT_INDEX_CAP)?;
        let lookup = indices.iter().enumerate().map(|(i, n)| (n.coords.clone(), i)).collect();
        Ok(PlaneWaveBasis {
            lattice: lattice.clone(),
            cutoff,
            shift: shift.to_vec(),
            indices,
            lookup,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn indices(&self) -> &[ReciprocalIndex] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        self.lookup.get(coords).copied()
    }

    /// Positions of the indices at distance at least `margin` inside the
    /// cutoff ball, i.e. `|2π(N + shift)| ≤ cutoff − margin`.
    pub fn inner_positions(&self, margin: f64) -> Vec<usize> {
        let limit = self.cutoff - margin;
        if limit < 0.0 {
            return Vec::new();
        }
        let shift = self.lattice.reciprocal_vector(&self.shift);
        self.indices
            .iter()
            .enumerate()
            .filter(|(_, n)| {
                let r: f64 = n
                    .cartesian
                    .iter()
                    .zip(&shift)
                    .map(|(a, b)| (2.0 * PI * (a + b)).powi(2))
                    .sum::<f64>()
                    .sqrt();
                r <= limit * (1.0 + 1e-12)
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// The multipliers `G±_N = (|p∥|² + (κ ± |p⊥|)²)^{1/2}`, `p = k + 2πN`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GFactors {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl GFactors {
    /// `L_N = G⁺_N G⁻_N`.
    pub fn l(&self) -> Vec<f64> {
        self.plus.iter().zip(&self.minus).map(|(p, m)| p * m).collect()
    }
}

pub fn g_pair(fiber: &FiberPoint, n_cart: &[f64]) -> (f64, f64) {
    let (par, perp) = fiber.split_momentum(n_cart);
    let plus = (par * par + (fiber.kappa + perp).powi(2)).sqrt();
    let minus = (par * par + (fiber.kappa - perp).powi(2)).sqrt();
    (plus, minus)
}

/// Per-index `G±`; on the face `|(k,γ)| = π` also checks `G⁻ ≥ π/|γ|` and
/// `G⁺G⁻ ≥ 2πκ/|γ|`.
pub fn g_factors(basis: &PlaneWaveBasis, fiber: &FiberPoint) -> Result<GFactors> {
    let (plus, minus): (Vec<f64>, Vec<f64>) = basis.indices().iter().map(|n| g_pair(fiber, &n.cartesian)).unzip();
    if fiber.on_thomas_face() {
        let gn = fiber.frame.gamma_norm;
        let floor = PI / gn;
        let prod_floor = 2.0 * PI * fiber.kappa / gn;
        for (i, (p, m)) in plus.iter().zip(&minus).enumerate() {
            if *m < floor * (1.0 - 1e-12) || p * m < prod_floor * (1.0 - 1e-12) {
                return Err(Error::Guard(format!(
                    "G factor bound fails at N = {:?}",
                    basis.indices()[i].coords
                )));
            }
        }
    }
    Ok(GFactors { plus, minus })
}

/// A dense operator matrix on the (possibly spinor-lifted) basis.
#[derive(Debug, Clone)]
pub struct FiberMatrix {
    pub matrix: DMatrix<Complex64>,
    pub hermitian: bool,
    pub block: usize,
    pub warnings: Vec<String>,
}

impl FiberMatrix {
    /// `max |M − M†|` entrywise.
    pub fn hermiticity_residual(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

fn check_fields(a: &TrigPolynomial, v: &TrigPolynomial, basis: &PlaneWaveBasis) -> Result<()> {
    let n = basis.lattice().dim();
    if a.components() != n || v.components() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "expected a {n}-component A and a scalar V, got {} and {}",
            a.components(),
            v.components()
        )));
    }
    if a.lattice() != basis.lattice() || v.lattice() != basis.lattice() {
        return Err(Error::DimensionMismatch(
            "fields and basis live on different lattices".into(),
        ));
    }
    a.check_real()?;
    v.check_real()
}

/// Galerkin matrix of `Ĥ(A; k+iκe) + V`:
/// `δ_{NM}(p_N + iκe)² − (A_{N−M}, p_N + p_M + 2iκe) + (|A|²)_{N−M} + V_{N−M}`.
pub fn assemble_hamiltonian(
    a: &TrigPolynomial,
    v: &TrigPolynomial,
    fiber: &FiberPoint,
    basis: &PlaneWaveBasis,
) -> Result<FiberMatrix> {
    check_fields(a, v, basis)?;
    let mut warnings = Vec::new();
    let scalar = a.squared_magnitude().add(v)?;
    let needed = a.degree().max(scalar.degree());
    if basis.cutoff() < needed {
        let msg = format!(
            "basis cutoff {} is below the field degree {needed}; couplings are truncated",
            basis.cutoff()
        );
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let n = basis.len();
    let a_modes: Vec<(&Vec<i64>, &Vec<Complex64>)> = a.iter().collect();
    let s_modes: Vec<(&Vec<i64>, Complex64)> = scalar.iter().map(|(k, c)| (k, c[0])).collect();
    let ike: Vec<Complex64> = fiber
        .frame
        .e
        .iter()
        .map(|e| Complex64::new(0.0, fiber.kappa * e))
        .collect();
    let momenta: Vec<Vec<f64>> = basis.indices().iter().map(|m| fiber.momentum(&m.cartesian)).collect();

    let rows: Vec<Vec<(usize, Complex64)>> = exec::map_range(n, |i| {
        let row_idx = &basis.indices()[i];
        let mut entries: Vec<(usize, Complex64)> = vec![(i, fiber.complex_square(&row_idx.cartesian))];
        let mut shifted = vec![0i64; row_idx.coords.len()];
        for (p, coeff) in &a_modes {
            for (s, (r, q)) in shifted.iter_mut().zip(row_idx.coords.iter().zip(p.iter())) {
                *s = r - q;
            }
            if let Some(j) = basis.index_of(&shifted) {
                let mut val = Complex64::new(0.0, 0.0);
                for c in 0..coeff.len() {
                    let w = Complex64::new(momenta[i][c] + momenta[j][c], 0.0) + 2.0 * ike[c];
                    val -= coeff[c] * w;
                }
                entries.push((j, val));
            }
        }
        for (p, coeff) in &s_modes {
            for (s, (r, q)) in shifted.iter_mut().zip(row_idx.coords.iter().zip(p.iter())) {
                *s = r - q;
            }
            if let Some(j) = basis.index_of(&shifted) {
                entries.push((j, *coeff));
            }
        }
        entries
    });

    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, val) in row {
            matrix[(i, j)] += val;
        }
    }
    Ok(FiberMatrix {
        matrix,
        hermitian: fiber.kappa == 0.0,
        block: 1,
        warnings,
    })
}

/// `ψ† M φ` with `M` from [`assemble_hamiltonian`].
pub fn form_eval(
    a: &TrigPolynomial,
    v: &TrigPolynomial,
    fiber: &FiberPoint,
    basis: &PlaneWaveBasis,
    psi: &[Complex64],
    phi: &[Complex64],
) -> Result<Complex64> {
    if psi.len() != basis.len() || phi.len() != basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {} on a basis of size {}",
            psi.len(),
            phi.len(),
            basis.len()
        )));
    }
    let m = assemble_hamiltonian(a, v, fiber, basis)?.matrix;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m.nrows() {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..m.ncols() {
            row += m[(i, j)] * phi[j];
        }
        acc += psi[i].conj() * row;
    }
    Ok(acc)
}

/// Which diagonal multiplier to raise to a power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weight {
    Plus,
    Minus,
    /// `L = G⁺G⁻`.
    L,
}

/// Diagonal entries `(G_N)^ζ` on the principal branch.
pub fn diagonal_power(
    basis: &PlaneWaveBasis,
    fiber: &FiberPoint,
    weight: Weight,
    zeta: Complex64,
) -> Result<Vec<Complex64>> {
    basis
        .indices()
        .iter()
        .map(|n| {
            let (p, m) = g_pair(fiber, &n.cartesian);
            let g = match weight {
                Weight::Plus => p,
                Weight::Minus => m,
                Weight::L => p * m,
            };
            if g <= 0.0 {
                return Err(Error::ZeroGFactor(n.coords.clone()));
            }
            Ok((zeta * g.ln()).exp())
        })
        .collect()
}

/// Real powers `(G_N)^s`, the common case.
pub fn diagonal_power_real(basis: &PlaneWaveBasis, fiber: &FiberPoint, weight: Weight, s: f64) -> Result<Vec<f64>> {
    Ok(diagonal_power(basis, fiber, weight, Complex64::new(s, 0.0))?
        .into_iter()
        .map(|z| z.re)
        .collect())
}

/// Index shells `𝒦(m), …, 𝒦(l)` by the size of `G⁻_N`, plus the complement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellPartition {
    pub h: f64,
    pub l: u32,
    pub m: u32,
    /// `shells[i]` holds basis positions of `𝒦(m + i)`.
    pub shells: Vec<Vec<usize>>,
    pub complement: Vec<usize>,
}

/// Splits the basis by `G⁻_N` with `h ∈ [2, 4)`, `h^l = κ/2`, taking the
/// largest such `l` (smallest `h`).
pub fn shell_partition(basis: &PlaneWaveBasis, fiber: &FiberPoint) -> Result<ShellPartition> {
    let kappa = fiber.kappa;
    let diam = basis.lattice().reciprocal_diameter();
    let threshold = 8f64.max(4.0 * PI * diam);
    if kappa < threshold {
        return Err(Error::KappaTooSmall { kappa, threshold });
    }
    let l = ((kappa / 2.0).log2() + 1e-12).floor() as u32;
    let h = (kappa / 2.0).powf(1.0 / l as f64);
    let m = (((PI * diam).ln() / h.ln()) - 1e-12).ceil().max(1.0) as u32;
    let minus = g_factors(basis, fiber)?.minus;
    let mut shells = vec![Vec::new(); (l - m + 1) as usize];
    let mut complement = Vec::new();
    for (i, g) in minus.iter().enumerate() {
        if *g > h.powi(l as i32) {
            complement.push(i);
            continue;
        }
        let mut j = m;
        while *g > h.powi(j as i32) {
            j += 1;
        }
        shells[(j - m) as usize].push(i);
    }
    Ok(ShellPartition {
        h,
        l,
        m,
        shells,
        complement,
    })
}

const DUMP_MAGIC: &[u8; 8] = b"MSPMAT01";

/// Writes `magic, rows: u64, cols: u64, flags: u64 (bit 0 = hermitian),
/// block: u64`, then row-major `(re, im)` pairs, all little-endian.
pub fn write_matrix_dump<W: Write>(m: &FiberMatrix, out: &mut W) -> Result<()> {
    out.write_all(DUMP_MAGIC)?;
    for v in [
        m.matrix.nrows() as u64,
        m.matrix.ncols() as u64,
        m.hermitian as u64,
        m.block as u64,
    ] {
        out.write_all(&v.to_le_bytes())?;
    }
    for i in 0..m.matrix.nrows() {
        for j in 0..m.matrix.ncols() {
            let z = m.matrix[(i, j)];
            out.write_all(&z.re.to_le_bytes())?;
            out.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix_dump<R: Read>(input: &mut R) -> Result<FiberMatrix> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != DUMP_MAGIC {
        return Err(Error::Parse("not a matrix dump".into()));
    }
    let mut word = [0u8; 8];
    let mut header = [0u64; 4];
    for h in header.iter_mut() {
        input.read_exact(&mut word)?;
        *h = u64::from_le_bytes(word);
    }
    let (rows, cols) = (header[0] as usize, header[1] as usize);
    let mut matrix = DMatrix::<Complex64>::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            input.read_exact(&mut word)?;
            let re = f64::from_le_bytes(word);
            input.read_exact(&mut word)?;
            let im = f64::from_le_bytes(word);
            matrix[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(FiberMatrix {
        matrix,
        hermitian: header[2] & 1 == 1,
        block: header[3] as usize,
        warnings: Vec::new(),
    })
}
