//! Clifford matrices and the fibered magnetic Dirac operator
//! `𝒟 = Σ_j (−i∂_j + k_j + iκe_j − A_j) α_j` on `L²(K; ℂ^M)`.
//!
//! Spinor vectors are laid out mode-major: component `s` of mode `i` sits at
//! position `i·M + s`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::battery;
use crate::conditions::transverse_basis;
use crate::error::{Error, Result};
use crate::exec;
use crate::fiber::{assemble_hamiltonian, g_pair, FiberPoint, PlaneWaveBasis, TRANSVERSE_GUARD_TOL};
use crate::lattice::{dot, DirectionFrame};
use crate::linalg;
use crate::potential::TrigPolynomial;

/// Hermitian `α_1, …, α_n` with `α_jα_l + α_lα_j = 2δ_{jl} I_M`.
#[derive(Debug, Clone)]
pub struct CliffordRep {
    pub n: usize,
    pub size: usize,
    pub alphas: Vec<DMatrix<Complex64>>,
}

fn pauli() -> [DMatrix<Complex64>; 4] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

fn kron_all(factors: &[&DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Jordan–Wigner construction on `⌊n/2⌋` qubits: `Z^{⊗j} ⊗ X ⊗ I…` and
/// `Z^{⊗j} ⊗ Y ⊗ I…`, plus `Z^{⊗⌊n/2⌋}` when `n` is odd. `M = 2^{⌊n/2⌋}`.
pub fn clifford_rep(n: usize) -> Result<CliffordRep> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Clifford matrices need n >= 2, got {n}"
        )));
    }
    let [id, x, y, z] = pauli();
    let qubits = n / 2;
    let mut alphas = Vec::with_capacity(n);
    for j in 0..qubits {
        for middle in [&x, &y] {
            let mut factors: Vec<&DMatrix<Complex64>> = vec![&z; j];
            factors.push(middle);
            factors.extend(std::iter::repeat_n(&id, qubits - j - 1));
            alphas.push(kron_all(&factors));
        }
    }
    if n % 2 == 1 {
        alphas.push(kron_all(&vec![&z; qubits]));
    }
    let rep = CliffordRep {
        n,
        size: 1 << qubits,
        alphas,
    };
    let res = rep.anticommutation_residual();
    if res > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "Clifford construction failed, residual {res:e}"
        )));
    }
    Ok(rep)
}

impl CliffordRep {
    /// `max |α_jα_l + α_lα_j − 2δ_{jl}I|` over all pairs.
    pub fn anticommutation_residual(&self) -> f64 {
        let id = DMatrix::<Complex64>::identity(self.size, self.size);
        let mut worst: f64 = 0.0;
        for j in 0..self.n {
            for l in j..self.n {
                let mut ac = &self.alphas[j] * &self.alphas[l] + &self.alphas[l] * &self.alphas[j];
                if j == l {
                    ac -= &id * Complex64::new(2.0, 0.0);
                }
                worst = worst.max(linalg::max_abs(&ac));
            }
        }
        worst
    }

    /// `max |α_j − α_j†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        self.alphas
            .iter()
            .map(|a| linalg::max_abs(&(a - a.adjoint())))
            .fold(0.0, f64::max)
    }

    /// `Σ_j v_j α_j` for a complex vector `v`.
    pub fn contract(&self, v: &[Complex64]) -> DMatrix<Complex64> {
        let mut out = DMatrix::<Complex64>::zeros(self.size, self.size);
        for (a, c) in self.alphas.iter().zip(v) {
            out += a * *c;
        }
        out
    }

    pub fn contract_real(&self, v: &[f64]) -> DMatrix<Complex64> {
        let c: Vec<Complex64> = v.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        self.contract(&c)
    }
}

/// `𝒟_N = Σ_j (k_j + 2πN_j + iκe_j) α_j`.
pub fn dirac_symbol(n_cart: &[f64], fiber: &FiberPoint, rep: &CliffordRep) -> DMatrix<Complex64> {
    let p = fiber.momentum(n_cart);
    let v: Vec<Complex64> = p
        .iter()
        .zip(&fiber.frame.e)
        .map(|(pj, ej)| Complex64::new(*pj, fiber.kappa * ej))
        .collect();
    rep.contract(&v)
}

/// Ascending singular values of the symbol; `{G⁻_N, G⁺_N}` each `M/2` times.
pub fn symbol_singular_values(n_cart: &[f64], fiber: &FiberPoint, rep: &CliffordRep) -> Vec<f64> {
    linalg::singular_values(&dirac_symbol(n_cart, fiber, rep))
}

/// A dense operator on spinor-valued coefficient vectors.
#[derive(Debug, Clone)]
pub struct SpinorMatrix {
    pub matrix: DMatrix<Complex64>,
    pub spinor: usize,
    pub modes: usize,
}

fn check_vector_field(a: &TrigPolynomial, basis: &PlaneWaveBasis, rep: &CliffordRep) -> Result<()> {
    if a.components() != rep.n || basis.lattice().dim() != rep.n {
        return Err(Error::DimensionMismatch(format!(
            "A has {} components, Clifford dimension is {}",
            a.components(),
            rep.n
        )));
    }
    a.check_real()
}

/// Fills block `(i, j)` with `f(P)` for every `P = N_i − N_j` in `modes`.
fn convolution_blocks<F>(basis: &PlaneWaveBasis, size: usize, modes: &[Vec<i64>], block: F) -> DMatrix<Complex64>
where
    F: Fn(usize) -> DMatrix<Complex64> + Sync,
{
    let n = basis.len();
    let blocks: Vec<DMatrix<Complex64>> = (0..modes.len()).map(&block).collect();
    let mut out = DMatrix::<Complex64>::zeros(n * size, n * size);
    for (i, row) in basis.indices().iter().enumerate() {
        for (mi, p) in modes.iter().enumerate() {
            let target: Vec<i64> = row.coords.iter().zip(p).map(|(a, b)| a - b).collect();
            if let Some(j) = basis.index_of(&target) {
                let mut view = out.view_mut((i * size, j * size), (size, size));
                view += &blocks[mi];
            }
        }
    }
    out
}

/// `D[N, M'] = δ_{NM'} 𝒟_N − Σ_j (A_j)_{N−M'} α_j`.
pub fn assemble_dirac(
    a: &TrigPolynomial,
    fiber: &FiberPoint,
    basis: &PlaneWaveBasis,
    rep: &CliffordRep,
) -> Result<SpinorMatrix> {
    check_vector_field(a, basis, rep)?;
    let size = rep.size;
    let modes: Vec<Vec<i64>> = a.iter().map(|(k, _)| k.clone()).collect();
    let coeffs: Vec<Vec<Complex64>> = a.iter().map(|(_, v)| v.clone()).collect();
    let mut matrix = convolution_blocks(basis, size, &modes, |mi| -rep.contract(&coeffs[mi]));
    let symbols = exec::map(basis.indices(), |n| dirac_symbol(&n.cartesian, fiber, rep));
    for (i, s) in symbols.iter().enumerate() {
        let mut view = matrix.view_mut((i * size, i * size), (size, size));
        view += s;
    }
    Ok(SpinorMatrix {
        matrix,
        spinor: size,
        modes: basis.len(),
    })
}

/// Multiplication by `ℬ = (i/2) Σ_{j≠l} (∂_jA_l − ∂_lA_j) α_jα_l`.
pub fn curvature_term(a: &TrigPolynomial, rep: &CliffordRep, basis: &PlaneWaveBasis) -> Result<SpinorMatrix> {
    check_vector_field(a, basis, rep)?;
    let lat = basis.lattice();
    let n = rep.n;
    let products: Vec<Vec<DMatrix<Complex64>>> = (0..n)
        .map(|j| (0..n).map(|l| &rep.alphas[j] * &rep.alphas[l]).collect())
        .collect();
    let modes: Vec<Vec<i64>> = a.iter().map(|(k, _)| k.clone()).collect();
    let coeffs: Vec<Vec<Complex64>> = a.iter().map(|(_, v)| v.clone()).collect();
    let half_i = Complex64::new(0.0, 0.5);
    let matrix = convolution_blocks(basis, rep.size, &modes, |mi| {
        let p = lat.reciprocal_vector(&modes[mi]);
        let c = &coeffs[mi];
        let mut block = DMatrix::<Complex64>::zeros(rep.size, rep.size);
        for j in 0..n {
            for l in 0..n {
                if j == l {
                    continue;
                }
                // ∂_j ↦ 2πi P_j on the mode e^{2πi(P,x)}
                let curl = Complex64::new(0.0, 2.0 * PI) * (c[l] * p[j] - c[j] * p[l]);
                block += &products[j][l] * (half_i * curl);
            }
        }
        block
    });
    Ok(SpinorMatrix {
        matrix,
        spinor: rep.size,
        modes: basis.len(),
    })
}

/// `H ⊗ I_M` for the magnetic Hamiltonian without electric potential.
fn hamiltonian_lift(
    a: &TrigPolynomial,
    fiber: &FiberPoint,
    basis: &PlaneWaveBasis,
    size: usize,
) -> Result<DMatrix<Complex64>> {
    let zero_v = TrigPolynomial::zero(basis.lattice(), 1);
    let h = assemble_hamiltonian(a, &zero_v, fiber, basis)?.matrix;
    Ok(h.kronecker(&DMatrix::<Complex64>::identity(size, size)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracSquareReport {
    /// `max ‖(D² − H⊗I − ℬ)φ‖/‖φ‖` over unit inner vectors and the battery.
    pub residual: f64,
    pub inner_modes: usize,
    pub battery: usize,
    pub kappa: f64,
}

/// Checks `𝒟² = H ⊗ I + ℬ` on test vectors supported at distance at least
/// `degree(A)` inside the cutoff ball, where every product is exact.
pub fn verify_dirac_square(
    a: &TrigPolynomial,
    fiber: &FiberPoint,
    basis: &PlaneWaveBasis,
    rep: &CliffordRep,
    battery: usize,
    seed: u64,
) -> Result<DiracSquareReport> {
    let inner = basis.inner_positions(a.degree());
    if inner.is_empty() {
        return Err(Error::NoInnerModes(format!(
            "cutoff {} leaves no modes at distance {} from the boundary",
            basis.cutoff(),
            a.degree()
        )));
    }
    let size = rep.size;
    let d = assemble_dirac(a, fiber, basis, rep)?.matrix;
    let b = curvature_term(a, rep, basis)?.matrix;
    let h = hamiltonian_lift(a, fiber, basis, size)?;
    let r = &d * &d - h - b;
    let slots: Vec<usize> = inner
        .iter()
        .flat_map(|&i| (0..size).map(move |s| i * size + s))
        .collect();

    let column_worst = slots
        .iter()
        .map(|&c| r.column(c).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let random_worst = exec::map_range(battery, |t| {
        let phi = battery::supported_gaussian(&mut battery::sample_rng(seed, t as u64), r.ncols(), &slots);
        linalg::vec_norm(&linalg::matvec(&r, &phi)) / linalg::vec_norm(&phi)
    })
    .into_iter()
    .fold(0.0, f64::max);
    Ok(DiracSquareReport {
        residual: column_worst.max(random_worst),
        inner_modes: inner.len(),
        battery,
        kappa: fiber.kappa,
    })
}

/// Per-mode projections `P±_N = ½(I ∓ i(e·α)(ẽ_N·α))` with
/// `ẽ_N = (k⊥ + 2πN⊥)/|k⊥ + 2πN⊥|`.
#[derive(Debug, Clone)]
pub struct Projections {
    pub plus: Vec<DMatrix<Complex64>>,
    pub minus: Vec<DMatrix<Complex64>>,
}

impl Projections {
    /// Block-diagonal form of `P⁺` (`plus = true`) or `P⁻`.
    pub fn block_matrix(&self, plus: bool) -> DMatrix<Complex64> {
        let blocks = if plus { &self.plus } else { &self.minus };
        let size = blocks.first().map_or(0, |b| b.nrows());
        let mut out = DMatrix::<Complex64>::zeros(blocks.len() * size, blocks.len() * size);
        for (i, b) in blocks.iter().enumerate() {
            out.view_mut((i * size, i * size), (size, size)).copy_from(b);
        }
        out
    }
}

pub fn projections(fiber: &FiberPoint, basis: &PlaneWaveBasis, rep: &CliffordRep) -> Result<Projections> {
    let e_alpha = rep.contract_real(&fiber.frame.e);
    let id = DMatrix::<Complex64>::identity(rep.size, rep.size);
    let half = Complex64::new(0.5, 0.0);
    let mut plus = Vec::with_capacity(basis.len());
    let mut minus = Vec::with_capacity(basis.len());
    for n in basis.indices() {
        let p = fiber.momentum(&n.cartesian);
        let par = dot(&p, &fiber.frame.e);
        let perp: Vec<f64> = p.iter().zip(&fiber.frame.e).map(|(x, e)| x - par * e).collect();
        let len = dot(&perp, &perp).sqrt();
        if len <= TRANSVERSE_GUARD_TOL {
            return Err(Error::NotInKGamma(n.coords.clone()));
        }
        let et: Vec<f64> = perp.iter().map(|x| x / len).collect();
        let rot = &e_alpha * rep.contract_real(&et) * Complex64::new(0.0, 1.0);
        plus.push((&id - &rot) * half);
        minus.push((&id + &rot) * half);
    }
    Ok(Projections { plus, minus })
}

/// A quasimomentum on the face `|(k, γ)| = π` with a fixed transverse
/// offset, so that `k⊥ + 2πN⊥` stays away from zero on small bases.
pub fn generic_thomas_k(frame: &DirectionFrame) -> Vec<f64> {
    let mut k = FiberPoint::default_thomas_k(frame);
    for (w, u) in [0.37, 0.21].iter().zip(transverse_basis(&frame.e)) {
        for (ki, ui) in k.iter_mut().zip(&u) {
            *ki += w * ui;
        }
    }
    k
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    /// `max` of `|P² − P|`, `|P − P†|`, `|P⁺P⁻|`, `|P⁺ + P⁻ − I|`.
    pub algebra_residual: f64,
    /// `max |P± 𝒟_N P±|`.
    pub sandwich_residual: f64,
    /// `max |‖𝒟_N P± u‖ − G±_N ‖P± u‖| / (G±_N ‖u‖)`.
    pub norm_residual: f64,
    pub samples: usize,
}

/// Checks the projection algebra and the identities `P±𝒟_N P± = 0`,
/// `‖𝒟_N P± u‖ = G±_N ‖P± u‖` over `samples` random `(N, u)`.
pub fn projection_identities(
    fiber: &FiberPoint,
    basis: &PlaneWaveBasis,
    rep: &CliffordRep,
    samples: usize,
    seed: u64,
) -> Result<ProjectionReport> {
    use rand::Rng;
    let proj = projections(fiber, basis, rep)?;
    let id = DMatrix::<Complex64>::identity(rep.size, rep.size);
    let rows = exec::map_range(samples, |t| {
        let mut rng = battery::sample_rng(seed, t as u64);
        let i = rng.random_range(0..basis.len());
        let n = &basis.indices()[i];
        let (pp, pm) = (&proj.plus[i], &proj.minus[i]);
        let sym = dirac_symbol(&n.cartesian, fiber, rep);
        let algebra = [
            linalg::max_abs(&(pp * pp - pp)),
            linalg::max_abs(&(pm * pm - pm)),
            linalg::max_abs(&(pp - pp.adjoint())),
            linalg::max_abs(&(pp * pm)),
            linalg::max_abs(&(pp + pm - &id)),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let sandwich = linalg::max_abs(&(pp * &sym * pp)).max(linalg::max_abs(&(pm * &sym * pm)));
        let u = battery::complex_gaussian(&mut rng, rep.size);
        let (gp, gm) = g_pair(fiber, &n.cartesian);
        let unorm = linalg::vec_norm(&u);
        let mut norm_res: f64 = 0.0;
        for (p, g) in [(pp, gp), (pm, gm)] {
            let pu = linalg::matvec(p, &u);
            let dpu = linalg::matvec(&sym, &pu);
            let diff = (linalg::vec_norm(&dpu) - g * linalg::vec_norm(&pu)).abs();
            norm_res = norm_res.max(diff / (g * unorm));
        }
        (algebra, sandwich, norm_res)
    });
    let fold = |f: fn(&(f64, f64, f64)) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(ProjectionReport {
        algebra_residual: fold(|r| r.0),
        sandwich_residual: fold(|r| r.1),
        norm_residual: fold(|r| r.2),
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub kappa: f64,
    /// Largest `c ∈ [0, 1]` for which the inequality holds on every sample.
    pub c_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub a: f64,
    pub delta: f64,
    pub battery: usize,
    pub seed: u64,
    pub k: Vec<f64>,
    pub points: Vec<ThresholdPoint>,
    pub c_min: f64,
}

/// For each fiber, the largest `c ≤ 1` such that
/// `‖(P⁺ + aP⁻)𝒟φ‖² ≥ (1−δ)‖(c G₋P⁻ + a G₊P⁺)φ‖²` across a battery of
/// inner test vectors `φ`.
#[allow(clippy::too_many_arguments)]
pub fn theorem31_probe(
    a_field: &TrigPolynomial,
    fibers: &[FiberPoint],
    basis: &PlaneWaveBasis,
    rep: &CliffordRep,
    a: f64,
    delta: f64,
    battery_size: usize,
    seed: u64,
) -> Result<ThresholdReport> {
    if !(a > 0.0 && a <= 1.0) || !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < a <= 1 and 0 <= delta < 1, got a = {a}, delta = {delta}"
        )));
    }
    if fibers.is_empty() {
        return Err(Error::InvalidArgument("no fibers given".into()));
    }
    let inner = basis.inner_positions(a_field.degree());
    if inner.is_empty() {
        return Err(Error::NoInnerModes(format!("cutoff {} too small", basis.cutoff())));
    }
    let size = rep.size;
    let slots: Vec<usize> = inner
        .iter()
        .flat_map(|&i| (0..size).map(move |s| i * size + s))
        .collect();
    let mut points = Vec::with_capacity(fibers.len());
    for fiber in fibers {
        if !fiber.on_thomas_face() {
            return Err(Error::Guard(format!(
                "k = {:?} is off the face |(k, gamma)| = pi",
                fiber.k
            )));
        }
        let proj = projections(fiber, basis, rep)?;
        let d = assemble_dirac(a_field, fiber, basis, rep)?.matrix;
        let g: Vec<(f64, f64)> = basis.indices().iter().map(|n| g_pair(fiber, &n.cartesian)).collect();
        let samples = exec::map_range(battery_size, |t| {
            let phi = battery::supported_gaussian(&mut battery::sample_rng(seed, t as u64), d.ncols(), &slots);
            let dphi = linalg::matvec(&d, &phi);
            let (mut lhs, mut x2, mut y2) = (0.0, 0.0, 0.0);
            for (i, (gp, gm)) in g.iter().enumerate() {
                let r = i * size..(i + 1) * size;
                let block = &dphi[r.clone()];
                let plus_part = linalg::matvec(&proj.plus[i], block);
                let minus_part = linalg::matvec(&proj.minus[i], block);
                let mixed: Vec<Complex64> = plus_part.iter().zip(&minus_part).map(|(p, m)| p + m * a).collect();
                lhs += linalg::vec_norm(&mixed).powi(2);
                let f = &phi[r];
                x2 += (gm * linalg::vec_norm(&linalg::matvec(&proj.minus[i], f))).powi(2);
                y2 += (gp * linalg::vec_norm(&linalg::matvec(&proj.plus[i], f))).powi(2);
            }
            // ranges of P⁻ and P⁺ are orthogonal, so the right side is (1−δ)(c²X² + a²Y²)
            let room = lhs / (1.0 - delta) - a * a * y2;
            if x2 == 0.0 {
                if room >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (room.max(0.0) / x2).sqrt().min(1.0)
            }
        });
        let c_max = samples.into_iter().fold(1.0, f64::min);
        points.push(ThresholdPoint {
            kappa: fiber.kappa,
            c_max,
        });
    }
    let c_min = points.iter().map(|p| p.c_max).fold(1.0, f64::min);
    Ok(ThresholdReport {
        a,
        delta,
        battery: battery_size,
        seed,
        k: fibers[0].k.clone(),
        points,
        c_min,
    })
}
