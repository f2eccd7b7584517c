//! Band functions along quasimomentum paths and the complex-quasimomentum
//! invertibility probe.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::fiber::{assemble_hamiltonian, FiberPoint, PlaneWaveBasis, Weight};
use crate::lattice::DirectionFrame;
use crate::linalg;
use crate::potential::TrigPolynomial;

/// `λ_j(k)` for each path point, ascending in `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    /// Cartesian quasimomenta.
    pub path: Vec<Vec<f64>>,
    pub bands: Vec<Vec<f64>>,
    pub basis_size: usize,
    pub cutoff: f64,
}

impl BandStructure {
    /// CSV rows `k_index,j,lambda` with `j` counted from 1.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k_index,j,lambda\n");
        for (ki, row) in self.bands.iter().enumerate() {
            for (j, lam) in row.iter().enumerate() {
                s.push_str(&format!("{ki},{},{lam:.16e}\n", j + 1));
            }
        }
        s
    }
}

/// Hermitian eigenvalues of the `κ = 0` fiber matrices along `path`.
pub fn band_structure(
    a: &TrigPolynomial,
    v: &TrigPolynomial,
    basis: &PlaneWaveBasis,
    path: &[Vec<f64>],
) -> Result<BandStructure> {
    let lat = basis.lattice();
    let bands = exec::map_range(path.len(), |i| -> Result<Vec<f64>> {
        let fp = FiberPoint::real(lat, path[i].clone())?;
        let m = assemble_hamiltonian(a, v, &fp, basis)?;
        if m.hermiticity_residual() > 1e-10 {
            return Err(Error::Eigensolver(i));
        }
        let ev = linalg::hermitian_eigenvalues(&m.matrix);
        if ev.iter().any(|x| !x.is_finite()) {
            return Err(Error::Eigensolver(i));
        }
        Ok(ev)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(BandStructure {
        path: path.to_vec(),
        bands,
        basis_size: basis.len(),
        cutoff: basis.cutoff(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatBandReport {
    pub tolerance: f64,
    pub oscillations: Vec<f64>,
    /// Band numbers (from 1) with oscillation below the tolerance.
    pub flagged: Vec<usize>,
    /// Set when all path points coincide, so every band is trivially flat.
    pub degenerate_path: bool,
}

/// Oscillation `max_k λ_j − min_k λ_j` per band, flagging nearly flat bands.
pub fn flat_band_scan(bs: &BandStructure, tol: f64) -> Result<FlatBandReport> {
    if bs.bands.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "flat-band scan needs at least 2 path points, got {}",
            bs.bands.len()
        )));
    }
    let degenerate_path = bs.path.windows(2).all(|w| w[0] == w[1]);
    if degenerate_path {
        log::warn!("all path points coincide; every band is reported flat");
    }
    let nb = bs.bands.iter().map(Vec::len).min().unwrap_or(0);
    let oscillations: Vec<f64> = (0..nb)
        .map(|j| {
            let (lo, hi) = bs
                .bands
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), row| {
                    (lo.min(row[j]), hi.max(row[j]))
                });
            hi - lo
        })
        .collect();
    let flagged = oscillations
        .iter()
        .enumerate()
        .filter(|(_, o)| **o < tol)
        .map(|(j, _)| j + 1)
        .collect();
    Ok(FlatBandReport {
        tolerance: tol,
        oscillations,
        flagged,
        degenerate_path,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThomasProbeReport {
    pub lambda: f64,
    pub gamma_coords: Vec<i64>,
    pub k: Vec<f64>,
    pub kappas: Vec<f64>,
    pub s_min: Vec<f64>,
    /// Minimum of `s_min` over the upper half of the κ list.
    pub tail_min: f64,
    pub basis_size: usize,
}

impl ThomasProbeReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kappa,s_min\n");
        for (k, v) in self.kappas.iter().zip(&self.s_min) {
            s.push_str(&format!("{k:.16e},{v:.16e}\n"));
        }
        s
    }
}

/// `L^{-1/2} (M − λ) L^{-1/2}` for the fiber at `fp`.
pub fn weighted_operator(
    a: &TrigPolynomial,
    v: &TrigPolynomial,
    lambda: f64,
    fp: &FiberPoint,
    basis: &PlaneWaveBasis,
) -> Result<DMatrix<Complex64>> {
    let mut m = assemble_hamiltonian(a, v, fp, basis)?.matrix;
    for i in 0..m.nrows() {
        m[(i, i)] -= lambda;
    }
    let w = crate::fiber::diagonal_power_real(basis, fp, Weight::L, -0.5)?;
    Ok(linalg::scale_rows_cols(&m, &w, &w))
}

/// Smallest singular value of `L^{-1/2}(Ĥ(A; k+iκe) + V − λ)L^{-1/2}` per κ.
/// `k` defaults to the face centre `πγ/|γ|²`.
pub fn thomas_probe(
    a: &TrigPolynomial,
    v: &TrigPolynomial,
    lambda: f64,
    frame: &DirectionFrame,
    basis: &PlaneWaveBasis,
    kappas: &[f64],
    k: Option<Vec<f64>>,
) -> Result<ThomasProbeReport> {
    if kappas.is_empty() || kappas.iter().any(|k| !(*k > 0.0)) || kappas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "kappa list must be positive and strictly ascending".into(),
        ));
    }
    let k = k.unwrap_or_else(|| FiberPoint::default_thomas_k(frame));
    let base = FiberPoint::thomas(k.clone(), kappas[0], frame.clone())?;
    let s_min = exec::map(kappas, |&kappa| -> Result<f64> {
        let fp = base.with_kappa(kappa)?;
        let w = weighted_operator(a, v, lambda, &fp, basis)?;
        Ok(linalg::singular_values(&w)[0])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let tail_min = s_min[s_min.len() / 2..].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ThomasProbeReport {
        lambda,
        gamma_coords: frame.gamma_coords.clone(),
        k,
        kappas: kappas.to_vec(),
        s_min,
        tail_min,
        basis_size: basis.len(),
    })
}
