//! Acceptance run. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any fails. `MAGSPEC_BLESS=1` rewrites the regression baselines.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::panic;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use gauss_quad::legendre::GaussLegendre;
use magspec::conditions::{fourier_criterion, search_gamma, theta, AveragingMeasure, SphereGrid};
use magspec::dirac::{clifford_rep, generic_thomas_k, projections, theorem31_probe, verify_dirac_square};
use magspec::fiber::{assemble_hamiltonian, shell_partition, FiberPoint, PlaneWaveBasis};
use magspec::lattice::{dot, enumerate_indices, DirectionFrame, Lattice};
use magspec::linalg;
use magspec::potential::{TrigPolynomial, XGrid};
use magspec::spectrum::{band_structure, thomas_probe};
use magspec::verify;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn baseline_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/baselines")
        .join(name)
}

/// Compares `value` with the stored baseline, or stores it when blessing.
fn check_baseline(name: &str, value: &Value, rel_tol: f64) {
    let path = baseline_path(name);
    if std::env::var("MAGSPEC_BLESS").is_ok_and(|v| v == "1") {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(value).unwrap() + "\n").unwrap();
        return;
    }
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing baseline {}: {e}", path.display()));
    let stored: Value = serde_json::from_str(&text).unwrap();
    compare_json(&stored, value, rel_tol, name);
}

fn compare_json(expected: &Value, got: &Value, rel_tol: f64, at: &str) {
    match (expected, got) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            let scale = a.abs().max(b.abs()).max(1e-300);
            assert!((a - b).abs() <= rel_tol * scale, "{at}: baseline {a:e}, got {b:e}");
        }
        (Value::Array(a), Value::Array(b)) => {
            assert_eq!(a.len(), b.len(), "{at}: length");
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                compare_json(x, y, rel_tol, &format!("{at}[{i}]"));
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            assert_eq!(a.len(), b.len(), "{at}: keys");
            for (k, x) in a {
                compare_json(
                    x,
                    b.get(k).unwrap_or_else(|| panic!("{at}: missing {k}")),
                    rel_tol,
                    &format!("{at}.{k}"),
                );
            }
        }
        (a, b) => assert_eq!(a, b, "{at}"),
    }
}

fn random_vector_field(lat: &Lattice, rng: &mut ChaCha8Rng, modes: usize, max_norm: f64, amp: f64) -> TrigPolynomial {
    let n = lat.dim();
    let mut p = TrigPolynomial::zero(lat, n);
    let r = max_norm.floor() as i64;
    let mut placed = 0;
    while placed < modes {
        let k: Vec<i64> = (0..n).map(|_| rng.random_range(-r..=r)).collect();
        if k.iter().all(|&m| m == 0) || (dot(&lat.reciprocal_vector(&k), &lat.reciprocal_vector(&k))).sqrt() > max_norm
        {
            continue;
        }
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-amp..amp), rng.random_range(-amp..amp)))
            .collect();
        p.add_real_mode(&k, &v);
        placed += 1;
    }
    p
}

/// `(a cos 2πx₂, 0, 0)`.
fn example_field(lat: &Lattice, a: f64) -> TrigPolynomial {
    let mut p = TrigPolynomial::zero(lat, 3);
    p.add_real_mode(&[0, 1, 0], &[c(a / 2.0), c(0.0), c(0.0)]);
    p
}

fn mathieu(lat: &Lattice) -> TrigPolynomial {
    let mut v = TrigPolynomial::zero(lat, 1);
    v.add_real_mode(&[1, 0, 0], &[c(1.0)]);
    v
}

/// `p = k + 2πN` split along `e`: `(p∥, |p⊥|)`.
fn split(k: &[f64], n_cart: &[f64], e: &[f64]) -> (f64, f64) {
    let p: Vec<f64> = k.iter().zip(n_cart).map(|(a, b)| a + 2.0 * PI * b).collect();
    let par = dot(&p, e);
    let perp = (dot(&p, &p) - par * par).max(0.0).sqrt();
    (par, perp)
}

fn g_plus_minus(k: &[f64], kappa: f64, n_cart: &[f64], e: &[f64]) -> (f64, f64) {
    let (par, perp) = split(k, n_cart, e);
    (
        (par * par + (kappa + perp).powi(2)).sqrt(),
        (par * par + (kappa - perp).powi(2)).sqrt(),
    )
}

fn criterion_1() {
    for n in [3, 4, 5] {
        let rep = clifford_rep(n).unwrap();
        let id = DMatrix::<Complex64>::identity(rep.size, rep.size);
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for l in 0..n {
                let mut ac = &rep.alphas[j] * &rep.alphas[l] + &rep.alphas[l] * &rep.alphas[j];
                if j == l {
                    ac -= &id * c(2.0);
                }
                worst = worst.max(linalg::max_abs(&ac));
            }
            assert!(linalg::max_abs(&(&rep.alphas[j] - rep.alphas[j].adjoint())) < 1e-14);
        }
        assert!(worst < 1e-12, "n = {n}: {worst:e}");
    }
}

fn criterion_2() {
    let lat = Lattice::cubic(3);
    let rep = clifford_rep(3).unwrap();
    let basis = PlaneWaveBasis::new(&lat, 2.0 * PI * 4.0).unwrap();
    let frame = DirectionFrame::new(&lat, &[1, 0, 0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..5 {
        let a = random_vector_field(&lat, &mut rng, 3, 2.0 * PI * 2.0 / (2.0 * PI), 0.5);
        assert!(a.degree() <= 2.0 * PI * 2.0 + 1e-12);
        for kappa in [0.0, 3.0, 10.0] {
            let fp = FiberPoint::thomas(generic_thomas_k(&frame), kappa, frame.clone()).unwrap();
            let r = verify_dirac_square(&a, &fp, &basis, &rep, 8, trial).unwrap();
            assert!(r.residual < 1e-9, "trial {trial}, kappa {kappa}: {:e}", r.residual);
        }
    }
}

fn criterion_3() {
    let lat = Lattice::cubic(3);
    let rep = clifford_rep(3).unwrap();
    let basis = PlaneWaveBasis::new(&lat, 2.0 * PI * 3.0).unwrap();
    let frame = DirectionFrame::new(&lat, &[1, 1, 0]).unwrap();
    let fp = FiberPoint::thomas(generic_thomas_k(&frame), 6.0, frame.clone()).unwrap();
    let proj = projections(&fp, &basis, &rep).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut sandwich, mut norm_res): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let i = rng.random_range(0..basis.len());
        let n = &basis.indices()[i];
        let p: Vec<Complex64> =
            fp.k.iter()
                .zip(&n.cartesian)
                .zip(&frame.e)
                .map(|((k, m), e)| Complex64::new(k + 2.0 * PI * m, fp.kappa * e))
                .collect();
        let symbol = rep.contract(&p);
        let u: Vec<Complex64> = (0..rep.size)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let (gp, gm) = g_plus_minus(&fp.k, fp.kappa, &n.cartesian, &frame.e);
        for (pr, g) in [(&proj.plus[i], gp), (&proj.minus[i], gm)] {
            sandwich = sandwich.max(linalg::max_abs(&(pr * &symbol * pr)));
            let pu = linalg::matvec(pr, &u);
            let lhs = linalg::vec_norm(&linalg::matvec(&symbol, &pu));
            norm_res = norm_res.max((lhs - g * linalg::vec_norm(&pu)).abs() / (g * linalg::vec_norm(&u)));
        }
    }
    assert!(sandwich < 1e-12, "sandwich {sandwich:e}");
    assert!(norm_res < 1e-10, "norm identity {norm_res:e}");
}

fn criterion_4() {
    let lat = Lattice::new(vec![vec![1.0, 0.0, 0.0], vec![0.4, 0.9, 0.0], vec![0.1, 0.2, 1.3]]).unwrap();
    let basis = PlaneWaveBasis::new(&lat, 2.0 * PI * 2.5).unwrap();
    let zero_a = TrigPolynomial::zero(&lat, 3);
    let zero_v = TrigPolynomial::zero(&lat, 1);
    let path: Vec<Vec<f64>> = (0..6)
        .map(|i| lat.k_from_fractional(&[0.1 * i as f64, -0.05 * i as f64, 0.2]))
        .collect();
    let bands = band_structure(&zero_a, &zero_v, &basis, &path).unwrap();
    for (k, row) in path.iter().zip(&bands.bands) {
        let mut levels: Vec<f64> = basis
            .indices()
            .iter()
            .map(|n| {
                let p: Vec<f64> = k.iter().zip(&n.cartesian).map(|(a, b)| a + 2.0 * PI * b).collect();
                dot(&p, &p)
            })
            .collect();
        levels.sort_by(f64::total_cmp);
        for (x, y) in row.iter().zip(&levels) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    let frame = DirectionFrame::new(&lat, &[1, 0, 1]).unwrap();
    let kappas = [2.0, 5.0, 10.0, 20.0];
    for lambda in [-1.0, 0.0, 7.0] {
        let r = thomas_probe(&zero_a, &zero_v, lambda, &frame, &basis, &kappas, None).unwrap();
        for (kappa, s) in kappas.iter().zip(&r.s_min) {
            let closed = basis
                .indices()
                .iter()
                .map(|n| {
                    let (par, perp) = split(&r.k, &n.cartesian, &frame.e);
                    let z2 = Complex64::new(par * par + perp * perp - kappa * kappa, 2.0 * kappa * par);
                    let (gp, gm) = g_plus_minus(&r.k, *kappa, &n.cartesian, &frame.e);
                    (z2 - lambda).norm() / (gp * gm)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(
                (s - closed).abs() < 1e-10,
                "lambda {lambda}, kappa {kappa}: {s} vs {closed}"
            );
        }
    }
}

/// Raised-cosine transform with flat part `[0, h]` and support `[0, outer]`.
fn window(p: f64, h: f64, outer: f64) -> f64 {
    let a = p.abs();
    if a <= h {
        1.0
    } else if a >= outer {
        0.0
    } else {
        0.5 * (1.0 + (PI * (a - h) / (outer - h)).cos())
    }
}

/// Composite Gauss–Legendre nodes and weights on `[a, b]`.
fn composite(a: f64, b: f64, panels: usize, rule: &GaussLegendre) -> Vec<(f64, f64)> {
    let width = (b - a) / panels as f64;
    let mut out = Vec::new();
    for i in 0..panels {
        let (lo, hi) = (a + i as f64 * width, a + (i + 1) as f64 * width);
        for (x, w) in rule.as_node_weight_pairs() {
            out.push((0.5 * ((hi - lo) * x + hi + lo), 0.5 * (hi - lo) * w));
        }
    }
    out
}

/// θ from its definition: sup over x and ẽ of the μ-average in `t` of the
/// γ-line average in `ξ` of `A(x − ξγ + tẽ) − mean(A)`. The density is
/// rebuilt from the transform by a cosine integral.
fn theta_direct(a: &TrigPolynomial, frame: &DirectionFrame, h: f64, outer: f64, xg: XGrid, sg: SphereGrid) -> f64 {
    let lat = a.lattice();
    let rule = GaussLegendre::new(NonZeroUsize::new(16).unwrap());
    let p_nodes = composite(h, outer, ((outer - h) / 0.1).ceil() as usize, &rule);
    let density = |t: f64| {
        let flat = if t.abs() < 1e-12 { h } else { (h * t).sin() / t };
        let taper: f64 = p_nodes
            .iter()
            .map(|(p, w)| w * window(*p, h, outer) * (p * t).cos())
            .sum();
        (flat + taper) / PI
    };
    let t_max = 60.0;
    let t_nodes: Vec<(f64, f64)> = composite(0.0, t_max, (t_max / 0.25) as usize, &rule)
        .into_iter()
        .map(|(t, w)| (t, w * density(t)))
        .collect();
    let mass: f64 = 2.0 * t_nodes.iter().map(|(_, w)| w).sum::<f64>();
    assert!((mass - 1.0).abs() < 1e-5, "density mass {mass}");

    let modes: Vec<(Vec<f64>, Vec<Complex64>)> = a
        .iter()
        .filter(|(k, _)| k.iter().any(|&m| m != 0))
        .map(|(k, v)| (lat.reciprocal_vector(k), v.clone()))
        .collect();
    let eval = |y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; a.components()];
        for (kc, v) in &modes {
            let ph = Complex64::from_polar(1.0, 2.0 * PI * dot(kc, y));
            for (o, z) in out.iter_mut().zip(v) {
                *o += (z * ph).re;
            }
        }
        out
    };
    let q = 8;
    let line = |y: &[f64]| -> Vec<f64> {
        let mut acc = vec![0.0; a.components()];
        for s in 0..q {
            let xi = s as f64 / q as f64;
            let z: Vec<f64> = y.iter().zip(&frame.gamma).map(|(y, g)| y - xi * g).collect();
            for (o, v) in acc.iter_mut().zip(eval(&z)) {
                *o += v / q as f64;
            }
        }
        acc
    };
    let shape = xg.shape(lat.dim());
    let mut best: f64 = 0.0;
    for dir in sg.directions(frame).unwrap() {
        for idx in 0..shape.len() {
            let x = lat.point_from_fractional(&shape.fractional(idx));
            let mut acc = vec![0.0; a.components()];
            for (t, w) in &t_nodes {
                for sign in [1.0, -1.0] {
                    let y: Vec<f64> = x.iter().zip(&dir).map(|(x, d)| x + sign * t * d).collect();
                    for (o, v) in acc.iter_mut().zip(line(&y)) {
                        *o += w * v;
                    }
                }
            }
            best = best.max(acc.iter().map(|v| v * v).sum::<f64>().sqrt());
        }
    }
    frame.gamma_norm / PI * best
}

fn criterion_5() {
    let lat = Lattice::cubic(3);
    let (h, outer) = (2.0, 62.0);
    let mu = AveragingMeasure::windowed(h, outer).unwrap();
    let (xg, sg) = (XGrid::new(3), SphereGrid::new(4));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // each direction paired with a mode transverse to it, so θ > 0
    let cases = [
        ([1, 0, 0], [0, 1, 1]),
        ([0, 1, 0], [1, 0, 1]),
        ([1, 1, 0], [1, -1, 1]),
        ([0, 1, -1], [1, 1, 1]),
        ([1, 0, 1], [1, 1, -1]),
    ];
    for (g, transverse) in cases {
        let mut a = random_vector_field(&lat, &mut rng, 3, 3f64.sqrt(), 0.4);
        a.add_real_mode(&transverse, &[c(0.2), Complex64::new(0.0, -0.3), c(0.1)]);
        assert!(a.degree() <= 2.0 * PI * 3.0);
        let frame = DirectionFrame::new(&lat, &g).unwrap();
        let fast = theta(&a, &frame, &mu, xg, sg).unwrap().theta;
        let slow = theta_direct(&a, &frame, h, outer, xg, sg);
        assert!(fast > 0.05, "gamma {g:?}: {fast}");
        assert!((fast - slow).abs() < 1e-6, "gamma {g:?}: {fast} vs {slow}");
    }
    let e1 = DirectionFrame::new(&lat, &[1, 0, 0]).unwrap();
    let e2 = DirectionFrame::new(&lat, &[0, 1, 0]).unwrap();
    for amp in [0.3, 1.0, 4.0] {
        let f = example_field(&lat, amp);
        for m in [AveragingMeasure::Dirac, mu] {
            let t1 = theta(&f, &e1, &m, XGrid::new(16), SphereGrid::new(32)).unwrap().theta;
            let t2 = theta(&f, &e2, &m, XGrid::new(16), SphereGrid::new(32)).unwrap().theta;
            assert!((t1 - amp / PI).abs() < 1e-8, "{t1}");
            assert!(t2.abs() < 1e-8);
        }
    }
}

fn criterion_6() {
    let lat = Lattice::cubic(3);
    for amp in [0.25, 1.0, 3.0] {
        let f = example_field(&lat, amp);
        let e1 = fourier_criterion(&f, &DirectionFrame::new(&lat, &[1, 0, 0]).unwrap());
        assert_eq!((e1.sum, e1.bound), (amp, PI));
        let e2 = fourier_criterion(&f, &DirectionFrame::new(&lat, &[0, 1, 0]).unwrap());
        assert_eq!(e2.sum, 0.0);
    }
    // modes (1,0,1) and (0,1,0) are transverse to (1,0,−1); (1,1,0) is not
    let mut f = TrigPolynomial::zero(&lat, 3);
    f.add_real_mode(&[1, 0, 1], &[c(0.3), c(0.4), c(0.0)]);
    f.add_real_mode(&[0, 1, 0], &[c(0.0), c(0.0), c(0.2)]);
    f.add_real_mode(&[1, 1, 0], &[c(5.0), c(0.0), c(0.0)]);
    let r = fourier_criterion(&f, &DirectionFrame::new(&lat, &[1, 0, -1]).unwrap());
    assert!((r.sum - (2.0 * 0.5 + 2.0 * 0.2)).abs() < 1e-15);
    assert!((r.bound - PI / 2f64.sqrt()).abs() < 1e-15);
}

fn criterion_7() {
    let lat = Lattice::cubic(3);
    let basis = PlaneWaveBasis::new(&lat, 2.0 * PI * 2.0).unwrap();
    let a = example_field(&lat, 0.7);
    let v = mathieu(&lat);
    let shift = 1.37;
    let v_shifted = v.add(&TrigPolynomial::constant(&lat, &[shift])).unwrap();
    let path: Vec<Vec<f64>> = (0..4)
        .map(|i| lat.k_from_fractional(&[0.5 * i as f64 / 3.0, 0.1, 0.0]))
        .collect();
    let b0 = band_structure(&a, &v, &basis, &path).unwrap();
    let b1 = band_structure(&a, &v_shifted, &basis, &path).unwrap();
    for (r0, r1) in b0.bands.iter().zip(&b1.bands) {
        for (x, y) in r0.iter().zip(r1) {
            assert!((y - x - shift).abs() < 1e-10);
        }
    }

    let a0 = [0.3, -0.8, 0.45];
    let moved = a.add(&TrigPolynomial::constant(&lat, &a0)).unwrap();
    let frame = DirectionFrame::new(&lat, &[0, 1, 0]).unwrap();
    for kappa in [0.0, 4.0] {
        let k = vec![0.2, PI, -0.3];
        let fp = FiberPoint::new(k.clone(), kappa, frame.clone()).unwrap();
        let back = FiberPoint::new(k.iter().zip(&a0).map(|(k, a)| k - a).collect(), kappa, frame.clone()).unwrap();
        let m1 = assemble_hamiltonian(&moved, &v, &fp, &basis).unwrap().matrix;
        let m2 = assemble_hamiltonian(&a, &v, &back, &basis).unwrap().matrix;
        assert!(linalg::max_abs(&(m1 - m2)) < 1e-10);
    }

    let indices = enumerate_indices(&lat, 2.0 * PI * 3.0).unwrap();
    for n in &indices {
        let neg: Vec<i64> = n.coords.iter().map(|m| -m).collect();
        assert!(indices.iter().any(|x| x.coords == neg));
    }

    let big = PlaneWaveBasis::new(&lat, 2.0 * PI * 4.0).unwrap();
    let e1 = DirectionFrame::new(&lat, &[1, 0, 0]).unwrap();
    for kappa in [32.0, 50.0] {
        let fp = FiberPoint::thomas(FiberPoint::default_thomas_k(&e1), kappa, e1.clone()).unwrap();
        let sp = shell_partition(&big, &fp).unwrap();
        assert!((sp.h.powi(sp.l as i32) - kappa / 2.0).abs() < 1e-9 && sp.h >= 2.0 && sp.h < 4.0);
        let mut seen = vec![0u32; big.len()];
        for &i in sp.shells.iter().flatten().chain(&sp.complement) {
            seen[i] += 1;
        }
        assert!(seen.iter().all(|&s| s == 1));
        for (j, shell) in sp.shells.iter().enumerate() {
            let level = sp.m as i32 + j as i32;
            for &i in shell {
                let (_, gm) = g_plus_minus(&fp.k, kappa, &big.indices()[i].cartesian, &e1.e);
                assert!(gm <= sp.h.powi(level) * (1.0 + 1e-12));
                if j > 0 {
                    assert!(gm > sp.h.powi(level - 1));
                }
            }
        }
        for &i in &sp.complement {
            let (_, gm) = g_plus_minus(&fp.k, kappa, &big.indices()[i].cartesian, &e1.e);
            assert!(gm > kappa / 2.0);
        }
    }
}

fn criterion_8() {
    let lat = Lattice::cubic(3);
    let a = example_field(&lat, 0.3);
    let mut v = TrigPolynomial::zero(&lat, 1);
    v.add_real_mode(&[1, 0, 0], &[c(1.0)]);
    let ranked = search_gamma(
        &a,
        &lat,
        1,
        &AveragingMeasure::Dirac,
        XGrid::new(16),
        SphereGrid::new(32),
    )
    .unwrap();
    let frame = DirectionFrame::new(&lat, &ranked[0].gamma_coords).unwrap();
    let basis = PlaneWaveBasis::new(&lat, 2.0 * PI * 4.0).unwrap();
    let kappas = [5.0, 10.0, 20.0, 40.0];
    let mut curves = Vec::new();
    for lambda in [0.0, 10.0] {
        let r = thomas_probe(&a, &v, lambda, &frame, &basis, &kappas, None).unwrap();
        assert!(r.tail_min > 1e-3, "lambda {lambda}: tail {}", r.tail_min);
        curves.push(json!({ "lambda": lambda, "kappas": r.kappas, "s_min": r.s_min }));
    }
    let value = json!({ "gamma": frame.gamma_coords, "basis_size": basis.len(), "curves": curves });
    check_baseline("thomas_reference.json", &value, 1e-8);
}

fn criterion_9() {
    let lat = Lattice::cubic(3);
    let e1 = DirectionFrame::new(&lat, &[1, 0, 0]).unwrap();
    let basis = PlaneWaveBasis::new(&lat, 2.0 * PI * 3.0).unwrap();
    let w = mathieu(&lat).scaled(1.0);
    let mut w2 = TrigPolynomial::zero(&lat, 1);
    w2.add_real_mode(&[1, 0, 0], &[c(1.0)]);
    let sampled = w2.sample(&[256, 1, 1]).unwrap();
    let battery = verify::DEFAULT_BATTERY;

    let thm12 = verify::probe_thm12(&w, &sampled, &e1, &basis, &[10.0, 20.0, 40.0], None, battery, 11).unwrap();
    let lemma11 = verify::probe_lemma11(
        &w,
        &e1,
        &basis,
        &[FiberPoint::default_thomas_k(&e1), vec![0.0, 0.0, 0.0]],
        &[0.0, 0.05, 0.1, 0.2, 0.4],
        XGrid::new(16),
        battery,
        12,
    )
    .unwrap();
    let k = generic_thomas_k(&e1);
    let bern_a = verify::bernstein_sweep(&lat, &k, &e1, &[(32.0, 6.0), (32.0, 12.0)], battery, 13).unwrap();
    let bern_k = verify::bernstein_sweep(&lat, &k, &e1, &[(32.0, 8.0), (64.0, 8.0)], battery, 13).unwrap();
    let mut two = TrigPolynomial::zero(&lat, 3);
    two.add_real_mode(&[0, 1, 0], &[c(0.3), c(0.0), c(0.0)]);
    two.add_real_mode(&[1, 0, 1], &[c(0.0), Complex64::new(0.1, 0.2), c(0.0)]);
    let relative = verify::probe_relative_bound(&two, &basis, &[0.0, 0.01, 0.1, 1.0], battery, 14).unwrap();

    let mut envelopes = serde_json::Map::new();
    for (name, r) in [
        ("thm12", &thm12),
        ("lemma11", &lemma11),
        ("bernstein_a", &bern_a),
        ("bernstein_kappa", &bern_k),
        ("relative_bound", &relative),
    ] {
        assert!(r.pass && r.monotone, "{name}: {:?}", r.rows);
        assert!(r.rows.iter().all(|x| x.max_ratio.is_finite() && x.max_ratio >= 0.0));
        envelopes.insert(
            name.to_string(),
            json!(r.rows.iter().map(|x| x.max_ratio).collect::<Vec<_>>()),
        );
    }
    let rep = clifford_rep(3).unwrap();
    let fibers: Vec<FiberPoint> = [0.0, 3.0, 10.0]
        .iter()
        .map(|&kappa| FiberPoint::thomas(k.clone(), kappa, e1.clone()).unwrap())
        .collect();
    let threshold = theorem31_probe(&two.scaled(20.0), &fibers, &basis, &rep, 0.5, 0.0, battery, 15).unwrap();
    let c: Vec<f64> = threshold.points.iter().map(|p| p.c_max).collect();
    assert!(c.iter().all(|&x| x > 0.0 && x <= 1.0), "{c:?}");
    envelopes.insert("thm31".to_string(), json!(c));
    check_baseline("envelopes.json", &Value::Object(envelopes), 1e-2);
}

const DETERMINISM_CONFIG: &str = r#"
[lattice]
dim = 3

[potential.a]
modes = [{ n = [0, 1, 0], cos = [0.3, 0.0, 0.0] }]

[potential.v]
modes = [{ n = [1, 0, 0], cos = [2.0] }]

[basis]
radius = 2.0

[probes]
battery = 32
bernstein = [[32.0, 6.0], [64.0, 6.0]]
"#;

fn criterion_10() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, DETERMINISM_CONFIG).unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("out{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_magspec"))
            .args(["verify", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--seed", "77", "--threads", threads])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    assert_eq!(outputs[0].len(), 8);
    assert_eq!(outputs[0], outputs[1]);
}

/// Id, description, check, optional time budget.
type Criterion = (u32, &'static str, fn(), Option<Duration>);

fn main() {
    let criteria: [Criterion; 10] = [
        (
            1,
            "Clifford anticommutation, n = 3, 4, 5",
            criterion_1,
            Some(Duration::from_secs(1)),
        ),
        (
            2,
            "Dirac square identity on inner modes",
            criterion_2,
            Some(Duration::from_secs(30)),
        ),
        (3, "projection identities", criterion_3, Some(Duration::from_secs(5))),
        (4, "free-operator exactness", criterion_4, None),
        (5, "theta against direct quadrature and closed forms", criterion_5, None),
        (6, "Fourier criterion sums", criterion_6, None),
        (7, "invariance suite", criterion_7, None),
        (
            8,
            "Thomas positivity on the reference configuration",
            criterion_8,
            Some(Duration::from_secs(120)),
        ),
        (9, "inequality envelopes", criterion_9, None),
        (10, "verify reports independent of thread count", criterion_10, None),
    ];
    let mut failed = Vec::new();
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let ok = panic::catch_unwind(run).is_ok();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let verdict = if ok && in_time { "PASS" } else { "FAIL" };
        let note = if ok && !in_time { " (over time limit)" } else { "" };
        println!(
            "criterion {id:>2}: {verdict}  {name}  [{:.2}s]{note}",
            elapsed.as_secs_f64()
        );
        if !(ok && in_time) {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", criteria.len());
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
