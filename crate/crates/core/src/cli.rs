//! Command dispatch for the `magspec` binary.
//!
//! Exit codes: 0 success, 1 usage, config or guard error, 2 the conditions
//! fail (θ ≥ 1), 3 an identity check failed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::conditions::{condition_report, search_gamma, validate_measure, ConditionReport, MeasureReport};
use crate::config::{RunConfig, PROBE_NAMES};
use crate::dirac::{
    clifford_rep, generic_thomas_k, projection_identities, theorem31_probe, verify_dirac_square, DiracSquareReport,
    ProjectionReport,
};
use crate::error::{Error, Result};
use crate::exec;
use crate::fiber::FiberPoint;
use crate::lattice::{DirectionFrame, Lattice};
use crate::potential::TrigPolynomial;
use crate::spectrum::{band_structure, flat_band_scan, thomas_probe};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;

pub const DIRAC_SQUARE_TOL: f64 = 1e-9;
pub const PROJECTION_ALGEBRA_TOL: f64 = 1e-12;
pub const PROJECTION_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "magspec",
    version,
    about = "Periodic magnetic Schrödinger operators: conditions, bands and Thomas-type probes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate θ and the Fourier criterion, searching directions γ.
    CheckConditions(CommonArgs),
    /// Band functions along the configured path.
    Bands(CommonArgs),
    /// Smallest weighted singular value along the imaginary direction.
    Thomas(CommonArgs),
    /// Inequality and identity probes.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Probe to run; repeat for several. Defaults to the config list.
        #[arg(long = "probe", value_parser = clap::builder::PossibleValuesParser::new(PROBE_NAMES))]
        probes: Vec<String>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Battery seed; overrides the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let (common, probes) = match &cli.command {
        Command::CheckConditions(c) | Command::Bands(c) | Command::Thomas(c) => (c.clone(), Vec::new()),
        Command::Verify { common, probes } => (common.clone(), probes.clone()),
    };
    let mut cfg = match RunConfig::load(&common.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {}: {e}", common.config.display());
            return EXIT_USAGE;
        }
    };
    if let Some(seed) = common.seed {
        cfg.probes.seed = seed;
    }
    if !probes.is_empty() {
        cfg.probes.names = probes;
    }
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = std::fs::create_dir_all(&out) {
        eprintln!("error: cannot create {}: {e}", out.display());
        return EXIT_USAGE;
    }
    let result = exec::with_threads(common.threads, || match &cli.command {
        Command::CheckConditions(_) => cmd_check_conditions(&cfg, &out),
        Command::Bands(_) => cmd_bands(&cfg, &out),
        Command::Thomas(_) => cmd_thomas(&cfg, &out),
        Command::Verify { .. } => cmd_verify(&cfg, &out),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    std::fs::write(dir.join(name), text)?;
    log::info!("wrote {}", dir.join(name).display());
    Ok(())
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::write(dir.join(name), text)?;
    log::info!("wrote {}", dir.join(name).display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct ConditionsFile {
    best: ConditionReport,
    search: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measure: Option<MeasureReport>,
}

/// The fixed direction, or the best-ranked one from the search.
fn condition_table(cfg: &RunConfig, lat: &Lattice, a: &TrigPolynomial) -> Result<Vec<ConditionReport>> {
    match &cfg.gamma.coords {
        Some(g) => {
            let frame = DirectionFrame::new(lat, g)?;
            Ok(vec![condition_report(
                a,
                &frame,
                &cfg.measure,
                cfg.x_grid(),
                cfg.sphere_grid(),
            )?])
        }
        None => search_gamma(a, lat, cfg.gamma.search, &cfg.measure, cfg.x_grid(), cfg.sphere_grid()),
    }
}

fn direction(cfg: &RunConfig, lat: &Lattice, a: &TrigPolynomial) -> Result<DirectionFrame> {
    match &cfg.gamma.coords {
        Some(g) => DirectionFrame::new(lat, g),
        None => {
            let table = condition_table(cfg, lat, a)?;
            DirectionFrame::new(lat, &table[0].gamma_coords)
        }
    }
}

pub fn cmd_check_conditions(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let lat = cfg.lattice()?;
    let a = cfg.magnetic(&lat)?.poly;
    let measure = match cfg.measure {
        crate::conditions::AveragingMeasure::Dirac => None,
        mu => Some(validate_measure(&mu, 1024)?),
    };
    let search = condition_table(cfg, &lat, &a)?;
    let best = search[0].clone();
    log::info!("best gamma {:?}: theta = {:.6e}", best.gamma_coords, best.theta);
    let code = if best.theta < 1.0 { EXIT_OK } else { EXIT_HYPOTHESIS };
    write_json(out, "conditions.json", &ConditionsFile { best, search, measure })?;
    Ok(code)
}

pub fn cmd_bands(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let lat = cfg.lattice()?;
    let a = cfg.magnetic(&lat)?.poly;
    let v = cfg.electric(&lat)?.poly;
    let basis = cfg.plane_wave_basis(&lat)?;
    let path = cfg.k_path(&lat)?;
    let bands = band_structure(&a, &v, &basis, &path)?;
    let flat = flat_band_scan(&bands, cfg.bands.flat_tolerance)?;
    write_text(out, "bands.csv", &bands.to_csv())?;
    write_json(out, "flat_bands.json", &flat)?;
    Ok(EXIT_OK)
}

pub fn cmd_thomas(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let lat = cfg.lattice()?;
    let a = cfg.magnetic(&lat)?.poly;
    let v = cfg.electric(&lat)?.poly.add(&cfg.electric_second(&lat)?.poly)?;
    let basis = cfg.plane_wave_basis(&lat)?;
    let frame = direction(cfg, &lat, &a)?;
    let report = thomas_probe(
        &a,
        &v,
        cfg.thomas.lambda,
        &frame,
        &basis,
        &cfg.thomas.kappas,
        cfg.thomas.k.clone(),
    )?;
    write_text(out, "thomas.csv", &report.to_csv())?;
    write_json(out, "thomas.json", &report)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct IdentityFile<T> {
    probe: String,
    seed: u64,
    k: Vec<f64>,
    tolerance: Vec<f64>,
    reports: Vec<T>,
    pass: bool,
}

/// Runs the configured probes in order, writing `verify_<probe>.json` for
/// each. Identity failures give exit 3 after all probes ran.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<i32> {
    let lat = cfg.lattice()?;
    let a = cfg.magnetic(&lat)?.poly;
    let v = cfg.electric(&lat)?.poly;
    let basis = cfg.plane_wave_basis(&lat)?;
    let frame = direction(cfg, &lat, &a)?;
    let p = &cfg.probes;
    let k = p.k.clone().unwrap_or_else(|| generic_thomas_k(&frame));
    let mut failed = Vec::new();
    for name in &p.names {
        log::info!("probe {name}");
        let file = format!("verify_{name}.json");
        match name.as_str() {
            "thm12" => {
                let w = cfg.multiplier(&lat)?;
                let sampled = w.samples(cfg.grids.sample)?;
                let r = verify::probe_thm12(
                    &w.poly,
                    &sampled,
                    &frame,
                    &basis,
                    &p.kappas,
                    Some(k.clone()),
                    p.battery,
                    p.seed,
                )?;
                write_json(out, &file, &r)?;
            }
            "lemma11" => {
                let k_list = vec![k.clone(), vec![0.0; lat.dim()]];
                let r = verify::probe_lemma11(
                    &v,
                    &frame,
                    &basis,
                    &k_list,
                    &p.epsilons,
                    cfg.x_grid(),
                    p.battery,
                    p.seed,
                )?;
                write_json(out, &file, &r)?;
            }
            "bernstein" => {
                let settings: Vec<(f64, f64)> = p.bernstein.iter().map(|s| (s[0], s[1])).collect();
                let r = verify::bernstein_sweep(&lat, &k, &frame, &settings, p.battery, p.seed)?;
                write_json(out, &file, &r)?;
            }
            "relative_bound" => {
                let r = verify::probe_relative_bound(&a, &basis, &p.relative_epsilons, p.battery, p.seed)?;
                write_json(out, &file, &r)?;
            }
            "thm11" => {
                let v2 = cfg.electric_second(&lat)?.poly;
                let r = verify::probe_thm11(
                    &a,
                    &v,
                    &v2,
                    cfg.thomas.lambda,
                    &frame,
                    &basis,
                    &cfg.thomas.kappas,
                    Some(k.clone()),
                    p.battery,
                    p.seed,
                )?;
                if r.identity_residual.is_some_and(|x| x >= verify::IDENTITY_TOL) {
                    failed.push(name.clone());
                }
                write_json(out, &file, &r)?;
            }
            "dirac_square" => {
                let rep = clifford_rep(lat.dim())?;
                let reports = p
                    .dirac_kappas
                    .iter()
                    .map(|&kappa| {
                        let fp = FiberPoint::thomas(k.clone(), kappa, frame.clone())?;
                        verify_dirac_square(&a, &fp, &basis, &rep, p.battery, p.seed)
                    })
                    .collect::<Result<Vec<DiracSquareReport>>>()?;
                let pass = reports.iter().all(|r| r.residual < DIRAC_SQUARE_TOL);
                if !pass {
                    failed.push(name.clone());
                }
                let body = IdentityFile {
                    probe: name.clone(),
                    seed: p.seed,
                    k: k.clone(),
                    tolerance: vec![DIRAC_SQUARE_TOL],
                    reports,
                    pass,
                };
                write_json(out, &file, &body)?;
            }
            "projections" => {
                let rep = clifford_rep(lat.dim())?;
                let reports = p
                    .dirac_kappas
                    .iter()
                    .map(|&kappa| {
                        let fp = FiberPoint::thomas(k.clone(), kappa, frame.clone())?;
                        projection_identities(&fp, &basis, &rep, p.projection_samples, p.seed)
                    })
                    .collect::<Result<Vec<ProjectionReport>>>()?;
                let pass = reports.iter().all(|r| {
                    r.algebra_residual < PROJECTION_ALGEBRA_TOL
                        && r.sandwich_residual < PROJECTION_ALGEBRA_TOL
                        && r.norm_residual < PROJECTION_NORM_TOL
                });
                if !pass {
                    failed.push(name.clone());
                }
                let body = IdentityFile {
                    probe: name.clone(),
                    seed: p.seed,
                    k: k.clone(),
                    tolerance: vec![PROJECTION_ALGEBRA_TOL, PROJECTION_NORM_TOL],
                    reports,
                    pass,
                };
                write_json(out, &file, &body)?;
            }
            "thm31" => {
                let rep = clifford_rep(lat.dim())?;
                let fibers = p
                    .kappas
                    .iter()
                    .map(|&kappa| FiberPoint::thomas(k.clone(), kappa, frame.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let r = theorem31_probe(
                    &a,
                    &fibers,
                    &basis,
                    &rep,
                    p.threshold_a,
                    p.threshold_delta,
                    p.battery,
                    p.seed,
                )?;
                write_json(out, &file, &r)?;
            }
            other => return Err(Error::InvalidArgument(format!("unknown probe {other}"))),
        }
    }
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("identity check failed: {}", failed.join(", "));
        Ok(EXIT_CONTRACT)
    }
}
