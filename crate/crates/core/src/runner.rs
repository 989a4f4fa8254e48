//! Scenario orchestration behind the command-line subcommands.
//!
//! Each `*_scenario` function is a pure computation on a [`RunConfig`];
//! [`run`] wraps them with file output. CSV floats are written with 17
//! significant digits so that identical configs give byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analytic::evolved_state_analytic;
use crate::config::{ConfigError, Engine, HusimiSource, RunConfig};
use crate::decoherence::{purity_series, DampingParams};
use crate::error::{Error, Result};
use crate::gcs::{
    cat_reconstruct, decompose, gcs_from_vacuum_start, pure_fidelity, purification_partner,
    purification_residual, purification_times, GcsState, Mode, PurificationKind,
};
use crate::husimi::{count_packets, husimi, GridSpec, HusimiGrid};
use crate::numeric::{evolve, SpectrumCache};
use crate::observables::{record, reduce_mode_a, reduce_mode_b, ObservableRecord, SingleModeDensity};
use crate::params::{derive_params, estimate_formation_time, CoherentPair, ModelParams};
use crate::state::{coherent_amplitudes, coherent_product, poisson_cutoff, HARD_CAP};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Cat,
    Husimi,
    Decohere,
    Purify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Cat => "cat",
            Command::Husimi => "husimi",
            Command::Decohere => "decohere",
            Command::Purify => "purify",
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numeric(Error),
    Io(std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "config error: {e}"),
            RunError::Numeric(e) => write!(f, "numerical failure: {e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Numeric(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn cjson(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Engine actually used: `auto` picks the closed form only where it is exact,
/// i.e. for `U_aa = U_bb = U_ab`.
pub fn resolve_engine(requested: Engine, p: &ModelParams) -> Result<Engine> {
    match requested {
        Engine::Auto if p.equal_scattering() => Ok(Engine::Analytic),
        Engine::Auto => Ok(Engine::Numeric),
        Engine::Analytic if !p.analytic_valid() => Err(Error::AnalyticInvalid("U_aa + U_bb = 2 U_ab")),
        e => Ok(e),
    }
}

// ---- evolve ----

#[derive(Debug, Clone)]
pub struct EvolveSeries {
    pub u_ab_percent: Option<f64>,
    pub params: ModelParams,
    pub engine: Engine,
    pub n_max: usize,
    pub norm: f64,
    pub records: Vec<ObservableRecord>,
}

/// Mode-b diagnostics of `pair` under `p` at each of `times`.
pub fn evolve_series(
    pair: &CoherentPair,
    p: &ModelParams,
    times: &[f64],
    requested: Engine,
    tail_tol: f64,
    cache: &SpectrumCache,
) -> Result<(Engine, usize, f64, Vec<ObservableRecord>)> {
    let engine = resolve_engine(requested, p)?;
    let n_total = pair.n_mean();
    let initial = coherent_product(pair, tail_tol)?;
    let records = times
        .par_iter()
        .map(|&t| {
            let s = match engine {
                Engine::Analytic => evolved_state_analytic(pair, p, t, tail_tol)?,
                _ => evolve(&initial, p, t, cache)?,
            };
            Ok(record(&s, t, n_total))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((engine, initial.n_max(), initial.norm(), records))
}

pub fn evolve_scenario(cfg: &RunConfig) -> Result<Vec<EvolveSeries>> {
    let pair = cfg.state.pair()?;
    let times = cfg.time.points();
    let cache = SpectrumCache::new();
    cfg.model_series()
        .into_iter()
        .map(|(pct, p)| {
            let (engine, n_max, norm, records) =
                evolve_series(&pair, &p, &times, cfg.numerics.engine, cfg.numerics.tail_tol, &cache)?;
            Ok(EvolveSeries { u_ab_percent: pct, params: p, engine, n_max, norm, records })
        })
        .collect()
}

pub const EVOLVE_HEADER: &str = "u_ab_percent,u_ab,t,nb_frac,var_nb,var_b,mandel_q,linear_entropy";

pub fn evolve_csv(series: &[EvolveSeries]) -> String {
    let mut out = String::from(EVOLVE_HEADER);
    out.push('\n');
    for s in series {
        for r in &s.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                fmt_opt(s.u_ab_percent),
                fmt_float(s.params.u_ab),
                fmt_float(r.t),
                fmt_float(r.nb_frac),
                fmt_float(r.var_nb),
                fmt_float(r.var_b),
                fmt_opt(r.mandel_q),
                fmt_float(r.linear_entropy),
            );
        }
    }
    out
}

// ---- cat ----

#[derive(Debug, Clone, Serialize)]
pub struct CatReport {
    pub status: String,
    pub t_e: f64,
    pub lambda_1: f64,
    pub omega_1: f64,
    pub vanishing_mode: String,
    pub alpha_a: [f64; 2],
    pub alpha_b: [f64; 2],
    /// Coherent amplitude of the surviving mode, `β(t_e) e^{−iω_0 t_e}`.
    pub gamma: [f64; 2],
    /// Kerr coefficient `U_ab t_e`.
    pub kerr: f64,
    pub r: Option<i64>,
    pub s: Option<u64>,
    pub l: Option<usize>,
    pub coefficients: Option<Vec<[f64; 2]>>,
    pub reconstruction_fidelity: Option<f64>,
    /// Population left outside the vanishing mode's vacuum at `t_e`.
    pub residual_population: f64,
    /// `|α(t_e)|` or `|β(t_e)|` of the vanishing mode.
    pub residual_amplitude: f64,
    pub n_max: usize,
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub struct CatScenario {
    pub report: CatReport,
    pub pair: CoherentPair,
    pub gcs: GcsState,
    /// Fock amplitudes of the surviving mode with the vanishing mode in vacuum.
    pub mode_amplitudes: Vec<C64>,
    /// Reduced density of the surviving mode.
    pub mode_density: SingleModeDensity,
}

fn pair_of(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

/// The purification setup: `α_a` from the config, its partner chosen so that
/// `vanishing` is empty at `t_e = (2p + 1)π/(4λ_1)`, and the surviving mode
/// decomposed into coherent packets.
pub fn cat_scenario(cfg: &RunConfig) -> Result<CatScenario> {
    let p = cfg.model;
    if !p.analytic_valid() {
        return Err(Error::AnalyticInvalid("U_aa + U_bb = 2 U_ab"));
    }
    let alpha_a = cfg.state.pair()?.alpha_a;
    let vanishing = cfg.cat.vanishing;
    // ω_1 may depend on the total number, which depends on the partner
    let mut n_mean = 2.0 * alpha_a.norm_sqr();
    let mut solved = None;
    for _ in 0..100 {
        let d = derive_params(&p, n_mean)?;
        let t_e = purification_times(&d, PurificationKind::Quarter, cfg.cat.quarter as usize + 1)?
            [cfg.cat.quarter as usize];
        let alpha_b = purification_partner(alpha_a, Mode::A, vanishing, &d, &p, t_e)?;
        let pair = CoherentPair::new(alpha_a, alpha_b)?;
        let next = pair.n_mean();
        let done = (next - n_mean).abs() <= 1e-14 * next.max(1.0);
        n_mean = next;
        solved = Some((t_e, pair));
        if done {
            break;
        }
    }
    let (t_e, pair) = solved.expect("loop runs at least once");
    let d = derive_params(&p, pair.n_mean())?;

    let state = evolved_state_analytic(&pair, &p, t_e, cfg.numerics.tail_tol)?;
    let n_max = state.n_max();
    let norm_sqr = state.norm_sqr();
    let mode_amplitudes: Vec<C64> = (0..=n_max)
        .map(|n| match vanishing {
            Mode::A => state.amp(0, n),
            Mode::B => state.amp(n, 0),
        })
        .collect();
    let kept: f64 = mode_amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let mode_density = match vanishing {
        Mode::A => reduce_mode_b(&state),
        Mode::B => reduce_mode_a(&state),
    };

    let amps = crate::analytic::amplitudes_at(&pair, &d, &p, t_e);
    let surviving = match vanishing {
        Mode::A => amps.beta_t,
        Mode::B => amps.alpha_t,
    };
    let gamma = surviving * C64::from_polar(1.0, -d.omega_0 * t_e);
    let gcs = GcsState::with_cutoff(gamma, p.u_ab * t_e, n_max);

    let mut report = CatReport {
        status: String::new(),
        t_e,
        lambda_1: d.lambda_1,
        omega_1: d.omega_1,
        vanishing_mode: match vanishing {
            Mode::A => "a".into(),
            Mode::B => "b".into(),
        },
        alpha_a: pair_of(pair.alpha_a),
        alpha_b: pair_of(pair.alpha_b),
        gamma: pair_of(gamma),
        kerr: gcs.kerr,
        r: None,
        s: None,
        l: None,
        coefficients: None,
        reconstruction_fidelity: None,
        residual_population: 1.0 - kept / norm_sqr,
        residual_amplitude: purification_residual(&pair, vanishing, &d, &p, t_e),
        n_max,
        norm: norm_sqr.sqrt(),
    };
    match decompose(&gcs, cfg.numerics.rational_tol, cfg.numerics.max_denominator) {
        Some((rp, dec)) => {
            let recon = cat_reconstruct(&dec, n_max)?;
            report.status = "ok".into();
            report.r = Some(rp.r);
            report.s = Some(rp.s);
            report.l = Some(dec.l);
            report.coefficients = Some(dec.coeffs.iter().map(|c| pair_of(*c)).collect());
            report.reconstruction_fidelity = Some(pure_fidelity(&recon, &mode_amplitudes));
        }
        None => {
            report.status = format!(
                "U_ab t_e / π = {} has no rational form with denominator ≤ {} within {}",
                gcs.kerr / std::f64::consts::PI,
                cfg.numerics.max_denominator,
                cfg.numerics.rational_tol
            );
        }
    }
    Ok(CatScenario { report, pair, gcs, mode_amplitudes, mode_density })
}

// ---- husimi ----

#[derive(Debug, Clone)]
pub struct HusimiScenario {
    pub grid: HusimiGrid,
    pub packets: usize,
    pub centre: C64,
    pub n_max: usize,
    pub trace: f64,
}

pub fn husimi_scenario(cfg: &RunConfig) -> Result<HusimiScenario> {
    let (rho, centre) = match cfg.husimi.source {
        HusimiSource::Cat => {
            let c = cat_scenario(cfg)?;
            (c.mode_density, c.gcs.gamma)
        }
        HusimiSource::Coherent => {
            let a = cfg.state.pair()?.alpha_a;
            let (n_max, _) = poisson_cutoff(a.norm_sqr(), cfg.numerics.tail_tol, HARD_CAP)?;
            // a few extra levels keep the top-level population clear of the edge check
            (SingleModeDensity::pure(&coherent_amplitudes(a, n_max + 8)), a)
        }
        HusimiSource::VacuumGcs => {
            let n = cfg.state.pair()?.n_mean();
            let d = derive_params(&cfg.model, n)?;
            let g = gcs_from_vacuum_start(n, &d, &cfg.model, cfg.husimi.k, cfg.numerics.tail_tol)?;
            (g.density(), g.gamma)
        }
    };
    let radius = cfg.husimi.radius.unwrap_or(centre.norm() + 6.0);
    let grid = husimi(&rho, &GridSpec::square(radius, cfg.husimi.resolution))?;
    let packets = count_packets(&grid, cfg.husimi.threshold)?;
    Ok(HusimiScenario { grid, packets, centre, n_max: rho.cutoff(), trace: rho.trace() })
}

pub fn husimi_csv(grid: &HusimiGrid) -> String {
    let mut out = String::from("re,im,q\n");
    for (re, im, q) in grid.rows() {
        let _ = writeln!(out, "{},{},{}", fmt_float(re), fmt_float(im), fmt_float(q));
    }
    out
}

// ---- decohere ----

#[derive(Debug, Clone)]
pub struct PuritySeries {
    pub kappa_over_u: f64,
    pub n_total: f64,
    pub n_max: usize,
    pub norm: f64,
    /// `(U_aa t, Tr ρ²)`.
    pub values: Vec<(f64, f64)>,
}

/// Purity of the vacuum-start GCS of mode a under phase damping, on the
/// config's time grid read as `U_aa t`.
pub fn decohere_scenario(cfg: &RunConfig) -> Result<Vec<PuritySeries>> {
    let p = cfg.model;
    if !(p.u_aa > 0.0) {
        return Err(Error::InvalidParameter {
            name: "u_aa",
            reason: "the decoherence time axis is U_aa t, so U_aa must be positive".into(),
        });
    }
    let scaled = cfg.time.points();
    let times: Vec<f64> = scaled.iter().map(|x| x / p.u_aa).collect();
    cfg.decohere
        .kappa_over_u
        .par_iter()
        .zip(cfg.decohere.n_total.par_iter())
        .map(|(&k, &n)| {
            let d = derive_params(&p, n)?;
            let g = gcs_from_vacuum_start(n, &d, &p, 1, cfg.numerics.tail_tol)?;
            let dp = DampingParams::new(p.omega_a, p.u_aa, k * p.u_aa)?;
            let series = purity_series(&g.density(), &dp, &times)?;
            Ok(PuritySeries {
                kappa_over_u: k,
                n_total: n,
                n_max: g.cutoff(),
                norm: g.norm_sqr().sqrt(),
                values: scaled.iter().zip(series).map(|(x, (_, pur))| (*x, pur)).collect(),
            })
        })
        .collect()
}

pub fn decohere_csv(series: &[PuritySeries], grid: &[f64]) -> String {
    let mut out = String::from("u_aa_t");
    for s in series {
        let _ = write!(out, ",purity_kappa_{}_n_{}", s.kappa_over_u, s.n_total);
    }
    out.push('\n');
    for (i, x) in grid.iter().enumerate() {
        out.push_str(&fmt_float(*x));
        for s in series {
            out.push(',');
            out.push_str(&fmt_float(s.values[i].1));
        }
        out.push('\n');
    }
    out
}

// ---- purify ----

#[derive(Debug, Clone, Serialize)]
pub struct PartnerEntry {
    pub t_p: f64,
    pub alpha_b: [f64; 2],
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PurifyReport {
    pub lambda_1: f64,
    pub omega_1: f64,
    pub vanishing_mode: String,
    pub alpha_a: [f64; 2],
    /// `(2p + 1)π / (4λ_1)`.
    pub quarter_times: Vec<f64>,
    /// `kπ / λ_1`.
    pub full_times: Vec<f64>,
    pub partners: Vec<PartnerEntry>,
    pub formation_time_estimate: Option<f64>,
}

pub fn purify_scenario(cfg: &RunConfig) -> Result<PurifyReport> {
    let p = cfg.model;
    let pair = cfg.state.pair()?;
    let d = derive_params(&p, pair.n_mean())?;
    let count = cfg.purify.count;
    let quarter = purification_times(&d, PurificationKind::Quarter, count)?;
    let full = purification_times(&d, PurificationKind::Full, count)?;
    let vanishing = cfg.purify.vanishing;
    let partners = quarter
        .iter()
        .map(|&t| {
            let b = purification_partner(pair.alpha_a, Mode::A, vanishing, &d, &p, t)?;
            let trial = CoherentPair::new(pair.alpha_a, b)?;
            Ok(PartnerEntry {
                t_p: t,
                alpha_b: pair_of(b),
                residual: purification_residual(&trial, vanishing, &d, &p, t),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let formation_time_estimate =
        cfg.trap.map(|tr| estimate_formation_time(tr.omega, tr.mass, tr.rabi)).transpose()?;
    Ok(PurifyReport {
        lambda_1: d.lambda_1,
        omega_1: d.omega_1,
        vanishing_mode: if vanishing == Mode::A { "a".into() } else { "b".into() },
        alpha_a: pair_of(pair.alpha_a),
        quarter_times: quarter,
        full_times: full,
        partners,
        formation_time_estimate,
    })
}

// ---- files ----

fn write_json(path: &Path, v: &Value) -> std::io::Result<()> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    std::fs::write(path, s)
}

/// Runs `cmd` on the config at `config_path`, writing into `out_dir`.
/// Returns the files written.
pub fn run(cmd: Command, config_path: &Path, out_dir: &Path, seed: Option<u64>) -> std::result::Result<Vec<PathBuf>, RunError> {
    let text = std::fs::read_to_string(config_path).map_err(|e| {
        RunError::Config(ConfigError {
            line: None,
            section: String::new(),
            field: config_path.display().to_string(),
            message: e.to_string(),
        })
    })?;
    let cfg = RunConfig::parse(&text)?;
    std::fs::create_dir_all(out_dir)?;
    let hash = config_hash(&text);
    let base = json!({
        "command": cmd.name(),
        "config_sha256": hash,
        "seed": seed,
    });
    let with = |extra: Value| {
        let mut v = base.clone();
        if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
            m.extend(e);
        }
        v
    };
    let name = cmd.name();
    let csv_path = out_dir.join(format!("{name}.csv"));
    let meta_path = out_dir.join(format!("{name}.meta.json"));
    let json_path = out_dir.join(format!("{name}.json"));

    match cmd {
        Command::Evolve => {
            let series = evolve_scenario(&cfg)?;
            std::fs::write(&csv_path, evolve_csv(&series))?;
            let engines: Vec<&str> = series.iter().map(|s| s.engine.name()).collect();
            let engine = if engines.windows(2).all(|w| w[0] == w[1]) { engines[0] } else { "mixed" };
            let meta = with(json!({
                "engine_requested": cfg.numerics.engine.name(),
                "engine": engine,
                "n_max": series.iter().map(|s| s.n_max).max(),
                "norm": series.iter().map(|s| s.norm).fold(f64::INFINITY, f64::min),
                "series": series.iter().map(|s| json!({
                    "u_ab_percent": s.u_ab_percent,
                    "u_ab": s.params.u_ab,
                    "engine": s.engine.name(),
                    "n_max": s.n_max,
                    "norm": s.norm,
                })).collect::<Vec<_>>(),
            }));
            write_json(&meta_path, &meta)?;
            Ok(vec![csv_path, meta_path])
        }
        Command::Cat => {
            let c = cat_scenario(&cfg)?;
            let report = serde_json::to_value(&c.report).expect("report serializes");
            write_json(&json_path, &with(json!({ "engine": "analytic", "report": report })))?;
            Ok(vec![json_path])
        }
        Command::Husimi => {
            let h = husimi_scenario(&cfg)?;
            std::fs::write(&csv_path, husimi_csv(&h.grid))?;
            let source = match cfg.husimi.source {
                HusimiSource::Cat => "cat",
                HusimiSource::Coherent => "coherent",
                HusimiSource::VacuumGcs => "vacuum_gcs",
            };
            let meta = with(json!({
                "engine": "analytic",
                "source": source,
                "n_max": h.n_max,
                "norm": h.trace.sqrt(),
                "max_q": h.grid.max(),
                "packet_count": h.packets,
                "threshold": cfg.husimi.threshold,
                "centre": cjson(h.centre),
                "integral": h.grid.integral(),
            }));
            write_json(&meta_path, &meta)?;
            Ok(vec![csv_path, meta_path])
        }
        Command::Decohere => {
            let series = decohere_scenario(&cfg)?;
            std::fs::write(&csv_path, decohere_csv(&series, &cfg.time.points()))?;
            let meta = with(json!({
                "engine": "closed_form",
                "n_max": series.iter().map(|s| s.n_max).max(),
                "norm": series.iter().map(|s| s.norm).fold(f64::INFINITY, f64::min),
                "series": series.iter().map(|s| json!({
                    "kappa_over_u": s.kappa_over_u,
                    "n_total": s.n_total,
                    "n_max": s.n_max,
                    "norm": s.norm,
                })).collect::<Vec<_>>(),
            }));
            write_json(&meta_path, &meta)?;
            Ok(vec![csv_path, meta_path])
        }
        Command::Purify => {
            let r = purify_scenario(&cfg)?;
            let report = serde_json::to_value(&r).expect("report serializes");
            write_json(&json_path, &with(json!({ "engine": "analytic", "report": report })))?;
            Ok(vec![json_path])
        }
    }
}
