//! INI run configuration.
//!
//! ```ini
//! [model]
//! omega_a = 0
//! omega_b = 0
//! u_aa = 2
//! u_bb = 2
//! u_ab = 2
//! lambda = 1
//!
//! [state]
//! n_total = 25          ; balanced pair, or
//! delta_phi = 1.5707963267948966
//! ; alpha_a = 2, 0      ; explicit amplitudes "re, im"
//! ; alpha_b = 0, 2
//!
//! [time]
//! start = 0
//! stop = 10
//! steps = 500           ; number of grid points
//! ```
//!
//! Scenario sections (`[numerics]`, `[evolve]`, `[cat]`, `[husimi]`,
//! `[decohere]`, `[purify]`, `[trap]`) are optional and fall back to defaults.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use ini::Ini;

use crate::gcs::{Mode, DEFAULT_MAX_DENOMINATOR, DEFAULT_RATIONAL_TOL};
use crate::params::{CoherentPair, ModelParams};
use crate::state::DEFAULT_TAIL_TOL;
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line of the offending entry, when it exists in the file.
    pub line: Option<usize>,
    pub section: String,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: [{}] {}: {}", self.section, self.field, self.message),
            None => write!(f, "[{}] {}: {}", self.section, self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Auto,
    Analytic,
    Numeric,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Auto => "auto",
            Engine::Analytic => "analytic",
            Engine::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Amplitudes(CoherentPair),
    /// `|α_a| = |α_b| = √(N/2)`, relative phase `Δφ`.
    Balanced { n_total: f64, delta_phi: f64 },
}

impl StateSpec {
    pub fn pair(&self) -> crate::Result<CoherentPair> {
        match *self {
            StateSpec::Amplitudes(p) => Ok(p),
            StateSpec::Balanced { n_total, delta_phi } => CoherentPair::balanced(n_total, delta_phi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    /// Number of points, both ends included.
    pub steps: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.stop } else { self.start + i as f64 * h })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub tail_tol: f64,
    pub engine: Engine,
    pub rational_tol: f64,
    pub max_denominator: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HusimiSource {
    /// Mode b at the purification time of `[cat]`.
    Cat,
    /// Single-mode coherent state `|α_a⟩`.
    Coherent,
    /// Mode a at `t_k = kπ/λ_1` after starting from `|√N⟩ ⊗ |0⟩`.
    VacuumGcs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatOptions {
    /// Index `p` of `t_e = (2p + 1)π / (4λ_1)`.
    pub quarter: u32,
    pub vanishing: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HusimiOptions {
    pub source: HusimiSource,
    /// Half-width of the square window; defaults to `|β| + 6`.
    pub radius: Option<f64>,
    pub resolution: usize,
    pub threshold: f64,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecohereOptions {
    pub kappa_over_u: Vec<f64>,
    pub n_total: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParams {
    pub omega: f64,
    pub mass: f64,
    pub rabi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurifyOptions {
    pub count: usize,
    pub vanishing: Mode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub state: StateSpec,
    pub time: TimeGrid,
    pub numerics: Numerics,
    /// Interspecies coupling as percentages of `U_aa`; empty means the
    /// model's own `u_ab` only.
    pub u_ab_percent: Vec<f64>,
    pub cat: CatOptions,
    pub husimi: HusimiOptions,
    pub decohere: DecohereOptions,
    pub purify: PurifyOptions,
    pub trap: Option<TrapParams>,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("model", &["omega_a", "omega_b", "u_aa", "u_bb", "u_ab", "lambda"]),
    ("state", &["alpha_a", "alpha_b", "n_total", "delta_phi"]),
    ("time", &["start", "stop", "steps"]),
    ("numerics", &["tail_tol", "engine", "rational_tol", "max_denominator"]),
    ("evolve", &["u_ab_percent"]),
    ("cat", &["quarter", "vanishing"]),
    ("husimi", &["source", "radius", "resolution", "threshold", "k"]),
    ("decohere", &["kappa_over_u", "n_total"]),
    ("purify", &["count", "vanishing"]),
    ("trap", &["omega", "mass", "rabi"]),
];

/// Line numbers of `[section]` headers and `key = value` entries.
struct Locator {
    entries: Vec<(String, String, usize)>,
    headers: Vec<(String, usize)>,
}

impl Locator {
    fn new(text: &str) -> Self {
        let mut entries = Vec::new();
        let mut headers = Vec::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix('[') {
                if let Some(end) = rest.find(']') {
                    section = rest[..end].trim().to_string();
                    headers.push((section.clone(), i + 1));
                }
            } else if let Some(eq) = line.find(['=', ':']) {
                if !line.starts_with([';', '#']) {
                    entries.push((section.clone(), line[..eq].trim().to_string(), i + 1));
                }
            }
        }
        Self { entries, headers }
    }

    fn line(&self, section: &str, key: &str) -> Option<usize> {
        self.entries.iter().rev().find(|(s, k, _)| s == section && k == key).map(|e| e.2)
    }

    fn header(&self, section: &str) -> Option<usize> {
        self.headers.iter().find(|(s, _)| s == section).map(|h| h.1)
    }
}

struct Reader<'a> {
    ini: &'a Ini,
    loc: Locator,
}

impl<'a> Reader<'a> {
    fn err(&self, section: &str, field: &str, message: impl Into<String>) -> ConfigError {
        let line = self.loc.line(section, field).or_else(|| self.loc.header(section));
        ConfigError { line, section: section.into(), field: field.into(), message: message.into() }
    }

    fn raw(&self, section: &str, key: &str) -> Option<&'a str> {
        self.ini.section(Some(section)).and_then(|s| s.get(key)).map(str::trim)
    }

    fn float_opt(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(v) = self.raw(section, key) else { return Ok(None) };
        let x: f64 = v.parse().map_err(|_| self.err(section, key, format!("`{v}` is not a number")))?;
        if !x.is_finite() {
            return Err(self.err(section, key, "must be finite"));
        }
        Ok(Some(x))
    }

    fn float(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        self.float_opt(section, key)?.ok_or_else(|| self.err(section, key, "missing"))
    }

    fn float_or(&self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.float_opt(section, key)?.unwrap_or(default))
    }

    fn uint_or(&self, section: &str, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| self.err(section, key, format!("`{v}` is not a nonnegative integer"))),
        }
    }

    fn complex_opt(&self, section: &str, key: &str) -> Result<Option<C64>, ConfigError> {
        let Some(v) = self.raw(section, key) else { return Ok(None) };
        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
        let bad = || self.err(section, key, format!("`{v}` is not `re, im`"));
        let (re, im) = match parts.as_slice() {
            [re] => (re.parse().map_err(|_| bad())?, 0.0),
            [re, im] => (re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        let z = C64::new(re, im);
        if !z.is_finite() {
            return Err(self.err(section, key, "must be finite"));
        }
        Ok(Some(z))
    }

    fn list(&self, section: &str, key: &str) -> Result<Vec<f64>, ConfigError> {
        let Some(v) = self.raw(section, key) else { return Ok(Vec::new()) };
        v.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                let x: f64 = s.parse().map_err(|_| self.err(section, key, format!("`{s}` is not a number")))?;
                if x.is_finite() {
                    Ok(x)
                } else {
                    Err(self.err(section, key, "entries must be finite"))
                }
            })
            .collect()
    }

    fn mode_or(&self, section: &str, key: &str, default: Mode) -> Result<Mode, ConfigError> {
        match self.raw(section, key) {
            None => Ok(default),
            Some("a") => Ok(Mode::A),
            Some("b") => Ok(Mode::B),
            Some(v) => Err(self.err(section, key, format!("`{v}` is not `a` or `b`"))),
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            section: String::new(),
            field: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_str(text).map_err(|e| ConfigError {
            line: Some(e.line),
            section: String::new(),
            field: String::new(),
            message: e.msg.to_string(),
        })?;
        let r = Reader { ini: &ini, loc: Locator::new(text) };
        check_known(&r)?;

        let m = "model";
        let model = ModelParams {
            omega_a: r.float_or(m, "omega_a", 0.0)?,
            omega_b: r.float_or(m, "omega_b", 0.0)?,
            u_aa: r.float(m, "u_aa")?,
            u_bb: r.float(m, "u_bb")?,
            u_ab: r.float(m, "u_ab")?,
            lambda: r.float(m, "lambda")?,
        };
        model.validate().map_err(|e| match e {
            crate::Error::InvalidParameter { name, reason } => r.err(m, name, reason),
            other => r.err(m, "", other.to_string()),
        })?;

        let state = read_state(&r)?;

        let t = "time";
        let time = TimeGrid {
            start: r.float_or(t, "start", 0.0)?,
            stop: r.float_or(t, "stop", 0.0)?,
            steps: r.uint_or(t, "steps", 1)? as usize,
        };
        if time.steps < 1 {
            return Err(r.err(t, "steps", "must be at least 1"));
        }
        if time.stop < time.start {
            return Err(r.err(t, "stop", "must not precede start"));
        }

        let nm = "numerics";
        let engine = match r.raw(nm, "engine") {
            None | Some("auto") => Engine::Auto,
            Some("analytic") => Engine::Analytic,
            Some("numeric") => Engine::Numeric,
            Some(v) => return Err(r.err(nm, "engine", format!("`{v}` is not auto, analytic or numeric"))),
        };
        let numerics = Numerics {
            tail_tol: r.float_or(nm, "tail_tol", DEFAULT_TAIL_TOL)?,
            engine,
            rational_tol: r.float_or(nm, "rational_tol", DEFAULT_RATIONAL_TOL)?,
            max_denominator: r.uint_or(nm, "max_denominator", DEFAULT_MAX_DENOMINATOR)?,
        };
        if !(numerics.tail_tol > 0.0 && numerics.tail_tol < 1.0) {
            return Err(r.err(nm, "tail_tol", "must lie in (0, 1)"));
        }
        if numerics.rational_tol < 0.0 {
            return Err(r.err(nm, "rational_tol", "must be nonnegative"));
        }
        if numerics.max_denominator == 0 {
            return Err(r.err(nm, "max_denominator", "must be positive"));
        }

        let u_ab_percent = r.list("evolve", "u_ab_percent")?;
        if u_ab_percent.iter().any(|p| !(0.0..=100.0).contains(p)) {
            return Err(r.err("evolve", "u_ab_percent", "percentages must lie in [0, 100]"));
        }

        let cat = CatOptions {
            quarter: u32::try_from(r.uint_or("cat", "quarter", 0)?)
                .map_err(|_| r.err("cat", "quarter", "too large"))?,
            vanishing: r.mode_or("cat", "vanishing", Mode::A)?,
        };

        let h = "husimi";
        let source = match r.raw(h, "source") {
            None | Some("cat") => HusimiSource::Cat,
            Some("coherent") => HusimiSource::Coherent,
            Some("vacuum_gcs") => HusimiSource::VacuumGcs,
            Some(v) => return Err(r.err(h, "source", format!("`{v}` is not cat, coherent or vacuum_gcs"))),
        };
        let husimi = HusimiOptions {
            source,
            radius: r.float_opt(h, "radius")?,
            resolution: r.uint_or(h, "resolution", 200)? as usize,
            threshold: r.float_or(h, "threshold", 0.5)?,
            k: u32::try_from(r.uint_or(h, "k", 1)?).map_err(|_| r.err(h, "k", "too large"))?,
        };
        if husimi.radius.is_some_and(|x| !(x > 0.0)) {
            return Err(r.err(h, "radius", "must be positive"));
        }
        if husimi.resolution < 2 {
            return Err(r.err(h, "resolution", "must be at least 2"));
        }
        if !(husimi.threshold > 0.0 && husimi.threshold < 1.0) {
            return Err(r.err(h, "threshold", "must lie in (0, 1)"));
        }
        if husimi.k == 0 {
            return Err(r.err(h, "k", "must be at least 1"));
        }

        let dc = "decohere";
        let decohere = DecohereOptions {
            kappa_over_u: r.list(dc, "kappa_over_u")?,
            n_total: r.list(dc, "n_total")?,
        };
        if decohere.kappa_over_u.len() != decohere.n_total.len() {
            return Err(r.err(dc, "n_total", "must pair one-to-one with kappa_over_u"));
        }
        if decohere.kappa_over_u.iter().any(|k| *k < 0.0) {
            return Err(r.err(dc, "kappa_over_u", "entries must be nonnegative"));
        }
        if decohere.n_total.iter().any(|n| *n < 0.0) {
            return Err(r.err(dc, "n_total", "entries must be nonnegative"));
        }

        let purify = PurifyOptions {
            count: r.uint_or("purify", "count", 4)? as usize,
            vanishing: r.mode_or("purify", "vanishing", Mode::A)?,
        };

        let tr = "trap";
        let trap = if ini.section(Some(tr)).is_some() {
            let trap = TrapParams {
                omega: r.float(tr, "omega")?,
                mass: r.float(tr, "mass")?,
                rabi: r.float(tr, "rabi")?,
            };
            for (k, v) in [("omega", trap.omega), ("mass", trap.mass), ("rabi", trap.rabi)] {
                if !(v > 0.0) {
                    return Err(r.err(tr, k, "must be positive"));
                }
            }
            Some(trap)
        } else {
            None
        };

        Ok(Self {
            model,
            state,
            time,
            numerics,
            u_ab_percent,
            cat,
            husimi,
            decohere,
            purify,
            trap,
        })
    }

    /// Model parameters for each requested `u_ab` setting.
    pub fn model_series(&self) -> Vec<(Option<f64>, ModelParams)> {
        if self.u_ab_percent.is_empty() {
            return vec![(None, self.model)];
        }
        self.u_ab_percent
            .iter()
            .map(|&pct| (Some(pct), ModelParams { u_ab: pct / 100.0 * self.model.u_aa, ..self.model }))
            .collect()
    }
}

fn check_known(r: &Reader<'_>) -> Result<(), ConfigError> {
    for (name, props) in r.ini.iter() {
        let Some(name) = name else {
            if let Some((k, _)) = props.iter().next() {
                return Err(r.err("", k, "entry outside any section"));
            }
            continue;
        };
        let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| *s == name) else {
            return Err(r.err(name, "", "unknown section"));
        };
        let known: HashSet<&str> = keys.iter().copied().collect();
        for (k, _) in props.iter() {
            if !known.contains(k) {
                return Err(r.err(name, k, "unknown key"));
            }
        }
    }
    Ok(())
}

fn read_state(r: &Reader<'_>) -> Result<StateSpec, ConfigError> {
    let s = "state";
    let a = r.complex_opt(s, "alpha_a")?;
    let b = r.complex_opt(s, "alpha_b")?;
    let n = r.float_opt(s, "n_total")?;
    let phi = r.float_opt(s, "delta_phi")?;
    match (n, phi) {
        (Some(n_total), phi) => {
            if a.is_some() || b.is_some() {
                return Err(r.err(s, "n_total", "give either n_total/delta_phi or amplitudes, not both"));
            }
            if n_total < 0.0 {
                return Err(r.err(s, "n_total", "must be nonnegative"));
            }
            Ok(StateSpec::Balanced { n_total, delta_phi: phi.unwrap_or(0.0) })
        }
        (None, Some(_)) => Err(r.err(s, "delta_phi", "requires n_total")),
        (None, None) => {
            let zero = C64::new(0.0, 0.0);
            let pair = CoherentPair::new(a.unwrap_or(zero), b.unwrap_or(zero))
                .map_err(|e| r.err(s, "alpha_a", e.to_string()))?;
            Ok(StateSpec::Amplitudes(pair))
        }
    }
}
