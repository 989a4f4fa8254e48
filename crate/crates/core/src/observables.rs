//! Reduced single-mode states and the moments used to characterize them.

use num_complex::Complex64 as C64;

use crate::analytic::amplitudes_at;
use crate::error::{Error, Result};
use crate::params::{derive_params, CoherentPair, ModelParams};
use crate::state::TwoModeState;

/// Below this mean occupation the Mandel parameter is reported as undefined.
pub const MANDEL_MIN_MEAN: f64 = 1e-12;

/// Density matrix over the Fock levels `0..=cutoff`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeDensity {
    dim: usize,
    data: Vec<C64>,
}

impl SingleModeDensity {
    pub fn from_rows(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim || dim == 0 {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: data.len() });
        }
        Ok(Self { dim, data })
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn pure(amps: &[C64]) -> Self {
        let dim = amps.len();
        let w: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for n in 0..dim {
            for m in 0..dim {
                data[n * dim + m] = amps[n] * amps[m].conj() / w;
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.dim - 1
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.data[n * self.dim + m]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|n| self.get(n, n).re).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim).map(|n| self.get(n, n).re).collect()
    }

    /// `Tr ρ²` as the Frobenius sum `Σ |ρ_nm|²`.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let tr = self.trace();
        Self { dim: self.dim, data: self.data.iter().map(|z| z / tr).collect() }
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for n in 0..self.dim {
            for m in n..self.dim {
                worst = worst.max((self.get(n, m) - self.get(m, n).conj()).norm());
            }
        }
        worst
    }

    /// `⟨v|ρ|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let d = self.dim.min(v.len());
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..d {
            let row = &self.data[n * self.dim..n * self.dim + d];
            let rv: C64 = row.iter().zip(v).map(|(r, x)| r * x).sum();
            acc += v[n].conj() * rv;
        }
        acc.re
    }
}

fn partial_trace(state: &TwoModeState, keep_b: bool) -> SingleModeDensity {
    let n_max = state.n_max();
    let dim = n_max + 1;
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    // sum over the traced-out occupation `j`
    for j in 0..=n_max {
        let col: Vec<C64> = (0..=n_max - j)
            .map(|i| if keep_b { state.amp(j, i) } else { state.amp(i, j) })
            .collect();
        for (m, cm) in col.iter().enumerate() {
            if *cm == C64::new(0.0, 0.0) {
                continue;
            }
            for (mp, cmp) in col.iter().enumerate() {
                data[m * dim + mp] += cm * cmp.conj();
            }
        }
    }
    SingleModeDensity { dim, data }
}

/// `ρ_b[m][m'] = Σ_n c_{n,m} c*_{n,m'}`; the trace equals the state's norm.
pub fn reduce_mode_b(state: &TwoModeState) -> SingleModeDensity {
    partial_trace(state, true)
}

pub fn reduce_mode_a(state: &TwoModeState) -> SingleModeDensity {
    partial_trace(state, false)
}

/// Moments of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDiagnostics {
    pub mean_n: f64,
    /// `⟨n²⟩ − ⟨n⟩²`.
    pub var_n: f64,
    /// `⟨b†b⟩ − |⟨b⟩|²`.
    pub var_b: f64,
    /// `None` when the mode is (numerically) empty.
    pub mandel_q: Option<f64>,
    pub purity: f64,
    pub linear_entropy: f64,
    pub mean_b: C64,
}

pub fn diagnostics(rho: &SingleModeDensity) -> ModeDiagnostics {
    let tr = rho.trace();
    let pops = rho.populations();
    let mean_n = pops.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>() / tr;
    let var_n = pops
        .iter()
        .enumerate()
        .map(|(n, p)| (n as f64 - mean_n).powi(2) * p)
        .sum::<f64>()
        / tr;
    let mean_b: C64 = (1..rho.dim())
        .map(|n| rho.get(n, n - 1) * (n as f64).sqrt())
        .sum::<C64>()
        / tr;
    let var_b = mean_n - mean_b.norm_sqr();
    let mandel_q = (mean_n > MANDEL_MIN_MEAN).then(|| (var_n - mean_n) / mean_n);
    let purity = rho.purity() / (tr * tr);
    ModeDiagnostics { mean_n, var_n, var_b, mandel_q, purity, linear_entropy: 1.0 - purity, mean_b }
}

/// One time point of the mode-b diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub t: f64,
    /// `⟨n_b⟩ / N`.
    pub nb_frac: f64,
    pub var_nb: f64,
    pub var_b: f64,
    pub mandel_q: Option<f64>,
    pub linear_entropy: f64,
    pub purity: f64,
}

impl ObservableRecord {
    pub fn from_diagnostics(t: f64, n_total: f64, d: &ModeDiagnostics) -> Self {
        Self {
            t,
            nb_frac: if n_total > 0.0 { d.mean_n / n_total } else { 0.0 },
            var_nb: d.var_n,
            var_b: d.var_b,
            mandel_q: d.mandel_q,
            linear_entropy: d.linear_entropy,
            purity: d.purity,
        }
    }
}

/// Mode-b record from a two-mode state.
pub fn record(state: &TwoModeState, t: f64, n_total: f64) -> ObservableRecord {
    ObservableRecord::from_diagnostics(t, n_total, &diagnostics(&reduce_mode_b(state)))
}

/// Exact mode-b moments for `U_aa = U_bb = U_ab = U`: the number statistics
/// stay Poisson with mean `|β(t)|²`, and the Kerr phase `e^{−iUtN²}`
/// shrinks `|⟨b⟩|²` by `e^{−2N[1 − cos(2Ut)]}`.
///
/// The linear entropy has no closed form here and is reported as NaN.
pub fn closed_form_record(pair: &CoherentPair, p: &ModelParams, t: f64) -> Result<ObservableRecord> {
    if !p.equal_scattering() {
        return Err(Error::AnalyticInvalid("U_aa = U_bb = U_ab"));
    }
    let n = pair.n_mean();
    let d = derive_params(p, n)?;
    let beta2 = amplitudes_at(pair, &d, p, t).beta_t.norm_sqr();
    let var_b = beta2 * (1.0 - (-2.0 * n * (1.0 - (2.0 * p.u_ab * t).cos())).exp());
    Ok(ObservableRecord {
        t,
        nb_frac: if n > 0.0 { beta2 / n } else { 0.0 },
        var_nb: beta2,
        var_b,
        mandel_q: (beta2 > MANDEL_MIN_MEAN).then_some(0.0),
        linear_entropy: f64::NAN,
        purity: f64::NAN,
    })
}
