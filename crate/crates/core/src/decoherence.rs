//! Single-mode phase damping under `H_a = ω_a n + U_aa n(n − 1)`, applied in
//! closed form: each density-matrix element picks up a phase and the factor
//! `e^{−κ t (n − m)²}`.

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::gcs::{gcs_from_vacuum_start, GcsState};
use crate::observables::SingleModeDensity;
use crate::params::{DerivedParams, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingParams {
    pub omega_a: f64,
    pub u_aa: f64,
    /// Phase-damping rate.
    pub kappa: f64,
}

impl DampingParams {
    pub fn new(omega_a: f64, u_aa: f64, kappa: f64) -> Result<Self> {
        for (name, v) in [("omega_a", omega_a), ("u_aa", u_aa), ("kappa", kappa)] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        if kappa < 0.0 {
            return Err(invalid("kappa", "must be nonnegative"));
        }
        Ok(Self { omega_a, u_aa, kappa })
    }
}

/// Multiplier of `ρ^{nm}` after time `t`.
fn element_factor(dp: &DampingParams, n: usize, m: usize, t: f64) -> C64 {
    let (nf, mf) = (n as f64, m as f64);
    let diff = nf - mf;
    let phase = -t * (dp.omega_a * diff + dp.u_aa * (nf * (nf - 1.0) - mf * (mf - 1.0)));
    C64::from_polar((-dp.kappa * t * diff * diff).exp(), phase)
}

pub fn phase_damp(rho0: &SingleModeDensity, dp: &DampingParams, t: f64) -> Result<SingleModeDensity> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("phase damping runs forward only, got {t}"),
        });
    }
    let dim = rho0.dim();
    let mut out = rho0.clone();
    let data = out.data_mut();
    for n in 0..dim {
        for m in n + 1..dim {
            // the lower triangle takes the conjugate factor, keeping ρ Hermitian
            let f = element_factor(dp, n, m, t);
            data[n * dim + m] *= f;
            data[m * dim + n] *= f.conj();
        }
    }
    Ok(out)
}

/// `Tr ρ(t)²` at each time; only `|ρ^{nm}(0)|` and `κ` enter.
pub fn purity_series(rho0: &SingleModeDensity, dp: &DampingParams, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(invalid("times", "must be nonnegative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "must be ascending"));
    }
    let dim = rho0.dim();
    // weight of each |n − m| diagonal
    let mut by_offset = vec![0.0; dim];
    for n in 0..dim {
        for m in 0..dim {
            by_offset[n.abs_diff(m)] += rho0.get(n, m).norm_sqr();
        }
    }
    Ok(times
        .iter()
        .map(|&t| {
            let p = by_offset
                .iter()
                .enumerate()
                .map(|(d, w)| w * (-2.0 * dp.kappa * t * (d * d) as f64).exp())
                .sum();
            (t, p)
        })
        .collect())
}

/// The vacuum-start GCS (`k = 1`) after evolving freely under `H_a` for
/// time `t`: the amplitude rotates by `e^{−i(ω_a − U_aa)t}` and the Kerr
/// coefficient grows by `U_aa t`.
pub fn kerr_drifted_gcs(
    n_total: f64,
    d: &DerivedParams,
    p: &ModelParams,
    t: f64,
    tail_tol: f64,
) -> Result<GcsState> {
    let g0 = gcs_from_vacuum_start(n_total, d, p, 1, tail_tol)?;
    let gamma = g0.gamma * C64::from_polar(1.0, -(p.omega_a - p.u_aa) * t);
    Ok(GcsState::with_cutoff(gamma, g0.kerr + p.u_aa * t, g0.cutoff()))
}
