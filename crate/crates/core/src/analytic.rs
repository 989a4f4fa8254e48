//! Closed-form dynamics for couplings with `U_aa + U_bb = 2 U_ab`.
//!
//! Under that condition the Hamiltonian splits into a function of the total
//! number, `ω_0 N + U_ab N²`, plus a linear two-mode rotation. A product of
//! coherent states therefore stays a product of coherent states up to the
//! number-dependent Kerr phase `e^{−i U_ab t N²}`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numeric::{build_block, hop};
use crate::params::{derive_params, omega_1_block, CoherentPair, DerivedParams, ModelParams};
use crate::state::{poisson_cutoff, product_amplitudes, TwoModeState, HARD_CAP};
use crate::tridiag::eigh_tridiagonal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticAmplitudes {
    pub alpha_t: C64,
    pub beta_t: C64,
    pub valid_at: f64,
}

/// `sin(λ_1 t)/λ_1`, continuous through `λ_1 = 0`.
fn sin_ratio(lambda_1: f64, t: f64) -> f64 {
    let x = lambda_1 * t;
    if x.abs() < 1e-6 {
        t * (1.0 - x * x / 6.0)
    } else {
        x.sin() / lambda_1
    }
}

/// Coherent amplitudes of both modes at time `t` under the linear part of the
/// dynamics.
pub fn amplitudes_at(
    pair: &CoherentPair,
    d: &DerivedParams,
    p: &ModelParams,
    t: f64,
) -> AnalyticAmplitudes {
    let c = (d.lambda_1 * t).cos();
    let s = C64::new(0.0, sin_ratio(d.lambda_1, t));
    let (a, b) = (pair.alpha_a, pair.alpha_b);
    AnalyticAmplitudes {
        alpha_t: a * c + s * (b * p.lambda - a * d.omega_1),
        beta_t: b * c + s * (a * p.lambda + b * d.omega_1),
        valid_at: t,
    }
}

/// The evolved two-mode state in closed form, truncated like
/// [`coherent_product`](crate::state::coherent_product).
pub fn evolved_state_analytic(
    pair: &CoherentPair,
    p: &ModelParams,
    t: f64,
    tail_tol: f64,
) -> Result<TwoModeState> {
    if !p.analytic_valid() {
        return Err(Error::AnalyticInvalid("U_aa + U_bb = 2 U_ab"));
    }
    let n_mean = pair.n_mean();
    let d = derive_params(p, n_mean)?;
    let amps = amplitudes_at(pair, &d, p, t);
    let (n_max, _) = poisson_cutoff(n_mean, tail_tol, HARD_CAP)?;
    let (w0, u) = (d.omega_0, p.u_ab);
    Ok(product_amplitudes(amps.alpha_t, amps.beta_t, n_mean, n_max, |na, nb| {
        let n = (na + nb) as f64;
        // reduce the quadratic phase before multiplying by t
        t * (w0 * n + u * n * n)
    }))
}

/// `|β(t)|²` for `ω_1 = 0`, written out in terms of the initial amplitudes.
pub fn mode_b_population(pair: &CoherentPair, lambda: f64, t: f64) -> f64 {
    let (s, c) = (lambda * t).sin_cos();
    let cross = (pair.alpha_a * pair.alpha_b.conj()).im;
    pair.alpha_a.norm_sqr() * s * s + pair.alpha_b.norm_sqr() * c * c
        - cross * (2.0 * lambda * t).sin()
}

/// `exp(θ (a†b − a b†))` on the block of total number `n`, as a dense
/// row-major real matrix.
///
/// The generator is antisymmetric tridiagonal with superdiagonal
/// `sqrt((n − k)(k + 1))`. Conjugating by `diag(iᵏ)` turns it into `i S` with
/// `S` real symmetric tridiagonal, so the exponential follows from the
/// eigen-decomposition of `S`.
pub fn mode_rotation(n: usize, theta: f64) -> Result<Vec<f64>> {
    let dim = n + 1;
    let off: Vec<f64> = (0..n).map(|k| hop(n, k)).collect();
    let eig = eigh_tridiagonal(&vec![0.0; dim], &off)?;
    let i_pow = |k: usize| match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    };
    let mut out = vec![0.0; dim * dim];
    for j in 0..dim {
        for k in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for (i, &s) in eig.values.iter().enumerate() {
                let v = eig.vector(i);
                acc += C64::from_polar(1.0, theta * s) * (v[j] * v[k]);
            }
            out[j * dim + k] = (i_pow(j) * acc * i_pow(k).conj()).re;
        }
    }
    Ok(out)
}

/// Conjugates block `n_block` of the Hamiltonian by the mode rotation with
/// angle `arccos(ω_1/λ_1)` and returns the largest deviation from the
/// diagonal form `ω_0 N + U_ab N² + λ_1 (n_a − n_b)`.
pub fn transformed_hamiltonian_check(p: &ModelParams, n_block: usize) -> Result<f64> {
    if !p.analytic_valid() {
        return Err(Error::AnalyticInvalid("U_aa + U_bb = 2 U_ab"));
    }
    let n = n_block;
    let dim = n + 1;
    let omega_0 = 0.5 * (p.omega_a + p.omega_b - 2.0 * p.u_ab);
    let omega_1 = omega_1_block(p, n);
    let lambda_1 = p.lambda.hypot(omega_1);
    let gamma = if lambda_1 == 0.0 { 0.0 } else { (omega_1 / lambda_1).clamp(-1.0, 1.0).acos() };
    let v = mode_rotation(n, 0.5 * gamma)?;
    let h = build_block(p, n).to_dense();

    let mut hv = vec![0.0; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            hv[r * dim + c] = (0..dim).map(|k| h[r][k] * v[k * dim + c]).sum();
        }
    }
    let nf = n as f64;
    let mut worst = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            let val: f64 = (0..dim).map(|k| v[k * dim + r] * hv[k * dim + c]).sum();
            let target = if r == c {
                omega_0 * nf + p.u_ab * nf * nf + lambda_1 * (nf - 2.0 * r as f64)
            } else {
                0.0
            };
            worst = worst.max((val - target).abs());
        }
    }
    Ok(worst)
}
