//! Truncated two-mode Fock space, organized by total particle number.
//!
//! Amplitudes are stored block-major: block `N` holds `c_N[k]` for
//! `|n_a = N − k, n_b = k⟩`, `k = 0..=N`. The Hamiltonian never couples
//! different blocks.

use num_complex::Complex64 as C64;
use once_cell::sync::Lazy;

use crate::error::{invalid, Error, Result};
use crate::params::CoherentPair;

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Largest total number a truncated state may carry.
pub const HARD_CAP: usize = 512;

const LN_FACT_LEN: usize = 4 * HARD_CAP + 256;

static LN_FACT: Lazy<Vec<f64>> = Lazy::new(|| {
    let mut t = Vec::with_capacity(LN_FACT_LEN);
    let mut acc = 0.0f64;
    t.push(0.0);
    for n in 1..LN_FACT_LEN {
        acc += (n as f64).ln();
        t.push(acc);
    }
    t
});

/// `ln n!` from a cumulative table.
pub fn ln_factorial(n: usize) -> f64 {
    if n < LN_FACT_LEN {
        LN_FACT[n]
    } else {
        LN_FACT[LN_FACT_LEN - 1]
            + ((LN_FACT_LEN as u64)..=(n as u64)).map(|k| (k as f64).ln()).sum::<f64>()
    }
}

/// Poisson probability `e^{−μ} μⁿ / n!`.
pub fn poisson_pmf(mean: f64, n: usize) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (-mean + n as f64 * mean.ln() - ln_factorial(n)).exp()
}

/// Smallest `n_max` whose Poisson tail `Σ_{n > n_max} P(n)` is below
/// `tail_tol`, together with that tail.
pub fn poisson_cutoff(mean: f64, tail_tol: f64, cap: usize) -> Result<(usize, f64)> {
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(invalid("tail_tol", format!("must lie in (0, 1), got {tail_tol}")));
    }
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(invalid("n_mean", format!("must be finite and nonnegative, got {mean}")));
    }
    if mean > cap as f64 {
        return Err(Error::CutoffExceeded { needed: mean.ceil() as usize, cap });
    }
    // suffix sums from well past the cap, where the remaining mass is far
    // below any meaningful tolerance
    let len = 2 * cap + 128;
    let pmf: Vec<f64> = (0..len).map(|n| poisson_pmf(mean, n)).collect();
    let mut tail = vec![0.0; len + 1];
    for n in (0..len).rev() {
        tail[n] = tail[n + 1] + pmf[n];
    }
    // tail[n + 1] is the mass strictly above n
    for n in 0..=cap {
        if tail[n + 1] < tail_tol {
            return Ok((n, tail[n + 1]));
        }
    }
    let needed = (cap + 1..len).find(|&n| tail[n + 1] < tail_tol).unwrap_or(len);
    Err(Error::CutoffExceeded { needed, cap })
}

/// `zⁿ / sqrt(n!)` split into log-modulus and phase; `None` for `0ⁿ`, `n > 0`.
pub(crate) fn scaled_power(z: C64, n: usize) -> Option<(f64, f64)> {
    if n == 0 {
        return Some((0.0, 0.0));
    }
    let r = z.norm();
    if r == 0.0 {
        return None;
    }
    Some((n as f64 * r.ln() - 0.5 * ln_factorial(n), n as f64 * z.arg()))
}

/// Fock amplitudes `e^{−|z|²/2} zⁿ/√n!` for `n = 0..=cutoff`.
pub fn coherent_amplitudes(z: C64, cutoff: usize) -> Vec<C64> {
    let half = -0.5 * z.norm_sqr();
    (0..=cutoff)
        .map(|n| match scaled_power(z, n) {
            Some((lm, ph)) => C64::from_polar((half + lm).exp(), ph),
            None => C64::new(0.0, 0.0),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    blocks: Vec<Vec<C64>>,
}

impl TwoModeState {
    pub fn from_blocks(blocks: Vec<Vec<C64>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(invalid("blocks", "at least the N = 0 block is required"));
        }
        for (n, b) in blocks.iter().enumerate() {
            if b.len() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, got: b.len() });
            }
        }
        Ok(Self { blocks })
    }

    pub fn zeros(n_max: usize) -> Self {
        Self { blocks: (0..=n_max).map(|n| vec![C64::new(0.0, 0.0); n + 1]).collect() }
    }

    /// Builds a state from a function of `(n_a, n_b)`.
    pub fn from_fn(n_max: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            blocks: (0..=n_max).map(|n| (0..=n).map(|k| f(n - k, k)).collect()).collect(),
        }
    }

    pub fn n_max(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn dim(&self) -> usize {
        let n = self.blocks.len();
        n * (n + 1) / 2
    }

    pub fn block(&self, n: usize) -> &[C64] {
        &self.blocks[n]
    }

    pub fn block_mut(&mut self, n: usize) -> &mut [C64] {
        &mut self.blocks[n]
    }

    pub fn blocks(&self) -> &[Vec<C64>] {
        &self.blocks
    }


    /// Amplitude of `|n_a, n_b⟩`, zero beyond the cutoff.
    pub fn amp(&self, n_a: usize, n_b: usize) -> C64 {
        let n = n_a + n_b;
        if n > self.n_max() {
            C64::new(0.0, 0.0)
        } else {
            self.blocks[n][n_b]
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.blocks.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Population of each total-number block.
    pub fn block_weights(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.iter().map(|c| c.norm_sqr()).sum()).collect()
    }

    /// `⟨self|other⟩` over the common truncation.
    pub fn inner(&self, other: &Self) -> C64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(x, y)| x.iter().zip(y))
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    /// `|⟨ψ|φ⟩|² / (⟨ψ|ψ⟩⟨φ|φ⟩)`; insensitive to global phase and to the
    /// norm deficit left by truncation.
    pub fn fidelity(&self, other: &Self) -> f64 {
        let denom = self.norm_sqr() * other.norm_sqr();
        if denom == 0.0 {
            return 0.0;
        }
        self.inner(other).norm_sqr() / denom
    }

    pub fn mean_n_a(&self) -> f64 {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(n, b)| b.iter().enumerate().map(move |(k, c)| (n - k) as f64 * c.norm_sqr()))
            .sum()
    }

    pub fn mean_n_b(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter().enumerate().map(|(k, c)| k as f64 * c.norm_sqr()))
            .sum()
    }
}

/// `|α_a⟩ ⊗ |α_b⟩` truncated at the smallest total number whose Poisson tail
/// is below `tail_tol`. The state is not renormalized.
pub fn coherent_product(pair: &CoherentPair, tail_tol: f64) -> Result<TwoModeState> {
    let n_mean = pair.n_mean();
    let (n_max, _) = poisson_cutoff(n_mean, tail_tol, HARD_CAP)?;
    Ok(product_amplitudes(pair.alpha_a, pair.alpha_b, n_mean, n_max, |_, _| 0.0))
}

/// `e^{−n̄/2} a^{n}/√n! · b^{m}/√m! · e^{−i phase(n, m)}` on blocks up to `n_max`.
pub(crate) fn product_amplitudes(
    a: C64,
    b: C64,
    n_mean: f64,
    n_max: usize,
    phase: impl Fn(usize, usize) -> f64,
) -> TwoModeState {
    let half = -0.5 * n_mean;
    TwoModeState::from_fn(n_max, |na, nb| match (scaled_power(a, na), scaled_power(b, nb)) {
        (Some((la, pa)), Some((lb, pb))) => {
            C64::from_polar((half + la + lb).exp(), pa + pb - phase(na, nb))
        }
        _ => C64::new(0.0, 0.0),
    })
}
