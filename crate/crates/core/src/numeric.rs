//! Exact propagation by diagonalizing each fixed-total-number block.

use std::sync::Arc;

use dashmap::DashMap;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::Result;
use crate::params::ModelParams;
use crate::state::TwoModeState;
use crate::tridiag::{eigh_tridiagonal, TridiagEigen};

/// The Hamiltonian restricted to total number `n`, in the basis
/// `|n − k, k⟩`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockHamiltonian {
    pub n: usize,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl BlockHamiltonian {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn max_abs(&self) -> f64 {
        self.diag.iter().chain(&self.offdiag).fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// `H c` for a complex block vector.
    pub fn apply(&self, c: &[C64]) -> Vec<C64> {
        let d = self.dim();
        (0..d)
            .map(|k| {
                let mut acc = c[k] * self.diag[k];
                if k > 0 {
                    acc += c[k - 1] * self.offdiag[k - 1];
                }
                if k + 1 < d {
                    acc += c[k + 1] * self.offdiag[k];
                }
                acc
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut m = vec![vec![0.0; d]; d];
        for k in 0..d {
            m[k][k] = self.diag[k];
            if k + 1 < d {
                m[k][k + 1] = self.offdiag[k];
                m[k + 1][k] = self.offdiag[k];
            }
        }
        m
    }
}

/// Hopping matrix element `sqrt((n − k)(k + 1))` between `k` and `k + 1`.
pub(crate) fn hop(n: usize, k: usize) -> f64 {
    (((n - k) * (k + 1)) as f64).sqrt()
}

pub fn build_block(p: &ModelParams, n: usize) -> BlockHamiltonian {
    let diag = (0..=n)
        .map(|k| {
            let na = (n - k) as f64;
            let nb = k as f64;
            p.omega_a * na
                + p.omega_b * nb
                + p.u_aa * na * (na - 1.0)
                + p.u_bb * nb * (nb - 1.0)
                + 2.0 * p.u_ab * na * nb
        })
        .collect();
    let offdiag = (0..n).map(|k| -p.lambda * hop(n, k)).collect();
    BlockHamiltonian { n, diag, offdiag }
}

/// Ascending eigenvalues and orthonormal eigenvectors of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpectrum(pub TridiagEigen);

impl BlockSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.0.values
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        self.0.vector(i)
    }

    /// `V e^{−iEt} Vᵀ c`.
    pub fn propagate(&self, c: &[C64], t: f64) -> Vec<C64> {
        let d = c.len();
        let mut out = vec![C64::new(0.0, 0.0); d];
        for (i, &e) in self.values().iter().enumerate() {
            let v = self.vector(i);
            let proj: C64 = v.iter().zip(c).map(|(vk, ck)| ck * *vk).sum();
            let w = proj * C64::from_polar(1.0, -e * t);
            for (o, vk) in out.iter_mut().zip(v) {
                *o += w * *vk;
            }
        }
        out
    }
}

pub fn diagonalize_block(h: &BlockHamiltonian) -> Result<BlockSpectrum> {
    eigh_tridiagonal(&h.diag, &h.offdiag).map(BlockSpectrum)
}

/// Block spectra keyed by the exact coupling values and the block index.
/// Entries are never mutated once inserted.
#[derive(Debug, Default)]
pub struct SpectrumCache {
    entries: DashMap<([u64; 6], usize), Arc<BlockSpectrum>>,
}

impl SpectrumCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, p: &ModelParams, n: usize) -> Result<Arc<BlockSpectrum>> {
        let key = (p.key(), n);
        if let Some(s) = self.entries.get(&key) {
            return Ok(Arc::clone(&s));
        }
        let spec = Arc::new(diagonalize_block(&build_block(p, n))?);
        Ok(Arc::clone(&self.entries.entry(key).or_insert(spec)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Propagates every block of `state` over time `t` (negative `t` runs the
/// dynamics backwards).
pub fn evolve(
    state: &TwoModeState,
    p: &ModelParams,
    t: f64,
    cache: &SpectrumCache,
) -> Result<TwoModeState> {
    let blocks = state
        .blocks()
        .par_iter()
        .enumerate()
        .map(|(n, c)| {
            if c.iter().all(|x| *x == C64::new(0.0, 0.0)) {
                return Ok(c.clone());
            }
            Ok(cache.get(p, n)?.propagate(c, t))
        })
        .collect::<Result<Vec<_>>>()?;
    TwoModeState::from_blocks(blocks)
}

/// `⟨ψ|H|ψ⟩`.
pub fn energy(state: &TwoModeState, p: &ModelParams) -> f64 {
    state
        .blocks()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let hc = build_block(p, n).apply(c);
            c.iter().zip(&hc).map(|(x, y)| (x.conj() * y).re).sum::<f64>()
        })
        .sum()
}
