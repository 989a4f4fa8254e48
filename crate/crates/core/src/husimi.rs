//! Husimi Q function on a rectangular grid and a connected-component packet
//! counter.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::observables::SingleModeDensity;
use crate::state::ln_factorial;

/// Largest population tolerated in the top Fock level of a density whose
/// Husimi function is evaluated.
pub const EDGE_POPULATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub resolution: usize,
}

impl GridSpec {
    /// Square window `[−r, r]²`.
    pub fn square(radius: f64, resolution: usize) -> Self {
        Self { re_min: -radius, re_max: radius, im_min: -radius, im_max: radius, resolution }
    }

    fn validate(&self) -> Result<()> {
        let ends = [self.re_min, self.re_max, self.im_min, self.im_max];
        if ends.iter().any(|x| !x.is_finite()) {
            return Err(invalid("grid", "window must be finite"));
        }
        if !(self.re_max > self.re_min && self.im_max > self.im_min) {
            return Err(invalid("grid", "window must have positive extent"));
        }
        if self.resolution < 2 {
            return Err(invalid("resolution", "need at least 2 points per axis"));
        }
        Ok(())
    }

    pub fn re_step(&self) -> f64 {
        (self.re_max - self.re_min) / (self.resolution - 1) as f64
    }

    pub fn im_step(&self) -> f64 {
        (self.im_max - self.im_min) / (self.resolution - 1) as f64
    }

    pub fn point(&self, i_re: usize, i_im: usize) -> C64 {
        C64::new(
            self.re_min + i_re as f64 * self.re_step(),
            self.im_min + i_im as f64 * self.im_step(),
        )
    }
}

/// `Q(γ)` sampled on the grid; `values[i_im * resolution + i_re]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl HusimiGrid {
    pub fn get(&self, i_re: usize, i_im: usize) -> f64 {
        self.values[i_im * self.spec.resolution + i_re]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &q| m.max(q))
    }

    pub fn argmax(&self) -> C64 {
        let (idx, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bq), (i, &q)| if q > bq { (i, q) } else { (bi, bq) });
        let r = self.spec.resolution;
        self.spec.point(idx % r, idx / r)
    }

    /// Riemann sum of `Q` over the window.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.re_step() * self.spec.im_step()
    }

    /// `(re, im, q)` in row order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let r = self.spec.resolution;
        (0..r).flat_map(move |j| {
            (0..r).map(move |i| {
                let g = self.spec.point(i, j);
                (g.re, g.im, self.get(i, j))
            })
        })
    }
}

/// `⟨n|γ⟩ = e^{−|γ|²/2} γⁿ / √n!`, moduli from logarithms so that large
/// `|γ|` and `n` neither overflow nor underflow prematurely.
fn coherent_overlaps(gamma: C64, dim: usize, buf: &mut Vec<C64>) {
    buf.clear();
    let r = gamma.norm();
    let half = -0.5 * r * r;
    if r == 0.0 {
        buf.push(C64::new(1.0, 0.0));
        buf.resize(dim, C64::new(0.0, 0.0));
        return;
    }
    let (ln_r, step) = (r.ln(), C64::from_polar(1.0, gamma.arg()));
    let mut phase = C64::new(1.0, 0.0);
    for n in 0..dim {
        let m = (half + n as f64 * ln_r - 0.5 * ln_factorial(n)).exp();
        buf.push(phase * m);
        phase *= step;
    }
}

pub fn husimi(rho: &SingleModeDensity, spec: &GridSpec) -> Result<HusimiGrid> {
    spec.validate()?;
    let top = rho.get(rho.cutoff(), rho.cutoff()).re / rho.trace();
    if rho.cutoff() > 0 && top > EDGE_POPULATION_TOL {
        return Err(Error::InsufficientCutoff(format!(
            "population {top:.3e} in the top Fock level {}",
            rho.cutoff()
        )));
    }
    let r = spec.resolution;
    let values: Vec<f64> = (0..r)
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut buf = Vec::with_capacity(rho.dim());
            (0..r)
                .map(move |i| {
                    coherent_overlaps(spec.point(i, j), rho.dim(), &mut buf);
                    (rho.expectation(&buf) / PI).max(0.0)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(HusimiGrid { spec: *spec, values })
}

/// Connected components (4-neighbour) of `{Q ≥ rel_threshold · max Q}`.
pub fn count_packets(grid: &HusimiGrid, rel_threshold: f64) -> Result<usize> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(invalid("rel_threshold", "must lie in (0, 1)"));
    }
    let level = rel_threshold * grid.max();
    if !(level > 0.0) {
        return Err(Error::EmptySuperlevel(rel_threshold));
    }
    let r = grid.spec.resolution;
    let above: Vec<bool> = grid.values.iter().map(|&q| q >= level).collect();
    let mut seen = vec![false; above.len()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..above.len() {
        if !above[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let (i, j) = (idx % r, idx / r);
            let mut visit = |ni: usize, nj: usize| {
                let k = nj * r + ni;
                if above[k] && !seen[k] {
                    seen[k] = true;
                    queue.push_back(k);
                }
            };
            if i > 0 {
                visit(i - 1, j);
            }
            if i + 1 < r {
                visit(i + 1, j);
            }
            if j > 0 {
                visit(i, j - 1);
            }
            if j + 1 < r {
                visit(i, j + 1);
            }
        }
    }
    Ok(count)
}
