//! Implicit-shift QL iteration for real symmetric tridiagonal matrices.

use crate::error::{Error, Result};

const MAX_ITER: usize = 64;

/// Eigen-decomposition of a symmetric tridiagonal matrix.
///
/// `vectors` is column-major: `vectors[i * n + k]` is component `k` of the
/// eigenvector belonging to `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
}

impl TridiagEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.vectors[i * n..(i + 1) * n]
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors. The first
/// component of each eigenvector that is not negligible is made positive.
pub fn eigh_tridiagonal(diag: &[f64], offdiag: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    assert!(
        n == 0 && offdiag.is_empty() || offdiag.len() + 1 == n,
        "off-diagonal length must be one less than the diagonal"
    );
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(offdiag);
    // z[k * n + i]: row k, column i
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(Error::NoConvergence { index: l, iterations: MAX_ITER });
            }
            // Wilkinson-type shift from the leading 2×2
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let row = k * n;
                    let f = z[row + i + 1];
                    z[row + i + 1] = s * z[row + i] + c * f;
                    z[row + i] = c * z[row + i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &i) in order.iter().enumerate() {
        let out = &mut vectors[col * n..(col + 1) * n];
        for k in 0..n {
            out[k] = z[k * n + i];
        }
        let scale = out.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(first) = out.iter().copied().find(|x| x.abs() > 1e-8 * scale) {
            if first < 0.0 {
                out.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    Ok(TridiagEigen { values, vectors })
}
