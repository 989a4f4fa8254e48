//! Independent reference implementations used only by the tests.
#![allow(dead_code)]

use twomode::{C64, ModelParams};

pub type Dense = Vec<Vec<C64>>;

/// Cyclic Jacobi rotations on a dense real symmetric matrix; eigenvalues
/// ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v
}

pub fn identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

pub fn matvec(a: &Dense, v: &[C64]) -> Vec<C64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(a: &Dense) -> Dense {
    let n = a.len();
    let norm = a.iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let x: Dense = a.iter().map(|r| r.iter().map(|z| z * scale).collect()).collect();
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..40 {
        term = matmul(&term, &x);
        for r in term.iter_mut() {
            for z in r.iter_mut() {
                *z /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Annihilation operator on `0..=cutoff`.
pub fn annihilation(cutoff: usize) -> Vec<Vec<f64>> {
    let d = cutoff + 1;
    let mut a = vec![vec![0.0; d]; d];
    for n in 1..d {
        a[n - 1][n] = (n as f64).sqrt();
    }
    a
}

/// The Hamiltonian on the product space `{0..=c} ⊗ {0..=c}`, built from
/// ladder-operator matrices; index `n_a * (c + 1) + n_b`.
pub fn product_space_hamiltonian(p: &ModelParams, c: usize) -> Vec<Vec<f64>> {
    let d = c + 1;
    let a = annihilation(c);
    let mut h = vec![vec![0.0; d * d]; d * d];
    for na in 0..d {
        for nb in 0..d {
            let i = na * d + nb;
            let (x, y) = (na as f64, nb as f64);
            h[i][i] = p.omega_a * x + p.u_aa * x * (x - 1.0) + p.omega_b * y + p.u_bb * y * (y - 1.0) + 2.0 * p.u_ab * x * y;
            // −λ (a† b + a b†)
            for ma in 0..d {
                for mb in 0..d {
                    let j = ma * d + mb;
                    let adag_b = a[ma][na] * a[nb][mb];
                    let a_bdag = a[na][ma] * a[mb][nb];
                    h[i][j] -= p.lambda * (adag_b + a_bdag);
                }
            }
        }
    }
    h
}

/// Dense block `N` by restricting the product-space operator.
pub fn block_from_operators(p: &ModelParams, n: usize) -> Vec<Vec<f64>> {
    let c = n;
    let d = c + 1;
    let h = product_space_hamiltonian(p, c);
    let idx = |k: usize| (n - k) * d + k;
    (0..=n).map(|k| (0..=n).map(|l| h[idx(k)][idx(l)]).collect()).collect()
}

/// `e^{−iHt} v` with a real symmetric `H` via the exponential oracle.
pub fn propagate_dense(h: &[Vec<f64>], v: &[C64], t: f64) -> Vec<C64> {
    let m: Dense = h.iter().map(|r| r.iter().map(|x| C64::new(0.0, -t * x)).collect()).collect();
    matvec(&expm(&m), v)
}

/// Smallest `n` with `1 − Σ_{k ≤ n} P(k) < tol`, summing the pmf directly
/// by recurrence.
pub fn brute_poisson_cutoff(mean: f64, tol: f64) -> usize {
    // accumulate in descending order from far out for the tail
    let far = (mean + 40.0 * mean.sqrt() + 200.0) as usize;
    let mut pmf = vec![0.0f64; far + 1];
    // log recurrence avoids underflow of e^{−μ}
    let mut lp = -mean;
    for (k, p) in pmf.iter_mut().enumerate() {
        if k > 0 {
            lp += mean.ln() - (k as f64).ln();
        }
        *p = lp.exp();
    }
    let mut tail = 0.0;
    let mut tails = vec![0.0; far + 2];
    for k in (0..=far).rev() {
        tail += pmf[k];
        tails[k] = tail;
    }
    (0..=far).find(|&n| tails[n + 1] < tol).unwrap()
}

/// Smallest-denominator `r/s`, `s ≤ max_den`, within `tol` of `x`, by
/// scanning every denominator.
pub fn exhaustive_rational(x: f64, tol: f64, max_den: u64) -> Option<(i64, u64)> {
    for s in 1..=max_den {
        let lo = ((x - tol) * s as f64).ceil() as i64;
        let hi = ((x + tol) * s as f64).floor() as i64;
        if lo > hi {
            continue;
        }
        // the candidate closest to x among those inside the window
        let best = (lo..=hi)
            .min_by(|a, b| {
                let da = (x - *a as f64 / s as f64).abs();
                let db = (x - *b as f64 / s as f64).abs();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        if (x - best as f64 / s as f64).abs() <= tol {
            return Some((best, s));
        }
    }
    None
}

/// Smallest `l` with `r k² ≡ r (k + l)² (mod 2s)` for all `k`, found by
/// checking candidates in increasing order.
pub fn brute_period(r: i64, s: u64) -> usize {
    let m = 2 * s as i64;
    let f = |k: i64| (r * k * k).rem_euclid(m);
    (1..=4 * s as usize)
        .find(|&l| (0..(2 * m) as usize + 4).all(|k| f(k as i64) == f((k + l) as i64)))
        .unwrap()
}
