//! Generalized coherent states with quadratic (Kerr) phases, the conditions
//! under which the two-mode dynamics produces them, and their decomposition
//! into finitely many coherent states when the Kerr phase is a rational
//! multiple of π.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::analytic::amplitudes_at;
use crate::error::{invalid, Error, Result};
use crate::observables::SingleModeDensity;
use crate::params::{CoherentPair, DerivedParams, ModelParams};
use crate::state::{coherent_amplitudes, poisson_cutoff, poisson_pmf, HARD_CAP};

/// Default tolerance when snapping `U_ab t / π` to a fraction.
pub const DEFAULT_RATIONAL_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_DENOMINATOR: u64 = 64;
/// Largest Poisson tail a cat packet may lose to the Fock cutoff.
pub const PACKET_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// `g_n = e^{−|γ|²/2} γⁿ e^{−i κ n²} / √n!` for `n = 0..=cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct GcsState {
    pub gamma: C64,
    /// Coefficient `κ` of the quadratic phase `e^{−i κ n²}`.
    pub kerr: f64,
    amps: Vec<C64>,
}

impl GcsState {
    pub fn new(gamma: C64, kerr: f64, tail_tol: f64) -> Result<Self> {
        if !kerr.is_finite() {
            return Err(invalid("kerr", "must be finite"));
        }
        let (cutoff, _) = poisson_cutoff(gamma.norm_sqr(), tail_tol, HARD_CAP)?;
        Ok(Self::with_cutoff(gamma, kerr, cutoff))
    }

    pub fn with_cutoff(gamma: C64, kerr: f64, cutoff: usize) -> Self {
        let amps = coherent_amplitudes(gamma, cutoff)
            .into_iter()
            .enumerate()
            .map(|(n, g)| g * C64::from_polar(1.0, -kerr_phase(kerr, n)))
            .collect();
        Self { gamma, kerr, amps }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn mean_number(&self) -> f64 {
        let w = self.norm_sqr();
        self.amps.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()).sum::<f64>() / w
    }

    pub fn number_variance(&self) -> f64 {
        let w = self.norm_sqr();
        let m = self.mean_number();
        self.amps
            .iter()
            .enumerate()
            .map(|(n, a)| (n as f64 - m).powi(2) * a.norm_sqr())
            .sum::<f64>()
            / w
    }

    /// Projector onto the state, renormalized to unit trace.
    pub fn density(&self) -> SingleModeDensity {
        SingleModeDensity::pure(&self.amps)
    }
}

/// `κ n²` reduced modulo 2π before it is used as an angle.
fn kerr_phase(kerr: f64, n: usize) -> f64 {
    let n2 = (n * n) as f64;
    (kerr * n2).rem_euclid(2.0 * PI)
}

/// `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)` for single-mode amplitude tables, over the
/// common range.
pub fn pure_fidelity(a: &[C64], b: &[C64]) -> f64 {
    let ab: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    ab.norm_sqr() / (na * nb)
}

/// Initial amplitude of the partner mode such that `vanishing` has zero
/// coherent amplitude at `t_e`, given the initial amplitude `known` of mode
/// `known_mode`.
///
/// The vanishing condition is one linear relation between the two initial
/// amplitudes; it has no finite solution when the partner's coefficient
/// vanishes (for the partner of the vanishing mode this happens at
/// `λ_1 t_e = kπ`, for the vanishing mode itself at poles of `tan(λ_1 t_e)`
/// with `ω_1 = 0`).
pub fn purification_partner(
    known: C64,
    known_mode: Mode,
    vanishing: Mode,
    d: &DerivedParams,
    p: &ModelParams,
    t_e: f64,
) -> Result<C64> {
    if p.lambda == 0.0 {
        return Err(Error::NoSolution("modes are decoupled (λ = 0)".into()));
    }
    let x = d.lambda_1 * t_e;
    let c = x.cos();
    let s = x.sin() / d.lambda_1;
    let i = C64::new(0.0, 1.0);
    // vanishing amplitude = coeff_a α_a + coeff_b α_b
    let (coeff_a, coeff_b) = match vanishing {
        Mode::A => (c - i * s * d.omega_1, i * s * p.lambda),
        Mode::B => (i * s * p.lambda, c + i * s * d.omega_1),
    };
    let (c_known, c_partner) = match known_mode {
        Mode::A => (coeff_a, coeff_b),
        Mode::B => (coeff_b, coeff_a),
    };
    let scale = c_known.norm().max(c_partner.norm());
    if c_partner.norm() <= 1e-12 * scale {
        return Err(Error::NoSolution(format!(
            "partner coefficient vanishes at λ_1 t_e = {x}"
        )));
    }
    Ok(-c_known * known / c_partner)
}

/// Checks the vanishing condition by propagating the resulting pair.
pub fn purification_residual(
    pair: &CoherentPair,
    vanishing: Mode,
    d: &DerivedParams,
    p: &ModelParams,
    t_e: f64,
) -> f64 {
    let amps = amplitudes_at(pair, d, p, t_e);
    match vanishing {
        Mode::A => amps.alpha_t.norm(),
        Mode::B => amps.beta_t.norm(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurificationKind {
    /// `λ_1 t = (2p + 1) π / 4`, reached from balanced coherent inputs.
    Quarter,
    /// `λ_1 t = k π`, reached with one mode initially empty.
    Full,
}

pub fn purification_times(d: &DerivedParams, kind: PurificationKind, count: usize) -> Result<Vec<f64>> {
    if !(d.lambda_1 > 0.0) {
        return Err(Error::NoSolution("effective Rabi frequency is zero".into()));
    }
    Ok((0..count)
        .map(|j| match kind {
            PurificationKind::Quarter => (2 * j + 1) as f64 * PI / (4.0 * d.lambda_1),
            PurificationKind::Full => (j + 1) as f64 * PI / d.lambda_1,
        })
        .collect())
}

/// The state of mode a at `t_k = kπ/λ_1` after starting from
/// `|√N⟩ ⊗ |0⟩`: mode b is back in vacuum and mode a carries the amplitude
/// `(−1)^k √N e^{−iω_0 t_k}` with Kerr coefficient `U_ab t_k`.
pub fn gcs_from_vacuum_start(
    n_total: f64,
    d: &DerivedParams,
    p: &ModelParams,
    k: u32,
    tail_tol: f64,
) -> Result<GcsState> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    if !(n_total >= 0.0) {
        return Err(invalid("n_total", "must be nonnegative"));
    }
    if !(d.lambda_1 > 0.0) {
        return Err(Error::NoSolution("effective Rabi frequency is zero".into()));
    }
    let t_k = k as f64 * PI / d.lambda_1;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let gamma = C64::from_polar(sign * n_total.sqrt(), -d.omega_0 * t_k);
    GcsState::new(gamma, p.u_ab * t_k, tail_tol)
}

/// Kerr phase `e^{−iπ (r/s) n²}` with `gcd(r, s) = 1`, `s ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalPhase {
    pub r: i64,
    pub s: u64,
}

impl RationalPhase {
    pub fn new(r: i64, s: u64) -> Result<Self> {
        if s == 0 {
            return Err(invalid("s", "denominator must be positive"));
        }
        if gcd(r.unsigned_abs(), s) != 1 {
            return Err(invalid("r/s", format!("{r}/{s} is not reduced")));
        }
        Ok(Self { r, s })
    }

    pub fn value(&self) -> f64 {
        self.r as f64 / self.s as f64
    }

    /// `π (r/s) n²` reduced exactly modulo 2π.
    pub fn phase(&self, n: u64) -> f64 {
        let two_s = 2 * self.s as i128;
        let num = (self.r as i128 * (n as i128) * (n as i128)).rem_euclid(two_s);
        PI * num as f64 / self.s as f64
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The fraction with the smallest denominator in `[lo, hi]`, found by
/// continued-fraction expansion; `None` once denominators pass `max_den`.
fn simplest_in(lo: f64, hi: f64, max_den: u64, depth: u32) -> Option<(i64, u64)> {
    if hi < 0.0 {
        return simplest_in(-hi, -lo, max_den, depth).map(|(r, s)| (-r, s));
    }
    if lo <= 0.0 {
        return Some((0, 1));
    }
    if depth > 64 || !hi.is_finite() {
        return None;
    }
    let fl = lo.floor();
    if fl == lo || fl + 1.0 <= hi {
        return Some((lo.ceil() as i64, 1));
    }
    // both ends share integer part `fl`: expand the fractional parts
    let (q, p) = simplest_in(1.0 / (hi - fl), 1.0 / (lo - fl), max_den, depth + 1)?;
    let (q, p) = (q as u64, p);
    if q > max_den {
        return None;
    }
    Some((fl as i64 * q as i64 + p as i64, q))
}

/// Snaps `κ/π` onto `r/s` with `s ≤ max_denominator` and
/// `|κ/π − r/s| ≤ tol`, preferring the smallest denominator.
pub fn rational_kerr(kerr: f64, tol: f64, max_denominator: u64) -> Option<RationalPhase> {
    if !kerr.is_finite() || !(tol >= 0.0) || max_denominator == 0 {
        return None;
    }
    let x = kerr / PI;
    let (r, s) = simplest_in(x - tol, x + tol, max_denominator, 0)?;
    if s > max_denominator || (x - r as f64 / s as f64).abs() > tol {
        return None;
    }
    let g = gcd(r.unsigned_abs(), s);
    Some(RationalPhase { r: r / g as i64, s: s / g })
}

/// Rational form of the Kerr phase `U_ab t_e`.
pub fn detect_rational_phase(
    u_ab: f64,
    t_e: f64,
    tol: f64,
    max_denominator: u64,
) -> Option<RationalPhase> {
    rational_kerr(u_ab * t_e, tol, max_denominator)
}

/// Period of `n ↦ e^{−iπ(r/s)n²}`: `2s` when `r` and `s` are both odd,
/// `s` otherwise.
pub fn cat_size(rp: &RationalPhase) -> usize {
    let s = rp.s as usize;
    if rp.r.rem_euclid(2) == 1 && s % 2 == 1 {
        2 * s
    } else {
        s
    }
}

/// `a_m = (1/l) Σ_k e^{−iπ(r/s)k² + 2πi mk/l}`, `m = 0..l`.
pub fn cat_coefficients(rp: &RationalPhase) -> Vec<C64> {
    let l = cat_size(rp);
    let kerr: Vec<C64> = (0..l).map(|k| C64::from_polar(1.0, -rp.phase(k as u64))).collect();
    (0..l)
        .map(|m| {
            kerr.iter()
                .enumerate()
                .map(|(k, z)| z * C64::from_polar(1.0, 2.0 * PI * ((m * k) % l) as f64 / l as f64))
                .sum::<C64>()
                / l as f64
        })
        .collect()
}

/// `Σ_m a_m |β e^{−2πi m/l}⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CatDecomposition {
    pub l: usize,
    pub coeffs: Vec<C64>,
    pub beta: C64,
}

impl CatDecomposition {
    pub fn from_phase(rp: &RationalPhase, beta: C64) -> Self {
        Self { l: cat_size(rp), coeffs: cat_coefficients(rp), beta }
    }

    /// Packet amplitudes `β e^{−2πi m/l}`.
    pub fn packets(&self) -> Vec<C64> {
        (0..self.l)
            .map(|m| self.beta * C64::from_polar(1.0, -2.0 * PI * m as f64 / self.l as f64))
            .collect()
    }
}

/// Decomposes a Kerr GCS, if its phase is rational within `tol`.
pub fn decompose(gcs: &GcsState, tol: f64, max_denominator: u64) -> Option<(RationalPhase, CatDecomposition)> {
    let rp = rational_kerr(gcs.kerr, tol, max_denominator)?;
    Some((rp, CatDecomposition::from_phase(&rp, gcs.gamma)))
}

/// Fock amplitudes of the superposition up to `cutoff`.
pub fn cat_reconstruct(dec: &CatDecomposition, cutoff: usize) -> Result<Vec<C64>> {
    if dec.coeffs.len() != dec.l {
        return Err(Error::DimensionMismatch { expected: dec.l, got: dec.coeffs.len() });
    }
    let mean = dec.beta.norm_sqr();
    let kept: f64 = (0..=cutoff).map(|n| poisson_pmf(mean, n)).sum();
    if 1.0 - kept > PACKET_TAIL_TOL {
        return Err(Error::InsufficientCutoff(format!(
            "packets of mean {mean} lose {:.3e} beyond n = {cutoff}",
            1.0 - kept
        )));
    }
    let mut out = vec![C64::new(0.0, 0.0); cutoff + 1];
    for (a, b) in dec.coeffs.iter().zip(dec.packets()) {
        for (o, c) in out.iter_mut().zip(coherent_amplitudes(b, cutoff)) {
            *o += a * c;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_params;

    fn rp(r: i64, s: u64) -> RationalPhase {
        RationalPhase::new(r, s).unwrap()
    }

    #[test]
    fn balanced_partner_special_case() {
        let p = ModelParams::symmetric(0.0, 1.0, 1.3).unwrap();
        let d = derive_params(&p, 10.0).unwrap();
        let t_e = PI / (4.0 * d.lambda_1);
        let aa = C64::new(0.8, -1.1);
        let ab = purification_partner(aa, Mode::A, Mode::A, &d, &p, t_e).unwrap();
        assert!((ab - C64::new(0.0, 1.0) * aa).norm() < 1e-14);
    }

    #[test]
    fn partner_errors() {
        let p = ModelParams::symmetric(0.0, 1.0, 1.0).unwrap();
        let d = derive_params(&p, 10.0).unwrap();
        // sin(λ_1 t) = 0: the other mode cannot cancel mode a
        assert!(purification_partner(C64::new(1.0, 0.0), Mode::A, Mode::A, &d, &p, PI).is_err());
        // tan pole with ω_1 = 0: mode a's own coefficient vanishes
        assert!(purification_partner(C64::new(1.0, 0.0), Mode::B, Mode::A, &d, &p, PI / 2.0).is_err());
        let q = ModelParams::symmetric(0.0, 1.0, 0.0).unwrap();
        let dq = derive_params(&q, 10.0).unwrap();
        assert!(purification_partner(C64::new(1.0, 0.0), Mode::A, Mode::A, &dq, &q, 0.3).is_err());
    }

    #[test]
    fn quarter_and_full_times() {
        let p = ModelParams::symmetric(0.0, 0.0, 1.0).unwrap();
        let d = derive_params(&p, 1.0).unwrap();
        let q = purification_times(&d, PurificationKind::Quarter, 2).unwrap();
        assert!((q[0] - PI / 4.0).abs() < 1e-15 && (q[1] - 3.0 * PI / 4.0).abs() < 1e-15);
        let p = ModelParams::symmetric(0.0, 0.0, PI).unwrap();
        let d = derive_params(&p, 1.0).unwrap();
        let f = purification_times(&d, PurificationKind::Full, 1).unwrap();
        assert!((f[0] - 1.0).abs() < 1e-15);
        let z = derive_params(&ModelParams::symmetric(0.0, 0.0, 0.0).unwrap(), 1.0).unwrap();
        assert!(purification_times(&z, PurificationKind::Full, 1).is_err());
    }

    #[test]
    fn vacuum_start_without_kerr_is_coherent() {
        let p = ModelParams::new(0.3, 0.3, 0.0, 0.0, 0.0, 1.0).unwrap();
        let d = derive_params(&p, 9.0).unwrap();
        let g = gcs_from_vacuum_start(9.0, &d, &p, 1, 1e-12).unwrap();
        let expect = coherent_amplitudes(g.gamma, g.cutoff());
        assert!((pure_fidelity(g.amplitudes(), &expect) - 1.0).abs() < 1e-14);
        assert!((g.gamma.norm() - 3.0).abs() < 1e-14);
        assert!(gcs_from_vacuum_start(9.0, &d, &p, 0, 1e-12).is_err());
    }

    #[test]
    fn detection_examples() {
        assert_eq!(detect_rational_phase(1.0, 2.0 * PI / 3.0, 1e-9, 64), Some(rp(2, 3)));
        assert_eq!(detect_rational_phase(0.5, PI / 4.0, 1e-9, 64), Some(rp(1, 8)));
        assert_eq!(rational_kerr(PI * 0.70000000049, 1e-6, 50), Some(rp(7, 10)));
        assert_eq!(rational_kerr(0.0, 1e-9, 64), Some(rp(0, 1)));
        assert_eq!(rational_kerr(-PI * 2.0 / 3.0, 1e-9, 64), Some(rp(-2, 3)));
        assert_eq!(rational_kerr(PI * 2f64.sqrt(), 1e-12, 64), None);
    }

    #[test]
    fn packet_counts() {
        assert_eq!(cat_size(&rp(1, 1)), 2);
        assert_eq!(cat_size(&rp(2, 3)), 3);
        assert_eq!(cat_size(&rp(1, 8)), 8);
        assert_eq!(cat_size(&rp(2, 9)), 9);
        assert_eq!(cat_size(&rp(2, 5)), 5);
        assert_eq!(cat_size(&rp(0, 1)), 1);
        assert!(RationalPhase::new(2, 4).is_err());
    }

    #[test]
    fn two_packet_coefficients() {
        let a = cat_coefficients(&rp(1, 1));
        assert!(a[0].norm() < 1e-15 && (a[1] - C64::new(1.0, 0.0)).norm() < 1e-15);
        let a = cat_coefficients(&rp(1, 2));
        assert_eq!(a.len(), 2);
        for c in &a {
            assert!((c.norm() - 0.5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn coefficients_invert_to_kerr_phase() {
        for &(r, s) in &[(1, 1), (2, 3), (1, 8), (2, 9), (3, 7), (5, 12)] {
            let phase = rp(r, s);
            let a = cat_coefficients(&phase);
            let l = a.len();
            for k in 0..l {
                let back: C64 = a
                    .iter()
                    .enumerate()
                    .map(|(m, am)| am * C64::from_polar(1.0, -2.0 * PI * (m * k) as f64 / l as f64))
                    .sum();
                assert!((back - C64::from_polar(1.0, -phase.phase(k as u64))).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn negation_cat() {
        let beta = C64::new(1.5, 0.7);
        let dec = CatDecomposition::from_phase(&rp(1, 1), beta);
        let v = cat_reconstruct(&dec, 60).unwrap();
        assert!((pure_fidelity(&v, &coherent_amplitudes(-beta, 60)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_amplitude_cat_is_vacuum() {
        let dec = CatDecomposition::from_phase(&rp(2, 3), C64::new(0.0, 0.0));
        let v = cat_reconstruct(&dec, 4).unwrap();
        let sum: C64 = dec.coeffs.iter().sum();
        assert!((v[0].norm() - sum.norm()).abs() < 1e-15);
        assert!(v[1..].iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn cutoff_check() {
        let dec = CatDecomposition::from_phase(&rp(2, 3), C64::new(5.0, 0.0));
        assert!(matches!(cat_reconstruct(&dec, 30), Err(Error::InsufficientCutoff(_))));
    }
}
