//! Coupling constants of the two-mode Hamiltonian and the quantities derived
//! from them.
//!
//! All rates are angular frequencies in rad/s with ħ = 1, so the Hamiltonian
//! reads
//!
//! ```text
//! H = ω_a n_a + U_aa n_a(n_a − 1) + ω_b n_b + U_bb n_b(n_b − 1)
//!     + 2 U_ab n_a n_b − λ (a†b + a b†)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Result};

/// Relative tolerance on `U_aa + U_bb − 2 U_ab` for the closed form to apply.
pub const ANALYTIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub u_aa: f64,
    pub u_bb: f64,
    pub u_ab: f64,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(
        omega_a: f64,
        omega_b: f64,
        u_aa: f64,
        u_bb: f64,
        u_ab: f64,
        lambda: f64,
    ) -> Result<Self> {
        let p = Self { omega_a, omega_b, u_aa, u_bb, u_ab, lambda };
        p.validate()?;
        Ok(p)
    }

    /// Equal frequencies `ω` and a single collision strength `u` for all three
    /// scattering channels.
    pub fn symmetric(omega: f64, u: f64, lambda: f64) -> Result<Self> {
        Self::new(omega, omega, u, u, u, lambda)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
            ("u_aa", self.u_aa),
            ("u_bb", self.u_bb),
            ("u_ab", self.u_ab),
            ("lambda", self.lambda),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.lambda < 0.0 {
            return Err(invalid("lambda", "must be nonnegative"));
        }
        Ok(())
    }

    /// True when `U_aa + U_bb = 2 U_ab`, the condition under which the
    /// closed-form propagator holds.
    pub fn analytic_valid(&self) -> bool {
        let scale = self.u_aa.abs().max(self.u_bb.abs()).max(self.u_ab.abs()).max(1.0);
        (self.u_aa + self.u_bb - 2.0 * self.u_ab).abs() <= ANALYTIC_TOL * scale
    }

    /// `U_aa = U_bb = U_ab` to the same relative tolerance.
    pub fn equal_scattering(&self) -> bool {
        let scale = self.u_aa.abs().max(self.u_bb.abs()).max(self.u_ab.abs()).max(1.0);
        (self.u_aa - self.u_ab).abs() <= ANALYTIC_TOL * scale
            && (self.u_bb - self.u_ab).abs() <= ANALYTIC_TOL * scale
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            omega_a: c * self.omega_a,
            omega_b: c * self.omega_b,
            u_aa: c * self.u_aa,
            u_bb: c * self.u_bb,
            u_ab: c * self.u_ab,
            lambda: c * self.lambda,
        }
    }

    pub(crate) fn key(&self) -> [u64; 6] {
        [
            self.omega_a.to_bits(),
            self.omega_b.to_bits(),
            self.u_aa.to_bits(),
            self.u_bb.to_bits(),
            self.u_ab.to_bits(),
            self.lambda.to_bits(),
        ]
    }
}

/// Frequencies of the rotated Hamiltonian at a given mean total number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub omega_0: f64,
    pub omega_1: f64,
    /// Effective Rabi frequency `sqrt(λ² + ω_1²)`.
    pub lambda_1: f64,
    pub n_mean: f64,
}

pub fn derive_params(p: &ModelParams, n_mean: f64) -> Result<DerivedParams> {
    if !(n_mean >= 0.0) || !n_mean.is_finite() {
        return Err(invalid("n_mean", format!("must be finite and nonnegative, got {n_mean}")));
    }
    let omega_0 = 0.5 * (p.omega_a + p.omega_b - 2.0 * p.u_ab);
    let omega_1 = 0.5 * (p.omega_a - p.omega_b + (p.u_aa - p.u_bb) * (n_mean - 1.0));
    let lambda_1 = p.lambda.hypot(omega_1);
    Ok(DerivedParams { omega_0, omega_1, lambda_1, n_mean })
}

/// `ω_1` evaluated with an integer total number, as it appears inside a
/// fixed-N block of the Hamiltonian.
pub fn omega_1_block(p: &ModelParams, n_total: usize) -> f64 {
    0.5 * (p.omega_a - p.omega_b + (p.u_aa - p.u_bb) * (n_total as f64 - 1.0))
}

/// Initial product of coherent states `|α_a⟩ ⊗ |α_b⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentPair {
    pub alpha_a: C64,
    pub alpha_b: C64,
}

impl CoherentPair {
    pub fn new(alpha_a: C64, alpha_b: C64) -> Result<Self> {
        for (name, z) in [("alpha_a", alpha_a), ("alpha_b", alpha_b)] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(Self { alpha_a: canonical(alpha_a), alpha_b: canonical(alpha_b) })
    }

    pub fn from_polar(abs_a: f64, arg_a: f64, abs_b: f64, arg_b: f64) -> Result<Self> {
        if abs_a < 0.0 || abs_b < 0.0 {
            return Err(invalid("amplitude", "moduli must be nonnegative"));
        }
        Self::new(
            C64::from_polar(abs_a, wrap_phase(arg_a)),
            C64::from_polar(abs_b, wrap_phase(arg_b)),
        )
    }

    /// `|α_a| = |α_b| = sqrt(n/2)` with relative phase `φ_a − φ_b = delta_phi`
    /// and `φ_b = 0`.
    pub fn balanced(n_total: f64, delta_phi: f64) -> Result<Self> {
        if !(n_total >= 0.0) {
            return Err(invalid("n_total", "must be nonnegative"));
        }
        let r = (0.5 * n_total).sqrt();
        Self::from_polar(r, delta_phi, r, 0.0)
    }

    pub fn n_mean(&self) -> f64 {
        self.alpha_a.norm_sqr() + self.alpha_b.norm_sqr()
    }
}

/// Map an angle onto `(−π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let mut x = theta.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

// `arg` of a value with a negative-zero imaginary part is −π, not π.
fn canonical(z: C64) -> C64 {
    C64::new(z.re + 0.0, z.im + 0.0)
}

/// Order-of-magnitude estimate `π/λ_1` of the purification time for two
/// identical, unit-normalized Gaussian modes driven at Rabi frequency Ω.
///
/// Identical overlapping modes make the Josephson overlap integral unity, so
/// `λ = Ω/2`, and equal trap frequencies give `ω_1 = 0`. The trap frequency
/// and mass only fix the mode width, which drops out.
pub fn estimate_formation_time(omega: f64, mass: f64, rabi_frequency: f64) -> Result<f64> {
    for (name, v) in [("omega", omega), ("mass", mass), ("rabi_frequency", rabi_frequency)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(name, format!("must be positive, got {v}")));
        }
    }
    let lambda_1 = 0.5 * rabi_frequency;
    Ok(PI / lambda_1)
}
