//! Riccati particular solutions for two double-well constructions: the shifted
//! quartic seed F(x) = (x-c)^2 - 1 and the shifted Razavy n=2 seed.
//!
//! A seed fixes the partner pair through the Riccati equations
//!
//! ```text
//!   -F' + F^2 = V1 - eps_f        F' + F^2 = V2 - eps_f
//! ```
//!
//! together with the weight mu(x) whose running integral parametrizes the
//! one-parameter family built in [`crate::family`]. All weight evaluations go
//! through `log_weight` so callers can work in log space; the quartic weight is
//! normalized to 1 at x = 0, while the Razavy weight is the unnormalized
//! squared ground state (the two conventions differ by a constant factor that
//! cancels everywhere a ratio is formed).

use thiserror::Error;

/// Largest `log_weight` the bundled evaluator accepts; beyond this the direct
/// formulas for family members leave f64 range and callers must switch to the
/// asymptotic zero-mode branch (see `family::zero_mode`).
pub const LOG_WEIGHT_CAP: f64 = 300.0;

#[derive(Debug, Error)]
pub enum SeedError {
    #[error("unsupported Razavy configuration (xi={xi}, beta={beta}, n={n}); only (1, 1, 2) is implemented")]
    Unsupported { xi: f64, beta: f64, n: u32 },
    #[error("weight overflow at x = {x}: log_weight = {log_weight:.3} exceeds cap {LOG_WEIGHT_CAP}")]
    Overflow { x: f64, log_weight: f64 },
    #[error("shift must be finite, got {0}")]
    NonFiniteShift(f64),
}

/// A Riccati particular solution together with its derived analytic quantities.
///
/// All methods are pure; implementations are immutable value objects.
pub trait RiccatiSeed: Send + Sync {
    /// The shift parameter c.
    fn shift(&self) -> f64;
    /// F(x).
    fn f(&self, x: f64) -> f64;
    /// F'(x).
    fn f_prime(&self, x: f64) -> f64;
    /// Closed-form integral of F from 0 to x.
    fn int_f(&self, x: f64) -> f64;
    /// Left partner potential V1(x).
    fn v1(&self, x: f64) -> f64;
    /// Right partner potential V2(x) = V1(x) + 2 F'(x).
    fn v2(&self, x: f64) -> f64;
    /// ln of the weight mu(x) that drives the running integral gamma(x).
    fn log_weight(&self, x: f64) -> f64;
    /// Energy at which the Riccati factorization holds.
    fn factorization_energy(&self) -> f64;
    /// Working domain covering every feature of this seed's family.
    fn default_domain(&self) -> (f64, f64);
    /// Stable identifier used in CLI output and file names.
    fn name(&self) -> &'static str;

    /// mu(x) in linear space; overflows for `log_weight(x) > ~709`.
    fn weight(&self, x: f64) -> f64 {
        self.log_weight(x).exp()
    }
}

/// Quartic seed F(x) = (x-c)^2 - 1 with factorization energy 0.
#[derive(Debug, Clone, Copy)]
pub struct QuarticSeed {
    c: f64,
}

pub fn quartic_seed(c: f64) -> Result<QuarticSeed, SeedError> {
    if !c.is_finite() {
        return Err(SeedError::NonFiniteShift(c));
    }
    Ok(QuarticSeed { c })
}

impl RiccatiSeed for QuarticSeed {
    fn shift(&self) -> f64 {
        self.c
    }

    fn f(&self, x: f64) -> f64 {
        let y = x - self.c;
        y * y - 1.0
    }

    fn f_prime(&self, x: f64) -> f64 {
        2.0 * (x - self.c)
    }

    fn int_f(&self, x: f64) -> f64 {
        let c = self.c;
        x * x * x / 3.0 - c * x * x + (c * c - 1.0) * x
    }

    fn v1(&self, x: f64) -> f64 {
        let y = x - self.c;
        let q = y * y - 1.0;
        q * q - 2.0 * y
    }

    fn v2(&self, x: f64) -> f64 {
        let y = x - self.c;
        let q = y * y - 1.0;
        q * q + 2.0 * y
    }

    fn log_weight(&self, x: f64) -> f64 {
        -2.0 * self.int_f(x)
    }

    fn factorization_energy(&self) -> f64 {
        0.0
    }

    fn default_domain(&self) -> (f64, f64) {
        (self.c - 3.5, self.c + 8.0)
    }

    fn name(&self) -> &'static str {
        "quartic"
    }
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Razavy seed for the n = 2, xi = 1, beta = 1 hyperbolic double well, with
/// factorization energy eps_R = -2(1 + sqrt 2).
///
/// The weight is the unnormalized squared ground state psi0^2, with
/// psi0(x) = exp(-cosh 2(x-c)/4) (1 + (1+sqrt 2) cosh 2(x-c)).
#[derive(Debug, Clone, Copy)]
pub struct RazavySeed {
    c: f64,
    xi: f64,
    beta: f64,
    n: u32,
}

/// eps_R = -2(1 + sqrt 2), the known ground level of the n=2 Razavy well.
pub const RAZAVY_EPSILON: f64 = -2.0 * (1.0 + SQRT2);

pub fn razavy_seed(c: f64) -> Result<RazavySeed, SeedError> {
    razavy_seed_with(c, 1.0, 1.0, 2)
}

/// Typed constructor for the Razavy family; only the validated (xi, beta, n) =
/// (1, 1, 2) member is accepted, because the closed-form ground state used for
/// the weight is specific to that member.
pub fn razavy_seed_with(c: f64, xi: f64, beta: f64, n: u32) -> Result<RazavySeed, SeedError> {
    if !c.is_finite() {
        return Err(SeedError::NonFiniteShift(c));
    }
    if xi != 1.0 || beta != 1.0 || n != 2 {
        return Err(SeedError::Unsupported { xi, beta, n });
    }
    Ok(RazavySeed { c, xi, beta, n })
}

impl RazavySeed {
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Unnormalized ground state of v1.
    pub fn psi0(&self, x: f64) -> f64 {
        self.log_psi0(x).exp()
    }

    /// ln psi0, safe against overflow of the cosh factor's exponent.
    pub fn log_psi0(&self, x: f64) -> f64 {
        let ch = (2.0 * (x - self.c)).cosh();
        -ch / 4.0 + (1.0 + (1.0 + SQRT2) * ch).ln()
    }
}

impl RiccatiSeed for RazavySeed {
    fn shift(&self) -> f64 {
        self.c
    }

    fn f(&self, x: f64) -> f64 {
        let y = 2.0 * (x - self.c);
        let (sh, ch) = (y.sinh(), y.cosh());
        0.5 * sh - 2.0 * RAZAVY_EPSILON * sh / (RAZAVY_EPSILON * ch - 2.0)
    }

    fn f_prime(&self, x: f64) -> f64 {
        let y = 2.0 * (x - self.c);
        let ch = y.cosh();
        let d = RAZAVY_EPSILON * ch - 2.0;
        ch - 4.0 * RAZAVY_EPSILON * (RAZAVY_EPSILON - 2.0 * ch) / (d * d)
    }

    fn int_f(&self, x: f64) -> f64 {
        // Antiderivative of F: G(y) = (cosh 2y - 1)/4 - ln(2 - eps cosh 2y) + ln(2 - eps),
        // normalized so G(0) = 0; the argument of the log stays positive because eps < 0.
        let g = |y: f64| {
            let ch = (2.0 * y).cosh();
            (ch - 1.0) / 4.0 - (2.0 - RAZAVY_EPSILON * ch).ln() + (2.0 - RAZAVY_EPSILON).ln()
        };
        g(x - self.c) - g(-self.c)
    }

    fn v1(&self, x: f64) -> f64 {
        let y = x - self.c;
        (4.0 * y).cosh() / 8.0 - 3.0 * (2.0 * y).cosh() - 0.125
    }

    fn v2(&self, x: f64) -> f64 {
        self.v1(x) + 2.0 * self.f_prime(x)
    }

    fn log_weight(&self, x: f64) -> f64 {
        2.0 * self.log_psi0(x)
    }

    fn factorization_energy(&self) -> f64 {
        RAZAVY_EPSILON
    }

    fn default_domain(&self) -> (f64, f64) {
        (self.c - 4.5, self.c + 4.5)
    }

    fn name(&self) -> &'static str {
        "razavy"
    }
}

/// One-call evaluation of the five analytic quantities most callers need.
#[derive(Debug, Clone, Copy)]
pub struct SeedBundle {
    pub f: f64,
    pub f_prime: f64,
    pub v1: f64,
    pub v2: f64,
    pub log_weight: f64,
}

pub fn eval_bundle(seed: &dyn RiccatiSeed, x: f64) -> Result<SeedBundle, SeedError> {
    let log_weight = seed.log_weight(x);
    if log_weight > LOG_WEIGHT_CAP {
        return Err(SeedError::Overflow { x, log_weight });
    }
    Ok(SeedBundle {
        f: seed.f(x),
        f_prime: seed.f_prime(x),
        v1: seed.v1(x),
        v2: seed.v2(x),
        log_weight,
    })
}
