//! The one-parameter isospectral family built from a Riccati seed: the running
//! integral gamma(x), regularity thresholds, the general Riccati solution
//! Phi_g, the family member V_1gamma, its Darboux deformation, and zero modes.
//!
//! With mu the seed weight and gamma(x) = -integral of mu from 0 to x, the
//! family is
//!
//! ```text
//!   Phi_g(x)    = F(x) + mu(x) / (gamma - gamma(x))
//!   V_1g(x)     = V1(x) + 2 (Phi_g^2 - F^2)
//!   Psi_0g(x)   = sqrt(mu(x)) / (gamma - gamma(x))
//! ```
//!
//! A parameter value is regular when the horizontal line at `gamma` never
//! meets the graph of gamma(x); only regular members are pole-free.

use crate::grid::{self, GridError, QuadSettings, SampledFunction};
use crate::seeds::{eval_bundle, RiccatiSeed, SeedError, LOG_WEIGHT_CAP};
use thiserror::Error;

/// Weight below exp(-40) at a domain edge counts as fully decayed: the tail
/// beyond contributes less than ~1e-18 to any integral used here.
const PLATEAU_LOG_THRESHOLD: f64 = -40.0;

/// |Psi| below this is clamped to exactly 0 to keep out denormals.
const ZM_CLAMP: f64 = 1e-300;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("gamma = {gamma} is singular: it lies within [{inf:.6}, {sup:.6}], the range swept by gamma(x)")]
    SingularGamma { gamma: f64, inf: f64, sup: f64 },
    #[error("weight overflow at x = {x}: log_weight = {log_weight:.1} exceeds the cap {LOG_WEIGHT_CAP}")]
    Overflow { x: f64, log_weight: f64 },
    #[error("normalization sqrt(gamma(gamma+1)) is undefined for gamma = {gamma} in (-1, 0)")]
    NormUndefined { gamma: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

/// Normalization convention for zero modes.
///
/// `L2` rescales to unit L2 norm over the working domain and is the default
/// for new analyses. `Paper` multiplies the raw zero mode by
/// sqrt(gamma (gamma+1) / |Gamma|), where |Gamma| integrates the weight from
/// `lower_limit` to +infinity for seeds whose weight blows up to the left
/// (quartic), or over the whole line for two-sided decaying weights (Razavy).
/// It reproduces historically published probability pairs that sum slightly
/// above 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormMode {
    L2,
    Paper { lower_limit: Option<f64> },
}

impl NormMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormMode::L2 => "l2",
            NormMode::Paper { .. } => "paper",
        }
    }
}

/// Default paper-mode lower integration limit, relative to the shift.
pub const DEFAULT_PAPER_LOWER_LIMIT_OFFSET: f64 = -2.425;

/// The set of regular parameter values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularSet {
    /// Regular iff gamma < threshold (weight integral unbounded on the left,
    /// as for the quartic seed on the real line).
    Below { threshold: f64 },
    /// Regular iff gamma < lower or gamma > upper (two-sided plateaus).
    Outside { lower: f64, upper: f64 },
}

impl RegularSet {
    pub fn contains(&self, gamma: f64) -> bool {
        match *self {
            RegularSet::Below { threshold } => gamma < threshold,
            RegularSet::Outside { lower, upper } => gamma < lower || gamma > upper,
        }
    }

    /// The negative-side threshold gamma_s.
    pub fn gamma_s(&self) -> f64 {
        match *self {
            RegularSet::Below { threshold } => threshold,
            RegularSet::Outside { lower, .. } => lower,
        }
    }
}

/// Sampled zero mode together with the normalization actually applied.
#[derive(Debug, Clone)]
pub struct ZeroModeProfile {
    pub gamma: f64,
    pub norm_mode: NormMode,
    /// Multiplier applied to the raw sqrt(mu)/(gamma - gamma(x)).
    pub norm_constant: f64,
    pub samples: SampledFunction,
    pub regular: bool,
}

/// Immutable context for one seed on one working domain: the tabulated
/// gamma(x), its range, and the quadrature settings all member evaluations
/// share.
pub struct FamilyContext {
    seed: Box<dyn RiccatiSeed>,
    domain: (f64, f64),
    gamma_of_x: SampledFunction,
    /// (inf, sup) of gamma(x), extended by analytic tail estimates on sides
    /// where the weight has decayed at the domain edge.
    gamma_range: (f64, f64),
    quad: QuadSettings,
    node_weights: Vec<f64>,
    left_plateau: Option<f64>,
    right_plateau: Option<f64>,
}

/// First-order estimate of the weight integral beyond an edge where the weight
/// decays like exp(-2|F| * distance).
fn tail_estimate(weight_edge: f64, f_edge: f64) -> f64 {
    if f_edge.abs() < 1e-9 {
        0.0
    } else {
        weight_edge / (2.0 * f_edge.abs())
    }
}

/// Grid of `n_nodes` points on [a, b] that always contains x = 0 as an exact
/// node, so the base point of gamma(x) carries no quadrature error.
fn grid_through_origin(a: f64, b: f64, n_nodes: usize) -> Vec<f64> {
    let n_int = n_nodes - 1;
    let frac = -a / (b - a);
    let n_left = ((frac * n_int as f64).round() as usize).clamp(1, n_int - 1);
    let n_right = n_int - n_left;
    let mut xs = Vec::with_capacity(n_nodes);
    for i in 0..n_left {
        xs.push(a * (1.0 - i as f64 / n_left as f64));
    }
    xs.push(0.0);
    for j in 1..n_right {
        xs.push(b * j as f64 / n_right as f64);
    }
    xs.push(b);
    xs
}

pub fn build_context(
    seed: Box<dyn RiccatiSeed>,
    domain: (f64, f64),
    quad: QuadSettings,
    n_nodes: usize,
) -> Result<FamilyContext, FamilyError> {
    let (a, b) = domain;
    if !(a < 0.0 && 0.0 < b) {
        return Err(FamilyError::InvalidInput(format!(
            "domain must straddle the base point 0, got [{a}, {b}]"
        )));
    }
    if n_nodes < 201 {
        return Err(FamilyError::InvalidInput(format!("need at least 201 nodes, got {n_nodes}")));
    }
    quad.validate()?;

    let xs = grid_through_origin(a, b, n_nodes);
    let mut node_weights = Vec::with_capacity(xs.len());
    for &x in &xs {
        let lw = seed.log_weight(x);
        if lw > LOG_WEIGHT_CAP {
            return Err(FamilyError::Overflow { x, log_weight: lw });
        }
        node_weights.push(lw.exp());
    }

    let weight = |x: f64| seed.log_weight(x).exp();
    let cum = grid::cumulative(weight, 0.0, &xs, quad)?;
    // Non-increasing: where the weight has decayed below resolvable size the
    // table is numerically flat, so equal consecutive values are legitimate.
    let ys: Vec<f64> = cum.ys().iter().map(|v| -v).collect();
    if ys.windows(2).any(|w| !(w[1] <= w[0])) || !(ys[ys.len() - 1] < ys[0]) {
        return Err(FamilyError::InvalidInput(
            "gamma(x) is not decreasing; the weight must be positive everywhere".into(),
        ));
    }
    let gamma_of_x = SampledFunction::new(xs, ys)?;

    let n = gamma_of_x.len();
    let (gamma_first, gamma_last) = (gamma_of_x.ys()[0], gamma_of_x.ys()[n - 1]);
    let left_plateau = if seed.log_weight(a) < PLATEAU_LOG_THRESHOLD && seed.f(a) < 0.0 {
        Some(gamma_first + tail_estimate(seed.weight(a), seed.f(a)))
    } else {
        None
    };
    let right_plateau = if seed.log_weight(b) < PLATEAU_LOG_THRESHOLD && seed.f(b) > 0.0 {
        Some(gamma_last - tail_estimate(seed.weight(b), seed.f(b)))
    } else {
        None
    };
    let gamma_range = (
        right_plateau.unwrap_or(gamma_last),
        left_plateau.unwrap_or(gamma_first),
    );

    Ok(FamilyContext {
        seed,
        domain,
        gamma_of_x,
        gamma_range,
        quad,
        node_weights,
        left_plateau,
        right_plateau,
    })
}

/// Context on the seed's default domain with default quadrature and 2001 nodes.
pub fn default_context(seed: Box<dyn RiccatiSeed>) -> Result<FamilyContext, FamilyError> {
    let domain = seed.default_domain();
    build_context(seed, domain, QuadSettings::default(), 2001)
}

impl FamilyContext {
    pub fn seed(&self) -> &dyn RiccatiSeed {
        self.seed.as_ref()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn gamma_of_x(&self) -> &SampledFunction {
        &self.gamma_of_x
    }

    /// (inf, sup) of gamma(x) including tail extensions beyond decayed edges.
    pub fn gamma_range(&self) -> (f64, f64) {
        self.gamma_range
    }

    pub fn quad(&self) -> QuadSettings {
        self.quad
    }

    /// The regularity threshold on the negative side (the plateau of gamma(x)
    /// as x -> +infinity).
    pub fn gamma_s(&self) -> f64 {
        self.gamma_range.0
    }

    /// Plateau values of gamma(x) at -infinity and +infinity, where they exist
    /// (the weight must have decayed at the corresponding domain edge).
    pub fn plateaus(&self) -> (Option<f64>, Option<f64>) {
        (self.left_plateau, self.right_plateau)
    }

    pub fn nodes(&self) -> &[f64] {
        self.gamma_of_x.xs()
    }

    /// gamma(x) anywhere: exact at grid nodes, nearest-node value plus a local
    /// quadrature panel between nodes, plateau value beyond decayed edges, and
    /// direct extension integrals elsewhere outside the domain.
    pub fn gamma_at(&self, x: f64) -> Result<f64, FamilyError> {
        let (a, b) = self.domain;
        let xs = self.gamma_of_x.xs();
        let ys = self.gamma_of_x.ys();
        if x >= a && x <= b {
            let i = self.gamma_of_x.nearest_node(x);
            if x == xs[i] {
                return Ok(ys[i]);
            }
            let weight = |t: f64| self.seed.log_weight(t).exp();
            let panel = grid::integrate_signed(weight, xs[i], x, self.quad)?;
            return Ok(ys[i] - panel);
        }
        if x > b {
            if let Some(p) = self.right_plateau {
                return Ok(p);
            }
            let lw = self.seed.log_weight(x);
            if lw > LOG_WEIGHT_CAP {
                return Err(FamilyError::Overflow { x, log_weight: lw });
            }
            let weight = |t: f64| self.seed.log_weight(t).exp();
            let ext = grid::integrate(weight, b, x, self.quad)?;
            return Ok(ys[ys.len() - 1] - ext);
        }
        if let Some(p) = self.left_plateau {
            return Ok(p);
        }
        let lw = self.seed.log_weight(x);
        if lw > LOG_WEIGHT_CAP {
            return Err(FamilyError::Overflow { x, log_weight: lw });
        }
        let weight = |t: f64| self.seed.log_weight(t).exp();
        let ext = grid::integrate(weight, x, a, self.quad)?;
        Ok(ys[0] + ext)
    }

    pub fn is_regular(&self, gamma: f64) -> bool {
        gamma.is_finite() && regular_gamma_range(self).contains(gamma)
    }

    fn ensure_regular(&self, gamma: f64) -> Result<(), FamilyError> {
        if self.is_regular(gamma) {
            Ok(())
        } else {
            Err(FamilyError::SingularGamma {
                gamma,
                inf: self.gamma_range.0,
                sup: self.gamma_range.1,
            })
        }
    }

    /// Phi_g at every grid node, computed from the tabulated gamma values.
    /// Cheap enough to call inside parameter searches.
    pub(crate) fn phi_on_nodes(&self, gamma: f64) -> Vec<f64> {
        self.nodes()
            .iter()
            .zip(&self.node_weights)
            .zip(self.gamma_of_x.ys())
            .map(|((&x, &w), &g)| self.seed.f(x) + w / (gamma - g))
            .collect()
    }

    /// V_1gamma at every grid node, from the tabulated gamma values.
    pub(crate) fn member_on_nodes(&self, gamma: f64) -> Vec<f64> {
        self.nodes()
            .iter()
            .zip(&self.node_weights)
            .zip(self.gamma_of_x.ys())
            .map(|((&x, &w), &g)| {
                let u = w / (gamma - g);
                self.seed.v1(x) + u * (4.0 * self.seed.f(x) + 2.0 * u)
            })
            .collect()
    }
}

pub fn regular_gamma_range(ctx: &FamilyContext) -> RegularSet {
    let (inf, sup) = ctx.gamma_range;
    if ctx.left_plateau.is_some() {
        RegularSet::Outside { lower: inf, upper: sup }
    } else {
        RegularSet::Below { threshold: inf }
    }
}

/// The general Riccati solution Phi_g(x) = F + mu/(gamma - gamma(x)).
pub fn phi_general(ctx: &FamilyContext, gamma: f64, x: f64) -> Result<f64, FamilyError> {
    ctx.ensure_regular(gamma)?;
    let b = eval_bundle(ctx.seed(), x)?;
    let d = gamma - ctx.gamma_at(x)?;
    Ok(b.f + b.log_weight.exp() / d)
}

/// V_1gamma - V1 = 2 (Phi_g^2 - F^2), computed in the cancellation-free form
/// u (4F + 2u) with u = mu/(gamma - gamma(x)).
pub fn darboux_deformation(ctx: &FamilyContext, gamma: f64, x: f64) -> Result<f64, FamilyError> {
    ctx.ensure_regular(gamma)?;
    let b = eval_bundle(ctx.seed(), x)?;
    let u = b.log_weight.exp() / (gamma - ctx.gamma_at(x)?);
    Ok(u * (4.0 * b.f + 2.0 * u))
}

/// The family member V_1gamma(x) = V1 + 4 mu F/(gamma-gamma(x)) + 2 mu^2/(gamma-gamma(x))^2.
pub fn potential_member(ctx: &FamilyContext, gamma: f64, x: f64) -> Result<f64, FamilyError> {
    ctx.ensure_regular(gamma)?;
    let b = eval_bundle(ctx.seed(), x)?;
    let u = b.log_weight.exp() / (gamma - ctx.gamma_at(x)?);
    Ok(b.v1 + u * (4.0 * b.f + 2.0 * u))
}

/// ln |Psi_0gamma| before normalization, valid anywhere the seed evaluates:
/// the direct form 0.5 log mu - ln|gamma - gamma(x)| inside the weight cap,
/// and the asymptotic form ln(2|F|) - 0.5 log mu beyond it (where
/// gamma - gamma(x) ~ -mu/(2F) makes the direct form overflow).
pub fn log_zero_mode_abs(ctx: &FamilyContext, gamma: f64, x: f64) -> Result<f64, FamilyError> {
    ctx.ensure_regular(gamma)?;
    let lw = ctx.seed().log_weight(x);
    if lw > LOG_WEIGHT_CAP {
        return Ok((2.0 * ctx.seed().f(x).abs()).ln() - 0.5 * lw);
    }
    let d = gamma - ctx.gamma_at(x)?;
    Ok(0.5 * lw - d.abs().ln())
}

/// Unnormalized zero-mode value sqrt(mu)/(gamma - gamma(x)); switches to the
/// asymptotic branch -2F exp(-0.5 log mu) beyond the weight cap and clamps
/// magnitudes below 1e-300 to zero.
pub fn zero_mode_at(ctx: &FamilyContext, gamma: f64, x: f64) -> Result<f64, FamilyError> {
    ctx.ensure_regular(gamma)?;
    let lw = ctx.seed().log_weight(x);
    if lw > LOG_WEIGHT_CAP {
        let v = -2.0 * ctx.seed().f(x) * (-0.5 * lw).exp();
        return Ok(if v.abs() < ZM_CLAMP { 0.0 } else { v });
    }
    let d = gamma - ctx.gamma_at(x)?;
    let log_abs = 0.5 * lw - d.abs().ln();
    if log_abs < ZM_CLAMP.ln() {
        return Ok(0.0);
    }
    Ok(d.signum() * log_abs.exp())
}

/// |Gamma| used by paper-mode normalization: the weight integral from the
/// configured lower limit to +infinity (one-sided seeds), or over the whole
/// line (two-sided plateaus).
pub fn norm_gamma_integral(ctx: &FamilyContext, lower_limit: Option<f64>) -> Result<f64, FamilyError> {
    let (inf, sup) = ctx.gamma_range;
    if ctx.left_plateau.is_some() {
        return Ok(sup - inf);
    }
    let l = lower_limit.unwrap_or(ctx.seed().shift() + DEFAULT_PAPER_LOWER_LIMIT_OFFSET);
    let (a, b) = ctx.domain;
    if l < a || l > b {
        return Err(FamilyError::InvalidInput(format!(
            "paper-mode lower limit {l} must lie within the working domain [{a}, {b}]"
        )));
    }
    Ok(ctx.gamma_at(l)? - inf)
}

/// Normalization constant multiplying the raw zero mode
/// sqrt(mu)/(gamma - gamma(x)) under the given convention.
pub fn zero_mode_norm(ctx: &FamilyContext, gamma: f64, norm: NormMode) -> Result<f64, FamilyError> {
    ctx.ensure_regular(gamma)?;
    norm_constant(ctx, gamma, norm)
}

fn norm_constant(ctx: &FamilyContext, gamma: f64, norm: NormMode) -> Result<f64, FamilyError> {
    match norm {
        NormMode::L2 => {
            let (a, b) = ctx.domain;
            let sq = |x: f64| match log_zero_mode_abs(ctx, gamma, x) {
                Ok(l) => (2.0 * l).exp(),
                Err(_) => f64::NAN,
            };
            let n2 = grid::integrate(sq, a, b, ctx.quad)?;
            Ok(1.0 / n2.sqrt())
        }
        NormMode::Paper { lower_limit } => {
            let ng2 = gamma * (gamma + 1.0);
            if ng2 < 0.0 {
                return Err(FamilyError::NormUndefined { gamma });
            }
            let big_gamma = norm_gamma_integral(ctx, lower_limit)?;
            Ok((ng2 / big_gamma).sqrt())
        }
    }
}

/// Samples the normalized zero mode on `xs` (strictly increasing; may extend
/// beyond the working domain, where the asymptotic branch takes over).
pub fn zero_mode(
    ctx: &FamilyContext,
    gamma: f64,
    xs: &[f64],
    norm: NormMode,
) -> Result<ZeroModeProfile, FamilyError> {
    ctx.ensure_regular(gamma)?;
    let k = norm_constant(ctx, gamma, norm)?;
    let mut ys = Vec::with_capacity(xs.len());
    for &x in xs {
        ys.push(k * zero_mode_at(ctx, gamma, x)?);
    }
    let samples = SampledFunction::new(xs.to_vec(), ys)?;
    Ok(ZeroModeProfile {
        gamma,
        norm_mode: norm,
        norm_constant: k,
        samples,
        regular: true,
    })
}

/// Finite-difference residual of the zero mode in its own family member:
/// -Psi'' + (V_1gamma - eps_f) Psi, with Psi'' by central differences.
pub fn residual_schrodinger(ctx: &FamilyContext, gamma: f64, x: f64, h: f64) -> Result<f64, FamilyError> {
    if !(h > 0.0) {
        return Err(FamilyError::InvalidInput(format!("step must be positive, got {h}")));
    }
    let pm = zero_mode_at(ctx, gamma, x - h)?;
    let p0 = zero_mode_at(ctx, gamma, x)?;
    let pp = zero_mode_at(ctx, gamma, x + h)?;
    let second = (pm - 2.0 * p0 + pp) / (h * h);
    let v = potential_member(ctx, gamma, x)?;
    Ok(-second + (v - ctx.seed().factorization_energy()) * p0)
}

/// One row of the full member table emitted by the CLI.
#[derive(Debug, Clone, Copy)]
pub struct MemberSample {
    pub x: f64,
    pub v1: f64,
    pub v2: f64,
    pub v1gamma: f64,
    pub deformation: f64,
    pub psi: f64,
    pub psi2: f64,
    pub gamma_of_x: f64,
    pub mu: f64,
}

/// Samples every column of the member table on `xs`.
///
/// Regular gamma values are normalized per `norm`. With `allow_singular`,
/// singular gamma values are emitted unnormalized, and nodes within one grid
/// cell of a pole of gamma - gamma(x) (sign changes and exact zeros) are
/// masked as NaN in the gamma-dependent columns.
pub fn sample_member(
    ctx: &FamilyContext,
    gamma: f64,
    xs: &[f64],
    norm: NormMode,
    allow_singular: bool,
) -> Result<Vec<MemberSample>, FamilyError> {
    let regular = ctx.is_regular(gamma);
    if !regular && !allow_singular {
        return Err(FamilyError::SingularGamma {
            gamma,
            inf: ctx.gamma_range.0,
            sup: ctx.gamma_range.1,
        });
    }
    let k = if regular { norm_constant(ctx, gamma, norm)? } else { 1.0 };
    let mut gvals = Vec::with_capacity(xs.len());
    for &x in xs {
        gvals.push(ctx.gamma_at(x)?);
    }
    let ds: Vec<f64> = gvals.iter().map(|g| gamma - g).collect();
    let near_pole = |i: usize| {
        ds[i] == 0.0
            || (i > 0 && ds[i - 1].signum() != ds[i].signum())
            || (i + 1 < ds.len() && ds[i + 1].signum() != ds[i].signum())
    };
    let mut rows = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let b = eval_bundle(ctx.seed(), x)?;
        let d = ds[i];
        let mu = b.log_weight.exp();
        let (v1g, def, psi) = if near_pole(i) {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let u = mu / d;
            let def = u * (4.0 * b.f + 2.0 * u);
            let log_abs = 0.5 * b.log_weight - d.abs().ln();
            let psi = if log_abs < ZM_CLAMP.ln() { 0.0 } else { d.signum() * log_abs.exp() };
            (b.v1 + def, def, k * psi)
        };
        rows.push(MemberSample {
            x,
            v1: b.v1,
            v2: b.v2,
            v1gamma: v1g,
            deformation: def,
            psi,
            psi2: psi * psi,
            gamma_of_x: gvals[i],
            mu,
        });
    }
    Ok(rows)
}
