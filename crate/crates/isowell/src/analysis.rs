//! Analysis of family members: the gamma_star(x) diagnostic and its extrema,
//! zero-mode extrema, the critical parameter where the two density peaks have
//! equal height, asymmetric-localization classification, and localization
//! probabilities, plus the exact covariance map between shifted seeds.

use crate::family::{self, FamilyContext, FamilyError, NormMode};
use crate::grid::{self, ExtremumKind, GridError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(
        "no equal-height parameter: the peak-height difference kept its sign out to gamma = {gamma_last:.6e}"
    )]
    NoCrossing { gamma_last: f64 },
    #[error("the zero-mode density has fewer than two maxima at gamma = {gamma}")]
    OnePeak { gamma: f64 },
    #[error("the wells at gamma = {gamma} are degenerate: equal depths and widths")]
    Degenerate { gamma: f64 },
    #[error("gamma_star has a pole at x = {x}: F vanishes at a turning point")]
    PoleAtTurningPoint { x: f64 },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

fn ensure_regular(ctx: &FamilyContext, gamma: f64) -> Result<(), AnalysisError> {
    if ctx.is_regular(gamma) {
        Ok(())
    } else {
        let (inf, sup) = ctx.gamma_range();
        Err(AnalysisError::Family(FamilyError::SingularGamma { gamma, inf, sup }))
    }
}

/// The parameter value gamma_star(x) = gamma(x) - mu(x)/F(x) at which the
/// zero-mode density would have a critical point exactly at x. Its graph is
/// the locus dual to the zero-mode extrema: zm extrema of the member at
/// `gamma` sit where gamma_star(x) = gamma.
pub fn gamma_star(ctx: &FamilyContext, x: f64) -> Result<f64, AnalysisError> {
    let f = ctx.seed().f(x);
    if f.abs() < 1e-12 {
        return Err(AnalysisError::PoleAtTurningPoint { x });
    }
    let mu = ctx.seed().log_weight(x).exp();
    Ok(ctx.gamma_at(x)? - mu / f)
}

/// A critical point of gamma_star.
#[derive(Debug, Clone, Copy)]
pub struct GammaStarExtremum {
    pub x: f64,
    pub kind: ExtremumKind,
    pub gamma_star: f64,
}

/// Critical points of gamma_star away from F-poles. Since
/// gamma_star'(x) = mu (V2 - eps_f) / F^2, these are exactly the roots of
/// V2 - eps_f; a root where V2 - eps_f crosses upward is a minimum.
pub fn gamma_star_extrema(ctx: &FamilyContext) -> Result<Vec<GammaStarExtremum>, AnalysisError> {
    let seed = ctx.seed();
    let eps = seed.factorization_energy();
    let (a, b) = ctx.domain();
    let g = |x: f64| seed.v2(x) - eps;
    let roots = grid::find_roots(g, a, b, ctx.nodes().len());
    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        let h = 1e-6 * (1.0 + r.abs());
        let kind = if g(r + h) > g(r - h) { ExtremumKind::Min } else { ExtremumKind::Max };
        out.push(GammaStarExtremum { x: r, kind, gamma_star: gamma_star(ctx, r)? });
    }
    Ok(out)
}

/// An extremum of the zero-mode density.
#[derive(Debug, Clone, Copy)]
pub struct ZmExtremum {
    pub x: f64,
    pub kind: ExtremumKind,
    /// Density value at the extremum under the requested normalization.
    pub psi2: f64,
}

fn zm_extrema_with_norm(
    ctx: &FamilyContext,
    gamma: f64,
    norm_k: f64,
) -> Result<Vec<ZmExtremum>, AnalysisError> {
    ensure_regular(ctx, gamma)?;
    let phis = ctx.phi_on_nodes(gamma);
    let xs = ctx.nodes();
    let eps = ctx.seed().factorization_energy();
    let phi = |x: f64| family::phi_general(ctx, gamma, x).unwrap_or(f64::NAN);
    let mut out = Vec::new();
    for i in 0..phis.len() - 1 {
        if phis[i] == 0.0 || phis[i].signum() == phis[i + 1].signum() {
            continue;
        }
        let r = grid::bisect_root(&phi, xs[i], xs[i + 1]);
        if !r.is_finite() {
            continue;
        }
        // At a root of Phi_g, the density curvature has the sign of
        // -(V2 - eps_f); fall back to a second difference when that is
        // too close to zero to call.
        let s = ctx.seed().v2(r) - eps;
        let kind = if s > 1e-9 * (1.0 + s.abs()) {
            ExtremumKind::Max
        } else if s < -1e-9 * (1.0 + s.abs()) {
            ExtremumKind::Min
        } else {
            let h = 1e-4 * (1.0 + r.abs());
            let lg = |x: f64| family::log_zero_mode_abs(ctx, gamma, x).unwrap_or(f64::NAN);
            if lg(r - h) + lg(r + h) - 2.0 * lg(r) < 0.0 {
                ExtremumKind::Max
            } else {
                ExtremumKind::Min
            }
        };
        let psi = norm_k * family::zero_mode_at(ctx, gamma, r)?;
        out.push(ZmExtremum { x: r, kind, psi2: psi * psi });
    }
    Ok(out)
}

/// All extrema of the zero-mode density on the working domain, located as
/// roots of Phi_g (the logarithmic derivative of the density is -2 Phi_g)
/// and refined by bisection. Heights are reported under `norm`.
pub fn zm_extrema(
    ctx: &FamilyContext,
    gamma: f64,
    norm: NormMode,
) -> Result<Vec<ZmExtremum>, AnalysisError> {
    let k = family::zero_mode_norm(ctx, gamma, norm)?;
    zm_extrema_with_norm(ctx, gamma, k)
}

/// Height difference (left peak minus right peak) of the two outermost
/// density maxima; normalization-independent in sign.
fn peak_height_diff(ctx: &FamilyContext, gamma: f64) -> Result<f64, AnalysisError> {
    let ext = zm_extrema_with_norm(ctx, gamma, 1.0)?;
    let maxima: Vec<&ZmExtremum> =
        ext.iter().filter(|e| e.kind == ExtremumKind::Max).collect();
    if maxima.len() < 2 {
        return Err(AnalysisError::OnePeak { gamma });
    }
    Ok(maxima[0].psi2 - maxima[maxima.len() - 1].psi2)
}

/// The critical parameter and the density extrema of its member.
#[derive(Debug, Clone)]
pub struct CriticalGamma {
    pub gamma_cr: f64,
    pub left_max: ZmExtremum,
    pub right_max: ZmExtremum,
    pub local_min: Option<ZmExtremum>,
}

/// Expansion factor for the bracket search and its abandon threshold.
const BRACKET_GROWTH: f64 = 2.0;
const BRACKET_LIMIT_FACTOR: f64 = 1e6;

/// Finds the critical parameter gamma_cr < gamma_s at which the two
/// zero-mode density peaks have equal height, by bracketing the sign change
/// of the height difference (starting just inside the regular side and
/// expanding geometrically) and bisecting. Seeds whose peaks never equalize
/// (e.g. symmetric ones) yield `NoCrossing`.
pub fn critical_gamma(ctx: &FamilyContext) -> Result<CriticalGamma, AnalysisError> {
    let gamma_s = ctx.gamma_s();
    let mut lo = 1.001 * gamma_s;
    let mut s_lo = peak_height_diff(ctx, lo)?;
    let mut hi = lo;
    let mut found = false;
    while hi.abs() < BRACKET_LIMIT_FACTOR * gamma_s.abs() {
        hi *= BRACKET_GROWTH;
        let s_hi = peak_height_diff(ctx, hi)?;
        if s_hi == 0.0 || s_hi.signum() != s_lo.signum() {
            found = true;
            break;
        }
        lo = hi;
        s_lo = s_hi;
    }
    if !found {
        return Err(AnalysisError::NoCrossing { gamma_last: hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= 1e-13 * mid.abs() {
            break;
        }
        let s_mid = peak_height_diff(ctx, mid)?;
        if s_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if s_mid.signum() == s_lo.signum() {
            lo = mid;
            s_lo = s_mid;
        } else {
            hi = mid;
        }
    }
    let gamma_cr = 0.5 * (lo + hi);
    let ext = zm_extrema(ctx, gamma_cr, NormMode::L2)?;
    let maxima: Vec<ZmExtremum> =
        ext.iter().copied().filter(|e| e.kind == ExtremumKind::Max).collect();
    if maxima.len() < 2 {
        return Err(AnalysisError::OnePeak { gamma: gamma_cr });
    }
    let left_max = maxima[0];
    let right_max = maxima[maxima.len() - 1];
    let local_min = ext
        .iter()
        .copied()
        .find(|e| e.kind == ExtremumKind::Min && e.x > left_max.x && e.x < right_max.x);
    Ok(CriticalGamma { gamma_cr, left_max, right_max, local_min })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// One well of a double-well member.
#[derive(Debug, Clone, Copy)]
pub struct Well {
    pub x: f64,
    /// Potential value at the bottom.
    pub v: f64,
}

/// Asymmetric-localization report for one member.
#[derive(Debug, Clone, Copy)]
pub struct AlrReport {
    pub gamma: f64,
    pub left_well: Well,
    pub right_well: Well,
    pub barrier_x: f64,
    pub barrier_v: f64,
    pub shallower: Side,
    /// L2 probability on the shallower well's side of the barrier.
    pub p_shallower: f64,
    /// True when the zero mode localizes in the shallower well.
    pub localized_in_shallower: bool,
}

fn golden_extremum(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, maximize: bool) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let sgn = if maximize { -1.0 } else { 1.0 };
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = sgn * f(c);
    let mut fd = sgn * f(d);
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = sgn * f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = sgn * f(d);
        }
    }
    0.5 * (a + b)
}

/// Classifies a member as asymmetrically localized: finds its two deepest
/// wells and the barrier between them, identifies the shallower well, and
/// integrates the L2-normalized density on the shallower side. Members
/// whose wells tie in both depth and width are reported `Degenerate`.
pub fn alr_classify(ctx: &FamilyContext, gamma: f64) -> Result<AlrReport, AnalysisError> {
    ensure_regular(ctx, gamma)?;
    let xs = ctx.nodes();
    let vs = ctx.member_on_nodes(gamma);
    let v = |x: f64| family::potential_member(ctx, gamma, x).unwrap_or(f64::NAN);

    let mut minima = Vec::new();
    for i in 1..vs.len() - 1 {
        if vs[i] < vs[i - 1] && vs[i] < vs[i + 1] {
            let x = golden_extremum(&v, xs[i - 1], xs[i + 1], false);
            minima.push((x, v(x)));
        }
    }
    if minima.len() < 2 {
        return Err(AnalysisError::OnePeak { gamma });
    }
    minima.sort_by(|p, q| p.1.total_cmp(&q.1));
    let mut wells = [minima[0], minima[1]];
    wells.sort_by(|p, q| p.0.total_cmp(&q.0));
    let left_well = Well { x: wells[0].0, v: wells[0].1 };
    let right_well = Well { x: wells[1].0, v: wells[1].1 };

    let lo = xs.partition_point(|&x| x < left_well.x);
    let hi = xs.partition_point(|&x| x < right_well.x);
    let i_max = (lo..hi)
        .max_by(|&i, &j| vs[i].total_cmp(&vs[j]))
        .ok_or(AnalysisError::OnePeak { gamma })?;
    let barrier_x = golden_extremum(
        &v,
        xs[i_max.saturating_sub(1)],
        xs[(i_max + 1).min(xs.len() - 1)],
        true,
    );
    let barrier_v = v(barrier_x);

    let depth_scale = 1.0 + left_well.v.abs().max(right_well.v.abs());
    let shallower = if (left_well.v - right_well.v).abs() <= 1e-9 * depth_scale {
        // depth tie: compare widths below the barrier energy by node count
        let count = |side: Side| {
            xs.iter().zip(&vs).filter(|(&x, &w)| {
                w < barrier_v
                    && match side {
                        Side::Left => x < barrier_x,
                        Side::Right => x > barrier_x,
                    }
            }).count() as i64
        };
        let (nl, nr) = (count(Side::Left), count(Side::Right));
        if (nl - nr).abs() <= 2 {
            return Err(AnalysisError::Degenerate { gamma });
        }
        if nl < nr {
            Side::Left
        } else {
            Side::Right
        }
    } else if left_well.v > right_well.v {
        Side::Left
    } else {
        Side::Right
    };

    let k = family::zero_mode_norm(ctx, gamma, NormMode::L2)?;
    let dens = |x: f64| {
        let l = family::log_zero_mode_abs(ctx, gamma, x).unwrap_or(f64::NEG_INFINITY);
        k * k * (2.0 * l).exp()
    };
    let (a, b) = ctx.domain();
    let p_left = grid::integrate(dens, a, barrier_x, ctx.quad())?;
    let p_right = grid::integrate(dens, barrier_x, b, ctx.quad())?;
    let total = p_left + p_right;
    let p_shallower = match shallower {
        Side::Left => p_left / total,
        Side::Right => p_right / total,
    };
    Ok(AlrReport {
        gamma,
        left_well,
        right_well,
        barrier_x,
        barrier_v,
        shallower,
        p_shallower,
        localized_in_shallower: p_shallower > 0.5,
    })
}

/// Localization probabilities of a member's zero mode on the two sides of
/// the inter-peak minimum.
#[derive(Debug, Clone, Copy)]
pub struct Localization {
    pub gamma: f64,
    /// Splitting point: the density minimum between the two peaks.
    pub split_x: f64,
    /// Integration window actually used.
    pub window: (f64, f64),
    pub p_left: f64,
    pub p_right: f64,
    pub ratio: f64,
    pub norm_mode: NormMode,
}

/// Integrates the normalized density left and right of the inter-peak
/// minimum. `window` defaults to the whole working domain in l2 mode and to
/// `[shift - 3, shift + 3]` (clamped to the domain) in paper mode. (The
/// lower limit configured in paper mode restricts only the normalization
/// integral |Gamma|, not the density integrals.)
pub fn localization(
    ctx: &FamilyContext,
    gamma: f64,
    window: Option<(f64, f64)>,
    norm: NormMode,
) -> Result<Localization, AnalysisError> {
    let k = family::zero_mode_norm(ctx, gamma, norm)?;
    let ext = zm_extrema_with_norm(ctx, gamma, k)?;
    let maxima: Vec<ZmExtremum> =
        ext.iter().copied().filter(|e| e.kind == ExtremumKind::Max).collect();
    if maxima.len() < 2 {
        return Err(AnalysisError::OnePeak { gamma });
    }
    let mut peaks = maxima.clone();
    peaks.sort_by(|p, q| q.psi2.total_cmp(&p.psi2));
    let mut pair = [peaks[0], peaks[1]];
    pair.sort_by(|p, q| p.x.total_cmp(&q.x));
    let split_x = ext
        .iter()
        .find(|e| e.kind == ExtremumKind::Min && e.x > pair[0].x && e.x < pair[1].x)
        .map(|e| e.x)
        .ok_or(AnalysisError::OnePeak { gamma })?;

    let (a, b) = ctx.domain();
    let (w0, w1) = window.unwrap_or_else(|| match norm {
        NormMode::Paper { .. } => {
            let c = ctx.seed().shift();
            ((c - 3.0).max(a), (c + 3.0).min(b))
        }
        NormMode::L2 => (a, b),
    });
    if !(w0 < split_x && split_x < w1) {
        return Err(AnalysisError::Family(FamilyError::InvalidInput(format!(
            "window [{w0}, {w1}] must contain the splitting point {split_x}"
        ))));
    }
    let dens = |x: f64| {
        let l = family::log_zero_mode_abs(ctx, gamma, x).unwrap_or(f64::NEG_INFINITY);
        k * k * (2.0 * l).exp()
    };
    let p_left = grid::integrate(dens, w0.max(a), split_x, ctx.quad())?;
    let p_right = grid::integrate(dens, split_x, w1.min(b), ctx.quad())?;
    Ok(Localization {
        gamma,
        split_x,
        window: (w0, w1),
        p_left,
        p_right,
        ratio: p_left / p_right,
        norm_mode: norm,
    })
}

/// Result of mapping a parameter value from the unshifted seed to a shifted
/// one through the exact covariance of the construction.
#[derive(Debug, Clone, Copy)]
pub struct CovarianceCheck {
    pub c: f64,
    pub mapped_gamma: f64,
    pub reference_gamma: f64,
    /// |mapped - reference| / |reference|.
    pub discrepancy: f64,
}

/// Maps a parameter value of the unshifted seed to the seed shifted by `c`:
/// because mu_c(x) = mu_0(x-c)/mu_0(-c), every distinguished parameter obeys
/// gamma_c = (gamma_0 - gamma0(-c)) / mu_0(-c).
pub fn mapped_parameter(
    base: &FamilyContext,
    c: f64,
    base_gamma: f64,
) -> Result<f64, AnalysisError> {
    let g0 = base.gamma_at(-c)?;
    let mu0 = base.seed().log_weight(-c).exp();
    Ok((base_gamma - g0) / mu0)
}

/// Compares the covariance-mapped parameter against an independently
/// computed value for the shifted seed.
pub fn shift_covariance(
    base: &FamilyContext,
    c: f64,
    base_gamma: f64,
    reference_gamma: f64,
) -> Result<CovarianceCheck, AnalysisError> {
    let mapped_gamma = mapped_parameter(base, c, base_gamma)?;
    Ok(CovarianceCheck {
        c,
        mapped_gamma,
        reference_gamma,
        discrepancy: (mapped_gamma - reference_gamma).abs() / reference_gamma.abs(),
    })
}
