//! Numeric kernel: adaptive quadrature, cumulative integrals, bracketed root
//! finding, extremum location, and finite-difference derivatives.
//!
//! Everything here is a pure function of its inputs. The quadrature is an
//! adaptive Simpson rule with the classical 15x error estimate and Richardson
//! correction; it is accurate for the smooth, rapidly decaying integrands that
//! the rest of the crate produces, and makes no attempt to handle oscillatory
//! or endpoint-singular integrands.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("quadrature did not converge on [{a}, {b}] within depth {max_depth}")]
    NonConvergence { a: f64, b: f64, max_depth: u32 },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Tolerances and recursion bound for [`integrate`] and everything built on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_depth: 60 }
    }
}

impl QuadSettings {
    pub fn validate(&self) -> Result<(), GridError> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(GridError::InvalidInput(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(GridError::InvalidInput(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_depth < 10 {
            return Err(GridError::InvalidInput(format!("max_depth must be at least 10, got {}", self.max_depth)));
        }
        Ok(())
    }

    /// Same tolerances scaled by `factor` (used to tighten nested quadratures).
    pub fn scaled(&self, factor: f64) -> Self {
        Self { abs_tol: self.abs_tol * factor, rel_tol: self.rel_tol * factor, max_depth: self.max_depth }
    }
}

fn checked_eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, GridError> {
    let y = f(x);
    if y.is_finite() { Ok(y) } else { Err(GridError::NonFinite { x }) }
}

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    rel_tol: f64,
    depth: u32,
    settings: &QuadSettings,
) -> Result<f64, GridError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = checked_eval(f, lm)?;
    let frm = checked_eval(f, rm)?;
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let refined = left + right;
    let delta = refined - whole;
    // Standard Simpson halving: the refined estimate is ~15x closer to the
    // truth than `whole`, so |delta| <= 15*tol certifies the tolerance.
    if delta.abs() <= 15.0 * abs_tol.max(rel_tol * refined.abs()) {
        return Ok(refined + delta / 15.0);
    }
    if depth == 0 {
        return Err(GridError::NonConvergence { a, b, max_depth: settings.max_depth });
    }
    let l = adapt(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, rel_tol, depth - 1, settings)?;
    let r = adapt(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, rel_tol, depth - 1, settings)?;
    Ok(l + r)
}

/// Adaptive Simpson integral of `f` over `[a, b]`.
///
/// Accurate to `max(abs_tol, rel_tol * |I|)` for smooth integrands. Requires
/// `a <= b`; returns 0 for a degenerate interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, q: QuadSettings) -> Result<f64, GridError> {
    q.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(GridError::InvalidInput(format!("limits must be finite, got [{a}, {b}]")));
    }
    if a > b {
        return Err(GridError::InvalidInput(format!("limits must satisfy a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = checked_eval(&f, a)?;
    let m = 0.5 * (a + b);
    let fm = checked_eval(&f, m)?;
    let fb = checked_eval(&f, b)?;
    let whole = simpson(fa, fm, fb, a, b);
    adapt(&f, a, b, fa, fm, fb, whole, q.abs_tol, q.rel_tol, q.max_depth, &q)
}

/// Signed integral that allows reversed limits: `integrate_signed(f, b, a) = -integrate(f, a, b)`.
pub fn integrate_signed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, q: QuadSettings) -> Result<f64, GridError> {
    if a <= b { integrate(f, a, b, q) } else { integrate(f, b, a, q).map(|v| -v) }
}

/// A function sampled on a strictly increasing grid, evaluable between nodes
/// by monotone cubic (Fritsch-Carlson) interpolation.
///
/// Evaluation outside the grid clamps to the boundary node value.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
    tangents: Vec<f64>,
}

impl SampledFunction {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, GridError> {
        if xs.len() != ys.len() {
            return Err(GridError::InvalidInput(format!(
                "xs and ys must have equal length, got {} and {}",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(GridError::InvalidInput("need at least 2 nodes".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(GridError::InvalidInput("xs must be strictly increasing".into()));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(GridError::InvalidInput("nodes and values must be finite".into()));
        }
        let tangents = fritsch_carlson_tangents(&xs, &ys);
        Ok(Self { xs, ys, tangents })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the grid node nearest to `x`.
    pub fn nearest_node(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i == self.xs.len() => self.xs.len() - 1,
            Err(i) => {
                if (x - self.xs[i - 1]) <= (self.xs[i] - x) {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Monotone cubic Hermite value at `x` (clamped beyond the grid).
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.tangents[i], self.tangents[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
    }
}

/// Fritsch-Carlson monotone tangents: interpolation never overshoots the data
/// on intervals where the data are monotone.
fn fritsch_carlson_tangents(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m
}

/// Tabulates `x -> integral of f from x0 to x` on the nodes `xs`.
///
/// `x0` must lie within `[xs[0], xs[last]]`. Panels between consecutive nodes
/// are integrated independently and prefix-summed, so consecutive-panel
/// additivity holds by construction.
pub fn cumulative<F: Fn(f64) -> f64>(
    f: F,
    x0: f64,
    xs: &[f64],
    q: QuadSettings,
) -> Result<SampledFunction, GridError> {
    if xs.len() < 2 || xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(GridError::InvalidInput("xs must be strictly increasing with at least 2 nodes".into()));
    }
    if !(xs[0] <= x0 && x0 <= xs[xs.len() - 1]) {
        return Err(GridError::InvalidInput(format!(
            "x0 = {x0} must lie within the grid [{}, {}]",
            xs[0],
            xs[xs.len() - 1]
        )));
    }
    let n = xs.len();
    // First node at or right of x0.
    let j0 = xs.partition_point(|&v| v < x0);
    let mut ys = vec![0.0; n];
    if j0 < n {
        ys[j0] = integrate(&f, x0, xs[j0], q)?;
        for i in j0 + 1..n {
            ys[i] = ys[i - 1] + integrate(&f, xs[i - 1], xs[i], q)?;
        }
    }
    if j0 > 0 {
        ys[j0 - 1] = -integrate(&f, xs[j0 - 1], x0, q)?;
        for i in (0..j0 - 1).rev() {
            ys[i] = ys[i + 1] - integrate(&f, xs[i], xs[i + 1], q)?;
        }
    }
    SampledFunction::new(xs.to_vec(), ys)
}

/// Refines a bracketed sign change of `f` by bisection.
///
/// `f(lo)` and `f(hi)` must have opposite signs. Returns the midpoint of the
/// final machine-width bracket.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    let fhi = f(hi);
    debug_assert!(flo * fhi <= 0.0, "bisect_root requires a sign change");
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    0.5 * (lo + hi)
}

/// All simple roots of `f` on `[a, b]`, located by an `n_scan`-point sign scan
/// and refined by bisection. Tangent roots without a sign change are not
/// detected.
pub fn find_roots<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n_scan: usize) -> Vec<f64> {
    if n_scan < 2 || !(a < b) {
        return Vec::new();
    }
    let step = (b - a) / (n_scan - 1) as f64;
    let mut roots = Vec::new();
    let mut x_prev = a;
    let mut f_prev = f(a);
    for i in 1..n_scan {
        let x = if i == n_scan - 1 { b } else { a + step * i as f64 };
        let fx = f(x);
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if f_prev * fx < 0.0 {
            roots.push(bisect_root(&f, x_prev, x));
        }
        x_prev = x;
        f_prev = fx;
    }
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    roots.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * (1.0 + a.abs()));
    roots
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

/// Local extrema of `f` on `[a, b]`: roots of a fourth-order finite-difference
/// derivative, classified by the sign of the second difference. `f` must be
/// finite (and smooth) on a neighbourhood of `[a, b]`.
pub fn find_extrema<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n_scan: usize) -> Vec<(f64, ExtremumKind)> {
    if n_scan < 2 || !(a < b) {
        return Vec::new();
    }
    let h = (b - a) / ((n_scan - 1) as f64 * 10.0);
    let deriv = |x: f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    find_roots(deriv, a + 2.0 * h, b - 2.0 * h, n_scan)
        .into_iter()
        .filter_map(|x| {
            let second = f(x - h) - 2.0 * f(x) + f(x + h);
            if second < 0.0 {
                Some((x, ExtremumKind::Max))
            } else if second > 0.0 {
                Some((x, ExtremumKind::Min))
            } else {
                None
            }
        })
        .collect()
}

/// Central second difference `(f(x-h) - 2 f(x) + f(x+h)) / h^2`.
pub fn fd_second<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - h) - 2.0 * f(x) + f(x + h)) / (h * h)
}

/// Central first difference, second order.
pub fn fd_first<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Five-point first derivative, fourth order.
pub fn fd_first_o4<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Five-point second derivative, fourth order.
pub fn fd_second_o4<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h * h)
}
