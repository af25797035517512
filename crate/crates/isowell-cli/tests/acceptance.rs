//! Acceptance gate: every released build must reproduce the published
//! reference values and the construction's internal identities. One test per
//! criterion; each prints a single PASS/FAIL line (visible with
//! `cargo test -- --nocapture`).

use isowell::analysis;
use isowell::family::{self, default_context, FamilyContext, NormMode};
use isowell::grid::{fd_first_o4, fd_second_o4, ExtremumKind};
use isowell::seeds::{quartic_seed, razavy_seed, RiccatiSeed, RAZAVY_EPSILON};
use isowell::spectra;
use std::process::Command;

// ---------------------------------------------------------------------------
// harness
// ---------------------------------------------------------------------------

struct Gate {
    id: &'static str,
    title: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Gate {
    fn new(id: &'static str, title: &'static str) -> Self {
        Self { id, title, checks: 0, failures: Vec::new() }
    }

    fn ok(&mut self, cond: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !cond {
            self.failures.push(detail());
        }
    }

    /// |got - want| / |want| <= tol
    fn rel(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        self.ok(((got - want) / want).abs() <= tol, || {
            format!("{label}: {got} vs {want} (rel tol {tol})")
        });
    }

    /// |got - want| <= tol
    fn abs(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        self.ok((got - want).abs() <= tol, || {
            format!("{label}: {got} vs {want} (abs tol {tol})")
        });
    }

    fn finish(self) {
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("acceptance {:>2}  {:<58} [{status}] ({} checks)", self.id, self.title, self.checks);
        assert!(self.failures.is_empty(), "{}", self.failures.join("\n"));
    }
}

fn quartic_ctx(c: f64) -> FamilyContext {
    default_context(Box::new(quartic_seed(c).unwrap())).unwrap()
}

fn razavy_ctx(c: f64) -> FamilyContext {
    default_context(Box::new(razavy_seed(c).unwrap())).unwrap()
}

/// (c, gamma_s, gamma_cr, left max x, right max x, local min x)
const PUBLISHED_ROWS: [(f64, f64, f64, f64, f64, f64); 5] = [
    (-2.0, -0.1416, -9.1, -4.4, -0.63, -3.11),
    (-1.0, -0.5648, -1.2, -3.4, 0.35, -2.11),
    (0.0, -4.6310, -7.0, -2.4, 1.36, -1.02),
    (1.0, -19.3694, -28.3, -1.4, 2.35, -0.10),
    (2.0, -1.5719, -2.2, -0.4, 3.35, 0.91),
];

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

#[test]
fn a01_regularity_thresholds() {
    let mut g = Gate::new("01", "gamma_s for five shifts + closed-form value");
    for &(c, want, ..) in &PUBLISHED_ROWS {
        g.rel(&format!("gamma_s(c={c})"), quartic_ctx(c).gamma_s(), want, 0.005);
    }
    g.abs("gamma_s(0) closed form", quartic_ctx(0.0).gamma_s(), -4.63107, 1e-3);
    g.finish();
}

#[test]
fn a02_critical_parameters() {
    let mut g = Gate::new("02", "gamma_cr for five shifts");
    for &(c, _, want, ..) in &PUBLISHED_ROWS {
        let cr = analysis::critical_gamma(&quartic_ctx(c)).unwrap();
        g.rel(&format!("gamma_cr(c={c})"), cr.gamma_cr, want, 0.03);
    }
    g.finish();
}

#[test]
fn a03_extrema_positions() {
    let mut g = Gate::new("03", "zero-mode extrema at gamma_cr and at gamma=-7");
    for &(c, _, _, xl, xr, xm) in &PUBLISHED_ROWS {
        let ctx = quartic_ctx(c);
        let cr = analysis::critical_gamma(&ctx).unwrap();
        g.abs(&format!("left max (c={c})"), cr.left_max.x, xl, 0.1);
        g.abs(&format!("right max (c={c})"), cr.right_max.x, xr, 0.1);
        let min = cr.local_min.expect("interior minimum exists");
        g.abs(&format!("local min (c={c})"), min.x, xm, 0.1);
    }
    let ext = analysis::zm_extrema(&quartic_ctx(0.0), -7.0, NormMode::L2).unwrap();
    g.ok(ext.len() == 3, || format!("expected 3 extrema, got {}", ext.len()));
    for (e, (want, kind)) in ext.iter().zip([
        (-2.404, ExtremumKind::Max),
        (-1.02, ExtremumKind::Min),
        (1.365, ExtremumKind::Max),
    ]) {
        g.abs(&format!("extremum near {want}"), e.x, want, 0.01);
        g.ok(e.kind == kind, || format!("kind at {want}: {:?}", e.kind));
    }
    g.finish();
}

#[test]
fn a04_localization_probabilities() {
    let mut g = Gate::new("04", "localization splits, both normalizations");
    let ctx = quartic_ctx(0.0);
    let paper = analysis::localization(&ctx, -7.0, None, NormMode::Paper { lower_limit: None })
        .unwrap();
    g.rel("quartic p_left (paper)", paper.p_left, 0.31954, 0.03);
    g.rel("quartic p_right (paper)", paper.p_right, 0.68989, 0.03);
    let weight = family::norm_gamma_integral(&ctx, None).unwrap().abs();
    g.rel("quartic weight integral", weight, 17.56, 0.005);
    let l2 = analysis::localization(&ctx, -7.0, Some((-3.0, 3.0)), NormMode::L2).unwrap();
    g.rel("quartic p_left/p_right (l2)", l2.ratio, 0.4632, 0.02);

    let rz = razavy_ctx(0.0);
    let paper_r =
        analysis::localization(&rz, -51.0, None, NormMode::Paper { lower_limit: None }).unwrap();
    g.rel("razavy p_left (paper)", paper_r.p_left, 0.35311, 0.10);
    g.rel("razavy p_right (paper)", paper_r.p_right, 0.74674, 0.10);
    let l2_r = analysis::localization(&rz, -51.0, None, NormMode::L2).unwrap();
    g.rel("razavy p_left/p_right (l2)", l2_r.ratio, 0.4729, 0.05);
    g.finish();
}

#[test]
fn a05_razavy_constants() {
    let mut g = Gate::new("05", "razavy plateaus, weight integral, dual extrema");
    let ctx = razavy_ctx(0.0);
    let (left, right) = ctx.plateaus();
    g.rel("left plateau", left.unwrap(), 16.8096, 1e-3);
    g.rel("right plateau", right.unwrap(), -16.8096, 1e-3);
    let weight = family::norm_gamma_integral(&ctx, None).unwrap().abs();
    g.rel("weight integral", weight, 33.6192, 1e-3);
    g.rel("weight integral = 2|gamma_s|", weight, 2.0 * ctx.gamma_s().abs(), 1e-6);

    let stars = analysis::gamma_star_extrema(&ctx).unwrap();
    g.ok(stars.len() == 2, || format!("expected 2 dual-curve extrema, got {}", stars.len()));
    g.abs("dual extremum left", stars[0].x, -0.463478, 0.005);
    g.abs("dual extremum right", stars[1].x, 0.463478, 0.005);

    let ext = analysis::zm_extrema(&ctx, -51.0, NormMode::L2).unwrap();
    g.ok(ext.len() == 3, || format!("expected 3 extrema, got {}", ext.len()));
    g.abs("zm max left", ext[0].x, -0.8783, 0.01);
    g.abs("zm min", ext[1].x, -0.076, 0.01);
    g.abs("zm max right", ext[2].x, 1.086, 0.01);
    g.finish();
}

#[test]
fn a06_alr_presence_and_absence() {
    let mut g = Gate::new("06", "anomalous localization: present (quartic), absent (razavy)");
    let ctx = quartic_ctx(0.0);
    let inside = analysis::alr_classify(&ctx, -5.5).unwrap();
    g.ok(inside.localized_in_shallower, || {
        format!("gamma=-5.5 should localize in the shallower well (p = {})", inside.p_shallower)
    });
    let outside = analysis::alr_classify(&ctx, -20.0).unwrap();
    g.ok(!outside.localized_in_shallower, || {
        format!("gamma=-20 should not localize in the shallower well (p = {})", outside.p_shallower)
    });
    for c in [0.0, 1.0] {
        let res = analysis::critical_gamma(&razavy_ctx(c));
        g.ok(matches!(res, Err(analysis::AnalysisError::NoCrossing { .. })), || {
            format!("razavy c={c}: expected no equal-height crossing, got {res:?}")
        });
    }
    g.finish();
}

/// Worst scaled residuals of the four construction identities over one
/// member's mesh, with representability guards mirroring the unit suite.
struct MeshResiduals {
    riccati: (f64, usize),
    bernoulli: (f64, usize),
    deformation_alg: (f64, usize),
    deformation_fd: (f64, usize),
    zm_log: (f64, usize),
}

fn mesh_residuals(ctx: &FamilyContext, gamma: f64) -> MeshResiduals {
    let (a, b) = ctx.domain();
    let seed = ctx.seed();
    let eps = seed.factorization_energy();
    let margin = 0.01;
    let mut out = MeshResiduals {
        riccati: (0.0, 0),
        bernoulli: (0.0, 0),
        deformation_alg: (0.0, 0),
        deformation_fd: (0.0, 0),
        zm_log: (0.0, 0),
    };
    let push = |slot: &mut (f64, usize), r: f64| {
        slot.0 = slot.0.max(r);
        slot.1 += 1;
    };
    for &x in ctx.nodes() {
        if x < a + margin || x > b - margin {
            continue;
        }
        let phi_at = |t: f64| family::phi_general(ctx, gamma, t).unwrap();
        let phi = phi_at(x);
        let f = seed.f(x);
        let v2e = seed.v2(x) - eps;

        // general Riccati solution: phi' + phi^2 = V2 - eps
        let dphi = fd_first_o4(phi_at, x, 1e-4);
        push(&mut out.riccati, (dphi + phi * phi - v2e).abs() / (1.0 + v2e.abs() + phi * phi));

        // linearized (Bernoulli) form: U = (gamma - gamma(x))/mu solves
        // -U' + 2FU + 1 = 0; meaningful unscaled where the weight does not
        // amplify quadrature noise
        let u_at =
            |t: f64| (gamma - ctx.gamma_at(t).unwrap()) * (-seed.log_weight(t)).exp();
        let u = u_at(x);
        if u.is_finite() && u.abs() <= 1e4 && seed.log_weight(x) >= -1.6 {
            let du = fd_first_o4(u_at, x, 1e-5);
            push(&mut out.bernoulli, (-du + 2.0 * f * u + 1.0).abs());
        }

        // additive deformation: algebraically 2(phi^2 - F^2), analytically
        // -2 (ln|gamma - gamma(x)|)''
        let d1 = family::darboux_deformation(ctx, gamma, x).unwrap();
        push(
            &mut out.deformation_alg,
            (d1 - 2.0 * (phi * phi - f * f)).abs() / (1.0 + d1.abs()),
        );
        let ln_d = |t: f64| (gamma - ctx.gamma_at(t).unwrap()).abs().ln();
        let d3 = -2.0 * fd_second_o4(ln_d, x, 1e-3);
        push(&mut out.deformation_fd, (d1 - d3).abs() / (1.0 + d1.abs()));

        // zero-mode log-derivative: (ln Psi)' = -phi
        let lp = |t: f64| family::log_zero_mode_abs(ctx, gamma, t).unwrap();
        push(&mut out.zm_log, (fd_first_o4(lp, x, 1e-4) + phi).abs() / (1.0 + phi.abs()));
    }
    out
}

#[test]
fn a07_construction_identities() {
    let mut g = Gate::new("07", "Riccati/Bernoulli/deformation/zero-mode identities");
    for shift in [-1.0, 0.0, 1.0] {
        for (name, ctx) in [("quartic", quartic_ctx(shift)), ("razavy", razavy_ctx(shift))] {
            let gs = ctx.gamma_s();
            for m in [1.5, 3.0, 10.0] {
                let gamma = m * gs;
                let tag = format!("{name} c={shift} gamma={gamma:.4}");
                let r = mesh_residuals(&ctx, gamma);
                let full = ctx.nodes().len() * 3 / 4;
                g.ok(r.riccati.0 <= 1e-6 && r.riccati.1 >= full, || {
                    format!("{tag}: Riccati residual {:.3e} over {} nodes", r.riccati.0, r.riccati.1)
                });
                g.ok(r.bernoulli.0 <= 1e-6 && r.bernoulli.1 >= 250, || {
                    format!(
                        "{tag}: Bernoulli residual {:.3e} over {} nodes",
                        r.bernoulli.0, r.bernoulli.1
                    )
                });
                g.ok(r.deformation_alg.0 <= 1e-12 && r.deformation_alg.1 >= full, || {
                    format!("{tag}: algebraic deformation residual {:.3e}", r.deformation_alg.0)
                });
                g.ok(r.deformation_fd.0 <= 1e-5 && r.deformation_fd.1 >= full, || {
                    format!("{tag}: log-curvature deformation residual {:.3e}", r.deformation_fd.0)
                });
                g.ok(r.zm_log.0 <= 1e-6 && r.zm_log.1 >= full, || {
                    format!("{tag}: zero-mode log-derivative residual {:.3e}", r.zm_log.0)
                });
            }
        }
    }
    g.finish();
}

#[test]
fn a08_isospectrality() {
    let mut g = Gate::new("08", "eigensolver sanity and member isospectrality");
    // harmonic oscillator levels 1, 3, 5
    let harm = spectra::eigen_lowest(&|x: f64| x * x, (-12.0, 12.0), 4000, 3).unwrap();
    for (level, want) in harm.iter().zip([1.0, 3.0, 5.0]) {
        g.abs(&format!("harmonic level {}", level.index), level.value, want, 1e-3);
    }

    // the member's injected ground level sits at the factorization energy
    let gamma = -10.0;
    let eigen_box = (-5.0, 8.0);
    let ctx = family::build_context(
        Box::new(quartic_seed(0.0).unwrap()),
        eigen_box,
        Default::default(),
        2001,
    )
    .unwrap();
    let member = |x: f64| family::potential_member(&ctx, gamma, x).unwrap();
    let ground = spectra::eigen_lowest(&member, eigen_box, 4000, 1).unwrap()[0].value;
    g.abs("member ground level", ground, 0.0, 5e-3);

    let rz = razavy_seed(0.0).unwrap();
    let rz_ground =
        spectra::eigen_lowest(&|x: f64| rz.v1(x), (-4.5, 4.5), 4000, 1).unwrap()[0].value;
    g.abs("razavy seed ground level", rz_ground, RAZAVY_EPSILON, 5e-3);

    // lowest-4 agreement between seed and member, improving ~4x per 2x grid
    let v1 = |x: f64| ctx.seed().v1(x);
    let coarse = spectra::isospectral_report(&v1, &member, eigen_box, 4000, 4).unwrap();
    g.ok(coarse.max_delta < 1e-2, || format!("max delta {:.3e} at n=4000", coarse.max_delta));
    g.ok(coarse.offset == -1, || format!("offset {} (member gains one state)", coarse.offset));
    let fine = spectra::isospectral_report(&v1, &member, eigen_box, 8000, 4).unwrap();
    let ratio = coarse.max_delta / fine.max_delta;
    g.ok((2.5..8.0).contains(&ratio), || {
        format!("refinement ratio {ratio:.2} ({:.3e} -> {:.3e})", coarse.max_delta, fine.max_delta)
    });
    g.finish();
}

#[test]
fn a09_shift_covariance() {
    let mut g = Gate::new("09", "exact covariance map between shifted families");
    let base = quartic_ctx(0.0);
    let gs0 = base.gamma_s();
    for c in [-2.0, -1.0, 1.0, 2.0] {
        let mapped = analysis::mapped_parameter(&base, c, gs0).unwrap();
        let direct = quartic_ctx(c).gamma_s();
        g.rel(&format!("mapped gamma_s(c={c})"), mapped, direct, 1e-4);
    }
    let cr0 = analysis::critical_gamma(&base).unwrap().gamma_cr;
    let mapped_cr = analysis::mapped_parameter(&base, 1.0, cr0).unwrap();
    g.rel("mapped gamma_cr(c=1)", mapped_cr, -28.3, 0.015);
    g.finish();
}

#[test]
fn a10_deterministic_output() {
    let mut g = Gate::new("10", "byte-identical output on repeated runs");
    let run = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_isowell")).args(args).output().unwrap();
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let first = run(&["table1"]);
    let second = run(&["table1"]);
    g.ok(first == second, || "table1 stdout differs between runs".to_string());
    g.ok(!first.is_empty(), || "table1 produced no output".to_string());
    let fam1 = run(&["family", "--out", "-"]);
    let fam2 = run(&["family", "--out", "-"]);
    g.ok(fam1 == fam2, || "family stdout differs between runs".to_string());
    g.finish();
}
