//! Command-line front end for the isowell library: family member sampling,
//! regularity thresholds, critical parameters, localization splits, the
//! five-row shifted-quartic summary table, and spectral comparisons.

mod emit;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isowell::analysis::{self, AnalysisError, ZmExtremum};
use isowell::family::{
    self, build_context, FamilyContext, FamilyError, NormMode, RegularSet,
};
use isowell::grid::{GridError, QuadSettings};
use isowell::seeds::{quartic_seed, razavy_seed, RiccatiSeed, SeedError};
use isowell::spectra::{self, IsospectralReport, SpectraError};
use report::{
    CriticalOut, FamilyJsonOut, LevelPairOut, LocalizeOut, NoCrossingOut, PairReportOut,
    PeakOut, PeaksAtCr, PlateauCheck, PlateauChecks, Provenance, SpectrumOut, ThresholdsOut,
};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

// ---------------------------------------------------------------------------
// Error-to-exit-code mapping
// ---------------------------------------------------------------------------

/// 1 = I/O, 2 = bad arguments, 3 = singular-gamma refusal, 4 = numerical
/// failure (non-convergence, overflow, undersized box, missing structure).
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
    fn numeric(message: impl Into<String>) -> Self {
        Self { code: 4, message: message.into() }
    }
}

fn grid_code(e: &GridError) -> u8 {
    match e {
        GridError::InvalidInput(_) => 2,
        GridError::NonConvergence { .. } | GridError::NonFinite { .. } => 4,
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        let code = match &e {
            FamilyError::SingularGamma { .. } => 3,
            FamilyError::NormUndefined { .. } | FamilyError::InvalidInput(_) => 2,
            FamilyError::Overflow { .. } => 4,
            FamilyError::Grid(g) => grid_code(g),
            FamilyError::Seed(_) => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Family(f) => f.into(),
            AnalysisError::Grid(ref g) => Self { code: grid_code(g), message: e.to_string() },
            AnalysisError::NoCrossing { .. }
            | AnalysisError::OnePeak { .. }
            | AnalysisError::Degenerate { .. }
            | AnalysisError::PoleAtTurningPoint { .. } => Self::numeric(e.to_string()),
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        match &e {
            SpectraError::DomainTooSmall { .. } => Self::numeric(e.to_string()),
            SpectraError::InvalidInput(_) => Self::usage(e.to_string()),
        }
    }
}

impl From<SeedError> for CliError {
    fn from(e: SeedError) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self { code: 1, message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self { code: 1, message: e.to_string() }
    }
}

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SeedKind {
    Quartic,
    Razavy,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum NormKind {
    L2,
    Paper,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatKind {
    Csv,
    Json,
    Svg,
}

#[derive(Parser)]
#[command(
    name = "isowell",
    version,
    about = "One-parameter isospectral families of double-well potentials",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample every column of one or more family members to CSV/JSON/SVG
    Family(FamilyArgs),
    /// Report the regularity threshold gamma_s and the gamma(x) plateaus
    Thresholds(RegionArgs),
    /// Find the equal-peak-height parameter gamma_cr and the ALR interval
    Critical(RegionArgs),
    /// Split the zero-mode probability at the inter-peak minimum
    Localize(LocalizeArgs),
    /// Recompute the five-row shifted-quartic summary table as CSV
    Table1(Table1Args),
    /// Compare the low-lying spectra of V1, V1gamma, and V2
    Spectrum(SpectrumArgs),
}

#[derive(Args)]
struct CoreArgs {
    /// Seed family
    #[arg(long, value_enum, default_value_t = SeedKind::Quartic)]
    seed: SeedKind,
    /// Horizontal shift c applied to the seed
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    shift: f64,
    /// Number of grid nodes (minimum 201)
    #[arg(long, default_value_t = 2001)]
    samples: usize,
    /// Absolute quadrature tolerance
    #[arg(long = "abs-tol", default_value_t = 1e-10)]
    abs_tol: f64,
    /// Relative quadrature tolerance
    #[arg(long = "rel-tol", default_value_t = 1e-10)]
    rel_tol: f64,
}

#[derive(Args)]
struct FamilyArgs {
    #[command(flatten)]
    core: CoreArgs,
    /// Working domain "a,b" (defaults to the seed's recommended domain)
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// One gamma value or a comma-separated list (default: the seed's
    /// reference case)
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Zero-mode normalization
    #[arg(long, value_enum, default_value_t = NormKind::L2)]
    norm: NormKind,
    /// Lower limit of the weight integral |Gamma| (paper norm only)
    #[arg(long = "lower-limit", allow_hyphen_values = true)]
    lower_limit: Option<f64>,
    /// Emit singular members unnormalized, masking pole-adjacent samples
    #[arg(long = "allow-singular")]
    allow_singular: bool,
    /// Output file ("-" for stdout, one gamma only) or directory; defaults
    /// to $ISOWELL_OUT_DIR or the current directory
    #[arg(long)]
    out: Option<String>,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatKind::Csv)]
    format: FormatKind,
    /// Columns drawn in SVG output, comma-separated (svg format only)
    #[arg(long)]
    columns: Option<String>,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    core: CoreArgs,
    /// Working domain "a,b" (defaults to the seed's recommended domain)
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Output file for the JSON report (default: stdout)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct LocalizeArgs {
    #[command(flatten)]
    core: CoreArgs,
    /// Working domain "a,b" (defaults to the seed's recommended domain)
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Family parameter (default: the seed's reference case)
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Zero-mode normalization
    #[arg(long, value_enum, default_value_t = NormKind::Paper)]
    norm: NormKind,
    /// Lower limit of the weight integral |Gamma| (paper norm only)
    #[arg(long = "lower-limit", allow_hyphen_values = true)]
    lower_limit: Option<f64>,
    /// Probability window "a,b" (defaults: paper norm shift+-3, l2 the whole
    /// domain)
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Output file for the JSON report (default: stdout)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct Table1Args {
    /// Seed family (the summary table is defined for the quartic only)
    #[arg(long, value_enum, default_value_t = SeedKind::Quartic)]
    seed: SeedKind,
    /// Number of grid nodes per row context (minimum 201)
    #[arg(long, default_value_t = 2001)]
    samples: usize,
    /// Absolute quadrature tolerance
    #[arg(long = "abs-tol", default_value_t = 1e-10)]
    abs_tol: f64,
    /// Relative quadrature tolerance
    #[arg(long = "rel-tol", default_value_t = 1e-10)]
    rel_tol: f64,
    /// Output file for the CSV table (default: stdout)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    core: CoreArgs,
    /// Family parameter (default: the seed's reference case)
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Hard-wall box "a,b" for the eigensolver (defaults: quartic
    /// shift-5,shift+8; razavy shift-4.5,shift+4.5)
    #[arg(long = "box", allow_hyphen_values = true)]
    eigen_box: Option<String>,
    /// Number of paired levels to compare
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Finite-difference grid points including the walls
    #[arg(long = "n-points", default_value_t = 4000)]
    n_points: usize,
    /// Output file for the JSON report (default: stdout)
    #[arg(long)]
    out: Option<String>,
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn seed_name(kind: SeedKind) -> &'static str {
    match kind {
        SeedKind::Quartic => "quartic",
        SeedKind::Razavy => "razavy",
    }
}

fn default_gamma(kind: SeedKind) -> f64 {
    match kind {
        SeedKind::Quartic => -7.0,
        SeedKind::Razavy => -51.0,
    }
}

fn make_seed(kind: SeedKind, shift: f64) -> Result<Box<dyn RiccatiSeed>, CliError> {
    Ok(match kind {
        SeedKind::Quartic => Box::new(quartic_seed(shift)?),
        SeedKind::Razavy => Box::new(razavy_seed(shift)?),
    })
}

fn parse_pair(s: &str, flag: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(CliError::usage(format!("{flag}: expected \"a,b\", got \"{s}\"")));
    }
    let mut vals = [0.0; 2];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p
            .parse::<f64>()
            .map_err(|_| CliError::usage(format!("{flag}: could not parse \"{p}\" as a number")))?;
        if !v.is_finite() {
            return Err(CliError::usage(format!("{flag}: \"{p}\" is not finite")));
        }
    }
    if !(vals[0] < vals[1]) {
        return Err(CliError::usage(format!("{flag}: need a < b, got {} >= {}", vals[0], vals[1])));
    }
    Ok((vals[0], vals[1]))
}

fn parse_gamma_list(s: &Option<String>, kind: SeedKind) -> Result<Vec<f64>, CliError> {
    let Some(t) = s else {
        return Ok(vec![default_gamma(kind)]);
    };
    let mut out = Vec::new();
    for p in t.split(',').map(str::trim) {
        let v = p
            .parse::<f64>()
            .map_err(|_| CliError::usage(format!("--gamma: could not parse \"{p}\" as a number")))?;
        if !v.is_finite() {
            return Err(CliError::usage(format!("--gamma: \"{p}\" is not finite")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::usage("--gamma: the list is empty"));
    }
    Ok(out)
}

fn parse_gamma_one(s: &Option<String>, kind: SeedKind) -> Result<f64, CliError> {
    let list = parse_gamma_list(s, kind)?;
    if list.len() != 1 {
        return Err(CliError::usage("--gamma: this command takes exactly one value"));
    }
    Ok(list[0])
}

fn make_quad(core: &CoreArgs) -> QuadSettings {
    QuadSettings { abs_tol: core.abs_tol, rel_tol: core.rel_tol, ..QuadSettings::default() }
}

fn make_context(core: &CoreArgs, domain: &Option<String>) -> Result<FamilyContext, CliError> {
    let seed = make_seed(core.seed, core.shift)?;
    let domain = match domain {
        Some(s) => parse_pair(s, "--domain")?,
        None => seed.default_domain(),
    };
    build_context(seed, domain, make_quad(core), core.samples).map_err(|e| match e {
        FamilyError::InvalidInput(m) => {
            CliError::usage(format!("{m} (check --domain / --samples / --shift)"))
        }
        other => other.into(),
    })
}

fn norm_mode(kind: NormKind, lower_limit: Option<f64>) -> Result<NormMode, CliError> {
    match kind {
        NormKind::L2 => {
            if lower_limit.is_some() {
                Err(CliError::usage("--lower-limit requires --norm paper"))
            } else {
                Ok(NormMode::L2)
            }
        }
        NormKind::Paper => Ok(NormMode::Paper { lower_limit }),
    }
}

#[allow(clippy::too_many_arguments)]
fn provenance(
    command: &str,
    core: &CoreArgs,
    domain: (f64, f64),
    gamma: Option<f64>,
    gammas: Option<Vec<f64>>,
    norm: Option<&NormMode>,
    lower_limit: Option<f64>,
) -> Provenance {
    Provenance {
        tool: "isowell",
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        seed: seed_name(core.seed).to_string(),
        shift: core.shift,
        gamma,
        gammas,
        domain: [domain.0, domain.1],
        samples: core.samples,
        abs_tol: core.abs_tol,
        rel_tol: core.rel_tol,
        norm: norm.map(|n| n.as_str().to_string()),
        lower_limit,
    }
}

fn render_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes to stdout when `out` is `None` or "-", otherwise to the file.
fn emit_text(content: &str, out: &Option<String>) -> Result<(), CliError> {
    match out.as_deref() {
        None | Some("-") => {
            print!("{content}");
            Ok(())
        }
        Some(p) => {
            std::fs::write(p, content)?;
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// family
// ---------------------------------------------------------------------------

enum FamilySink {
    Stdout,
    File(PathBuf),
    Dir(PathBuf),
}

fn family_sink(out: &Option<String>, n_gammas: usize) -> Result<FamilySink, CliError> {
    match out.as_deref() {
        Some("-") => {
            if n_gammas != 1 {
                Err(CliError::usage("--out -: stdout output takes exactly one --gamma value"))
            } else {
                Ok(FamilySink::Stdout)
            }
        }
        Some(p) => {
            let path = Path::new(p);
            if p.ends_with('/') || path.is_dir() {
                Ok(FamilySink::Dir(path.to_path_buf()))
            } else if n_gammas == 1 {
                Ok(FamilySink::File(path.to_path_buf()))
            } else {
                Err(CliError::usage(
                    "--out: names a single file but --gamma lists several values; pass a directory",
                ))
            }
        }
        None => {
            let dir = std::env::var_os("ISOWELL_OUT_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            Ok(FamilySink::Dir(dir))
        }
    }
}

fn format_ext(format: FormatKind) -> &'static str {
    match format {
        FormatKind::Csv => "csv",
        FormatKind::Json => "json",
        FormatKind::Svg => "svg",
    }
}

fn cmd_family(a: &FamilyArgs) -> Result<(), CliError> {
    let columns = match (&a.columns, a.format) {
        (None, _) => vec![emit::column_index("psi2").expect("psi2 is a column")],
        (Some(_), FormatKind::Csv | FormatKind::Json) => {
            return Err(CliError::usage("--columns applies to --format svg only"));
        }
        (Some(s), FormatKind::Svg) => {
            let mut idx = Vec::new();
            for name in s.split(',').map(str::trim) {
                idx.push(emit::column_index(name).ok_or_else(|| {
                    CliError::usage(format!(
                        "--columns: unknown column \"{name}\" (available: {})",
                        emit::FAMILY_HEADER.join(", ")
                    ))
                })?);
            }
            idx
        }
    };
    let norm = norm_mode(a.norm, a.lower_limit)?;
    let ctx = make_context(&a.core, &a.domain)?;
    let gammas = parse_gamma_list(&a.gamma, a.core.seed)?;
    let sink = family_sink(&a.out, gammas.len())?;
    let xs = ctx.nodes().to_vec();

    for &g in &gammas {
        let rows = family::sample_member(&ctx, g, &xs, norm, a.allow_singular)?;
        let content = match a.format {
            FormatKind::Csv => emit::family_csv(&rows),
            FormatKind::Json => {
                let out = FamilyJsonOut {
                    provenance: provenance(
                        "family",
                        &a.core,
                        ctx.domain(),
                        Some(g),
                        None,
                        Some(&norm),
                        a.lower_limit,
                    ),
                    columns: emit::FAMILY_HEADER,
                    rows: rows
                        .iter()
                        .map(|r| {
                            emit::row_values(r)
                                .iter()
                                .map(|v| v.is_finite().then_some(*v))
                                .collect()
                        })
                        .collect(),
                };
                render_json(&out)?
            }
            FormatKind::Svg => {
                let title = format!(
                    "{} member, shift {}, gamma {}",
                    seed_name(a.core.seed),
                    a.core.shift,
                    g
                );
                emit::family_svg(&rows, &columns, &title)
                    .ok_or_else(|| CliError::numeric("no finite samples to plot"))?
            }
        };
        match &sink {
            FamilySink::Stdout => print!("{content}"),
            FamilySink::File(p) => {
                std::fs::write(p, content)?;
                println!("{}", p.display());
            }
            FamilySink::Dir(d) => {
                let name = format!(
                    "family_{}_c{}_gamma{}.{}",
                    seed_name(a.core.seed),
                    a.core.shift,
                    g,
                    format_ext(a.format)
                );
                let p = d.join(name);
                std::fs::write(&p, content)?;
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// thresholds / critical
// ---------------------------------------------------------------------------

fn plateau_check(ctx: &FamilyContext, plateau: Option<f64>, left: bool) -> Option<PlateauCheck> {
    let p = plateau?;
    let ys = ctx.gamma_of_x().ys();
    let n = ys.len();
    let m = (n / 20).max(2).min(n - 1);
    let (edge, inner) = if left { (ys[0], ys[m]) } else { (ys[n - 1], ys[n - 1 - m]) };
    Some(PlateauCheck { gamma: p, flat: (edge - inner).abs() <= 1e-9 * (1.0 + p.abs()) })
}

fn cmd_thresholds(a: &RegionArgs) -> Result<(), CliError> {
    let ctx = make_context(&a.core, &a.domain)?;
    let set = family::regular_gamma_range(&ctx);
    let (pl, pr) = ctx.plateaus();
    let (inf, sup) = ctx.gamma_range();
    let out = ThresholdsOut {
        provenance: provenance("thresholds", &a.core, ctx.domain(), None, None, None, None),
        gamma_s: ctx.gamma_s(),
        regular_side: match set {
            RegularSet::Below { .. } => "below_threshold",
            RegularSet::Outside { .. } => "outside_interval",
        },
        singular_gamma_range: [inf, sup],
        plateau_checks: PlateauChecks {
            left: plateau_check(&ctx, pl, true),
            right: plateau_check(&ctx, pr, false),
        },
    };
    emit_text(&render_json(&out)?, &a.out)
}

fn peak_out(e: &ZmExtremum) -> PeakOut {
    PeakOut { x: e.x, psi2: e.psi2 }
}

fn cmd_critical(a: &RegionArgs) -> Result<(), CliError> {
    let ctx = make_context(&a.core, &a.domain)?;
    let prov = provenance("critical", &a.core, ctx.domain(), None, None, None, None);
    let rendered = match analysis::critical_gamma(&ctx) {
        Ok(cr) => {
            let out = CriticalOut {
                provenance: prov,
                gamma_cr: cr.gamma_cr,
                alr_interval: [cr.gamma_cr, ctx.gamma_s()],
                peaks_at_cr: PeaksAtCr {
                    left_max: peak_out(&cr.left_max),
                    right_max: peak_out(&cr.right_max),
                    local_min: cr.local_min.as_ref().map(peak_out),
                },
            };
            render_json(&out)?
        }
        Err(AnalysisError::NoCrossing { gamma_last }) => {
            let out = NoCrossingOut {
                provenance: prov,
                no_crossing: true,
                bracket_searched_to: gamma_last,
            };
            render_json(&out)?
        }
        Err(e) => return Err(e.into()),
    };
    emit_text(&rendered, &a.out)
}

// ---------------------------------------------------------------------------
// localize
// ---------------------------------------------------------------------------

fn cmd_localize(a: &LocalizeArgs) -> Result<(), CliError> {
    let norm = norm_mode(a.norm, a.lower_limit)?;
    let ctx = make_context(&a.core, &a.domain)?;
    let gamma = parse_gamma_one(&a.gamma, a.core.seed)?;
    let window = a.window.as_deref().map(|s| parse_pair(s, "--window")).transpose()?;
    let loc = analysis::localization(&ctx, gamma, window, norm)?;
    let gamma_weight_integral = match norm {
        NormMode::Paper { lower_limit } => {
            Some(family::norm_gamma_integral(&ctx, lower_limit)?.abs())
        }
        NormMode::L2 => None,
    };
    let out = LocalizeOut {
        provenance: provenance(
            "localize",
            &a.core,
            ctx.domain(),
            Some(gamma),
            None,
            Some(&norm),
            a.lower_limit,
        ),
        gamma,
        norm: loc.norm_mode.as_str().to_string(),
        gamma_weight_integral,
        window: [loc.window.0, loc.window.1],
        split_x: loc.split_x,
        p_left: loc.p_left,
        p_right: loc.p_right,
        ratio: loc.ratio,
        sum: loc.p_left + loc.p_right,
    };
    emit_text(&render_json(&out)?, &a.out)
}

// ---------------------------------------------------------------------------
// table1
// ---------------------------------------------------------------------------

/// Published reference values for the shifted quartic family, one row per
/// shift: (c, gamma_s, gamma_cr, left max x, right max x, local min x).
const PUBLISHED_ROWS: [(f64, f64, f64, f64, f64, f64); 5] = [
    (-2.0, -0.1416, -9.1, -4.4, -0.63, -3.11),
    (-1.0, -0.5648, -1.2, -3.4, 0.35, -2.11),
    (0.0, -4.6310, -7.0, -2.4, 1.36, -1.02),
    (1.0, -19.3694, -28.3, -1.4, 2.35, -0.10),
    (2.0, -1.5719, -2.2, -0.4, 3.35, 0.91),
];

pub const TABLE1_HEADER: &str =
    "c,gamma_s,gamma_cr,left_max,right_max,local_min,delta_vs_paper_percent,covariance_rel_err";

fn cmd_table1(a: &Table1Args) -> Result<(), CliError> {
    if a.seed != SeedKind::Quartic {
        return Err(CliError::usage("--seed: the summary table is defined for quartic only"));
    }
    if a.samples < 201 {
        return Err(CliError::usage(format!("--samples: need at least 201, got {}", a.samples)));
    }
    let quad = QuadSettings { abs_tol: a.abs_tol, rel_tol: a.rel_tol, ..QuadSettings::default() };
    let row_context = |c: f64| -> Result<FamilyContext, CliError> {
        let seed = quartic_seed(c)?;
        let domain = seed.default_domain();
        Ok(build_context(Box::new(seed), domain, quad, a.samples)?)
    };
    let base = row_context(0.0)?;
    let gs0 = base.gamma_s();

    let mut table = String::from(TABLE1_HEADER);
    table.push('\n');
    for &(c, r_gs, r_gcr, r_xl, r_xr, r_xmin) in &PUBLISHED_ROWS {
        let row = (|| -> Result<String, CliError> {
            let ctx = row_context(c)?;
            let gs = ctx.gamma_s();
            let cr = analysis::critical_gamma(&ctx)?;
            let xmin = cr.local_min.map(|e| e.x).unwrap_or(f64::NAN);
            let mapped_gs = analysis::mapped_parameter(&base, c, gs0)?;
            let cov_rel = (mapped_gs - gs).abs() / gs.abs();
            let cells = [
                (gs, r_gs),
                (cr.gamma_cr, r_gcr),
                (cr.left_max.x, r_xl),
                (cr.right_max.x, r_xr),
                (xmin, r_xmin),
            ];
            let delta_pct = cells
                .iter()
                .map(|(got, reference)| 100.0 * ((got - reference) / reference).abs())
                .fold(0.0_f64, f64::max);
            Ok(format!(
                "{c},{},{},{},{},{},{},{}\n",
                emit::sig12(gs),
                emit::sig12(cr.gamma_cr),
                emit::sig12(cr.left_max.x),
                emit::sig12(cr.right_max.x),
                emit::sig12(xmin),
                emit::sig12(delta_pct),
                emit::sig12(cov_rel),
            ))
        })();
        match row {
            Ok(line) => table.push_str(&line),
            Err(e) => {
                eprintln!("table1: row c={c} failed: {}", e.message);
                table.push_str(&format!("{c},nan,nan,nan,nan,nan,nan,nan\n"));
            }
        }
    }
    emit_text(&table, &a.out)
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

fn pair_report_out(r: &IsospectralReport) -> PairReportOut {
    PairReportOut {
        offset: r.offset,
        max_delta: r.max_delta,
        levels: r
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| LevelPairOut { index: i, first: p.e_a, second: p.e_b, delta: p.delta })
            .collect(),
    }
}

fn cmd_spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let gamma = parse_gamma_one(&a.gamma, a.core.seed)?;
    let eigen_box = match &a.eigen_box {
        Some(s) => parse_pair(s, "--box")?,
        None => match a.core.seed {
            SeedKind::Quartic => (a.core.shift - 5.0, a.core.shift + 8.0),
            SeedKind::Razavy => (a.core.shift - 4.5, a.core.shift + 4.5),
        },
    };
    let seed = make_seed(a.core.seed, a.core.shift)?;
    let ctx = build_context(seed, eigen_box, make_quad(&a.core), a.core.samples).map_err(
        |e| match e {
            FamilyError::InvalidInput(m) => {
                CliError::usage(format!("{m} (check --box / --samples / --shift)"))
            }
            other => other.into(),
        },
    )?;
    if !ctx.is_regular(gamma) {
        let (inf, sup) = ctx.gamma_range();
        return Err(FamilyError::SingularGamma { gamma, inf, sup }.into());
    }
    let member = |x: f64| {
        family::potential_member(&ctx, gamma, x).expect("member potential is defined in the box")
    };
    let v1 = |x: f64| ctx.seed().v1(x);
    let v2 = |x: f64| ctx.seed().v2(x);
    let vs_member = spectra::isospectral_report(&v1, &member, eigen_box, a.n_points, a.k)?;
    let vs_partner = spectra::isospectral_report(&v1, &v2, eigen_box, a.n_points, a.k)?;
    let out = SpectrumOut {
        provenance: provenance(
            "spectrum",
            &a.core,
            ctx.domain(),
            Some(gamma),
            None,
            None,
            None,
        ),
        box_domain: [eigen_box.0, eigen_box.1],
        n_points: a.n_points,
        levels_compared: a.k,
        v1_vs_member: pair_report_out(&vs_member),
        v1_vs_partner: pair_report_out(&vs_partner),
    };
    emit_text(&render_json(&out)?, &a.out)
}

// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Family(a) => cmd_family(a),
        Cmd::Thresholds(a) => cmd_thresholds(a),
        Cmd::Critical(a) => cmd_critical(a),
        Cmd::Localize(a) => cmd_localize(a),
        Cmd::Table1(a) => cmd_table1(a),
        Cmd::Spectrum(a) => cmd_spectrum(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
