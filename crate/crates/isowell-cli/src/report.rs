//! Serializable report shapes. Field order is the JSON key order, so it is
//! part of the output contract and must stay stable.

use serde::Serialize;

/// Reproducibility block attached to every JSON report: everything needed to
/// recompute the numbers in the file.
#[derive(Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: String,
    pub shift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    pub domain: [f64; 2],
    pub samples: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_limit: Option<f64>,
}

#[derive(Serialize)]
pub struct PlateauCheck {
    /// Limiting value of gamma(x) at this edge of the domain.
    pub gamma: f64,
    /// Whether the sampled gamma(x) table has converged to the limit at the
    /// edge (relative drift over the outer 5% of nodes below 1e-9).
    pub flat: bool,
}

#[derive(Serialize)]
pub struct PlateauChecks {
    /// `null` when the weight integral diverges on this side.
    pub left: Option<PlateauCheck>,
    pub right: Option<PlateauCheck>,
}

#[derive(Serialize)]
pub struct ThresholdsOut {
    pub provenance: Provenance,
    pub gamma_s: f64,
    /// "below_threshold": regular iff gamma < gamma_s.
    /// "outside_interval": regular iff gamma outside [interval].
    pub regular_side: &'static str,
    /// Range swept by gamma(x) on the working domain (the singular set).
    pub singular_gamma_range: [f64; 2],
    pub plateau_checks: PlateauChecks,
}

#[derive(Serialize)]
pub struct PeakOut {
    pub x: f64,
    pub psi2: f64,
}

#[derive(Serialize)]
pub struct PeaksAtCr {
    pub left_max: PeakOut,
    pub right_max: PeakOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_min: Option<PeakOut>,
}

#[derive(Serialize)]
pub struct CriticalOut {
    pub provenance: Provenance,
    pub gamma_cr: f64,
    /// [gamma_cr, gamma_s]: the parameter range where the zero mode piles up
    /// in the shallower well.
    pub alr_interval: [f64; 2],
    pub peaks_at_cr: PeaksAtCr,
}

#[derive(Serialize)]
pub struct NoCrossingOut {
    pub provenance: Provenance,
    pub no_crossing: bool,
    /// Most negative gamma probed before giving up.
    pub bracket_searched_to: f64,
}

#[derive(Serialize)]
pub struct LocalizeOut {
    pub provenance: Provenance,
    pub gamma: f64,
    pub norm: String,
    /// Weight integral |Gamma| entering the paper-mode constant (absent in
    /// l2 mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_weight_integral: Option<f64>,
    pub window: [f64; 2],
    pub split_x: f64,
    pub p_left: f64,
    pub p_right: f64,
    pub ratio: f64,
    pub sum: f64,
}

#[derive(Serialize)]
pub struct LevelPairOut {
    pub index: usize,
    pub first: f64,
    pub second: f64,
    pub delta: f64,
}

#[derive(Serialize)]
pub struct PairReportOut {
    /// Index shift applied to the first potential's levels when pairing:
    /// -1 means the second potential has one extra state below the first.
    pub offset: i32,
    pub max_delta: f64,
    pub levels: Vec<LevelPairOut>,
}

#[derive(Serialize)]
pub struct SpectrumOut {
    pub provenance: Provenance,
    pub box_domain: [f64; 2],
    pub n_points: usize,
    pub levels_compared: usize,
    /// (V1, V1gamma): strict isospectrality plus the injected zero mode.
    pub v1_vs_member: PairReportOut,
    /// (V1, V2): the factorization partners.
    pub v1_vs_partner: PairReportOut,
}

#[derive(Serialize)]
pub struct FamilyJsonOut {
    pub provenance: Provenance,
    pub columns: [&'static str; 9],
    /// One row per grid sample; masked (singular-adjacent) entries are null.
    pub rows: Vec<Vec<Option<f64>>>,
}
