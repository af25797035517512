//! Isospectral families of one-dimensional double-well potentials.
//!
//! Starting from a particular solution F(x) of the Riccati pair
//!
//! ```text
//!   -F' + F^2 = V1 - eps_f        F' + F^2 = V2 - eps_f
//! ```
//!
//! this crate constructs the one-parameter family of potentials
//! V_1gamma(x) = V1(x) - 2 (ln |gamma - gamma(x)|)'' that all share the
//! spectrum of V1 (up to one extra bound state), together with the
//! family's zero modes, regularity thresholds, critical parameters where
//! the double-well becomes degenerate, asymmetric-localization diagnostics,
//! and a small matrix eigensolver to verify isospectrality numerically.
//!
//! Modules build on each other in order: [`grid`] (quadrature, tabulation,
//! root and extremum finding), [`seeds`] (the shifted quartic and Razavy
//! Riccati seeds), [`family`] (gamma(x), members, zero modes), [`analysis`]
//! (thresholds, critical parameters, localization), and [`spectra`]
//! (finite-difference eigenvalues and isospectrality reports).

pub mod analysis;
pub mod family;
pub mod grid;
pub mod seeds;
pub mod spectra;
