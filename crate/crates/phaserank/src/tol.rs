//! Numeric tolerances used across the crate.
//!
//! Inputs are typically exact multiples of pi/12, so 1e-9 cleanly separates
//! legitimate boundary cases from accumulated float noise.

/// Angular comparisons (circular gaps, collinearity checks), in radians.
pub const EPS_ANGLE: f64 = 1e-9;

/// Positivity threshold for the relative-interior LP margin.
pub const EPS_LP: f64 = 1e-9;

/// Vanishing threshold for 2x2 minors in the rank-one test.
pub const EPS_MINOR: f64 = 1e-9;

/// LP margins within `BOUNDARY_BAND` of zero are flagged as boundary cases;
/// decisions still resolve by the sign of the margin.
pub const BOUNDARY_BAND: f64 = 10.0 * EPS_LP;

/// Euclidean dedup tolerance for plotted monomial points.
pub const EPS_DEDUP: f64 = 1e-9;

/// Default duality-gap target for semidefinite solves.
pub const SDP_TOL: f64 = 1e-9;
