//! Colopsidedness oracles: a sequence of unit complex numbers is colopsided
//! when the origin is not in the relative interior of its convex hull.
//!
//! Two independent routes are provided: an exact angular-gap test and an LP
//! over convex weights. They must agree away from the epsilon boundary band,
//! which is exercised by property tests.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::matrix::PhaseMatrix;
use crate::solver::{solve_lp, Bound, LinearProgram, Status};
use crate::tol::{BOUNDARY_BAND, EPS_ANGLE, EPS_LP, EPS_MINOR};

/// Red/blue tags used for the determinant monomials of a 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointLabel {
    Red,
    Blue,
}

/// An ordered list of points on the unit circle, stored as angles.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitPointSet {
    points: Vec<Angle>,
    labels: Option<Vec<PointLabel>>,
}

impl UnitPointSet {
    pub fn new(points: Vec<Angle>) -> Self {
        UnitPointSet { points, labels: None }
    }

    pub fn with_labels(points: Vec<Angle>, labels: Vec<PointLabel>) -> Self {
        assert_eq!(points.len(), labels.len());
        UnitPointSet {
            points,
            labels: Some(labels),
        }
    }

    pub fn points(&self) -> &[Angle] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[PointLabel]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Largest circular gap between consecutive sorted angles, in `[0, 2*pi]`.
/// A single point has gap `2*pi`.
pub fn largest_circular_gap(angles: &[Angle]) -> f64 {
    debug_assert!(!angles.is_empty());
    if angles.len() == 1 {
        return TAU;
    }
    let mut sorted: Vec<f64> = angles.iter().map(|a| a.value()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut max_gap = TAU - sorted[sorted.len() - 1] + sorted[0];
    for w in sorted.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    max_gap
}

/// Signed colopsidedness margin of three points: largest circular gap minus
/// pi. Nonnegative means the points sit in a closed half-plane.
pub fn gap_margin(angles: &[Angle]) -> f64 {
    largest_circular_gap(angles) - PI
}

fn all_collinear(points: &[Angle]) -> bool {
    points
        .iter()
        .all(|p| p.dist_mod_pi(points[0]) <= EPS_ANGLE)
}

/// Angular-gap colopsidedness oracle: true iff the origin is not in the
/// relative interior of the convex hull of the points.
///
/// Collinear configurations (all angles equal mod pi) are colopsided exactly
/// when all points coincide in direction; otherwise the test reduces to the
/// largest circular gap reaching pi.
pub fn is_colopsided_gap(set: &UnitPointSet) -> Result<bool> {
    let points = set.points();
    if points.is_empty() {
        return Err(Error::Domain("colopsidedness of an empty set".into()));
    }
    if all_collinear(points) {
        let coincide = points
            .iter()
            .all(|p| p.circ_dist(points[0]) <= EPS_ANGLE);
        return Ok(coincide);
    }
    Ok(largest_circular_gap(points) >= PI - EPS_ANGLE)
}

/// Outcome of the relative-interior LP.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelintResult {
    pub in_relint: bool,
    /// Strictly positive convex weights reconstructing the origin, present
    /// when `in_relint`.
    pub weights: Option<Vec<f64>>,
    /// The LP optimum `t*` (negative infinity when the origin is not even in
    /// the affine hull of the points).
    pub margin: f64,
}

impl RelintResult {
    /// Margins inside the boundary band are decided by sign but flagged.
    pub fn is_boundary(&self) -> bool {
        self.margin.is_finite() && self.margin.abs() <= BOUNDARY_BAND
    }
}

/// LP relative-interior oracle: solves `max t` subject to
/// `sum lambda_k p_k = 0`, `sum lambda_k = 1`, `lambda_k >= t`, and reports
/// the origin as interior when `t* > eps`.
pub fn relint_contains_origin(set: &UnitPointSet) -> Result<RelintResult> {
    let points = set.points();
    if points.is_empty() {
        return Err(Error::Domain("relative interior of an empty set".into()));
    }
    let k = points.len();
    // Substitute lambda_k = t + s_k with s_k >= 0 and t free.
    let sx: f64 = points.iter().map(|p| p.cos()).sum();
    let sy: f64 = points.iter().map(|p| p.sin()).sum();
    let mut a = vec![vec![0.0; k + 1]; 3];
    a[0][0] = sx;
    a[1][0] = sy;
    a[2][0] = k as f64;
    for (j, p) in points.iter().enumerate() {
        a[0][j + 1] = p.cos();
        a[1][j + 1] = p.sin();
        a[2][j + 1] = 1.0;
    }
    let mut objective = vec![0.0; k + 1];
    objective[0] = -1.0;
    let mut lower = vec![Bound::Finite(0.0); k + 1];
    lower[0] = Bound::NegInf;
    let lp = LinearProgram {
        objective,
        a_eq: a,
        b_eq: vec![0.0, 0.0, 1.0],
        lower,
    };
    let sol = solve_lp(&lp, EPS_LP)?;
    match sol.status {
        Status::Optimal => {
            let t = sol.x[0];
            let in_relint = t > EPS_LP;
            // lambda_k = t + s_k
            let weights = in_relint.then(|| (0..k).map(|j| t + sol.x[j + 1]).collect());
            Ok(RelintResult {
                in_relint,
                weights,
                margin: t,
            })
        }
        // Infeasible: the origin is not in the affine hull of the points.
        Status::Infeasible => Ok(RelintResult {
            in_relint: false,
            weights: None,
            margin: f64::NEG_INFINITY,
        }),
        Status::Unbounded => Err(Error::Solver(
            "relative-interior LP reported unbounded".into(),
        )),
        Status::NumericalFailure => Err(Error::Solver(format!(
            "relative-interior LP failed after {} iterations",
            sol.iterations
        ))),
    }
}

/// True iff every 2x2 minor of the unit-entry matrix vanishes, equivalently
/// all angle relations `phi_ij + phi_kl = phi_il + phi_kj (mod 2*pi)` hold.
pub fn phase_rank_is_one(theta: &PhaseMatrix) -> bool {
    // Checking minors against row 0 / column 0 suffices.
    for i in 1..theta.rows() {
        for j in 1..theta.cols() {
            let rel = theta.angle(0, 0) + theta.angle(i, j) - theta.angle(0, j) - theta.angle(i, 0);
            // |e^{i rel} - 1| <= eps  <=>  2|sin(rel/2)| <= eps
            if 2.0 * (rel.value() / 2.0).sin().abs() > EPS_MINOR {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::canonical_angle;
    use proptest::prelude::*;

    fn set(angles: &[f64]) -> UnitPointSet {
        UnitPointSet::new(angles.iter().map(|&a| canonical_angle(a).unwrap()).collect())
    }

    #[test]
    fn gap_oracle_examples() {
        // {1, -1}: origin in relint of the segment
        assert!(!is_colopsided_gap(&set(&[0.0, PI])).unwrap());
        // {1, i}: open half-plane
        assert!(is_colopsided_gap(&set(&[0.0, PI / 2.0])).unwrap());
        // {1, i, -1}: origin on the hull boundary, not relint
        assert!(is_colopsided_gap(&set(&[0.0, PI / 2.0, PI])).unwrap());
        // determinant monomials of a colopsided 3x3 matrix
        assert!(is_colopsided_gap(&set(&[
            3.0 * PI / 2.0,
            -PI / 2.0,
            -PI / 2.0,
            3.0 * PI / 4.0 + PI,
            3.0 * PI / 4.0 + PI,
            0.0,
        ]))
        .unwrap());
        // single point
        assert!(is_colopsided_gap(&set(&[1.2])).unwrap());
        // empty set is a domain error
        assert!(is_colopsided_gap(&UnitPointSet::new(vec![])).is_err());
    }

    #[test]
    fn relint_examples() {
        let r = relint_contains_origin(&set(&[0.0, PI])).unwrap();
        assert!(r.in_relint);
        let w = r.weights.unwrap();
        assert!((w[0] - 0.5).abs() < 1e-9 && (w[1] - 0.5).abs() < 1e-9);

        let r = relint_contains_origin(&set(&[0.0, PI / 2.0])).unwrap();
        assert!(!r.in_relint);

        let th = 2.0 * PI / 3.0;
        let r = relint_contains_origin(&set(&[0.0, th, 2.0 * th])).unwrap();
        assert!(r.in_relint);
        for w in r.weights.unwrap() {
            assert!((w - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn relint_weights_reconstruct_origin() {
        let r = relint_contains_origin(&set(&[0.1, 2.0, 4.0, 5.5])).unwrap();
        if let Some(w) = &r.weights {
            let (mut x, mut y, mut s) = (0.0, 0.0, 0.0);
            for (wk, p) in w.iter().zip(set(&[0.1, 2.0, 4.0, 5.5]).points()) {
                x += wk * p.cos();
                y += wk * p.sin();
                s += wk;
                assert!(*wk > 0.0);
            }
            assert!((s - 1.0).abs() <= 1e-12);
            assert!((x * x + y * y).sqrt() <= 1e-9);
        }
    }

    #[test]
    fn rank_one_examples() {
        let ones = PhaseMatrix::from_radians(&vec![vec![0.0; 3]; 3]).unwrap();
        assert!(phase_rank_is_one(&ones));

        // outer product pattern (0, pi/3, pi/2)^T (0, pi/4)
        let r = [0.0, PI / 3.0, PI / 2.0];
        let c = [0.0, PI / 4.0];
        let outer: Vec<Vec<f64>> = r.iter().map(|a| c.iter().map(|b| a + b).collect()).collect();
        assert!(phase_rank_is_one(&PhaseMatrix::from_radians(&outer).unwrap()));

        let ex12 = PhaseMatrix::from_radians(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, PI / 2.0, -PI / 2.0],
            vec![0.0, 0.0, PI / 2.0],
        ])
        .unwrap();
        assert!(!phase_rank_is_one(&ex12));
    }

    #[test]
    fn rank_one_invariant_under_scaling_and_permutation() {
        let m = PhaseMatrix::from_radians(&[
            vec![0.1, 0.4, 1.0],
            vec![0.6, 0.9, 1.5],
            vec![2.0, 2.3, 2.9],
        ])
        .unwrap();
        assert!(phase_rank_is_one(&m));
        let scaled = m.scale_row(1, canonical_angle(0.77).unwrap()).scale_col(2, canonical_angle(5.1).unwrap());
        assert!(phase_rank_is_one(&scaled));
        let permuted = m.permute_rows(&[2, 0, 1]).permute_cols(&[1, 0, 2]);
        assert!(phase_rank_is_one(&permuted));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn oracles_agree_off_boundary(angles in prop::collection::vec(0.0..TAU, 2..=8)) {
            let s = set(&angles);
            let relint = relint_contains_origin(&s).unwrap();
            let margin = relint.margin;
            // only compare outside the boundary band
            if margin.is_infinite() || margin.abs() > 10.0 * EPS_LP {
                let gap = is_colopsided_gap(&s).unwrap();
                prop_assert_eq!(gap, !relint.in_relint);
            }
        }
    }
}
