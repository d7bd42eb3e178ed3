//! Signed determinant-monomial phase vectors of square phase matrices and
//! the matrix-level colopsidedness certificate.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::colop::{is_colopsided_gap, PointLabel, UnitPointSet};
use crate::error::{Error, Result};
use crate::matrix::PhaseMatrix;
use crate::tol::EPS_DEDUP;

/// Hard cap on the matrix size; 8! = 40320 terms. Sizes 5 and above are
/// known phase-singular anyway, so certificates matter only for n <= 4; the
/// cap leaves headroom for experimentation.
pub const MAX_DET_SIZE: usize = 8;

/// One signed monomial of the determinant expansion. The stored phase is
/// the actual unit complex value of the signed term: the entry-phase sum,
/// plus pi when the permutation is odd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetTerm {
    pub permutation: Vec<usize>,
    pub sign: i8,
    pub phase: Angle,
}

/// The vector of all `n!` signed determinant monomials evaluated at a phase
/// matrix. For `n = 3` the term order is fixed: the three even permutations
/// (identity and both 3-cycles) followed by the three transpositions, so the
/// first three terms are the "red" points and the last three the "blue".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetMonomialVector {
    pub n: usize,
    pub terms: Vec<DetTerm>,
}

/// Display order of the six 3x3 monomials (even triple then odd triple).
const ORDER_3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 2, 0],
    [2, 0, 1],
    [1, 0, 2],
    [2, 1, 0],
    [0, 2, 1],
];

fn parity(perm: &[usize]) -> i8 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All permutations of `0..n` in lexicographic order.
fn lexicographic_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    // next_permutation until the sequence is fully descending
    while let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| current[i] < current[i + 1]) {
        let j = (i + 1..n).rev().find(|&j| current[j] > current[i]).unwrap();
        current.swap(i, j);
        current[i + 1..].reverse();
        out.push(current.clone());
    }
    out
}

impl DetMonomialVector {
    /// Phases of the terms as a labeled point set (red/blue for `n = 3`).
    pub fn point_set(&self) -> UnitPointSet {
        let points: Vec<Angle> = self.terms.iter().map(|t| t.phase).collect();
        if self.n == 3 {
            let labels = (0..6)
                .map(|k| if k < 3 { PointLabel::Red } else { PointLabel::Blue })
                .collect();
            UnitPointSet::with_labels(points, labels)
        } else {
            UnitPointSet::new(points)
        }
    }

    /// Sum of the signed monomial values; equals `det` of the unit matrix.
    pub fn sum(&self) -> Complex64 {
        self.terms.iter().map(|t| t.phase.unit()).sum()
    }
}

/// Expand the determinant of a square phase matrix into its `n!` signed
/// monomial phases.
pub fn det_monomial_vector(theta: &PhaseMatrix) -> Result<DetMonomialVector> {
    if !theta.is_square() {
        return Err(Error::Domain(format!(
            "determinant monomials need a square matrix, got {}x{}",
            theta.rows(),
            theta.cols()
        )));
    }
    let n = theta.rows();
    if n > MAX_DET_SIZE {
        return Err(Error::Capacity(format!(
            "matrix size {n} exceeds the determinant expansion cap {MAX_DET_SIZE}"
        )));
    }
    let perms: Vec<Vec<usize>> = if n == 3 {
        ORDER_3.iter().map(|p| p.to_vec()).collect()
    } else {
        lexicographic_permutations(n)
    };
    let terms = perms
        .into_iter()
        .map(|perm| {
            let sign = parity(&perm);
            let mut sum = 0.0;
            for (i, &j) in perm.iter().enumerate() {
                sum += theta.angle(i, j).value();
            }
            if sign < 0 {
                sum += PI;
            }
            DetTerm {
                permutation: perm,
                sign,
                phase: Angle::new(sum),
            }
        })
        .collect();
    Ok(DetMonomialVector { n, terms })
}

/// The determinant polynomial is colopsided at `theta`; certifies maximal
/// phase rank.
pub fn matrix_is_colopsided(theta: &PhaseMatrix) -> Result<bool> {
    let v = det_monomial_vector(theta)?;
    is_colopsided_gap(&v.point_set())
}

/// A deduplicated monomial point for plotting, with its multiplicity and
/// whether it is a vertex of the convex hull.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HullPoint {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub is_hull_vertex: bool,
}

/// Deduplicated monomial points (tolerance 1e-9 Euclidean) with convex-hull
/// vertex flags, for CSV/SVG emission.
pub fn hull_plot_data(theta: &PhaseMatrix) -> Result<Vec<HullPoint>> {
    let v = det_monomial_vector(theta)?;
    let mut distinct: Vec<(f64, f64, usize)> = Vec::new();
    for t in &v.terms {
        let z = t.phase.unit();
        match distinct
            .iter_mut()
            .find(|(x, y, _)| ((x - z.re).powi(2) + (y - z.im).powi(2)).sqrt() <= EPS_DEDUP)
        {
            Some(entry) => entry.2 += 1,
            None => distinct.push((z.re, z.im, 1)),
        }
    }
    let pts: Vec<(f64, f64)> = distinct.iter().map(|&(x, y, _)| (x, y)).collect();
    let hull = convex_hull(&pts);
    Ok(distinct
        .into_iter()
        .map(|(re, im, multiplicity)| HullPoint {
            re,
            im,
            multiplicity,
            is_hull_vertex: hull
                .iter()
                .any(|&(hx, hy)| ((hx - re).powi(2) + (hy - im).powi(2)).sqrt() <= EPS_DEDUP),
        })
        .collect())
}

/// Convex hull vertex cycle (counterclockwise) by Andrew's monotone chain.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() < 3 {
        return points.to_vec();
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let build = |iter: Box<dyn Iterator<Item = (f64, f64)> + '_>| {
        let mut chain: Vec<(f64, f64)> = Vec::new();
        for p in iter {
            while chain.len() >= 2
                && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 1e-12
            {
                chain.pop();
            }
            chain.push(p);
        }
        chain
    };
    let mut lower = build(Box::new(pts.iter().copied()));
    let mut upper = build(Box::new(pts.iter().rev().copied()));
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
