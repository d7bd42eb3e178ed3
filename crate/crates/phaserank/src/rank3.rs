//! Exact phase-rank decision for 3x3 matrices and construction of explicit
//! rank-deficient witness matrices.
//!
//! A 3x3 phase matrix has phase rank below 3 exactly when the origin lies in
//! the relative interior of the convex hull of its six determinant
//! monomials. The constructive direction balances a positive coefficient
//! vector against the monomials, then lifts it to entry moduli through a
//! small log-linear system.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::colop::{relint_contains_origin, phase_rank_is_one, UnitPointSet};
use crate::detvec::{det_monomial_vector, DetMonomialVector};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, PhaseMatrix};
use crate::tol::EPS_LP;

/// Six positive coefficients ordered like the determinant monomials: the
/// first three ride the even permutations, the last three the odd ones.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub c: [f64; 6],
}

impl CoefficientVector {
    /// Check positivity, orthogonality to the monomial vector, and the
    /// product-balance condition.
    pub fn validate(&self, v: &DetMonomialVector) -> Result<()> {
        if self.c.iter().any(|&x| x <= 0.0) {
            return Err(Error::Domain("coefficients must be strictly positive".into()));
        }
        let l1: f64 = self.c.iter().sum();
        let dot: Complex64 = v
            .terms
            .iter()
            .zip(&self.c)
            .map(|(t, &ck)| t.phase.unit() * ck)
            .sum();
        if dot.norm() > 1e-9 * l1 {
            return Err(Error::Domain(format!(
                "coefficients are not orthogonal to the monomial vector (residual {:.3e})",
                dot.norm()
            )));
        }
        let red = self.c[0] * self.c[1] * self.c[2];
        let blue = self.c[3] * self.c[4] * self.c[5];
        if (red - blue).abs() > 1e-9 * (red + blue) {
            return Err(Error::Domain(format!(
                "product balance violated: {red:.6e} vs {blue:.6e}"
            )));
        }
        Ok(())
    }
}

/// The fixed 6x9 incidence matrix of the log-linear moduli system: row `k`
/// marks the three entries used by monomial `k`, columns are the nine matrix
/// entries in row-major order.
pub fn b_matrix() -> DMatrix<f64> {
    let order: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [1, 0, 2],
        [2, 1, 0],
        [0, 2, 1],
    ];
    let mut b = DMatrix::zeros(6, 9);
    for (k, perm) in order.iter().enumerate() {
        for (i, &j) in perm.iter().enumerate() {
            b[(k, 3 * i + j)] = 1.0;
        }
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Certificate {
    Rank1,
    Relint,
    Colopsided,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Rank3Decision {
    pub rank: u8,
    pub certificate: Certificate,
    /// The relint LP margin of the monomial vector (NaN for the rank-1 path).
    pub margin: f64,
    /// Margin inside the epsilon boundary band; the decision resolves by
    /// sign but the coamoeba boundary is ambiguous at this tolerance.
    pub boundary: bool,
}

/// Exact rank decision for a 3x3 phase matrix.
pub fn decide_rank3(theta: &PhaseMatrix) -> Result<Rank3Decision> {
    if theta.rows() != 3 || theta.cols() != 3 {
        return Err(Error::Domain(format!(
            "rank-3 decision needs a 3x3 matrix, got {}x{}",
            theta.rows(),
            theta.cols()
        )));
    }
    if phase_rank_is_one(theta) {
        return Ok(Rank3Decision {
            rank: 1,
            certificate: Certificate::Rank1,
            margin: f64::NAN,
            boundary: false,
        });
    }
    let v = det_monomial_vector(theta)?;
    let relint = relint_contains_origin(&v.point_set())?;
    let boundary = relint.is_boundary();
    if relint.in_relint {
        Ok(Rank3Decision {
            rank: 2,
            certificate: Certificate::Relint,
            margin: relint.margin,
            boundary,
        })
    } else {
        Ok(Rank3Decision {
            rank: 3,
            certificate: Certificate::Colopsided,
            margin: relint.margin,
            boundary,
        })
    }
}

/// Balanced coefficients, possibly computed after a recorded swap of the
/// first two matrix rows (which exchanges the red and blue monomial
/// triples).
#[derive(Debug, Clone)]
pub struct BalancedCoefficients {
    pub c: CoefficientVector,
    pub rows_swapped: bool,
}

/// Map the monomial vector to the one of the matrix with rows 0 and 1
/// swapped: term `k` becomes minus term `SWAP_MAP[k]`.
const SWAP_MAP: [usize; 6] = [3, 4, 5, 0, 1, 2];

fn swapped_vector(v: &DetMonomialVector) -> DetMonomialVector {
    let terms = SWAP_MAP
        .iter()
        .map(|&m| {
            let t = &v.terms[m];
            crate::detvec::DetTerm {
                permutation: t.permutation.clone(),
                sign: -t.sign,
                phase: t.phase + Angle::new(std::f64::consts::PI),
            }
        })
        .collect();
    DetMonomialVector { n: 3, terms }
}

fn products(c: &[f64; 6]) -> (f64, f64) {
    (c[0] * c[1] * c[2], c[3] * c[4] * c[5])
}

/// Find strictly positive coefficients orthogonal to the monomial vector
/// whose red and blue products agree.
pub fn find_balanced_coefficients(v: &DetMonomialVector) -> Result<BalancedCoefficients> {
    if v.n != 3 {
        return Err(Error::Domain("balanced coefficients exist only for 3x3".into()));
    }
    let relint = relint_contains_origin(&v.point_set())?;
    let Some(weights) = relint.weights else {
        return Err(Error::Domain(
            "origin is not in the relative interior of the monomial hull".into(),
        ));
    };
    let mut a: [f64; 6] = weights.as_slice().try_into().unwrap();
    let (red, blue) = products(&a);
    if (red - blue).abs() <= 1e-12 * (red + blue) {
        return Ok(BalancedCoefficients {
            c: CoefficientVector { c: a },
            rows_swapped: false,
        });
    }
    // Ensure the red product dominates, swapping the first two matrix rows
    // (and hence the triples) when needed.
    let mut rows_swapped = false;
    let mut u = v.clone();
    if red < blue {
        u = swapped_vector(v);
        let mut swapped = [0.0; 6];
        for (k, &m) in SWAP_MAP.iter().enumerate() {
            swapped[k] = a[m];
        }
        a = swapped;
        rows_swapped = true;
    }

    // A nonnegative direction b with zeros on a proper subset of the red
    // positions, strictly positive blue positions, and u . b = 0. Larger
    // red support is tried first for conditioning.
    let subsets: [&[usize]; 7] = [&[0, 1], &[0, 2], &[1, 2], &[0], &[1], &[2], &[]];
    let mut b: Option<[f64; 6]> = None;
    for keep in subsets {
        let idx: Vec<usize> = keep.iter().chain([3, 4, 5].iter()).copied().collect();
        let pts = UnitPointSet::new(idx.iter().map(|&i| u.terms[i].phase).collect());
        let sub = relint_contains_origin(&pts)?;
        if sub.in_relint && sub.margin > EPS_LP {
            let w = sub.weights.unwrap();
            let mut full = [0.0; 6];
            for (slot, &i) in idx.iter().enumerate() {
                full[i] = w[slot];
            }
            b = Some(full);
            break;
        }
    }
    let Some(b) = b else {
        return Err(Error::Internal(
            "no red subset keeps the origin interior, which a dominant red product rules out".into(),
        ));
    };

    // g(lambda) = prod_red(a + lambda b) - prod_blue(a + lambda b) is a
    // cubic with g(0) > 0 and leading coefficient -b4 b5 b6 < 0.
    let g = |lambda: f64| {
        let c: Vec<f64> = a.iter().zip(&b).map(|(ai, bi)| ai + lambda * bi).collect();
        c[0] * c[1] * c[2] - c[3] * c[4] * c[5]
    };
    let mut hi = 1.0;
    let mut doublings = 0;
    while g(hi) > 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Internal("cubic bracketing failed to find a sign change".into()));
        }
    }
    // Bisect to machine precision: the balance check downstream is relative,
    // so an absolute early exit would be too loose when the products are tiny.
    let mut lo = 0.0;
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let mut c = [0.0; 6];
    for k in 0..6 {
        c[k] = a[k] + lambda * b[k];
    }
    let cv = CoefficientVector { c };
    cv.validate(&u)?;
    Ok(BalancedCoefficients { c: cv, rows_swapped })
}

/// A complex matrix realizing phase rank at most 2, with the input phases
/// and near-zero determinant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessMatrix {
    pub matrix: ComplexMatrix,
    pub det_residual: f64,
    /// Row swap applied during balancing (already undone in `matrix`).
    pub row_swap: Option<(usize, usize)>,
}

/// Lift balanced coefficients to entry moduli: solve the incidence system
/// `B m' = log c` in the minimum-norm sense and exponentiate.
pub fn coefficients_to_witness(
    theta: &PhaseMatrix,
    coeffs: &CoefficientVector,
) -> Result<DMatrix<Complex64>> {
    if theta.rows() != 3 || theta.cols() != 3 {
        return Err(Error::Domain("witness lift needs a 3x3 matrix".into()));
    }
    let v = det_monomial_vector(theta)?;
    coeffs.validate(&v)?;
    let c_log: Vec<f64> = coeffs.c.iter().map(|x| x.ln()).collect();

    // B B^T = 3 I + K with K the parity-crossing block of ones; its
    // pseudo-inverse acts as 1/6 on the all-ones direction, 0 on the
    // balance direction (1,1,1,-1,-1,-1), and 1/3 elsewhere.
    let unit = 1.0 / 6.0f64.sqrt();
    let dot_u: f64 = c_log.iter().sum::<f64>() * unit;
    let dot_w: f64 = (c_log[0] + c_log[1] + c_log[2] - c_log[3] - c_log[4] - c_log[5]) * unit;
    let mut y = [0.0; 6];
    for k in 0..6 {
        let u_comp = dot_u * unit;
        let w_comp = dot_w * unit * if k < 3 { 1.0 } else { -1.0 };
        y[k] = u_comp / 6.0 + (c_log[k] - u_comp - w_comp) / 3.0;
    }
    let b = b_matrix();
    let mut m_log = [0.0; 9];
    for (col, ml) in m_log.iter_mut().enumerate() {
        for (k, yk) in y.iter().enumerate() {
            *ml += b[(k, col)] * yk;
        }
    }
    // Residual of the log-linear system; fails only if the balance
    // condition did not actually hold.
    let mut worst = 0.0f64;
    for k in 0..6 {
        let mut lhs = 0.0;
        for col in 0..9 {
            lhs += b[(k, col)] * m_log[col];
        }
        worst = worst.max((lhs - c_log[k]).abs());
    }
    let scale_log = 1.0 + c_log.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if worst > 1e-10 * scale_log {
        return Err(Error::Domain(format!(
            "log-linear system inconsistent (residual {worst:.3e}); product balance failed"
        )));
    }
    let m = DMatrix::from_fn(3, 3, |i, j| theta.entry(i, j) * m_log[3 * i + j].exp());
    Ok(m)
}

/// Outcome of the full witness pipeline.
#[derive(Debug, Clone)]
pub enum WitnessOutcome {
    Witness(WitnessMatrix),
    RankIsThree,
}

/// Decide the rank of a 3x3 phase matrix and, when it is below 3, build an
/// explicit singular complex matrix with the same phases.
pub fn witness_rank3(theta: &PhaseMatrix) -> Result<WitnessOutcome> {
    let decision = decide_rank3(theta)?;
    match decision.rank {
        3 => Ok(WitnessOutcome::RankIsThree),
        1 => {
            // The unit-modulus matrix itself already has rank one.
            let m = theta.to_complex();
            let det = m.clone().determinant().norm();
            Ok(WitnessOutcome::Witness(WitnessMatrix {
                matrix: ComplexMatrix::from_dmatrix(&m),
                det_residual: det,
                row_swap: None,
            }))
        }
        _ => {
            let v = det_monomial_vector(theta)?;
            let balanced = find_balanced_coefficients(&v)?;
            let theta_used = if balanced.rows_swapped {
                theta.swap_rows(0, 1)
            } else {
                theta.clone()
            };
            let mut m = coefficients_to_witness(&theta_used, &balanced.c)?;
            if balanced.rows_swapped {
                m.swap_rows(0, 1);
            }
            // Normalize so the largest modulus is one, making residual
            // tolerances comparable across inputs.
            let max_mod = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let m = m.map(|z| z / max_mod);
            let det = m.clone().determinant().norm();
            let scale = largest_monomial_modulus(&m);
            if det > 1e-8 * scale {
                return Err(Error::Internal(format!(
                    "witness determinant residual {det:.3e} exceeds 1e-8 * scale ({scale:.3e})"
                )));
            }
            // Phases must match the input exactly.
            for i in 0..3 {
                for j in 0..3 {
                    let phase = Angle::new(m[(i, j)].arg());
                    if phase.circ_dist(theta.angle(i, j)) > 1e-9 {
                        return Err(Error::Internal("witness phases drifted from the input".into()));
                    }
                }
            }
            Ok(WitnessOutcome::Witness(WitnessMatrix {
                matrix: ComplexMatrix::from_dmatrix(&m),
                det_residual: det,
                row_swap: balanced.rows_swapped.then_some((0, 1)),
            }))
        }
    }
}

/// Largest modulus among the six determinant monomials of a 3x3 matrix.
pub fn largest_monomial_modulus(m: &DMatrix<Complex64>) -> f64 {
    let order: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [1, 0, 2],
        [2, 1, 0],
        [0, 2, 1],
    ];
    order
        .iter()
        .map(|perm| {
            perm.iter()
                .enumerate()
                .map(|(i, &j)| m[(i, j)].norm())
                .product()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn theta1() -> PhaseMatrix {
        PhaseMatrix::from_radians(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, 3.0 * PI / 4.0, -PI / 2.0],
            vec![0.0, -PI / 2.0, 3.0 * PI / 4.0],
        ])
        .unwrap()
    }

    fn theta2() -> PhaseMatrix {
        PhaseMatrix::from_radians(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, PI / 2.0, PI / 2.0],
            vec![0.0, PI / 2.0, PI],
        ])
        .unwrap()
    }

    fn theta3() -> PhaseMatrix {
        PhaseMatrix::from_radians(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, PI / 2.0, PI / 3.0],
            vec![0.0, PI / 3.0, PI / 2.0],
        ])
        .unwrap()
    }

    fn example12() -> PhaseMatrix {
        PhaseMatrix::from_radians(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, PI / 2.0, -PI / 2.0],
            vec![0.0, 0.0, PI / 2.0],
        ])
        .unwrap()
    }

    #[test]
    fn decision_examples() {
        assert_eq!(decide_rank3(&example12()).unwrap().rank, 2);
        assert_eq!(decide_rank3(&theta1()).unwrap().rank, 3);
        assert_eq!(decide_rank3(&theta2()).unwrap().rank, 3);
        assert!(decide_rank3(&theta2()).unwrap().boundary);
        assert_eq!(decide_rank3(&theta3()).unwrap().rank, 2);
        let ones = PhaseMatrix::from_radians(&vec![vec![0.0; 3]; 3]).unwrap();
        assert_eq!(decide_rank3(&ones).unwrap().rank, 1);
    }

    #[test]
    fn non_3x3_rejected() {
        let m = PhaseMatrix::from_radians(&[vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(decide_rank3(&m).is_err());
    }

    #[test]
    fn b_matrix_structure() {
        let b = b_matrix();
        for k in 0..6 {
            let row_sum: f64 = (0..9).map(|j| b[(k, j)]).sum();
            assert_eq!(row_sum, 3.0);
        }
        // rank 5, null space of B^T spanned by (1,1,1,-1,-1,-1)
        let svd = b.clone().svd(false, false);
        let rank = svd.singular_values.iter().filter(|s| **s > 1e-10).count();
        assert_eq!(rank, 5);
        let w = nalgebra::DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0, -1.0, -1.0]);
        let bt_w = b.transpose() * &w;
        assert!(bt_w.amax() < 1e-12);
    }

    #[test]
    fn balanced_on_theta3() {
        let v = det_monomial_vector(&theta3()).unwrap();
        let bal = find_balanced_coefficients(&v).unwrap();
        let u = if bal.rows_swapped {
            det_monomial_vector(&theta3().swap_rows(0, 1)).unwrap()
        } else {
            v
        };
        bal.c.validate(&u).unwrap();
    }

    #[test]
    fn balanced_rejects_colopsided() {
        let v = det_monomial_vector(&theta1()).unwrap();
        assert!(find_balanced_coefficients(&v).is_err());
    }

    #[test]
    fn symmetric_coefficients_pass_through() {
        // monomials alternating +-1 with the uniform weights already balanced
        let m = PhaseMatrix::from_radians(&[
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let v = det_monomial_vector(&m).unwrap();
        let bal = find_balanced_coefficients(&v).unwrap();
        assert!(!bal.rows_swapped);
        for ck in bal.c.c {
            assert!((ck - 1.0 / 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn unit_coefficients_give_theta_itself() {
        // c = 1 solves B m' = 0, so M = theta; valid only when det(theta) = 0
        let all_ones = PhaseMatrix::from_radians(&vec![vec![0.0; 3]; 3]).unwrap();
        let c = CoefficientVector { c: [1.0; 6] };
        let m = coefficients_to_witness(&all_ones, &c).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[(i, j)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unbalanced_coefficients_rejected() {
        let all_ones = PhaseMatrix::from_radians(&vec![vec![0.0; 3]; 3]).unwrap();
        let c = CoefficientVector { c: [2.0, 1.0, 1.0, 1.0, 1.0, 1.0] };
        assert!(coefficients_to_witness(&all_ones, &c).is_err());
    }

    fn check_witness(theta: &PhaseMatrix) {
        let WitnessOutcome::Witness(w) = witness_rank3(theta).unwrap() else {
            panic!("expected a witness");
        };
        let m = w.matrix.to_dmatrix();
        for i in 0..3 {
            for j in 0..3 {
                let phase = Angle::new(m[(i, j)].arg());
                assert!(phase.circ_dist(theta.angle(i, j)) <= 1e-9);
                assert!(m[(i, j)].norm() > 0.0);
            }
        }
        let svd = m.svd(false, false);
        let smax = svd.singular_values[0];
        let smin = svd.singular_values[2];
        assert!(smin / smax <= 1e-7, "sigma ratio {}", smin / smax);
    }

    #[test]
    fn witness_for_theta3_and_example12() {
        check_witness(&theta3());
        check_witness(&example12());
        assert!(matches!(
            witness_rank3(&theta2()).unwrap(),
            WitnessOutcome::RankIsThree
        ));
    }
}
