use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};

/// An `n x m` grid of unit-modulus phases, stored as canonical angles.
/// Entry `(i, j)` represents the unit complex number `e^{i phi_ij}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Angle>, // row-major
}

impl PhaseMatrix {
    pub fn from_angles(angles: Vec<Vec<Angle>>) -> Result<Self> {
        let rows = angles.len();
        if rows == 0 {
            return Err(Error::Domain("phase matrix needs at least one row".into()));
        }
        let cols = angles[0].len();
        if cols == 0 {
            return Err(Error::Domain("phase matrix needs at least one column".into()));
        }
        if angles.iter().any(|r| r.len() != cols) {
            return Err(Error::Domain("ragged rows in phase matrix".into()));
        }
        Ok(PhaseMatrix {
            rows,
            cols,
            entries: angles.into_iter().flatten().collect(),
        })
    }

    /// Build from raw radian values, reducing each entry.
    pub fn from_radians(angles: &[Vec<f64>]) -> Result<Self> {
        let converted = angles
            .iter()
            .map(|row| row.iter().map(|&x| crate::angle::canonical_angle(x)).collect())
            .collect::<Result<Vec<Vec<Angle>>>>()?;
        Self::from_angles(converted)
    }

    /// Convert a `{-1, +1}` sign matrix: `+1 -> 0`, `-1 -> pi`.
    pub fn from_signs(signs: &[Vec<i8>]) -> Result<Self> {
        let angles = signs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&s| match s {
                        1 => Ok(Angle::new(0.0)),
                        -1 => Ok(Angle::new(std::f64::consts::PI)),
                        other => Err(Error::Domain(format!(
                            "sign matrix entry must be +1 or -1, got {other}"
                        ))),
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<Angle>>>>()?;
        Self::from_angles(angles)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn angle(&self, i: usize, j: usize) -> Angle {
        self.entries[i * self.cols + j]
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.angle(i, j).unit()
    }

    /// Angles of column `j`, top to bottom.
    pub fn column_angles(&self, j: usize) -> Vec<Angle> {
        (0..self.rows).map(|i| self.angle(i, j)).collect()
    }

    /// The matrix as a dense complex matrix of unit entries.
    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.entry(i, j))
    }

    pub fn transpose(&self) -> PhaseMatrix {
        PhaseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: (0..self.cols)
                .flat_map(|j| (0..self.rows).map(move |i| (i, j)))
                .map(|(i, j)| self.angle(i, j))
                .collect(),
        }
    }

    pub fn swap_rows(&self, a: usize, b: usize) -> PhaseMatrix {
        let mut out = self.clone();
        for j in 0..self.cols {
            out.entries.swap(a * self.cols + j, b * self.cols + j);
        }
        out
    }

    pub fn delete_row(&self, i: usize) -> Result<PhaseMatrix> {
        if self.rows < 2 {
            return Err(Error::Domain("cannot delete the only row".into()));
        }
        let angles = (0..self.rows)
            .filter(|&r| r != i)
            .map(|r| (0..self.cols).map(|j| self.angle(r, j)).collect())
            .collect();
        Self::from_angles(angles)
    }

    /// Replace entry `(i, j)`.
    pub fn set_angle(&mut self, i: usize, j: usize, a: Angle) {
        let c = self.cols;
        self.entries[i * c + j] = a;
    }

    /// Scale row `i` by `e^{i alpha}`.
    pub fn scale_row(&self, i: usize, alpha: Angle) -> PhaseMatrix {
        let mut out = self.clone();
        for j in 0..self.cols {
            out.entries[i * self.cols + j] = self.angle(i, j) + alpha;
        }
        out
    }

    /// Scale column `j` by `e^{i alpha}`.
    pub fn scale_col(&self, j: usize, alpha: Angle) -> PhaseMatrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            out.entries[i * self.cols + j] = self.angle(i, j) + alpha;
        }
        out
    }

    pub fn permute_rows(&self, perm: &[usize]) -> PhaseMatrix {
        let angles = perm
            .iter()
            .map(|&i| (0..self.cols).map(|j| self.angle(i, j)).collect())
            .collect();
        Self::from_angles(angles).expect("permutation preserves shape")
    }

    pub fn permute_cols(&self, perm: &[usize]) -> PhaseMatrix {
        let angles = (0..self.rows)
            .map(|i| perm.iter().map(|&j| self.angle(i, j)).collect())
            .collect();
        Self::from_angles(angles).expect("permutation preserves shape")
    }

    /// Entries all in `{0, pi}` within tolerance, i.e. a `+-1` sign matrix.
    pub fn as_sign_matrix(&self) -> Option<Vec<Vec<i8>>> {
        let mut out = vec![vec![0i8; self.cols]; self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.angle(i, j);
                if a.circ_dist(Angle::new(0.0)) < crate::tol::EPS_ANGLE {
                    out[i][j] = 1;
                } else if a.circ_dist(Angle::new(std::f64::consts::PI)) < crate::tol::EPS_ANGLE {
                    out[i][j] = -1;
                } else {
                    return None;
                }
            }
        }
        Some(out)
    }
}

/// A dense complex matrix with explicitly nonzero entries, used for witness
/// outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl ComplexMatrix {
    pub fn from_dmatrix(m: &DMatrix<Complex64>) -> Self {
        ComplexMatrix {
            rows: m.nrows(),
            cols: m.ncols(),
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| {
            Complex64::new(self.entries[i][j][0], self.entries[i][j][1])
        })
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.entries[i][j][0], self.entries[i][j][1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sign_conversion_round_trip() {
        let m = PhaseMatrix::from_signs(&[vec![1, -1], vec![-1, 1]]).unwrap();
        assert_eq!(m.angle(0, 1).value(), PI);
        assert_eq!(m.as_sign_matrix().unwrap(), vec![vec![1, -1], vec![-1, 1]]);
    }

    #[test]
    fn empty_rejected() {
        assert!(PhaseMatrix::from_radians(&[]).is_err());
        assert!(PhaseMatrix::from_radians(&[vec![]]).is_err());
    }

    #[test]
    fn transpose_and_swap() {
        let m = PhaseMatrix::from_radians(&[vec![0.0, 1.0], vec![2.0, 3.0]]).unwrap();
        let t = m.transpose();
        assert_eq!(t.angle(0, 1).value(), 2.0);
        let s = m.swap_rows(0, 1);
        assert_eq!(s.angle(0, 0).value(), 2.0);
    }
}
