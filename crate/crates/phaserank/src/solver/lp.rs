//! Dense two-phase simplex with Bland's rule.

use super::Status;
use crate::error::{Error, Result};

const MAX_ITERS: usize = 500;
const PIVOT_TOL: f64 = 1e-10;
const MAX_DIM: usize = 64;

/// Minimize `objective . x` subject to `a_eq x = b_eq` and `x_i >= lower_i`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub lower: Vec<Bound>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    NegInf,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: Status,
    pub objective: f64,
    pub x: Vec<f64>,
    pub dual: Vec<f64>,
    pub iterations: usize,
    /// Farkas dual vector when infeasible, or an improving primal ray when
    /// unbounded.
    pub certificate: Option<Vec<f64>>,
}

struct Tableau {
    rows: Vec<Vec<f64>>, // m x (ncols + 1), last column is rhs
    basis: Vec<usize>,
    m: usize,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// One simplex phase on costs `c` (artificial columns barred from
    /// entering when `allowed` is false). Returns Unbounded with the
    /// entering column index on failure of the ratio test.
    fn run_phase(
        &mut self,
        c: &[f64],
        allowed: &[bool],
        iters: &mut usize,
    ) -> std::result::Result<(), PhaseStop> {
        loop {
            if *iters >= MAX_ITERS {
                return Err(PhaseStop::IterationCap);
            }
            // reduced costs r_j = c_j - c_B . T_j, Bland: smallest improving index
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = c[j];
                for i in 0..self.m {
                    rc -= c[self.basis[i]] * self.rows[i][j];
                }
                if rc < -1e-9 {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return Ok(()) };
            // ratio test, Bland tie-break on basis variable index
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.rows[i][j];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio < lr + 1e-12 && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(PhaseStop::Unbounded(j));
            };
            self.pivot(r, j);
            *iters += 1;
        }
    }
}

enum PhaseStop {
    Unbounded(usize),
    IterationCap,
}

pub fn solve_lp(p: &LinearProgram, tol: f64) -> Result<LpSolution> {
    let n = p.objective.len();
    let m = p.a_eq.len();
    if p.lower.len() != n || p.b_eq.len() != m || p.a_eq.iter().any(|r| r.len() != n) {
        return Err(Error::Domain("inconsistent LP dimensions".into()));
    }
    if p.b_eq.iter().any(|b| !b.is_finite()) {
        return Err(Error::Domain("non-finite rhs".into()));
    }
    if n > MAX_DIM || m > MAX_DIM {
        return Err(Error::Domain(format!(
            "LP exceeds desk-scale cap of {MAX_DIM} variables/constraints"
        )));
    }

    // Standard form: shift finite lower bounds to zero, split free variables.
    // std_map[i] = (plus column, optional minus column)
    let mut std_map = Vec::with_capacity(n);
    let mut n_std = 0usize;
    for bound in &p.lower {
        match bound {
            Bound::Finite(_) => {
                std_map.push((n_std, None));
                n_std += 1;
            }
            Bound::NegInf => {
                std_map.push((n_std, Some(n_std + 1)));
                n_std += 2;
            }
        }
    }
    let mut obj_shift = 0.0;
    let mut b = p.b_eq.clone();
    for (i, bound) in p.lower.iter().enumerate() {
        if let Bound::Finite(l) = bound {
            if *l != 0.0 {
                obj_shift += p.objective[i] * l;
                for (row, bi) in p.a_eq.iter().zip(b.iter_mut()) {
                    *bi -= row[i] * l;
                }
            }
        }
    }
    let ncols = n_std + m; // standard variables + artificials
    let mut rows = vec![vec![0.0; ncols + 1]; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for (orig, &(jp, jm)) in std_map.iter().enumerate() {
            let a = p.a_eq[i][orig] * flip;
            rows[i][jp] = a;
            if let Some(jm) = jm {
                rows[i][jm] = -a;
            }
        }
        rows[i][n_std + i] = 1.0;
        rows[i][ncols] = b[i] * flip;
    }
    let mut c_std = vec![0.0; ncols];
    for (orig, &(jp, jm)) in std_map.iter().enumerate() {
        c_std[jp] = p.objective[orig];
        if let Some(jm) = jm {
            c_std[jm] = -p.objective[orig];
        }
    }

    let mut t = Tableau {
        rows,
        basis: (n_std..ncols).collect(),
        m,
        ncols,
    };
    let mut iters = 0usize;

    // Phase 1: minimize sum of artificials.
    let mut c1 = vec![0.0; ncols];
    for j in n_std..ncols {
        c1[j] = 1.0;
    }
    let allowed_all = vec![true; ncols];
    match t.run_phase(&c1, &allowed_all, &mut iters) {
        Ok(()) => {}
        Err(PhaseStop::Unbounded(_)) => {
            return Err(Error::Solver("phase-1 LP unbounded (cannot happen)".into()))
        }
        Err(PhaseStop::IterationCap) => {
            return Ok(failure(n, iters));
        }
    }
    let phase1_obj: f64 = (0..m)
        .filter(|&i| t.basis[i] >= n_std)
        .map(|i| t.rhs(i))
        .sum();
    let scale = 1.0 + p.b_eq.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if phase1_obj > tol.max(1e-9) * scale {
        // Farkas certificate y: c1_B . B^{-1} read off the artificial columns.
        let mut y = vec![0.0; m];
        for (i, yi) in y.iter_mut().enumerate() {
            let mut v = 0.0;
            for k in 0..m {
                v += c1[t.basis[k]] * t.rows[k][n_std + i];
            }
            *yi = v;
        }
        return Ok(LpSolution {
            status: Status::Infeasible,
            objective: f64::INFINITY,
            x: vec![f64::NAN; n],
            dual: vec![0.0; m],
            iterations: iters,
            certificate: Some(y),
        });
    }

    // Drive artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] >= n_std {
            if let Some(j) = (0..n_std).find(|&j| t.rows[i][j].abs() > 1e-8) {
                t.pivot(i, j);
            }
            // otherwise the row is redundant; the artificial stays basic at 0
        }
    }

    // Phase 2.
    let mut allowed = vec![true; ncols];
    for a in allowed.iter_mut().skip(n_std) {
        *a = false;
    }
    match t.run_phase(&c_std, &allowed, &mut iters) {
        Ok(()) => {}
        Err(PhaseStop::Unbounded(j)) => {
            let mut ray_std = vec![0.0; n_std];
            ray_std[j] = 1.0;
            for i in 0..m {
                if t.basis[i] < n_std {
                    ray_std[t.basis[i]] = -t.rows[i][j];
                }
            }
            let ray = std_to_orig(&ray_std, &std_map, &vec![Bound::Finite(0.0); n]);
            return Ok(LpSolution {
                status: Status::Unbounded,
                objective: f64::NEG_INFINITY,
                x: vec![f64::NAN; n],
                dual: vec![0.0; m],
                iterations: iters,
                certificate: Some(ray),
            });
        }
        Err(PhaseStop::IterationCap) => {
            return Ok(failure(n, iters));
        }
    }

    let mut x_std = vec![0.0; n_std];
    for i in 0..m {
        if t.basis[i] < n_std {
            x_std[t.basis[i]] = t.rhs(i);
        }
    }
    let x = std_to_orig(&x_std, &std_map, &p.lower);
    let objective = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>();
    let _ = obj_shift;
    // Duals from the artificial columns: y = c_B . B^{-1} (sign of the
    // original row restored through the rhs flip applied above).
    let mut dual = vec![0.0; m];
    for (i, d) in dual.iter_mut().enumerate() {
        let mut v = 0.0;
        for k in 0..m {
            v += c_std[t.basis[k]] * t.rows[k][n_std + i];
        }
        *d = if p.b_eq[i] < 0.0 { -v } else { v };
    }
    Ok(LpSolution {
        status: Status::Optimal,
        objective,
        x,
        dual,
        iterations: iters,
        certificate: None,
    })
}

fn failure(n: usize, iters: usize) -> LpSolution {
    LpSolution {
        status: Status::NumericalFailure,
        objective: f64::NAN,
        x: vec![f64::NAN; n],
        dual: Vec::new(),
        iterations: iters,
        certificate: None,
    }
}

fn std_to_orig(x_std: &[f64], std_map: &[(usize, Option<usize>)], lower: &[Bound]) -> Vec<f64> {
    std_map
        .iter()
        .zip(lower)
        .map(|(&(jp, jm), bound)| {
            let base = match bound {
                Bound::Finite(l) => *l,
                Bound::NegInf => 0.0,
            };
            base + x_std[jp] - jm.map_or(0.0, |j| x_std[j])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relint_lp(points: &[(f64, f64)]) -> LinearProgram {
        // max t s.t. sum (t + s_k) p_k = 0, k*t + sum s_k = 1, s >= 0, t free
        let k = points.len();
        let sx: f64 = points.iter().map(|p| p.0).sum();
        let sy: f64 = points.iter().map(|p| p.1).sum();
        let mut a = vec![vec![0.0; k + 1]; 3];
        a[0][0] = sx;
        a[1][0] = sy;
        a[2][0] = k as f64;
        for (j, p) in points.iter().enumerate() {
            a[0][j + 1] = p.0;
            a[1][j + 1] = p.1;
            a[2][j + 1] = 1.0;
        }
        let mut obj = vec![0.0; k + 1];
        obj[0] = -1.0; // maximize t
        let mut lower = vec![Bound::Finite(0.0); k + 1];
        lower[0] = Bound::NegInf;
        LinearProgram {
            objective: obj,
            a_eq: a,
            b_eq: vec![0.0, 0.0, 1.0],
            lower,
        }
    }

    #[test]
    fn antipodal_pair_margin_half() {
        let sol = solve_lp(&relint_lp(&[(1.0, 0.0), (-1.0, 0.0)]), 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.x[0] - 0.5).abs() < 1e-9, "t* = {}", sol.x[0]);
    }

    #[test]
    fn symmetric_triangle_margin_third() {
        let th = 2.0 * std::f64::consts::PI / 3.0;
        let pts = [(1.0, 0.0), (th.cos(), th.sin()), ((2.0 * th).cos(), (2.0 * th).sin())];
        let sol = solve_lp(&relint_lp(&pts), 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.x[0] - 1.0 / 3.0).abs() < 1e-9, "t* = {}", sol.x[0]);
    }

    #[test]
    fn infeasible_toy() {
        let p = LinearProgram {
            objective: vec![0.0],
            a_eq: vec![vec![1.0], vec![1.0]],
            b_eq: vec![1.0, 2.0],
            lower: vec![Bound::Finite(0.0)],
        };
        let sol = solve_lp(&p, 1e-9).unwrap();
        assert_eq!(sol.status, Status::Infeasible);
        assert!(sol.certificate.is_some());
    }

    #[test]
    fn unbounded_detected() {
        let p = LinearProgram {
            objective: vec![-1.0, 0.0],
            a_eq: vec![vec![1.0, -1.0]],
            b_eq: vec![0.0],
            lower: vec![Bound::Finite(0.0), Bound::Finite(0.0)],
        };
        let sol = solve_lp(&p, 1e-9).unwrap();
        assert_eq!(sol.status, Status::Unbounded);
    }

    #[test]
    fn lower_bound_shift() {
        // min x + y s.t. x + y = 5, x >= 2, y >= 1
        let p = LinearProgram {
            objective: vec![1.0, 1.0],
            a_eq: vec![vec![1.0, 1.0]],
            b_eq: vec![5.0],
            lower: vec![Bound::Finite(2.0), Bound::Finite(1.0)],
        };
        let sol = solve_lp(&p, 1e-9).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective - 5.0).abs() < 1e-9);
        assert!(sol.x[0] >= 2.0 - 1e-9 && sol.x[1] >= 1.0 - 1e-9);
    }
}
