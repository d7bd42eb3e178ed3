//! Self-contained semidefinite programming solver.
//!
//! Solves block-diagonal conic programs in the standard primal form
//!
//! ```text
//!   minimize    <C, X>
//!   subject to  <A_k, X> = b_k,   X in K
//! ```
//!
//! where `K` is a product of real symmetric PSD cones and nonnegative
//! orthants. The dual is `max b^T y` subject to `C - sum_k y_k A_k in K`.
//!
//! The algorithm is a primal-dual interior-point method with Mehrotra
//! predictor-corrector steps and the HKM search direction (linearizing
//! `X S = mu I` through `S^{-1}`), which needs only Cholesky and symmetric
//! eigenvalue factorizations. Nonnegative-orthant blocks are carried as
//! diagonal matrices; diagonality is preserved by every operation, so a
//! single code path covers both cone types.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::Status;
use crate::error::{Error, Result};

/// Cone factor: a PSD block of the given side, or a nonnegative orthant of
/// the given dimension (stored as a diagonal PSD block).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    Psd(usize),
    NonNeg(usize),
}

impl BlockKind {
    pub fn side(&self) -> usize {
        match *self {
            BlockKind::Psd(n) | BlockKind::NonNeg(n) => n,
        }
    }
}

/// A block-diagonal symmetric matrix matching a program's block structure.
/// Nonnegative-orthant blocks must be diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCoeffs {
    pub blocks: Vec<DMatrix<f64>>,
}

impl SymCoeffs {
    pub fn zeros(blocks: &[BlockKind]) -> Self {
        SymCoeffs {
            blocks: blocks.iter().map(|b| DMatrix::zeros(b.side(), b.side())).collect(),
        }
    }

    pub fn identity(blocks: &[BlockKind]) -> Self {
        SymCoeffs {
            blocks: blocks.iter().map(|b| DMatrix::identity(b.side(), b.side())).collect(),
        }
    }

    /// Trace inner product.
    pub fn dot(&self, other: &SymCoeffs) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>())
            .sum()
    }

    pub fn axpy(&mut self, alpha: f64, other: &SymCoeffs) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a += b * alpha;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for b in &mut self.blocks {
            *b *= alpha;
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.iter().fold(0.0f64, |m, x| m.max(x.abs())))
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    fn symmetrize(&mut self) {
        for b in &mut self.blocks {
            let t = b.transpose();
            *b += t;
            *b *= 0.5;
        }
    }

    /// Smallest eigenvalue over all blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                SymmetricEigen::new(b.clone())
                    .eigenvalues
                    .iter()
                    .fold(f64::INFINITY, |m, &x| m.min(x))
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// A conic program in the solver's primal form.
#[derive(Debug, Clone)]
pub struct ConicProgram {
    pub blocks: Vec<BlockKind>,
    /// Objective coefficient matrix `C`.
    pub objective: SymCoeffs,
    /// Constraint coefficient matrices `A_k`.
    pub constraints: Vec<SymCoeffs>,
    /// Right-hand sides `b_k`.
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: Status,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub x: SymCoeffs,
    pub y: Vec<f64>,
    pub s: SymCoeffs,
    pub iterations: usize,
}

const MAX_ITERS: usize = 500;
const STEP_FRACTION: f64 = 0.98;
const BLOWUP: f64 = 1e14;

/// Largest `alpha <= 1` keeping `X + alpha * dX` inside the cone, shrunk by
/// the step fraction. Computed blockwise through the Cholesky factor of `X`.
fn max_step(x: &SymCoeffs, dx: &SymCoeffs) -> f64 {
    let mut alpha = 1.0f64;
    for (xb, db) in x.blocks.iter().zip(&dx.blocks) {
        if xb.nrows() == 0 {
            continue;
        }
        let Some(chol) = xb.clone().cholesky() else {
            return 0.0;
        };
        // min eigenvalue of L^{-1} dX L^{-T}
        let l = chol.l();
        let mut m = db.clone();
        l.solve_lower_triangular_mut(&mut m);
        let mut mt = m.transpose();
        l.solve_lower_triangular_mut(&mut mt);
        let mut sym = mt.transpose();
        let t = sym.transpose();
        sym += t;
        sym *= 0.5;
        let lam_min = SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &v| a.min(v));
        if lam_min < 0.0 {
            alpha = alpha.min(-1.0 / lam_min);
        }
    }
    (STEP_FRACTION * alpha).min(1.0)
}

struct Workspace {
    /// Cholesky-based inverse of each block of `S`.
    s_inv: Vec<DMatrix<f64>>,
}

impl Workspace {
    fn new(s: &SymCoeffs) -> Option<Self> {
        let mut s_inv = Vec::with_capacity(s.blocks.len());
        for b in &s.blocks {
            let chol = b.clone().cholesky()?;
            s_inv.push(chol.inverse());
        }
        Some(Workspace { s_inv })
    }

    /// `sym(S^{-1} M X)` blockwise.
    fn scaled(&self, m: &SymCoeffs, x: &SymCoeffs) -> SymCoeffs {
        let blocks = self
            .s_inv
            .iter()
            .zip(&m.blocks)
            .zip(&x.blocks)
            .map(|((si, mb), xb)| {
                let p = si * mb * xb;
                (&p + p.transpose()) * 0.5
            })
            .collect();
        SymCoeffs { blocks }
    }
}

/// One HKM Newton direction for the given complementarity target `g`
/// (the right-hand side of `dX + sym(S^{-1} dS X) = G`).
#[allow(clippy::too_many_arguments)]
fn newton_direction(
    prog: &ConicProgram,
    ws: &Workspace,
    x: &SymCoeffs,
    rp: &[f64],
    rd: &SymCoeffs,
    g: &SymCoeffs,
    schur: &DMatrix<f64>,
) -> Result<(SymCoeffs, Vec<f64>, SymCoeffs)> {
    let m = prog.constraints.len();
    // rhs_k = rp_k - <A_k, G> + <A_k, sym(S^{-1} Rd X)>
    let rd_scaled = ws.scaled(rd, x);
    let mut rhs = DVector::zeros(m);
    for k in 0..m {
        rhs[k] = rp[k] - prog.constraints[k].dot(g) + prog.constraints[k].dot(&rd_scaled);
    }
    let dy = schur
        .clone()
        .cholesky()
        .map(|c| c.solve(&rhs))
        .or_else(|| schur.clone().lu().solve(&rhs))
        .ok_or_else(|| Error::Solver("singular Schur complement".into()))?;
    // dS = Rd - sum dy_k A_k
    let mut ds = rd.clone();
    for k in 0..m {
        ds.axpy(-dy[k], &prog.constraints[k]);
    }
    // dX = G - sym(S^{-1} dS X)
    let mut dx = g.clone();
    let ds_scaled = ws.scaled(&ds, x);
    dx.axpy(-1.0, &ds_scaled);
    dx.symmetrize();
    Ok((dx, dy.iter().copied().collect(), ds))
}

/// Solve a conic program to the requested relative tolerance.
pub fn solve_sdp(prog: &ConicProgram, tol: f64) -> Result<SdpSolution> {
    let m = prog.constraints.len();
    if prog.rhs.len() != m {
        return Err(Error::Domain("rhs length does not match constraint count".into()));
    }
    for c in prog.constraints.iter().chain([&prog.objective]) {
        if c.blocks.len() != prog.blocks.len()
            || c.blocks
                .iter()
                .zip(&prog.blocks)
                .any(|(b, k)| b.nrows() != k.side() || b.ncols() != k.side())
        {
            return Err(Error::Domain("coefficient block structure mismatch".into()));
        }
    }
    let nn: usize = prog.blocks.iter().map(|b| b.side()).sum();
    if nn == 0 || m == 0 {
        return Err(Error::Domain("empty conic program".into()));
    }

    let b_norm = prog.rhs.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let c_norm = prog.objective.norm_inf();
    let a_norm = prog
        .constraints
        .iter()
        .map(|a| a.norm_inf())
        .fold(0.0, f64::max);

    // Start well inside the cone, scaled to the data.
    let eta_p = 10.0 * (1.0 + b_norm).max(1.0 + a_norm);
    let eta_d = 10.0 * (1.0 + c_norm).max(1.0 + a_norm);
    let mut x = SymCoeffs::identity(&prog.blocks);
    x.scale(eta_p);
    let mut s = SymCoeffs::identity(&prog.blocks);
    s.scale(eta_d);
    let mut y = vec![0.0f64; m];

    let mut iterations = 0;
    for iter in 0..MAX_ITERS {
        iterations = iter + 1;

        // Residuals.
        let mut rp = vec![0.0f64; m];
        for k in 0..m {
            rp[k] = prog.rhs[k] - prog.constraints[k].dot(&x);
        }
        let mut rd = prog.objective.clone();
        rd.axpy(-1.0, &s);
        for k in 0..m {
            rd.axpy(-y[k], &prog.constraints[k]);
        }
        let gap = x.dot(&s);
        let mu = gap / nn as f64;
        let pobj = prog.objective.dot(&x);
        let dobj: f64 = prog.rhs.iter().zip(&y).map(|(b, yk)| b * yk).sum();

        let rp_norm = rp.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let rel_p = rp_norm / (1.0 + b_norm);
        let rel_d = rd.norm_inf() / (1.0 + c_norm);
        let rel_gap = gap.abs() / (1.0 + pobj.abs().max(dobj.abs()));

        if rel_p <= tol && rel_d <= tol && rel_gap <= tol {
            return finish(prog, x, y, s, pobj, dobj, iterations);
        }
        if x.trace() > BLOWUP || y.iter().any(|v| v.abs() > BLOWUP) {
            return Ok(SdpSolution {
                status: Status::NumericalFailure,
                primal_objective: pobj,
                dual_objective: dobj,
                x,
                y,
                s,
                iterations,
            });
        }

        let Some(ws) = Workspace::new(&s) else {
            return Err(Error::Solver("dual iterate left the cone".into()));
        };

        // Schur complement M_kl = <A_k, sym(S^{-1} A_l X)> (symmetric PD).
        let scaled_cols: Vec<SymCoeffs> = prog
            .constraints
            .iter()
            .map(|a| ws.scaled(a, &x))
            .collect();
        let mut schur = DMatrix::zeros(m, m);
        for l in 0..m {
            for k in 0..m {
                schur[(k, l)] = prog.constraints[k].dot(&scaled_cols[l]);
            }
        }
        let st = schur.transpose();
        schur += st;
        schur *= 0.5;
        // Tiny static regularization keeps the factorization stable near
        // the optimum.
        for k in 0..m {
            schur[(k, k)] += 1e-13 * (1.0 + schur[(k, k)].abs());
        }

        // Predictor: aim at mu = 0.
        let mut g_aff = x.clone();
        g_aff.scale(-1.0);
        let (dx_a, _dy_a, ds_a) = newton_direction(prog, &ws, &x, &rp, &rd, &g_aff, &schur)?;
        let ap = max_step(&x, &dx_a);
        let ad = max_step(&s, &ds_a);

        // Centering parameter from the affine step.
        let mut x_trial = x.clone();
        x_trial.axpy(ap, &dx_a);
        let mut s_trial = s.clone();
        s_trial.axpy(ad, &ds_a);
        let mu_aff = x_trial.dot(&s_trial) / nn as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector: G = sigma*mu*S^{-1} - X - sym(S^{-1} dS_a dX_a).
        let mut g = SymCoeffs {
            blocks: ws.s_inv.clone(),
        };
        g.scale(sigma * mu);
        g.axpy(-1.0, &x);
        let second_order = ws.scaled(&ds_a, &dx_a);
        g.axpy(-1.0, &second_order);
        let (dx, dy, ds) = newton_direction(prog, &ws, &x, &rp, &rd, &g, &schur)?;
        let ap = max_step(&x, &dx);
        let ad = max_step(&s, &ds);
        if ap < 1e-13 && ad < 1e-13 {
            return Ok(SdpSolution {
                status: Status::NumericalFailure,
                primal_objective: pobj,
                dual_objective: dobj,
                x,
                y,
                s,
                iterations,
            });
        }

        x.axpy(ap, &dx);
        x.symmetrize();
        for (k, yk) in y.iter_mut().enumerate() {
            *yk += ad * dy[k];
        }
        s.axpy(ad, &ds);
        s.symmetrize();
    }

    Ok(SdpSolution {
        status: Status::NumericalFailure,
        primal_objective: prog.objective.dot(&x),
        dual_objective: prog.rhs.iter().zip(&y).map(|(b, yk)| b * yk).sum(),
        x,
        y,
        s,
        iterations,
    })
}

/// Final feasibility re-verification before declaring optimality: both
/// iterates must be PSD to a shifted tolerance.
fn finish(
    prog: &ConicProgram,
    x: SymCoeffs,
    y: Vec<f64>,
    s: SymCoeffs,
    pobj: f64,
    dobj: f64,
    iterations: usize,
) -> Result<SdpSolution> {
    let scale_x = 1.0 + x.norm_inf();
    let scale_s = 1.0 + s.norm_inf();
    if x.min_eigenvalue() < -1e-8 * scale_x || s.min_eigenvalue() < -1e-8 * scale_s {
        return Err(Error::Solver("converged iterate failed the cone re-check".into()));
    }
    let _ = prog;
    Ok(SdpSolution {
        status: Status::Optimal,
        primal_objective: pobj,
        dual_objective: dobj,
        x,
        y,
        s,
        iterations,
    })
}
