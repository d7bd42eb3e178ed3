//! Ray-nonsingularity tools: the row-scaling rank criterion, the Colop(3)
//! membership oracle and torus-coverage certificate, Monte-Carlo volume
//! estimates of the colopsided region, counting bounds, and sign-rank
//! maximality.
//!
//! The underlying criterion: an n x m phase matrix has phase rank below n
//! exactly when some scaling of its rows by scalars in the unit circle plus
//! zero (not all zero) makes every column non-colopsided.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::colop::{is_colopsided_gap, largest_circular_gap, UnitPointSet, phase_rank_is_one};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, sum_indexed};
use crate::matrix::PhaseMatrix;
use crate::tol::EPS_ANGLE;

/// One row scalar: zero, or a unit complex number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scalar {
    Zero,
    Unit(Angle),
}

/// A row scaling by scalars in the unit circle plus zero, not all zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingVector {
    pub scalars: Vec<Scalar>,
}

impl ScalingVector {
    pub fn all_unit(angles: Vec<Angle>) -> Self {
        ScalingVector {
            scalars: angles.into_iter().map(Scalar::Unit).collect(),
        }
    }

    pub fn is_all_zero(&self) -> bool {
        self.scalars.iter().all(|s| matches!(s, Scalar::Zero))
    }
}

/// Scale the rows of `theta` and return the per-column point sets, with
/// zero-scaled rows omitted.
pub fn apply_scaling(theta: &PhaseMatrix, y: &ScalingVector) -> Result<Vec<UnitPointSet>> {
    if y.scalars.len() != theta.rows() {
        return Err(Error::Domain(format!(
            "scaling has {} entries for a matrix with {} rows",
            y.scalars.len(),
            theta.rows()
        )));
    }
    if y.is_all_zero() {
        return Err(Error::Domain("scaling vector must not be all zero".into()));
    }
    Ok((0..theta.cols())
        .map(|j| {
            let pts = y
                .scalars
                .iter()
                .enumerate()
                .filter_map(|(i, s)| match s {
                    Scalar::Zero => None,
                    Scalar::Unit(a) => Some(*a + theta.angle(i, j)),
                })
                .collect();
            UnitPointSet::new(pts)
        })
        .collect())
}

/// Gap margin of one scaled column: largest circular gap minus pi.
fn column_margin(theta: &PhaseMatrix, offsets: &[f64], j: usize) -> f64 {
    let pts: Vec<Angle> = offsets
        .iter()
        .enumerate()
        .map(|(i, &o)| theta.angle(i, j) + Angle::new(o))
        .collect();
    largest_circular_gap(&pts) - PI
}

fn all_columns_strictly_noncolopsided(theta: &PhaseMatrix, offsets: &[f64]) -> bool {
    (0..theta.cols()).all(|j| column_margin(theta, offsets, j) < -EPS_ANGLE)
}

/// Penalty minimized by the scaling search: total positive part of the
/// per-column gap margins.
fn penalty(theta: &PhaseMatrix, offsets: &[f64]) -> f64 {
    (0..theta.cols())
        .map(|j| column_margin(theta, offsets, j).max(0.0))
        .sum()
}

/// Golden-section refinement of a 1-d objective on `[lo, hi]`.
fn golden_section<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..48 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Minimize a periodic 1-d objective: coarse scan then golden-section.
fn line_search<F: Fn(f64) -> f64>(f: F) -> f64 {
    const SCAN: usize = 64;
    let h = TAU / SCAN as f64;
    let mut best = (f(0.0), 0.0);
    for k in 1..SCAN {
        let a = k as f64 * h;
        let v = f(a);
        if v < best.0 {
            best = (v, a);
        }
    }
    golden_section(&f, best.1 - h, best.1 + h)
}

fn search_unit_scaling(theta: &PhaseMatrix, restarts: usize, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let n = theta.rows();
    for _ in 0..restarts.max(1) {
        let mut offsets: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { rng.gen_range(0.0..TAU) }).collect();
        let mut last = penalty(theta, &offsets);
        for _ in 0..200 {
            for i in 1..n {
                let base = offsets.clone();
                let alpha = line_search(|a| {
                    let mut o = base.clone();
                    o[i] = a;
                    penalty(theta, &o)
                });
                offsets[i] = alpha.rem_euclid(TAU);
            }
            let now = penalty(theta, &offsets);
            if now == 0.0 && all_columns_strictly_noncolopsided(theta, &offsets) {
                return Some(offsets);
            }
            if last - now < 1e-15 {
                break;
            }
            last = now;
        }
        if all_columns_strictly_noncolopsided(theta, &offsets) {
            return Some(offsets);
        }
    }
    None
}

/// Randomized multi-start search for a row scaling making every column
/// non-colopsided. Returns a re-verified scaling or `None`; absence of a
/// find proves nothing. Zero scalars are reached by descending to
/// row-deleted subproblems.
pub fn search_noncolopsided_scaling(
    theta: &PhaseMatrix,
    restarts: usize,
    seed: u64,
) -> Result<Option<ScalingVector>> {
    let n = theta.rows();
    if n > theta.cols() {
        return Err(Error::Domain(format!(
            "scaling search expects n <= m, got {}x{}",
            n,
            theta.cols()
        )));
    }
    if n < 2 {
        // a single point is always colopsided
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Some(offsets) = search_unit_scaling(theta, restarts, &mut rng) {
        let angles = offsets.into_iter().map(Angle::new).collect();
        let y = ScalingVector::all_unit(angles);
        debug_assert!(verify_scaling(theta, &y)?);
        return Ok(Some(y));
    }
    // Descend: zero out one row and solve the (n-1)-row subproblem.
    if n >= 3 {
        for i in 0..n {
            let sub = theta.delete_row(i)?;
            if let Some(sub_scaling) =
                search_noncolopsided_scaling(&sub, restarts.max(2) / 2, seed.wrapping_add(1 + i as u64))?
            {
                let mut scalars = sub_scaling.scalars;
                scalars.insert(i, Scalar::Zero);
                let y = ScalingVector { scalars };
                if verify_scaling(theta, &y)? {
                    return Ok(Some(y));
                }
            }
        }
    }
    Ok(None)
}

/// Exact re-verification: every scaled column must be non-colopsided.
pub fn verify_scaling(theta: &PhaseMatrix, y: &ScalingVector) -> Result<bool> {
    let columns = apply_scaling(theta, y)?;
    for col in &columns {
        if is_colopsided_gap(col)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership in Colop(3) with the first coordinate normalized to 1:
/// whether `{1, e^{iu}, e^{iv}}` is colopsided.
pub fn colop3_region_membership(u: Angle, v: Angle) -> bool {
    let set = UnitPointSet::new(vec![Angle::new(0.0), u, v]);
    is_colopsided_gap(&set).expect("nonempty set")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    CertifiedCovered,
    UncoveredWitness,
    Unresolved,
}

/// Raster over `[0, 2pi)^2` with a per-cell coverage status.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorusGrid {
    pub resolution: usize,
    /// Row-major: cell `(a, b)` covers `s` in `[a*h, (a+1)*h)`,
    /// `t` in `[b*h, (b+1)*h)` with `h = 2pi/resolution`.
    pub cells: Vec<CellStatus>,
    /// An exactly re-verified point where no column is colopsided.
    pub witness: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    RankDeficientCertified,
    FullRankCertified,
    Unresolved,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageCertificate {
    pub verdict: Verdict,
    pub grid: TorusGrid,
    /// Both 2xm row-deleted submatrices have phase rank 2 (hypothesis of
    /// the coverage criterion). When it fails the rank is at most 2 and we
    /// certify deficiency directly.
    pub precondition_ok: bool,
}

pub const DEFAULT_RESOLUTION: usize = 512;

/// Lipschitz constant of the per-column gap margin in `(s, t)` under the
/// sup metric: rotating one point by `delta` moves any gap by at most
/// `2*delta`.
const LIPSCHITZ: f64 = 2.0;

/// Largest per-column margin at the point `(s, t)`.
fn best_margin(theta: &PhaseMatrix, s: f64, t: f64) -> f64 {
    let m = theta.cols();
    let mut best = f64::NEG_INFINITY;
    for j in 0..m {
        best = best.max(column_margin(theta, &[0.0, s, t], j));
    }
    best
}

/// All-columns-non-colopsided at `(s, t)`, strictly below the tolerance.
fn point_is_uncovered(theta: &PhaseMatrix, s: f64, t: f64) -> bool {
    (0..theta.cols()).all(|j| column_margin(theta, &[0.0, s, t], j) <= -EPS_ANGLE)
}

fn classify_point(theta: &PhaseMatrix, s: f64, t: f64, radius: f64) -> CellStatus {
    let margin = best_margin(theta, s, t);
    if margin >= LIPSCHITZ * radius {
        CellStatus::CertifiedCovered
    } else if point_is_uncovered(theta, s, t) {
        CellStatus::UncoveredWitness
    } else {
        CellStatus::Unresolved
    }
}

/// Certify whether the column copies of the colopsided region cover the
/// torus: covered everywhere means full phase rank 3, an uncovered point is
/// a non-colopsided scaling and certifies rank below 3.
pub fn coverage_check_3xm(theta: &PhaseMatrix, resolution: usize) -> Result<CoverageCertificate> {
    if theta.rows() != 3 || theta.cols() < 3 {
        return Err(Error::Domain(format!(
            "coverage check needs a 3xm matrix with m >= 3, got {}x{}",
            theta.rows(),
            theta.cols()
        )));
    }
    if resolution < 8 {
        return Err(Error::Domain("coverage resolution must be at least 8".into()));
    }
    // Hypothesis: every row-deleted 2xm submatrix has phase rank 2. A
    // rank-1 submatrix caps the full rank at 2 and decides immediately.
    for i in 0..3 {
        if phase_rank_is_one(&theta.delete_row(i)?) {
            return Ok(CoverageCertificate {
                verdict: Verdict::RankDeficientCertified,
                grid: TorusGrid {
                    resolution,
                    cells: Vec::new(),
                    witness: None,
                },
                precondition_ok: false,
            });
        }
    }

    let h = TAU / resolution as f64;
    let statuses: Vec<CellStatus> = map_indexed(resolution * resolution, |idx| {
        let a = idx / resolution;
        let b = idx % resolution;
        let s = (a as f64 + 0.5) * h;
        let t = (b as f64 + 0.5) * h;
        // certification radius: cell center to corner in the sup metric
        classify_point(theta, s, t, h / 2.0)
    });

    // One 4x refinement pass over unresolved cells.
    let refined: Vec<CellStatus> = map_indexed(resolution * resolution, |idx| {
        let status = statuses[idx];
        if status != CellStatus::Unresolved {
            return status;
        }
        let a = idx / resolution;
        let b = idx % resolution;
        let hh = h / 4.0;
        let mut all_covered = true;
        for p in 0..4 {
            for q in 0..4 {
                let s = a as f64 * h + (p as f64 + 0.5) * hh;
                let t = b as f64 * h + (q as f64 + 0.5) * hh;
                match classify_point(theta, s, t, hh / 2.0) {
                    CellStatus::CertifiedCovered => {}
                    CellStatus::UncoveredWitness => return CellStatus::UncoveredWitness,
                    CellStatus::Unresolved => all_covered = false,
                }
            }
        }
        if all_covered {
            CellStatus::CertifiedCovered
        } else {
            CellStatus::Unresolved
        }
    });

    // Locate and exactly re-verify the first witness in cell order.
    let mut witness = None;
    'outer: for (idx, st) in refined.iter().enumerate() {
        if *st == CellStatus::UncoveredWitness {
            let a = idx / resolution;
            let b = idx % resolution;
            let hh = h / 4.0;
            // the witness is the coarse center or one of the refined centers
            let mut candidates = vec![((a as f64 + 0.5) * h, (b as f64 + 0.5) * h)];
            for p in 0..4 {
                for q in 0..4 {
                    candidates.push((
                        a as f64 * h + (p as f64 + 0.5) * hh,
                        b as f64 * h + (q as f64 + 0.5) * hh,
                    ));
                }
            }
            for (s, t) in candidates {
                if point_is_uncovered(theta, s, t) {
                    witness = Some((s, t));
                    break 'outer;
                }
            }
        }
    }

    let verdict = if witness.is_some() {
        Verdict::RankDeficientCertified
    } else if refined.iter().all(|s| *s == CellStatus::CertifiedCovered) {
        Verdict::FullRankCertified
    } else {
        Verdict::Unresolved
    };
    Ok(CoverageCertificate {
        verdict,
        grid: TorusGrid {
            resolution,
            cells: refined,
            witness,
        },
        precondition_ok: true,
    })
}

/// Monte-Carlo estimate of the probability that `n` uniform phases are
/// colopsided; the exact value is `n / 2^(n-1)`.
pub fn colop_volume_fraction(n: usize, samples: usize, seed: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain("volume estimate needs n >= 2".into()));
    }
    if samples == 0 {
        return Err(Error::Domain("volume estimate needs at least one sample".into()));
    }
    const CHUNK: usize = 1 << 12;
    let chunks = samples.div_ceil(CHUNK);
    let hits = sum_indexed(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64 + 1);
        let count = CHUNK.min(samples - c * CHUNK);
        let mut hit = 0u64;
        let mut pts = vec![Angle::new(0.0); n];
        for _ in 0..count {
            for p in pts.iter_mut() {
                *p = Angle::new(rng.gen_range(0.0..TAU));
            }
            if is_colopsided_gap(&UnitPointSet::new(pts.clone())).unwrap() {
                hit += 1;
            }
        }
        hit
    });
    Ok(hits as f64 / samples as f64)
}

/// Outcome of the counting bound on phase rank.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonsingularityVerdict {
    pub deficient_guaranteed: bool,
    /// "inequality" when decided by `m < 2^(n-1)/n`, "literature" for the
    /// square sizes 5 and 6 (known extremal results), "open" otherwise.
    pub method: String,
}

/// Guaranteed rank deficiency from counting: every n x m phase matrix has
/// phase rank below n when `m < 2^(n-1)/n`. The square sizes 5 and 6 are
/// also deficient by known extremal results.
pub fn nonsingularity_bound(n: usize, m: usize) -> Result<NonsingularityVerdict> {
    if n > m {
        return Err(Error::Domain(format!("expected n <= m, got {n}x{m}")));
    }
    if n == 0 {
        return Err(Error::Domain("dimensions must be positive".into()));
    }
    let by_inequality = match 1u128.checked_shl(n as u32 - 1) {
        Some(p) => (m as u128).saturating_mul(n as u128) < p,
        None => true,
    };
    if by_inequality {
        return Ok(NonsingularityVerdict {
            deficient_guaranteed: true,
            method: "inequality".into(),
        });
    }
    if n == m && (n == 5 || n == 6) {
        return Ok(NonsingularityVerdict {
            deficient_guaranteed: true,
            method: "literature".into(),
        });
    }
    Ok(NonsingularityVerdict {
        deficient_guaranteed: false,
        method: "open".into(),
    })
}

const MAX_SIGN_ROWS: usize = 15;

fn validate_sign_matrix(s: &[Vec<i8>]) -> Result<(usize, usize)> {
    let n = s.len();
    if n == 0 || s[0].is_empty() {
        return Err(Error::Domain("sign matrix must be nonempty".into()));
    }
    let m = s[0].len();
    if s.iter().any(|r| r.len() != m) {
        return Err(Error::Domain("ragged sign matrix".into()));
    }
    if s.iter().flatten().any(|&e| !(-1..=1).contains(&e)) {
        return Err(Error::Domain("sign matrix entries must be -1, 0, or 1".into()));
    }
    if n > m {
        return Err(Error::Domain(format!("expected n <= m, got {n}x{m}")));
    }
    if n > MAX_SIGN_ROWS {
        return Err(Error::Capacity(format!(
            "sign enumeration capped at {MAX_SIGN_ROWS} rows, got {n}"
        )));
    }
    Ok((n, m))
}

/// Whether a sign matrix has maximal sign rank (= n): true iff every row
/// scaling by scalars in {-1, 0, 1}, not all zero, leaves some column
/// unisigned (nonzero without two entries of opposite sign).
pub fn sign_rank_is_maximal(s: &[Vec<i8>]) -> Result<bool> {
    let (n, m) = validate_sign_matrix(s)?;
    let total = 3usize.pow(n as u32);
    // a scaling with no unisigned column witnesses nonmaximality
    let found = crate::exec::any_indexed(total, |code| {
        let mut y = [0i8; MAX_SIGN_ROWS];
        let mut c = code;
        for yi in y.iter_mut().take(n) {
            *yi = [0i8, 1, -1][c % 3];
            c /= 3;
        }
        // skip zero and fix the global sign: first nonzero scalar is +1
        match y.iter().take(n).copied().find(|v| *v != 0) {
            None => return false,
            Some(-1) => return false,
            Some(_) => {}
        }
        for j in 0..m {
            let mut pos = false;
            let mut neg = false;
            for i in 0..n {
                match y[i] * s[i][j] {
                    1 => pos = true,
                    -1 => neg = true,
                    _ => {}
                }
            }
            let unisigned = (pos || neg) && !(pos && neg);
            if unisigned {
                return false;
            }
        }
        true
    });
    Ok(!found)
}
