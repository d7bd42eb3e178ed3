//! End-to-end acceptance checks. Each test prints a single pass/fail line
//! (visible with `--nocapture`) and asserts the criterion it names.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use phaserank::angle::Angle;
use phaserank::bounds::{forster_bound, forster_star_bound, gamma2_star_bound, structural_upper_bound};
use phaserank::colop::{is_colopsided_gap, relint_contains_origin, UnitPointSet};
use phaserank::detvec::{det_monomial_vector, matrix_is_colopsided};
use phaserank::matrix::PhaseMatrix;
use phaserank::rank3::{b_matrix, decide_rank3, largest_monomial_modulus, witness_rank3, WitnessOutcome};
use phaserank::scaling::{
    colop_volume_fraction, coverage_check_3xm, verify_scaling, ScalingVector, Verdict,
};

fn report(name: &str, ok: bool) {
    println!("acceptance {}: {}", name, if ok { "pass" } else { "FAIL" });
    assert!(ok, "acceptance criterion failed: {}", name);
}

// ---- fixtures ----------------------------------------------------------

fn sign6() -> PhaseMatrix {
    PhaseMatrix::from_signs(&[
        vec![1, 1, 1, 1, -1, 1],
        vec![-1, 1, -1, -1, -1, 1],
        vec![-1, 1, -1, 1, 1, 1],
        vec![-1, -1, 1, -1, -1, 1],
        vec![1, 1, -1, -1, -1, -1],
        vec![1, -1, -1, -1, -1, 1],
    ])
    .unwrap()
}

fn quad4() -> PhaseMatrix {
    let h = PI / 2.0;
    PhaseMatrix::from_radians(&[
        vec![0.0, 0.0, 0.0, h],
        vec![0.0, 0.0, PI, 0.0],
        vec![0.0, PI, 0.0, 0.0],
        vec![PI, 0.0, 0.0, 0.0],
    ])
    .unwrap()
}

fn quad8() -> PhaseMatrix {
    let h = PI / 2.0;
    let q = |z: &str| match z {
        "1" => 0.0,
        "-1" => PI,
        "i" => h,
        "-i" => -h,
        _ => unreachable!(),
    };
    let rows = [
        ["-1", "i", "-1", "i", "i", "-1", "1", "1"],
        ["-1", "i", "i", "i", "-i", "-i", "-i", "i"],
        ["1", "i", "1", "-1", "i", "i", "-i", "-1"],
        ["1", "i", "1", "1", "i", "1", "1", "i"],
        ["1", "i", "-1", "i", "i", "-i", "-1", "1"],
        ["-i", "-i", "1", "-i", "i", "-1", "-i", "-1"],
        ["-1", "i", "-1", "-i", "i", "i", "-1", "-i"],
        ["i", "-1", "i", "-i", "1", "-1", "-i", "-1"],
    ];
    let data: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|z| q(z)).collect()).collect();
    PhaseMatrix::from_radians(&data).unwrap()
}

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

/// Colopsided 4x4 built from a 3x4 with all 3x3 submatrices colopsided.
fn lopsided4() -> PhaseMatrix {
    let q = PI / 4.0;
    PhaseMatrix::from_radians(&[
        vec![0.0, 0.0, 0.0, 0.0],
        vec![0.0, PI, q, q],
        vec![0.0, q, PI, q],
        vec![0.0, q, q, PI],
    ])
    .unwrap()
}

fn spread3() -> PhaseMatrix {
    PhaseMatrix::from_radians(&[
        vec![0.0, 0.0, 0.0],
        vec![PI / 2.0, PI / 4.0, 2.0 * PI / 3.0],
        vec![-PI / 2.0, 7.0 * PI / 6.0, 4.0 * PI / 3.0],
    ])
    .unwrap()
}

fn covering3() -> PhaseMatrix {
    PhaseMatrix::from_radians(&[
        vec![0.0, 0.0, 0.0],
        vec![0.0, PI / 2.0, 2.0 * PI / 3.0],
        vec![0.0, -PI / 2.0, PI / 6.0],
    ])
    .unwrap()
}

fn pm34() -> PhaseMatrix {
    PhaseMatrix::from_signs(&[
        vec![1, 1, 1, 1],
        vec![1, 1, -1, -1],
        vec![1, -1, 1, -1],
    ])
    .unwrap()
}

fn random_3x3(rng: &mut ChaCha8Rng) -> PhaseMatrix {
    let data: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..3).map(|_| rng.gen_range(0.0..TAU)).collect())
        .collect();
    PhaseMatrix::from_radians(&data).unwrap()
}

// ---- criteria ----------------------------------------------------------

#[test]
fn c01_spectral_bound_reference_values() {
    let ok = (forster_bound(&sign6()).unwrap() - 1.7990).abs() < 1e-3
        && (forster_bound(&quad4()).unwrap() - 1.5751).abs() < 1e-3
        && (forster_bound(&quad8()).unwrap() - 1.8383).abs() < 1e-3;
    report("01 spectral-bound-reference-values", ok);
}

#[test]
fn c02_sdp_bound_reference_values() {
    let b6 = gamma2_star_bound(&sign6()).unwrap();
    let b4 = gamma2_star_bound(&quad4()).unwrap();
    let b8 = gamma2_star_bound(&quad8()).unwrap();
    let ceil8 = (b8 - 1e-9).ceil() as usize;
    let ok = (b6 - 2.0261).abs() < 1e-2
        && (b4 - 1.6996).abs() < 1e-2
        && (b8 - 2.0335).abs() < 1e-2
        && ceil8 == 3;
    report("02 sdp-bound-reference-values", ok);
}

#[test]
fn c03_colopsidedness_suite() {
    let d1 = decide_rank3(&theta1()).unwrap();
    let d2 = decide_rank3(&theta2()).unwrap();
    let d3 = decide_rank3(&theta3()).unwrap();
    let ok = d1.rank == 3
        && d2.rank == 3
        && d2.boundary
        && d3.rank < 3
        && !matrix_is_colopsided(&quad4()).unwrap()
        && matrix_is_colopsided(&lopsided4()).unwrap();
    report("03 colopsidedness-suite", ok);
}

fn witness_is_sound(theta: &PhaseMatrix) -> bool {
    let WitnessOutcome::Witness(w) = witness_rank3(theta).unwrap() else {
        return false;
    };
    let m = w.matrix.to_dmatrix();
    for i in 0..3 {
        for j in 0..3 {
            let phase = Angle::new(m[(i, j)].arg());
            if phase.circ_dist(theta.angle(i, j)) > 1e-9 || m[(i, j)].norm() <= 0.0 {
                return false;
            }
        }
    }
    let det = m.determinant().norm();
    if det > 1e-8 * largest_monomial_modulus(&m) {
        return false;
    }
    let svd = m.svd(false, false);
    svd.singular_values[2] / svd.singular_values[0] <= 1e-7
}

#[test]
fn c04_witness_construction_end_to_end() {
    let mut ok = witness_is_sound(&theta3()) && witness_is_sound(&example12());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut accepted = 0usize;
    while accepted < 1000 {
        let theta = random_3x3(&mut rng);
        let d = decide_rank3(&theta).unwrap();
        if d.rank != 2 || !d.margin.is_finite() || d.margin <= 1e-6 {
            continue;
        }
        accepted += 1;
        if !witness_is_sound(&theta) {
            ok = false;
            break;
        }
    }
    report("04 witness-construction-end-to-end", ok);
}

#[test]
fn c05_gap_vs_relint_oracle_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut disagreements = 0usize;
    for _ in 0..10_000 {
        let k = rng.gen_range(2..=8usize);
        let pts: Vec<Angle> = (0..k).map(|_| Angle::new(rng.gen_range(0.0..TAU))).collect();
        let set = UnitPointSet::new(pts);
        let gap = is_colopsided_gap(&set).unwrap();
        let relint = relint_contains_origin(&set).unwrap();
        if relint.is_boundary() {
            continue;
        }
        if gap != !relint.in_relint {
            disagreements += 1;
        }
    }
    report("05 gap-vs-relint-oracle-agreement", disagreements == 0);
}

#[test]
fn c06_coverage_certificates() {
    let deficient = coverage_check_3xm(&spread3(), 512).unwrap();
    let witness_ok = match deficient.grid.witness {
        Some((s, t)) => {
            let y = ScalingVector::all_unit(vec![Angle::new(0.0), Angle::new(s), Angle::new(t)]);
            verify_scaling(&spread3(), &y).unwrap()
        }
        None => false,
    };
    let full = coverage_check_3xm(&covering3(), 512).unwrap();
    let pm = coverage_check_3xm(&pm34(), 512).unwrap();
    let ok = deficient.verdict == Verdict::RankDeficientCertified
        && witness_ok
        && full.verdict == Verdict::FullRankCertified
        && pm.verdict == Verdict::FullRankCertified;
    report("06 coverage-certificates", ok);
}

#[test]
fn c07_structural_upper_bound() {
    let mut ok = structural_upper_bound(100, 100).unwrap().bound == 91
        && structural_upper_bound(1000, 1000).unwrap().bound == 929;
    // log-spaced sample of column counts from 4 to 1e6
    let lo = 4f64.ln();
    let hi = 1e6f64.ln();
    for i in 0..=200usize {
        let m = (lo + (hi - lo) * i as f64 / 200.0).exp().round() as usize;
        let b = structural_upper_bound(4, m).unwrap();
        if !(b.lambert_lower <= b.k_star && b.k_star <= b.lambert_upper) {
            ok = false;
            break;
        }
    }
    report("07 structural-upper-bound", ok);
}

#[test]
fn c08_colopsided_volume() {
    let samples = 1_000_000usize;
    let mut ok = true;
    for n in 2..=7usize {
        let est = colop_volume_fraction(n, samples, 1234 + n as u64).unwrap();
        let p = n as f64 / (1u64 << (n - 1)) as f64;
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        if (est - p).abs() > 4.0 * sigma + 1e-9 {
            ok = false;
        }
    }
    report("08 colopsided-volume", ok);
}

#[test]
fn c09_structural_identities() {
    let b = b_matrix();
    // null space of B^T is one-dimensional and contains (1,1,1,-1,-1,-1)
    let svd = b.clone().svd(false, false);
    let rank = svd.singular_values.iter().filter(|s| **s > 1e-9).count();
    let w = DMatrix::from_column_slice(6, 1, &[1.0, 1.0, 1.0, -1.0, -1.0, -1.0]);
    let residual = (b.transpose() * &w).norm();
    let mut ok = rank == 5 && residual < 1e-12;
    // monomial vector sums to the numeric determinant
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..500 {
        let n = rng.gen_range(2..=5usize);
        let data: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(0.0..TAU)).collect())
            .collect();
        let theta = PhaseMatrix::from_radians(&data).unwrap();
        let v = det_monomial_vector(&theta).unwrap();
        let numeric = DMatrix::from_fn(n, n, |i, j| {
            num_complex::Complex64::from_polar(1.0, theta.angle(i, j).value())
        })
        .determinant();
        let diff = (v.sum() - numeric).norm();
        if diff > 1e-9 * numeric.norm().max(1.0) {
            ok = false;
            break;
        }
    }
    report("09 structural-identities", ok);
}

/// Random row/column permutation plus unit-modulus row/column scalings.
fn random_transform(theta: &PhaseMatrix, rng: &mut ChaCha8Rng) -> PhaseMatrix {
    let n = theta.rows();
    let m = theta.cols();
    let mut rp: Vec<usize> = (0..n).collect();
    let mut cp: Vec<usize> = (0..m).collect();
    for i in (1..n).rev() {
        rp.swap(i, rng.gen_range(0..=i));
    }
    for j in (1..m).rev() {
        cp.swap(j, rng.gen_range(0..=j));
    }
    let rs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
    let cs: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..TAU)).collect();
    let data: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..m)
                .map(|j| theta.angle(rp[i], cp[j]).value() + rs[i] + cs[j])
                .collect()
        })
        .collect();
    PhaseMatrix::from_radians(&data).unwrap()
}

#[test]
fn c10_invariance_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ok = true;

    let base3 = theta3();
    let rank3_base = decide_rank3(&base3).unwrap().rank;
    let g2_base = gamma2_star_bound(&base3).unwrap();
    let fs_base = forster_star_bound(&base3).unwrap();
    for _ in 0..100 {
        let t = random_transform(&base3, &mut rng);
        ok &= decide_rank3(&t).unwrap().rank == rank3_base;
        ok &= (gamma2_star_bound(&t).unwrap() - g2_base).abs() < 1e-8;
        ok &= (forster_star_bound(&t).unwrap() - fs_base).abs() < 1e-8;
    }

    let base4 = quad4();
    let colop_base = matrix_is_colopsided(&base4).unwrap();
    let forster_base = forster_bound(&base4).unwrap();
    for _ in 0..100 {
        let t = random_transform(&base4, &mut rng);
        ok &= matrix_is_colopsided(&t).unwrap() == colop_base;
        ok &= (forster_bound(&t).unwrap() - forster_base).abs() < 1e-8;
    }

    let lop = lopsided4();
    for _ in 0..100 {
        let t = random_transform(&lop, &mut rng);
        ok &= matrix_is_colopsided(&t).unwrap();
    }

    report("10 invariance-suite", ok);
}
