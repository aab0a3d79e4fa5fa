use super::*;
use crate::linalg::{self, Mat};
use crate::sampling;
use proptest::prelude::*;
use rand::Rng;

fn spec(d: usize, level: u32, m: usize) -> GridSpec {
    GridSpec::new(d, level, m).unwrap()
}

fn diag(values: &[f64]) -> Mat {
    let n = values.len();
    Mat::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) })
}

#[test]
fn threshold_above_everything_keeps_identity() {
    let f = MatrixField::constant(spec(2, 3, 2), &(linalg::identity(2) * C64::new(0.7, 0.0)));
    let state = cuculescu(&f, 1.0).unwrap();
    for n in 0..=3 {
        assert!(state.q_field(n).rel_l2_distance(&MatrixField::identity(*f.spec())) < 1e-15);
    }
    assert!(state.active_cubes().is_empty());
    let parts = cz_decompose_positive(&f, 1.0).unwrap();
    assert!(parts.a.rel_l2_distance(&f) < 1e-15);
    assert_eq!(parts.b_d.max_abs(), 0.0);
    assert_eq!(parts.b_o.max_abs(), 0.0);
    assert_eq!(parts.p, MatrixField::identity(*f.spec()));
}

#[test]
fn two_cell_hand_example() {
    let s1 = spec(1, 1, 1);
    let f = MatrixField::from_scalars(s1, &[2.0, 0.0]).unwrap();
    let state = cuculescu(&f, 1.5).unwrap();
    assert_eq!(state.q(), MatrixField::from_scalars(s1, &[0.0, 1.0]).unwrap());
    assert!((state.bad_trace() - 0.5).abs() < 1e-15);
    assert!(state.bad_trace() <= 1.0 / 1.5);
    let parts = cz_decompose_positive(&f, 1.5).unwrap();
    let close = |a: &MatrixField, v: &[f64]| a.rel_l2_distance(&MatrixField::from_scalars(s1, v).unwrap()) < 1e-15
        || (a.max_abs() == 0.0 && v.iter().all(|x| *x == 0.0));
    assert!(close(&parts.a, &[1.0, 1.0]));
    assert!(close(&parts.b_d, &[1.0, -1.0]));
    assert!(close(&parts.b_o, &[0.0, 0.0]));
    assert_eq!(parts.p, MatrixField::zeros(s1));
}

#[test]
fn constant_diagonal_hand_example() {
    let f = MatrixField::constant(spec(1, 3, 2), &diag(&[2.0, 0.5]));
    let state = cuculescu(&f, 1.0).unwrap();
    for n in 1..=3 {
        assert!(state.q_field(n).rel_l2_distance(&MatrixField::constant(*f.spec(), &diag(&[0.0, 1.0]))) < 1e-14);
    }
}

#[test]
fn projection_with_single_rank_one_cube() {
    let sp = spec(1, 4, 2);
    let hot = 6;
    let f = MatrixField::from_fn(sp, |_| diag(&[0.0, 0.0]))
        .map_indexed(|k, a| if k == hot { diag(&[1.0, 0.0]) } else { a.clone() });
    let state = cuculescu(&f, 0.75).unwrap();
    assert_eq!(state.active_cubes(), vec![(4, hot)]);
    let p = cz_projection(&state);
    for k in 0..16 {
        let expected = if (k as i64 - hot as i64).abs() <= 2 { diag(&[0.0, 1.0]) } else { linalg::identity(2) };
        assert!(linalg::hs_norm(&(p.cell(k) - expected)) < 1e-12, "cell {k}");
    }
    assert!(support_defect(&state, &p) < 1e-12);
}

#[test]
fn ball_cells_match_full_scan() {
    let mut rng = sampling::rng(12);
    for _ in 0..200 {
        let d = rng.random_range(1..=3);
        let level = rng.random_range(1..=if d == 3 { 3 } else { 5 });
        let sp = spec(d, level, 1);
        let y: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let r = rng.random_range(0.0..0.9);
        let scan: Vec<usize> = (0..sp.n_cells())
            .filter(|&k| crate::dyadic::torus_distance(&sp.center(k)[..d], &y) < r)
            .collect();
        assert_eq!(cells_in_ball(&sp, &y, r), scan);
    }
}

/// Classical dyadic stopping-time construction on scalar data: bad cells are those with
/// `max_{1≤n≤L} E_n f > s`; maximal bad cubes carry `1_{Q̂} |Q|/|Q̂| f_Q` in the good part.
fn scalar_oracle(values: &[f64], d: usize, level: u32, s: f64) -> (Vec<bool>, Vec<f64>) {
    let sp = spec(d, level, 1);
    let n_cells = sp.n_cells();
    let mean_at = |n: u32, cell: usize| -> f64 {
        let q = crate::dyadic::cube_of_cell(&sp, cell, n);
        let members: Vec<usize> = (0..n_cells).filter(|&c| crate::dyadic::cube_of_cell(&sp, c, n) == q).collect();
        members.iter().map(|&c| values[c]).sum::<f64>() / members.len() as f64
    };
    let first_bad: Vec<Option<u32>> = (0..n_cells)
        .map(|c| (1..=level).find(|&n| mean_at(n, c) > s))
        .collect();
    let bad: Vec<bool> = first_bad.iter().map(Option::is_some).collect();
    let mut a: Vec<f64> = (0..n_cells).map(|c| if bad[c] { 0.0 } else { values[c] }).collect();
    let mut seen = std::collections::BTreeSet::new();
    for c in 0..n_cells {
        if let Some(n) = first_bad[c] {
            let q = crate::dyadic::cube_of_cell(&sp, c, n);
            if !seen.insert((n, q)) {
                continue;
            }
            let fq = mean_at(n, c);
            let parent = crate::dyadic::cube_of_cell(&sp, c, n - 1);
            let ratio = 2f64.powi(-(d as i32));
            for x in 0..n_cells {
                if crate::dyadic::cube_of_cell(&sp, x, n - 1) == parent {
                    a[x] += ratio * fq;
                }
            }
        }
    }
    (bad, a)
}

#[test]
fn scalar_pipeline_matches_classical_construction() {
    let mut rng = sampling::rng(314);
    for _ in 0..200 {
        let d = rng.random_range(1..=2);
        let level = rng.random_range(1..=if d == 1 { 6 } else { 3 });
        let sp = spec(d, level, 1);
        let values: Vec<f64> = (0..sp.n_cells()).map(|_| rng.random::<f64>().powi(4) * 10.0).collect();
        let f = MatrixField::from_scalars(sp, &values).unwrap();
        let s = 2f64.powi(rng.random_range(-2..=3));
        let (bad, a_oracle) = scalar_oracle(&values, d, level, s);
        let state = cuculescu(&f, s).unwrap();
        let e = state.e();
        for k in 0..sp.n_cells() {
            assert_eq!(e.cell(k)[(0, 0)].re > 0.5, bad[k]);
        }
        let parts = cz_decompose_positive(&f, s).unwrap();
        for k in 0..sp.n_cells() {
            assert!((parts.a.cell(k)[(0, 0)].re - a_oracle[k]).abs() < 1e-12);
        }
        assert_eq!(parts.b_o.max_abs(), 0.0);
    }
}

#[test]
fn cuculescu_invariants_on_random_positive_fields() {
    let mut rng = sampling::rng(2718);
    for _ in 0..150 {
        let d = rng.random_range(1..=2);
        let level = rng.random_range(1..=if d == 1 { 6 } else { 3 });
        let m = rng.random_range(1..=4);
        let f = sampling::positive_field(spec(d, level, m), 1.5, &mut rng);
        let s = 2f64.powi(rng.random_range(-4..=4));
        let state = cuculescu(&f, s).unwrap();
        let (idem, mono) = state.projection_defects();
        assert!(idem < 1e-10 && mono < 1e-10);
        assert!(state.max_compressed_norm(&f).unwrap() <= s + 1e-9 * s.max(1.0));
        assert!(state.bad_trace() <= f.l1_norm() / s * (1.0 + 1e-9));
    }
}

#[test]
fn decomposition_reconstructs_and_b_d_is_martingale_difference() {
    let mut rng = sampling::rng(1618);
    for _ in 0..100 {
        let d = rng.random_range(1..=2);
        let level = rng.random_range(1..=if d == 1 { 6 } else { 3 });
        let m = rng.random_range(1..=4);
        let f = sampling::positive_field(spec(d, level, m), 1.5, &mut rng);
        let s = 2f64.powi(rng.random_range(-4..=4));
        let parts = cz_decompose_positive(&f, s).unwrap();
        assert!(parts.reconstruction_error(&f) < 1e-10);
        let state = &parts.states[0].1;
        for n in 1..=level {
            let efe = f.compress(&state.e_field(n));
            let term = efe.sub(&crate::dyadic::conditional_expectation(&efe, n - 1).unwrap());
            let cond = crate::dyadic::conditional_expectation(&term, n - 1).unwrap();
            assert!(cond.max_abs() <= 1e-12 * (1.0 + f.max_abs()));
        }
        for i in 0..parts.p.cells().len() {
            let p = parts.p.cell(i);
            assert!(linalg::hs_norm(&(p * p - p)) < 1e-10);
        }
        assert!(support_defect(state, &parts.p) < 1e-9);
    }
}

#[test]
fn rejects_invalid_input() {
    let sp = spec(1, 2, 2);
    let mut rng = sampling::rng(1);
    let g = sampling::gaussian_field(sp, &mut rng);
    assert!(matches!(cuculescu(&g, 1.0), Err(crate::Error::NotHermitian { .. })));
    let neg = MatrixField::constant(sp, &diag(&[-1.0, 1.0]));
    assert!(matches!(cuculescu(&neg, 1.0), Err(crate::Error::NotPositive { .. })));
    let pos = MatrixField::identity(sp);
    assert!(cuculescu(&pos, 0.0).is_err());
    assert!(cuculescu(&pos, f64::NAN).is_err());
}

#[test]
fn general_field_reduces_to_positive_case() {
    let mut rng = sampling::rng(5);
    let f = sampling::positive_field(spec(1, 4, 2), 1.0, &mut rng);
    let general = cz_decompose(&f, 0.5).unwrap();
    let positive = cz_decompose_positive(&f, 0.5).unwrap();
    assert!(general.a.rel_l2_distance(&positive.a) < 1e-12);
    assert!(general.p.rel_l2_distance(&positive.p) < 1e-12);
}

#[test]
fn hermitian_scalar_is_difference_of_decompositions() {
    let sp = spec(1, 1, 1);
    let f = MatrixField::from_scalars(sp, &[1.0, -1.0]).unwrap();
    let s = 0.75;
    let general = cz_decompose(&f, s).unwrap();
    let plus = cz_decompose_positive(&MatrixField::from_scalars(sp, &[1.0, 0.0]).unwrap(), s).unwrap();
    let minus = cz_decompose_positive(&MatrixField::from_scalars(sp, &[0.0, 1.0]).unwrap(), s).unwrap();
    assert!(general.a.sub(&plus.a.sub(&minus.a)).max_abs() < 1e-15);
    assert!(general.b_d.sub(&plus.b_d.sub(&minus.b_d)).max_abs() < 1e-15);
    assert!(general.p.sub(&meet_fields(&[&plus.p, &minus.p])).max_abs() < 1e-15);
}

#[test]
fn general_decomposition_on_random_fields() {
    let mut rng = sampling::rng(99);
    for _ in 0..40 {
        let m = rng.random_range(1..=3);
        let f = sampling::gaussian_field(spec(2, 3, m), &mut rng);
        let s = 2f64.powi(rng.random_range(-3..=2));
        let parts = cz_decompose(&f, s).unwrap();
        assert!(parts.reconstruction_error(&f) < 1e-10);
        let sum_parts: f64 = f
            .positive_parts()
            .iter()
            .filter(|g| g.max_abs() > 0.0)
            .map(|g| cz_decompose_positive(g, s).unwrap().p_perp_trace())
            .sum();
        assert!(parts.p_perp_trace() <= sum_parts + 1e-9);
    }
}

#[test]
fn vector_decomposition() {
    let mut rng = sampling::rng(8);
    let sp = spec(2, 3, 2);
    let f1 = sampling::gaussian_field(sp, &mut rng);
    let single = cz_decompose(&f1, 0.5).unwrap();
    let one = cz_decompose_vector(std::slice::from_ref(&f1), 0.5).unwrap();
    assert_eq!(one.p, single.p);
    let with_zero = cz_decompose_vector(&[f1.clone(), MatrixField::zeros(sp)], 0.5).unwrap();
    assert!(with_zero.p.rel_l2_distance(&single.p) < 1e-12);
    let f2 = sampling::gaussian_field(sp, &mut rng);
    let both = cz_decompose_vector(&[f1.clone(), f2.clone()], 0.5).unwrap();
    let bound = 2.0 * both.components.iter().map(CZParts::p_perp_trace).sum::<f64>();
    assert!(both.p_perp_trace() <= bound + 1e-9);
    let other = sampling::gaussian_field(spec(2, 2, 2), &mut rng);
    assert!(cz_decompose_vector(&[f1, other], 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn reconstruction_property(seed in any::<u64>(), level in 1u32..=5, m in 1usize..=3, k in -4i32..=4) {
        let mut rng = sampling::rng(seed);
        let f = sampling::positive_field(spec(1, level, m), 2.0, &mut rng);
        let s = 2f64.powi(k);
        let parts = cz_decompose_positive(&f, s).unwrap();
        prop_assert!(parts.reconstruction_error(&f) < 1e-10);
        prop_assert!(parts.states[0].1.bad_trace() <= f.l1_norm() / s * (1.0 + 1e-9));
    }
}
