//! Matrix-valued step functions on the dyadic torus and their rearrangement invariants.
//!
//! The trace on `L_∞(T^d) ⊗ M_m` is `σ(f) = Σ_cells vol·Tr f(cell)` with the unnormalized
//! matrix trace, so `σ(1) = m`. Everything in this module is derived from the per-cell
//! singular values: the singular function `μ_f`, the distribution function `λ_f`, the
//! `L_p` norms and `K_t(f, L₁, L_∞) = ∫₀ᵗ μ_f`.

mod field;
pub mod io;
mod singular;

pub use field::{sum_fields, GridSpec, MatrixField, MAX_DIM};
pub use singular::{
    distribution_function, k_functional_cutoff, k_functional_l1_linf, singular_function, Couple, KProfile,
    SingularFunction,
};

use crate::linalg::C64;

pub fn trace(f: &MatrixField) -> C64 {
    f.trace()
}

pub fn lp_norm(f: &MatrixField, p: f64) -> f64 {
    f.lp_norm(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, Mat};
    use crate::sampling;
    use proptest::prelude::*;
    use rand::Rng;

    fn scalar(values: &[f64]) -> MatrixField {
        let level = (values.len() as f64).log2() as u32;
        MatrixField::from_scalars(GridSpec::new(1, level, 1).unwrap(), values).unwrap()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn trace_examples() {
        let spec = GridSpec::new(2, 3, 2).unwrap();
        assert_eq!(trace(&MatrixField::zeros(spec)), c(0.0));
        assert!((trace(&MatrixField::identity(spec)) - c(2.0)).norm() < 1e-14);
        assert!((trace(&scalar(&[2.0, 0.0])) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_of_adjoint_is_conjugate() {
        let mut rng = sampling::rng(3);
        let f = sampling::gaussian_field(GridSpec::new(1, 4, 3).unwrap(), &mut rng);
        assert!((trace(&f.adjoint()) - trace(&f).conj()).norm() < 1e-13);
        let pos = f.adjoint().mul(&f);
        let tr = trace(&pos);
        assert!(tr.re > 0.0 && tr.im.abs() < 1e-13);
    }

    #[test]
    fn singular_function_examples() {
        let spec = GridSpec::new(1, 2, 3).unwrap();
        let f = MatrixField::constant(spec, &(linalg::identity(3) * C64::new(0.0, -1.5)));
        let mu = singular_function(&f);
        assert_eq!(mu.pairs().len(), 1);
        assert!((mu.pairs()[0].0 - 1.5).abs() < 1e-14 && (mu.pairs()[0].1 - 3.0).abs() < 1e-14);
        assert_eq!(mu.value_at(2.9), mu.pairs()[0].0);
        assert_eq!(mu.value_at(3.0), 0.0);

        let mu = singular_function(&scalar(&[2.0, 0.0]));
        assert_eq!(mu.pairs(), &[(2.0, 0.5)]);
        assert_eq!(mu.domain(), 1.0);
        assert_eq!(mu.value_at(0.25), 2.0);
        assert_eq!(mu.value_at(0.75), 0.0);
    }

    #[test]
    fn singular_function_unitary_invariance() {
        let mut rng = sampling::rng(11);
        let spec = GridSpec::new(2, 2, 3).unwrap();
        let f = sampling::gaussian_field(spec, &mut rng);
        let u = linalg::svd(&sampling::gaussian_matrix(3, &mut rng)).u;
        let v = linalg::svd(&sampling::gaussian_matrix(3, &mut rng)).v_t;
        let g = f.map(|a| &u * a * &v);
        let (a, b) = (singular_function(&f), singular_function(&g));
        assert_eq!(a.pairs().len(), b.pairs().len());
        for (x, y) in a.pairs().iter().zip(b.pairs()) {
            assert!((x.0 - y.0).abs() < 1e-12 * x.0.max(1.0));
        }
    }

    #[test]
    fn distribution_examples() {
        let spec = GridSpec::new(1, 3, 2).unwrap();
        assert_eq!(distribution_function(&MatrixField::zeros(spec), 0.0), 0.0);
        let f = scalar(&[2.0, 0.0]);
        assert_eq!(distribution_function(&f, 1.0), 0.5);
        assert_eq!(distribution_function(&f, 3.0), 0.0);
        assert_eq!(distribution_function(&f, 2.0), 0.0);
    }

    #[test]
    fn distribution_inverts_singular_function() {
        let mut rng = sampling::rng(5);
        let f = sampling::gaussian_field(GridSpec::new(1, 3, 2).unwrap(), &mut rng);
        let mu = singular_function(&f);
        // μ(t) = inf{s : λ(s) ≤ t}
        for k in 0..40 {
            let t = k as f64 * 0.05;
            let v = mu.value_at(t);
            assert!(mu.distribution(v) <= t + 1e-12);
            if v > 0.0 {
                assert!(mu.distribution(v * (1.0 - 1e-9)) > t);
            }
        }
        assert!(mu.distribution(0.0) <= 2.0 + 1e-12);
    }

    #[test]
    fn lp_norm_examples() {
        let spec = GridSpec::new(1, 2, 2).unwrap();
        assert!((lp_norm(&MatrixField::identity(spec), 1.0) - 2.0).abs() < 1e-14);
        let f = scalar(&[2.0, 0.0]);
        assert!((lp_norm(&f, 1.0) - 1.0).abs() < 1e-15);
        assert!((lp_norm(&f, 2.0) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(lp_norm(&f, f64::INFINITY), 2.0);
    }

    #[test]
    fn hilbert_schmidt_identity() {
        let mut rng = sampling::rng(7);
        for _ in 0..20 {
            let f = sampling::gaussian_field(GridSpec::new(2, 2, 3).unwrap(), &mut rng);
            let lhs = f.l2_norm().powi(2);
            let rhs = f.adjoint().mul(&f).trace().re;
            assert!((lhs - rhs).abs() < 1e-12 * lhs);
        }
    }

    #[test]
    fn norms_from_singular_function_match_direct() {
        let mut rng = sampling::rng(2024);
        for _ in 0..200 {
            let d = rng.random_range(1..=2);
            let level = rng.random_range(0..=if d == 1 { 6 } else { 3 });
            let m = rng.random_range(1..=4);
            let f = sampling::gaussian_field(GridSpec::new(d, level, m).unwrap(), &mut rng);
            let mu = singular_function(&f);
            assert!(mu.support() <= m as f64 + 1e-12);
            for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
                let direct = f.lp_norm(p);
                let via_mu = mu.lp_norm(p);
                assert!((direct - via_mu).abs() <= 1e-10 * direct, "p={p}");
            }
        }
    }

    #[test]
    fn scalar_singular_function_is_sorted_absolute_values() {
        let mut rng = sampling::rng(99);
        let values: Vec<f64> = (0..32).map(|_| rng.random_range(-3.0..3.0)).collect();
        let f = scalar(&values);
        let mut sorted: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mu = singular_function(&f);
        for (k, v) in sorted.iter().enumerate() {
            let t = (k as f64 + 0.5) / 32.0;
            assert_eq!(mu.value_at(t), *v);
        }
    }

    #[test]
    fn holmstedt_examples() {
        let spec = GridSpec::new(1, 2, 2).unwrap();
        let f = MatrixField::constant(spec, &(linalg::identity(2) * c(3.0)));
        for t in [0.1, 1.0, 2.0, 2.5, 10.0] {
            let expected = if t <= 2.0 { 3.0 * t } else { 6.0 };
            assert!((k_functional_l1_linf(&f, t) - expected).abs() < 1e-13);
        }
        let f = scalar(&[2.0, 0.0]);
        for t in [0.1, 0.5, 0.7, 4.0] {
            let expected = if t <= 0.5 { 2.0 * t } else { 1.0 };
            assert!((k_functional_l1_linf(&f, t) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn holmstedt_one_sided_bounds_and_concavity() {
        let mut rng = sampling::rng(31);
        let t_grid: Vec<f64> = (0..60).map(|k| 10f64.powf(-3.0 + k as f64 * 0.1)).collect();
        for _ in 0..30 {
            let f = sampling::gaussian_field(GridSpec::new(1, 4, 3).unwrap(), &mut rng);
            let (n1, ninf) = (f.l1_norm(), f.linf_norm());
            for &t in &t_grid {
                let k = k_functional_l1_linf(&f, t);
                assert!(k <= n1.min(t * ninf) * (1.0 + 1e-12));
            }
            assert!((k_functional_l1_linf(&f, 3.0) - n1).abs() < 1e-12 * n1);
            let profile = KProfile::l1_linf(&f, &t_grid);
            assert!(profile.shape_violation() <= 1e-12);
        }
    }

    #[test]
    fn cutoff_matches_holmstedt_for_l1_linf() {
        let mut rng = sampling::rng(17);
        for _ in 0..50 {
            let f = sampling::gaussian_field(GridSpec::new(2, 2, 2).unwrap(), &mut rng);
            for t in [1e-3, 0.01, 0.3, 1.0, 1.7, 5.0] {
                let exact = k_functional_l1_linf(&f, t);
                let scan = k_functional_cutoff(&f, t, Couple::L1Linf);
                assert!((scan - exact).abs() <= 1e-9 * exact, "t={t}: {scan} vs {exact}");
            }
        }
    }

    #[test]
    fn cutoff_l1_l2_scalar_example() {
        let f = scalar(&[2.0, 0.0]);
        for t in [0.1, 0.5, 0.7071, 0.8, 3.0] {
            let expected = 1f64.min(2f64.sqrt() * t);
            assert!((k_functional_cutoff(&f, t, Couple::L1L2) - expected).abs() < 1e-9);
        }
        let spec = GridSpec::new(1, 2, 2).unwrap();
        assert_eq!(k_functional_cutoff(&MatrixField::zeros(spec), 1.0, Couple::L1L2), 0.0);
    }

    #[test]
    fn cutoff_l1_l2_beats_brute_force_scan() {
        // brute force: dense scan of the cutoff level
        let mut rng = sampling::rng(23);
        for _ in 0..20 {
            let f = sampling::gaussian_field(GridSpec::new(1, 3, 2).unwrap(), &mut rng);
            let mu = singular_function(&f);
            let top = mu.lp_norm(f64::INFINITY);
            for t in [0.05, 0.5, 2.0] {
                let brute = (0..=20000)
                    .map(|k| mu.cutoff_cost(top * k as f64 / 20000.0, t, 2.0))
                    .fold(f64::INFINITY, f64::min);
                let scan = k_functional_cutoff(&f, t, Couple::L1L2);
                assert!(scan <= brute * (1.0 + 1e-9));
                assert!(scan >= brute * (1.0 - 1e-6));
            }
        }
    }

    #[test]
    fn cutoff_split_reconstructs_and_realizes_cost() {
        let mut rng = sampling::rng(41);
        let f = sampling::gaussian_field(GridSpec::new(1, 3, 3).unwrap(), &mut rng);
        let mu = singular_function(&f);
        let t = 0.4;
        let (c, cost) = mu.best_cutoff(t, 2.0);
        let (y, z) = f.cutoff_split(c);
        assert!(y.add(&z).rel_l2_distance(&f) < 1e-12);
        let realized = y.l1_norm() + t * z.l2_norm();
        assert!((realized - cost).abs() < 1e-10 * cost);
    }

    #[test]
    fn positive_parts_reconstruct_and_are_l1_bounded() {
        let mut rng = sampling::rng(8);
        for _ in 0..200 {
            let m = rng.random_range(1..=4);
            let f = sampling::gaussian_field(GridSpec::new(1, 3, m).unwrap(), &mut rng);
            let [f1, f2, f3, f4] = f.positive_parts();
            let back = f1.sub(&f2).add(&f3.sub(&f4).scale(C64::new(0.0, 1.0)));
            assert!(back.rel_l2_distance(&f) < 1e-12);
            let n = f.l1_norm();
            for part in [&f1, &f2, &f3, &f4] {
                assert!(part.min_eigenvalue() >= -1e-12);
                assert!(part.l1_norm() <= n * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn binary_header_is_sixteen_bytes() {
        let f = scalar(&[2.0, 0.0]);
        let bytes = io::to_binary(&f);
        assert_eq!(&bytes[..4], b"NCMF");
        assert_eq!(bytes.len(), io::HEADER_LEN + 2 * 16);
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 1);
        assert_eq!(u16::from_le_bytes([bytes[6], bytes[7]]), 1);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2.0);
    }

    #[test]
    fn json_layout() {
        let f = scalar(&[2.0, 0.0]);
        let text = io::to_json(&f).unwrap();
        assert_eq!(text, r#"{"spec":{"d":1,"L":1,"m":1},"cells":[[[2.0,0.0]],[[0.0,0.0]]]}"#);
        assert!(io::from_json(r#"{"spec":{"d":1,"L":1,"m":1},"cells":[[[2.0,0.0]]]}"#).is_err());
        assert!(io::read_binary(&b"XXXX\0\0\0\0\0\0\0\0\0\0\0\0"[..]).is_err());
    }

    proptest! {
        #[test]
        fn serialization_round_trips(seed in any::<u64>(), d in 1usize..=2, level in 0u32..=3, m in 1usize..=3) {
            let mut rng = sampling::rng(seed);
            let f = sampling::gaussian_field(GridSpec::new(d, level, m).unwrap(), &mut rng);
            let back = io::read_binary(&io::to_binary(&f)[..]).unwrap();
            prop_assert_eq!(&back, &f);
            let back = io::from_json(&io::to_json(&f).unwrap()).unwrap();
            prop_assert_eq!(&back, &f);
        }

        #[test]
        fn triangle_and_holder(seed in any::<u64>(), p in 1.0f64..6.0) {
            let mut rng = sampling::rng(seed);
            let spec = GridSpec::new(1, 3, 2).unwrap();
            let f = sampling::gaussian_field(spec, &mut rng);
            let g = sampling::gaussian_field(spec, &mut rng);
            prop_assert!(f.add(&g).lp_norm(p) <= (f.lp_norm(p) + g.lp_norm(p)) * (1.0 + 1e-9));
            let q = p / (p - 1.0);
            if q.is_finite() {
                let lhs = f.mul(&g).l1_norm();
                prop_assert!(lhs <= f.lp_norm(p) * g.lp_norm(q) * (1.0 + 1e-9));
            }
        }
    }

    #[allow(dead_code)]
    fn _assert_mat(_: Mat) {}
}
