//! Property tests for the spec-level invariants: Hilbert-Schmidt geometry,
//! rank stability under recombination, polar/cut residuals, complement
//! spans, and the compression bounds of operator systems.

use nalgebra::DVector;
use num_complex::Complex64 as C;
use proptest::prelude::*;

use ncg_core::matcore::{self, CMatrix, Tolerance};
use ncg_core::opsys::{normalize, Projection};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(
        move |entries| {
            CMatrix::from_fn(rows, cols, |i, j| {
                let (re, im) = entries[i * cols + j];
                C::new(re, im)
            })
        },
    )
}

fn family_strategy(count: usize, d: usize) -> impl Strategy<Value = Vec<CMatrix>> {
    proptest::collection::vec(matrix_strategy(d, d), count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cauchy_schwarz(a in matrix_strategy(4, 4), b in matrix_strategy(4, 4)) {
        let ab = matcore::hs_inner(&a, &b).unwrap().norm_sqr();
        let aa = matcore::hs_inner(&a, &a).unwrap().re;
        let bb = matcore::hs_inner(&b, &b).unwrap().re;
        prop_assert!(ab <= aa * bb * (1.0 + 1e-10));
    }

    #[test]
    fn span_rank_invariant_under_recombination(
        fam in family_strategy(3, 3),
        mix in proptest::collection::vec(-1.0f64..1.0, 9),
    ) {
        let t = tol();
        // make the mixing matrix robustly invertible
        let mut g = CMatrix::from_fn(3, 3, |i, j| C::new(mix[i * 3 + j], 0.0));
        for i in 0..3 {
            g[(i, i)] += C::new(4.0, 0.0);
        }
        let mixed: Vec<CMatrix> = (0..3)
            .map(|i| {
                let mut acc = CMatrix::zeros(3, 3);
                for (j, a) in fam.iter().enumerate() {
                    acc += a.map(|z| z * g[(i, j)]);
                }
                acc
            })
            .collect();
        let r1 = matcore::span_rank(&fam, &t).unwrap();
        let r2 = matcore::span_rank(&mixed, &t).unwrap();
        prop_assert_eq!(r1, r2);
    }

    #[test]
    fn polar_cut_residuals(m in matrix_strategy(4, 3)) {
        let t = tol();
        // skip degenerate draws: need a healthy top singular value and a
        // threshold sitting in a spectral gap of width ≥ 10×rank_tol
        let sv = m.clone().singular_values();
        prop_assume!(sv[0] > 1e-3);
        let threshold = sv[0] * 0.5;
        prop_assume!(sv.iter().all(|&s| (s - threshold).abs() > 10.0 * t.rank_tol));
        let (v_iso, s_mat, cut) = matcore::polar_and_cut(&m, threshold, &t).unwrap();
        let polar_res = matcore::op_norm(&(m.adjoint() - v_iso.adjoint() * &s_mat));
        let cut_res = matcore::op_norm(&(&cut.r_t * &s_mat - &cut.e_t));
        prop_assert!(polar_res <= t.residual_tol, "polar residual {}", polar_res);
        prop_assert!(cut_res <= t.residual_tol, "cut residual {}", cut_res);
        // E_t is an orthogonal projection
        let idem = matcore::op_norm(&(&cut.e_t * &cut.e_t - &cut.e_t));
        let herm = matcore::op_norm(&(cut.e_t.adjoint() - &cut.e_t));
        prop_assert!(idem <= t.residual_tol, "E_t idempotence {}", idem);
        prop_assert!(herm <= t.residual_tol, "E_t self-adjointness {}", herm);
    }

    #[test]
    fn complement_plus_input_spans_carrier(
        seeds in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 10),
    ) {
        let t = tol();
        let d = 5;
        let vecs: Vec<DVector<C>> = (0..2)
            .map(|k| {
                DVector::from_fn(d, |i, _| {
                    let (re, im) = seeds[k * d + i];
                    C::new(re, im)
                })
            })
            .collect();
        prop_assume!(vecs.iter().all(|v| v.norm() > 1e-3));
        let comp = matcore::orthonormal_complement(&vecs, None, d, &t).unwrap();
        let mut all = comp.clone();
        all.extend(vecs.iter().cloned());
        prop_assert_eq!(matcore::vec_span_rank(&all, &t), d);
    }

    #[test]
    fn compression_dimension_bound(fam in family_strategy(2, 4)) {
        let t = tol();
        let v = normalize(&fam, 4, &t).unwrap();
        let dim_v = v.dimension(&t);
        for coords in [vec![0usize, 1], vec![1, 3], vec![0, 2, 3]] {
            let p = Projection::from_coordinates(4, &coords).unwrap();
            let comp = v.compress(&p, &t).unwrap();
            let k = p.rank();
            prop_assert!(comp.dimension(&t) <= (dim_v + 1).min(k * k));
        }
    }

    #[test]
    fn compression_is_unital_and_self_adjoint(fam in family_strategy(2, 4)) {
        let t = tol();
        let v = normalize(&fam, 4, &t).unwrap();
        let p = Projection::from_coordinates(4, &[0, 2]).unwrap();
        let comp = v.compress(&p, &t).unwrap();
        prop_assert!(comp.contains(&matcore::identity(2), &t).unwrap());
        for a in comp.basis() {
            prop_assert!(comp.contains(&a.adjoint(), &t).unwrap());
        }
    }

    #[test]
    fn normalize_idempotent(fam in family_strategy(2, 3)) {
        let t = tol();
        let v = normalize(&fam, 3, &t).unwrap();
        let again = normalize(v.basis(), 3, &t).unwrap();
        prop_assert_eq!(v.dimension(&t), again.dimension(&t));
        let mut union = v.basis().to_vec();
        union.extend(again.basis().iter().cloned());
        prop_assert_eq!(matcore::span_rank(&union, &t).unwrap(), v.dimension(&t));
    }
}
