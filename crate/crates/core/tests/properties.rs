use proptest::prelude::*;
use satlab::activation::{build_table, coeff, index_set_member};
use satlab::cutoff::{partition_check, zeta_eval, BlockSymbol};
use satlab::kernel::assemble_dyadic_block;
use satlab::points::{antipodal_distance, generate_antipodal_quasiuniform, PointSet};
use satlab::polynomials::{legendre_eval, Recurrence};
use satlab::surface::exact_kernel;
use satlab::{ActivationOrder, SphereDim};

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (r > 1e-3).then(|| v.iter().map(|x| x / r).collect())
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn legendre_parity(d in 2usize..6, m in 0usize..80, t in -1.0f64..1.0) {
        let d = SphereDim::new(d).unwrap();
        let a = legendre_eval(d, m, t).unwrap();
        let b = legendre_eval(d, m, -t).unwrap();
        let s = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - s * b).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn legendre_bounded_by_value_at_one(d in 2usize..6, m in 0usize..80, t in -1.0f64..1.0) {
        let d = SphereDim::new(d).unwrap();
        let top = legendre_eval(d, m, 1.0).unwrap();
        prop_assert!(legendre_eval(d, m, t).unwrap().abs() <= top * (1.0 + 1e-12));
    }

    #[test]
    fn recurrence_f32_tracks_f64(d in 2usize..5, t in -1.0f64..1.0) {
        let d = SphereDim::new(d).unwrap();
        let r64 = Recurrence::<f64>::new(d, 40);
        let r32 = Recurrence::<f32>::new(d, 40);
        let mut a = vec![0.0f64; 41];
        let mut b = vec![0.0f32; 41];
        r64.fill(t, &mut a);
        r32.fill(t as f32, &mut b);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - *y as f64).abs() <= 1e-4);
        }
    }

    #[test]
    fn partition_of_unity(m in 1u64..1_000_000) {
        prop_assert!((partition_check::<f64>(m, 40).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zeta_two_scale(t in 0.5f64..1.0) {
        prop_assert!((zeta_eval(t) + zeta_eval(2.0 * t) - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn block_weights_vanish_off_support(q in 0u32..12, k in 0usize..3, j in 0usize..10_000) {
        let s = BlockSymbol::new(q, SphereDim::new(2).unwrap(), ActivationOrder::new(k));
        let w = s.degree_weight::<f64>(j);
        if !s.degree_range().contains(&j) {
            prop_assert_eq!(w, 0.0);
        }
        prop_assert!(w >= 0.0);
    }

    #[test]
    fn coefficients_vanish_off_index_set(d in 2usize..5, k in 0usize..3, m in 0usize..200) {
        let k = ActivationOrder::new(k);
        let c: f64 = coeff(SphereDim::new(d).unwrap(), k, m);
        if m > k.get() && !index_set_member(k, m) {
            prop_assert_eq!(c, 0.0);
        } else {
            prop_assert!(c != 0.0);
        }
    }

    #[test]
    fn antipodal_distance_is_sign_invariant(x in vec3(), y in vec3()) {
        if let (Some(x), Some(y)) = (unit(&x), unit(&y)) {
            let nx: Vec<f64> = x.iter().map(|v| -v).collect();
            let a = antipodal_distance(&x, &y).unwrap();
            let b = antipodal_distance(&nx, &y).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!((0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&a));
        }
    }

    #[test]
    fn exact_kernel_decreases_with_angle(k in 0usize..3, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let d = SphereDim::new(2).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let k = ActivationOrder::new(k);
        prop_assert!(exact_kernel(d, k, lo) >= exact_kernel(d, k, hi) - 1e-15);
    }
}

#[test]
fn kernel_diagonal_matches_table_trace() {
    let d = SphereDim::new(2).unwrap();
    for k in 0..3 {
        let k = ActivationOrder::new(k);
        let t = build_table::<f64>(d, k, 2048).unwrap();
        let diag = exact_kernel(d, k, 0.0);
        assert!(((t.trace() + t.tail) - diag).abs() <= 1e-10 * diag);
    }
}

#[test]
fn dyadic_blocks_are_symmetric() {
    let d = SphereDim::new(2).unwrap();
    let ps: PointSet<f64> = generate_antipodal_quasiuniform(d, 40, 5, 50).unwrap();
    for q in [2, 5, 8] {
        let b = assemble_dyadic_block(&ps, q, ActivationOrder::new(1));
        assert!(b.matrix.max_asymmetry() == 0.0);
        for i in 0..ps.len() {
            let (g, h) = (b.matrix.get(i, i), b.diag);
            assert!((g - h).abs() <= 1e-10 * h.abs(), "q = {q}: {g} vs {h}");
        }
    }
}
