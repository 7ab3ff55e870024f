//! Closed-form dimension counts, computed independently by elementary
//! combinatorics, against the construction pipelines.

use procyc::algebra::{
    fixtures, free_product_trunc, power_algebra_trunc, q_construction, tensor_algebra_trunc,
    tower_of, universal_model_trunc, TowerKind,
};
use procyc::field::FieldSpec;
use procyc::forms::FormSpace;

#[test]
fn form_space_dims_formula() {
    let f = FieldSpec::Rationals;
    for (d, a) in [
        (1, fixtures::ground_field(f)),
        (2, fixtures::dual_numbers(f)),
        (3, fixtures::strict_upper_3(f)),
    ] {
        assert_eq!(FormSpace::build(&a, 0, None).dim(), d);
        for n in 1..=3usize {
            let expected = (d + 1) * d.pow(n as u32);
            assert_eq!(FormSpace::build(&a, n, None).dim(), expected);
        }
    }
}

#[test]
fn cylinder_stage_dims_formula() {
    // dim Cyl_n(A) = dim A + sum_{m=1}^{n-1} (dim A + 1) dim A^m
    let f = FieldSpec::Rationals;
    for (d, a) in [(1usize, fixtures::ground_field(f)), (2, fixtures::k_times_k(f))] {
        for n in 1..=3usize {
            let expected: usize =
                d + (1..n).map(|m| (d + 1) * d.pow(m as u32)).sum::<usize>();
            let cyl = q_construction(&a, n, 2 * n).unwrap();
            assert_eq!(cyl.alg.dim(), expected);
        }
    }
}

#[test]
fn universal_stage_dims_formula() {
    // dim U_n(A) = dim A + sum_{i=1}^{n-1} (dim A + 1) dim A^{2i}
    let f = FieldSpec::Rationals;
    for (d, a) in [(1usize, fixtures::ground_field(f)), (2, fixtures::dual_numbers(f))] {
        for n in 1..=3usize {
            let expected: usize =
                d + (1..n).map(|i| (d + 1) * d.pow(2 * i as u32)).sum::<usize>();
            let u = universal_model_trunc(&a, n, 2 * n).unwrap();
            assert_eq!(u.alg.dim(), expected);
        }
    }
}

#[test]
fn universal_tower_of_ground_field() {
    let f = FieldSpec::Rationals;
    let k = fixtures::ground_field(f);
    let t = tower_of(TowerKind::UniversalModel, &k, None, 3, None).unwrap();
    assert_eq!(t.dims(), vec![1, 3, 5]);
    // composite of the structure maps down to stage 1 is the projection
    let comp = t.composite_to(1);
    assert_eq!(t.projections[0].matrix.compose(&comp), t.projections[2].matrix);
}

#[test]
fn tensor_dims_are_geometric() {
    let f = FieldSpec::Rationals;
    let t = tensor_algebra_trunc(2, 3, f).unwrap();
    assert_eq!(t.alg.dim(), 2 + 4 + 8);
}

#[test]
fn free_product_word_counts() {
    // alternating words over single letters: two per length
    let f = FieldSpec::Rationals;
    let k = fixtures::ground_field(f);
    for l in 1..=5usize {
        let (ga, _, _) = free_product_trunc(&k, &k, l).unwrap();
        assert_eq!(ga.alg.dim(), 2 * l);
    }
}

#[test]
fn power_stage_word_counts() {
    // words of v-degree m over the ground field: 4 * 2^{m-1} for m >= 1
    let f = FieldSpec::Rationals;
    let k = fixtures::ground_field(f);
    for n in 1..=5usize {
        let (ga, _) = power_algebra_trunc(&k, 1, n).unwrap();
        let expected: usize = 1 + (1..n).map(|m| 4usize << (m - 1)).sum::<usize>();
        assert_eq!(ga.alg.dim(), expected);
        for m in 1..n {
            assert_eq!(ga.component_dim(m as u64), 4 << (m - 1));
        }
    }
}

#[test]
fn operator_fuzz_on_random_small_algebras() {
    // b b = 0 on random forms over F3 for random dim-2 algebras, plus the
    // defining identity of the Karoubi operator
    use procyc::forms::{b_op, d_op, kappa_op};
    use procyc::linalg::{SparseMatrix, SparseVec};
    use procyc::sample::{random_algebra, Rng};
    let f = FieldSpec::prime_field(3).unwrap();
    let mut rng = Rng::new(99);
    for _ in 0..10 {
        let a = random_algebra(f, 2, &mut rng);
        let s: Vec<FormSpace> = (0..=3).map(|n| FormSpace::build(&a, n, None)).collect();
        let b2 = b_op(&s[2], &s[1]);
        let b1 = b_op(&s[1], &s[0]);
        for _ in 0..5 {
            let mut w = SparseVec::new();
            for k in 0..s[2].dim() {
                w.add_entry(k, f.from_i64(rng.below(3) as i64));
            }
            assert!(b1.apply(&b2.apply(&w)).is_zero());
        }
        // bd + db = 1 - kappa in degree 1
        let d1 = d_op(&s[1], &s[2]);
        let d0 = d_op(&s[0], &s[1]);
        let lhs = b2.compose(&d1).add(&d0.compose(&b1));
        let rhs = SparseMatrix::identity(s[1].dim(), &f).add(&kappa_op(&s[1]).neg());
        assert_eq!(lhs, rhs);
    }
}
