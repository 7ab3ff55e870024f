//! Independent oracles for the exact linear algebra: a from-scratch dense
//! Gaussian elimination cross-checks the sparse path, and property tests
//! pin the rank-nullity and exactness invariants.

use procyc::field::{FieldSpec, Scalar};
use procyc::linalg::{kernel_basis, membership, rank, solve, SparseMatrix, SparseVec, Subspace};
use proptest::prelude::*;

/// Dense row reduction sharing no code with the sparse engine.
fn dense_rank(m: &SparseMatrix, f: &FieldSpec) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<Scalar>> = vec![vec![f.zero(); cols]; rows];
    for j in 0..cols {
        for (i, c) in m.col(j).iter() {
            a[i][j] = c.clone();
        }
    }
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv();
        for x in a[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let s = a[i][c].clone();
                for j in 0..cols {
                    let t = a[r][j].mul(&s);
                    a[i][j] = a[i][j].sub(&t);
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

#[test]
fn rank_of_all_ones_over_f2_against_dense_oracle() {
    let f = FieldSpec::prime_field(2).unwrap();
    let mut m = SparseMatrix::zero(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            m.set(i, j, f.one());
        }
    }
    assert_eq!(dense_rank(&m, &f), 1);
    assert_eq!(rank(&m, &f), 1);
    let k = kernel_basis(&m, &f);
    assert_eq!(k.dim(), 1);
    let diag = SparseVec::from_entries([(0, f.one()), (1, f.one())]);
    assert!(k.contains(&diag));
}

fn arb_matrix(max_dim: usize) -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-4i64..=4, r * c).prop_map(move |v| (r, c, v))
    })
}

fn build(r: usize, c: usize, v: &[i64], f: &FieldSpec) -> SparseMatrix {
    let mut m = SparseMatrix::zero(r, c);
    for i in 0..r {
        for j in 0..c {
            m.set(i, j, f.from_i64(v[i * c + j]));
        }
    }
    m
}

proptest! {
    #[test]
    fn rank_matches_dense_oracle((r, c, v) in arb_matrix(5)) {
        for f in [FieldSpec::Rationals, FieldSpec::prime_field(3).unwrap()] {
            let m = build(r, c, &v, &f);
            prop_assert_eq!(rank(&m, &f), dense_rank(&m, &f));
        }
    }

    #[test]
    fn rank_plus_nullity_is_cols((r, c, v) in arb_matrix(5)) {
        for f in [FieldSpec::Rationals, FieldSpec::prime_field(2).unwrap()] {
            let m = build(r, c, &v, &f);
            prop_assert_eq!(rank(&m, &f) + kernel_basis(&m, &f).dim(), c);
        }
    }

    #[test]
    fn solve_solutions_are_exact((r, c, v) in arb_matrix(4), rhs in proptest::collection::vec(-3i64..=3, 4)) {
        let f = FieldSpec::Rationals;
        let m = build(r, c, &v, &f);
        let b = SparseVec::from_entries(
            rhs.iter().take(r).enumerate().map(|(i, &x)| (i, f.from_i64(x))),
        );
        if let Some(x) = solve(&m, &b, &f) {
            let mut check = m.apply(&x);
            for (i, cc) in b.iter() {
                check.add_entry(i, cc.neg());
            }
            prop_assert!(check.is_zero());
        }
    }

    #[test]
    fn kernel_vectors_are_annihilated((r, c, v) in arb_matrix(5)) {
        let f = FieldSpec::prime_field(5).unwrap();
        let m = build(r, c, &v, &f);
        for g in kernel_basis(&m, &f).reduced_basis() {
            prop_assert!(m.apply(&g).is_zero());
        }
    }

    #[test]
    fn membership_agrees_with_rank_growth(gens in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 1..4), probe in proptest::collection::vec(-3i64..=3, 4)) {
        let f = FieldSpec::Rationals;
        let to_vec = |v: &[i64]| {
            SparseVec::from_entries(v.iter().enumerate().map(|(i, &x)| (i, f.from_i64(x))))
        };
        let gvecs: Vec<SparseVec> = gens.iter().map(|g| to_vec(g)).collect();
        let sub = Subspace::new(4, f, gvecs.clone());
        let p = to_vec(&probe);
        let mut extended = gvecs;
        extended.push(p.clone());
        let bigger = Subspace::new(4, f, extended);
        prop_assert_eq!(membership(&p, &sub), bigger.dim() == sub.dim());
    }
}
