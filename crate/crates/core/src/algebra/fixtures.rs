//! Small named algebras used throughout the test panels.

use std::sync::Arc;

use crate::field::FieldSpec;
use crate::label::Label;
use crate::linalg::{Basis, SparseVec};

use super::Algebra;

/// The ground field as a one-dimensional algebra: basis {e}, e^2 = e.
pub fn ground_field(f: FieldSpec) -> Arc<Algebra> {
    let basis = Basis::new(vec![Label::atom("e")]);
    let table = vec![vec![SparseVec::unit(0, &f)]];
    Arc::new(Algebra::new(f, basis, table, Some(0)).unwrap())
}

/// Zero multiplication on n generators.
pub fn zero_algebra(f: FieldSpec, n: usize) -> Arc<Algebra> {
    let basis = Basis::new((0..n).map(|i| Label::atom(&format!("z{i}"))).collect());
    let table = vec![vec![SparseVec::new(); n]; n];
    Arc::new(Algebra::new(f, basis, table, None).unwrap())
}

/// The dual numbers k[eps]/eps^2 as a unital two-dimensional algebra.
pub fn dual_numbers(f: FieldSpec) -> Arc<Algebra> {
    let basis = Basis::new(vec![Label::atom("u"), Label::atom("eps")]);
    let mut table = vec![vec![SparseVec::new(); 2]; 2];
    table[0][0] = SparseVec::unit(0, &f);
    table[0][1] = SparseVec::unit(1, &f);
    table[1][0] = SparseVec::unit(1, &f);
    // eps^2 = 0
    Arc::new(Algebra::new(f, basis, table, Some(0)).unwrap())
}

/// k x k: two orthogonal idempotents.
pub fn k_times_k(f: FieldSpec) -> Arc<Algebra> {
    let basis = Basis::new(vec![Label::atom("e1"), Label::atom("e2")]);
    let mut table = vec![vec![SparseVec::new(); 2]; 2];
    table[0][0] = SparseVec::unit(0, &f);
    table[1][1] = SparseVec::unit(1, &f);
    Arc::new(Algebra::new(f, basis, table, None).unwrap())
}

/// Nonunital truncated polynomials: basis x, ..., x^d with x^{d+1} = 0.
pub fn truncated_poly(f: FieldSpec, d: usize) -> Arc<Algebra> {
    let basis = Basis::new((1..=d).map(|i| Label::atom(&format!("x{i}"))).collect());
    let mut table = vec![vec![SparseVec::new(); d]; d];
    for i in 1..=d {
        for j in 1..=d {
            if i + j <= d {
                table[i - 1][j - 1] = SparseVec::unit(i + j - 1, &f);
            }
        }
    }
    Arc::new(Algebra::new(f, basis, table, None).unwrap())
}

/// The one-dimensional square-zero algebra (eps).
pub fn nil_line(f: FieldSpec) -> Arc<Algebra> {
    let basis = Basis::new(vec![Label::atom("eps")]);
    let table = vec![vec![SparseVec::new()]];
    Arc::new(Algebra::new(f, basis, table, None).unwrap())
}

/// Strictly upper-triangular 3x3 matrices: a = E12, b = E23, c = E13 = a*b.
pub fn strict_upper_3(f: FieldSpec) -> Arc<Algebra> {
    let basis = Basis::new(vec![Label::atom("a"), Label::atom("b"), Label::atom("c")]);
    let mut table = vec![vec![SparseVec::new(); 3]; 3];
    table[0][1] = SparseVec::unit(2, &f);
    Arc::new(Algebra::new(f, basis, table, None).unwrap())
}
