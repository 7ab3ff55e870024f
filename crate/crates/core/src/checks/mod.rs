//! Executable verification jobs: each builds the objects it speaks about,
//! runs every identity exactly, and emits a structured report.

mod comparison;
mod filtration;
mod relhn;
mod splitting;

pub use comparison::{char_zero_comparison_check, power_degree_decomposition_check};
pub use filtration::{filtration_inclusion_check, filtration_instance};
pub use relhn::{
    poincare_dichotomy_check, relative_hn_crosscheck, relative_hn_tower, upsilon, RelHnTower,
    UpsilonDims, UpsilonSpec,
};
pub use splitting::{free_product_splitting_check, HomotopyForm};

use std::sync::Arc;

use crate::algebra::Algebra;
use crate::error::Result;
use crate::field::FieldSpec;
use crate::linalg::{Ech, LeadRule, SparseVec, Subspace};

/// Span of all k-fold products of elements of a subspace.
pub(crate) fn subspace_power(
    alg: &Arc<Algebra>,
    sub: &Subspace,
    k: usize,
) -> Subspace {
    assert!(k >= 1);
    let base = sub.reduced_basis();
    let mut current = sub.clone();
    for _ in 1..k {
        let mut gens = Vec::new();
        for u in current.reduced_basis() {
            for v in &base {
                let p = alg.mul(&u, v);
                if !p.is_zero() {
                    gens.push(p);
                }
            }
        }
        current = Subspace::new(alg.dim(), alg.field(), gens);
    }
    current
}

/// Two-sided ideal closure of a set of generators inside a finite
/// dimensional algebra.
pub(crate) fn ideal_closure(
    alg: &Arc<Algebra>,
    gens: impl IntoIterator<Item = SparseVec>,
    field: FieldSpec,
) -> Subspace {
    let mut ech = Ech::new(LeadRule::Max, field);
    let mut queue: Vec<SparseVec> = Vec::new();
    for g in gens {
        if ech.insert(&g).is_some() {
            queue.push(g);
        }
    }
    while let Some(v) = queue.pop() {
        for i in 0..alg.dim() {
            for p in [alg.mul_basis_vec(i, &v), alg.mul_vec_basis(&v, i)] {
                if !p.is_zero() && ech.insert(&p).is_some() {
                    queue.push(p);
                }
            }
        }
    }
    Subspace::new(alg.dim(), field, ech.normalized_rows())
}

/// All verification job ids exposed by the front end.
pub const CHECK_IDS: &[&str] = &[
    "lemma23", "lemma64", "cor65", "lemma66", "prop68", "remark55", "example22",
];

/// Dispatch stub shared by the command line: checks that an id is known.
pub fn known_check(id: &str) -> bool {
    CHECK_IDS.contains(&id)
}

#[allow(unused)]
pub(crate) fn unused() -> Result<()> {
    Ok(())
}
