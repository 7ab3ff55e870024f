//! Deterministic sampling of small associative algebras, used by the
//! identity fuzz checks. A seeded generator picks a structure from a small
//! family (semisimple pieces, truncated polynomials, square-zero lines,
//! nilpotent path pieces) and conjugates by a random invertible basis
//! change, which preserves associativity while exercising dense structure
//! constants.

use std::sync::Arc;

use crate::algebra::Algebra;
use crate::field::{FieldSpec, Scalar};
use crate::linalg::{rank, Basis, SparseMatrix, SparseVec};
use crate::label::Label;

/// A small deterministic generator (splitmix64).
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// A scalar from a small symmetric range (rationals) or the field.
    pub fn scalar(&mut self, f: &FieldSpec) -> Scalar {
        match f {
            FieldSpec::Rationals => f.from_i64(self.below(7) as i64 - 3),
            FieldSpec::PrimeField(p) => f.from_i64(self.below(*p as u64) as i64),
        }
    }
}

/// The base structures the sampler draws from, all of dimension <= 3.
fn base_table(kind: u64, dim: usize, f: &FieldSpec) -> Vec<Vec<SparseVec>> {
    let mut t = vec![vec![SparseVec::new(); dim]; dim];
    match kind % 4 {
        0 => {
            // product of ground fields: orthogonal idempotents
            for i in 0..dim {
                t[i][i] = SparseVec::unit(i, f);
            }
        }
        1 => {
            // truncated polynomials x, x^2, ..
            for i in 1..=dim {
                for j in 1..=dim {
                    if i + j <= dim {
                        t[i - 1][j - 1] = SparseVec::unit(i + j - 1, f);
                    }
                }
            }
        }
        2 => {
            // square-zero everything
        }
        _ => {
            // a path piece: e1 e2 = e3 when dim = 3, else square-zero
            if dim == 3 {
                t[0][1] = SparseVec::unit(2, f);
            }
        }
    }
    t
}

/// Sample a small associative algebra of the given dimension.
pub fn random_algebra(f: FieldSpec, dim: usize, rng: &mut Rng) -> Arc<Algebra> {
    assert!(dim >= 1);
    let kind = rng.next_u64();
    let table = base_table(kind, dim, &f);
    // random invertible change of basis
    let p = loop {
        let mut m = SparseMatrix::zero(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let c = rng.scalar(&f);
                if !c.is_zero() {
                    m.set(i, j, c);
                }
            }
        }
        if rank(&m, &f) == dim {
            break m;
        }
    };
    let p_inv = {
        let mut cols = Vec::with_capacity(dim);
        for i in 0..dim {
            cols.push(
                crate::linalg::solve(&p, &SparseVec::unit(i, &f), &f)
                    .expect("invertible by construction"),
            );
        }
        SparseMatrix::from_cols(dim, cols)
    };
    // transported product: x *' y = P^{-1}( P(x) P(y) )
    let mul_old = |x: &SparseVec, y: &SparseVec| -> SparseVec {
        let mut out = SparseVec::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                out.add_scaled(&table[i][j], &a.mul(b));
            }
        }
        out
    };
    let mut new_table = vec![vec![SparseVec::new(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let prod = mul_old(p.col(i), p.col(j));
            new_table[i][j] = p_inv.apply(&prod);
        }
    }
    let labels = (0..dim).map(|i| Label::atom(&format!("r{i}"))).collect();
    Arc::new(
        Algebra::new(f, Basis::new(labels), new_table, None)
            .expect("conjugation preserves associativity"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_is_deterministic_and_valid() {
        let f = FieldSpec::Rationals;
        let mut r1 = Rng::new(42);
        let mut r2 = Rng::new(42);
        for _ in 0..10 {
            let a = random_algebra(f, 3, &mut r1);
            let b = random_algebra(f, 3, &mut r2);
            assert_eq!(a.basis().labels(), b.basis().labels());
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(a.mul_basis(i, j), b.mul_basis(i, j));
                }
            }
        }
    }

    #[test]
    fn sampler_over_prime_fields() {
        for p in [2u32, 3, 5] {
            let f = FieldSpec::prime_field(p).unwrap();
            let mut rng = Rng::new(7 + p as u64);
            for dim in 1..=3 {
                let _ = random_algebra(f, dim, &mut rng);
            }
        }
    }
}
