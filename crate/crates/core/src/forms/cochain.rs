//! Multilinear cochains on an algebra with values in a bimodule: either a
//! form space of the algebra or a graded component of a graded algebra with
//! the action running through a homomorphism into degree zero.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Algebra, GradedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, SparseVec};

use super::{left_action, mul_forms, right_action, FormSpace};

/// Where a cochain takes its values.
#[derive(Clone)]
pub enum CochainTarget {
    /// values in a form space of the source algebra
    Form(FormSpace),
    /// values inside the degree component of a graded algebra, the source
    /// acting through u: A -> B^0 (columns of `u` are coordinates in B)
    Graded { ga: Arc<GradedAlgebra>, degree: u64, u: SparseMatrix },
}

impl CochainTarget {
    fn left_act(&self, a: usize, v: &SparseVec) -> SparseVec {
        match self {
            CochainTarget::Form(fs) => left_action(fs, a).apply(v),
            CochainTarget::Graded { ga, u, .. } => {
                let ua = u.col(a);
                ga.alg.mul(ua, v)
            }
        }
    }

    fn right_act(&self, v: &SparseVec, a: usize) -> SparseVec {
        match self {
            CochainTarget::Form(fs) => right_action(fs, a).apply(v),
            CochainTarget::Graded { ga, u, .. } => {
                let ua = u.col(a);
                ga.alg.mul(v, ua)
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            CochainTarget::Form(fs) => fs.dim(),
            CochainTarget::Graded { ga, .. } => ga.alg.dim(),
        }
    }
}

/// A cochain of a fixed arity, stored densely on basis tuples.
#[derive(Clone)]
pub struct Cochain {
    pub source: Arc<Algebra>,
    pub arity: usize,
    pub target: CochainTarget,
    pub values: BTreeMap<Vec<usize>, SparseVec>,
}

impl Cochain {
    pub fn new(source: Arc<Algebra>, arity: usize, target: CochainTarget) -> Cochain {
        Cochain { source, arity, target, values: BTreeMap::new() }
    }

    pub fn set(&mut self, tuple: Vec<usize>, value: SparseVec) {
        assert_eq!(tuple.len(), self.arity);
        if !value.is_zero() {
            self.values.insert(tuple, value);
        }
    }

    pub fn get(&self, tuple: &[usize]) -> SparseVec {
        self.values.get(tuple).cloned().unwrap_or_default()
    }

    /// Evaluate on a tuple of sparse arguments by multilinearity.
    pub fn eval(&self, args: &[&SparseVec]) -> SparseVec {
        assert_eq!(args.len(), self.arity);
        let mut out = SparseVec::new();
        let mut tuple = vec![0usize; self.arity];
        fn rec(
            c: &Cochain,
            args: &[&SparseVec],
            pos: usize,
            tuple: &mut Vec<usize>,
            coeff: crate::field::Scalar,
            out: &mut SparseVec,
        ) {
            if pos == args.len() {
                out.add_scaled(&c.get(tuple), &coeff);
                return;
            }
            for (i, ci) in args[pos].iter() {
                tuple[pos] = i;
                rec(c, args, pos + 1, tuple, coeff.mul(ci), out);
            }
        }
        rec(self, args, 0, &mut tuple, self.source.field().one(), &mut out);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

/// The Hochschild coboundary:
/// (delta c)(a1, ..., a_{m+1}) = a1 c(a2,...) + sum (-1)^i c(..., a_i a_{i+1}, ...)
///                                + (-1)^{m+1} c(a1,...,a_m) a_{m+1}.
pub fn hochschild_delta(c: &Cochain) -> Cochain {
    let d = c.source.dim();
    let m = c.arity;
    let mut out = Cochain::new(c.source.clone(), m + 1, c.target.clone());
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..m + 1 {
        let mut next = Vec::new();
        for t in &tuples {
            for i in 0..d {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        tuples = next;
    }
    for t in tuples {
        let mut v = c.target.left_act(t[0], &c.get(&t[1..]));
        for i in 0..m {
            // merge positions i and i+1 through the multiplication of A
            let merged = c.source.mul_basis(t[i], t[i + 1]);
            let mut args: Vec<SparseVec> = Vec::with_capacity(m);
            for (pos, &idx) in t.iter().enumerate() {
                if pos == i {
                    args.push(merged.clone());
                } else if pos == i + 1 {
                    continue;
                } else {
                    args.push(SparseVec::unit(idx, &c.source.field()));
                }
            }
            let refs: Vec<&SparseVec> = args.iter().collect();
            let term = c.eval(&refs);
            let sign_neg = (i + 1) % 2 == 1;
            v.add_scaled(&term, &if sign_neg {
                c.source.field().one().neg()
            } else {
                c.source.field().one()
            });
        }
        let last = c.target.right_act(&c.get(&t[..m]), t[m]);
        let sign_neg = (m + 1) % 2 == 1;
        v.add_scaled(&last, &if sign_neg {
            c.source.field().one().neg()
        } else {
            c.source.field().one()
        });
        out.set(t, v);
    }
    out
}

/// Cup product (c1 cup c2)(a_1..a_{i+j}) = c1(a_1..a_i) . c2(a_{i+1}..).
/// Both targets must belong to the same multiplicative family.
pub fn cup(c1: &Cochain, c2: &Cochain) -> Result<Cochain> {
    let arity = c1.arity + c2.arity;
    let target = match (&c1.target, &c2.target) {
        (CochainTarget::Form(f1), CochainTarget::Form(f2)) => {
            let deg = f1.degree + f2.degree;
            CochainTarget::Form(FormSpace::build(&f1.base, deg, f1.cap))
        }
        (
            CochainTarget::Graded { ga: g1, degree: d1, u },
            CochainTarget::Graded { ga: g2, degree: d2, .. },
        ) => {
            if !Arc::ptr_eq(&g1.alg, &g2.alg) {
                return Err(Error::Validation("cup of cochains into different algebras".into()));
            }
            let degree = d1 + d2;
            if degree > g1.top {
                return Err(Error::DegreeOverflow(format!(
                    "cup lands in degree {degree}, truncation keeps {}",
                    g1.top
                )));
            }
            CochainTarget::Graded { ga: g1.clone(), degree, u: u.clone() }
        }
        _ => return Err(Error::Validation("cup of mixed cochain targets".into())),
    };
    let d = c1.source.dim();
    let mut out = Cochain::new(c1.source.clone(), arity, target);
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..arity {
        let mut next = Vec::new();
        for t in &tuples {
            for i in 0..d {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        tuples = next;
    }
    for t in tuples {
        let x = c1.get(&t[..c1.arity]);
        let y = c2.get(&t[c1.arity..]);
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let v = match (&c1.target, &c2.target, &out.target) {
            (CochainTarget::Form(f1), CochainTarget::Form(f2), CochainTarget::Form(ft)) => {
                mul_forms(f1, f2, ft, &x, &y)
            }
            (CochainTarget::Graded { ga, .. }, CochainTarget::Graded { .. }, _) => {
                ga.alg.mul(&x, &y)
            }
            _ => unreachable!(),
        };
        out.set(t, v);
    }
    Ok(out)
}

/// The 1-cochain d with values in degree-1 forms.
pub fn d_cochain(a: &Arc<Algebra>, cap: Option<u64>) -> Cochain {
    let f1 = FormSpace::build(a, 1, cap);
    let f = a.field();
    let mut c = Cochain::new(a.clone(), 1, CochainTarget::Form(f1.clone()));
    for i in 0..a.dim() {
        if let Some(k) = f1.position(&(None, vec![i])) {
            c.set(vec![i], SparseVec::unit(k, &f));
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures;
    use crate::field::FieldSpec;

    #[test]
    fn delta_of_multiplicative_cochain_is_the_product() {
        // for u multiplicative and the bimodule action through u,
        // delta u (a,b) = u(a)u(b) - u(ab) + u(a)u(b) = u(ab)
        let f = FieldSpec::Rationals;
        let a = fixtures::dual_numbers(f);
        let ga = crate::algebra::GradedAlgebra::new(a.clone(), vec![0; 2], true).unwrap();
        let u = SparseMatrix::identity(2, &f);
        let target = CochainTarget::Graded { ga: Arc::new(ga), degree: 0, u };
        let mut c = Cochain::new(a.clone(), 1, target);
        for i in 0..2 {
            c.set(vec![i], SparseVec::unit(i, &f));
        }
        let dc = hochschild_delta(&c);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(dc.get(&[i, j]), a.mul_basis(i, j).clone());
            }
        }
    }

    #[test]
    fn delta_squared_vanishes_over_f2() {
        let f = FieldSpec::prime_field(2).unwrap();
        let a = fixtures::dual_numbers(f);
        // a pseudo-random 1-cochain with values in degree-1 forms
        let f1 = FormSpace::build(&a, 1, None);
        let mut c = Cochain::new(a.clone(), 1, CochainTarget::Form(f1.clone()));
        let mut state = 0x9e3779b97f4a7c15u64;
        for i in 0..a.dim() {
            let mut v = SparseVec::new();
            for k in 0..f1.dim() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                if (state >> 60) % 2 == 0 {
                    v.add_entry(k, f.one());
                }
            }
            c.set(vec![i], v);
        }
        let dc = hochschild_delta(&c);
        let ddc = hochschild_delta(&dc);
        assert!(ddc.is_zero());
    }

    #[test]
    fn cup_of_d_with_d() {
        let f = FieldSpec::Rationals;
        let a = fixtures::ground_field(f);
        let d = d_cochain(&a, None);
        let dd = cup(&d, &d).unwrap();
        // (d cup d)(e, e) = de de
        let v = dd.get(&[0, 0]);
        let f2 = FormSpace::build(&a, 2, None);
        let k = f2.position(&(None, vec![0, 0])).unwrap();
        assert_eq!(v, SparseVec::unit(k, &f));
    }
}
