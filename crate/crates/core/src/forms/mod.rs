//! Noncommutative differential forms.
//!
//! For an algebra A, the degree-0 forms are A itself and the degree-n forms
//! (n >= 1) have basis a0 da1 ... dan with a0 ranging over the basis of A or
//! the formal unit. Operators follow the convention fixed by the identity
//! bd + db = 1 - kappa:
//!
//!   d(a0 da1...dan)  = da0 da1...dan,    d(1~ ...) = 0
//!   b(w da)          = (-1)^{|w|} (w a - a w)
//!   kappa(w da)      = (-1)^{|w|} da . w
//!   B                = (1 + kappa + ... + kappa^n) d
//!
//! When the base algebra carries an additive grading, form spaces inherit a
//! weight and may be truncated at a weight cap; all operators preserve the
//! weight and products drop overflowing terms, which is the quotient by the
//! (graded) ideal of high weight.

mod cochain;
mod iso;

pub use cochain::{cup, d_cochain, hochschild_delta, Cochain, CochainTarget};
pub use iso::{
    alpha_filtration_check, even_forms_iso, example22_alpha, q_graded_iso, AlphaIso,
    EvenFormsIso, QGradedIso,
};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Algebra, GradedAlgebra};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::label::Label;
use crate::linalg::{quotient_from_ech, Basis, Ech, LeadRule, SparseMatrix, SparseVec};

/// A form-space basis word: optional lead coefficient (None is the formal
/// unit, only in degree >= 1) and the list of differential letters.
pub type FormWord = (Option<usize>, Vec<usize>);

/// The space of degree-n forms of an algebra, possibly truncated at a
/// total weight cap when the base is graded.
#[derive(Clone, Debug)]
pub struct FormSpace {
    pub base: Arc<Algebra>,
    pub degree: usize,
    pub cap: Option<u64>,
    pub basis: Basis,
    words: Vec<FormWord>,
    index: BTreeMap<FormWord, usize>,
}

pub(crate) fn word_weight(base: &Algebra, w: &FormWord) -> u64 {
    let lead = w.0.map(|i| base.weight_of(i)).unwrap_or(0);
    lead + w.1.iter().map(|&i| base.weight_of(i)).sum::<u64>()
}

fn form_label(base: &Algebra, w: &FormWord) -> Label {
    if w.1.is_empty() {
        return base.basis().label(w.0.expect("degree-0 form has a lead")).clone();
    }
    Label::Form {
        lead: w.0.map(|i| Box::new(base.basis().label(i).clone())),
        ds: w.1.iter().map(|&i| base.basis().label(i).clone()).collect(),
    }
}

impl FormSpace {
    pub fn build(base: &Arc<Algebra>, degree: usize, cap: Option<u64>) -> FormSpace {
        let d = base.dim();
        let mut words: Vec<FormWord> = Vec::new();
        let mut tuples: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..degree {
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
            if degree == 0 {
                for i in 0..d {
                    words.push((Some(i), vec![]));
                }
                break;
            }
            words.push((None, t.clone()));
            for i in 0..d {
                words.push((Some(i), t.clone()));
            }
        }
        if let Some(c) = cap {
            words.retain(|w| word_weight(base, w) <= c);
        }
        words.sort_by(|x, y| {
            (word_weight(base, x), x.clone()).cmp(&(word_weight(base, y), y.clone()))
        });
        let index: BTreeMap<FormWord, usize> =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let labels = words.iter().map(|w| form_label(base, w)).collect();
        FormSpace { base: base.clone(), degree, cap, basis: Basis::new(labels), words, index }
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    /// The basis word at an index: lead slot and differential letters.
    pub fn word(&self, i: usize) -> &FormWord {
        &self.words[i]
    }

    /// Index of a basis word, if present under the weight cap.
    pub fn position(&self, w: &FormWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn weight_of_index(&self, i: usize) -> u64 {
        word_weight(&self.base, &self.words[i])
    }

    /// Collect emitted (word, coeff) terms into a vector over this space,
    /// dropping words beyond the weight cap.
    fn collect(&self, terms: Vec<(FormWord, Scalar)>) -> SparseVec {
        let mut v = SparseVec::new();
        for (w, c) in terms {
            match self.index.get(&w) {
                Some(&k) => v.add_entry(k, c),
                None => {
                    debug_assert!(
                        self.cap.is_some() && word_weight(&self.base, &w) > self.cap.unwrap(),
                        "emitted word missing from target form space"
                    );
                }
            }
        }
        v
    }
}

/// a . (lead, ds): multiply into the lead slot.
fn left_mul_word(base: &Algebra, a: usize, w: &FormWord) -> Vec<(FormWord, Scalar)> {
    match w.0 {
        None => vec![((Some(a), w.1.clone()), base.field().one())],
        Some(b) => base
            .mul_basis(a, b)
            .iter()
            .map(|(c, co)| ((Some(c), w.1.clone()), co.clone()))
            .collect(),
    }
}

/// (lead, ds) . a  via the Leibniz expansion
/// (w d_n) . a = w d(d_n a) - (w . d_n) da.
fn right_mul_word(base: &Algebra, w: &FormWord, a: usize) -> Vec<(FormWord, Scalar)> {
    if w.1.is_empty() {
        return match w.0 {
            None => vec![((Some(a), vec![]), base.field().one())],
            Some(b) => base
                .mul_basis(b, a)
                .iter()
                .map(|(c, co)| ((Some(c), vec![]), co.clone()))
                .collect(),
        };
    }
    let dn = *w.1.last().unwrap();
    let head = &w.1[..w.1.len() - 1];
    let mut out = Vec::new();
    for (c, co) in base.mul_basis(dn, a).iter() {
        let mut ds = head.to_vec();
        ds.push(c);
        out.push(((w.0, ds), co.clone()));
    }
    for ((l2, mut ds2), co) in right_mul_word(base, &(w.0, head.to_vec()), dn) {
        ds2.push(a);
        out.push(((l2, ds2), co.neg()));
    }
    out
}

/// Product of two form words (degrees add).
fn mul_words(base: &Algebra, x: &FormWord, y: &FormWord) -> Vec<(FormWord, Scalar)> {
    match y.0 {
        None => vec![{
            let mut ds = x.1.clone();
            ds.extend_from_slice(&y.1);
            ((x.0, ds), base.field().one())
        }],
        Some(b) => right_mul_word(base, x, b)
            .into_iter()
            .map(|((l, mut ds), co)| {
                ds.extend_from_slice(&y.1);
                ((l, ds), co)
            })
            .collect(),
    }
}

/// The de Rham differential as a matrix from degree n to degree n+1.
pub fn d_op(src: &FormSpace, dst: &FormSpace) -> SparseMatrix {
    assert_eq!(dst.degree, src.degree + 1);
    let mut m = SparseMatrix::zero(dst.dim(), src.dim());
    for (j, w) in src.words.iter().enumerate() {
        if let Some(a) = w.0 {
            let mut ds = vec![a];
            ds.extend_from_slice(&w.1);
            let v = dst.collect(vec![((None, ds), src.base.field().one())]);
            for (r, c) in v.iter() {
                m.set(r, j, c.clone());
            }
        }
    }
    m
}

/// The Hochschild boundary b as a matrix from degree n >= 1 to degree n-1.
pub fn b_op(src: &FormSpace, dst: &FormSpace) -> SparseMatrix {
    assert!(src.degree >= 1);
    assert_eq!(dst.degree, src.degree - 1);
    let base = &src.base;
    let sign_neg = (src.degree - 1) % 2 == 1;
    let mut m = SparseMatrix::zero(dst.dim(), src.dim());
    for (j, w) in src.words.iter().enumerate() {
        let a = *w.1.last().unwrap();
        let head: FormWord = (w.0, w.1[..w.1.len() - 1].to_vec());
        let mut terms = right_mul_word(base, &head, a);
        for (t, c) in left_mul_word(base, a, &head) {
            terms.push((t, c.neg()));
        }
        if sign_neg {
            for t in &mut terms {
                t.1 = t.1.neg();
            }
        }
        let v = dst.collect(terms);
        for (r, c) in v.iter() {
            m.set(r, j, c.clone());
        }
    }
    m
}

/// The Karoubi operator kappa in degree n (identity in degree 0).
pub fn kappa_op(space: &FormSpace) -> SparseMatrix {
    let base = &space.base;
    if space.degree == 0 {
        return SparseMatrix::identity(space.dim(), &base.field());
    }
    let sign_neg = (space.degree - 1) % 2 == 1;
    let mut m = SparseMatrix::zero(space.dim(), space.dim());
    for (j, w) in space.words.iter().enumerate() {
        let a = *w.1.last().unwrap();
        let head: FormWord = (w.0, w.1[..w.1.len() - 1].to_vec());
        let da: FormWord = (None, vec![a]);
        let mut terms = mul_words(base, &da, &head);
        if sign_neg {
            for t in &mut terms {
                t.1 = t.1.neg();
            }
        }
        let v = space.collect(terms);
        for (r, c) in v.iter() {
            m.set(r, j, c.clone());
        }
    }
    m
}

/// The Connes operator B = (1 + kappa + ... + kappa^n) d from degree n to
/// degree n+1.
pub fn connes_b_op(src: &FormSpace, dst: &FormSpace) -> SparseMatrix {
    let d = d_op(src, dst);
    let k = kappa_op(dst);
    let mut acc = d.clone();
    let mut power = d;
    for _ in 0..src.degree {
        power = k.compose(&power);
        acc = acc.add(&power);
    }
    acc
}

/// Matrix of left multiplication by basis element a on a form space.
pub fn left_action(space: &FormSpace, a: usize) -> SparseMatrix {
    let mut m = SparseMatrix::zero(space.dim(), space.dim());
    for (j, w) in space.words.iter().enumerate() {
        let v = space.collect(left_mul_word(&space.base, a, w));
        for (r, c) in v.iter() {
            m.set(r, j, c.clone());
        }
    }
    m
}

/// Matrix of right multiplication by basis element a on a form space.
pub fn right_action(space: &FormSpace, a: usize) -> SparseMatrix {
    let mut m = SparseMatrix::zero(space.dim(), space.dim());
    for (j, w) in space.words.iter().enumerate() {
        let v = space.collect(right_mul_word(&space.base, w, a));
        for (r, c) in v.iter() {
            m.set(r, j, c.clone());
        }
    }
    m
}

/// Product of two form vectors, landing in the target space.
pub fn mul_forms(
    x_space: &FormSpace,
    y_space: &FormSpace,
    target: &FormSpace,
    x: &SparseVec,
    y: &SparseVec,
) -> SparseVec {
    assert_eq!(target.degree, x_space.degree + y_space.degree);
    let base = &x_space.base;
    let mut out = SparseVec::new();
    for (i, ci) in x.iter() {
        for (j, cj) in y.iter() {
            let co = ci.mul(cj);
            for (w, c) in mul_words(base, x_space.word(i), y_space.word(j)) {
                if let Some(k) = target.position(&w) {
                    out.add_entry(k, c.mul(&co));
                } else {
                    debug_assert!(target.cap.is_some());
                }
            }
        }
    }
    out
}

/// The natural quotient of a form space by the span of the commutators
/// [a, w] with a in A: the target of the X-complex and of theta-stages.
#[derive(Clone, Debug)]
pub struct NaturalQuotient {
    pub ambient: FormSpace,
    pub basis: Basis,
    /// projection ambient -> quotient coordinates
    pub proj: SparseMatrix,
}

impl NaturalQuotient {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

pub fn natural_quotient(space: &FormSpace) -> NaturalQuotient {
    let base = space.base.clone();
    let f = base.field();
    let mut ech = Ech::new(LeadRule::Max, f);
    for a in 0..base.dim() {
        for w in &space.words {
            let mut gen = space.collect(left_mul_word(&base, a, w));
            let right = space.collect(right_mul_word(&base, w, a));
            gen.add_scaled(&right, &f.one().neg());
            if !gen.is_zero() {
                ech.insert(&gen);
            }
        }
    }
    let (basis, proj) = quotient_from_ech(&space.basis, &ech, &f);
    NaturalQuotient { ambient: space.clone(), basis, proj }
}

/// The de Rham algebra of `base` truncated to degrees 0..=top (and at the
/// inherited weight cap), as a graded algebra with the ordinary form
/// product. Returns the graded algebra along with the per-degree form
/// spaces and the coordinate offset of each degree block.
pub struct FormsAlgebra {
    pub ga: GradedAlgebra,
    pub spaces: Vec<FormSpace>,
    pub offsets: Vec<usize>,
}

/// Stack degrees 0..=top of the form spaces into one graded algebra.
pub fn forms_graded_algebra(
    base: &Arc<Algebra>,
    top: usize,
    cap: Option<u64>,
) -> Result<FormsAlgebra> {
    let f = base.field();
    let spaces: Vec<FormSpace> = (0..=top).map(|n| FormSpace::build(base, n, cap)).collect();
    let mut offsets = Vec::with_capacity(top + 1);
    let mut total = 0usize;
    for s in &spaces {
        offsets.push(total);
        total += s.dim();
    }
    let mut labels = Vec::with_capacity(total);
    let mut degrees = Vec::with_capacity(total);
    for (n, s) in spaces.iter().enumerate() {
        for l in s.basis.labels() {
            // degree-0 labels collide with higher-degree labels only if the
            // base itself has Form labels; tag with the degree to stay safe
            labels.push(Label::Graded(n as u32, Box::new(l.clone())));
            degrees.push(n as u64);
        }
    }
    let mut table = vec![vec![SparseVec::new(); total]; total];
    for (n, sn) in spaces.iter().enumerate() {
        for (m, sm) in spaces.iter().enumerate() {
            if n + m > top {
                continue;
            }
            let target = &spaces[n + m];
            let off_t = offsets[n + m];
            for i in 0..sn.dim() {
                for j in 0..sm.dim() {
                    let x = SparseVec::unit(i, &f);
                    let y = SparseVec::unit(j, &f);
                    let p = mul_forms(sn, sm, target, &x, &y);
                    table[offsets[n] + i][offsets[m] + j] = p.map_indices(|k| k + off_t);
                }
            }
        }
    }
    let alg = Arc::new(Algebra::new(f, Basis::new(labels), table, None)?);
    let ga = GradedAlgebra::new(alg, degrees, true)?;
    Ok(FormsAlgebra { ga, spaces, offsets })
}

/// Exhaustively verify the operator identities on all basis vectors of the
/// degrees 0..=top: d^2 = 0, b^2 = 0, B^2 = 0 and bd + db = 1 - kappa.
pub fn verify_operator_identities(base: &Arc<Algebra>, top: usize) -> Result<()> {
    let spaces: Vec<FormSpace> = (0..=top + 2).map(|n| FormSpace::build(base, n, None)).collect();
    for n in 0..=top {
        let d1 = d_op(&spaces[n], &spaces[n + 1]);
        let d2 = d_op(&spaces[n + 1], &spaces[n + 2]);
        if !d2.compose(&d1).is_zero() {
            return Err(Error::Validation(format!("d^2 != 0 in degree {n}")));
        }
        let bb1 = connes_b_op(&spaces[n], &spaces[n + 1]);
        let bb2 = connes_b_op(&spaces[n + 1], &spaces[n + 2]);
        if !bb2.compose(&bb1).is_zero() {
            return Err(Error::Validation(format!("B^2 != 0 in degree {n}")));
        }
        if n >= 2 {
            let b1 = b_op(&spaces[n], &spaces[n - 1]);
            let b2 = b_op(&spaces[n - 1], &spaces[n - 2]);
            if !b2.compose(&b1).is_zero() {
                return Err(Error::Validation(format!("b^2 != 0 in degree {n}")));
            }
        }
        if n >= 1 {
            // bd + db = 1 - kappa in degree n
            let d_up = d_op(&spaces[n], &spaces[n + 1]);
            let b_down = b_op(&spaces[n + 1], &spaces[n]);
            let b_low = b_op(&spaces[n], &spaces[n - 1]);
            let d_low = d_op(&spaces[n - 1], &spaces[n]);
            let lhs = b_down.compose(&d_up).add(&d_low.compose(&b_low));
            let rhs = SparseMatrix::identity(spaces[n].dim(), &base.field())
                .add(&kappa_op(&spaces[n]).neg());
            if lhs != rhs {
                return Err(Error::Validation(format!(
                    "bd + db != 1 - kappa in degree {n}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures;
    use crate::field::FieldSpec;

    #[test]
    fn form_space_dims() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        assert_eq!(FormSpace::build(&d, 0, None).dim(), 2);
        assert_eq!(FormSpace::build(&d, 1, None).dim(), 6);
        assert_eq!(FormSpace::build(&d, 2, None).dim(), 12);
        assert_eq!(FormSpace::build(&d, 3, None).dim(), 24);
    }

    #[test]
    fn d_squares_to_zero_and_b_bracket() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let s0 = FormSpace::build(&k, 0, None);
        let s1 = FormSpace::build(&k, 1, None);
        let s2 = FormSpace::build(&k, 2, None);
        let d0 = d_op(&s0, &s1);
        let d1 = d_op(&s1, &s2);
        assert!(d1.compose(&d0).is_zero());
        // b(a0 da1) = a0 a1 - a1 a0, zero for the commutative ground field
        let b1 = b_op(&s1, &s0);
        assert!(b1.is_zero());
    }

    #[test]
    fn kappa_on_unit_led_form() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let s1 = FormSpace::build(&k, 1, None);
        let kap = kappa_op(&s1);
        // kappa(1~ de) = de . 1~ = de
        let i = s1.position(&(None, vec![0])).unwrap();
        assert_eq!(kap.col(i), &SparseVec::unit(i, &f));
    }

    #[test]
    fn operator_identities_on_panel() {
        let f = FieldSpec::Rationals;
        for a in [
            fixtures::ground_field(f),
            fixtures::dual_numbers(f),
            fixtures::k_times_k(f),
            fixtures::strict_upper_3(f),
        ] {
            verify_operator_identities(&a, 2).unwrap();
        }
    }

    #[test]
    fn natural_quotient_of_ground_field_vanishes_in_degree_one() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let s1 = FormSpace::build(&k, 1, None);
        let nq = natural_quotient(&s1);
        assert_eq!(nq.dim(), 0);
    }

    #[test]
    fn natural_quotient_of_zero_multiplication() {
        // with zero multiplication the only surviving commutators are
        // [a, 1~ db] = a db + b da, so over Q a single relation z dz remains
        // while over F_2 it collapses and the quotient is everything
        let zq = fixtures::zero_algebra(FieldSpec::Rationals, 1);
        let s1 = FormSpace::build(&zq, 1, None);
        assert_eq!(natural_quotient(&s1).dim(), 1);

        let f2 = FieldSpec::prime_field(2).unwrap();
        let z2 = fixtures::zero_algebra(f2, 1);
        let s2 = FormSpace::build(&z2, 1, None);
        assert_eq!(natural_quotient(&s2).dim(), 2);
    }

    #[test]
    fn forms_algebra_is_associative_and_graded() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        let fa = forms_graded_algebra(&d, 2, None).unwrap();
        assert_eq!(fa.ga.component_dim(0), 2);
        assert_eq!(fa.ga.component_dim(1), 6);
        assert_eq!(fa.ga.component_dim(2), 12);
        assert!(fa.ga.additive);
    }

    #[test]
    fn weighted_forms_truncate() {
        let f = FieldSpec::Rationals;
        let t = crate::algebra::tensor_algebra_trunc(1, 3, f).unwrap();
        let s1 = FormSpace::build(&t.alg, 1, Some(3));
        // words (lead, [x^i]) with total weight <= 3
        for i in 0..s1.dim() {
            assert!(s1.weight_of_index(i) <= 3);
        }
        let s1_full = FormSpace::build(&t.alg, 1, None);
        assert!(s1.dim() < s1_full.dim());
    }
}
