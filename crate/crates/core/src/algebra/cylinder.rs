//! Finite cylinder stages Cyl_n(A) = QA / qA^n, where QA = A*A and qA is the
//! kernel of the folding map.
//!
//! Elements are kept in the normal form  a0 qa1 ... qam  (a0 optional),
//! where qa = (first copy of a) - (second copy of a). Words with m >= n
//! q-letters span exactly qA^n, so the stage-n quotient is the span of the
//! normal words with m < n. Multiplication rewrites a plain letter past a
//! q-letter through  qa.b = q(ab) - a.qb + qa.qb, which never lowers the
//! q-count. The normal words are certified linearly independent by expanding
//! them in the alternating word space of A*A up to word length L.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::label::Label;
use crate::linalg::{Basis, Ech, LeadRule, SparseMatrix, SparseVec};

use super::words::{word_mul, Letter, Word};
use super::{Algebra, AlgebraHom};

/// Normal word: optional plain prefix letter and a list of q-letters, all
/// indices into the base algebra's basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct NfQ {
    pub lead: Option<usize>,
    pub qs: Vec<usize>,
}

impl NfQ {
    fn label(&self, a: &Algebra) -> Label {
        Label::NormalQ {
            lead: self.lead.map(|i| Box::new(a.basis().label(i).clone())),
            qs: self.qs.iter().map(|&i| a.basis().label(i).clone()).collect(),
        }
    }
}

/// A cylinder stage together with its structural maps.
#[derive(Clone, Debug)]
pub struct CylinderStage {
    pub alg: Arc<Algebra>,
    pub base: Arc<Algebra>,
    pub stage: usize,
    /// inclusion of the first copy of A
    pub d0: AlgebraHom,
    /// inclusion of the second copy of A
    pub d1: AlgebraHom,
    /// folding projection p with p d0 = p d1 = id
    pub fold: AlgebraHom,
    pub(crate) words: Vec<NfQ>,
    pub(crate) index: BTreeMap<NfQ, usize>,
}

impl CylinderStage {
    /// Number of q-letters of a basis element.
    pub fn q_count(&self, i: usize) -> usize {
        self.words[i].qs.len()
    }

    /// Indices of the basis elements with exactly m q-letters; their span is
    /// qA^m / qA^{m+1} inside the stage.
    pub fn q_layer(&self, m: usize) -> Vec<usize> {
        (0..self.words.len()).filter(|&i| self.words[i].qs.len() == m).collect()
    }

    pub(crate) fn word(&self, i: usize) -> &NfQ {
        &self.words[i]
    }

    /// The normal word of a basis element: plain prefix and q-letters.
    pub fn word_public(&self, i: usize) -> (Option<usize>, Vec<usize>) {
        let w = &self.words[i];
        (w.lead, w.qs.clone())
    }
}

/// Multiply a normal prefix by a plain letter of the base algebra. `lead`
/// may be empty together with `qs`, encoding the formal empty prefix.
fn prefix_mul_plain(
    a: &Algebra,
    lead: Option<usize>,
    qs: &[usize],
    b: usize,
) -> Vec<(NfQ, Scalar)> {
    if qs.is_empty() {
        return match lead {
            None => vec![(NfQ { lead: Some(b), qs: vec![] }, a.field().one())],
            Some(la) => a
                .mul_basis(la, b)
                .iter()
                .map(|(c, co)| (NfQ { lead: Some(c), qs: vec![] }, co.clone()))
                .collect(),
        };
    }
    let an = *qs.last().unwrap();
    let qs1 = &qs[..qs.len() - 1];
    let mut out = Vec::new();
    // q(an) . b  =  q(an b) - an . qb + q(an) qb
    for (c, co) in a.mul_basis(an, b).iter() {
        let mut w = qs1.to_vec();
        w.push(c);
        out.push((NfQ { lead, qs: w }, co.clone()));
    }
    for (t, co) in prefix_mul_plain(a, lead, qs1, an) {
        let mut w = t.qs;
        w.push(b);
        out.push((NfQ { lead: t.lead, qs: w }, co.neg()));
    }
    let mut w = qs.to_vec();
    w.push(b);
    out.push((NfQ { lead, qs: w }, a.field().one()));
    out
}

fn nf_mul(a: &Algebra, x: &NfQ, y: &NfQ, stage: usize) -> Vec<(NfQ, Scalar)> {
    let heads: Vec<(NfQ, Scalar)> = match y.lead {
        Some(lb) => prefix_mul_plain(a, x.lead, &x.qs, lb),
        None => vec![(x.clone(), a.field().one())],
    };
    let mut out = Vec::new();
    for (h, co) in heads {
        let mut qs = h.qs;
        qs.extend_from_slice(&y.qs);
        if qs.len() < stage {
            out.push((NfQ { lead: h.lead, qs }, co));
        }
    }
    out
}

/// Expansion of a normal word in the alternating word basis of A*A.
fn expand_in_qa(a: &Arc<Algebra>, w: &NfQ) -> Vec<(Word, Scalar)> {
    let factors = [a, a];
    let one = a.field().one();
    let mut acc: Vec<(Word, Scalar)> = Vec::new();
    if let Some(la) = w.lead {
        acc.push((vec![Letter { side: 0, idx: la }], one.clone()));
    }
    for &q in &w.qs {
        // q(e) = side0(e) - side1(e)
        let parts = [
            (vec![Letter { side: 0, idx: q }], one.clone()),
            (vec![Letter { side: 1, idx: q }], one.neg()),
        ];
        if acc.is_empty() {
            acc = parts.to_vec();
            continue;
        }
        let mut next: Vec<(Word, Scalar)> = Vec::new();
        for (w1, c1) in &acc {
            for (w2, c2) in &parts {
                for (w3, c3) in word_mul(&factors, w1, w2) {
                    next.push((w3, c1.mul(c2).mul(&c3)));
                }
            }
        }
        acc = next;
    }
    acc
}

/// Build Cyl_n(A) = QA/qA^n with the two inclusions and the folding
/// projection. `l` is the word-length bound of the certification space; it
/// must be at least n (the default used by towers is 2n).
pub fn q_construction(
    a: &Arc<Algebra>,
    n: usize,
    l: usize,
) -> Result<CylinderStage> {
    if n == 0 {
        return Err(Error::Validation("cylinder stage needs n >= 1".into()));
    }
    if l < n {
        return Err(Error::TruncationTooSmall(format!(
            "cylinder stage {n} needs word bound >= {n}, got {l}"
        )));
    }
    let f = a.field();
    let d = a.dim();

    // enumerate normal words with fewer than n q-letters
    let mut words: Vec<NfQ> = Vec::new();
    let mut q_tuples: Vec<Vec<usize>> = vec![vec![]];
    for m in 0..n {
        if m > 0 {
            let mut next = Vec::new();
            for t in &q_tuples {
                for i in 0..d {
                    let mut t2 = t.clone();
                    t2.push(i);
                    next.push(t2);
                }
            }
            q_tuples = next;
        }
        for t in &q_tuples {
            if m == 0 {
                for i in 0..d {
                    words.push(NfQ { lead: Some(i), qs: vec![] });
                }
            } else {
                words.push(NfQ { lead: None, qs: t.clone() });
                for i in 0..d {
                    words.push(NfQ { lead: Some(i), qs: t.clone() });
                }
            }
        }
        if m == 0 {
            q_tuples = vec![vec![]];
        }
    }
    words.sort();
    words.dedup();
    let index: BTreeMap<NfQ, usize> =
        words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let dim = words.len();

    // certification: normal words are independent in the word space of A*A
    let mut word_index: BTreeMap<Word, usize> = BTreeMap::new();
    {
        let mut ech = Ech::new(LeadRule::Max, f);
        let mut count = 0usize;
        for w in &words {
            let mut v = SparseVec::new();
            for (ww, c) in expand_in_qa(a, w) {
                if ww.len() > l {
                    return Err(Error::TruncationTooSmall(format!(
                        "expansion of a stage-{n} word exceeds bound {l}"
                    )));
                }
                let next = word_index.len();
                let k = *word_index.entry(ww).or_insert(next);
                v.add_entry(k, c.clone());
            }
            if ech.insert(&v).is_some() {
                count += 1;
            }
        }
        if count != dim {
            return Err(Error::TruncationTooSmall(format!(
                "normal words dependent at stage {n}, bound {l}"
            )));
        }
    }

    let labels: Vec<Label> = words.iter().map(|w| w.label(a)).collect();
    let mut table = vec![vec![SparseVec::new(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut v = SparseVec::new();
            for (w, c) in nf_mul(a, &words[i], &words[j], n) {
                v.add_entry(index[&w], c);
            }
            table[i][j] = v;
        }
    }
    let alg = Arc::new(Algebra::new(f, Basis::new(labels), table, None)?);

    let mut m0 = SparseMatrix::zero(dim, d);
    let mut m1 = SparseMatrix::zero(dim, d);
    let mut mp = SparseMatrix::zero(d, dim);
    for i in 0..d {
        let w0 = NfQ { lead: Some(i), qs: vec![] };
        m0.set(index[&w0], i, f.one());
        m1.set(index[&w0], i, f.one());
        if n >= 2 {
            let wq = NfQ { lead: None, qs: vec![i] };
            m1.set(index[&wq], i, f.one().neg());
        }
    }
    for (k, w) in words.iter().enumerate() {
        if w.qs.is_empty() {
            mp.set(w.lead.unwrap(), k, f.one());
        }
    }
    let d0 = AlgebraHom::new(a.clone(), alg.clone(), m0)?;
    let d1 = AlgebraHom::new(a.clone(), alg.clone(), m1)?;
    let fold = AlgebraHom::new(alg.clone(), a.clone(), mp)?;

    // p d0 = p d1 = identity
    let id = SparseMatrix::identity(d, &f);
    if fold.matrix.compose(&d0.matrix) != id || fold.matrix.compose(&d1.matrix) != id {
        return Err(Error::Validation("folding does not split the inclusions".into()));
    }

    Ok(CylinderStage { alg, base: a.clone(), stage: n, d0, d1, fold, words, index })
}

/// Structure map Cyl_{n+1}(A) -> Cyl_n(A): kill the top q-layer.
pub fn cylinder_structure_map(higher: &CylinderStage, lower: &CylinderStage) -> Result<AlgebraHom> {
    if higher.stage != lower.stage + 1 || !Arc::ptr_eq(&higher.base, &lower.base) {
        return Err(Error::Validation("stages not adjacent".into()));
    }
    let f = higher.alg.field();
    let mut m = SparseMatrix::zero(lower.alg.dim(), higher.alg.dim());
    for (k, w) in higher.words.iter().enumerate() {
        if let Some(&t) = lower.index.get(w) {
            m.set(t, k, f.one());
        }
    }
    AlgebraHom::new(higher.alg.clone(), lower.alg.clone(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{fixtures, ideal_power, IdealBasis};
    use crate::field::FieldSpec;

    #[test]
    fn stage_one_is_the_base() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let c = q_construction(&k, 1, 2).unwrap();
        assert_eq!(c.alg.dim(), 1);
        assert_eq!(c.fold.matrix, SparseMatrix::identity(1, &f));
    }

    #[test]
    fn stage_two_of_ground_field() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let c = q_construction(&k, 2, 4).unwrap();
        // dim 3 = A + qA/qA^2, and dim qA/qA^2 = 2
        assert_eq!(c.alg.dim(), 3);
        assert_eq!(c.q_layer(1).len(), 2);
        // d0 - d1 lands in the kernel of the fold for every basis element
        let diff = c.d0.matrix.add(&c.d1.matrix.neg());
        assert!(c.fold.matrix.compose(&diff).is_zero());
    }

    #[test]
    fn fold_kernel_is_nilpotent_at_stage() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let c = q_construction(&k, 2, 4).unwrap();
        let ker = c.fold.kernel();
        let ideal = IdealBasis::new(c.alg.clone(), ker).unwrap();
        assert_eq!(ideal_power(&ideal, 2).unwrap().dim(), 0);
    }

    #[test]
    fn stage_dims_for_dim_two_base() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        let c = q_construction(&d, 3, 6).unwrap();
        // sum over m < 3 of (d+1)d^m with the m = 0 layer of size d:
        // 2 + 3*2 + 3*4 = 20
        assert_eq!(c.alg.dim(), 20);
        let c2 = q_construction(&d, 2, 4).unwrap();
        let sigma = cylinder_structure_map(&c, &c2).unwrap();
        assert!(sigma.is_surjective());
        // structure map commutes with the folds
        let via = c2.fold.matrix.compose(&sigma.matrix);
        assert_eq!(via, c.fold.matrix);
    }

    #[test]
    fn too_small_bound_is_reported() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        match q_construction(&k, 3, 2) {
            Err(Error::TruncationTooSmall(_)) => {}
            other => panic!("expected TruncationTooSmall, got {other:?}"),
        }
    }
}
