//! Finite stages U_n(A) = TA / JA^n of the universal model, where TA is the
//! tensor algebra on the underlying space of A and JA the kernel of the
//! multiplication collapse TA ->> A.
//!
//! Elements are kept in the curvature normal form  a0 w(a1,a2) ... w(a_{2l-1}, a_{2l})
//! with w(a,b) = (a tensor b) - ab, the optional lead a0 ranging over A. The
//! words with l >= n curvature factors span exactly JA^n, so the stage is
//! the span of normal words with l < n. Multiplication rewrites through
//! a.b = w(a,b) + ab  and  w(c,d).e = c.w(d,e) + w(c,de) - w(cd,e).
//! Independence of the normal words is certified in the tensor word space
//! up to length L.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::label::Label;
use crate::linalg::{Basis, Ech, LeadRule, SparseMatrix, SparseVec};

use super::{Algebra, AlgebraHom};

/// Curvature normal word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct NfW {
    pub lead: Option<usize>,
    pub ws: Vec<(usize, usize)>,
}

impl NfW {
    fn label(&self, a: &Algebra) -> Label {
        Label::Pairs {
            lead: self.lead.map(|i| Box::new(a.basis().label(i).clone())),
            ws: self
                .ws
                .iter()
                .map(|&(i, j)| (a.basis().label(i).clone(), a.basis().label(j).clone()))
                .collect(),
        }
    }
}

/// A universal-model stage with its projection onto A.
#[derive(Clone, Debug)]
pub struct UniversalStage {
    pub alg: Arc<Algebra>,
    pub base: Arc<Algebra>,
    pub stage: usize,
    /// the projection U_n(A) ->> A, a surjective homomorphism whose kernel
    /// has vanishing n-th power
    pub proj: AlgebraHom,
    pub(crate) words: Vec<NfW>,
    pub(crate) index: BTreeMap<NfW, usize>,
}

impl UniversalStage {
    /// Number of curvature factors of a basis element.
    pub fn w_count(&self, i: usize) -> usize {
        self.words[i].ws.len()
    }

    pub fn w_layer(&self, m: usize) -> Vec<usize> {
        (0..self.words.len()).filter(|&i| self.words[i].ws.len() == m).collect()
    }

    pub(crate) fn word(&self, i: usize) -> &NfW {
        &self.words[i]
    }
}

fn prefix_mul_plain(
    a: &Algebra,
    lead: Option<usize>,
    ws: &[(usize, usize)],
    b: usize,
) -> Vec<(NfW, Scalar)> {
    if ws.is_empty() {
        return match lead {
            None => vec![(NfW { lead: Some(b), ws: vec![] }, a.field().one())],
            Some(la) => {
                // rho(la) rho(b) = w(la, b) + rho(la b)
                let mut out = vec![(NfW { lead: None, ws: vec![(la, b)] }, a.field().one())];
                for (c, co) in a.mul_basis(la, b).iter() {
                    out.push((NfW { lead: Some(c), ws: vec![] }, co.clone()));
                }
                out
            }
        };
    }
    let (c0, d0) = *ws.last().unwrap();
    let ws1 = &ws[..ws.len() - 1];
    let mut out = Vec::new();
    // w(c0,d0).b = rho(c0) w(d0, b) + w(c0, d0 b) - w(c0 d0, b)
    for (t, co) in prefix_mul_plain(a, lead, ws1, c0) {
        let mut w = t.ws;
        w.push((d0, b));
        out.push((NfW { lead: t.lead, ws: w }, co));
    }
    for (g, co) in a.mul_basis(d0, b).iter() {
        let mut w = ws1.to_vec();
        w.push((c0, g));
        out.push((NfW { lead, ws: w }, co.clone()));
    }
    for (g, co) in a.mul_basis(c0, d0).iter() {
        let mut w = ws1.to_vec();
        w.push((g, b));
        out.push((NfW { lead, ws: w }, co.neg()));
    }
    out
}

fn nf_mul(a: &Algebra, x: &NfW, y: &NfW, stage: usize) -> Vec<(NfW, Scalar)> {
    let heads: Vec<(NfW, Scalar)> = match y.lead {
        Some(lb) => prefix_mul_plain(a, x.lead, &x.ws, lb),
        None => vec![(x.clone(), a.field().one())],
    };
    let mut out = Vec::new();
    for (h, co) in heads {
        let mut ws = h.ws;
        ws.extend_from_slice(&y.ws);
        if ws.len() < stage {
            out.push((NfW { lead: h.lead, ws }, co));
        }
    }
    out
}

/// Tensor words over the basis of A (pure concatenation, no relations).
type TWord = Vec<usize>;

fn expand_in_ta(a: &Arc<Algebra>, w: &NfW) -> Vec<(TWord, Scalar)> {
    let one = a.field().one();
    let mut acc: Vec<(TWord, Scalar)> = Vec::new();
    if let Some(la) = w.lead {
        acc.push((vec![la], one.clone()));
    }
    for &(p, q) in &w.ws {
        // w(p,q) = p tensor q - rho(pq)
        let mut parts: Vec<(TWord, Scalar)> = vec![(vec![p, q], one.clone())];
        for (c, co) in a.mul_basis(p, q).iter() {
            parts.push((vec![c], co.neg()));
        }
        if acc.is_empty() {
            acc = parts;
            continue;
        }
        let mut next = Vec::new();
        for (w1, c1) in &acc {
            for (w2, c2) in &parts {
                let mut w3 = w1.clone();
                w3.extend_from_slice(w2);
                next.push((w3, c1.mul(c2)));
            }
        }
        acc = next;
    }
    acc
}

/// Build U_n(A) = TA/JA^n together with the projection onto A. The
/// certification space is the tensor word space of length <= l; l must be
/// at least 2n - 1 (towers use l = 2n).
pub fn universal_model_trunc(a: &Arc<Algebra>, n: usize, l: usize) -> Result<UniversalStage> {
    if n == 0 {
        return Err(Error::Validation("universal model stage needs n >= 1".into()));
    }
    if l + 1 < 2 * n {
        return Err(Error::TruncationTooSmall(format!(
            "universal stage {n} needs tensor bound >= {}, got {l}",
            2 * n - 1
        )));
    }
    let f = a.field();
    let d = a.dim();

    let mut words: Vec<NfW> = Vec::new();
    let mut tuples: Vec<Vec<(usize, usize)>> = vec![vec![]];
    for m in 0..n {
        if m > 0 {
            let mut next = Vec::new();
            for t in &tuples {
                for i in 0..d {
                    for j in 0..d {
                        let mut t2 = t.clone();
                        t2.push((i, j));
                        next.push(t2);
                    }
                }
            }
            tuples = next;
        }
        for t in &tuples {
            if m == 0 {
                for i in 0..d {
                    words.push(NfW { lead: Some(i), ws: vec![] });
                }
            } else {
                words.push(NfW { lead: None, ws: t.clone() });
                for i in 0..d {
                    words.push(NfW { lead: Some(i), ws: t.clone() });
                }
            }
        }
    }
    words.sort();
    words.dedup();
    let index: BTreeMap<NfW, usize> =
        words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let dim = words.len();

    // independence certification in the tensor word space
    {
        let mut word_index: BTreeMap<TWord, usize> = BTreeMap::new();
        let mut ech = Ech::new(LeadRule::Max, f);
        let mut count = 0usize;
        for w in &words {
            let mut v = SparseVec::new();
            for (ww, c) in expand_in_ta(a, w) {
                if ww.len() > l {
                    return Err(Error::TruncationTooSmall(format!(
                        "expansion of a stage-{n} word exceeds tensor bound {l}"
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

    let mut mp = SparseMatrix::zero(d, dim);
    for (k, w) in words.iter().enumerate() {
        if w.ws.is_empty() {
            mp.set(w.lead.unwrap(), k, f.one());
        }
    }
    let proj = AlgebraHom::new(alg.clone(), a.clone(), mp)?;

    Ok(UniversalStage { alg, base: a.clone(), stage: n, proj, words, index })
}

/// The linear section rho: A -> U_n(A) sending a basis element to its plain
/// normal word. Not multiplicative.
pub fn rho_section(u: &UniversalStage) -> SparseMatrix {
    let f = u.base.field();
    let mut m = SparseMatrix::zero(u.alg.dim(), u.base.dim());
    for i in 0..u.base.dim() {
        let w = NfW { lead: Some(i), ws: vec![] };
        m.set(u.index[&w], i, f.one());
    }
    m
}

/// Basis index of rho(e_i) inside the stage.
pub fn rho_index(u: &UniversalStage, i: usize) -> usize {
    u.index[&NfW { lead: Some(i), ws: vec![] }]
}

/// rho(e_i) as a stage vector.
pub fn rho_of(u: &UniversalStage, i: usize) -> SparseVec {
    SparseVec::unit(rho_index(u, i), &u.base.field())
}

/// Basis index of a normal word, if it survives the truncation.
pub fn pairs_index(
    u: &UniversalStage,
    lead: Option<usize>,
    ws: &[(usize, usize)],
) -> Option<usize> {
    u.index.get(&NfW { lead, ws: ws.to_vec() }).copied()
}

/// The normal word of a basis element: lead and curvature pairs.
pub fn stage_word(u: &UniversalStage, k: usize) -> (Option<usize>, Vec<(usize, usize)>) {
    let w = &u.words[k];
    (w.lead, w.ws.clone())
}

/// Product of two stage elements.
pub fn stage_mul(u: &UniversalStage, x: &SparseVec, y: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (i, ci) in x.iter() {
        for (j, cj) in y.iter() {
            let co = ci.mul(cj);
            for (t, c) in nf_mul(&u.base, &u.words[i], &u.words[j], u.stage) {
                out.add_entry(u.index[&t], c.mul(&co));
            }
        }
    }
    out
}

/// Multiply an element of the stage by rho(v) on the right, v a vector of A.
pub fn mul_by_rho(u: &UniversalStage, x: &SparseVec, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (b, cb) in v.iter() {
        for (i, ci) in x.iter() {
            let co = ci.mul(cb);
            for (w, c) in nf_mul(&u.base, u.word(i), &NfW { lead: Some(b), ws: vec![] }, u.stage) {
                out.add_entry(u.index[&w], c.mul(&co));
            }
        }
    }
    out
}

/// Interpret a tensor word (a list of A-basis indices) inside the stage by
/// multiplying out the rho-letters.
pub fn project_tensor_word(u: &UniversalStage, word: &[usize]) -> SparseVec {
    assert!(!word.is_empty());
    let f = u.base.field();
    let mut acc = SparseVec::unit(u.index[&NfW { lead: Some(word[0]), ws: vec![] }], &f);
    for &b in &word[1..] {
        acc = mul_by_rho(u, &acc, &SparseVec::unit(b, &f));
    }
    acc
}

/// The induced homomorphism U_n(f): U_n(A) -> U_n(B) of a homomorphism
/// f: A -> B.
pub fn universal_map(
    ua: &UniversalStage,
    ub: &UniversalStage,
    f: &AlgebraHom,
) -> Result<AlgebraHom> {
    if ua.stage != ub.stage {
        return Err(Error::Validation("universal stages differ".into()));
    }
    let fld = ua.base.field();
    let mut m = SparseMatrix::zero(ub.alg.dim(), ua.alg.dim());
    for (k, w) in ua.words.iter().enumerate() {
        // image = rho(f lead) * prod_i ( rho(f a_i) rho(f b_i) - rho(f(a_i b_i)) )
        let mut acc: Option<SparseVec> = w.lead.map(|la| {
            let img = f.apply(&SparseVec::unit(la, &fld));
            let mut v = SparseVec::new();
            for (b, c) in img.iter() {
                v.add_entry(ub.index[&NfW { lead: Some(b), ws: vec![] }], c.clone());
            }
            v
        });
        for &(p, q) in &w.ws {
            let fp = f.apply(&SparseVec::unit(p, &fld));
            let fq = f.apply(&SparseVec::unit(q, &fld));
            let fpq = ub.base.mul(&fp, &fq);
            // the curvature of the pair, as an element of U_n(B)
            let mut curv = SparseVec::new();
            for (bp, cp) in fp.iter() {
                let x = SparseVec::unit(ub.index[&NfW { lead: Some(bp), ws: vec![] }], &fld);
                let y = mul_by_rho(ub, &x, &fq);
                curv.add_scaled(&y, cp);
            }
            for (b, c) in fpq.iter() {
                curv.add_entry(ub.index[&NfW { lead: Some(b), ws: vec![] }], c.neg());
            }
            acc = Some(match acc {
                None => curv,
                Some(x) => {
                    let mut out = SparseVec::new();
                    for (i, ci) in x.iter() {
                        for (j, cj) in curv.iter() {
                            let co = ci.mul(cj);
                            for (t, c) in
                                nf_mul(&ub.base, ub.word(i), ub.word(j), ub.stage)
                            {
                                out.add_entry(ub.index[&t], c.mul(&co));
                            }
                        }
                    }
                    out
                }
            });
        }
        if let Some(v) = acc {
            for (r, c) in v.iter() {
                m.set(r, k, c.clone());
            }
        }
    }
    AlgebraHom::new(ua.alg.clone(), ub.alg.clone(), m)
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
        let u = universal_model_trunc(&k, 1, 2).unwrap();
        assert_eq!(u.alg.dim(), 1);
        assert_eq!(u.proj.matrix, SparseMatrix::identity(1, &f));
    }

    #[test]
    fn stage_two_of_ground_field_has_dim_three() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let u = universal_model_trunc(&k, 2, 4).unwrap();
        assert_eq!(u.alg.dim(), 3);
        // kernel of the projection squares to zero
        let ker = u.proj.kernel();
        let ideal = IdealBasis::new(u.alg.clone(), ker).unwrap();
        assert_eq!(ideal_power(&ideal, 2).unwrap().dim(), 0);
    }

    #[test]
    fn universal_map_functorial_on_identity() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        let u = universal_model_trunc(&d, 2, 4).unwrap();
        let idm = AlgebraHom::identity(&d);
        let uf = universal_map(&u, &u, &idm).unwrap();
        assert_eq!(uf.matrix, SparseMatrix::identity(u.alg.dim(), &f));
    }

    #[test]
    fn projection_composes_with_universal_map() {
        let f = FieldSpec::Rationals;
        let kk = fixtures::k_times_k(f);
        let k = fixtures::ground_field(f);
        // projection onto the first factor
        let mut m = SparseMatrix::zero(1, 2);
        m.set(0, 0, f.one());
        let pr = AlgebraHom::new(kk.clone(), k.clone(), m).unwrap();
        let ua = universal_model_trunc(&kk, 2, 4).unwrap();
        let ub = universal_model_trunc(&k, 2, 4).unwrap();
        let uf = universal_map(&ua, &ub, &pr).unwrap();
        // pi_B U(f) = f pi_A
        let lhs = ub.proj.matrix.compose(&uf.matrix);
        let rhs = pr.matrix.compose(&ua.proj.matrix);
        assert_eq!(lhs, rhs);
    }
}
