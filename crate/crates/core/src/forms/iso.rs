//! The canonical identifications between cylinder layers, universal-model
//! stages and differential forms, each constructed explicitly and verified
//! by exact rank and equivariance checks.

use std::sync::Arc;

use crate::algebra::{
    q_construction, tensor_algebra_trunc, Algebra, CylinderStage, UniversalStage,
};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::label::Label;
use crate::linalg::{kernel_basis, rank, Basis, Ech, LeadRule, SparseMatrix, SparseVec, Subspace};

use super::{
    d_op, forms_graded_algebra, left_action, mul_forms, right_action, FormSpace,
    FormsAlgebra,
};

/// The graded piece qA^n/qA^{n+1} identified with degree-n forms.
pub struct QGradedIso {
    pub form_space: FormSpace,
    /// basis indices of the n-th q-layer inside the cylinder stage
    pub layer: Vec<usize>,
    /// layer coordinates -> form coordinates
    pub matrix: SparseMatrix,
}

/// Build and verify the isomorphism qA^n/qA^{n+1} -> Omega^n A determined by
/// a0 qa1 ... qan -> a0 da1 ... dan. The cylinder must be at stage n+1.
pub fn q_graded_iso(cyl: &CylinderStage, n: usize) -> Result<QGradedIso> {
    if cyl.stage != n + 1 {
        return Err(Error::Validation(format!(
            "q-graded piece {n} needs cylinder stage {}, got {}",
            n + 1,
            cyl.stage
        )));
    }
    let a = &cyl.base;
    let f = a.field();
    let space = FormSpace::build(a, n, None);
    let layer = cyl.q_layer(n);
    if layer.len() != space.dim() {
        return Err(Error::Validation(format!(
            "layer dim {} differs from form dim {}",
            layer.len(),
            space.dim()
        )));
    }
    let mut matrix = SparseMatrix::zero(space.dim(), layer.len());
    for (col, &i) in layer.iter().enumerate() {
        let w = cyl.word(i);
        let fw = (w.lead, w.qs.clone());
        let k = space.position(&fw).ok_or_else(|| {
            Error::Validation("cylinder layer word missing from form space".into())
        })?;
        matrix.set(k, col, f.one());
    }
    if rank(&matrix, &f) != space.dim() {
        return Err(Error::Validation("q-graded map is not bijective".into()));
    }

    // bimodule equivariance on all pairs (basis a, layer word x)
    let layer_pos: std::collections::BTreeMap<usize, usize> =
        layer.iter().enumerate().map(|(c, &i)| (i, c)).collect();
    let restrict = |v: &SparseVec| -> SparseVec {
        // products of a layer word with a plain letter stay in q-count >= n;
        // the class modulo qA^{n+1} is the layer-n part
        SparseVec::from_entries(v.iter().filter_map(|(i, c)| {
            layer_pos.get(&i).map(|&col| (col, c.clone()))
        }))
    };
    for ai in 0..a.dim() {
        let da = cyl.d0.matrix.col(ai).clone();
        let left_forms = left_action(&space, ai);
        let right_forms = right_action(&space, ai);
        for (col, &i) in layer.iter().enumerate() {
            let x = SparseVec::unit(i, &f);
            let lhs_left = matrix.apply(&restrict(&cyl.alg.mul(&da, &x)));
            let rhs_left = left_forms.apply(matrix.col(col));
            if lhs_left != rhs_left {
                return Err(Error::Validation(format!(
                    "left equivariance fails at ({}, layer {col})",
                    a.basis().label(ai)
                )));
            }
            let lhs_right = matrix.apply(&restrict(&cyl.alg.mul(&x, &da)));
            let rhs_right = right_forms.apply(matrix.col(col));
            if lhs_right != rhs_right {
                return Err(Error::Validation(format!(
                    "right equivariance fails at ({}, layer {col})",
                    a.basis().label(ai)
                )));
            }
        }
    }
    Ok(QGradedIso { form_space: space, layer, matrix })
}

/// The even-forms model of a universal-model stage: degrees 0, 2, ..,
/// 2(n-1) of the forms with the transported product x*y = xy + dx dy.
pub struct EvenFormsIso {
    /// the even-forms algebra, associativity checked at construction
    pub model: Arc<Algebra>,
    pub spaces: Vec<FormSpace>,
    pub offsets: Vec<usize>,
    /// U_n coordinates -> model coordinates
    pub matrix: SparseMatrix,
}

/// Build and verify the isomorphism U_n(A) -> (even forms, deformed
/// product) determined by a0 w(a1,a2)... -> a0 da1 da2 ...; checks
/// bijectivity, multiplicativity on every basis pair, and that the triangle
/// over A commutes.
pub fn even_forms_iso(u: &UniversalStage) -> Result<EvenFormsIso> {
    let a = &u.base;
    let f = a.field();
    let n = u.stage;
    // even spaces 0, 2, .., 2(n-1) plus odd neighbours for the dx dy term
    let all: Vec<FormSpace> = (0..=2 * n - 1).map(|k| FormSpace::build(a, k, None)).collect();
    let evens: Vec<usize> = (0..n).map(|i| 2 * i).collect();
    let mut offsets = Vec::with_capacity(n);
    let mut total = 0usize;
    for &e in &evens {
        offsets.push(total);
        total += all[e].dim();
    }
    if total != u.alg.dim() {
        return Err(Error::Validation(format!(
            "even-forms model dim {total} differs from stage dim {}",
            u.alg.dim()
        )));
    }
    let mut labels = Vec::with_capacity(total);
    for (bi, &e) in evens.iter().enumerate() {
        for l in all[e].basis.labels() {
            labels.push(Label::Graded(bi as u32, Box::new(l.clone())));
        }
    }
    // d on each even space
    let d_mats: Vec<SparseMatrix> = evens
        .iter()
        .map(|&e| d_op(&all[e], &all[e + 1]))
        .collect();
    let mut table = vec![vec![SparseVec::new(); total]; total];
    for (bi, &ei) in evens.iter().enumerate() {
        for (bj, &ej) in evens.iter().enumerate() {
            for i in 0..all[ei].dim() {
                for j in 0..all[ej].dim() {
                    let x = SparseVec::unit(i, &f);
                    let y = SparseVec::unit(j, &f);
                    let mut out = SparseVec::new();
                    if ei + ej <= 2 * (n - 1) {
                        let t = &all[ei + ej];
                        let off = offsets[(ei + ej) / 2];
                        out = mul_forms(&all[ei], &all[ej], t, &x, &y)
                            .map_indices(|k| k + off);
                    }
                    if ei + ej + 2 <= 2 * (n - 1) {
                        let dx = d_mats[bi].apply(&x);
                        let dy = d_mats[bj].apply(&y);
                        let t = &all[ei + ej + 2];
                        let off = offsets[(ei + ej) / 2 + 1];
                        let dd = mul_forms(&all[ei + 1], &all[ej + 1], t, &dx, &dy)
                            .map_indices(|k| k + off);
                        out = out.add(&dd);
                    }
                    table[offsets[bi] + i][offsets[bj] + j] = out;
                }
            }
        }
    }
    let model = Arc::new(Algebra::new(f, Basis::new(labels), table, None)?);

    // the label map: (lead, [(a1,b1),..]) -> block l, word (lead, [a1,b1,..])
    let mut matrix = SparseMatrix::zero(total, u.alg.dim());
    for col in 0..u.alg.dim() {
        let w = u.word(col);
        let block = w.ws.len();
        let mut ds = Vec::with_capacity(2 * block);
        for &(p, q) in &w.ws {
            ds.push(p);
            ds.push(q);
        }
        let fw = (w.lead, ds);
        let k = all[2 * block].position(&fw).ok_or_else(|| {
            Error::Validation("stage word missing from even forms".into())
        })?;
        matrix.set(offsets[block] + k, col, f.one());
    }
    if rank(&matrix, &f) != total {
        return Err(Error::Validation("even-forms map is not bijective".into()));
    }
    // multiplicativity: map(x y) = map(x) * map(y) on all basis pairs
    for i in 0..u.alg.dim() {
        for j in 0..u.alg.dim() {
            let lhs = matrix.apply(u.alg.mul_basis(i, j));
            let rhs = model.mul(matrix.col(i), matrix.col(j));
            if lhs != rhs {
                return Err(Error::Validation(format!(
                    "even-forms map fails multiplicativity at ({i},{j})"
                )));
            }
        }
    }
    // triangle over A: collapsing the model to its degree-0 block recovers
    // the canonical projection of the stage
    let mut collapse = SparseMatrix::zero(a.dim(), total);
    for k in 0..all[0].dim() {
        let lead = all[0].word(k).0.unwrap();
        collapse.set(lead, k, f.one());
    }
    if collapse.compose(&matrix) != u.proj.matrix {
        return Err(Error::Validation("even-forms triangle does not commute".into()));
    }
    Ok(EvenFormsIso { model, spaces: all, offsets, matrix })
}

/// The explicit isomorphism from a cylinder stage of a truncated tensor
/// algebra onto the truncated de Rham algebra of that tensor algebra,
/// determined by  d0(x) -> x  and  qv -> dv  on generators.
pub struct AlphaIso {
    /// weight-truncated cylinder stage (domain)
    pub domain: Arc<Algebra>,
    /// stacked de Rham algebra (codomain)
    pub codomain: FormsAlgebra,
    pub matrix: SparseMatrix,
    /// domain-basis positions of the cylinder words kept by the weight cut
    pub kept: Vec<usize>,
    pub cyl: CylinderStage,
}

/// Restrict a cylinder stage over a graded base to the words of total
/// weight <= cap. High-weight words span an ideal, so this is an algebra
/// quotient; associativity is re-checked by the constructor.
fn cylinder_weight_truncate(
    cyl: &CylinderStage,
    cap: u64,
) -> Result<(Arc<Algebra>, Vec<usize>)> {
    let base = &cyl.base;
    let f = base.field();
    let weight = |i: usize| -> u64 {
        let w = cyl.word(i);
        w.lead.map(|l| base.weight_of(l)).unwrap_or(0)
            + w.qs.iter().map(|&l| base.weight_of(l)).sum::<u64>()
    };
    let kept: Vec<usize> = (0..cyl.alg.dim()).filter(|&i| weight(i) <= cap).collect();
    let pos: std::collections::BTreeMap<usize, usize> =
        kept.iter().enumerate().map(|(c, &i)| (i, c)).collect();
    let labels: Vec<Label> = kept
        .iter()
        .map(|&i| cyl.alg.basis().label(i).clone())
        .collect();
    let dim = kept.len();
    let mut table = vec![vec![SparseVec::new(); dim]; dim];
    for (x, &ix) in kept.iter().enumerate() {
        for (y, &iy) in kept.iter().enumerate() {
            let p = cyl.alg.mul_basis(ix, iy);
            table[x][y] = SparseVec::from_entries(p.iter().filter_map(|(k, c)| {
                pos.get(&k).map(|&col| (col, c.clone()))
            }));
        }
    }
    Ok((Arc::new(Algebra::new(f, Basis::new(labels), table, None)?), kept))
}

/// Build and verify alpha at stage n for the tensor algebra on v_dim
/// generators truncated at degree l: the map is checked multiplicative and
/// bijective, with alpha(qv) = dv and alpha(d0 x) = x on the nose.
pub fn example22_alpha(v_dim: usize, n: usize, l: usize, f: FieldSpec) -> Result<AlphaIso> {
    if n == 0 || l == 0 {
        return Err(Error::Validation("alpha needs n >= 1 and L >= 1".into()));
    }
    let tv = tensor_algebra_trunc(v_dim, l, f)?;
    let r = tv.alg.clone();
    let cyl = q_construction(&r, n, 2 * n)?;
    let (domain, kept) = cylinder_weight_truncate(&cyl, l as u64)?;
    let codomain = forms_graded_algebra(&r, n - 1, Some(l as u64))?;

    // alpha(q w) for a base word w, recursively through
    // q(v y) = d0(v) q(y) + q(v) d1(y)
    let emb0 = |i: usize| -> SparseVec {
        // degree-0 block offset is 0
        SparseVec::unit(codomain.offsets[0] + i, &f)
    };
    let ca = &codomain.ga.alg;
    fn alpha_q(
        r: &Arc<Algebra>,
        codomain: &FormsAlgebra,
        ca: &Arc<Algebra>,
        word: &[Label],
        f: &FieldSpec,
    ) -> SparseVec {
        // r-basis labels are generator words; split off the first generator
        let full = Label::Word(word.to_vec());
        let idx = r.basis().position(&full).expect("word in basis");
        if word.len() == 1 {
            // dv in the degree-1 block
            let s1 = &codomain.spaces[1];
            let k = s1.position(&(None, vec![idx])).expect("dv within cap");
            return SparseVec::unit(codomain.offsets[1] + k, f);
        }
        let head = &word[..1];
        let tail = &word[1..];
        let head_idx = r
            .basis()
            .position(&Label::Word(head.to_vec()))
            .expect("generator in basis");
        let tail_idx = r
            .basis()
            .position(&Label::Word(tail.to_vec()))
            .expect("tail in basis");
        let a_tail = alpha_q(r, codomain, ca, tail, f);
        let v0 = SparseVec::unit(codomain.offsets[0] + head_idx, f);
        let dv = {
            let s1 = &codomain.spaces[1];
            let k = s1.position(&(None, vec![head_idx])).expect("dv within cap");
            SparseVec::unit(codomain.offsets[1] + k, f)
        };
        let y0 = SparseVec::unit(codomain.offsets[0] + tail_idx, f);
        // v . alpha(q y) + dv . y - dv . alpha(q y)
        let mut out = ca.mul(&v0, &a_tail);
        out = out.add(&ca.mul(&dv, &y0));
        out = out.add(&ca.mul(&dv, &a_tail).neg());
        out
    }

    let mut matrix = SparseMatrix::zero(ca.dim(), domain.dim());
    for (col, &ci) in kept.iter().enumerate() {
        let w = cyl.word(ci);
        let mut acc: Option<SparseVec> = w.lead.map(emb0);
        for &q in &w.qs {
            let Label::Word(letters) = r.basis().label(q).clone() else {
                return Err(Error::Validation("tensor basis label is not a word".into()));
            };
            let aq = alpha_q(&r, &codomain, ca, &letters, &f);
            acc = Some(match acc {
                None => aq,
                Some(x) => ca.mul(&x, &aq),
            });
        }
        let v = acc.expect("nonempty normal word");
        for (k, c) in v.iter() {
            matrix.set(k, col, c.clone());
        }
    }
    if domain.dim() != ca.dim() || rank(&matrix, &f) != ca.dim() {
        return Err(Error::TruncationTooSmall(format!(
            "alpha is not bijective at stage {n}, bound {l}: {} -> {}",
            domain.dim(),
            ca.dim()
        )));
    }
    for i in 0..domain.dim() {
        for j in 0..domain.dim() {
            let lhs = matrix.apply(domain.mul_basis(i, j));
            let rhs = ca.mul(matrix.col(i), matrix.col(j));
            if lhs != rhs {
                return Err(Error::Validation(format!(
                    "alpha fails multiplicativity at pair ({i},{j})"
                )));
            }
        }
    }
    Ok(AlphaIso { domain, codomain, matrix, kept, cyl })
}

/// Subspace correspondence of the adic filtrations under alpha for the
/// tensor algebra on the underlying space of `a`: the ideal generated by
/// J^n plus the n-th power of the augmentation-side filtration matches on
/// both sides. Returns the common dimension.
pub fn alpha_filtration_check(a: &Arc<Algebra>, n: usize, l: usize) -> Result<usize> {
    let f = a.field();
    let d = a.dim();
    let alpha = example22_alpha(d, n, l, f)?;
    let r = alpha.cyl.base.clone();
    // multiplication collapse pi: R = T^{<=l}(A) -> A on tensor words
    let mut pi = SparseMatrix::zero(d, r.dim());
    for i in 0..r.dim() {
        let Label::Word(letters) = r.basis().label(i).clone() else {
            return Err(Error::Validation("tensor basis label is not a word".into()));
        };
        let idxs: Vec<usize> = letters
            .iter()
            .map(|l| match l {
                Label::Gen(g) => *g as usize,
                _ => unreachable!(),
            })
            .collect();
        let mut acc = SparseVec::unit(idxs[0], &f);
        for &g in &idxs[1..] {
            acc = a.mul_vec_basis(&acc, g);
        }
        for (k, c) in acc.iter() {
            pi.set(k, i, c.clone());
        }
    }
    let j = kernel_basis(&pi, &f);
    // J^n inside R
    let mut jn = j.clone();
    for _ in 1..n {
        let mut gens = Vec::new();
        for u in jn.reduced_basis() {
            for v in j.reduced_basis() {
                let p = r.mul(&u, &v);
                if !p.is_zero() {
                    gens.push(p);
                }
            }
        }
        jn = Subspace::new(r.dim(), f, gens);
    }

    // embed into the two models and close up as ideals
    let domain = &alpha.domain;
    let ca = &alpha.codomain.ga.alg;
    let embed_domain = |v: &SparseVec| -> SparseVec {
        // d0 into the cylinder, then restrict to the kept words
        let full = alpha.cyl.d0.matrix.apply(v);
        let pos: std::collections::BTreeMap<usize, usize> =
            alpha.kept.iter().enumerate().map(|(c, &i)| (i, c)).collect();
        SparseVec::from_entries(full.iter().filter_map(|(i, c)| {
            pos.get(&i).map(|&col| (col, c.clone()))
        }))
    };
    let embed_codomain =
        |v: &SparseVec| -> SparseVec { v.map_indices(|i| alpha.codomain.offsets[0] + i) };

    let mut f_side = ideal_closure(domain, jn.reduced_basis().iter().map(embed_domain));
    let mut g_side = ideal_closure(ca, jn.reduced_basis().iter().map(embed_codomain));
    // plus the n-th power parts: q-layers >= n cannot appear at stage n, and
    // form degrees >= n are cut; at the matching stage both are the top layer
    for (col, &ci) in alpha.kept.iter().enumerate() {
        if alpha.cyl.q_count(ci) >= n {
            f_side.insert(&SparseVec::unit(col, &f));
        }
    }
    for k in 0..ca.dim() {
        if alpha.codomain.ga.degree_of(k) >= n as u64 {
            g_side.insert(&SparseVec::unit(k, &f));
        }
    }
    // alpha maps the domain filtration onto the codomain one
    let mut g_check = Ech::new(LeadRule::Max, f);
    let mut count = 0usize;
    for row in f_side.normalized_rows() {
        let img = alpha.matrix.apply(&row);
        if !g_side.contains(&img) {
            return Err(Error::Validation(
                "alpha image of the filtration leaves the target filtration".into(),
            ));
        }
        if g_check.insert(&img).is_some() {
            count += 1;
        }
    }
    if count != g_side.rank() || f_side.rank() != g_side.rank() {
        return Err(Error::Validation(format!(
            "filtration dims disagree: {} vs {}",
            f_side.rank(),
            g_side.rank()
        )));
    }
    Ok(g_side.rank())
}

fn ideal_closure<'a, I: Iterator<Item = SparseVec>>(alg: &Arc<Algebra>, gens: I) -> Ech {
    let f = alg.field();
    let mut ech = Ech::new(LeadRule::Max, f);
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
    ech
}
