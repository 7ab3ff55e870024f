//! Naturality of the canonical identifications in test homomorphisms: the
//! squares against the functorial maps commute on a fixed panel.

use procyc::algebra::{
    fixtures, q_construction, universal_map, universal_model_trunc, AlgebraHom,
};
use procyc::field::FieldSpec;
use procyc::forms::{even_forms_iso, q_graded_iso, FormSpace};
use procyc::linalg::SparseMatrix;

/// The projection of the product of fields onto its first factor.
fn projection_panel(
    f: FieldSpec,
) -> (AlgebraHom, std::sync::Arc<procyc::algebra::Algebra>, std::sync::Arc<procyc::algebra::Algebra>) {
    let kk = fixtures::k_times_k(f);
    let k = fixtures::ground_field(f);
    let mut m = SparseMatrix::zero(1, 2);
    m.set(0, 0, f.one());
    (AlgebraHom::new(kk.clone(), k.clone(), m).unwrap(), kk, k)
}

#[test]
fn even_forms_identification_is_natural() {
    let f = FieldSpec::Rationals;
    let (p, kk, k) = projection_panel(f);
    let n = 2;
    let ua = universal_model_trunc(&kk, n, 2 * n).unwrap();
    let ub = universal_model_trunc(&k, n, 2 * n).unwrap();
    let iso_a = even_forms_iso(&ua).unwrap();
    let iso_b = even_forms_iso(&ub).unwrap();
    let uf = universal_map(&ua, &ub, &p).unwrap();
    // the entrywise map of the even-forms models induced by p
    let mut model_map = SparseMatrix::zero(iso_b.model.dim(), iso_a.model.dim());
    for (block, off_a) in iso_a.offsets.iter().enumerate() {
        let sa = &iso_a.spaces[2 * block];
        let sb = &iso_b.spaces[2 * block];
        let off_b = iso_b.offsets[block];
        for i in 0..sa.dim() {
            let (lead, ds) = sa.word(i).clone();
            // apply p to every slot by multilinearity
            let mut terms: Vec<(Option<usize>, Vec<usize>, procyc::field::Scalar)> =
                match lead {
                    None => vec![(None, vec![], f.one())],
                    Some(l) => p
                        .matrix
                        .col(l)
                        .iter()
                        .map(|(r, c)| (Some(r), vec![], c.clone()))
                        .collect(),
                };
            for &a_idx in &ds {
                let img = p.matrix.col(a_idx);
                let mut next = Vec::new();
                for (lead2, ds2, co) in &terms {
                    for (r, c) in img.iter() {
                        let mut d3 = ds2.clone();
                        d3.push(r);
                        next.push((*lead2, d3, co.mul(c)));
                    }
                }
                terms = next;
            }
            for (lead2, ds2, co) in terms {
                if let Some(kpos) = sb.position(&(lead2, ds2)) {
                    model_map.set(off_b + kpos, off_a + i, co);
                }
            }
        }
    }
    let lhs = model_map.compose(&iso_a.matrix);
    let rhs = iso_b.matrix.compose(&uf.matrix);
    assert_eq!(lhs, rhs, "even-forms square does not commute");
}

#[test]
fn q_graded_identification_is_natural() {
    let f = FieldSpec::Rationals;
    let (p, kk, k) = projection_panel(f);
    let n = 1;
    let ca = q_construction(&kk, n + 1, 2 * (n + 1)).unwrap();
    let cb = q_construction(&k, n + 1, 2 * (n + 1)).unwrap();
    let iso_a = q_graded_iso(&ca, n).unwrap();
    let iso_b = q_graded_iso(&cb, n).unwrap();
    // entrywise maps on the graded layer and on the forms
    let sa = FormSpace::build(&kk, n, None);
    let sb = FormSpace::build(&k, n, None);
    let apply_word = |lead: Option<usize>, ds: &[usize]| -> Vec<(Option<usize>, Vec<usize>, procyc::field::Scalar)> {
        let mut terms: Vec<(Option<usize>, Vec<usize>, procyc::field::Scalar)> = match lead {
            None => vec![(None, vec![], f.one())],
            Some(l) => p
                .matrix
                .col(l)
                .iter()
                .map(|(r, c)| (Some(r), vec![], c.clone()))
                .collect(),
        };
        for &a_idx in ds {
            let img = p.matrix.col(a_idx);
            let mut next = Vec::new();
            for (lead2, ds2, co) in &terms {
                for (r, c) in img.iter() {
                    let mut d3 = ds2.clone();
                    d3.push(r);
                    next.push((*lead2, d3, co.mul(c)));
                }
            }
            terms = next;
        }
        terms
    };
    // forms side map
    let mut forms_map = SparseMatrix::zero(sb.dim(), sa.dim());
    for i in 0..sa.dim() {
        let (lead, ds) = sa.word(i).clone();
        for (l2, d2, co) in apply_word(lead, &ds) {
            if let Some(kpos) = sb.position(&(l2, d2)) {
                forms_map.set(kpos, i, co);
            }
        }
    }
    // layer side map via the cylinder normal words
    let layer_b: std::collections::BTreeMap<(Option<usize>, Vec<usize>), usize> = iso_b
        .layer
        .iter()
        .enumerate()
        .map(|(col, &i)| (cb.word_public(i), col))
        .collect();
    let mut layer_map = SparseMatrix::zero(iso_b.layer.len(), iso_a.layer.len());
    for (col, &i) in iso_a.layer.iter().enumerate() {
        let (lead, qs) = ca.word_public(i);
        for (l2, q2, co) in apply_word(lead, &qs) {
            if let Some(&kpos) = layer_b.get(&(l2, q2)) {
                layer_map.set(kpos, col, co);
            }
        }
    }
    let lhs = forms_map.compose(&iso_a.matrix);
    let rhs = iso_b.matrix.compose(&layer_map);
    assert_eq!(lhs, rhs, "q-graded square does not commute");
}
