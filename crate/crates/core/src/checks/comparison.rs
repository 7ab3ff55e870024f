//! Stable comparisons of X-homology: free products against the sum of the
//! factors (characteristic zero), and the degree decomposition of power
//! stages against truncated free products with a tensor algebra.

use std::sync::Arc;

use crate::algebra::{power_algebra_trunc, tower::label_restriction_map, Algebra};
use crate::complexes::{
    homology_super, induced_on_super_homology, super_homology_reps,
    x_complex, x_map,
};
use crate::error::{Error, Result};
use crate::homotopy::find_connection;
use crate::linalg::{rank, SparseMatrix};
use crate::report::VerificationReport;

/// Compare the stable X-homology of the truncated free products
/// (A*B)^{<=L} against the homology of XA + XB across the range of bounds.
/// Over the rationals the stable dimensions agree; over a prime field the
/// tensor-algebra summand survives and the comparison is reported as it is.
pub fn char_zero_comparison_check(
    a: &Arc<Algebra>,
    b: &Arc<Algebra>,
    l_max: usize,
) -> Result<VerificationReport> {
    let f = a.field();
    let mut report = VerificationReport::new("cor65", &f.name());
    report.param("L_max", l_max);
    let xa = x_complex(a)?;
    let xb = x_complex(b)?;
    let (hae, hao) = homology_super(&xa.sc);
    let (hbe, hbo) = homology_super(&xb.sc);
    let expected = (hae + hbe, hao + hbo);
    report.param("expected_even", expected.0);
    report.param("expected_odd", expected.1);

    if a.dim() == 0 || b.dim() == 0 {
        // degenerate factor: the free product is the other factor
        report.check("stable_dims_match", true, "degenerate factor");
        return Ok(report);
    }

    let mut xs = Vec::new();
    let mut algs = Vec::new();
    for l in 1..=l_max {
        let (ga, _, _) = crate::algebra::free_product_trunc(a, b, l)?;
        xs.push(x_complex(&ga.alg)?);
        algs.push(ga.alg.clone());
    }
    let reps: Vec<_> = xs.iter().map(|x| super_homology_reps(&x.sc)).collect();
    let mut maps = Vec::new();
    for l in 0..l_max - 1 {
        let sigma = label_restriction_map(&algs[l + 1], &algs[l])?;
        let xm = x_map(&xs[l + 1], &xs[l], &sigma)?;
        maps.push(induced_on_super_homology(&xs[l].sc, &xm, &reps[l + 1], &reps[l])?);
    }
    // stable image dims per window, cleaned by sources reaching the top
    let windows = (l_max + 1) / 2;
    let mut stable = Vec::new();
    for w in 1..=windows {
        let mut even = SparseMatrix::identity(reps[w - 1].even.len(), &f);
        let mut odd = SparseMatrix::identity(reps[w - 1].odd.len(), &f);
        for s in (w - 1)..(l_max - 1) {
            even = even.compose(&maps[s].0);
            odd = odd.compose(&maps[s].1);
        }
        stable.push((rank(&even, &f), rank(&odd, &f)));
    }
    report.table(
        "stable_dims",
        stable.iter().map(|(e, o)| format!("({e},{o})")),
    );
    let agree = stable.iter().all(|&d| d == expected);
    report.check("stable_dims_match", agree, "");
    Ok(report)
}

/// The degree decomposition of the X-complex of power stages: the
/// low-degree blocks stabilize across stages (they agree with the free
/// product with a tensor algebra) and the structure maps kill everything
/// above the cut at stage spacing n against 2n.
pub fn power_degree_decomposition_check(
    a: &Arc<Algebra>,
    v_dim: usize,
    n: usize,
) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::Validation("decomposition stage needs n >= 1".into()));
    }
    let f = a.field();
    let mut report = VerificationReport::new("lemma66", &f.name());
    report.param("v_dim", v_dim);
    report.param("n", n);
    if find_connection(a)?.is_none() {
        return Err(Error::NotQuasiFree("base algebra admits no connection".into()));
    }
    if v_dim == 0 {
        // P_A(0) = A at every stage: the X-complexes are all X(A)
        let (ga, _) = power_algebra_trunc(a, 0, n + 1)?;
        let xp = x_complex(&ga.alg)?;
        let xa = x_complex(a)?;
        report.check(
            "zero_v_reduces_to_base",
            homology_super(&xp.sc) == homology_super(&xa.sc) && ga.alg.dim() == a.dim(),
            "",
        );
        return Ok(report);
    }

    let (g_lo, _) = power_algebra_trunc(a, v_dim, n + 1)?;
    let (g_hi, _) = power_algebra_trunc(a, v_dim, 2 * n + 1)?;
    let x_lo = x_complex(&g_lo.alg)?;
    let x_hi = x_complex(&g_hi.alg)?;
    let sigma = label_restriction_map(&g_hi.alg, &g_lo.alg)?;
    let xm = x_map(&x_hi, &x_lo, &sigma)?;

    // weight of each even/odd coordinate
    let even_w_lo: Vec<u64> = (0..g_lo.alg.dim()).map(|i| g_lo.alg.weight_of(i)).collect();
    let even_w_hi: Vec<u64> = (0..g_hi.alg.dim()).map(|i| g_hi.alg.weight_of(i)).collect();
    let odd_w = |x: &crate::complexes::XComplex| -> Vec<u64> {
        x.odd_basis
            .labels()
            .iter()
            .map(|l| {
                let amb = x.omega1.basis.position(l).expect("representative");
                x.omega1.weight_of_index(amb)
            })
            .collect()
    };
    let odd_w_lo = odd_w(&x_lo);
    let odd_w_hi = odd_w(&x_hi);

    // the structure map preserves the degree blocks
    let mut degree_preserving = true;
    for j in 0..g_hi.alg.dim() {
        for (r, _) in xm.even.col(j).iter() {
            if even_w_lo[r] != even_w_hi[j] {
                degree_preserving = false;
            }
        }
    }
    for j in 0..odd_w_hi.len() {
        for (r, _) in xm.odd.col(j).iter() {
            if odd_w_lo[r] != odd_w_hi[j] {
                degree_preserving = false;
            }
        }
    }
    report.check("structure_map_degree_preserving", degree_preserving, "");

    // low-degree blocks match: equal dimensions and bijective restriction
    let mut blocks_match = true;
    let mut dims_table = Vec::new();
    for d in 0..=n as u64 {
        let lo_even: Vec<usize> =
            (0..even_w_lo.len()).filter(|&i| even_w_lo[i] == d).collect();
        let hi_even: Vec<usize> =
            (0..even_w_hi.len()).filter(|&i| even_w_hi[i] == d).collect();
        let lo_odd: Vec<usize> = (0..odd_w_lo.len()).filter(|&i| odd_w_lo[i] == d).collect();
        let hi_odd: Vec<usize> = (0..odd_w_hi.len()).filter(|&i| odd_w_hi[i] == d).collect();
        dims_table.push(format!(
            "deg {d}: even {}/{} odd {}/{}",
            lo_even.len(),
            hi_even.len(),
            lo_odd.len(),
            hi_odd.len()
        ));
        if lo_even.len() != hi_even.len() || lo_odd.len() != hi_odd.len() {
            blocks_match = false;
            continue;
        }
        // restriction of the structure map to the block must be bijective
        let restrict = |m: &SparseMatrix, rows: &[usize], cols: &[usize]| -> SparseMatrix {
            let rpos: std::collections::BTreeMap<usize, usize> =
                rows.iter().enumerate().map(|(p, &i)| (i, p)).collect();
            let mut out = SparseMatrix::zero(rows.len(), cols.len());
            for (cp, &j) in cols.iter().enumerate() {
                for (r, c) in m.col(j).iter() {
                    if let Some(&rp) = rpos.get(&r) {
                        out.set(rp, cp, c.clone());
                    }
                }
            }
            out
        };
        let be = restrict(&xm.even, &lo_even, &hi_even);
        let bo = restrict(&xm.odd, &lo_odd, &hi_odd);
        if rank(&be, &f) != lo_even.len() || rank(&bo, &f) != lo_odd.len() {
            blocks_match = false;
        }
    }
    report.table("block_dims", dims_table);
    report.check("low_degree_blocks_match", blocks_match, "");

    // everything above the target's top degree dies under the structure map
    let top_lo = 2 * n as u64; // odd part of the lower stage reaches 2n
    let mut discarded_zero = true;
    for j in 0..g_hi.alg.dim() {
        if even_w_hi[j] > top_lo && !xm.even.col(j).is_zero() {
            discarded_zero = false;
        }
    }
    for j in 0..odd_w_hi.len() {
        if odd_w_hi[j] > top_lo && !xm.odd.col(j).is_zero() {
            discarded_zero = false;
        }
    }
    report.check("discarded_part_maps_to_zero", discarded_zero, "");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures;
    use crate::field::FieldSpec;

    #[test]
    fn comparison_over_q_for_ground_fields() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let r = char_zero_comparison_check(&k, &k, 7).unwrap();
        assert!(r.pass, "{}", r.render());
        assert_eq!(r.params["expected_even"], "2");
        assert_eq!(r.params["expected_odd"], "0");
    }

    #[test]
    fn comparison_over_f2_reports_discrepancy() {
        let f = FieldSpec::prime_field(2).unwrap();
        let k = fixtures::ground_field(f);
        let r = char_zero_comparison_check(&k, &k, 7).unwrap();
        assert!(!r.pass, "{}", r.render());
    }

    #[test]
    fn comparison_with_zero_factor_is_trivial() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let z = fixtures::zero_algebra(f, 0);
        let r = char_zero_comparison_check(&k, &z, 3).unwrap();
        assert!(r.pass, "{}", r.render());
    }

    #[test]
    fn degree_decomposition_small() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let r = power_degree_decomposition_check(&k, 1, 1).unwrap();
        assert!(r.pass, "{}", r.render());
    }

    #[test]
    fn degree_decomposition_zero_v() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let r = power_degree_decomposition_check(&k, 0, 2).unwrap();
        assert!(r.pass, "{}", r.render());
    }

    #[test]
    fn degree_decomposition_rejects_non_quasifree() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        assert!(matches!(
            power_degree_decomposition_check(&d, 1, 1),
            Err(Error::NotQuasiFree(_))
        ));
    }
}
