//! Relative negative-cyclic homology of power deformations, computed two
//! independent ways: through mapping cones of the X-complexes (regarded as
//! mixed complexes), and through the cyclic coinvariant combinatorics. The
//! index alignment between tower stage s and combinatorial cut s - 1 was
//! calibrated once against the cone pipeline on the smallest case and is
//! frozen here.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::algebra::{power_algebra_trunc, Algebra};
use crate::complexes::{
    cn_total, cn_total_map, homology_reps, induced_on_homology, mapping_cone_super,
    mapping_cone_total, super_homology_reps, induced_on_super_homology, x_as_mixed,
    x_complex_with_cap, x_map, MixedChainMap, SuperChainMap, TotalComplex,
};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::{rank, SparseMatrix};
use crate::report::VerificationReport;

/// Input of the coinvariant computation.
#[derive(Clone, Debug)]
pub struct UpsilonSpec {
    pub a: Arc<Algebra>,
    pub v_dim: usize,
    pub cut: usize,
}

/// Coinvariant dimensions: C_i for 1 <= i <= cut and D_{i,r} for
/// 1 <= r <= i. Orbit counts of the cyclic rotations, valid in every
/// characteristic since the actions permute basis vectors.
#[derive(Clone, Debug, serde::Serialize)]
pub struct UpsilonDims {
    pub c: Vec<usize>,
    pub d: Vec<Vec<usize>>,
    pub per_cut_totals: Vec<usize>,
}

pub fn upsilon(spec: &UpsilonSpec) -> UpsilonDims {
    let v = spec.v_dim;
    let adim = spec.a.dim();
    let mut c = Vec::new();
    let mut d = Vec::new();
    for i in 1..=spec.cut {
        // words of length i over v letters, up to rotation
        let mut orbits: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut word = vec![0u32; i];
        loop {
            orbits.insert(canonical_rotation(&word));
            if !increment(&mut word, v as u32) {
                break;
            }
        }
        c.push(if v == 0 { 0 } else { orbits.len() });

        // tuples (a_1, w_1, .., a_r, w_r), block rotation, |w_j| >= 1
        let mut d_row = Vec::new();
        for r in 1..=i {
            let mut orbit_set: BTreeSet<Vec<(u32, Vec<u32>)>> = BTreeSet::new();
            for comp in compositions(i, r) {
                // letters for the a-slots and the v-words
                let mut tuple: Vec<(u32, Vec<u32>)> =
                    comp.iter().map(|&len| (0u32, vec![0u32; len])).collect();
                if adim == 0 || v == 0 {
                    continue;
                }
                loop {
                    orbit_set.insert(canonical_block_rotation(&tuple));
                    if !increment_tuple(&mut tuple, adim as u32, v as u32) {
                        break;
                    }
                }
            }
            d_row.push(orbit_set.len());
        }
        d.push(d_row);
    }
    let mut per_cut_totals = Vec::new();
    let mut acc = 0usize;
    for i in 0..spec.cut {
        acc += c[i] + d[i].iter().sum::<usize>();
        per_cut_totals.push(acc);
    }
    UpsilonDims { c, d, per_cut_totals }
}

fn increment(word: &mut [u32], base: u32) -> bool {
    if base == 0 {
        return false;
    }
    for slot in word.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

fn increment_tuple(tuple: &mut [(u32, Vec<u32>)], adim: u32, v: u32) -> bool {
    for (a, w) in tuple.iter_mut().rev() {
        if increment(w, v) {
            return true;
        }
        *a += 1;
        if *a < adim {
            return true;
        }
        *a = 0;
    }
    false
}

fn canonical_rotation(word: &[u32]) -> Vec<u32> {
    let mut best = word.to_vec();
    for s in 1..word.len() {
        let mut rot = word[s..].to_vec();
        rot.extend_from_slice(&word[..s]);
        if rot < best {
            best = rot;
        }
    }
    best
}

fn canonical_block_rotation(tuple: &[(u32, Vec<u32>)]) -> Vec<(u32, Vec<u32>)> {
    let mut best = tuple.to_vec();
    for s in 1..tuple.len() {
        let mut rot = tuple[s..].to_vec();
        rot.extend_from_slice(&tuple[..s]);
        if rot < best {
            best = rot;
        }
    }
    best
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            if total >= 1 {
                cur.push(total);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for first in 1..=total.saturating_sub(parts - 1) {
            cur.push(first);
            rec(total - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    if parts >= 1 {
        rec(total, parts, &mut cur, &mut out);
    }
    out
}

/// The relative negative-cyclic data of the power deformations
/// P_A(V)_s ->> A: raw stagewise dimensions and the stable image
/// dimensions along the tower (sources reach twice as deep as the report
/// window, with the weight truncation that leaves those blocks intact).
pub struct RelHnTower {
    pub stages: usize,
    /// raw dim of H of the cone at the reported stages
    pub rel_hn1_dims: Vec<usize>,
    pub rel_hn2_dims: Vec<usize>,
    pub rel_hn3_dims: Vec<usize>,
    /// stable image dimensions at the reported stages
    pub stable_hn1_dims: Vec<usize>,
    /// surjectivity of the stabilized tower maps
    pub maps_surjective: Vec<bool>,
}

/// Relative HN_n(f) is read off as H_{n+1} of the cone of the totalized
/// chain map CN X(P) -> CN X(A), matching the fiber sequence indexing.
pub fn relative_hn_tower(a: &Arc<Algebra>, v_dim: usize, stages: usize) -> Result<RelHnTower> {
    let f = a.field();
    let build = (2 * stages).saturating_sub(1).max(1);
    let cap = if a.weights().is_some() || a.max_weight() > 0 {
        None
    } else {
        Some((2 * (build as u64 - 1)).max(1))
    };
    let xa = x_complex_with_cap(a, None)?;
    let ma = x_as_mixed(&xa)?;
    let cn_a = cn_total(&ma)?;

    let mut cones: Vec<TotalComplex> = Vec::new();
    let mut stage_data = Vec::new();
    for s in 1..=build {
        let (ga, (_inc, ret)) = power_algebra_trunc(a, v_dim, s)?;
        let xp = x_complex_with_cap(&ga.alg, cap)?;
        let mp = x_as_mixed(&xp)?;
        let cn_p = cn_total(&mp)?;
        let xf = x_map(&xp, &xa, &ret)?;
        let mf = MixedChainMap::new(&mp, &ma, vec![xf.even.clone(), xf.odd.clone()])?;
        let cnf = cn_total_map(&mp, &ma, &mf);
        let cone = mapping_cone_total(&cn_p, &cn_a, &cnf)?;
        cones.push(cone);
        stage_data.push((ga, xp, mp, cn_p));
    }

    let mut rel_hn1_dims = Vec::new();
    let mut rel_hn2_dims = Vec::new();
    let mut rel_hn3_dims = Vec::new();
    let mut reps1 = Vec::new();
    for (s, cone) in cones.iter().enumerate() {
        let h2 = homology_reps(cone, 2);
        if s < stages {
            rel_hn1_dims.push(h2.reps.len());
            rel_hn2_dims.push(cone.homology_dim(3));
            rel_hn3_dims.push(cone.homology_dim(4));
        }
        reps1.push(h2);
    }

    let mut induced = Vec::new();
    for s in 0..build.saturating_sub(1) {
        // cone chain map from stage s+2 to stage s+1 (1-indexed)
        let hi = &stage_data[s + 1];
        let lo = &stage_data[s];
        let sigma = crate::algebra::tower::label_restriction_map(&hi.0.alg, &lo.0.alg)?;
        let xs = x_map(&hi.1, &lo.1, &sigma)?;
        let ms = MixedChainMap::new(&hi.2, &lo.2, vec![xs.even.clone(), xs.odd.clone()])?;
        let cns = cn_total_map(&hi.2, &lo.2, &ms);
        // block map on the cones: diag(cns shifted, identity on the CN(A) part)
        let hi_cone = &cones[s + 1];
        let lo_cone = &cones[s];
        let mut comps = Vec::new();
        for k in 0..hi_cone.dims.len() {
            let xr = if k >= 1 { hi.3.dim(k - 1) } else { 0 };
            let yr = cn_a.dim(k);
            let xr_lo = if k >= 1 { lo.3.dim(k - 1) } else { 0 };
            let mut m = SparseMatrix::zero(xr_lo + yr, xr + yr);
            if k >= 1 && k - 1 < cns.len() {
                for j in 0..xr {
                    for (r, c) in cns[k - 1].col(j).iter() {
                        m.set(r, j, c.clone());
                    }
                }
            }
            for j in 0..yr {
                m.set(xr_lo + j, xr + j, f.one());
            }
            comps.push(m);
        }
        // verify the block map is a chain map of the cones
        for k in 1..hi_cone.dims.len() {
            let lhs = comps[k - 1].compose(&hi_cone.d[k - 1]);
            let rhs = lo_cone.d[k - 1].compose(&comps[k]);
            if lhs != rhs {
                return Err(Error::Validation(format!(
                    "cone structure map fails to commute at degree {k}"
                )));
            }
        }
        let m = induced_on_homology(
            hi_cone,
            lo_cone,
            &comps,
            2,
            &reps1[s + 1],
            &reps1[s],
        )?;
        induced.push(m);
    }

    // stable image dimensions at the reported stages, and surjectivity of
    // the stabilized tower: the stage map carries the stable subspace at
    // s+1 onto the stable subspace at s
    let composite_from_top = |w: usize| -> SparseMatrix {
        let mut m = SparseMatrix::identity(reps1[w - 1].reps.len(), &f);
        for s in (w - 1)..(build - 1) {
            m = m.compose(&induced[s]);
        }
        m
    };
    let mut stable_hn1_dims = Vec::new();
    for w in 1..=stages {
        stable_hn1_dims.push(rank(&composite_from_top(w), &f));
    }
    let mut maps_surjective = Vec::new();
    for w in 1..stages {
        let through = induced[w - 1].compose(&composite_from_top(w + 1));
        maps_surjective.push(rank(&through, &f) == stable_hn1_dims[w - 1]);
    }

    Ok(RelHnTower {
        stages,
        rel_hn1_dims,
        rel_hn2_dims,
        rel_hn3_dims,
        stable_hn1_dims,
        maps_surjective,
    })
}

/// Cross-check the coinvariant formula against the cone pipeline: the
/// relative HN_1 dimensions at stage s equal the cut-(s-1) coinvariant
/// totals, the relative HN_2 and HN_3 vanish at every stage, and the tower
/// structure maps are surjective.
pub fn relative_hn_crosscheck(spec: &UpsilonSpec) -> Result<VerificationReport> {
    let f = spec.a.field();
    let mut report = VerificationReport::new("prop68", &f.name());
    report.param("v_dim", spec.v_dim);
    report.param("stages", spec.cut);
    let stages = spec.cut;
    let tower = relative_hn_tower(&spec.a, spec.v_dim, stages)?;
    let dims = upsilon(spec);
    report.table("rel_hn1_raw", tower.rel_hn1_dims.iter().map(|d| d.to_string()));
    report.table(
        "rel_hn1_stable",
        tower.stable_hn1_dims.iter().map(|d| d.to_string()),
    );
    report.table(
        "upsilon_totals",
        std::iter::once("0".to_string())
            .chain(dims.per_cut_totals.iter().map(|d| d.to_string())),
    );
    // calibrated alignment: the stable image at stage s corresponds to the
    // coinvariant truncation at cut s - 1
    let mut agree = true;
    for s in 1..=stages {
        let expected = if s == 1 { 0 } else { dims.per_cut_totals[s - 2] };
        if tower.stable_hn1_dims[s - 1] != expected {
            agree = false;
        }
    }
    report.check("hn1_matches_coinvariants", agree, "");
    report.check(
        "hn2_vanishes",
        tower.rel_hn2_dims.iter().all(|&d| d == 0),
        "",
    );
    report.check(
        "hn3_vanishes",
        tower.rel_hn3_dims.iter().all(|&d| d == 0),
        "",
    );
    report.check(
        "structure_maps_surjective",
        tower.maps_surjective.iter().all(|&s| s),
        "",
    );
    Ok(report)
}

/// Stable relative X-homology of the power deformation over one field:
/// stable image dimensions (even, odd) at each window 1..=windows, using
/// sources up to stage 2*windows - 1 and the weight truncation that leaves
/// the interrogated blocks untouched.
pub fn dichotomy_side(
    field: FieldSpec,
    v_dim: usize,
    windows: usize,
) -> Result<Vec<(usize, usize)>> {
    let a = crate::algebra::fixtures::ground_field(field);
    let top_stage = 2 * windows.max(1) - 1;
    let cap = Some(2 * (top_stage as u64 - 1).max(1));
    let xa = x_complex_with_cap(&a, None)?;

    let mut stages = Vec::new();
    for s in 1..=top_stage {
        let (ga, (_inc, ret)) = power_algebra_trunc(&a, v_dim, s)?;
        let xp = x_complex_with_cap(&ga.alg, cap)?;
        let xf = x_map(&xp, &xa, &ret)?;
        let cone = mapping_cone_super(&xp.sc, &xa.sc, &xf)?;
        stages.push((ga, xp, cone));
    }
    let reps: Vec<_> = stages.iter().map(|(_, _, c)| super_homology_reps(c)).collect();
    // induced maps between consecutive cones
    let mut maps = Vec::new();
    for s in 0..top_stage - 1 {
        let hi = &stages[s + 1];
        let lo = &stages[s];
        let sigma = crate::algebra::tower::label_restriction_map(&hi.0.alg, &lo.0.alg)?;
        let xs = x_map(&hi.1, &lo.1, &sigma)?;
        // cone chain map: diag(xs shifted, id on X(A))
        let f = field;
        let ca = &xa.sc;
        let mk = |x_rows: usize, x_cols: usize, block: &SparseMatrix, id_dim: usize| {
            let mut m = SparseMatrix::zero(x_rows + id_dim, x_cols + id_dim);
            for j in 0..x_cols {
                for (r, c) in block.col(j).iter() {
                    m.set(r, j, c.clone());
                }
            }
            for j in 0..id_dim {
                m.set(x_rows + j, x_cols + j, f.one());
            }
            m
        };
        let even = mk(
            lo.1.sc.odd_dim(),
            hi.1.sc.odd_dim(),
            &xs.odd,
            ca.even_dim(),
        );
        let odd = mk(
            lo.1.sc.even_dim(),
            hi.1.sc.even_dim(),
            &xs.even,
            ca.odd_dim(),
        );
        let cm = SuperChainMap::new(&hi.2, &lo.2, even, odd)?;
        let ind = induced_on_super_homology(&lo.2, &cm, &reps[s + 1], &reps[s])?;
        maps.push(ind);
    }
    // stable image dims per window
    let mut out = Vec::new();
    for w in 1..=windows {
        let mut even = SparseMatrix::identity(reps[w - 1].even.len(), &field);
        let mut odd = SparseMatrix::identity(reps[w - 1].odd.len(), &field);
        for s in (w - 1)..(top_stage - 1) {
            even = even.compose(&maps[s].0);
            odd = odd.compose(&maps[s].1);
        }
        out.push((rank(&even, &field), rank(&odd, &field)));
    }
    Ok(out)
}

/// The characteristic dichotomy: the stable relative X-homology of the
/// power deformation vanishes over the rationals and survives over F_p.
pub fn poincare_dichotomy_check(
    p: u32,
    v_dim: usize,
    windows: usize,
) -> Result<VerificationReport> {
    let fp = FieldSpec::prime_field(p)?;
    let mut report = VerificationReport::new("remark55", &format!("Q vs F{p}"));
    report.param("v_dim", v_dim);
    report.param("stages", windows);
    let q_side = dichotomy_side(FieldSpec::Rationals, v_dim, windows)?;
    let p_side = dichotomy_side(fp, v_dim, windows)?;
    report.table(
        "stable_dims_Q",
        q_side.iter().map(|(e, o)| format!("({e},{o})")),
    );
    report.table(
        "stable_dims_Fp",
        p_side.iter().map(|(e, o)| format!("({e},{o})")),
    );
    let q_zero = q_side.iter().all(|&(e, o)| e == 0 && o == 0);
    let p_nonzero = p_side.iter().any(|&(e, o)| e > 0 || o > 0);
    report.check("char_zero_vanishes", q_zero, "");
    report.check("char_p_survives", p_nonzero, "");
    Ok(report)
}
