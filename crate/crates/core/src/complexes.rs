//! Z/2-graded supercomplexes, bounded mixed complexes, the X-complex and
//! its theta-truncated refinement, mapping cones, negative cyclic homology
//! of bounded mixed complexes, and tower limits with stabilization
//! detection.

use std::sync::Arc;

use crate::algebra::{Algebra, AlgebraHom};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::forms::{
    b_op, connes_b_op, natural_quotient, FormSpace, NaturalQuotient,
};
use crate::linalg::{kernel_basis, rank, Basis, Ech, LeadRule, SparseMatrix, SparseVec};

/// A Z/2-graded complex: d_eo: even -> odd and d_oe: odd -> even with both
/// composites zero (checked at construction).
#[derive(Clone, Debug)]
pub struct SuperComplex {
    pub field: FieldSpec,
    pub d_eo: SparseMatrix,
    pub d_oe: SparseMatrix,
}

impl SuperComplex {
    pub fn new(field: FieldSpec, d_eo: SparseMatrix, d_oe: SparseMatrix) -> Result<Self> {
        if d_eo.cols() != d_oe.rows() || d_oe.cols() != d_eo.rows() {
            return Err(Error::Validation("supercomplex dimension mismatch".into()));
        }
        if !d_oe.compose(&d_eo).is_zero() || !d_eo.compose(&d_oe).is_zero() {
            return Err(Error::Validation("supercomplex differential does not square to zero".into()));
        }
        Ok(SuperComplex { field, d_eo, d_oe })
    }

    pub fn even_dim(&self) -> usize {
        self.d_eo.cols()
    }

    pub fn odd_dim(&self) -> usize {
        self.d_oe.cols()
    }
}

/// Homology dimensions (H_even, H_odd) by exact rank computations.
pub fn homology_super(c: &SuperComplex) -> (usize, usize) {
    let f = c.field;
    let r_eo = rank(&c.d_eo, &f);
    let r_oe = rank(&c.d_oe, &f);
    let h_even = c.even_dim() - r_eo - r_oe;
    let h_odd = c.odd_dim() - r_oe - r_eo;
    (h_even, h_odd)
}

/// A map of supercomplexes, checked to commute with the differentials.
#[derive(Clone, Debug)]
pub struct SuperChainMap {
    pub even: SparseMatrix,
    pub odd: SparseMatrix,
}

impl SuperChainMap {
    pub fn new(
        src: &SuperComplex,
        dst: &SuperComplex,
        even: SparseMatrix,
        odd: SparseMatrix,
    ) -> Result<Self> {
        if odd.compose(&src.d_eo) != dst.d_eo.compose(&even)
            || even.compose(&src.d_oe) != dst.d_oe.compose(&odd)
        {
            return Err(Error::Validation("not a chain map of supercomplexes".into()));
        }
        Ok(SuperChainMap { even, odd })
    }
}

/// Mapping cone of a supercomplex map: even = X_odd + Y_even,
/// odd = X_even + Y_odd, with the usual sign on the shifted part.
pub fn mapping_cone_super(
    src: &SuperComplex,
    dst: &SuperComplex,
    f: &SuperChainMap,
) -> Result<SuperComplex> {
    let fd = src.field;
    let (xe, xo) = (src.even_dim(), src.odd_dim());
    let (ye, yo) = (dst.even_dim(), dst.odd_dim());
    // cone_even = X_odd + Y_even -> cone_odd = X_even + Y_odd
    let mut eo = SparseMatrix::zero(xe + yo, xo + ye);
    embed(&mut eo, &src.d_oe.neg(), 0, 0);
    embed(&mut eo, &f.odd, xe, 0);
    embed(&mut eo, &dst.d_eo, xe, xo);
    // cone_odd = X_even + Y_odd -> cone_even = X_odd + Y_even
    let mut oe = SparseMatrix::zero(xo + ye, xe + yo);
    embed(&mut oe, &src.d_eo.neg(), 0, 0);
    embed(&mut oe, &f.even, xo, 0);
    embed(&mut oe, &dst.d_oe, xo, xe);
    SuperComplex::new(fd, eo, oe)
}

fn embed(target: &mut SparseMatrix, block: &SparseMatrix, row_off: usize, col_off: usize) {
    for j in 0..block.cols() {
        for (i, c) in block.col(j).iter() {
            target.set(i + row_off, j + col_off, c.clone());
        }
    }
}

/// A bounded mixed complex M_0..M_N with b lowering and B raising degree;
/// b^2 = B^2 = bB + Bb = 0 checked at construction.
#[derive(Clone, Debug)]
pub struct MixedComplex {
    pub field: FieldSpec,
    pub dims: Vec<usize>,
    /// b[i]: M_{i+1} -> M_i
    pub b: Vec<SparseMatrix>,
    /// bb[i]: M_i -> M_{i+1}
    pub bb: Vec<SparseMatrix>,
}

impl MixedComplex {
    pub fn new(
        field: FieldSpec,
        dims: Vec<usize>,
        b: Vec<SparseMatrix>,
        bb: Vec<SparseMatrix>,
    ) -> Result<Self> {
        let n = dims.len();
        if b.len() + 1 != n || bb.len() + 1 != n {
            return Err(Error::Validation("mixed complex map counts mismatch".into()));
        }
        for i in 0..n - 1 {
            if b[i].rows() != dims[i] || b[i].cols() != dims[i + 1] {
                return Err(Error::Validation(format!("b[{i}] shape mismatch")));
            }
            if bb[i].rows() != dims[i + 1] || bb[i].cols() != dims[i] {
                return Err(Error::Validation(format!("B[{i}] shape mismatch")));
            }
        }
        for i in 0..n.saturating_sub(2) {
            if !b[i].compose(&b[i + 1]).is_zero() {
                return Err(Error::Validation(format!("b^2 != 0 at {i}")));
            }
            if !bb[i + 1].compose(&bb[i]).is_zero() {
                return Err(Error::Validation(format!("B^2 != 0 at {i}")));
            }
        }
        for i in 0..n {
            // bB + Bb = 0 as maps M_i -> M_i, keeping whichever legs exist;
            // at the top degree the lone leg B b must vanish on its own for
            // the truncated totalization to be a complex
            let mut anti = SparseMatrix::zero(dims[i], dims[i]);
            if i + 1 < n {
                anti = anti.add(&b[i].compose(&bb[i]));
            }
            if i >= 1 {
                anti = anti.add(&bb[i - 1].compose(&b[i - 1]));
            }
            if !anti.is_zero() {
                return Err(Error::Validation(format!("bB + Bb != 0 at {i}")));
            }
        }
        Ok(MixedComplex { field, dims, b, bb })
    }

    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }
}

/// A degree-wise map of bounded mixed complexes commuting with b and B.
#[derive(Clone, Debug)]
pub struct MixedChainMap {
    pub components: Vec<SparseMatrix>,
}

impl MixedChainMap {
    pub fn new(
        src: &MixedComplex,
        dst: &MixedComplex,
        components: Vec<SparseMatrix>,
    ) -> Result<Self> {
        if components.len() != src.dims.len() || src.dims.len() != dst.dims.len() {
            return Err(Error::Validation("mixed chain map component count".into()));
        }
        for i in 0..src.dims.len() - 1 {
            if components[i].compose(&src.b[i]) != dst.b[i].compose(&components[i + 1]) {
                return Err(Error::Validation(format!("map does not commute with b at {i}")));
            }
            if components[i + 1].compose(&src.bb[i]) != dst.bb[i].compose(&components[i]) {
                return Err(Error::Validation(format!("map does not commute with B at {i}")));
            }
        }
        Ok(MixedChainMap { components })
    }
}

/// A bounded chain complex, presented by its differentials d[k]: C_k -> C_{k-1}.
#[derive(Clone, Debug)]
pub struct TotalComplex {
    pub field: FieldSpec,
    pub dims: Vec<usize>,
    /// d[k-1]: C_k -> C_{k-1} for k = 1..dims.len()-1
    pub d: Vec<SparseMatrix>,
}

impl TotalComplex {
    pub fn new(field: FieldSpec, dims: Vec<usize>, d: Vec<SparseMatrix>) -> Result<Self> {
        if d.len() + 1 != dims.len() {
            return Err(Error::Validation("total complex shape mismatch".into()));
        }
        for k in 0..d.len() {
            if d[k].rows() != dims[k] || d[k].cols() != dims[k + 1] {
                return Err(Error::Validation(format!("d[{}] shape mismatch", k + 1)));
            }
        }
        for k in 0..d.len().saturating_sub(1) {
            if !d[k].compose(&d[k + 1]).is_zero() {
                return Err(Error::Validation(format!("d^2 != 0 at degree {}", k + 2)));
            }
        }
        Ok(TotalComplex { field, dims, d })
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    /// Homology dimension in degree k.
    pub fn homology_dim(&self, k: usize) -> usize {
        if k >= self.dims.len() {
            return 0;
        }
        let f = self.field;
        let cycles = if k == 0 {
            self.dims[0]
        } else {
            kernel_basis(&self.d[k - 1], &f).dim()
        };
        let boundaries = if k + 1 < self.dims.len() { rank(&self.d[k], &f) } else { 0 };
        cycles - boundaries
    }
}

/// Negative-cyclic totalization of a bounded mixed complex: degree-k chains
/// are the direct sum of M_{k+2j} over j >= 0, with differential b + B
/// (B feeding the next u-slot).
pub fn cn_total(m: &MixedComplex) -> Result<TotalComplex> {
    let n = m.dims.len();
    let f = m.field;
    // slots(k) = list of degrees k, k+2, ... <= top
    let slots = |k: usize| -> Vec<usize> {
        (k..n).step_by(2).collect()
    };
    let offsets = |k: usize| -> Vec<usize> {
        let mut off = Vec::new();
        let mut t = 0;
        for s in slots(k) {
            off.push(t);
            t += m.dims[s];
        }
        off
    };
    let total_dim = |k: usize| -> usize { slots(k).iter().map(|&s| m.dims[s]).sum() };
    let mut dims = Vec::new();
    let mut ds = Vec::new();
    for k in 0..n {
        dims.push(total_dim(k));
    }
    for k in 1..n {
        let src_slots = slots(k);
        let dst_slots = slots(k - 1);
        let src_off = offsets(k);
        let dst_off = offsets(k - 1);
        let mut d = SparseMatrix::zero(total_dim(k - 1), total_dim(k));
        for (j, &deg) in src_slots.iter().enumerate() {
            // b: M_deg -> M_{deg-1}, same u-slot j
            if deg >= 1 {
                let b = &m.b[deg - 1];
                debug_assert_eq!(dst_slots[j], deg - 1);
                for col in 0..b.cols() {
                    for (r, c) in b.col(col).iter() {
                        d.set(dst_off[j] + r, src_off[j] + col, c.clone());
                    }
                }
            }
            // B: M_deg -> M_{deg+1}, u-slot j+1 of the target degree
            if deg + 1 < n {
                let bb = &m.bb[deg];
                debug_assert_eq!(dst_slots[j + 1], deg + 1);
                for col in 0..bb.cols() {
                    for (r, c) in bb.col(col).iter() {
                        d.set(dst_off[j + 1] + r, src_off[j] + col, c.clone());
                    }
                }
            }
        }
        ds.push(d);
    }
    TotalComplex::new(f, dims, ds)
}

/// HN_n of a bounded mixed complex.
pub fn hn_of_mixed(m: &MixedComplex, n: usize) -> Result<usize> {
    let t = cn_total(m)?;
    Ok(t.homology_dim(n))
}

/// Totalize a mixed chain map along `cn_total`.
pub fn cn_total_map(
    src: &MixedComplex,
    dst: &MixedComplex,
    f: &MixedChainMap,
) -> Vec<SparseMatrix> {
    let n = src.dims.len();
    let mut out = Vec::new();
    for k in 0..n {
        let slots: Vec<usize> = (k..n).step_by(2).collect();
        let src_dims: Vec<usize> = slots.iter().map(|&s| src.dims[s]).collect();
        let dst_dims: Vec<usize> = slots.iter().map(|&s| dst.dims[s]).collect();
        let mut m = SparseMatrix::zero(dst_dims.iter().sum(), src_dims.iter().sum());
        let mut so = 0;
        let mut to = 0;
        for (j, &s) in slots.iter().enumerate() {
            let comp = &f.components[s];
            for col in 0..comp.cols() {
                for (r, c) in comp.col(col).iter() {
                    m.set(to + r, so + col, c.clone());
                }
            }
            so += src_dims[j];
            to += dst_dims[j];
        }
        out.push(m);
    }
    out
}

/// Mapping cone of a chain map of bounded complexes:
/// Cone_k = X_{k-1} + Y_k with d(x, y) = (-dx, f(x) + dy).
pub fn mapping_cone_total(
    src: &TotalComplex,
    dst: &TotalComplex,
    f: &[SparseMatrix],
) -> Result<TotalComplex> {
    let fld = src.field;
    let n = src.dims.len().max(dst.dims.len()) + 1;
    let xdim = |k: usize| src.dim(k);
    let ydim = |k: usize| dst.dim(k);
    let mut dims = Vec::new();
    for k in 0..n {
        dims.push(if k == 0 { ydim(0) } else { xdim(k - 1) + ydim(k) });
    }
    let mut ds = Vec::new();
    for k in 1..n {
        let rows = dims[k - 1];
        let cols = dims[k];
        let mut d = SparseMatrix::zero(rows, cols);
        // X_{k-1} block
        if xdim(k - 1) > 0 {
            if k >= 2 && xdim(k - 2) > 0 {
                embed(&mut d, &src.d[k - 2].neg(), 0, 0);
            }
            // connector f_{k-1}: X_{k-1} -> Y_{k-1}
            if ydim(k - 1) > 0 && k - 1 < f.len() {
                let row_off = if k == 1 { 0 } else { xdim(k - 2) };
                embed(&mut d, &f[k - 1], row_off, 0);
            }
        }
        // Y_k block
        if ydim(k) > 0 {
            let row_off = if k == 1 { 0 } else { xdim(k - 2) };
            embed(&mut d, &dst.d[k - 1], row_off, xdim(k - 1));
        }
        ds.push(d);
    }
    TotalComplex::new(fld, dims, ds)
}

/// Homology of a bounded complex in degree k with explicit cycle
/// representatives, for computing induced maps.
pub struct HomologyReps {
    pub degree: usize,
    pub reps: Vec<SparseVec>,
}

pub fn homology_reps(t: &TotalComplex, k: usize) -> HomologyReps {
    let f = t.field;
    if k >= t.dims.len() {
        return HomologyReps { degree: k, reps: vec![] };
    }
    let mut ech = Ech::new(LeadRule::Max, f);
    if k + 1 < t.dims.len() {
        for j in 0..t.d[k].cols() {
            ech.insert(t.d[k].col(j));
        }
    }
    let cycles: Vec<SparseVec> = if k == 0 {
        (0..t.dims[0]).map(|i| SparseVec::unit(i, &f)).collect()
    } else {
        kernel_basis(&t.d[k - 1], &f).reduced_basis()
    };
    let mut reps = Vec::new();
    for z in cycles {
        if ech.insert(&z).is_some() {
            reps.push(z);
        }
    }
    HomologyReps { degree: k, reps }
}

/// Exact expression of vectors as combinations of tagged generators; used
/// to write homology classes in terms of chosen representatives.
struct Expressor {
    field: FieldSpec,
    rows: Vec<(SparseVec, SparseVec)>,
}

impl Expressor {
    fn new(field: FieldSpec) -> Self {
        Expressor { field, rows: Vec::new() }
    }

    /// Insert a generator; `tag` is its index among tagged generators, or
    /// None for untagged (quotient-by) generators.
    fn insert(&mut self, v: &SparseVec, tag: Option<usize>) {
        let mut v = v.clone();
        let mut t = match tag {
            Some(i) => SparseVec::unit(i, &self.field),
            None => SparseVec::new(),
        };
        for (row, rt) in &self.rows {
            let lead = row.max_index().unwrap();
            if let Some(c) = v.get(lead).cloned() {
                let l = row.get(lead).cloned().unwrap();
                let co = c.div(&l).neg();
                v.add_scaled(row, &co);
                t.add_scaled(rt, &co);
            }
        }
        if !v.is_zero() {
            self.rows.push((v, t));
            self.rows.sort_by_key(|(r, _)| std::cmp::Reverse(r.max_index().unwrap()));
        }
    }

    /// Express v in the tagged generators modulo the untagged ones.
    fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        let mut v = v.clone();
        let mut t = SparseVec::new();
        for (row, rt) in &self.rows {
            let lead = row.max_index().unwrap();
            if let Some(c) = v.get(lead).cloned() {
                let l = row.get(lead).cloned().unwrap();
                let co = c.div(&l).neg();
                v.add_scaled(row, &co);
                t.add_scaled(rt, &co);
            }
        }
        if v.is_zero() {
            Some(t.neg())
        } else {
            None
        }
    }
}

/// Matrix of the map induced on degree-k homology by a chain map `f`
/// (given degreewise), with respect to the representative bases.
pub fn induced_on_homology(
    src: &TotalComplex,
    dst: &TotalComplex,
    f: &[SparseMatrix],
    k: usize,
    src_reps: &HomologyReps,
    dst_reps: &HomologyReps,
) -> Result<SparseMatrix> {
    let fld = src.field;
    let mut ex = Expressor::new(fld);
    if k + 1 < dst.dims.len() {
        for j in 0..dst.d[k].cols() {
            ex.insert(dst.d[k].col(j), None);
        }
    }
    for (i, r) in dst_reps.reps.iter().enumerate() {
        ex.insert(r, Some(i));
    }
    let mut m = SparseMatrix::zero(dst_reps.reps.len(), src_reps.reps.len());
    for (j, r) in src_reps.reps.iter().enumerate() {
        let img = if k < f.len() { f[k].apply(r) } else { SparseVec::new() };
        let coords = ex.express(&img).ok_or_else(|| {
            Error::Validation("image of a homology class is not a class".into())
        })?;
        for (i, c) in coords.iter() {
            m.set(i, j, c.clone());
        }
    }
    Ok(m)
}

/// The X-complex of an algebra: even part A, odd part the natural quotient
/// of degree-one forms, differentials the class of d and the induced b.
pub struct XComplex {
    pub base: Arc<Algebra>,
    pub sc: SuperComplex,
    pub omega1: FormSpace,
    pub nq: NaturalQuotient,
    pub odd_basis: Basis,
}

pub fn x_complex(a: &Arc<Algebra>) -> Result<XComplex> {
    x_complex_with_cap(a, None)
}

/// X-complex with the odd part truncated at a weight cap. For a graded base
/// the differentials preserve the weight, so the capped complex is the sum
/// of the weight blocks up to the cap; stable-image computations that only
/// interrogate those blocks are exact.
pub fn x_complex_with_cap(a: &Arc<Algebra>, cap: Option<u64>) -> Result<XComplex> {
    let f = a.field();
    if let Some(c) = cap {
        if c < a.max_weight() {
            return Err(Error::Validation(
                "weight cap below the top algebra weight would truncate the even part".into(),
            ));
        }
    }
    let s1 = FormSpace::build(a, 1, cap);
    let nq = natural_quotient(&s1);
    let qdim = nq.dim();
    // d_eo: A -> odd, a |-> class of da
    let mut d_eo = SparseMatrix::zero(qdim, a.dim());
    for j in 0..a.dim() {
        if let Some(k) = s1.position(&(None, vec![j])) {
            let v = nq.proj.apply(&SparseVec::unit(k, &f));
            for (r, c) in v.iter() {
                d_eo.set(r, j, c.clone());
            }
        }
    }
    // induced b on the quotient: check well-definedness on the commutator
    // span, then map representatives
    let s0 = FormSpace::build(a, 0, None);
    let b1 = b_op(&s1, &s0);
    // degree-0 coordinates -> A coordinates
    let mut e0 = SparseMatrix::zero(a.dim(), s0.dim());
    for k in 0..s0.dim() {
        e0.set(s0.word(k).0.unwrap(), k, f.one());
    }
    let b_to_a = e0.compose(&b1);
    for ai in 0..a.dim() {
        let left = crate::forms::left_action(&s1, ai);
        let right = crate::forms::right_action(&s1, ai);
        for w in 0..s1.dim() {
            let x = SparseVec::unit(w, &f);
            let comm = left.apply(&x).sub(&right.apply(&x));
            if !b_to_a.apply(&comm).is_zero() {
                return Err(Error::Validation(
                    "b is not well-defined on the natural quotient".into(),
                ));
            }
        }
    }
    let mut d_oe = SparseMatrix::zero(a.dim(), qdim);
    for (col, l) in nq.basis.labels().iter().enumerate() {
        let amb = s1.basis.position(l).expect("quotient label from ambient");
        let v = b_to_a.apply(&SparseVec::unit(amb, &f));
        for (r, c) in v.iter() {
            d_oe.set(r, col, c.clone());
        }
    }
    let sc = SuperComplex::new(f, d_eo, d_oe)?;
    Ok(XComplex { base: a.clone(), sc, omega1: s1, nq: nq.clone(), odd_basis: nq.basis })
}

/// The X-complex viewed as a two-term mixed complex (M_0 = even, M_1 = odd,
/// B the class of d and b the induced boundary).
pub fn x_as_mixed(x: &XComplex) -> Result<MixedComplex> {
    MixedComplex::new(
        x.base.field(),
        vec![x.sc.even_dim(), x.sc.odd_dim()],
        vec![x.sc.d_oe.clone()],
        vec![x.sc.d_eo.clone()],
    )
}

/// Functorial map X(f) for a homomorphism f, as matrices on the even and
/// odd parts.
pub fn x_map(src: &XComplex, dst: &XComplex, f: &AlgebraHom) -> Result<SuperChainMap> {
    let fld = f.source.field();
    // odd part: omega^1(f) then project; defined on representatives
    let mut odd = SparseMatrix::zero(dst.nq.dim(), src.nq.dim());
    for (col, l) in src.odd_basis.labels().iter().enumerate() {
        let amb = src.omega1.basis.position(l).expect("representative");
        let (lead, ds) = src.omega1.word(amb).clone();
        let img_a1 = f.apply(&SparseVec::unit(ds[0], &fld));
        let mut img = SparseVec::new();
        match lead {
            None => {
                for (b1, c1) in img_a1.iter() {
                    if let Some(k) = dst.omega1.position(&(None, vec![b1])) {
                        img.add_entry(k, c1.clone());
                    }
                }
            }
            Some(l0) => {
                let img_l0 = f.apply(&SparseVec::unit(l0, &fld));
                for (b0, c0) in img_l0.iter() {
                    for (b1, c1) in img_a1.iter() {
                        if let Some(k) = dst.omega1.position(&(Some(b0), vec![b1])) {
                            img.add_entry(k, c0.mul(c1));
                        }
                    }
                }
            }
        }
        let v = dst.nq.proj.apply(&img);
        for (r, c) in v.iter() {
            odd.set(r, col, c.clone());
        }
    }
    SuperChainMap::new(&src.sc, &dst.sc, f.matrix.clone(), odd)
}

/// One stage of the theta-truncated forms complex: degrees 0..n-1 of the
/// forms plus the natural quotient in degree n, differential B + b, graded
/// by parity. Stage 1 coincides with the X-complex.
pub struct ThetaStage {
    pub sc: SuperComplex,
    pub degree_dims: Vec<usize>,
}

pub fn theta_omega_stage(a: &Arc<Algebra>, n: usize) -> Result<ThetaStage> {
    if n == 0 {
        return Err(Error::Validation("theta stage needs n >= 1".into()));
    }
    let f = a.field();
    let spaces: Vec<FormSpace> = (0..=n).map(|r| FormSpace::build(a, r, None)).collect();
    let nq = natural_quotient(&spaces[n]);
    // dims of the summands 0..n-1 and the quotient on top
    let mut dims: Vec<usize> = (0..n).map(|r| spaces[r].dim()).collect();
    dims.push(nq.dim());
    // b must descend to the quotient in degree n
    let bn = b_op(&spaces[n], &spaces[n - 1]);
    for ai in 0..a.dim() {
        let left = crate::forms::left_action(&spaces[n], ai);
        let right = crate::forms::right_action(&spaces[n], ai);
        for w in 0..spaces[n].dim() {
            let x = SparseVec::unit(w, &f);
            let comm = left.apply(&x).sub(&right.apply(&x));
            if !bn.apply(&comm).is_zero() {
                return Err(Error::Validation(
                    "b is not well-defined on the top quotient of the theta stage".into(),
                ));
            }
        }
    }
    // representative matrix: quotient coords -> ambient degree-n coords
    let mut rep = SparseMatrix::zero(spaces[n].dim(), nq.dim());
    for (col, l) in nq.basis.labels().iter().enumerate() {
        let amb = spaces[n].basis.position(l).expect("representative");
        rep.set(amb, col, f.one());
    }

    // block offsets split by parity
    let even_slots: Vec<usize> = (0..=n).filter(|r| r % 2 == 0).collect();
    let odd_slots: Vec<usize> = (0..=n).filter(|r| r % 2 == 1).collect();
    let slot_dim = |r: usize| -> usize { if r == n { nq.dim() } else { spaces[r].dim() } };
    let offset_in = |slots: &[usize], r: usize| -> usize {
        slots.iter().take_while(|&&s| s != r).map(|&s| slot_dim(s)).sum()
    };
    let even_dim: usize = even_slots.iter().map(|&r| slot_dim(r)).sum();
    let odd_dim: usize = odd_slots.iter().map(|&r| slot_dim(r)).sum();

    let mut d_eo = SparseMatrix::zero(odd_dim, even_dim);
    let mut d_oe = SparseMatrix::zero(even_dim, odd_dim);
    let mut add_block = |from_r: usize, to_r: usize, m: &SparseMatrix| {
        let (dst, src_off, dst_off, from_even) = if from_r % 2 == 0 {
            (&mut d_eo, offset_in(&even_slots, from_r), offset_in(&odd_slots, to_r), true)
        } else {
            (&mut d_oe, offset_in(&odd_slots, from_r), offset_in(&even_slots, to_r), false)
        };
        let _ = from_even;
        embed(dst, m, dst_off, src_off);
    };
    for r in 0..=n {
        // B-part upward
        if r < n {
            let up = connes_b_op(&spaces[r], &spaces[r + 1]);
            let up = if r + 1 == n { nq.proj.compose(&up) } else { up };
            add_block(r, r + 1, &up);
        }
        // b-part downward
        if r >= 1 {
            let down = b_op(&spaces[r], &spaces[r - 1]);
            let down = if r == n { down.compose(&rep) } else { down };
            add_block(r, r - 1, &down);
        }
    }
    let sc = SuperComplex::new(f, d_eo, d_oe)?;
    Ok(ThetaStage { sc, degree_dims: dims })
}

/// Cycle representatives of the two homology parities of a supercomplex.
pub struct SuperHomologyReps {
    pub even: Vec<SparseVec>,
    pub odd: Vec<SparseVec>,
}

pub fn super_homology_reps(c: &SuperComplex) -> SuperHomologyReps {
    let f = c.field;
    let part = |d_out: &SparseMatrix, d_in: &SparseMatrix| -> Vec<SparseVec> {
        let mut ech = Ech::new(LeadRule::Max, f);
        for j in 0..d_in.cols() {
            ech.insert(d_in.col(j));
        }
        let mut reps = Vec::new();
        for z in kernel_basis(d_out, &f).reduced_basis() {
            if ech.insert(&z).is_some() {
                reps.push(z);
            }
        }
        reps
    };
    SuperHomologyReps {
        even: part(&c.d_eo, &c.d_oe),
        odd: part(&c.d_oe, &c.d_eo),
    }
}

/// Matrices (even, odd) of the maps induced on super homology.
pub fn induced_on_super_homology(
    dst: &SuperComplex,
    f: &SuperChainMap,
    src_reps: &SuperHomologyReps,
    dst_reps: &SuperHomologyReps,
) -> Result<(SparseMatrix, SparseMatrix)> {
    let fld = dst.field;
    let part = |boundary: &SparseMatrix,
                comp: &SparseMatrix,
                s_reps: &Vec<SparseVec>,
                d_reps: &Vec<SparseVec>|
     -> Result<SparseMatrix> {
        let mut ex = Expressor::new(fld);
        for j in 0..boundary.cols() {
            ex.insert(boundary.col(j), None);
        }
        for (i, r) in d_reps.iter().enumerate() {
            ex.insert(r, Some(i));
        }
        let mut m = SparseMatrix::zero(d_reps.len(), s_reps.len());
        for (j, r) in s_reps.iter().enumerate() {
            let img = comp.apply(r);
            let coords = ex.express(&img).ok_or_else(|| {
                Error::Validation("induced image is not a homology class".into())
            })?;
            for (i, c) in coords.iter() {
                m.set(i, j, c.clone());
            }
        }
        Ok(m)
    };
    Ok((
        part(&dst.d_oe, &f.even, &src_reps.even, &dst_reps.even)?,
        part(&dst.d_eo, &f.odd, &src_reps.odd, &dst_reps.odd)?,
    ))
}

/// Limits of a tower of finite-dimensional spaces V_1 <- V_2 <- ... given by
/// the maps sigma[i]: V_{i+2} -> V_{i+1}: for each stage the dimension of
/// the stable image, a flag telling whether images stabilized before the
/// top, and the automatic vanishing of lim^1 for finite-dimensional stages.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TowerLimits {
    pub stable_image_dims: Vec<usize>,
    pub stabilized: Vec<bool>,
    pub lim1_zero: bool,
}

pub fn tower_limits(dims: &[usize], maps: &[SparseMatrix], field: &FieldSpec) -> TowerLimits {
    let n = dims.len();
    assert_eq!(maps.len() + 1, n);
    let mut stable = Vec::new();
    let mut flags = Vec::new();
    for k in 0..n {
        // image of V_n -> V_k and of V_{n-1} -> V_k
        let mut comp = SparseMatrix::identity(dims[k], field);
        let mut last_rank = dims[k];
        let mut prev_rank = None;
        for i in k..n - 1 {
            comp = comp.compose(&maps[i]);
            let r = rank(&comp, field);
            prev_rank = Some(last_rank);
            last_rank = r;
        }
        stable.push(last_rank);
        flags.push(match prev_rank {
            None => true,
            Some(p) => p == last_rank,
        });
    }
    TowerLimits { stable_image_dims: stable, stabilized: flags, lim1_zero: true }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures;

    #[test]
    fn x_of_ground_field() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let x = x_complex(&k).unwrap();
        assert_eq!(x.sc.even_dim(), 1);
        assert_eq!(x.sc.odd_dim(), 0);
        assert_eq!(homology_super(&x.sc), (1, 0));
    }

    #[test]
    fn x_of_zero_algebra() {
        let f = FieldSpec::Rationals;
        let z = fixtures::zero_algebra(f, 0);
        let x = x_complex(&z).unwrap();
        assert_eq!(homology_super(&x.sc), (0, 0));
    }

    #[test]
    fn x_of_dual_numbers_over_q() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        let x = x_complex(&d).unwrap();
        // differentials square to zero by construction; dims recorded
        assert_eq!(x.sc.even_dim(), 2);
        let (he, ho) = homology_super(&x.sc);
        let euler = x.sc.even_dim() as i64 - x.sc.odd_dim() as i64;
        assert_eq!(euler, he as i64 - ho as i64);
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        let x = x_complex(&d).unwrap();
        let idm = AlgebraHom::identity(&d);
        let cm = x_map(&x, &x, &idm).unwrap();
        let cone = mapping_cone_super(&x.sc, &x.sc, &cm).unwrap();
        assert_eq!(homology_super(&cone), (0, 0));
    }

    #[test]
    fn cone_of_zero_map_is_shifted_sum() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let x = x_complex(&k).unwrap();
        let zero_map = SuperChainMap {
            even: SparseMatrix::zero(x.sc.even_dim(), x.sc.even_dim()),
            odd: SparseMatrix::zero(x.sc.odd_dim(), x.sc.odd_dim()),
        };
        let cone = mapping_cone_super(&x.sc, &x.sc, &zero_map).unwrap();
        let (he, ho) = homology_super(&cone);
        // H(cone) = H(X)[1] + H(X): (1,0) shifted gives (0,1), plus (1,0)
        assert_eq!((he, ho), (1, 1));
    }

    #[test]
    fn theta_stage_one_is_x() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        let x = x_complex(&d).unwrap();
        let t = theta_omega_stage(&d, 1).unwrap();
        assert_eq!(t.sc.d_eo, x.sc.d_eo);
        assert_eq!(t.sc.d_oe, x.sc.d_oe);
    }

    #[test]
    fn theta_stages_square_to_zero_on_panel() {
        let f = FieldSpec::Rationals;
        for a in [
            fixtures::ground_field(f),
            fixtures::dual_numbers(f),
            fixtures::k_times_k(f),
        ] {
            for n in 1..=3 {
                // construction fails if (B+b)^2 != 0
                theta_omega_stage(&a, n).unwrap();
            }
        }
    }

    #[test]
    fn hn_of_two_term_mixed() {
        let f = FieldSpec::Rationals;
        // zero differentials, dims (2, 3): HN_1 = 3, HN_0 = 2, HN_2 = 0
        let m = MixedComplex::new(
            f,
            vec![2, 3],
            vec![SparseMatrix::zero(2, 3)],
            vec![SparseMatrix::zero(3, 2)],
        )
        .unwrap();
        assert_eq!(hn_of_mixed(&m, 1).unwrap(), 3);
        assert_eq!(hn_of_mixed(&m, 0).unwrap(), 2);
        assert_eq!(hn_of_mixed(&m, 2).unwrap(), 0);
        assert_eq!(hn_of_mixed(&m, 3).unwrap(), 0);
    }

    #[test]
    fn tower_limit_examples() {
        let f = FieldSpec::Rationals;
        // constant tower
        let dims = vec![2, 2, 2];
        let maps = vec![SparseMatrix::identity(2, &f), SparseMatrix::identity(2, &f)];
        let t = tower_limits(&dims, &maps, &f);
        assert_eq!(t.stable_image_dims, vec![2, 2, 2]);
        assert!(t.stabilized.iter().all(|&x| x));
        assert!(t.lim1_zero);
        // zero-map tower
        let maps = vec![SparseMatrix::zero(2, 2), SparseMatrix::zero(2, 2)];
        let t = tower_limits(&dims, &maps, &f);
        assert_eq!(t.stable_image_dims[0], 0);
    }
}
