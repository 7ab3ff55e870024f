//! Homotopy machinery: nil-homotopy decision with explicit cylinder
//! witnesses, power spans and their verification and extension, connections
//! certifying quasi-freeness, the tubular isomorphism onto the associated
//! graded of a deformation, section lifting through the universal model,
//! and polynomial homotopy witnesses.
//!
//! Spans are normalized so that u + T is the homomorphism: the truncated
//! identity reads
//!
//!   D_i(ab) = u(a) D_i(b) + D_i(a) u(b) + sum_{j=1}^{i-1} D_j(a) D_{i-j}(b)
//!
//! and the extension step solves -delta D_{n+1} = sum_{j} D_j cup D_{n+1-j}
//! through a connection.

use std::sync::Arc;

use crate::algebra::{
    ideal_power, q_construction, quotient_algebra, universal_map, universal_model_trunc, Algebra,
    AlgebraHom, CylinderStage, GradedAlgebra, IdealBasis, UniversalStage,
};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::forms::{cup, hochschild_delta, Cochain, CochainTarget, FormSpace};
use crate::label::Label;
use crate::linalg::{
    rank, solve, Basis, Ech, LeadRule, SparseMatrix, SparseVec, Subspace,
};

/// A truncated power span: a homomorphism u into degree zero of a graded
/// algebra together with homogeneous corrections D_1..D_n such that u + T
/// with T = sum D_i is multiplicative through degree n.
#[derive(Clone)]
pub struct SpanData {
    pub source: Arc<Algebra>,
    pub target: Arc<GradedAlgebra>,
    /// u: A -> B, landing in degree 0 (checked), multiplicative (checked)
    pub u: SparseMatrix,
    /// d[i]: A -> B, landing in degree i+1 (checked)
    pub d: Vec<SparseMatrix>,
}

impl SpanData {
    pub fn new(
        source: Arc<Algebra>,
        target: Arc<GradedAlgebra>,
        u: SparseMatrix,
        d: Vec<SparseMatrix>,
    ) -> Result<Self> {
        if !target.additive {
            return Err(Error::Validation("span target must be additively graded".into()));
        }
        let check_degree = |m: &SparseMatrix, deg: u64| -> bool {
            (0..m.cols()).all(|j| m.col(j).iter().all(|(r, _)| target.degree_of(r) == deg))
        };
        if u.cols() != source.dim() || u.rows() != target.alg.dim() || !check_degree(&u, 0) {
            return Err(Error::Validation("u must land in degree zero".into()));
        }
        for (i, m) in d.iter().enumerate() {
            if m.cols() != source.dim()
                || m.rows() != target.alg.dim()
                || !check_degree(m, (i + 1) as u64)
            {
                return Err(Error::Validation(format!(
                    "D_{} must land in degree {}",
                    i + 1,
                    i + 1
                )));
            }
        }
        // u must be a homomorphism
        for i in 0..source.dim() {
            for j in 0..source.dim() {
                let lhs = u.apply(source.mul_basis(i, j));
                let rhs = target.alg.mul(u.col(i), u.col(j));
                if lhs != rhs {
                    return Err(Error::Validation(format!(
                        "u fails multiplicativity at ({i},{j})"
                    )));
                }
            }
        }
        Ok(SpanData { source, target, u, d })
    }

    pub fn length(&self) -> usize {
        self.d.len()
    }
}

/// Location and value of a nonzero span residual.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SpanResidual {
    pub degree: usize,
    pub pair: (String, String),
}

/// Result of checking the truncated span identity degree by degree.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SpanReport {
    pub residual_dims: Vec<usize>,
    pub failures: Vec<SpanResidual>,
    pub pass: bool,
}

/// Degreewise residuals of the span identity on all basis pairs:
/// D_i(ab) - u(a) D_i(b) - D_i(a) u(b) - sum_{j=1}^{i-1} D_j(a) D_{i-j}(b).
pub fn verify_span(s: &SpanData) -> SpanReport {
    let a = &s.source;
    let b = &s.target.alg;
    let n = s.d.len();
    let mut residual_dims = vec![0usize; n];
    let mut failures = Vec::new();
    for deg in 1..=n {
        let f = a.field();
        let mut ech = Ech::new(LeadRule::Max, f);
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let prod = a.mul_basis(i, j);
                let mut r = s.d[deg - 1].apply(prod);
                r = r.sub(&b.mul(s.u.col(i), s.d[deg - 1].col(j)));
                r = r.sub(&b.mul(s.d[deg - 1].col(i), s.u.col(j)));
                for k in 1..deg {
                    r = r.sub(&b.mul(s.d[k - 1].col(i), s.d[deg - k - 1].col(j)));
                }
                if !r.is_zero() {
                    if failures.len() < 16 {
                        failures.push(SpanResidual {
                            degree: deg,
                            pair: (
                                a.basis().label(i).to_string(),
                                a.basis().label(j).to_string(),
                            ),
                        });
                    }
                    ech.insert(&r);
                }
            }
        }
        residual_dims[deg - 1] = ech.rank();
    }
    let pass = residual_dims.iter().all(|&d| d == 0);
    SpanReport { residual_dims, failures, pass }
}

/// A connection phi: A -> Omega^2 A with phi(ab) = a phi(b) + phi(a) b + da db
/// on every basis pair; its existence certifies quasi-freeness.
#[derive(Clone)]
pub struct Connection {
    pub base: Arc<Algebra>,
    pub omega2: FormSpace,
    pub phi: SparseMatrix,
}

impl Connection {
    pub fn new(base: Arc<Algebra>, omega2: FormSpace, phi: SparseMatrix) -> Result<Self> {
        let f = base.field();
        if phi.cols() != base.dim() || phi.rows() != omega2.dim() {
            return Err(Error::Validation("connection matrix shape".into()));
        }
        let cap = omega2.cap;
        let s1 = FormSpace::build(&base, 1, cap);
        for i in 0..base.dim() {
            for j in 0..base.dim() {
                let mut lhs = phi.apply(base.mul_basis(i, j));
                lhs = lhs.sub(&crate::forms::left_action(&omega2, i).apply(phi.col(j)));
                lhs = lhs.sub(&crate::forms::right_action(&omega2, j).apply(phi.col(i)));
                // da db
                let da = match s1.position(&(None, vec![i])) {
                    Some(k) => SparseVec::unit(k, &f),
                    None => SparseVec::new(),
                };
                let db = match s1.position(&(None, vec![j])) {
                    Some(k) => SparseVec::unit(k, &f),
                    None => SparseVec::new(),
                };
                let dd = crate::forms::mul_forms(&s1, &s1, &omega2, &da, &db);
                if lhs != dd {
                    return Err(Error::Validation(format!(
                        "connection equation fails at pair ({}, {})",
                        base.basis().label(i),
                        base.basis().label(j)
                    )));
                }
            }
        }
        Ok(Connection { base, omega2, phi })
    }
}

/// The linear system whose solutions are the connections of `a`: returns
/// (system, rhs, degree-two form space). Exposed so independent solvers can
/// confirm the quasi-freeness verdicts.
pub fn connection_system(a: &Arc<Algebra>) -> (SparseMatrix, SparseVec, FormSpace) {
    let f = a.field();
    let cap = a.weights().map(|_| a.max_weight());
    let omega2 = FormSpace::build(a, 2, cap);
    let s1 = FormSpace::build(a, 1, cap);
    let d = a.dim();
    let m2 = omega2.dim();
    // unknowns x[(col a, coordinate r)] flattened as a*m2 + r
    let mut sys = SparseMatrix::zero(d * d * m2, d * m2);
    let mut rhs = SparseVec::new();
    let lefts: Vec<SparseMatrix> = (0..d).map(|i| crate::forms::left_action(&omega2, i)).collect();
    let rights: Vec<SparseMatrix> = (0..d).map(|j| crate::forms::right_action(&omega2, j)).collect();
    for i in 0..d {
        for j in 0..d {
            let row_base = (i * d + j) * m2;
            // phi(e_i e_j)
            for (c, co) in a.mul_basis(i, j).iter() {
                for r in 0..m2 {
                    sys.set(row_base + r, c * m2 + r, co.clone());
                }
            }
            // - e_i . phi(e_j)
            for col in 0..m2 {
                for (r, co) in lefts[i].col(col).iter() {
                    sys.set(row_base + r, j * m2 + col, co.neg());
                }
            }
            // - phi(e_i) . e_j
            for col in 0..m2 {
                for (r, co) in rights[j].col(col).iter() {
                    sys.set(row_base + r, i * m2 + col, co.neg());
                }
            }
            // rhs: de_i de_j
            let da = match s1.position(&(None, vec![i])) {
                Some(k) => SparseVec::unit(k, &f),
                None => SparseVec::new(),
            };
            let db = match s1.position(&(None, vec![j])) {
                Some(k) => SparseVec::unit(k, &f),
                None => SparseVec::new(),
            };
            let dd = crate::forms::mul_forms(&s1, &s1, &omega2, &da, &db);
            for (r, co) in dd.iter() {
                rhs.add_entry(row_base + r, co.clone());
            }
        }
    }
    (sys, rhs, omega2)
}

/// Solve the connection equations; `Some` certifies quasi-freeness of the
/// (finite-dimensional or weight-graded) algebra, `None` reports the linear
/// system inconsistent. Graded algebras are solved in the weight-truncated
/// form model.
pub fn find_connection(a: &Arc<Algebra>) -> Result<Option<Connection>> {
    let f = a.field();
    let (sys, rhs, omega2) = connection_system(a);
    let m2 = omega2.dim();
    match solve(&sys, &rhs, &f) {
        None => Ok(None),
        Some(x) => {
            let mut phi = SparseMatrix::zero(m2, a.dim());
            for (k, c) in x.iter() {
                phi.set(k % m2, k / m2, c.clone());
            }
            Ok(Some(Connection::new(a.clone(), omega2, phi)?))
        }
    }
}

/// The connection of a truncated tensor algebra vanishing on the
/// generators: phi(v) = 0 and phi(v y) = v phi(y) + dv dy.
pub fn free_connection(tv: &GradedAlgebra) -> Result<Connection> {
    if !tv.additive {
        return Err(Error::Validation("free connection needs a graded base".into()));
    }
    let a = tv.alg.clone();
    let f = a.field();
    let cap = Some(a.max_weight());
    let omega2 = FormSpace::build(&a, 2, cap);
    let s1 = FormSpace::build(&a, 1, cap);
    let mut phi = SparseMatrix::zero(omega2.dim(), a.dim());
    // process words by increasing length
    let mut order: Vec<usize> = (0..a.dim()).collect();
    order.sort_by_key(|&i| tv.degrees[i]);
    for &i in &order {
        if tv.degrees[i] == 1 {
            continue; // phi(v) = 0
        }
        let Label::Word(letters) = a.basis().label(i).clone() else {
            return Err(Error::Validation("tensor basis label is not a word".into()));
        };
        let head = Label::Word(letters[..1].to_vec());
        let tail = Label::Word(letters[1..].to_vec());
        let hi = a.basis().position(&head).unwrap();
        let ti = a.basis().position(&tail).unwrap();
        // phi(v y) = v phi(y) + dv dy
        let mut v = crate::forms::left_action(&omega2, hi).apply(phi.col(ti));
        let dv = SparseVec::unit(s1.position(&(None, vec![hi])).unwrap(), &f);
        let dy = SparseVec::unit(s1.position(&(None, vec![ti])).unwrap(), &f);
        v = v.add(&crate::forms::mul_forms(&s1, &s1, &omega2, &dv, &dy));
        for (r, c) in v.iter() {
            phi.set(r, i, c.clone());
        }
    }
    Connection::new(a, omega2, phi)
}

/// Extend a verified span of length n to length n+1 through a connection:
/// D_{n+1} = g phi where g is the bimodule map induced by the cocycle
/// sum_j D_j cup D_{n+1-j}.
pub fn extend_span(s: &SpanData, c: &Connection) -> Result<SpanData> {
    if !Arc::ptr_eq(&c.base, &s.source) {
        return Err(Error::NoConnection("connection is for a different algebra".into()));
    }
    let report = verify_span(s);
    if !report.pass {
        return Err(Error::Validation("input span fails its identity".into()));
    }
    let n = s.d.len();
    if (n + 1) as u64 > s.target.top {
        return Err(Error::DegreeOverflow(format!(
            "extension lands in degree {}, truncation keeps {}",
            n + 1,
            s.target.top
        )));
    }
    let a = &s.source;
    let f = a.field();
    // the cocycle c2 = sum_{j=1}^{n} D_j cup D_{n+1-j}
    let mk = |m: &SparseMatrix, deg: u64| -> Cochain {
        let mut c = Cochain::new(
            a.clone(),
            1,
            CochainTarget::Graded { ga: s.target.clone(), degree: deg, u: s.u.clone() },
        );
        for i in 0..a.dim() {
            c.set(vec![i], m.col(i).clone());
        }
        c
    };
    let mut c2: Option<Cochain> = None;
    for j in 1..=n {
        let term = cup(&mk(&s.d[j - 1], j as u64), &mk(&s.d[n - j], (n + 1 - j) as u64))?;
        c2 = Some(match c2 {
            None => term,
            Some(mut acc) => {
                for (t, v) in term.values {
                    let mut w = acc.get(&t);
                    w = w.add(&v);
                    acc.values.remove(&t);
                    acc.set(t, w);
                }
                acc
            }
        });
    }
    let c2 = c2.expect("span has length >= 1");
    // the right hand side must be a cocycle
    let dc2 = hochschild_delta(&c2);
    if !dc2.is_zero() {
        return Err(Error::NotACocycle(
            "cup-sum of the span corrections is not a delta-cocycle".into(),
        ));
    }
    // g(a0 da1 da2) = u~(a0) . c2(a1, a2), then D_{n+1} = g phi
    let mut d_next = SparseMatrix::zero(s.target.alg.dim(), a.dim());
    for col in 0..a.dim() {
        let mut out = SparseVec::new();
        for (k, co) in c.phi.col(col).iter() {
            let (lead, ds) = c.omega2.word(k).clone();
            let val = c2.get(&ds);
            let acted = match lead {
                None => val,
                Some(l0) => s.target.alg.mul(s.u.col(l0), &val),
            };
            out.add_scaled(&acted, co);
        }
        for (r, co) in out.iter() {
            d_next.set(r, col, co.clone());
        }
    }
    let mut d = s.d.clone();
    d.push(d_next);
    let extended = SpanData::new(a.clone(), s.target.clone(), s.u.clone(), d)?;
    let rep = verify_span(&extended);
    if !rep.pass {
        return Err(Error::Validation(
            "extended span fails its identity; connection or span corrupted".into(),
        ));
    }
    let _ = f;
    Ok(extended)
}

/// A certified nil-homotopy at a finite stage: the factorization of (f, g)
/// through a cylinder stage.
pub struct NilWitness {
    pub stage: usize,
    pub cyl: CylinderStage,
    /// the induced homomorphism Cyl_stage(A) -> B
    pub hom: AlgebraHom,
}

/// Polynomial homotopy witness: a homomorphism into a truncated polynomial
/// extension evaluating to f at 0 and to g at 1.
pub struct PolyWitness {
    pub hom: AlgebraHom,
}

/// A homotopy witness of either kind.
pub enum HomotopyWitness {
    NilStage(NilWitness),
    Poly(PolyWitness),
}

/// Decide the one-step nil-homotopy relation between f and g: the least
/// n <= bound such that all n-fold products of differences (f-g)(a) vanish,
/// with the induced cylinder factorization as a witness.
pub fn nil_homotopic(
    f: &AlgebraHom,
    g: &AlgebraHom,
    bound: usize,
) -> Result<Option<(usize, NilWitness)>> {
    if !Arc::ptr_eq(&f.source, &g.source) || !Arc::ptr_eq(&f.target, &g.target) {
        return Err(Error::Validation("maps must share source and target".into()));
    }
    let a = &f.source;
    let b = &f.target;
    let fld = a.field();
    let delta = f.matrix.add(&g.matrix.neg());
    let delta_cols: Vec<SparseVec> = (0..a.dim()).map(|i| delta.col(i).clone()).collect();
    let mut current = Subspace::new(b.dim(), fld, delta_cols.clone());
    let mut stage = None;
    for n in 1..=bound {
        if current.dim() == 0 {
            stage = Some(n);
            break;
        }
        let mut gens = Vec::new();
        for u in current.reduced_basis() {
            for v in &delta_cols {
                let p = b.mul(&u, v);
                if !p.is_zero() {
                    gens.push(p);
                }
            }
        }
        current = Subspace::new(b.dim(), fld, gens);
    }
    let Some(n) = stage else { return Ok(None) };
    let cyl = q_construction(a, n, 2 * n)?;
    // h(a0 qa1 ... qam) = f(a0) (f-g)(a1) ... (f-g)(am)
    let mut hm = SparseMatrix::zero(b.dim(), cyl.alg.dim());
    for k in 0..cyl.alg.dim() {
        let (lead, qs) = {
            let w = cyl_word(&cyl, k);
            (w.0, w.1)
        };
        let mut acc: Option<SparseVec> = lead.map(|l| f.matrix.col(l).clone());
        for q in qs {
            let dq = delta.col(q);
            acc = Some(match acc {
                None => dq.clone(),
                Some(x) => b.mul(&x, dq),
            });
        }
        for (r, c) in acc.expect("nonempty word").iter() {
            hm.set(r, k, c.clone());
        }
    }
    let hom = AlgebraHom::new(cyl.alg.clone(), b.clone(), hm)?;
    // restrictions along the two inclusions reproduce f and g
    if hom.matrix.compose(&cyl.d0.matrix) != f.matrix
        || hom.matrix.compose(&cyl.d1.matrix) != g.matrix
    {
        return Err(Error::Validation("witness restrictions do not match".into()));
    }
    Ok(Some((n, NilWitness { stage: n, cyl, hom })))
}

fn cyl_word(cyl: &CylinderStage, k: usize) -> (Option<usize>, Vec<usize>) {
    let w = cyl.word_public(k);
    (w.0, w.1)
}

/// Check a user-supplied homotopy chain h_0 = f, h_1, ..., h_r = g by
/// deciding the one-step relation between consecutive maps.
pub fn nil_homotopic_chain(
    maps: &[AlgebraHom],
    bound: usize,
) -> Result<Option<Vec<usize>>> {
    if maps.len() < 2 {
        return Err(Error::Validation("chain needs at least two maps".into()));
    }
    let mut stages = Vec::new();
    for w in maps.windows(2) {
        match nil_homotopic(&w[0], &w[1], bound)? {
            Some((n, _)) => stages.push(n),
            None => return Ok(None),
        }
    }
    Ok(Some(stages))
}

/// Split the stage-two universal model through a connection: the section
/// s(a) = rho(a) + T(phi(a)) is a homomorphism splitting the projection,
/// where T carries a0 da1 da2 to the curvature word a0 w(a1,a2).
pub fn split_universal_two(u: &UniversalStage, conn: &Connection) -> Result<AlgebraHom> {
    if u.stage != 2 {
        return Err(Error::Validation("splitting is built at stage two".into()));
    }
    if !Arc::ptr_eq(&u.base, &conn.base) {
        return Err(Error::Validation("connection is for a different algebra".into()));
    }
    let a = &u.base;
    let f = a.field();
    let mut m = SparseMatrix::zero(u.alg.dim(), a.dim());
    for i in 0..a.dim() {
        let mut v = crate::algebra::rho_of(u, i);
        for (k, co) in conn.phi.col(i).iter() {
            let (lead, ds) = conn.omega2.word(k).clone();
            let idx = crate::algebra::pairs_index(u, lead, &[(ds[0], ds[1])]);
            if let Some(t) = idx {
                v.add_entry(t, co.clone());
            }
        }
        for (r, c) in v.iter() {
            m.set(r, i, c.clone());
        }
    }
    let s = AlgebraHom::new(a.clone(), u.alg.clone(), m)?;
    if u.proj.matrix.compose(&s.matrix) != SparseMatrix::identity(a.dim(), &f) {
        return Err(Error::Validation("splitting does not section the projection".into()));
    }
    Ok(s)
}

/// Decide whether a fibration (a homomorphism with the given linear
/// section) is a deformation: the least n <= bound with ker(f)^n = 0.
pub fn deformation_stage(
    f: &AlgebraHom,
    section: &SparseMatrix,
    bound: usize,
) -> Result<Option<usize>> {
    let fld = f.source.field();
    if f.matrix.compose(section) != SparseMatrix::identity(f.target.dim(), &fld) {
        return Err(Error::NotASection("given map is not a linear section".into()));
    }
    let ker = f.kernel();
    let ideal = IdealBasis::new(f.source.clone(), ker)?;
    for n in 1..=bound {
        if ideal_power(&ideal, n)?.dim() == 0 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Check that a deformation retraction is a strong nil-homotopy
/// equivalence on the nose: s f is one-step homotopic to the identity.
pub fn retraction_equivalence_stage(
    f: &AlgebraHom,
    s: &AlgebraHom,
    bound: usize,
) -> Result<Option<usize>> {
    let fld = f.source.field();
    if f.matrix.compose(&s.matrix) != SparseMatrix::identity(f.target.dim(), &fld) {
        return Err(Error::NotARetraction("s is not a homomorphic section of f".into()));
    }
    let g = s.compose(f)?;
    let idm = AlgebraHom::identity(&f.source);
    Ok(nil_homotopic(&g, &idm, bound)?.map(|(n, _)| n))
}

/// Truncated polynomial extension B[t]/t^{bound+1} with degree-additive
/// products dropped beyond the bound, plus evaluation at 0 and at 1.
pub struct PolyTrunc {
    pub alg: Arc<Algebra>,
    pub base: Arc<Algebra>,
    pub t_bound: usize,
    /// evaluation at 0, a homomorphism
    pub eps0: AlgebraHom,
    /// evaluation at 1 (sum of coefficients), a linear map
    pub eps1: SparseMatrix,
}

pub fn poly_trunc(b: &Arc<Algebra>, t_bound: usize) -> Result<PolyTrunc> {
    let f = b.field();
    let d = b.dim();
    let dim = d * (t_bound + 1);
    let mut labels = Vec::with_capacity(dim);
    for k in 0..=t_bound {
        for i in 0..d {
            labels.push(Label::Graded(k as u32, Box::new(b.basis().label(i).clone())));
        }
    }
    let mut table = vec![vec![SparseVec::new(); dim]; dim];
    for k in 0..=t_bound {
        for i in 0..d {
            for l in 0..=t_bound {
                for j in 0..d {
                    if k + l <= t_bound {
                        table[k * d + i][l * d + j] =
                            b.mul_basis(i, j).map_indices(|c| (k + l) * d + c);
                    }
                }
            }
        }
    }
    let alg = Arc::new(Algebra::new(f, Basis::new(labels), table, None)?);
    let mut e0 = SparseMatrix::zero(d, dim);
    let mut e1 = SparseMatrix::zero(d, dim);
    for k in 0..=t_bound {
        for i in 0..d {
            if k == 0 {
                e0.set(i, i, f.one());
            }
            e1.set(i, k * d + i, f.one());
        }
    }
    let eps0 = AlgebraHom::new(alg.clone(), b.clone(), e0)?;
    Ok(PolyTrunc { alg, base: b.clone(), t_bound, eps0, eps1: e1 })
}

/// The graded homotopy b -> b t^{deg b} witnessing that the inclusion of
/// degree zero and the projection compose to a map homotopic to the
/// identity.
pub fn graded_homotopy_witness(ga: &GradedAlgebra, pt: &PolyTrunc) -> Result<AlgebraHom> {
    if !ga.additive {
        return Err(Error::Validation("graded homotopy needs an additive grading".into()));
    }
    if !Arc::ptr_eq(&ga.alg, &pt.base) {
        return Err(Error::Validation("polynomial extension is over a different algebra".into()));
    }
    if (pt.t_bound as u64) < ga.top {
        return Err(Error::Validation("t-degree of the truncation is too small".into()));
    }
    let f = ga.alg.field();
    let d = ga.alg.dim();
    let mut m = SparseMatrix::zero(pt.alg.dim(), d);
    for i in 0..d {
        let k = ga.degrees[i] as usize;
        m.set(k * d + i, i, f.one());
    }
    AlgebraHom::new(ga.alg.clone(), pt.alg.clone(), m)
}

/// True iff h witnesses a polynomial homotopy from f to g: eps0 h = f and
/// eps1 h = g.
pub fn poly_witness_check(
    f: &AlgebraHom,
    g: &AlgebraHom,
    h: &AlgebraHom,
    pt: &PolyTrunc,
) -> bool {
    pt.eps0.matrix.compose(&h.matrix) == f.matrix && pt.eps1.compose(&h.matrix) == g.matrix
}

/// The commutative monomial model k[x, w] truncated at total degree `d`,
/// graded by the w-degree; the base variable sits in degree zero.
pub fn taylor_target(f: FieldSpec, d: usize) -> Result<GradedAlgebra> {
    if d == 0 {
        return Err(Error::Validation("taylor target needs degree >= 1".into()));
    }
    let mut monos: Vec<(usize, usize)> = Vec::new();
    for total in 1..=d {
        for b in 0..=total {
            monos.push((total - b, b));
        }
    }
    monos.sort_by_key(|&(a, b)| (b, a));
    let index: std::collections::BTreeMap<(usize, usize), usize> =
        monos.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let labels: Vec<Label> = monos
        .iter()
        .map(|&(a, b)| {
            Label::Graded(b as u32, Box::new(Label::atom(&format!("x{a}w{b}"))))
        })
        .collect();
    let dim = monos.len();
    let mut table = vec![vec![SparseVec::new(); dim]; dim];
    for (i, &(a1, b1)) in monos.iter().enumerate() {
        for (j, &(a2, b2)) in monos.iter().enumerate() {
            if a1 + a2 + b1 + b2 <= d {
                let k = index[&(a1 + a2, b1 + b2)];
                table[i][j] = SparseVec::unit(k, &f);
            }
        }
    }
    let degrees: Vec<u64> = monos.iter().map(|&(_, b)| b as u64).collect();
    let alg = Algebra::new(f, Basis::new(labels), table, None)?.with_weights(
        monos.iter().map(|&(a, b)| (a + b) as u64).collect(),
    )?;
    GradedAlgebra::new(Arc::new(alg), degrees, true)
}

/// The Taylor span of the truncated polynomial algebra on one generator:
/// u the inclusion f(x), corrections the w-components of f(x+w) - f(x),
/// with integer binomial coefficients valid in every characteristic.
pub fn taylor_span(f: FieldSpec, d: usize, stage: usize) -> Result<SpanData> {
    if stage > d {
        return Err(Error::DegreeOverflow(format!(
            "taylor span stage {stage} exceeds total degree {d}"
        )));
    }
    // the source carries the word-length grading, so its connection lives
    // in the weight-truncated form model
    let a = crate::algebra::tensor_algebra_trunc(1, d, f)?.alg;
    let target = Arc::new(taylor_target(f, d)?);
    let mono_index = |xa: usize, wb: usize| -> usize {
        target
            .alg
            .basis()
            .position(&Label::Graded(
                wb as u32,
                Box::new(Label::atom(&format!("x{xa}w{wb}"))),
            ))
            .expect("monomial in basis")
    };
    let mut u = SparseMatrix::zero(target.alg.dim(), d);
    for m in 1..=d {
        u.set(mono_index(m, 0), m - 1, f.one());
    }
    let mut ds = Vec::new();
    for i in 1..=stage {
        let mut di = SparseMatrix::zero(target.alg.dim(), d);
        for m in 1..=d {
            if i <= m {
                di.set(mono_index(m - i, i), m - 1, f.from_i64(binomial(m, i)));
            }
        }
        ds.push(di);
    }
    SpanData::new(a, target, u, ds)
}

fn binomial(n: usize, k: usize) -> i64 {
    let mut num = 1i64;
    let mut den = 1i64;
    for j in 0..k {
        num *= (n - j) as i64;
        den *= (j + 1) as i64;
    }
    num / den
}

/// The de Rham span of a truncated tensor algebra: u the inclusion into
/// degree zero of the stacked forms algebra, D_1 the class of d.
pub fn de_rham_span(
    tv: &GradedAlgebra,
    forms: &crate::forms::FormsAlgebra,
) -> Result<SpanData> {
    let f = tv.alg.field();
    let total = forms.ga.alg.dim();
    let mut u = SparseMatrix::zero(total, tv.alg.dim());
    for i in 0..tv.alg.dim() {
        u.set(forms.offsets[0] + i, i, f.one());
    }
    let s1 = &forms.spaces[1];
    let mut d1 = SparseMatrix::zero(total, tv.alg.dim());
    for i in 0..tv.alg.dim() {
        if let Some(k) = s1.position(&(None, vec![i])) {
            d1.set(forms.offsets[1] + k, i, f.one());
        }
    }
    SpanData::new(tv.alg.clone(), Arc::new(forms.ga.clone()), u, vec![d1])
}

/// The tubular isomorphism of a deformation with quasi-free total and base
/// algebras: B is identified with the stage-n truncation of the associated
/// graded of the ideal filtration.
pub struct TubularIso {
    pub graded: Arc<GradedAlgebra>,
    /// B -> graded stage, bijective, compatible with the projections
    pub iso: SparseMatrix,
    pub span: SpanData,
    /// quotient map B -> A
    pub quotient: AlgebraHom,
}

pub fn tubular_iso(b: &Arc<Algebra>, ideal: &IdealBasis, n: usize) -> Result<TubularIso> {
    if n == 0 {
        return Err(Error::Validation("tubular stage needs n >= 1".into()));
    }
    let f = b.field();
    let (a, proj) = quotient_algebra(b, ideal)?;
    let conn_b = find_connection(b)?
        .ok_or_else(|| Error::NotQuasiFree("total algebra admits no connection".into()))?;
    find_connection(&a)?
        .ok_or_else(|| Error::NotQuasiFree("base algebra admits no connection".into()))?;

    // the ideal must be nilpotent for the filtration to close
    let mut powers: Vec<Subspace> = vec![Subspace::full(b.dim(), f), ideal.sub.clone()];
    loop {
        let last = powers.last().unwrap();
        if last.dim() == 0 {
            break;
        }
        let mut gens = Vec::new();
        for u in last.reduced_basis() {
            for v in ideal.sub.reduced_basis() {
                let p = b.mul(&u, &v);
                if !p.is_zero() {
                    gens.push(p);
                }
            }
        }
        let next = Subspace::new(b.dim(), f, gens);
        if next.dim() == last.dim() {
            return Err(Error::Validation("ideal powers do not vanish".into()));
        }
        powers.push(next);
    }

    // homomorphic splitting s: A -> B, corrected order by order
    let mut s = SparseMatrix::zero(b.dim(), a.dim());
    for (col, l) in a.basis().labels().iter().enumerate() {
        let amb = b.basis().position(l).expect("quotient label from ambient");
        s.set(amb, col, f.one());
    }
    let conn_a = find_connection(&a)?.expect("checked above");
    let mut k = 1usize;
    loop {
        // curvature c(a, a') = s(aa') - s(a)s(a'), valued in I^k
        let mut curv: Vec<Vec<SparseVec>> = vec![vec![SparseVec::new(); a.dim()]; a.dim()];
        let mut zero = true;
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                let mut c = s.apply(a.mul_basis(i, j));
                c = c.sub(&b.mul(s.col(i), s.col(j)));
                if !c.is_zero() {
                    zero = false;
                }
                if k < powers.len() && !powers[k].contains(&c) {
                    return Err(Error::Validation(
                        "splitting curvature escapes the expected filtration step".into(),
                    ));
                }
                curv[i][j] = c;
            }
        }
        if zero {
            break;
        }
        if k + 1 >= powers.len() + 4 {
            return Err(Error::Validation("splitting correction did not terminate".into()));
        }
        // correction xi = -(g phi) with g(a0 da1 da2) = s(a0) c(a1,a2)
        let mut xi = SparseMatrix::zero(b.dim(), a.dim());
        for col in 0..a.dim() {
            let mut out = SparseVec::new();
            for (w, co) in conn_a.phi.col(col).iter() {
                let (lead, ds) = conn_a.omega2.word(w).clone();
                let val = &curv[ds[0]][ds[1]];
                let acted = match lead {
                    None => val.clone(),
                    Some(l0) => b.mul(s.col(l0), val),
                };
                out.add_scaled(&acted, co);
            }
            for (r, c) in out.iter() {
                xi.set(r, col, c.neg());
            }
        }
        s = s.add(&xi);
        // s must stay a linear section of the projection
        if proj.matrix.compose(&s) != SparseMatrix::identity(a.dim(), &f) {
            return Err(Error::Validation("correction broke the section property".into()));
        }
        k += 1;
    }
    let s_hom = AlgebraHom::new(a.clone(), b.clone(), s.clone())?;

    // associated graded algebra at stage n: components I^m/I^{m+1}, m < n
    let depth = powers.len() - 1; // I^depth = 0
    let stages = n.min(depth);
    let mut reps: Vec<Vec<SparseVec>> = Vec::new(); // component reps in B
    for m in 0..stages {
        let mut ech = Ech::new(LeadRule::Max, f);
        if m + 1 < powers.len() {
            for v in powers[m + 1].reduced_basis() {
                ech.insert(&v);
            }
        }
        let mut comp = Vec::new();
        for v in powers[m].reduced_basis() {
            if ech.insert(&v).is_some() {
                comp.push(v);
            }
        }
        reps.push(comp);
    }
    let comp_dims: Vec<usize> = reps.iter().map(|r| r.len()).collect();
    let total: usize = comp_dims.iter().sum();
    let mut offsets = Vec::new();
    {
        let mut t = 0;
        for &cd in &comp_dims {
            offsets.push(t);
            t += cd;
        }
    }
    // expressors per component: write an element of I^m in component
    // coordinates modulo I^{m+1}
    let express = |m: usize, v: &SparseVec| -> Option<SparseVec> {
        let mut ex = ComponentExpressor::new(f);
        if m + 1 < powers.len() {
            for w in powers[m + 1].reduced_basis() {
                ex.insert(&w, None);
            }
        }
        for (t, r) in reps[m].iter().enumerate() {
            ex.insert(r, Some(t));
        }
        ex.express(v)
    };
    let mut labels = Vec::with_capacity(total);
    let mut degrees = Vec::with_capacity(total);
    for (m, comp) in reps.iter().enumerate() {
        for t in 0..comp.len() {
            labels.push(Label::Graded(m as u32, Box::new(Label::atom(&format!("g{t}")))));
            degrees.push(m as u64);
        }
    }
    let mut table = vec![vec![SparseVec::new(); total]; total];
    for (m1, c1) in reps.iter().enumerate() {
        for (m2, c2) in reps.iter().enumerate() {
            if m1 + m2 >= stages {
                continue;
            }
            for (i, r1) in c1.iter().enumerate() {
                for (j, r2) in c2.iter().enumerate() {
                    let p = b.mul(r1, r2);
                    let coords = express(m1 + m2, &p).ok_or_else(|| {
                        Error::Validation("graded product escapes its component".into())
                    })?;
                    table[offsets[m1] + i][offsets[m2] + j] =
                        coords.map_indices(|t| offsets[m1 + m2] + t);
                }
            }
        }
    }
    let g_alg = Arc::new(Algebra::new(f, Basis::new(labels), table, None)?);
    let graded = Arc::new(GradedAlgebra::new(g_alg, degrees, true)?);

    // stage-0 component coordinates are classes of the representatives of
    // I^0/I^1 = A; express the identification A -> comp0
    let mut a_to_comp0 = SparseMatrix::zero(comp_dims[0], a.dim());
    for col in 0..a.dim() {
        let coords = express(0, s_hom.matrix.col(col)).ok_or_else(|| {
            Error::Validation("section image escapes degree zero".into())
        })?;
        for (r, c) in coords.iter() {
            a_to_comp0.set(r, col, c.clone());
        }
    }
    // u: B -> A -> comp0 inside the graded algebra
    let mut u = SparseMatrix::zero(total, b.dim());
    {
        let via = a_to_comp0.compose(&proj.matrix);
        for j in 0..b.dim() {
            for (r, c) in via.col(j).iter() {
                u.set(offsets[0] + r, j, c.clone());
            }
        }
    }
    // T_1 = p_1 - u: the degree-one component of x - s(proj(x))
    let mut d1 = SparseMatrix::zero(total, b.dim());
    if stages >= 2 {
        for j in 0..b.dim() {
            let x = SparseVec::unit(j, &f);
            let lift = s.compose(&proj.matrix).apply(&x);
            let diff = x.sub(&lift); // lies in I
            let coords = express(1, &diff).ok_or_else(|| {
                Error::Validation("difference escapes the ideal".into())
            })?;
            for (r, c) in coords.iter() {
                d1.set(offsets[1] + r, j, c.clone());
            }
        }
    }
    let mut span = SpanData::new(b.clone(), graded.clone(), u, vec![d1])?;
    let rep = verify_span(&span);
    if !rep.pass {
        return Err(Error::Validation("initial tubular span fails".into()));
    }
    while span.length() + 1 < stages {
        span = extend_span(&span, &conn_b)?;
    }
    // the isomorphism u + T
    let mut iso = span.u.clone();
    for dmat in &span.d {
        iso = iso.add(dmat);
    }
    if total != b.dim() || rank(&iso, &f) != total {
        return Err(Error::TruncationTooSmall(format!(
            "tubular map is not bijective at stage {n}"
        )));
    }
    // compatibility: collapsing the graded onto degree zero and back to A
    // recovers the quotient map
    {
        let mut collapse = SparseMatrix::zero(a.dim(), total);
        // invert a_to_comp0 (it is square and invertible since s sections proj)
        let inv = invert(&a_to_comp0, &f).ok_or_else(|| {
            Error::Validation("degree-zero identification is not invertible".into())
        })?;
        for j in 0..comp_dims[0] {
            for (r, c) in inv.col(j).iter() {
                collapse.set(r, offsets[0] + j, c.clone());
            }
        }
        if collapse.compose(&iso) != proj.matrix {
            return Err(Error::Validation("tubular map is incompatible with the projection".into()));
        }
    }
    // T induces the identity on each I^m/I^{m+1}
    for m in 1..stages {
        for (t, r) in reps[m].iter().enumerate() {
            let img = iso.apply(r);
            // component-m part must be the class of r, i.e. the unit vector t
            let mut comp_part = SparseVec::new();
            for (k, c) in img.iter() {
                if k >= offsets[m] && k < offsets[m] + comp_dims[m] {
                    comp_part.add_entry(k - offsets[m], c.clone());
                }
            }
            if comp_part != SparseVec::unit(t, &f) {
                return Err(Error::Validation(format!(
                    "tubular map does not induce the identity on layer {m}"
                )));
            }
        }
    }
    let _ = conn_b;
    Ok(TubularIso { graded, iso, span, quotient: proj })
}

fn invert(m: &SparseMatrix, f: &FieldSpec) -> Option<SparseMatrix> {
    let n = m.rows();
    if m.cols() != n {
        return None;
    }
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        cols.push(solve(m, &SparseVec::unit(i, f), f)?);
    }
    Some(SparseMatrix::from_cols(n, cols))
}

/// Exact expression of vectors in tagged generators modulo untagged ones.
struct ComponentExpressor {
    field: FieldSpec,
    rows: Vec<(SparseVec, SparseVec)>,
}

impl ComponentExpressor {
    fn new(field: FieldSpec) -> Self {
        ComponentExpressor { field, rows: Vec::new() }
    }

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
            self.rows
                .sort_by_key(|(r, _)| std::cmp::Reverse(r.max_index().unwrap()));
        }
    }

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

/// Lift a linear section through the universal model: for a fibration
/// f: A -> B with linear section t, produce the linear section of U_n(f)
/// built through the even-forms splitting, and verify U_n(f) t^ = id.
pub struct LiftedSection {
    pub ua: UniversalStage,
    pub ub: UniversalStage,
    pub uf: AlgebraHom,
    pub t_hat: SparseMatrix,
}

pub fn lift_section(
    f: &AlgebraHom,
    t: &SparseMatrix,
    n: usize,
) -> Result<LiftedSection> {
    let fld = f.source.field();
    if f.matrix.compose(t) != SparseMatrix::identity(f.target.dim(), &fld) {
        return Err(Error::NotASection("t is not a linear section of f".into()));
    }
    let a = &f.source;
    let b = &f.target;
    let ua = universal_model_trunc(a, n, 2 * n)?;
    let ub = universal_model_trunc(b, n, 2 * n)?;
    let uf = universal_map(&ua, &ub, f)?;
    let mut t_hat = SparseMatrix::zero(ua.alg.dim(), ub.alg.dim());
    for k in 0..ub.alg.dim() {
        let w = crate::algebra::stage_word(&ub, k);
        let mut acc: Option<SparseVec> = w.0.map(|l| {
            // rho(t(e_l)) in U_n(A)
            let tv = t.col(l);
            let mut v = SparseVec::new();
            for (bi, c) in tv.iter() {
                v.add_entry(crate::algebra::rho_index(&ua, bi), c.clone());
            }
            v
        });
        for (p, q) in w.1 {
            let tp = t.col(p);
            let tq = t.col(q);
            // omega(tp, tq) + rho(omega_t(p, q)) = rho(tp) rho(tq) - rho(t(pq))
            let mut factor = SparseVec::new();
            for (bi, c) in tp.iter() {
                let x = SparseVec::unit(crate::algebra::rho_index(&ua, bi), &fld);
                let y = crate::algebra::mul_by_rho(&ua, &x, tq);
                factor.add_scaled(&y, c);
            }
            let tpq = t.apply(b.mul_basis(p, q));
            for (bi, c) in tpq.iter() {
                factor.add_entry(crate::algebra::rho_index(&ua, bi), c.neg());
            }
            acc = Some(match acc {
                None => factor,
                Some(x) => crate::algebra::stage_mul(&ua, &x, &factor),
            });
        }
        for (r, c) in acc.expect("nonempty word").iter() {
            t_hat.set(r, k, c.clone());
        }
    }
    if uf.matrix.compose(&t_hat) != SparseMatrix::identity(ub.alg.dim(), &fld) {
        return Err(Error::Validation("lifted section does not split the lifted map".into()));
    }
    Ok(LiftedSection { ua, ub, uf, t_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures;

    #[test]
    fn quasifree_verdicts() {
        let f = FieldSpec::Rationals;
        assert!(find_connection(&fixtures::ground_field(f)).unwrap().is_some());
        assert!(find_connection(&fixtures::k_times_k(f)).unwrap().is_some());
        assert!(find_connection(&fixtures::dual_numbers(f)).unwrap().is_none());
        assert!(find_connection(&fixtures::truncated_poly(f, 2)).unwrap().is_none());
    }

    #[test]
    fn nil_homotopy_of_equal_maps() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let idm = AlgebraHom::identity(&k);
        let (n, w) = nil_homotopic(&idm, &idm, 3).unwrap().unwrap();
        assert_eq!(n, 1);
        assert_eq!(w.cyl.alg.dim(), 1);
    }

    #[test]
    fn nil_homotopy_of_distinct_idempotent_images_fails() {
        // f(e) = e, g(e) = 0 into k: the difference spans k and never dies
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let idm = AlgebraHom::identity(&k);
        let zero = AlgebraHom::new(k.clone(), k.clone(), SparseMatrix::zero(1, 1)).unwrap();
        assert!(nil_homotopic(&idm, &zero, 6).unwrap().is_none());
    }

    #[test]
    fn unit_vs_deformed_unit_detected_at_stage_two() {
        // the two homomorphisms out of the algebra on one generator x with
        // (x-1)^2 = 0 (the dual numbers, x = u + eps) sending x to 1 and to
        // 1 + eps; the difference spans eps and squares to zero
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        // f: u -> u, eps -> 0 (evaluation at 1); g = identity (x -> u + eps)
        let mut mf = SparseMatrix::zero(2, 2);
        mf.set(0, 0, f.one());
        let hf = AlgebraHom::new(d.clone(), d.clone(), mf).unwrap();
        let hg = AlgebraHom::identity(&d);
        let (n, w) = nil_homotopic(&hf, &hg, 5).unwrap().unwrap();
        assert_eq!(n, 2);
        assert_eq!(w.hom.matrix.compose(&w.cyl.d0.matrix), hf.matrix);
        assert_eq!(w.hom.matrix.compose(&w.cyl.d1.matrix), hg.matrix);
    }

    #[test]
    fn split_universal_stage_two() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let conn = find_connection(&k).unwrap().unwrap();
        let u = universal_model_trunc(&k, 2, 4).unwrap();
        let s = split_universal_two(&u, &conn).unwrap();
        assert_eq!(u.proj.matrix.compose(&s.matrix), SparseMatrix::identity(1, &f));
    }

    #[test]
    fn retraction_equivalence_on_universal_model() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let conn = find_connection(&k).unwrap().unwrap();
        let u = universal_model_trunc(&k, 2, 4).unwrap();
        let s = split_universal_two(&u, &conn).unwrap();
        let stage = retraction_equivalence_stage(&u.proj, &s, 4).unwrap();
        assert!(stage.is_some());
    }

    #[test]
    fn homotopy_chain_of_consecutive_pairs() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        let mut mf = SparseMatrix::zero(2, 2);
        mf.set(0, 0, f.one());
        let ev1 = AlgebraHom::new(d.clone(), d.clone(), mf).unwrap();
        let idm = AlgebraHom::identity(&d);
        let stages =
            nil_homotopic_chain(&[ev1.clone(), idm.clone(), ev1], 5).unwrap().unwrap();
        assert_eq!(stages, vec![2, 2]);
    }

    #[test]
    fn tubular_iso_zero_ideal_is_identity_shaped() {
        let f = FieldSpec::Rationals;
        let k = fixtures::k_times_k(f);
        let zero = IdealBasis::new(k.clone(), Subspace::zero(2, f)).unwrap();
        let t = tubular_iso(&k, &zero, 1).unwrap();
        assert_eq!(t.graded.alg.dim(), 2);
        assert_eq!(rank(&t.iso, &f), 2);
    }

    #[test]
    fn tubular_iso_of_power_stage() {
        // P_k(k) at stage 3, against the kernel of its retraction: the
        // algebra is graded, so it agrees with its associated graded
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let (ga, (_inc, ret)) = crate::algebra::power_algebra_trunc(&k, 1, 3).unwrap();
        let ker = ret.kernel();
        let ideal = IdealBasis::new(ga.alg.clone(), ker).unwrap();
        let t = tubular_iso(&ga.alg, &ideal, 3).unwrap();
        assert_eq!(t.graded.alg.dim(), ga.alg.dim());
        assert_eq!(rank(&t.iso, &f), ga.alg.dim());
    }

    #[test]
    fn lift_section_deformation_kernel_power_vanishes() {
        // the fold of the dual numbers onto the ground field is a
        // deformation (square-zero kernel); the kernel of the lifted map is
        // nilpotent of order at most the square of the stage
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        let k = fixtures::ground_field(f);
        let mut pm = SparseMatrix::zero(1, 2);
        pm.set(0, 0, f.one());
        let p = AlgebraHom::new(d.clone(), k.clone(), pm).unwrap();
        let mut t = SparseMatrix::zero(2, 1);
        t.set(0, 0, f.one());
        assert_eq!(deformation_stage(&p, &t, 4).unwrap(), Some(2));
        let lifted = lift_section(&p, &t, 2).unwrap();
        let ker = lifted.uf.kernel();
        let ideal = IdealBasis::new(lifted.ua.alg.clone(), ker).unwrap();
        assert_eq!(ideal_power(&ideal, 4).unwrap().dim(), 0);
    }

    #[test]
    fn poly_witness_of_identity() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let pt = poly_trunc(&k, 2).unwrap();
        // h(b) = b t^0
        let mut hm = SparseMatrix::zero(pt.alg.dim(), 1);
        hm.set(0, 0, f.one());
        let h = AlgebraHom::new(k.clone(), pt.alg.clone(), hm).unwrap();
        let idm = AlgebraHom::identity(&k);
        assert!(poly_witness_check(&idm, &idm, &h, &pt));
    }

    #[test]
    fn graded_homotopy_on_tensor_algebra() {
        let f = FieldSpec::Rationals;
        let tv = crate::algebra::tensor_algebra_trunc(1, 3, f).unwrap();
        let pt = poly_trunc(&tv.alg, 3).unwrap();
        let h = graded_homotopy_witness(&tv, &pt).unwrap();
        // eps0 h = (inclusion of degree 0) (projection): zero here since the
        // tensor algebra has no degree-0 part
        let e0h = pt.eps0.matrix.compose(&h.matrix);
        assert!(e0h.is_zero());
        // eps1 h = identity
        assert_eq!(pt.eps1.compose(&h.matrix), SparseMatrix::identity(3, &f));
        // h witnesses (inclusion of degree zero) (projection) ~ identity;
        // here the degree-zero part is empty, so f is the zero map
        let zero = AlgebraHom::new(
            tv.alg.clone(),
            tv.alg.clone(),
            SparseMatrix::zero(3, 3),
        )
        .unwrap();
        let idm = AlgebraHom::identity(&tv.alg);
        assert!(poly_witness_check(&zero, &idm, &h, &pt));
        // corrupted witness fails
        assert!(!poly_witness_check(&idm, &idm, &h, &pt));
    }

    #[test]
    fn lift_section_of_identity() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        let idm = AlgebraHom::identity(&d);
        let t = SparseMatrix::identity(2, &f);
        let lifted = lift_section(&idm, &t, 2).unwrap();
        assert_eq!(lifted.t_hat, SparseMatrix::identity(lifted.ub.alg.dim(), &f));
    }

    #[test]
    fn taylor_span_verifies_and_extends() {
        let f = FieldSpec::Rationals;
        // the full span through degree 3 passes
        let s = taylor_span(f, 3, 3).unwrap();
        let rep = verify_span(&s);
        assert!(rep.pass, "{rep:?}");
        // extending the degree-1 truncation reproduces the Taylor
        // corrections coefficientwise
        let s1 = taylor_span(f, 3, 1).unwrap();
        let conn = find_connection(&s1.source).unwrap().expect("graded model splits");
        let s2 = extend_span(&s1, &conn).unwrap();
        let full = taylor_span(f, 3, 2).unwrap();
        assert_eq!(s2.d[1], full.d[1]);
        // a perturbed correction is located by the verifier
        let mut bad = s.clone();
        bad.d[0].set(0, 2, f.one());
        let rep = verify_span(&bad);
        assert!(!rep.pass);
        assert!(!rep.failures.is_empty());
    }

    #[test]
    fn zero_span_extends_by_zero() {
        let f = FieldSpec::Rationals;
        let s1 = taylor_span(f, 3, 1).unwrap();
        let zero = SpanData::new(
            s1.source.clone(),
            s1.target.clone(),
            s1.u.clone(),
            vec![SparseMatrix::zero(s1.target.alg.dim(), s1.source.dim())],
        )
        .unwrap();
        let conn = find_connection(&zero.source).unwrap().unwrap();
        let ext = extend_span(&zero, &conn).unwrap();
        assert!(ext.d[1].is_zero());
    }

    #[test]
    fn lift_section_of_projection() {
        let f = FieldSpec::Rationals;
        let kk = fixtures::k_times_k(f);
        let k = fixtures::ground_field(f);
        let mut pm = SparseMatrix::zero(1, 2);
        pm.set(0, 0, f.one());
        let p = AlgebraHom::new(kk.clone(), k.clone(), pm).unwrap();
        let mut t = SparseMatrix::zero(2, 1);
        t.set(0, 0, f.one());
        let lifted = lift_section(&p, &t, 2).unwrap();
        let idb = SparseMatrix::identity(lifted.ub.alg.dim(), &f);
        assert_eq!(lifted.uf.matrix.compose(&lifted.t_hat), idb);
    }
}
