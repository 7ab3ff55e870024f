//! Structure-constant algebras and the truncated constructions built from
//! them: unitalization, ideals and powers, quotients, truncated tensor
//! algebras, free products, power algebras, cylinder stages, universal
//! models and towers.

mod cylinder;
mod io;
pub(crate) mod tower;
mod universal;
mod words;

pub mod fixtures;

pub use cylinder::{cylinder_structure_map, q_construction, CylinderStage};
pub use io::{load_algebra, parse_algebra, AlgebraDoc};
pub use tower::{tower_of, Tower, TowerKind};
pub use universal::{
    mul_by_rho, pairs_index, project_tensor_word, rho_index, rho_of, rho_section, stage_mul,
    stage_word, universal_map, universal_model_trunc, UniversalStage,
};
pub use words::{free_product_trunc, power_algebra_trunc, tensor_algebra_trunc, FreeProductSummand};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::label::Label;
use crate::linalg::{quotient_basis, Basis, SparseMatrix, SparseVec, Subspace};

/// A finite-dimensional associative algebra given by structure constants.
/// Associativity is checked at construction; `unital` marks a designated
/// unit basis element when present. `weights` is an optional additive
/// grading on basis labels (word length, generator degree).
#[derive(Clone, Debug)]
pub struct Algebra {
    field: FieldSpec,
    basis: Basis,
    table: Vec<Vec<SparseVec>>,
    unital: Option<usize>,
    weights: Option<Vec<u64>>,
}

impl Algebra {
    pub fn new(
        field: FieldSpec,
        basis: Basis,
        table: Vec<Vec<SparseVec>>,
        unital: Option<usize>,
    ) -> Result<Self> {
        let n = basis.dim();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!(
                "table shape {}x{{varies}} does not match dim {n}",
                table.len()
            )));
        }
        for row in &table {
            for v in row {
                if let Some(m) = v.max_index() {
                    if m >= n {
                        return Err(Error::Validation(format!(
                            "structure constant index {m} out of range (dim {n})"
                        )));
                    }
                }
            }
        }
        let a = Algebra { field, basis, table, unital, weights: None };
        a.check_associativity()?;
        if let Some(u) = unital {
            a.check_unit(u)?;
        }
        Ok(a)
    }

    /// Attach an additive grading; every structure constant must land in the
    /// expected total weight.
    pub fn with_weights(mut self, weights: Vec<u64>) -> Result<Self> {
        let n = self.dim();
        if weights.len() != n {
            return Err(Error::Validation("weights length mismatch".into()));
        }
        for i in 0..n {
            for j in 0..n {
                for (l, _) in self.table[i][j].iter() {
                    if weights[l] != weights[i] + weights[j] {
                        return Err(Error::Validation(format!(
                            "grading not additive at product {i}*{j} -> {l}"
                        )));
                    }
                }
            }
        }
        self.weights = Some(weights);
        Ok(self)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut lhs = SparseVec::new();
                    for (l, c) in self.table[i][j].iter() {
                        lhs.add_scaled(&self.table[l][k], c);
                    }
                    let mut rhs = SparseVec::new();
                    for (m, c) in self.table[j][k].iter() {
                        rhs.add_scaled(&self.table[i][m], c);
                    }
                    if lhs != rhs {
                        return Err(Error::Validation(format!(
                            "associativity fails at triple ({}, {}, {})",
                            self.basis.label(i),
                            self.basis.label(j),
                            self.basis.label(k)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_unit(&self, u: usize) -> Result<()> {
        let n = self.dim();
        if u >= n {
            return Err(Error::Validation("unit index out of range".into()));
        }
        for i in 0..n {
            let ei = SparseVec::unit(i, &self.field);
            if self.table[u][i] != ei || self.table[i][u] != ei {
                return Err(Error::Validation(format!(
                    "designated unit does not act as identity on {}",
                    self.basis.label(i)
                )));
            }
        }
        Ok(())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn unital(&self) -> Option<usize> {
        self.unital
    }

    pub fn weights(&self) -> Option<&[u64]> {
        self.weights.as_deref()
    }

    pub fn weight_of(&self, i: usize) -> u64 {
        self.weights.as_ref().map(|w| w[i]).unwrap_or(0)
    }

    pub fn max_weight(&self) -> u64 {
        self.weights
            .as_ref()
            .and_then(|w| w.iter().copied().max())
            .unwrap_or(0)
    }

    /// Product of basis elements i and j.
    pub fn mul_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i][j]
    }

    /// Product of two sparse elements.
    pub fn mul(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                out.add_scaled(&self.table[i][j], &a.mul(b));
            }
        }
        out
    }

    /// Left multiplication by a basis element.
    pub fn mul_basis_vec(&self, i: usize, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, b) in y.iter() {
            out.add_scaled(&self.table[i][j], b);
        }
        out
    }

    /// Right multiplication by a basis element.
    pub fn mul_vec_basis(&self, x: &SparseVec, j: usize) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, a) in x.iter() {
            out.add_scaled(&self.table[i][j], a);
        }
        out
    }
}

/// An algebra homomorphism, stored as the matrix of images of basis vectors;
/// multiplicativity on all basis pairs is checked at construction.
#[derive(Clone, Debug)]
pub struct AlgebraHom {
    pub source: Arc<Algebra>,
    pub target: Arc<Algebra>,
    pub matrix: SparseMatrix,
}

impl AlgebraHom {
    pub fn new(source: Arc<Algebra>, target: Arc<Algebra>, matrix: SparseMatrix) -> Result<Self> {
        if matrix.cols() != source.dim() || matrix.rows() != target.dim() {
            return Err(Error::Validation(format!(
                "hom matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.dim(),
                source.dim()
            )));
        }
        let h = AlgebraHom { source, target, matrix };
        h.check_multiplicative()?;
        Ok(h)
    }

    fn check_multiplicative(&self) -> Result<()> {
        let n = self.source.dim();
        for i in 0..n {
            for j in 0..n {
                let lhs = self.matrix.apply(self.source.mul_basis(i, j));
                let rhs = self
                    .target
                    .mul(self.matrix.col(i), self.matrix.col(j));
                if lhs != rhs {
                    return Err(Error::Validation(format!(
                        "homomorphism fails multiplicativity at pair ({}, {})",
                        self.source.basis().label(i),
                        self.source.basis().label(j)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, x: &SparseVec) -> SparseVec {
        self.matrix.apply(x)
    }

    pub fn compose(&self, first: &AlgebraHom) -> Result<AlgebraHom> {
        if first.target.dim() != self.source.dim() {
            return Err(Error::Validation("compose dimension mismatch".into()));
        }
        AlgebraHom::new(
            first.source.clone(),
            self.target.clone(),
            self.matrix.compose(&first.matrix),
        )
    }

    pub fn identity(a: &Arc<Algebra>) -> AlgebraHom {
        AlgebraHom {
            source: a.clone(),
            target: a.clone(),
            matrix: SparseMatrix::identity(a.dim(), &a.field()),
        }
    }

    pub fn is_surjective(&self) -> bool {
        crate::linalg::rank(&self.matrix, &self.target.field()) == self.target.dim()
    }

    pub fn is_bijective(&self) -> bool {
        self.source.dim() == self.target.dim() && self.is_surjective()
    }

    pub fn kernel(&self) -> Subspace {
        crate::linalg::kernel_basis(&self.matrix, &self.source.field())
    }
}

/// A two-sided ideal of an algebra, stored as a subspace and validated to be
/// closed under multiplication by every basis element of the parent.
#[derive(Clone, Debug)]
pub struct IdealBasis {
    pub parent: Arc<Algebra>,
    pub sub: Subspace,
}

impl IdealBasis {
    pub fn new(parent: Arc<Algebra>, sub: Subspace) -> Result<Self> {
        if sub.ambient_dim() != parent.dim() {
            return Err(Error::Validation("ideal not in parent space".into()));
        }
        for g in sub.reduced_basis() {
            for i in 0..parent.dim() {
                if !sub.contains(&parent.mul_vec_basis(&g, i)) {
                    return Err(Error::Validation(format!(
                        "not closed under right multiplication by {}",
                        parent.basis().label(i)
                    )));
                }
                if !sub.contains(&parent.mul_basis_vec(i, &g)) {
                    return Err(Error::Validation(format!(
                        "not closed under left multiplication by {}",
                        parent.basis().label(i)
                    )));
                }
            }
        }
        Ok(IdealBasis { parent, sub })
    }

    pub fn dim(&self) -> usize {
        self.sub.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.sub.dim() == 0
    }
}

/// n-th power of an ideal: the span of all n-fold products of ideal
/// elements; for an ideal this is again an ideal.
pub fn ideal_power(i: &IdealBasis, n: usize) -> Result<IdealBasis> {
    if n == 0 {
        return Err(Error::Validation("ideal power needs n >= 1".into()));
    }
    let parent = &i.parent;
    let base = i.sub.reduced_basis();
    let mut current = i.sub.clone();
    for _ in 1..n {
        let mut gens = Vec::new();
        for u in current.reduced_basis() {
            for v in &base {
                let p = parent.mul(&u, v);
                if !p.is_zero() {
                    gens.push(p);
                }
            }
        }
        current = Subspace::new(parent.dim(), parent.field(), gens);
    }
    IdealBasis::new(parent.clone(), current)
}

/// Span of all n-fold products of the whole algebra with itself.
/// Returns the smallest n <= bound with A^n = 0, or None.
pub fn is_nilpotent(a: &Arc<Algebra>, bound: usize) -> Option<usize> {
    let mut current = Subspace::full(a.dim(), a.field());
    for n in 1..=bound {
        if current.dim() == 0 {
            return Some(n);
        }
        let mut gens = Vec::new();
        for u in current.reduced_basis() {
            for j in 0..a.dim() {
                let p = a.mul_vec_basis(&u, j);
                if !p.is_zero() {
                    gens.push(p);
                }
            }
        }
        current = Subspace::new(a.dim(), a.field(), gens);
    }
    None
}

/// Adjoin a formal unit: the result has the old basis plus a `Unit` label at
/// index 0 acting as identity; an existing unit becomes an ordinary
/// idempotent.
pub fn unitalize(a: &Arc<Algebra>) -> Result<Arc<Algebra>> {
    let n = a.dim();
    let f = a.field();
    let mut labels = vec![Label::Unit];
    labels.extend(a.basis().labels().iter().cloned());
    let basis = Basis::new(labels);
    let dim = n + 1;
    let mut table = vec![vec![SparseVec::new(); dim]; dim];
    for i in 0..dim {
        table[0][i] = SparseVec::unit(i, &f);
        table[i][0] = SparseVec::unit(i, &f);
    }
    for i in 0..n {
        for j in 0..n {
            table[i + 1][j + 1] = a.mul_basis(i, j).map_indices(|k| k + 1);
        }
    }
    Ok(Arc::new(Algebra::new(f, basis, table, Some(0))?))
}

/// Quotient by a two-sided ideal, with the projection homomorphism.
pub fn quotient_algebra(a: &Arc<Algebra>, i: &IdealBasis) -> Result<(Arc<Algebra>, AlgebraHom)> {
    let f = a.field();
    let (qbasis, proj) = quotient_basis(a.basis(), &i.sub, &f);
    let qdim = qbasis.dim();
    // representatives: quotient label -> ambient index
    let mut reps = Vec::with_capacity(qdim);
    for l in qbasis.labels() {
        reps.push(a.basis().position(l).expect("quotient label from ambient"));
    }
    let mut table = vec![vec![SparseVec::new(); qdim]; qdim];
    for (x, &rx) in reps.iter().enumerate() {
        for (y, &ry) in reps.iter().enumerate() {
            table[x][y] = proj.apply(a.mul_basis(rx, ry));
        }
    }
    // the unit class survives only if it projects onto a single basis label
    let unital = a.unital().and_then(|u| {
        let img = proj.apply(&SparseVec::unit(u, &f));
        let mut it = img.iter();
        match (it.next(), it.next()) {
            (Some((k, c)), None) if c.is_one() => Some(k),
            _ => None,
        }
    });
    let mut q = Algebra::new(f, qbasis, table, unital)?;
    // a homogeneous ideal leaves the grading intact on the representatives
    if a.weights().is_some() {
        let w: Vec<u64> = reps.iter().map(|&r| a.weight_of(r)).collect();
        if let Ok(graded) = q.clone().with_weights(w) {
            q = graded;
        }
    }
    let q = Arc::new(q);
    let hom = AlgebraHom::new(a.clone(), q.clone(), proj)?;
    Ok((q, hom))
}

/// An algebra together with a degree assignment on its basis. `additive`
/// records whether the degree is honestly multiplicative (tensor and power
/// constructions) or only a vector-space decomposition (free products,
/// where boundary letters merge).
#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    pub alg: Arc<Algebra>,
    pub degrees: Vec<u64>,
    pub top: u64,
    pub additive: bool,
}

impl GradedAlgebra {
    pub fn new(alg: Arc<Algebra>, degrees: Vec<u64>, additive: bool) -> Result<Self> {
        if degrees.len() != alg.dim() {
            return Err(Error::Validation("degree vector length mismatch".into()));
        }
        if additive {
            for i in 0..alg.dim() {
                for j in 0..alg.dim() {
                    for (l, _) in alg.mul_basis(i, j).iter() {
                        if degrees[l] != degrees[i] + degrees[j] {
                            return Err(Error::Validation(format!(
                                "grading not additive at ({i},{j})"
                            )));
                        }
                    }
                }
            }
        }
        let top = degrees.iter().copied().max().unwrap_or(0);
        Ok(GradedAlgebra { alg, degrees, top, additive })
    }

    pub fn component(&self, d: u64) -> Vec<usize> {
        (0..self.alg.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    pub fn component_dim(&self, d: u64) -> usize {
        self.degrees.iter().filter(|&&x| x == d).count()
    }

    pub fn degree_of(&self, i: usize) -> u64 {
        self.degrees[i]
    }

    /// Projection killing all components of degree >= cut, as a linear map.
    pub fn truncation_matrix(&self, cut: u64) -> SparseMatrix {
        let n = self.alg.dim();
        let f = self.alg.field();
        let mut m = SparseMatrix::zero(n, n);
        for i in 0..n {
            if self.degrees[i] < cut {
                m.set(i, i, f.one());
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures;

    #[test]
    fn unitalize_examples() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let ku = unitalize(&k).unwrap();
        assert_eq!(ku.dim(), 2);
        assert_eq!(ku.unital(), Some(0));

        let z = fixtures::zero_algebra(f, 0);
        let zu = unitalize(&z).unwrap();
        assert_eq!(zu.dim(), 1);

        let d = fixtures::dual_numbers(f);
        let du = unitalize(&d).unwrap();
        assert_eq!(du.dim(), 3);
        // the old unit is now an ordinary idempotent, distinct from the new one
        let old = SparseVec::unit(1, &f);
        assert_eq!(du.mul(&old, &old), old);
        assert_ne!(du.unital(), Some(1));
    }

    #[test]
    fn ideal_powers() {
        let f = FieldSpec::Rationals;
        // (eps) inside dual numbers: square is zero
        let d = fixtures::dual_numbers(f);
        let eps = Subspace::new(2, f, vec![SparseVec::unit(1, &f)]);
        let i = IdealBasis::new(d.clone(), eps).unwrap();
        assert_eq!(ideal_power(&i, 1).unwrap().dim(), 1);
        assert_eq!(ideal_power(&i, 2).unwrap().dim(), 0);

        // whole algebra k: any power is everything
        let k = fixtures::ground_field(f);
        let full = IdealBasis::new(k.clone(), Subspace::full(1, f)).unwrap();
        assert_eq!(ideal_power(&full, 3).unwrap().dim(), 1);

        // (x) inside k[x]/x^4: square is span{x^2, x^3}
        let p = fixtures::truncated_poly(f, 3);
        let x_ideal = IdealBasis::new(p.clone(), Subspace::full(3, f)).unwrap();
        let sq = ideal_power(&x_ideal, 2).unwrap();
        assert_eq!(sq.dim(), 2); // x^2 and x^3 inside k[x]/x^4 nonunital
    }

    #[test]
    fn quotient_examples() {
        let f = FieldSpec::Rationals;
        let p = fixtures::truncated_poly(f, 3); // basis x, x^2, x^3
        // quotient by (x^2) = span{x^2, x^3}
        let sub = Subspace::new(
            3,
            f,
            vec![SparseVec::unit(1, &f), SparseVec::unit(2, &f)],
        );
        let i = IdealBasis::new(p.clone(), sub).unwrap();
        let (q, proj) = quotient_algebra(&p, &i).unwrap();
        assert_eq!(q.dim(), 1);
        assert!(proj.is_surjective());
        // x maps to x, x^2 maps to 0
        assert!(!proj.apply(&SparseVec::unit(0, &f)).is_zero());
        assert!(proj.apply(&SparseVec::unit(1, &f)).is_zero());

        // quotient by zero ideal is the identity
        let z = IdealBasis::new(p.clone(), Subspace::zero(3, f)).unwrap();
        let (q2, _) = quotient_algebra(&p, &z).unwrap();
        assert_eq!(q2.dim(), 3);

        // quotient by everything is the zero algebra
        let full = IdealBasis::new(p.clone(), Subspace::full(3, f)).unwrap();
        let (q3, _) = quotient_algebra(&p, &full).unwrap();
        assert_eq!(q3.dim(), 0);
    }

    #[test]
    fn nilpotency_examples() {
        let f = FieldSpec::Rationals;
        let eps = fixtures::nil_line(f);
        assert_eq!(is_nilpotent(&eps, 5), Some(2));
        let k = fixtures::ground_field(f);
        assert_eq!(is_nilpotent(&k, 10), None);
        let u3 = fixtures::strict_upper_3(f);
        assert_eq!(is_nilpotent(&u3, 5), Some(3));
    }
}
