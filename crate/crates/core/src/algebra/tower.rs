//! Finite initial segments of N-indexed inverse systems of algebras with
//! surjective structure homomorphisms.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

use super::cylinder::{cylinder_structure_map, q_construction};
use super::universal::universal_model_trunc;
use super::words::{free_product_trunc, power_algebra_trunc};
use super::{Algebra, AlgebraHom};

/// Which construction a tower iterates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerKind {
    Cylinder,
    UniversalModel,
    PowerAlgebra { v_dim: usize },
    FreeProduct,
}

/// Stages A_1 .. A_N with structure maps sigma_n: A_{n+1} -> A_n, each a
/// checked surjective homomorphism, plus the canonical projections onto the
/// base (or base pair) where the construction provides one.
#[derive(Clone, Debug)]
pub struct Tower {
    pub stages: Vec<Arc<Algebra>>,
    /// maps[i]: stages[i+1] -> stages[i]
    pub maps: Vec<AlgebraHom>,
    /// canonical projection of each stage onto the base algebra, when the
    /// construction has one (cylinder, universal model, power algebra)
    pub projections: Vec<AlgebraHom>,
}

impl Tower {
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.stages.iter().map(|a| a.dim()).collect()
    }

    /// Composite of the structure maps from the top stage down to stage `n`
    /// (1-indexed).
    pub fn composite_to(&self, n: usize) -> SparseMatrix {
        assert!(n >= 1 && n <= self.stages.len());
        let top = self.stages.len() - 1;
        let mut m = SparseMatrix::identity(self.stages[top].dim(), &self.stages[top].field());
        for i in (n - 1..top).rev() {
            m = self.maps[i].matrix.compose(&m);
        }
        m
    }

    fn validate(&self) -> Result<()> {
        for (i, m) in self.maps.iter().enumerate() {
            if !m.is_surjective() {
                return Err(Error::Validation(format!(
                    "structure map at stage {} is not surjective",
                    i + 1
                )));
            }
        }
        if self.projections.len() == self.stages.len() {
            for i in 0..self.maps.len() {
                let via = self.projections[i].matrix.compose(&self.maps[i].matrix);
                if via != self.projections[i + 1].matrix {
                    return Err(Error::Validation(format!(
                        "structure map at stage {} does not commute with the projections",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Build the first N stages of one of the four built-in towers over `a`
/// (for `FreeProduct`, of `a` with `b`). `l_bound` overrides the default
/// certification bound 2n for the cylinder and universal-model stages.
pub fn tower_of(
    kind: TowerKind,
    a: &Arc<Algebra>,
    b: Option<&Arc<Algebra>>,
    n_stages: usize,
    l_bound: Option<usize>,
) -> Result<Tower> {
    if n_stages == 0 {
        return Err(Error::Validation("tower needs at least one stage".into()));
    }
    match kind {
        TowerKind::Cylinder => {
            let mut stages = Vec::new();
            let mut cyls = Vec::new();
            let mut projections = Vec::new();
            for n in 1..=n_stages {
                let l = l_bound.unwrap_or(2 * n);
                let c = q_construction(a, n, l)?;
                stages.push(c.alg.clone());
                projections.push(c.fold.clone());
                cyls.push(c);
            }
            let mut maps = Vec::new();
            for i in 0..n_stages - 1 {
                maps.push(cylinder_structure_map(&cyls[i + 1], &cyls[i])?);
            }
            let t = Tower { stages, maps, projections };
            t.validate()?;
            Ok(t)
        }
        TowerKind::UniversalModel => {
            let mut stages = Vec::new();
            let mut us = Vec::new();
            let mut projections = Vec::new();
            for n in 1..=n_stages {
                let l = l_bound.unwrap_or(2 * n);
                let u = universal_model_trunc(a, n, l)?;
                stages.push(u.alg.clone());
                projections.push(u.proj.clone());
                us.push(u);
            }
            let mut maps = Vec::new();
            for i in 0..n_stages - 1 {
                // kill the top curvature layer: match normal words
                let hi = &us[i + 1];
                let lo = &us[i];
                let f = hi.alg.field();
                let mut m = SparseMatrix::zero(lo.alg.dim(), hi.alg.dim());
                for k in 0..hi.alg.dim() {
                    if let Some(t) = lo.index.get(hi.word(k)) {
                        m.set(*t, k, f.one());
                    }
                }
                maps.push(AlgebraHom::new(hi.alg.clone(), lo.alg.clone(), m)?);
            }
            let t = Tower { stages, maps, projections };
            t.validate()?;
            Ok(t)
        }
        TowerKind::PowerAlgebra { v_dim } => {
            let mut stages = Vec::new();
            let mut gas = Vec::new();
            let mut projections = Vec::new();
            for n in 1..=n_stages {
                let (ga, (_inc, ret)) = power_algebra_trunc(a, v_dim, n)?;
                stages.push(ga.alg.clone());
                projections.push(ret);
                gas.push(ga);
            }
            let mut maps = Vec::new();
            for i in 0..n_stages - 1 {
                maps.push(power_structure_map(&gas[i + 1], &gas[i])?);
            }
            let t = Tower { stages, maps, projections };
            t.validate()?;
            Ok(t)
        }
        TowerKind::FreeProduct => {
            let b = b.ok_or_else(|| {
                Error::Validation("free product tower needs a second algebra".into())
            })?;
            let mut stages = Vec::new();
            for l in 1..=n_stages {
                let (ga, _, _) = free_product_trunc(a, b, l)?;
                stages.push(ga.alg.clone());
            }
            let mut maps = Vec::new();
            for i in 0..n_stages - 1 {
                maps.push(label_restriction_map(&stages[i + 1], &stages[i])?);
            }
            let t = Tower { stages, maps, projections: Vec::new() };
            t.validate()?;
            Ok(t)
        }
    }
}

/// Structure map between adjacent power stages: identity on surviving
/// degrees, zero above.
fn power_structure_map(
    hi: &super::GradedAlgebra,
    lo: &super::GradedAlgebra,
) -> Result<AlgebraHom> {
    label_restriction_map(&hi.alg, &lo.alg)
}

/// The map matching basis labels and killing the rest; valid whenever the
/// lower stage's basis is a subset of the higher one's.
pub(crate) fn label_restriction_map(hi: &Arc<Algebra>, lo: &Arc<Algebra>) -> Result<AlgebraHom> {
    let f = hi.field();
    let mut m = SparseMatrix::zero(lo.dim(), hi.dim());
    for k in 0..hi.dim() {
        if let Some(t) = lo.basis().position(hi.basis().label(k)) {
            m.set(t, k, f.one());
        }
    }
    AlgebraHom::new(hi.clone(), lo.clone(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::fixtures;
    use crate::field::FieldSpec;

    #[test]
    fn universal_tower_dims_of_ground_field() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let t = tower_of(TowerKind::UniversalModel, &k, None, 3, None).unwrap();
        assert_eq!(t.dims(), vec![1, 3, 5]);
    }

    #[test]
    fn cylinder_tower_stage_one_is_base() {
        let f = FieldSpec::Rationals;
        let d = fixtures::dual_numbers(f);
        let t = tower_of(TowerKind::Cylinder, &d, None, 3, None).unwrap();
        assert_eq!(t.stages[0].dim(), d.dim());
        // composite of stage maps down to stage 1 equals the projection
        // precomposed with nothing: compare against killing all q-layers
        let comp = t.composite_to(1);
        let top_proj = &t.projections[2];
        let stage1_proj = &t.projections[0];
        assert_eq!(stage1_proj.matrix.compose(&comp), top_proj.matrix);
    }

    #[test]
    fn power_tower_projections_commute() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let t = tower_of(TowerKind::PowerAlgebra { v_dim: 1 }, &k, None, 3, None).unwrap();
        assert_eq!(t.dims(), vec![1, 5, 13]);
    }

    #[test]
    fn free_product_tower() {
        let f = FieldSpec::Rationals;
        let k = fixtures::ground_field(f);
        let t = tower_of(TowerKind::FreeProduct, &k, Some(&k), 4, None).unwrap();
        assert_eq!(t.dims(), vec![2, 4, 6, 8]);
    }
}
