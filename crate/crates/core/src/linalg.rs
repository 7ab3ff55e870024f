//! Exact sparse linear algebra over Q and F_p.
//!
//! Everything downstream (homology, quotients, membership, span residuals)
//! reduces to the operations in this module. Two pivot conventions are used:
//! matrix operations (`rank`, `kernel_basis`, `solve`) pivot on the smallest
//! column index, while subspace echelonization pivots on the largest basis
//! index, so quotient representatives are always the canonically smallest
//! labels. Over Q the elimination keeps working rows as primitive integer
//! vectors and delays all divisions to the final normalization pass.

use std::cell::OnceCell;
use std::collections::BTreeMap;

use crate::field::{primitive_scale, FieldSpec, Scalar};
use crate::label::Label;

/// A sparse vector: index -> nonzero scalar.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseVec {
    entries: BTreeMap<usize, Scalar>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: BTreeMap::new() }
    }

    pub fn unit(i: usize, f: &FieldSpec) -> Self {
        let mut v = SparseVec::new();
        v.entries.insert(i, f.one());
        v
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, Scalar)>>(it: I) -> Self {
        let mut v = SparseVec::new();
        for (i, c) in it {
            v.add_entry(i, c);
        }
        v
    }

    pub fn add_entry(&mut self, i: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.entries.remove(&i) {
            None => {
                self.entries.insert(i, c);
            }
            Some(old) => {
                let s = old.add(&c);
                if !s.is_zero() {
                    self.entries.insert(i, s);
                }
            }
        }
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.entries.get(&i)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn min_index(&self) -> Option<usize> {
        self.entries.keys().next().copied()
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, x.mul(c))).collect(),
        }
    }

    pub fn neg(&self) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, x.neg())).collect(),
        }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.add_entry(i, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.add_entry(i, c.neg());
        }
        out
    }

    /// self += c * other
    pub fn add_scaled(&mut self, other: &SparseVec, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (i, x) in other.iter() {
            self.add_entry(i, x.mul(c));
        }
    }

    /// Re-index entries through `map` (injective on the support).
    pub fn map_indices<F: Fn(usize) -> usize>(&self, map: F) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().map(|(i, c)| (map(*i), c.clone())).collect(),
        }
    }

    fn rescale_primitive(&mut self) {
        if self.entries.is_empty() {
            return;
        }
        let mut vals: Vec<Scalar> = self.entries.values().cloned().collect();
        primitive_scale(&mut vals);
        for (slot, v) in self.entries.values_mut().zip(vals) {
            *slot = v;
        }
    }
}

/// An ordered basis of symbolic labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    labels: Vec<Label>,
    index: BTreeMap<Label, usize>,
}

impl Basis {
    pub fn new(labels: Vec<Label>) -> Self {
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            let prev = index.insert(l.clone(), i);
            assert!(prev.is_none(), "duplicate basis label {l}");
        }
        Basis { labels, index }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn position(&self, l: &Label) -> Option<usize> {
        self.index.get(l).copied()
    }
}

/// Which end of a vector counts as the leading entry during elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeadRule {
    /// Smallest index leads (matrix RREF; pins the free-variable-zero rule).
    Min,
    /// Largest index leads (subspace echelon; quotient reps are small labels).
    Max,
}

/// Incremental reduced echelon form with delayed division over Q.
#[derive(Clone, Debug)]
pub struct Ech {
    rule: LeadRule,
    field: FieldSpec,
    rows: BTreeMap<usize, SparseVec>,
}

impl Ech {
    pub fn new(rule: LeadRule, field: FieldSpec) -> Self {
        Ech { rule, field, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn has_pivot(&self, i: usize) -> bool {
        self.rows.contains_key(&i)
    }

    fn lead(&self, v: &SparseVec) -> Option<usize> {
        match self.rule {
            LeadRule::Min => v.min_index(),
            LeadRule::Max => v.max_index(),
        }
    }

    /// Eliminate every pivot present in `v`; the remainder has no support on
    /// pivot indices. Scaling of the remainder is not canonical.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let piv: Vec<usize> = v.support().filter(|i| self.rows.contains_key(i)).collect();
        for p in piv {
            let Some(c) = v.get(p).cloned() else { continue };
            let row = &self.rows[&p];
            let rl = row.get(p).cloned().unwrap();
            // v := rl*v - c*row  (fraction-free combination)
            let mut w = v.scale(&rl);
            w.add_scaled(row, &c.neg());
            v = w;
        }
        v.rescale_primitive();
        v
    }

    /// Insert a vector; returns the new pivot index, or None if dependent.
    pub fn insert(&mut self, v: &SparseVec) -> Option<usize> {
        let mut v = self.reduce(v);
        if v.is_zero() {
            return None;
        }
        v.rescale_primitive();
        let lead = self.lead(&v).unwrap();
        debug_assert!(!self.rows.contains_key(&lead));
        let vl = v.get(lead).cloned().unwrap();
        let touched: Vec<usize> = self
            .rows
            .iter()
            .filter(|(_, row)| row.get(lead).is_some())
            .map(|(p, _)| *p)
            .collect();
        for p in touched {
            let row = self.rows.remove(&p).unwrap();
            let c = row.get(lead).cloned().unwrap();
            // row := vl*row - c*v
            let mut nr = row.scale(&vl);
            nr.add_scaled(&v, &c.neg());
            nr.rescale_primitive();
            self.rows.insert(p, nr);
        }
        self.rows.insert(lead, v);
        Some(lead)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Rows normalized to leading coefficient one, ordered by pivot index.
    pub fn normalized_rows(&self) -> Vec<SparseVec> {
        let mut out = Vec::with_capacity(self.rows.len());
        for (p, row) in &self.rows {
            let l = row.get(*p).cloned().unwrap();
            out.push(row.scale(&l.inv()));
        }
        out
    }

    /// Express `v` as a combination of the echelon rows; `None` if `v` is
    /// outside the span. Returned coordinates are keyed by pivot index.
    pub fn coordinates(&self, v: &SparseVec) -> Option<BTreeMap<usize, Scalar>> {
        let mut v = v.clone();
        let mut coords = BTreeMap::new();
        let piv: Vec<usize> = v.support().filter(|i| self.rows.contains_key(i)).collect();
        for p in piv {
            let Some(c) = v.get(p).cloned() else { continue };
            let row = &self.rows[&p];
            let rl = row.get(p).cloned().unwrap();
            let coeff = c.div(&rl);
            v.add_scaled(row, &coeff.neg());
            coords.insert(p, coeff);
        }
        if v.is_zero() {
            Some(coords)
        } else {
            None
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
}

/// A sparse matrix stored column-major: column j is the image of e_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, columns: vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize, f: &FieldSpec) -> Self {
        let mut m = SparseMatrix::zero(n, n);
        for j in 0..n {
            m.columns[j].add_entry(j, f.one());
        }
        m
    }

    pub fn from_cols(rows: usize, columns: Vec<SparseVec>) -> Self {
        for c in &columns {
            if let Some(m) = c.max_index() {
                assert!(m < rows, "row index out of range");
            }
        }
        SparseMatrix { rows, cols: columns.len(), columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols);
        self.columns[c].add_entry(r, v);
    }

    pub fn entry(&self, r: usize, c: usize) -> Option<&Scalar> {
        self.columns[c].get(r)
    }

    /// y = M x
    pub fn apply(&self, x: &SparseVec) -> SparseVec {
        let mut y = SparseVec::new();
        for (j, c) in x.iter() {
            y.add_scaled(&self.columns[j], c);
        }
        y
    }

    /// self ∘ other (first `other`, then `self`).
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in compose");
        let columns = other.columns.iter().map(|c| self.apply(c)).collect();
        SparseMatrix { rows: self.rows, cols: other.cols, columns }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.add(b))
            .collect();
        SparseMatrix { rows: self.rows, cols: self.cols, columns }
    }

    pub fn neg(&self) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }

    /// Row-major view, used by the row-elimination routines.
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut rows = vec![SparseVec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, c) in col.iter() {
                rows[i].add_entry(j, c.clone());
            }
        }
        rows
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            columns: self.row_vectors(),
        }
    }
}

/// Rank over the given field; deterministic for fixed input.
pub fn rank(m: &SparseMatrix, f: &FieldSpec) -> usize {
    let mut ech = Ech::new(LeadRule::Min, *f);
    for r in m.row_vectors() {
        ech.insert(&r);
    }
    ech.rank()
}

/// A subspace of a coordinate space, stored by generators with a lazily
/// computed reduced echelon basis (largest-index pivots).
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    field: FieldSpec,
    generators: Vec<SparseVec>,
    reduced: OnceCell<Ech>,
}

impl Subspace {
    pub fn new(ambient_dim: usize, field: FieldSpec, generators: Vec<SparseVec>) -> Self {
        for g in &generators {
            if let Some(m) = g.max_index() {
                assert!(m < ambient_dim, "generator outside ambient space");
            }
        }
        Subspace { ambient_dim, field, generators, reduced: OnceCell::new() }
    }

    pub fn zero(ambient_dim: usize, field: FieldSpec) -> Self {
        Subspace::new(ambient_dim, field, Vec::new())
    }

    pub fn full(ambient_dim: usize, field: FieldSpec) -> Self {
        let gens = (0..ambient_dim).map(|i| SparseVec::unit(i, &field)).collect();
        Subspace::new(ambient_dim, field, gens)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn generators(&self) -> &[SparseVec] {
        &self.generators
    }

    pub(crate) fn ech(&self) -> &Ech {
        self.reduced.get_or_init(|| {
            let mut ech = Ech::new(LeadRule::Max, self.field);
            for g in &self.generators {
                ech.insert(g);
            }
            ech
        })
    }

    pub fn dim(&self) -> usize {
        self.ech().rank()
    }

    /// Reduced echelon basis, leading coefficients one, pivots descending in
    /// canonical order.
    pub fn reduced_basis(&self) -> Vec<SparseVec> {
        self.ech().normalized_rows()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.ech().contains(v)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.generators.iter().all(|g| self.contains(g))
    }

    pub fn equals(&self, other: &Subspace) -> bool {
        self.contains_subspace(other) && other.contains_subspace(self)
    }

    /// Span of self and other.
    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        Subspace::new(self.ambient_dim, self.field, gens)
    }
}

/// True iff v lies in the span of the subspace.
pub fn membership(v: &SparseVec, sub: &Subspace) -> bool {
    sub.contains(v)
}

/// Basis of the null space of m (as a map k^cols -> k^rows).
pub fn kernel_basis(m: &SparseMatrix, f: &FieldSpec) -> Subspace {
    let mut ech = Ech::new(LeadRule::Min, *f);
    for r in m.row_vectors() {
        ech.insert(&r);
    }
    let rows = ech.normalized_rows();
    let pivots: Vec<usize> = ech.pivots().collect();
    let mut gens = Vec::new();
    for j in 0..m.cols() {
        if pivots.binary_search(&j).is_ok() {
            continue;
        }
        // free column j: x_j = 1, pivot entries solved from the RREF rows
        let mut x = SparseVec::unit(j, f);
        for (p, row) in pivots.iter().zip(rows.iter()) {
            if let Some(c) = row.get(j) {
                x.add_entry(*p, c.neg());
            }
        }
        gens.push(x);
    }
    Subspace::new(m.cols(), *f, gens)
}

/// Quotient of the ambient space by `sub`: the non-pivot labels survive, and
/// the projection sends each pivot label to minus the tail of its echelon row.
pub fn quotient_basis(ambient: &Basis, sub: &Subspace, f: &FieldSpec) -> (Basis, SparseMatrix) {
    assert_eq!(ambient.dim(), sub.ambient_dim());
    quotient_from_ech(ambient, sub.ech(), f)
}

/// Quotient of the ambient space by the span of an echelon form built with
/// `LeadRule::Max`. Used directly by streaming constructions that never
/// materialize a generator list.
pub fn quotient_from_ech(ambient: &Basis, ech: &Ech, f: &FieldSpec) -> (Basis, SparseMatrix) {
    let rows = ech.normalized_rows();
    let pivots: Vec<usize> = ech.pivots().collect();
    let mut keep = Vec::new();
    let mut new_index = vec![usize::MAX; ambient.dim()];
    for i in 0..ambient.dim() {
        if pivots.binary_search(&i).is_err() {
            new_index[i] = keep.len();
            keep.push(ambient.label(i).clone());
        }
    }
    let qdim = keep.len();
    let mut proj = SparseMatrix::zero(qdim, ambient.dim());
    for i in 0..ambient.dim() {
        if new_index[i] != usize::MAX {
            proj.set(new_index[i], i, f.one());
        }
    }
    for (p, row) in pivots.iter().zip(rows.iter()) {
        for (j, c) in row.iter() {
            if j != *p {
                debug_assert!(new_index[j] != usize::MAX);
                proj.set(new_index[j], *p, c.neg());
            }
        }
    }
    (Basis::new(keep), proj)
}

/// Some solution of m x = rhs with free variables set to zero under the
/// leftmost-pivot convention, or None when inconsistent.
pub fn solve(m: &SparseMatrix, rhs: &SparseVec, f: &FieldSpec) -> Option<SparseVec> {
    let aug_col = m.cols();
    let mut ech = Ech::new(LeadRule::Min, *f);
    let mut rows = m.row_vectors();
    for (i, r) in rows.iter_mut().enumerate() {
        if let Some(c) = rhs.get(i) {
            r.add_entry(aug_col, c.clone());
        }
        ech.insert(r);
    }
    // Inconsistent iff some echelon row is supported on the rhs column only.
    if ech.has_pivot(aug_col) {
        return None;
    }
    let pivots: Vec<usize> = ech.pivots().collect();
    let nrows = ech.normalized_rows();
    let mut x = SparseVec::new();
    // Free variables are zero, so x_p is the rhs entry of the row with pivot
    // p minus contributions of other pivot columns; RREF removes those, and
    // free columns contribute nothing.
    for (p, row) in pivots.iter().zip(nrows.iter()) {
        if let Some(c) = row.get(aug_col) {
            x.add_entry(*p, c.clone());
        }
    }
    // Verify exactly; solve must never return a wrong vector.
    let mut check = m.apply(&x);
    for (i, c) in rhs.iter() {
        check.add_entry(i, c.neg());
    }
    if check.is_zero() {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn sv(pairs: &[(usize, i64)], f: &FieldSpec) -> SparseVec {
        SparseVec::from_entries(pairs.iter().map(|(i, c)| (*i, f.from_i64(*c))))
    }

    #[test]
    fn rank_identity_and_zero() {
        let f = q();
        assert_eq!(rank(&SparseMatrix::identity(3, &f), &f), 3);
        assert_eq!(rank(&SparseMatrix::zero(2, 5), &f), 0);
    }

    #[test]
    fn rank_ones_over_f2() {
        let f = FieldSpec::prime_field(2).unwrap();
        let mut m = SparseMatrix::zero(2, 2);
        for r in 0..2 {
            for c in 0..2 {
                m.set(r, c, f.one());
            }
        }
        assert_eq!(rank(&m, &f), 1);
        let k = kernel_basis(&m, &f);
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&sv(&[(0, 1), (1, 1)], &f)));
    }

    #[test]
    fn kernel_trivial_and_full() {
        let f = q();
        assert_eq!(kernel_basis(&SparseMatrix::identity(2, &f), &f).dim(), 0);
        assert_eq!(kernel_basis(&SparseMatrix::zero(1, 3), &f).dim(), 3);
    }

    #[test]
    fn solve_conventions() {
        let f = q();
        // identity: x = b
        let id = SparseMatrix::identity(3, &f);
        let b = sv(&[(0, 2), (2, -1)], &f);
        assert_eq!(solve(&id, &b, &f), Some(b.clone()));
        // zero map, nonzero rhs: None
        let z = SparseMatrix::zero(2, 2);
        assert_eq!(solve(&z, &sv(&[(0, 1)], &f), &f), None);
        // [[1,1]] x = [1]  ->  (1, 0) under the free-variable-zero rule
        let mut m = SparseMatrix::zero(1, 2);
        m.set(0, 0, f.one());
        m.set(0, 1, f.one());
        let x = solve(&m, &sv(&[(0, 1)], &f), &f).unwrap();
        assert_eq!(x, sv(&[(0, 1)], &f));
    }

    #[test]
    fn membership_examples() {
        let f = q();
        let sub = Subspace::new(2, f, vec![sv(&[(1, 1)], &f)]);
        assert!(membership(&SparseVec::new(), &sub));
        assert!(!membership(&sv(&[(0, 1)], &f), &sub));
        // e1+e2 in span{e1-e2, e2}
        let sub2 = Subspace::new(2, f, vec![sv(&[(0, 1), (1, -1)], &f), sv(&[(1, 1)], &f)]);
        assert!(membership(&sv(&[(0, 1), (1, 1)], &f), &sub2));
    }

    #[test]
    fn quotient_dims() {
        let f = q();
        let labels = |n: usize| {
            Basis::new((0..n).map(|i| Label::atom(&format!("e{i}"))).collect())
        };
        let amb = labels(3);
        // sub = 0
        let (qb, proj) = quotient_basis(&amb, &Subspace::zero(3, f), &f);
        assert_eq!(qb.dim(), 3);
        assert_eq!(proj, SparseMatrix::identity(3, &f));
        // sub = ambient
        let (qb, _) = quotient_basis(&amb, &Subspace::full(3, f), &f);
        assert_eq!(qb.dim(), 0);
        // sub = span{e0 - e1}
        let sub = Subspace::new(3, f, vec![sv(&[(0, 1), (1, -1)], &f)]);
        let (qb, proj) = quotient_basis(&amb, &sub, &f);
        assert_eq!(qb.dim(), 2);
        // projection kills the subspace
        assert!(proj.apply(&sv(&[(0, 1), (1, -1)], &f)).is_zero());
    }

    #[test]
    fn rank_nullity_random_panel() {
        let f = q();
        for seed in 0..30u64 {
            let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let rows = 1 + (seed % 4) as usize;
            let cols = 1 + ((seed / 4) % 5) as usize;
            let mut m = SparseMatrix::zero(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let v = ((s >> 33) % 5) as i64 - 2;
                    m.set(r, c, f.from_i64(v));
                }
            }
            assert_eq!(rank(&m, &f) + kernel_basis(&m, &f).dim(), cols);
        }
    }

    #[test]
    fn reduced_bases_are_deterministic() {
        let f = q();
        let gens = vec![
            sv(&[(0, 2), (1, 4), (3, 6)], &f),
            sv(&[(1, 1), (2, 3)], &f),
            sv(&[(0, 1), (2, -3), (3, 3)], &f),
        ];
        let s1 = Subspace::new(4, f, gens.clone());
        let s2 = Subspace::new(4, f, gens);
        assert_eq!(s1.reduced_basis(), s2.reduced_basis());
    }
}
