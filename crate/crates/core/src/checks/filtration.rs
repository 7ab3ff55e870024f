//! The adic-filtration comparison: for a subalgebra with a retraction and an
//! ideal J of the subalgebra, the filtration by <J^n> + I^n is cofinal with
//! the one by (<J> + I)^n, with the explicit exponent N = n^2 + n - 1.

use std::sync::Arc;

use crate::algebra::{fixtures, ideal_power, q_construction, Algebra, AlgebraHom, IdealBasis};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::linalg::{SparseMatrix, Subspace};
use crate::report::VerificationReport;

use super::{ideal_closure, subspace_power};

/// Verify the filtration inclusions inside `b` for the subalgebra embedded
/// by `inc` with retraction `eps` (eps inc = id) and the ideal `j` of the
/// subalgebra:
///   <J^n> + I^n  is contained in  <J>^n + I^n,
///   (<J> + I)^{2n}  is contained in  <J>^n + I^n,
///   <J>^N  is contained in  <J^n> + I^n  for N = n^2 + n - 1,
/// where I = ker(eps).
pub fn filtration_inclusion_check(
    b: &Arc<Algebra>,
    inc: &AlgebraHom,
    eps: &AlgebraHom,
    j: &IdealBasis,
    n: usize,
) -> Result<VerificationReport> {
    let f = b.field();
    let a = &inc.source;
    if eps.matrix.compose(&inc.matrix) != SparseMatrix::identity(a.dim(), &f) {
        return Err(Error::NotARetraction("eps does not restrict to the identity".into()));
    }
    if !Arc::ptr_eq(&j.parent, a) {
        return Err(Error::Validation("ideal does not live in the subalgebra".into()));
    }
    if n == 0 {
        return Err(Error::Validation("filtration stage needs n >= 1".into()));
    }
    let mut report = VerificationReport::new("lemma23", &f.name());
    report.param("n", n);
    report.param("N", n * n + n - 1);
    report.param("dim_b", b.dim());

    let i_sub = eps.kernel();
    let i_n = subspace_power(b, &i_sub, n);
    let j_in_b = ideal_closure(
        b,
        j.sub.reduced_basis().iter().map(|v| inc.apply(v)),
        f,
    );
    let jn_in_a = ideal_power(j, n)?;
    let jn_closed = ideal_closure(
        b,
        jn_in_a.sub.reduced_basis().iter().map(|v| inc.apply(v)),
        f,
    );
    let f_n = jn_closed.sum(&i_n);
    let g_n = subspace_power(b, &j_in_b, n).sum(&i_n);

    report.table(
        "dims",
        [
            format!("I^n = {}", i_n.dim()),
            format!("<J> = {}", j_in_b.dim()),
            format!("<J^n> = {}", jn_closed.dim()),
            format!("F^n = {}", f_n.dim()),
            format!("G^n = {}", g_n.dim()),
        ],
    );

    // F^n inside G^n
    report.check("fine_inside_coarse", g_n.contains_subspace(&f_n), "");

    // (<J> + I)^{2n} inside G^n
    let ji = j_in_b.sum(&i_sub);
    let ji_2n = subspace_power(b, &ji, 2 * n);
    report.check("sum_power_inside_coarse", g_n.contains_subspace(&ji_2n), "");

    // <J>^N inside F^n, membership of every spanning product
    let big_n = n * n + n - 1;
    let jn_big = subspace_power(b, &j_in_b, big_n);
    let mut all_in = true;
    let mut failing = 0usize;
    for v in jn_big.reduced_basis() {
        if !f_n.contains(&v) {
            all_in = false;
            failing += 1;
        }
    }
    report.check(
        "deep_power_inside_fine",
        all_in,
        if all_in { String::new() } else { format!("{failing} products escape") },
    );
    Ok(report)
}

/// The standard instance: B a cylinder stage over k[x]/x^3, the subalgebra
/// embedded by the first inclusion with the folding retraction, J the ideal
/// generated by x.
pub fn filtration_instance(
    f: FieldSpec,
) -> Result<(Arc<Algebra>, AlgebraHom, AlgebraHom, IdealBasis)> {
    let a = fixtures::truncated_poly(f, 2); // basis x, x^2 with x^3 = 0
    let cyl = q_construction(&a, 3, 6)?;
    let x_ideal = {
        let sub = Subspace::full(a.dim(), f);
        IdealBasis::new(a.clone(), sub)?
    };
    Ok((cyl.alg.clone(), cyl.d0.clone(), cyl.fold.clone(), x_ideal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_stage_one() {
        let f = FieldSpec::Rationals;
        let (b, inc, eps, j) = filtration_instance(f).unwrap();
        let r = filtration_inclusion_check(&b, &inc, &eps, &j, 1).unwrap();
        assert!(r.pass, "{}", r.render());
    }

    #[test]
    fn zero_ideal_holds_trivially() {
        let f = FieldSpec::Rationals;
        let (b, inc, eps, _) = filtration_instance(f).unwrap();
        let a = inc.source.clone();
        let zero = IdealBasis::new(a.clone(), Subspace::zero(a.dim(), f)).unwrap();
        let r = filtration_inclusion_check(&b, &inc, &eps, &zero, 2).unwrap();
        assert!(r.pass, "{}", r.render());
    }

    #[test]
    fn stage_two_instance() {
        let f = FieldSpec::Rationals;
        let (b, inc, eps, j) = filtration_instance(f).unwrap();
        let r = filtration_inclusion_check(&b, &inc, &eps, &j, 2).unwrap();
        assert!(r.pass, "{}", r.render());
    }
}
