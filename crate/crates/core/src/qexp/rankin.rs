//! Partial sums of the Rankin-Selberg Dirichlet series over GL_n(Z) classes.

use std::collections::BTreeSet;

use super::{ExtCoeff, FourierExpansion};
use crate::arith::{qi, Q};
use crate::chars::{pow_rational, CycloNumber};
use crate::error::{Error, Result};
use crate::symlat::{enumerate_splus, reduce_class, HalfIntSymMatrix};

/// Sum over classes sigma in S_+/GL_n(Z) with trace at most the bound of
/// nu_sigma^{-1} c_f(sigma) conj(c_g(sigma)) |sigma|^{-s-(k-l)/2}.
pub fn rankin_dirichlet(f: &FourierExpansion, g: &FourierExpansion, s: &Q, trace_bound: i64) -> Result<ExtCoeff> {
    rankin_with_reps(f, g, s, trace_bound, |sigma| Ok(reduce_class(sigma)?.representative))
}

/// Same sum with a caller-chosen class representative.
pub fn rankin_with_reps(
    f: &FourierExpansion,
    g: &FourierExpansion,
    s: &Q,
    trace_bound: i64,
    rep: impl Fn(&HalfIntSymMatrix) -> Result<HalfIntSymMatrix>,
) -> Result<ExtCoeff> {
    if f.degree != g.degree {
        return Err(Error::DegreeMismatch(f.degree, g.degree));
    }
    let n = f.degree;
    if n > 2 {
        return Err(Error::UnsupportedDegree(n));
    }
    let bound = trace_bound.min(f.trace_bound).min(g.trace_bound);
    let shift = s + (f.weight() - g.weight()) / qi(2);
    let exp = -shift;
    let mut reps = BTreeSet::new();
    for sigma in enumerate_splus(n, bound)? {
        if sigma.is_positive_definite() {
            reps.insert(reduce_class(&sigma)?.representative);
        }
    }
    let mut total = CycloNumber::zero();
    for r in reps {
        let chosen = rep(&r)?;
        let cf = f.get(&chosen);
        let cg = g.get(&chosen);
        if cf.is_zero() || cg.is_zero() {
            continue;
        }
        let nu = crate::symlat::aut_count(&chosen)?;
        let pw = pow_rational(&chosen.det(), &exp)?;
        total = total + (&cf * &cg.conj()) * pw.scale(&Q::new(1.into(), (nu as i64).into()));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;
    use crate::qexp::{from_n1_values, theta_series};
    use crate::DirichletChar;

    #[test]
    fn single_class() {
        let f = from_n1_values(1, 4, &[(0, qi(1)), (1, qi(2))]);
        assert_eq!(rankin_dirichlet(&f, &f, &qi(0), 4).unwrap(), CycloNumber::from_int(2));
        let g = from_n1_values(1, 10, &[(3, qi(1))]);
        let v = rankin_dirichlet(&g, &g, &qi(1), 10).unwrap();
        assert_eq!(v, CycloNumber::from_rational(qr(1, 6)));
    }

    #[test]
    fn irrational_exponent_is_reported() {
        let f = from_n1_values(1, 4, &[(1, qi(1))]);
        let g = from_n1_values(1, 4, &[(2, qi(1))]);
        let err = rankin_dirichlet(&g, &g, &qr(1, 3), 4).unwrap_err();
        assert!(matches!(err, Error::IrrationalExponent(_)));
        assert!(rankin_dirichlet(&f, &f, &qr(1, 3), 4).is_ok());
    }

    #[test]
    fn independent_of_class_representatives() {
        let tau = HalfIntSymMatrix::new(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let th = theta_series(&tau, &DirichletChar::trivial(1), 0, &qi(1), 6).unwrap();
        let a = rankin_dirichlet(&th, &th, &qi(1), 6).unwrap();
        // alternative representative: smallest class member under a scrambling matrix
        let b = rankin_with_reps(&th, &th, &qi(1), 6, |r| {
            let u = vec![vec![1, 1], vec![0, 1]];
            let v = r.congruent(&u);
            Ok(if v.trace() <= 6 { v } else { r.clone() })
        })
        .unwrap();
        assert_eq!(a, b);
        assert!(!a.is_zero());
    }
}
