//! Cyclotomic numbers, Dirichlet characters and Gauss sums.

pub mod cyclo;
pub mod dirichlet;
pub mod gauss;

pub use cyclo::{pow_rational, sqrt_prime, sqrt_rational, CycloNumber};
pub use dirichlet::{character_family, fundamental_discriminant, DirichletChar, TaggedChar};
pub use gauss::{gauss_sum_n, gauss_sum_with_budget};

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::symlat::HalfIntSymMatrix;

/// Quadratic character of Q(sqrt(d)), d = (-1)^{[n/2]} det(2 tau).
pub fn rho_tau(tau: &HalfIntSymMatrix) -> Result<DirichletChar> {
    if !tau.is_positive_definite() {
        return Err(Error::NonPositiveDefinite);
    }
    let det = tau.det_twice().to_i64().ok_or_else(|| Error::InvalidMatrix("determinant overflow".into()))?;
    let d = if (tau.degree() / 2) % 2 == 1 { -det } else { det };
    Ok(DirichletChar::kronecker(fundamental_discriminant(d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_examples() {
        let r = rho_tau(&HalfIntSymMatrix::scalar(1)).unwrap();
        assert_eq!(r.conductor(), 8);
        assert_eq!(r.value(3), CycloNumber::from_int(-1));
        let two = HalfIntSymMatrix::new(vec![vec![2, 0], vec![0, 2]]).unwrap();
        let r = rho_tau(&two).unwrap();
        assert_eq!(r.conductor(), 4);
        assert_eq!(r.value(3), CycloNumber::from_int(-1));
        let sq = HalfIntSymMatrix::scalar(2);
        assert_eq!(rho_tau(&sq).unwrap().conductor(), 1);
    }
}
