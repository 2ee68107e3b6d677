//! Gauss sums over GL_n(Z/FZ).

use super::cyclo::CycloNumber;
use super::dirichlet::DirichletChar;
use crate::arith::{gcd_u64, lcm_u64};
use crate::error::{Error, Result};

pub const DEFAULT_GAUSS_BUDGET: u128 = 625;

/// Term budget, overridable through SIEGEL_GAUSS_BUDGET.
pub fn gauss_budget() -> u128 {
    std::env::var("SIEGEL_GAUSS_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_GAUSS_BUDGET)
}

/// G_n(X, phi) = sum over a in GL_n(Z/F) of phi_F(det a) e(tr(X^T a)/F), with phi_F the
/// primitive character of conductor F attached to phi.
pub fn gauss_sum_n(x: &[Vec<i64>], phi: &DirichletChar, n: usize) -> Result<CycloNumber> {
    gauss_sum_with_budget(x, phi, n, gauss_budget())
}

pub fn gauss_sum_with_budget(
    x: &[Vec<i64>],
    phi: &DirichletChar,
    n: usize,
    budget: u128,
) -> Result<CycloNumber> {
    if x.len() != n || x.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidMatrix(format!("expected a {n}x{n} matrix")));
    }
    let prim = phi.primitive();
    let f = prim.modulus();
    if f == 1 {
        return Ok(CycloNumber::one());
    }
    let cost = (f as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if cost > budget {
        return Err(Error::BudgetExceeded { cost, budget });
    }
    let l = prim.group().exponent();
    let big = lcm_u64(f, l);
    let mut counts = vec![0i64; big as usize];
    let nn = n * n;
    let mut a = vec![0u64; nn];
    loop {
        let det = det_mod(&a, n, f);
        if gcd_u64(det, f) == 1 {
            let k = prim.angle_index(det as i64).unwrap();
            let mut tr: i128 = 0;
            for i in 0..n {
                for j in 0..n {
                    // (X^T a)_ii = sum_j X_ji a_ji
                    tr += x[j][i] as i128 * a[j * n + i] as i128;
                }
            }
            let tr = tr.rem_euclid(f as i128) as u64;
            let e = (k * (big / l) + tr * (big / f)) % big;
            counts[e as usize] += 1;
        }
        let mut i = 0;
        while i < nn {
            a[i] += 1;
            if a[i] < f {
                break;
            }
            a[i] = 0;
            i += 1;
        }
        if i == nn {
            break;
        }
    }
    Ok(CycloNumber::from_counts(big, &counts))
}

fn det_mod(a: &[u64], n: usize, f: u64) -> u64 {
    let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| a[i * n + j] as i64).collect()).collect();
    let d = crate::arith::det_int(&m);
    let f = num_bigint::BigInt::from(f);
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    d.mod_floor(&f).to_u64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_mod_five() {
        let phi = DirichletChar::kronecker(5);
        let g = gauss_sum_n(&[vec![1]], &phi, 1).unwrap();
        let expect = CycloNumber::from_counts(5, &[0, 1, -1, -1, 1]);
        assert_eq!(g, expect);
        assert!((g.to_complex().re - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn trivial_conductor_is_one() {
        let phi = DirichletChar::trivial(7);
        assert_eq!(gauss_sum_n(&[vec![3, 1], vec![0, 2]], &phi, 2).unwrap(), CycloNumber::one());
    }

    #[test]
    fn budget_guard() {
        let phi = DirichletChar::kronecker(-7);
        let err = gauss_sum_with_budget(&[vec![1, 0], vec![0, 1]], &phi, 2, 100).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { cost: 2401, budget: 100 });
    }

    #[test]
    fn degree_two_mod_three_has_48_terms() {
        // with X = 0 every term is phi(det a); the sum over GL_2(F_3) of a nontrivial character vanishes
        let phi = DirichletChar::kronecker(-3);
        let g = gauss_sum_n(&[vec![0, 0], vec![0, 0]], &phi, 2).unwrap();
        assert_eq!(g, CycloNumber::zero());
        let triv = DirichletChar::trivial(3);
        assert_eq!(gauss_sum_n(&[vec![0, 0], vec![0, 0]], &triv, 2).unwrap(), CycloNumber::one());
    }
}
