//! Hecke polynomials, the Satake monomial map, Satake parameters, Euler
//! factors and p-stabilisation.

mod laurent;
mod stabilise;

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{self, parse_q, pow_q, qi, vp, Q};
use crate::chars::{pow_rational, CycloNumber};
use crate::error::{Error, Result};
use crate::padic;

pub use laurent::{Monomial, PMode, WeylLaurentPoly};
pub use stabilise::{
    n1_eigenform, p_stabilise, p_stabilise_operator, pstab_n1_explicit, random_n1_base, PStabilisation,
};

/// p^{n(n+1)/2}.
fn half_exp(n: usize) -> i64 {
    (n * (n + 1) / 2) as i64
}

/// T~_0 .. T~_{2^n}: R~_n(z) = prod_delta (1 - p^{n(n+1)/2} x^delta z) = sum (-1)^m T~_m z^m.
pub fn hecke_polynomial(n: usize, mode: PMode) -> Result<Vec<WeylLaurentPoly>> {
    if n == 0 || n > 3 {
        return Err(Error::UnsupportedDegree(n));
    }
    let e = half_exp(n);
    // coefficients of the product as a polynomial in z
    let mut prod = vec![WeylLaurentPoly::one(n, mode)];
    for mask in 0..1u32 << n {
        let delta: Vec<i64> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        let term = WeylLaurentPoly::monomial(n, mode, qi(-1), e, delta);
        let mut next = vec![WeylLaurentPoly::zero(n, mode); prod.len() + 1];
        for (i, c) in prod.iter().enumerate() {
            next[i] = next[i].add(c);
            next[i + 1] = next[i + 1].add(&c.mul(&term));
        }
        prod = next;
    }
    Ok(prod
        .into_iter()
        .enumerate()
        .map(|(m, c)| if m % 2 == 1 { c.scale(&qi(-1)) } else { c })
        .collect())
}

/// T_m = p^{n(n+1)(m - 2^{n-1})} T_{2^n - m} for every m.
pub fn check_symmetry(t: &[WeylLaurentPoly], n: usize) -> bool {
    let top = 1usize << n;
    if t.len() != top + 1 {
        return false;
    }
    let mode = t[0].mode();
    let w = (n * (n + 1)) as i64;
    (0..=top).all(|m| {
        let f = WeylLaurentPoly::p_power(n, mode, w * (m as i64 - (top / 2) as i64));
        t[m] == f.mul(&t[top - m])
    })
}

/// u = p^{n(n+1)/2} x_1 ... x_n.
pub fn u_poly(n: usize, mode: PMode) -> WeylLaurentPoly {
    WeylLaurentPoly::monomial(n, mode, qi(1), half_exp(n), vec![1; n])
}

/// V~_0 .. V~_{2^n - 1}; verifies the vanishing sum and the factorisation of R~ first.
pub fn v_polys(t: &[WeylLaurentPoly], n: usize) -> Result<Vec<WeylLaurentPoly>> {
    let top = 1usize << n;
    if t.len() != top + 1 {
        return Err(Error::FactorisationFailed(format!("expected {} polynomials, got {}", top + 1, t.len())));
    }
    let mode = t[0].mode();
    let u = u_poly(n, mode);
    let upow: Vec<WeylLaurentPoly> = (0..=top as u32).map(|e| u.pow(e)).collect();
    let sign = |l: usize| qi(if l % 2 == 0 { 1 } else { -1 });

    let mut lemma = WeylLaurentPoly::zero(n, mode);
    for (m, tm) in t.iter().enumerate() {
        lemma = lemma.add(&tm.mul(&upow[top - m]).scale(&sign(m)));
    }
    if !lemma.is_zero() {
        return Err(Error::FactorisationFailed(format!("sum (-1)^m T_m u^(2^n-m) = {lemma}")));
    }

    let v: Vec<WeylLaurentPoly> = (0..top)
        .map(|m| {
            (0..=m).fold(WeylLaurentPoly::zero(n, mode), |acc, l| {
                acc.add(&t[l].mul(&upow[m - l]).scale(&sign(l)))
            })
        })
        .collect();

    // (sum V_m z^m)(1 - u z) against sum (-1)^m T_m z^m
    for m in 0..=top {
        let mut lhs = WeylLaurentPoly::zero(n, mode);
        if m < top {
            lhs = lhs.add(&v[m]);
        }
        if m > 0 {
            lhs = lhs.sub(&v[m - 1].mul(&u));
        }
        if lhs != t[m].scale(&sign(m)) {
            return Err(Error::FactorisationFailed(format!("coefficient of z^{m} differs")));
        }
    }
    Ok(v)
}

/// omega_0 of the coset Theta_p d: prod (p^{-i} x_i)^{a_i} with p^{a_i} the
/// diagonal of an upper triangular representative.
pub fn satake_omega0(d: &[Vec<Q>], p: u64) -> Result<WeylLaurentPoly> {
    let n = d.len();
    if n == 0 || d.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidMatrix("omega_0 needs a square matrix".into()));
    }
    let mut m: Vec<Vec<Q>> = d.to_vec();
    let mut a = vec![0i64; n];
    for col in 0..n {
        // pivot of least valuation among the remaining rows
        let pivot = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| vp(&m[r][col], p).unwrap())
            .ok_or_else(|| Error::NotPLocal(format!("column {col} has no pivot")))?;
        m.swap(col, pivot);
        let pv = m[col][col].clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pv;
            if vp(&factor, p).unwrap() < 0 {
                return Err(Error::NotPLocal(format!("non-integral multiplier in column {col}")));
            }
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] -= sub;
            }
        }
        a[col] = vp(&pv, p).unwrap();
    }
    let p_exp: i64 = a.iter().enumerate().map(|(i, &ai)| -((i + 1) as i64) * ai).sum();
    Ok(WeylLaurentPoly::monomial(n, PMode::Numeric(p), qi(1), p_exp, a))
}

/// Satake p-parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SatakeParams {
    pub p: u64,
    pub lambdas: Vec<CycloNumber>,
}

impl SatakeParams {
    pub fn new(p: u64, lambdas: Vec<CycloNumber>) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        if lambdas.is_empty() || lambdas.len() > 3 {
            return Err(Error::UnsupportedDegree(lambdas.len()));
        }
        if lambdas.iter().any(|l| l.is_zero()) {
            return Err(Error::ZeroSatakeParam);
        }
        Ok(SatakeParams { p, lambdas })
    }

    pub fn degree(&self) -> usize {
        self.lambdas.len()
    }

    /// p^{n(n+1)/2} prod lambda_i.
    pub fn lambda0(&self) -> CycloNumber {
        let n = self.degree();
        let pp = CycloNumber::from_rational(pow_q(&qi(self.p as i64), half_exp(n)));
        self.lambdas.iter().fold(pp, |acc, l| acc * l.clone())
    }

    /// Whether lambda0 is a p-adic unit; None when the valuation is not determined.
    pub fn ordinary(&self) -> Option<bool> {
        padic::valuation_general(&self.lambda0(), self.p).map(|v| v.is_zero())
    }

    /// Lambda(T_m) for m = 0..2^n, from the Hecke polynomial.
    pub fn hecke_eigenvalues(&self) -> Result<Vec<CycloNumber>> {
        let n = self.degree();
        hecke_polynomial(n, PMode::Numeric(self.p))?
            .iter()
            .map(|t| t.eval(&self.lambdas, self.p))
            .collect()
    }
}

/// Coefficients of L_p(t) = prod (1 - p^n lambda_i t) [(1 - p^n lambda_i^{-1} t)].
pub fn euler_factor(sp: &SatakeParams, divides_level: bool) -> Result<Vec<CycloNumber>> {
    let n = sp.degree();
    let pn = CycloNumber::from_rational(pow_q(&qi(sp.p as i64), n as i64));
    let mut poly = vec![CycloNumber::one()];
    let mut roots = Vec::new();
    for l in &sp.lambdas {
        if l.is_zero() {
            return Err(Error::ZeroSatakeParam);
        }
        roots.push(&pn * l);
        if !divides_level {
            roots.push(&pn * &l.inv()?);
        }
    }
    for r in roots {
        let mut next = vec![CycloNumber::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] = &next[i] + c;
            next[i + 1] = &next[i + 1] - &(c * &r);
        }
        poly = next;
    }
    Ok(poly)
}

fn eval_poly(c: &[CycloNumber], t: &CycloNumber) -> CycloNumber {
    c.iter().rev().fold(CycloNumber::zero(), |acc, a| acc * t.clone() + a.clone())
}

/// prod over primes up to the bound of L_q(chi(q) q^{-s})^{-1}, for the primes in the map.
pub fn standard_l_truncated(
    params: &BTreeMap<u64, (SatakeParams, bool)>,
    chi: impl Fn(u64) -> CycloNumber,
    s: &Q,
    prime_bound: u64,
) -> Result<CycloNumber> {
    let mut total = CycloNumber::one();
    for (&q, (sp, divides)) in params.range(..=prime_bound) {
        let lp = euler_factor(sp, *divides)?;
        let t = chi(q) * pow_rational(&qi(q as i64), &-s.clone())?;
        let v = eval_poly(&lp, &t);
        total = total * v.inv()?;
    }
    Ok(total)
}

/// Exact value in an eigen-data file: a rational string or a cyclotomic number.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueJson {
    Rational(String),
    Cyclo(CycloNumber),
}

impl ValueJson {
    pub fn value(&self) -> Result<CycloNumber> {
        match self {
            ValueJson::Rational(s) => parse_q(s)
                .map(CycloNumber::from_rational)
                .ok_or_else(|| Error::Input(format!("bad rational {s}"))),
            ValueJson::Cyclo(c) => Ok(c.clone()),
        }
    }

    pub fn from_value(c: &CycloNumber) -> Self {
        match c.as_rational() {
            Some(q) => ValueJson::Rational(arith::fmt_q(&q)),
            None => ValueJson::Cyclo(c.clone()),
        }
    }
}

/// Eigen-data file {p, lambdas, T_values}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenData {
    pub p: u64,
    pub lambdas: Vec<ValueJson>,
    #[serde(rename = "T_values")]
    pub t_values: BTreeMap<usize, ValueJson>,
}

impl EigenData {
    pub fn from_params(sp: &SatakeParams) -> Result<Self> {
        let t = sp.hecke_eigenvalues()?;
        Ok(EigenData {
            p: sp.p,
            lambdas: sp.lambdas.iter().map(ValueJson::from_value).collect(),
            t_values: t.iter().enumerate().map(|(m, v)| (m, ValueJson::from_value(v))).collect(),
        })
    }

    pub fn params(&self) -> Result<SatakeParams> {
        let l = self.lambdas.iter().map(|v| v.value()).collect::<Result<Vec<_>>>()?;
        SatakeParams::new(self.p, l)
    }

    /// Lambda(T_0) .. Lambda(T_{2^n}); missing entries are an error.
    pub fn t_values(&self) -> Result<Vec<CycloNumber>> {
        let n = self.lambdas.len();
        (0..=1usize << n)
            .map(|m| {
                self.t_values
                    .get(&m)
                    .ok_or_else(|| Error::Input(format!("missing T_value for m = {m}")))?
                    .value()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    fn sym(n: usize) -> Vec<WeylLaurentPoly> {
        hecke_polynomial(n, PMode::Symbolic).unwrap()
    }

    #[test]
    fn degree_one_and_two_coefficients() {
        let t = sym(1);
        let s = PMode::Symbolic;
        let t1 = WeylLaurentPoly::monomial(1, s, qi(1), 1, vec![1]).add(&WeylLaurentPoly::monomial(1, s, qi(1), 1, vec![-1]));
        assert_eq!(t[1], t1);
        assert_eq!(t[2], WeylLaurentPoly::p_power(1, s, 2));
        let t = sym(2);
        assert_eq!(t[4], WeylLaurentPoly::p_power(2, s, 12));
        let mut t1 = WeylLaurentPoly::zero(2, s);
        for a in [1, -1] {
            for b in [1, -1] {
                t1 = t1.add(&WeylLaurentPoly::monomial(2, s, qi(1), 3, vec![a, b]));
            }
        }
        assert_eq!(t[1], t1);
        for n in 1..=3 {
            assert_eq!(sym(n)[0], WeylLaurentPoly::one(n, s));
        }
        assert_eq!(hecke_polynomial(4, s).unwrap_err(), Error::UnsupportedDegree(4));
    }

    #[test]
    fn weyl_invariance_and_symmetry() {
        for n in 1..=3 {
            let t = sym(n);
            assert!(t.iter().all(|x| x.is_weyl_invariant()));
            assert!(check_symmetry(&t, n));
            // at n = 1 the index 1 is the fixed point of m -> 2 - m
            let idx = if n == 1 { 2 } else { 1 };
            let mut bad = t.clone();
            bad[idx] = bad[idx].add(&WeylLaurentPoly::one(n, PMode::Symbolic));
            assert!(!check_symmetry(&bad, n));
        }
        let u = u_poly(2, PMode::Symbolic);
        assert!(!u.is_weyl_invariant());
    }

    #[test]
    fn v_polynomials_degree_one() {
        let t = sym(1);
        let v = v_polys(&t, 1).unwrap();
        assert_eq!(v[0], WeylLaurentPoly::one(1, PMode::Symbolic));
        assert_eq!(v[1], WeylLaurentPoly::monomial(1, PMode::Symbolic, qi(-1), 1, vec![-1]));
        for n in 1..=3 {
            assert!(v_polys(&sym(n), n).is_ok());
            for p in [2u64, 3, 5] {
                let tn = hecke_polynomial(n, PMode::Numeric(p)).unwrap();
                assert!(v_polys(&tn, n).is_ok());
                assert_eq!(tn, sym(n).iter().map(|x| x.specialise(p)).collect::<Vec<_>>());
            }
        }
        let mut bad = sym(2);
        bad[2] = bad[2].scale(&qi(2));
        assert!(matches!(v_polys(&bad, 2), Err(Error::FactorisationFailed(_))));
    }

    #[test]
    fn omega0_examples() {
        let id = vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]];
        assert_eq!(satake_omega0(&id, 3).unwrap(), WeylLaurentPoly::one(2, PMode::Numeric(3)));
        let d = vec![vec![qi(3), qi(0)], vec![qi(0), qi(9)]];
        let want = WeylLaurentPoly::monomial(2, PMode::Numeric(3), qi(1), -5, vec![1, 2]);
        assert_eq!(satake_omega0(&d, 3).unwrap(), want);
        let low = vec![vec![qi(1), qi(0)], vec![qi(7), qi(1)]];
        assert_eq!(satake_omega0(&low, 3).unwrap(), WeylLaurentPoly::one(2, PMode::Numeric(3)));
        // a unit row swap does not change the coset
        let sw = vec![vec![qi(0), qi(9)], vec![qi(3), qi(0)]];
        assert_eq!(satake_omega0(&sw, 3).unwrap(), want);
        let sing = vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]];
        assert!(matches!(satake_omega0(&sing, 3), Err(Error::NotPLocal(_))));
    }

    #[test]
    fn satake_params_and_euler_factor() {
        let sp = SatakeParams::new(3, vec![CycloNumber::from_int(2)]).unwrap();
        assert_eq!(sp.lambda0(), CycloNumber::from_int(6));
        assert_eq!(sp.ordinary(), Some(false));
        let sp5 = SatakeParams::new(5, vec![CycloNumber::from_rational(qr(3, 2))]).unwrap();
        assert_eq!(sp5.ordinary(), Some(false));
        let ord = SatakeParams::new(5, vec![CycloNumber::from_rational(qr(1, 5))]).unwrap();
        assert_eq!(ord.ordinary(), Some(true));
        let lam = qr(3, 2);
        let f = euler_factor(&sp5, false).unwrap();
        let want = [qi(1), -qi(5) * (&lam + lam.recip()), qi(25)];
        assert_eq!(f, want.iter().cloned().map(CycloNumber::from_rational).collect::<Vec<_>>());
        assert_eq!(euler_factor(&sp5, true).unwrap().len(), 2);
        let two = SatakeParams::new(3, vec![CycloNumber::from_int(2), CycloNumber::from_int(5)]).unwrap();
        assert_eq!(euler_factor(&two, false).unwrap().len(), 5);
        assert_eq!(euler_factor(&two, true).unwrap().len(), 3);
        assert_eq!(SatakeParams::new(3, vec![CycloNumber::zero()]).unwrap_err(), Error::ZeroSatakeParam);
        let t = sp5.hecke_eigenvalues().unwrap();
        assert_eq!(t[1], CycloNumber::from_rational(qi(5) * (&lam + lam.recip())));
    }

    #[test]
    fn truncated_l_product() {
        let mut m = BTreeMap::new();
        m.insert(3, (SatakeParams::new(3, vec![CycloNumber::one()]).unwrap(), false));
        m.insert(5, (SatakeParams::new(5, vec![CycloNumber::one()]).unwrap(), true));
        let v = standard_l_truncated(&m, |_| CycloNumber::one(), &qi(2), 5).unwrap();
        // (1 - 3/9)^{-2} (1 - 5/25)^{-1}
        let want = qr(9, 4) * qr(5, 4);
        assert_eq!(v, CycloNumber::from_rational(want));
        let only3 = standard_l_truncated(&m, |_| CycloNumber::one(), &qi(2), 4).unwrap();
        assert_eq!(only3, CycloNumber::from_rational(qr(9, 4)));
    }

    #[test]
    fn eigen_data_round_trip() {
        let sp = SatakeParams::new(5, vec![CycloNumber::zeta(4, 1)]).unwrap();
        let e = EigenData::from_params(&sp).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        let back: EigenData = serde_json::from_str(&s).unwrap();
        assert_eq!(back.params().unwrap(), sp);
        assert_eq!(back.t_values().unwrap(), sp.hecke_eigenvalues().unwrap());
    }
}
