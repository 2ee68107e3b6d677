//! Exact elements of cyclotomic fields over the power basis.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, euler_phi, factorize, fmt_q, gcd_u64, kronecker, lcm_u64, qi, Q};
use crate::error::{Error, Result};

fn poly_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of the m-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_poly(m: u64) -> Arc<Vec<i64>> {
    if let Some(p) = poly_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by every proper divisor's cyclotomic polynomial
    let mut num: Vec<i64> = vec![0; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in arith::divisors(m) {
        if d == m {
            continue;
        }
        let den = cyclotomic_poly(d);
        num = poly_div_exact(&num, &den);
    }
    let arc = Arc::new(num);
    poly_cache().lock().unwrap().insert(m, arc.clone());
    arc
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qn = num.len() - 1 - dn;
    let mut quo = vec![0i64; qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn] / den[dn];
        quo[i] = c;
        for j in 0..=dn {
            rem[i + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quo
}

/// An element of Q(zeta_m). The order is kept off 2 mod 4 since
/// Q(zeta_2k) = Q(zeta_k) for odd k.
#[derive(Clone, Debug)]
pub struct CycloNumber {
    order: u64,
    coeffs: Vec<Q>,
}

fn canonical_order(m: u64) -> u64 {
    if m % 4 == 2 {
        m / 2
    } else {
        m
    }
}

impl CycloNumber {
    pub fn zero() -> Self {
        Self::from_rational(Q::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Q::one())
    }

    pub fn from_rational(q: Q) -> Self {
        CycloNumber { order: 1, coeffs: vec![q] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(qi(n))
    }

    /// zeta_m^k with zeta_m = exp(2 pi i / m).
    pub fn zeta(m: u64, k: i64) -> Self {
        assert!(m > 0);
        if m % 4 == 2 {
            let h = m / 2;
            let sign = if k.rem_euclid(2) == 1 { -1 } else { 1 };
            let e = k * ((h as i64 + 1) / 2);
            return Self::zeta(h, e).scale(&qi(sign));
        }
        let mut v = vec![Q::zero(); m as usize];
        v[k.rem_euclid(m as i64) as usize] = Q::one();
        Self::from_exponent_vec(m, v)
    }

    /// Builds Sum c_j zeta_m^j from a dense vector indexed by exponent (any length).
    pub fn from_exponent_vec(m: u64, v: Vec<Q>) -> Self {
        let m = m.max(1);
        let mut folded = vec![Q::zero(); m as usize];
        for (i, c) in v.into_iter().enumerate() {
            if !c.is_zero() {
                folded[i % m as usize] += c;
            }
        }
        if m % 4 == 2 {
            // rewrite through zeta_m = -zeta_{m/2}^{(m/2+1)/2}
            let mut acc = Self::zero();
            for (i, c) in folded.into_iter().enumerate() {
                if !c.is_zero() {
                    acc = acc + Self::zeta(m, i as i64).scale(&c);
                }
            }
            return acc;
        }
        let coeffs = reduce_mod_cyclotomic(m, folded);
        CycloNumber { order: m, coeffs }
    }

    /// Exponent counts: Sum counts[j] zeta_m^j with integer multiplicities.
    pub fn from_counts(m: u64, counts: &[i64]) -> Self {
        Self::from_exponent_vec(m, counts.iter().map(|&c| qi(c)).collect())
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// The same number expressed in Q(zeta_big); `big` must be a multiple of the order.
    pub fn lift(&self, big: u64) -> Self {
        let big = canonical_order(big);
        if big == self.order {
            return self.clone();
        }
        assert!(big % self.order == 0, "lift to non-multiple order");
        let step = (big / self.order) as usize;
        let mut v = vec![Q::zero(); big as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            v[(i * step) % big as usize] = c.clone();
        }
        Self::from_exponent_vec(big, v)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        let m = lcm_u64(a.order, b.order);
        (a.lift(m), b.lift(m))
    }

    pub fn scale(&self, q: &Q) -> Self {
        CycloNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Galois automorphism zeta -> zeta^a (a coprime to the order).
    pub fn galois(&self, a: i64) -> Self {
        let m = self.order;
        let mut v = vec![Q::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = (i as i64 * a).rem_euclid(m as i64) as usize;
            v[j] += c.clone();
        }
        Self::from_exponent_vec(m, v)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiplicative inverse, by solving the linear system of multiplication.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(q.recip()));
        }
        let m = self.order;
        let n = self.coeffs.len();
        // column j = self * zeta^j
        let cols: Vec<Vec<Q>> = (0..n)
            .map(|j| (self * &Self::zeta(m, j as i64)).lift(m).coeffs)
            .collect();
        let a: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect();
        let mut b = vec![Q::zero(); n];
        b[0] = Q::one();
        let x = arith::solve_q(&a, &b).ok_or(Error::ZeroDenominator)?;
        Ok(CycloNumber { order: m, coeffs: x })
    }

    /// Field norm down to Q.
    pub fn norm(&self) -> Q {
        let m = self.order;
        let mut acc = Self::one();
        for a in 1..m.max(2) {
            if gcd_u64(a, m) == 1 {
                acc = &acc * &self.galois(a as i64);
            }
        }
        acc.as_rational().expect("norm is rational")
    }

    /// Tries to express the number in Q(zeta_d) for d dividing the order.
    pub fn descend(&self, d: u64) -> Option<Self> {
        let d = canonical_order(d);
        if self.order % d != 0 {
            return None;
        }
        if d == self.order {
            return Some(self.clone());
        }
        let phi_d = euler_phi(d) as usize;
        let basis: Vec<Vec<Q>> = (0..phi_d)
            .map(|j| Self::zeta(d, j as i64).lift(self.order).coeffs)
            .collect();
        let rows = self.coeffs.len();
        let a: Vec<Vec<Q>> = (0..rows)
            .map(|i| (0..phi_d).map(|j| basis[j][i].clone()).collect())
            .collect();
        let x = arith::solve_overdetermined_q(&a, &self.coeffs)?;
        Some(CycloNumber { order: d, coeffs: x })
    }

    /// Representation in the smallest cyclotomic field containing the number.
    pub fn minimal(&self) -> Self {
        if self.is_rational() {
            return Self::from_rational(self.coeffs[0].clone());
        }
        for d in arith::divisors(self.order) {
            if d % 4 == 2 {
                continue;
            }
            if let Some(x) = self.descend(d) {
                return x;
            }
        }
        self.clone()
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let cf = c.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * i as f64 / m;
            re += cf * ang.cos();
            im += cf * ang.sin();
        }
        Complex64::new(re, im)
    }

    /// True when every power-basis coefficient is p-integral and divisible by p^r.
    /// Since Z[zeta_m] has the power basis as a Z-basis, this is membership in
    /// p^r times the ring of integers localised at p.
    pub fn divisible_by_p_power(&self, p: u64, r: u32) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.is_zero() || arith::vp(c, p).unwrap() >= r as i64)
    }

    /// Largest common denominator of the power-basis coefficients.
    pub fn denominator(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

fn reduce_mod_cyclotomic(m: u64, mut v: Vec<Q>) -> Vec<Q> {
    let phi = cyclotomic_poly(m);
    let d = phi.len() - 1;
    for top in (d..v.len()).rev() {
        if v[top].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut v[top]);
        for (j, &pj) in phi.iter().enumerate().take(d) {
            if pj != 0 {
                let idx = top - d + j;
                v[idx] -= &c * qi(pj);
            }
        }
    }
    v.truncate(d);
    v.resize(d, Q::zero());
    v
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNumber {}

impl From<Q> for CycloNumber {
    fn from(q: Q) -> Self {
        Self::from_rational(q)
    }
}

impl From<i64> for CycloNumber {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl<'a> std::ops::Add<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        let (mut a, b) = CycloNumber::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl<'a> std::ops::Sub<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        let (mut a, b) = CycloNumber::common(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl<'a> std::ops::Mul<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        if let Some(q) = self.as_rational() {
            return rhs.scale(&q);
        }
        if let Some(q) = rhs.as_rational() {
            return self.scale(&q);
        }
        let (a, b) = CycloNumber::common(self, rhs);
        let n = a.coeffs.len();
        let mut prod = vec![Q::zero(); 2 * n - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        CycloNumber {
            order: a.order,
            coeffs: reduce_mod_cyclotomic(a.order, prod),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr<CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: CycloNumber) -> CycloNumber {
                std::ops::$tr::$m(&self, &rhs)
            }
        }
        impl<'a> std::ops::$tr<&'a CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: &CycloNumber) -> CycloNumber {
                std::ops::$tr::$m(&self, rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::ops::Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        self.scale(&-Q::one())
    }
}

impl std::iter::Sum for CycloNumber {
    fn sum<I: Iterator<Item = CycloNumber>>(iter: I) -> CycloNumber {
        iter.fold(CycloNumber::zero(), |a, b| a + b)
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.minimal();
        if let Some(q) = x.as_rational() {
            return write!(f, "{}", fmt_q(&q));
        }
        let mut first = true;
        for (i, c) in x.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c.clone()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let term = match i {
                0 => String::new(),
                1 => format!("z{}", x.order),
                _ => format!("z{}^{}", x.order, i),
            };
            if i == 0 {
                write!(f, "{}", fmt_q(&mag))?;
            } else if mag.is_one() {
                write!(f, "{term}")?;
            } else {
                write!(f, "{}*{term}", fmt_q(&mag))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    order: u64,
    coeffs: Vec<String>,
}

impl Serialize for CycloNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let x = self.minimal();
        CycloRepr {
            order: x.order,
            coeffs: x.coeffs.iter().map(fmt_q).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CycloRepr::deserialize(d)?;
        if r.order == 0 {
            return Err(serde::de::Error::custom("cyclotomic order must be positive"));
        }
        let coeffs = r
            .coeffs
            .iter()
            .map(|s| arith::parse_q(s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CycloNumber::from_exponent_vec(r.order, coeffs))
    }
}

/// Positive square root of a prime, as a cyclotomic integer.
pub fn sqrt_prime(q: u64) -> CycloNumber {
    if q == 2 {
        return CycloNumber::zeta(8, 1) + CycloNumber::zeta(8, -1);
    }
    let counts: Vec<i64> = (0..q).map(|a| kronecker(a as i64, q) as i64).collect();
    let g = CycloNumber::from_counts(q, &counts);
    if q % 4 == 1 {
        g
    } else {
        // g = i sqrt(q) here
        -(CycloNumber::zeta(4, 1) * g)
    }
}

/// sqrt(x) for rational x, with sqrt(-y) = i sqrt(y) for y > 0.
pub fn sqrt_rational(x: &Q) -> CycloNumber {
    if x.is_zero() {
        return CycloNumber::zero();
    }
    let mut acc = CycloNumber::one();
    let mut rat = Q::one();
    for (part, invert) in [(x.numer().abs(), false), (x.denom().abs(), true)] {
        let n = part.to_u64().expect("radicand fits in u64");
        for (p, e) in factorize(n) {
            let half = arith::pow_u(p, e / 2);
            if invert {
                rat /= Q::from_integer(half);
            } else {
                rat *= Q::from_integer(half);
            }
            if e % 2 == 1 {
                let s = sqrt_prime(p);
                if invert {
                    acc = acc * s.scale(&Q::new(BigInt::one(), BigInt::from(p)));
                } else {
                    acc = acc * s;
                }
            }
        }
    }
    let mut out = acc.scale(&rat);
    if x.is_negative() {
        out = CycloNumber::zeta(4, 1) * out;
    }
    out
}

/// base^e for a rational exponent with denominator 1 or 2.
pub fn pow_rational(base: &Q, e: &Q) -> Result<CycloNumber> {
    let den = e.denom();
    if den.is_one() {
        let k = e.numer().to_i64().ok_or_else(|| Error::IrrationalExponent(fmt_q(e)))?;
        if base.is_zero() {
            return if k > 0 {
                Ok(CycloNumber::zero())
            } else if k == 0 {
                Ok(CycloNumber::one())
            } else {
                Err(Error::ZeroDenominator)
            };
        }
        return Ok(CycloNumber::from_rational(arith::pow_q(base, k)));
    }
    if *den != BigInt::from(2) {
        if let Some(r) = exact_root(base, den) {
            let k = e.numer().to_i64().unwrap();
            return pow_rational(&r, &qi(k));
        }
        return Err(Error::IrrationalExponent(format!("{}^{}", fmt_q(base), fmt_q(e))));
    }
    if base.is_zero() {
        return if e.is_positive() {
            Ok(CycloNumber::zero())
        } else {
            Err(Error::ZeroDenominator)
        };
    }
    let k = e.numer().to_i64().ok_or_else(|| Error::IrrationalExponent(fmt_q(e)))?;
    let s = sqrt_rational(base);
    s.pow(k)
}

fn exact_root(base: &Q, den: &BigInt) -> Option<Q> {
    let d = den.to_u32()?;
    if base.is_negative() && d % 2 == 0 {
        return None;
    }
    let root = |n: &BigInt| -> Option<BigInt> {
        let r = n.abs().nth_root(d);
        if num_traits::pow(r.clone(), d as usize) == n.abs() {
            Some(if n.is_negative() { -r } else { r })
        } else {
            None
        }
    };
    Some(Q::new(root(base.numer())?, root(base.denom())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-10
    }

    #[test]
    fn zeta_powers_close_the_circle() {
        let z = CycloNumber::zeta(12, 1);
        assert_eq!(z.pow(12).unwrap(), CycloNumber::one());
        assert_ne!(z.pow(6).unwrap(), CycloNumber::one());
        assert_eq!(z.pow(6).unwrap(), CycloNumber::from_int(-1));
    }

    #[test]
    fn order_two_mod_four_is_folded() {
        let z6 = CycloNumber::zeta(6, 1);
        assert_eq!(z6.order(), 3);
        let expect = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        assert!(close(z6.to_complex(), expect));
    }

    #[test]
    fn inverse_round_trip() {
        let x = CycloNumber::zeta(5, 1) + CycloNumber::from_rational(qr(3, 2));
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, CycloNumber::one());
    }

    #[test]
    fn square_roots_are_positive_reals() {
        for q in [2u64, 3, 5, 7, 11, 13] {
            let s = sqrt_prime(q);
            assert!(close(s.to_complex(), Complex64::new((q as f64).sqrt(), 0.0)), "q={q}");
            assert_eq!(&s * &s, CycloNumber::from_int(q as i64));
        }
        let s = sqrt_rational(&qr(-3, 8));
        assert_eq!(&s * &s, CycloNumber::from_rational(qr(-3, 8)));
    }

    #[test]
    fn descend_finds_subfield() {
        let x = CycloNumber::zeta(3, 1).lift(12);
        assert_eq!(x.order(), 12);
        assert_eq!(x.minimal().order(), 3);
        assert_eq!(sqrt_prime(5).lift(20).minimal().order(), 5);
    }

    #[test]
    fn norm_of_one_minus_zeta() {
        assert_eq!(
            (CycloNumber::one() - CycloNumber::zeta(7, 1)).norm(),
            qi(7)
        );
    }

    #[test]
    fn serde_round_trip() {
        let x = CycloNumber::zeta(8, 3).scale(&qr(-5, 3)) + CycloNumber::from_int(2);
        let s = serde_json::to_string(&x).unwrap();
        let y: CycloNumber = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
