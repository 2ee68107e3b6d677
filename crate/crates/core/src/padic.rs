//! Bounded-precision p-adic numbers, Teichmuller lifts and the embedding of
//! tame cyclotomic values into Z_p.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, euler_phi, factorize, mod_inverse, pow_u, qi, vp, Q};
use crate::chars::dirichlet::primitive_root;
use crate::chars::CycloNumber;
use crate::error::{Error, Result};

/// p^val * unit + O(p^(val + precision)). Zero is stored with `unit = 0` and
/// `val` equal to the absolute precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    p: u64,
    val: i64,
    unit: BigInt,
    precision: u32,
}

impl PadicNumber {
    /// Zero known modulo p^abs_prec.
    pub fn zero(p: u64, abs_prec: i64) -> Self {
        PadicNumber { p, val: abs_prec, unit: BigInt::zero(), precision: 0 }
    }

    pub fn from_rational(x: &Q, p: u64, n: u32) -> Result<Self> {
        if x.denom().is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if x.is_zero() {
            return Ok(Self::zero(p, n as i64));
        }
        let v = vp(x, p).unwrap();
        let pv = Q::from_integer(pow_u(p, v.unsigned_abs() as u32));
        let u = if v >= 0 { x / pv } else { x * pv };
        let m = pow_u(p, n);
        let inv = mod_inverse(u.denom(), &m).ok_or(Error::ZeroDenominator)?;
        let unit = (u.numer() * inv).mod_floor(&m);
        Ok(PadicNumber { p, val: v, unit, precision: n })
    }

    pub fn from_int(a: i64, p: u64, n: u32) -> Self {
        Self::from_rational(&qi(a), p, n).unwrap()
    }

    fn from_parts(p: u64, val: i64, unit: BigInt, precision: u32) -> Self {
        // renormalise so that the unit is prime to p
        if precision == 0 {
            return Self::zero(p, val);
        }
        let m = pow_u(p, precision);
        let mut unit = unit.mod_floor(&m);
        if unit.is_zero() {
            return Self::zero(p, val + precision as i64);
        }
        let shift = arith::vp_int(&unit, p);
        unit /= pow_u(p, shift);
        PadicNumber { p, val: val + shift as i64, unit, precision: precision - shift }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// Valuation; for a zero value this is the absolute precision.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    /// Known modulo p^abs.
    pub fn absolute_precision(&self) -> i64 {
        self.val + self.precision as i64
    }

    /// Residue of an integral value modulo p^k, k at most the absolute precision.
    pub fn residue(&self, k: u32) -> Option<BigInt> {
        if self.val < 0 || (k as i64) > self.absolute_precision() {
            return None;
        }
        let m = pow_u(self.p, k);
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        Some((&self.unit * pow_u(self.p, self.val as u32)).mod_floor(&m))
    }

    /// Lower the relative precision.
    pub fn with_precision(&self, n: u32) -> Self {
        if self.is_zero() || n >= self.precision {
            return self.clone();
        }
        Self::from_parts(self.p, self.val, self.unit.clone(), n)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        let abs = self.absolute_precision().min(o.absolute_precision());
        if self.is_zero() {
            return o.with_abs(abs);
        }
        if o.is_zero() {
            return self.with_abs(abs);
        }
        let v = self.val.min(o.val);
        let prec = abs - v;
        if prec <= 0 {
            return Self::zero(self.p, abs);
        }
        let a = &self.unit * pow_u(self.p, (self.val - v) as u32);
        let b = &o.unit * pow_u(self.p, (o.val - v) as u32);
        Self::from_parts(self.p, v, a + b, prec as u32)
    }

    fn with_abs(&self, abs: i64) -> Self {
        if self.is_zero() {
            return Self::zero(self.p, abs.min(self.val));
        }
        let prec = abs - self.val;
        if prec <= 0 {
            return Self::zero(self.p, abs);
        }
        self.with_precision(prec as u32)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = pow_u(self.p, self.precision);
        PadicNumber { p: self.p, val: self.val, unit: (-&self.unit).mod_floor(&m), precision: self.precision }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p, self.val + o.val);
        }
        let prec = self.precision.min(o.precision);
        Self::from_parts(self.p, self.val + o.val, &self.unit * &o.unit, prec)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let m = pow_u(self.p, self.precision);
        let u = mod_inverse(&self.unit, &m).ok_or(Error::ZeroDenominator)?;
        Ok(PadicNumber { p: self.p, val: -self.val, unit: u, precision: self.precision })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::from_int(1, self.p, self.precision.max(1));
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Agreement of the two values modulo p^k (k bounded by both precisions).
    pub fn congruent(&self, o: &Self, k: i64) -> bool {
        self.sub(o).val >= k
    }

    /// Whether both are known to agree to their common absolute precision.
    pub fn agrees(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    pub fn to_json(&self) -> PadicJson {
        PadicJson {
            p: self.p,
            val_num: self.val,
            val_den: 1,
            unit: self.unit.to_string(),
            precision: self.precision,
        }
    }

    pub fn from_json(j: &PadicJson) -> Result<Self> {
        if j.val_den != 1 {
            return Err(Error::Input("ramified valuations are not representable".into()));
        }
        let unit: BigInt = j.unit.parse().map_err(|_| Error::Input(format!("bad unit {}", j.unit)))?;
        Ok(Self::from_parts(j.p, j.val_num, unit, j.precision))
    }
}

/// Serialised form {p, val_num, val_den, unit, precision}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicJson {
    pub p: u64,
    pub val_num: i64,
    pub val_den: i64,
    pub unit: String,
    pub precision: u32,
}

impl Serialize for PadicNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PadicJson::deserialize(d)?;
        PadicNumber::from_json(&j).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.val);
        }
        if self.val == 0 {
            write!(f, "{} + O({}^{})", self.unit, self.p, self.absolute_precision())
        } else {
            write!(f, "{}*{}^{} + O({}^{})", self.unit, self.p, self.val, self.p, self.absolute_precision())
        }
    }
}

/// The (p-1)-st root of unity congruent to a mod p, modulo p^n.
pub fn teichmuller(a: i64, p: u64, n: u32) -> Result<PadicNumber> {
    if a.rem_euclid(p as i64) == 0 {
        return Err(Error::NotAUnit(a.to_string(), p));
    }
    let m = pow_u(p, n);
    let mut x = BigInt::from(a).mod_floor(&m);
    loop {
        let y = x.modpow(&BigInt::from(p), &m);
        if y == x {
            break;
        }
        x = y;
    }
    Ok(PadicNumber::from_parts(p, 0, x, n))
}

/// Image of zeta_d for d | p-1 under the fixed embedding zeta_d -> omega(g)^{(p-1)/d},
/// g the smallest primitive root mod p.
pub fn embed_root_of_unity(d: u64, k: i64, p: u64, n: u32) -> Result<PadicNumber> {
    if (p - 1) % d != 0 {
        return Err(Error::NotEmbeddable { order: d, p });
    }
    let g = primitive_root(p, 1);
    let w = teichmuller(g as i64, p, n)?;
    let e = ((p - 1) / d) as i64 * k.rem_euclid(d as i64);
    w.pow(e)
}

/// iota_p of a cyclotomic number whose minimal order divides p - 1, to relative precision n.
pub fn embed_cyclo(x: &CycloNumber, p: u64, n: u32) -> Result<PadicNumber> {
    let x = x.minimal();
    let d = x.order();
    if d % p == 0 {
        return Err(Error::WildPartUnsupported { order: d, p });
    }
    if (p - 1) % d != 0 {
        return Err(Error::NotEmbeddable { order: d, p });
    }
    if x.is_zero() {
        return Ok(PadicNumber::zero(p, i64::from(n)));
    }
    if let Some(q) = x.as_rational() {
        return PadicNumber::from_rational(&q, p, n);
    }
    // work with p^E x, which is p-integral, modulo a growing power of p
    let e_den: i64 = x
        .coeffs()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| -vp(c, p).unwrap().min(0))
        .max()
        .unwrap_or(0);
    let mut extra = n;
    loop {
        let m_abs = n + extra + e_den as u32;
        let modulus = pow_u(p, m_abs);
        let g = primitive_root(p, 1);
        let w = teichmuller(g as i64, p, m_abs)?;
        let step = (p - 1) / d;
        let zeta = w.pow(step as i64)?.residue(m_abs).unwrap();
        let mut acc = BigInt::zero();
        let mut zp = BigInt::one();
        let scale = Q::from_integer(pow_u(p, e_den as u32));
        for c in x.coeffs() {
            if !c.is_zero() {
                let y = c * &scale;
                let inv = mod_inverse(y.denom(), &modulus).ok_or(Error::ZeroDenominator)?;
                acc += y.numer() * inv % &modulus * &zp;
            }
            zp = zp * &zeta % &modulus;
        }
        acc = acc.mod_floor(&modulus);
        let val = PadicNumber::from_parts(p, -e_den, acc, m_abs);
        if !val.is_zero() && val.precision() >= n {
            return Ok(val.with_precision(n));
        }
        extra *= 2;
        if extra > 4096 {
            return Err(Error::PrecisionTooLow { have: val.precision() as i64, need: n as i64 });
        }
    }
}

/// v_p(x) for x in Q(zeta_{p^e}), by repeated exact division by 1 - zeta.
pub fn valuation_cyclo(x: &CycloNumber, p: u64) -> Result<Q> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let x = x.minimal();
    let m = x.order();
    if x.is_rational() {
        return Ok(qi(vp(&x.coeffs()[0], p).unwrap()));
    }
    let fac = factorize(m);
    // m is canonical, so m = 4 stands for the 2-power case
    if fac.len() != 1 || fac[0].0 != p {
        return Err(Error::Input(format!("order {m} is not a power of {p}")));
    }
    let phi = euler_phi(m) as i64;
    // clear denominators: y = D x with y p-integral
    let den = x.denominator();
    let dv = arith::vp_int(&den, p) as i64;
    let y: Vec<Q> = x.coeffs().iter().map(|c| c * Q::from_integer(den.clone())).collect();
    let cyc = crate::chars::cyclo::cyclotomic_poly(m);
    let mut y = y;
    let mut count = 0i64;
    let pq = qi(p as i64);
    loop {
        let at_one: Q = y.iter().cloned().sum();
        let residue_zero = at_one.is_zero() || vp(&at_one, p).unwrap() >= 1;
        if !residue_zero {
            break;
        }
        // y - (y(1)/p) Phi vanishes at 1; divide by (1 - x)
        let k = &at_one / &pq;
        let mut poly: Vec<Q> = y.clone();
        poly.resize(cyc.len(), Q::zero());
        for (i, &c) in cyc.iter().enumerate() {
            poly[i] -= &k * qi(c);
        }
        // poly(x) = (1 - x) q(x): q_0 = poly_0, q_i = q_{i-1} + poly_i
        let mut q = vec![Q::zero(); poly.len() - 1];
        let mut run = Q::zero();
        for i in 0..poly.len() - 1 {
            run += &poly[i];
            q[i] = run.clone();
        }
        debug_assert!((run + &poly[poly.len() - 1]).is_zero());
        let red = CycloNumber::from_exponent_vec(m, q).lift(m);
        y = red.coeffs().to_vec();
        count += 1;
        if count > 10_000 {
            return Err(Error::ZeroElement);
        }
    }
    Ok(Q::new(count.into(), phi.into()) - qi(dv))
}

/// v_p(x) via the field norm; correct when p has a unique prime above it.
pub fn valuation_by_norm(x: &CycloNumber, p: u64) -> Result<Q> {
    if x.is_zero() {
        return Err(Error::ZeroElement);
    }
    let x = x.minimal();
    let deg = euler_phi(x.order()) as i64;
    Ok(Q::new(vp(&x.norm(), p).unwrap().into(), deg.into()))
}

/// p-adic valuation under the fixed embedding when it is determined; None otherwise.
pub fn valuation_general(x: &CycloNumber, p: u64) -> Option<Q> {
    if x.is_zero() {
        return None;
    }
    let x = x.minimal();
    if let Some(q) = x.as_rational() {
        return vp(&q, p).map(qi);
    }
    let m = x.order();
    if m % p != 0 && (p - 1) % m == 0 {
        return embed_cyclo(&x, p, 8).ok().map(|v| qi(v.valuation()));
    }
    if factorize(m).len() == 1 && m % p == 0 {
        return valuation_cyclo(&x, p).ok();
    }
    // all conjugates share one valuation when the norm is a p-adic unit;
    // strip the rational content first
    let content = x.coeffs().iter().fold(Q::zero(), |g, c| arith::rational_gcd(&g, c));
    let y = x.scale(&content.recip());
    if vp(&y.norm(), p) == Some(0) {
        return vp(&content, p).map(qi);
    }
    None
}

impl PadicNumber {
    /// Value as a signed integer representative when integral and small.
    pub fn to_i64(&self) -> Option<i64> {
        self.residue(self.absolute_precision().max(0) as u32)?.to_i64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    #[test]
    fn from_rational_examples() {
        let one = PadicNumber::from_int(1, 5, 4);
        assert_eq!((one.valuation(), one.unit().clone()), (0, BigInt::from(1)));
        let x = PadicNumber::from_int(50, 5, 4);
        assert_eq!((x.valuation(), x.unit().clone()), (2, BigInt::from(2)));
        let y = PadicNumber::from_rational(&qr(1, 3), 5, 2).unwrap();
        assert_eq!(y.unit(), &BigInt::from(17));
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(2, 5, 2).unwrap().unit(), &BigInt::from(7));
        assert_eq!(teichmuller(1, 7, 5).unwrap(), PadicNumber::from_int(1, 7, 5));
        for p in [3u64, 5, 7, 11, 13] {
            for a in 1..p as i64 {
                let w = teichmuller(a, p, 6).unwrap();
                assert_eq!(w.pow(p as i64 - 1).unwrap(), PadicNumber::from_int(1, p, 6));
                let again = teichmuller(w.residue(1).unwrap().to_i64().unwrap(), p, 6).unwrap();
                assert_eq!(again, w);
            }
        }
        assert!(teichmuller(10, 5, 3).is_err());
    }

    #[test]
    fn embedding_convention() {
        let i = CycloNumber::zeta(4, 1);
        assert_eq!(embed_cyclo(&i, 5, 2).unwrap().unit(), &BigInt::from(7));
        let m1 = embed_cyclo(&CycloNumber::zeta(4, 2), 5, 2).unwrap();
        assert_eq!(m1.unit(), &BigInt::from(24));
        let r = embed_cyclo(&CycloNumber::from_rational(qr(3, 10)), 5, 3).unwrap();
        assert_eq!(r, PadicNumber::from_rational(&qr(3, 10), 5, 3).unwrap());
        assert!(matches!(embed_cyclo(&CycloNumber::zeta(5, 1), 5, 2), Err(Error::WildPartUnsupported { .. })));
        assert!(matches!(embed_cyclo(&CycloNumber::zeta(3, 1), 5, 2), Err(Error::NotEmbeddable { .. })));
    }

    #[test]
    fn valuations_on_p_power_orders() {
        assert_eq!(valuation_cyclo(&CycloNumber::from_int(5), 5).unwrap(), qi(1));
        let pi = CycloNumber::one() - CycloNumber::zeta(5, 1);
        assert_eq!(valuation_cyclo(&pi, 5).unwrap(), qr(1, 4));
        let pi9 = CycloNumber::one() - CycloNumber::zeta(9, 1);
        let cube = pi9.pow(3).unwrap();
        assert_eq!(valuation_cyclo(&cube, 3).unwrap(), qr(1, 2));
        assert_eq!(valuation_by_norm(&cube, 3).unwrap(), qr(1, 2));
        assert_eq!(valuation_cyclo(&CycloNumber::zero(), 3).unwrap_err(), Error::ZeroElement);
    }

    #[test]
    fn arithmetic_tracks_precision() {
        let a = PadicNumber::from_int(7, 5, 3);
        let b = PadicNumber::from_int(-2, 5, 3);
        let s = a.add(&b);
        assert_eq!(s.valuation(), 1);
        assert_eq!(s.precision(), 2);
        assert_eq!(a.mul(&b), PadicNumber::from_int(-14, 5, 3));
        let z = a.sub(&a);
        assert!(z.is_zero());
        assert_eq!(z.absolute_precision(), 3);
    }

    #[test]
    fn json_round_trip() {
        let x = PadicNumber::from_rational(&qr(50, 3), 5, 4).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        let y: PadicNumber = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }
}
