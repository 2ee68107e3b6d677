//! Special values, the constant C*_{+/-}(sigma, m) and local polynomial data.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_q, pow_q, qi, qr, Q};
use crate::chars::cyclo::pow_rational;
use crate::chars::CycloNumber;
use crate::error::{Error, Result};
use crate::symlat::HalfIntSymMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Weight k (half-integral), degree n and the parity shift mu.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightData {
    pub n: usize,
    pub weight: Q,
    pub mu: u32,
}

impl WeightData {
    pub fn new(n: usize, weight: Q, mu: u32) -> Result<Self> {
        if *weight.denom() != 2.into() {
            return Err(Error::Input(format!("weight {} is not half-integral", fmt_q(&weight))));
        }
        if mu > 1 {
            return Err(Error::Input(format!("mu = {mu} must be 0 or 1")));
        }
        Ok(WeightData { n, weight, mu })
    }

    fn k_mu(&self) -> Q {
        &self.weight - qi(self.mu as i64)
    }

    /// Which of the two special-value sets contains m.
    pub fn omega(&self, m: &Q) -> Option<Sign> {
        let n = qi(self.n as i64);
        let plus = (self.k_mu() - m) / qi(2);
        if plus.is_integer() && *m > n && *m <= self.k_mu() {
            return Some(Sign::Plus);
        }
        let minus = (m + self.k_mu() - qi(1)) / qi(2);
        if minus.is_integer() && qi(2 * self.n as i64 + 1) - self.k_mu() <= *m && *m <= n {
            return Some(Sign::Minus);
        }
        None
    }

    /// Every special value, ascending.
    pub fn omega_values(&self) -> Vec<(Q, Sign)> {
        let lo = qi(2 * self.n as i64 + 1) - self.k_mu();
        let mut out = Vec::new();
        let mut m = lo.floor() - qr(1, 2);
        while m <= self.k_mu() {
            if let Some(s) = self.omega(&m) {
                out.push((m.clone(), s));
            }
            m += qr(1, 2);
        }
        out
    }

    /// Membership plus the exclusions m = n + 1/2 and, for n > 1 with a
    /// quadratic-or-trivial twist, m = n + 3/2.
    pub fn admissible(&self, m: &Q, twist_sq_trivial: bool) -> Result<Sign> {
        let sign = self.omega(m).ok_or_else(|| Error::NotSpecialValue(fmt_q(m)))?;
        let n = qi(self.n as i64);
        if *m == &n + qr(1, 2) || (self.n > 1 && twist_sq_trivial && *m == &n + qr(3, 2)) {
            return Err(Error::ExcludedSpecialValue(fmt_q(m)));
        }
        Ok(sign)
    }

    /// beta_+ = (k-m-mu)/2, beta_- = (k+m-mu-1-2n)/2.
    pub fn beta(&self, m: &Q, sign: Sign) -> Result<u32> {
        let b = match sign {
            Sign::Plus => (self.k_mu() - m) / qi(2),
            Sign::Minus => (self.k_mu() + m - qi(1 + 2 * self.n as i64)) / qi(2),
        };
        if !b.is_integer() || b.is_negative() {
            return Err(Error::NotSpecialValue(fmt_q(m)));
        }
        Ok(b.to_integer().to_u32().unwrap())
    }

    /// s' of the projection context: (2n+1-k+mu-m)/2 or (m-k+mu)/2.
    pub fn s_prime(&self, m: &Q, sign: Sign) -> Q {
        match sign {
            Sign::Plus => (qi(2 * self.n as i64 + 1) - self.k_mu() - m) / qi(2),
            Sign::Minus => (m - self.k_mu()) / qi(2),
        }
    }
}

/// Gamma_n(a)^e.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GammaToken {
    pub n: usize,
    #[serde(with = "crate::arith::serde_q")]
    pub arg: Q,
    pub exp: i64,
}

/// algebraic * i^{i_exp} * prod base^e * pi^{pi_exp} * prod Gamma_n(a)^e.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicConstant {
    pub algebraic: CycloNumber,
    pub i_exp: u8,
    pub powers: BTreeMap<Q, Q>,
    pub pi_exp: Q,
    pub gamma: Vec<GammaToken>,
}

impl SymbolicConstant {
    pub fn one() -> Self {
        SymbolicConstant {
            algebraic: CycloNumber::one(),
            i_exp: 0,
            powers: BTreeMap::new(),
            pi_exp: Q::zero(),
            gamma: Vec::new(),
        }
    }

    pub fn from_algebraic(x: CycloNumber) -> Self {
        SymbolicConstant { algebraic: x, ..Self::one() }
    }

    pub fn i_power(e: i64) -> Self {
        SymbolicConstant { i_exp: e.rem_euclid(4) as u8, ..Self::one() }
    }

    pub fn power(base: Q, e: Q) -> Self {
        let mut s = Self::one();
        s.push_power(base, e);
        s
    }

    pub fn pi_power(e: Q) -> Self {
        SymbolicConstant { pi_exp: e, ..Self::one() }
    }

    pub fn gamma_power(n: usize, arg: Q, exp: i64) -> Self {
        let mut s = Self::one();
        s.push_gamma(GammaToken { n, arg, exp });
        s
    }

    fn push_power(&mut self, base: Q, e: Q) {
        if e.is_zero() || base.is_one() {
            return;
        }
        assert!(base.is_positive(), "power base must be positive");
        let slot = self.powers.entry(base.clone()).or_insert_with(Q::zero);
        *slot += e;
        if slot.is_zero() {
            self.powers.remove(&base);
        }
    }

    fn push_gamma(&mut self, g: GammaToken) {
        if g.exp == 0 {
            return;
        }
        if let Some(pos) = self.gamma.iter().position(|h| h.n == g.n && h.arg == g.arg) {
            self.gamma[pos].exp += g.exp;
            if self.gamma[pos].exp == 0 {
                self.gamma.remove(pos);
            }
        } else {
            self.gamma.push(g);
            self.gamma.sort();
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.algebraic = &self.algebraic * &o.algebraic;
        out.i_exp = (self.i_exp + o.i_exp) % 4;
        for (b, e) in &o.powers {
            out.push_power(b.clone(), e.clone());
        }
        out.pi_exp += &o.pi_exp;
        for g in &o.gamma {
            out.push_gamma(g.clone());
        }
        out
    }

    /// Same symbolic factors, algebraic parts added.
    pub fn add_like(&self, o: &Self) -> Result<Self> {
        if self.i_exp != o.i_exp || self.powers != o.powers || self.pi_exp != o.pi_exp || self.gamma != o.gamma {
            return Err(Error::Input("symbolic constants with different transcendental factors".into()));
        }
        let mut out = self.clone();
        out.algebraic = &self.algebraic + &o.algebraic;
        Ok(out)
    }

    pub fn scale_algebraic(&self, x: &CycloNumber) -> Self {
        SymbolicConstant { algebraic: &self.algebraic * x, ..self.clone() }
    }

    /// Everything but the pi and Gamma tokens, as a cyclotomic number.
    pub fn algebraic_part(&self) -> Result<CycloNumber> {
        let mut acc = &self.algebraic * &CycloNumber::zeta(4, self.i_exp as i64);
        for (b, e) in &self.powers {
            acc = &acc * &pow_rational(b, e)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for SymbolicConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.algebraic)?;
        if self.i_exp != 0 {
            write!(f, " * i^{}", self.i_exp)?;
        }
        for (b, e) in &self.powers {
            write!(f, " * {}^({})", fmt_q(b), fmt_q(e))?;
        }
        if !self.pi_exp.is_zero() {
            write!(f, " * pi^({})", fmt_q(&self.pi_exp))?;
        }
        for g in &self.gamma {
            write!(f, " * Gamma_{}({})^{}", g.n, fmt_q(&g.arg), g.exp)?;
        }
        Ok(())
    }
}

/// Integer polynomials indexed by prime, coefficients from the constant term up.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocalPolys(pub BTreeMap<u64, Vec<i64>>);

impl LocalPolys {
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: BTreeMap<String, Vec<i64>> = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        let mut out = BTreeMap::new();
        for (k, v) in raw {
            let q: u64 = k.trim().parse().map_err(|_| Error::Input(format!("bad prime key {k:?}")))?;
            if !crate::arith::is_prime(q) {
                return Err(Error::Input(format!("{q} is not prime")));
            }
            out.insert(q, v);
        }
        Ok(LocalPolys(out))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.0).unwrap()
    }

    /// Shape of the f_{sigma,q} family: no constant term, q != p.
    pub fn validate_f(&self, p: Option<u64>) -> Result<()> {
        for (&q, c) in &self.0 {
            if Some(q) == p {
                return Err(Error::BadPrime(q));
            }
            if c.first().is_some_and(|&c0| c0 != 0) {
                return Err(Error::ConstantTermPresent(q));
            }
        }
        Ok(())
    }

    /// Shape of the g_q: constant term 1.
    pub fn validate_g(&self, p: Option<u64>) -> Result<()> {
        for (&q, c) in &self.0 {
            if Some(q) == p {
                return Err(Error::BadPrime(q));
            }
            if c.first() != Some(&1) {
                return Err(Error::BadConstantTerm(q));
            }
        }
        Ok(())
    }

    /// prod_q f_q(arg(q)).
    pub fn product(&self, arg: impl Fn(u64) -> CycloNumber) -> CycloNumber {
        let mut acc = CycloNumber::one();
        for (&q, c) in &self.0 {
            let x = arg(q);
            let mut v = CycloNumber::zero();
            for a in c.iter().rev() {
                v = &(&v * &x) + &CycloNumber::from_int(*a);
            }
            acc = &acc * &v;
        }
        acc
    }
}

/// Level data entering C*: N(b) and N(y_r) as rationals, plus the weight data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CStarParams {
    pub weights: WeightData,
    pub norm_b: Q,
    pub norm_y: Q,
}

/// The sigma-independent part of C*_{+/-}(sigma, m):
/// i^{-n[k-n/2-mu]} N(b^2 y_r)^{n((3n-2m)/2-k+mu)} 2^{n(k-mu+3/2)} pi^{n(m+k-n-mu)/2} Gamma_n((m+k-n-mu)/2)^{-1}.
pub fn c_star_prefactor(m: &Q, params: &CStarParams) -> Result<SymbolicConstant> {
    let w = &params.weights;
    w.omega(m).ok_or_else(|| Error::NotSpecialValue(fmt_q(m)))?;
    let n = qi(w.n as i64);
    let mu = qi(w.mu as i64);
    let kappa = &w.weight - &n / qi(2) - &mu;
    let i_e = -(w.n as i64) * kappa.floor().to_integer().to_i64().unwrap();
    let norm = &params.norm_b * &params.norm_b * &params.norm_y;
    let norm_e = &n * ((qi(3) * &n - qi(2) * m) / qi(2) - &w.weight + &mu);
    let two_e = &n * (&w.weight - &mu + qr(3, 2));
    let a = (m + &w.weight - &n - &mu) / qi(2);
    let pi_e = &n * &a;
    Ok(SymbolicConstant::i_power(i_e)
        .mul(&SymbolicConstant::power(norm, norm_e))
        .mul(&SymbolicConstant::power(qi(2), two_e))
        .mul(&SymbolicConstant::pi_power(pi_e))
        .mul(&SymbolicConstant::gamma_power(w.n, a, -1)))
}

/// The sigma-dependent part |sigma|^{m_{+/-}} prod_q f_{sigma,q}(eta_bar(q) q^{-[m]}).
pub fn c_star_local(
    sigma: &HalfIntSymMatrix,
    m: &Q,
    sign: Sign,
    local: &LocalPolys,
    eta_bar: &dyn Fn(u64) -> CycloNumber,
) -> Result<CycloNumber> {
    let n = sigma.degree() as i64;
    let e = match sign {
        Sign::Plus => m - qi(n) - qr(1, 2),
        Sign::Minus => Q::zero(),
    };
    let det_part = pow_rational(&sigma.det(), &e)?;
    // (n + delta - 1)/2 - m = -[m] in both parities of n
    let shift = -m.floor().to_integer().to_i64().unwrap();
    let prod = local.product(|q| eta_bar(q).scale(&pow_q(&qi(q as i64), shift)));
    Ok(&det_part * &prod)
}

pub fn c_star(
    sigma: &HalfIntSymMatrix,
    m: &Q,
    sign: Sign,
    params: &CStarParams,
    local: &LocalPolys,
    eta_bar: &dyn Fn(u64) -> CycloNumber,
) -> Result<SymbolicConstant> {
    match params.weights.omega(m) {
        Some(s) if s == sign => {}
        _ => return Err(Error::NotSpecialValue(fmt_q(m))),
    }
    let pre = c_star_prefactor(m, params)?;
    Ok(pre.scale_algebraic(&c_star_local(sigma, m, sign, local, eta_bar)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn wd(k: Q, mu: u32) -> WeightData {
        WeightData::new(1, k, mu).unwrap()
    }

    #[test]
    fn special_values_degree_one() {
        let w = wd(qr(11, 2), 0);
        let got: Vec<_> = w.omega_values();
        let want = vec![
            (qr(-5, 2), Sign::Minus),
            (qr(-1, 2), Sign::Minus),
            (qr(3, 2), Sign::Plus),
            (qr(7, 2), Sign::Plus),
            (qr(11, 2), Sign::Plus),
        ];
        assert_eq!(got, want);
        assert_eq!(w.admissible(&qr(3, 2), false).unwrap_err(), Error::ExcludedSpecialValue("3/2".into()));
        assert_eq!(w.admissible(&qr(5, 2), false).unwrap_err(), Error::NotSpecialValue("5/2".into()));
        let w1 = wd(qr(11, 2), 1);
        let m: Vec<Q> = w1.omega_values().into_iter().map(|x| x.0).collect();
        assert_eq!(m, vec![qr(-3, 2), qr(1, 2), qr(5, 2), qr(9, 2)]);
        assert_eq!(w1.beta(&qr(1, 2), Sign::Minus).unwrap(), 1);
        assert_eq!(w1.beta(&qr(5, 2), Sign::Plus).unwrap(), 1);
    }

    #[test]
    fn excluded_three_halves_needs_degree_two() {
        let w = WeightData::new(2, qr(15, 2), 0).unwrap();
        assert_eq!(w.omega(&qr(7, 2)), Some(Sign::Plus));
        assert!(w.admissible(&qr(7, 2), false).is_ok());
        assert_eq!(w.admissible(&qr(7, 2), true).unwrap_err(), Error::ExcludedSpecialValue("7/2".into()));
    }

    #[test]
    fn c_star_exponents() {
        let params = CStarParams { weights: wd(qr(13, 2), 0), norm_b: qi(1), norm_y: qi(9) };
        let sigma = HalfIntSymMatrix::scalar(5);
        let one = |_: u64| CycloNumber::one();
        let empty = LocalPolys::default();
        // m = 1/2 sits in the minus set with pi exponent 3
        let c = c_star(&sigma, &qr(1, 2), Sign::Minus, &params, &empty, &one).unwrap();
        assert_eq!(c.pi_exp, qi(3));
        assert_eq!(c.algebraic, CycloNumber::one());
        assert_eq!(c.gamma, vec![GammaToken { n: 1, arg: qi(3), exp: -1 }]);
        assert_eq!(c_star(&sigma, &qr(3, 2), Sign::Minus, &params, &empty, &one).unwrap_err(), Error::NotSpecialValue("3/2".into()));
        // [k - 1/2] = 6, i^{-6} = -1
        assert_eq!(c.i_exp, 2);
        assert_eq!(c.powers.get(&qi(2)), Some(&qi(8)));
        assert_eq!(c.powers.get(&qi(9)), Some(&qr(-11, 2)));
        let plus = c_star(&sigma, &qr(9, 2), Sign::Plus, &params, &empty, &one).unwrap();
        assert_eq!(plus.algebraic, CycloNumber::from_int(125));
    }

    #[test]
    fn local_polynomial_product() {
        let lp = LocalPolys::from_json(r#"{"2": [0, 1, 3], "7": [0, -1]}"#).unwrap();
        lp.validate_f(Some(5)).unwrap();
        assert_eq!(lp.validate_f(Some(7)).unwrap_err(), Error::BadPrime(7));
        let got = lp.product(|q| CycloNumber::from_int(q as i64));
        assert_eq!(got, CycloNumber::from_int((2 + 12) * -7));
        let bad = LocalPolys::from_json(r#"{"3": [1, 1]}"#).unwrap();
        assert_eq!(bad.validate_f(None).unwrap_err(), Error::ConstantTermPresent(3));
        bad.validate_g(None).unwrap();
        let bad_g = LocalPolys::from_json(r#"{"3": [2, 1]}"#).unwrap();
        assert_eq!(bad_g.validate_g(None).unwrap_err(), Error::BadConstantTerm(3));
        assert!(LocalPolys::from_json(r#"{"4": [0, 1]}"#).is_err());
        assert_eq!(LocalPolys::from_json(&lp.to_json()).unwrap(), lp);
        assert_eq!(LocalPolys::default().product(|_| CycloNumber::zero()), CycloNumber::one());
    }

    #[test]
    fn symbolic_products_add_exponents() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut pieces = Vec::new();
            let mut want_pi = Q::zero();
            let mut want_two = Q::zero();
            let mut want_i = 0i64;
            for _ in 0..4 {
                let (a, b, c) = (rng.gen_range(-6..=6), rng.gen_range(-6..=6), rng.gen_range(-9..=9));
                want_pi += qr(a, 2);
                want_two += qr(b, 2);
                want_i += c;
                pieces.push(
                    SymbolicConstant::pi_power(qr(a, 2))
                        .mul(&SymbolicConstant::power(qi(2), qr(b, 2)))
                        .mul(&SymbolicConstant::i_power(c))
                        .mul(&SymbolicConstant::gamma_power(1, qi(3), 1)),
                );
            }
            let prod = pieces.iter().fold(SymbolicConstant::one(), |acc, x| acc.mul(x));
            assert_eq!(prod.pi_exp, want_pi);
            assert_eq!(prod.powers.get(&qi(2)).cloned().unwrap_or_else(Q::zero), want_two);
            assert_eq!(prod.i_exp as i64, want_i.rem_euclid(4));
            assert_eq!(prod.gamma, vec![GammaToken { n: 1, arg: qi(3), exp: 4 }]);
            // algebraic part: 2^{e} i^{c}, squared is rational
            let alg = prod.algebraic_part().unwrap();
            let sq = &alg * &alg;
            let expect = pow_q(&qi(2), (&want_two * qi(2)).to_integer().to_i64().unwrap()) * qi(if want_i.rem_euclid(2) == 0 { 1 } else { -1 });
            assert_eq!(sq.as_rational(), Some(expect));
        }
    }
}
