//! Fourier coefficients of the projected product over V_{p^r sigma}.

use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;

use crate::arith::{fmt_q, pow_q, qi, qr, vp, Q};
use crate::chars::{CycloNumber, DirichletChar};
use crate::error::{Error, Result};
use crate::symlat::{completeness_bound, enumerate_v, theta_ideal, HalfIntSymMatrix};

use super::constant::{c_star_local, c_star_prefactor, CStarParams, LocalPolys, Sign, SymbolicConstant};
use super::projection::{ProjectionContext, ProjectionRegistry};

/// tau^ and the scale N(sqrt(t) b c)^2 / 2 defining V_varsigma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaLevel {
    pub tau_hat: Vec<Vec<i64>>,
    pub scale: Q,
}

impl ThetaLevel {
    /// From tau, N(b) and the level c.
    pub fn from_tau(tau: &HalfIntSymMatrix, norm_b: &Q, c: u64) -> Result<Self> {
        let (t, tau_hat) = theta_ideal(tau)?;
        let bc = norm_b * qi(c as i64);
        Ok(ThetaLevel { tau_hat, scale: qi(t as i64) * &bc * &bc / qi(2) })
    }

    /// |-scale tau^|, the constant of |sigma_2| = A |sigma_1|^2 mod p^r.
    pub fn a_const(&self) -> Q {
        let m: Vec<Vec<Q>> = self.tau_hat.iter().map(|r| r.iter().map(|&x| -qi(x) * &self.scale).collect()).collect();
        crate::arith::det_q(&m)
    }

    /// Every pair in V_{p^r sigma}.
    pub fn pairs(&self, sigma: &HalfIntSymMatrix, p: u64, r: u32) -> Result<Vec<(Vec<Vec<i64>>, HalfIntSymMatrix)>> {
        let big = sigma.scale(p.pow(r) as i64);
        let bound = completeness_bound(&big, &self.tau_hat, &self.scale);
        enumerate_v(&big, &self.tau_hat, &self.scale, bound.max(0))
    }
}

/// Integer determinant of sigma_1.
pub fn det_sigma1(s1: &[Vec<i64>]) -> i64 {
    crate::arith::det_int(s1).to_i64().expect("determinant overflow")
}

pub type LocalFamily = Arc<dyn Fn(&HalfIntSymMatrix) -> LocalPolys + Send + Sync>;

/// Everything fixed across the coefficients of one projected product.
#[derive(Clone)]
pub struct EisenData {
    pub params: CStarParams,
    pub level: ThetaLevel,
    pub registry: ProjectionRegistry,
    pub local: LocalFamily,
}

impl fmt::Debug for EisenData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EisenData").field("params", &self.params).field("level", &self.level).finish()
    }
}

impl EisenData {
    pub fn new(params: CStarParams, level: ThetaLevel) -> Self {
        EisenData { params, level, registry: ProjectionRegistry::default(), local: Arc::new(|_| LocalPolys::default()) }
    }

    /// The same local polynomials for every sigma.
    pub fn with_constant_local(mut self, lp: LocalPolys) -> Result<Self> {
        lp.validate_f(None)?;
        self.local = Arc::new(move |_| lp.clone());
        Ok(self)
    }

    pub fn with_local_family(mut self, f: LocalFamily) -> Self {
        self.local = f;
        self
    }

    fn n(&self) -> usize {
        self.params.weights.n
    }

    fn context(&self, m: &Q, sign: Sign) -> ProjectionContext {
        ProjectionContext { weight: self.params.weights.weight.clone(), s_prime: self.params.weights.s_prime(m, sign) }
    }

    fn check(&self, sigma: &HalfIntSymMatrix, m: &Q, twist_sq_trivial: bool) -> Result<(Sign, u32)> {
        if sigma.degree() != self.n() {
            return Err(Error::DegreeMismatch(self.n(), sigma.degree()));
        }
        if !sigma.is_positive_definite() {
            return Err(Error::NonPositiveDefinite);
        }
        let w = &self.params.weights;
        let sign = w.admissible(m, twist_sq_trivial)?;
        Ok((sign, w.beta(m, sign)?))
    }

    fn weight_sigma1(chi: &DirichletChar, d1: i64, mu: u32) -> CycloNumber {
        let c = chi.value(d1);
        if c.is_zero() {
            return c;
        }
        c.scale(&pow_q(&qi(d1), mu as i64))
    }

    /// sum over V_{p^r sigma} of chi(|s1|)|s1|^mu C*(s2, m) P(s2, p^r sigma; beta).
    /// The symbolic factors are common to every term; pairs with singular s2
    /// are skipped.
    #[allow(clippy::too_many_arguments)]
    pub fn proj_coeff(
        &self,
        sigma: &HalfIntSymMatrix,
        m: &Q,
        chi: &DirichletChar,
        p: u64,
        r: u32,
        twist_sq_trivial: bool,
        eta_bar: &dyn Fn(u64) -> CycloNumber,
    ) -> Result<SymbolicConstant> {
        let (sign, beta) = self.check(sigma, m, twist_sq_trivial)?;
        let pre = c_star_prefactor(m, &self.params)?;
        let big = sigma.scale(p.pow(r) as i64);
        let ctx = self.context(m, sign);
        let mut acc = CycloNumber::zero();
        for (s1, s2) in self.level.pairs(sigma, p, r)? {
            if !s2.is_positive_definite() {
                continue;
            }
            let w = Self::weight_sigma1(chi, det_sigma1(&s1), self.params.weights.mu);
            if w.is_zero() {
                continue;
            }
            let local = (self.local)(&s2);
            let c = c_star_local(&s2, m, sign, &local, eta_bar)?;
            let pv = self.registry.eval(&s2, &big, beta, &ctx)?;
            acc = &acc + &(&w * &c).scale(&pv);
        }
        Ok(pre.scale_algebraic(&acc))
    }

    /// Exponent of A in the normalisation: (k+m-mu-1-2n)/2 or (k+3m-mu-2-4n)/2.
    pub fn a_exponent(&self, m: &Q, sign: Sign) -> i64 {
        let w = &self.params.weights;
        let n = qi(w.n as i64);
        let mu = qi(w.mu as i64);
        let e = match sign {
            Sign::Plus => (&w.weight + m - &mu - qi(1) - qi(2) * &n) / qi(2),
            Sign::Minus => (&w.weight + qi(3) * m - &mu - qi(2) - qi(4) * &n) / qi(2),
        };
        e.to_integer().to_i64().unwrap()
    }

    /// Coefficient of the normalised form whose C*-factor is
    /// A^{-E} |s2|^{m-n-1/2} prod_q f_{s2,q}(eta_bar(q) q^{-[m]}).
    #[allow(clippy::too_many_arguments)]
    pub fn normalised_coeff(
        &self,
        sigma: &HalfIntSymMatrix,
        m: &Q,
        chi: &DirichletChar,
        p: u64,
        r: u32,
        twist_sq_trivial: bool,
        eta_bar: &dyn Fn(u64) -> CycloNumber,
    ) -> Result<CycloNumber> {
        let (sign, beta) = self.check(sigma, m, twist_sq_trivial)?;
        let a = self.level.a_const();
        let a_pow = pow_q(&a, -self.a_exponent(m, sign));
        let det_e = (m - qi(self.n() as i64) - qr(1, 2)).to_integer().to_i64().unwrap();
        let big = sigma.scale(p.pow(r) as i64);
        let ctx = self.context(m, sign);
        let mut acc = CycloNumber::zero();
        for (s1, s2) in self.level.pairs(sigma, p, r)? {
            if !s2.is_positive_definite() {
                continue;
            }
            let w = Self::weight_sigma1(chi, det_sigma1(&s1), self.params.weights.mu);
            if w.is_zero() {
                continue;
            }
            let local = (self.local)(&s2);
            let prod = c_star_local(&s2, m, Sign::Minus, &local, eta_bar)?;
            let pv = self.registry.eval(&s2, &big, beta, &ctx)?;
            let rat = &a_pow * pow_q(&s2.det(), det_e) * pv;
            acc = &acc + &(&w * &prod).scale(&rat);
        }
        Ok(acc)
    }

    /// sum over V_{p^r sigma} of chi(|s1|)|s1|^e prod_q f_{s2,q}(eta_bar(q) q^{-[m]})
    /// with e = 2E + mu, the value the normalised coefficient is congruent to.
    #[allow(clippy::too_many_arguments)]
    pub fn kummer_rhs(
        &self,
        sigma: &HalfIntSymMatrix,
        m: &Q,
        chi: &DirichletChar,
        p: u64,
        r: u32,
        twist_sq_trivial: bool,
        eta_bar: &dyn Fn(u64) -> CycloNumber,
    ) -> Result<CycloNumber> {
        let (sign, _) = self.check(sigma, m, twist_sq_trivial)?;
        let e = 2 * self.a_exponent(m, sign) + self.params.weights.mu as i64;
        let mut acc = CycloNumber::zero();
        for (s1, s2) in self.level.pairs(sigma, p, r)? {
            if !s2.is_positive_definite() {
                continue;
            }
            let d1 = det_sigma1(&s1);
            let c = chi.value(d1);
            if c.is_zero() {
                continue;
            }
            let local = (self.local)(&s2);
            let prod = c_star_local(&s2, m, Sign::Minus, &local, eta_bar)?;
            acc = &acc + &(&c * &prod).scale(&pow_q(&qi(d1), e));
        }
        Ok(acc)
    }
}

/// One failed congruence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub sigma1: Vec<Vec<i64>>,
    pub sigma2: HalfIntSymMatrix,
    pub lhs: Q,
    pub rhs: Q,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CongruenceReport {
    pub pairs: usize,
    pub determinant: Vec<Violation>,
    pub projection: Vec<Violation>,
}

impl CongruenceReport {
    pub fn ok(&self) -> bool {
        self.determinant.is_empty() && self.projection.is_empty()
    }
}

/// x = y mod p^r for rationals: v_p(x - y) >= r.
pub fn congruent_mod(x: &Q, y: &Q, p: u64, r: u32) -> bool {
    match vp(&(x - y), p) {
        None => true,
        Some(v) => v >= r as i64,
    }
}

/// Checks |s2| = A |s1|^2 and P(s2, p^r sigma; beta) = |s2|^beta mod p^r on each pair.
pub fn congruence_check(
    pairs: &[(Vec<Vec<i64>>, HalfIntSymMatrix)],
    sigma: &HalfIntSymMatrix,
    p: u64,
    r: u32,
    a_const: &Q,
    beta: u32,
    ctx: &ProjectionContext,
    registry: &ProjectionRegistry,
) -> Result<CongruenceReport> {
    let big = sigma.scale(p.pow(r) as i64);
    let mut rep = CongruenceReport { pairs: pairs.len(), ..Default::default() };
    for (s1, s2) in pairs {
        let d1 = qi(det_sigma1(s1));
        let lhs = s2.det();
        let rhs = a_const * &d1 * &d1;
        if !congruent_mod(&lhs, &rhs, p, r) {
            rep.determinant.push(Violation { sigma1: s1.clone(), sigma2: s2.clone(), lhs, rhs });
        }
        let pv = registry.eval(s2, &big, beta, ctx)?;
        let want = pow_q(&s2.det(), beta as i64);
        if !congruent_mod(&pv, &want, p, r) {
            rep.projection.push(Violation { sigma1: s1.clone(), sigma2: s2.clone(), lhs: pv, rhs: want });
        }
    }
    Ok(rep)
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s1={:?} s2={} lhs={} rhs={}", self.sigma1, self.sigma2, fmt_q(&self.lhs), fmt_q(&self.rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisen::constant::WeightData;

    fn data(k: Q, mu: u32) -> EisenData {
        let params = CStarParams { weights: WeightData::new(1, k, mu).unwrap(), norm_b: qr(1, 2), norm_y: qi(1) };
        let level = ThetaLevel::from_tau(&HalfIntSymMatrix::scalar(1), &qr(1, 2), 4).unwrap();
        EisenData::new(params, level)
    }

    #[test]
    fn level_constants() {
        let d = data(qr(11, 2), 0);
        assert_eq!(d.level.tau_hat, vec![vec![4]]);
        assert_eq!(d.level.scale, qi(16));
        assert_eq!(d.level.a_const(), qi(-64));
    }

    #[test]
    fn single_pair_coefficients() {
        // p^r sigma = 3 * 7 = 21 < 64: only (0, 21) survives
        let d = data(qr(11, 2), 0);
        let sigma = HalfIntSymMatrix::scalar(7);
        let one = |_: u64| CycloNumber::one();
        let m = qr(7, 2);
        let nontriv = DirichletChar::all(3).into_iter().find(|c| !c.is_trivial()).unwrap();
        let c = d.proj_coeff(&sigma, &m, &nontriv, 3, 1, false, &one).unwrap();
        assert!(c.algebraic.is_zero());
        let triv = DirichletChar::trivial(1);
        let c = d.proj_coeff(&sigma, &m, &triv, 3, 1, false, &one).unwrap();
        // C* local part |21|^{m-3/2} = 441, P(21, 21; 1) with s' = (3 - 11/2 - 7/2)/2 = -3
        let ctx = ProjectionContext { weight: qr(11, 2), s_prime: qi(-3) };
        let pv = crate::eisen::projection::BuiltinN1::eval_scalar(&qi(21), &qi(21), 1, &ctx).unwrap();
        assert_eq!(pv, qi(21) + qi(-3) * qr(2, 7) * qi(21));
        assert_eq!(c.algebraic, CycloNumber::from_rational(qi(441) * pv));
        assert_eq!(c.pi_exp, qi(4));
    }

    #[test]
    fn two_term_sum_by_hand() {
        // sigma = 22, p = 3, r = 1: V_66 = {(0, 66), (1, 2), (-1, 2)}
        let d = data(qr(11, 2), 0);
        let sigma = HalfIntSymMatrix::scalar(22);
        let pairs = d.level.pairs(&sigma, 3, 1).unwrap();
        assert_eq!(pairs.len(), 3);
        let triv = DirichletChar::trivial(3);
        let one = |_: u64| CycloNumber::one();
        let m = qr(7, 2);
        let got = d.proj_coeff(&sigma, &m, &triv, 3, 1, false, &one).unwrap();
        // beta = 1, s' = -3, P(2, 66; 1) = 2 - 3(2/7)66; |s2|^{m - 3/2} = 4
        let pv = qi(2) - qi(3) * qr(2, 7) * qi(66);
        let want = qi(2) * qi(4) * pv;
        assert_eq!(got.algebraic, CycloNumber::from_rational(want));
    }

    #[test]
    fn report_flags_perturbation() {
        let d = data(qr(11, 2), 0);
        let sigma = HalfIntSymMatrix::scalar(25);
        let (p, r) = (3, 1);
        let mut pairs = d.level.pairs(&sigma, p, r).unwrap();
        pairs.retain(|(_, s2)| s2.is_positive_definite());
        let m = qr(7, 2);
        let ctx = d.context(&m, Sign::Plus);
        let rep = congruence_check(&pairs, &sigma, p, r, &d.level.a_const(), 1, &ctx, &d.registry).unwrap();
        assert!(rep.ok(), "{rep:?}");
        let i = pairs.iter().position(|(s1, _)| s1[0][0] != 0).unwrap();
        pairs[i].1 = pairs[i].1.add(&HalfIntSymMatrix::scalar(1));
        let rep = congruence_check(&pairs, &sigma, p, r, &d.level.a_const(), 1, &ctx, &d.registry).unwrap();
        assert_eq!(rep.determinant.len(), 1);
    }
}
