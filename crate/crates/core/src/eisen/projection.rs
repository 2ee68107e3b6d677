//! The projection polynomial P(sigma, sigma'; beta).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::arith::{binomial, fmt_q, pow_q, rising, Q};
use crate::error::{Error, Result};
use crate::symlat::HalfIntSymMatrix;

/// Data P depends on besides (sigma, sigma', beta): the weight k and the
/// shifted parameter s'.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionContext {
    pub weight: Q,
    pub s_prime: Q,
}

pub trait ProjectionPoly: Send + Sync {
    fn degree(&self) -> usize;
    fn eval(&self, sigma: &HalfIntSymMatrix, sigma_p: &HalfIntSymMatrix, beta: u32, ctx: &ProjectionContext) -> Result<Q>;
}

/// Degree one: sum_j C(beta,j) (s')_j Gamma(k-1-j)/Gamma(k-1) sigma'^j sigma^{beta-j}.
#[derive(Clone, Copy, Debug, Default)]
pub struct BuiltinN1;

impl BuiltinN1 {
    /// Coefficient of sigma'^j sigma^{beta-j}.
    pub fn coefficient(beta: u32, j: u32, ctx: &ProjectionContext) -> Result<Q> {
        let mut gamma_ratio = Q::one();
        for i in 1..=j {
            let d = &ctx.weight - Q::from_integer((1 + i as i64).into());
            if d.is_zero() {
                return Err(Error::Input(format!("Gamma ratio has a pole at k = {}", fmt_q(&ctx.weight))));
            }
            gamma_ratio /= d;
        }
        Ok(Q::from_integer(binomial(beta as u64, j as u64)) * rising(&ctx.s_prime, j as u64) * gamma_ratio)
    }

    pub fn eval_scalar(sigma: &Q, sigma_p: &Q, beta: u32, ctx: &ProjectionContext) -> Result<Q> {
        let mut total = Q::zero();
        for j in 0..=beta {
            total += Self::coefficient(beta, j, ctx)? * pow_q(sigma_p, j as i64) * pow_q(sigma, (beta - j) as i64);
        }
        Ok(total)
    }

    /// Lcm of the coefficient denominators.
    pub fn denominator(beta: u32, ctx: &ProjectionContext) -> Result<num_bigint::BigInt> {
        let mut d = num_bigint::BigInt::one();
        for j in 0..=beta {
            let c = Self::coefficient(beta, j, ctx)?;
            d = num_integer::Integer::lcm(&d, c.denom());
        }
        Ok(d)
    }
}

impl ProjectionPoly for BuiltinN1 {
    fn degree(&self) -> usize {
        1
    }

    fn eval(&self, sigma: &HalfIntSymMatrix, sigma_p: &HalfIntSymMatrix, beta: u32, ctx: &ProjectionContext) -> Result<Q> {
        Self::eval_scalar(&sigma.entry(0, 0), &sigma_p.entry(0, 0), beta, ctx)
    }
}

/// Projection polynomials by degree. Degree one is registered by default.
#[derive(Clone)]
pub struct ProjectionRegistry {
    plugins: BTreeMap<usize, Arc<dyn ProjectionPoly>>,
}

impl fmt::Debug for ProjectionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProjectionRegistry").field("degrees", &self.plugins.keys().collect::<Vec<_>>()).finish()
    }
}

impl Default for ProjectionRegistry {
    fn default() -> Self {
        let mut plugins: BTreeMap<usize, Arc<dyn ProjectionPoly>> = BTreeMap::new();
        plugins.insert(1, Arc::new(BuiltinN1));
        ProjectionRegistry { plugins }
    }
}

impl ProjectionRegistry {
    pub fn register(&mut self, plugin: Arc<dyn ProjectionPoly>) {
        self.plugins.insert(plugin.degree(), plugin);
    }

    pub fn has(&self, n: usize) -> bool {
        self.plugins.contains_key(&n)
    }

    /// P(sigma, sigma'; beta). Every plug-in must return |sigma|^beta at sigma' = 0;
    /// this is checked on each call.
    pub fn eval(&self, sigma: &HalfIntSymMatrix, sigma_p: &HalfIntSymMatrix, beta: u32, ctx: &ProjectionContext) -> Result<Q> {
        let n = sigma.degree();
        if sigma_p.degree() != n {
            return Err(Error::DegreeMismatch(n, sigma_p.degree()));
        }
        let plugin = self.plugins.get(&n).ok_or(Error::MissingPlugin(n))?;
        let at_zero = plugin.eval(sigma, &HalfIntSymMatrix::zero(n), beta, ctx)?;
        let want = pow_q(&sigma.det(), beta as i64);
        if at_zero != want {
            return Err(Error::PluginViolation(format!(
                "P({sigma}, 0; {beta}) = {}, expected {}",
                fmt_q(&at_zero),
                fmt_q(&want)
            )));
        }
        plugin.eval(sigma, sigma_p, beta, ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{qi, qr};
    use crate::eisen::rpoly::r_poly;

    fn ctx(k: Q, s: Q) -> ProjectionContext {
        ProjectionContext { weight: k, s_prime: s }
    }

    // Gamma(a) = int 2 t^{2a-1} e^{-t^2} dt by Simpson's rule on [0, 12]; a >= 1.
    fn gamma_quad(a: f64) -> f64 {
        let (hi, n) = (12.0f64, 20000usize);
        let h = hi / n as f64;
        let f = |t: f64| if t == 0.0 { 0.0 } else { 2.0 * t.powf(2.0 * a - 1.0) * (-t * t).exp() };
        let mut s = f(0.0) + f(hi);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn qf(x: &Q) -> f64 {
        use num_traits::ToPrimitive;
        x.to_f64().unwrap()
    }

    #[test]
    fn beta_zero_and_sigma_prime_zero() {
        let c = ctx(qr(11, 2), qi(-2));
        for (s, sp) in [(qi(3), qi(7)), (qi(10), qi(0)), (qi(1), qi(99))] {
            assert_eq!(BuiltinN1::eval_scalar(&s, &sp, 0, &c).unwrap(), qi(1));
            for beta in 0..4 {
                assert_eq!(BuiltinN1::eval_scalar(&s, &qi(0), beta, &c).unwrap(), pow_q(&s, beta as i64));
            }
        }
    }

    #[test]
    fn agrees_with_projection_oracle() {
        // oracle: coefficients of R(g; beta, s') times Gamma(k-1-j)/Gamma(k-1) by quadrature
        for (k, s) in [(qr(11, 2), qi(-3)), (qr(13, 2), qi(2)), (qr(17, 2), qr(1, 2))] {
            for beta in 1..=3u32 {
                let r = r_poly(1, beta).unwrap();
                let coeffs = r.n1_coefficients();
                for (sig, sp) in [(qi(5), qi(3)), (qi(2), qi(9)), (qi(7), qi(1))] {
                    let mut oracle = 0.0;
                    for j in 0..=beta {
                        let cj = qf(&coeffs[j as usize].eval(&[s.clone(), qi(0)]));
                        let ratio = gamma_quad(qf(&k) - 1.0 - j as f64) / gamma_quad(qf(&k) - 1.0);
                        oracle += cj * ratio * qf(&sp).powi(j as i32) * qf(&sig).powi((beta - j) as i32);
                    }
                    let exact = qf(&BuiltinN1::eval_scalar(&sig, &sp, beta, &ctx(k.clone(), s.clone())).unwrap());
                    assert!((exact - oracle).abs() <= 1e-8 * exact.abs().max(1.0), "{exact} vs {oracle}");
                }
            }
        }
    }

    struct GoodN2;
    impl ProjectionPoly for GoodN2 {
        fn degree(&self) -> usize {
            2
        }
        fn eval(&self, s: &HalfIntSymMatrix, sp: &HalfIntSymMatrix, beta: u32, _: &ProjectionContext) -> Result<Q> {
            Ok(pow_q(&s.det(), beta as i64) + qi(sp.trace()) * qi(beta as i64))
        }
    }
    struct BadN2;
    impl ProjectionPoly for BadN2 {
        fn degree(&self) -> usize {
            2
        }
        fn eval(&self, s: &HalfIntSymMatrix, _: &HalfIntSymMatrix, beta: u32, _: &ProjectionContext) -> Result<Q> {
            Ok(pow_q(&s.det(), beta as i64) + qi(1))
        }
    }

    #[test]
    fn registry_plugins() {
        let s = HalfIntSymMatrix::new(vec![vec![2, 1], vec![1, 2]]).unwrap();
        let sp = HalfIntSymMatrix::new(vec![vec![4, 0], vec![0, 6]]).unwrap();
        let c = ctx(qr(13, 2), qi(0));
        let mut reg = ProjectionRegistry::default();
        assert_eq!(reg.eval(&s, &sp, 1, &c).unwrap_err(), Error::MissingPlugin(2));
        reg.register(Arc::new(GoodN2));
        assert_eq!(reg.eval(&s, &sp, 2, &c).unwrap(), qr(9, 16) + qi(10));
        reg.register(Arc::new(BadN2));
        assert!(matches!(reg.eval(&s, &sp, 1, &c), Err(Error::PluginViolation(_))));
        let one = HalfIntSymMatrix::scalar(3);
        assert_eq!(reg.eval(&one, &HalfIntSymMatrix::scalar(0), 2, &c).unwrap(), qi(9));
    }
}
