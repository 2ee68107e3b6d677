//! The measure Sigma_sigma attached to the local polynomials, and twists.

use std::collections::BTreeMap;

use crate::arith::{gcd_u64, pow_q, qi};
use crate::chars::{CycloNumber, DirichletChar};
use crate::eisen::LocalPolys;
use crate::error::{Error, Result};

use super::system::DistributionSystem;

/// A character argument: evaluated on integers prime to p.
pub type CharFn<'a> = &'a dyn Fn(i64) -> CycloNumber;

/// Something that can be integrated against chi(x) x^{[m]}.
pub trait CharEvaluator {
    fn p(&self) -> u64;
    fn eval(&self, chi: CharFn<'_>, m: i64) -> Result<CycloNumber>;
}

/// A finite combination sum_N w_N delta_{1/N} with N prime to p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiracCombination {
    pub p: u64,
    /// N -> weight; the mass sits at 1/N.
    pub points: BTreeMap<i64, CycloNumber>,
}

impl DiracCombination {
    pub fn system(&self, imax: u32) -> Result<DistributionSystem> {
        let pts: Vec<((i64, i64), CycloNumber)> = self.points.iter().map(|(n, w)| ((1, *n), w.clone())).collect();
        DistributionSystem::from_points(self.p, imax, &pts)
    }
}

impl CharEvaluator for DiracCombination {
    fn p(&self) -> u64 {
        self.p
    }

    /// sum_N w_N chi(N)^{-1} N^{-m}.
    fn eval(&self, chi: CharFn<'_>, m: i64) -> Result<CycloNumber> {
        let mut acc = CycloNumber::zero();
        for (&n, w) in &self.points {
            let c = chi(n);
            if c.is_zero() {
                continue;
            }
            acc = &acc + &(&(w * &c.conj()).scale(&pow_q(&qi(n), -m)));
        }
        Ok(acc)
    }
}

/// Sigma_sigma for degree one (the argument shift (n + delta - 1)/2 - m is -[m]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaMeasure {
    pub p: u64,
    pub local: LocalPolys,
}

pub fn sigma_measure(local: &LocalPolys, p: u64) -> Result<SigmaMeasure> {
    local.validate_f(Some(p))?;
    Ok(SigmaMeasure { p, local: local.clone() })
}

impl SigmaMeasure {
    /// prod_q f_q(conj(chi(q)) q^{-[m]}) evaluated directly.
    pub fn value(&self, chi: CharFn<'_>, m: i64) -> CycloNumber {
        self.local.product(|q| chi(q as i64).conj().scale(&pow_q(&qi(q as i64), -m)))
    }

    /// Expansion of the product into point masses: prod_q sum_e a_{q,e} delta_{q^{-e}}.
    pub fn as_dirac(&self) -> DiracCombination {
        let mut points: BTreeMap<i64, CycloNumber> = BTreeMap::new();
        points.insert(1, CycloNumber::one());
        for (&q, coeffs) in &self.local.0 {
            let mut next: BTreeMap<i64, CycloNumber> = BTreeMap::new();
            for (&n, w) in &points {
                let mut qe = 1i64;
                for &a in coeffs {
                    if a != 0 {
                        let e = next.entry(n * qe).or_insert_with(CycloNumber::zero);
                        *e = &*e + &w.scale(&qi(a));
                    }
                    qe *= q as i64;
                }
            }
            next.retain(|_, v| !v.is_zero());
            points = next;
        }
        DiracCombination { p: self.p, points }
    }

    pub fn system(&self, imax: u32) -> Result<DistributionSystem> {
        self.as_dirac().system(imax)
    }
}

impl CharEvaluator for SigmaMeasure {
    fn p(&self) -> u64 {
        self.p
    }

    fn eval(&self, chi: CharFn<'_>, m: i64) -> Result<CycloNumber> {
        Ok(self.value(chi, m))
    }
}

impl CharEvaluator for DistributionSystem {
    fn p(&self) -> u64 {
        DistributionSystem::p(self)
    }

    /// Exact for [m] = 0 and chi factoring through the top level.
    fn eval(&self, chi: CharFn<'_>, m: i64) -> Result<CycloNumber> {
        if m != 0 {
            return Err(Error::Input("level sums are exact only for [m] = 0; use mellin".into()));
        }
        self.integrate(self.imax(), &|x| chi(x as i64))
    }
}

/// [nu (x) omega](chi x^{[m]}) = nu(chi omega x^{[m]}).
pub struct Twisted<'a, E: CharEvaluator> {
    inner: &'a E,
    omega: DirichletChar,
}

pub fn twist<'a, E: CharEvaluator>(inner: &'a E, omega: &DirichletChar) -> Result<Twisted<'a, E>> {
    let c = omega.conductor();
    if gcd_u64(c, inner.p()) != 1 {
        return Err(Error::ConductorNotCoprime(c, inner.p()));
    }
    Ok(Twisted { inner, omega: omega.clone() })
}

impl<E: CharEvaluator> CharEvaluator for Twisted<'_, E> {
    fn p(&self) -> u64 {
        self.inner.p()
    }

    fn eval(&self, chi: CharFn<'_>, m: i64) -> Result<CycloNumber> {
        let om = &self.omega;
        self.inner.eval(&|y| &chi(y) * &om.value(y), m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(s: &str) -> LocalPolys {
        LocalPolys::from_json(s).unwrap()
    }

    #[test]
    fn sigma_values_and_validation() {
        let p = 5;
        let empty = sigma_measure(&LocalPolys::default(), p).unwrap();
        let chi = DirichletChar::all(5).pop().unwrap();
        assert_eq!(empty.value(&|y| chi.value(y), 3), CycloNumber::one());
        // f = t at q = 2: conj(chi(2)) 2^{-[m]}
        let s = sigma_measure(&lp(r#"{"2": [0, 1]}"#), p).unwrap();
        let got = s.value(&|y| chi.value(y), 2);
        assert_eq!(got, chi.value(2).conj().scale(&Q::new(1.into(), 4.into())));
        assert_eq!(sigma_measure(&lp(r#"{"5": [0, 1]}"#), p).unwrap_err(), Error::BadPrime(5));
        assert_eq!(sigma_measure(&lp(r#"{"2": [1, 1]}"#), p).unwrap_err(), Error::ConstantTermPresent(2));
    }

    use crate::arith::Q;

    #[test]
    fn product_equals_point_masses() {
        let p = 7;
        let s = sigma_measure(&lp(r#"{"2": [0, 1, -3], "3": [0, 2, 0, 1]}"#), p).unwrap();
        let dirac = s.as_dirac();
        for chi in DirichletChar::all(49) {
            for m in -2..4 {
                let f = |y: i64| chi.value(y);
                assert_eq!(s.value(&f, m), dirac.eval(&f, m).unwrap());
            }
        }
        // the level system integrates characters the same way at [m] = 0
        let sys = s.system(3).unwrap();
        for chi in DirichletChar::all(49) {
            let f = |y: i64| chi.value(y);
            assert_eq!(sys.eval(&f, 0).unwrap(), s.value(&f, 0));
        }
        assert_eq!(sys.boundedness(), Some(&qi(0)));
    }

    #[test]
    fn twisting() {
        let p = 5;
        let d = DiracCombination { p, points: [(3i64, CycloNumber::one())].into_iter().collect() };
        let trivial = DirichletChar::trivial(1);
        let chi = DirichletChar::all(5).pop().unwrap();
        let f = |y: i64| chi.value(y);
        assert_eq!(twist(&d, &trivial).unwrap().eval(&f, 1).unwrap(), d.eval(&f, 1).unwrap());
        let omega = DirichletChar::kronecker(-4);
        let t = twist(&d, &omega).unwrap();
        // delta at a = 1/3: omega(a) chi(a) a^{[m]}
        let want = (&omega.value(3) * &chi.value(3)).conj().scale(&Q::new(1.into(), 9.into()));
        assert_eq!(t.eval(&f, 2).unwrap(), want);
        let bad = DirichletChar::all(5).pop().unwrap();
        assert!(matches!(twist(&d, &bad), Err(Error::ConductorNotCoprime(5, 5))));
    }
}
