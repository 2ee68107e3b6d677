//! p-adic Mellin transforms of bounded distributions, by Riemann sums.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::Q;
use crate::chars::{CycloNumber, DirichletChar};
use crate::error::{Error, Result};
use crate::padic::{embed_cyclo, teichmuller, valuation_general, PadicNumber};

use super::system::DistributionSystem;

/// The exponent: an integer power x^{[m]} or <x>^s with v_p(s) > 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MellinArg {
    Integer(u32),
    Padic(PadicNumber),
}

/// log(x) for x = 1 mod p (mod 4 when p = 2), to absolute precision n.
pub fn padic_log(x: &PadicNumber, n: u32) -> Result<PadicNumber> {
    let p = x.p();
    let one = PadicNumber::from_int(1, p, n + 8);
    let y = x.sub(&one);
    let vy = y.valuation();
    if vy < 1 || (p == 2 && vy < 2) {
        return Err(Error::Input("log needs an argument congruent to 1".into()));
    }
    // terms y^k/k with k vy - v_p(k) >= n vanish
    let guard = 2 * (n as f64).log(p as f64).ceil() as u32 + 2;
    let work = n + guard;
    let y = y.with_precision(work);
    let mut acc = PadicNumber::zero(p, (n + guard) as i64);
    let mut yk = y.clone();
    let mut k: u64 = 1;
    loop {
        let vk = vp_u64(k, p) as i64;
        if k as i64 * vy - vk >= (n + guard) as i64 && k as i64 * vy >= 2 * (n + guard) as i64 {
            break;
        }
        let term = yk.div(&PadicNumber::from_int(k as i64, p, work))?;
        acc = if k % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        yk = yk.mul(&y);
        k += 1;
    }
    Ok(truncate_abs(&acc, n as i64))
}

/// exp(z) for v_p(z) > 1/(p-1), to absolute precision n.
pub fn padic_exp(z: &PadicNumber, n: u32) -> Result<PadicNumber> {
    let p = z.p();
    let vz = z.valuation();
    if vz < 1 || (p == 2 && vz < 2) {
        return Err(Error::Input("exp needs an argument of positive valuation".into()));
    }
    let guard = 2 * (n as f64).log(p as f64).ceil() as u32 + 4;
    let work = n + guard;
    let mut acc = PadicNumber::from_int(1, p, work);
    let mut term = PadicNumber::from_int(1, p, work);
    let mut k: u64 = 1;
    // v(z^k/k!) >= k (vz - 1/(p-1))
    loop {
        let bound = k as f64 * (vz as f64 - 1.0 / (p as f64 - 1.0));
        if bound >= (n + guard) as f64 && k > 1 {
            break;
        }
        term = term.mul(z).div(&PadicNumber::from_int(k as i64, p, work))?;
        acc = acc.add(&term);
        k += 1;
    }
    Ok(truncate_abs(&acc, n as i64))
}

fn vp_u64(mut k: u64, p: u64) -> u32 {
    let mut v = 0;
    while k % p == 0 {
        k /= p;
        v += 1;
    }
    v
}

fn truncate_abs(x: &PadicNumber, abs: i64) -> PadicNumber {
    if x.is_zero() {
        return PadicNumber::zero(x.p(), abs.min(x.absolute_precision()));
    }
    let rel = abs - x.valuation();
    if rel <= 0 {
        return PadicNumber::zero(x.p(), abs);
    }
    x.with_precision(rel as u32)
}

/// <x> = x / omega(x), the projection to 1 + pZ_p (1 + 4Z_2 when p = 2).
fn angle(x: u64, p: u64, n: u32) -> Result<PadicNumber> {
    let xv = PadicNumber::from_int(x as i64, p, n);
    let w = if p == 2 {
        PadicNumber::from_int(if x % 4 == 1 { 1 } else { -1 }, p, n)
    } else {
        teichmuller(x as i64, p, n)?
    };
    xv.div(&w)
}

/// A Mellin value with the precision that the two top Riemann sums support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MellinValue {
    pub value: PadicNumber,
    /// Absolute precision: at most the requested one, the agreement between
    /// the sums at the two top levels, and the certified Riemann-sum error.
    pub precision: i64,
}

/// int chi(x) x^{[m]} dnu, or int chi(x) <x>^s dnu.
pub fn mellin(nu: &DistributionSystem, chi: &DirichletChar, s: &MellinArg, n: u32) -> Result<MellinValue> {
    let bound = nu.boundedness().ok_or(Error::NotBounded)?.clone();
    let p = nu.p();
    if let MellinArg::Padic(sv) = s {
        if sv.valuation() < 1 && !sv.is_zero() {
            return Err(Error::Input("s must have positive valuation".into()));
        }
    }
    let imax = nu.imax();
    let cond_exp = vp_u64(chi.conductor().max(1), p);
    if chi.conductor() != p.pow(cond_exp) {
        return Err(Error::Input(format!("character of conductor {} is not of p-power conductor", chi.conductor())));
    }
    if cond_exp > imax {
        return Err(Error::Input(format!("conductor exponent {cond_exp} exceeds the top level {imax}")));
    }
    let bound_floor = bound.floor().to_integer().to_i64().unwrap_or(0);
    let work = n + imax + bound_floor.unsigned_abs() as u32 + 4;
    // integer powers at [m] = 0 are locally constant, so the sums are exact
    let exact = matches!(s, MellinArg::Integer(0));
    let sum_at = |i: u32| -> Result<PadicNumber> {
        let mut acc = PadicNumber::zero(p, work as i64);
        for (&x, v) in nu.level(i) {
            let c = chi.value(x as i64);
            if c.is_zero() {
                continue;
            }
            let weight = &c * v;
            let w = embed_cyclo(&weight, p, work)?;
            let pow = match s {
                MellinArg::Integer(m) => PadicNumber::from_rational(&Q::from_integer(BigInt::from(x).pow(*m)), p, work)?,
                MellinArg::Padic(sv) => {
                    let a = angle(x, p, work)?;
                    padic_exp(&sv.mul(&padic_log(&a, work)?), work)?
                }
            };
            acc = acc.add(&w.mul(&pow));
        }
        Ok(acc)
    };
    let top = sum_at(imax)?;
    let mut precision = n as i64;
    if !exact {
        // the Riemann sum at level I errs by at most p^{I + bound}
        precision = precision.min(imax as i64 + bound_floor);
        if imax >= 2 && imax > cond_exp {
            let prev = sum_at(imax - 1)?;
            let diff = top.sub(&prev);
            if !diff.is_zero() {
                precision = precision.min(diff.valuation());
            }
        }
    }
    if precision <= 0 {
        return Err(Error::PrecisionTooLow { have: precision, need: n as i64 });
    }
    Ok(MellinValue { value: truncate_abs(&top, precision), precision })
}

/// Exact int chi dnu at [m] = 0, with its valuation when determined.
pub fn mellin_exact_zero(nu: &DistributionSystem, chi: &DirichletChar) -> Result<(CycloNumber, Option<Q>)> {
    let v = nu.integrate(nu.imax(), &|x| chi.value(x as i64))?;
    let val = if v.is_zero() { None } else { valuation_general(&v, nu.p()) };
    Ok((v, val))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_integer_power() {
        let p = 5;
        let d = DistributionSystem::dirac(7, p, 4).unwrap();
        let triv = DirichletChar::trivial(1);
        let v = mellin(&d, &triv, &MellinArg::Integer(1), 4).unwrap();
        assert_eq!(v.precision, 4);
        assert!(v.value.congruent(&PadicNumber::from_int(7, p, 4), 4));
        let v3 = mellin(&d, &triv, &MellinArg::Integer(3), 3).unwrap();
        assert!(v3.value.congruent(&PadicNumber::from_int(343, p, 4), 3));
    }

    #[test]
    fn dirac_padic_exponent_against_power() {
        for p in [3u64, 5, 7] {
            let a = 1 + p as i64; // a = 1 mod p, so <a> = a
            let d = DistributionSystem::dirac(a, p, 4).unwrap();
            let s = PadicNumber::from_int(p as i64, p, 6);
            let v = mellin(&d, &DirichletChar::trivial(1), &MellinArg::Padic(s), 4).unwrap();
            let want = PadicNumber::from_int(a.pow(p as u32), p, 8);
            assert!(v.precision >= 3);
            assert!(v.value.congruent(&want, v.precision), "p = {p}: {} vs {}", v.value, want);
        }
    }

    #[test]
    fn log_exp_roundtrip() {
        let p = 5;
        let x = PadicNumber::from_int(26, p, 10);
        let l = padic_log(&x, 8).unwrap();
        let back = padic_exp(&l, 8).unwrap();
        assert!(back.congruent(&x, 8));
        // log(xy) = log x + log y
        let y = PadicNumber::from_int(11, p, 10);
        let lhs = padic_log(&x.mul(&y), 8).unwrap();
        let rhs = l.add(&padic_log(&y, 8).unwrap());
        assert!(lhs.congruent(&rhs, 8));
    }

    #[test]
    fn counting_measure_is_not_bounded_and_orthogonal() {
        let p = 5;
        let c = DistributionSystem::counting(p, 3).unwrap();
        let chi = DirichletChar::all(5).pop().unwrap();
        assert_eq!(mellin(&c, &chi, &MellinArg::Integer(0), 2).unwrap_err(), Error::NotBounded);
        let (v, val) = mellin_exact_zero(&c, &chi).unwrap();
        assert!(v.is_zero());
        assert_eq!(val, None);
    }

    #[test]
    fn precision_never_exceeds_level_agreement() {
        let p = 3;
        // mass at 1/2 only agrees with its level-i representative to p^i
        let pts = vec![((1, 2), CycloNumber::one())];
        let d = DistributionSystem::from_points(p, 3, &pts).unwrap();
        let v = mellin(&d, &DirichletChar::trivial(1), &MellinArg::Integer(1), 10).unwrap();
        assert!(v.precision <= 3);
        let half = PadicNumber::from_rational(&crate::arith::qr(1, 2), p, 10).unwrap();
        assert!(v.value.congruent(&half, v.precision));
    }
}
