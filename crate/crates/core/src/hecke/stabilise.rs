use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SatakeParams;
use crate::arith::{kronecker, qi};
use crate::chars::{CycloNumber, DirichletChar};
use crate::error::{Error, Result};
use crate::qexp::{half_power, twist_n1, u_p_to, v_shift, FourierExpansion};
use crate::symlat::HalfIntSymMatrix;

/// Result of a p-stabilisation.
#[derive(Clone, Debug)]
pub struct PStabilisation {
    pub form: FourierExpansion,
    pub lambda0: CycloNumber,
    /// None when the valuation of lambda0 could not be decided.
    pub ordinary: Option<bool>,
    pub all_zero: bool,
}

impl PStabilisation {
    pub fn non_ordinary(&self) -> bool {
        self.ordinary == Some(false)
    }
}

fn check_inputs(f: &FourierExpansion, lambda_t: &[CycloNumber], sp: &SatakeParams, trace_bound: i64) -> Result<usize> {
    let n = f.degree;
    if n != sp.degree() {
        return Err(Error::DegreeMismatch(n, sp.degree()));
    }
    if n > 3 {
        return Err(Error::UnsupportedDegree(n));
    }
    let p = sp.p;
    if f.c % p == 0 {
        return Err(Error::PDividesLevel(p));
    }
    let top = 1usize << n;
    if lambda_t.len() < top {
        return Err(Error::Input(format!("need Lambda(T_m) for m < {top}, got {}", lambda_t.len())));
    }
    if lambda_t[0] != CycloNumber::one() {
        return Err(Error::Input("Lambda(T_0) must be 1".into()));
    }
    let need = (p as i64).pow(2 * (top as u32 - 1)) * trace_bound;
    if f.trace_bound < need {
        return Err(Error::InsufficientTruncation { have: f.trace_bound, need });
    }
    Ok(top)
}

fn finish(mut form: FourierExpansion, f: &FourierExpansion, sp: &SatakeParams, top: usize) -> PStabilisation {
    form.c = f.c * sp.p.pow(2 * (top as u32 - 1));
    let all_zero = form.is_empty();
    PStabilisation { form, lambda0: sp.lambda0(), ordinary: sp.ordinary(), all_zero }
}

/// Coefficientwise p-stabilisation
/// c_{f0}(tau) = sum_v A_v p^{n(n+1-k) v} c_f(p^{2v} tau).
pub fn p_stabilise(
    f: &FourierExpansion,
    lambda_t: &[CycloNumber],
    sp: &SatakeParams,
    trace_bound: i64,
) -> Result<PStabilisation> {
    let top = check_inputs(f, lambda_t, sp, trace_bound)?;
    let n = f.degree as i64;
    let p = sp.p;
    let inv = sp.lambda0().inv()?;
    let inv_pows: Vec<CycloNumber> = (0..top as i64).map(|u| inv.pow(u).unwrap()).collect();
    let a: Vec<CycloNumber> = (0..top)
        .map(|v| {
            (v..top).fold(CycloNumber::zero(), |acc, u| {
                let t = &lambda_t[u - v] * &inv_pows[u];
                if (u - v) % 2 == 0 {
                    acc + t
                } else {
                    acc - t
                }
            })
        })
        .collect();
    // p^{n(n+1-k)} = p^{(2n(n+1) - n*weight2)/2}
    let step = 2 * n * (n + 1) - n * f.weight2;
    let w: Vec<CycloNumber> = (0..top as i64).map(|v| &a[v as usize] * &half_power(p, step * v)).collect();

    let mut out = f.empty_like();
    out.trace_bound = trace_bound;
    for (sigma, c) in f.iter() {
        let mut scale = 1i64;
        for (v, wv) in w.iter().enumerate() {
            if v > 0 {
                scale *= (p * p) as i64;
            }
            match sigma.div_exact(scale) {
                Some(tau) if tau.trace() <= trace_bound => out.add_to(&tau, &(c * wv)),
                Some(_) => {}
                None => break,
            }
        }
    }
    Ok(finish(out, f, sp, top))
}

/// The same form built from operators: sum_m lambda0^{-m} sum_l (-1)^l Lambda(T_l) f|U_p^{m-l}.
pub fn p_stabilise_operator(
    f: &FourierExpansion,
    lambda_t: &[CycloNumber],
    sp: &SatakeParams,
    trace_bound: i64,
) -> Result<PStabilisation> {
    let top = check_inputs(f, lambda_t, sp, trace_bound)?;
    let p = sp.p;
    let pp = (p * p) as i64;
    // powers[j] = f | U_p^j, complete to trace_bound p^{2(top-1-j)}
    let mut powers = vec![f.truncate(trace_bound * pp.pow(top as u32 - 1))];
    for j in 1..top {
        let bound = trace_bound * pp.pow((top - 1 - j) as u32);
        let next = u_p_to(&powers[j - 1], p, bound)?;
        powers.push(next);
    }
    let inv = sp.lambda0().inv()?;
    let mut out = f.empty_like();
    out.trace_bound = trace_bound;
    for m in 0..top {
        let lm = inv.pow(m as i64)?;
        for l in 0..=m {
            let mut coef = &lm * &lambda_t[l];
            if l % 2 == 1 {
                coef = -coef;
            }
            for (tau, c) in powers[m - l].iter() {
                if tau.trace() <= trace_bound {
                    out.add_to(tau, &(c * &coef));
                }
            }
        }
    }
    Ok(finish(out, f, sp, top))
}

/// The Legendre symbol mod p as a character.
fn legendre(p: u64) -> DirichletChar {
    let p_star = if p % 4 == 1 { p as i64 } else { -(p as i64) };
    DirichletChar::kronecker(p_star)
}

/// Degree one closed form
/// f0 = f - (-1/p)^{[k]} p^{-1/2} lambda^{-1} (f (x) (./p)) - p^{k-1} lambda^{-1} f(p^2 z).
pub fn pstab_n1_explicit(f: &FourierExpansion, lambda: &CycloNumber, p: u64, trace_bound: i64) -> Result<FourierExpansion> {
    if f.degree != 1 {
        return Err(Error::UnsupportedDegree(f.degree));
    }
    if f.trace_bound < trace_bound {
        return Err(Error::InsufficientTruncation { have: f.trace_bound, need: trace_bound });
    }
    let li = lambda.inv()?;
    let kk = (f.weight2 - 1) / 2;
    let eps = if kronecker(-1, p) == -1 && kk % 2 == 1 { -1 } else { 1 };
    let t2 = twist_n1(f, &legendre(p))?.scale(&(&half_power(p, -1) * &li).scale(&qi(eps)));
    // p^{k-1} f(p^2 z) = p^{-1} f|V(p)
    let t3 = v_shift(f, p).scale(&li.scale(&crate::arith::qr(1, p as i64)));
    let mut out = f.sub(&t2)?.sub(&t3)?.truncate(trace_bound);
    out.c = f.c * p * p;
    out.b = f.b.clone();
    Ok(out)
}

/// Random small integer values c(m) for 1 <= m <= bound with p^2 not dividing m.
pub fn random_n1_base(p: u64, bound: i64, seed: u64) -> BTreeMap<i64, CycloNumber> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pp = (p * p) as i64;
    (1..=bound)
        .filter(|m| m % pp != 0)
        .map(|m| (m, CycloNumber::from_int(rng.gen_range(-9..=9))))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

/// Degree one coefficients satisfying the T_p eigen-recursion
/// c(p^2 m) = p^{k-2} Lambda c(m) - ((-1)^{[k]} m / p) p^{k-3/2} c(m) - p^{2k-2} c(m/p^2),
/// Lambda = p(lambda + lambda^{-1}), grown from the base values along every p^2-chain.
pub fn n1_eigenform(
    p: u64,
    weight2: i64,
    lambda: &CycloNumber,
    base: &BTreeMap<i64, CycloNumber>,
    trace_bound: i64,
) -> Result<(FourierExpansion, SatakeParams)> {
    if weight2 % 2 == 0 {
        return Err(Error::Input("weight must be half-integral".into()));
    }
    let sp = SatakeParams::new(p, vec![lambda.clone()])?;
    let big_lambda = (lambda + &lambda.inv()?).scale(&qi(p as i64));
    let kk = (weight2 - 1) / 2;
    let sign = if kk % 2 == 1 { -1 } else { 1 };
    let a = &half_power(p, weight2 - 4) * &big_lambda;
    let b = half_power(p, weight2 - 3);
    let c = half_power(p, 2 * weight2 - 4);
    let pp = (p * p) as i64;
    let mut f = FourierExpansion::new(1, weight2, qi(1), 4, trace_bound);
    for (&m0, v0) in base {
        if m0 <= 0 || m0 % pp == 0 {
            return Err(Error::Input(format!("base index {m0} must be positive and prime to p^2")));
        }
        let mut prev = CycloNumber::zero();
        let mut cur = v0.clone();
        let mut m = m0;
        while m <= trace_bound {
            f.set(HalfIntSymMatrix::scalar(m), cur.clone())?;
            let chi = kronecker(sign * m, p) as i64;
            let next = &a * &cur - (&b * &cur).scale(&qi(chi)) - &c * &prev;
            prev = cur;
            cur = next;
            m *= pp;
        }
    }
    Ok((f, sp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;
    use crate::qexp::{from_n1_values, u_p};

    fn data(p: u64, lam: Q, bound: i64) -> (FourierExpansion, SatakeParams) {
        let base = random_n1_base(p, 100, 7);
        n1_eigenform(p, 13, &CycloNumber::from_rational(lam), &base, bound).unwrap()
    }

    use crate::arith::Q;

    #[test]
    fn explicit_and_coefficient_forms_agree() {
        for p in [3u64, 5] {
            for lam in [qi(2), qr(3, 2)] {
                let (f, sp) = data(p, lam.clone(), 100 * (p * p) as i64);
                let t = sp.hecke_eigenvalues().unwrap();
                let a = p_stabilise(&f, &t, &sp, 100).unwrap();
                let b = pstab_n1_explicit(&f, &sp.lambdas[0], p, 100).unwrap();
                assert!(a.form.agrees_up_to(&b, 100), "p = {p}, lambda = {lam}");
                assert!(!a.all_zero);
                assert_eq!(a.form.c, 4 * p * p);
            }
        }
    }

    #[test]
    fn stabilised_form_is_u_p_eigen() {
        for p in [3u64, 5] {
            let pp = (p * p) as i64;
            let (f, sp) = data(p, qi(2), 20 * pp * pp);
            let t = sp.hecke_eigenvalues().unwrap();
            let f0 = p_stabilise(&f, &t, &sp, 20 * pp).unwrap().form;
            let lhs = u_p(&f0, p);
            let rhs = f0.scale(&sp.lambda0());
            assert_eq!(lhs.trace_bound, 20);
            assert!(lhs.agrees_up_to(&rhs, 20));
            assert!(!lhs.is_empty());
        }
    }

    #[test]
    fn operator_and_coefficient_forms_agree() {
        for p in [3u64, 5] {
            let (f, sp) = data(p, qr(3, 2), 30 * (p * p) as i64);
            let t = sp.hecke_eigenvalues().unwrap();
            let a = p_stabilise(&f, &t, &sp, 30).unwrap();
            let b = p_stabilise_operator(&f, &t, &sp, 30).unwrap();
            assert_eq!(a.form, b.form);
        }
    }

    #[test]
    fn single_coefficient_case() {
        let f = from_n1_values(13, 18, &[(2, qi(5))]);
        let sp = SatakeParams::new(3, vec![CycloNumber::from_int(2)]).unwrap();
        let t = sp.hecke_eigenvalues().unwrap();
        let out = p_stabilise(&f, &t, &sp, 2).unwrap();
        // (1 - Lambda / (p lambda)) c_f = (1 - 15/2 / 6) 5
        assert_eq!(out.form.get_n1(2), CycloNumber::from_rational(qr(-5, 4)));
        assert!(out.non_ordinary());
    }

    #[test]
    fn degenerate_eigenvalues() {
        let f = from_n1_values(13, 90, &[(2, qi(1)), (18, qi(1))]);
        let sp = SatakeParams::new(3, vec![CycloNumber::from_rational(qr(1, 3))]).unwrap();
        let t = vec![CycloNumber::one(), CycloNumber::zero(), CycloNumber::zero()];
        let out = p_stabilise(&f, &t, &sp, 10).unwrap();
        assert_eq!(out.ordinary, Some(true));
        let want = CycloNumber::one() + half_power(3, 4 - 13);
        assert_eq!(out.form.get_n1(2), want);
    }

    #[test]
    fn input_errors() {
        let mut f = from_n1_values(13, 100, &[(1, qi(1))]);
        let sp = SatakeParams::new(3, vec![CycloNumber::from_int(2)]).unwrap();
        let t = sp.hecke_eigenvalues().unwrap();
        assert!(matches!(p_stabilise(&f, &t, &sp, 20), Err(Error::InsufficientTruncation { .. })));
        f.c = 6;
        assert_eq!(p_stabilise(&f, &t, &sp, 5).unwrap_err(), Error::PDividesLevel(3));
        let g = FourierExpansion::new(2, 13, qi(1), 1, 10);
        assert_eq!(pstab_n1_explicit(&g, &CycloNumber::one(), 3, 1).unwrap_err(), Error::UnsupportedDegree(2));
    }

    #[test]
    fn explicit_form_on_a_prime_to_p_index() {
        let f = from_n1_values(13, 20, &[(2, qi(1))]);
        let lam = CycloNumber::from_int(2);
        let g = pstab_n1_explicit(&f, &lam, 5, 2).unwrap();
        // (-1/5) = 1 and (2/5) = -1
        let want = CycloNumber::one() + half_power(5, -1).scale(&qr(1, 2));
        assert_eq!(g.get_n1(2), want);
    }
}
