//! Theta series attached to (tau, chi, mu) and their transformation under the involution.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::FourierExpansion;
use crate::arith::{self, det_int, factorize, qi, Q};
use crate::chars::{gauss_sum_n, pow_rational, CycloNumber, DirichletChar};
use crate::error::{Error, Result};
use crate::symlat::{theta_ideal, HalfIntSymMatrix};

/// Sum over x in M_n(Z) of chi*^{-1}(det x) (det x)^mu e(tr(scale x^T tau x z)),
/// with chi* the primitive character of chi and chi*(0) = 1 exactly when its conductor is 1.
pub fn theta_series(
    tau: &HalfIntSymMatrix,
    chi: &DirichletChar,
    mu: u32,
    scale: &Q,
    trace_bound: i64,
) -> Result<FourierExpansion> {
    if mu > 1 {
        return Err(Error::Input(format!("mu must be 0 or 1, got {mu}")));
    }
    if !tau.is_positive_definite() {
        return Err(Error::NonPositiveDefinite);
    }
    let n = tau.degree();
    let chi_par = if n % 2 == 0 { 1 } else { chi.parity() };
    let mu_par = if (n as u32 * mu) % 2 == 0 { 1 } else { -1 };
    if chi_par != mu_par {
        return Err(Error::ParityMismatch);
    }
    let prim = chi.primitive();
    let trivial = prim.modulus() == 1;
    let weight = |d: i64| -> CycloNumber {
        let c = if trivial { CycloNumber::one() } else { prim.value(d).conj() };
        if mu == 1 {
            c.scale(&qi(d))
        } else {
            c
        }
    };
    let mut out = FourierExpansion::new(n, n as i64 + 2 * mu as i64, scale.clone(), prim.modulus(), trace_bound);
    if trace_bound < 0 {
        return Ok(out);
    }
    let tr_tau = Q::new(tau.trace().into(), 1.into());
    let lam_lower = tau.det() / arith::pow_q(&tr_tau, n as i64 - 1);
    let bound = arith::ceil_sqrt(&(qi(trace_bound) / (scale * lam_lower)));
    let nn = n * n;
    let mut x = vec![-bound; nn];
    loop {
        let m: Vec<Vec<i64>> = (0..n).map(|i| x[i * n..(i + 1) * n].to_vec()).collect();
        let q = tau.congruent(&m);
        let tw: Vec<Vec<Q>> = q.twice().iter().map(|r| r.iter().map(|&v| scale * qi(v)).collect()).collect();
        if tw.iter().flatten().any(|v| !v.is_integer()) {
            return Err(Error::InvalidScale(arith::fmt_q(scale)));
        }
        let tw: Vec<Vec<i64>> = tw.iter().map(|r| r.iter().map(|v| v.to_integer().to_i64().unwrap()).collect()).collect();
        let varsigma = HalfIntSymMatrix::new(tw).map_err(|_| Error::InvalidScale(arith::fmt_q(scale)))?;
        if varsigma.trace() <= trace_bound {
            let d = det_int(&m).to_i64().unwrap();
            let w = weight(d);
            if !w.is_zero() {
                out.add_to(&varsigma, &w);
            }
        }
        let mut i = 0;
        while i < nn {
            x[i] += 1;
            if x[i] <= bound {
                break;
            }
            x[i] = -bound;
            i += 1;
        }
        if i == nn {
            break;
        }
    }
    Ok(out)
}

/// The constant in front of the transformed theta series.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaConstant {
    /// chi(-1)^n i^d T^{n mu} |2 tau|^{-n/2-mu} p^{-l n^2/2} G_n(chi-bar), T = N(tbc)
    pub displayed: CycloNumber,
    /// displayed times T^{n/2}; the value that matches numerically in degree one
    pub calibrated: CycloNumber,
    pub t: u64,
    pub tau_hat: Vec<Vec<i64>>,
    #[serde(with = "crate::arith::serde_q")]
    pub big_t: Q,
    #[serde(with = "crate::arith::serde_q")]
    pub scale: Q,
    pub p: u64,
    pub ell: u32,
}

fn prime_power(m: u64) -> Result<(u64, u32)> {
    let f = factorize(m);
    if f.len() != 1 {
        return Err(Error::NotPrimitive);
    }
    Ok(f[0])
}

/// Constant and right-hand expansion of the theta transformation formula.
pub fn theta_transform_rhs(
    tau: &HalfIntSymMatrix,
    chi: &DirichletChar,
    mu: u32,
    b: &Q,
    c: u64,
    trace_bound: i64,
) -> Result<(ThetaConstant, FourierExpansion)> {
    if !chi.is_primitive() || chi.modulus() == 1 {
        return Err(Error::NotPrimitive);
    }
    let (p, ell) = prime_power(chi.modulus())?;
    let n = tau.degree() as i64;
    let (t, tau_hat) = theta_ideal(tau)?;
    let big_t = qi(t as i64) * b * qi(c as i64);
    let scale = qi(t as i64) * b * b * qi((c * c) as i64) / qi(2);
    let sign = if n % 2 == 1 && chi.parity() == -1 { -1 } else { 1 };
    let d = if n % 2 == 0 { n * n / 2 } else { 0 };
    let ident: Vec<Vec<i64>> = crate::symlat::identity(n as usize);
    let g = gauss_sum_n(&ident, &chi.conj(), n as usize)?;
    let det2 = Q::from_integer(tau.det_twice());
    let mut k = CycloNumber::zeta(4, d).scale(&qi(sign));
    k = k * CycloNumber::from_rational(arith::pow_q(&big_t, n * mu as i64));
    k = k * pow_rational(&det2, &Q::new((-(n + 2 * mu as i64)).into(), 2.into()))?;
    k = k * pow_rational(&qi(p as i64), &Q::new((-(ell as i64) * n * n).into(), 2.into()))?;
    k = k * g;
    let calibrated = &k * &pow_rational(&big_t, &Q::new(n.into(), 2.into()))?;
    let hat = HalfIntSymMatrix::from_int_matrix(&tau_hat)?;
    let series = theta_series(&hat, &chi.conj(), mu, &scale, trace_bound)?;
    Ok((
        ThetaConstant { displayed: k, calibrated, t, tau_hat, big_t, scale, p, ell },
        series,
    ))
}

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct KahanC {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

impl KahanC {
    fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }
    fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

fn e(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * x).exp()
}

/// Numeric comparison of both sides of the degree one transformation at a point z.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaCheck {
    pub z: (f64, f64),
    pub lhs: (f64, f64),
    pub rhs: (f64, f64),
    pub residual: f64,
    pub relative: f64,
    /// relative residual when the displayed constant is used instead
    pub displayed_relative: f64,
}

/// Evaluates (-iYz)^{-1/2} (Yz)^{-mu} theta_chi(-1/(Y^2 z)) against the transformed series
/// at z, both truncated to |x| <= terms.
pub fn numeric_theta_check(
    tau: &HalfIntSymMatrix,
    chi: &DirichletChar,
    mu: u32,
    b: &Q,
    c: u64,
    z: Complex64,
    terms: i64,
) -> Result<ThetaCheck> {
    if tau.degree() != 1 {
        return Err(Error::NumericOnlyForDegreeOne);
    }
    if z.im <= 0.0 {
        return Err(Error::Input("z must lie in the upper half plane".into()));
    }
    let (k, _) = theta_transform_rhs(tau, chi, mu, b, c, 0)?;
    let y = k.big_t.to_f64().unwrap() * (k.p as f64).powi(k.ell as i32);
    let tau_f = tau.twice()[0][0] as f64 / 2.0;
    let w = -Complex64::new(1.0, 0.0) / (z * y * y);
    let mut lhs_sum = KahanC::default();
    let mut rhs_sum = KahanC::default();
    let hat = k.tau_hat[0][0] as f64;
    let sc = k.scale.to_f64().unwrap();
    for x in -terms..=terms {
        let xf = x as f64;
        let pw = if mu == 1 { xf } else { 1.0 };
        let cx = chi.value_complex(x);
        if !cx.is_zero() {
            lhs_sum.add(cx.conj() * pw * e(w * (tau_f * xf * xf)));
            rhs_sum.add(cx * pw * e(z * (sc * hat * xf * xf)));
        }
    }
    let i = Complex64::new(0.0, 1.0);
    let mut lhs = (-i * y * z).powf(-0.5) * lhs_sum.value();
    if mu == 1 {
        lhs /= y * z;
    }
    let rhs = k.calibrated.to_complex() * rhs_sum.value();
    let rhs_disp = k.displayed.to_complex() * rhs_sum.value();
    let residual = (lhs - rhs).norm();
    let denom = lhs.norm().max(rhs.norm());
    let rel = |r: f64| if denom > 0.0 { r / denom } else { 0.0 };
    Ok(ThetaCheck {
        z: (z.re, z.im),
        lhs: (lhs.re, lhs.im),
        rhs: (rhs.re, rhs.im),
        residual,
        relative: rel(residual),
        displayed_relative: rel((lhs - rhs_disp).norm()),
    })
}
