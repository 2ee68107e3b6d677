//! The functional l_f and the assembled interpolation values.

use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{fmt_q, pow_q, qi, qr, Q};
use crate::chars::{gauss_sum_n, pow_rational, CycloNumber, DirichletChar};
use crate::eisen::{Sign, WeightData};
use crate::error::{Error, Result};
use crate::chars::dirichlet::primitive_root;
use crate::padic::{embed_cyclo, teichmuller, valuation_general, PadicNumber};
use crate::qexp::FourierExpansion;
use crate::symlat::HalfIntSymMatrix;

/// sum beta_i c_g(sigma_i).
pub fn ell_f(g: &FourierExpansion, data: &[(HalfIntSymMatrix, Q)]) -> Result<CycloNumber> {
    let mut acc = CycloNumber::zero();
    for (sigma, beta) in data {
        if sigma.trace() > g.trace_bound {
            return Err(Error::TruncationGap { trace: sigma.trace(), bound: g.trace_bound });
        }
        acc = &acc + &g.get(sigma).scale(beta);
    }
    Ok(acc)
}

/// The algebraic ratio L/(pi^{n(k+m-n)} <f, f>).
#[derive(Clone, Debug)]
pub enum LRatio {
    Supplied(CycloNumber),
    /// factor * l_f(g), the degree-one surrogate through Eisenstein coefficients.
    Functional { g: FourierExpansion, data: Vec<(HalfIntSymMatrix, Q)>, factor: CycloNumber },
}

impl LRatio {
    pub fn value(&self) -> Result<CycloNumber> {
        match self {
            LRatio::Supplied(v) => Ok(v.clone()),
            LRatio::Functional { g, data, factor } => Ok(factor * &ell_f(g, data)?),
        }
    }
}

/// Everything the interpolation formula consumes. Ideals of Q are given by
/// their positive generators t, b, c.
#[derive(Clone, Debug)]
pub struct InterpolationInput {
    pub p: u64,
    pub weight: Q,
    pub tau: HalfIntSymMatrix,
    pub t: Q,
    pub b: Q,
    pub c: u64,
    /// psi_infinity(-1).
    pub psi_inf_sign: i32,
    /// Primitive of conductor p^l, l >= 1.
    pub chi: DirichletChar,
    pub m: Q,
    pub sign: Sign,
    /// Whether (psi* conj(chi))^2 is trivial.
    pub twist_sq_trivial: bool,
    pub lambda_tau: CycloNumber,
    pub g_tau: CycloNumber,
    /// G_n(conj chi); computed over GL_n(Z/p^l) when absent.
    pub gauss: Option<CycloNumber>,
    pub lambda0: CycloNumber,
    pub l_ratio: LRatio,
    /// Relative precision of the embedded value.
    pub precision: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InterpolationValue {
    Value {
        exact: CycloNumber,
        valuation: Option<Q>,
        /// Present when every factor lies in a field that embeds into Q_p.
        embedded: Option<PadicNumber>,
    },
    /// The integral vanishes because [m] has the wrong parity for the branch.
    ParityExcluded,
}

impl InterpolationValue {
    pub fn exact(&self) -> CycloNumber {
        match self {
            InterpolationValue::Value { exact, .. } => exact.clone(),
            InterpolationValue::ParityExcluded => CycloNumber::zero(),
        }
    }
}

/// mu with (psi_infinity chi)(-1) = (-1)^{[k]+mu}.
pub fn mu_for(weight: &Q, psi_inf_sign: i32, chi: &DirichletChar) -> u32 {
    let kk = (weight - qr(1, 2)).to_integer();
    let k_sign = if kk.is_odd() { -1 } else { 1 };
    if psi_inf_sign * chi.parity() == k_sign {
        0
    } else {
        1
    }
}

/// Exponent of |A| in the bracket: (k+m-mu-1-2n)/2 or (k+3m-mu-2-4n)/2.
pub fn a_exponent(w: &WeightData, m: &Q, sign: Sign) -> Q {
    let n = qi(w.n as i64);
    let mu = qi(w.mu as i64);
    match sign {
        Sign::Plus => (&w.weight + m - &mu - qi(1) - qi(2) * &n) / qi(2),
        Sign::Minus => (&w.weight + qi(3) * m - &mu - qi(2) - qi(4) * &n) / qi(2),
    }
}

/// The bracket of the interpolation formula, before the embedding.
pub fn bracket(input: &InterpolationInput) -> Result<InterpolationValue> {
    let n = input.tau.degree();
    let p = input.p;
    if input.c % p == 0 {
        return Err(Error::PDividesLevel(p));
    }
    let cond = input.chi.conductor();
    let mut ell = 0u32;
    let mut f = cond;
    while f % p == 0 {
        f /= p;
        ell += 1;
    }
    if f != 1 || ell == 0 {
        return Err(Error::Input(format!("chi has conductor {cond}, not a positive power of {p}")));
    }
    let mu = mu_for(&input.weight, input.psi_inf_sign, &input.chi);
    let w = WeightData::new(n, input.weight.clone(), mu)?;
    let m = &input.m;
    let nq = qi(n as i64);
    let k_mu = &input.weight - qi(mu as i64);
    let in_range = match input.sign {
        Sign::Plus => nq <= *m && *m <= k_mu,
        Sign::Minus => qi(2 * n as i64 + 1) - &k_mu <= *m && *m <= nq,
    };
    if !in_range || *m.denom() != 2.into() {
        return Err(Error::NotSpecialValue(fmt_q(m)));
    }
    if w.omega(m) != Some(input.sign) {
        return Ok(InterpolationValue::ParityExcluded);
    }
    w.admissible(m, input.twist_sq_trivial)?;
    match valuation_general(&input.lambda0, p) {
        Some(v) if v.is_zero() => {}
        _ => return Err(Error::NotOrdinary),
    }

    let kk = (&input.weight - qr(1, 2)).to_integer();
    let mut out = if (kk * n).is_odd() { CycloNumber::from_int(-1) } else { CycloNumber::one() };
    // |2tau|^{n/2 + mu}
    let det2 = input.tau.det() * pow_q(&qi(2), n as i64);
    out = &out * &pow_rational(&det2, &(qr(n as i64, 2) + qi(mu as i64)))?;
    // i^d with d = n^2/2 for even n
    let d = if n % 2 == 0 { (n * n / 2) as i64 } else { 0 };
    out = &out * &CycloNumber::zeta(4, -d);
    let ntbc = &input.t * &input.b * qi(input.c as i64);
    out = out.scale(&pow_q(&ntbc, -((n as i64) * mu as i64)));
    // |-(t b^2 c^2 / 2) tau_hat| with tau_hat = t (2tau)^{-1}
    let scale = &input.t * &input.b * &input.b * qi((input.c * input.c) as i64) / qi(2);
    let a = pow_q(&(-(&scale * &input.t)), n as i64) / &det2;
    out = &out * &pow_rational(&a, &-a_exponent(&w, m, input.sign))?;
    // p^{n l (n+1-k-m)}
    let e = qi((n * ell as usize) as i64) * (qi(n as i64 + 1) - &input.weight - m);
    out = out.scale(&pow_q(&qi(p as i64), e.to_integer().try_into().map_err(|_| Error::Input("exponent".into()))?));
    let (gauss, gauss_val) = match &input.gauss {
        Some(g) => (g.clone(), valuation_general(g, p)),
        None => {
            let id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
            let g = gauss_sum_n(&id, &input.chi.conj(), n)?;
            let v = if n == 1 { gauss_valuation(&input.chi.conj(), p, ell) } else { valuation_general(&g, p) };
            (g, v)
        }
    };
    // the rest of the bracket generally lies in a field where p is tame
    let rest_val = valuation_general(&out, p);
    out = &out * &gauss;
    let denom = &input.lambda_tau * &input.g_tau;
    out = &out * &denom.inv()?;
    out = &out * &input.lambda0.pow(-(ell as i64))?;
    let tail = &(&denom.inv()? * &input.lambda0.pow(-(ell as i64))?) * &input.l_ratio.value()?;
    out = &out * &input.l_ratio.value()?;
    let valuation = if out.is_zero() {
        None
    } else {
        valuation_general(&out, p).or_else(|| Some(rest_val? + gauss_val? + valuation_general(&tail, p)?))
    };
    let embedded = embed_cyclo(&out, p, input.precision).ok();
    Ok(InterpolationValue::Value { exact: out, valuation, embedded })
}

/// v_p of the Gauss sum of phi (conductor p^l) under the Teichmuller embedding:
/// a/(p-1) for phi = omega^{-a} when l = 1, and l/2 for l >= 2.
pub fn gauss_valuation(phi: &DirichletChar, p: u64, ell: u32) -> Option<Q> {
    if ell >= 2 {
        return Some(qr(ell as i64, 2));
    }
    if p == 2 {
        return None;
    }
    let g = primitive_root(p, 1);
    let target = embed_cyclo(&phi.value(g as i64), p, 6).ok()?;
    let w = teichmuller(g as i64, p, 6).ok()?;
    (0..p - 1).find(|&b| w.pow(b as i64).ok().as_ref() == Some(&target)).map(|b| {
        let a = (p - 1 - b) % (p - 1);
        qr(a as i64, (p - 1) as i64)
    })
}

/// The interpolation value: the bracket and its image under the embedding.
pub fn interpolation_value(input: &InterpolationInput) -> Result<InterpolationValue> {
    bracket(input)
}
