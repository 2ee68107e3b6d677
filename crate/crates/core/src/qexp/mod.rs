//! Truncated Fourier expansions and the operators acting on them.

mod ops;
pub mod rankin;
pub mod theta;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{self, fmt_q, qi, Q};
use crate::chars::{pow_rational, CycloNumber};
use crate::error::{Error, Result};
use crate::symlat::HalfIntSymMatrix;

pub use ops::{multiply, twist_n1, u_p, u_p_to, v_shift};
pub use rankin::rankin_dirichlet;
pub use theta::{numeric_theta_check, theta_series, theta_transform_rhs, ThetaCheck, ThetaConstant};

/// Coefficient ring element. Square roots of p are cyclotomic integers, so a
/// coefficient in Q(chi)(sqrt p) is a single cyclotomic number.
pub type ExtCoeff = CycloNumber;

/// Truncated expansion sum c(tau) e(tr(tau z)). Every tau with trace at most
/// `trace_bound` and nonzero coefficient is present.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierExpansion {
    pub degree: usize,
    pub weight2: i64,
    pub b: Q,
    pub c: u64,
    pub trace_bound: i64,
    coeffs: BTreeMap<HalfIntSymMatrix, ExtCoeff>,
}

impl FourierExpansion {
    pub fn new(degree: usize, weight2: i64, b: Q, c: u64, trace_bound: i64) -> Self {
        FourierExpansion { degree, weight2, b, c, trace_bound, coeffs: BTreeMap::new() }
    }

    /// Same shape, no coefficients.
    pub fn empty_like(&self) -> Self {
        Self::new(self.degree, self.weight2, self.b.clone(), self.c, self.trace_bound)
    }

    /// Weight k as a rational.
    pub fn weight(&self) -> Q {
        Q::new(self.weight2.into(), 2.into())
    }

    /// Sets a coefficient; zeros are not stored. Keys beyond the trace bound are dropped.
    pub fn set(&mut self, tau: HalfIntSymMatrix, v: ExtCoeff) -> Result<()> {
        if tau.degree() != self.degree {
            return Err(Error::DegreeMismatch(self.degree, tau.degree()));
        }
        if !tau.is_positive_semidefinite() {
            return Err(Error::InvalidMatrix(format!("{tau} is not positive semidefinite")));
        }
        if tau.trace() > self.trace_bound {
            return Ok(());
        }
        if v.is_zero() {
            self.coeffs.remove(&tau);
        } else {
            self.coeffs.insert(tau, v);
        }
        Ok(())
    }

    pub fn add_to(&mut self, tau: &HalfIntSymMatrix, v: &ExtCoeff) {
        if tau.trace() > self.trace_bound {
            return;
        }
        let cur = self.get(tau);
        let next = &cur + v;
        if next.is_zero() {
            self.coeffs.remove(tau);
        } else {
            self.coeffs.insert(tau.clone(), next);
        }
    }

    /// Coefficient, zero when absent.
    pub fn get(&self, tau: &HalfIntSymMatrix) -> ExtCoeff {
        self.coeffs.get(tau).cloned().unwrap_or_else(CycloNumber::zero)
    }

    /// Coefficient under the truncation contract.
    pub fn coeff(&self, tau: &HalfIntSymMatrix) -> Result<ExtCoeff> {
        if tau.trace() > self.trace_bound {
            return Err(Error::InsufficientTruncation { have: self.trace_bound, need: tau.trace() });
        }
        Ok(self.get(tau))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HalfIntSymMatrix, &ExtCoeff)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree one coefficient at tau = m.
    pub fn get_n1(&self, m: i64) -> ExtCoeff {
        self.get(&HalfIntSymMatrix::scalar(m))
    }

    pub fn truncate(&self, bound: i64) -> Self {
        let mut out = self.empty_like();
        out.trace_bound = bound.min(self.trace_bound);
        for (k, v) in &self.coeffs {
            if k.trace() <= out.trace_bound {
                out.coeffs.insert(k.clone(), v.clone());
            }
        }
        out
    }

    pub fn scale(&self, a: &ExtCoeff) -> Self {
        let mut out = self.empty_like();
        for (k, v) in &self.coeffs {
            out.add_to(k, &(v * a));
        }
        out
    }

    /// Sum; the trace bound is the smaller of the two.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        let mut out = self.empty_like();
        out.trace_bound = self.trace_bound.min(other.trace_bound);
        out.b = arith::rational_gcd(&self.b, &other.b);
        out.c = arith::lcm_u64(self.c, other.c);
        for (k, v) in self.coeffs.iter().chain(other.coeffs.iter()) {
            out.add_to(k, v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&CycloNumber::from_int(-1)))
    }

    /// Whether every stored key lies in b S^.
    pub fn respects_support(&self) -> bool {
        self.coeffs.keys().all(|t| t.in_lattice(&self.b))
    }

    /// Equality of coefficients with trace at most `bound`.
    pub fn agrees_up_to(&self, other: &Self, bound: i64) -> bool {
        let keys: std::collections::BTreeSet<&HalfIntSymMatrix> =
            self.coeffs.keys().chain(other.coeffs.keys()).filter(|t| t.trace() <= bound).collect();
        keys.into_iter().all(|t| self.get(t) == other.get(t))
    }

    pub fn to_json(&self) -> ExpansionFile {
        ExpansionFile {
            degree: self.degree,
            weight2: self.weight2,
            b: fmt_q(&self.b),
            c: self.c,
            trace_bound: self.trace_bound,
            p: None,
            coeffs: self
                .coeffs
                .iter()
                .map(|(t, v)| CoeffEntry { tau_twice: t.twice().to_vec(), cyclo: v.clone(), sqrtp_exp: 0 })
                .collect(),
        }
    }

    pub fn from_json(file: &ExpansionFile) -> Result<Self> {
        let b = arith::parse_q(&file.b).ok_or_else(|| Error::Input(format!("bad level b {}", file.b)))?;
        let mut out = Self::new(file.degree, file.weight2, b, file.c, file.trace_bound);
        for e in &file.coeffs {
            let tau = HalfIntSymMatrix::new(e.tau_twice.clone())?;
            let mut v = e.cyclo.clone();
            if e.sqrtp_exp != 0 {
                let p = file
                    .p
                    .ok_or_else(|| Error::Input("sqrtp_exp given without the prime p".into()))?;
                v = v * pow_rational(&qi(p as i64), &Q::new(e.sqrtp_exp.into(), 2.into()))?;
            }
            if !tau.in_lattice(&out.b) {
                return Err(Error::Input(format!("{tau} violates the support condition for b = {}", file.b)));
            }
            out.set(tau, v)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub tau_twice: Vec<Vec<i64>>,
    pub cyclo: CycloNumber,
    #[serde(default)]
    pub sqrtp_exp: i64,
}

/// On-disk expansion format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionFile {
    pub degree: usize,
    pub weight2: i64,
    pub b: String,
    pub c: u64,
    pub trace_bound: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub coeffs: Vec<CoeffEntry>,
}

/// p^(e/2) for an integer e, as a cyclotomic number.
pub fn half_power(p: u64, e: i64) -> CycloNumber {
    pow_rational(&qi(p as i64), &Q::new(e.into(), 2.into())).expect("half-integral exponent")
}

/// Degree one expansion from a list of (m, value).
pub fn from_n1_values(weight2: i64, trace_bound: i64, vals: &[(i64, Q)]) -> FourierExpansion {
    let mut f = FourierExpansion::new(1, weight2, Q::from_integer(1.into()), 1, trace_bound);
    for (m, v) in vals {
        f.set(HalfIntSymMatrix::scalar(*m), CycloNumber::from_rational(v.clone())).unwrap();
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    #[test]
    fn json_round_trip_with_sqrt_part() {
        let mut f = FourierExpansion::new(1, 13, qi(1), 1, 10);
        f.set(HalfIntSymMatrix::scalar(1), CycloNumber::from_rational(qr(5, 2))).unwrap();
        f.set(HalfIntSymMatrix::scalar(3), half_power(3, -9)).unwrap();
        let s = serde_json::to_string(&f.to_json()).unwrap();
        let back: ExpansionFile = serde_json::from_str(&s).unwrap();
        assert_eq!(FourierExpansion::from_json(&back).unwrap(), f);

        let mut file = back.clone();
        file.p = Some(3);
        file.coeffs[0].sqrtp_exp = 2;
        let g = FourierExpansion::from_json(&file).unwrap();
        assert_eq!(g.get_n1(1), CycloNumber::from_rational(qr(15, 2)));
    }

    #[test]
    fn rejects_off_support_keys() {
        let mut file = FourierExpansion::new(1, 1, qi(2), 1, 10).to_json();
        file.coeffs.push(CoeffEntry { tau_twice: vec![vec![2]], cyclo: CycloNumber::one(), sqrtp_exp: 0 });
        assert!(FourierExpansion::from_json(&file).is_err());
    }
}
