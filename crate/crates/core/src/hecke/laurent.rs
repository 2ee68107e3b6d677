//! Laurent polynomials in x_1..x_n whose coefficients are rational, with p
//! either a formal positive parameter or a fixed prime.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{fmt_q, pow_q, qi, Q};
use crate::chars::CycloNumber;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PMode {
    Symbolic,
    Numeric(u64),
}

/// p^e x^a. In numeric mode `p` is always 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub p: i64,
    pub x: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylLaurentPoly {
    n: usize,
    mode: PMode,
    terms: BTreeMap<Monomial, Q>,
}

impl WeylLaurentPoly {
    pub fn zero(n: usize, mode: PMode) -> Self {
        WeylLaurentPoly { n, mode, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, mode: PMode, c: Q) -> Self {
        let mut out = Self::zero(n, mode);
        out.add_term(Monomial { p: 0, x: vec![0; n] }, c);
        out
    }

    pub fn one(n: usize, mode: PMode) -> Self {
        Self::constant(n, mode, qi(1))
    }

    /// c p^e x^a.
    pub fn monomial(n: usize, mode: PMode, c: Q, p_exp: i64, x: Vec<i64>) -> Self {
        assert_eq!(x.len(), n);
        let mut out = Self::zero(n, mode);
        match mode {
            PMode::Symbolic => out.add_term(Monomial { p: p_exp, x }, c),
            PMode::Numeric(p) => out.add_term(Monomial { p: 0, x }, c * pow_q(&qi(p as i64), p_exp)),
        }
        out
    }

    /// p^e as a constant.
    pub fn p_power(n: usize, mode: PMode, e: i64) -> Self {
        Self::monomial(n, mode, qi(1), e, vec![0; n])
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> PMode {
        self.mode
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let vanished = {
            let e = self.terms.entry(m.clone()).or_insert_with(Q::zero);
            *e += c;
            e.is_zero()
        };
        if vanished {
            self.terms.remove(&m);
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.n, o.n, "variable count mismatch");
        assert_eq!(self.mode, o.mode, "p-mode mismatch");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&qi(-1)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.n, self.mode);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let mut out = Self::zero(self.n, self.mode);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let x = a.x.iter().zip(&b.x).map(|(u, v)| u + v).collect();
                out.add_term(Monomial { p: a.p + b.p, x }, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.n, self.mode);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Image under x_i -> x_i^{s_i}.
    pub fn flip(&self, signs: &[i64]) -> Self {
        let mut out = Self::zero(self.n, self.mode);
        for (m, c) in &self.terms {
            let x = m.x.iter().zip(signs).map(|(a, s)| a * s).collect();
            out.add_term(Monomial { p: m.p, x }, c.clone());
        }
        out
    }

    /// Invariance under all 2^n sign flips.
    pub fn is_weyl_invariant(&self) -> bool {
        (0..1u32 << self.n).all(|mask| {
            let signs: Vec<i64> = (0..self.n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            self.flip(&signs) == *self
        })
    }

    /// Numeric specialisation of a symbolic polynomial.
    pub fn specialise(&self, p: u64) -> Self {
        match self.mode {
            PMode::Numeric(q) => {
                assert_eq!(q, p);
                self.clone()
            }
            PMode::Symbolic => {
                let mut out = Self::zero(self.n, PMode::Numeric(p));
                for (m, c) in &self.terms {
                    out.add_term(Monomial { p: 0, x: m.x.clone() }, c * pow_q(&qi(p as i64), m.p));
                }
                out
            }
        }
    }

    /// Value at x_i = lambda_i; the prime must be supplied in symbolic mode.
    pub fn eval(&self, lambdas: &[CycloNumber], p: u64) -> Result<CycloNumber> {
        if lambdas.len() != self.n {
            return Err(Error::DegreeMismatch(self.n, lambdas.len()));
        }
        if let PMode::Numeric(q) = self.mode {
            if q != p {
                return Err(Error::Input(format!("polynomial specialised at {q}, evaluated at {p}")));
            }
        }
        let mut total = CycloNumber::zero();
        for (m, c) in &self.terms {
            let mut t = CycloNumber::from_rational(c * pow_q(&qi(p as i64), m.p));
            for (l, &e) in lambdas.iter().zip(&m.x) {
                if e != 0 {
                    t = t * l.pow(e).map_err(|_| Error::ZeroSatakeParam)?;
                }
            }
            total = total + t;
        }
        Ok(total)
    }
}

impl fmt::Display for WeylLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let a = c.abs();
            let mut parts = Vec::new();
            if m.p != 0 {
                parts.push(if m.p == 1 { "p".to_string() } else { format!("p^{}", m.p) });
            }
            for (i, &e) in m.x.iter().enumerate() {
                if e == 1 {
                    parts.push(format!("x{}", i + 1));
                } else if e != 0 {
                    parts.push(format!("x{}^{}", i + 1, e));
                }
            }
            if parts.is_empty() {
                write!(f, "{}", fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{}", parts.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_q(&a), parts.join("*"))?;
            }
        }
        Ok(())
    }
}
