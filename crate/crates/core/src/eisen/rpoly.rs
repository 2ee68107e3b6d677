//! The polynomial R(g; beta, s') from the determinantal differential operator.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{fmt_q, qi, qr, Q};
use crate::error::{Error, Result};

/// Sparse polynomial with rational coefficients; exponent vectors are indexed
/// by variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut out = Self::zero(nvars);
        out.add_term(vec![0; nvars], c);
        out
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut out = Self::zero(nvars);
        out.add_term(e, Q::one());
        out
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let vanished = {
            let slot = self.terms.entry(e.clone()).or_insert_with(Q::zero);
            *slot += c;
            slot.is_zero()
        };
        if vanished {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&qi(-1)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                out.add_term(a.iter().zip(b).map(|(x, y)| x + y).collect(), ca * cb);
            }
        }
        out
    }

    pub fn deriv(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * qi(e[i] as i64));
            }
        }
        out
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(x).fold(c.clone(), |acc, (&k, v)| acc * crate::arith::pow_q(v, k as i64))
            })
            .sum()
    }

    /// Total degree in the variables listed.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms.keys().map(|e| vars.iter().map(|&i| e[i]).sum()).max().unwrap_or(0)
    }
}

/// R(g; beta, s') as a polynomial. Variable 0 is s'; the rest are g_ij, i <= j,
/// in row order (g for n = 1; g11, g12, g22 for n = 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPolyG {
    pub n: usize,
    pub beta: u32,
    pub poly: MPoly,
}

impl SymPolyG {
    /// Value at the symmetric matrix g (entries g_ij, i <= j) and s'.
    pub fn eval(&self, g: &[Q], s_prime: &Q) -> Q {
        let mut x = vec![s_prime.clone()];
        x.extend(g.iter().cloned());
        self.poly.eval(&x)
    }

    /// Degree in the g variables.
    pub fn g_degree(&self) -> u32 {
        let vars: Vec<usize> = (1..self.poly.nvars).collect();
        self.poly.degree_in(&vars)
    }

    /// For n = 1: coefficients of g^{beta - j} as polynomials in s', j = 0..=beta.
    pub fn n1_coefficients(&self) -> Vec<MPoly> {
        assert_eq!(self.n, 1);
        let b = self.beta;
        (0..=b)
            .map(|j| {
                let mut out = MPoly::zero(2);
                for (e, c) in self.poly.terms() {
                    if e[1] == b - j {
                        out.add_term(vec![e[0], 0], c.clone());
                    }
                }
                out
            })
            .collect()
    }
}

impl fmt::Display for SymPolyG {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: &[&str] = if self.n == 1 { &["s'", "g"] } else { &["s'", "g11", "g12", "g22"] };
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .poly
            .terms()
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { names[i].to_string() } else { format!("{}^{}", names[i], k) })
                    .collect();
                if mono.is_empty() {
                    fmt_q(c)
                } else if c.is_one() {
                    mono.join("*")
                } else {
                    format!("{}*{}", fmt_q(c), mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

const MAX_BETA: u32 = 4;

/// Variable layout for the g_ij: index into the polynomial ring (offset by s').
fn g_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // rows: (0,0),(0,1)..(0,n-1),(1,1)..
    let before: usize = (0..i).map(|r| n - r).sum();
    1 + before + (j - i)
}

struct Ring {
    n: usize,
    nvars: usize,
    det: MPoly,
}

impl Ring {
    fn new(n: usize) -> Self {
        let nvars = 1 + n * (n + 1) / 2;
        let v = |i, j| MPoly::var(nvars, g_index(n, i, j));
        let det = match n {
            1 => v(0, 0),
            2 => v(0, 0).mul(&v(1, 1)).sub(&v(0, 1).mul(&v(0, 1))),
            _ => unreachable!(),
        };
        Ring { n, nvars, det }
    }

    /// d/dg_v of e^{-tr g}|g|^{-s'-J} Q, returned as (J+1, Q').
    fn partial(&self, (j, q): (i64, &MPoly), i: usize, k: usize) -> MPoly {
        let idx = g_index(self.n, i, k);
        let diag = if i == k { qi(1) } else { qi(0) };
        let dq = q.deriv(idx).sub(&q.scale(&diag));
        let exponent = MPoly::var(self.nvars, 0).scale(&qi(-1)).add(&MPoly::constant(self.nvars, qi(-j)));
        self.det.mul(&dq).add(&exponent.mul(&self.det.deriv(idx)).mul(q))
    }

    /// det[((1 + delta_ij)/2) d/dg_ij] applied once.
    fn operator(&self, j: i64, q: &MPoly) -> (i64, MPoly) {
        match self.n {
            1 => (j + 1, self.partial((j, q), 0, 0)),
            2 => {
                let a = self.partial((j, q), 1, 1);
                let a = self.partial((j + 1, &a), 0, 0);
                let b = self.partial((j, q), 0, 1);
                let b = self.partial((j + 1, &b), 0, 1);
                (j + 2, a.sub(&b.scale(&qr(1, 4))))
            }
            _ => unreachable!(),
        }
    }

    /// Exact quotient by |g|.
    fn divide_by_det(&self, q: &MPoly) -> Result<MPoly> {
        if self.n == 1 {
            let mut out = MPoly::zero(self.nvars);
            for (e, c) in q.terms() {
                if e[1] == 0 {
                    return Err(Error::Input("R numerator not divisible by |g|".into()));
                }
                let mut f = e.clone();
                f[1] -= 1;
                out.add_term(f, c.clone());
            }
            return Ok(out);
        }
        // |g| = g11 g22 - g12^2: long division in g12
        let i12 = g_index(2, 0, 1);
        let mut rem = q.clone();
        let mut quo = MPoly::zero(self.nvars);
        loop {
            let lead = rem.terms().iter().filter(|(e, _)| e[i12] >= 2).max_by_key(|(e, _)| e[i12]).map(|(e, c)| (e.clone(), c.clone()));
            let Some((e, c)) = lead else { break };
            let mut f = e.clone();
            f[i12] -= 2;
            let mut t = MPoly::zero(self.nvars);
            t.add_term(f, -c);
            quo = quo.add(&t);
            rem = rem.sub(&t.mul(&self.det));
        }
        // what is left must be a multiple of g11 g22 with no g12^2 part
        let (i11, i22) = (g_index(2, 0, 0), g_index(2, 1, 1));
        for (e, c) in rem.terms() {
            if e[i11] == 0 || e[i22] == 0 {
                return Err(Error::Input("R numerator not divisible by |g|".into()));
            }
            let mut f = e.clone();
            f[i11] -= 1;
            f[i22] -= 1;
            let mut t = MPoly::zero(self.nvars);
            t.add_term(f, c.clone());
            quo = quo.add(&t);
        }
        Ok(quo)
    }
}

/// R(g; beta, s') = (-1)^{beta n} e^{tr g} |g|^{beta + s'} D^beta (e^{-tr g} |g|^{-s'}).
pub fn r_poly(n: usize, beta: u32) -> Result<SymPolyG> {
    if n == 0 || n > 2 {
        return Err(Error::UnsupportedDegree(n));
    }
    if beta > MAX_BETA {
        return Err(Error::BudgetExceeded { cost: beta as u128, budget: MAX_BETA as u128 });
    }
    let ring = Ring::new(n);
    let mut j = 0i64;
    let mut q = MPoly::constant(ring.nvars, qi(1));
    for _ in 0..beta {
        let (j2, q2) = ring.operator(j, &q);
        j = j2;
        q = q2;
    }
    // |g|^{beta - J} with J = n beta
    for _ in 0..(j - beta as i64) {
        q = ring.divide_by_det(&q)?;
    }
    if (beta as usize * n) % 2 == 1 {
        q = q.scale(&qi(-1));
    }
    Ok(SymPolyG { n, beta, poly: q })
}
