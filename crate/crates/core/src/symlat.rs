//! Half-integral symmetric matrices: positivity, reduction, automorphisms,
//! the theta ideal and the decomposition sets used by the Eisenstein sums.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, ceil_sqrt, det_int, qi, rational_gcd, Q};
use crate::error::{Error, Result};

/// tau in S^, stored as the integer matrix 2 tau.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HalfIntSymMatrix {
    twice: Vec<Vec<i64>>,
}

impl HalfIntSymMatrix {
    pub fn new(twice: Vec<Vec<i64>>) -> Result<Self> {
        let n = twice.len();
        if n == 0 || twice.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMatrix("not square".into()));
        }
        for i in 0..n {
            if twice[i][i].rem_euclid(2) != 0 {
                return Err(Error::InvalidMatrix(format!("odd diagonal entry {}", twice[i][i])));
            }
            for j in 0..i {
                if twice[i][j] != twice[j][i] {
                    return Err(Error::InvalidMatrix("not symmetric".into()));
                }
            }
        }
        Ok(HalfIntSymMatrix { twice })
    }

    /// Degree one matrix tau = t.
    pub fn scalar(t: i64) -> Self {
        HalfIntSymMatrix { twice: vec![vec![2 * t]] }
    }

    pub fn zero(n: usize) -> Self {
        HalfIntSymMatrix { twice: vec![vec![0; n]; n] }
    }

    /// Builds tau from an integer symmetric matrix with arbitrary diagonal parity
    /// by doubling: the result is 2 m as a matrix of S^.
    pub fn from_int_matrix(m: &[Vec<i64>]) -> Result<Self> {
        Self::new(m.iter().map(|r| r.iter().map(|x| 2 * x).collect()).collect())
    }

    pub fn degree(&self) -> usize {
        self.twice.len()
    }

    pub fn twice(&self) -> &[Vec<i64>] {
        &self.twice
    }

    /// Entry of tau itself.
    pub fn entry(&self, i: usize, j: usize) -> Q {
        Q::new(self.twice[i][j].into(), 2.into())
    }

    pub fn to_q(&self) -> Vec<Vec<Q>> {
        let n = self.degree();
        (0..n).map(|i| (0..n).map(|j| self.entry(i, j)).collect()).collect()
    }

    /// Trace of tau (an integer).
    pub fn trace(&self) -> i64 {
        (0..self.degree()).map(|i| self.twice[i][i] / 2).sum()
    }

    pub fn det_twice(&self) -> BigInt {
        det_int(&self.twice)
    }

    /// det tau as a rational.
    pub fn det(&self) -> Q {
        Q::new(self.det_twice(), arith::pow_u(2, self.degree() as u32))
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        let n = self.degree();
        (1u32..(1 << n)).all(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let sub: Vec<Vec<i64>> = idx.iter().map(|&i| idx.iter().map(|&j| self.twice[i][j]).collect()).collect();
            !det_int(&sub).is_negative()
        })
    }

    pub fn is_positive_definite(&self) -> bool {
        let n = self.degree();
        (1..=n).all(|k| {
            let sub: Vec<Vec<i64>> = (0..k).map(|i| self.twice[i][..k].to_vec()).collect();
            det_int(&sub).is_positive()
        })
    }

    /// a^T tau a for an integer matrix a.
    pub fn congruent(&self, a: &[Vec<i64>]) -> Self {
        let n = self.degree();
        let m = a[0].len();
        let mut out = vec![vec![0i64; m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut s = 0i64;
                for k in 0..n {
                    for l in 0..n {
                        s += a[k][i] * self.twice[k][l] * a[l][j];
                    }
                }
                out[i][j] = s;
            }
        }
        HalfIntSymMatrix { twice: out }
    }

    pub fn scale(&self, k: i64) -> Self {
        HalfIntSymMatrix { twice: self.twice.iter().map(|r| r.iter().map(|x| x * k).collect()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        HalfIntSymMatrix {
            twice: self
                .twice
                .iter()
                .zip(&other.twice)
                .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    /// tau / d when that stays in S^.
    pub fn div_exact(&self, d: i64) -> Option<Self> {
        if self.twice.iter().flatten().any(|x| x % d != 0) {
            return None;
        }
        Self::new(self.twice.iter().map(|r| r.iter().map(|x| x / d).collect()).collect()).ok()
    }

    /// Whether tau lies in b S^ for a positive rational b.
    pub fn in_lattice(&self, b: &Q) -> bool {
        let n = self.degree();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let q = self.entry(i, j) / b;
                if i == j {
                    q.is_integer()
                } else {
                    (q * qi(2)).is_integer()
                }
            })
        })
    }
}

impl PartialOrd for HalfIntSymMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HalfIntSymMatrix {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.degree(), self.trace(), &self.twice).cmp(&(other.degree(), other.trace(), &other.twice))
    }
}

impl fmt::Debug for HalfIntSymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2t{:?}", self.twice)
    }
}

impl fmt::Display for HalfIntSymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .twice
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

impl Serialize for HalfIntSymMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.twice.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HalfIntSymMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let twice = Vec::<Vec<i64>>::deserialize(d)?;
        HalfIntSymMatrix::new(twice).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedClass {
    pub representative: HalfIntSymMatrix,
    pub aut_count: u64,
    /// U with representative = U^T sigma U
    pub transform: Vec<Vec<i64>>,
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

pub fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// Canonical representative of the GL_n(Z) class, n <= 2.
pub fn reduce_class(sigma: &HalfIntSymMatrix) -> Result<ReducedClass> {
    let n = sigma.degree();
    if n > 2 {
        return Err(Error::UnsupportedDegree(n));
    }
    if !sigma.is_positive_definite() {
        return Err(Error::NonPositiveDefinite);
    }
    if n == 1 {
        return Ok(ReducedClass { representative: sigma.clone(), aut_count: 2, transform: identity(1) });
    }
    let t = &sigma.twice;
    let (mut a, mut b, mut c) = (t[0][0], t[0][1], t[1][1]);
    let mut u = identity(2);
    loop {
        if a > c {
            std::mem::swap(&mut a, &mut c);
            u = mat_mul(&u, &[vec![0, 1], vec![1, 0]]);
        }
        if 2 * b.abs() <= a {
            break;
        }
        // translate so that -a/2 <= b < a/2
        let k = -Integer::div_floor(&(2 * b + a), &(2 * a));
        let nb = b + k * a;
        c = c + 2 * k * b + k * k * a;
        b = nb;
        u = mat_mul(&u, &[vec![1, k], vec![0, 1]]);
    }
    if b < 0 {
        b = -b;
        u = mat_mul(&u, &[vec![1, 0], vec![0, -1]]);
    }
    let rep = HalfIntSymMatrix::new(vec![vec![a, b], vec![b, c]])?;
    debug_assert_eq!(sigma.congruent(&u), rep);
    let aut = aut_count(&rep)?;
    Ok(ReducedClass { representative: rep, aut_count: aut, transform: u })
}

/// #{a in GL_n(Z) : a^T sigma a = sigma}, by bounded column search.
pub fn aut_count(sigma: &HalfIntSymMatrix) -> Result<u64> {
    if !sigma.is_positive_definite() {
        return Err(Error::NonPositiveDefinite);
    }
    let n = sigma.degree();
    let inv = arith::inverse_q(&sigma.to_q()).ok_or(Error::NonPositiveDefinite)?;
    // column j has x^T sigma x = sigma_jj, hence x_i^2 <= sigma_jj (sigma^{-1})_ii
    let cols: Vec<Vec<Vec<i64>>> = (0..n)
        .map(|j| {
            let target = sigma.twice[j][j];
            let bounds: Vec<i64> = (0..n).map(|i| ceil_sqrt(&(sigma.entry(j, j) * &inv[i][i]))).collect();
            box_vectors(&bounds)
                .into_iter()
                .filter(|x| quad(&sigma.twice, x) == target)
                .collect()
        })
        .collect();
    let mut count = 0u64;
    let mut pick = vec![0usize; n];
    'outer: loop {
        let a: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| cols[j][pick[j]][i]).collect()).collect();
        if cols.iter().all(|c| !c.is_empty()) && sigma.congruent(&a) == *sigma {
            let d = det_int(&a);
            if d.abs().is_one() {
                count += 1;
            }
        }
        for j in 0..n {
            pick[j] += 1;
            if pick[j] < cols[j].len() {
                continue 'outer;
            }
            pick[j] = 0;
        }
        break;
    }
    Ok(count)
}

fn quad(twice: &[Vec<i64>], x: &[i64]) -> i64 {
    let n = x.len();
    let mut s = 0;
    for i in 0..n {
        for j in 0..n {
            s += x[i] * twice[i][j] * x[j];
        }
    }
    s
}

fn box_vectors(bounds: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        let mut next = Vec::new();
        for v in &out {
            for x in -b..=b {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Generator t of the ideal with h^T (2 tau)^{-1} h in 4 t^{-1} Z for all h, and tau^ = t (2 tau)^{-1}.
/// t is the least positive integer with that property.
pub fn theta_ideal(tau: &HalfIntSymMatrix) -> Result<(u64, Vec<Vec<i64>>)> {
    if !tau.is_positive_definite() {
        return Err(Error::NonPositiveDefinite);
    }
    let n = tau.degree();
    let tw: Vec<Vec<Q>> = tau.twice.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect();
    let m = arith::inverse_q(&tw).ok_or(Error::NonPositiveDefinite)?;
    let mut g = Q::zero();
    for i in 0..n {
        g = rational_gcd(&g, &m[i][i]);
        for j in i + 1..n {
            g = rational_gcd(&g, &(&m[i][j] * qi(2)));
        }
    }
    let a = g.numer().clone();
    let b4 = g.denom() * BigInt::from(4);
    let t = (&b4 / a.gcd(&b4)).to_u64().expect("t fits in u64");
    let tq = qi(t as i64);
    let hat: Vec<Vec<i64>> = m
        .iter()
        .map(|r| r.iter().map(|x| (x * &tq).to_integer().to_i64().unwrap()).collect())
        .collect();
    Ok((t, hat))
}

/// Whether h^T (2 tau)^{-1} h in 4 t^{-1} Z on the standard basis and pairwise sums.
pub fn theta_ideal_condition(tau: &HalfIntSymMatrix, t: u64) -> bool {
    let n = tau.degree();
    let tw: Vec<Vec<Q>> = tau.twice.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect();
    let m = match arith::inverse_q(&tw) {
        Some(m) => m,
        None => return false,
    };
    let ok = |h: &[i64]| {
        let mut s = Q::zero();
        for i in 0..n {
            for j in 0..n {
                s += &m[i][j] * qi(h[i] * h[j]);
            }
        }
        (s * qi(t as i64) / qi(4)).is_integer()
    };
    let mut hs = Vec::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        hs.push(e.clone());
        for j in i + 1..n {
            let mut f = e.clone();
            f[j] = 1;
            hs.push(f);
        }
    }
    hs.iter().all(|h| ok(h))
}

/// Entry bound beyond which no sigma_1 can contribute to V_varsigma.
pub fn completeness_bound(varsigma: &HalfIntSymMatrix, tau_hat: &[Vec<i64>], scale: &Q) -> i64 {
    let n = varsigma.degree();
    let tr_hat: i64 = (0..n).map(|i| tau_hat[i][i]).sum();
    let det_hat = Q::from_integer(det_int(tau_hat));
    let x = qi(varsigma.trace()) * arith::pow_q(&qi(tr_hat), n as i64 - 1) / (scale * det_hat);
    ceil_sqrt(&x)
}

/// Pairs (sigma_1, sigma_2) with scale sigma_1^T tau^ sigma_1 + sigma_2 = varsigma and sigma_2 >= 0.
pub fn enumerate_v(
    varsigma: &HalfIntSymMatrix,
    tau_hat: &[Vec<i64>],
    scale: &Q,
    entry_bound: i64,
) -> Result<Vec<(Vec<Vec<i64>>, HalfIntSymMatrix)>> {
    let n = varsigma.degree();
    if tau_hat.len() != n {
        return Err(Error::DegreeMismatch(n, tau_hat.len()));
    }
    if !scale.is_positive() {
        return Err(Error::InvalidScale(arith::fmt_q(scale)));
    }
    // 2 scale tau^ must be an integral even-diagonal matrix
    let two_s = scale * qi(2);
    let mut st = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let v = &two_s * qi(tau_hat[i][j]);
            if !v.is_integer() || (i == j && !v.to_integer().is_even()) {
                return Err(Error::InvalidScale(arith::fmt_q(scale)));
            }
            st[i][j] = v.to_integer().to_i64().unwrap();
        }
    }
    let st = HalfIntSymMatrix::new(st)?;
    let hat = HalfIntSymMatrix { twice: tau_hat.to_vec() };
    if !hat.is_positive_definite() {
        return Err(Error::NonPositiveDefinite);
    }
    let required = completeness_bound(varsigma, tau_hat, scale);
    if entry_bound < required {
        return Err(Error::BoundTooSmall { given: entry_bound, required });
    }
    // per-column pruning: (scale s^T tau^ s)_jj <= varsigma_jj
    let candidates = box_vectors(&vec![entry_bound; n]);
    let diag_ok = |x: &[i64], j: usize| quad(&st.twice, x) <= varsigma.twice[j][j];
    let per_col: Vec<Vec<&Vec<i64>>> = (0..n).map(|j| candidates.iter().filter(|x| diag_ok(x, j)).collect()).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; n];
    if per_col.iter().any(|c| c.is_empty()) {
        return Ok(out);
    }
    'outer: loop {
        let s1: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| per_col[j][pick[j]][i]).collect()).collect();
        let s2 = varsigma.sub(&st.congruent(&s1));
        if s2.is_positive_semidefinite() {
            out.push((s1, s2));
        }
        for j in (0..n).rev() {
            pick[j] += 1;
            if pick[j] < per_col[j].len() {
                continue 'outer;
            }
            pick[j] = 0;
        }
        break;
    }
    Ok(out)
}

/// Every tau in S_+^ of degree n with trace at most the bound, sorted.
pub fn enumerate_splus(n: usize, trace_bound: i64) -> Result<Vec<HalfIntSymMatrix>> {
    let mut out = Vec::new();
    match n {
        1 => {
            for a in 0..=trace_bound.max(-1) {
                out.push(HalfIntSymMatrix::scalar(a));
            }
        }
        2 => {
            for a in 0..=trace_bound {
                for c in 0..=trace_bound - a {
                    let lim = 4 * a * c;
                    let r = (lim as f64).sqrt() as i64 + 1;
                    for b in -r..=r {
                        if b * b <= lim {
                            out.push(HalfIntSymMatrix { twice: vec![vec![2 * a, b], vec![b, 2 * c]] });
                        }
                    }
                }
            }
        }
        _ => return Err(Error::UnsupportedDegree(n)),
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;

    fn m2(a: i64, b: i64, c: i64) -> HalfIntSymMatrix {
        HalfIntSymMatrix::new(vec![vec![a, b], vec![b, c]]).unwrap()
    }

    fn brute_aut(s: &HalfIntSymMatrix) -> u64 {
        let mut c = 0;
        for a in -4..=4 {
            for b in -4..=4 {
                for d in -4..=4 {
                    for e in -4..=4 {
                        let u = vec![vec![a, b], vec![d, e]];
                        if (a * e - b * d).abs() == 1 && s.congruent(&u) == *s {
                            c += 1;
                        }
                    }
                }
            }
        }
        c
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(reduce_class(&HalfIntSymMatrix::scalar(3)).unwrap().aut_count, 2);
        assert_eq!(reduce_class(&m2(2, 1, 2)).unwrap().aut_count, 12);
        assert_eq!(brute_aut(&m2(2, 1, 2)), 12);
        assert_eq!(reduce_class(&m2(2, 0, 2)).unwrap().aut_count, 8);
        assert_eq!(brute_aut(&m2(2, 0, 2)), 8);
        for s in [m2(4, 1, 6), m2(6, 3, 6), m2(2, 0, 4), m2(10, -3, 4)] {
            assert_eq!(aut_count(&s).unwrap(), brute_aut(&s), "{s:?}");
        }
    }

    #[test]
    fn reduction_is_canonical() {
        let s = m2(10, -3, 4);
        let r = reduce_class(&s).unwrap();
        assert_eq!(s.congruent(&r.transform), r.representative);
        let again = reduce_class(&r.representative).unwrap();
        assert_eq!(again.representative, r.representative);
        assert_eq!(again.transform, identity(2));
        let t = r.representative.twice();
        assert!(0 <= t[0][1] && 2 * t[0][1] <= t[0][0] && t[0][0] <= t[1][1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(reduce_class(&m2(2, 2, 2)).unwrap_err(), Error::NonPositiveDefinite);
        let three = HalfIntSymMatrix::new(vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]).unwrap();
        assert_eq!(reduce_class(&three).unwrap_err(), Error::UnsupportedDegree(3));
        assert!(HalfIntSymMatrix::new(vec![vec![1]]).is_err());
    }

    #[test]
    fn theta_ideal_examples() {
        assert_eq!(theta_ideal(&HalfIntSymMatrix::scalar(1)).unwrap(), (8, vec![vec![4]]));
        assert_eq!(theta_ideal(&HalfIntSymMatrix::scalar(2)).unwrap(), (16, vec![vec![4]]));
        assert_eq!(theta_ideal(&m2(2, 0, 2)).unwrap(), (8, vec![vec![4, 0], vec![0, 4]]));
        assert_eq!(theta_ideal(&m2(2, 1, 2)).unwrap(), (6, vec![vec![4, -2], vec![-2, 4]]));
    }

    #[test]
    fn theta_ideal_is_minimal() {
        for s in [HalfIntSymMatrix::scalar(1), HalfIntSymMatrix::scalar(6), m2(2, 1, 2), m2(4, 1, 6), m2(6, 3, 10)] {
            let (t, _) = theta_ideal(&s).unwrap();
            assert!(theta_ideal_condition(&s, t));
            for (q, _) in crate::arith::factorize(t) {
                assert!(!theta_ideal_condition(&s, t / q), "{s:?} t={t} q={q}");
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let hat = vec![vec![4]];
        let s = HalfIntSymMatrix::new(vec![vec![16]]).unwrap();
        let v = enumerate_v(&s, &hat, &qi(2), 3).unwrap();
        let got: Vec<(i64, i64)> = v.iter().map(|(a, b)| (a[0][0], b.twice()[0][0])).collect();
        assert_eq!(got, vec![(-1, 0), (0, 16), (1, 0)]);
        let s = HalfIntSymMatrix::new(vec![vec![2]]).unwrap();
        let v = enumerate_v(&s, &hat, &qi(2), 3).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].0, vec![vec![0]]);
        assert!(matches!(enumerate_v(&s, &hat, &qr(1, 16), 0), Err(Error::InvalidScale(_))));
        let big = HalfIntSymMatrix::new(vec![vec![200]]).unwrap();
        assert!(matches!(enumerate_v(&big, &hat, &qi(2), 1), Err(Error::BoundTooSmall { .. })));
    }

    #[test]
    fn splus_enumeration() {
        let one = enumerate_splus(1, 2).unwrap();
        assert_eq!(one.iter().map(|t| t.twice()[0][0]).collect::<Vec<_>>(), vec![0, 2, 4]);
        let two = enumerate_splus(2, 1).unwrap();
        assert!(two.contains(&HalfIntSymMatrix::zero(2)));
        assert!(two.contains(&m2(2, 0, 0)));
        assert!(two.contains(&m2(0, 0, 2)));
        assert!(two.iter().all(|t| t.is_positive_semidefinite() && t.trace() <= 1));
        assert!(enumerate_splus(2, 2).unwrap().contains(&m2(2, 1, 2)));
        assert_eq!(enumerate_splus(3, 1).unwrap_err(), Error::UnsupportedDegree(3));
    }
}
