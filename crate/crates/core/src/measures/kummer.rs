//! The Kummer-congruence test for a candidate system of integrals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use num_traits::ToPrimitive;

use crate::arith::{mod_pow, rem_i64};
use crate::chars::DirichletChar;
use crate::error::{Error, Result};
use crate::padic::{embed_cyclo, PadicNumber};

use super::system::units_mod;

/// The test function chi(x) x^{[m]}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestFunction {
    pub chi: DirichletChar,
    pub m: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerVerdict {
    pub precision: u32,
    pub level: u32,
    /// Generators of the kernel of the evaluation matrix mod p^N.
    pub kernel: Vec<Vec<u64>>,
    /// Kernel combinations (generators, then random) on which the values fail.
    pub failures: Vec<Vec<u64>>,
    pub combinations_checked: usize,
}

impl KummerVerdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn vacuous(&self) -> bool {
        self.kernel.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.vacuous() {
            "no constraints at this precision".to_string()
        } else if self.passed() {
            format!("PASS ({} kernel generators, {} combinations)", self.kernel.len(), self.combinations_checked)
        } else {
            format!("FAIL ({} of {} combinations)", self.failures.len(), self.combinations_checked)
        }
    }
}

fn vp_u(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x != 0 && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

fn mod_inv(a: u64, m: u64) -> u64 {
    let inv = crate::arith::mod_inverse(&(a as i64).into(), &(m as i64).into()).expect("unit");
    inv.to_u64().unwrap()
}

/// Kernel of a (rows x cols) matrix over Z/p^N, as generators.
pub fn kernel_mod_pn(mat: &[Vec<u64>], cols: usize, p: u64, n: u32) -> Vec<Vec<u64>> {
    let q = p.pow(n);
    let mut a: Vec<Vec<u64>> = mat.iter().map(|r| r.iter().map(|x| x % q).collect()).collect();
    let rows = a.len();
    // column operations are mirrored on w, so that a_final = a_orig * w
    let mut w: Vec<Vec<u64>> = (0..cols).map(|i| (0..cols).map(|j| u64::from(i == j)).collect()).collect();
    let mulmod = |x: u64, y: u64| ((x as u128 * y as u128) % q as u128) as u64;
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot of least valuation in the remaining block
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 {
                    let v = vp_u(a[i][j], p);
                    if best.is_none_or(|b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        for r in w.iter_mut() {
            r.swap(t, pj);
        }
        let unit = a[t][t] / p.pow(v);
        let uinv = mod_inv(unit % q, q);
        // scale column t by the unit inverse
        for r in a.iter_mut() {
            r[t] = mulmod(r[t], uinv);
        }
        for r in w.iter_mut() {
            r[t] = mulmod(r[t], uinv);
        }
        let pv = p.pow(v);
        // clear row t
        for j in t + 1..cols {
            if a[t][j] != 0 {
                let f = a[t][j] / pv; // divisible since v is minimal
                for r in a.iter_mut() {
                    r[j] = (r[j] + q - mulmod(f, r[t])) % q;
                }
                for r in w.iter_mut() {
                    r[j] = (r[j] + q - mulmod(f, r[t])) % q;
                }
            }
        }
        // clear column t (row operations leave the kernel unchanged)
        for i in t + 1..rows {
            if a[i][t] != 0 {
                let f = a[i][t] / pv;
                for j in 0..cols {
                    let s = mulmod(f, a[t][j]);
                    a[i][j] = (a[i][j] + q - s) % q;
                }
            }
        }
        diag.push(v);
        t += 1;
    }
    let mut gens = Vec::new();
    for j in 0..cols {
        let scale = match diag.get(j) {
            Some(&v) if v >= n => 1,
            Some(&v) => p.pow(n - v),
            None => 1,
        };
        if diag.get(j).is_some_and(|&v| v == 0) {
            continue;
        }
        let g: Vec<u64> = (0..cols).map(|i| mulmod(w[i][j], scale)).collect();
        if g.iter().any(|&x| x != 0) {
            gens.push(g);
        }
    }
    gens
}

/// Evaluation matrix of the test functions on (Z/p^L)^x, mod p^N.
pub fn evaluation_matrix(basis: &[TestFunction], p: u64, level: u32, n: u32) -> Result<Vec<Vec<u64>>> {
    let q = p.pow(n);
    let mut out = Vec::new();
    for x in units_mod(p, level) {
        let mut row = Vec::new();
        for f in basis {
            let c = embed_cyclo(&f.chi.value(x as i64), p, n)?;
            let c = c.residue(n).ok_or_else(|| Error::Input("non-integral character value".into()))?;
            let c = rem_i64(c.to_i64().unwrap(), q);
            row.push(((c as u128 * mod_pow(x, f.m as u64, q) as u128) % q as u128) as u64);
        }
        out.push(row);
    }
    Ok(out)
}

/// Checks sum b_i a_i = 0 mod p^N for every b in the kernel of the evaluation
/// matrix, on the generators and on `trials` random combinations.
pub fn kummer_check(basis: &[TestFunction], values: &[PadicNumber], n: u32, trials: usize, seed: u64) -> Result<KummerVerdict> {
    if basis.len() != values.len() || basis.is_empty() {
        return Err(Error::Input("basis and values differ in length".into()));
    }
    let p = values[0].p();
    for v in values {
        if v.absolute_precision() < n as i64 {
            return Err(Error::PrecisionTooLow { have: v.absolute_precision(), need: n as i64 });
        }
    }
    let cond_exp = basis.iter().map(|f| vp_u(f.chi.conductor(), p)).max().unwrap_or(0);
    let level = n.max(cond_exp).max(1);
    let mat = evaluation_matrix(basis, p, level, n)?;
    let kernel = kernel_mod_pn(&mat, basis.len(), p, n);
    let q = p.pow(n);
    let combine = |b: &[u64]| -> bool {
        let mut acc = PadicNumber::zero(p, n as i64);
        for (bi, a) in b.iter().zip(values) {
            if *bi != 0 {
                acc = acc.add(&a.mul(&PadicNumber::from_int(*bi as i64, p, n)));
            }
        }
        acc.is_zero() || acc.valuation() >= n as i64
    };
    let mut failures = Vec::new();
    let mut checked = 0;
    for g in &kernel {
        checked += 1;
        if !combine(g) {
            failures.push(g.clone());
        }
    }
    if !kernel.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let mut b = vec![0u64; basis.len()];
            for g in &kernel {
                let c = rng.gen_range(0..q);
                for (bi, gi) in b.iter_mut().zip(g) {
                    *bi = ((*bi as u128 + c as u128 * *gi as u128) % q as u128) as u64;
                }
            }
            checked += 1;
            if !combine(&b) {
                failures.push(b);
            }
        }
    }
    Ok(KummerVerdict { precision: n, level, kernel, failures, combinations_checked: checked })
}
