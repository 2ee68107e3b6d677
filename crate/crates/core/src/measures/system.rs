//! Distributions on Z_p^x as compatible systems of functions on (Z/p^i)^x.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u64, mod_inverse, qi, Q};
use crate::chars::CycloNumber;
use crate::error::{Error, Result};
use crate::padic::{embed_cyclo, valuation_general, PadicJson};

/// Levels i = 1..=I_max; level i maps each unit residue mod p^i to a value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionSystem {
    p: u64,
    levels: Vec<BTreeMap<u64, CycloNumber>>,
    bound: Option<Q>,
}

pub fn units_mod(p: u64, i: u32) -> Vec<u64> {
    let m = p.pow(i);
    (1..m).filter(|x| x % p != 0).collect()
}

/// y mod p^i for y = num/den with p not dividing num den.
pub fn reduce_point(num: i64, den: i64, p: u64, i: u32) -> Option<u64> {
    let m = p.pow(i) as i64;
    let inv = mod_inverse(&den.into(), &m.into())?.to_i64()?;
    let r = (num.rem_euclid(m) * inv).rem_euclid(m) as u64;
    if r % p == 0 {
        None
    } else {
        Some(r)
    }
}

impl DistributionSystem {
    /// Validates compatibility nu_j(y) = sum over the fibre of nu_i, for all j < i.
    pub fn from_system(p: u64, levels: Vec<BTreeMap<u64, CycloNumber>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Input("a distribution needs at least one level".into()));
        }
        for (k, lvl) in levels.iter().enumerate() {
            let i = k as u32 + 1;
            let m = p.pow(i);
            if lvl.keys().any(|&x| x >= m || gcd_u64(x, p) != 1) {
                return Err(Error::Input(format!("level {i} has a key that is not a unit mod {m}")));
            }
        }
        for ki in 1..levels.len() {
            let i = ki as u32 + 1;
            for kj in 0..ki {
                let j = kj as u32 + 1;
                let mj = p.pow(j);
                let mut push: BTreeMap<u64, CycloNumber> = BTreeMap::new();
                for (&x, v) in &levels[ki] {
                    let e = push.entry(x % mj).or_insert_with(CycloNumber::zero);
                    *e = &*e + v;
                }
                for y in units_mod(p, j) {
                    let lhs = levels[kj].get(&y).cloned().unwrap_or_else(CycloNumber::zero);
                    let rhs = push.remove(&y).unwrap_or_else(CycloNumber::zero);
                    if lhs != rhs {
                        return Err(Error::IncompatibleSystem { i, j, y });
                    }
                }
            }
        }
        let bound = certify(p, &levels);
        Ok(DistributionSystem { p, levels, bound })
    }

    /// nu_i(x) = sum of weights of the points congruent to x mod p^i.
    pub fn from_points(p: u64, imax: u32, points: &[((i64, i64), CycloNumber)]) -> Result<Self> {
        let mut levels = Vec::new();
        for i in 1..=imax {
            let mut lvl: BTreeMap<u64, CycloNumber> = BTreeMap::new();
            for ((a, b), w) in points {
                let x = reduce_point(*a, *b, p, i).ok_or_else(|| Error::NotAUnit(format!("{a}/{b}"), p))?;
                let e = lvl.entry(x).or_insert_with(CycloNumber::zero);
                *e = &*e + w;
            }
            lvl.retain(|_, v| !v.is_zero());
            levels.push(lvl);
        }
        Self::from_system(p, levels)
    }

    pub fn dirac(a: i64, p: u64, imax: u32) -> Result<Self> {
        Self::from_points(p, imax, &[((a, 1), CycloNumber::one())])
    }

    /// nu_i(x) = 1/phi(p^i).
    pub fn counting(p: u64, imax: u32) -> Result<Self> {
        let levels = (1..=imax)
            .map(|i| {
                let phi = (p - 1) * p.pow(i - 1);
                let v = CycloNumber::from_rational(Q::new(1.into(), (phi as i64).into()));
                units_mod(p, i).into_iter().map(|x| (x, v.clone())).collect()
            })
            .collect();
        Self::from_system(p, levels)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn imax(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn level(&self, i: u32) -> &BTreeMap<u64, CycloNumber> {
        &self.levels[i as usize - 1]
    }

    pub fn value(&self, i: u32, x: u64) -> CycloNumber {
        self.level(i).get(&x).cloned().unwrap_or_else(CycloNumber::zero)
    }

    /// Lower bound on the valuation of every value, when every level respects
    /// the bound seen at level one.
    pub fn boundedness(&self) -> Option<&Q> {
        self.bound.as_ref()
    }

    /// sum phi(x) nu_i(x) for phi factoring through level j <= i.
    pub fn integrate_at(&self, i: u32, phi: &dyn Fn(u64) -> CycloNumber) -> CycloNumber {
        let mut acc = CycloNumber::zero();
        for (&x, v) in self.level(i) {
            let f = phi(x);
            if !f.is_zero() {
                acc = &acc + &(&f * v);
            }
        }
        acc
    }

    /// Integral of a function that factors through level j; the value is the
    /// same at every level from j up.
    pub fn integrate(&self, j: u32, phi: &dyn Fn(u64) -> CycloNumber) -> Result<CycloNumber> {
        if j == 0 || j > self.imax() {
            return Err(Error::Input(format!("level {j} outside 1..={}", self.imax())));
        }
        let mj = self.p.pow(j);
        let reduced = |x: u64| phi(x % mj);
        let v = self.integrate_at(j, &reduced);
        for i in j + 1..=self.imax() {
            let w = self.integrate_at(i, &reduced);
            if w != v {
                return Err(Error::IncompatibleSystem { i, j, y: 0 });
            }
        }
        Ok(v)
    }

    pub fn to_json(&self, precision: u32) -> Result<MeasureDump> {
        let mut levels = Vec::new();
        for i in 1..=self.imax() {
            let mut values = BTreeMap::new();
            for (&x, v) in self.level(i) {
                values.insert(x.to_string(), embed_cyclo(v, self.p, precision)?.to_json());
            }
            levels.push(LevelDump { i, values });
        }
        Ok(MeasureDump {
            p: self.p,
            i_max: self.imax(),
            levels,
            boundedness_valuation: self.bound.as_ref().map(crate::arith::fmt_q),
        })
    }

    pub fn from_json(d: &MeasureDump) -> Result<Self> {
        let mut levels = Vec::new();
        for (k, l) in d.levels.iter().enumerate() {
            if l.i as usize != k + 1 {
                return Err(Error::Input(format!("levels out of order at {}", l.i)));
            }
            let mut lvl = BTreeMap::new();
            for (x, v) in &l.values {
                let x: u64 = x.parse().map_err(|_| Error::Input(format!("bad residue {x:?}")))?;
                let pv = crate::padic::PadicNumber::from_json(v)?;
                lvl.insert(x, CycloNumber::from_rational(padic_to_rational(&pv)));
            }
            levels.push(lvl);
        }
        Self::from_system(d.p, levels)
    }
}

/// The representative in [0, p^N) scaled by p^v; exact for values that were
/// rational with small numerator.
fn padic_to_rational(x: &crate::padic::PadicNumber) -> Q {
    if x.is_zero() {
        return Q::zero();
    }
    let m = num_bigint::BigInt::from(x.p()).pow(x.precision());
    let mut u = x.unit() % &m;
    if &u * 2 > m {
        u -= &m;
    }
    Q::from_integer(u) * crate::arith::pow_q(&qi(x.p() as i64), x.valuation())
}

fn certify(p: u64, levels: &[BTreeMap<u64, CycloNumber>]) -> Option<Q> {
    let min_val = |lvl: &BTreeMap<u64, CycloNumber>| -> Option<Option<Q>> {
        let mut m: Option<Q> = None;
        for v in lvl.values().filter(|v| !v.is_zero()) {
            let e = valuation_general(v, p)?;
            m = Some(match m {
                None => e,
                Some(x) => x.min(e),
            });
        }
        Some(m)
    };
    let first = min_val(&levels[0])?.unwrap_or_else(Q::zero);
    for lvl in &levels[1..] {
        if let Some(v) = min_val(lvl)? {
            if v < first {
                return None;
            }
        }
    }
    Some(first)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDump {
    pub i: u32,
    pub values: BTreeMap<String, PadicJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureDump {
    pub p: u64,
    #[serde(rename = "I_max")]
    pub i_max: u32,
    pub levels: Vec<LevelDump>,
    pub boundedness_valuation: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::DirichletChar;

    #[test]
    fn dirac_integrates_characters() {
        for p in [3u64, 5, 7] {
            let d = DistributionSystem::dirac(2, p, 3).unwrap();
            assert_eq!(d.boundedness(), Some(&qi(0)));
            for chi in DirichletChar::all(p * p) {
                let got = d.integrate(2, &|x| chi.value(x as i64)).unwrap();
                assert_eq!(got, chi.value(2));
            }
        }
    }

    #[test]
    fn counting_orthogonality() {
        let p = 5;
        let c = DistributionSystem::counting(p, 3).unwrap();
        for chi in DirichletChar::all(25) {
            let got = c.integrate(2, &|x| chi.value(x as i64)).unwrap();
            let want = if chi.is_trivial() { CycloNumber::one() } else { CycloNumber::zero() };
            assert_eq!(got, want);
        }
        // values 1/phi(p^i) lose valuation with i
        assert_eq!(c.boundedness(), None);
    }

    #[test]
    fn perturbation_is_localised() {
        let p = 3;
        let d = DistributionSystem::dirac(4, p, 3).unwrap();
        let mut levels: Vec<_> = (1..=3).map(|i| d.level(i).clone()).collect();
        levels[2].insert(13, CycloNumber::one());
        // 13 = 4 mod 9 and 13 = 1 mod 3
        let err = DistributionSystem::from_system(p, levels).unwrap_err();
        assert_eq!(err, Error::IncompatibleSystem { i: 3, j: 1, y: 1 });
    }

    #[test]
    fn rational_points_and_dump() {
        let p = 5;
        let pts = vec![((1, 7), CycloNumber::from_int(3)), ((2, 1), CycloNumber::from_int(-1))];
        let d = DistributionSystem::from_points(p, 3, &pts).unwrap();
        // 1/7 mod 5 = 3
        assert_eq!(d.value(1, 3), CycloNumber::from_int(3));
        let dump = d.to_json(6).unwrap();
        let s = serde_json::to_string(&dump).unwrap();
        assert!(s.contains("\"I_max\":3"));
        let back: MeasureDump = serde_json::from_str(&s).unwrap();
        assert_eq!(DistributionSystem::from_json(&back).unwrap(), d);
    }
}
