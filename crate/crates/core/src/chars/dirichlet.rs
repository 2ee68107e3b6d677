//! Dirichlet characters stored by exponents on fixed generators of (Z/MZ)^x.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::cyclo::CycloNumber;
use crate::arith::{factorize, gcd_u64, lcm_u64, mod_pow, Q};
use crate::error::{Error, Result};

#[derive(Debug)]
struct Component {
    q: u64,
    /// (generator mod q, order) pairs
    gens: Vec<(u64, u64)>,
    /// discrete logs of each residue mod q, empty for non-units
    dlog: Vec<Option<Vec<u64>>>,
}

/// Generators and discrete logs for one modulus.
#[derive(Debug)]
pub struct UnitGroup {
    modulus: u64,
    comps: Vec<Component>,
    orders: Vec<u64>,
    exponent: u64,
}

fn group_cache() -> &'static Mutex<HashMap<u64, Arc<UnitGroup>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<UnitGroup>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Smallest primitive root modulo p^e for odd p.
pub fn primitive_root(p: u64, e: u32) -> u64 {
    let q = p.pow(e);
    let phi = q / p * (p - 1);
    let fs = factorize(phi);
    (2..q)
        .find(|&g| gcd_u64(g, p) == 1 && fs.iter().all(|&(r, _)| mod_pow(g, phi / r, q) != 1))
        .unwrap_or(1)
}

impl UnitGroup {
    pub fn get(modulus: u64) -> Arc<UnitGroup> {
        assert!(modulus > 0);
        if let Some(g) = group_cache().lock().unwrap().get(&modulus) {
            return g.clone();
        }
        let g = Arc::new(Self::build(modulus));
        group_cache().lock().unwrap().insert(modulus, g.clone());
        g
    }

    fn build(modulus: u64) -> UnitGroup {
        let mut comps = Vec::new();
        for (p, e) in factorize(modulus) {
            let q = p.pow(e);
            let gens: Vec<(u64, u64)> = if p == 2 {
                match e {
                    1 => vec![],
                    2 => vec![(q - 1, 2)],
                    _ => vec![(q - 1, 2), (5, q / 4)],
                }
            } else {
                vec![(primitive_root(p, e), q / p * (p - 1))]
            };
            let mut dlog = vec![None; q as usize];
            // walk the product of cyclic factors
            let mut idx = vec![0u64; gens.len()];
            loop {
                let mut x = 1 % q;
                for (k, &(g, _)) in gens.iter().enumerate() {
                    x = x * mod_pow(g, idx[k], q) % q;
                }
                dlog[x as usize] = Some(idx.clone());
                let mut k = 0;
                while k < gens.len() {
                    idx[k] += 1;
                    if idx[k] < gens[k].1 {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == gens.len() {
                    break;
                }
            }
            if q == 2 {
                dlog[1] = Some(vec![]);
            }
            comps.push(Component { q, gens, dlog });
        }
        let orders: Vec<u64> = comps.iter().flat_map(|c| c.gens.iter().map(|g| g.1)).collect();
        let exponent = orders.iter().fold(1, |a, &b| lcm_u64(a, b));
        UnitGroup { modulus, comps, orders, exponent }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// Exponent of the group; every character value is a power of zeta of this order.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Discrete logs of a on all generators, or None for a non-unit.
    pub fn log(&self, a: i64) -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(self.orders.len());
        for c in &self.comps {
            let r = a.rem_euclid(c.q as i64) as usize;
            out.extend(c.dlog[r].as_ref()?.iter().copied());
        }
        Some(out)
    }

    /// Element of (Z/M)^x that is the j-th generator on its own component and 1 elsewhere.
    pub fn generator_lift(&self, j: usize) -> u64 {
        let mut counter = 0;
        let mut target = Vec::new();
        for c in &self.comps {
            let mut r = 1 % c.q;
            for (g, _) in &c.gens {
                if counter == j {
                    r = *g;
                }
                counter += 1;
            }
            target.push((c.q, r));
        }
        crt(&target)
    }
}

fn crt(parts: &[(u64, u64)]) -> u64 {
    let mut m: u128 = 1;
    let mut x: u128 = 0;
    for &(q, r) in parts {
        let q = q as u128;
        // find x' = x + m t with x' = r mod q
        let mut t = 0u128;
        while (x + m * t) % q != r as u128 % q {
            t += 1;
        }
        x += m * t;
        m *= q;
    }
    x as u64
}

/// A Dirichlet character modulo `modulus`.
#[derive(Clone)]
pub struct DirichletChar {
    modulus: u64,
    exps: Vec<u64>,
    group: Arc<UnitGroup>,
    /// value at a is zeta_L^{table[a]}, L the group exponent; -1 marks a non-unit
    table: Arc<Vec<i64>>,
}

impl DirichletChar {
    pub fn new(modulus: u64, exps: Vec<u64>) -> Result<Self> {
        let group = UnitGroup::get(modulus);
        if exps.len() != group.orders.len() {
            return Err(Error::Input(format!(
                "modulus {modulus} needs {} generator exponents, got {}",
                group.orders.len(),
                exps.len()
            )));
        }
        let exps: Vec<u64> = exps.iter().zip(&group.orders).map(|(e, o)| e % o).collect();
        let l = group.exponent;
        let table: Vec<i64> = (0..modulus)
            .map(|a| match group.log(a as i64) {
                None => -1,
                Some(lg) => {
                    let mut t = 0u128;
                    for ((e, x), o) in exps.iter().zip(&lg).zip(&group.orders) {
                        t += (*e as u128) * (*x as u128) * (l / o) as u128;
                    }
                    (t % l as u128) as i64
                }
            })
            .collect();
        Ok(DirichletChar { modulus, exps, group, table: Arc::new(table) })
    }

    pub fn trivial(modulus: u64) -> Self {
        let n = UnitGroup::get(modulus).orders.len();
        Self::new(modulus, vec![0; n]).unwrap()
    }

    /// Builds a character from its angle function a -> t with chi(a) = e(t), t in Q/Z.
    pub fn from_fn(modulus: u64, angle: impl Fn(u64) -> Q) -> Self {
        let group = UnitGroup::get(modulus);
        let exps = (0..group.orders.len())
            .map(|j| {
                let g = group.generator_lift(j);
                let t = angle(g) * Q::from_integer(group.orders[j].into());
                let t = t.to_integer();
                t.to_i64().unwrap().rem_euclid(group.orders[j] as i64) as u64
            })
            .collect();
        Self::new(modulus, exps).unwrap()
    }

    /// The quadratic character a -> (d/a) attached to a fundamental discriminant d.
    pub fn kronecker(d: i64) -> Self {
        let m = d.unsigned_abs().max(1);
        Self::from_fn(m, |a| {
            if crate::arith::kronecker(d, a) == -1 {
                Q::new(1.into(), 2.into())
            } else {
                Q::zero()
            }
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn group(&self) -> &UnitGroup {
        &self.group
    }

    /// chi(a) = zeta_L^k for the returned k, None off the units.
    pub fn angle_index(&self, a: i64) -> Option<u64> {
        let t = self.table[a.rem_euclid(self.modulus as i64) as usize];
        (t >= 0).then_some(t as u64)
    }

    /// chi(a) = e(t) with t in [0,1).
    pub fn angle(&self, a: i64) -> Option<Q> {
        self.angle_index(a)
            .map(|k| Q::new((k as i64).into(), (self.group.exponent as i64).into()))
    }

    pub fn value(&self, a: i64) -> CycloNumber {
        match self.angle_index(a) {
            None => CycloNumber::zero(),
            Some(k) => CycloNumber::zeta(self.group.exponent, k as i64),
        }
    }

    pub fn value_complex(&self, a: i64) -> num_complex::Complex64 {
        match self.angle(a) {
            None => num_complex::Complex64::new(0.0, 0.0),
            Some(t) => num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t.to_f64().unwrap()),
        }
    }

    /// Order of the character as a group element.
    pub fn order(&self) -> u64 {
        self.exps
            .iter()
            .zip(&self.group.orders)
            .fold(1, |acc, (&e, &o)| lcm_u64(acc, o / gcd_u64(e, o)))
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// chi(-1) as +1 or -1.
    pub fn parity(&self) -> i32 {
        match self.angle_index(-1) {
            Some(0) => 1,
            Some(_) => -1,
            None => 1,
        }
    }

    pub fn conj(&self) -> Self {
        let exps = self.exps.iter().zip(&self.group.orders).map(|(&e, &o)| (o - e) % o).collect();
        Self::new(self.modulus, exps).unwrap()
    }

    pub fn conductor(&self) -> u64 {
        let mut f = 1;
        for c in &self.group.comps {
            let (p, e) = factorize(c.q)[0];
            // smallest p^j such that chi is trivial on units = 1 mod p^j inside this component
            let mut j = 0;
            'outer: while j < e {
                let pj = p.pow(j);
                let mut x = 1;
                while x < c.q {
                    if gcd_u64(x, p) == 1 && x % pj == 1 % pj {
                        let lift = self.component_lift(c.q, x);
                        if self.angle_index(lift as i64) != Some(0) {
                            j += 1;
                            continue 'outer;
                        }
                    }
                    x += 1;
                }
                break;
            }
            f *= p.pow(j);
        }
        f
    }

    fn component_lift(&self, q: u64, x: u64) -> u64 {
        let parts: Vec<(u64, u64)> = self
            .group
            .comps
            .iter()
            .map(|c| (c.q, if c.q == q { x } else { 1 }))
            .collect();
        crt(&parts)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let f = self.conductor();
        let m = self.modulus;
        Self::from_fn(f, |a| {
            let mut b = a;
            while gcd_u64(b, m) != 1 {
                b += f;
            }
            self.angle(b as i64).unwrap()
        })
    }

    /// The character modulo `m` induced from the primitive part.
    pub fn induce(&self, m: u64) -> Result<Self> {
        let prim = self.primitive();
        let f = prim.modulus;
        if m % f != 0 {
            return Err(Error::ConductorNotDividing { conductor: f, modulus: m });
        }
        Ok(Self::from_fn(m, |a| prim.angle((a % f) as i64).unwrap_or_else(Q::zero)))
    }

    /// Product character modulo the lcm of the moduli.
    pub fn mul(&self, other: &Self) -> Self {
        let m = lcm_u64(self.modulus, other.modulus);
        Self::from_fn(m, |a| {
            let t = self.angle(a as i64).unwrap() + other.angle(a as i64).unwrap();
            &t - t.floor()
        })
    }

    pub fn pow(&self, k: i64) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(&self.group.orders)
            .map(|(&e, &o)| ((e as i128 * k as i128).rem_euclid(o as i128)) as u64)
            .collect();
        Self::new(self.modulus, exps).unwrap()
    }

    /// Every character modulo m, in lexicographic exponent order.
    pub fn all(m: u64) -> Vec<Self> {
        let g = UnitGroup::get(m);
        let mut out = Vec::new();
        let mut idx = vec![0u64; g.orders.len()];
        loop {
            out.push(Self::new(m, idx.clone()).unwrap());
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < g.orders[k] {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
        out
    }
}

impl PartialEq for DirichletChar {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.exps == other.exps
    }
}

impl Eq for DirichletChar {}

impl fmt::Debug for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi[{}; {:?}]", self.modulus, self.exps)
    }
}

impl fmt::Display for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi_{}{:?}", self.modulus, self.exps)
    }
}

#[derive(Serialize, Deserialize)]
struct CharRepr {
    modulus: u64,
    generator_exponents: Vec<u64>,
}

impl Serialize for DirichletChar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CharRepr { modulus: self.modulus, generator_exponents: self.exps.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirichletChar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CharRepr::deserialize(d)?;
        if r.modulus == 0 {
            return Err(serde::de::Error::custom("modulus must be positive"));
        }
        DirichletChar::new(r.modulus, r.generator_exponents).map_err(serde::de::Error::custom)
    }
}

/// A character together with its primitivity tag.
#[derive(Clone, Debug)]
pub struct TaggedChar {
    pub chi: DirichletChar,
    pub conductor: u64,
    pub primitive: bool,
}

/// All characters of conductor dividing p^l_max, as characters modulo p^l_max.
pub fn character_family(p: u64, l_max: u32) -> Vec<TaggedChar> {
    let m = p.pow(l_max);
    DirichletChar::all(m)
        .into_iter()
        .map(|chi| {
            let f = chi.conductor();
            TaggedChar { primitive: f == m, conductor: f, chi }
        })
        .collect()
}

/// Fundamental discriminant of Q(sqrt(d)); 1 when d is a square.
pub fn fundamental_discriminant(d: i64) -> i64 {
    assert!(d != 0);
    let s = crate::arith::squarefree_part(d);
    if s == 1 {
        1
    } else if s.rem_euclid(4) == 1 {
        s
    } else {
        4 * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::kronecker;

    #[test]
    fn multiplicative_with_correct_zeros() {
        for m in 1..=49u64 {
            for chi in DirichletChar::all(m) {
                for a in 0..m as i64 {
                    let l = chi.group().exponent();
                    for b in 0..m as i64 {
                        let prod = match (chi.angle_index(a), chi.angle_index(b)) {
                            (Some(x), Some(y)) => Some((x + y) % l),
                            _ => None,
                        };
                        assert_eq!(chi.angle_index(a * b), prod, "m={m} {chi:?}");
                    }
                    assert_eq!(chi.value(a).is_zero(), gcd_u64(a as u64, m) != 1);
                }
            }
        }
    }

    #[test]
    fn conductor_brute_force() {
        for m in 1..=49u64 {
            for chi in DirichletChar::all(m) {
                // smallest divisor d of m with chi trivial on units = 1 mod d
                let f = crate::arith::divisors(m)
                    .into_iter()
                    .find(|&d| (0..m).all(|a| gcd_u64(a, m) != 1 || a % d != 1 % d || chi.angle_index(a as i64) == Some(0)))
                    .unwrap();
                assert_eq!(chi.conductor(), f, "{chi:?}");
                assert!(chi.primitive().is_primitive());
                assert_eq!(chi.induce(m).unwrap(), chi);
            }
        }
    }

    #[test]
    fn quadratic_mod_five_induced_to_twenty_five() {
        let chi = DirichletChar::kronecker(5);
        let big = chi.induce(25).unwrap();
        assert_eq!(big.value(7), CycloNumber::from_int(kronecker(2, 5) as i64));
        assert_eq!(big.primitive(), chi);
    }

    #[test]
    fn family_sizes() {
        assert_eq!(character_family(5, 1).len(), 4);
        assert_eq!(character_family(3, 2).len(), 6);
        let fam = character_family(5, 2);
        assert_eq!(fam.len(), 20);
        assert_eq!(fam.iter().filter(|c| c.conductor == 25).count(), 16);
    }

    #[test]
    fn mod_eight_structure() {
        let chi = DirichletChar::kronecker(8);
        assert_eq!(chi.conductor(), 8);
        assert_eq!(chi.value(3), CycloNumber::from_int(-1));
        assert_eq!(chi.parity(), 1);
        assert_eq!(DirichletChar::kronecker(-4).parity(), -1);
    }
}
