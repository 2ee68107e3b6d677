use super::{half_power, ExtCoeff, FourierExpansion};
use crate::arith::{lcm_u64, qi, rational_gcd, Q};
use crate::chars::{pow_rational, DirichletChar};
use crate::error::{Error, Result};

/// f | U_p with c(tau) = p^{n(n+1-k)} c_f(p^2 tau), complete up to floor(bound / p^2).
pub fn u_p(f: &FourierExpansion, p: u64) -> FourierExpansion {
    let out_bound = f.trace_bound.div_euclid((p * p) as i64);
    u_p_to(f, p, out_bound).expect("bound derived from input")
}

/// U_p with an explicit output trace bound.
pub fn u_p_to(f: &FourierExpansion, p: u64, out_bound: i64) -> Result<FourierExpansion> {
    let pp = (p * p) as i64;
    if f.trace_bound < pp * out_bound {
        return Err(Error::InsufficientTruncation { have: f.trace_bound, need: pp * out_bound });
    }
    let n = f.degree as i64;
    let factor = half_power(p, 2 * n * (n + 1) - n * f.weight2);
    let mut out = f.empty_like();
    out.trace_bound = out_bound;
    out.c = lcm_u64(f.c, p);
    for (tau, v) in f.iter() {
        if let Some(small) = tau.div_exact(pp) {
            if small.trace() <= out_bound {
                out.add_to(&small, &(v * &factor));
            }
        }
    }
    Ok(out)
}

/// g | V(M) with c(M^2 tau) = M^{n l} c_g(tau).
pub fn v_shift(g: &FourierExpansion, m: u64) -> FourierExpansion {
    let n = g.degree as i64;
    let mm = (m * m) as i64;
    let factor = pow_rational(&qi(m as i64), &Q::new((n * g.weight2).into(), 2.into())).expect("half-integral exponent");
    let mut out = g.empty_like();
    out.trace_bound = g.trace_bound * mm;
    out.b = &g.b * qi(mm);
    for (tau, v) in g.iter() {
        out.add_to(&tau.scale(mm), &(v * &factor));
    }
    out
}

/// Product of expansions; weights add and the trace bound is the smaller one.
pub fn multiply(f: &FourierExpansion, g: &FourierExpansion) -> Result<FourierExpansion> {
    if f.degree != g.degree {
        return Err(Error::DegreeMismatch(f.degree, g.degree));
    }
    let mut out = FourierExpansion::new(
        f.degree,
        f.weight2 + g.weight2,
        rational_gcd(&f.b, &g.b),
        lcm_u64(f.c, g.c),
        f.trace_bound.min(g.trace_bound),
    );
    for (s, a) in f.iter() {
        if s.trace() > out.trace_bound {
            continue;
        }
        for (t, b) in g.iter() {
            if s.trace() + t.trace() <= out.trace_bound {
                out.add_to(&s.add(t), &(a * b));
            }
        }
    }
    Ok(out)
}

/// Degree one twist c(m) -> phi(m) c(m).
pub fn twist_n1(f: &FourierExpansion, phi: &DirichletChar) -> Result<FourierExpansion> {
    if f.degree != 1 {
        return Err(Error::UnsupportedDegree(f.degree));
    }
    let fcond = phi.conductor();
    let mut out = f.empty_like();
    out.c = lcm_u64(f.c, fcond * fcond);
    for (tau, v) in f.iter() {
        let twice = tau.twice()[0][0];
        let m = twice / 2;
        let w: ExtCoeff = phi.value(m);
        out.add_to(tau, &(v * &w));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;
    use crate::chars::CycloNumber;
    use crate::qexp::from_n1_values;

    #[test]
    fn u_p_example() {
        let f = from_n1_values(13, 20, &[(9, qi(5))]);
        let g = u_p(&f, 3);
        assert_eq!(g.trace_bound, 2);
        assert_eq!(g.get_n1(1), half_power(3, -9).scale(&qi(5)));
        let zero = FourierExpansion::new(1, 13, qi(1), 1, 50);
        assert!(u_p(&zero, 3).is_empty());
        assert!(matches!(u_p_to(&f, 3, 3), Err(Error::InsufficientTruncation { .. })));
    }

    #[test]
    fn v_shift_example() {
        let g = from_n1_values(1, 3, &[(0, qi(1)), (1, qi(2))]);
        let h = v_shift(&g, 2);
        let r2 = pow_rational(&qi(2), &qr(1, 2)).unwrap();
        assert_eq!(h.get_n1(0), r2);
        assert_eq!(h.get_n1(4), r2.scale(&qi(2)));
        assert_eq!(h.trace_bound, 12);
        assert_eq!(v_shift(&g, 1), g);
    }

    #[test]
    fn theta_squared_counts_sums_of_two_squares() {
        let th = from_n1_values(1, 4, &[(0, qi(1)), (1, qi(2)), (4, qi(2))]);
        let sq = multiply(&th, &th).unwrap();
        let got: Vec<CycloNumber> = (0..=4).map(|m| sq.get_n1(m)).collect();
        let want: Vec<CycloNumber> = [1, 4, 4, 0, 4].iter().map(|&x| CycloNumber::from_int(x)).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn twist_by_quadratic_mod_five() {
        let f = from_n1_values(1, 4, &[(0, qi(1)), (1, qi(2)), (4, qi(2))]);
        let g = twist_n1(&f, &DirichletChar::kronecker(5)).unwrap();
        assert_eq!(g, from_n1_values(1, 4, &[(1, qi(2)), (4, qi(2))]).clone_with_c(g.c));
        let h = twist_n1(&f, &DirichletChar::trivial(1)).unwrap();
        assert_eq!(h, f);
        let two = FourierExpansion::new(2, 1, qi(1), 1, 2);
        assert_eq!(twist_n1(&two, &DirichletChar::trivial(1)).unwrap_err(), Error::UnsupportedDegree(2));
    }

    impl FourierExpansion {
        fn clone_with_c(mut self, c: u64) -> Self {
            self.c = c;
            self
        }
    }
}
