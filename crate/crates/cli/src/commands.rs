use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde_json::json;

use siegel_core::arith::{fmt_q, parse_q, qi, Q};
use siegel_core::chars::DirichletChar;
use siegel_core::eisen::{LocalPolys, Sign};
use siegel_core::hecke::{
    check_symmetry, hecke_polynomial, n1_eigenform, p_stabilise, pstab_n1_explicit, random_n1_base, v_polys,
    EigenData, PMode,
};
use siegel_core::measures::{
    interpolation_value, kummer_check, sigma_measure, CharEvaluator, InterpolationInput, InterpolationValue, LRatio,
    TestFunction,
};
use siegel_core::padic::embed_cyclo;
use siegel_core::qexp::{numeric_theta_check, u_p, ExpansionFile};
use siegel_core::symlat::{enumerate_splus, reduce_class};
use siegel_core::{CycloNumber, Error, FourierExpansion, HalfIntSymMatrix};

use crate::jobs::{load, load_text, value, InterpolationJob};
use crate::{CliError, Common, Report};

fn require_p(c: &Common) -> Result<u64, CliError> {
    let p = c.p.ok_or_else(|| CliError::Load("--p is required".into()))?;
    if !siegel_core::arith::is_prime(p) {
        return Err(CliError::Core(Error::BadPrime(p)));
    }
    Ok(p)
}

fn char_label(chi: &DirichletChar) -> String {
    let e: Vec<String> = chi.exponents().iter().map(|x| x.to_string()).collect();
    format!("{}[{}]", chi.modulus(), e.join(","))
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn hecke_verify(c: &Common) -> Result<Report, CliError> {
    let n = c.degree;
    let mode = match c.p {
        Some(p) => PMode::Numeric(p),
        None => PMode::Symbolic,
    };
    let t = hecke_polynomial(n, mode)?;
    let invariant = t.iter().all(|x| x.is_weyl_invariant());
    let symmetric = check_symmetry(&t, n);
    let fact = v_polys(&t, n);
    let fact_ok = fact.is_ok();
    let mode_label = match c.p {
        Some(p) => format!("p = {p}"),
        None => "symbolic p".to_string(),
    };
    let mut table = format!("Hecke polynomial identities, n = {n}, {mode_label}\n");
    for (m, tm) in t.iter().enumerate() {
        let _ = writeln!(table, "  T~_{m} = {tm}");
    }
    if let Ok(v) = &fact {
        for (m, vm) in v.iter().enumerate() {
            let _ = writeln!(table, "  V~_{m} = {vm}");
        }
    }
    let checks = [
        ("Weyl invariance", invariant),
        ("symmetry T_m = p^{n(n+1)(m-2^(n-1))} T_{2^n-m}", symmetric),
        ("vanishing sum and factorisation", fact_ok),
    ];
    let _ = writeln!(table, "{:<50} {}", "check", "result");
    for (name, ok) in &checks {
        let _ = writeln!(table, "{:<50} {}", name, mark(*ok));
    }
    let all = checks.iter().all(|c| c.1);
    let json = json!({
        "command": "hecke-verify",
        "degree": n,
        "p": c.p,
        "T": t.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "V": fact.as_ref().map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>()).unwrap_or_default(),
        "checks": checks.iter().map(|(n, ok)| json!({"name": n, "pass": ok})).collect::<Vec<_>>(),
        "pass": all,
    });
    Ok(Report { table, json, exit: if all { 0 } else { 1 } })
}

pub fn pstab(c: &Common, lambda: &str, weight2: i64) -> Result<Report, CliError> {
    let p = require_p(c)?;
    let bound = c.bound.unwrap_or(30);
    let (f, eigen) = match c.inputs.as_slice() {
        [] => {
            if c.degree != 1 {
                return Err(CliError::Core(Error::UnsupportedDegree(c.degree)));
            }
            let lam = parse_q(lambda).ok_or_else(|| CliError::Load(format!("bad lambda {lambda}")))?;
            let pp = (p * p) as i64;
            let base = random_n1_base(p, bound, c.seed);
            let (f, sp) = n1_eigenform(p, weight2, &CycloNumber::from_rational(lam), &base, pp * pp * bound)?;
            (f, EigenData::from_params(&sp)?)
        }
        [form, eig] => {
            let file: ExpansionFile = load(form)?;
            let f = FourierExpansion::from_json(&file).map_err(|e| CliError::Load(e.to_string()))?;
            let e: EigenData = load(eig)?;
            (f, e)
        }
        _ => return Err(CliError::Load("pstab takes a form file and an eigen file".into())),
    };
    if eigen.p != p {
        return Err(CliError::Load(format!("eigen file is for p = {}, not {p}", eigen.p)));
    }
    if f.c % p == 0 {
        return Err(CliError::Core(Error::PDividesLevel(p)));
    }
    let sp = eigen.params().map_err(|e| CliError::Load(e.to_string()))?;
    let lt = eigen.t_values().map_err(|e| CliError::Load(e.to_string()))?;
    // f0 to p^2 times the bound when f allows it, so U_p f0 is known up to the bound
    let pp = (p * p) as i64;
    let st = p_stabilise(&f, &lt, &sp, (f.trace_bound / pp).max(bound))?;
    let lhs = u_p(&st.form, p);
    let eigen_ok = lhs.agrees_up_to(&st.form.scale(&st.lambda0), lhs.trace_bound);
    let f0 = &st.form.truncate(bound);
    let explicit_ok = if f.degree == 1 {
        Some(pstab_n1_explicit(&f, &sp.lambdas[0], p, bound)?.agrees_up_to(f0, bound))
    } else {
        None
    };
    let mut table = format!("p-stabilisation, n = {}, p = {p}, trace bound {bound}\n", f.degree);
    let _ = writeln!(table, "{:<16} {}", "tau", "c_f0(tau)");
    for (tau, v) in f0.iter() {
        let _ = writeln!(table, "{:<16} {}", tau.to_string(), v);
    }
    if st.all_zero {
        let _ = writeln!(table, "warning: every coefficient of f0 vanishes up to the trace bound");
    }
    let _ = writeln!(table, "lambda0 = {}  ordinary: {}", st.lambda0, match st.ordinary {
        Some(true) => "yes",
        Some(false) => "no",
        None => "undetermined",
    });
    let _ = writeln!(table, "U_p f0 = lambda0 f0 up to trace {}: {}", lhs.trace_bound, mark(eigen_ok));
    if let Some(ok) = explicit_ok {
        let _ = writeln!(table, "degree one closed form: {}", mark(ok));
    }
    let json = json!({
        "command": "pstab",
        "p": p,
        "bound": bound,
        "lambda0": st.lambda0,
        "ordinary": st.ordinary,
        "all_zero": st.all_zero,
        "eigen_check": eigen_ok,
        "explicit_check": explicit_ok,
        "form": f0.to_json(),
    });
    let ok = eigen_ok && explicit_ok.unwrap_or(true);
    Ok(Report { table, json, exit: if ok { 0 } else { 4 } })
}

fn parse_point(s: &str) -> Result<Complex64, CliError> {
    let (re, im) = s.split_once(':').ok_or_else(|| CliError::Load(format!("point {s} is not re:im")))?;
    let re: f64 = re.trim().parse().map_err(|_| CliError::Load(format!("bad point {s}")))?;
    let im: f64 = im.trim().parse().map_err(|_| CliError::Load(format!("bad point {s}")))?;
    Ok(Complex64::new(re, im))
}

pub fn theta_check(c: &Common, conductors: &[u64], tau: i64, points: &[String]) -> Result<Report, CliError> {
    if c.degree != 1 {
        return Err(CliError::Core(Error::NumericOnlyForDegreeOne));
    }
    let terms = c.bound.unwrap_or(200);
    let zs: Vec<Complex64> = if points.is_empty() {
        vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 2.0), Complex64::new(0.05, 0.004), Complex64::new(-0.08, 0.005)]
    } else {
        points.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?
    };
    let tau_m = HalfIntSymMatrix::scalar(tau);
    let mut table = format!("theta transformation, tau = {tau}, {terms} terms\n");
    let _ = writeln!(table, "{:<10} {:>2} {:>18} {:>12} {:>12} {:>12}", "chi", "mu", "z", "|lhs|", "residual", "relative");
    let mut rows = Vec::new();
    let mut all = true;
    for &f in conductors {
        for chi in DirichletChar::all(f).into_iter().filter(|x| x.is_primitive()) {
            let mu = if chi.parity() == 1 { 0 } else { 1 };
            for z in &zs {
                let r = numeric_theta_check(&tau_m, &chi, mu, &qi(1), 1, *z, terms)?;
                let size = Complex64::new(r.lhs.0, r.lhs.1).norm();
                let ok = r.residual < 1e-9;
                all &= ok;
                let _ = writeln!(
                    table,
                    "{:<10} {:>2} {:>18} {:>12.3e} {:>12.3e} {:>12.3e}  {}",
                    char_label(&chi),
                    mu,
                    format!("{}{:+}i", z.re, z.im),
                    size,
                    r.residual,
                    r.relative,
                    mark(ok)
                );
                rows.push(json!({
                    "chi": char_label(&chi),
                    "mu": mu,
                    "z": [z.re, z.im],
                    "lhs": [r.lhs.0, r.lhs.1],
                    "rhs": [r.rhs.0, r.rhs.1],
                    "residual": r.residual,
                    "relative": r.relative,
                    "pass": ok,
                }));
            }
        }
    }
    let json = json!({"command": "theta-check", "tau": tau, "terms": terms, "rows": rows, "pass": all});
    Ok(Report { table, json, exit: if all { 0 } else { 1 } })
}

pub fn kummer(c: &Common, mmax: Option<u32>, trials: usize) -> Result<Report, CliError> {
    let p = require_p(c)?;
    let local = match c.inputs.as_slice() {
        [] => LocalPolys::default(),
        [path] => LocalPolys::from_json(&load_text(path)?).map_err(|e| CliError::Load(e.to_string()))?,
        _ => return Err(CliError::Load("kummer takes one local polynomial file".into())),
    };
    let sigma = sigma_measure(&local, p).map_err(|e| CliError::Load(e.to_string()))?;
    let n = c.precision;
    let mmax = mmax.unwrap_or(p as u32 + 1);
    let imax = c.bound.map(|b| b as u32).unwrap_or(n + 2);
    let system = sigma.system(imax)?;
    let work = n + 4;
    let mut basis = Vec::new();
    let mut values = Vec::new();
    let mut rows = Vec::new();
    for chi in DirichletChar::all(p) {
        for m in 0..=mmax {
            let exact = sigma.eval(&|y| chi.value(y), m as i64)?;
            let emb = embed_cyclo(&exact, p, work)?;
            rows.push(json!({"chi": char_label(&chi), "m": m, "value": exact.to_string(), "embedded": emb.to_json()}));
            basis.push(TestFunction { chi: chi.clone(), m });
            values.push(emb);
        }
    }
    let v = kummer_check(&basis, &values, n, trials, c.seed)?;
    let mut table = format!("Kummer congruences for Sigma, p = {p}, N = {n}, [m] <= {mmax}\n");
    let _ = writeln!(table, "point masses: {}", sigma.as_dirac().points.len());
    let _ = writeln!(table, "compatible levels: 1..={imax}");
    let _ = writeln!(table, "kernel generators: {}", v.kernel.len());
    let _ = writeln!(table, "verdict: {}", v.summary());
    let json = json!({
        "command": "kummer",
        "p": p,
        "precision": n,
        "mmax": mmax,
        "verdict": v.summary(),
        "pass": v.passed(),
        "vacuous": v.vacuous(),
        "kernel": v.kernel,
        "failures": v.failures,
        "combinations_checked": v.combinations_checked,
        "values": rows,
        "measure": system.to_json(n)?,
    });
    Ok(Report { table, json, exit: if v.passed() { 0 } else { 1 } })
}

fn sign_of(s: &str) -> Result<Sign, CliError> {
    match s {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        _ => Err(CliError::Load(format!("sign {s} is neither + nor -"))),
    }
}

pub fn interpolate(c: &Common) -> Result<Report, CliError> {
    let [path] = c.inputs.as_slice() else {
        return Err(CliError::Load("interpolate takes one job file".into()));
    };
    let job: InterpolationJob = load(path)?;
    if let Some(p) = c.p {
        if p != job.p {
            return Err(CliError::Load(format!("job is for p = {}, not {p}", job.p)));
        }
    }
    let p = job.p;
    let q = |s: &str| parse_q(s).ok_or_else(|| CliError::Load(format!("bad rational {s}")));
    let weight = q(&job.weight)?;
    let tau = HalfIntSymMatrix::new(job.tau_twice.clone()).map_err(|e| CliError::Load(e.to_string()))?;
    let n = tau.degree();
    let mut rows: Vec<(DirichletChar, Q, Sign)> = Vec::new();
    if job.rows.is_empty() {
        let lmax = c.bound.unwrap_or(1).max(1) as u32;
        for l in 1..=lmax {
            let modulus = p.pow(l);
            for chi in DirichletChar::all(modulus).into_iter().filter(|x| x.conductor() == modulus) {
                let lo = qi(2 * n as i64 + 1) - &weight;
                let mut m = lo.floor() + Q::new(1.into(), 2.into());
                while m <= weight {
                    for s in [Sign::Plus, Sign::Minus] {
                        rows.push((chi.clone(), m.clone(), s));
                    }
                    m += qi(1);
                }
            }
        }
    } else {
        for r in &job.rows {
            let chi = DirichletChar::new(r.chi_modulus, r.chi_exps.clone()).map_err(|e| CliError::Load(e.to_string()))?;
            rows.push((chi, q(&r.m)?, sign_of(&r.sign)?));
        }
    }
    let base = InterpolationInput {
        p,
        weight: weight.clone(),
        tau,
        t: q(&job.t)?,
        b: q(&job.b)?,
        c: job.c,
        psi_inf_sign: job.psi_inf_sign,
        chi: DirichletChar::trivial(p),
        m: qi(0),
        sign: Sign::Plus,
        twist_sq_trivial: job.twist_sq_trivial,
        lambda_tau: value(&job.lambda_tau)?,
        g_tau: value(&job.g_tau)?,
        gauss: job.gauss.as_ref().map(value).transpose()?,
        lambda0: value(&job.lambda0)?,
        l_ratio: LRatio::Supplied(value(&job.l_ratio)?),
        precision: job.precision,
    };
    let explicit = !job.rows.is_empty();
    let mut table = format!("interpolation values, p = {p}, k = {}\n", fmt_q(&weight));
    let _ = writeln!(table, "{:<10} {:>6} {:>2} {:>10} {:>12}  {}", "chi", "m", "+-", "valuation", "precision", "value");
    let mut out_rows = Vec::new();
    for (chi, m, sign) in rows {
        let input = InterpolationInput { chi: chi.clone(), m: m.clone(), sign, ..base.clone() };
        let res = interpolation_value(&input);
        let (val_s, valuation, precision, entry) = match res {
            Ok(InterpolationValue::ParityExcluded) => {
                ("0 (excluded)".to_string(), "-".to_string(), "exact".to_string(), json!({"tag": "parity_excluded", "value": "0"}))
            }
            Ok(InterpolationValue::Value { exact, valuation, embedded }) => {
                let v = valuation.as_ref().map(fmt_q).unwrap_or_else(|| "?".into());
                let pr = embedded.as_ref().map(|e| e.absolute_precision().to_string()).unwrap_or_else(|| "exact".into());
                let entry = json!({
                    "tag": "value",
                    "exact": exact,
                    "display": exact.to_string(),
                    "valuation": valuation.as_ref().map(fmt_q),
                    "embedded": embedded.as_ref().map(|e| e.to_json()),
                });
                (exact.to_string(), v, pr, entry)
            }
            Err(Error::ExcludedSpecialValue(_)) => {
                ("excluded m".to_string(), "-".to_string(), "-".to_string(), json!({"tag": "excluded_special_value"}))
            }
            Err(Error::NotSpecialValue(_)) if !explicit => continue,
            Err(e) => return Err(e.into()),
        };
        let sign_s = sign.to_string();
        let _ = writeln!(table, "{:<10} {:>6} {:>2} {:>10} {:>12}  {}", char_label(&chi), fmt_q(&m), sign_s, valuation, precision, val_s);
        let mut entry = entry;
        entry["chi"] = json!(char_label(&chi));
        entry["m"] = json!(fmt_q(&m));
        entry["sign"] = json!(sign_s);
        out_rows.push(entry);
    }
    let json = json!({"command": "interpolate", "p": p, "weight": fmt_q(&weight), "rows": out_rows});
    Ok(Report { table, json, exit: 0 })
}

pub fn enumerate(c: &Common) -> Result<Report, CliError> {
    let n = c.degree;
    let bound = c.bound.unwrap_or(6);
    let all = enumerate_splus(n, bound)?;
    let mut classes: BTreeMap<HalfIntSymMatrix, (u64, usize)> = BTreeMap::new();
    let mut singular = 0usize;
    for tau in &all {
        if !tau.is_positive_definite() {
            singular += 1;
            continue;
        }
        let rc = reduce_class(tau)?;
        classes.entry(rc.representative).or_insert((rc.aut_count, 0)).1 += 1;
    }
    let mut table = format!("S_+ of degree {n} up to trace {bound}: {} matrices, {singular} singular\n", all.len());
    let _ = writeln!(table, "{:<20} {:>8} {:>10} {:>8}", "class", "det", "|Aut|", "count");
    let mut rows = Vec::new();
    for (rep, (aut, count)) in &classes {
        let _ = writeln!(table, "{:<20} {:>8} {:>10} {:>8}", rep.to_string(), fmt_q(&rep.det()), aut, count);
        rows.push(json!({"twice": rep.twice(), "det": fmt_q(&rep.det()), "aut_count": aut, "count": count}));
    }
    let json = json!({"command": "enumerate", "degree": n, "bound": bound, "total": all.len(), "singular": singular, "classes": rows});
    Ok(Report { table, json, exit: 0 })
}
