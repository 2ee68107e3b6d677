use criterion::{black_box, criterion_group, criterion_main, Criterion};

use siegel_core::arith::qi;
use siegel_core::chars::gauss_sum_n;
use siegel_core::hecke::{hecke_polynomial, v_polys, PMode};
use siegel_core::measures::{kummer_check, sigma_measure, CharEvaluator, TestFunction};
use siegel_core::padic::embed_cyclo;
use siegel_core::qexp::theta_series;
use siegel_core::eisen::LocalPolys;
use siegel_core::{DirichletChar, HalfIntSymMatrix};

fn gauss(c: &mut Criterion) {
    let chi = DirichletChar::all(5).into_iter().find(|x| x.order() == 4).unwrap();
    c.bench_function("gauss_sum degree 2 mod 5", |b| {
        b.iter(|| gauss_sum_n(black_box(&[vec![1, 2], vec![3, 1]]), &chi, 2).unwrap())
    });
    let chi13 = DirichletChar::all(13).into_iter().find(|x| x.order() == 12).unwrap();
    c.bench_function("gauss_sum degree 1 mod 13", |b| b.iter(|| gauss_sum_n(black_box(&[vec![1]]), &chi13, 1).unwrap()));
}

fn hecke(c: &mut Criterion) {
    c.bench_function("hecke polynomial n=3 symbolic", |b| b.iter(|| hecke_polynomial(black_box(3), PMode::Symbolic).unwrap()));
    let t = hecke_polynomial(3, PMode::Numeric(3)).unwrap();
    c.bench_function("factorisation n=3 p=3", |b| b.iter(|| v_polys(black_box(&t), 3).unwrap()));
}

fn theta(c: &mut Criterion) {
    let chi = DirichletChar::all(5).into_iter().find(|x| x.is_primitive() && x.parity() == 1).unwrap();
    let tau = HalfIntSymMatrix::scalar(1);
    c.bench_function("theta series n=1 to 2000", |b| b.iter(|| theta_series(&tau, &chi, 0, &qi(1), black_box(2000)).unwrap()));
}

fn kummer(c: &mut Criterion) {
    let p = 5;
    let local = LocalPolys::from_json(r#"{"2": [0, 1, -3], "3": [0, 2, 0, 1]}"#).unwrap();
    let sigma = sigma_measure(&local, p).unwrap();
    let mut basis = Vec::new();
    let mut values = Vec::new();
    for chi in DirichletChar::all(p) {
        for m in 0..=6u32 {
            let v = sigma.eval(&|y| chi.value(y), m as i64).unwrap();
            values.push(embed_cyclo(&v, p, 6).unwrap());
            basis.push(TestFunction { chi: chi.clone(), m });
        }
    }
    c.bench_function("kummer check p=5 N=2", |b| b.iter(|| kummer_check(&basis, black_box(&values), 2, 20, 0).unwrap()));
}

criterion_group!(benches, gauss, hecke, theta, kummer);
criterion_main!(benches);
