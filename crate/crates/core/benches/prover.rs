//! Sequential against data-parallel runs of the oracle and the tableau.
//! Without the `parallel` feature both variants take the sequential path.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dpl::semantics::bounded_sat_oracle_with;
use dpl::syntax::{nnf, parse_formula_open, Vocabulary};
use dpl::tableau::{prove_tableau_with, ProverOptions};
use dpl::validity::{check_global_with, CheckOptions};

const ORACLE_CASES: [&str; 2] = [
    "<a>p && <b>q && [a + b](p || q) && Pw(a & b) && ~P(c)",
    "<a + c>(p && <b>q) && [U](~p || Pw(b)) && ~P(a & !b)",
];

const TABLEAU_CASES: [&str; 2] = [
    "<a>p && <b>q && <c>(p && q) && [a + b + c]<a + b>(p || q) && Pw(a) && ~P(b & !a)",
    "<a + b + c><a + b>p && <a & !c>~p && [a](p -> <b>q) && P(a + b) && ~Pw(c)",
];

const GLOBAL_CASES: [&str; 3] = [
    "([a]p && <a>q && <b>r) -> (<a>(p && q) && <b>r)",
    "(P(a + b) && <a>p && <b>q) -> (P(a) && <a + b>(p || q))",
    "(<a>p && <a>q && <a>r && [a](p -> s)) -> <a>(p && s)",
];

fn oracle(c: &mut Criterion) {
    let v = Vocabulary::new(["a", "b", "c"], ["p", "q"]).unwrap();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    for (i, text) in ORACLE_CASES.iter().enumerate() {
        let f = parse_formula_open(text).unwrap();
        for parallel in [false, true] {
            let id = BenchmarkId::new(if parallel { "parallel" } else { "sequential" }, i);
            group.bench_with_input(id, &f, |b, f| {
                b.iter(|| bounded_sat_oracle_with(black_box(f), &v, parallel).unwrap())
            });
        }
    }
    group.finish();
}

fn tableau(c: &mut Criterion) {
    let v = Vocabulary::new(["a", "b", "c", "_b1", "_b2", "_b3"], ["p", "q"]).unwrap();
    let mut group = c.benchmark_group("tableau");
    for (i, text) in TABLEAU_CASES.iter().enumerate() {
        let f = nnf(&parse_formula_open(text).unwrap()).into_formula();
        for parallel in [false, true] {
            let id = BenchmarkId::new(if parallel { "parallel" } else { "sequential" }, i);
            let options = ProverOptions { parallel, ..Default::default() };
            group.bench_with_input(id, &f, |b, f| {
                b.iter(|| prove_tableau_with(black_box(f), &v, options).unwrap())
            });
        }
    }
    group.finish();
}

fn global(c: &mut Criterion) {
    let mut group = c.benchmark_group("global");
    for (i, text) in GLOBAL_CASES.iter().enumerate() {
        let f = parse_formula_open(text).unwrap();
        for parallel in [false, true] {
            let id = BenchmarkId::new(if parallel { "parallel" } else { "sequential" }, i);
            let options = CheckOptions { parallel, ..Default::default() };
            group.bench_with_input(id, &f, |b, f| {
                b.iter(|| check_global_with(black_box(f), &options).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, oracle, tableau, global);
criterion_main!(benches);
