use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use deontic_bench::{cards, chain, chisholm, diamonds, social_contract, wst};
use deontic_core::alc::translate_problem;
use deontic_core::analysis;
use deontic_core::hypertableau::{solve, Config};
use deontic_core::oracle::oracle_problem;
use deontic_core::tableau::build_tableau;
use deontic_core::{Engine, Formula, ModalityId};

fn quiet() -> Config {
    Config {
        record_trace: false,
        ..Config::default()
    }
}

fn scenarios(c: &mut Criterion) {
    let w = wst();
    let k = Formula::atom("c(l,K)");
    c.bench_function("tableau/wst", |b| b.iter(|| build_tableau(black_box(&w.all_formulas()))));
    c.bench_function("turn/wst/hypertableau", |b| {
        b.iter(|| analysis::must_check(black_box(&w), &k, &ModalityId::ought(), Engine::Hypertableau, &quiet()))
    });
    c.bench_function("turn/wst/both", |b| {
        b.iter(|| analysis::must_check(black_box(&w), &k, &ModalityId::ought(), Engine::Both, &quiet()))
    });
    let s = social_contract();
    c.bench_function("obligations/social_contract", |b| {
        b.iter(|| analysis::obligations(black_box(&s), Engine::Tableau, &quiet()))
    });
    let ch = chisholm();
    let kb = translate_problem(&ch, &[]).clausify();
    c.bench_function("solve/chisholm", |b| b.iter(|| solve(black_box(&kb), &quiet())));
    c.bench_function("oracle/chisholm", |b| b.iter(|| oracle_problem(black_box(&ch), 3)));
}

fn scaling(c: &mut Criterion) {
    let mut g = c.benchmark_group("cards");
    for n in [1, 2, 3] {
        let p = cards(n);
        let k = Formula::atom("c(l0,K)");
        g.bench_with_input(BenchmarkId::new("tableau", n), &p, |b, p| {
            b.iter(|| analysis::obligations(p, Engine::Tableau, &quiet()))
        });
        g.bench_with_input(BenchmarkId::new("hypertableau", n), &p, |b, p| {
            b.iter(|| analysis::must_check(p, &k, &ModalityId::ought(), Engine::Hypertableau, &quiet()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("chain");
    for n in [4, 16, 64] {
        let p = chain(n);
        g.bench_with_input(BenchmarkId::new("consistency", n), &p, |b, p| {
            b.iter(|| analysis::check_consistency(p, Engine::Hypertableau, &quiet()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("diamonds");
    for n in [2, 8, 32] {
        let p = diamonds(n);
        g.bench_with_input(BenchmarkId::new("consistency", n), &p, |b, p| {
            b.iter(|| analysis::check_consistency(p, Engine::Hypertableau, &quiet()))
        });
    }
    g.finish();
}

criterion_group!(benches, scenarios, scaling);
criterion_main!(benches);
