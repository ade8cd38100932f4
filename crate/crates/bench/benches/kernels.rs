use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use recurlab::bernoulli::{event_probability_oracle, over_correlation, BernoulliSet};
use recurlab::combinatorics::sign_pattern_experiment;
use recurlab::correspondence::{consistency_check, SourceSpec};
use recurlab::rademacher::{multiple_f_correlation, SeriesKind};
use recurlab::spectral::riesz_coefficient;
use recurlab::{BernoulliParams, RieszSpec, SignedSeries};

fn riesz(c: &mut Criterion) {
    let spec = RieszSpec::inv_sqrt();
    c.bench_function("riesz_inv_sqrt_n_le_729", |b| {
        b.iter(|| (1..=729).map(|n| riesz_coefficient(&spec, black_box(n))).collect::<Vec<_>>())
    });
}

fn bernoulli(c: &mut Criterion) {
    let p = BernoulliParams::uniform();
    let over = BernoulliSet::Over.automaton();
    c.bench_function("bernoulli_closed_form_n_le_64", |b| {
        b.iter(|| (1..=64).map(|n| over_correlation(&p, black_box(n))).collect::<Vec<_>>())
    });
    c.bench_function("bernoulli_oracle_n_12", |b| {
        b.iter(|| event_probability_oracle(&over, &over, &p, black_box(12)).unwrap())
    });
}

fn multiple(c: &mut Criterion) {
    let series = SignedSeries::canonical_multiple(4, SeriesKind::Antisymmetric).unwrap();
    c.bench_function("multiple_correlation_d4", |b| {
        b.iter(|| multiple_f_correlation(&series, black_box(&[1, 3, 4, 7])).unwrap())
    });
}

fn correspondence(c: &mut Criterion) {
    let source = "series:-".parse::<SourceSpec>().unwrap().build().unwrap();
    c.bench_function("consistency_depth_6", |b| {
        b.iter(|| consistency_check(source.as_ref(), black_box(6)).unwrap())
    });
    let bern = "bernoulli:over:1/3,1/3,1/3".parse::<SourceSpec>().unwrap().build().unwrap();
    c.bench_function("density_bernoulli_1e5", |b| {
        b.iter(|| sign_pattern_experiment(bern.as_ref(), None, 5, black_box(100_000), 7).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = riesz, bernoulli, multiple, correspondence
}
criterion_main!(benches);
