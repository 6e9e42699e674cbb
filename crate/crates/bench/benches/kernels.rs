use criterion::{black_box, criterion_group, criterion_main, Criterion};
use csrg::gauss::{build_trace_counts, gauss_sum_exact};
use csrg::verify::{char_profile_from_table, char_profile_via_gauss_from_table};
use csrg::{build_field, CycInt};

fn trace_table(c: &mut Criterion) {
    let field = build_field(3, 5).unwrap();
    c.bench_function("trace_counts 3^5 k=11", |b| b.iter(|| build_trace_counts(black_box(&field), 11).unwrap()));
    let field = build_field(2, 12).unwrap();
    c.bench_function("trace_counts 2^12 k=45", |b| b.iter(|| build_trace_counts(black_box(&field), 45).unwrap()));
}

fn gauss(c: &mut Criterion) {
    let field = build_field(3, 5).unwrap();
    let table = build_trace_counts(&field, 11).unwrap();
    c.bench_function("gauss_sum 3^5 k=11 u=1", |b| b.iter(|| gauss_sum_exact(black_box(&table), 1)));
}

fn cycint(c: &mut Criterion) {
    let n = 33;
    let a = CycInt::from_raw_i128(n, (0..n as i128).map(|i| i % 5 - 2).collect());
    let b = CycInt::from_raw_i128(n, (0..n as i128).map(|i| (i * 7) % 3 - 1).collect());
    c.bench_function("cycint mul n=33", |bn| bn.iter(|| black_box(&a) * black_box(&b)));
}

fn profile(c: &mut Criterion) {
    let field = build_field(2, 12).unwrap();
    let table = build_trace_counts(&field, 45).unwrap();
    let classes = [0, 5, 10];
    c.bench_function("profile direct 2^12 k=45", |b| b.iter(|| char_profile_from_table(black_box(&table), &classes)));
    let field = build_field(3, 5).unwrap();
    let table = build_trace_counts(&field, 11).unwrap();
    c.bench_function("profile via gauss 3^5 k=11", |b| b.iter(|| char_profile_via_gauss_from_table(black_box(&table), &[0]).unwrap()));
}

criterion_group!(benches, trace_table, gauss, cycint, profile);
criterion_main!(benches);
