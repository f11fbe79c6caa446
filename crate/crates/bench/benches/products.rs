use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tcube::products::{dkstp_cubic, t_product, t_stp, t_stp_via_gamma};
use tcube::random;
use tcube::Dims;

fn bench_products(c: &mut Criterion) {
    let mut rng = random::rng(1);
    let mut group = c.benchmark_group("products");
    for s in [2usize, 4, 8] {
        let a = random::real_cubic_unit(&mut rng, Dims { m: 4, n: 4, s });
        let b = random::real_cubic_unit(&mut rng, Dims { m: 4, n: 4, s });
        group.bench_with_input(BenchmarkId::new("t_product", s), &s, |bch, _| bch.iter(|| t_product(&a, &b).unwrap()));
        group.bench_with_input(BenchmarkId::new("t_stp", s), &s, |bch, _| bch.iter(|| t_stp(&a, &b).unwrap()));
        group.bench_with_input(BenchmarkId::new("t_stp_via_gamma", s), &s, |bch, _| {
            bch.iter(|| t_stp_via_gamma(&a, &b).unwrap())
        });
    }
    let a = random::real_cubic_unit(&mut rng, Dims { m: 3, n: 4, s: 3 });
    let b = random::real_cubic_unit(&mut rng, Dims { m: 6, n: 2, s: 2 });
    group.bench_function("dkstp_cubic_mixed", |bch| bch.iter(|| dkstp_cubic(&a, &b).unwrap()));
    group.bench_function("t_stp_mixed", |bch| bch.iter(|| t_stp(&a, &b).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_products);
criterion_main!(benches);
