use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use uavsec_core::analytic::{asr_network, cdf_optimal_dest_sinr, sop_single_link};
use uavsec_core::montecarlo::simulate_budgets;
use uavsec_core::specfun::{bessel_k, ln_bessel_k_orders};
use uavsec_core::{LinkBudget, QuadratureSpec, SimConfig};

fn bessel(c: &mut Criterion) {
    let mut group = c.benchmark_group("bessel_k");
    for x in [0.05, 1.5, 8.0, 60.0] {
        group.bench_with_input(BenchmarkId::new("k1", x), &x, |b, &x| {
            b.iter(|| bessel_k(1, black_box(x)))
        });
    }
    group.bench_function("orders_0_to_64_at_1e-3", |b| {
        b.iter(|| ln_bessel_k_orders(64, black_box(1e-3)))
    });
    group.finish();
}

fn outage(c: &mut Criterion) {
    let mut group = c.benchmark_group("sop_single_link");
    // the first budget stays on the double-precision path, the second needs
    // the multiprecision one
    for (label, gbar) in [("f64_10dB", 10.0), ("precise_60dB", 1e6)] {
        let budget = LinkBudget::new(gbar, gbar).unwrap();
        for (m, n) in [(1, 1), (2, 2), (3, 4)] {
            group.bench_function(format!("{label}/m{m}_n{n}"), |b| {
                b.iter(|| sop_single_link(black_box(&budget), m, n))
            });
        }
    }
    group.finish();

    let budget = LinkBudget::new(20.0, 30.0).unwrap();
    c.bench_function("cdf_optimal_dest_sinr/m2_n2", |b| {
        b.iter(|| cdf_optimal_dest_sinr(black_box(&budget), 2, 2, black_box(4.0)))
    });
}

fn secrecy_rate(c: &mut Criterion) {
    let quad = QuadratureSpec::default();
    let mut group = c.benchmark_group("asr_network");
    group.sample_size(20);
    for gbar in [1.0, 100.0, 1e4] {
        let budget = LinkBudget::new(gbar, gbar).unwrap();
        group.bench_with_input(BenchmarkId::new("r2_m2_n2", gbar), &budget, |b, budget| {
            b.iter(|| asr_network(budget, 2, 2, 2, &quad))
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    const TRIALS: u64 = 200_000;
    let links = [LinkBudget::new(5.0, 8.0).unwrap(); 2];
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.throughput(Throughput::Elements(TRIALS));
    group.bench_function("r2_m2_n2", |b| {
        b.iter(|| simulate_budgets(&links, 2, 2, &SimConfig::new(TRIALS, black_box(7))))
    });
    group.finish();
}

criterion_group!(benches, bessel, outage, secrecy_rate, simulation);
criterion_main!(benches);
