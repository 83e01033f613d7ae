use std::hint::black_box;

use bosonlink_bench::{default_point, pumping_fixture};
use bosonlink_core::device::emit_conversion;
use bosonlink_core::herald::herald;
use bosonlink_core::purify::{pump_round, run_schedule, run_schedule_mc, PumpSchedule};
use bosonlink_core::sweep::{operating_point, Registers};
use bosonlink_core::Scheme;
use criterion::{criterion_group, criterion_main, Criterion};

fn heralding(c: &mut Criterion) {
    let (cfg, point) = default_point().unwrap();
    let trunc = cfg.truncation();
    c.bench_function("emit_conversion", |b| {
        b.iter(|| {
            emit_conversion(black_box(cfg.p_e), cfg.p_laser_uw, &cfg.transducer, trunc).unwrap()
        })
    });
    c.bench_function("herald", |b| {
        b.iter(|| herald(black_box(&point.emission), &point.emission, &cfg.link).unwrap())
    });
    c.bench_function("operating_point_conversion", |b| {
        b.iter(|| {
            operating_point(
                &cfg,
                Scheme::Conversion,
                black_box(cfg.p_laser_uw),
                &cfg.link,
                &Registers::Ideal,
            )
            .unwrap()
        })
    });
}

fn pumping(c: &mut Criterion) {
    let (_, source) = pumping_fixture(100.0).unwrap();
    c.bench_function("pump_round", |b| {
        b.iter(|| {
            pump_round(
                black_box(&source.rho),
                &source.rho,
                &source.mem_a,
                &source.mem_b,
                Default::default(),
            )
            .unwrap()
        })
    });
    let sched = PumpSchedule::default();
    c.bench_function("run_schedule_analytic", |b| {
        b.iter(|| run_schedule(black_box(&sched), &source).unwrap())
    });
    let mut group = c.benchmark_group("monte_carlo");
    group.sample_size(10);
    group.bench_function("run_schedule_mc_1000", |b| {
        b.iter(|| run_schedule_mc(black_box(&sched), &source, 1000, 7).unwrap())
    });
    group.finish();
}

criterion_group!(benches, heralding, pumping);
criterion_main!(benches);
