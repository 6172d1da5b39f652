use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quadcong::arith::CoeffRing;
use quadcong::criteria::{hasse_density, prime_scan, required_scan_precision, ScanMode};
use quadcong::hecke::FormContext;
use quadcong::par::{with_exec, Exec};
use quadcong::qexp::{eta_quotient_expansion, EtaQuotient, GradedSeries};
use quadcong::shimura::shimura_lift;
use quadcong::sl2::{find_sigma_all, enumerate_sl2, MatFl, RepTuple, SearchMode};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn eta(r: i64, prec: i64, ring: &CoeffRing) -> GradedSeries {
    eta_quotient_expansion(&EtaQuotient::eta_power(r), prec, ring, false).unwrap()
}

fn expansion(c: &mut Criterion) {
    let mut g = c.benchmark_group("eta_power_expansion_mod_13");
    g.sample_size(10);
    let ring = CoeffRing::mod_prime_power(13, 1, 1).unwrap();
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, "eta11_to_2e6"), |b| {
            b.iter(|| with_exec(mode, || eta(11, 2_000_000, &ring)))
        });
    }
    g.finish();
}

fn multiplication(c: &mut Criterion) {
    let mut g = c.benchmark_group("series_product_exact");
    g.sample_size(10);
    let ring = CoeffRing::exact();
    let a = eta(5, 240_000, &ring);
    let b = eta(7, 240_000, &ring);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, "eta5_times_eta7"), |bch| {
            bch.iter(|| with_exec(mode, || a.mul(&b).unwrap()))
        });
    }
    g.finish();
}

fn scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("prime_scan_eta7_mod5");
    g.sample_size(10);
    let ctx = FormContext::eta_power(7, 5, 1).unwrap();
    let prec = required_scan_precision(&ctx, ScanMode::Thm2, 200);
    let f = eta(7, prec, &ctx.residue_ring().unwrap());
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, "p_max_200"), |b| {
            b.iter(|| with_exec(mode, || prime_scan(&f, &ctx, ScanMode::Thm2, 200).unwrap()))
        });
    }
    g.finish();
}

fn lift(c: &mut Criterion) {
    let mut g = c.benchmark_group("shimura_lift_eta11");
    g.sample_size(10);
    let ctx = FormContext::eta_power(11, 13, 1).unwrap();
    let f = eta(11, 11 * 300 * 300 + 24, &CoeffRing::exact());
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, "n_300"), |b| {
            b.iter(|| with_exec(mode, || shimura_lift(&f, &ctx, 11, 300).unwrap()))
        });
    }
    g.finish();
}

fn hasse(c: &mut Criterion) {
    let mut g = c.benchmark_group("hasse_density");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, "x_1e6"), |b| b.iter(|| with_exec(mode, || hasse_density(1_000_000).unwrap())));
    }
    g.finish();
}

fn sigma(c: &mut Criterion) {
    let mut g = c.benchmark_group("find_sigma_sl2_f5");
    g.sample_size(10);
    let reps = RepTuple::twisted(5, &[MatFl::identity(5), MatFl::new(5, 2, 1, 1, 1).unwrap()]).unwrap();
    let gammas = enumerate_sl2(5);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, "all_120"), |b| {
            b.iter(|| with_exec(mode, || find_sigma_all(&reps, &gammas, SearchMode::Exhaustive)))
        });
    }
    g.finish();
}

criterion_group!(benches, expansion, multiplication, scan, lift, hasse, sigma);
criterion_main!(benches);
