//! Sequential vs rayon execution of the data-parallel paths.
//!
//! Without the `parallel` feature both variants run sequentially.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ricci_stab::catalog;
use ricci_stab::curvature::{sectional_scan, CurvaturePackage, DEFAULT_SEED};
use ricci_stab::report::build_report;
use ricci_stab::sweep::{run_sweep, Family, Grid};
use ricci_stab::{Execution, Tolerances};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn curvature(c: &mut Criterion) {
    let mut g = c.benchmark_group("riemann");
    for name in ["mu11_diagonalized", "heis(3,8)"] {
        let alg = catalog::resolve(name, &[]).unwrap();
        for (mode, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(mode, name), &alg, |b, alg| {
                b.iter(|| CurvaturePackage::compute_with(alg, exec))
            });
        }
    }
    g.finish();
}

fn scan(c: &mut Criterion) {
    let pkg = CurvaturePackage::compute(&catalog::abelian_ex1());
    let mut g = c.benchmark_group("sectional_scan");
    for (mode, exec) in MODES {
        g.bench_function(mode, |b| b.iter(|| sectional_scan(&pkg, 4096, DEFAULT_SEED, exec).unwrap()));
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let tol = Tolerances::default();
    let grid = Grid::parse("0.05:0.95:19").unwrap();
    let mut g = c.benchmark_group("lauret_sweep");
    g.sample_size(10);
    for (mode, exec) in MODES {
        g.bench_function(mode, |b| b.iter(|| run_sweep(&Family::LauretCurve, Some(grid), exec, &tol).unwrap()));
    }
    g.finish();
}

fn report(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut g = c.benchmark_group("report");
    g.sample_size(10);
    for (mode, exec) in MODES {
        g.bench_function(mode, |b| b.iter(|| build_report(exec, &tol).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, curvature, scan, sweep, report);
criterion_main!(benches);
