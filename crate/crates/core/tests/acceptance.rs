//! Acceptance gate: one pass/fail line per criterion, pinned tolerances,
//! run over the stock corpus shipped in `corpus/`.

use groupoid_fourier::checks::{run_suite, Suite, SuiteReport};
use groupoid_fourier::fourier::FunctionBundle;
use groupoid_fourier::io;
use groupoid_fourier::linalg::C64;
use groupoid_fourier::rep::dual_object;
use groupoid_fourier::spectral::{bench, conv_power, direct_power};
use groupoid_fourier::{FiniteGroupoid, Unit, DEFAULT_SEED};

const TRIALS: usize = 100;

/// Stock corpus (excluding the benchmark-only cyclic-256 instance).
const STOCK: &[&str] = &[
    "trivial.json",
    "z2.json",
    "z3.json",
    "z4.json",
    "s3.json",
    "pair2.json",
    "pair3.json",
    "pair4.json",
    "z2_swap_action.json",
    "z2_z3_bundle.json",
    "s3_pair2.json",
];

fn corpus_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn load(name: &str) -> FiniteGroupoid {
    io::from_file(corpus_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn emit(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").ok();
}

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate { failures: Vec::new() }
    }

    fn report(&mut self, criterion: usize, label: &str, max_dev: f64, tol: f64) {
        let pass = max_dev <= tol;
        // Write straight to stdout so the verdict lines bypass the harness's
        // output capture and are visible even when the test passes.
        emit(&format!(
            "[{}] criterion {criterion}: {label} (max_dev {max_dev:.3e}, tol {tol:.0e})",
            if pass { "PASS" } else { "FAIL" }
        ));
        if !pass {
            self.failures.push(format!("criterion {criterion}: {label}"));
        }
    }

    fn finish(self) {
        assert!(self.failures.is_empty(), "failed: {:?}", self.failures);
    }
}

/// Max deviation across a suite run on every stock groupoid; also asserts the
/// suite's own pass verdict (which applies the per-identity tolerances).
fn worst_over_stock(suite: Suite, tables: &[(String, FiniteGroupoid, groupoid_fourier::rep::IrrepTable)]) -> (f64, bool) {
    let mut worst: f64 = 0.0;
    let mut all_pass = true;
    for (name, g, table) in tables {
        let report: SuiteReport = run_suite(g, table, suite, DEFAULT_SEED, TRIALS);
        for check in &report.checks {
            worst = worst.max(check.max_dev);
            if !check.pass() {
                eprintln!("{name}: {} deviates {:.3e} > {:.0e}", check.name, check.max_dev, check.tol);
                all_pass = false;
            }
        }
    }
    (worst, all_pass)
}

#[test]
fn acceptance() {
    let tables: Vec<(String, FiniteGroupoid, groupoid_fourier::rep::IrrepTable)> = STOCK
        .iter()
        .map(|name| {
            let g = load(name);
            let table = dual_object(&g, DEFAULT_SEED, 1e-9)
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            (name.to_string(), g, table)
        })
        .collect();

    let mut gate = Gate::new();

    // 1. Peter–Weyl completeness: Gram deviation < 1e-9, Σ d² = |fiber| exact.
    let (dev, ok) = worst_over_stock(Suite::PeterWeyl, &tables);
    gate.report(1, "Peter-Weyl completeness", if ok { dev } else { f64::INFINITY }, 1e-9);

    // 2. Orthogonality relations, forms (i)–(v), seeded random instances.
    let (dev, ok) = worst_over_stock(Suite::Orthogonality, &tables);
    gate.report(2, "orthogonality relations (i)-(v)", if ok { dev } else { f64::INFINITY }, 1e-9);

    // 3. Fourier inversion round trips both ways on every fiber.
    let (dev, ok) = worst_over_stock(Suite::Inversion, &tables);
    gate.report(3, "Fourier inversion round trips", if ok { dev } else { f64::INFINITY }, 1e-10);

    // 4. Plancherel: Parseval equality and bijectivity witnesses.
    let (dev, ok) = worst_over_stock(Suite::Plancherel, &tables);
    gate.report(4, "Plancherel / Parseval", if ok { dev } else { f64::INFINITY }, 1e-10);

    // 5. Homomorphism: convolution theorem, involution, translation.
    let (dev, ok) = worst_over_stock(Suite::Homomorphism, &tables);
    gate.report(5, "algebra homomorphism properties", if ok { dev } else { f64::INFINITY }, 1e-10);

    // 6. Characters: convolution identity, coefficient-space membership,
    //    isotypic projections.
    let (dev, ok) = worst_over_stock(Suite::Characters, &tables);
    gate.report(6, "character identities", if ok { dev } else { f64::INFINITY }, 1e-10);

    // 7. Center and diagonal suites (the per-identity tolerances inside go
    //    down to 1e-12 for the norm-preservation law).
    let (dev_c, ok_c) = worst_over_stock(Suite::Center, &tables);
    let (dev_d, ok_d) = worst_over_stock(Suite::Diagonal, &tables);
    let ok = ok_c && ok_d;
    gate.report(7, "center / diagonal transform suite", if ok { dev_c.max(dev_d) } else { f64::INFINITY }, 1e-10);

    // 8. Irrep engine robustness: every stock dual certified above, plus
    //    bit-for-bit determinism given the seed.
    let mut det_dev: f64 = 0.0;
    for (name, g, table) in &tables {
        let again = dual_object(g, DEFAULT_SEED, 1e-9).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(table.entries.len(), again.entries.len(), "{name}: entry count changed");
        for (a, b) in table.entries.iter().zip(&again.entries) {
            assert_eq!(a.id, b.id, "{name}: irrep ids changed");
            for x in g.arrows() {
                let d = (a.rep.matrix(x) - b.rep.matrix(x))
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                det_dev = det_dev.max(d);
            }
        }
    }
    gate.report(8, "irrep engine determinism given seed", det_dev, 0.0);

    // 9a. conv_power agrees with direct convolution for all k ≤ 64.
    let mut conv_dev: f64 = 0.0;
    for name in ["z4.json", "s3.json", "s3_pair2.json"] {
        let (_, g, table) = tables.iter().find(|(n, _, _)| n == name).unwrap();
        let u = Unit(0);
        let f = FunctionBundle::from_fn(g, |x| {
            C64::new(0.4 * (x.0 as f64).cos(), 0.3 * (x.0 as f64).sin())
        });
        for k in [1usize, 2, 3, 7, 16, 33, 64] {
            let spec = conv_power(g, table, &f, u, k).unwrap().function;
            let direct = direct_power(g, &f, u, k).unwrap();
            conv_dev = conv_dev.max(spec.sub(&direct).max_abs_fiber(g, u, u));
        }
    }
    gate.report(9, "conv_power vs direct convolution, k <= 64", conv_dev, 1e-8);

    // 9b. Calibrated benchmark: cyclic 256, k = 1024, spectral >= 5x faster.
    let g = load("cyclic256.json");
    let table = dual_object(&g, DEFAULT_SEED, 1e-9).expect("cyclic-256 dual");
    let u = Unit(0);
    // A contractive density keeps 1024 powers numerically tame.
    let f = FunctionBundle::from_fn(&g, |x| C64::new(0.9 + 0.2 * ((x.0 % 7) as f64) / 7.0, 0.0));
    let report = bench(&g, &table, &f, u, 1024, 3).expect("bench");
    emit(&format!(
        "[{}] criterion 9: spectral speedup cyclic-256 k=1024 ({:.1}x, direct {:.2} ms, spectral {:.2} ms, err {:.3e})",
        if report.speedup >= 5.0 && report.max_abs_err < 1e-8 { "PASS" } else { "FAIL" },
        report.speedup,
        report.direct_ms,
        report.spectral_ms,
        report.max_abs_err
    ));
    assert!(report.max_abs_err < 1e-8, "benchmark cross-check error {}", report.max_abs_err);
    if report.speedup < 5.0 {
        gate.failures
            .push(format!("criterion 9: speedup {:.1}x < 5x", report.speedup));
    }

    gate.finish();
}
