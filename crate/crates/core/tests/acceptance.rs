//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. The 16-qubit projector run is skipped unless
//! `--ignored`/`--include-ignored` is given or `AQSTATE_LONG=1` is set.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use aqstate::estimator::{estimate_observable, reconstruct_density};
use aqstate::format;
use aqstate::harness::{self, haar_mixed_term_check, noise_attenuation_study, ExperimentConfig, ObservableKind};
use aqstate::snapshot::acquire_snapshots;
use aqstate::{projector_pauli_expansion, Normalization, NoiseModel, Observable, PauliAxis, PauliString, Statevector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Naive pair enumeration over labels, independent of the library's sparse path.
fn naive_seminorms(o: &Observable) -> (f64, f64) {
    let n = o.n_qubits();
    let rows: Vec<(f64, Vec<PauliAxis>)> = o
        .terms()
        .iter()
        .filter(|t| !t.pauli.is_identity())
        .map(|t| (t.coeff.abs(), (0..n).map(|q| t.pauli.axis(q)).collect()))
        .collect();
    let (mut full, mut diag) = (0.0, 0.0);
    for (ai, pi) in &rows {
        for (aj, pj) in &rows {
            let mut overlap = 0;
            let mut compatible = true;
            for q in 0..n {
                let (a, b) = (pi[q], pj[q]);
                if a != PauliAxis::I && b != PauliAxis::I {
                    if a == b {
                        overlap += 1;
                    } else {
                        compatible = false;
                    }
                }
            }
            if compatible {
                full += 3f64.powi(overlap) * ai * aj;
            }
        }
        diag += 3f64.powi(pi.iter().filter(|&&a| a != PauliAxis::I).count() as i32) * ai * ai;
    }
    (full, diag)
}

fn random_label_observable(rng: &mut ChaCha8Rng, n: usize, n_terms: usize, signed: bool) -> Observable {
    let terms = (0..n_terms).map(|_| {
        let label: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
        let c: f64 = rng.random();
        (if signed { 2.0 * c - 1.0 } else { 1.0 - c }, PauliString::from_label(&label).unwrap())
    });
    Observable::new(n, terms.collect::<Vec<_>>()).unwrap()
}

fn tomography() -> Outcome {
    let start = Instant::now();
    let m = 100_000;
    let tol = 5.0 * 3f64.sqrt() / (m as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let psi = Statevector::haar_random(1, &mut rng).unwrap();
        let state = acquire_snapshots(&psi, m, 1000 + k, &NoiseModel::noiseless(1)).unwrap();
        let rho = reconstruct_density(&state).unwrap();
        let a = psi.amplitudes();
        for r in 0..2 {
            for c in 0..2 {
                let exact: Complex64 = a[r] * a[c].conj();
                worst = worst.max((rho.get(r, c) - exact).norm());
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= tol && t < Duration::from_secs(10),
        format!("max entry error {worst:.5} <= {tol:.5}; {:.2} s < 10 s", secs(t)),
    )
}

fn variance_bound() -> Outcome {
    let start = Instant::now();
    let (n, m, reps, pairs) = (4, 1000usize, 200u64, 50u64);
    let bound = 1.0 / (m as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_ratio = 0.0f64;
    let mut over = 0;
    for pair in 0..pairs {
        let psi = Statevector::haar_random(n, &mut rng).unwrap();
        let o = harness::random_observable(n, 20, Normalization::Seminorm, &mut rng).unwrap();
        let estimates: Vec<f64> = (0..reps)
            .map(|k| {
                let s = acquire_snapshots(&psi, m, pair * 10_000 + k, &NoiseModel::noiseless(n)).unwrap();
                estimate_observable(&s, &o).unwrap().value
            })
            .collect();
        let mean = estimates.iter().sum::<f64>() / reps as f64;
        let std = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        worst_ratio = worst_ratio.max(std / bound);
        if std > bound {
            over += 1;
        }
    }
    let t = start.elapsed();
    let max_over = (0.05 * pairs as f64).floor() as usize;
    outcome(
        worst_ratio <= 1.15 && over <= max_over && t < Duration::from_secs(120),
        format!(
            "max std * sqrt(M) = {worst_ratio:.3} <= 1.15; {over}/{pairs} pairs above 1/sqrt(M) (allowed {max_over}); {:.1} s < 120 s",
            secs(t)
        ),
    )
}

fn second_moment() -> Outcome {
    let shots = 1_000_000;
    let psi = Statevector::haar_random(1, &mut ChaCha8Rng::seed_from_u64(303)).unwrap();
    let state = acquire_snapshots(&psi, shots, 303, &NoiseModel::noiseless(1)).unwrap();
    let mut acc = [[0.0f64; 3]; 3];
    for rec in state.records() {
        let v = rec.direction().unit_vector().map(|x| 3.0 * f64::from(rec.outcome()) * x);
        for a in 0..3 {
            for b in 0..3 {
                acc[a][b] += v[a] * v[b];
            }
        }
    }
    let mut worst = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            let target = if a == b { 3.0 } else { 0.0 };
            worst = worst.max((acc[a][b] / shots as f64 - target).abs());
        }
    }
    outcome(worst <= 0.02, format!("max |<R_a R_b> - 3 delta_ab| = {worst:.4} <= 0.02 over 10^6 snapshots"))
}

fn table_row(kind: ObservableKind, n_qubits: usize, seed: u64) -> (harness::Summary, Duration) {
    let start = Instant::now();
    let cfg = ExperimentConfig::new(n_qubits, 10_000, seed, kind);
    let report = harness::run_experiment(&cfg).unwrap();
    (report.summary, start.elapsed())
}

fn table_pauli_sums() -> Outcome {
    let (s, t) = table_row(ObservableKind::RandomPauliSum, 12, 404);
    outcome(
        (0.50..=0.95).contains(&s.fraction_within_1_std) && s.fraction_within_2_std >= 0.90 && t < Duration::from_secs(300),
        format!(
            "N = 12, M = 10^4: within 1 std {:.2} in [0.50, 0.95], within 2 std {:.2} >= 0.90; {:.1} s < 300 s",
            s.fraction_within_1_std,
            s.fraction_within_2_std,
            secs(t)
        ),
    )
}

fn table_projectors(n_qubits: usize) -> Outcome {
    let (s, t) = table_row(ObservableKind::BasisProjector, n_qubits, 505);
    outcome(
        s.fraction_within_2_std >= 0.90,
        format!(
            "N = {n_qubits}, M = 10^4 projectors: within 2 std {:.2} >= 0.90 (informational ||P||_2 band: {:.2}); {:.1} s",
            s.fraction_within_2_std,
            s.fraction_within_2_std_approx,
            secs(t)
        ),
    )
}

fn projector_closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    let mut bound_ok = true;
    for n in 1..=6i32 {
        let bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
        let expansion = projector_pauli_expansion(&bits).unwrap();
        let (full, diag) = naive_seminorms(&expansion);
        worst = worst.max((diag - (1.0 - 0.25f64.powi(n))).abs());
        worst = worst.max((expansion.seminorm2().powi(2) - diag).abs());
        bound_ok &= full <= 1.5f64.powi(n) && expansion.seminorm().powi(2) <= 1.5f64.powi(n);
    }
    outcome(
        worst <= 1e-12 && bound_ok,
        format!("N = 1..6: max |seminorm2^2 - (1 - 4^-N)| = {worst:.1e} <= 1e-12; seminorm^2 <= (3/2)^N: {bound_ok}"),
    )
}

fn hierarchy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut violations = 0;
    let mut naive_dev = 0.0f64;
    for k in 0..1000 {
        let n = rng.random_range(1..=6);
        let n_terms = rng.random_range(1..=25);
        let o = random_label_observable(&mut rng, n, n_terms, k % 2 == 0);
        let (s2, s, s1) = (o.seminorm2(), o.seminorm(), o.seminorm1());
        if !(s2 <= s && s <= s1) {
            violations += 1;
        }
        let (full, diag) = naive_seminorms(&o);
        naive_dev = naive_dev.max((full.sqrt() - s).abs()).max((diag.sqrt() - s2).abs());
    }
    outcome(
        violations == 0 && naive_dev <= 1e-9,
        format!("{violations} violations in 1000 observables; library vs naive enumeration within {naive_dev:.1e}"),
    )
}

fn readout_attenuation() -> Outcome {
    let (n, m, p) = (6, 100_000, 0.05);
    let report = noise_attenuation_study(n, m, p, 8).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for row in report.rows.iter().filter(|r| r.weight <= 4) {
        let r = row.weight as i32;
        let predicted = (1.0 - 2.0 * p).powi(r) * row.oracle;
        let tol = 3.0 * 3f64.powf(r as f64 / 2.0) / (m as f64).sqrt();
        let err = (row.estimate - predicted).abs();
        ok &= err <= tol;
        parts.push(format!("r={r}: |err| {err:.4} <= {tol:.4}"));
    }
    ok &= parts.len() == 4;
    outcome(ok, format!("N = 6, p = 0.05, M = 10^5: {}", parts.join(", ")))
}

fn haar_mixed_terms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let o = harness::random_observable(3, 20, Normalization::Seminorm, &mut rng).unwrap();
    let stats = haar_mixed_term_check(3, 10_000, &o, &mut rng).unwrap();
    let mut ok = stats.mean.abs() <= 4.0 * stats.stderr;
    let mut parts = vec![format!("N = 3 mean {:.2e} (4 stderr = {:.2e})", stats.mean, 4.0 * stats.stderr)];
    for n in 2..=4 {
        let bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
        let p = projector_pauli_expansion(&bits).unwrap();
        let s = haar_mixed_term_check(n, 10_000, &p, &mut rng).unwrap();
        let bound = 0.75f64.powi(n as i32);
        ok &= s.variance < bound + 4.0 * s.variance_stderr;
        parts.push(format!("N = {n} projector variance {:.4} < {bound:.4} + 4 * {:.4}", s.variance, s.variance_stderr));
    }
    outcome(ok, parts.join("; "))
}

fn snapshot_format() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut failures = 0;
    for k in 0..100u64 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=300);
        let probs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.5)).collect();
        let psi = Statevector::haar_random(n, &mut rng).unwrap();
        let state = acquire_snapshots(&psi, m, k, &NoiseModel::per_qubit(probs).unwrap()).unwrap();
        let bytes = format::serialize(&state);
        let header = 4 + 2 + 4 + 8 + 8 * n + 8;
        let sized = bytes.len() == header + 17 * m * n && state.cardinality() == 3 * m * n;
        let round = format::deserialize(&bytes).map(|s| s == state).unwrap_or(false);
        if !(sized && round) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("{failures} of 100 random states failed round-trip or size = header + 17 M N"))
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let long = args.iter().any(|a| a == "--ignored" || a == "--include-ignored")
        || std::env::var("AQSTATE_LONG").is_ok_and(|v| v == "1");
    // `cargo test -- --list` and name filters are ignored; this target always runs the full gate.
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }

    let mut criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 single-qubit tomography", tomography),
        ("2 variance bound", variance_bound),
        ("3 second-moment identity", second_moment),
        ("4 random Pauli sum coverage at N = 12", table_pauli_sums),
        ("5 basis projector coverage at N = 12", || table_projectors(12)),
        ("6 projector seminorm closed forms", projector_closed_forms),
        ("7 seminorm hierarchy", hierarchy),
        ("8 readout attenuation", readout_attenuation),
        ("9 Haar mixed-term statistics", haar_mixed_terms),
        ("10 snapshot format", snapshot_format),
    ];
    if long {
        criteria.push(("5 (long) basis projector coverage at N = 16", || table_projectors(16)));
    }

    let mut all = true;
    for (name, run) in criteria {
        let o = run();
        all &= o.passed;
        println!("{} criterion {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    if !long {
        println!("SKIP criterion 5 (long) basis projector coverage at N = 16: pass --include-ignored or set AQSTATE_LONG=1");
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
