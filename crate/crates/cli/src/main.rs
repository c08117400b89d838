use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use aqstate::harness::{self, verify, ExperimentConfig};
use aqstate::pauli::shot_budget;
use aqstate::statevector::{random_prep_circuit_with, PairMode};
use aqstate::{format, rng, ApproximateState, Circuit, FactoredObservable, NoiseModel, Observable};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "aqstate", version, about = "Approximate quantum states from random single-qubit measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PairArg {
    Disjoint,
    Overlapping,
}

impl From<PairArg> for PairMode {
    fn from(p: PairArg) -> Self {
        match p {
            PairArg::Disjoint => PairMode::Disjoint,
            PairArg::Overlapping => PairMode::Overlapping,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit a random preparation circuit as JSON.
    Prepare {
        #[arg(long)]
        qubits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "disjoint")]
        pair_mode: PairArg,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prepare a circuit's state and record randomized snapshots.
    Snapshot {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Flip probability, or a JSON file holding one probability per qubit.
        #[arg(long)]
        readout_error: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Write the JSON export instead of the binary format.
        #[arg(long)]
        json: bool,
    },
    /// Estimate an observable from stored snapshots.
    Estimate {
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long)]
        observable: PathBuf,
        /// Read the observable as a sum of single-qubit operator products.
        #[arg(long)]
        factored: bool,
    },
    /// Print the three seminorms of an observable and an optional shot budget.
    Seminorm {
        #[arg(long)]
        observable: PathBuf,
        #[arg(long)]
        factored: bool,
        /// Target standard deviation for the shot budget.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run an experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the convergence curves as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Readout-error attenuation of Pauli monomials of every weight.
    Noise {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        shots: usize,
        #[arg(long)]
        p_err: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the statistical property suites.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the larger sample sizes.
        #[arg(long)]
        full: bool,
    },
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_snapshots(path: &Path) -> Result<ApproximateState> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let state = if bytes.starts_with(&format::MAGIC) {
        format::deserialize(&bytes)?
    } else {
        let text = String::from_utf8(bytes).context("snapshot file is neither binary nor JSON")?;
        format::from_json(&text)?
    };
    Ok(state)
}

fn noise_model(spec: Option<&str>, n_qubits: usize) -> Result<NoiseModel> {
    let Some(spec) = spec else {
        return Ok(NoiseModel::noiseless(n_qubits));
    };
    if let Ok(p) = spec.parse::<f64>() {
        return Ok(NoiseModel::uniform(n_qubits, p)?);
    }
    let probs: Vec<f64> = serde_json::from_str(&read_text(Path::new(spec))?)
        .with_context(|| format!("{spec} must hold a JSON array of probabilities"))?;
    if probs.len() != n_qubits {
        bail!("readout error file has {} entries for {} qubits", probs.len(), n_qubits);
    }
    Ok(NoiseModel::per_qubit(probs)?)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Prepare { qubits, seed, pair_mode, out } => {
            let circuit = random_prep_circuit_with(qubits, pair_mode.into(), &mut rng::stream(seed, rng::streams::CIRCUIT))?;
            write_text(out.as_deref(), &circuit.to_json())?;
        }
        Command::Snapshot { circuit, shots, seed, readout_error, out, json } => {
            let circuit = Circuit::from_json(&read_text(&circuit)?)?;
            let noise = noise_model(readout_error.as_deref(), circuit.n_qubits())?;
            let state = aqstate::build_approximate_state(&circuit, shots, seed, &noise)?;
            if json {
                fs::write(&out, format::to_json(&state))
            } else {
                fs::write(&out, format::serialize(&state))
            }
            .with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Estimate { snapshots, observable, factored } => {
            let state = load_snapshots(&snapshots)?;
            let text = read_text(&observable)?;
            let result = if factored {
                aqstate::estimate_factored(&state, &FactoredObservable::from_json(&text)?)?
            } else {
                aqstate::estimate_observable(&state, &Observable::from_json(&text)?)?
            };
            println!("{}", serde_json::to_string(&result)?);
        }
        Command::Seminorm { observable, factored, epsilon } => {
            let text = read_text(&observable)?;
            let (s, s2, s1) = if factored {
                let o = FactoredObservable::from_json(&text)?;
                (o.seminorm(), o.seminorm2(), o.seminorm1())
            } else {
                let o = Observable::from_json(&text)?;
                (o.seminorm(), o.seminorm2(), o.seminorm1())
            };
            let mut doc = json!({ "seminorm": s, "seminorm2": s2, "seminorm1": s1 });
            if let Some(eps) = epsilon {
                doc["epsilon"] = json!(eps);
                doc["shots"] = json!(shot_budget(s, eps)?);
            }
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Command::Experiment { config, out, csv } => {
            let cfg: ExperimentConfig = serde_json::from_str(&read_text(&config)?).context("parsing experiment config")?;
            let report = harness::run_experiment(&cfg)?;
            fs::write(&out, report.to_json()).with_context(|| format!("writing {}", out.display()))?;
            if let Some(csv) = csv {
                fs::write(&csv, report.curves_csv()).with_context(|| format!("writing {}", csv.display()))?;
            }
            let s = &report.summary;
            println!(
                "{} observables: within 1 std {:.2}, within 2 std {:.2} (approx band: {:.2}, {:.2})",
                s.count, s.fraction_within_1_std, s.fraction_within_2_std, s.fraction_within_1_std_approx, s.fraction_within_2_std_approx
            );
        }
        Command::Noise { qubits, shots, p_err, seed } => {
            let report = harness::noise_attenuation_study(qubits, shots, p_err, seed)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Verify { seed, full } => {
            let scale = if full { verify::Scale::FULL } else { verify::Scale::QUICK };
            let checks = verify::run(seed, scale)?;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
