//! Reproducible experiments: random observables and projectors, coverage
//! fractions against exact values, readout-noise studies, and ensemble
//! checks of the seminorm properties over Haar-random states.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{self, attenuation, running_estimates, EstimateResult, Target};
use crate::format;
use crate::pauli::{
    projector_factored, FactoredObservable, Normalization, Observable, PauliAxis, PauliString,
};
use crate::rng::{self, streams};
use crate::snapshot::{acquire_snapshots, NoiseModel};
use crate::statevector::{random_prep_circuit_with, Circuit, PairMode, Statevector, STATEVECTOR_CAP};
use crate::stats::SampleStats;

pub const REPORT_VERSION: u32 = 1;
pub const HAAR_CHECK_CAP: usize = 5;
pub const NOISE_STUDY_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    #[default]
    RandomPauliSum,
    BasisProjector,
}

fn default_n_observables() -> usize {
    20
}

fn default_terms() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_qubits: usize,
    pub shots: usize,
    pub seed: u64,
    #[serde(default = "default_n_observables")]
    pub n_observables: usize,
    #[serde(default = "default_terms")]
    pub terms_per_observable: usize,
    #[serde(default)]
    pub p_err: f64,
    #[serde(default)]
    pub observable_kind: ObservableKind,
    #[serde(default)]
    pub normalization: Normalization,
    #[serde(default)]
    pub pair_mode: PairMode,
}

impl ExperimentConfig {
    pub fn new(n_qubits: usize, shots: usize, seed: u64, observable_kind: ObservableKind) -> Self {
        Self {
            n_qubits,
            shots,
            seed,
            n_observables: default_n_observables(),
            terms_per_observable: default_terms(),
            p_err: 0.0,
            observable_kind,
            normalization: Normalization::Seminorm,
            pair_mode: PairMode::Disjoint,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::InvalidConfig(format!("n_qubits must be at least 2, got {}", self.n_qubits)));
        }
        if self.n_qubits > STATEVECTOR_CAP {
            return Err(Error::CapExceeded { what: "experiment", n: self.n_qubits, cap: STATEVECTOR_CAP });
        }
        if self.shots == 0 {
            return Err(Error::ZeroShots);
        }
        if self.n_observables == 0 || self.terms_per_observable == 0 {
            return Err(Error::InvalidConfig("observable counts must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.p_err) {
            return Err(Error::InvalidProbability(self.p_err));
        }
        Ok(())
    }
}

/// Random Pauli sum: each string has every qubit's axis uniform over
/// `{I, X, Y, Z}`, coefficients are uniform on `(0, 1]`, and the result is
/// rescaled per `normalization`. Draws that collapse to a multiple of the
/// identity are redrawn.
pub fn random_observable<R: Rng + ?Sized>(
    n_qubits: usize,
    n_terms: usize,
    normalization: Normalization,
    rng: &mut R,
) -> Result<Observable> {
    if n_terms == 0 {
        return Err(Error::InvalidConfig("random observable needs at least one term".into()));
    }
    loop {
        let terms = (0..n_terms)
            .map(|_| {
                let axes = (0..n_qubits).map(|q| (q, PauliAxis::ALL[rng.random_range(0..4)]));
                let p = PauliString::new(n_qubits, axes.collect::<Vec<_>>())?;
                // 1 - U[0, 1) lies in (0, 1].
                Ok((1.0 - rng.random::<f64>(), p))
            })
            .collect::<Result<Vec<_>>>()?;
        let o = Observable::new(n_qubits, terms)?;
        match o.normalized(normalization) {
            Ok(o) => return Ok(o),
            Err(Error::ZeroSeminorm) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Uniform computational basis string and its projector.
pub fn random_projector<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<(Vec<u8>, FactoredObservable)> {
    let bits: Vec<u8> = (0..n_qubits).map(|_| rng.random_range(0..2u8)).collect();
    let proj = projector_factored(&bits)?;
    Ok((bits, proj))
}

/// Roughly four prefix lengths per decade, ending at `shots`.
pub fn log_checkpoints(shots: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..)
        .map(|k| 10f64.powf(1.0 + k as f64 / 4.0).round() as usize)
        .take_while(|&m| m < shots)
        .collect();
    out.push(shots);
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub shots: usize,
    pub estimate: f64,
    pub std_bound: f64,
    pub std_approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableRow {
    pub index: usize,
    /// Pauli terms as `(coeff, label)` or the projector's bitstring.
    pub description: ObservableDescription,
    pub oracle: f64,
    pub estimate: f64,
    pub std_bound: f64,
    pub std_approx: f64,
    pub seminorm: f64,
    pub seminorm2: f64,
    /// Noise-attenuated expectation, when readout error is on and the observable is a Pauli sum.
    pub predicted_noisy: Option<f64>,
    pub within_1_std: bool,
    pub within_2_std: bool,
    pub within_1_std_approx: bool,
    pub within_2_std_approx: bool,
    pub curve: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableDescription {
    PauliSum(Vec<(f64, String)>),
    Projector(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    /// Fractions with `|estimate - oracle| <= k * std_bound`.
    pub fraction_within_1_std: f64,
    pub fraction_within_2_std: f64,
    /// Same with `std_approx`.
    pub fraction_within_1_std_approx: f64,
    pub fraction_within_2_std_approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub rng: &'static str,
    pub circuit_stream: u64,
    pub observable_stream: u64,
    pub snapshot_seed: u64,
    pub snapshot_format_version: u16,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conventions {
    pub outcome: &'static str,
    pub direction_sampling: &'static str,
    pub normalization: Normalization,
    pub layer_overlap: &'static str,
    pub pair_mode: PairMode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub report_version: u32,
    pub config: ExperimentConfig,
    pub provenance: Provenance,
    pub conventions: Conventions,
    pub circuit: Circuit,
    pub observables: Vec<ObservableRow>,
    pub summary: Summary,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per curve point: `observable,shots,estimate,oracle,std_bound,std_approx`.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("observable,shots,estimate,oracle,std_bound,std_approx\n");
        for row in &self.observables {
            for p in &row.curve {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.index, p.shots, p.estimate, row.oracle, p.std_bound, p.std_approx
                ));
            }
        }
        out
    }
}

enum Drawn {
    Pauli(Observable),
    Projector(Vec<u8>, FactoredObservable),
}

impl Drawn {
    fn target(&self) -> Target<'_> {
        match self {
            Drawn::Pauli(o) => Target::Pauli(o),
            Drawn::Projector(_, f) => Target::Factored(f),
        }
    }
}

fn within(err: f64, k: f64, scale: f64) -> bool {
    err <= k * scale
}

/// Prepares a random state, acquires one approximate state, and compares the
/// estimates of every drawn observable against exact values.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let n = cfg.n_qubits;
    let circuit = random_prep_circuit_with(n, cfg.pair_mode, &mut rng::stream(cfg.seed, streams::CIRCUIT))?;
    let psi = circuit.prepare()?;

    let mut obs_rng = rng::stream(cfg.seed, streams::OBSERVABLES);
    let drawn = (0..cfg.n_observables)
        .map(|_| match cfg.observable_kind {
            ObservableKind::RandomPauliSum => {
                random_observable(n, cfg.terms_per_observable, cfg.normalization, &mut obs_rng).map(Drawn::Pauli)
            }
            ObservableKind::BasisProjector => {
                random_projector(n, &mut obs_rng).map(|(bits, f)| Drawn::Projector(bits, f))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let snapshot_seed: u64 = rng::stream(cfg.seed, streams::SNAPSHOT_SEED).random();
    let noise = NoiseModel::uniform(n, cfg.p_err)?;
    let state = acquire_snapshots(&psi, cfg.shots, snapshot_seed, &noise)?;
    let checkpoints = log_checkpoints(cfg.shots);

    let rows = drawn
        .par_iter()
        .enumerate()
        .map(|(index, d)| evaluate_row(index, d, &psi, &state, &checkpoints, cfg.p_err))
        .collect::<Result<Vec<_>>>()?;

    let count = rows.len();
    let frac = |f: fn(&ObservableRow) -> bool| rows.iter().filter(|r| f(r)).count() as f64 / count as f64;
    let summary = Summary {
        count,
        fraction_within_1_std: frac(|r| r.within_1_std),
        fraction_within_2_std: frac(|r| r.within_2_std),
        fraction_within_1_std_approx: frac(|r| r.within_1_std_approx),
        fraction_within_2_std_approx: frac(|r| r.within_2_std_approx),
    };

    Ok(ExperimentReport {
        report_version: REPORT_VERSION,
        config: cfg.clone(),
        provenance: Provenance {
            seed: cfg.seed,
            rng: "ChaCha8, stream per purpose; snapshot j uses stream 2^63 + j of snapshot_seed",
            circuit_stream: streams::CIRCUIT,
            observable_stream: streams::OBSERVABLES,
            snapshot_seed,
            snapshot_format_version: format::VERSION,
        },
        conventions: Conventions {
            outcome: "computational bit 0 -> m = +1, bit 1 -> m = -1",
            direction_sampling: "phi ~ U[0, 2pi), cos(theta) ~ U[-1, 1]",
            normalization: match cfg.observable_kind {
                ObservableKind::RandomPauliSum => cfg.normalization,
                ObservableKind::BasisProjector => Normalization::None,
            },
            layer_overlap: "qubits may be reused between the single-qubit and XY layers; disjoint within a layer",
            pair_mode: cfg.pair_mode,
        },
        circuit,
        observables: rows,
        summary,
    })
}

fn evaluate_row(
    index: usize,
    drawn: &Drawn,
    psi: &Statevector,
    state: &crate::snapshot::ApproximateState,
    checkpoints: &[usize],
    p_err: f64,
) -> Result<ObservableRow> {
    let target = drawn.target();
    let (oracle, description, predicted_noisy) = match drawn {
        Drawn::Pauli(o) => {
            let exact: Vec<f64> = o.terms().iter().map(|t| psi.expectation_pauli(&t.pauli)).collect::<Result<_>>()?;
            let oracle = o.terms().iter().zip(&exact).map(|(t, e)| t.coeff * e).sum();
            let predicted = if p_err > 0.0 { Some(estimator::predict_attenuated(o, &exact, p_err)?) } else { None };
            let desc = ObservableDescription::PauliSum(o.terms().iter().map(|t| (t.coeff, t.pauli.label())).collect());
            (oracle, desc, predicted)
        }
        Drawn::Projector(bits, _) => {
            let label: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
            (psi.basis_probability(bits)?, ObservableDescription::Projector(label), None)
        }
    };
    let curve: Vec<EstimateResult> = running_estimates(state, target, checkpoints)?;
    let last = *curve.last().expect("checkpoints end at the full shot count");
    let (seminorm, seminorm2) = target.seminorms();
    let err = (last.value - oracle).abs();
    Ok(ObservableRow {
        index,
        description,
        oracle,
        estimate: last.value,
        std_bound: last.std_bound,
        std_approx: last.std_approx,
        seminorm,
        seminorm2,
        predicted_noisy,
        within_1_std: within(err, 1.0, last.std_bound),
        within_2_std: within(err, 2.0, last.std_bound),
        within_1_std_approx: within(err, 1.0, last.std_approx),
        within_2_std_approx: within(err, 2.0, last.std_approx),
        curve: curve
            .iter()
            .map(|e| CurvePoint { shots: e.shots, estimate: e.value, std_bound: e.std_bound, std_approx: e.std_approx })
            .collect(),
    })
}

/// Product of two compatible strings (a Pauli string, phase +1), or `None`
/// when some qubit carries two different axes.
pub fn compatible_product(a: &PauliString, b: &PauliString) -> Result<Option<PauliString>> {
    if !a.pair_compat(b)?.compatible {
        return Ok(None);
    }
    let mut support: Vec<(usize, PauliAxis)> = Vec::with_capacity(a.weight() + b.weight());
    for &(q, axis) in a.support() {
        if b.axis(q) == PauliAxis::I {
            support.push((q, axis));
        }
    }
    for &(q, axis) in b.support() {
        if a.axis(q) == PauliAxis::I {
            support.push((q, axis));
        }
    }
    PauliString::new(a.n_qubits(), support).map(Some)
}

/// `sum_{i != j, both non-identity} 3^{r_ij} Δ_ij a_i a_j P_i P_j` as an observable,
/// so that its expectation in a state is the mixed part of the variance bound.
pub fn mixed_term_observable(o: &Observable) -> Result<Observable> {
    let terms: Vec<_> = o.terms().iter().filter(|t| !t.pauli.is_identity()).collect();
    let mut out = Vec::new();
    for (i, ti) in terms.iter().enumerate() {
        for (j, tj) in terms.iter().enumerate() {
            if i == j {
                continue;
            }
            let compat = ti.pauli.pair_compat(&tj.pauli)?;
            if let Some(product) = compatible_product(&ti.pauli, &tj.pauli)? {
                out.push((3f64.powi(compat.overlap as i32) * ti.coeff * tj.coeff, product));
            }
        }
    }
    Observable::new(o.n_qubits(), out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedTermStats {
    pub samples: usize,
    pub mean: f64,
    pub stderr: f64,
    pub variance: f64,
    /// Standard error of `variance`, from the spread of squared deviations.
    pub variance_stderr: f64,
}

/// Samples the mixed variance terms of `o` over Haar-random pure states.
pub fn haar_mixed_term_check<R: Rng + ?Sized>(
    n_qubits: usize,
    samples: usize,
    o: &Observable,
    rng: &mut R,
) -> Result<MixedTermStats> {
    if n_qubits > HAAR_CHECK_CAP {
        return Err(Error::CapExceeded { what: "Haar mixed-term check", n: n_qubits, cap: HAAR_CHECK_CAP });
    }
    if o.n_qubits() != n_qubits {
        return Err(Error::QubitCountMismatch { expected: n_qubits, found: o.n_qubits() });
    }
    if samples < 2 {
        return Err(Error::InvalidConfig("need at least two Haar samples".into()));
    }
    let mixed = mixed_term_observable(o)?;
    let values = (0..samples)
        .map(|_| Statevector::haar_random(n_qubits, rng).and_then(|psi| psi.expectation(&mixed)))
        .collect::<Result<Vec<f64>>>()?;
    let stats = SampleStats::from_slice(&values);
    let sq: Vec<f64> = values.iter().map(|v| (v - stats.mean).powi(2)).collect();
    Ok(MixedTermStats {
        samples,
        mean: stats.mean,
        stderr: stats.std_err(),
        variance: stats.variance,
        variance_stderr: SampleStats::from_slice(&sq).std_err(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttenuationRow {
    pub weight: usize,
    pub pauli: String,
    pub oracle: f64,
    pub expected_attenuation: f64,
    pub predicted: f64,
    pub estimate: f64,
    pub std_bound: f64,
    /// `estimate / oracle`, absent when the exact value vanishes.
    pub ratio: Option<f64>,
    pub within_3_std: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttenuationReport {
    pub n_qubits: usize,
    pub shots: usize,
    pub p_err: f64,
    pub seed: u64,
    pub circuit: Circuit,
    pub rows: Vec<AttenuationRow>,
}

/// Estimates one monomial of every weight `1..=N` under uniform readout error
/// and compares it with `(1 - 2p)^r` times the exact value.
///
/// The weight-`r` monomial uses the `r` qubits with the largest single-qubit
/// polarization, each along its most polarized axis.
pub fn noise_attenuation_study(n_qubits: usize, shots: usize, p_err: f64, seed: u64) -> Result<AttenuationReport> {
    if n_qubits > NOISE_STUDY_CAP {
        return Err(Error::CapExceeded { what: "noise attenuation study", n: n_qubits, cap: NOISE_STUDY_CAP });
    }
    if !(0.0..1.0).contains(&p_err) {
        return Err(Error::InvalidProbability(p_err));
    }
    let circuit = random_prep_circuit_with(n_qubits, PairMode::Disjoint, &mut rng::stream(seed, streams::CIRCUIT))?;
    let psi = circuit.prepare()?;

    let mut polarized = (0..n_qubits)
        .map(|q| {
            let mut best = (PauliAxis::Z, f64::NEG_INFINITY);
            for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
                let v = psi.expectation_pauli(&PauliString::new(n_qubits, [(q, axis)])?)?.abs();
                if v > best.1 {
                    best = (axis, v);
                }
            }
            Ok((q, best.0, best.1))
        })
        .collect::<Result<Vec<_>>>()?;
    polarized.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));

    let snapshot_seed: u64 = rng::stream(seed, streams::SNAPSHOT_SEED).random();
    let state = acquire_snapshots(&psi, shots, snapshot_seed, &NoiseModel::uniform(n_qubits, p_err)?)?;

    let rows = (1..=n_qubits)
        .map(|r| {
            let p = PauliString::new(n_qubits, polarized[..r].iter().map(|&(q, a, _)| (q, a)))?;
            let oracle = psi.expectation_pauli(&p)?;
            let est = estimator::estimate_pauli_string(&state, &p)?;
            let factor = attenuation(r, p_err);
            let predicted = factor * oracle;
            Ok(AttenuationRow {
                weight: r,
                pauli: p.label(),
                oracle,
                expected_attenuation: factor,
                predicted,
                estimate: est.value,
                std_bound: est.std_bound,
                ratio: (oracle.abs() > 1e-9).then(|| est.value / oracle),
                within_3_std: (est.value - predicted).abs() <= 3.0 * est.std_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AttenuationReport { n_qubits, shots, p_err, seed, circuit, rows })
}

pub mod verify {
    //! Property suites behind the `verify` command.

    use super::*;
    use crate::estimator::{r1_pauli, reconstruct_density};
    use crate::pauli::projector_pauli_expansion;
    use crate::snapshot::acquire_snapshots;
    use num_complex::Complex64;

    #[derive(Debug, Clone, PartialEq, Serialize)]
    pub struct Check {
        pub name: &'static str,
        pub passed: bool,
        pub detail: String,
    }

    impl Check {
        fn new(name: &'static str, passed: bool, detail: String) -> Self {
            Self { name, passed, detail }
        }
    }

    /// Sample sizes for the suites.
    #[derive(Debug, Clone, Copy)]
    pub struct Scale {
        pub second_moment_shots: usize,
        pub tomography_shots: usize,
        pub hierarchy_observables: usize,
        pub haar_samples: usize,
    }

    impl Scale {
        pub const QUICK: Scale =
            Scale { second_moment_shots: 100_000, tomography_shots: 20_000, hierarchy_observables: 300, haar_samples: 2_000 };
        pub const FULL: Scale = Scale {
            second_moment_shots: 1_000_000,
            tomography_shots: 100_000,
            hierarchy_observables: 1000,
            haar_samples: 10_000,
        };
    }

    /// Largest `|mean(R1[a] R1[b]) - 3 δ_ab|` over axis pairs, per qubit of a random 2-qubit state.
    pub fn second_moment_deviation(shots: usize, seed: u64) -> Result<f64> {
        let psi = Statevector::haar_random(2, &mut rng::stream(seed, 0))?;
        let state = acquire_snapshots(&psi, shots, seed, &NoiseModel::noiseless(2))?;
        let axes = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
        let mut worst = 0.0f64;
        for q in 0..2 {
            for &a in &axes {
                for &b in &axes {
                    let mean = state
                        .snapshots()
                        .map(|s| {
                            let (m, d) = (s[q].outcome(), s[q].direction());
                            r1_pauli(a, m, &d) * r1_pauli(b, m, &d)
                        })
                        .sum::<f64>()
                        / shots as f64;
                    let target = if a == b { 3.0 } else { 0.0 };
                    worst = worst.max((mean - target).abs());
                }
            }
        }
        Ok(worst)
    }

    /// Largest entrywise `|rho_M - |psi><psi||` for one random state.
    pub fn tomography_deviation(n_qubits: usize, shots: usize, seed: u64) -> Result<f64> {
        let psi = Statevector::haar_random(n_qubits, &mut rng::stream(seed, 0))?;
        let state = acquire_snapshots(&psi, shots, seed, &NoiseModel::noiseless(n_qubits))?;
        let rho = reconstruct_density(&state)?;
        let a = psi.amplitudes();
        let mut worst = 0.0f64;
        for r in 0..rho.dim() {
            for c in 0..rho.dim() {
                let exact: Complex64 = a[r] * a[c].conj();
                worst = worst.max((rho.get(r, c) - exact).norm());
            }
        }
        Ok(worst)
    }

    fn random_signed_observable<R: Rng + ?Sized>(rng: &mut R, max_qubits: usize) -> Result<Observable> {
        let n = rng.random_range(1..=max_qubits);
        let n_terms = rng.random_range(1..=20);
        let terms = (0..n_terms)
            .map(|_| {
                let p = PauliString::new(n, (0..n).map(|q| (q, PauliAxis::ALL[rng.random_range(0..4)])).collect::<Vec<_>>())?;
                Ok((rng.random::<f64>() * 2.0 - 1.0, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Observable::new(n, terms)
    }

    /// Number of random observables violating `||O||_2 <= ||O|| <= ||O||_1`.
    pub fn hierarchy_violations(count: usize, seed: u64) -> Result<usize> {
        let mut rng = rng::stream(seed, 0);
        let mut bad = 0;
        for _ in 0..count {
            let o = random_signed_observable(&mut rng, 6)?;
            let (s2, s, s1) = (o.seminorm2(), o.seminorm(), o.seminorm1());
            if !(s2 <= s && s <= s1) {
                bad += 1;
            }
        }
        Ok(bad)
    }

    /// Largest deviation of `||O ⊗ 1^L||` from `||O||` across the three seminorms.
    pub fn extension_deviation(count: usize, seed: u64) -> Result<f64> {
        let mut rng = rng::stream(seed, 1);
        let mut worst = 0.0f64;
        for _ in 0..count {
            let o = random_signed_observable(&mut rng, 4)?;
            let ext = o.extended(rng.random_range(1..5));
            worst = worst
                .max((ext.seminorm() - o.seminorm()).abs())
                .max((ext.seminorm2() - o.seminorm2()).abs())
                .max((ext.seminorm1() - o.seminorm1()).abs());
        }
        Ok(worst)
    }

    pub fn run(seed: u64, scale: Scale) -> Result<Vec<Check>> {
        let mut checks = Vec::new();

        let dev = second_moment_deviation(scale.second_moment_shots, seed)?;
        let tol = 0.02 * (1e6 / scale.second_moment_shots as f64).sqrt();
        checks.push(Check::new(
            "second moments of single-qubit estimators equal 3 delta",
            dev <= tol,
            format!("max deviation {dev:.4} (tolerance {tol:.4}, {} snapshots)", scale.second_moment_shots),
        ));

        for n in 1..=2usize {
            let m = scale.tomography_shots;
            let tol = 5.0 * 3f64.powi(n as i32) / (m as f64).sqrt();
            let dev = (0..10u64).map(|k| tomography_deviation(n, m, seed ^ (k + 100))).collect::<Result<Vec<_>>>()?;
            let worst = dev.iter().copied().fold(0.0, f64::max);
            checks.push(Check::new(
                "kernel average reconstructs the density matrix",
                worst <= tol,
                format!("N = {n}: max entry error {worst:.4} over 10 states (tolerance {tol:.4})"),
            ));
        }

        let bad = hierarchy_violations(scale.hierarchy_observables, seed)?;
        checks.push(Check::new(
            "seminorm hierarchy ||O||_2 <= ||O|| <= ||O||_1",
            bad == 0,
            format!("{bad} violations in {} observables", scale.hierarchy_observables),
        ));

        let dev = extension_deviation(200, seed)?;
        checks.push(Check::new("seminorms invariant under identity extension", dev <= 1e-12, format!("max deviation {dev:.2e}")));

        for n in 1..=6usize {
            let bits: Vec<u8> = (0..n).map(|k| ((seed >> k) & 1) as u8).collect();
            let e = projector_pauli_expansion(&bits)?;
            let s2 = e.seminorm2().powi(2);
            let s = e.seminorm().powi(2);
            let closed = 1.0 - 0.25f64.powi(n as i32);
            checks.push(Check::new(
                "projector seminorm closed forms",
                (s2 - closed).abs() <= 1e-12 && s <= 1.5f64.powi(n as i32),
                format!("N = {n}: ||P||_2^2 = {s2:.12} vs {closed:.12}; ||P||^2 = {s:.6} <= {:.6}", 1.5f64.powi(n as i32)),
            ));
        }

        let mut r = rng::stream(seed, 2);
        let o = random_observable(3, 20, Normalization::Seminorm, &mut r)?;
        let stats = haar_mixed_term_check(3, scale.haar_samples, &o, &mut r)?;
        checks.push(Check::new(
            "mixed variance terms average to zero over Haar states",
            stats.mean.abs() <= 4.0 * stats.stderr,
            format!("N = 3: mean {:.3e} +- {:.3e}", stats.mean, stats.stderr),
        ));

        for n in 2..=4usize {
            let (bits, _) = random_projector(n, &mut r)?;
            let o = projector_pauli_expansion(&bits)?;
            let stats = haar_mixed_term_check(n, scale.haar_samples, &o, &mut r)?;
            let bound = 0.75f64.powi(n as i32);
            checks.push(Check::new(
                "projector mixed-term variance below (3/4)^N",
                stats.variance < bound + 4.0 * stats.variance_stderr,
                format!("N = {n}: variance {:.4} +- {:.4} vs {bound:.4}", stats.variance, stats.variance_stderr),
            ));
        }
        Ok(checks)
    }
}
