//! Expectation-value estimates from an [`ApproximateState`].
//!
//! Every estimate is a snapshot average of a product of single-qubit
//! estimators: `1` for the identity and `3 m n_a` for axis `a`. Sums are
//! reduced over fixed-size chunks of snapshots, so values do not depend on
//! the number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{sqrt3_pow, std_bound_from, FactoredObservable, Observable, PauliAxis, PauliString, SingleQubitOperator};
use crate::snapshot::{kernel_matrix, ApproximateState, Direction, NoiseModel, QubitSnapshot};
use crate::stats::KahanSum;

const CHUNK: usize = 1024;

/// Largest register [`reconstruct_density`] accepts.
pub const DENSITY_CAP: usize = 3;

/// An estimate with its two standard-deviation scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub value: f64,
    /// `||O|| / sqrt(M)`, a rigorous bound.
    pub std_bound: f64,
    /// `||O||_2 / sqrt(M)`, the typical error scale.
    pub std_approx: f64,
    #[serde(rename = "M")]
    pub shots: usize,
    #[serde(rename = "N")]
    pub n_qubits: usize,
}

/// Single-qubit estimator of a Pauli operator: `1` for I, `3 m n_a` otherwise.
pub fn r1_pauli(axis: PauliAxis, outcome: i8, d: &Direction) -> f64 {
    match axis {
        PauliAxis::I => 1.0,
        a => 3.0 * f64::from(outcome) * d.unit_vector()[a.index() - 1],
    }
}

/// `a0 + 3 m (a_x n_x + a_y n_y + a_z n_z)`.
pub fn r1_operator(op: &SingleQubitOperator, outcome: i8, d: &Direction) -> f64 {
    let [a0, ax, ay, az] = op.coeffs;
    let [nx, ny, nz] = d.unit_vector();
    a0 + 3.0 * f64::from(outcome) * (ax * nx + ay * ny + az * nz)
}

/// A per-snapshot random variable whose mean is the target expectation value.
trait SnapshotFunction: Sync {
    fn eval(&self, snapshot: &[QubitSnapshot], scratch: &mut Vec<[f64; 3]>) -> f64;
}

fn fill_axes(snapshot: &[QubitSnapshot], scratch: &mut Vec<[f64; 3]>) {
    scratch.clear();
    scratch.extend(snapshot.iter().map(QubitSnapshot::scaled_axes));
}

/// Non-identity terms as `(coeff, [(qubit, axis - 1)])`.
struct PreparedSum {
    terms: Vec<(f64, Vec<(usize, usize)>)>,
}

impl PreparedSum {
    fn new(o: &Observable) -> Self {
        let terms = o
            .terms()
            .iter()
            .filter(|t| !t.pauli.is_identity())
            .map(|t| (t.coeff, t.pauli.support().iter().map(|&(q, a)| (q, a.index() - 1)).collect()))
            .collect();
        Self { terms }
    }
}

impl SnapshotFunction for PreparedSum {
    fn eval(&self, snapshot: &[QubitSnapshot], scratch: &mut Vec<[f64; 3]>) -> f64 {
        fill_axes(snapshot, scratch);
        self.terms
            .iter()
            .map(|(c, sup)| c * sup.iter().map(|&(q, a)| scratch[q][a]).product::<f64>())
            .sum()
    }
}

struct PreparedFactored<'a> {
    obs: &'a FactoredObservable,
}

impl SnapshotFunction for PreparedFactored<'_> {
    fn eval(&self, snapshot: &[QubitSnapshot], scratch: &mut Vec<[f64; 3]>) -> f64 {
        fill_axes(snapshot, scratch);
        self.obs
            .terms()
            .iter()
            .map(|t| {
                let prod: f64 = t
                    .factors
                    .iter()
                    .zip(scratch.iter())
                    .map(|(f, v)| {
                        let [a0, ax, ay, az] = f.coeffs;
                        a0 + ax * v[0] + ay * v[1] + az * v[2]
                    })
                    .product();
                t.coeff * prod
            })
            .sum()
    }
}

/// Kahan sum of `f` over the first `shots` snapshots, in fixed-size chunks.
fn sum_over<F: SnapshotFunction>(state: &ApproximateState, shots: usize, f: &F) -> f64 {
    let records = &state.records()[..shots * state.n_qubits()];
    let chunk_len = CHUNK * state.n_qubits();
    let partials: Vec<KahanSum> = records
        .par_chunks(chunk_len)
        .map(|chunk| {
            let mut scratch = Vec::with_capacity(state.n_qubits());
            chunk.chunks_exact(state.n_qubits()).map(|s| f.eval(s, &mut scratch)).collect()
        })
        .collect();
    let mut total = KahanSum::new();
    for p in &partials {
        total.merge(p);
    }
    total.total()
}

fn check_n(state: &ApproximateState, n: usize) -> Result<()> {
    if state.n_qubits() != n {
        return Err(Error::QubitCountMismatch { expected: state.n_qubits(), found: n });
    }
    Ok(())
}

fn check_prefix(state: &ApproximateState, shots: usize) -> Result<()> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    if shots > state.shots() {
        return Err(Error::LengthMismatch { expected: state.shots(), found: shots });
    }
    Ok(())
}

fn result(value: f64, seminorm: f64, seminorm2: f64, shots: usize, n_qubits: usize) -> Result<EstimateResult> {
    Ok(EstimateResult {
        value,
        std_bound: std_bound_from(seminorm, shots)?,
        std_approx: std_bound_from(seminorm2, shots)?,
        shots,
        n_qubits,
    })
}

/// Estimate of a single Pauli monomial.
pub fn estimate_pauli_string(state: &ApproximateState, pauli: &PauliString) -> Result<EstimateResult> {
    check_n(state, pauli.n_qubits())?;
    let shots = state.shots();
    let scale = if pauli.is_identity() { 0.0 } else { sqrt3_pow(pauli.weight()) };
    let value = if pauli.is_identity() {
        1.0
    } else {
        let prepared = PreparedSum { terms: vec![(1.0, pauli.support().iter().map(|&(q, a)| (q, a.index() - 1)).collect())] };
        sum_over(state, shots, &prepared) / shots as f64
    };
    result(value, scale, scale, shots, state.n_qubits())
}

/// Estimate of a Pauli-sum observable in one pass over the snapshots.
pub fn estimate_observable(state: &ApproximateState, observable: &Observable) -> Result<EstimateResult> {
    estimate_observable_prefix(state, observable, state.shots())
}

/// [`estimate_observable`] restricted to the first `shots` snapshots.
pub fn estimate_observable_prefix(state: &ApproximateState, observable: &Observable, shots: usize) -> Result<EstimateResult> {
    check_n(state, observable.n_qubits())?;
    check_prefix(state, shots)?;
    let offset = identity_coeff(observable);
    let prepared = PreparedSum::new(observable);
    let value = offset + sum_over(state, shots, &prepared) / shots as f64;
    result(value, observable.seminorm(), observable.seminorm2(), shots, state.n_qubits())
}

fn identity_coeff(o: &Observable) -> f64 {
    o.terms().iter().filter(|t| t.pauli.is_identity()).map(|t| t.coeff).sum()
}

/// Estimate of a tensor-factored observable without expanding it.
pub fn estimate_factored(state: &ApproximateState, observable: &FactoredObservable) -> Result<EstimateResult> {
    estimate_factored_prefix(state, observable, state.shots())
}

pub fn estimate_factored_prefix(state: &ApproximateState, observable: &FactoredObservable, shots: usize) -> Result<EstimateResult> {
    check_n(state, observable.n_qubits())?;
    check_prefix(state, shots)?;
    let value = sum_over(state, shots, &PreparedFactored { obs: observable }) / shots as f64;
    result(value, observable.seminorm(), observable.seminorm2(), shots, state.n_qubits())
}

/// Observable accepted by [`running_estimates`].
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Pauli(&'a Observable),
    Factored(&'a FactoredObservable),
}

impl Target<'_> {
    pub fn n_qubits(&self) -> usize {
        match self {
            Target::Pauli(o) => o.n_qubits(),
            Target::Factored(f) => f.n_qubits(),
        }
    }

    pub fn seminorms(&self) -> (f64, f64) {
        match self {
            Target::Pauli(o) => (o.seminorm(), o.seminorm2()),
            Target::Factored(f) => (f.seminorm(), f.seminorm2()),
        }
    }

    pub fn estimate(&self, state: &ApproximateState) -> Result<EstimateResult> {
        match self {
            Target::Pauli(o) => estimate_observable(state, o),
            Target::Factored(f) => estimate_factored(state, f),
        }
    }
}

/// Estimates at each prefix length in `checkpoints` (ascending), from a single
/// streaming pass.
pub fn running_estimates(state: &ApproximateState, target: Target<'_>, checkpoints: &[usize]) -> Result<Vec<EstimateResult>> {
    check_n(state, target.n_qubits())?;
    if let Some(&last) = checkpoints.last() {
        check_prefix(state, last)?;
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) || checkpoints.first() == Some(&0) {
        return Err(Error::InvalidConfig("checkpoints must be strictly increasing and positive".into()));
    }
    let (norm, norm2) = target.seminorms();
    let (offset, f): (f64, Box<dyn SnapshotFunction + '_>) = match target {
        Target::Pauli(o) => (identity_coeff(o), Box::new(PreparedSum::new(o))),
        Target::Factored(obs) => (0.0, Box::new(PreparedFactored { obs })),
    };
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut scratch = Vec::with_capacity(state.n_qubits());
    let mut chunk_sum = KahanSum::new();
    let mut total = KahanSum::new();
    let mut next = checkpoints.iter().peekable();
    for (j, snapshot) in state.snapshots().enumerate() {
        let Some(&&target_shots) = next.peek() else { break };
        chunk_sum.add(f.eval(snapshot, &mut scratch));
        let seen = j + 1;
        // Mirror the chunking of the batch reduction.
        if seen % CHUNK == 0 {
            total.merge(&chunk_sum);
            chunk_sum = KahanSum::new();
        }
        if seen == target_shots {
            let mut partial = total;
            partial.merge(&chunk_sum);
            out.push(result(offset + partial.total() / seen as f64, norm, norm2, seen, state.n_qubits())?);
            next.next();
        }
    }
    Ok(out)
}

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `Tr[rho P]`.
    pub fn expectation_pauli(&self, pauli: &PauliString) -> Complex64 {
        // P[c][r] is nonzero only for c = r ^ flip.
        let mut total = Complex64::new(0.0, 0.0);
        for r in 0..self.dim {
            let mut c = r;
            let mut entry = Complex64::new(1.0, 0.0);
            for &(q, axis) in pauli.support() {
                let bit = (r >> q) & 1;
                match axis {
                    PauliAxis::X => c ^= 1 << q,
                    PauliAxis::Y => {
                        c ^= 1 << q;
                        // <1-b| Y |b>: Y|0> = i|1>, Y|1> = -i|0>
                        entry *= if bit == 0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, -1.0) };
                    }
                    PauliAxis::Z => {
                        if bit == 1 {
                            entry = -entry;
                        }
                    }
                    PauliAxis::I => {}
                }
            }
            total += self.get(r, c) * entry;
        }
        total
    }

    pub fn expectation(&self, observable: &Observable) -> Complex64 {
        observable.terms().iter().map(|t| self.expectation_pauli(&t.pauli) * t.coeff).sum()
    }
}

/// `(1/M) sum_j ⊗_k K(m_kj, n_kj)` for registers of at most [`DENSITY_CAP`] qubits.
pub fn reconstruct_density(state: &ApproximateState) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    if n > DENSITY_CAP {
        return Err(Error::CapExceeded { what: "density reconstruction", n, cap: DENSITY_CAP });
    }
    let dim = 1usize << n;
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut kernels = Vec::with_capacity(n);
    for snapshot in state.snapshots() {
        kernels.clear();
        kernels.extend(snapshot.iter().map(|q| kernel_matrix(q.outcome(), &q.direction())));
        for r in 0..dim {
            for c in 0..dim {
                let mut v = Complex64::new(1.0, 0.0);
                for (k, kern) in kernels.iter().enumerate() {
                    v *= kern[(r >> k) & 1][(c >> k) & 1];
                }
                data[r * dim + c] += v;
            }
        }
    }
    let inv = 1.0 / state.shots() as f64;
    data.iter_mut().for_each(|v| *v *= inv);
    Ok(DensityMatrix { dim, data })
}

/// Probability of an odd number of flips among `r` qubits with flip rate `p`.
pub fn p_odd(r: usize, p_err: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p_err) {
        return Err(Error::InvalidProbability(p_err));
    }
    Ok(0.5 * (1.0 - attenuation(r, p_err)))
}

/// `(1 - 2p)^r`.
pub fn attenuation(r: usize, p_err: f64) -> f64 {
    (1.0 - 2.0 * p_err).powi(r as i32)
}

/// `sum_i a_i (1 - 2p)^{r_i} <P_i>` given noiseless term expectations aligned with `O.terms()`.
pub fn predict_attenuated(observable: &Observable, exact_terms: &[f64], p_err: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p_err) {
        return Err(Error::InvalidProbability(p_err));
    }
    let noise = NoiseModel::uniform(observable.n_qubits(), p_err)?;
    predict_attenuated_per_qubit(observable, exact_terms, &noise)
}

/// Per-qubit version: each term is damped by `prod_{k in supp} (1 - 2 p_k)`.
pub fn predict_attenuated_per_qubit(observable: &Observable, exact_terms: &[f64], noise: &NoiseModel) -> Result<f64> {
    if exact_terms.len() != observable.len() {
        return Err(Error::LengthMismatch { expected: observable.len(), found: exact_terms.len() });
    }
    if noise.n_qubits() != observable.n_qubits() {
        return Err(Error::QubitCountMismatch { expected: observable.n_qubits(), found: noise.n_qubits() });
    }
    let p = noise.probabilities();
    Ok(observable
        .terms()
        .iter()
        .zip(exact_terms)
        .map(|(t, &e)| t.coeff * t.pauli.support().iter().map(|&(q, _)| 1.0 - 2.0 * p[q]).product::<f64>() * e)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{projector_factored, projector_pauli_expansion};
    use crate::rng;
    use crate::snapshot::{acquire_snapshots, sample_direction};
    use crate::statevector::Statevector;
    use rand::Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn haar_snapshots(n: usize, shots: usize, seed: u64) -> (Statevector, ApproximateState) {
        let psi = Statevector::haar_random(n, &mut rng::stream(seed, 0)).unwrap();
        let s = acquire_snapshots(&psi, shots, seed, &NoiseModel::noiseless(n)).unwrap();
        (psi, s)
    }

    #[test]
    fn r1_examples() {
        assert_eq!(r1_pauli(PauliAxis::X, 1, &Direction::X), 3.0);
        assert_eq!(r1_pauli(PauliAxis::Z, -1, &Direction::Z), -3.0);
        assert_eq!(r1_pauli(PauliAxis::I, -1, &Direction::Y), 1.0);
        let proj0 = SingleQubitOperator::new(0.5, 0.0, 0.0, 0.5);
        assert_eq!(r1_operator(&proj0, 1, &Direction::Z), 2.0);
        assert_eq!(r1_operator(&proj0, -1, &Direction::Z), -1.0);
        let mut r = rng::stream(1, 0);
        for _ in 0..100 {
            let d = sample_direction(&mut r);
            let op = SingleQubitOperator::new(r.random(), r.random(), r.random(), r.random());
            let m = if r.random::<bool>() { 1 } else { -1 };
            let by_parts: f64 = PauliAxis::ALL.iter().map(|&a| op.coeff(a) * r1_pauli(a, m, &d)).sum();
            assert!(close(r1_operator(&op, m, &d), by_parts, 1e-12));
        }
    }

    #[test]
    fn identity_estimates_exactly_one() {
        let (_, s) = haar_snapshots(3, 200, 2);
        let id = PauliString::identity(3).unwrap();
        let e = estimate_pauli_string(&s, &id).unwrap();
        assert_eq!((e.value, e.std_bound), (1.0, 0.0));
        let e = estimate_observable(&s, &Observable::identity(3).unwrap()).unwrap();
        assert_eq!((e.value, e.std_bound, e.std_approx), (1.0, 0.0, 0.0));
    }

    #[test]
    fn single_snapshot_product() {
        let rec = vec![QubitSnapshot::new(1, Direction::X).unwrap(), QubitSnapshot::new(-1, Direction::Z).unwrap()];
        let s = ApproximateState::from_parts(2, rec, 0, NoiseModel::noiseless(2)).unwrap();
        let e = estimate_pauli_string(&s, &PauliString::from_label("XZ").unwrap()).unwrap();
        assert!(close(e.value, -9.0, 1e-12));
        assert!(close(e.std_bound, 3.0, 1e-12));
    }

    #[test]
    fn z_on_zero_state_converges() {
        let psi = Statevector::zero(4).unwrap();
        let shots = 20_000;
        let s = acquire_snapshots(&psi, shots, 3, &NoiseModel::noiseless(4)).unwrap();
        for k in 0..4 {
            let p = PauliString::new(4, [(k, PauliAxis::Z)]).unwrap();
            let e = estimate_pauli_string(&s, &p).unwrap();
            assert!(close(e.value, 1.0, 3.0 * 3f64.sqrt() / (shots as f64).sqrt()), "qubit {k}: {}", e.value);
        }
    }

    #[test]
    fn observable_estimate_is_linear() {
        let (_, s) = haar_snapshots(3, 500, 4);
        let a = Observable::from_labels([(0.3, "XYZ"), (-1.0, "IZI"), (0.2, "III")]).unwrap();
        let b = Observable::from_labels([(2.0, "IZI"), (0.7, "YYI")]).unwrap();
        let combo = a.linear_combination(1.5, &b, -0.5).unwrap();
        let lhs = estimate_observable(&s, &combo).unwrap().value;
        let rhs = 1.5 * estimate_observable(&s, &a).unwrap().value - 0.5 * estimate_observable(&s, &b).unwrap().value;
        assert!(close(lhs, rhs, 1e-12));

        let p = PauliString::from_label("XYZ").unwrap();
        let single = Observable::new(3, [(2.5, p.clone())]).unwrap();
        let direct = estimate_pauli_string(&s, &p).unwrap().value;
        assert!(close(estimate_observable(&s, &single).unwrap().value, 2.5 * direct, 1e-12));
    }

    #[test]
    fn factored_matches_expansion_on_same_snapshots() {
        for n in 1..=4 {
            let (_, s) = haar_snapshots(n, 300, 10 + n as u64);
            let bits: Vec<u8> = (0..n).map(|k| (k % 2) as u8).collect();
            let f = estimate_factored(&s, &projector_factored(&bits).unwrap()).unwrap();
            let e = estimate_observable(&s, &projector_pauli_expansion(&bits).unwrap()).unwrap();
            assert!(close(f.value, e.value, 1e-10), "n = {n}");
            assert!(close(f.std_bound, e.std_bound, 1e-12));
            assert!(close(f.std_approx, e.std_approx, 1e-12));
        }
    }

    #[test]
    fn projector_estimates_on_basis_states() {
        let shots = 10_000;
        let x = [0u8, 1, 1, 0, 1];
        let proj = projector_factored(&x).unwrap();
        let s = acquire_snapshots(&Statevector::from_bits(&x).unwrap(), shots, 5, &NoiseModel::noiseless(5)).unwrap();
        let e = estimate_factored(&s, &proj).unwrap();
        // Estimator variance here is (3/2)^5 - 1, below the (3/2)^5 used by the band.
        let band = 3.0 * 1.5f64.powi(5).sqrt() / (shots as f64).sqrt();
        assert!(close(e.value, 1.0, band), "{}", e.value);
        let y = [1u8, 1, 1, 0, 1];
        let s = acquire_snapshots(&Statevector::from_bits(&y).unwrap(), shots, 6, &NoiseModel::noiseless(5)).unwrap();
        let e = estimate_factored(&s, &proj).unwrap();
        assert!(close(e.value, 0.0, band), "{}", e.value);
    }

    #[test]
    fn density_reconstruction() {
        let (psi, s) = haar_snapshots(2, 2000, 7);
        let rho = reconstruct_density(&s).unwrap();
        assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let o = Observable::from_labels([(0.4, "XY"), (-0.3, "ZI"), (1.1, "IY"), (0.25, "II")]).unwrap();
        let tr = rho.expectation(&o);
        assert!(close(tr.re, estimate_observable(&s, &o).unwrap().value, 1e-10));
        assert!(tr.im.abs() < 1e-10);
        let _ = psi;
        let (_, big) = haar_snapshots(4, 10, 8);
        assert!(matches!(reconstruct_density(&big), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn density_of_zero_state() {
        let shots = 100_000;
        let s = acquire_snapshots(&Statevector::zero(1).unwrap(), shots, 9, &NoiseModel::noiseless(1)).unwrap();
        let rho = reconstruct_density(&s).unwrap();
        let tol = 5.0 * 3f64.sqrt() / (shots as f64).sqrt();
        let target = [[1.0, 0.0], [0.0, 0.0]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((rho.get(r, c) - Complex64::new(target[r][c], 0.0)).norm() <= tol);
            }
        }
    }

    #[test]
    fn p_odd_matches_binomial_enumeration() {
        fn enumerate(r: usize, p: f64) -> f64 {
            let mut total = 0.0;
            let mut binom = 1.0;
            for k in 0..=r {
                if k > 0 {
                    binom = binom * (r - k + 1) as f64 / k as f64;
                }
                if k % 2 == 1 {
                    total += binom * p.powi(k as i32) * (1.0 - p).powi((r - k) as i32);
                }
            }
            total
        }
        assert!(close(p_odd(1, 0.05).unwrap(), 0.05, 1e-15));
        assert!(close(p_odd(2, 0.05).unwrap(), 0.095, 1e-15));
        assert_eq!(p_odd(7, 0.0).unwrap(), 0.0);
        for r in 0..12 {
            for p in [0.01, 0.05, 0.2, 0.45] {
                assert!(close(p_odd(r, p).unwrap(), enumerate(r, p), 1e-14));
            }
        }
        assert!(p_odd(1, 1.0).is_err());
    }

    #[test]
    fn attenuation_prediction() {
        let o = Observable::from_labels([(0.5, "II"), (2.0, "XI"), (-1.0, "ZZ")]).unwrap();
        let exact = [1.0, 0.3, 0.8];
        let clean = predict_attenuated(&o, &exact, 0.0).unwrap();
        assert!(close(clean, 0.5 + 0.6 - 0.8, 1e-15));
        assert!(close(predict_attenuated(&o, &exact, 0.5).unwrap(), 0.5, 1e-15));
        assert!(close(predict_attenuated(&o, &exact, 0.1).unwrap(), 0.5 + 0.6 * 0.8 - 0.8 * 0.64, 1e-15));
        assert!(matches!(predict_attenuated(&o, &exact[..2], 0.1), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn noisy_estimates_follow_prediction() {
        let n = 4;
        let shots = 100_000;
        let p = 0.05;
        let circuit = crate::statevector::random_prep_circuit(n, &mut rng::stream(12, 1)).unwrap();
        let psi = circuit.prepare().unwrap();
        // Monomials aligned with the state so the prediction is far from zero.
        let o = Observable::from_labels([(0.7, "ZIII"), (0.4, "ZZII"), (0.3, "IIZZ"), (0.2, "XXII")]).unwrap();
        let exact: Vec<f64> = o.terms().iter().map(|t| psi.expectation_pauli(&t.pauli).unwrap()).collect();
        let predicted = predict_attenuated(&o, &exact, p).unwrap();
        let s = acquire_snapshots(&psi, shots, 13, &NoiseModel::uniform(n, p).unwrap()).unwrap();
        let e = estimate_observable(&s, &o).unwrap();
        assert!(close(e.value, predicted, 3.0 * e.std_bound), "{} vs {predicted}", e.value);
    }

    #[test]
    fn running_estimates_agree_with_prefix_batches() {
        let (_, s) = haar_snapshots(3, 5000, 14);
        let o = Observable::from_labels([(0.3, "XYZ"), (-1.0, "IZI"), (0.2, "III")]).unwrap();
        let checkpoints = [1, 10, 100, 1024, 1500, 2048, 5000];
        let curve = running_estimates(&s, Target::Pauli(&o), &checkpoints).unwrap();
        for (point, &m) in curve.iter().zip(&checkpoints) {
            let batch = estimate_observable_prefix(&s, &o, m).unwrap();
            assert!(close(point.value, batch.value, 1e-12), "M' = {m}");
            assert_eq!(point.shots, m);
            assert!(close(point.std_bound, batch.std_bound, 1e-15));
        }
        let f = projector_factored(&[1, 0, 1]).unwrap();
        let curve = running_estimates(&s, Target::Factored(&f), &checkpoints).unwrap();
        for (point, &m) in curve.iter().zip(&checkpoints) {
            assert!(close(point.value, estimate_factored_prefix(&s, &f, m).unwrap().value, 1e-12));
        }
        assert!(running_estimates(&s, Target::Pauli(&o), &[10, 5]).is_err());
        assert!(running_estimates(&s, Target::Pauli(&o), &[6000]).is_err());
    }

    #[test]
    fn mismatched_qubits_rejected() {
        let (_, s) = haar_snapshots(2, 10, 15);
        let o = Observable::from_labels([(1.0, "XYZ")]).unwrap();
        assert!(matches!(estimate_observable(&s, &o), Err(Error::QubitCountMismatch { .. })));
        assert!(estimate_factored(&s, &projector_factored(&[0]).unwrap()).is_err());
    }

    #[test]
    fn std_approx_never_exceeds_bound() {
        let (_, s) = haar_snapshots(4, 10, 16);
        let mut r = rng::stream(16, 1);
        for _ in 0..200 {
            let terms: Vec<(f64, PauliString)> = (0..r.random_range(1..10))
                .map(|_| {
                    let p = PauliString::new(4, (0..4).map(|q| (q, PauliAxis::ALL[r.random_range(0..4)]))).unwrap();
                    (r.random::<f64>() * 2.0 - 1.0, p)
                })
                .collect();
            let o = Observable::new(4, terms).unwrap();
            let e = estimate_observable(&s, &o).unwrap();
            assert!(e.std_approx <= e.std_bound + 1e-12);
        }
    }
}
