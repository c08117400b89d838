//! Randomized single-qubit measurements and the snapshot collection they produce.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;
use crate::statevector::{apply_matrix_unchecked, Circuit, Matrix2, Statevector};

/// Measurement axis on the Bloch sphere, stored as polar and azimuthal angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub const Z: Direction = Direction { theta: 0.0, phi: 0.0 };
    pub const X: Direction = Direction { theta: PI / 2.0, phi: 0.0 };
    pub const Y: Direction = Direction { theta: PI / 2.0, phi: PI / 2.0 };

    /// `theta` in `[0, pi]`, `phi` in `[0, 2pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::Malformed(format!("direction angles out of range: theta {theta}, phi {phi}")));
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(cos phi sin theta, sin phi sin theta, cos theta)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [cp * st, sp * st, ct]
    }
}

/// Uniform point on the sphere: `phi ~ U[0, 2pi)`, `cos theta ~ U[-1, 1]`.
pub fn sample_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    let phi = rng.random::<f64>() * 2.0 * PI;
    let cos_theta = 2.0 * rng.random::<f64>() - 1.0;
    Direction { theta: cos_theta.acos(), phi: if phi < 2.0 * PI { phi } else { 0.0 } }
}

/// `U = exp(i theta/2 σ·n⊥)` with `n⊥ = (-sin phi, cos phi, 0)`, which maps the
/// eigenbasis of `σ·n` onto the computational basis.
pub fn measurement_unitary(d: &Direction) -> Matrix2 {
    let (s, c) = (d.theta / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, d.phi);
    [[Complex64::new(c, 0.0), s * e.conj()], [-s * e, Complex64::new(c, 0.0)]]
}

/// Single-qubit kernel `(1 + 3 m σ·n) / 2`.
pub fn kernel_matrix(outcome: i8, d: &Direction) -> Matrix2 {
    let [nx, ny, nz] = d.unit_vector();
    let k = 1.5 * f64::from(outcome);
    [
        [Complex64::new(0.5 + k * nz, 0.0), Complex64::new(k * nx, -k * ny)],
        [Complex64::new(k * nx, k * ny), Complex64::new(0.5 - k * nz, 0.0)],
    ]
}

/// One qubit's share of a snapshot: outcome `m = ±1` and the measured direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSnapshot {
    outcome: i8,
    direction: Direction,
}

impl QubitSnapshot {
    pub fn new(outcome: i8, direction: Direction) -> Result<Self> {
        if outcome != 1 && outcome != -1 {
            return Err(Error::InvalidOutcome(outcome.into()));
        }
        Ok(Self { outcome, direction })
    }

    pub fn outcome(&self) -> i8 {
        self.outcome
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// `(3 m n_x, 3 m n_y, 3 m n_z)`, the non-identity single-qubit estimators.
    pub fn scaled_axes(&self) -> [f64; 3] {
        let m3 = 3.0 * f64::from(self.outcome);
        self.direction.unit_vector().map(|n| m3 * n)
    }

    /// Same direction, opposite outcome (a readout flip).
    pub fn flipped(self) -> Self {
        Self { outcome: -self.outcome, ..self }
    }
}

/// One snapshot of an `N`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRecord {
    pub qubits: Vec<QubitSnapshot>,
}

/// Independent per-qubit readout flip probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    p_err: Vec<f64>,
}

impl NoiseModel {
    pub fn noiseless(n_qubits: usize) -> Self {
        Self { p_err: vec![0.0; n_qubits] }
    }

    pub fn uniform(n_qubits: usize, p: f64) -> Result<Self> {
        Self::per_qubit(vec![p; n_qubits])
    }

    /// Probabilities must lie in `[0, 1]`; `1` is a deterministic flip.
    pub fn per_qubit(p_err: Vec<f64>) -> Result<Self> {
        if let Some(&p) = p_err.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(Self { p_err })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p_err
    }

    pub fn n_qubits(&self) -> usize {
        self.p_err.len()
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_err.iter().all(|&p| p == 0.0)
    }
}

/// Measures every qubit of a copy of `psi` along its own direction and returns
/// the outcomes; readout flips are applied to the outcomes afterwards.
pub fn acquire_snapshot<R: Rng + ?Sized>(psi: &Statevector, rng: &mut R, noise: &NoiseModel) -> Result<SnapshotRecord> {
    let directions: Vec<Direction> = (0..psi.n_qubits()).map(|_| sample_direction(rng)).collect();
    measure_along(psi, &directions, rng, noise)
}

/// Like [`acquire_snapshot`] with caller-chosen directions.
pub fn measure_along<R: Rng + ?Sized>(
    psi: &Statevector,
    directions: &[Direction],
    rng: &mut R,
    noise: &NoiseModel,
) -> Result<SnapshotRecord> {
    let n = psi.n_qubits();
    if directions.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: directions.len() });
    }
    if noise.n_qubits() != n {
        return Err(Error::QubitCountMismatch { expected: n, found: noise.n_qubits() });
    }
    let mut work = psi.amplitudes().to_vec();
    for (q, d) in directions.iter().enumerate() {
        if d.theta != 0.0 {
            apply_matrix_unchecked(&mut work, q, &measurement_unitary(d));
        }
    }
    let bits = sample_index(&work, rng.random::<f64>());
    let qubits = directions
        .iter()
        .enumerate()
        .map(|(q, &direction)| {
            let mut outcome = if bits >> q & 1 == 0 { 1 } else { -1 };
            let p = noise.p_err[q];
            if p > 0.0 && rng.random::<f64>() < p {
                outcome = -outcome;
            }
            QubitSnapshot { outcome, direction }
        })
        .collect();
    Ok(SnapshotRecord { qubits })
}

fn sample_index(amps: &[Complex64], u: f64) -> usize {
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            last_nonzero = i;
        }
        acc += p;
        if target < acc {
            return i;
        }
    }
    last_nonzero
}

/// The collection of `M` snapshots of an `N`-qubit state, with the seed and
/// noise model used to produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximateState {
    n_qubits: usize,
    records: Vec<QubitSnapshot>,
    master_seed: u64,
    noise: NoiseModel,
}

impl ApproximateState {
    /// Assembles a state from snapshot-major, qubit-minor records.
    pub fn from_parts(n_qubits: usize, records: Vec<QubitSnapshot>, master_seed: u64, noise: NoiseModel) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::NoQubits);
        }
        if records.is_empty() {
            return Err(Error::ZeroShots);
        }
        if records.len() % n_qubits != 0 {
            return Err(Error::LengthMismatch { expected: n_qubits * (records.len() / n_qubits + 1), found: records.len() });
        }
        if noise.n_qubits() != n_qubits {
            return Err(Error::QubitCountMismatch { expected: n_qubits, found: noise.n_qubits() });
        }
        Ok(Self { n_qubits, records, master_seed, noise })
    }

    pub fn from_records(records: Vec<SnapshotRecord>, master_seed: u64, noise: NoiseModel) -> Result<Self> {
        let n = records.first().map(|r| r.qubits.len()).ok_or(Error::ZeroShots)?;
        let mut flat = Vec::with_capacity(n * records.len());
        for r in records {
            if r.qubits.len() != n {
                return Err(Error::QubitCountMismatch { expected: n, found: r.qubits.len() });
            }
            flat.extend(r.qubits);
        }
        Self::from_parts(n, flat, master_seed, noise)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots(&self) -> usize {
        self.records.len() / self.n_qubits
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn snapshot(&self, j: usize) -> &[QubitSnapshot] {
        &self.records[j * self.n_qubits..(j + 1) * self.n_qubits]
    }

    pub fn snapshots(&self) -> std::slice::ChunksExact<'_, QubitSnapshot> {
        self.records.chunks_exact(self.n_qubits)
    }

    pub fn records(&self) -> &[QubitSnapshot] {
        &self.records
    }

    /// The first `shots` snapshots.
    pub fn truncated(&self, shots: usize) -> Result<Self> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let shots = shots.min(self.shots());
        Ok(Self { records: self.records[..shots * self.n_qubits].to_vec(), ..self.clone() })
    }

    /// Total number of stored scalars: an outcome and two angles per qubit per snapshot.
    pub fn cardinality(&self) -> usize {
        3 * self.records.len()
    }
}

/// Acquires `shots` snapshots of `psi`. Snapshot `j` draws from its own
/// stream derived from `(master_seed, j)`, so the result is independent of
/// thread count.
pub fn acquire_snapshots(psi: &Statevector, shots: usize, master_seed: u64, noise: &NoiseModel) -> Result<ApproximateState> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    if noise.n_qubits() != psi.n_qubits() {
        return Err(Error::QubitCountMismatch { expected: psi.n_qubits(), found: noise.n_qubits() });
    }
    let records: Vec<SnapshotRecord> = (0..shots as u64)
        .into_par_iter()
        .map(|j| acquire_snapshot(psi, &mut rng::snapshot_stream(master_seed, j), noise))
        .collect::<Result<_>>()?;
    ApproximateState::from_records(records, master_seed, noise.clone())
}

/// Prepares the circuit's state once and acquires `shots` snapshots of it.
/// Reusing the simulated state stands in for fresh preparations.
pub fn build_approximate_state(circuit: &Circuit, shots: usize, master_seed: u64, noise: &NoiseModel) -> Result<ApproximateState> {
    let psi = circuit.prepare()?;
    acquire_snapshots(&psi, shots, master_seed, noise)
}
