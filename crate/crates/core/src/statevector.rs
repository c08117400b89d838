//! Exact statevector simulation: gate kernels, random preparation circuits,
//! and expectation values used as the reference for all estimates.
//!
//! Amplitude index bit `k` is qubit `k` (qubit 0 is the least significant bit).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{FactoredObservable, Observable, PauliAxis, PauliString, SingleQubitOperator};

/// Largest statevector the simulator will allocate.
pub const STATEVECTOR_CAP: usize = 26;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major 2x2 complex matrix.
pub type Matrix2 = [[Complex64; 2]; 2];

pub fn identity2() -> Matrix2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn pauli_matrix(axis: PauliAxis) -> Matrix2 {
    match axis {
        PauliAxis::I => identity2(),
        PauliAxis::X => [[ZERO, ONE], [ONE, ZERO]],
        PauliAxis::Y => [[ZERO, -I], [I, ZERO]],
        PauliAxis::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

pub fn matmul2(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub fn adjoint2(a: &Matrix2) -> Matrix2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Matrix of `a0 1 + ax X + ay Y + az Z`.
pub fn operator_matrix(op: &SingleQubitOperator) -> Matrix2 {
    let [a0, ax, ay, az] = op.coeffs;
    [
        [Complex64::new(a0 + az, 0.0), Complex64::new(ax, -ay)],
        [Complex64::new(ax, ay), Complex64::new(a0 - az, 0.0)],
    ]
}

/// Gates of the preparation circuits. Serialized as
/// `{"kind": "H", "q": 0}` or `{"kind": "XY", "q1": 0, "q2": 3, "alpha": 1.2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Gate {
    X { q: usize },
    Y { q: usize },
    Z { q: usize },
    H { q: usize },
    S { q: usize },
    T { q: usize },
    /// `exp(-i alpha (X⊗X + Y⊗Y))`.
    XY { q1: usize, q2: usize, alpha: f64 },
}

/// Single-qubit gate kinds of the random preparation layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingleGateKind {
    X,
    Y,
    Z,
    H,
    S,
    T,
}

impl SingleGateKind {
    pub const ALL: [SingleGateKind; 6] =
        [SingleGateKind::X, SingleGateKind::Y, SingleGateKind::Z, SingleGateKind::H, SingleGateKind::S, SingleGateKind::T];

    pub fn on(self, q: usize) -> Gate {
        match self {
            SingleGateKind::X => Gate::X { q },
            SingleGateKind::Y => Gate::Y { q },
            SingleGateKind::Z => Gate::Z { q },
            SingleGateKind::H => Gate::H { q },
            SingleGateKind::S => Gate::S { q },
            SingleGateKind::T => Gate::T { q },
        }
    }
}

impl Gate {
    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::X { q } | Gate::Y { q } | Gate::Z { q } | Gate::H { q } | Gate::S { q } | Gate::T { q } => vec![q],
            Gate::XY { q1, q2, .. } => vec![q1, q2],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::XY { .. })
    }

    /// 2x2 matrix of a single-qubit gate; `None` for XY.
    pub fn matrix(&self) -> Option<Matrix2> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Some(match self {
            Gate::X { .. } => pauli_matrix(PauliAxis::X),
            Gate::Y { .. } => pauli_matrix(PauliAxis::Y),
            Gate::Z { .. } => pauli_matrix(PauliAxis::Z),
            Gate::H { .. } => [[h, h], [h, -h]],
            Gate::S { .. } => [[ONE, ZERO], [ZERO, I]],
            Gate::T { .. } => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, FRAC_PI_4)]],
            Gate::XY { .. } => return None,
        })
    }

    /// 4x4 matrix of XY in the basis `|q2 q1>` = 00, 01, 10, 11 (q1 least significant).
    pub fn xy_matrix(alpha: f64) -> [[Complex64; 4]; 4] {
        let c = Complex64::new((2.0 * alpha).cos(), 0.0);
        let s = Complex64::new(0.0, -(2.0 * alpha).sin());
        [[ONE, ZERO, ZERO, ZERO], [ZERO, c, s, ZERO], [ZERO, s, c, ZERO], [ZERO, ZERO, ZERO, ONE]]
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in self.targets() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if let Gate::XY { q1, q2, alpha } = *self {
            if q1 == q2 {
                return Err(Error::EqualTargets(q1));
            }
            if !(0.0..2.0 * PI).contains(&alpha) {
                return Err(Error::InvalidAngle(alpha));
            }
        }
        Ok(())
    }
}

/// Ordered gate list on a fixed register, applied to `|0...0>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::NoQubits);
        }
        for g in &gates {
            g.validate(n_qubits)?;
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Runs the circuit on `|0...0>`.
    pub fn prepare(&self) -> Result<Statevector> {
        let mut psi = Statevector::zero(self.n_qubits)?;
        for g in &self.gates {
            psi.apply_gate(g)?;
        }
        Ok(psi)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Circuit = serde_json::from_str(text)?;
        Self::new(raw.n_qubits, raw.gates)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }
}

/// How the XY pairs of the second preparation layer are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    /// Pairs taken from a random perfect matching, so no qubit appears twice.
    #[default]
    Disjoint,
    /// Each pair drawn independently; pairs may share qubits.
    Overlapping,
}

/// Two-layer random preparation circuit: `N/2` single-qubit gates from
/// `{X,Y,Z,H,S,T}` on distinct random qubits, then `N/4` XY gates with
/// angles uniform in `[0, 2pi)`.
pub fn random_prep_circuit<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Circuit> {
    random_prep_circuit_with(n_qubits, PairMode::Disjoint, rng)
}

pub fn random_prep_circuit_with<R: Rng + ?Sized>(n_qubits: usize, pairs: PairMode, rng: &mut R) -> Result<Circuit> {
    if n_qubits < 2 {
        return Err(Error::InvalidConfig(format!("preparation circuit needs at least 2 qubits, got {n_qubits}")));
    }
    let mut gates = Vec::with_capacity(n_qubits / 2 + n_qubits / 4);
    for q in rand::seq::index::sample(rng, n_qubits, n_qubits / 2) {
        let kind = SingleGateKind::ALL[rng.random_range(0..SingleGateKind::ALL.len())];
        gates.push(kind.on(q));
    }
    let n_pairs = n_qubits / 4;
    match pairs {
        PairMode::Disjoint => {
            let mut order: Vec<usize> = (0..n_qubits).collect();
            order.shuffle(rng);
            for pair in order.chunks_exact(2).take(n_pairs) {
                let alpha = rng.random::<f64>() * 2.0 * PI;
                gates.push(Gate::XY { q1: pair[0], q2: pair[1], alpha });
            }
        }
        PairMode::Overlapping => {
            for _ in 0..n_pairs {
                let pair = rand::seq::index::sample(rng, n_qubits, 2);
                let alpha = rng.random::<f64>() * 2.0 * PI;
                gates.push(Gate::XY { q1: pair.index(0), q2: pair.index(1), alpha });
            }
        }
    }
    Circuit::new(n_qubits, gates)
}

/// Pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_cap(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::NoQubits);
    }
    if n_qubits > STATEVECTOR_CAP {
        return Err(Error::CapExceeded { what: "statevector", n: n_qubits, cap: STATEVECTOR_CAP });
    }
    Ok(())
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::QubitOutOfRange { index, n_qubits });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Basis state from bits, `bits[k]` being qubit `k`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let index = bits.iter().enumerate().fold(0usize, |acc, (k, &b)| acc | (usize::from(b & 1) << k));
        Self::basis(bits.len(), index)
    }

    /// Wraps and normalizes raw amplitudes.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidConfig(format!("amplitude count {dim} is not a power of two >= 2")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_cap(n_qubits)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidConfig("amplitudes have zero or non-finite norm".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, amps })
    }

    /// Normalized vector of i.i.d. complex Gaussians; Haar distributed.
    pub fn haar_random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_cap(n_qubits)?;
        let amps = (0..1usize << n_qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// Applies an arbitrary 2x2 matrix to qubit `q`.
    pub fn apply_matrix(&mut self, q: usize, m: &Matrix2) -> Result<()> {
        self.check_qubit(q)?;
        apply_matrix_unchecked(&mut self.amps, q, m);
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::XY { q1, q2, alpha } => self.apply_xy(q1, q2, alpha),
            Gate::X { q } | Gate::Y { q } | Gate::Z { q } | Gate::H { q } | Gate::S { q } | Gate::T { q } => {
                let m = gate.matrix().expect("single-qubit gate");
                self.apply_matrix(q, &m)
            }
        }
    }

    /// `exp(-i alpha (X⊗X + Y⊗Y))` on qubits `q1, q2`: identity on even
    /// parity, rotation by `2 alpha` on the `{|01>, |10>}` block.
    pub fn apply_xy(&mut self, q1: usize, q2: usize, alpha: f64) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::EqualTargets(q1));
        }
        let (b1, b2) = (1usize << q1, 1usize << q2);
        let c = (2.0 * alpha).cos();
        let s = Complex64::new(0.0, -(2.0 * alpha).sin());
        for i in 0..self.amps.len() {
            if i & b1 != 0 && i & b2 == 0 {
                let j = i ^ b1 ^ b2;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = a * c + s * b;
                self.amps[j] = s * a + b * c;
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        self.check_len(circuit.n_qubits())?;
        for g in circuit.gates() {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::QubitCountMismatch { expected: self.n_qubits, found: n });
        }
        Ok(())
    }

    /// `<psi|P|psi>` by sparse Pauli action.
    pub fn expectation_pauli(&self, pauli: &PauliString) -> Result<f64> {
        self.check_len(pauli.n_qubits())?;
        let (mut flip, mut phase_mask, mut n_y) = (0usize, 0usize, 0u32);
        for &(q, axis) in pauli.support() {
            let bit = 1usize << q;
            match axis {
                PauliAxis::X => flip |= bit,
                PauliAxis::Y => {
                    flip |= bit;
                    phase_mask |= bit;
                    n_y += 1;
                }
                PauliAxis::Z => phase_mask |= bit,
                PauliAxis::I => {}
            }
        }
        // P|b> = i^{n_y} (-1)^{|b & phase_mask|} |b ^ flip>
        let sum: Complex64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(b, a)| {
                let v = self.amps[b ^ flip].conj() * a;
                if (b & phase_mask).count_ones() % 2 == 1 { -v } else { v }
            })
            .sum();
        let global = match n_y % 4 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
        Ok((global * sum).re)
    }

    /// `<psi|O|psi>` term by term.
    pub fn expectation(&self, observable: &Observable) -> Result<f64> {
        self.check_len(observable.n_qubits())?;
        observable.terms().iter().map(|t| Ok(t.coeff * self.expectation_pauli(&t.pauli)?)).sum()
    }

    /// `<psi|O|psi>` for a tensor-factored observable via per-qubit 2x2 actions.
    pub fn expectation_factored(&self, observable: &FactoredObservable) -> Result<f64> {
        self.check_len(observable.n_qubits())?;
        let mut total = 0.0;
        for term in observable.terms() {
            let mut phi = self.amps.clone();
            for (q, f) in term.factors.iter().enumerate() {
                if f.coeffs != [1.0, 0.0, 0.0, 0.0] {
                    apply_matrix_unchecked(&mut phi, q, &operator_matrix(f));
                }
            }
            let overlap: Complex64 = self.amps.iter().zip(&phi).map(|(a, b)| a.conj() * b).sum();
            total += term.coeff * overlap.re;
        }
        Ok(total)
    }

    /// `|<x|psi>|^2` for a computational basis string.
    pub fn basis_probability(&self, bits: &[u8]) -> Result<f64> {
        self.check_len(bits.len())?;
        let index = bits.iter().enumerate().fold(0usize, |acc, (k, &b)| acc | (usize::from(b & 1) << k));
        Ok(self.amps[index].norm_sqr())
    }
}

pub(crate) fn apply_matrix_unchecked(amps: &mut [Complex64], q: usize, m: &Matrix2) {
    let stride = 1usize << q;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a0, *a1);
            *a0 = m[0][0] * x + m[0][1] * y;
            *a1 = m[1][0] * x + m[1][1] * y;
        }
    }
}
