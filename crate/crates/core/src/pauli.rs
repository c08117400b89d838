//! Pauli strings, observables in the Pauli basis and tensor-factored form,
//! and the seminorms that bound the shot noise of their estimators.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default qubit cap for [`projector_pauli_expansion`].
pub const PROJECTOR_EXPANSION_CAP: usize = 12;

/// Largest number of Pauli strings a factored observable is expanded into
/// when its seminorm cannot be computed in closed form.
pub const FACTORED_EXPANSION_LIMIT: usize = 1 << 14;

const PARALLEL_PAIR_THRESHOLD: usize = 256;

/// Single-qubit Pauli axis, indexed like `sigma_0..sigma_3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 4] = [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' | 'i' => Ok(PauliAxis::I),
            'X' | 'x' => Ok(PauliAxis::X),
            'Y' | 'y' => Ok(PauliAxis::Y),
            'Z' | 'z' => Ok(PauliAxis::Z),
            other => Err(Error::InvalidPauliChar(other)),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }
}

/// Pauli monomial on `n_qubits` qubits, stored sparsely as the sorted list
/// of qubits it acts on non-trivially.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    support: Vec<(usize, PauliAxis)>,
}

impl PauliString {
    /// Builds a string from `(qubit, axis)` pairs. Identity entries are dropped;
    /// a qubit listed twice keeps its last axis.
    pub fn new(n_qubits: usize, entries: impl IntoIterator<Item = (usize, PauliAxis)>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::NoQubits);
        }
        let mut map = std::collections::BTreeMap::new();
        for (q, axis) in entries {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            map.insert(q, axis);
        }
        let support = map.into_iter().filter(|&(_, a)| a != PauliAxis::I).collect();
        Ok(Self { n_qubits, support })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, std::iter::empty())
    }

    /// Parses a dense label such as `"XIZ"`, qubit 0 leftmost.
    pub fn from_label(label: &str) -> Result<Self> {
        let axes = label.chars().map(PauliAxis::from_char).collect::<Result<Vec<_>>>()?;
        Self::new(axes.len(), axes.into_iter().enumerate())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn support(&self) -> &[(usize, PauliAxis)] {
        &self.support
    }

    /// Number of qubits the string acts on non-trivially.
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty()
    }

    pub fn axis(&self, qubit: usize) -> PauliAxis {
        match self.support.binary_search_by_key(&qubit, |&(q, _)| q) {
            Ok(pos) => self.support[pos].1,
            Err(_) => PauliAxis::I,
        }
    }

    pub fn label(&self) -> String {
        let mut chars = vec!['I'; self.n_qubits];
        for &(q, a) in &self.support {
            chars[q] = a.to_char();
        }
        chars.into_iter().collect()
    }

    /// The same monomial tensored with `extra` identity qubits.
    pub fn extended(&self, extra: usize) -> Self {
        Self { n_qubits: self.n_qubits + extra, support: self.support.clone() }
    }

    /// Overlap count and compatibility against another string on the same qubits.
    pub fn pair_compat(&self, other: &PauliString) -> Result<PairCompat> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(pair_compat_unchecked(&self.support, &other.support))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_label(s)
    }
}

/// Result of comparing two Pauli strings qubit by qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCompat {
    /// False when some qubit carries two different non-identity axes.
    pub compatible: bool,
    /// Number of qubits where both strings are non-identity.
    pub overlap: usize,
}

impl PairCompat {
    /// The 0/1 compatibility indicator.
    pub fn delta(&self) -> u8 {
        u8::from(self.compatible)
    }
}

fn pair_compat_unchecked(a: &[(usize, PauliAxis)], b: &[(usize, PauliAxis)]) -> PairCompat {
    let (mut i, mut j) = (0, 0);
    let mut overlap = 0;
    let mut compatible = true;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                overlap += 1;
                if a[i].1 != b[j].1 {
                    compatible = false;
                }
                i += 1;
                j += 1;
            }
        }
    }
    PairCompat { compatible, overlap }
}

/// Overlap weight `3^r` of a compatible pair, or `None` as soon as a conflicting
/// qubit is found.
fn compatible_pair_weight(a: &[(usize, PauliAxis)], b: &[(usize, PauliAxis)]) -> Option<f64> {
    let (mut i, mut j) = (0, 0);
    let mut overlap = 0i32;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i].1 != b[j].1 {
                    return None;
                }
                overlap += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Some(3f64.powi(overlap))
}

/// `3^(r/2)`, the single-term contribution scale of a weight-`r` string.
pub(crate) fn sqrt3_pow(weight: usize) -> f64 {
    3f64.sqrt().powi(weight as i32)
}

/// One weighted Pauli monomial of an [`Observable`].
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub pauli: PauliString,
}

/// Which seminorm an observable is scaled by before use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// The pairwise-compatibility seminorm that bounds the standard deviation.
    #[default]
    Seminorm,
    /// The diagonal-only seminorm.
    Seminorm2,
    None,
}

/// Real linear combination of Pauli strings in canonical form: no repeated
/// strings and no exact-zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    n_qubits: usize,
    terms: Vec<Term>,
}

impl Observable {
    /// Canonicalizes `terms`: duplicates are merged in first-occurrence order
    /// and terms whose coefficient sums to exactly zero are dropped.
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::NoQubits);
        }
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        let mut merged: Vec<Term> = Vec::new();
        for (coeff, pauli) in terms {
            if pauli.n_qubits() != n_qubits {
                return Err(Error::QubitCountMismatch { expected: n_qubits, found: pauli.n_qubits() });
            }
            match index.get(&pauli) {
                Some(&pos) => merged[pos].coeff += coeff,
                None => {
                    index.insert(pauli.clone(), merged.len());
                    merged.push(Term { coeff, pauli });
                }
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        Ok(Self { n_qubits, terms: merged })
    }

    /// Convenience constructor from dense labels, e.g. `[(0.5, "XI"), (0.5, "XZ")]`.
    pub fn from_labels<'a>(terms: impl IntoIterator<Item = (f64, &'a str)>) -> Result<Self> {
        let parsed = terms
            .into_iter()
            .map(|(c, l)| PauliString::from_label(l).map(|p| (c, p)))
            .collect::<Result<Vec<_>>>()?;
        let n = parsed.first().map(|(_, p)| p.n_qubits()).ok_or(Error::NoQubits)?;
        Self::new(n, parsed)
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, [(1.0, PauliString::identity(n_qubits)?)])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self.terms.iter().map(|t| (t.coeff * factor, t.pauli.clone()));
        Self::new(self.n_qubits, terms).expect("scaling preserves validity")
    }

    /// `a * self + b * other`, canonicalized.
    pub fn linear_combination(&self, a: f64, other: &Observable, b: f64) -> Result<Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::QubitCountMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        let lhs = self.terms.iter().map(|t| (a * t.coeff, t.pauli.clone()));
        let rhs = other.terms.iter().map(|t| (b * t.coeff, t.pauli.clone()));
        Self::new(self.n_qubits, lhs.chain(rhs))
    }

    /// `self ⊗ 1^{⊗extra}`.
    pub fn extended(&self, extra: usize) -> Self {
        Self {
            n_qubits: self.n_qubits + extra,
            terms: self.terms.iter().map(|t| Term { coeff: t.coeff, pauli: t.pauli.extended(extra) }).collect(),
        }
    }

    fn non_identity(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| !t.pauli.is_identity())
    }

    /// Sum of `3^{r_i} a_i^2` over non-identity terms, accumulated in term order.
    fn diagonal_sum(&self) -> f64 {
        self.non_identity().map(|t| (sqrt3_pow(t.pauli.weight()) * t.coeff.abs()).powi(2)).sum()
    }

    /// Sum over ordered pairs `i != j` of `3^{r_ij} Δ_ij |a_i||a_j|`.
    fn mixed_sum(&self) -> f64 {
        let terms: Vec<&Term> = self.non_identity().collect();
        let row = |i: usize| -> f64 {
            let ti = terms[i];
            terms[i + 1..]
                .iter()
                .filter_map(|tj| {
                    compatible_pair_weight(ti.pauli.support(), tj.pauli.support())
                        .map(|w| w * ti.coeff.abs() * tj.coeff.abs())
                })
                .sum()
        };
        let rows: Vec<f64> = if terms.len() >= PARALLEL_PAIR_THRESHOLD {
            (0..terms.len()).into_par_iter().map(row).collect()
        } else {
            (0..terms.len()).map(row).collect()
        };
        2.0 * rows.into_iter().sum::<f64>()
    }

    /// The pairwise seminorm `sqrt(sum_{i,j != 0} 3^{r_ij} Δ_ij |a_i||a_j|)`.
    pub fn seminorm(&self) -> f64 {
        // Diagonal first so that the result can never round below seminorm2.
        (self.diagonal_sum() + self.mixed_sum()).sqrt()
    }

    /// The diagonal seminorm `sqrt(sum_{i != 0} 3^{r_i} a_i^2)`.
    pub fn seminorm2(&self) -> f64 {
        self.diagonal_sum().sqrt()
    }

    /// `sum_{i != 0} 3^{r_i / 2} |a_i|`.
    pub fn seminorm1(&self) -> f64 {
        self.non_identity().map(|t| sqrt3_pow(t.pauli.weight()) * t.coeff.abs()).sum()
    }

    /// Upper bound `seminorm / sqrt(shots)` on the estimator standard deviation.
    pub fn std_bound(&self, shots: usize) -> Result<f64> {
        std_bound_from(self.seminorm(), shots)
    }

    /// Rescales so that the chosen seminorm equals one.
    pub fn normalized(&self, normalization: Normalization) -> Result<Self> {
        let norm = match normalization {
            Normalization::Seminorm => self.seminorm(),
            Normalization::Seminorm2 => self.seminorm2(),
            Normalization::None => return Ok(self.clone()),
        };
        if norm == 0.0 {
            return Err(Error::ZeroSeminorm);
        }
        Ok(self.scaled(1.0 / norm))
    }

    pub fn normalize_to_unit_seminorm(&self) -> Result<Self> {
        self.normalized(Normalization::Seminorm)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ObservableFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ObservableFile::from(self)).expect("observable serializes")
    }
}

pub(crate) fn std_bound_from(seminorm: f64, shots: usize) -> Result<f64> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    Ok(seminorm / (shots as f64).sqrt())
}

/// Shots needed for a standard-deviation bound of `epsilon`.
pub fn shot_budget(seminorm: f64, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!("target precision must be positive, got {epsilon}")));
    }
    Ok(((seminorm / epsilon).powi(2)).ceil().max(1.0) as u64)
}

/// Single-qubit Hermitian operator `a0 1 + ax X + ay Y + az Z`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct SingleQubitOperator {
    pub coeffs: [f64; 4],
}

impl SingleQubitOperator {
    pub fn new(a0: f64, ax: f64, ay: f64, az: f64) -> Self {
        Self { coeffs: [a0, ax, ay, az] }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub fn coeff(&self, axis: PauliAxis) -> f64 {
        self.coeffs[axis.index()]
    }
}

impl From<[f64; 4]> for SingleQubitOperator {
    fn from(coeffs: [f64; 4]) -> Self {
        Self { coeffs }
    }
}

impl From<SingleQubitOperator> for [f64; 4] {
    fn from(op: SingleQubitOperator) -> Self {
        op.coeffs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactoredTerm {
    pub coeff: f64,
    pub factors: Vec<SingleQubitOperator>,
}

/// Sum of tensor products of single-qubit operators, one factor per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredObservable {
    n_qubits: usize,
    terms: Vec<FactoredTerm>,
}

impl FactoredObservable {
    pub fn new(n_qubits: usize, terms: Vec<FactoredTerm>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::NoQubits);
        }
        for t in &terms {
            if t.factors.len() != n_qubits {
                return Err(Error::QubitCountMismatch { expected: n_qubits, found: t.factors.len() });
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[FactoredTerm] {
        &self.terms
    }

    /// Distributes the tensor products into a canonical Pauli sum.
    pub fn expand(&self, max_terms: usize) -> Result<Observable> {
        let mut out: Vec<(f64, Vec<(usize, PauliAxis)>)> = Vec::new();
        for t in &self.terms {
            let mut partial: Vec<(f64, Vec<(usize, PauliAxis)>)> = vec![(t.coeff, Vec::new())];
            for (q, f) in t.factors.iter().enumerate() {
                let mut next = Vec::with_capacity(partial.len() * 4);
                for (c, sup) in &partial {
                    for axis in PauliAxis::ALL {
                        let a = f.coeff(axis);
                        if a == 0.0 {
                            continue;
                        }
                        let mut s = sup.clone();
                        if axis != PauliAxis::I {
                            s.push((q, axis));
                        }
                        next.push((c * a, s));
                    }
                }
                if out.len() + next.len() > max_terms {
                    return Err(Error::CapExceeded {
                        what: "factored observable expansion",
                        n: self.n_qubits,
                        cap: max_terms,
                    });
                }
                partial = next;
            }
            out.extend(partial);
        }
        let n = self.n_qubits;
        let terms = out
            .into_iter()
            .map(|(c, s)| PauliString::new(n, s).map(|p| (c, p)))
            .collect::<Result<Vec<_>>>()?;
        Observable::new(n, terms)
    }

    /// Pauli coefficient of the all-identity string.
    fn identity_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff * t.factors.iter().map(|f| f.coeffs[0]).product::<f64>()).sum()
    }

    /// Diagonal seminorm, computed without expansion:
    /// `sum_{t,t'} c_t c_t' prod_k (a0 a0' + 3 a·a') - a_{0v}^2`.
    pub fn seminorm2(&self) -> f64 {
        let mut total = 0.0;
        for s in &self.terms {
            for t in &self.terms {
                let per_qubit: f64 = s
                    .factors
                    .iter()
                    .zip(&t.factors)
                    .map(|(a, b)| {
                        a.coeffs[0] * b.coeffs[0]
                            + 3.0 * (a.coeffs[1] * b.coeffs[1] + a.coeffs[2] * b.coeffs[2] + a.coeffs[3] * b.coeffs[3])
                    })
                    .product();
                total += s.coeff * t.coeff * per_qubit;
            }
        }
        let id = self.identity_coeff();
        (total - id * id).max(0.0).sqrt()
    }

    /// Pairwise seminorm. Exact in closed form for a single product term,
    /// exact by expansion when the expansion is small, and otherwise the
    /// triangle-inequality bound `sum_t ||c_t O_t||`.
    pub fn seminorm(&self) -> f64 {
        self.seminorm_by(single_term_seminorm, Observable::seminorm)
    }

    pub fn seminorm1(&self) -> f64 {
        self.seminorm_by(single_term_seminorm1, Observable::seminorm1)
    }

    fn seminorm_by(&self, single: fn(&FactoredTerm) -> f64, expanded: fn(&Observable) -> f64) -> f64 {
        match self.terms.as_slice() {
            [] => 0.0,
            [t] => single(t),
            terms => match self.expand(FACTORED_EXPANSION_LIMIT) {
                Ok(obs) => expanded(&obs),
                Err(_) => terms.iter().map(single).sum(),
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FactoredObservableFile = serde_json::from_str(text)?;
        let terms = file.terms.into_iter().map(|t| FactoredTerm { coeff: t.coeff, factors: t.factors }).collect();
        Self::new(file.n_qubits, terms)
    }

    pub fn to_json(&self) -> String {
        let file = FactoredObservableFile {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| FactoredTermFile { coeff: t.coeff, factors: t.factors.clone() })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("factored observable serializes")
    }
}

// For a product c ⊗_k O_k the pair weights factor per qubit: summing
// w(s,s')|a_s||a_s'| over (s,s') in {I,X,Y,Z}^2 gives
// a0^2 + 2|a0|(|ax|+|ay|+|az|) + 3(ax^2+ay^2+az^2). Rows and columns of the
// identity string are then removed.
fn single_term_seminorm(t: &FactoredTerm) -> f64 {
    let mut all = 1.0;
    let mut id_row = 1.0;
    let mut id_sq = 1.0;
    for f in &t.factors {
        let [a0, ax, ay, az] = f.coeffs.map(f64::abs);
        let abs_sum = ax + ay + az;
        all *= a0 * a0 + 2.0 * a0 * abs_sum + 3.0 * (ax * ax + ay * ay + az * az);
        id_row *= a0 * (a0 + abs_sum);
        id_sq *= a0 * a0;
    }
    (t.coeff * t.coeff * (all - 2.0 * id_row + id_sq)).max(0.0).sqrt()
}

fn single_term_seminorm1(t: &FactoredTerm) -> f64 {
    let sqrt3 = 3f64.sqrt();
    let mut all = 1.0;
    let mut id = 1.0;
    for f in &t.factors {
        let [a0, ax, ay, az] = f.coeffs.map(f64::abs);
        all *= a0 + sqrt3 * (ax + ay + az);
        id *= a0;
    }
    t.coeff.abs() * (all - id).max(0.0)
}

fn check_bits(bits: &[u8]) -> Result<()> {
    if bits.is_empty() {
        return Err(Error::NoQubits);
    }
    if let Some(&b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidConfig(format!("bitstring entries must be 0 or 1, got {b}")));
    }
    Ok(())
}

/// `|x><x| = ⊗_k (1 ± Z)/2`, with `+` for bit 0 (outcome `m = +1`).
pub fn projector_factored(bits: &[u8]) -> Result<FactoredObservable> {
    check_bits(bits)?;
    let factors = bits
        .iter()
        .map(|&b| SingleQubitOperator::new(0.5, 0.0, 0.0, if b == 0 { 0.5 } else { -0.5 }))
        .collect();
    FactoredObservable::new(bits.len(), vec![FactoredTerm { coeff: 1.0, factors }])
}

/// Explicit expansion of `|x><x|` over the `2^N` strings in `{I,Z}^N`.
pub fn projector_pauli_expansion(bits: &[u8]) -> Result<Observable> {
    projector_pauli_expansion_capped(bits, PROJECTOR_EXPANSION_CAP)
}

pub fn projector_pauli_expansion_capped(bits: &[u8], cap: usize) -> Result<Observable> {
    check_bits(bits)?;
    let n = bits.len();
    if n > cap {
        return Err(Error::CapExceeded { what: "projector Pauli expansion", n, cap });
    }
    let scale = 0.5f64.powi(n as i32);
    let terms = (0usize..1 << n).map(|mask| {
        let mut sign = 1.0;
        let mut support = Vec::new();
        for (q, &b) in bits.iter().enumerate() {
            if mask >> q & 1 == 1 {
                support.push((q, PauliAxis::Z));
                if b == 1 {
                    sign = -sign;
                }
            }
        }
        (sign * scale, PauliString::new(n, support).expect("qubits in range"))
    });
    Observable::new(n, terms)
}

#[derive(Debug, Serialize, Deserialize)]
struct TermFile {
    coeff: f64,
    pauli: String,
}

/// On-disk observable layout: `{"n_qubits": N, "terms": [{"coeff": c, "pauli": "XIZ"}]}`.
#[derive(Debug, Serialize, Deserialize)]
struct ObservableFile {
    n_qubits: usize,
    terms: Vec<TermFile>,
}

impl From<&Observable> for ObservableFile {
    fn from(o: &Observable) -> Self {
        Self {
            n_qubits: o.n_qubits,
            terms: o.terms.iter().map(|t| TermFile { coeff: t.coeff, pauli: t.pauli.label() }).collect(),
        }
    }
}

impl TryFrom<ObservableFile> for Observable {
    type Error = Error;

    fn try_from(file: ObservableFile) -> Result<Self> {
        let terms = file
            .terms
            .into_iter()
            .map(|t| {
                let p = PauliString::from_label(&t.pauli)?;
                if p.n_qubits() != file.n_qubits {
                    return Err(Error::QubitCountMismatch { expected: file.n_qubits, found: p.n_qubits() });
                }
                Ok((t.coeff, p))
            })
            .collect::<Result<Vec<_>>>()?;
        Observable::new(file.n_qubits, terms)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FactoredTermFile {
    coeff: f64,
    factors: Vec<SingleQubitOperator>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FactoredObservableFile {
    n_qubits: usize,
    terms: Vec<FactoredTermFile>,
}
