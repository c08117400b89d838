//! Binary and JSON encodings of an [`ApproximateState`].
//!
//! Binary layout, all little-endian:
//!
//! | field    | type        |
//! |----------|-------------|
//! | magic    | `b"AQST"`   |
//! | version  | u16         |
//! | N        | u32         |
//! | M        | u64         |
//! | p_err    | N x f64     |
//! | seed     | u64         |
//! | records  | M x N x (i8 m, f64 theta, f64 phi) |

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snapshot::{ApproximateState, Direction, NoiseModel, QubitSnapshot};

pub const MAGIC: [u8; 4] = *b"AQST";
pub const VERSION: u16 = 1;
/// Bytes per stored qubit measurement.
pub const RECORD_BYTES: usize = 1 + 8 + 8;

pub fn header_len(n_qubits: usize) -> usize {
    4 + 2 + 4 + 8 + 8 * n_qubits + 8
}

pub fn encoded_len(n_qubits: usize, shots: usize) -> usize {
    header_len(n_qubits) + RECORD_BYTES * n_qubits * shots
}

pub fn serialize(state: &ApproximateState) -> Vec<u8> {
    let n = state.n_qubits();
    let mut out = Vec::with_capacity(encoded_len(n, state.shots()));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(state.shots() as u64).to_le_bytes());
    for p in state.noise().probabilities() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out.extend_from_slice(&state.master_seed().to_le_bytes());
    for rec in state.records() {
        out.push(rec.outcome() as u8);
        out.extend_from_slice(&rec.direction().theta().to_le_bytes());
        out.extend_from_slice(&rec.direction().phi().to_le_bytes());
    }
    out
}

pub fn write_to<W: Write>(state: &ApproximateState, mut w: W) -> Result<()> {
    w.write_all(&serialize(state))?;
    Ok(())
}

pub fn read_from<R: Read>(mut r: R) -> Result<ApproximateState> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    deserialize(&buf)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take<const K: usize>(&mut self) -> Result<[u8; K]> {
        let end = self.pos + K;
        let slice = self.bytes.get(self.pos..end).ok_or(Error::Truncated { needed: end, found: self.bytes.len() })?;
        self.pos = end;
        Ok(slice.try_into().expect("slice has length K"))
    }

    fn u16(&mut self) -> Result<u16> {
        self.take().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> Result<u32> {
        self.take().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.take().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64> {
        self.take().map(f64::from_le_bytes)
    }
}

pub fn deserialize(bytes: &[u8]) -> Result<ApproximateState> {
    let mut c = Cursor { bytes, pos: 0 };
    let magic: [u8; 4] = c.take()?;
    if magic != MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let version = c.u16()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let n = c.u32()? as usize;
    let shots = usize::try_from(c.u64()?).map_err(|_| Error::Malformed("shot count overflows usize".into()))?;
    if n == 0 || shots == 0 {
        return Err(Error::Malformed(format!("empty state: N = {n}, M = {shots}")));
    }
    let needed = n
        .checked_mul(shots)
        .and_then(|nm| nm.checked_mul(RECORD_BYTES))
        .and_then(|b| b.checked_add(header_len(n)))
        .ok_or_else(|| Error::Malformed("declared size overflows".into()))?;
    if bytes.len() < needed {
        return Err(Error::Truncated { needed, found: bytes.len() });
    }
    if bytes.len() > needed {
        return Err(Error::Malformed(format!("{} trailing bytes", bytes.len() - needed)));
    }
    let p_err = (0..n).map(|_| c.f64()).collect::<Result<Vec<_>>>()?;
    let noise = NoiseModel::per_qubit(p_err)?;
    let seed = c.u64()?;
    let mut records = Vec::with_capacity(n * shots);
    for _ in 0..n * shots {
        let [m] = c.take::<1>()?;
        let theta = c.f64()?;
        let phi = c.f64()?;
        records.push(QubitSnapshot::new(m as i8, Direction::new(theta, phi)?)?);
    }
    ApproximateState::from_parts(n, records, seed, noise)
}

/// JSON export: `{"format", "version", "n_qubits", "shots", "seed", "p_err",
/// "snapshots": [[[m, theta, phi], ...], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
struct JsonState {
    format: String,
    version: u16,
    n_qubits: usize,
    shots: usize,
    seed: u64,
    p_err: Vec<f64>,
    snapshots: Vec<Vec<(i8, f64, f64)>>,
}

pub fn to_json(state: &ApproximateState) -> String {
    let doc = JsonState {
        format: "AQST".into(),
        version: VERSION,
        n_qubits: state.n_qubits(),
        shots: state.shots(),
        seed: state.master_seed(),
        p_err: state.noise().probabilities().to_vec(),
        snapshots: state
            .snapshots()
            .map(|s| s.iter().map(|q| (q.outcome(), q.direction().theta(), q.direction().phi())).collect())
            .collect(),
    };
    serde_json::to_string(&doc).expect("snapshot JSON serializes")
}

pub fn from_json(text: &str) -> Result<ApproximateState> {
    let doc: JsonState = serde_json::from_str(text)?;
    if doc.snapshots.len() != doc.shots {
        return Err(Error::LengthMismatch { expected: doc.shots, found: doc.snapshots.len() });
    }
    let mut records = Vec::with_capacity(doc.n_qubits * doc.shots);
    for s in doc.snapshots {
        if s.len() != doc.n_qubits {
            return Err(Error::QubitCountMismatch { expected: doc.n_qubits, found: s.len() });
        }
        for (m, theta, phi) in s {
            records.push(QubitSnapshot::new(m, Direction::new(theta, phi)?)?);
        }
    }
    ApproximateState::from_parts(doc.n_qubits, records, doc.seed, NoiseModel::per_qubit(doc.p_err)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::snapshot::acquire_snapshots;
    use crate::statevector::Statevector;

    fn sample_state() -> ApproximateState {
        let psi = Statevector::haar_random(3, &mut rng::stream(1, 0)).unwrap();
        acquire_snapshots(&psi, 25, 77, &NoiseModel::per_qubit(vec![0.0, 0.1, 0.25]).unwrap()).unwrap()
    }

    #[test]
    fn binary_round_trip_and_size() {
        let s = sample_state();
        let bytes = serialize(&s);
        assert_eq!(bytes.len(), header_len(3) + 17 * 25 * 3);
        assert_eq!(&bytes[..4], b"AQST");
        assert_eq!(deserialize(&bytes).unwrap(), s);
    }

    #[test]
    fn format_errors() {
        let bytes = serialize(&sample_state());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(deserialize(&bad), Err(Error::BadMagic(_))));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(deserialize(&bad), Err(Error::UnsupportedVersion(9))));
        assert!(matches!(deserialize(&bytes[..bytes.len() - 1]), Err(Error::Truncated { .. })));
        assert!(matches!(deserialize(&bytes[..3]), Err(Error::Truncated { .. })));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(deserialize(&long), Err(Error::Malformed(_))));
        let mut bad = bytes.clone();
        bad[header_len(3)] = 0;
        assert!(matches!(deserialize(&bad), Err(Error::InvalidOutcome(0))));
    }

    #[test]
    fn json_round_trip() {
        let s = sample_state();
        assert_eq!(from_json(&to_json(&s)).unwrap(), s);
    }
}
