use rand::RngCore;

use crate::bitops::{bytes_for, copy_bits, words_for, BitVector};
use crate::error::{Error, Result};

/// A `rows × n` table of `ell`-bit values, packed contiguously: value
/// `(i, j)` occupies bits `[(i·n + j)·ell, (i·n + j + 1)·ell)`, LSB-first.
/// This is also the `MSG_MASKED` wire layout.
#[derive(Clone, PartialEq, Eq)]
pub struct ValueTable {
    rows: usize,
    n: usize,
    ell: usize,
    words: Vec<u64>,
}

/// The sender's `m` tuples `x_{i,1..n}`.
pub type SenderInputs = ValueTable;
/// The masked values `y_{i,j}`.
pub type MaskedBlock = ValueTable;

impl ValueTable {
    pub fn zeros(rows: usize, n: usize, ell: usize) -> Self {
        Self {
            rows,
            n,
            ell,
            words: vec![0; words_for(rows * n * ell)],
        }
    }

    pub fn random<R: RngCore + ?Sized>(rows: usize, n: usize, ell: usize, rng: &mut R) -> Self {
        let v = BitVector::random(rows * n * ell, rng);
        Self {
            rows,
            n,
            ell,
            words: v.words().to_vec(),
        }
    }

    /// Builds a table from `rows` lists of `n` values each.
    pub fn from_values(n: usize, ell: usize, values: &[Vec<BitVector>]) -> Result<Self> {
        let mut t = Self::zeros(values.len(), n, ell);
        for (i, row) in values.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                t.set(i, j, v)?;
            }
        }
        Ok(t)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    fn bits(&self) -> usize {
        self.rows * self.n * self.ell
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        assert!(i < self.rows && j < self.n, "value ({i}, {j}) out of range");
        (i * self.n + j) * self.ell
    }

    /// Value `(i, j)`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> BitVector {
        let mut buf = vec![0u8; bytes_for(self.ell)];
        self.read_value(i, j, &mut buf);
        BitVector::from_bytes(self.ell, &buf)
    }

    pub fn set(&mut self, i: usize, j: usize, v: &BitVector) -> Result<()> {
        if v.len() != self.ell {
            return Err(Error::Dimension {
                expected: self.ell,
                found: v.len(),
            });
        }
        let off = self.offset(i, j);
        let cur = self.get(i, j);
        let delta = cur.xor(v)?;
        self.xor_bytes_at(off, &delta.to_bytes());
        Ok(())
    }

    /// XORs up to `ell` bits from `bytes` (LSB-first) into value `(i, j)`.
    /// `bytes` must already be masked to `ell` bits.
    pub(crate) fn xor_value(&mut self, i: usize, j: usize, bytes: &[u8]) {
        let off = self.offset(i, j);
        self.xor_bytes_at(off, bytes);
    }

    /// Copies value `(i, j)` into `out` as `ceil(ell/8)` bytes.
    pub(crate) fn read_value(&self, i: usize, j: usize, out: &mut [u8]) {
        let off = self.offset(i, j);
        let nbytes = bytes_for(self.ell);
        for (k, slot) in out.iter_mut().enumerate().take(nbytes) {
            let pos = off + 8 * k;
            let w = pos / 64;
            let sh = pos % 64;
            let mut b = self.words[w] >> sh;
            if sh > 56 && w + 1 < self.words.len() {
                b |= self.words[w + 1] << (64 - sh);
            }
            let width = (self.ell - 8 * k).min(8);
            *slot = (b as u8) & (((1u16 << width) - 1) as u8);
        }
    }

    fn xor_bytes_at(&mut self, off: usize, bytes: &[u8]) {
        for (k, &b) in bytes.iter().enumerate() {
            if b == 0 {
                continue;
            }
            let pos = off + 8 * k;
            let w = pos / 64;
            let sh = pos % 64;
            self.words[w] ^= (b as u64) << sh;
            if sh > 56 {
                let hi = (b as u64) >> (64 - sh);
                if hi != 0 {
                    self.words[w + 1] ^= hi;
                }
            }
        }
    }

    /// Rows `[start, start + count)` as a new table.
    pub fn slice_rows(&self, start: usize, count: usize) -> Self {
        assert!(start + count <= self.rows, "row slice out of range");
        let width = self.n * self.ell;
        let mut words = vec![0u64; words_for(count * width)];
        copy_bits(&self.words, start * width, &mut words, 0, count * width);
        Self {
            rows: count,
            n: self.n,
            ell: self.ell,
            words,
        }
    }

    /// Appends the rows of `other` (same `n`, `ell`).
    pub fn append(&mut self, other: &Self) -> Result<()> {
        if other.n != self.n || other.ell != self.ell {
            return Err(Error::Dimension {
                expected: self.n * self.ell,
                found: other.n * other.ell,
            });
        }
        let mut v = BitVector::from_words(self.bits(), std::mem::take(&mut self.words));
        v = v.concat(&BitVector::from_words(other.bits(), other.words.clone()));
        self.rows += other.rows;
        self.words = v.words().to_vec();
        Ok(())
    }

    /// `ceil(rows·n·ell/8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        BitVector::from_words(self.bits(), self.words.clone()).to_bytes()
    }

    pub fn from_bytes(rows: usize, n: usize, ell: usize, bytes: &[u8]) -> Result<Self> {
        let bits = rows * n * ell;
        if bytes.len() != bytes_for(bits) {
            return Err(Error::Dimension {
                expected: bytes_for(bits),
                found: bytes.len(),
            });
        }
        let v = BitVector::from_bytes(bits, bytes);
        Ok(Self {
            rows,
            n,
            ell,
            words: v.words().to_vec(),
        })
    }

    /// Wire size of a table with these dimensions.
    pub fn wire_len(rows: usize, n: usize, ell: usize) -> usize {
        bytes_for(rows * n * ell)
    }
}

impl std::fmt::Debug for ValueTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ValueTable({}x{} of {} bits)", self.rows, self.n, self.ell)
    }
}

/// Choice integers `r_i ∈ [1, n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceVector(Vec<usize>);

impl ChoiceVector {
    pub fn new(choices: Vec<usize>, n: usize) -> Result<Self> {
        if let Some((i, &r)) = choices.iter().enumerate().find(|(_, &r)| r == 0 || r > n) {
            return Err(Error::Input(format!(
                "choice r_{} = {r} outside [1, {n}]",
                i + 1
            )));
        }
        Ok(Self(choices))
    }

    pub fn random<R: RngCore + ?Sized>(m: usize, n: usize, rng: &mut R) -> Self {
        Self((0..m).map(|_| 1 + (rng.next_u64() % n as u64) as usize).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One check iteration: codeword index `alpha ∈ [1, κ]` and parity bit `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckTuple {
    pub alpha: usize,
    pub b: bool,
}

pub const CHECK_TUPLE_LEN: usize = 3;

impl CheckTuple {
    pub fn encode_all(tuples: &[CheckTuple]) -> Vec<u8> {
        let mut out = Vec::with_capacity(tuples.len() * CHECK_TUPLE_LEN);
        for t in tuples {
            out.extend_from_slice(&(t.alpha as u16).to_le_bytes());
            out.push(t.b as u8);
        }
        out
    }

    /// Parses `MSG_CHECKS`; the alpha range is checked later against κ.
    pub fn decode_all(bytes: &[u8]) -> Result<Vec<CheckTuple>> {
        if !bytes.len().is_multiple_of(CHECK_TUPLE_LEN) {
            return Err(Error::Protocol(format!(
                "check payload of {} bytes is not a multiple of {CHECK_TUPLE_LEN}",
                bytes.len()
            )));
        }
        bytes
            .chunks_exact(CHECK_TUPLE_LEN)
            .map(|c| {
                let b = match c[2] {
                    0 => false,
                    1 => true,
                    v => return Err(Error::Protocol(format!("check bit byte {v} not 0 or 1"))),
                };
                Ok(CheckTuple {
                    alpha: u16::from_le_bytes([c[0], c[1]]) as usize,
                    b,
                })
            })
            .collect()
    }
}
