//! Packed GF(2) vectors and column-major bit matrices.
//!
//! Bits are stored LSB-first in little-endian `u64` words, which serializes
//! to the LSB-first-within-byte wire layout by truncating `to_le_bytes`.
//! Every bit at a position `>= len` is kept zero.

use std::fmt;

use rand::RngCore;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[inline]
pub(crate) fn bytes_for(bits: usize) -> usize {
    bits.div_ceil(8)
}

/// A packed binary vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    /// Vector with a single set bit at 0-based `pos`.
    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(pos, true);
        v
    }

    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words = vec![0u64; words_for(len)];
        for w in &mut words {
            *w = rng.next_u64();
        }
        Self::from_words(len, words)
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        Self { len, words }
    }

    /// Parses a string of `'0'`/`'1'`; character `k` becomes bit `k`.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                '_' | ' ' => {}
                other => {
                    return Err(Error::Param(format!("invalid bit character {other:?}")));
                }
            }
        }
        Ok(Self::from_bits(bits))
    }

    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    /// Reads `len` bits from LSB-first packed bytes. Missing bytes read as zero
    /// and bits past `len` are discarded.
    pub fn from_bytes(len: usize, bytes: &[u8]) -> Self {
        let mut words = vec![0u64; words_for(len)];
        for (k, chunk) in bytes.chunks(8).take(words.len()).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words[k] = u64::from_le_bytes(buf);
        }
        Self::from_words(len, words)
    }

    /// Packed LSB-first bytes, `ceil(len / 8)` of them.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(bytes_for(self.len));
        self.write_bytes(&mut out);
        out
    }

    pub(crate) fn write_bytes(&self, out: &mut Vec<u8>) {
        write_packed(&self.words, self.len, out);
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit index {pos} out of range {}", self.len);
        (self.words[pos / WORD] >> (pos % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, pos: usize, bit: bool) {
        assert!(pos < self.len, "bit index {pos} out of range {}", self.len);
        let mask = 1u64 << (pos % WORD);
        if bit {
            self.words[pos / WORD] |= mask;
        } else {
            self.words[pos / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, pos: usize) {
        assert!(pos < self.len, "bit index {pos} out of range {}", self.len);
        self.words[pos / WORD] ^= 1 << (pos % WORD);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// XOR of all bits.
    pub fn parity(&self) -> bool {
        self.words.iter().fold(0u64, |acc, w| acc ^ w).count_ones() & 1 == 1
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        check_len(self.len, other.len)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(Self {
            len: self.len,
            words,
        })
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        check_len(self.len, other.len)?;
        xor_words_into(&mut self.words, &other.words);
        Ok(())
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        check_len(self.len, other.len)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        Ok(Self {
            len: self.len,
            words,
        })
    }

    pub fn inner_product(&self, other: &Self) -> Result<bool> {
        check_len(self.len, other.len)?;
        Ok(inner_product_words(&self.words, &other.words))
    }

    /// Copies `count` bits starting at `offset` into a new vector.
    pub fn extract(&self, offset: usize, count: usize) -> Self {
        assert!(offset + count <= self.len, "extract past end of vector");
        let mut out = Self::zeros(count);
        copy_bits(&self.words, offset, &mut out.words, 0, count);
        out
    }

    /// Overwrites `src.len()` bits starting at `offset` with `src`.
    pub fn splice(&mut self, offset: usize, src: &Self) {
        assert!(offset + src.len <= self.len, "splice past end of vector");
        copy_bits(&src.words, 0, &mut self.words, offset, src.len);
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        out.splice(0, self);
        out.splice(self.len, other);
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[inline]
fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn xor_words_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
pub(crate) fn inner_product_words(a: &[u64], b: &[u64]) -> bool {
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    acc.count_ones() & 1 == 1
}

pub(crate) fn write_packed(words: &[u64], bits: usize, out: &mut Vec<u8>) {
    let mut remaining = bytes_for(bits);
    for w in words {
        if remaining == 0 {
            break;
        }
        let bytes = w.to_le_bytes();
        let take = remaining.min(8);
        out.extend_from_slice(&bytes[..take]);
        remaining -= take;
    }
}

pub(crate) fn copy_bits(src: &[u64], src_off: usize, dst: &mut [u64], dst_off: usize, count: usize) {
    let mut done = 0;
    while done < count {
        let s = src_off + done;
        let d = dst_off + done;
        let s_shift = s % WORD;
        let d_shift = d % WORD;
        let chunk = (count - done).min(WORD - s_shift).min(WORD - d_shift);
        let mask = if chunk == WORD {
            u64::MAX
        } else {
            (1u64 << chunk) - 1
        };
        let bits = (src[s / WORD] >> s_shift) & mask;
        let slot = &mut dst[d / WORD];
        *slot = (*slot & !(mask << d_shift)) | (bits << d_shift);
        done += chunk;
    }
}

/// `a ⊕ b`.
pub fn xor_vec(a: &BitVector, b: &BitVector) -> Result<BitVector> {
    a.xor(b)
}

/// `a ⊙ b`, the bitwise AND.
pub fn and_vec(a: &BitVector, b: &BitVector) -> Result<BitVector> {
    a.and(b)
}

/// `c ⊙ a`: the zero vector when `c` is 0, a copy of `a` otherwise.
pub fn scalar_and(c: bool, a: &BitVector) -> BitVector {
    if c {
        a.clone()
    } else {
        BitVector::zeros(a.len())
    }
}

/// `a ⊗ b`, the GF(2) inner product.
pub fn inner_product(a: &BitVector, b: &BitVector) -> Result<bool> {
    a.inner_product(b)
}

pub fn parity(a: &BitVector) -> bool {
    a.parity()
}

/// XOR of the rows of `m` selected by the set bits of `w`.
pub fn combine_rows(m: &BitMatrix, w: &BitVector) -> Result<BitVector> {
    m.combine_rows(w)
}

pub fn transpose(m: &BitMatrix) -> BitMatrix {
    m.transpose()
}

/// A binary matrix stored column by column, each column packed into
/// `ceil(rows / 64)` contiguous words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    col_words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let col_words = words_for(rows);
        Self {
            rows,
            cols,
            col_words,
            data: vec![0; col_words * cols],
        }
    }

    pub fn random<R: RngCore + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        for c in 0..cols {
            let v = BitVector::random(rows, rng);
            m.set_column(c, &v).expect("column length matches");
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from its columns; all must share one length.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            m.set_column(c, col)?;
        }
        Ok(m)
    }

    /// Builds a matrix from its rows; all must share one length.
    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Result<Self> {
        Ok(Self::from_columns(cols, rows)?.transpose())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        (self.data[c * self.col_words + r / WORD] >> (r % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        let word = &mut self.data[c * self.col_words + r / WORD];
        let mask = 1u64 << (r % WORD);
        if bit {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    #[inline]
    pub fn column_words(&self, c: usize) -> &[u64] {
        &self.data[c * self.col_words..(c + 1) * self.col_words]
    }

    #[inline]
    pub(crate) fn column_words_mut(&mut self, c: usize) -> &mut [u64] {
        &mut self.data[c * self.col_words..(c + 1) * self.col_words]
    }

    pub fn column(&self, c: usize) -> BitVector {
        assert!(c < self.cols, "column index out of range");
        BitVector {
            len: self.rows,
            words: self.column_words(c).to_vec(),
        }
    }

    pub fn set_column(&mut self, c: usize, v: &BitVector) -> Result<()> {
        check_len(self.rows, v.len())?;
        assert!(c < self.cols, "column index out of range");
        self.column_words_mut(c).copy_from_slice(v.words());
        Ok(())
    }

    /// Row `r` gathered bit by bit; prefer [`BitMatrix::transpose`] for bulk access.
    pub fn row(&self, r: usize) -> BitVector {
        BitVector::from_bits((0..self.cols).map(|c| self.get(r, c)))
    }

    pub fn set_row(&mut self, r: usize, v: &BitVector) -> Result<()> {
        check_len(self.cols, v.len())?;
        for c in 0..self.cols {
            self.set(r, c, v.get(c));
        }
        Ok(())
    }

    /// XOR of the rows selected by `w`. Since storage is by column, bit `j`
    /// of the result is the inner product of `w` with column `j`.
    pub fn combine_rows(&self, w: &BitVector) -> Result<BitVector> {
        check_len(self.rows, w.len())?;
        let mut out = BitVector::zeros(self.cols);
        for c in 0..self.cols {
            if inner_product_words(self.column_words(c), w.words()) {
                out.set(c, true);
            }
        }
        Ok(out)
    }

    /// Parity of every row, i.e. the XOR of all columns.
    pub fn row_parities(&self) -> BitVector {
        let mut acc = vec![0u64; self.col_words];
        for c in 0..self.cols {
            xor_words_into(&mut acc, self.column_words(c));
        }
        BitVector {
            len: self.rows,
            words: acc,
        }
    }

    /// Blockwise transpose over 64×64 tiles.
    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.rows);
        let row_blocks = words_for(self.rows);
        let col_blocks = words_for(self.cols);
        let mut tile = [0u64; 64];
        for rb in 0..row_blocks {
            for cb in 0..col_blocks {
                let c0 = cb * WORD;
                let c_end = (c0 + WORD).min(self.cols);
                for (k, slot) in tile.iter_mut().enumerate() {
                    let c = c0 + k;
                    *slot = if c < c_end {
                        self.data[c * self.col_words + rb]
                    } else {
                        0
                    };
                }
                transpose64(&mut tile);
                let r0 = rb * WORD;
                let r_end = (r0 + WORD).min(self.rows);
                for (t, &word) in tile.iter().enumerate().take(r_end - r0) {
                    out.data[(r0 + t) * out.col_words + cb] = word;
                }
            }
        }
        out
    }

    /// Wire layout: `cols × ceil(rows/8)` bytes, column-major, each column
    /// LSB-first and zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.cols * bytes_for(self.rows));
        for c in 0..self.cols {
            write_packed(self.column_words(c), self.rows, &mut out);
        }
        out
    }

    pub fn from_bytes(rows: usize, cols: usize, bytes: &[u8]) -> Result<Self> {
        let per_col = bytes_for(rows);
        if bytes.len() != per_col * cols {
            return Err(Error::Dimension {
                expected: per_col * cols,
                found: bytes.len(),
            });
        }
        let mut m = Self::zeros(rows, cols);
        for (c, chunk) in bytes.chunks(per_col.max(1)).take(cols).enumerate() {
            let v = BitVector::from_bytes(rows, chunk);
            m.set_column(c, &v)?;
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(64) {
            writeln!(f, "  {}", self.row(r))?;
        }
        if self.rows > 64 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

/// In-place transpose of a 64×64 bit tile: word `k` is row `k`, bit `j` is
/// column `j`.
fn transpose64(a: &mut [u64; 64]) {
    let mut j = 32;
    let mut m: u64 = 0x0000_0000_FFFF_FFFF;
    while j != 0 {
        let mut k = 0;
        while k < 64 {
            let t = ((a[k] >> j) ^ a[k + j]) & m;
            a[k] ^= t << j;
            a[k + j] ^= t;
            k = (k + j + 1) & !j;
        }
        j >>= 1;
        m ^= m << j;
    }
}
