//! Walsh-Hadamard codes of length κ over GF(2).
//!
//! Codeword `c_j` (1-based, `j ∈ [1, κ]`) is the encoding of the message
//! `j - 1`; position `p` (0-based) of `WH(x)` is the inner product of `x` with
//! the binary representation of `p`. So `c_1` is the zero codeword and the
//! bits of `c_j` at positions `1, 2, 4, ...` spell out `j - 1` in binary.
//!
//! Index sets follow the 1-based position convention used throughout the
//! protocol description: `hdi` returns positions in `[1, len]` and `prune`
//! consumes them.

use std::collections::BTreeSet;

use crate::bitops::BitVector;
use crate::error::{Error, Result};

/// `WH(x)` for a `log2(κ)`-bit message `x`, given as an integer `< κ`.
pub fn wh_encode(x: usize, kappa: usize) -> Result<BitVector> {
    check_kappa(kappa)?;
    if x >= kappa {
        return Err(Error::Param(format!(
            "message {x} does not fit in log2({kappa}) bits"
        )));
    }
    Ok(BitVector::from_bits(
        (0..kappa).map(|pos| (x & pos).count_ones() & 1 == 1),
    ))
}

fn check_kappa(kappa: usize) -> Result<()> {
    if kappa < 2 || !kappa.is_power_of_two() {
        return Err(Error::Param(format!(
            "code length {kappa} must be a power of two >= 2"
        )));
    }
    if kappa > u16::MAX as usize {
        return Err(Error::Param(format!("code length {kappa} too large")));
    }
    Ok(())
}

/// The code `C_WH^κ = {c_1, ..., c_κ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhCode {
    kappa: usize,
    codewords: Vec<BitVector>,
}

impl WhCode {
    pub fn new(kappa: usize) -> Result<Self> {
        check_kappa(kappa)?;
        let codewords = (0..kappa)
            .map(|x| wh_encode(x, kappa))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kappa, codewords })
    }

    #[inline]
    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn log_kappa(&self) -> u32 {
        self.kappa.trailing_zeros()
    }

    /// Codeword `c_j`, 1-based.
    pub fn codeword(&self, j: usize) -> Result<&BitVector> {
        if j == 0 || j > self.kappa {
            return Err(Error::Param(format!(
                "codeword index {j} outside [1, {}]",
                self.kappa
            )));
        }
        Ok(&self.codewords[j - 1])
    }

    pub fn codewords(&self) -> &[BitVector] {
        &self.codewords
    }

    /// 1-based index `j` with `v == c_j`, if any.
    pub fn is_codeword(&self, v: &BitVector) -> Result<Option<usize>> {
        if v.len() != self.kappa {
            return Err(Error::Dimension {
                expected: self.kappa,
                found: v.len(),
            });
        }
        // The only candidate is the message read off the power-of-two positions.
        let mut x = 0usize;
        for t in 0..self.log_kappa() {
            if v.get(1 << t) {
                x |= 1 << t;
            }
        }
        Ok((self.codewords[x] == *v).then_some(x + 1))
    }

    /// Closest codeword by Hamming distance, ties broken towards the lower
    /// index. Returns `(index, distance)`.
    pub fn nearest(&self, v: &BitVector) -> Result<(usize, usize)> {
        if v.len() != self.kappa {
            return Err(Error::Dimension {
                expected: self.kappa,
                found: v.len(),
            });
        }
        let mut best = (1, usize::MAX);
        for (k, c) in self.codewords.iter().enumerate() {
            let d = c.xor(v)?.count_ones();
            if d < best.1 {
                best = (k + 1, d);
            }
        }
        Ok(best)
    }
}

pub fn build_code(kappa: usize) -> Result<WhCode> {
    WhCode::new(kappa)
}

/// Sorted, deduplicated 1-based positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Validates every position against `[1, bound]`.
    pub fn new<I: IntoIterator<Item = usize>>(positions: I, bound: usize) -> Result<Self> {
        let set: BTreeSet<usize> = positions.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&p| p == 0 || p > bound) {
            return Err(Error::Param(format!(
                "index {bad} outside [1, {bound}]"
            )));
        }
        Ok(Self(set.into_iter().collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.0.binary_search(&pos).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &Self) -> Self {
        let set: BTreeSet<usize> = self.iter().chain(other.iter()).collect();
        Self(set.into_iter().collect())
    }
}

/// `HDI(u, v)`: 1-based positions where `u` and `v` differ.
pub fn hdi(u: &BitVector, v: &BitVector) -> Result<IndexSet> {
    let diff = u.xor(v)?;
    let mut out = Vec::with_capacity(diff.count_ones());
    for (w, &word) in diff.words().iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            out.push(w * 64 + b + 1);
            bits &= bits - 1;
        }
    }
    Ok(IndexSet(out))
}

/// `PRN_I(v)`: `v` with the positions in `I` removed, order preserved.
pub fn prune(v: &BitVector, pruned: &IndexSet) -> Result<BitVector> {
    if let Some(&last) = pruned.0.last() {
        if last > v.len() {
            return Err(Error::Param(format!(
                "prune index {last} outside vector of length {}",
                v.len()
            )));
        }
    }
    Ok(BitVector::from_bits(
        (0..v.len())
            .filter(|&p| !pruned.contains(p + 1))
            .map(|p| v.get(p)),
    ))
}

/// `PRN_T(C_WH^κ)`: every codeword with the positions in `T` removed.
#[derive(Clone, Debug)]
pub struct PrunedCode<'a> {
    base: &'a WhCode,
    pruned_at: IndexSet,
    pruned_codewords: Vec<BitVector>,
}

impl<'a> PrunedCode<'a> {
    pub fn new(base: &'a WhCode, pruned_at: IndexSet) -> Result<Self> {
        let pruned_codewords = base
            .codewords()
            .iter()
            .map(|c| prune(c, &pruned_at))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            base,
            pruned_at,
            pruned_codewords,
        })
    }

    pub fn base(&self) -> &WhCode {
        self.base
    }

    pub fn pruned_at(&self) -> &IndexSet {
        &self.pruned_at
    }

    pub fn pruned_codewords(&self) -> &[BitVector] {
        &self.pruned_codewords
    }

    pub fn pruned_len(&self) -> usize {
        self.base.kappa() - self.pruned_at.len()
    }
}

/// The unique `r` with `PRN_T(c_r) == v`, or `None`. Exact matching only;
/// errors when `|T| >= κ/2`, where uniqueness is no longer guaranteed.
pub fn decode_pruned(v: &BitVector, pc: &PrunedCode<'_>) -> Result<Option<usize>> {
    let half = pc.base.kappa() / 2;
    if pc.pruned_at.len() >= half {
        return Err(Error::Ambiguity {
            pruned: pc.pruned_at.len(),
            half,
        });
    }
    if v.len() != pc.pruned_len() {
        return Err(Error::Dimension {
            expected: pc.pruned_len(),
            found: v.len(),
        });
    }
    Ok(pc
        .pruned_codewords
        .iter()
        .position(|c| c == v)
        .map(|k| k + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearityVerdict {
    Accept,
    Reject,
}

/// Randomized linearity test for many strings: compress `strings` with the
/// combiner bits and accept iff the result is a codeword.
pub fn linearity_test(
    code: &WhCode,
    strings: &[BitVector],
    combiner: &BitVector,
) -> Result<LinearityVerdict> {
    let y = combine(code.kappa(), strings, combiner)?;
    Ok(match code.is_codeword(&y)? {
        Some(_) => LinearityVerdict::Accept,
        None => LinearityVerdict::Reject,
    })
}

/// The same test against a pruned code.
pub fn pruned_linearity_test(
    pc: &PrunedCode<'_>,
    strings: &[BitVector],
    combiner: &BitVector,
) -> Result<LinearityVerdict> {
    let y = combine(pc.pruned_len(), strings, combiner)?;
    Ok(if pc.pruned_codewords.contains(&y) {
        LinearityVerdict::Accept
    } else {
        LinearityVerdict::Reject
    })
}

fn combine(len: usize, strings: &[BitVector], combiner: &BitVector) -> Result<BitVector> {
    if combiner.len() != strings.len() {
        return Err(Error::Dimension {
            expected: strings.len(),
            found: combiner.len(),
        });
    }
    let mut y = BitVector::zeros(len);
    for (k, s) in strings.iter().enumerate() {
        if combiner.get(k) {
            y.xor_assign(s)?;
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{seq::index::sample, Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn bv(s: &str) -> BitVector {
        BitVector::from_bit_str(s).unwrap()
    }

    fn hamming(a: &BitVector, b: &BitVector) -> usize {
        a.iter().zip(b.iter()).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(wh_encode(0b00, 4).unwrap(), bv("0000"));
        assert_eq!(wh_encode(0b10, 4).unwrap(), bv("0011"));
        assert_eq!(wh_encode(0b01, 4).unwrap(), bv("0101"));
        assert!(wh_encode(0, 6).is_err());
        assert!(wh_encode(4, 4).is_err());
        assert!(WhCode::new(1).is_err());
    }

    #[test]
    fn build_code_examples() {
        let c2 = build_code(2).unwrap();
        assert_eq!(c2.codewords(), &[bv("00"), bv("01")]);
        for (kappa, dist) in [(4, 2), (8, 4)] {
            let code = build_code(kappa).unwrap();
            assert_eq!(code.codewords().len(), kappa);
            let min = (0..kappa)
                .flat_map(|a| ((a + 1)..kappa).map(move |b| (a, b)))
                .map(|(a, b)| hamming(&code.codewords()[a], &code.codewords()[b]))
                .min()
                .unwrap();
            assert_eq!(min, dist);
        }
        assert!(build_code(12).is_err());
    }

    #[test]
    fn hdi_examples() {
        assert!(hdi(&bv("1010"), &bv("1010")).unwrap().is_empty());
        assert_eq!(hdi(&bv("1010"), &bv("0010")).unwrap().as_slice(), &[1]);
        assert_eq!(
            hdi(&bv("0000"), &bv("1111")).unwrap().as_slice(),
            &[1, 2, 3, 4]
        );
        assert!(hdi(&bv("0"), &bv("00")).is_err());
    }

    #[test]
    fn prune_examples() {
        let v = bv("1011");
        assert_eq!(prune(&v, &IndexSet::empty()).unwrap(), v);
        assert_eq!(
            prune(&v, &IndexSet::new([1], 4).unwrap()).unwrap(),
            bv("011")
        );
        assert_eq!(
            prune(&v, &IndexSet::new([2, 4], 4).unwrap()).unwrap(),
            bv("11")
        );
        assert!(prune(&v, &IndexSet::new([5], 5).unwrap()).is_err());
        assert!(IndexSet::new([0], 4).is_err());
    }

    #[test]
    fn is_codeword_examples() {
        let code = WhCode::new(4).unwrap();
        assert_eq!(code.is_codeword(&bv("0000")).unwrap(), Some(1));
        assert_eq!(
            code.is_codeword(&wh_encode(0b10, 4).unwrap()).unwrap(),
            Some(3)
        );
        assert_eq!(code.is_codeword(&bv("0001")).unwrap(), None);
        assert!(code.is_codeword(&bv("000")).is_err());
    }

    #[test]
    fn is_codeword_agrees_with_exhaustive_scan() {
        let code = WhCode::new(8).unwrap();
        for x in 0u32..256 {
            let v = BitVector::from_bits((0..8).map(|k| x >> k & 1 == 1));
            let scan = code.codewords().iter().position(|c| *c == v).map(|k| k + 1);
            assert_eq!(code.is_codeword(&v).unwrap(), scan);
        }
    }

    #[test]
    fn decode_pruned_examples() {
        let code = WhCode::new(4).unwrap();
        let t = IndexSet::new([1], 4).unwrap();
        let pc = PrunedCode::new(&code, t.clone()).unwrap();
        let v = prune(code.codeword(3).unwrap(), &t).unwrap();
        assert_eq!(decode_pruned(&v, &pc).unwrap(), Some(3));

        let code8 = WhCode::new(8).unwrap();
        let empty = PrunedCode::new(&code8, IndexSet::empty()).unwrap();
        for x in 0u32..256 {
            let v = BitVector::from_bits((0..8).map(|k| x >> k & 1 == 1));
            assert_eq!(
                decode_pruned(&v, &empty).unwrap(),
                code8.is_codeword(&v).unwrap()
            );
        }

        let big = PrunedCode::new(&code, IndexSet::new([1, 2], 4).unwrap()).unwrap();
        assert!(matches!(
            decode_pruned(&bv("00"), &big),
            Err(Error::Ambiguity { .. })
        ));
    }

    #[test]
    fn decode_pruned_rejects_far_vectors_exhaustively() {
        // Exhaustive at κ = 8, T = {1}: a length-7 vector decodes iff it is
        // at pruned distance zero from some pruned codeword.
        let code = WhCode::new(8).unwrap();
        let t = IndexSet::new([1], 8).unwrap();
        let pc = PrunedCode::new(&code, t).unwrap();
        let mut none_count = 0;
        for x in 0u32..128 {
            let v = BitVector::from_bits((0..7).map(|k| x >> k & 1 == 1));
            let min_dist = pc
                .pruned_codewords()
                .iter()
                .map(|c| hamming(c, &v))
                .min()
                .unwrap();
            let decoded = decode_pruned(&v, &pc).unwrap();
            assert_eq!(decoded.is_none(), min_dist >= 1);
            none_count += usize::from(decoded.is_none());
        }
        assert_eq!(none_count, 128 - 8);
    }

    #[test]
    fn linearity_is_exhaustive_at_small_kappa() {
        for kappa in [4, 8, 16] {
            for x in 0..kappa {
                for y in 0..kappa {
                    let lhs = wh_encode(x ^ y, kappa).unwrap();
                    let rhs = wh_encode(x, kappa)
                        .unwrap()
                        .xor(&wh_encode(y, kappa).unwrap())
                        .unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn closure_under_xor() {
        let code = WhCode::new(8).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..200 {
            let mut acc = BitVector::zeros(8);
            for _ in 0..rng.gen_range(1..6) {
                acc.xor_assign(code.codeword(rng.gen_range(1..=8)).unwrap())
                    .unwrap();
            }
            assert!(code.is_codeword(&acc).unwrap().is_some());
        }
        // codeword ⊕ non-codeword of weight ≤ 2 is never a codeword
        for c in code.codewords() {
            for a in 0..8 {
                for b in a..8 {
                    let mut e = BitVector::unit(8, a);
                    if b != a {
                        e.flip(b);
                    }
                    if code.is_codeword(&e).unwrap().is_some() {
                        continue;
                    }
                    let v = c.xor(&e).unwrap();
                    assert_eq!(code.is_codeword(&v).unwrap(), None);
                }
            }
        }
    }

    #[test]
    fn pruned_distance_and_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for kappa in [4usize, 8, 16, 32] {
            let code = WhCode::new(kappa).unwrap();
            for _ in 0..20 {
                let size = rng.gen_range(0..kappa / 2);
                let t = IndexSet::new(
                    sample(&mut rng, kappa, size).into_iter().map(|p| p + 1),
                    kappa,
                )
                .unwrap();
                let pc = PrunedCode::new(&code, t.clone()).unwrap();
                let cw = pc.pruned_codewords();
                for a in 0..kappa {
                    for b in (a + 1)..kappa {
                        let d = hamming(&cw[a], &cw[b]);
                        assert!(d >= kappa / 2 - t.len());
                        assert!(d >= 1);
                    }
                }
                for r in 1..=kappa {
                    let v = prune(code.codeword(r).unwrap(), &t).unwrap();
                    assert_eq!(decode_pruned(&v, &pc).unwrap(), Some(r));
                }
            }
        }
    }

    #[test]
    fn linearity_test_accepts_codewords() {
        let code = WhCode::new(16).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let strings: Vec<_> = (0..10)
            .map(|_| code.codeword(rng.gen_range(1..=16)).unwrap().clone())
            .collect();
        for _ in 0..50 {
            let w = BitVector::random(10, &mut rng);
            assert_eq!(
                linearity_test(&code, &strings, &w).unwrap(),
                LinearityVerdict::Accept
            );
        }
        assert!(linearity_test(&code, &strings, &BitVector::zeros(9)).is_err());
    }

    #[test]
    fn pruned_linearity_test_catches_planted_string() {
        let code = WhCode::new(16).unwrap();
        let t = IndexSet::new([2, 5], 16).unwrap();
        let pc = PrunedCode::new(&code, t.clone()).unwrap();
        let mut strings: Vec<_> = (1..=6)
            .map(|r| prune(code.codeword(r).unwrap(), &t).unwrap())
            .collect();
        strings[3].flip(0);
        let mut rejects = 0;
        for mask in 0u32..64 {
            let w = BitVector::from_bits((0..6).map(|k| mask >> k & 1 == 1));
            if pruned_linearity_test(&pc, &strings, &w).unwrap() == LinearityVerdict::Reject {
                rejects += 1;
            }
        }
        // exactly the combiners selecting string 3
        assert_eq!(rejects, 32);
    }
}
