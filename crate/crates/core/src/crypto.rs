//! Random oracle, PRG, and the coin-tossing realization.
//!
//! * `H(i, row)` is `SHA-256(LE64(i) || packed(row))`, truncated to `ℓ` bits.
//! * `G(seed)` is AES-128 in counter mode. The first 128 seed bits are the
//!   key and the next 128 bits the initial counter block; shorter seeds are
//!   zero-padded.
//! * The coin toss exchanges one κ-bit share per party and expands
//!   `SHA-256(s_S || s_R)` (truncated to κ bits) with `G`.

use std::io::{Read, Write};

use aes::cipher::{KeyIvInit, StreamCipher};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

use crate::bitops::{bytes_for, BitVector};
use crate::error::{Error, Result};
use crate::transport::{Channel, MsgType};
use crate::Role;

type Aes128Ctr = ctr::Ctr128BE<aes::Aes128>;

/// Largest output the random oracle produces from one digest.
pub const MAX_RO_BITS: usize = 256;

/// `H(index, row)` truncated to `ell` bits.
pub fn ro_mask(index: u64, row: &BitVector, ell: usize) -> BitVector {
    let mut buf = [0u8; 32];
    ro_mask_into(index, row.words(), row.len(), ell, &mut buf);
    BitVector::from_bytes(ell, &buf[..bytes_for(ell)])
}

/// Allocation-free core of [`ro_mask`]; writes `ceil(ell/8)` masked bytes
/// into `out` and returns them.
pub(crate) fn ro_mask_into<'a>(
    index: u64,
    row_words: &[u64],
    row_bits: usize,
    ell: usize,
    out: &'a mut [u8; 32],
) -> &'a [u8] {
    assert!(
        (1..=MAX_RO_BITS).contains(&ell),
        "random oracle output length {ell} outside 1..=256"
    );
    let mut hasher = Sha256::new();
    hasher.update(index.to_le_bytes());
    let mut remaining = bytes_for(row_bits);
    for w in row_words {
        if remaining == 0 {
            break;
        }
        let take = remaining.min(8);
        hasher.update(&w.to_le_bytes()[..take]);
        remaining -= take;
    }
    out.copy_from_slice(&hasher.finalize());
    let nbytes = bytes_for(ell);
    let rem = ell % 8;
    if rem != 0 {
        out[nbytes - 1] &= (1u8 << rem) - 1;
    }
    &out[..nbytes]
}

/// A κ-bit PRG seed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrgSeed(BitVector);

impl PrgSeed {
    pub fn new(bits: BitVector) -> Self {
        Self(bits)
    }

    pub fn random<R: RngCore + CryptoRng + ?Sized>(kappa: usize, rng: &mut R) -> Self {
        Self(BitVector::random(kappa, rng))
    }

    pub fn bits(&self) -> &BitVector {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn key_and_iv(&self) -> ([u8; 16], [u8; 16]) {
        let bytes = self.0.to_bytes();
        let mut key = [0u8; 16];
        let mut iv = [0u8; 16];
        let k = bytes.len().min(16);
        key[..k].copy_from_slice(&bytes[..k]);
        if bytes.len() > 16 {
            let n = (bytes.len() - 16).min(16);
            iv[..n].copy_from_slice(&bytes[16..16 + n]);
        }
        (key, iv)
    }
}

/// `G(seed)`, the first `out_bits` bits of the AES-128-CTR keystream.
pub fn prg_expand(seed: &PrgSeed, out_bits: usize) -> BitVector {
    let (key, iv) = seed.key_and_iv();
    let mut cipher = Aes128Ctr::new(&key.into(), &iv.into());
    // fill whole words so the result can be adopted without repacking
    let mut buf = vec![0u8; out_bits.div_ceil(64) * 8];
    cipher.apply_keystream(&mut buf);
    let words = buf
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    BitVector::from_words(out_bits, words)
}

/// Both parties' view of the coin toss.
#[derive(Clone, Debug)]
pub struct CoinTossState {
    pub local_share: BitVector,
    pub remote_share: BitVector,
    pub output: Vec<BitVector>,
}

/// Deterministic expansion of the two shares into `mu` combiners of
/// `rows` bits each.
pub fn derive_combiners(
    sender_share: &BitVector,
    receiver_share: &BitVector,
    kappa: usize,
    mu: usize,
    rows: usize,
) -> Vec<BitVector> {
    let mut hasher = Sha256::new();
    hasher.update(sender_share.to_bytes());
    hasher.update(receiver_share.to_bytes());
    let digest = hasher.finalize();
    let seed = PrgSeed::new(BitVector::from_bytes(kappa.min(256), &digest));
    let stream = prg_expand(&seed, mu * rows);
    (0..mu).map(|l| stream.extract(l * rows, rows)).collect()
}

/// Two-message coin toss: the receiver sends its share first, then the
/// sender answers with its own.
pub fn coin_toss<R, W, G>(
    chan: &mut Channel<R, W>,
    role: Role,
    kappa: usize,
    mu: usize,
    rows: usize,
    rng: &mut G,
) -> Result<CoinTossState>
where
    R: Read,
    W: Write,
    G: RngCore + CryptoRng + ?Sized,
{
    let share_len = bytes_for(kappa);
    let local_share = BitVector::random(kappa, rng);
    let remote_share = match role {
        Role::Receiver => {
            chan.send(MsgType::CoinR, &local_share.to_bytes())?;
            read_share(chan.expect(MsgType::CoinS)?, kappa, share_len)?
        }
        Role::Sender => {
            let theirs = read_share(chan.expect(MsgType::CoinR)?, kappa, share_len)?;
            chan.send(MsgType::CoinS, &local_share.to_bytes())?;
            theirs
        }
    };
    let output = match role {
        Role::Sender => derive_combiners(&local_share, &remote_share, kappa, mu, rows),
        Role::Receiver => derive_combiners(&remote_share, &local_share, kappa, mu, rows),
    };
    Ok(CoinTossState {
        local_share,
        remote_share,
        output,
    })
}

fn read_share(payload: Vec<u8>, kappa: usize, share_len: usize) -> Result<BitVector> {
    if payload.len() != share_len {
        return Err(Error::Protocol(format!(
            "coin share is {} bytes, expected {share_len}",
            payload.len()
        )));
    }
    Ok(BitVector::from_bytes(kappa, &payload))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::LocalChannel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn hex(bytes: &[u8]) -> String {
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    #[test]
    fn ro_mask_is_deterministic_and_masked() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let row = BitVector::random(256, &mut rng);
        assert_eq!(ro_mask(7, &row, 64), ro_mask(7, &row, 64));
        let four = ro_mask(7, &row, 4);
        assert_eq!(four.len(), 4);
        assert_eq!(four.to_bytes()[0] & 0xF0, 0);
        // truncation is a prefix of the full digest
        assert_eq!(ro_mask(7, &row, 256).extract(0, 4), four);
    }

    #[test]
    fn ro_mask_golden() {
        // SHA-256 of 8 zero bytes (index 0) followed by 32 zero bytes
        let digest = Sha256::digest([0u8; 40]);
        let out = ro_mask(0, &BitVector::zeros(256), 256);
        assert_eq!(out.to_bytes(), digest.to_vec());
        // index is little-endian in the first 8 bytes
        let mut input = [0u8; 40];
        input[0] = 1;
        let d1 = Sha256::digest(input);
        assert_eq!(ro_mask(1, &BitVector::zeros(256), 256).to_bytes(), d1.to_vec());
    }

    #[test]
    fn ro_mask_domain_separation() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for i in 0..1000u64 {
            let row = BitVector::random(256, &mut rng);
            assert_ne!(ro_mask(i, &row, 128), ro_mask(i + 1, &row, 128));
            let mut other = row.clone();
            other.flip((i % 256) as usize);
            assert_ne!(ro_mask(i, &row, 128), ro_mask(i, &other, 128));
        }
    }

    #[test]
    fn prg_prefix_and_determinism() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let seed = PrgSeed::random(256, &mut rng);
        let long = prg_expand(&seed, 1024);
        assert_eq!(prg_expand(&seed, 1024), long);
        assert_eq!(prg_expand(&seed, 64), long.extract(0, 64));
        assert_eq!(prg_expand(&seed, 77), long.extract(0, 77));
        assert!(prg_expand(&seed, 0).is_empty());
    }

    #[test]
    fn prg_golden_matches_fips197_block() {
        // AES-128 with the FIPS-197 example key encrypting the counter block
        // 00112233445566778899aabbccddeeff yields 69c4e0d86a7b0430d8cdb78070b4c55a.
        let key: Vec<u8> = (0u8..16).collect();
        let iv: Vec<u8> = (0u8..16).map(|b| b * 0x11).collect();
        let seed_bytes = [key, iv].concat();
        let seed = PrgSeed::new(BitVector::from_bytes(256, &seed_bytes));
        let out = prg_expand(&seed, 128);
        assert_eq!(hex(&out.to_bytes()), "69c4e0d86a7b0430d8cdb78070b4c55a");
    }

    #[test]
    fn prg_distinct_seeds_diverge() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let a = PrgSeed::random(256, &mut rng);
            let b = PrgSeed::random(256, &mut rng);
            assert_ne!(prg_expand(&a, 128), prg_expand(&b, 128));
        }
        // short seeds are zero padded, not rejected
        let short = PrgSeed::random(8, &mut rng);
        assert_eq!(prg_expand(&short, 40).len(), 40);
    }

    #[test]
    fn combiner_shape_and_order_sensitivity() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let s = BitVector::random(256, &mut rng);
        let r = BitVector::random(256, &mut rng);
        let w = derive_combiners(&s, &r, 256, 2, 8);
        assert_eq!(w.len(), 2);
        assert!(w.iter().all(|v| v.len() == 8));
        assert_eq!(derive_combiners(&s, &r, 256, 2, 8), w);
        let big = derive_combiners(&s, &r, 256, 4, 300);
        assert_ne!(big, derive_combiners(&r, &s, 256, 4, 300));
    }

    #[test]
    fn coin_toss_over_channel_agrees() {
        let (mut a, mut b) = LocalChannel::pair().unwrap();
        let h = std::thread::spawn(move || {
            let mut rng = ChaCha20Rng::seed_from_u64(10);
            let st = coin_toss(&mut b, Role::Sender, 256, 3, 50, &mut rng).unwrap();
            (st, b.bytes())
        });
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let mine = coin_toss(&mut a, Role::Receiver, 256, 3, 50, &mut rng).unwrap();
        let (theirs, bytes) = h.join().unwrap();
        assert_eq!(mine.output, theirs.output);
        assert_eq!(mine.local_share, theirs.remote_share);
        assert_eq!(bytes.coin_toss, 64);
        assert_eq!(bytes.total(), 64 + 10);
    }

    #[test]
    fn coin_toss_rejects_short_share() {
        let (mut a, mut b) = LocalChannel::pair().unwrap();
        a.send(MsgType::CoinR, &[0u8; 5]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        assert!(matches!(
            coin_toss(&mut b, Role::Sender, 256, 1, 8, &mut rng),
            Err(Error::Protocol(_))
        ));
    }
}
