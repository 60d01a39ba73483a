//! Seed OTs: κ 1-out-of-2 transfers of κ-bit seeds, with the roles of the
//! extension reversed (the extension receiver acts as the base-OT sender).
//!
//! Only an ideal dealer ships here. It is a test-mode transport: the
//! receiver transmits both seeds of every pair and the sender selects
//! locally. Real base-OT protocols plug in through [`BaseOtProvider`].

use std::io::{Read, Write};

use rand::{CryptoRng, RngCore};

use crate::bitops::{bytes_for, BitVector};
use crate::crypto::PrgSeed;
use crate::error::{Error, Result};
use crate::transport::{Channel, MsgType};

/// κ pairs `(k0_j, k1_j)` held by the extension receiver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedPairs {
    kappa: usize,
    pairs: Vec<(PrgSeed, PrgSeed)>,
}

impl SeedPairs {
    pub fn new(kappa: usize, pairs: Vec<(PrgSeed, PrgSeed)>) -> Result<Self> {
        if pairs.len() != kappa {
            return Err(Error::Dimension {
                expected: kappa,
                found: pairs.len(),
            });
        }
        for (k0, k1) in &pairs {
            check_seed_len(kappa, k0)?;
            check_seed_len(kappa, k1)?;
        }
        Ok(Self { kappa, pairs })
    }

    pub fn random<R: RngCore + CryptoRng + ?Sized>(kappa: usize, rng: &mut R) -> Self {
        let pairs = (0..kappa)
            .map(|_| (PrgSeed::random(kappa, rng), PrgSeed::random(kappa, rng)))
            .collect();
        Self { kappa, pairs }
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn pairs(&self) -> &[(PrgSeed, PrgSeed)] {
        &self.pairs
    }

    /// `k0_j` or `k1_j`, 0-based `j`.
    pub fn seed(&self, j: usize, bit: bool) -> &PrgSeed {
        let (k0, k1) = &self.pairs[j];
        if bit {
            k1
        } else {
            k0
        }
    }
}

/// The extension sender's secret `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChoice(BitVector);

impl BaseChoice {
    pub fn new(s: BitVector) -> Self {
        Self(s)
    }

    pub fn random<R: RngCore + CryptoRng + ?Sized>(kappa: usize, rng: &mut R) -> Self {
        Self(BitVector::random(kappa, rng))
    }

    pub fn bits(&self) -> &BitVector {
        &self.0
    }

    pub fn kappa(&self) -> usize {
        self.0.len()
    }
}

/// `k^{s_j}_j` for every `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedOutputs(Vec<PrgSeed>);

impl SeedOutputs {
    pub fn new(seeds: Vec<PrgSeed>) -> Self {
        Self(seeds)
    }

    pub fn seeds(&self) -> &[PrgSeed] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Local selection: the functionality every provider must realize.
pub fn select(pairs: &SeedPairs, choice: &BaseChoice) -> Result<SeedOutputs> {
    if choice.kappa() != pairs.kappa() {
        return Err(Error::Dimension {
            expected: pairs.kappa(),
            found: choice.kappa(),
        });
    }
    Ok(SeedOutputs(
        (0..pairs.kappa())
            .map(|j| pairs.seed(j, choice.bits().get(j)).clone())
            .collect(),
    ))
}

/// A base-OT plugin. The extension receiver calls `send_seeds`, the
/// extension sender calls `receive_seeds`; the sender must learn exactly
/// `k^{s_j}_j` and the receiver nothing about `s`.
pub trait BaseOtProvider {
    fn send_seeds<R: Read, W: Write>(
        &mut self,
        chan: &mut Channel<R, W>,
        pairs: &SeedPairs,
    ) -> Result<()>;

    fn receive_seeds<R: Read, W: Write>(
        &mut self,
        chan: &mut Channel<R, W>,
        choice: &BaseChoice,
    ) -> Result<SeedOutputs>;
}

/// Insecure test-mode dealer: both seeds cross the wire in one
/// `MSG_SEEDPAIRS` message of `κ · 2 · ceil(κ/8)` bytes.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdealDealer;

impl BaseOtProvider for IdealDealer {
    fn send_seeds<R: Read, W: Write>(
        &mut self,
        chan: &mut Channel<R, W>,
        pairs: &SeedPairs,
    ) -> Result<()> {
        let mut payload = Vec::with_capacity(seed_pairs_len(pairs.kappa()));
        for (k0, k1) in pairs.pairs() {
            k0.bits().write_bytes(&mut payload);
            k1.bits().write_bytes(&mut payload);
        }
        chan.send(MsgType::SeedPairs, &payload)
    }

    fn receive_seeds<R: Read, W: Write>(
        &mut self,
        chan: &mut Channel<R, W>,
        choice: &BaseChoice,
    ) -> Result<SeedOutputs> {
        let kappa = choice.kappa();
        let payload = chan.expect_len(MsgType::SeedPairs, seed_pairs_len(kappa))?;
        let per_seed = bytes_for(kappa);
        let pairs = payload
            .chunks_exact(2 * per_seed)
            .map(|c| {
                (
                    PrgSeed::new(BitVector::from_bytes(kappa, &c[..per_seed])),
                    PrgSeed::new(BitVector::from_bytes(kappa, &c[per_seed..])),
                )
            })
            .collect();
        select(&SeedPairs { kappa, pairs }, choice)
    }
}

/// Payload size of the dealer's single message.
pub fn seed_pairs_len(kappa: usize) -> usize {
    2 * kappa * bytes_for(kappa)
}

/// Wraps a provider and rejects output of the wrong shape before it reaches
/// the protocol engine.
#[derive(Clone, Debug, Default)]
pub struct Validated<P>(pub P);

impl<P: BaseOtProvider> BaseOtProvider for Validated<P> {
    fn send_seeds<R: Read, W: Write>(
        &mut self,
        chan: &mut Channel<R, W>,
        pairs: &SeedPairs,
    ) -> Result<()> {
        self.0.send_seeds(chan, pairs)
    }

    fn receive_seeds<R: Read, W: Write>(
        &mut self,
        chan: &mut Channel<R, W>,
        choice: &BaseChoice,
    ) -> Result<SeedOutputs> {
        let out = self.0.receive_seeds(chan, choice)?;
        let kappa = choice.kappa();
        if out.len() != kappa {
            return Err(Error::Protocol(format!(
                "base OT returned {} seeds, expected {kappa}",
                out.len()
            )));
        }
        for seed in out.seeds() {
            if seed.len() != kappa {
                return Err(Error::Protocol(format!(
                    "base OT returned a {}-bit seed, expected {kappa}",
                    seed.len()
                )));
            }
        }
        Ok(out)
    }
}

fn check_seed_len(kappa: usize, seed: &PrgSeed) -> Result<()> {
    if seed.len() != kappa {
        return Err(Error::Dimension {
            expected: kappa,
            found: seed.len(),
        });
    }
    Ok(())
}
