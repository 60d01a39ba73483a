//! The per-batch protocol steps as pure functions over one batch of
//! `m_b` OTs. Matrices have `m_b + μ` rows and κ columns; the μ padding rows
//! come last. OT indices passed to the random oracle are 1-based and global,
//! so callers pass the batch's 0-based offset.

use rand::RngCore;

use crate::base_ot::{SeedOutputs, SeedPairs};
use crate::bitops::{inner_product_words, xor_words_into, BitMatrix, BitVector};
use crate::crypto::{prg_expand, ro_mask_into};
use crate::error::{Error, Result};
use crate::whcode::WhCode;

use super::data::{CheckTuple, MaskedBlock, SenderInputs};

/// Receiver's view of a batch after the first extension phase.
#[derive(Clone, Debug)]
pub struct ReceiverState {
    pub seeds: SeedPairs,
    pub b: BitMatrix,
    pub e: BitMatrix,
    pub d: BitMatrix,
}

/// Sender's view of a batch after the first extension phase.
#[derive(Clone, Debug)]
pub struct SenderState {
    pub s: BitVector,
    pub a: BitMatrix,
}

/// Builds `E` from the choices plus `mu` uniformly random padding codewords,
/// then derives `B` and `D`.
pub fn receiver_phase1<R: RngCore + ?Sized>(
    code: &WhCode,
    n: usize,
    mu: usize,
    seeds: &SeedPairs,
    choices: &[usize],
    pad_rng: &mut R,
) -> Result<ReceiverState> {
    let kappa = code.kappa();
    if let Some((i, &r)) = choices.iter().enumerate().find(|(_, &r)| r == 0 || r > n) {
        return Err(Error::Input(format!(
            "choice r_{} = {r} outside [1, {n}]",
            i + 1
        )));
    }
    let mut rows: Vec<BitVector> = Vec::with_capacity(choices.len() + mu);
    for &r in choices {
        rows.push(code.codeword(r)?.clone());
    }
    for _ in 0..mu {
        let j = 1 + (pad_rng.next_u64() % kappa as u64) as usize;
        rows.push(code.codeword(j)?.clone());
    }
    let e = BitMatrix::from_rows(kappa, &rows)?;
    receiver_phase1_from_e(seeds, e)
}

/// Derives `B = [G(k0_j)]_j` and `D = B ⊕ [G(k1_j)]_j ⊕ E` for an arbitrary
/// `E`, honest or not.
pub fn receiver_phase1_from_e(seeds: &SeedPairs, e: BitMatrix) -> Result<ReceiverState> {
    let kappa = seeds.kappa();
    if e.cols() != kappa {
        return Err(Error::Dimension {
            expected: kappa,
            found: e.cols(),
        });
    }
    let rows = e.rows();
    let mut b = BitMatrix::zeros(rows, kappa);
    let mut d = BitMatrix::zeros(rows, kappa);
    for j in 0..kappa {
        let g0 = prg_expand(seeds.seed(j, false), rows);
        let g1 = prg_expand(seeds.seed(j, true), rows);
        b.column_words_mut(j).copy_from_slice(g0.words());
        let dj = d.column_words_mut(j);
        dj.copy_from_slice(g0.words());
        xor_words_into(dj, g1.words());
        xor_words_into(dj, e.column_words(j));
    }
    Ok(ReceiverState {
        seeds: seeds.clone(),
        b,
        e,
        d,
    })
}

/// `a^j = (s_j ⊙ d^j) ⊕ G(k^{s_j}_j)`.
pub fn sender_phase1(s: &BitVector, outputs: &SeedOutputs, d: &BitMatrix) -> Result<SenderState> {
    let kappa = s.len();
    if outputs.len() != kappa || d.cols() != kappa {
        return Err(Error::Protocol(format!(
            "matrix D has {} columns and {} seeds are held, expected {kappa}",
            d.cols(),
            outputs.len()
        )));
    }
    let rows = d.rows();
    let mut a = BitMatrix::zeros(rows, kappa);
    for (j, seed) in outputs.seeds().iter().enumerate() {
        let g = prg_expand(seed, rows);
        let aj = a.column_words_mut(j);
        aj.copy_from_slice(g.words());
        if s.get(j) {
            xor_words_into(aj, d.column_words(j));
        }
    }
    Ok(SenderState { s: s.clone(), a })
}

/// For every combiner `w`: `alpha` indexes the codeword `⊕ w_i ⊙ e_i`, and
/// `b` is the parity of `⊕ w_i ⊙ b_i`.
pub fn receiver_check(
    state: &ReceiverState,
    code: &WhCode,
    combiners: &[BitVector],
) -> Result<Vec<CheckTuple>> {
    // parity(⊕ w_i ⊙ b_i) equals the inner product of w with B's row parities
    let b_par = state.b.row_parities();
    combiners
        .iter()
        .enumerate()
        .map(|(l, w)| {
            let el = state.e.combine_rows(w)?;
            let alpha = code.is_codeword(&el)?.ok_or_else(|| {
                Error::Input(format!(
                    "combined E row for check {} is not a codeword",
                    l + 1
                ))
            })?;
            Ok(CheckTuple {
                alpha,
                b: w.inner_product(&b_par)?,
            })
        })
        .collect()
}

/// Accepts iff `parity(⊕ w_i ⊙ a_i) == b ⊕ parity(s ⊙ c_alpha)` for every
/// iteration; reports the first failing iteration (1-based).
pub fn sender_check(
    state: &SenderState,
    code: &WhCode,
    combiners: &[BitVector],
    tuples: &[CheckTuple],
) -> Result<()> {
    if tuples.len() != combiners.len() {
        return Err(Error::Protocol(format!(
            "received {} check tuples, expected {}",
            tuples.len(),
            combiners.len()
        )));
    }
    let a_par = state.a.row_parities();
    for (l, (w, t)) in combiners.iter().zip(tuples).enumerate() {
        if t.alpha == 0 || t.alpha > code.kappa() {
            return Err(Error::Protocol(format!(
                "check {} names codeword {} outside [1, {}]",
                l + 1,
                t.alpha,
                code.kappa()
            )));
        }
        let a_l = w.inner_product(&a_par)?;
        let p_l = state.s.inner_product(code.codeword(t.alpha)?)?;
        if a_l != (t.b ^ p_l) {
            return Err(Error::CheckFailed { iteration: l + 1 });
        }
    }
    Ok(())
}

/// `y_{i,j} = x_{i,j} ⊕ H(offset + i, a_i ⊕ (s ⊙ c_j))`.
pub fn sender_phase2(
    state: &SenderState,
    code: &WhCode,
    inputs: &SenderInputs,
    offset: usize,
) -> Result<MaskedBlock> {
    let kappa = code.kappa();
    let m_b = inputs.rows();
    if m_b > state.a.rows() || inputs.n() > kappa || state.a.cols() != kappa {
        return Err(Error::Dimension {
            expected: state.a.rows(),
            found: m_b,
        });
    }
    let masks: Vec<Vec<u64>> = (1..=inputs.n())
        .map(|j| Ok(state.s.and(code.codeword(j)?)?.words().to_vec()))
        .collect::<Result<_>>()?;
    let rows = state.a.transpose();
    let mut y = inputs.clone();
    let mut q = vec![0u64; masks.first().map_or(0, Vec::len)];
    let mut digest = [0u8; 32];
    for i in 0..m_b {
        let a_i = rows.column_words(i);
        let index = (offset + i + 1) as u64;
        for (j, mask) in masks.iter().enumerate() {
            q.copy_from_slice(a_i);
            xor_words_into(&mut q, mask);
            let pad = ro_mask_into(index, &q, kappa, inputs.ell(), &mut digest);
            y.xor_value(i, j, pad);
        }
    }
    Ok(y)
}

/// `z_i = y_{i,r_i} ⊕ H(offset + i, b_i)`.
pub fn receiver_phase2(
    state: &ReceiverState,
    masked: &MaskedBlock,
    choices: &[usize],
    offset: usize,
) -> Result<Vec<BitVector>> {
    if masked.rows() != choices.len() || choices.len() > state.b.rows() {
        return Err(Error::Dimension {
            expected: choices.len(),
            found: masked.rows(),
        });
    }
    let kappa = state.b.cols();
    let ell = masked.ell();
    let rows = state.b.transpose();
    let mut digest = [0u8; 32];
    let mut y = [0u8; 32];
    choices
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if r == 0 || r > masked.n() {
                return Err(Error::Input(format!("choice r_{} = {r} out of range", i + 1)));
            }
            let pad = ro_mask_into((offset + i + 1) as u64, rows.column_words(i), kappa, ell, &mut digest);
            masked.read_value(i, r - 1, &mut y);
            for (yb, pb) in y.iter_mut().zip(pad) {
                *yb ^= pb;
            }
            Ok(BitVector::from_bytes(ell, &y[..pad.len()]))
        })
        .collect()
}

/// `a_i ⊕ b_i ⊕ (s ⊙ e_i)` for every row; all zero when both sides are honest.
pub fn row_identity_defect(sender: &SenderState, receiver: &ReceiverState) -> Result<Vec<BitVector>> {
    let a = sender.a.transpose();
    let b = receiver.b.transpose();
    let e = receiver.e.transpose();
    let s = sender.s.words();
    (0..sender.a.rows())
        .map(|i| {
            let mut w = a.column_words(i).to_vec();
            xor_words_into(&mut w, b.column_words(i));
            for (k, (x, y)) in w.iter_mut().zip(e.column_words(i)).enumerate() {
                *x ^= y & s[k];
            }
            Ok(BitVector::from_words(sender.a.cols(), w))
        })
        .collect()
}

/// `parity(s ⊙ c_alpha)` without materializing the product.
pub fn codeword_parity(s: &BitVector, code: &WhCode, alpha: usize) -> Result<bool> {
    Ok(inner_product_words(s.words(), code.codeword(alpha)?.words()))
}
