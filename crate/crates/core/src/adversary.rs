//! Malicious-receiver tooling for testing: the selective-tweak attack that
//! recovers the sender's secret `s` in semi-honest mode, and the choice
//! extraction procedure used as a test oracle for the consistency check.
//!
//! The attack tweaks row `i ≤ κ` of `E` at position `i`. The sender's pad for
//! the chosen value then becomes `H(i, b_i ⊕ s_i·u_i)`, so two oracle queries
//! reveal `s_i` to a receiver that already knows `x_{i,r_i}`. Once `s` is
//! known, every pad `H(i, b_i ⊕ s ⊙ (ē_i ⊕ c_j))` is computable.

use std::io::{Read, Write};

use rand::{CryptoRng, RngCore};

use crate::base_ot::{BaseChoice, BaseOtProvider, IdealDealer, SeedOutputs, SeedPairs};
use crate::bitops::{xor_words_into, BitMatrix, BitVector};
use crate::crypto::{coin_toss, prg_expand, ro_mask};
use crate::error::{Error, Result};
use crate::otext::data::{CheckTuple, ChoiceVector, ValueTable};
use crate::otext::params::{Mode, Params};
use crate::otext::phases::{receiver_phase1_from_e, ReceiverState};
use crate::otext::session::handshake;
use crate::transport::{AbortReason, Channel, MsgType};
use crate::whcode::{hdi, prune, IndexSet, PrunedCode, WhCode};
use crate::Role;

/// Bit flips applied to an honest `E`: `(row, positions)`, both 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TweakSpec {
    flips: Vec<(usize, IndexSet)>,
}

impl TweakSpec {
    pub fn new(flips: Vec<(usize, IndexSet)>, rows: usize, kappa: usize) -> Result<Self> {
        for (row, positions) in &flips {
            if *row == 0 || *row > rows {
                return Err(Error::Param(format!("tweak row {row} outside [1, {rows}]")));
            }
            if positions.iter().any(|p| p > kappa) {
                return Err(Error::Param(format!("tweak position beyond {kappa}")));
            }
        }
        Ok(Self { flips })
    }

    pub fn flips(&self) -> &[(usize, IndexSet)] {
        &self.flips
    }

    /// Rows touched by at least one flip.
    pub fn rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.flips.iter().map(|(r, _)| *r)
    }

    pub fn apply(&self, e: &mut BitMatrix) -> Result<()> {
        for (row, positions) in &self.flips {
            if *row > e.rows() {
                return Err(Error::Dimension {
                    expected: e.rows(),
                    found: *row,
                });
            }
            for p in positions.iter() {
                let (r, c) = (row - 1, p - 1);
                e.set(r, c, !e.get(r, c));
            }
        }
        Ok(())
    }
}

/// The honest `E` for `choices` (no padding rows).
pub fn honest_e(code: &WhCode, choices: &[usize]) -> Result<BitMatrix> {
    let rows = choices
        .iter()
        .map(|&r| code.codeword(r).cloned())
        .collect::<Result<Vec<_>>>()?;
    BitMatrix::from_rows(code.kappa(), &rows)
}

/// `Ē`: row `i ≤ κ` is `c_{r_i}` with bit `i` flipped; later rows are
/// honest. With `m < κ` only the first `m` positions are covered.
pub fn build_tweaked_e(code: &WhCode, choices: &[usize]) -> Result<(TweakSpec, BitMatrix)> {
    let kappa = code.kappa();
    let m = choices.len();
    let flips = (1..=m.min(kappa))
        .map(|i| Ok((i, IndexSet::new([i], kappa)?)))
        .collect::<Result<Vec<_>>>()?;
    let spec = TweakSpec::new(flips, m, kappa)?;
    let mut e = honest_e(code, choices)?;
    spec.apply(&mut e)?;
    Ok((spec, e))
}

/// The attack's tweak plan: the rows of [`build_tweaked_e`], plus a backup
/// row `κ + i` flipped at position `i` whenever `m` allows, used when the
/// two candidate pads for row `i` coincide.
fn attack_plan(kappa: usize, m: usize) -> Result<TweakSpec> {
    let primary = m.min(kappa);
    let backup = m.saturating_sub(kappa).min(kappa);
    let flips = (1..=primary)
        .map(|i| (i, i))
        .chain((1..=backup).map(|i| (kappa + i, i)))
        .map(|(row, pos)| Ok((row, IndexSet::new([pos], kappa)?)))
        .collect::<Result<Vec<_>>>()?;
    TweakSpec::new(flips, m, kappa)
}

/// Wraps a base-OT provider and keeps every sender-side secret `s` it
/// handles, giving a harness ground truth to compare against.
#[derive(Clone, Debug, Default)]
pub struct ChoiceRecorder<P> {
    pub inner: P,
    pub choices: Vec<BitVector>,
}

impl<P> ChoiceRecorder<P> {
    pub fn new(inner: P) -> Self {
        Self {
            inner,
            choices: Vec::new(),
        }
    }
}

impl<P: BaseOtProvider> BaseOtProvider for ChoiceRecorder<P> {
    fn send_seeds<R: Read, W: Write>(
        &mut self,
        chan: &mut Channel<R, W>,
        pairs: &SeedPairs,
    ) -> Result<()> {
        self.inner.send_seeds(chan, pairs)
    }

    fn receive_seeds<R: Read, W: Write>(
        &mut self,
        chan: &mut Channel<R, W>,
        choice: &BaseChoice,
    ) -> Result<SeedOutputs> {
        self.choices.push(choice.bits().clone());
        self.inner.receive_seeds(chan, choice)
    }
}

/// A random oracle front end that counts queries.
#[derive(Clone, Debug, Default)]
pub struct CountingOracle {
    queries: usize,
}

impl CountingOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn query(&mut self, index: u64, row: &BitVector, ell: usize) -> BitVector {
        self.queries += 1;
        ro_mask(index, row, ell)
    }

    pub fn queries(&self) -> usize {
        self.queries
    }
}

/// Recovers `s_position` from the chosen value of an OT whose `E` row was
/// flipped at `position` (1-based). Exactly two oracle queries. `None` when
/// both candidates produce the same pad.
pub fn recover_s_bit(
    oracle: &mut CountingOracle,
    index: u64,
    position: usize,
    b_i: &BitVector,
    y_chosen: &BitVector,
    x_chosen: &BitVector,
) -> Result<Option<bool>> {
    let pad = y_chosen.xor(x_chosen)?;
    let ell = pad.len();
    let q0 = oracle.query(index, b_i, ell);
    let mut flipped = b_i.clone();
    flipped.flip(position - 1);
    let q1 = oracle.query(index, &flipped, ell);
    match (q0 == pad, q1 == pad) {
        (true, false) => Ok(Some(false)),
        (false, true) => Ok(Some(true)),
        (true, true) => Ok(None),
        (false, false) => Err(Error::Protocol(format!(
            "no candidate pad matches OT {index}"
        ))),
    }
}

/// `e^j = G(k0_j) ⊕ G(k1_j) ⊕ d^j`, the matrix the receiver committed to.
pub fn reconstruct_committed_e(pairs: &SeedPairs, d: &BitMatrix) -> Result<BitMatrix> {
    let kappa = pairs.kappa();
    if d.cols() != kappa {
        return Err(Error::Dimension {
            expected: kappa,
            found: d.cols(),
        });
    }
    let rows = d.rows();
    let mut e = d.clone();
    for j in 0..kappa {
        let col = e.column_words_mut(j);
        xor_words_into(col, prg_expand(pairs.seed(j, false), rows).words());
        xor_words_into(col, prg_expand(pairs.seed(j, true), rows).words());
    }
    Ok(e)
}

/// Check answers that pass whenever the tweaks cancel out under `s`: the
/// codeword nearest to the combined row, with the honest parity.
pub fn forge_check_tuples(
    state: &ReceiverState,
    code: &WhCode,
    combiners: &[BitVector],
) -> Result<Vec<CheckTuple>> {
    let b_par = state.b.row_parities();
    combiners
        .iter()
        .map(|w| {
            Ok(CheckTuple {
                alpha: code.nearest(&state.e.combine_rows(w)?)?.0,
                b: w.inner_product(&b_par)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtractionResult {
    Abort,
    Extracted { t: IndexSet, choices: Vec<usize> },
}

/// The simulator's extraction: `T` is the union of the positions where each
/// combined row departs from the codeword named in its check; extraction
/// aborts when `|T| >= κ/2` or some row of `E` is not a codeword once `T` is
/// pruned, and otherwise decodes the first `m` rows.
pub fn extract_choices(
    e: &BitMatrix,
    m: usize,
    combiners: &[BitVector],
    tuples: &[CheckTuple],
    code: &WhCode,
) -> Result<ExtractionResult> {
    let kappa = code.kappa();
    if e.cols() != kappa || m > e.rows() || combiners.len() != tuples.len() {
        return Err(Error::Dimension {
            expected: kappa,
            found: e.cols(),
        });
    }
    let mut t = IndexSet::empty();
    for (w, tuple) in combiners.iter().zip(tuples) {
        if tuple.alpha == 0 || tuple.alpha > kappa {
            return Ok(ExtractionResult::Abort);
        }
        let el = e.combine_rows(w)?;
        t = t.union(&hdi(&el, code.codeword(tuple.alpha)?)?);
    }
    if t.len() >= kappa / 2 {
        return Ok(ExtractionResult::Abort);
    }
    let pc = PrunedCode::new(code, t.clone())?;
    let mut choices = Vec::with_capacity(m);
    for i in 0..e.rows() {
        let pruned = prune(&e.row(i), &t)?;
        match crate::whcode::decode_pruned(&pruned, &pc)? {
            Some(r) if i < m => choices.push(r),
            Some(_) => {}
            None => return Ok(ExtractionResult::Abort),
        }
    }
    Ok(ExtractionResult::Extracted { t, choices })
}

/// Outcome of [`full_attack`].
#[derive(Clone, Debug)]
pub struct AttackReport {
    pub mode_of_peer: Mode,
    pub aborted: bool,
    pub abort_reason: Option<AbortReason>,
    /// Recovered `s`, present when every bit was determined.
    pub s_recovered: Option<BitVector>,
    /// Bits of `s` determined, with their values (0-based position).
    pub s_bits: Vec<Option<bool>>,
    /// Every `x_{i,j}`, present when `s` was fully recovered.
    pub recovered_inputs: Option<ValueTable>,
    /// Oracle queries spent on the primary rows `1..=κ`.
    pub s_queries: usize,
    /// Queries spent on backup rows after an ambiguous primary row.
    pub disambiguation_queries: usize,
    /// Queries spent unmasking the unchosen values.
    pub unmask_queries: usize,
}

impl AttackReport {
    fn aborted(mode: Mode, reason: Option<AbortReason>) -> Self {
        Self {
            mode_of_peer: mode,
            aborted: true,
            abort_reason: reason,
            s_recovered: None,
            s_bits: Vec::new(),
            recovered_inputs: None,
            s_queries: 0,
            disambiguation_queries: 0,
            unmask_queries: 0,
        }
    }

    pub fn queries_used(&self) -> usize {
        self.s_queries + self.disambiguation_queries + self.unmask_queries
    }
}

/// Plays a malicious receiver for one batch (`m <= batch_size`). The
/// receiver is assumed to know its chosen values `known_chosen[i]` for every
/// tweaked row in advance. In active mode it answers the checks with
/// [`forge_check_tuples`]; a refusal or abort from the peer ends the attack
/// with `aborted` set.
pub fn full_attack<R, W, G>(
    chan: &mut Channel<R, W>,
    params: &Params,
    choices: &ChoiceVector,
    known_chosen: &[BitVector],
    rng: &mut G,
) -> Result<AttackReport>
where
    R: Read,
    W: Write,
    G: RngCore + CryptoRng + ?Sized,
{
    params.validate()?;
    let (kappa, m, n, ell) = (params.kappa, params.m, params.n, params.ell);
    if m > params.batch_size {
        return Err(Error::Param(format!(
            "the attack runs a single batch; m = {m} exceeds batch size {}",
            params.batch_size
        )));
    }
    let r = ChoiceVector::new(choices.as_slice().to_vec(), n)?;
    if r.len() != m {
        return Err(Error::Input(format!("{} choices given, m = {m}", r.len())));
    }
    let plan = attack_plan(kappa, m)?;
    let needed = plan.rows().max().unwrap_or(0);
    if known_chosen.len() < needed || known_chosen.iter().take(needed).any(|x| x.len() != ell) {
        return Err(Error::Input(format!(
            "the attack needs the first {needed} chosen values of {ell} bits"
        )));
    }
    let code = WhCode::new(kappa)?;
    let mode = params.mode;

    let outcome = (|| -> Result<(ReceiverState, ValueTable)> {
        handshake(chan, Role::Receiver, params)?;
        let pairs = SeedPairs::random(kappa, rng);
        IdealDealer.send_seeds(chan, &pairs)?;

        let mut rows: Vec<BitVector> = r
            .as_slice()
            .iter()
            .map(|&ri| code.codeword(ri).cloned())
            .collect::<Result<_>>()?;
        for _ in 0..params.mu {
            let j = 1 + (rng.next_u64() % kappa as u64) as usize;
            rows.push(code.codeword(j)?.clone());
        }
        let mut e = BitMatrix::from_rows(kappa, &rows)?;
        plan.apply(&mut e)?;
        let state = receiver_phase1_from_e(&pairs, e)?;
        chan.send(MsgType::MatrixD, &state.d.to_bytes())?;

        if mode == Mode::Active {
            let coin = coin_toss(chan, Role::Receiver, kappa, params.mu, m + params.mu, rng)?;
            let tuples = forge_check_tuples(&state, &code, &coin.output)?;
            chan.send(MsgType::Checks, &CheckTuple::encode_all(&tuples))?;
        }
        let payload = chan.expect_len(MsgType::Masked, ValueTable::wire_len(m, n, ell))?;
        Ok((state, ValueTable::from_bytes(m, n, ell, &payload)?))
    })();

    let (state, y) = match outcome {
        Ok(v) => v,
        Err(Error::PeerAbort(reason)) | Err(Error::Refused(reason)) => {
            return Ok(AttackReport::aborted(mode, Some(reason)));
        }
        Err(e) => return Err(e),
    };

    let b = state.b.transpose();
    let b_row = |i: usize| BitVector::from_words(kappa, b.column_words(i).to_vec());
    let chosen = |i: usize| y.get(i, r.as_slice()[i] - 1);

    let mut oracle = CountingOracle::new();
    let mut s_bits = vec![None; kappa];
    let mut ambiguous = Vec::new();
    for i in 0..m.min(kappa) {
        let bit = recover_s_bit(&mut oracle, (i + 1) as u64, i + 1, &b_row(i), &chosen(i), &known_chosen[i])?;
        match bit {
            Some(v) => s_bits[i] = Some(v),
            None => ambiguous.push(i),
        }
    }
    let s_queries = oracle.queries();
    for i in ambiguous {
        let row = kappa + i;
        if row < m {
            s_bits[i] = recover_s_bit(&mut oracle, (row + 1) as u64, i + 1, &b_row(row), &chosen(row), &known_chosen[row])?;
        }
    }
    let disambiguation_queries = oracle.queries() - s_queries;

    let mut report = AttackReport {
        mode_of_peer: mode,
        aborted: false,
        abort_reason: None,
        s_recovered: None,
        s_bits: s_bits.clone(),
        recovered_inputs: None,
        s_queries,
        disambiguation_queries,
        unmask_queries: 0,
    };
    if s_bits.iter().any(Option::is_none) {
        return Ok(report);
    }
    let s = BitVector::from_bits(s_bits.iter().map(|b| b.expect("all bits known")));

    let tweaked: Vec<usize> = plan.rows().collect();
    let e_rows = state.e.transpose();
    let mut x = ValueTable::zeros(m, n, ell);
    let before = oracle.queries();
    for (i, &ri) in r.as_slice().iter().enumerate() {
        let e_i = BitVector::from_words(kappa, e_rows.column_words(i).to_vec());
        let b_i = b_row(i);
        for j in 1..=n {
            let value = if j == ri {
                if tweaked.contains(&(i + 1)) {
                    known_chosen[i].clone()
                } else {
                    // the honest output for an untweaked row
                    y.get(i, j - 1).xor(&ro_mask((i + 1) as u64, &b_i, ell))?
                }
            } else {
                let offset = s.and(&e_i.xor(code.codeword(j)?)?)?;
                let pad = oracle.query((i + 1) as u64, &b_i.xor(&offset)?, ell);
                y.get(i, j - 1).xor(&pad)?
            };
            x.set(i, j - 1, &value)?;
        }
    }
    report.unmask_queries = oracle.queries() - before;
    report.s_recovered = Some(s);
    report.recovered_inputs = Some(x);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_ot::select;
    use crate::otext::phases::{receiver_check, sender_phase1, sender_phase2};
    use crate::transport::LocalChannel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn tweaked_rows_differ_only_at_their_index() {
        let code = WhCode::new(8).unwrap();
        let choices = [3, 1, 8, 2, 2, 5, 7, 4, 6, 1];
        let (spec, e) = build_tweaked_e(&code, &choices).unwrap();
        assert_eq!(spec.flips().len(), 8);
        for (i, &r) in choices.iter().enumerate() {
            let d = hdi(&e.row(i), code.codeword(r).unwrap()).unwrap();
            if i < 8 {
                assert_eq!(d.as_slice(), &[i + 1]);
            } else {
                assert!(d.is_empty());
            }
        }
        let (short, _) = build_tweaked_e(&code, &choices[..3]).unwrap();
        assert_eq!(short.flips().len(), 3);
    }

    #[test]
    fn tweak_spec_validation() {
        let set = IndexSet::new([2], 8).unwrap();
        assert!(TweakSpec::new(vec![(0, set.clone())], 4, 8).is_err());
        assert!(TweakSpec::new(vec![(5, set.clone())], 4, 8).is_err());
        assert!(TweakSpec::new(vec![(1, IndexSet::new([9], 9).unwrap())], 4, 8).is_err());
        assert!(TweakSpec::new(vec![(4, set)], 4, 8).is_ok());
    }

    fn semi_honest_batch(kappa: usize, m: usize, n: usize, ell: usize, seed: u64) -> (WhCode, BitVector, ReceiverState, ValueTable, ValueTable, Vec<usize>) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let code = WhCode::new(kappa).unwrap();
        let choices: Vec<usize> = (0..m).map(|_| 1 + (rng.next_u64() % n as u64) as usize).collect();
        let (_, e) = build_tweaked_e(&code, &choices).unwrap();
        let pairs = SeedPairs::random(kappa, &mut rng);
        let s = BitVector::random(kappa, &mut rng);
        let outs = select(&pairs, &BaseChoice::new(s.clone())).unwrap();
        let recv = receiver_phase1_from_e(&pairs, e).unwrap();
        let send = sender_phase1(&s, &outs, &recv.d).unwrap();
        let x = ValueTable::random(m, n, ell, &mut rng);
        let y = sender_phase2(&send, &code, &x, 0).unwrap();
        (code, s, recv, x, y, choices)
    }

    #[test]
    fn planted_bits_are_recovered_with_two_queries_each() {
        let (_, s, recv, x, y, choices) = semi_honest_batch(8, 8, 4, 32, 1);
        let mut oracle = CountingOracle::new();
        for i in 0..8 {
            let bit = recover_s_bit(
                &mut oracle,
                (i + 1) as u64,
                i + 1,
                &recv.b.row(i),
                &y.get(i, choices[i] - 1),
                &x.get(i, choices[i] - 1),
            )
            .unwrap();
            assert_eq!(bit, Some(s.get(i)));
        }
        assert_eq!(oracle.queries(), 16);
    }

    #[test]
    fn wrong_knowledge_is_inconsistent() {
        let (_, _, recv, x, y, choices) = semi_honest_batch(8, 8, 4, 64, 2);
        let mut wrong = x.get(0, choices[0] - 1);
        wrong.flip(0);
        let mut oracle = CountingOracle::new();
        assert!(recover_s_bit(&mut oracle, 1, 1, &recv.b.row(0), &y.get(0, choices[0] - 1), &wrong).is_err());
    }

    #[test]
    fn committed_e_is_reconstructed() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let code = WhCode::new(16).unwrap();
        let pairs = SeedPairs::random(16, &mut rng);
        let (_, e) = build_tweaked_e(&code, &[1, 2, 3, 4, 5]).unwrap();
        let st = receiver_phase1_from_e(&pairs, e.clone()).unwrap();
        assert_eq!(reconstruct_committed_e(&pairs, &st.d).unwrap(), e);
    }

    #[test]
    fn honest_extraction_returns_true_choices() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let code = WhCode::new(16).unwrap();
        let choices: Vec<usize> = (0..20).map(|_| 1 + (rng.next_u64() % 16) as usize).collect();
        let pairs = SeedPairs::random(16, &mut rng);
        let st = crate::otext::phases::receiver_phase1(&code, 16, 6, &pairs, &choices, &mut rng).unwrap();
        let ws: Vec<BitVector> = (0..6).map(|_| BitVector::random(26, &mut rng)).collect();
        let tuples = receiver_check(&st, &code, &ws).unwrap();
        let e = reconstruct_committed_e(&pairs, &st.d).unwrap();
        assert_eq!(
            extract_choices(&e, 20, &ws, &tuples, &code).unwrap(),
            ExtractionResult::Extracted {
                t: IndexSet::empty(),
                choices
            }
        );
    }

    #[test]
    fn many_tweaks_drive_extraction_to_abort() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let code = WhCode::new(8).unwrap();
        let choices: Vec<usize> = (0..8).map(|_| 1 + (rng.next_u64() % 8) as usize).collect();
        let (_, e) = build_tweaked_e(&code, &choices).unwrap();
        let pairs = SeedPairs::random(8, &mut rng);
        let st = receiver_phase1_from_e(&pairs, e.clone()).unwrap();
        let mut aborted = 0;
        for mu in [1usize, 4, 16, 32] {
            let ws: Vec<BitVector> = (0..mu).map(|_| BitVector::random(8, &mut rng)).collect();
            let tuples = forge_check_tuples(&st, &code, &ws).unwrap();
            let res = extract_choices(&e, 8, &ws, &tuples, &code).unwrap();
            match res {
                ExtractionResult::Abort => aborted += 1,
                ExtractionResult::Extracted { t, .. } => assert!(t.len() < 4),
            }
        }
        // with 16 or more iterations the union of deviations covers half the code
        assert!(aborted >= 2);
    }

    fn attack_session(params: Params, seed: u64) -> (AttackReport, BitVector, ValueTable) {
        let (mut a, mut b) = LocalChannel::pair().unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let x = ValueTable::random(params.m, params.n, params.ell, &mut rng);
        let r = ChoiceVector::random(params.m, params.n, &mut rng);
        let known: Vec<BitVector> = (0..params.m).map(|i| x.get(i, r.as_slice()[i] - 1)).collect();
        let xs = x.clone();
        let h = std::thread::spawn(move || {
            let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xABCD);
            let mut recorder = ChoiceRecorder::new(IdealDealer);
            let _ = crate::otext::run_session_with(
                &mut b,
                &params,
                crate::otext::SessionInput::Sender(&xs),
                &mut recorder,
                &mut rng,
            );
            recorder.choices.pop().unwrap()
        });
        let report = full_attack(&mut a, &params, &r, &known, &mut rng).unwrap();
        let s = h.join().unwrap();
        (report, s, x)
    }

    #[test]
    fn attack_recovers_everything_from_semi_honest_sender() {
        let params = Params::semi_honest(64, 4, 8).with_kappa(16);
        let (report, s, x) = attack_session(params, 6);
        assert!(!report.aborted);
        assert_eq!(report.s_recovered.as_ref(), Some(&s));
        assert_eq!(report.s_queries, 32);
        assert_eq!(report.unmask_queries, 64 * 3);
        assert_eq!(report.recovered_inputs.as_ref(), Some(&x));
    }

    #[test]
    fn small_kappa_attack_uses_sixteen_queries() {
        let params = Params::semi_honest(8, 4, 16).with_kappa(8);
        let (report, s, x) = attack_session(params, 7);
        assert_eq!(report.s_recovered.as_ref(), Some(&s));
        assert_eq!(report.s_queries, 16);
        assert_eq!(report.recovered_inputs.as_ref(), Some(&x));
    }

    #[test]
    fn active_sender_aborts_the_attack() {
        let params = Params::active(64, 4, 8).with_kappa(16).with_mu(16);
        let (report, _, _) = attack_session(params, 8);
        assert!(report.aborted);
        assert_eq!(report.abort_reason, Some(AbortReason::CheckFailed));
        assert_eq!(report.mode_of_peer, Mode::Active);
    }
}
