//! Handshake and the batched session driver.

use std::io::{Read, Write};
use std::time::Instant;

use rand::{CryptoRng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::base_ot::{BaseChoice, BaseOtProvider, IdealDealer, SeedPairs};
use crate::bitops::{bytes_for, BitMatrix, BitVector};
use crate::crypto::coin_toss;
use crate::error::{Error, Result};
use crate::stats::{ByteReport, TranscriptStats};
use crate::transport::{AbortReason, Channel, MsgType};
use crate::whcode::WhCode;
use crate::Role;

use super::data::{ChoiceVector, CheckTuple, SenderInputs, ValueTable, CHECK_TUPLE_LEN};
use super::params::{Batch, Mode, Params};
use super::phases::{
    receiver_check, receiver_phase1, receiver_phase2, sender_check, sender_phase1, sender_phase2,
};

pub const PROTOCOL_VERSION: u16 = 1;
/// `MSG_HELLO` payload size.
pub const HELLO_LEN: usize = 27;

/// `MSG_HELLO`: version, mode, κ, μ, m, n, ℓ, batch size, little-endian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hello {
    pub version: u16,
    pub mode: u8,
    pub kappa: u16,
    pub mu: u16,
    pub m: u64,
    pub n: u16,
    pub ell: u16,
    pub batch_size: u64,
}

impl Hello {
    pub fn from_params(params: &Params) -> Result<Self> {
        let narrow = |name: &str, v: usize| {
            u16::try_from(v).map_err(|_| Error::Param(format!("{name} = {v} does not fit the wire format")))
        };
        Ok(Self {
            version: PROTOCOL_VERSION,
            mode: params.mode.code(),
            kappa: narrow("kappa", params.kappa)?,
            mu: narrow("mu", params.mu)?,
            m: params.m as u64,
            n: narrow("n", params.n)?,
            ell: narrow("ell", params.ell)?,
            batch_size: params.batch_size as u64,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HELLO_LEN);
        out.extend_from_slice(&self.version.to_le_bytes());
        out.push(self.mode);
        out.extend_from_slice(&self.kappa.to_le_bytes());
        out.extend_from_slice(&self.mu.to_le_bytes());
        out.extend_from_slice(&self.m.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.ell.to_le_bytes());
        out.extend_from_slice(&self.batch_size.to_le_bytes());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != HELLO_LEN {
            return Err(Error::Protocol(format!(
                "hello is {} bytes, expected {HELLO_LEN}",
                bytes.len()
            )));
        }
        let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        Ok(Self {
            version: u16_at(0),
            mode: bytes[2],
            kappa: u16_at(3),
            mu: u16_at(5),
            m: u64_at(7),
            n: u16_at(15),
            ell: u16_at(17),
            batch_size: u64_at(19),
        })
    }

    /// The parameters this hello announces, if its mode byte is known.
    pub fn params(&self) -> Option<Params> {
        Some(Params {
            kappa: self.kappa as usize,
            mu: self.mu as usize,
            m: usize::try_from(self.m).ok()?,
            n: self.n as usize,
            ell: self.ell as usize,
            mode: Mode::from_code(self.mode)?,
            batch_size: usize::try_from(self.batch_size).ok()?,
        })
    }
}

/// Agrees on parameters. The receiver proposes; the sender checks the
/// version, the validity of the proposal, the mode, and the remaining
/// fields, in that order, and either echoes the hello or refuses with
/// `MSG_ABORT`.
pub fn handshake<R: Read, W: Write>(
    chan: &mut Channel<R, W>,
    role: Role,
    params: &Params,
) -> Result<Params> {
    handshake_inner(chan, role, params, true)
}

fn handshake_inner<R: Read, W: Write>(
    chan: &mut Channel<R, W>,
    role: Role,
    params: &Params,
    check: bool,
) -> Result<Params> {
    let mine = Hello::from_params(params)?;
    match role {
        Role::Receiver => {
            chan.send(MsgType::Hello, &mine.encode())?;
            let echo = Hello::decode(&chan.expect(MsgType::Hello)?)?;
            if echo != mine {
                return Err(Error::Protocol("hello echo differs from proposal".into()));
            }
            Ok(*params)
        }
        Role::Sender => {
            if check {
                params.validate()?;
            }
            let payload = chan.expect(MsgType::Hello)?;
            let theirs = Hello::decode(&payload)?;
            if let Some(reason) = refusal(&mine, &theirs, check) {
                chan.send_abort(reason)?;
                return Err(Error::Refused(reason));
            }
            chan.send(MsgType::Hello, &mine.encode())?;
            Ok(*params)
        }
    }
}

fn refusal(mine: &Hello, theirs: &Hello, check: bool) -> Option<AbortReason> {
    if theirs.version != mine.version {
        return Some(AbortReason::VersionMismatch);
    }
    let valid = theirs
        .params()
        .is_some_and(|p| !check || p.validate().is_ok());
    if !valid {
        return Some(AbortReason::InvalidParams);
    }
    if theirs.mode != mine.mode {
        return Some(AbortReason::ModeMismatch);
    }
    (theirs != mine).then_some(AbortReason::ParamMismatch)
}

/// A party's private input to a session.
#[derive(Clone, Copy, Debug)]
pub enum SessionInput<'a> {
    Sender(&'a SenderInputs),
    Receiver(&'a ChoiceVector),
}

impl SessionInput<'_> {
    pub fn role(&self) -> Role {
        match self {
            SessionInput::Sender(_) => Role::Sender,
            SessionInput::Receiver(_) => Role::Receiver,
        }
    }
}

/// Outcome of a session: statistics are produced even when it aborts.
#[derive(Debug)]
pub struct SessionRun {
    pub stats: TranscriptStats,
    /// The receiver's `z_1..z_m`; `None` for the sender.
    pub result: Result<Option<Vec<BitVector>>>,
}

impl SessionRun {
    pub fn into_result(self) -> Result<(Option<Vec<BitVector>>, TranscriptStats)> {
        let stats = self.stats;
        self.result.map(|out| (out, stats))
    }
}

/// Runs `m` OTs in sequential batches over one channel, with the test-mode
/// ideal dealer for the seed OTs.
pub fn run_session<R, W, G>(
    chan: &mut Channel<R, W>,
    params: &Params,
    input: SessionInput<'_>,
    rng: &mut G,
) -> SessionRun
where
    R: Read,
    W: Write,
    G: RngCore + CryptoRng + ?Sized,
{
    run_session_with(chan, params, input, &mut IdealDealer, rng)
}

/// [`run_session`] with a caller-supplied base-OT provider.
pub fn run_session_with<R, W, G, P>(
    chan: &mut Channel<R, W>,
    params: &Params,
    input: SessionInput<'_>,
    provider: &mut P,
    rng: &mut G,
) -> SessionRun
where
    R: Read,
    W: Write,
    G: RngCore + CryptoRng + ?Sized,
    P: BaseOtProvider,
{
    drive(chan, params, input, provider, rng, true)
}

struct Driver<'c, R: Read, W: Write> {
    chan: &'c mut Channel<R, W>,
    params: Params,
    code: WhCode,
    stats: TranscriptStats,
    coin_rng: ChaCha20Rng,
}

pub(crate) fn drive<R, W, G, P>(
    chan: &mut Channel<R, W>,
    params: &Params,
    input: SessionInput<'_>,
    provider: &mut P,
    rng: &mut G,
    check: bool,
) -> SessionRun
where
    R: Read,
    W: Write,
    G: RngCore + CryptoRng + ?Sized,
    P: BaseOtProvider,
{
    let start = Instant::now();
    let start_bytes = chan.bytes();
    let mut stats = TranscriptStats::new(*params);
    // fork so the coin toss never shifts the main stream, whichever the mode
    let coin_rng = ChaCha20Rng::from_seed({
        let mut seed = [0u8; 32];
        rng.fill_bytes(&mut seed);
        seed
    });
    let result = (|| {
        check_input(params, &input)?;
        let agreed = handshake_inner(chan, input.role(), params, check)?;
        if check {
            agreed.validate()?;
        }
        let mut driver = Driver {
            code: WhCode::new(agreed.kappa)?,
            chan: &mut *chan,
            params: agreed,
            stats: TranscriptStats::new(agreed),
            coin_rng,
        };
        let out = driver.run(input, provider, rng);
        stats.time_ms = driver.stats.time_ms;
        stats.batches = driver.stats.batches;
        out
    })();
    if let Err(e) = &result {
        if matches!(e, Error::Protocol(_)) {
            // best effort: the peer may already be gone
            let _ = chan.send_abort(AbortReason::ProtocolViolation);
        }
        stats.aborted = true;
        stats.abort_reason = e.abort_reason();
    }
    stats.bytes = ByteReport::from(chan.bytes().since(&start_bytes));
    stats.time_ms.total = ms(start);
    SessionRun { stats, result }
}

fn check_input(params: &Params, input: &SessionInput<'_>) -> Result<()> {
    match input {
        SessionInput::Sender(x) => {
            if x.rows() != params.m || x.n() != params.n || x.ell() != params.ell {
                return Err(Error::Input(format!(
                    "sender inputs are {}x{} values of {} bits, parameters need {}x{} of {}",
                    x.rows(),
                    x.n(),
                    x.ell(),
                    params.m,
                    params.n,
                    params.ell
                )));
            }
        }
        SessionInput::Receiver(r) => {
            if r.len() != params.m {
                return Err(Error::Input(format!(
                    "{} choices given, parameters need {}",
                    r.len(),
                    params.m
                )));
            }
            ChoiceVector::new(r.as_slice().to_vec(), params.n)?;
        }
    }
    Ok(())
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

impl<R: Read, W: Write> Driver<'_, R, W> {
    fn run<G, P>(
        &mut self,
        input: SessionInput<'_>,
        provider: &mut P,
        rng: &mut G,
    ) -> Result<Option<Vec<BitVector>>>
    where
        G: RngCore + CryptoRng + ?Sized,
        P: BaseOtProvider,
    {
        let mut received = Vec::new();
        for batch in self.params.batches() {
            match input {
                SessionInput::Sender(x) => self.sender_batch(batch, x, provider, rng)?,
                SessionInput::Receiver(r) => {
                    let z = self.receiver_batch(batch, r.as_slice(), provider, rng)?;
                    received.extend(z);
                }
            }
            self.stats.batches += 1;
        }
        Ok(match input {
            SessionInput::Sender(_) => None,
            SessionInput::Receiver(_) => Some(received),
        })
    }

    fn sender_batch<G, P>(
        &mut self,
        batch: Batch,
        inputs: &SenderInputs,
        provider: &mut P,
        rng: &mut G,
    ) -> Result<()>
    where
        G: RngCore + CryptoRng + ?Sized,
        P: BaseOtProvider,
    {
        let p = self.params;
        let rows = p.rows(batch.size);

        let t = Instant::now();
        let s = BaseChoice::random(p.kappa, rng);
        let outputs = provider.receive_seeds(self.chan, &s)?;
        self.stats.time_ms.seed_ot += ms(t);

        let t = Instant::now();
        let d_bytes = self
            .chan
            .expect_len(MsgType::MatrixD, p.kappa * bytes_for(rows))?;
        let d = BitMatrix::from_bytes(rows, p.kappa, &d_bytes)?;
        let state = sender_phase1(s.bits(), &outputs, &d)?;
        self.stats.time_ms.phase1 += ms(t);

        if p.mode == Mode::Active {
            let t = Instant::now();
            let coin = coin_toss(self.chan, Role::Sender, p.kappa, p.mu, rows, &mut self.coin_rng)?;
            let payload = self
                .chan
                .expect_len(MsgType::Checks, CHECK_TUPLE_LEN * p.mu)?;
            let tuples = CheckTuple::decode_all(&payload)?;
            if let Err(e) = sender_check(&state, &self.code, &coin.output, &tuples) {
                if let Error::CheckFailed { .. } = e {
                    self.chan.send_abort(AbortReason::CheckFailed)?;
                }
                return Err(e);
            }
            self.stats.time_ms.check += ms(t);
        }

        let t = Instant::now();
        let x = inputs.slice_rows(batch.offset, batch.size);
        let y = sender_phase2(&state, &self.code, &x, batch.offset)?;
        self.chan.send(MsgType::Masked, &y.to_bytes())?;
        self.stats.time_ms.phase2 += ms(t);
        Ok(())
    }

    fn receiver_batch<G, P>(
        &mut self,
        batch: Batch,
        choices: &[usize],
        provider: &mut P,
        rng: &mut G,
    ) -> Result<Vec<BitVector>>
    where
        G: RngCore + CryptoRng + ?Sized,
        P: BaseOtProvider,
    {
        let p = self.params;
        let rows = p.rows(batch.size);
        let mine = &choices[batch.offset..batch.offset + batch.size];

        let t = Instant::now();
        let pairs = SeedPairs::random(p.kappa, rng);
        provider.send_seeds(self.chan, &pairs)?;
        self.stats.time_ms.seed_ot += ms(t);

        let t = Instant::now();
        let state = receiver_phase1(&self.code, p.n, p.mu, &pairs, mine, rng)?;
        self.chan.send(MsgType::MatrixD, &state.d.to_bytes())?;
        self.stats.time_ms.phase1 += ms(t);

        if p.mode == Mode::Active {
            let t = Instant::now();
            let coin = coin_toss(self.chan, Role::Receiver, p.kappa, p.mu, rows, &mut self.coin_rng)?;
            let tuples = receiver_check(&state, &self.code, &coin.output)?;
            self.chan
                .send(MsgType::Checks, &CheckTuple::encode_all(&tuples))?;
            self.stats.time_ms.check += ms(t);
        }

        let t = Instant::now();
        let payload = self.chan.expect_len(
            MsgType::Masked,
            ValueTable::wire_len(batch.size, p.n, p.ell),
        )?;
        let y = ValueTable::from_bytes(batch.size, p.n, p.ell, &payload)?;
        let z = receiver_phase2(&state, &y, mine, batch.offset)?;
        self.stats.time_ms.phase2 += ms(t);
        Ok(z)
    }
}
