//! Message framing and byte accounting.
//!
//! Every message is `{type: u8, len: u32 LE, payload}`. The channel counts
//! bytes in both directions at this layer, so the totals it reports are the
//! exact wire volume of the session.

use std::io::{self, BufReader, BufWriter, Read, Write};
use std::net::TcpStream;
use std::os::unix::net::UnixStream;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FRAME_HEADER_LEN: usize = 5;
const MAX_PAYLOAD: usize = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MsgType {
    Hello = 1,
    SeedPairs = 2,
    MatrixD = 3,
    CoinR = 4,
    CoinS = 5,
    Checks = 6,
    Masked = 7,
    Abort = 8,
}

impl MsgType {
    pub fn from_u8(b: u8) -> Option<Self> {
        Some(match b {
            1 => Self::Hello,
            2 => Self::SeedPairs,
            3 => Self::MatrixD,
            4 => Self::CoinR,
            5 => Self::CoinS,
            6 => Self::Checks,
            7 => Self::Masked,
            8 => Self::Abort,
            _ => return None,
        })
    }

    fn category(self) -> Category {
        match self {
            Self::SeedPairs => Category::BaseOt,
            Self::MatrixD => Category::MatrixD,
            Self::CoinR | Self::CoinS => Category::CoinToss,
            Self::Checks => Category::Checks,
            Self::Masked => Category::Masked,
            // control traffic is booked together with the frame headers
            Self::Hello | Self::Abort => Category::Framing,
        }
    }
}

/// Reason code carried by `MSG_ABORT`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AbortReason {
    CheckFailed,
    ParamMismatch,
    InvalidParams,
    VersionMismatch,
    ModeMismatch,
    ProtocolViolation,
    Unknown(u8),
}

impl AbortReason {
    pub fn code(self) -> u8 {
        match self {
            Self::CheckFailed => 1,
            Self::ParamMismatch => 2,
            Self::InvalidParams => 3,
            Self::VersionMismatch => 4,
            Self::ModeMismatch => 5,
            Self::ProtocolViolation => 6,
            Self::Unknown(c) => c,
        }
    }

    pub fn from_code(code: u8) -> Self {
        match code {
            1 => Self::CheckFailed,
            2 => Self::ParamMismatch,
            3 => Self::InvalidParams,
            4 => Self::VersionMismatch,
            5 => Self::ModeMismatch,
            6 => Self::ProtocolViolation,
            c => Self::Unknown(c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Category {
    BaseOt,
    MatrixD,
    CoinToss,
    Checks,
    Masked,
    Framing,
}

/// Per-category byte counts, both directions combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByteCounts {
    pub base_ot: u64,
    pub matrix_d: u64,
    pub coin_toss: u64,
    pub checks: u64,
    pub masked: u64,
    pub framing: u64,
}

impl ByteCounts {
    pub fn total(&self) -> u64 {
        self.base_ot + self.matrix_d + self.coin_toss + self.checks + self.masked + self.framing
    }

    /// Everything except the seed-OT traffic.
    pub fn extension(&self) -> u64 {
        self.total() - self.base_ot
    }

    /// Counts accumulated after the snapshot `earlier` was taken.
    pub fn since(&self, earlier: &ByteCounts) -> ByteCounts {
        ByteCounts {
            base_ot: self.base_ot - earlier.base_ot,
            matrix_d: self.matrix_d - earlier.matrix_d,
            coin_toss: self.coin_toss - earlier.coin_toss,
            checks: self.checks - earlier.checks,
            masked: self.masked - earlier.masked,
            framing: self.framing - earlier.framing,
        }
    }

    fn add(&mut self, cat: Category, n: u64) {
        match cat {
            Category::BaseOt => self.base_ot += n,
            Category::MatrixD => self.matrix_d += n,
            Category::CoinToss => self.coin_toss += n,
            Category::Checks => self.checks += n,
            Category::Masked => self.masked += n,
            Category::Framing => self.framing += n,
        }
    }

    fn record(&mut self, ty: MsgType, payload_len: usize) {
        self.add(Category::Framing, FRAME_HEADER_LEN as u64);
        self.add(ty.category(), payload_len as u64);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Sent,
    Received,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub direction: Direction,
    pub ty: MsgType,
    pub payload: Vec<u8>,
}

/// A framed, byte-counting duplex channel.
pub struct Channel<R: Read, W: Write> {
    reader: BufReader<R>,
    writer: BufWriter<W>,
    bytes: ByteCounts,
    transcript: Option<Vec<Frame>>,
}

pub type TcpChannel = Channel<TcpStream, TcpStream>;
pub type LocalChannel = Channel<UnixStream, UnixStream>;

impl<R: Read, W: Write> Channel<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self {
            reader: BufReader::with_capacity(1 << 16, reader),
            writer: BufWriter::with_capacity(1 << 16, writer),
            bytes: ByteCounts::default(),
            transcript: None,
        }
    }

    pub fn bytes(&self) -> ByteCounts {
        self.bytes
    }

    /// Starts keeping a copy of every frame sent or received.
    pub fn record_transcript(&mut self) {
        self.transcript.get_or_insert_with(Vec::new);
    }

    pub fn take_transcript(&mut self) -> Vec<Frame> {
        self.transcript.take().unwrap_or_default()
    }

    pub fn send(&mut self, ty: MsgType, payload: &[u8]) -> Result<()> {
        let len = u32::try_from(payload.len())
            .map_err(|_| Error::Protocol(format!("payload of {} bytes too large", payload.len())))?;
        self.writer.write_all(&[ty as u8])?;
        self.writer.write_all(&len.to_le_bytes())?;
        self.writer.write_all(payload)?;
        self.writer.flush()?;
        self.bytes.record(ty, payload.len());
        if let Some(t) = self.transcript.as_mut() {
            t.push(Frame {
                direction: Direction::Sent,
                ty,
                payload: payload.to_vec(),
            });
        }
        Ok(())
    }

    pub fn send_abort(&mut self, reason: AbortReason) -> Result<()> {
        self.send(MsgType::Abort, &[reason.code()])
    }

    pub fn recv(&mut self) -> Result<(MsgType, Vec<u8>)> {
        let mut header = [0u8; FRAME_HEADER_LEN];
        self.reader.read_exact(&mut header)?;
        let ty = MsgType::from_u8(header[0])
            .ok_or_else(|| Error::Protocol(format!("unknown message type {}", header[0])))?;
        let len = u32::from_le_bytes(header[1..5].try_into().expect("4 bytes")) as usize;
        if len > MAX_PAYLOAD {
            return Err(Error::Protocol(format!("payload length {len} exceeds limit")));
        }
        let mut payload = vec![0u8; len];
        self.reader.read_exact(&mut payload)?;
        self.bytes.record(ty, len);
        if let Some(t) = self.transcript.as_mut() {
            t.push(Frame {
                direction: Direction::Received,
                ty,
                payload: payload.clone(),
            });
        }
        Ok((ty, payload))
    }

    /// Receives a message of type `want`. An `MSG_ABORT` from the peer becomes
    /// [`Error::PeerAbort`]; any other type is a protocol violation.
    pub fn expect(&mut self, want: MsgType) -> Result<Vec<u8>> {
        let (ty, payload) = self.recv()?;
        if ty == want {
            return Ok(payload);
        }
        if ty == MsgType::Abort {
            let code = payload.first().copied().unwrap_or(0);
            return Err(Error::PeerAbort(AbortReason::from_code(code)));
        }
        Err(Error::Protocol(format!("expected {want:?}, received {ty:?}")))
    }

    /// Like [`Channel::expect`] but also checks the payload length.
    pub fn expect_len(&mut self, want: MsgType, len: usize) -> Result<Vec<u8>> {
        let payload = self.expect(want)?;
        if payload.len() != len {
            return Err(Error::Protocol(format!(
                "{want:?} payload is {} bytes, expected {len}",
                payload.len()
            )));
        }
        Ok(payload)
    }
}

impl TcpChannel {
    pub fn from_tcp(stream: TcpStream) -> io::Result<Self> {
        stream.set_nodelay(true)?;
        let reader = stream.try_clone()?;
        Ok(Self::new(reader, stream))
    }
}

impl LocalChannel {
    pub fn from_unix(stream: UnixStream) -> io::Result<Self> {
        let reader = stream.try_clone()?;
        Ok(Self::new(reader, stream))
    }

    /// Two connected in-process endpoints.
    pub fn pair() -> io::Result<(Self, Self)> {
        let (a, b) = UnixStream::pair()?;
        Ok((Self::from_unix(a)?, Self::from_unix(b)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_roundtrip_and_are_counted() {
        let (mut a, mut b) = LocalChannel::pair().unwrap();
        a.send(MsgType::MatrixD, &[1, 2, 3]).unwrap();
        a.send(MsgType::Hello, &[9; 10]).unwrap();
        assert_eq!(b.expect(MsgType::MatrixD).unwrap(), vec![1, 2, 3]);
        assert!(matches!(
            b.expect(MsgType::Masked),
            Err(Error::Protocol(_))
        ));
        let sent = a.bytes();
        assert_eq!(sent.matrix_d, 3);
        assert_eq!(sent.framing, 10 + 10);
        assert_eq!(sent, b.bytes());
        assert_eq!(sent.total(), 3 + 10 + 10);
    }

    #[test]
    fn abort_is_surfaced_with_reason() {
        let (mut a, mut b) = LocalChannel::pair().unwrap();
        a.send_abort(AbortReason::CheckFailed).unwrap();
        assert!(matches!(
            b.expect(MsgType::Masked),
            Err(Error::PeerAbort(AbortReason::CheckFailed))
        ));
    }

    #[test]
    fn wrong_length_and_unknown_type_rejected() {
        let (mut a, mut b) = LocalChannel::pair().unwrap();
        a.send(MsgType::Checks, &[0; 4]).unwrap();
        assert!(b.expect_len(MsgType::Checks, 3).is_err());
        a.writer.write_all(&[42, 0, 0, 0, 0]).unwrap();
        a.writer.flush().unwrap();
        assert!(matches!(b.recv(), Err(Error::Protocol(_))));
    }

    #[test]
    fn closed_peer_is_transport_error() {
        let (a, mut b) = LocalChannel::pair().unwrap();
        drop(a);
        assert!(matches!(b.recv(), Err(Error::Transport(_))));
    }

    #[test]
    fn reason_codes_roundtrip() {
        for code in 0u8..10 {
            assert_eq!(AbortReason::from_code(code).code(), code);
        }
    }
}
