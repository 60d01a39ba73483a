//! Actively secure 1-out-of-n oblivious transfer extension for short
//! secrets, built on Walsh-Hadamard codes, together with its semi-honest
//! counterpart.
//!
//! The crate is organised bottom-up: [`bitops`] holds the GF(2) kernels,
//! [`whcode`] the code, [`crypto`] the random oracle, PRG and coin toss,
//! [`base_ot`] the seed-OT interface, and [`otext`] the protocol itself.
//! With the `insecure-attacks` feature, [`adversary`] adds a malicious
//! receiver and the choice-extraction oracle used in testing.

pub mod base_ot;
pub mod bitops;
pub mod crypto;
pub mod error;
pub mod otext;
pub mod stats;
pub mod transport;
pub mod whcode;

#[cfg(feature = "insecure-attacks")]
pub mod adversary;

pub use bitops::{BitMatrix, BitVector};
pub use error::{Error, Result};
pub use otext::{ChoiceVector, Mode, Params, SenderInputs, ValueTable};
pub use whcode::WhCode;

use serde::{Deserialize, Serialize};

/// Which side of the extension a party plays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Sender,
    Receiver,
}
