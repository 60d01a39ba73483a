//! The OT extension engine: parameters, per-batch phases, and sessions.

pub mod data;
pub mod params;
pub mod phases;
pub mod session;

pub use data::{CheckTuple, ChoiceVector, MaskedBlock, SenderInputs, ValueTable};
pub use params::{Batch, Mode, Params, DEFAULT_BATCH_SIZE, DEFAULT_KAPPA, DEFAULT_MU};
pub use phases::{
    receiver_check, receiver_phase1, receiver_phase1_from_e, receiver_phase2, sender_check,
    sender_phase1, sender_phase2, ReceiverState, SenderState,
};
pub use session::{
    handshake, run_session, run_session_with, Hello, SessionInput, SessionRun, HELLO_LEN,
    PROTOCOL_VERSION,
};
