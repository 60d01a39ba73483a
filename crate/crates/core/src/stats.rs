//! Session statistics, closed-form byte prediction, and the comparison
//! between the two.

use serde::{Deserialize, Serialize};

use crate::base_ot::seed_pairs_len;
use crate::bitops::bytes_for;
use crate::otext::data::{ValueTable, CHECK_TUPLE_LEN};
use crate::otext::params::{Mode, Params};
use crate::otext::session::HELLO_LEN;
use crate::transport::{AbortReason, ByteCounts, FRAME_HEADER_LEN};

/// Relative error allowed between measured and predicted extension bytes.
pub const PREDICTION_TOLERANCE: f64 = 0.02;

/// Per-category byte counts plus their total, as written to the stats JSON.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByteReport {
    pub base_ot: u64,
    pub matrix_d: u64,
    pub coin_toss: u64,
    pub checks: u64,
    pub masked: u64,
    pub framing: u64,
    pub total: u64,
}

impl From<ByteCounts> for ByteReport {
    fn from(c: ByteCounts) -> Self {
        Self {
            base_ot: c.base_ot,
            matrix_d: c.matrix_d,
            coin_toss: c.coin_toss,
            checks: c.checks,
            masked: c.masked,
            framing: c.framing,
            total: c.total(),
        }
    }
}

impl ByteReport {
    pub fn counts(&self) -> ByteCounts {
        ByteCounts {
            base_ot: self.base_ot,
            matrix_d: self.matrix_d,
            coin_toss: self.coin_toss,
            checks: self.checks,
            masked: self.masked,
            framing: self.framing,
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.counts().total() == self.total
    }
}

/// Wall-clock milliseconds per phase, summed over batches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub seed_ot: f64,
    pub phase1: f64,
    pub check: f64,
    pub phase2: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptStats {
    pub params: Params,
    pub mode: Mode,
    pub bytes: ByteReport,
    pub time_ms: PhaseTimes,
    pub batches: usize,
    pub aborted: bool,
    pub abort_reason: Option<AbortReason>,
}

impl TranscriptStats {
    pub fn new(params: Params) -> Self {
        Self {
            params,
            mode: params.mode,
            bytes: ByteReport::default(),
            time_ms: PhaseTimes::default(),
            batches: 0,
            aborted: false,
            abort_reason: None,
        }
    }

    pub fn counts(&self) -> ByteCounts {
        self.bytes.counts()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

/// Exact byte counts of a complete honest session under the wire format.
pub fn predict_bytes(params: &Params) -> ByteCounts {
    let kappa = params.kappa;
    let active = params.mode == Mode::Active;
    let mut c = ByteCounts::default();
    let mut messages = 0u64;
    for batch in params.batches() {
        c.base_ot += seed_pairs_len(kappa) as u64;
        c.matrix_d += (kappa * bytes_for(params.rows(batch.size))) as u64;
        c.masked += ValueTable::wire_len(batch.size, params.n, params.ell) as u64;
        messages += 3;
        if active {
            c.coin_toss += 2 * bytes_for(kappa) as u64;
            c.checks += (CHECK_TUPLE_LEN * params.mu) as u64;
            messages += 3;
        }
    }
    c.framing = 2 * (FRAME_HEADER_LEN + HELLO_LEN) as u64 + messages * FRAME_HEADER_LEN as u64;
    c
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CategoryError {
    pub name: &'static str,
    pub measured: u64,
    pub predicted: u64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionReport {
    pub categories: Vec<CategoryError>,
    pub extension_measured: u64,
    pub extension_predicted: u64,
    pub extension_rel_err: f64,
    pub within_tolerance: bool,
}

/// Relative error per category; the gate covers the extension categories and
/// their sum.
pub fn measure_vs_predict(measured: &ByteCounts, predicted: &ByteCounts) -> PredictionReport {
    let pick = |c: &ByteCounts| {
        [
            ("base_ot", c.base_ot),
            ("matrix_d", c.matrix_d),
            ("coin_toss", c.coin_toss),
            ("checks", c.checks),
            ("masked", c.masked),
            ("framing", c.framing),
        ]
    };
    let categories: Vec<CategoryError> = pick(measured)
        .into_iter()
        .zip(pick(predicted))
        .map(|((name, m), (_, p))| CategoryError {
            name,
            measured: m,
            predicted: p,
            rel_err: rel_err(m, p),
        })
        .collect();
    let extension_rel_err = rel_err(measured.extension(), predicted.extension());
    let gated = ["matrix_d", "coin_toss", "checks", "masked"];
    let within_tolerance = extension_rel_err <= PREDICTION_TOLERANCE
        && categories
            .iter()
            .filter(|c| gated.contains(&c.name))
            .all(|c| c.rel_err <= PREDICTION_TOLERANCE);
    PredictionReport {
        categories,
        extension_measured: measured.extension(),
        extension_predicted: predicted.extension(),
        extension_rel_err,
        within_tolerance,
    }
}

/// `|measured - reference| / reference`; zero when both are zero.
pub fn rel_err(measured: u64, reference: u64) -> f64 {
    if reference == 0 {
        return if measured == 0 { 0.0 } else { f64::INFINITY };
    }
    (measured as f64 - reference as f64).abs() / reference as f64
}

/// Bytes in mebibytes (2^20), the unit of the published tables.
pub fn mib(bytes: u64) -> f64 {
    bytes as f64 / (1u64 << 20) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_scale_prediction() {
        // m = 1.25e6, n = 16, ell = 4 without padding rows
        let p = Params::semi_honest(1_250_000, 16, 4);
        let c = predict_bytes(&p);
        assert_eq!(c.matrix_d, 40_000_000);
        assert_eq!(c.masked, 10_000_000);
        assert!((mib(c.matrix_d + c.masked) - 47.68).abs() < 0.01);
        let batches = p.batches().len() as u64;
        assert_eq!(c.base_ot, batches * 2 * 256 * 32);
        assert_eq!(c.framing, 2 * 32 + batches * 15);

        let a = predict_bytes(&Params::active(1_250_000, 16, 4));
        let extra_per_batch = 3072 + 288 + 64;
        assert_eq!(
            a.extension() - c.extension(),
            batches * (extra_per_batch + 15)
        );
    }

    #[test]
    fn small_table_prediction() {
        let c = predict_bytes(&Params::active(125_000, 16, 4));
        assert!((mib(c.extension()) - 4.77).abs() / 4.77 < 0.02);
    }

    #[test]
    fn report_flags_excess() {
        let p = predict_bytes(&Params::active(1000, 16, 4));
        let same = measure_vs_predict(&p, &p);
        assert!(same.within_tolerance);
        assert_eq!(same.extension_rel_err, 0.0);
        let mut off = p;
        off.masked += p.masked / 10;
        assert!(!measure_vs_predict(&off, &p).within_tolerance);
    }

    #[test]
    fn rel_err_edges() {
        assert_eq!(rel_err(0, 0), 0.0);
        assert!(rel_err(1, 0).is_infinite());
        assert!((rel_err(102, 100) - 0.02).abs() < 1e-12);
    }
}
