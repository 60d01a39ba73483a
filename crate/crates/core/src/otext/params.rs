use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::crypto::MAX_RO_BITS;
use crate::error::{Error, Result};

pub const DEFAULT_KAPPA: usize = 256;
pub const DEFAULT_MU: usize = 96;
pub const DEFAULT_BATCH_SIZE: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SemiHonest,
    Active,
}

impl Mode {
    pub fn code(self) -> u8 {
        match self {
            Mode::SemiHonest => 0,
            Mode::Active => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Mode::SemiHonest),
            1 => Some(Mode::Active),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::SemiHonest => "semi-honest",
            Mode::Active => "active",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semi-honest" => Ok(Mode::SemiHonest),
            "active" => Ok(Mode::Active),
            other => Err(Error::Param(format!("unknown mode {other:?}"))),
        }
    }
}

/// Protocol parameters. Both parties must hold identical values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub kappa: usize,
    pub mu: usize,
    pub m: usize,
    pub n: usize,
    pub ell: usize,
    pub mode: Mode,
    pub batch_size: usize,
}

/// One batch: `size` OTs starting at 0-based OT `offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Batch {
    pub offset: usize,
    pub size: usize,
}

impl Params {
    /// Active mode with the default κ, μ and batch size.
    pub fn active(m: usize, n: usize, ell: usize) -> Self {
        Self {
            kappa: DEFAULT_KAPPA,
            mu: DEFAULT_MU,
            m,
            n,
            ell,
            mode: Mode::Active,
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }

    /// Semi-honest mode (no padding rows, no checks).
    pub fn semi_honest(m: usize, n: usize, ell: usize) -> Self {
        Self {
            mu: 0,
            mode: Mode::SemiHonest,
            ..Self::active(m, n, ell)
        }
    }

    pub fn with_kappa(self, kappa: usize) -> Self {
        Self { kappa, ..self }
    }

    pub fn with_mu(self, mu: usize) -> Self {
        Self { mu, ..self }
    }

    pub fn with_batch_size(self, batch_size: usize) -> Self {
        Self { batch_size, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Param(msg));
        if self.kappa < 2 || !self.kappa.is_power_of_two() || self.kappa > 1 << 15 {
            return bad(format!("kappa = {} must be a power of two in [2, 32768]", self.kappa));
        }
        if self.n < 2 || !self.n.is_power_of_two() {
            return bad(format!("n = {} must be a power of two >= 2", self.n));
        }
        if self.n > self.kappa {
            return bad(format!("n = {} exceeds kappa = {}", self.n, self.kappa));
        }
        if self.ell == 0 || self.ell > MAX_RO_BITS {
            return bad(format!("ell = {} must lie in [1, {MAX_RO_BITS}]", self.ell));
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1".into());
        }
        if self.mu > u16::MAX as usize {
            return bad(format!("mu = {} too large", self.mu));
        }
        match self.mode {
            Mode::Active if self.mu == 0 => bad("active mode needs mu >= 1".into()),
            Mode::SemiHonest if self.mu != 0 => bad("semi-honest mode needs mu = 0".into()),
            _ => Ok(()),
        }
    }

    pub fn batches(&self) -> Vec<Batch> {
        let step = self.batch_size.max(1);
        (0..self.m)
            .step_by(step)
            .map(|offset| Batch {
                offset,
                size: step.min(self.m - offset),
            })
            .collect()
    }

    /// Rows of B, E, D and A in a batch of `size` OTs.
    pub fn rows(&self, size: usize) -> usize {
        size + self.mu
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Params::active(1000, 16, 4).validate().unwrap();
        Params::semi_honest(1000, 16, 4).validate().unwrap();
    }

    #[test]
    fn invalid_parameters_rejected() {
        let base = Params::active(10, 4, 4).with_kappa(8);
        for p in [
            base.with_kappa(12),
            Params { n: 16, ..base },
            Params { n: 3, ..base },
            Params { n: 1, ..base },
            Params { ell: 0, ..base },
            Params { ell: 257, ..base },
            Params { m: 0, ..base },
            base.with_mu(0),
            base.with_batch_size(0),
            Params {
                mode: Mode::SemiHonest,
                ..base
            },
        ] {
            assert!(matches!(p.validate(), Err(Error::Param(_))), "{p:?}");
        }
    }

    #[test]
    fn batch_partition() {
        let p = Params::active(70_000, 16, 4);
        assert_eq!(
            p.batches(),
            vec![
                Batch {
                    offset: 0,
                    size: 65_536
                },
                Batch {
                    offset: 65_536,
                    size: 4_464
                }
            ]
        );
        assert_eq!(Params::active(65_536, 16, 4).batches().len(), 1);
    }

    #[test]
    fn mode_strings() {
        for mode in [Mode::Active, Mode::SemiHonest] {
            assert_eq!(mode.as_str().parse::<Mode>().unwrap(), mode);
            assert_eq!(Mode::from_code(mode.code()), Some(mode));
            assert_eq!(
                serde_json::to_string(&mode).unwrap(),
                format!("\"{}\"", mode.as_str())
            );
        }
    }
}
