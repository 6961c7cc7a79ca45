use std::fmt;
use std::str::FromStr;

use crate::HarnessError;

/// `sc | flip:<max_level> | cascl:<L> | genie:<k>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderSpec {
    Sc,
    Flip(usize),
    CaScl(usize),
    Genie(usize),
}

impl DecoderSpec {
    pub fn needs_crc(self) -> bool {
        matches!(self, Self::Flip(_) | Self::CaScl(_))
    }
}

impl fmt::Display for DecoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sc => write!(f, "sc"),
            Self::Flip(k) => write!(f, "flip:{k}"),
            Self::CaScl(l) => write!(f, "cascl:{l}"),
            Self::Genie(k) => write!(f, "genie:{k}"),
        }
    }
}

impl FromStr for DecoderSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || HarnessError::Config(format!("unknown decoder `{s}` (expected sc, flip:K, cascl:L or genie:K)"));
        let s = s.trim();
        if s == "sc" {
            return Ok(Self::Sc);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let value: usize = arg.parse().map_err(|_| bad())?;
        match kind {
            "flip" => Ok(Self::Flip(value)),
            "cascl" if value >= 1 => Ok(Self::CaScl(value)),
            "genie" => Ok(Self::Genie(value)),
            _ => Err(bad()),
        }
    }
}

/// Comma-separated list of decoder specs.
pub fn parse_list(s: &str) -> Result<Vec<DecoderSpec>, HarnessError> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(str::parse).collect()
}
