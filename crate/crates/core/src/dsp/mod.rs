//! Causal trigger-attenuation processors.
//!
//! Every processor implements [`StreamProcessor`] with zero algorithmic
//! latency. Defaults are the tuned values for the compressor, equalizer and
//! low-pass; the AGC and transient reducer defaults are stated choices.

pub mod agc;
pub mod biquad;
pub mod drc;
pub mod eq;
pub mod lpf;
pub mod mctr;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use agc::{agc_process, AgcParams, AutoGain};
pub use drc::{drc_process, static_gain_curve, Compressor, DrcParams};
pub use eq::{eq_process, EqBand, EqParams, Equalizer, ShelfType};
pub use lpf::{lpf_process, LowPass, LpfParams};
pub use mctr::{mctr_process, MctrParams, TransientReducer};

use crate::error::{Error, Result};
use crate::processor::{Identity, Mute, StreamProcessor};

/// Parameter records for every processor, as read from a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProcessorParams {
    pub drc: DrcParams,
    pub eq: EqParams,
    pub agc: AgcParams,
    pub mctr: MctrParams,
    pub lpf: LpfParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Drc,
    Eq,
    Agc,
    Mctr,
    Lpf,
    Identity,
    /// Outputs silence.
    Zero,
}

impl Algorithm {
    /// The five enhancement processors.
    pub const DSP: [Algorithm; 5] = [
        Algorithm::Drc,
        Algorithm::Eq,
        Algorithm::Agc,
        Algorithm::Mctr,
        Algorithm::Lpf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Drc => "drc",
            Algorithm::Eq => "eq",
            Algorithm::Agc => "agc",
            Algorithm::Mctr => "mctr",
            Algorithm::Lpf => "lpf",
            Algorithm::Identity => "identity",
            Algorithm::Zero => "zero",
        }
    }

    pub fn build(
        self,
        params: &ProcessorParams,
        sample_rate: u32,
    ) -> Result<Box<dyn StreamProcessor>> {
        Ok(match self {
            Algorithm::Drc => Box::new(Compressor::new(&params.drc, sample_rate)?),
            Algorithm::Eq => Box::new(Equalizer::new(&params.eq, sample_rate)?),
            Algorithm::Agc => Box::new(AutoGain::new(&params.agc)?),
            Algorithm::Mctr => Box::new(TransientReducer::new(&params.mctr, sample_rate)?),
            Algorithm::Lpf => Box::new(LowPass::new(&params.lpf, sample_rate)?),
            Algorithm::Identity => Box::new(Identity),
            Algorithm::Zero => Box::new(Mute),
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "drc" => Algorithm::Drc,
            "eq" => Algorithm::Eq,
            "agc" => Algorithm::Agc,
            "mctr" => Algorithm::Mctr,
            "lpf" => Algorithm::Lpf,
            "identity" => Algorithm::Identity,
            "zero" => Algorithm::Zero,
            other => return Err(Error::InvalidParam(format!("unknown algorithm {other:?}"))),
        })
    }
}
