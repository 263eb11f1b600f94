//! Feed-forward hard-knee compressor with log-domain gain smoothing.

use serde::{Deserialize, Serialize};

use crate::audio::{AudioBuffer, db_to_amplitude};
use crate::error::{Error, Result};
use crate::processor::{one_pole_coeff, StreamProcessor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrcParams {
    pub threshold_db: f64,
    pub ratio: f64,
    pub attack_ms: f64,
    pub release_ms: f64,
}

impl Default for DrcParams {
    fn default() -> Self {
        Self {
            threshold_db: -35.0,
            ratio: 30.0,
            attack_ms: 0.01,
            release_ms: 100.0,
        }
    }
}

impl DrcParams {
    pub fn validate(&self) -> Result<()> {
        if !self.threshold_db.is_finite() {
            return Err(Error::InvalidParam("threshold_db must be finite".into()));
        }
        if !(self.ratio >= 1.0) {
            return Err(Error::InvalidParam(format!("ratio {} < 1", self.ratio)));
        }
        if !(self.attack_ms >= 0.0) || !(self.release_ms >= 0.0) {
            return Err(Error::InvalidParam("attack/release times must be >= 0".into()));
        }
        Ok(())
    }
}

/// Steady-state output level of the compressor for an input at `level_dbfs`.
pub fn static_gain_curve(params: &DrcParams, level_dbfs: f64) -> f64 {
    if level_dbfs > params.threshold_db {
        params.threshold_db + (level_dbfs - params.threshold_db) / params.ratio
    } else {
        level_dbfs
    }
}

#[derive(Debug, Clone)]
pub struct Compressor {
    threshold_db: f64,
    slope: f64,
    attack: f64,
    release: f64,
    gain_db: f64,
}

impl Compressor {
    pub fn new(params: &DrcParams, sample_rate: u32) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            threshold_db: params.threshold_db,
            slope: 1.0 - 1.0 / params.ratio,
            attack: one_pole_coeff(params.attack_ms, sample_rate),
            release: one_pole_coeff(params.release_ms, sample_rate),
            gain_db: 0.0,
        })
    }

    /// Current smoothed gain in dB (always <= 0).
    pub fn gain_db(&self) -> f64 {
        self.gain_db
    }
}

impl StreamProcessor for Compressor {
    fn process_block(&mut self, block: &mut [f32]) {
        for s in block.iter_mut() {
            let x = *s as f64;
            let level = 20.0 * (x.abs() + 1e-12).log10();
            let target = -(level - self.threshold_db).max(0.0) * self.slope;
            // gain falling = attack, rising = release
            let coeff = if target < self.gain_db {
                self.attack
            } else {
                self.release
            };
            self.gain_db += coeff * (target - self.gain_db);
            *s = (x * db_to_amplitude(self.gain_db)) as f32;
        }
    }

    fn reset(&mut self) {
        self.gain_db = 0.0;
    }
}

pub fn drc_process(params: &DrcParams, x: &AudioBuffer) -> Result<AudioBuffer> {
    Compressor::new(params, x.sample_rate())?.process_buffer(x)
}
