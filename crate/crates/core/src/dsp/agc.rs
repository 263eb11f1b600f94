//! Automatic gain control driven by a rectified-signal envelope.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::audio::{db_to_amplitude, AudioBuffer};
use crate::error::{Error, Result};
use crate::processor::StreamProcessor;

const ENVELOPE_FLOOR: f64 = 1e-6;

/// Coefficients are per-sample smoothing factors, not time constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgcParams {
    pub attack_coeff: f64,
    pub release_coeff: f64,
    pub target_level_dbfs: f64,
    pub max_gain_db: f64,
}

impl Default for AgcParams {
    fn default() -> Self {
        Self {
            attack_coeff: 0.05,
            release_coeff: 0.005,
            target_level_dbfs: -25.0,
            max_gain_db: 12.0,
        }
    }
}

impl AgcParams {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |c: f64| c > 0.0 && c <= 1.0;
        if !in_unit(self.attack_coeff) || !in_unit(self.release_coeff) {
            return Err(Error::InvalidParam(
                "AGC attack/release coefficients must lie in (0, 1]".into(),
            ));
        }
        if !self.target_level_dbfs.is_finite() {
            return Err(Error::InvalidParam("target_level_dbfs must be finite".into()));
        }
        if !(self.max_gain_db >= 0.0) || !self.max_gain_db.is_finite() {
            return Err(Error::InvalidParam("max_gain_db must be finite and >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AutoGain {
    attack: f64,
    release: f64,
    target: f64,
    max_gain: f64,
    envelope: f64,
}

impl AutoGain {
    pub fn new(params: &AgcParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            attack: params.attack_coeff,
            release: params.release_coeff,
            target: db_to_amplitude(params.target_level_dbfs)
                * sine_envelope_to_rms(params.attack_coeff, params.release_coeff),
            max_gain: db_to_amplitude(params.max_gain_db),
            envelope: 0.0,
        })
    }
}

impl StreamProcessor for AutoGain {
    fn process_block(&mut self, block: &mut [f32]) {
        for s in block.iter_mut() {
            let x = *s as f64;
            let rect = x.abs();
            let coeff = if rect > self.envelope {
                self.attack
            } else {
                self.release
            };
            self.envelope += coeff * (rect - self.envelope);
            let gain = (self.target / self.envelope.max(ENVELOPE_FLOOR)).clamp(0.0, self.max_gain);
            *s = (x * gain) as f32;
        }
    }

    fn reset(&mut self) {
        self.envelope = 0.0;
    }
}

/// Ratio of the follower's steady-state reading to the RMS of a sine.
///
/// With asymmetric coefficients the envelope of a rectified sine settles
/// where `attack * E[(|x| - e)+] == release * E[(e - |x|)+]`, well above the
/// mean absolute value. Scaling the target by this ratio makes a steady sine
/// at `target_level_dbfs` RMS pass at unity gain.
pub fn sine_envelope_to_rms(attack: f64, release: f64) -> f64 {
    use std::f64::consts::FRAC_2_PI;
    // u = |sin(theta)| with theta uniform; closed forms for the partial moments.
    let above = |e: f64| FRAC_2_PI * ((1.0 - e * e).sqrt() - e * (FRAC_PI_2 - e.asin()));
    let below = |e: f64| e - FRAC_2_PI + above(e);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if attack * above(mid) > release * below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) * SQRT_2
}

pub fn agc_process(params: &AgcParams, x: &AudioBuffer) -> Result<AudioBuffer> {
    AutoGain::new(params)?.process_buffer(x)
}
