use serde::{Deserialize, Serialize};

use super::biquad::{butterworth_qs, Cascade, Coefficients};
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::processor::StreamProcessor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LpfParams {
    pub cutoff_hz: f64,
    pub order: usize,
}

impl Default for LpfParams {
    fn default() -> Self {
        Self {
            cutoff_hz: 1000.0,
            order: 4,
        }
    }
}

impl LpfParams {
    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        if !(self.cutoff_hz > 0.0 && self.cutoff_hz < nyquist) {
            return Err(Error::InvalidParam(format!(
                "cutoff {} Hz outside (0, {nyquist})",
                self.cutoff_hz
            )));
        }
        if self.order == 0 || self.order % 2 != 0 {
            return Err(Error::InvalidParam(format!(
                "order {} must be even and positive",
                self.order
            )));
        }
        Ok(())
    }
}

/// Butterworth low-pass as `order / 2` cascaded biquads.
#[derive(Debug, Clone)]
pub struct LowPass {
    cascade: Cascade,
}

impl LowPass {
    pub fn new(params: &LpfParams, sample_rate: u32) -> Result<Self> {
        params.validate(sample_rate)?;
        let fs = sample_rate as f64;
        Ok(Self {
            cascade: Cascade::new(
                butterworth_qs(params.order)
                    .into_iter()
                    .map(|q| Coefficients::lowpass(params.cutoff_hz, q, fs)),
            ),
        })
    }

    pub fn magnitude_db(&self, freq: f64, sample_rate: u32) -> f64 {
        20.0 * self.cascade.response(freq, sample_rate as f64).norm().log10()
    }
}

impl StreamProcessor for LowPass {
    fn process_block(&mut self, block: &mut [f32]) {
        for s in block.iter_mut() {
            *s = self.cascade.tick(*s as f64) as f32;
        }
    }

    fn reset(&mut self) {
        self.cascade.reset();
    }
}

pub fn lpf_process(params: &LpfParams, x: &AudioBuffer) -> Result<AudioBuffer> {
    LowPass::new(params, x.sample_rate())?.process_buffer(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_order_and_bad_cutoff() {
        assert!(LowPass::new(&LpfParams { cutoff_hz: 1000.0, order: 3 }, 32_000).is_err());
        assert!(LowPass::new(&LpfParams { cutoff_hz: 1000.0, order: 0 }, 32_000).is_err());
        assert!(LowPass::new(&LpfParams { cutoff_hz: 16_000.0, order: 4 }, 32_000).is_err());
        assert!(LowPass::new(&LpfParams { cutoff_hz: -5.0, order: 4 }, 32_000).is_err());
    }

    #[test]
    fn analytic_corner_is_minus_3db() {
        let lp = LowPass::new(&LpfParams::default(), 32_000).unwrap();
        assert!((lp.magnitude_db(1000.0, 32_000) + 3.0103).abs() < 1e-3);
        assert!(lp.magnitude_db(100.0, 32_000).abs() < 1e-3);
        assert!(lp.magnitude_db(8000.0, 32_000) < -70.0);
    }
}
