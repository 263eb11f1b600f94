//! The streaming-processor contract shared by every enhancement algorithm.

use crate::audio::AudioBuffer;
use crate::error::Result;

/// A causal, block-size agnostic audio processor.
///
/// Implementations must produce bit-identical output regardless of how a
/// signal is partitioned into blocks, and `reset` must restore the state of a
/// freshly constructed instance.
pub trait StreamProcessor: Send {
    /// Processes one block in place.
    fn process_block(&mut self, block: &mut [f32]);

    /// Clears all internal state.
    fn reset(&mut self);

    /// Pure algorithmic delay in samples.
    fn latency_samples(&self) -> usize {
        0
    }

    /// Processes a whole buffer from the current state.
    fn process_buffer(&mut self, input: &AudioBuffer) -> Result<AudioBuffer> {
        let mut samples = input.samples().to_vec();
        self.process_block(&mut samples);
        AudioBuffer::new(samples, input.sample_rate())
    }
}

impl<P: StreamProcessor + ?Sized> StreamProcessor for Box<P> {
    fn process_block(&mut self, block: &mut [f32]) {
        (**self).process_block(block)
    }

    fn reset(&mut self) {
        (**self).reset()
    }

    fn latency_samples(&self) -> usize {
        (**self).latency_samples()
    }
}

/// Pass-through.
#[derive(Debug, Default, Clone)]
pub struct Identity;

impl StreamProcessor for Identity {
    fn process_block(&mut self, _block: &mut [f32]) {}

    fn reset(&mut self) {}
}

/// Outputs silence regardless of input.
#[derive(Debug, Default, Clone)]
pub struct Mute;

impl StreamProcessor for Mute {
    fn process_block(&mut self, block: &mut [f32]) {
        block.fill(0.0);
    }

    fn reset(&mut self) {}
}

/// Converts a time constant in milliseconds into a one-pole smoothing
/// coefficient `1 - exp(-1 / (tau * fs))`.
///
/// Time constants shorter than one sample saturate to 1 (instantaneous).
pub(crate) fn one_pole_coeff(tau_ms: f64, sample_rate: u32) -> f64 {
    let tau_samples = tau_ms * 1e-3 * sample_rate as f64;
    if tau_samples < 1.0 {
        1.0
    } else {
        1.0 - (-1.0 / tau_samples).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_sample_time_constant_is_instantaneous() {
        assert_eq!(one_pole_coeff(0.01, 32_000), 1.0);
        assert_eq!(one_pole_coeff(0.0, 32_000), 1.0);
        let c = one_pole_coeff(100.0, 32_000);
        assert!((c - (1.0 - (-1.0f64 / 3200.0).exp())).abs() < 1e-15);
    }

    #[test]
    fn mute_and_identity() {
        let x = AudioBuffer::new(vec![0.5, -0.25, 1.5], 8000).unwrap();
        assert_eq!(Identity.process_buffer(&x).unwrap(), x);
        assert!(Mute
            .process_buffer(&x)
            .unwrap()
            .samples()
            .iter()
            .all(|&s| s == 0.0));
    }
}
