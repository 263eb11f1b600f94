//! Mono sampled audio and level measurement.

use crate::error::{Error, Result};

/// Default working sample rate for every ingested clip.
pub const DEFAULT_SAMPLE_RATE: u32 = 32_000;

/// Level returned by [`rms_dbfs`] for an all-zero signal.
pub const SILENCE_DBFS: f64 = -200.0;

/// A mono signal with its sample rate.
///
/// Samples are nominally in `[-1, 1]` but are never clipped here; every sample
/// is guaranteed finite.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f32>,
    sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidBuffer("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidBuffer(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn silence(len: usize, sample_rate: u32) -> Result<Self> {
        Self::new(vec![0.0; len], sample_rate)
    }

    /// Builds a buffer from f64 samples.
    pub fn from_f64(samples: impl IntoIterator<Item = f64>, sample_rate: u32) -> Result<Self> {
        Self::new(samples.into_iter().map(|s| s as f32).collect(), sample_rate)
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn peak(&self) -> f32 {
        self.samples.iter().fold(0.0f32, |m, s| m.max(s.abs()))
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let energy: f64 = self.samples.iter().map(|&s| (s as f64) * (s as f64)).sum();
        (energy / self.samples.len() as f64).sqrt()
    }

    /// Returns a copy with every sample multiplied by `gain`.
    pub fn scaled(&self, gain: f64) -> Result<Self> {
        Self::new(
            self.samples.iter().map(|&s| (s as f64 * gain) as f32).collect(),
            self.sample_rate,
        )
    }

    /// Sample-wise sum of two equally long buffers at the same rate.
    pub fn add(&self, other: &AudioBuffer) -> Result<Self> {
        self.check_compatible(other)?;
        Self::new(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
            self.sample_rate,
        )
    }

    pub(crate) fn check_compatible(&self, other: &AudioBuffer) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        if self.sample_rate != other.sample_rate {
            return Err(Error::InvalidBuffer(format!(
                "sample rate mismatch: {} vs {}",
                self.sample_rate, other.sample_rate
            )));
        }
        Ok(())
    }
}

/// RMS level in dB relative to full scale, clamped at [`SILENCE_DBFS`].
pub fn rms_dbfs(buffer: &AudioBuffer) -> Result<f64> {
    if buffer.is_empty() {
        return Err(Error::Empty("rms of an empty buffer".into()));
    }
    Ok(amplitude_to_db(buffer.rms()))
}

pub(crate) fn amplitude_to_db(amplitude: f64) -> f64 {
    if amplitude <= 0.0 {
        SILENCE_DBFS
    } else {
        (20.0 * amplitude.log10()).max(SILENCE_DBFS)
    }
}

pub(crate) fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_zero_rate() {
        assert!(AudioBuffer::new(vec![0.0, f32::NAN], 8000).is_err());
        assert!(AudioBuffer::new(vec![f32::INFINITY], 8000).is_err());
        assert!(AudioBuffer::new(vec![0.0], 0).is_err());
    }

    #[test]
    fn square_wave_is_zero_dbfs() {
        let b = AudioBuffer::from_f64((0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }), 8000)
            .unwrap();
        assert!(rms_dbfs(&b).unwrap().abs() < 1e-9);
    }

    #[test]
    fn unit_sine_is_minus_3_dbfs() {
        let n = 32_000;
        let b = AudioBuffer::from_f64(
            (0..n).map(|i| (2.0 * std::f64::consts::PI * 1000.0 * i as f64 / n as f64).sin()),
            n as u32,
        )
        .unwrap();
        assert!((rms_dbfs(&b).unwrap() + 3.0103).abs() < 1e-3);
    }

    #[test]
    fn silence_is_clamped_and_empty_errors() {
        let b = AudioBuffer::silence(10, 8000).unwrap();
        assert_eq!(rms_dbfs(&b).unwrap(), SILENCE_DBFS);
        let e = AudioBuffer::silence(0, 8000).unwrap();
        assert!(matches!(rms_dbfs(&e), Err(Error::Empty(_))));
    }

    #[test]
    fn duration_is_len_over_rate() {
        let b = AudioBuffer::silence(48_000, 32_000).unwrap();
        assert_eq!(b.duration_s(), 1.5);
    }
}
