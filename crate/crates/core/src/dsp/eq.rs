//! Shelving equalizer built from cascaded second-order sections.

use serde::{Deserialize, Serialize};

use super::biquad::{Cascade, Coefficients, BUTTERWORTH_Q};
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::processor::StreamProcessor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShelfType {
    Low,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqBand {
    pub shelf_type: ShelfType,
    pub corner_hz: f64,
    pub gain_db: f64,
}

impl EqBand {
    pub const fn new(shelf_type: ShelfType, corner_hz: f64, gain_db: f64) -> Self {
        Self {
            shelf_type,
            corner_hz,
            gain_db,
        }
    }

    pub fn coefficients(&self, sample_rate: u32) -> Coefficients {
        let fs = sample_rate as f64;
        match self.shelf_type {
            ShelfType::Low => Coefficients::low_shelf(self.corner_hz, self.gain_db, BUTTERWORTH_Q, fs),
            ShelfType::High => {
                Coefficients::high_shelf(self.corner_hz, self.gain_db, BUTTERWORTH_Q, fs)
            }
        }
    }
}

/// Corner of the -2.75 dB high shelf. The tuned value for this band was never
/// published; 2 kHz is a placeholder.
pub const UNPUBLISHED_SHELF_CORNER_HZ: f64 = 2000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EqParams {
    pub bands: Vec<EqBand>,
}

impl Default for EqParams {
    fn default() -> Self {
        Self {
            bands: vec![
                EqBand::new(ShelfType::Low, 200.0, -8.0),
                EqBand::new(ShelfType::High, UNPUBLISHED_SHELF_CORNER_HZ, -2.75),
                EqBand::new(ShelfType::High, 5000.0, 1.6),
                EqBand::new(ShelfType::High, 10_000.0, -3.0),
                EqBand::new(ShelfType::High, 15_000.0, -6.0),
            ],
        }
    }
}

impl EqParams {
    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        for band in &self.bands {
            if !(band.corner_hz > 0.0 && band.corner_hz < nyquist) {
                return Err(Error::InvalidParam(format!(
                    "shelf corner {} Hz outside (0, {nyquist})",
                    band.corner_hz
                )));
            }
            if !band.gain_db.is_finite() {
                return Err(Error::InvalidParam("shelf gain must be finite".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Equalizer {
    cascade: Cascade,
}

impl Equalizer {
    pub fn new(params: &EqParams, sample_rate: u32) -> Result<Self> {
        params.validate(sample_rate)?;
        Ok(Self {
            cascade: Cascade::new(params.bands.iter().map(|b| b.coefficients(sample_rate))),
        })
    }

    pub fn magnitude_db(&self, freq: f64, sample_rate: u32) -> f64 {
        20.0 * self.cascade.response(freq, sample_rate as f64).norm().log10()
    }
}

impl StreamProcessor for Equalizer {
    fn process_block(&mut self, block: &mut [f32]) {
        for s in block.iter_mut() {
            *s = self.cascade.tick(*s as f64) as f32;
        }
    }

    fn reset(&mut self) {
        self.cascade.reset();
    }
}

pub fn eq_process(bands: &[EqBand], x: &AudioBuffer) -> Result<AudioBuffer> {
    let params = EqParams {
        bands: bands.to_vec(),
    };
    Equalizer::new(&params, x.sample_rate())?.process_buffer(x)
}
