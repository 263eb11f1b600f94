//! Simulated noise-cancelling headphone attenuation and selective transparency.
//!
//! The attenuation stage runs offline in the short-time Fourier domain (1024
//! sample sqrt-Hann analysis and synthesis windows, hop 256) and is aligned to
//! the input, so it has no latency of its own.

use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::audio::{db_to_amplitude, AudioBuffer};
use crate::error::{Error, Result};
use crate::processor::StreamProcessor;

pub const FRAME_LEN: usize = 1024;
pub const HOP: usize = 256;

/// Attenuation in dB (positive = quieter) at ascending frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttenuationCurve {
    points: Vec<(f64, f64)>,
}

impl AttenuationCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::MalformedCurve(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        for (i, &(f, a)) in points.iter().enumerate() {
            if !(f > 0.0) || !f.is_finite() {
                return Err(Error::MalformedCurve(format!("point {i}: frequency {f} must be > 0")));
            }
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::MalformedCurve(format!(
                    "point {i}: attenuation {a} must be finite and >= 0"
                )));
            }
            if i > 0 && f <= points[i - 1].0 {
                return Err(Error::MalformedCurve(format!(
                    "point {i}: frequency {f} not above {}",
                    points[i - 1].0
                )));
            }
        }
        Ok(Self { points })
    }

    /// Frequency-independent attenuation.
    pub fn flat(attenuation_db: f64) -> Result<Self> {
        Self::new(vec![(20.0, attenuation_db), (20_000.0, attenuation_db)])
    }

    /// Non-authoritative stand-in for a commercial over-ear ANC headset:
    /// 20 dB below 100 Hz, 35 dB at 1 kHz, 30 dB from 4 kHz up.
    pub fn placeholder() -> Self {
        Self::new(vec![
            (50.0, 20.0),
            (100.0, 20.0),
            (1000.0, 35.0),
            (4000.0, 30.0),
            (16_000.0, 30.0),
        ])
        .expect("placeholder curve is valid")
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Every point shifted by `db`.
    pub fn offset(&self, db: f64) -> Result<Self> {
        Self::new(self.points.iter().map(|&(f, a)| (f, a + db)).collect())
    }

    /// Linear in log-frequency between points, flat beyond the ends.
    pub fn attenuation_at(&self, freq: f64) -> f64 {
        let first = self.points[0];
        let last = self.points[self.points.len() - 1];
        if freq <= first.0 {
            return first.1;
        }
        if freq >= last.0 {
            return last.1;
        }
        let i = self.points.partition_point(|&(f, _)| f <= freq);
        let (f0, a0) = self.points[i - 1];
        let (f1, a1) = self.points[i];
        let u = (freq / f0).ln() / (f1 / f0).ln();
        a0 + u * (a1 - a0)
    }

    /// Reads CSV with header `freq_hz,attenuation_db`.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(f)
            .map_err(|e| Error::MalformedCurve(format!("{}: {e}", path.display())))
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = csv
            .headers()
            .map_err(|e| Error::MalformedCurve(e.to_string()))?;
        if header.iter().collect::<Vec<_>>() != ["freq_hz", "attenuation_db"] {
            return Err(Error::MalformedCurve(
                "expected header freq_hz,attenuation_db".into(),
            ));
        }
        let mut points = Vec::new();
        for (i, rec) in csv.records().enumerate() {
            let rec = rec.map_err(|e| Error::MalformedCurve(format!("row {}: {e}", i + 2)))?;
            let num = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::MalformedCurve(format!("row {}: bad number", i + 2)))
            };
            points.push((num(0)?, num(1)?));
        }
        Self::new(points)
    }
}

fn sqrt_hann() -> Vec<f64> {
    (0..FRAME_LEN)
        .map(|n| {
            let w = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / FRAME_LEN as f64).cos();
            w.sqrt()
        })
        .collect()
}

struct Stft {
    window: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Overlap-added analysis x synthesis window, constant at this hop.
    ola_gain: f64,
}

impl Stft {
    fn new() -> Self {
        let window = sqrt_hann();
        let ola_gain = (0..FRAME_LEN / HOP)
            .map(|k| window[k * HOP].powi(2))
            .sum::<f64>();
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(FRAME_LEN),
            inverse: planner.plan_fft_inverse(FRAME_LEN),
            window,
            ola_gain,
        }
    }
}

/// Per-bin amplitude gains for the one-sided spectrum.
fn bin_gains(curve: &AttenuationCurve, fs: f64) -> Vec<f64> {
    (0..=FRAME_LEN / 2)
        .map(|k| db_to_amplitude(-curve.attenuation_at(k as f64 * fs / FRAME_LEN as f64)))
        .collect()
}

pub fn apply_attenuation(x: &AudioBuffer, curve: &AttenuationCurve) -> Result<AudioBuffer> {
    let n = x.len();
    if n == 0 {
        return Ok(x.clone());
    }
    let stft = Stft::new();
    let gains = bin_gains(curve, x.sample_rate() as f64);
    // pad so every output sample is covered by a full set of frames
    let pad = FRAME_LEN - HOP;
    let frames = (n + pad).div_ceil(HOP);
    let total = frames * HOP + FRAME_LEN;
    let mut input = vec![0.0f64; total];
    for (d, &s) in input[pad..].iter_mut().zip(x.samples()) {
        *d = s as f64;
    }
    let mut out = vec![0.0f64; total];
    let mut buf = vec![Complex64::default(); FRAME_LEN];
    let scale = 1.0 / (FRAME_LEN as f64 * stft.ola_gain);
    for f in 0..=frames {
        let start = f * HOP;
        for (i, b) in buf.iter_mut().enumerate() {
            *b = Complex64::new(input[start + i] * stft.window[i], 0.0);
        }
        stft.forward.process(&mut buf);
        for (k, b) in buf.iter_mut().enumerate() {
            let bin = if k <= FRAME_LEN / 2 { k } else { FRAME_LEN - k };
            *b *= gains[bin];
        }
        stft.inverse.process(&mut buf);
        for (i, b) in buf.iter().enumerate() {
            out[start + i] += b.re * stft.window[i] * scale;
        }
    }
    AudioBuffer::from_f64(out[pad..pad + n].iter().copied(), x.sample_rate())
}

/// Sums an ANC residual and a processed playback signal; `processed` must
/// already be time-aligned with the mixture.
pub fn combine(anc_residual: &AudioBuffer, processed: &AudioBuffer, gain: f64) -> Result<AudioBuffer> {
    anc_residual.add(&processed.scaled(gain)?)
}

/// `apply_attenuation(mixture) + gain * processor(mixture)`, with the
/// processor output advanced by its declared latency.
pub fn selective_transparency(
    mixture: &AudioBuffer,
    curve: &AttenuationCurve,
    processor: &mut dyn StreamProcessor,
    gain: f64,
) -> Result<AudioBuffer> {
    let residual = apply_attenuation(mixture, curve)?;
    processor.reset();
    let processed = processor.process_buffer(mixture)?;
    let latency = processor.latency_samples().min(processed.len());
    let mut aligned = processed.samples()[latency..].to_vec();
    aligned.resize(processed.len(), 0.0);
    combine(&residual, &AudioBuffer::new(aligned, mixture.sample_rate())?, gain)
}
