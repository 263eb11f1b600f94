//! Multiband transient reduction.
//!
//! The input is split by a Linkwitz-Riley (4th order) crossover tree whose
//! lower bands are phase-compensated with matching all-pass sections, so the
//! bands sum to an all-pass. In each band a fast and a slow envelope follower
//! track the rectified signal; when `fast / slow` exceeds the transient
//! threshold the band is attenuated by `threshold / ratio`. Gain reduction is
//! applied immediately and recovers with the release time constant.

use serde::{Deserialize, Serialize};

use super::biquad::{Biquad, Cascade, Coefficients, BUTTERWORTH_Q};
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::processor::{one_pole_coeff, StreamProcessor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MctrParams {
    pub band_edges_hz: Vec<f64>,
    pub fast_tau_ms: f64,
    pub slow_tau_ms: f64,
    pub transient_threshold: f64,
    pub release_ms: f64,
}

impl Default for MctrParams {
    fn default() -> Self {
        Self {
            band_edges_hz: vec![500.0, 2000.0, 8000.0],
            fast_tau_ms: 1.0,
            slow_tau_ms: 50.0,
            transient_threshold: 2.0,
            release_ms: 50.0,
        }
    }
}

impl MctrParams {
    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        let mut prev = 0.0;
        for &edge in &self.band_edges_hz {
            if !(edge > prev && edge < nyquist) {
                return Err(Error::InvalidParam(format!(
                    "band edges must be ascending within (0, {nyquist}); got {:?}",
                    self.band_edges_hz
                )));
            }
            prev = edge;
        }
        if !(self.fast_tau_ms > 0.0 && self.slow_tau_ms > self.fast_tau_ms) {
            return Err(Error::InvalidParam(
                "need 0 < fast_tau_ms < slow_tau_ms".into(),
            ));
        }
        if !(self.transient_threshold > 1.0) {
            return Err(Error::InvalidParam("transient_threshold must exceed 1".into()));
        }
        if !(self.release_ms > 0.0) {
            return Err(Error::InvalidParam("release_ms must be positive".into()));
        }
        Ok(())
    }
}

fn linkwitz_riley(coeffs: Coefficients) -> Cascade {
    Cascade::new([coeffs, coeffs])
}

#[derive(Debug, Clone)]
struct Split {
    low: Cascade,
    high: Cascade,
}

#[derive(Debug, Clone)]
struct BandGate {
    fast: f64,
    slow: f64,
    gain: f64,
}

impl BandGate {
    const IDLE: BandGate = BandGate {
        fast: 0.0,
        slow: 0.0,
        gain: 1.0,
    };
}

#[derive(Debug, Clone)]
pub struct TransientReducer {
    splits: Vec<Split>,
    /// `compensation[i]` holds the all-passes for edges above split `i`.
    compensation: Vec<Vec<Biquad>>,
    gates: Vec<BandGate>,
    fast_coeff: f64,
    slow_coeff: f64,
    release_coeff: f64,
    threshold: f64,
    bands: Vec<f64>,
}

impl TransientReducer {
    pub fn new(params: &MctrParams, sample_rate: u32) -> Result<Self> {
        params.validate(sample_rate)?;
        let fs = sample_rate as f64;
        let edges = &params.band_edges_hz;
        let splits = edges
            .iter()
            .map(|&f| Split {
                low: linkwitz_riley(Coefficients::lowpass(f, BUTTERWORTH_Q, fs)),
                high: linkwitz_riley(Coefficients::highpass(f, BUTTERWORTH_Q, fs)),
            })
            .collect();
        let compensation = (0..edges.len())
            .map(|i| {
                edges[i + 1..]
                    .iter()
                    .map(|&f| Biquad::new(Coefficients::allpass(f, BUTTERWORTH_Q, fs)))
                    .collect()
            })
            .collect();
        let n_bands = edges.len() + 1;
        Ok(Self {
            splits,
            compensation,
            gates: vec![BandGate::IDLE; n_bands],
            fast_coeff: one_pole_coeff(params.fast_tau_ms, sample_rate),
            slow_coeff: one_pole_coeff(params.slow_tau_ms, sample_rate),
            release_coeff: one_pole_coeff(params.release_ms, sample_rate),
            threshold: params.transient_threshold,
            bands: vec![0.0; n_bands],
        })
    }

    pub fn band_count(&self) -> usize {
        self.gates.len()
    }

    fn split_bands(&mut self, x: f64) {
        let mut rest = x;
        for (i, split) in self.splits.iter_mut().enumerate() {
            let low = split.low.tick(rest);
            rest = split.high.tick(rest);
            self.bands[i] = self.compensation[i]
                .iter_mut()
                .fold(low, |acc, ap| ap.tick(acc));
        }
        let last = self.bands.len() - 1;
        self.bands[last] = rest;
    }
}

impl StreamProcessor for TransientReducer {
    fn process_block(&mut self, block: &mut [f32]) {
        for s in block.iter_mut() {
            self.split_bands(*s as f64);
            let mut y = 0.0;
            for (band, gate) in self.bands.iter().zip(self.gates.iter_mut()) {
                let rect = band.abs();
                gate.fast += self.fast_coeff * (rect - gate.fast);
                gate.slow += self.slow_coeff * (rect - gate.slow);
                let ratio = gate.fast / gate.slow.max(1e-12);
                let target = if ratio > self.threshold {
                    self.threshold / ratio
                } else {
                    1.0
                };
                if target < gate.gain {
                    gate.gain = target;
                } else {
                    gate.gain += self.release_coeff * (target - gate.gain);
                }
                y += gate.gain * band;
            }
            *s = y as f32;
        }
    }

    fn reset(&mut self) {
        for split in &mut self.splits {
            split.low.reset();
            split.high.reset();
        }
        self.compensation
            .iter_mut()
            .flatten()
            .for_each(Biquad::reset);
        self.gates.fill(BandGate::IDLE);
        self.bands.fill(0.0);
    }
}

pub fn mctr_process(params: &MctrParams, x: &AudioBuffer) -> Result<AudioBuffer> {
    TransientReducer::new(params, x.sample_rate())?.process_buffer(x)
}
