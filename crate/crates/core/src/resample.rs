//! Windowed-sinc polyphase sample-rate conversion.

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

const ZERO_CROSSINGS: f64 = 32.0;
const ROLLOFF: f64 = 0.95;
const KAISER_BETA: f64 = 9.0;
/// Above this many phases the kernel is evaluated per output sample.
const MAX_TABLE_PHASES: u64 = 4096;

/// Converts `buffer` to `target_rate` Hz.
///
/// Output length is `round(len * target / source)`. The anti-alias cutoff is
/// placed at 95% of the lower of the two Nyquist frequencies.
pub fn resample(buffer: &AudioBuffer, target_rate: u32) -> Result<AudioBuffer> {
    if target_rate == 0 {
        return Err(Error::InvalidParam("target sample rate must be positive".into()));
    }
    let source_rate = buffer.sample_rate();
    if source_rate == target_rate {
        return Ok(buffer.clone());
    }
    let g = gcd(source_rate as u64, target_rate as u64);
    let up = target_rate as u64 / g;
    let down = source_rate as u64 / g;
    let out_len =
        ((buffer.len() as f64) * target_rate as f64 / source_rate as f64).round() as usize;

    let kernel = Kernel::new(up, down);
    let x = buffer.samples();
    let mut out = Vec::with_capacity(out_len);
    let table = (up <= MAX_TABLE_PHASES).then(|| kernel.table());
    for m in 0..out_len as u64 {
        let pos = m * down;
        let base = (pos / up) as i64;
        let phase = pos % up;
        let acc = match &table {
            Some(t) => convolve(x, base, &t[phase as usize], kernel.half),
            None => convolve(x, base, &kernel.taps(phase), kernel.half),
        };
        out.push(acc as f32);
    }
    AudioBuffer::new(out, target_rate)
}

fn convolve(x: &[f32], base: i64, taps: &[f64], half: i64) -> f64 {
    let start = base - half + 1;
    taps.iter()
        .enumerate()
        .filter_map(|(j, &h)| {
            let k = start + j as i64;
            (k >= 0 && (k as usize) < x.len()).then(|| h * x[k as usize] as f64)
        })
        .sum()
}

struct Kernel {
    up: u64,
    /// Cutoff as a fraction of the input Nyquist frequency.
    cutoff: f64,
    half: i64,
}

impl Kernel {
    fn new(up: u64, down: u64) -> Self {
        let cutoff = (up as f64 / down as f64).min(1.0) * ROLLOFF;
        let half = (ZERO_CROSSINGS / cutoff).ceil() as i64;
        Self { up, cutoff, half }
    }

    /// Taps for input samples `base - half + 1 ..= base + half` at fractional
    /// offset `phase / up`, normalized to unit DC gain.
    fn taps(&self, phase: u64) -> Vec<f64> {
        let frac = phase as f64 / self.up as f64;
        let span = self.half as f64;
        let mut taps: Vec<f64> = (-self.half + 1..=self.half)
            .map(|j| {
                let tau = frac - j as f64;
                let w = kaiser(tau / span);
                self.cutoff * sinc(self.cutoff * tau) * w
            })
            .collect();
        let sum: f64 = taps.iter().sum();
        if sum.abs() > 0.0 {
            taps.iter_mut().for_each(|t| *t /= sum);
        }
        taps
    }

    fn table(&self) -> Vec<Vec<f64>> {
        (0..self.up).map(|p| self.taps(p)).collect()
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

fn kaiser(t: f64) -> f64 {
    if t.abs() > 1.0 {
        return 0.0;
    }
    bessel_i0(KAISER_BETA * (1.0 - t * t).sqrt()) / bessel_i0(KAISER_BETA)
}

fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half = x / 2.0;
    for k in 1..64 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
