#![allow(dead_code)]

use std::f64::consts::PI;

use hushkit_core::AudioBuffer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FS: u32 = 32_000;

pub fn sine(freq: f64, amplitude: f64, secs: f64) -> AudioBuffer {
    let n = (FS as f64 * secs).round() as usize;
    AudioBuffer::from_f64(
        (0..n).map(|i| amplitude * (2.0 * PI * freq * i as f64 / FS as f64).sin()),
        FS,
    )
    .unwrap()
}

pub fn noise(secs: f64, amplitude: f64, seed: u64) -> AudioBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (FS as f64 * secs).round() as usize;
    AudioBuffer::from_f64((0..n).map(|_| rng.random_range(-amplitude..amplitude)), FS).unwrap()
}

/// RMS in dB of `samples[from..]`.
pub fn tail_rms_db(b: &AudioBuffer, from: usize) -> f64 {
    let tail = &b.samples()[from..];
    let e: f64 = tail.iter().map(|&s| (s as f64).powi(2)).sum::<f64>() / tail.len() as f64;
    10.0 * e.log10()
}

/// Gain in dB of `y` relative to `x`, both measured over `[from..]`.
pub fn tail_gain_db(x: &AudioBuffer, y: &AudioBuffer, from: usize) -> f64 {
    tail_rms_db(y, from) - tail_rms_db(x, from)
}

pub fn peak_db(b: &AudioBuffer) -> f64 {
    20.0 * (b.peak() as f64).log10()
}
