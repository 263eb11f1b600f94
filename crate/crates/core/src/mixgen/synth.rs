//! Parametric stand-ins for recorded trigger, neutral and background clips.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use super::{Category, SourceClip};
use crate::audio::{db_to_amplitude, AudioBuffer};
use crate::dsp::biquad::{Biquad, Coefficients};
use crate::error::{Error, Result};

/// Clips are normalized to this RMS level unless that would exceed [`SYNTH_PEAK`].
pub const SYNTH_LEVEL_DBFS: f64 = -20.0;
/// Peak ceiling for impulsive clips, whose crest factor exceeds 20 dB.
pub const SYNTH_PEAK: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    AlarmBeep,
    TappingClicks,
    ChewingCrackle,
    NoiseAmbient,
    ToneNeutral,
    TrafficRumble,
}

impl SourceKind {
    pub const ALL: [SourceKind; 6] = [
        SourceKind::AlarmBeep,
        SourceKind::TappingClicks,
        SourceKind::ChewingCrackle,
        SourceKind::NoiseAmbient,
        SourceKind::ToneNeutral,
        SourceKind::TrafficRumble,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SourceKind::AlarmBeep => "alarm_beep",
            SourceKind::TappingClicks => "tapping_clicks",
            SourceKind::ChewingCrackle => "chewing_crackle",
            SourceKind::NoiseAmbient => "noise_ambient",
            SourceKind::ToneNeutral => "tone_neutral",
            SourceKind::TrafficRumble => "traffic_rumble",
        }
    }

    /// Label in the style of ontology leaf names.
    pub fn label(self) -> &'static str {
        match self {
            SourceKind::AlarmBeep => "alarm",
            SourceKind::TappingClicks => "tapping",
            SourceKind::ChewingCrackle => "chewing, -mastication",
            SourceKind::NoiseAmbient => "hubbub, -speech noise",
            SourceKind::ToneNeutral => "hum",
            SourceKind::TrafficRumble => "traffic noise, -roadway noise",
        }
    }

    pub fn category(self) -> Category {
        match self {
            SourceKind::AlarmBeep | SourceKind::TappingClicks | SourceKind::ChewingCrackle => {
                Category::Trigger
            }
            SourceKind::NoiseAmbient | SourceKind::ToneNeutral => Category::Neutral,
            SourceKind::TrafficRumble => Category::Background,
        }
    }

    /// Short impulsive triggers (as opposed to sustained alarms).
    pub fn is_transient(self) -> bool {
        matches!(self, SourceKind::TappingClicks | SourceKind::ChewingCrackle)
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SourceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown source kind {s:?}")))
    }
}

/// Generates a deterministic clip with id `<kind>_<seed>`.
pub fn synth_source(kind: SourceKind, duration_s: f64, seed: u64, fs: u32) -> Result<SourceClip> {
    if !(duration_s > 0.0) || !duration_s.is_finite() {
        return Err(Error::InvalidParam(format!("duration {duration_s} must be > 0")));
    }
    if fs == 0 {
        return Err(Error::InvalidParam("sample rate must be > 0".into()));
    }
    let n = ((duration_s * fs as f64).round() as usize).max(1);
    let fs_f = fs as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (kind as u64) << 56);
    let mut x = match kind {
        SourceKind::AlarmBeep => alarm(n, fs_f, &mut rng),
        SourceKind::TappingClicks => tapping(n, fs_f, &mut rng),
        SourceKind::ChewingCrackle => chewing(n, fs_f, &mut rng),
        SourceKind::NoiseAmbient => pink(n, &mut rng),
        SourceKind::ToneNeutral => {
            let phase = rng.random_range(0.0..2.0 * PI);
            (0..n)
                .map(|i| (2.0 * PI * 300.0 * i as f64 / fs_f + phase).sin())
                .collect()
        }
        SourceKind::TrafficRumble => traffic(n, fs_f, &mut rng),
    };
    normalize(&mut x, db_to_amplitude(SYNTH_LEVEL_DBFS), SYNTH_PEAK);
    Ok(SourceClip {
        id: format!("{}_{seed:04}", kind.name()),
        label: kind.label().to_string(),
        category: kind.category(),
        audio: AudioBuffer::from_f64(x, fs)?,
    })
}

fn normalize(x: &mut [f64], target_rms: f64, max_peak: f64) {
    let rms = (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt();
    let peak = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if rms > 0.0 {
        let g = (target_rms / rms).min(max_peak / peak);
        x.iter_mut().for_each(|v| *v *= g);
    }
}

fn filter(x: &mut [f64], coeffs: Coefficients) {
    let mut bq = Biquad::new(coeffs);
    x.iter_mut().for_each(|v| *v = bq.tick(*v));
}

/// Alternating 1 kHz / 1.3 kHz band-limited square bursts.
fn alarm(n: usize, fs: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let on = (rng.random_range(0.18..0.3) * fs) as usize;
    let off = (rng.random_range(0.04..0.1) * fs) as usize;
    let ramp = (0.005 * fs) as usize;
    let period = on + off;
    let mut out = vec![0.0; n];
    for (i, v) in out.iter_mut().enumerate() {
        let k = i / period;
        let t = i % period;
        if t >= on {
            continue;
        }
        let f0 = if k % 2 == 0 { 1000.0 } else { 1300.0 };
        let env = (t.min(on - 1 - t) as f64 / ramp as f64).min(1.0);
        let ph = 2.0 * PI * f0 * i as f64 / fs;
        let mut s = 0.0;
        let mut h = 1.0;
        while h * f0 < 0.45 * fs {
            s += (h * ph).sin() / h;
            h += 2.0;
        }
        *v = env * s;
    }
    out
}

/// Poisson train of damped low-mid resonances, as from knuckles on a desk.
fn tapping(n: usize, fs: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let gaps = Exp::new(2.0).unwrap();
    let mut out = vec![0.0; n];
    let mut t = rng.random_range(0.0..0.05);
    while ((t * fs) as usize) < n {
        let start = (t * fs) as usize;
        let f0 = rng.random_range(180.0..650.0);
        let tau = rng.random_range(0.006..0.015);
        let amp = rng.random_range(0.6..1.0);
        let len = ((6.0 * tau * fs) as usize).min(n - start);
        for j in 0..len {
            let tt = j as f64 / fs;
            out[start + j] += amp * (-tt / tau).exp() * (2.0 * PI * f0 * tt).sin();
        }
        t += 0.1 + gaps.sample(rng);
    }
    out
}

/// Rhythmic bursts of band-limited noise with a crackle texture.
fn chewing(n: usize, fs: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let white = Normal::new(0.0, 1.0).unwrap();
    let mut noise: Vec<f64> = (0..n).map(|_| white.sample(rng)).collect();
    filter(&mut noise, Coefficients::highpass(150.0, 0.707, fs));
    filter(&mut noise, Coefficients::lowpass(800.0, 0.707, fs));
    filter(&mut noise, Coefficients::lowpass(800.0, 0.707, fs));
    let mut env = vec![0.0; n];
    let mut t = rng.random_range(0.0..0.1);
    while ((t * fs) as usize) < n {
        let start = (t * fs) as usize;
        let len = ((rng.random_range(0.08..0.16) * fs) as usize).min(n - start);
        let amp = rng.random_range(0.5..1.0);
        for j in 0..len {
            // fast onset, slower decay
            let u = j as f64 / len as f64;
            env[start + j] += amp * (u * 12.0).min(1.0) * (1.0 - u).powi(2);
        }
        t += rng.random_range(0.45..0.75);
    }
    noise.iter().zip(&env).map(|(a, b)| a * b).collect()
}

/// Pink noise from Paul Kellet's refined filter.
fn pink(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let white = Normal::new(0.0, 1.0).unwrap();
    let mut b = [0.0f64; 7];
    (0..n)
        .map(|_| {
            let w = white.sample(rng);
            b[0] = 0.99886 * b[0] + w * 0.0555179;
            b[1] = 0.99332 * b[1] + w * 0.0750759;
            b[2] = 0.96900 * b[2] + w * 0.1538520;
            b[3] = 0.86650 * b[3] + w * 0.3104856;
            b[4] = 0.55000 * b[4] + w * 0.5329522;
            b[5] = -0.7616 * b[5] - w * 0.0168980;
            let out = b[..6].iter().sum::<f64>() + b[6] + w * 0.5362;
            b[6] = w * 0.115926;
            out
        })
        .collect()
}

/// Leaky-integrated (brown) noise, low-passed and DC-blocked.
fn traffic(n: usize, fs: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let white = Normal::new(0.0, 1.0).unwrap();
    let mut acc = 0.0;
    let mut x: Vec<f64> = (0..n)
        .map(|_| {
            acc = 0.998 * acc + white.sample(rng);
            acc
        })
        .collect();
    filter(&mut x, Coefficients::lowpass(300.0, 0.707, fs));
    filter(&mut x, Coefficients::highpass(20.0, 0.707, fs));
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rustfft::num_complex::Complex64;
    use rustfft::FftPlanner;

    fn spectrum(x: &AudioBuffer) -> Vec<f64> {
        let mut buf: Vec<Complex64> = x
            .samples()
            .iter()
            .map(|&s| Complex64::new(s as f64, 0.0))
            .collect();
        FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
        buf[..buf.len() / 2].iter().map(|c| c.norm_sqr()).collect()
    }

    #[test]
    fn alarm_peak_in_band() {
        let c = synth_source(SourceKind::AlarmBeep, 5.0, 1, 32_000).unwrap();
        let s = spectrum(&c.audio);
        let (k, _) = s
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let f = k as f64 * 32_000.0 / c.audio.len() as f64;
        assert!((950.0..=1350.0).contains(&f), "{f}");
    }

    #[test]
    fn tone_energy_below_400hz() {
        let c = synth_source(SourceKind::ToneNeutral, 2.0, 4, 32_000).unwrap();
        let s = spectrum(&c.audio);
        let k400 = (400.0 * c.audio.len() as f64 / 32_000.0) as usize;
        let below: f64 = s[..k400].iter().sum();
        assert!(below / s.iter().sum::<f64>() > 0.99);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        for kind in SourceKind::ALL {
            let a = synth_source(kind, 0.7, 9, 16_000).unwrap();
            let b = synth_source(kind, 0.7, 9, 16_000).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.audio.len(), 11_200);
            assert!(a.audio.rms() > 0.0, "{kind}");
            assert_eq!(a.category, kind.category());
            if kind != SourceKind::ToneNeutral {
                let c = synth_source(kind, 0.7, 10, 16_000).unwrap();
                assert_ne!(a.audio, c.audio, "{kind}");
            }
        }
    }

    #[test]
    fn level_is_capped_below_full_scale() {
        for kind in SourceKind::ALL {
            for seed in 0..4 {
                let a = synth_source(kind, 4.0, seed, 32_000).unwrap();
                let a: Vec<f64> = a.audio.samples().iter().map(|&v| f64::from(v)).collect();
                let peak = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                let rms = (a.iter().map(|v| v * v).sum::<f64>() / a.len() as f64).sqrt();
                assert!(peak <= SYNTH_PEAK + 1e-6, "{kind} peak {peak}");
                assert!(rms <= db_to_amplitude(SYNTH_LEVEL_DBFS) + 1e-6, "{kind}");
                assert!(rms > 0.0, "{kind}");
            }
        }
    }

    #[test]
    fn rejects_bad_duration() {
        assert!(synth_source(SourceKind::AlarmBeep, 0.0, 1, 32_000).is_err());
        assert!(synth_source(SourceKind::AlarmBeep, f64::NAN, 1, 32_000).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in SourceKind::ALL {
            assert_eq!(kind.name().parse::<SourceKind>().unwrap(), kind);
        }
        assert!("nope".parse::<SourceKind>().is_err());
    }
}
