use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ClipStore, MixtureRecipe, MixtureResult};
use crate::audio::{db_to_amplitude, AudioBuffer};
use crate::error::{Error, Result};

pub const CROSSFADE_MS: f64 = 10.0;
pub const TRIGGER_LEVEL_DBFS: f64 = -25.0;
pub const PEAK_GUARD: f64 = 0.99;

/// Tiles `clip` to `duration_s`, overlapping consecutive tiles by a 10 ms
/// equal-power crossfade. Tiles therefore repeat every
/// `len - crossfade` samples; a clip at least as long as the target is
/// simply truncated.
pub fn loop_to_length(clip: &AudioBuffer, duration_s: f64) -> Result<AudioBuffer> {
    if clip.is_empty() {
        return Err(Error::InvalidBuffer("cannot loop an empty clip".into()));
    }
    if !(duration_s > 0.0) || !duration_s.is_finite() {
        return Err(Error::InvalidParam(format!("duration {duration_s} must be > 0")));
    }
    let fs = clip.sample_rate();
    let n = (duration_s * fs as f64).round() as usize;
    let src = clip.samples();
    if src.len() >= n {
        return AudioBuffer::new(src[..n].to_vec(), fs);
    }
    // keep at least half of each tile free of fades
    let fade = ((CROSSFADE_MS * 1e-3 * fs as f64).round() as usize).min(src.len() / 4);
    let mut out: Vec<f64> = Vec::with_capacity(n + src.len());
    out.extend(src.iter().map(|&s| s as f64));
    while out.len() < n {
        let seam = out.len() - fade;
        for i in 0..fade {
            let theta = FRAC_PI_2 * (i as f64 + 0.5) / fade as f64;
            out[seam + i] = out[seam + i] * theta.cos() + src[i] as f64 * theta.sin();
        }
        out.extend(src[fade..].iter().map(|&s| s as f64));
    }
    out.truncate(n);
    AudioBuffer::from_f64(out, fs)
}

/// Scales `signal` so that `reference` is `snr_db` louder (RMS) than it.
pub fn scale_to_snr(signal: &AudioBuffer, reference: &AudioBuffer, snr_db: f64) -> Result<AudioBuffer> {
    let (rs, rr) = (signal.rms(), reference.rms());
    if rs == 0.0 {
        return Err(Error::Silent("signal".into()));
    }
    if rr == 0.0 {
        return Err(Error::Silent("reference".into()));
    }
    signal.scaled(rr / rs * db_to_amplitude(-snr_db))
}

/// Picks a window of `n` samples starting at a seeded offset, or loops the
/// clip when it is shorter than `n`.
fn place(clip: &AudioBuffer, n: usize, rng: &mut ChaCha8Rng) -> Result<AudioBuffer> {
    let duration = n as f64 / clip.sample_rate() as f64;
    if clip.len() > n {
        let offset = rng.random_range(0..=clip.len() - n);
        AudioBuffer::new(clip.samples()[offset..offset + n].to_vec(), clip.sample_rate())
    } else {
        loop_to_length(clip, duration)
    }
}

pub fn synthesize_mixture(recipe: &MixtureRecipe, pool: &ClipStore) -> Result<MixtureResult> {
    recipe.validate()?;
    let trigger = &pool.get(&recipe.trigger_id)?.audio;
    let neutral = &pool.get(&recipe.neutral_id)?.audio;
    let background = &pool.get(&recipe.background_id)?.audio;
    let fs = trigger.sample_rate();
    for (id, clip) in [(&recipe.neutral_id, neutral), (&recipe.background_id, background)] {
        if clip.sample_rate() != fs {
            return Err(Error::InvalidBuffer(format!(
                "clip {id} at {} Hz, trigger at {fs} Hz",
                clip.sample_rate()
            )));
        }
    }
    for (id, clip) in [
        (&recipe.trigger_id, trigger),
        (&recipe.neutral_id, neutral),
        (&recipe.background_id, background),
    ] {
        if clip.rms() == 0.0 {
            return Err(Error::Silent(format!("clip {id}")));
        }
    }

    let n = (recipe.duration_s * fs as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    // the trigger always starts at its own onset
    let trigger = loop_to_length(trigger, recipe.duration_s)?;
    let neutral = place(neutral, n, &mut rng)?;
    let background = place(background, n, &mut rng)?;
    for (id, part) in [
        (&recipe.trigger_id, &trigger),
        (&recipe.neutral_id, &neutral),
        (&recipe.background_id, &background),
    ] {
        if part.rms() == 0.0 {
            return Err(Error::Silent(format!("selected window of clip {id}")));
        }
    }

    let trigger = trigger.scaled(db_to_amplitude(TRIGGER_LEVEL_DBFS) / trigger.rms())?;
    let neutral = scale_to_snr(&neutral, &trigger, -recipe.snr_neutral_db)?;
    let background = scale_to_snr(&background, &trigger, -recipe.snr_background_db)?;

    let t: Vec<f64> = trigger.samples().iter().map(|&v| v as f64).collect();
    let nb: Vec<f64> = neutral.samples().iter().map(|&v| v as f64).collect();
    let bg: Vec<f64> = background.samples().iter().map(|&v| v as f64).collect();
    let gt: Vec<f64> = nb.iter().zip(&bg).map(|(a, b)| a + b).collect();
    let mix: Vec<f64> = gt.iter().zip(&t).map(|(a, b)| a + b).collect();
    let peak = mix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let g = if peak > PEAK_GUARD { PEAK_GUARD / peak } else { 1.0 };
    let build = |v: &[f64]| AudioBuffer::from_f64(v.iter().map(|s| s * g), fs);
    Ok(MixtureResult {
        mixture: build(&mix)?,
        ground_truth: build(&gt)?,
        trigger_component: build(&t)?,
        neutral_component: build(&nb)?,
        background_component: build(&bg)?,
    })
}
