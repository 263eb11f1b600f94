use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

/// SI-SNR values are clamped to `[-SI_SNR_CLAMP_DB, SI_SNR_CLAMP_DB]`.
pub const SI_SNR_CLAMP_DB: f64 = 100.0;

/// Scale-invariant SNR of `estimate` against `reference`, in dB.
///
/// Both signals are mean-subtracted; the estimate is projected onto the
/// reference and the ratio of projected to residual energy is returned.
/// A perfect (or perfectly scaled) estimate hits the upper clamp; an estimate
/// with no component along the reference hits the lower clamp.
pub fn si_snr(estimate: &AudioBuffer, reference: &AudioBuffer) -> Result<f64> {
    si_snr_slices(estimate.samples(), reference.samples())
}

pub fn si_snr_slices(estimate: &[f32], reference: &[f32]) -> Result<f64> {
    if estimate.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: estimate.len(),
            right: reference.len(),
        });
    }
    if reference.len() < 2 {
        return Err(Error::InvalidBuffer("SI-SNR needs at least 2 samples".into()));
    }
    let n = reference.len() as f64;
    let mean_est = estimate.iter().map(|&v| v as f64).sum::<f64>() / n;
    let mean_ref = reference.iter().map(|&v| v as f64).sum::<f64>() / n;

    let (mut dot, mut ref_energy) = (0.0, 0.0);
    for (&e, &r) in estimate.iter().zip(reference) {
        let (e, r) = (e as f64 - mean_est, r as f64 - mean_ref);
        dot += e * r;
        ref_energy += r * r;
    }
    if ref_energy == 0.0 {
        return Err(Error::ZeroReference);
    }
    let scale = dot / ref_energy;
    let (mut target_energy, mut noise_energy) = (0.0, 0.0);
    for (&e, &r) in estimate.iter().zip(reference) {
        let target = scale * (r as f64 - mean_ref);
        let residual = (e as f64 - mean_est) - target;
        target_energy += target * target;
        noise_energy += residual * residual;
    }
    let db = if target_energy == 0.0 {
        -SI_SNR_CLAMP_DB
    } else if noise_energy == 0.0 {
        SI_SNR_CLAMP_DB
    } else {
        10.0 * (target_energy / noise_energy).log10()
    };
    Ok(db.clamp(-SI_SNR_CLAMP_DB, SI_SNR_CLAMP_DB))
}

/// Improvement in SI-SNR of `processed` over the unprocessed `mixture`.
pub fn delta_si_snr(
    processed: &AudioBuffer,
    mixture: &AudioBuffer,
    reference: &AudioBuffer,
) -> Result<f64> {
    Ok(si_snr(processed, reference)? - si_snr(mixture, reference)?)
}

/// Per-stimulus evaluation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub stimulus_id: String,
    pub algorithm: String,
    pub si_snr_db: f64,
    pub delta_si_snr_db: f64,
}

impl EvalRecord {
    pub fn evaluate(
        stimulus_id: impl Into<String>,
        algorithm: impl Into<String>,
        processed: &AudioBuffer,
        mixture: &AudioBuffer,
        reference: &AudioBuffer,
    ) -> Result<Self> {
        let processed_score = si_snr(processed, reference)?;
        let mixture_score = si_snr(mixture, reference)?;
        Ok(Self {
            stimulus_id: stimulus_id.into(),
            algorithm: algorithm.into(),
            si_snr_db: processed_score,
            delta_si_snr_db: processed_score - mixture_score,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn buf(v: &[f64]) -> AudioBuffer {
        AudioBuffer::from_f64(v.iter().copied(), 8000).unwrap()
    }

    #[test]
    fn hand_computed_zero_db_case() {
        // s_t = ref, e = [1, 1, -1, -1]: equal energies
        let r = buf(&[1.0, -1.0, 1.0, -1.0]);
        let e = buf(&[2.0, 0.0, 0.0, -2.0]);
        assert!(si_snr(&e, &r).unwrap().abs() < 1e-12);
    }

    #[test]
    fn perfect_and_scaled_estimates_clamp_high() {
        let r = buf(&[0.1, -0.4, 0.3, 0.7, -0.2]);
        assert_eq!(si_snr(&r, &r).unwrap(), SI_SNR_CLAMP_DB);
        let e = r.scaled(3.0).unwrap();
        assert!(si_snr(&e, &r).unwrap() > 99.0);
    }

    #[test]
    fn zero_estimate_clamps_low() {
        let r = buf(&[0.1, -0.4, 0.3, 0.7]);
        let z = buf(&[0.0; 4]);
        assert_eq!(si_snr(&z, &r).unwrap(), -SI_SNR_CLAMP_DB);
    }

    #[test]
    fn errors() {
        let r = buf(&[0.1, -0.4, 0.3]);
        assert!(matches!(
            si_snr(&buf(&[0.1, 0.2]), &r),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            si_snr(&r, &buf(&[0.0, 0.0, 0.0])),
            Err(Error::ZeroReference)
        ));
        // constant reference vanishes after mean removal
        assert!(matches!(
            si_snr(&r, &buf(&[0.5, 0.5, 0.5])),
            Err(Error::ZeroReference)
        ));
        assert!(si_snr(&buf(&[1.0]), &buf(&[1.0])).is_err());
    }

    #[test]
    fn delta_of_mixture_with_itself_is_zero() {
        let r = buf(&[0.1, -0.4, 0.3, 0.7]);
        let m = buf(&[0.5, -0.1, 0.2, 0.1]);
        assert_eq!(delta_si_snr(&m, &m, &r).unwrap(), 0.0);
        assert!(delta_si_snr(&r, &m, &r).unwrap() > 0.0);
    }
}
