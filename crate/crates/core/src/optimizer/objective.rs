use rayon::prelude::*;

use super::space::{Dim, ParamSpace, Params};
use crate::dsp::eq::UNPUBLISHED_SHELF_CORNER_HZ;
use crate::dsp::{Algorithm, EqParams, ProcessorParams};
use crate::error::{Error, Result};
use crate::metrics::{si_snr, SI_SNR_CLAMP_DB};
use crate::mixgen::MixtureResult;
use crate::processor::StreamProcessor;

/// Processors with a default search space.
pub const TUNABLE: [Algorithm; 3] = [Algorithm::Drc, Algorithm::Eq, Algorithm::Agc];

/// Stated default bounds. EQ searches every band gain plus the corner of the
/// band whose frequency was not published.
pub fn default_space(algorithm: Algorithm) -> Result<ParamSpace> {
    let u = |lo, hi| Dim::Uniform { lo, hi };
    let log = |lo, hi| Dim::LogUniform { lo, hi };
    match algorithm {
        Algorithm::Drc => ParamSpace::new([
            ("threshold_db", u(-60.0, 0.0)),
            ("ratio", u(1.0, 40.0)),
            ("attack_ms", log(0.01, 50.0)),
            ("release_ms", log(5.0, 500.0)),
        ]),
        Algorithm::Eq => {
            let bands = EqParams::default().bands;
            let mut dims: Vec<(String, Dim)> = (0..bands.len())
                .map(|i| (format!("band{i}_gain_db"), u(-12.0, 12.0)))
                .collect();
            if let Some(i) = bands
                .iter()
                .position(|b| b.corner_hz == UNPUBLISHED_SHELF_CORNER_HZ)
            {
                dims.push((format!("band{i}_corner_hz"), log(500.0, 8000.0)));
            }
            ParamSpace::new(dims)
        }
        Algorithm::Agc => ParamSpace::new([
            ("attack_coeff", log(1e-4, 1.0)),
            ("release_coeff", log(1e-5, 0.1)),
            ("target_level_dbfs", u(-40.0, -5.0)),
            ("max_gain_db", u(0.0, 24.0)),
        ]),
        other => Err(Error::InvalidParam(format!("{other} has no tunable parameters"))),
    }
}

/// Current values of `algorithm`'s searchable parameters.
pub fn params_of(algorithm: Algorithm, params: &ProcessorParams) -> Result<Params> {
    let space = default_space(algorithm)?;
    let mut out = Params::new();
    for key in space.dims.keys() {
        out.insert(key.clone(), read(algorithm, params, key)?);
    }
    Ok(out)
}

fn band_field(key: &str) -> Option<(usize, &str)> {
    let rest = key.strip_prefix("band")?;
    let (index, field) = rest.split_once('_')?;
    Some((index.parse().ok()?, field))
}

fn read(algorithm: Algorithm, p: &ProcessorParams, key: &str) -> Result<f64> {
    let unknown = || Error::InvalidParam(format!("{algorithm} has no parameter {key:?}"));
    Ok(match (algorithm, key) {
        (Algorithm::Drc, "threshold_db") => p.drc.threshold_db,
        (Algorithm::Drc, "ratio") => p.drc.ratio,
        (Algorithm::Drc, "attack_ms") => p.drc.attack_ms,
        (Algorithm::Drc, "release_ms") => p.drc.release_ms,
        (Algorithm::Agc, "attack_coeff") => p.agc.attack_coeff,
        (Algorithm::Agc, "release_coeff") => p.agc.release_coeff,
        (Algorithm::Agc, "target_level_dbfs") => p.agc.target_level_dbfs,
        (Algorithm::Agc, "max_gain_db") => p.agc.max_gain_db,
        (Algorithm::Eq, _) => {
            let (i, field) = band_field(key).ok_or_else(unknown)?;
            let band = p.eq.bands.get(i).ok_or_else(unknown)?;
            match field {
                "gain_db" => band.gain_db,
                "corner_hz" => band.corner_hz,
                _ => return Err(unknown()),
            }
        }
        _ => return Err(unknown()),
    })
}

/// Copy of `base` with the named parameters of `algorithm` replaced.
pub fn apply_params(
    algorithm: Algorithm,
    base: &ProcessorParams,
    params: &Params,
) -> Result<ProcessorParams> {
    let mut p = base.clone();
    for (key, &v) in params {
        let unknown = || Error::InvalidParam(format!("{algorithm} has no parameter {key:?}"));
        match (algorithm, key.as_str()) {
            (Algorithm::Drc, "threshold_db") => p.drc.threshold_db = v,
            (Algorithm::Drc, "ratio") => p.drc.ratio = v,
            (Algorithm::Drc, "attack_ms") => p.drc.attack_ms = v,
            (Algorithm::Drc, "release_ms") => p.drc.release_ms = v,
            (Algorithm::Agc, "attack_coeff") => p.agc.attack_coeff = v,
            (Algorithm::Agc, "release_coeff") => p.agc.release_coeff = v,
            (Algorithm::Agc, "target_level_dbfs") => p.agc.target_level_dbfs = v,
            (Algorithm::Agc, "max_gain_db") => p.agc.max_gain_db = v,
            (Algorithm::Eq, _) => {
                let (i, field) = band_field(key).ok_or_else(unknown)?;
                let band = p.eq.bands.get_mut(i).ok_or_else(unknown)?;
                match field {
                    "gain_db" => band.gain_db = v,
                    "corner_hz" => band.corner_hz = v,
                    _ => return Err(unknown()),
                }
            }
            _ => return Err(unknown()),
        }
    }
    Ok(p)
}

/// Mean SI-SNR of processed validation mixtures against their ground truths.
///
/// A factory error scores negative infinity; an SI-SNR error on a single
/// stimulus counts as the lower clamp.
pub fn mean_sisnr_objective<'a, F>(
    factory: F,
    validation: &'a [MixtureResult],
) -> Result<impl Fn(&Params) -> f64 + 'a>
where
    F: Fn(&Params) -> Result<Box<dyn StreamProcessor>> + Sync + 'a,
{
    if validation.is_empty() {
        return Err(Error::Empty("validation set".into()));
    }
    Ok(move |params: &Params| {
        // collected before summing so the result does not depend on scheduling
        let scores: Option<Vec<f64>> = validation
            .par_iter()
            .map(|m| {
                let mut processor = factory(params).ok()?;
                Some(
                    processor
                        .process_buffer(&m.mixture)
                        .and_then(|y| si_snr(&y, &m.ground_truth))
                        .unwrap_or(-SI_SNR_CLAMP_DB),
                )
            })
            .collect();
        match scores {
            Some(s) => s.iter().sum::<f64>() / s.len() as f64,
            None => f64::NEG_INFINITY,
        }
    })
}
