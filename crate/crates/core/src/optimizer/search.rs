use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::space::{ParamSpace, Params};
use super::tpe::{suggest, TpeConfig};
use super::Trial;
use crate::error::{Error, Result};
use crate::mixgen::recipe_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Tpe,
    Random,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tpe" => Ok(Strategy::Tpe),
            "random" => Ok(Strategy::Random),
            other => Err(Error::InvalidParam(format!("unknown strategy {other:?} (tpe, random)"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Tpe => "tpe",
            Strategy::Random => "random",
        })
    }
}

/// Evaluates `n_trials` suggestions in sequence and returns the best trial
/// together with the full history. Errors and NaN from the objective are
/// recorded as negative infinity.
///
/// `tpe.seed` is ignored; per-trial seeds derive from `seed`.
pub fn run_search<F>(
    mut objective: F,
    space: &ParamSpace,
    n_trials: usize,
    strategy: Strategy,
    tpe: &TpeConfig,
    seed: u64,
) -> Result<(Trial, Vec<Trial>)>
where
    F: FnMut(&Params) -> Result<f64>,
{
    if n_trials == 0 {
        return Err(Error::InvalidParam("n_trials must be >= 1".into()));
    }
    space.validate()?;
    let mut history: Vec<Trial> = Vec::with_capacity(n_trials);
    for i in 0..n_trials {
        let trial_seed = recipe_seed(seed, i as u64);
        let params = match strategy {
            Strategy::Random => space.sample(&mut ChaCha8Rng::seed_from_u64(trial_seed)),
            Strategy::Tpe => suggest(
                &history,
                space,
                &TpeConfig {
                    seed: trial_seed,
                    ..*tpe
                },
            )?,
        };
        let objective = match objective(&params) {
            Ok(v) if !v.is_nan() => v,
            Ok(_) => f64::NEG_INFINITY,
            Err(e) => {
                log::debug!("trial {i} failed: {e}");
                f64::NEG_INFINITY
            }
        };
        history.push(Trial { params, objective });
    }
    let best = history
        .iter()
        .fold(&history[0], |b, t| if t.objective > b.objective { t } else { b })
        .clone();
    Ok((best, history))
}

/// CSV with columns `trial_index`, one per dimension, `objective`.
pub fn write_history(writer: impl Write, space: &ParamSpace, history: &[Trial]) -> Result<()> {
    let csv_err = |e: csv::Error| Error::Csv {
        row: 0,
        reason: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["trial_index".to_string()];
    header.extend(space.dims.keys().cloned());
    header.push("objective".into());
    w.write_record(&header).map_err(csv_err)?;
    for (i, t) in history.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(space.dims.keys().map(|k| t.params.get(k).map_or(String::new(), f64::to_string)));
        row.push(t.objective.to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<history>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::Dim;

    fn space() -> ParamSpace {
        ParamSpace::new([("x", Dim::Uniform { lo: -10.0, hi: 10.0 })]).unwrap()
    }

    #[test]
    fn single_trial_is_the_best() {
        let (best, h) = run_search(
            |p| Ok(-p["x"].powi(2)),
            &space(),
            1,
            Strategy::Tpe,
            &TpeConfig::default(),
            3,
        )
        .unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(best, h[0]);
    }

    #[test]
    fn failures_score_negative_infinity() {
        let mut calls = 0;
        let (best, h) = run_search(
            |p| {
                calls += 1;
                match calls % 3 {
                    0 => Err(Error::Objective("boom".into())),
                    1 => Ok(f64::NAN),
                    _ => Ok(p["x"]),
                }
            },
            &space(),
            9,
            Strategy::Random,
            &TpeConfig::default(),
            0,
        )
        .unwrap();
        assert_eq!(h.iter().filter(|t| t.objective == f64::NEG_INFINITY).count(), 6);
        assert!(best.objective.is_finite());
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_search(|_| Ok(0.0), &space(), 0, Strategy::Tpe, &TpeConfig::default(), 0).is_err());
    }

    #[test]
    fn history_csv_layout() {
        let h = vec![Trial {
            params: Params::from([("x".to_string(), 1.5)]),
            objective: -2.0,
        }];
        let mut out = Vec::new();
        write_history(&mut out, &space(), &h).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "trial_index,x,objective\n0,1.5,-2\n");
    }
}
