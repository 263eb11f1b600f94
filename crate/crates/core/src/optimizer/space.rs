use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter assignment, keyed by dimension name.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Dim {
    Uniform { lo: f64, hi: f64 },
    LogUniform { lo: f64, hi: f64 },
    IntUniform { lo: i64, hi: i64 },
}

impl Dim {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Dim::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Dim::LogUniform { lo, hi } => lo > 0.0 && hi.is_finite() && lo < hi,
            Dim::IntUniform { lo, hi } => lo < hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!("invalid dimension {self:?}")))
        }
    }

    /// Bounds in the search coordinate (log for log-uniform dims).
    pub(crate) fn internal_bounds(&self) -> (f64, f64) {
        match *self {
            Dim::Uniform { lo, hi } => (lo, hi),
            Dim::LogUniform { lo, hi } => (lo.ln(), hi.ln()),
            Dim::IntUniform { lo, hi } => (lo as f64 - 0.5, hi as f64 + 0.5),
        }
    }

    pub(crate) fn warp(&self, v: f64) -> f64 {
        match self {
            Dim::LogUniform { .. } => v.ln(),
            _ => v,
        }
    }

    /// Maps a search coordinate back to a legal value.
    pub(crate) fn unwarp(&self, u: f64) -> f64 {
        match *self {
            Dim::Uniform { lo, hi } => u.clamp(lo, hi),
            Dim::LogUniform { lo, hi } => u.exp().clamp(lo, hi),
            Dim::IntUniform { lo, hi } => u.round().clamp(lo as f64, hi as f64),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            Dim::IntUniform { lo, hi } => rng.random_range(lo..=hi) as f64,
            _ => {
                let (a, b) = self.internal_bounds();
                self.unwarp(rng.random_range(a..b))
            }
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        match *self {
            Dim::Uniform { lo, hi } | Dim::LogUniform { lo, hi } => (lo..=hi).contains(&v),
            Dim::IntUniform { lo, hi } => v.fract() == 0.0 && (lo as f64..=hi as f64).contains(&v),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamSpace {
    pub dims: BTreeMap<String, Dim>,
}

impl ParamSpace {
    pub fn new(dims: impl IntoIterator<Item = (impl Into<String>, Dim)>) -> Result<Self> {
        let space = Self {
            dims: dims.into_iter().map(|(k, d)| (k.into(), d)).collect(),
        };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::InvalidParam("parameter space has no dimensions".into()));
        }
        self.dims.values().try_for_each(Dim::validate)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Params {
        self.dims
            .iter()
            .map(|(k, d)| (k.clone(), d.sample(rng)))
            .collect()
    }

    pub fn contains(&self, params: &Params) -> bool {
        params.len() == self.dims.len()
            && self
                .dims
                .iter()
                .all(|(k, d)| params.get(k).is_some_and(|&v| d.contains(v)))
    }
}
