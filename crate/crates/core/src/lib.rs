//! Trigger-sound attenuation toolkit.
//!
//! Causal enhancement processors ([`dsp`]), stimulus synthesis ([`mixgen`]),
//! scale-invariant evaluation and rating statistics ([`metrics`]), a simulated
//! noise-cancellation playback chain ([`anc`]) and black-box parameter search
//! ([`optimizer`]).

// parameter checks are written as negated comparisons so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anc;
pub mod audio;
pub mod dsp;
pub mod error;
pub mod metrics;
pub mod optimizer;
pub mod mixgen;
pub mod processor;
pub mod resample;
pub mod wav;

pub use audio::{rms_dbfs, AudioBuffer, DEFAULT_SAMPLE_RATE};
pub use error::{Error, Result};
pub use processor::StreamProcessor;
