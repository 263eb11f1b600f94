//! Objective separation metrics and rating statistics.

pub mod ratings;
pub mod sisnr;
pub mod stats;

pub use ratings::{
    aggregate_ratings, analyze_ratings, Aggregates, AnalysisOptions, Group, Rating,
    RatingsReport, RatingsTable,
};
pub use sisnr::{delta_si_snr, si_snr, EvalRecord, SI_SNR_CLAMP_DB};
pub use stats::{bh_adjust, bootstrap_ci, welch_t_test, Alternative, WelchTest};
