//! Signal fixtures shared by the benchmarks.

use hushkit_core::mixgen::{synth_source, SourceKind};
use hushkit_core::AudioBuffer;

pub const FS: u32 = hushkit_core::DEFAULT_SAMPLE_RATE;

/// Seeded pink noise at -20 dBFS.
pub fn pink(secs: f64, seed: u64) -> AudioBuffer {
    synth_source(SourceKind::NoiseAmbient, secs, seed, FS)
        .expect("valid duration")
        .audio
}
