//! RIFF/WAV input and output.
//!
//! Reading accepts 16-bit PCM and 32-bit float, any channel count; channels
//! are averaged into mono. Writing always produces 32-bit float mono, so a
//! write/read round trip is lossless.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use log::warn;

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = WavReader::new(std::io::BufReader::new(file)).map_err(|e| map_hound(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(Error::MalformedWav {
            path: path.into(),
            reason: "zero channels".into(),
        });
    }
    let interleaved: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f32 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| map_hound(path, e))?,
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| map_hound(path, e))?,
        (format, bits) => {
            return Err(Error::UnsupportedCodec {
                path: path.into(),
                reason: format!("{bits}-bit {format:?}; expected 16-bit int or 32-bit float"),
            })
        }
    };
    let mono = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(channels)
            .map(|frame| (frame.iter().map(|&s| s as f64).sum::<f64>() / channels as f64) as f32)
            .collect()
    };
    AudioBuffer::new(mono, spec.sample_rate).map_err(|e| Error::MalformedWav {
        path: path.into(),
        reason: e.to_string(),
    })
}

pub fn write_wav(buffer: &AudioBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let peak = buffer.peak();
    if peak > 1.0 {
        warn!(
            "{}: peak {peak:.3} exceeds full scale; written unclipped",
            path.display()
        );
    }
    let spec = WavSpec {
        channels: 1,
        sample_rate: buffer.sample_rate(),
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut writer = WavWriter::create(path, spec).map_err(|e| map_hound(path, e))?;
    for &s in buffer.samples() {
        writer.write_sample(s).map_err(|e| map_hound(path, e))?;
    }
    writer.finalize().map_err(|e| map_hound(path, e))
}

fn map_hound(path: &Path, err: hound::Error) -> Error {
    match err {
        hound::Error::IoError(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
            Error::MalformedWav {
                path: path.into(),
                reason: "truncated file".into(),
            }
        }
        hound::Error::IoError(e) => Error::io(path, e),
        hound::Error::FormatError(reason) => Error::MalformedWav {
            path: path.into(),
            reason: reason.into(),
        },
        hound::Error::Unsupported => Error::UnsupportedCodec {
            path: path.into(),
            reason: "unsupported WAV feature".into(),
        },
        other => Error::UnsupportedCodec {
            path: path.into(),
            reason: other.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn write_pcm16(path: &Path, channels: u16, rate: u32, frames: &[i16]) {
        let spec = WavSpec {
            channels,
            sample_rate: rate,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(path, spec).unwrap();
        for &s in frames {
            w.write_sample(s).unwrap();
        }
        w.finalize().unwrap();
    }

    #[test]
    fn pcm16_silence_reads_as_zeros() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.wav");
        write_pcm16(&p, 1, 44_100, &vec![0; 44_100]);
        let b = read_wav(&p).unwrap();
        assert_eq!(b.sample_rate(), 44_100);
        assert_eq!(b.len(), 44_100);
        assert!(b.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn pcm16_extremes_scale_by_32768() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.wav");
        write_pcm16(&p, 1, 8000, &[-32768, 32767]);
        let b = read_wav(&p).unwrap();
        assert_eq!(b.samples()[0], -1.0);
        assert_eq!(b.samples()[1], 32767.0 / 32768.0);
    }

    #[test]
    fn symmetric_stereo_downmixes_to_zero() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("st.wav");
        let frames: Vec<i16> = (0..200).map(|i| if i % 2 == 0 { 16384 } else { -16384 }).collect();
        write_pcm16(&p, 2, 8000, &frames);
        let b = read_wav(&p).unwrap();
        assert_eq!(b.len(), 100);
        assert!(b.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn float_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.wav");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f32> = (0..1000).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let b = AudioBuffer::new(x, 32_000).unwrap();
        write_wav(&b, &p).unwrap();
        let r = read_wav(&p).unwrap();
        assert_eq!(
            b.samples().iter().map(|s| s.to_bits()).collect::<Vec<_>>(),
            r.samples().iter().map(|s| s.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn empty_and_over_range_buffers_write() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.wav");
        write_wav(&AudioBuffer::silence(0, 32_000).unwrap(), &p).unwrap();
        assert_eq!(read_wav(&p).unwrap().len(), 0);

        let p = dir.path().join("hot.wav");
        let hot = AudioBuffer::new(vec![1.5, -2.25, 0.5], 32_000).unwrap();
        write_wav(&hot, &p).unwrap();
        assert_eq!(read_wav(&p).unwrap(), hot);
    }

    #[test]
    fn errors_are_distinct() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            read_wav(dir.path().join("missing.wav")),
            Err(Error::FileNotFound(_))
        ));

        let junk = dir.path().join("junk.wav");
        std::fs::write(&junk, b"this is not a riff file at all").unwrap();
        assert!(matches!(read_wav(&junk), Err(Error::MalformedWav { .. })));

        let p24 = dir.path().join("p24.wav");
        let spec = WavSpec {
            channels: 1,
            sample_rate: 8000,
            bits_per_sample: 24,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&p24, spec).unwrap();
        w.write_sample(1000i32).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&p24), Err(Error::UnsupportedCodec { .. })));
    }
}
