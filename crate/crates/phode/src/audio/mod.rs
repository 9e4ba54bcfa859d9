//! Waveform ingestion, augmentation, and spectrogram computation.

mod augment;
mod filters;
mod spectrogram;

pub use augment::{augment, AugmentationConfig, NoiseLevel, Range};
pub use filters::Biquad;
pub use spectrogram::{
    compute_spectrogram, mel_band_edges_hz, Spectrogram, HOP_MS, LOG_FLOOR, SPEC_CHANNELS,
    SPEC_SAMPLE_RATE, WINDOW_MS,
};

use std::path::Path;

use crate::error::{Error, Result};

/// Mono audio with amplitude nominally in [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::Audio("sample_rate must be > 0".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Audio(format!("non-finite sample at index {i}")));
        }
        Ok(Waveform {
            samples,
            sample_rate,
        })
    }

    pub fn silence(duration_s: f64, sample_rate: u32) -> Self {
        Waveform {
            samples: vec![0.0; (duration_s * sample_rate as f64).round() as usize],
            sample_rate,
        }
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let sum: f64 = self.samples.iter().map(|&s| (s as f64) * (s as f64)).sum();
        (sum / self.samples.len() as f64).sqrt()
    }

    pub fn peak(&self) -> f32 {
        self.samples.iter().fold(0.0f32, |m, &s| m.max(s.abs()))
    }

    /// Scale down to peak 1.0 when the signal exceeds the [-1, 1] range;
    /// signals already inside the range are untouched.
    pub fn clamp_normalized(mut self) -> Self {
        let peak = self.peak();
        if peak > 1.0 {
            for s in &mut self.samples {
                *s /= peak;
            }
        }
        self
    }

    /// Read a mono 16-bit PCM or 32-bit float WAV file.
    pub fn read_wav(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = hound::WavReader::open(path)?;
        let spec = reader.spec();
        if spec.channels != 1 {
            return Err(Error::Audio(format!(
                "{}: expected mono audio, got {} channels",
                path.display(),
                spec.channels
            )));
        }
        let samples: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
            (hound::SampleFormat::Float, 32) => {
                reader.samples::<f32>().collect::<std::result::Result<_, _>>()?
            }
            (hound::SampleFormat::Int, 16) => reader
                .samples::<i16>()
                .map(|s| s.map(|v| v as f32 / 32768.0))
                .collect::<std::result::Result<_, _>>()?,
            (fmt, bits) => {
                return Err(Error::Audio(format!(
                    "{}: unsupported sample format {fmt:?}/{bits} (need PCM16 or float32)",
                    path.display()
                )))
            }
        };
        Waveform::new(samples, spec.sample_rate)
    }

    /// Write as 32-bit float WAV.
    pub fn write_wav(&self, path: impl AsRef<Path>) -> Result<()> {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate,
            bits_per_sample: 32,
            sample_format: hound::SampleFormat::Float,
        };
        let mut writer = hound::WavWriter::create(path.as_ref(), spec)?;
        for &s in &self.samples {
            writer.write_sample(s)?;
        }
        writer.finalize()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wav_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.wav");
        let w = Waveform::new((0..480).map(|i| (i as f32 / 480.0).sin() * 0.5).collect(), 16000)
            .unwrap();
        w.write_wav(&path).unwrap();
        let back = Waveform::read_wav(&path).unwrap();
        assert_eq!(back.sample_rate, 16000);
        assert_eq!(back.samples, w.samples);
    }

    #[test]
    fn non_finite_samples_rejected() {
        assert!(Waveform::new(vec![0.0, f32::NAN], 16000).is_err());
    }

    #[test]
    fn clamp_normalize_only_when_needed() {
        let w = Waveform::new(vec![0.5, -0.25], 16000).unwrap().clamp_normalized();
        assert_eq!(w.samples, vec![0.5, -0.25]);
        let w = Waveform::new(vec![2.0, -1.0], 16000).unwrap().clamp_normalized();
        assert_eq!(w.samples, vec![1.0, -0.5]);
    }
}
