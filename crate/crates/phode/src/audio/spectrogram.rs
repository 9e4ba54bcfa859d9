//! 64-channel log-mel spectrogram, the recognizer's input representation.
//!
//! Analysis parameters are fixed: 25 ms Hann window, 10 ms hop, 64 mel-spaced
//! triangular bands spanning 50-8000 Hz, natural-log compression with a 1e-10
//! power floor. Input must be 16 kHz mono.

use ndarray::Array2;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::audio::Waveform;
use crate::error::{Error, Result};

pub const SPEC_SAMPLE_RATE: u32 = 16_000;
pub const SPEC_CHANNELS: usize = 64;
pub const WINDOW_MS: f64 = 25.0;
pub const HOP_MS: f64 = 10.0;
pub const LOG_FLOOR: f64 = 1e-10;

const FMIN_HZ: f64 = 50.0;
const FMAX_HZ: f64 = 8000.0;
const FFT_SIZE: usize = 512;

/// T x 64 matrix of log-power frames.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrogram {
    pub frames: Array2<f32>,
    pub hop_ms: f64,
}

impl Spectrogram {
    pub fn num_frames(&self) -> usize {
        self.frames.nrows()
    }

    pub fn channels(&self) -> usize {
        self.frames.ncols()
    }

    /// Keep only the first `k` frames.
    pub fn truncated(&self, k: usize) -> Spectrogram {
        Spectrogram {
            frames: self.frames.slice(ndarray::s![..k.min(self.num_frames()), ..]).to_owned(),
            hop_ms: self.hop_ms,
        }
    }
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// The 66 band-edge frequencies of the 64 triangular mel filters; band `k`
/// spans edges `k..k+2` with its peak at edge `k+1`.
pub fn mel_band_edges_hz() -> Vec<f64> {
    let mel_lo = hz_to_mel(FMIN_HZ);
    let mel_hi = hz_to_mel(FMAX_HZ);
    (0..SPEC_CHANNELS + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (SPEC_CHANNELS + 1) as f64))
        .collect()
}

fn mel_filterbank(sample_rate: u32) -> Vec<Vec<(usize, f64)>> {
    let edges = mel_band_edges_hz();
    let bin_hz = sample_rate as f64 / FFT_SIZE as f64;
    let mut bank = Vec::with_capacity(SPEC_CHANNELS);
    for band in 0..SPEC_CHANNELS {
        let (lo, center, hi) = (edges[band], edges[band + 1], edges[band + 2]);
        let mut weights = Vec::new();
        let bin_lo = (lo / bin_hz).floor() as usize;
        let bin_hi = ((hi / bin_hz).ceil() as usize).min(FFT_SIZE / 2);
        for bin in bin_lo..=bin_hi {
            let f = bin as f64 * bin_hz;
            let w = if f <= center {
                (f - lo) / (center - lo)
            } else {
                (hi - f) / (hi - center)
            };
            if w > 0.0 {
                weights.push((bin, w));
            }
        }
        bank.push(weights);
    }
    bank
}

/// Compute the T x 64 log-power spectrogram of a 16 kHz waveform.
///
/// T = floor((N - window_samples) / hop_samples) + 1; only complete analysis
/// windows produce frames.
pub fn compute_spectrogram(w: &Waveform) -> Result<Spectrogram> {
    if w.sample_rate != SPEC_SAMPLE_RATE {
        return Err(Error::Audio(format!(
            "spectrogram requires {SPEC_SAMPLE_RATE} Hz input, got {} Hz; resample first",
            w.sample_rate
        )));
    }
    let window = (WINDOW_MS / 1000.0 * SPEC_SAMPLE_RATE as f64).round() as usize;
    let hop = (HOP_MS / 1000.0 * SPEC_SAMPLE_RATE as f64).round() as usize;
    if w.samples.len() < window {
        return Err(Error::Audio(format!(
            "input of {} samples is shorter than one {window}-sample analysis window",
            w.samples.len()
        )));
    }
    let t = (w.samples.len() - window) / hop + 1;

    let hann: Vec<f64> = (0..window)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / window as f64).cos())
        .collect();
    let bank = mel_filterbank(SPEC_SAMPLE_RATE);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(FFT_SIZE);

    let mut frames = Array2::<f32>::zeros((t, SPEC_CHANNELS));
    let mut buf = vec![Complex::new(0.0, 0.0); FFT_SIZE];
    let mut power = vec![0.0f64; FFT_SIZE / 2 + 1];
    for (ti, mut row) in frames.rows_mut().into_iter().enumerate() {
        let start = ti * hop;
        for (i, c) in buf.iter_mut().enumerate() {
            *c = if i < window {
                Complex::new(w.samples[start + i] as f64 * hann[i], 0.0)
            } else {
                Complex::new(0.0, 0.0)
            };
        }
        fft.process(&mut buf);
        for (i, p) in power.iter_mut().enumerate() {
            *p = buf[i].norm_sqr();
        }
        for (band, weights) in bank.iter().enumerate() {
            let e: f64 = weights.iter().map(|&(bin, wgt)| power[bin] * wgt).sum();
            row[band] = e.max(LOG_FLOOR).ln() as f32;
        }
    }
    Ok(Spectrogram {
        frames,
        hop_ms: HOP_MS,
    })
}
