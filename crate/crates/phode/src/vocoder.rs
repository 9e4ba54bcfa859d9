//! Generic CIS-style cochlear-implant simulation.
//!
//! The chain is waveform -> [`encode`] (16-band electrodogram) ->
//! [`apply_spread`] (exponential current spread) -> [`resynthesize`]
//! (noise-band vocoder) -> the ordinary spectrogram path, so the recognizer
//! sees a CI version of the same sentence.
//!
//! Defaults: 16 channels with log-spaced edges 250-8000 Hz, 200 Hz envelope
//! cutoff, log compression over a 50 dB input window, 1000 pulses/s/channel,
//! 1.1 mm electrode pitch with decay 1.0 mm^-1. None of these come from a
//! published device; all are exposed in config.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::audio::{compute_spectrogram, Biquad, Spectrogram, Waveform};
use crate::error::{Error, Result};
use crate::rng::derive_seed;

pub const CHANNELS: usize = 16;

/// Envelope compression law applied per channel after normalization to the
/// utterance maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Compression {
    /// dB-linear map over `dynamic_range_db`: envelopes below the window
    /// floor are silenced, the utterance peak maps to 1.
    Log { dynamic_range_db: f64 },
    /// `x^exponent` on the normalized envelope.
    Power { exponent: f64 },
}

impl Compression {
    fn compress(self, x: f64) -> f64 {
        match self {
            Compression::Log { dynamic_range_db } => {
                if x <= 0.0 {
                    return 0.0;
                }
                ((20.0 * x.log10() + dynamic_range_db) / dynamic_range_db).clamp(0.0, 1.0)
            }
            Compression::Power { exponent } => x.max(0.0).powf(exponent).clamp(0.0, 1.0),
        }
    }

    fn expand(self, y: f64) -> f64 {
        match self {
            Compression::Log { dynamic_range_db } => {
                if y <= 0.0 {
                    0.0
                } else {
                    10f64.powf(dynamic_range_db * (y - 1.0) / 20.0)
                }
            }
            Compression::Power { exponent } => y.max(0.0).powf(1.0 / exponent),
        }
    }
}

/// 16-band analysis filterbank plus envelope and compression parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterbankSpec {
    /// 17 ascending band-edge frequencies in Hz.
    pub channel_edges_hz: Vec<f64>,
    pub envelope_cutoff_hz: f64,
    pub compression: Compression,
}

impl Default for FilterbankSpec {
    fn default() -> Self {
        let lo = 250f64;
        let hi = 8000f64;
        let edges = (0..=CHANNELS)
            .map(|i| lo * (hi / lo).powf(i as f64 / CHANNELS as f64))
            .collect();
        FilterbankSpec {
            channel_edges_hz: edges,
            envelope_cutoff_hz: 200.0,
            compression: Compression::Log {
                dynamic_range_db: 50.0,
            },
        }
    }
}

impl FilterbankSpec {
    pub fn validate(&self) -> Result<()> {
        if self.channel_edges_hz.len() != CHANNELS + 1 {
            return Err(Error::Config(format!(
                "filterbank needs {} edges, got {}",
                CHANNELS + 1,
                self.channel_edges_hz.len()
            )));
        }
        if !self.channel_edges_hz.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::Config(
                "filterbank edges must be strictly ascending".into(),
            ));
        }
        if self.envelope_cutoff_hz <= 0.0 {
            return Err(Error::Config("envelope cutoff must be positive".into()));
        }
        Ok(())
    }

    pub fn band(&self, channel: usize) -> (f64, f64) {
        (
            self.channel_edges_hz[channel],
            self.channel_edges_hz[channel + 1],
        )
    }

    /// Geometric band center; the natural probe frequency for channel tests.
    pub fn center_hz(&self, channel: usize) -> f64 {
        let (lo, hi) = self.band(channel);
        (lo * hi).sqrt()
    }
}

/// 16 x P matrix of normalized pulse amplitudes in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct Electrodogram {
    pub pulses: Array2<f32>,
    pub pulse_rate: f64,
}

impl Electrodogram {
    pub fn channels(&self) -> usize {
        self.pulses.nrows()
    }

    pub fn frames(&self) -> usize {
        self.pulses.ncols()
    }

    pub fn channel_energy(&self, channel: usize) -> f64 {
        self.pulses
            .row(channel)
            .iter()
            .map(|&a| (a as f64) * (a as f64))
            .sum()
    }

    pub fn total_energy(&self) -> f64 {
        (0..self.channels()).map(|c| self.channel_energy(c)).sum()
    }

    /// Export as `channel,frame,amplitude` CSV (header included).
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::from("channel,frame,amplitude\n");
        for c in 0..self.channels() {
            for f in 0..self.frames() {
                out.push_str(&format!("{c},{f},{}\n", self.pulses[[c, f]]));
            }
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Little-endian binary export: magic `EGRAM1`, u32 channel count,
    /// f64 pulse rate, u32 frame count, then the row-major f32 matrix.
    pub fn write_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::with_capacity(22 + self.pulses.len() * 4);
        buf.extend_from_slice(b"EGRAM1");
        buf.extend_from_slice(&(self.channels() as u32).to_le_bytes());
        buf.extend_from_slice(&self.pulse_rate.to_le_bytes());
        buf.extend_from_slice(&(self.frames() as u32).to_le_bytes());
        for &v in self.pulses.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(&buf).map_err(|e| Error::io(path, e))
    }

    pub fn read_binary(path: impl AsRef<Path>) -> Result<Electrodogram> {
        let path = path.as_ref();
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        if bytes.len() < 22 || &bytes[..6] != b"EGRAM1" {
            return Err(Error::Validation(format!(
                "{}: not an electrodogram file (bad magic or truncated header)",
                path.display()
            )));
        }
        let channels = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
        let pulse_rate = f64::from_le_bytes(bytes[10..18].try_into().unwrap());
        let frames = u32::from_le_bytes(bytes[18..22].try_into().unwrap()) as usize;
        let expected = 22 + channels * frames * 4;
        if bytes.len() != expected {
            return Err(Error::Validation(format!(
                "{}: expected {expected} bytes for {channels}x{frames}, found {}",
                path.display(),
                bytes.len()
            )));
        }
        let data: Vec<f32> = bytes[22..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Electrodogram {
            pulses: Array2::from_shape_vec((channels, frames), data).expect("shape checked above"),
            pulse_rate,
        })
    }
}

/// Exponential current-spread model over electrode positions along the
/// cochlea.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadModel {
    pub electrode_positions_mm: Vec<f64>,
    pub decay_constant_per_mm: f64,
}

impl Default for SpreadModel {
    fn default() -> Self {
        SpreadModel {
            electrode_positions_mm: (0..CHANNELS).map(|k| k as f64 * 1.1).collect(),
            decay_constant_per_mm: 1.0,
        }
    }
}

impl SpreadModel {
    pub fn validate(&self) -> Result<()> {
        if !self.electrode_positions_mm.windows(2).all(|p| p[0] < p[1]) {
            return Err(Error::Config(
                "electrode positions must be strictly ordered".into(),
            ));
        }
        if self.decay_constant_per_mm <= 0.0 {
            return Err(Error::Config("spread decay constant must be positive".into()));
        }
        Ok(())
    }

    /// The symmetric nonnegative mixing matrix w[c][k] = exp(-decay |pos_c - pos_k|).
    pub fn weight_matrix(&self) -> Array2<f64> {
        let n = self.electrode_positions_mm.len();
        Array2::from_shape_fn((n, n), |(c, k)| {
            (-self.decay_constant_per_mm
                * (self.electrode_positions_mm[c] - self.electrode_positions_mm[k]).abs())
            .exp()
        })
    }
}

/// Zero-phase FFT band-pass with raised-cosine transitions at 2% of each edge.
fn band_filter(x: &[f32], fs: f64, lo: f64, hi: f64) -> Vec<f32> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let fft_len = n.next_power_of_two();
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .map(|&v| Complex::new(v as f64, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(fft_len)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(fft_len).process(&mut buf);

    let bin_hz = fs / fft_len as f64;
    let t_lo = 0.02 * lo;
    let t_hi = 0.02 * hi;
    let weight = |f: f64| -> f64 {
        let rise = if f <= lo - t_lo {
            0.0
        } else if f >= lo + t_lo {
            1.0
        } else {
            0.5 - 0.5 * (std::f64::consts::PI * (f - lo + t_lo) / (2.0 * t_lo)).cos()
        };
        let fall = if f >= hi + t_hi {
            0.0
        } else if f <= hi - t_hi {
            1.0
        } else {
            0.5 + 0.5 * (std::f64::consts::PI * (f - hi + t_hi) / (2.0 * t_hi)).cos()
        };
        rise * fall
    };
    for k in 0..=fft_len / 2 {
        let w = weight(k as f64 * bin_hz);
        buf[k] *= w;
        if k > 0 && k < fft_len / 2 {
            buf[fft_len - k] *= w;
        }
    }
    planner.plan_fft_inverse(fft_len).process(&mut buf);
    buf[..n]
        .iter()
        .map(|c| (c.re / fft_len as f64) as f32)
        .collect()
}

/// Rectify + 2nd-order Butterworth low-pass at the envelope cutoff.
fn envelope(band: &[f32], fs: f64, cutoff_hz: f64) -> Vec<f64> {
    let mut lp = Biquad::lowpass(fs, cutoff_hz, std::f64::consts::FRAC_1_SQRT_2);
    band.iter()
        .map(|&v| lp.process(v.abs() as f64).max(0.0))
        .collect()
}

/// Encode a 16 kHz waveform into a pulse-amplitude electrodogram.
///
/// Per channel: band-pass, rectify + low-pass envelope, normalize to the
/// utterance peak envelope, compress, and sample at `pulse_rate`.
pub fn encode(w: &Waveform, fb: &FilterbankSpec, pulse_rate: f64) -> Result<Electrodogram> {
    fb.validate()?;
    if pulse_rate <= 0.0 {
        return Err(Error::Config("pulse rate must be positive".into()));
    }
    let fs = w.sample_rate as f64;
    let step = (fs / pulse_rate).round().max(1.0) as usize;
    let frames = w.samples.len() / step;

    let mut envelopes: Vec<Vec<f64>> = Vec::with_capacity(CHANNELS);
    for c in 0..CHANNELS {
        let (lo, hi) = fb.band(c);
        let band = band_filter(&w.samples, fs, lo, hi);
        envelopes.push(envelope(&band, fs, fb.envelope_cutoff_hz));
    }
    let env_max = envelopes
        .iter()
        .flat_map(|e| e.iter().copied())
        .fold(0.0f64, f64::max);

    let mut pulses = Array2::<f32>::zeros((CHANNELS, frames));
    if env_max > 0.0 {
        for c in 0..CHANNELS {
            for p in 0..frames {
                let x = envelopes[c][p * step] / env_max;
                pulses[[c, p]] = fb.compression.compress(x) as f32;
            }
        }
        let peak = pulses.iter().fold(0.0f32, |m, &v| m.max(v));
        if peak > 0.0 {
            pulses.mapv_inplace(|v| v / peak);
        }
    }
    Ok(Electrodogram { pulses, pulse_rate })
}

/// Mix channels by exponential current spread and renormalize to max 1.
pub fn apply_spread(e: &Electrodogram, spread: &SpreadModel) -> Result<Electrodogram> {
    spread.validate()?;
    if spread.electrode_positions_mm.len() != e.channels() {
        return Err(Error::Config(format!(
            "spread model has {} electrodes, electrodogram has {} channels",
            spread.electrode_positions_mm.len(),
            e.channels()
        )));
    }
    let weights = spread.weight_matrix();
    let mut out = Array2::<f32>::zeros(e.pulses.dim());
    for c in 0..e.channels() {
        for k in 0..e.channels() {
            let w = weights[[c, k]] as f32;
            if w < 1e-12 {
                continue;
            }
            for p in 0..e.frames() {
                out[[c, p]] += w * e.pulses[[k, p]];
            }
        }
    }
    let peak = out.iter().fold(0.0f32, |m, &v| m.max(v));
    if peak > 0.0 {
        out.mapv_inplace(|v| v / peak);
    }
    Ok(Electrodogram {
        pulses: out,
        pulse_rate: e.pulse_rate,
    })
}

/// Vocode an electrodogram back to audio: per channel a band-limited noise
/// carrier is modulated by the expanded, upsampled envelope; channels are
/// summed and peak-normalized.
pub fn resynthesize(
    e: &Electrodogram,
    fb: &FilterbankSpec,
    sample_rate: u32,
    carrier_seed: u64,
) -> Result<Waveform> {
    fb.validate()?;
    if fb.channel_edges_hz.len() != e.channels() + 1 {
        return Err(Error::Config(format!(
            "filterbank has {} bands, electrodogram has {} channels",
            fb.channel_edges_hz.len() - 1,
            e.channels()
        )));
    }
    let fs = sample_rate as f64;
    let step = (fs / e.pulse_rate).round().max(1.0) as usize;
    let n = e.frames() * step;
    let mut sum = vec![0.0f32; n];
    let mut rng = ChaCha8Rng::seed_from_u64(carrier_seed);

    for c in 0..e.channels() {
        let (lo, hi) = fb.band(c);
        let noise: Vec<f32> = (0..n).map(|_| rng.random_range(-1.0f32..1.0)).collect();
        let carrier = band_filter(&noise, fs, lo, hi);
        let carrier_rms = (carrier.iter().map(|&v| (v as f64).powi(2)).sum::<f64>()
            / n.max(1) as f64)
            .sqrt()
            .max(1e-12);
        for (i, s) in sum.iter_mut().enumerate() {
            let p = i / step;
            let frac = (i % step) as f64 / step as f64;
            let y0 = e.pulses[[c, p]] as f64;
            let y1 = if p + 1 < e.frames() {
                e.pulses[[c, p + 1]] as f64
            } else {
                y0
            };
            let env = fb.compression.expand(y0 * (1.0 - frac) + y1 * frac);
            *s += (env * carrier[i] as f64 / carrier_rms) as f32;
        }
    }
    let peak = sum.iter().fold(0.0f32, |m, &v| m.max(v.abs()));
    if peak > 0.0 {
        for s in &mut sum {
            *s /= peak;
        }
    }
    Waveform::new(sum, sample_rate)
}

/// The full CI input simulation with fixed parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CiSimulator {
    pub filterbank: FilterbankSpec,
    pub spread: SpreadModel,
    pub pulse_rate: f64,
    pub seed: u64,
}

impl Default for CiSimulator {
    fn default() -> Self {
        CiSimulator {
            filterbank: FilterbankSpec::default(),
            spread: SpreadModel::default(),
            pulse_rate: 1000.0,
            seed: 0,
        }
    }
}

impl CiSimulator {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Encode, spread, and resynthesize; the carrier is re-seeded per sentence
    /// from (seed, sentence_id).
    pub fn vocode(&self, w: &Waveform, sentence_id: &str) -> Result<Waveform> {
        let e = encode(w, &self.filterbank, self.pulse_rate)?;
        let spread = apply_spread(&e, &self.spread)?;
        resynthesize(
            &spread,
            &self.filterbank,
            w.sample_rate,
            derive_seed(self.seed, "ci-carrier", sentence_id),
        )
    }

    /// Convenience composition encode -> spread -> resynthesize -> spectrogram.
    pub fn transform(&self, w: &Waveform, sentence_id: &str) -> Result<Spectrogram> {
        compute_spectrogram(&self.vocode(w, sentence_id)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::{SPEC_CHANNELS, SPEC_SAMPLE_RATE};

    fn tone(f: f64, duration_s: f64, amp: f32) -> Waveform {
        let n = (duration_s * SPEC_SAMPLE_RATE as f64) as usize;
        Waveform::new(
            (0..n)
                .map(|i| {
                    amp * (2.0 * std::f64::consts::PI * f * i as f64 / SPEC_SAMPLE_RATE as f64)
                        .sin() as f32
                })
                .collect(),
            SPEC_SAMPLE_RATE,
        )
        .unwrap()
    }

    #[test]
    fn silence_encodes_to_all_zero() {
        let e = encode(
            &Waveform::silence(0.5, SPEC_SAMPLE_RATE),
            &FilterbankSpec::default(),
            1000.0,
        )
        .unwrap();
        assert_eq!(e.channels(), 16);
        assert!(e.pulses.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn tone_at_band_center_concentrates_energy() {
        let fb = FilterbankSpec::default();
        let w = tone(fb.center_hz(5), 0.5, 0.5);
        let e = encode(&w, &fb, 1000.0).unwrap();
        let frac = e.channel_energy(5) / e.total_energy();
        assert!(frac >= 0.8, "channel 5 holds only {frac:.3} of the energy");
    }

    #[test]
    fn equal_tones_give_equal_channel_energies() {
        let fb = FilterbankSpec::default();
        let mut w = tone(fb.center_hz(3), 0.5, 0.3);
        let other = tone(fb.center_hz(12), 0.5, 0.3);
        for (a, b) in w.samples.iter_mut().zip(&other.samples) {
            *a += b;
        }
        let e = encode(&w, &fb, 1000.0).unwrap();
        let e3 = e.channel_energy(3);
        let e12 = e.channel_energy(12);
        let ratio = e3 / e12;
        assert!(
            (0.9..=1.1).contains(&ratio),
            "energy ratio {ratio:.3} outside 10%"
        );
    }

    #[test]
    fn encode_is_invariant_to_input_gain() {
        let fb = FilterbankSpec::default();
        let w = tone(1000.0, 0.3, 0.5);
        let half =
            Waveform::new(w.samples.iter().map(|&s| s * 0.25).collect(), w.sample_rate).unwrap();
        let a = encode(&w, &fb, 1000.0).unwrap();
        let b = encode(&half, &fb, 1000.0).unwrap();
        for (x, y) in a.pulses.iter().zip(b.pulses.iter()) {
            assert!(y <= &(x + 1e-5), "gain scaling increased an amplitude");
        }
    }

    #[test]
    fn spread_weight_matrix_is_symmetric_nonnegative() {
        let s = SpreadModel::default();
        let w = s.weight_matrix();
        for c in 0..16 {
            for k in 0..16 {
                assert!(w[[c, k]] >= 0.0);
                assert!((w[[c, k]] - w[[k, c]]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn huge_decay_is_identity() {
        let fb = FilterbankSpec::default();
        let w = tone(fb.center_hz(7), 0.3, 0.5);
        let e = encode(&w, &fb, 1000.0).unwrap();
        let spread = SpreadModel {
            decay_constant_per_mm: 1e6,
            ..SpreadModel::default()
        };
        let out = apply_spread(&e, &spread).unwrap();
        for (a, b) in out.pulses.iter().zip(e.pulses.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn tiny_decay_averages_channels() {
        let fb = FilterbankSpec::default();
        let w = tone(fb.center_hz(7), 0.3, 0.5);
        let e = encode(&w, &fb, 1000.0).unwrap();
        let spread = SpreadModel {
            decay_constant_per_mm: 1e-6,
            ..SpreadModel::default()
        };
        let out = apply_spread(&e, &spread).unwrap();
        // Every channel approaches the (renormalized) cross-channel mean.
        let mean: Vec<f32> = (0..e.frames())
            .map(|p| (0..16).map(|c| e.pulses[[c, p]]).sum::<f32>() / 16.0)
            .collect();
        let mean_peak = mean.iter().fold(0.0f32, |m, &v| m.max(v));
        for c in 0..16 {
            for p in 0..e.frames() {
                let expected = mean[p] / mean_peak;
                assert!(
                    (out.pulses[[c, p]] - expected).abs() <= 0.01,
                    "channel {c} frame {p}: {} vs {}",
                    out.pulses[[c, p]],
                    expected
                );
            }
        }
    }

    #[test]
    fn impulse_spread_matches_closed_form() {
        let mut pulses = Array2::<f32>::zeros((16, 4));
        pulses[[8, 2]] = 1.0;
        let e = Electrodogram {
            pulses,
            pulse_rate: 1000.0,
        };
        let out = apply_spread(&e, &SpreadModel::default()).unwrap();
        let ratio = out.pulses[[7, 2]] / out.pulses[[8, 2]];
        let expected = (-1.1f32).exp();
        assert!(
            (ratio - expected).abs() < 1e-6,
            "neighbor ratio {ratio} vs exp(-1.1) = {expected}"
        );
    }

    #[test]
    fn zero_electrodogram_resynthesizes_to_silence() {
        let e = Electrodogram {
            pulses: Array2::zeros((16, 100)),
            pulse_rate: 1000.0,
        };
        let w = resynthesize(&e, &FilterbankSpec::default(), SPEC_SAMPLE_RATE, 7).unwrap();
        assert!(w.samples.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn single_channel_constant_envelope_stays_in_band() {
        let fb = FilterbankSpec::default();
        let mut pulses = Array2::<f32>::zeros((16, 500));
        for p in 0..500 {
            pulses[[5, p]] = 1.0;
        }
        let e = Electrodogram {
            pulses,
            pulse_rate: 1000.0,
        };
        let w = resynthesize(&e, &fb, SPEC_SAMPLE_RATE, 3).unwrap();

        // Oracle: integrate FFT power inside vs outside band 5.
        let n = w.samples.len().next_power_of_two();
        let mut buf: Vec<Complex<f64>> = w
            .samples
            .iter()
            .map(|&v| Complex::new(v as f64, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(n)
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let bin_hz = SPEC_SAMPLE_RATE as f64 / n as f64;
        let (lo, hi) = fb.band(5);
        let mut inside = 0.0;
        let mut total = 0.0;
        for k in 0..n / 2 {
            let f = k as f64 * bin_hz;
            let p = buf[k].norm_sqr();
            total += p;
            if f >= lo * 0.98 && f <= hi * 1.02 {
                inside += p;
            }
        }
        assert!(
            inside / total >= 0.8,
            "only {:.3} of spectral energy inside band 5",
            inside / total
        );
    }

    #[test]
    fn duration_preserved_within_one_pulse_period() {
        let w = tone(1200.0, 0.437, 0.5);
        let fb = FilterbankSpec::default();
        let e = encode(&w, &fb, 1000.0).unwrap();
        let out = resynthesize(&e, &fb, SPEC_SAMPLE_RATE, 1).unwrap();
        let period = SPEC_SAMPLE_RATE as usize / 1000;
        assert!(w.samples.len().abs_diff(out.samples.len()) <= period);
    }

    #[test]
    fn envelope_correlation_after_round_trip() {
        let w = crate::toy::speech_like(3.0, 77);
        let fb = FilterbankSpec::default();
        let e = encode(&w, &fb, 1000.0).unwrap();
        let out = resynthesize(&e, &fb, SPEC_SAMPLE_RATE, 11).unwrap();

        // Oracle: STFT band-magnitude envelopes of both signals.
        for c in 0..16 {
            let (lo, hi) = fb.band(c);
            let a = stft_band_envelope(&w.samples, lo, hi);
            let b = stft_band_envelope(&out.samples, lo, hi);
            let n = a.len().min(b.len());
            let r = pearson(&a[..n], &b[..n]);
            assert!(r >= 0.9, "channel {c}: envelope correlation {r:.3} < 0.9");
        }
    }

    fn stft_band_envelope(x: &[f32], lo: f64, hi: f64) -> Vec<f64> {
        let window = 400;
        let hop = 160;
        if x.len() < window {
            return Vec::new();
        }
        let fft = FftPlanner::new().plan_fft_forward(512);
        let hann: Vec<f64> = (0..window)
            .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / window as f64).cos())
            .collect();
        let t = (x.len() - window) / hop + 1;
        let bin_hz = SPEC_SAMPLE_RATE as f64 / 512.0;
        (0..t)
            .map(|ti| {
                let mut buf = vec![Complex::new(0.0, 0.0); 512];
                for i in 0..window {
                    buf[i] = Complex::new(x[ti * hop + i] as f64 * hann[i], 0.0);
                }
                fft.process(&mut buf);
                (0..=256)
                    .filter(|&k| {
                        let f = k as f64 * bin_hz;
                        f >= lo && f <= hi
                    })
                    .map(|k| buf[k].norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut num = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for (&x, &y) in a.iter().zip(b) {
            num += (x - ma) * (y - mb);
            va += (x - ma).powi(2);
            vb += (y - mb).powi(2);
        }
        num / (va.sqrt() * vb.sqrt()).max(1e-300)
    }

    #[test]
    fn ci_transform_silence_is_floor_spectrogram() {
        let sim = CiSimulator::default();
        let spec = sim
            .transform(&Waveform::silence(1.0, SPEC_SAMPLE_RATE), "s0")
            .unwrap();
        let floor = (crate::audio::LOG_FLOOR).ln() as f32;
        assert!(spec.frames.iter().all(|&v| v == floor));
    }

    #[test]
    fn ci_transform_preserves_shape() {
        let w = crate::toy::speech_like(1.0, 3);
        let nh = compute_spectrogram(&w).unwrap();
        let ci = CiSimulator::default().transform(&w, "s1").unwrap();
        assert_eq!(ci.channels(), SPEC_CHANNELS);
        assert!(nh.num_frames().abs_diff(ci.num_frames()) <= 1);
    }

    #[test]
    fn ci_spectrogram_has_less_spectral_detail() {
        let w = crate::toy::speech_like(1.5, 9);
        let nh = compute_spectrogram(&w).unwrap();
        let ci = CiSimulator::default().transform(&w, "s2").unwrap();
        // Oracle: mean within-frame adjacent-channel correlation.
        let smoothness = |s: &Spectrogram| {
            let t = s.num_frames();
            let mut num = 0.0;
            let mut da = 0.0;
            let mut db = 0.0;
            for ti in 0..t {
                let row: Vec<f64> = (0..SPEC_CHANNELS)
                    .map(|c| s.frames[[ti, c]] as f64)
                    .collect();
                let m = row.iter().sum::<f64>() / row.len() as f64;
                for c in 0..SPEC_CHANNELS - 1 {
                    num += (row[c] - m) * (row[c + 1] - m);
                    da += (row[c] - m).powi(2);
                    db += (row[c + 1] - m).powi(2);
                }
            }
            num / (da.sqrt() * db.sqrt()).max(1e-12)
        };
        let s_nh = smoothness(&nh);
        let s_ci = smoothness(&ci);
        assert!(
            s_ci > s_nh,
            "CI adjacent-channel correlation {s_ci:.3} not above NH {s_nh:.3}"
        );
    }

    #[test]
    fn electrodogram_binary_round_trips() {
        let fb = FilterbankSpec::default();
        let w = tone(fb.center_hz(9), 0.2, 0.4);
        let e = encode(&w, &fb, 1000.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.bin");
        e.write_binary(&path).unwrap();
        let back = Electrodogram::read_binary(&path).unwrap();
        assert_eq!(e, back);
        // Truncated file is rejected.
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(Electrodogram::read_binary(&path).is_err());
    }
}
