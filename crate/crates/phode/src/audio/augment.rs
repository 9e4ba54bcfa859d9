//! Leveled waveform augmentation.
//!
//! Each noise level carries uniform parameter ranges for the thirteen effect
//! parameters; every effect is applied independently with a configurable
//! per-sentence probability (default 0.5), with all draws flowing from the
//! config seed. Effects run in a fixed order: pitch shift, speed, tempo,
//! chorus, echo, reverb, low-pass, high-pass, band-pass, band-stop, then
//! background noise so the SNR is measured against the processed signal.
//! Filter widths are in octaves.

use std::path::PathBuf;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audio::filters::Biquad;
use crate::audio::Waveform;
use crate::error::{Error, Result};

/// Inclusive uniform sampling range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Range(pub f64, pub f64);

impl Range {
    fn validate(&self, name: &str) -> Result<()> {
        if self.0 > self.1 || !self.0.is_finite() || !self.1.is_finite() {
            return Err(Error::Config(format!(
                "augmentation range {name} = ({}, {}) is invalid",
                self.0, self.1
            )));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.0 == self.1 {
            self.0
        } else {
            rng.random_range(self.0..=self.1)
        }
    }

    fn sample_count(&self, rng: &mut ChaCha8Rng) -> usize {
        let lo = self.0.round() as i64;
        let hi = self.1.round() as i64;
        if lo >= hi {
            lo.max(0) as usize
        } else {
            rng.random_range(lo..=hi).max(0) as usize
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseLevel {
    Quiet,
    Low,
    Mid,
    High,
}

impl NoiseLevel {
    pub const ALL: [NoiseLevel; 4] = [
        NoiseLevel::Quiet,
        NoiseLevel::Low,
        NoiseLevel::Mid,
        NoiseLevel::High,
    ];

    pub fn label(self) -> &'static str {
        match self {
            NoiseLevel::Quiet => "quiet",
            NoiseLevel::Low => "low",
            NoiseLevel::Mid => "mid",
            NoiseLevel::High => "high",
        }
    }
}

impl std::str::FromStr for NoiseLevel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quiet" => Ok(NoiseLevel::Quiet),
            "low" => Ok(NoiseLevel::Low),
            "mid" | "medium" => Ok(NoiseLevel::Mid),
            "high" => Ok(NoiseLevel::High),
            other => Err(Error::Config(format!("unknown noise level '{other}'"))),
        }
    }
}

/// Per-level effect parameter ranges. `None` disables an effect entirely;
/// the quiet level disables all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentationConfig {
    pub level: NoiseLevel,
    pub background_snr: Option<Range>,
    pub pitch_shift: Option<Range>,
    pub speed_rate: Option<Range>,
    pub tempo_rate: Option<Range>,
    pub chorus_n: Option<Range>,
    pub echo_n: Option<Range>,
    pub reverb: Option<Range>,
    pub low_pass_f: Option<Range>,
    pub high_pass_f: Option<Range>,
    pub band_pass_f: Option<Range>,
    pub band_pass_w: Option<Range>,
    pub band_stop_f: Option<Range>,
    pub band_stop_w: Option<Range>,
    /// Per-effect application probability per sentence.
    pub apply_probability: f64,
    /// Optional masker file; white noise when absent.
    pub noise_path: Option<PathBuf>,
    pub seed: u64,
}

impl AugmentationConfig {
    /// The published per-level parameter table.
    pub fn for_level(level: NoiseLevel, seed: u64) -> Self {
        let quiet = AugmentationConfig {
            level,
            background_snr: None,
            pitch_shift: None,
            speed_rate: None,
            tempo_rate: None,
            chorus_n: None,
            echo_n: None,
            reverb: None,
            low_pass_f: None,
            high_pass_f: None,
            band_pass_f: None,
            band_pass_w: None,
            band_stop_f: None,
            band_stop_w: None,
            apply_probability: 0.5,
            noise_path: None,
            seed,
        };
        match level {
            NoiseLevel::Quiet => quiet,
            NoiseLevel::Low => AugmentationConfig {
                background_snr: Some(Range(10.0, 15.0)),
                pitch_shift: Some(Range(-2.0, 2.0)),
                speed_rate: Some(Range(0.9, 1.1)),
                tempo_rate: Some(Range(0.9, 1.2)),
                chorus_n: Some(Range(1.0, 3.0)),
                echo_n: Some(Range(1.0, 3.0)),
                reverb: Some(Range(10.0, 40.0)),
                low_pass_f: Some(Range(6000.0, 7500.0)),
                high_pass_f: Some(Range(100.0, 500.0)),
                band_pass_f: Some(Range(100.0, 500.0)),
                band_pass_w: Some(Range(12.0, 16.0)),
                band_stop_f: Some(Range(300.0, 4000.0)),
                band_stop_w: Some(Range(1.0, 2.0)),
                ..quiet
            },
            NoiseLevel::Mid => AugmentationConfig {
                background_snr: Some(Range(0.0, 15.0)),
                pitch_shift: Some(Range(-4.0, 4.0)),
                speed_rate: Some(Range(0.7, 1.3)),
                tempo_rate: Some(Range(0.8, 1.4)),
                chorus_n: Some(Range(1.0, 4.0)),
                echo_n: Some(Range(1.0, 4.0)),
                reverb: Some(Range(20.0, 70.0)),
                low_pass_f: Some(Range(4000.0, 7000.0)),
                high_pass_f: Some(Range(300.0, 1000.0)),
                band_pass_f: Some(Range(200.0, 1000.0)),
                band_pass_w: Some(Range(6.0, 8.0)),
                band_stop_f: Some(Range(300.0, 2500.0)),
                band_stop_w: Some(Range(2.0, 3.0)),
                ..quiet
            },
            NoiseLevel::High => AugmentationConfig {
                background_snr: Some(Range(-10.0, 15.0)),
                pitch_shift: Some(Range(-6.0, 6.0)),
                speed_rate: Some(Range(0.5, 1.5)),
                tempo_rate: Some(Range(0.7, 1.6)),
                chorus_n: Some(Range(1.0, 6.0)),
                echo_n: Some(Range(1.0, 5.0)),
                reverb: Some(Range(30.0, 100.0)),
                low_pass_f: Some(Range(2000.0, 6000.0)),
                high_pass_f: Some(Range(500.0, 2000.0)),
                band_pass_f: Some(Range(300.0, 1500.0)),
                band_pass_w: Some(Range(3.0, 5.0)),
                band_stop_f: Some(Range(300.0, 1500.0)),
                band_stop_w: Some(Range(3.0, 5.0)),
                ..quiet
            },
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.level == NoiseLevel::Quiet {
            let all_off = self.background_snr.is_none()
                && self.pitch_shift.is_none()
                && self.speed_rate.is_none()
                && self.tempo_rate.is_none()
                && self.chorus_n.is_none()
                && self.echo_n.is_none()
                && self.reverb.is_none()
                && self.low_pass_f.is_none()
                && self.high_pass_f.is_none()
                && self.band_pass_f.is_none()
                && self.band_stop_f.is_none();
            if !all_off {
                return Err(Error::Config("quiet level must disable all effects".into()));
            }
        }
        for (name, r) in [
            ("background_snr", &self.background_snr),
            ("pitch_shift", &self.pitch_shift),
            ("speed_rate", &self.speed_rate),
            ("tempo_rate", &self.tempo_rate),
            ("chorus_n", &self.chorus_n),
            ("echo_n", &self.echo_n),
            ("reverb", &self.reverb),
            ("low_pass_f", &self.low_pass_f),
            ("high_pass_f", &self.high_pass_f),
            ("band_pass_f", &self.band_pass_f),
            ("band_pass_w", &self.band_pass_w),
            ("band_stop_f", &self.band_stop_f),
            ("band_stop_w", &self.band_stop_w),
        ] {
            if let Some(r) = r {
                r.validate(name)?;
            }
        }
        if !(0.0..=1.0).contains(&self.apply_probability) {
            return Err(Error::Config(format!(
                "apply_probability {} outside [0, 1]",
                self.apply_probability
            )));
        }
        Ok(())
    }
}

const MIN_INPUT_SAMPLES: usize = 400; // one 25 ms analysis window at 16 kHz

/// Apply the configured augmentation chain. Output length may differ from the
/// input (speed/tempo); the result is deterministic for a fixed config.
pub fn augment(w: &Waveform, cfg: &AugmentationConfig) -> Result<Waveform> {
    cfg.validate()?;
    if w.samples.len() < MIN_INPUT_SAMPLES {
        return Err(Error::Audio(format!(
            "augment needs at least {MIN_INPUT_SAMPLES} samples, got {}",
            w.samples.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fs = w.sample_rate as f64;
    let mut samples = w.samples.clone();

    let applies = |rng: &mut ChaCha8Rng| -> bool {
        rng.random_range(0.0..1.0) < cfg.apply_probability
    };

    if let Some(r) = &cfg.pitch_shift {
        if applies(&mut rng) {
            let semitones = r.sample(&mut rng);
            samples = pitch_shift(&samples, fs, semitones);
        }
    }
    if let Some(r) = &cfg.speed_rate {
        if applies(&mut rng) {
            let rate = r.sample(&mut rng);
            samples = resample(&samples, rate);
        }
    }
    if let Some(r) = &cfg.tempo_rate {
        if applies(&mut rng) {
            let rate = r.sample(&mut rng);
            samples = time_stretch(&samples, fs, rate);
        }
    }
    if let Some(r) = &cfg.chorus_n {
        if applies(&mut rng) {
            let n = r.sample_count(&mut rng);
            samples = chorus(&samples, fs, n);
        }
    }
    if let Some(r) = &cfg.echo_n {
        if applies(&mut rng) {
            let n = r.sample_count(&mut rng);
            samples = echo(&samples, fs, n);
        }
    }
    if let Some(r) = &cfg.reverb {
        if applies(&mut rng) {
            let percent = r.sample(&mut rng);
            samples = reverb(&samples, fs, percent / 100.0);
        }
    }
    if let Some(r) = &cfg.low_pass_f {
        if applies(&mut rng) {
            let fc = r.sample(&mut rng).min(fs * 0.499);
            Biquad::lowpass(fs, fc, std::f64::consts::FRAC_1_SQRT_2).process_buffer(&mut samples);
        }
    }
    if let Some(r) = &cfg.high_pass_f {
        if applies(&mut rng) {
            let fc = r.sample(&mut rng).min(fs * 0.499);
            Biquad::highpass(fs, fc, std::f64::consts::FRAC_1_SQRT_2).process_buffer(&mut samples);
        }
    }
    if let (Some(f), Some(wd)) = (&cfg.band_pass_f, &cfg.band_pass_w) {
        if applies(&mut rng) {
            let fc = f.sample(&mut rng).min(fs * 0.499);
            let width = wd.sample(&mut rng);
            Biquad::bandpass(fs, fc, width).process_buffer(&mut samples);
        }
    }
    if let (Some(f), Some(wd)) = (&cfg.band_stop_f, &cfg.band_stop_w) {
        if applies(&mut rng) {
            let fc = f.sample(&mut rng).min(fs * 0.499);
            let width = wd.sample(&mut rng);
            Biquad::notch(fs, fc, width).process_buffer(&mut samples);
        }
    }
    if let Some(r) = &cfg.background_snr {
        if applies(&mut rng) {
            let snr_db = r.sample(&mut rng);
            add_background(&mut samples, snr_db, cfg.noise_path.as_deref(), &mut rng)?;
        }
    }

    if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
        return Err(Error::Audio(format!(
            "augmentation produced a non-finite sample at index {i}"
        )));
    }
    Ok(Waveform {
        samples,
        sample_rate: w.sample_rate,
    }
    .clamp_normalized())
}

/// Linear-interpolation resampling by `ratio`; pitch and duration both scale.
fn resample(x: &[f32], ratio: f64) -> Vec<f32> {
    if x.is_empty() {
        return Vec::new();
    }
    let n_out = ((x.len() as f64 - 1.0) / ratio).floor() as usize + 1;
    (0..n_out)
        .map(|i| {
            let pos = i as f64 * ratio;
            let i0 = pos.floor() as usize;
            let frac = (pos - i0 as f64) as f32;
            if i0 + 1 < x.len() {
                x[i0] * (1.0 - frac) + x[i0 + 1] * frac
            } else {
                x[x.len() - 1]
            }
        })
        .collect()
}

/// Waveform-similarity overlap-add time stretch; duration scales by 1/rate,
/// pitch unchanged.
fn time_stretch(x: &[f32], fs: f64, rate: f64) -> Vec<f32> {
    let w = (0.025 * fs) as usize; // 25 ms grains
    let hs = w / 2;
    if x.len() < w + hs {
        return x.to_vec();
    }
    let ha = hs as f64 * rate;
    let tol = (0.004 * fs) as isize; // +/- 4 ms search
    let hann: Vec<f32> = (0..w)
        .map(|i| (0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / w as f64).cos()) as f32)
        .collect();

    let steps = ((x.len() as f64 - (w + tol as usize) as f64) / ha).floor().max(0.0) as usize + 1;
    let out_len = (steps - 1) * hs + w;
    let mut out = vec![0.0f32; out_len];
    let mut norm = vec![0.0f32; out_len];
    let mut natural = 0usize; // where the previous grain would continue

    for k in 0..steps {
        let nominal = (k as f64 * ha) as isize;
        let offset = if k == 0 {
            0
        } else {
            let mut best = 0isize;
            let mut best_score = f64::NEG_INFINITY;
            for d in -tol..=tol {
                let a = nominal + d;
                if a < 0 || (a as usize + hs) > x.len() || natural + hs > x.len() {
                    continue;
                }
                let mut score = 0.0f64;
                for i in 0..hs {
                    score += x[a as usize + i] as f64 * x[natural + i] as f64;
                }
                if score > best_score {
                    best_score = score;
                    best = d;
                }
            }
            best
        };
        let a = (nominal + offset).max(0) as usize;
        if a + w > x.len() {
            break;
        }
        let s = k * hs;
        for i in 0..w {
            out[s + i] += x[a + i] * hann[i];
            norm[s + i] += hann[i];
        }
        natural = a + hs;
    }
    for (o, n) in out.iter_mut().zip(&norm) {
        if *n > 1e-6 {
            *o /= n;
        }
    }
    out
}

fn pitch_shift(x: &[f32], fs: f64, semitones: f64) -> Vec<f32> {
    if semitones == 0.0 {
        return x.to_vec();
    }
    let factor = 2f64.powf(semitones / 12.0);
    // Resample changes pitch and duration together; the stretch restores the
    // original duration.
    let shifted = resample(x, factor);
    time_stretch(&shifted, fs, 1.0 / factor)
}

/// Delay-line chorus: dry at 0.7, `n` LFO-modulated voices sharing 0.3 total.
fn chorus(x: &[f32], fs: f64, n: usize) -> Vec<f32> {
    if n == 0 {
        return x.to_vec();
    }
    let gain = 0.3 / n as f32;
    let mut out = x.iter().map(|&v| v * 0.7).collect::<Vec<f32>>();
    for v in 0..n {
        let base_s = (0.018 + 0.006 * v as f64) * fs;
        let depth_s = 0.0025 * fs;
        let rate_hz = 0.8 + 0.37 * v as f64;
        let phase = v as f64 * 1.3;
        for (i, o) in out.iter_mut().enumerate() {
            let lfo = (2.0 * std::f64::consts::PI * rate_hz * i as f64 / fs + phase).sin();
            let delay = base_s + depth_s * lfo;
            let pos = i as f64 - delay;
            if pos >= 0.0 {
                let i0 = pos.floor() as usize;
                let frac = (pos - i0 as f64) as f32;
                let tap = if i0 + 1 < x.len() {
                    x[i0] * (1.0 - frac) + x[i0 + 1] * frac
                } else {
                    0.0
                };
                *o += gain * tap;
            }
        }
    }
    out
}

/// `n` feedforward echo taps spaced 70 ms apart with gain 0.45^k.
fn echo(x: &[f32], fs: f64, n: usize) -> Vec<f32> {
    if n == 0 {
        return x.to_vec();
    }
    let delay = (0.070 * fs) as usize;
    let mut out = x.to_vec();
    for k in 1..=n {
        let g = 0.45f32.powi(k as i32);
        let d = k * delay;
        for i in d..x.len() {
            out[i] += g * x[i - d];
        }
    }
    out
}

/// Schroeder reverberator (4 parallel combs, 2 series all-passes) mixed at
/// `wet` in [0, 1].
fn reverb(x: &[f32], fs: f64, wet: f64) -> Vec<f32> {
    let comb_delays_ms = [29.7, 37.1, 41.1, 43.7];
    let comb_gains = [0.805f32, 0.827, 0.783, 0.764];
    let mut rev = vec![0.0f32; x.len()];
    for (&dms, &g) in comb_delays_ms.iter().zip(&comb_gains) {
        let d = ((dms / 1000.0) * fs) as usize;
        let mut buf = vec![0.0f32; x.len()];
        for i in 0..x.len() {
            let fb = if i >= d { buf[i - d] } else { 0.0 };
            buf[i] = x[i] + g * fb;
        }
        for i in 0..x.len() {
            rev[i] += 0.25 * buf[i];
        }
    }
    for dms in [5.0, 1.7] {
        let d = ((dms / 1000.0) * fs) as usize;
        let g = 0.7f32;
        let mut buf = vec![0.0f32; x.len()];
        for i in 0..x.len() {
            let delayed = if i >= d { buf[i - d] } else { 0.0 };
            buf[i] = rev[i] + g * delayed;
            rev[i] = -g * buf[i] + delayed + g * g * buf[i];
        }
    }
    let wet = wet as f32;
    x.iter()
        .zip(&rev)
        .map(|(&dry, &r)| (1.0 - wet) * dry + wet * r)
        .collect()
}

fn add_background(
    samples: &mut [f32],
    snr_db: f64,
    noise_path: Option<&std::path::Path>,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let sig_power: f64 = samples.iter().map(|&s| (s as f64).powi(2)).sum::<f64>()
        / samples.len().max(1) as f64;
    if sig_power == 0.0 {
        return Ok(());
    }
    let target_rms = sig_power.sqrt() * 10f64.powf(-snr_db / 20.0);

    let noise: Vec<f32> = match noise_path {
        Some(path) => {
            let masker = Waveform::read_wav(path)?;
            if masker.samples.is_empty() {
                return Err(Error::Audio(format!(
                    "noise file {} is empty",
                    path.display()
                )));
            }
            let offset = rng.random_range(0..masker.samples.len());
            (0..samples.len())
                .map(|i| masker.samples[(offset + i) % masker.samples.len()])
                .collect()
        }
        None => {
            let dist = rand_distr::Normal::new(0.0f64, 1.0).expect("valid normal");
            (0..samples.len())
                .map(|_| rand_distr::Distribution::sample(&dist, rng) as f32)
                .collect()
        }
    };
    let noise_rms = (noise.iter().map(|&s| (s as f64).powi(2)).sum::<f64>()
        / noise.len().max(1) as f64)
        .sqrt();
    if noise_rms == 0.0 {
        return Ok(());
    }
    let scale = (target_rms / noise_rms) as f32;
    for (s, n) in samples.iter_mut().zip(&noise) {
        *s += scale * n;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn white_noise(n: usize, rms: f32, seed: u64) -> Waveform {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = rand_distr::Normal::new(0.0f64, rms as f64).unwrap();
        Waveform::new(
            (0..n)
                .map(|_| rand_distr::Distribution::sample(&dist, &mut rng) as f32)
                .collect(),
            16000,
        )
        .unwrap()
    }

    #[test]
    fn quiet_level_is_identity() {
        let w = white_noise(16000, 0.1, 1);
        let cfg = AugmentationConfig::for_level(NoiseLevel::Quiet, 9);
        let out = augment(&w, &cfg).unwrap();
        assert_eq!(out.samples, w.samples);
    }

    #[test]
    fn zero_db_snr_doubles_power() {
        let w = white_noise(16000, 0.1, 2);
        let mut cfg = AugmentationConfig::for_level(NoiseLevel::Quiet, 3);
        cfg.level = NoiseLevel::Low;
        cfg.background_snr = Some(Range(0.0, 0.0));
        cfg.apply_probability = 1.0;
        let out = augment(&w, &cfg).unwrap();
        let p_in = w.rms().powi(2);
        let p_out = out.rms().powi(2);
        assert!(
            (p_out / p_in - 2.0).abs() < 0.05 * 2.0,
            "power ratio {} not within 5% of 2.0",
            p_out / p_in
        );
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let w = white_noise(16000, 0.1, 4);
        let cfg = AugmentationConfig::for_level(NoiseLevel::Mid, 11);
        let a = augment(&w, &cfg).unwrap();
        let b = augment(&w, &cfg).unwrap();
        assert_eq!(a.samples, b.samples);
        let c = augment(&w, &cfg.clone().with_seed(12)).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn degenerate_input_is_an_error() {
        let w = Waveform::new(vec![0.1; 100], 16000).unwrap();
        let cfg = AugmentationConfig::for_level(NoiseLevel::Low, 1);
        assert!(augment(&w, &cfg).is_err());
    }

    #[test]
    fn output_stays_finite_and_clamped() {
        let w = white_noise(8000, 0.4, 5);
        for level in [NoiseLevel::Low, NoiseLevel::Mid, NoiseLevel::High] {
            for seed in 0..20 {
                let cfg = AugmentationConfig::for_level(level, seed);
                let out = augment(&w, &cfg).unwrap();
                assert!(out.samples.iter().all(|s| s.is_finite() && s.abs() <= 1.0));
            }
        }
    }

    #[test]
    fn snr_vs_clean_decreases_with_level() {
        // Expected SNR against the clean reference is monotone non-increasing
        // low -> mid -> high over a fixed population of seeded draws.
        let w = white_noise(8000, 0.1, 6);
        let mean_snr = |level: NoiseLevel| -> f64 {
            let mut total = 0.0;
            let draws = 120;
            for seed in 0..draws {
                let cfg = AugmentationConfig::for_level(level, seed);
                let out = augment(&w, &cfg).unwrap();
                let n = w.samples.len().min(out.samples.len());
                let sig: f64 = w.samples[..n].iter().map(|&s| (s as f64).powi(2)).sum();
                let err: f64 = w.samples[..n]
                    .iter()
                    .zip(&out.samples[..n])
                    .map(|(&a, &b)| ((a - b) as f64).powi(2))
                    .sum();
                total += 10.0 * (sig / err.max(1e-12)).log10();
            }
            total / draws as f64
        };
        let low = mean_snr(NoiseLevel::Low);
        let mid = mean_snr(NoiseLevel::Mid);
        let high = mean_snr(NoiseLevel::High);
        assert!(low >= mid && mid >= high, "low {low}, mid {mid}, high {high}");
    }

    #[test]
    fn pitch_shift_moves_tone_frequency() {
        let fs = 16000.0;
        let n = 16000;
        let tone: Vec<f32> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 440.0 * i as f64 / fs).sin() as f32 * 0.5)
            .collect();
        let shifted = pitch_shift(&tone, fs, 12.0);
        // Count zero crossings as a cheap frequency estimate.
        let crossings = |x: &[f32]| {
            x.windows(2)
                .filter(|p| (p[0] >= 0.0) != (p[1] >= 0.0))
                .count() as f64
        };
        let f_in = crossings(&tone) / 2.0 / (tone.len() as f64 / fs);
        let f_out = crossings(&shifted) / 2.0 / (shifted.len() as f64 / fs);
        assert!((f_out / f_in - 2.0).abs() < 0.1, "ratio {}", f_out / f_in);
        // Duration approximately preserved.
        assert!((shifted.len() as f64 / tone.len() as f64 - 1.0).abs() < 0.1);
    }

    #[test]
    fn tempo_changes_duration_not_pitch() {
        let fs = 16000.0;
        let tone: Vec<f32> = (0..16000)
            .map(|i| (2.0 * std::f64::consts::PI * 440.0 * i as f64 / fs).sin() as f32 * 0.5)
            .collect();
        let fast = time_stretch(&tone, fs, 1.5);
        assert!((fast.len() as f64 / (tone.len() as f64 / 1.5) - 1.0).abs() < 0.1);
        let crossings = |x: &[f32]| {
            x.windows(2)
                .filter(|p| (p[0] >= 0.0) != (p[1] >= 0.0))
                .count() as f64
        };
        let f_fast = crossings(&fast) / 2.0 / (fast.len() as f64 / fs);
        assert!((f_fast - 440.0).abs() < 25.0, "pitch drifted to {f_fast}");
    }
}
