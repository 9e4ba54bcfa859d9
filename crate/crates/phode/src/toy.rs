//! Seeded synthetic speech for desk-scale experiments.
//!
//! Full-corpus training is out of reach here, so end-to-end behavior is
//! exercised on a five-phoneme toy language whose sounds are chosen to be
//! separable on the 64-channel spectrogram while two of them (AA at 500 Hz,
//! IY at 560 Hz) share a single vocoder band and therefore collapse under CI
//! processing.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::audio::{Biquad, Waveform, SPEC_SAMPLE_RATE};
use crate::phoneme::{Phoneme, PhonemeClass};
use crate::rng::derive_rng;
use crate::segmentation::{PhonemeSegment, SegmentedUtterance};
use crate::vocoder::FilterbankSpec;

/// The five toy phonemes: two vowels and three consonants.
pub fn toy_phonemes() -> Vec<Phoneme> {
    ["AA", "IY", "M", "S", "K"]
        .iter()
        .map(|s| Phoneme::from_symbol(s).expect("fixed inventory"))
        .collect()
}

/// Shape of generated sentences.
#[derive(Clone, Copy, Debug)]
pub struct ToyGenerator {
    pub min_words: usize,
    pub max_words: usize,
    pub min_word_len: usize,
    pub max_word_len: usize,
    pub amplitude: f32,
}

impl Default for ToyGenerator {
    fn default() -> Self {
        ToyGenerator {
            min_words: 1,
            max_words: 2,
            min_word_len: 1,
            max_word_len: 3,
            amplitude: 0.35,
        }
    }
}

impl ToyGenerator {
    /// Two-phoneme single-word sentences, the smallest learnable task.
    pub fn two_phoneme() -> Self {
        ToyGenerator {
            min_words: 1,
            max_words: 1,
            min_word_len: 2,
            max_word_len: 2,
            ..ToyGenerator::default()
        }
    }

    /// Synthesize one utterance with its ground-truth segmentation. The same
    /// (master seed, sentence id) always reproduces the same audio.
    pub fn generate(&self, sentence_id: &str, master_seed: u64) -> (Waveform, SegmentedUtterance) {
        let mut rng = derive_rng(master_seed, "toy-utterance", sentence_id);
        let phonemes = toy_phonemes();
        let fs = SPEC_SAMPLE_RATE as f64;

        let n_words = rng.random_range(self.min_words..=self.max_words);
        let mut plan: Vec<(Phoneme, usize)> = Vec::new(); // (phoneme, word index)
        for w in 0..n_words {
            // Bias toward tri-phoneme words so the word-error taxonomy has data.
            let len = if self.max_word_len >= 3 && rng.random_range(0.0..1.0) < 0.5 {
                3
            } else {
                rng.random_range(self.min_word_len..=self.max_word_len)
            };
            for _ in 0..len {
                let p = phonemes[rng.random_range(0..phonemes.len())];
                plan.push((p, w));
            }
        }

        let lead_in = (0.060 * fs) as usize;
        let mut samples = vec![0.0f32; lead_in];
        let mut segments = Vec::with_capacity(plan.len());
        let mut prev_word = 0usize;
        for (phoneme, word) in plan {
            if !segments.is_empty() {
                let gap_s = if word != prev_word {
                    rng.random_range(0.040..0.070)
                } else {
                    rng.random_range(0.010..0.030)
                };
                samples.extend(std::iter::repeat(0.0).take((gap_s * fs) as usize));
            }
            let dur_s = match phoneme.class() {
                PhonemeClass::Vowel => rng.random_range(0.120..0.160),
                PhonemeClass::Consonant => rng.random_range(0.080..0.120),
            };
            let n = (dur_s * fs) as usize;
            let onset = samples.len();
            let gain = self.amplitude * rng.random_range(0.85..1.15);
            samples.extend(render_phoneme(phoneme, n, gain, &mut rng));
            segments.push(PhonemeSegment {
                phoneme,
                onset_ms: onset as f64 / fs * 1000.0,
                offset_ms: samples.len() as f64 / fs * 1000.0,
                word_index: word,
            });
            prev_word = word;
        }
        samples.extend(std::iter::repeat(0.0).take((0.120 * fs) as usize));

        let waveform = Waveform {
            samples,
            sample_rate: SPEC_SAMPLE_RATE,
        };
        let utterance = SegmentedUtterance::from_segments(sentence_id, segments)
            .expect("generated segments are ordered and non-overlapping");
        (waveform, utterance)
    }

    /// Generate `count` utterances with ids `{prefix}{index:04}`.
    pub fn corpus(
        &self,
        count: usize,
        master_seed: u64,
        prefix: &str,
    ) -> Vec<(Waveform, SegmentedUtterance)> {
        (0..count)
            .map(|i| self.generate(&format!("{prefix}{i:04}"), master_seed))
            .collect()
    }
}

fn render_phoneme(phoneme: Phoneme, n: usize, gain: f32, rng: &mut ChaCha8Rng) -> Vec<f32> {
    let fs = SPEC_SAMPLE_RATE as f64;
    let hann = |i: usize| {
        (0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()) as f32
    };
    let tones = |parts: &[(f64, f64)]| -> Vec<f32> {
        (0..n)
            .map(|i| {
                let t = i as f64 / fs;
                let v: f64 = parts
                    .iter()
                    .map(|&(f, a)| a * (2.0 * std::f64::consts::PI * f * t).sin())
                    .sum();
                gain * hann(i) * v as f32
            })
            .collect()
    };
    match phoneme.symbol() {
        "AA" => tones(&[(500.0, 0.9), (1000.0, 0.35)]),
        "IY" => tones(&[(560.0, 0.9), (1120.0, 0.35)]),
        "M" => tones(&[(330.0, 0.9), (660.0, 0.45)]),
        "K" => tones(&[(2300.0, 0.8), (3600.0, 0.3)]),
        "S" => {
            let mut bp = Biquad::bandpass(fs, 5200.0, 1.0);
            let mut noise: Vec<f32> =
                (0..n).map(|_| rng.random_range(-1.0f32..1.0) * 2.0).collect();
            bp.process_buffer(&mut noise);
            noise
                .iter()
                .enumerate()
                .map(|(i, &v)| gain * hann(i) * v)
                .collect()
        }
        other => panic!("phoneme {other} is not part of the toy language"),
    }
}

/// Broadband speech-like fixture: an amplitude-modulated tone at the center
/// of each of the 16 default vocoder bands plus a faint noise floor. Every
/// band carries strong syllable-rate modulation, which is what the envelope
/// fidelity checks need.
pub fn speech_like(duration_s: f64, seed: u64) -> Waveform {
    let fs = SPEC_SAMPLE_RATE as f64;
    let n = (duration_s * fs) as usize;
    let fb = FilterbankSpec::default();
    let mut rng = derive_rng(seed, "speech-like", "fixture");
    let mut out = vec![0.0f32; n];
    for c in 0..16 {
        let f = fb.center_hz(c);
        let am_rate = rng.random_range(1.5..3.0);
        let am_phase = rng.random_range(0.0..std::f64::consts::TAU);
        let tone_phase = rng.random_range(0.0..std::f64::consts::TAU);
        for (i, o) in out.iter_mut().enumerate() {
            let t = i as f64 / fs;
            let s = (std::f64::consts::TAU * am_rate * t + am_phase).sin();
            let gate = 1.0 / (1.0 + (-8.0 * s).exp());
            *o += (gate * (std::f64::consts::TAU * f * t + tone_phase).sin() / 16.0) as f32;
        }
    }
    for o in out.iter_mut() {
        *o += rng.random_range(-1.0f32..1.0) * 0.003;
    }
    let peak = out.iter().fold(0.0f32, |m, &v| m.max(v.abs())).max(1e-9);
    for o in out.iter_mut() {
        *o *= 0.5 / peak;
    }
    Waveform {
        samples: out,
        sample_rate: SPEC_SAMPLE_RATE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let g = ToyGenerator::default();
        let (w1, u1) = g.generate("s0001", 42);
        let (w2, u2) = g.generate("s0001", 42);
        assert_eq!(w1.samples, w2.samples);
        assert_eq!(u1.segments, u2.segments);
        let (w3, _) = g.generate("s0002", 42);
        assert_ne!(w1.samples, w3.samples);
    }

    #[test]
    fn segments_match_audio_extent() {
        let (w, u) = ToyGenerator::default().generate("s1", 7);
        u.validate().unwrap();
        assert!(!u.segments.is_empty());
        let last_offset_s = u.segments.last().unwrap().offset_ms / 1000.0;
        assert!(last_offset_s < w.duration_s());
    }

    #[test]
    fn two_phoneme_generator_emits_two_segments() {
        for i in 0..10 {
            let (_, u) = ToyGenerator::two_phoneme().generate(&format!("s{i}"), 3);
            assert_eq!(u.segments.len(), 2);
            assert_eq!(u.words.len(), 1);
        }
    }

    #[test]
    fn speech_like_is_bounded_and_deterministic() {
        let a = speech_like(1.0, 5);
        let b = speech_like(1.0, 5);
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.samples.len(), 16000);
        assert!(a.peak() <= 0.5 + 1e-6);
    }
}
