//! Simulation-and-analysis toolkit for phoneme recognition under normal-hearing
//! and cochlear-implant-like input conditions.
//!
//! The crate covers the full experimental loop:
//!
//! - [`phoneme`] / [`segmentation`]: the 39-phoneme ARPAbet inventory, token ids,
//!   and ground-truth segmentation ingestion.
//! - [`audio`]: WAV ingestion, leveled augmentation (noise, pitch, stretch,
//!   delay effects, filters), and the 64-channel log-mel spectrogram the
//!   recognizer consumes.
//! - [`vocoder`]: a generic CIS-style encoder (waveform -> electrodogram),
//!   exponential current spread, and noise-band resynthesis, so the same
//!   spectrogram path can produce the CI version of every input.
//! - [`model`]: the causal 5-layer LSTM recognizer with per-layer batch norm,
//!   CTC loss/gradient, greedy decoding, activation capture, and a toy-scale
//!   Adam training loop.
//! - [`align`]: Levenshtein alignment of spoken vs. predicted phonemes, the
//!   temporal-ordering correction, sentence exclusion, and utterance windows.
//! - [`analysis`]: confusion matrices, human-comparison similarity metrics with
//!   shuffle significance, the word-level error taxonomy, and reaction times.
//! - [`dynamics`]: bigram context labeling, window interpolation, PCA spaces,
//!   distance curves with t_peak/latency/amplitude, and per-layer decodability.
//! - [`pipeline`]: end-to-end orchestration with deterministic seeding and
//!   staged artifact files.

pub mod align;
pub mod analysis;
pub mod audio;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod phoneme;
pub mod pipeline;
pub mod rng;
pub mod segmentation;
pub mod toy;
pub mod vocoder;

pub use error::{Error, Result};
pub use phoneme::{Phoneme, PhonemeClass, Token, BLANK_ID, PHONEME_COUNT, SPACE_ID, TOKEN_COUNT};

/// Crate version string recorded in ledgers and report provenance blocks.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
