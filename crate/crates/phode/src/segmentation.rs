//! Ground-truth segmentation data model and corpus ingestion.
//!
//! Segmentation files are UTF-8 CSV with a required header, one row per
//! phoneme: `phoneme,onset_ms,offset_ms,word_index`. A sentence manifest is a
//! CSV of `sentence_id,wav_path,seg_path`.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phoneme::{Phoneme, PhonemeClass, Token};

/// One spoken phoneme with its ground-truth timing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhonemeSegment {
    pub phoneme: Phoneme,
    pub onset_ms: f64,
    pub offset_ms: f64,
    pub word_index: usize,
}

impl PhonemeSegment {
    pub fn duration_ms(&self) -> f64 {
        self.offset_ms - self.onset_ms
    }
}

/// A word of the sentence: orthography (may be empty when the segmentation
/// format carries none) plus how many phonemes it spans.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Word {
    pub text: String,
    pub phoneme_count: usize,
}

/// Ground-truth container for one sentence: waveform reference, time-ordered
/// phoneme segments, and word grouping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentedUtterance {
    pub sentence_id: String,
    pub waveform_path: PathBuf,
    pub segments: Vec<PhonemeSegment>,
    pub words: Vec<Word>,
}

impl SegmentedUtterance {
    /// Build from segments, deriving the word list from `word_index` runs.
    pub fn from_segments(
        sentence_id: impl Into<String>,
        segments: Vec<PhonemeSegment>,
    ) -> Result<Self> {
        let words = derive_words(&segments);
        let utt = SegmentedUtterance {
            sentence_id: sentence_id.into(),
            waveform_path: PathBuf::new(),
            segments,
            words,
        };
        utt.validate()?;
        Ok(utt)
    }

    /// Check all structural invariants.
    pub fn validate(&self) -> Result<()> {
        for (i, seg) in self.segments.iter().enumerate() {
            if !(seg.onset_ms.is_finite() && seg.offset_ms.is_finite()) {
                return Err(Error::Validation(format!(
                    "{}: segment {i} has non-finite times",
                    self.sentence_id
                )));
            }
            if seg.onset_ms >= seg.offset_ms {
                return Err(Error::Validation(format!(
                    "{}: segment {i} ({}) has onset {} >= offset {}",
                    self.sentence_id, seg.phoneme, seg.onset_ms, seg.offset_ms
                )));
            }
        }
        for (i, pair) in self.segments.windows(2).enumerate() {
            if pair[1].onset_ms < pair[0].offset_ms {
                return Err(Error::Validation(format!(
                    "{}: segments {i} and {} overlap ({} < {})",
                    self.sentence_id,
                    i + 1,
                    pair[1].onset_ms,
                    pair[0].offset_ms
                )));
            }
            if pair[1].word_index < pair[0].word_index {
                return Err(Error::Validation(format!(
                    "{}: word_index decreases at segment {}",
                    self.sentence_id,
                    i + 1
                )));
            }
        }
        let total: usize = self.words.iter().map(|w| w.phoneme_count).sum();
        if total != self.segments.len() {
            return Err(Error::Validation(format!(
                "{}: word phoneme counts sum to {total}, but there are {} segments",
                self.sentence_id,
                self.segments.len()
            )));
        }
        Ok(())
    }

    /// Spoken phoneme sequence without spaces (the alignment target).
    pub fn phonemes(&self) -> Vec<Phoneme> {
        self.segments.iter().map(|s| s.phoneme).collect()
    }

    /// Token sequence with a space token at each word boundary (the CTC
    /// training target).
    pub fn tokens_with_spaces(&self) -> Vec<Token> {
        let mut tokens = Vec::with_capacity(self.segments.len() + self.words.len());
        let mut prev_word = None;
        for seg in &self.segments {
            if let Some(w) = prev_word {
                if seg.word_index != w {
                    tokens.push(Token::Space);
                }
            }
            tokens.push(Token::Phoneme(seg.phoneme));
            prev_word = Some(seg.word_index);
        }
        tokens
    }
}

fn derive_words(segments: &[PhonemeSegment]) -> Vec<Word> {
    let mut words: Vec<Word> = Vec::new();
    let mut prev: Option<usize> = None;
    for seg in segments {
        match prev {
            Some(w) if w == seg.word_index => {
                words.last_mut().expect("word run started").phoneme_count += 1;
            }
            _ => words.push(Word {
                text: String::new(),
                phoneme_count: 1,
            }),
        }
        prev = Some(seg.word_index);
    }
    words
}

/// Load a segmentation CSV. The sentence id is the file stem; the waveform
/// path is left empty (the manifest supplies it).
pub fn load_segmentation(path: impl AsRef<Path>) -> Result<SegmentedUtterance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let sentence_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();

    let mut segments = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        None => {
            // Empty file: empty utterance with zero segments and zero words.
            return SegmentedUtterance::from_segments(sentence_id, segments);
        }
        Some((_, header)) => {
            let fields: Vec<&str> = header.split(',').map(str::trim).collect();
            if fields != ["phoneme", "onset_ms", "offset_ms", "word_index"] {
                return Err(Error::parse(
                    path,
                    1,
                    format!("expected header 'phoneme,onset_ms,offset_ms,word_index', got '{header}'"),
                ));
            }
        }
    }
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        let phoneme = Phoneme::from_symbol(fields[0])
            .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        let onset_ms: f64 = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("bad onset '{}'", fields[1])))?;
        let offset_ms: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("bad offset '{}'", fields[2])))?;
        let word_index: usize = fields[3]
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("bad word_index '{}'", fields[3])))?;
        segments.push(PhonemeSegment {
            phoneme,
            onset_ms,
            offset_ms,
            word_index,
        });
    }
    SegmentedUtterance::from_segments(sentence_id, segments)
}

/// Serialize back to the canonical 4-column CSV; `load_segmentation` of the
/// output round-trips valid inputs bit-exactly.
pub fn save_segmentation(utt: &SegmentedUtterance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("phoneme,onset_ms,offset_ms,word_index\n");
    for seg in &utt.segments {
        out.push_str(&format!(
            "{},{},{},{}\n",
            seg.phoneme, seg.onset_ms, seg.offset_ms, seg.word_index
        ));
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// One row of a sentence manifest.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub sentence_id: String,
    pub wav_path: PathBuf,
    pub seg_path: PathBuf,
}

/// Load a manifest CSV of `sentence_id,wav_path,seg_path` (header required).
/// Relative paths are resolved against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields != ["sentence_id", "wav_path", "seg_path"] {
                return Err(Error::parse(
                    path,
                    1,
                    format!("expected header 'sentence_id,wav_path,seg_path', got '{line}'"),
                ));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected 3 fields, got {}", fields.len()),
            ));
        }
        let resolve = |p: &str| {
            let pb = PathBuf::from(p);
            if pb.is_absolute() {
                pb
            } else {
                base.join(pb)
            }
        };
        entries.push(ManifestEntry {
            sentence_id: fields[0].to_owned(),
            wav_path: resolve(fields[1]),
            seg_path: resolve(fields[2]),
        });
    }
    Ok(entries)
}

/// Mean segment duration per phoneme class over a corpus, used by the
/// reaction-time adjustment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMeanDurations {
    pub vowel_ms: f64,
    pub consonant_ms: f64,
}

impl ClassMeanDurations {
    pub fn from_corpus<'a>(utterances: impl IntoIterator<Item = &'a SegmentedUtterance>) -> Self {
        let mut sums = [0.0f64; 2];
        let mut counts = [0usize; 2];
        for utt in utterances {
            for seg in &utt.segments {
                let k = match seg.phoneme.class() {
                    PhonemeClass::Vowel => 0,
                    PhonemeClass::Consonant => 1,
                };
                sums[k] += seg.duration_ms();
                counts[k] += 1;
            }
        }
        let mean = |k: usize| if counts[k] > 0 { sums[k] / counts[k] as f64 } else { 0.0 };
        ClassMeanDurations {
            vowel_ms: mean(0),
            consonant_ms: mean(1),
        }
    }

    pub fn for_class(&self, class: PhonemeClass) -> f64 {
        match class {
            PhonemeClass::Vowel => self.vowel_ms,
            PhonemeClass::Consonant => self.consonant_ms,
        }
    }
}
