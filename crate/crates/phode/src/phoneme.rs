//! The fixed 39-phoneme ARPAbet inventory and the 41-token id space.
//!
//! Token ids are frozen so weight files and confusion matrices stay portable:
//! blank = 0, phonemes 1..=39 in alphabetical ARPAbet order, space = 40.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of phonemes in the inventory.
pub const PHONEME_COUNT: usize = 39;
/// Number of token ids (39 phonemes + blank + space).
pub const TOKEN_COUNT: usize = 41;
/// Token id of the CTC blank.
pub const BLANK_ID: usize = 0;
/// Token id of the word-boundary space.
pub const SPACE_ID: usize = 40;

/// ARPAbet symbols in alphabetical order; index i maps to token id i + 1.
const SYMBOLS: [&str; PHONEME_COUNT] = [
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH", "EH", "ER", "EY", "F", "G", "HH",
    "IH", "IY", "JH", "K", "L", "M", "N", "NG", "OW", "OY", "P", "R", "S", "SH", "T", "TH", "UH",
    "UW", "V", "W", "Y", "Z", "ZH",
];

/// Standard ARPAbet vowel/consonant split: true marks a vowel (15 of 39).
const IS_VOWEL: [bool; PHONEME_COUNT] = [
    true, true, true, true, true, true, // AA AE AH AO AW AY
    false, false, false, false, // B CH D DH
    true, true, true, // EH ER EY
    false, false, false, // F G HH
    true, true,  // IH IY
    false, false, false, false, false, false, // JH K L M N NG
    true, true,  // OW OY
    false, false, false, false, false, false, // P R S SH T TH
    true, true,  // UH UW
    false, false, false, false, false, // V W Y Z ZH
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhonemeClass {
    Vowel,
    Consonant,
}

/// One of the 39 English phonemes, stored as its inventory index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Phoneme(u8);

impl Phoneme {
    /// Look up a phoneme by its ARPAbet symbol (stress-stripped, upper case).
    pub fn from_symbol(symbol: &str) -> Result<Self> {
        SYMBOLS
            .iter()
            .position(|s| *s == symbol)
            .map(|i| Phoneme(i as u8))
            .ok_or_else(|| Error::Validation(format!("unknown phoneme symbol '{symbol}'")))
    }

    /// Construct from the 0-based inventory index.
    pub fn from_index(index: usize) -> Result<Self> {
        if index < PHONEME_COUNT {
            Ok(Phoneme(index as u8))
        } else {
            Err(Error::Validation(format!(
                "phoneme index {index} out of range 0..{PHONEME_COUNT}"
            )))
        }
    }

    pub fn symbol(self) -> &'static str {
        SYMBOLS[self.0 as usize]
    }

    /// 0-based index into the alphabetical inventory.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Deterministic vowel/consonant label from the fixed table.
    pub fn class(self) -> PhonemeClass {
        if IS_VOWEL[self.0 as usize] {
            PhonemeClass::Vowel
        } else {
            PhonemeClass::Consonant
        }
    }

    /// All 39 phonemes in token-id order.
    pub fn inventory() -> impl Iterator<Item = Phoneme> {
        (0..PHONEME_COUNT).map(|i| Phoneme(i as u8))
    }
}

impl std::fmt::Debug for Phoneme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl std::fmt::Display for Phoneme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl TryFrom<String> for Phoneme {
    type Error = Error;
    fn try_from(value: String) -> Result<Self> {
        Phoneme::from_symbol(&value)
    }
}

impl From<Phoneme> for String {
    fn from(p: Phoneme) -> String {
        p.symbol().to_owned()
    }
}

/// One of the 41 output tokens of the recognizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Token {
    Blank,
    Phoneme(Phoneme),
    Space,
}

impl Token {
    /// The frozen token id: blank 0, phonemes 1..=39, space 40.
    pub fn id(self) -> usize {
        match self {
            Token::Blank => BLANK_ID,
            Token::Phoneme(p) => p.index() + 1,
            Token::Space => SPACE_ID,
        }
    }

    pub fn from_id(id: usize) -> Result<Token> {
        match id {
            BLANK_ID => Ok(Token::Blank),
            SPACE_ID => Ok(Token::Space),
            _ if (1..=PHONEME_COUNT).contains(&id) => {
                Ok(Token::Phoneme(Phoneme::from_index(id - 1)?))
            }
            _ => Err(Error::Validation(format!(
                "token id {id} out of range 0..{TOKEN_COUNT}"
            ))),
        }
    }

    pub fn phoneme(self) -> Option<Phoneme> {
        match self {
            Token::Phoneme(p) => Some(p),
            _ => None,
        }
    }

    /// Symbol used in reports: phoneme symbols, `<b>` for blank, `<sp>` for space.
    pub fn symbol(self) -> &'static str {
        match self {
            Token::Blank => "<b>",
            Token::Space => "<sp>",
            Token::Phoneme(p) => p.symbol(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn inventory_is_39_symbols_in_sorted_order() {
        let symbols: Vec<&str> = Phoneme::inventory().map(|p| p.symbol()).collect();
        assert_eq!(symbols.len(), 39);
        let mut sorted = symbols.clone();
        sorted.sort_unstable();
        assert_eq!(symbols, sorted);
        assert_eq!(symbols.iter().collect::<HashSet<_>>().len(), 39);
    }

    #[test]
    fn classes_partition_the_inventory() {
        let vowels = Phoneme::inventory()
            .filter(|p| p.class() == PhonemeClass::Vowel)
            .count();
        let consonants = Phoneme::inventory()
            .filter(|p| p.class() == PhonemeClass::Consonant)
            .count();
        assert_eq!(vowels, 15);
        assert_eq!(consonants, 24);
        assert_eq!(vowels + consonants, PHONEME_COUNT);
    }

    #[test]
    fn classify_known_examples() {
        assert_eq!(
            Phoneme::from_symbol("AH").unwrap().class(),
            PhonemeClass::Vowel
        );
        assert_eq!(
            Phoneme::from_symbol("K").unwrap().class(),
            PhonemeClass::Consonant
        );
        assert_eq!(
            Phoneme::from_symbol("NG").unwrap().class(),
            PhonemeClass::Consonant
        );
    }

    #[test]
    fn token_id_map_is_a_bijection_over_41_ids() {
        let mut seen = HashSet::new();
        for id in 0..TOKEN_COUNT {
            let token = Token::from_id(id).unwrap();
            assert_eq!(token.id(), id);
            assert!(seen.insert(token));
        }
        assert_eq!(seen.len(), TOKEN_COUNT);
        assert!(Token::from_id(TOKEN_COUNT).is_err());
        assert_ne!(Token::Blank.id(), Token::Space.id());
    }

    #[test]
    fn unknown_symbol_is_rejected() {
        assert!(Phoneme::from_symbol("QQ").is_err());
        assert!(Phoneme::from_symbol("ah").is_err());
    }
}
