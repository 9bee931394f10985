//! The 17-tag universal part-of-speech inventory.

use crate::error::{Error, Result};

/// Scale used for every sparse indicator so it sits in the same range as
/// the dense embedding values.
pub const INDICATOR: f64 = 0.1;

/// Universal POS tags, 17 in total. `X` doubles as the reserved tag for
/// corpora that ship without POS annotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum PosTag {
    ADJ,
    ADP,
    ADV,
    AUX,
    CCONJ,
    DET,
    INTJ,
    NOUN,
    NUM,
    PART,
    PRON,
    PROPN,
    PUNCT,
    SCONJ,
    SYM,
    VERB,
    X,
}

pub const POS_TAGS: [PosTag; 17] = [
    PosTag::ADJ,
    PosTag::ADP,
    PosTag::ADV,
    PosTag::AUX,
    PosTag::CCONJ,
    PosTag::DET,
    PosTag::INTJ,
    PosTag::NOUN,
    PosTag::NUM,
    PosTag::PART,
    PosTag::PRON,
    PosTag::PROPN,
    PosTag::PUNCT,
    PosTag::SCONJ,
    PosTag::SYM,
    PosTag::VERB,
    PosTag::X,
];

/// Width of the POS one-hot block.
pub const POS_DIM: usize = 17;

impl PosTag {
    pub fn index(self) -> usize {
        POS_TAGS.iter().position(|&t| t == self).expect("tag in inventory")
    }

    pub fn name(self) -> &'static str {
        match self {
            PosTag::ADJ => "ADJ",
            PosTag::ADP => "ADP",
            PosTag::ADV => "ADV",
            PosTag::AUX => "AUX",
            PosTag::CCONJ => "CCONJ",
            PosTag::DET => "DET",
            PosTag::INTJ => "INTJ",
            PosTag::NOUN => "NOUN",
            PosTag::NUM => "NUM",
            PosTag::PART => "PART",
            PosTag::PRON => "PRON",
            PosTag::PROPN => "PROPN",
            PosTag::PUNCT => "PUNCT",
            PosTag::SCONJ => "SCONJ",
            PosTag::SYM => "SYM",
            PosTag::VERB => "VERB",
            PosTag::X => "X",
        }
    }

    /// Parses a tag name; the inventory is closed.
    pub fn parse(s: &str) -> Result<Self> {
        POS_TAGS
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Data(format!("unknown POS tag {s:?}")))
    }
}

/// One-hot vector over the 17 tags, nonzero entry 0.1.
pub fn pos_one_hot(tag: PosTag) -> [f64; POS_DIM] {
    let mut v = [0.0; POS_DIM];
    v[tag.index()] = INDICATOR;
    v
}
