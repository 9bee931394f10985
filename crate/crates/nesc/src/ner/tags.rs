//! The 11-label IOB tag set over five entity types.

use crate::error::{Error, Result};

/// Entity types covered by the tagger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityType {
    Person,
    Place,
    Product,
    Organization,
    Other,
}

pub const ENTITY_TYPES: [EntityType; 5] = [
    EntityType::Person,
    EntityType::Place,
    EntityType::Product,
    EntityType::Organization,
    EntityType::Other,
];

impl EntityType {
    pub fn name(self) -> &'static str {
        match self {
            EntityType::Person => "Person",
            EntityType::Place => "Place",
            EntityType::Product => "Product",
            EntityType::Organization => "Organization",
            EntityType::Other => "Other",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        ENTITY_TYPES
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Data(format!("unknown entity type {s:?}")))
    }
}

/// One of the 11 per-token labels: `O`, or `B-`/`I-` for each entity type.
/// Index 0 is `O` and the B/I pair of each type is adjacent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Outside,
    Begin(EntityType),
    Inside(EntityType),
}

/// Number of real labels.
pub const NUM_LABELS: usize = 11;
/// Virtual CRF state index for the start of a sentence.
pub const START: usize = NUM_LABELS;
/// Virtual CRF state index for the end of a sentence.
pub const END: usize = NUM_LABELS + 1;
/// Side of the CRF transition matrix (labels + START + END).
pub const NUM_STATES: usize = NUM_LABELS + 2;

impl Label {
    pub fn index(self) -> usize {
        match self {
            Label::Outside => 0,
            Label::Begin(t) => 1 + 2 * type_index(t),
            Label::Inside(t) => 2 + 2 * type_index(t),
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        if i >= NUM_LABELS {
            return Err(Error::Usage(format!("label index {i} out of range")));
        }
        Ok(ALL_LABELS[i])
    }

    /// Entity type for B/I labels, none for `O`.
    pub fn entity_type(self) -> Option<EntityType> {
        match self {
            Label::Outside => None,
            Label::Begin(t) | Label::Inside(t) => Some(t),
        }
    }

    /// Canonical form used in corpus files: `O`, `B-Person`, `I-Place`, ...
    pub fn tag(self) -> String {
        match self {
            Label::Outside => "O".to_string(),
            Label::Begin(t) => format!("B-{}", t.name()),
            Label::Inside(t) => format!("I-{}", t.name()),
        }
    }

    /// Descriptive form for report output.
    pub fn display_name(self) -> String {
        match self {
            Label::Outside => "O-not-an-entity".to_string(),
            other => other.tag(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "O" || s == "O-not-an-entity" {
            return Ok(Label::Outside);
        }
        if let Some(t) = s.strip_prefix("B-") {
            return Ok(Label::Begin(EntityType::parse(t)?));
        }
        if let Some(t) = s.strip_prefix("I-") {
            return Ok(Label::Inside(EntityType::parse(t)?));
        }
        Err(Error::Data(format!("unknown label {s:?}")))
    }
}

fn type_index(t: EntityType) -> usize {
    ENTITY_TYPES.iter().position(|&x| x == t).expect("known type")
}

/// All labels in index order.
pub const ALL_LABELS: [Label; NUM_LABELS] = [
    Label::Outside,
    Label::Begin(EntityType::Person),
    Label::Inside(EntityType::Person),
    Label::Begin(EntityType::Place),
    Label::Inside(EntityType::Place),
    Label::Begin(EntityType::Product),
    Label::Inside(EntityType::Product),
    Label::Begin(EntityType::Organization),
    Label::Inside(EntityType::Organization),
    Label::Begin(EntityType::Other),
    Label::Inside(EntityType::Other),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_labels_outside_first() {
        assert_eq!(NUM_LABELS, 11);
        assert_eq!(ALL_LABELS[0], Label::Outside);
        for (i, l) in ALL_LABELS.iter().enumerate() {
            assert_eq!(l.index(), i);
        }
    }

    #[test]
    fn begin_inside_pairs_are_adjacent() {
        for t in ENTITY_TYPES {
            assert_eq!(Label::Inside(t).index(), Label::Begin(t).index() + 1);
        }
    }

    #[test]
    fn tags_round_trip() {
        for l in ALL_LABELS {
            assert_eq!(Label::parse(&l.tag()).unwrap(), l);
        }
        assert_eq!(Label::parse("O-not-an-entity").unwrap(), Label::Outside);
    }

    #[test]
    fn bad_labels_are_data_errors() {
        assert!(matches!(Label::parse("B-Widget"), Err(Error::Data(_))));
        assert!(matches!(Label::parse("Q-Person"), Err(Error::Data(_))));
    }
}
