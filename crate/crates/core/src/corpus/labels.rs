//! The two-tier annotation label sets and the collapse onto the
//! three-way classification target.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tier-1 annotation label. The set is closed: any other string in a
/// Tier-1 interval is a validation error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AggressionLabel {
    /// Overtly aggressive, threatening.
    OagT,
    /// Overtly aggressive, non-threatening.
    OagNt,
    /// Covertly aggressive, threatening.
    CagT,
    /// Covertly aggressive, non-threatening.
    CagNt,
    /// Non-aggressive human speech.
    Nag,
    /// No human speech (noise, music, silence).
    Irr,
}

impl AggressionLabel {
    /// Parse an annotation string. Matching is case-insensitive and
    /// ignores surrounding whitespace; an empty string is treated as
    /// `Irr` (unlabeled regions carry no speech by convention).
    pub fn parse(raw: &str) -> Result<Self, LabelError> {
        let s = raw.trim();
        if s.is_empty() {
            return Ok(AggressionLabel::Irr);
        }
        match s.to_ascii_uppercase().as_str() {
            "OAG_T" => Ok(AggressionLabel::OagT),
            "OAG_NT" => Ok(AggressionLabel::OagNt),
            "CAG_T" => Ok(AggressionLabel::CagT),
            "CAG_NT" => Ok(AggressionLabel::CagNt),
            "NAG" => Ok(AggressionLabel::Nag),
            "IRR" => Ok(AggressionLabel::Irr),
            _ => Err(LabelError::UnknownAggressionLabel(s.to_string())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            AggressionLabel::OagT => "OAG_T",
            AggressionLabel::OagNt => "OAG_NT",
            AggressionLabel::CagT => "CAG_T",
            AggressionLabel::CagNt => "CAG_NT",
            AggressionLabel::Nag => "NAG",
            AggressionLabel::Irr => "IRR",
        }
    }
}

/// Tier-2 turn-taking label. Parsed and validated but carried as
/// metadata only; it feeds no classifier feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TurnLabel {
    Tcu,
    Overlap,
    Interruption,
}

impl TurnLabel {
    pub fn parse(raw: &str) -> Result<Self, LabelError> {
        match raw.trim().to_ascii_uppercase().as_str() {
            "TCU" => Ok(TurnLabel::Tcu),
            "OVERLAP" => Ok(TurnLabel::Overlap),
            "INTERRUPTION" => Ok(TurnLabel::Interruption),
            other => Err(LabelError::UnknownTurnLabel(other.to_string())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TurnLabel::Tcu => "TCU",
            TurnLabel::Overlap => "OVERLAP",
            TurnLabel::Interruption => "INTERRUPTION",
        }
    }
}

/// The three-way classification target. `ALL` fixes the canonical class
/// order used everywhere (confusion matrices, pairwise sub-models).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoarseClass {
    Oag,
    Cag,
    Nag,
}

impl CoarseClass {
    pub const ALL: [CoarseClass; 3] = [CoarseClass::Oag, CoarseClass::Cag, CoarseClass::Nag];

    pub fn as_str(&self) -> &'static str {
        match self {
            CoarseClass::Oag => "OAG",
            CoarseClass::Cag => "CAG",
            CoarseClass::Nag => "NAG",
        }
    }

    pub fn parse(raw: &str) -> Result<Self, LabelError> {
        match raw.trim().to_ascii_uppercase().as_str() {
            "OAG" => Ok(CoarseClass::Oag),
            "CAG" => Ok(CoarseClass::Cag),
            "NAG" => Ok(CoarseClass::Nag),
            other => Err(LabelError::UnknownCoarseClass(other.to_string())),
        }
    }

    /// Position within the canonical class order.
    pub fn index(&self) -> usize {
        match self {
            CoarseClass::Oag => 0,
            CoarseClass::Cag => 1,
            CoarseClass::Nag => 2,
        }
    }
}

impl std::fmt::Display for CoarseClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Collapse a fine Tier-1 label onto the classification target.
/// Returns `None` for `IRR`, which is excluded from all datasets.
pub fn map_label(fine: AggressionLabel) -> Option<CoarseClass> {
    match fine {
        AggressionLabel::OagT | AggressionLabel::OagNt => Some(CoarseClass::Oag),
        AggressionLabel::CagT | AggressionLabel::CagNt => Some(CoarseClass::Cag),
        AggressionLabel::Nag => Some(CoarseClass::Nag),
        AggressionLabel::Irr => None,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("unknown Tier-1 aggression label {0:?}")]
    UnknownAggressionLabel(String),
    #[error("unknown Tier-2 turn label {0:?}")]
    UnknownTurnLabel(String),
    #[error("unknown class {0:?}")]
    UnknownCoarseClass(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fine_labels_collapse_onto_three_classes() {
        assert_eq!(map_label(AggressionLabel::OagT), Some(CoarseClass::Oag));
        assert_eq!(map_label(AggressionLabel::OagNt), Some(CoarseClass::Oag));
        assert_eq!(map_label(AggressionLabel::CagT), Some(CoarseClass::Cag));
        assert_eq!(map_label(AggressionLabel::CagNt), Some(CoarseClass::Cag));
        assert_eq!(map_label(AggressionLabel::Nag), Some(CoarseClass::Nag));
        assert_eq!(map_label(AggressionLabel::Irr), None);
    }

    #[test]
    fn label_set_is_closed() {
        assert!(AggressionLabel::parse("ANGRY").is_err());
        assert_eq!(AggressionLabel::parse(" oag_t "), Ok(AggressionLabel::OagT));
        assert_eq!(AggressionLabel::parse(""), Ok(AggressionLabel::Irr));
    }

    #[test]
    fn turn_labels_parse() {
        assert_eq!(TurnLabel::parse("TCU"), Ok(TurnLabel::Tcu));
        assert_eq!(TurnLabel::parse("overlap"), Ok(TurnLabel::Overlap));
        assert!(TurnLabel::parse("pause").is_err());
    }

    #[test]
    fn class_order_is_fixed() {
        let names: Vec<&str> = CoarseClass::ALL.iter().map(|c| c.as_str()).collect();
        assert_eq!(names, ["OAG", "CAG", "NAG"]);
        for (i, c) in CoarseClass::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
    }
}
