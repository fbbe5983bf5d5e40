//! Closed label vocabularies used by every pipeline phase.
//!
//! Each enum deserializes only from its exact wire label; anything else is a
//! parse error naming the allowed set.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

macro_rules! vocabulary {
    (
        $(#[$meta:meta])*
        $name:ident, $field:literal { $($variant:ident => $label:literal),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        pub enum $name {
            $(
                #[serde(rename = $label)]
                $variant,
            )+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
            pub const LABELS: &'static [&'static str] = &[$($label),+];
            /// Field name the vocabulary governs, used in error messages.
            pub const FIELD: &'static str = $field;

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $label,)+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = UnknownLabel;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($label => Ok($name::$variant),)+
                    other => Err(UnknownLabel {
                        field: $field,
                        value: other.to_string(),
                        allowed: Self::LABELS,
                    }),
                }
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let label = String::deserialize(d)?;
                label.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

/// A label outside a closed vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{field} must use only these values: {allowed:?}; got {value:?}")]
pub struct UnknownLabel {
    pub field: &'static str,
    pub value: String,
    pub allowed: &'static [&'static str],
}

vocabulary! {
    /// Dominant visual form of a slide.
    ModalityType, "modality_type" {
        Text => "text",
        Diagram => "diagram",
        Table => "table",
        Chart => "chart",
        LayoutAware => "layout-aware",
        ImagePlusText => "image-plus-text",
        Mixed => "mixed",
    }
}

vocabulary! {
    /// Instructional role of a slide within its deck.
    RoleInDeck, "role_in_deck" {
        Title => "title",
        Agenda => "agenda",
        Transition => "transition",
        Definition => "definition",
        Example => "example",
        Mechanism => "mechanism",
        Comparison => "comparison",
        Result => "result",
        Summary => "summary",
        Administrative => "administrative",
        Appendix => "appendix",
        Review => "review",
        Reference => "reference",
    }
}

vocabulary! {
    /// Question form; also the vocabulary of `question_mix` entries.
    QuestionType, "question_type" {
        FillBlank => "fill_blank",
        Mcq => "mcq",
        OpenEnded => "open_ended",
        ShortAnswer => "short_answer",
        DiagramLabeling => "diagram_labeling",
        Comparison => "comparison",
        Interpretation => "interpretation",
        EvidenceLocalization => "evidence_localization",
    }
}

vocabulary! {
    Difficulty, "difficulty" {
        Low => "low",
        Medium => "medium",
        High => "high",
    }
}

vocabulary! {
    /// Reconciliation verdict for one slide.
    ActionKind, "action" {
        Keep => "keep",
        Reduce => "reduce",
        Expand => "expand",
        ZeroOut => "zero_out",
        Rewrite => "rewrite",
    }
}

impl ActionKind {
    /// Actions that send a slide back through annotation.
    pub fn needs_reannotation(self) -> bool {
        matches!(
            self,
            ActionKind::Reduce | ActionKind::Expand | ActionKind::Rewrite
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip_through_from_str() {
        for m in ModalityType::ALL {
            assert_eq!(m.as_str().parse::<ModalityType>().unwrap(), *m);
        }
        for r in RoleInDeck::ALL {
            assert_eq!(r.as_str().parse::<RoleInDeck>().unwrap(), *r);
        }
        for q in QuestionType::ALL {
            assert_eq!(q.as_str().parse::<QuestionType>().unwrap(), *q);
        }
        for a in ActionKind::ALL {
            assert_eq!(a.as_str().parse::<ActionKind>().unwrap(), *a);
        }
    }

    #[test]
    fn vocabulary_sizes() {
        assert_eq!(ModalityType::ALL.len(), 7);
        assert_eq!(RoleInDeck::ALL.len(), 13);
        assert_eq!(QuestionType::ALL.len(), 8);
        assert_eq!(Difficulty::ALL.len(), 3);
        assert_eq!(ActionKind::ALL.len(), 5);
    }

    #[test]
    fn unknown_action_names_the_vocabulary() {
        let err = "delete".parse::<ActionKind>().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("action must use only these values"), "{msg}");
        assert!(msg.contains("zero_out"));
    }

    #[test]
    fn serde_rejects_labels_outside_the_set() {
        assert!(serde_json::from_str::<ModalityType>("\"video\"").is_err());
        assert!(serde_json::from_str::<RoleInDeck>("\"Title\"").is_err());
        assert_eq!(
            serde_json::from_str::<ModalityType>("\"layout-aware\"").unwrap(),
            ModalityType::LayoutAware
        );
    }
}
