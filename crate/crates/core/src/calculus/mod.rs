//! Attributional calculus over finite attribute-value universes.
//!
//! Attributes map objects into finite ranges; the universe is the Cartesian
//! product of the ranges. Selectors pick objects by attribute value, rules
//! intersect selectors, and concepts unite rules.

mod extension;
mod simplify;
mod types;
mod valueset;

use thiserror::Error;

pub use extension::{
    concept_matches, count_by_enumeration, count_by_inclusion_exclusion, count_extension,
    count_extension_with, enumerate_extension, equivalent, first_difference, label_examples,
    rule_matches, selector_matches, universe, CountOptions, Difference, Extension,
    LabeledExamples, Universe, DEFAULT_IE_RULE_LIMIT,
};
pub use simplify::simplify;
pub use types::{
    AttributeDef, Concept, LabeledExample, ObjectInstance, Rule, Selector, UniverseSchema,
    MAX_UNIVERSE_BITS, RESERVED_ATTRIBUTE_NAME,
};

pub(crate) use types::is_identifier;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("invalid identifier {0:?}: must start with a letter and contain only letters, digits and '_'")]
    InvalidIdentifier(String),
    #[error("invalid namespace {0:?}")]
    InvalidNamespace(String),
    #[error("attribute {0:?} has an empty range")]
    EmptyRange(String),
    #[error("attribute {attribute:?} declares value {value:?} more than once")]
    DuplicateValue { attribute: String, value: String },
    #[error("invalid value {value:?} for attribute {attribute:?}: values must be non-empty, without surrounding whitespace, and free of commas and control characters")]
    InvalidValue { attribute: String, value: String },
    #[error("attribute {0:?} is declared more than once")]
    DuplicateAttribute(String),
    #[error("attribute name {0:?} is reserved for concept names")]
    ReservedAttribute(String),
    #[error("universe has more than 2^{bits} objects", bits = MAX_UNIVERSE_BITS)]
    UniverseTooLarge,
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("value {value:?} is not in the range of attribute {attribute:?}")]
    ValueOutOfRange { attribute: String, value: String },
    #[error("object has {found} values but the universe has {expected} attributes")]
    Arity { expected: usize, found: usize },
    #[error("inclusion-exclusion sum overflowed")]
    CountOverflow,
}
