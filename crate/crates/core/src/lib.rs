//! Concept description over attribute-value universes.
//!
//! * [`calculus`]: selectors, rules, concepts and their extensions.
//! * [`vl1`]: bracket-notation selector expressions and their lowering.
//! * [`xmlio`]: the XML concept-document format and its XML Schema.
//! * [`cli`]: the `attribcalc` command-line front end.

pub mod calculus;
pub mod cli;
pub mod universe_def;
pub mod vl1;
pub mod xmlio;

pub use calculus::{
    AttributeDef, CalculusError, Concept, LabeledExample, ObjectInstance, Rule, Selector,
    UniverseSchema,
};
