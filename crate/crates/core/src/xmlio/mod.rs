//! The XML concept-document format and the XML Schema describing it.
//!
//! A selector is an attribute-value pair on a `rule` element, a rule's
//! selectors are that element's attribute list, and a concept's rules are
//! the `rule` children of a `concept` element.

mod document;
mod schema;
mod validate;
pub mod xml;

use thiserror::Error;

pub use document::{
    parse_document, serialize_document, serialize_document_with, ConceptDocument, SerializeOptions,
    CONCEPT_ELEMENT, DEFAULT_EXPANSION_LIMIT, NAME_ATTRIBUTE, RULE_ELEMENT, XML_DECLARATION,
};
pub use schema::{generate_schema, parse_schema, XSD_NAMESPACE};
pub use validate::{validate_document, Issue, IssueCode, Severity, ValidationReport};

use crate::calculus::CalculusError;
use xml::{Position, XmlError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("malformed XML: {0}")]
    Xml(#[from] XmlError),
    #[error("{position}: unexpected element <{name}>, expected {expected}")]
    UnexpectedElement {
        name: String,
        expected: &'static str,
        position: Position,
    },
    #[error("{position}: unexpected attribute {attribute:?} on <{element}>")]
    UnexpectedAttribute {
        element: String,
        attribute: String,
        position: Position,
    },
    #[error("{position}: text content is not allowed inside <{element}>")]
    TextContent { element: String, position: Position },
    #[error("a document rooted at <concept> holds exactly one concept, not {0}")]
    BareConceptCount(usize),
    #[error("rule {rule} of concept {concept} has a non-elementary selector and expansion is disabled")]
    NonElementaryRule { concept: usize, rule: usize },
    #[error("expanding value-set selectors needs {required} rule elements, over the limit of {limit}")]
    ExpansionLimit { limit: usize, required: usize },
    #[error("document does not match the universe: {0}")]
    SchemaMismatch(#[from] CalculusError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("malformed XML: {0}")]
    Xml(#[from] XmlError),
    #[error("root element is not an XML Schema <schema> element")]
    NotASchema,
    #[error("<{element}> lacks required attribute {attribute:?}")]
    MissingAttribute {
        element: String,
        attribute: &'static str,
    },
    #[error("no {0} declaration found")]
    MissingDeclaration(&'static str),
    #[error("simple type {0:?} is declared more than once")]
    DuplicateType(String),
    #[error("attribute {attribute:?} references undeclared type {type_name:?}")]
    UndeclaredType { attribute: String, type_name: String },
    #[error("simple type {type_name:?} uses unsupported facet {facet}")]
    UnsupportedFacet { type_name: String, facet: String },
    #[error("simple type {type_name:?} restricts unsupported base {base:?}")]
    UnsupportedBase { type_name: String, base: String },
    #[error("invalid universe: {0}")]
    Invalid(#[from] CalculusError),
}
