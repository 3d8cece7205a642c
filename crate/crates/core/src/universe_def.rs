//! Plain-text universe definitions:
//!
//! ```text
//! # comment
//! universe: emerald
//! namespace: http://www.math-it.org/xml/2002/emerald.xsd
//! headShape: round, square, octagon
//! isSmiling: true, false
//! ```
//!
//! `universe` and `namespace` are header keys, so they cannot be used as
//! attribute names here; every other `name: values` line declares one
//! attribute, in order. The namespace defaults to `urn:attribcalc:<universe>`.

use thiserror::Error;

use crate::calculus::{AttributeDef, CalculusError, UniverseSchema};
use crate::xmlio::{parse_schema, SchemaError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseDefError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Attribute { line: usize, source: CalculusError },
    #[error("missing 'universe:' header")]
    MissingUniverse,
    #[error(transparent)]
    Invalid(#[from] CalculusError),
    #[error("schema document: {0}")]
    Schema(#[from] SchemaError),
}

pub fn parse_universe_definition(text: &str) -> Result<UniverseSchema, UniverseDefError> {
    let mut name: Option<String> = None;
    let mut namespace: Option<String> = None;
    let mut attributes = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, rest)) = line.split_once(':') else {
            return Err(UniverseDefError::Syntax {
                line: line_no,
                message: format!("expected 'name: values', found {line:?}"),
            });
        };
        let key = key.trim();
        let rest = rest.trim();
        let header = match key {
            "universe" => Some(&mut name),
            "namespace" => Some(&mut namespace),
            _ => None,
        };
        if let Some(slot) = header {
            if slot.is_some() {
                return Err(UniverseDefError::Syntax {
                    line: line_no,
                    message: format!("duplicate '{key}:' header"),
                });
            }
            *slot = Some(rest.to_string());
            continue;
        }
        let values: Vec<&str> = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',').map(str::trim).collect()
        };
        let attr = AttributeDef::new(key, values).map_err(|source| UniverseDefError::Attribute {
            line: line_no,
            source,
        })?;
        attributes.push(attr);
    }

    let name = name.ok_or(UniverseDefError::MissingUniverse)?;
    let namespace = namespace.unwrap_or_else(|| format!("urn:attribcalc:{name}"));
    Ok(UniverseSchema::new(name, namespace, attributes)?)
}

/// Reads a universe from either an XML Schema document or a plain-text
/// definition, chosen by whether the text starts with `<`.
pub fn load_universe(text: &str) -> Result<UniverseSchema, UniverseDefError> {
    let trimmed = text.trim_start_matches('\u{feff}').trim_start();
    if trimmed.starts_with('<') {
        Ok(parse_schema(trimmed)?)
    } else {
        parse_universe_definition(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_headers_comments_and_attributes() {
        let s = parse_universe_definition(
            "# toy\nuniverse: toy\n\nnamespace: urn:toy\na: x, y\nb:p,q , r\n",
        )
        .unwrap();
        assert_eq!(s.name(), "toy");
        assert_eq!(s.namespace(), "urn:toy");
        assert_eq!(s.attributes()[1].range(), ["p", "q", "r"]);
    }

    #[test]
    fn zero_attributes_and_default_namespace() {
        let s = parse_universe_definition("universe: empty\n").unwrap();
        assert!(s.attributes().is_empty());
        assert_eq!(s.namespace(), "urn:attribcalc:empty");
        assert_eq!(s.universe_size(), 1);
    }

    #[test]
    fn rejects_bad_definitions() {
        assert_eq!(
            parse_universe_definition("a: x\n"),
            Err(UniverseDefError::MissingUniverse)
        );
        assert!(matches!(
            parse_universe_definition("universe: u\na: x\na: y\n"),
            Err(UniverseDefError::Invalid(CalculusError::DuplicateAttribute(_)))
        ));
        assert!(matches!(
            parse_universe_definition("universe: u\na: x, x\n"),
            Err(UniverseDefError::Attribute { line: 2, .. })
        ));
        assert!(matches!(
            parse_universe_definition("universe: u\nno colon\n"),
            Err(UniverseDefError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_universe_definition("universe: u\nuniverse: v\n"),
            Err(UniverseDefError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_universe_definition("universe: u\nname: a, b\n"),
            Err(UniverseDefError::Invalid(CalculusError::ReservedAttribute(_)))
        ));
        assert!(matches!(
            parse_universe_definition("universe: u\na:\n"),
            Err(UniverseDefError::Attribute { line: 2, source: CalculusError::EmptyRange(_) })
        ));
    }
}
