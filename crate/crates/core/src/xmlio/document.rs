use std::fmt::Write as _;

use super::xml::{self, escape_attribute, Element};
use super::DocumentError;
use crate::calculus::{Concept, Rule, Selector, UniverseSchema};

pub const CONCEPT_ELEMENT: &str = "concept";
pub const RULE_ELEMENT: &str = "rule";
pub const NAME_ATTRIBUTE: &str = "name";
pub const XML_DECLARATION: &str = "<?xml version=\"1.0\"?>";

/// Default cap on the number of rule elements produced by expanding
/// value-set selectors during serialization.
pub const DEFAULT_EXPANSION_LIMIT: usize = 10_000;

/// A concept document: a universe root element holding concept elements,
/// each holding rule elements whose XML attributes are elementary selectors.
///
/// A document whose root is itself a `concept` element (the bare form, as
/// in the generic concept template) has no universe name and exactly one
/// concept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptDocument {
    pub universe_name: Option<String>,
    /// Default namespace declared on the root element.
    pub namespace: Option<String>,
    /// Prefixed namespace declarations on the root, as `(prefix, uri)`.
    pub prefixed_namespaces: Vec<(String, String)>,
    pub concepts: Vec<Concept>,
}

impl ConceptDocument {
    /// An empty document rooted at the schema's universe element, declaring
    /// the schema's namespace.
    pub fn for_schema(schema: &UniverseSchema) -> Self {
        Self {
            universe_name: Some(schema.name().to_string()),
            namespace: Some(schema.namespace().to_string()),
            prefixed_namespaces: Vec::new(),
            concepts: Vec::new(),
        }
    }

    /// A bare document whose root is the concept element.
    pub fn bare(concept: Concept) -> Self {
        Self {
            universe_name: None,
            namespace: None,
            prefixed_namespaces: Vec::new(),
            concepts: vec![concept],
        }
    }

    pub fn with_concept(mut self, concept: Concept) -> Self {
        self.concepts.push(concept);
        self
    }

    pub fn is_bare(&self) -> bool {
        self.universe_name.is_none()
    }

    /// Name of the root element.
    pub fn root_name(&self) -> &str {
        self.universe_name.as_deref().unwrap_or(CONCEPT_ELEMENT)
    }
}

fn unexpected(el: &Element, expected: &'static str) -> DocumentError {
    DocumentError::UnexpectedElement {
        name: el.name.clone(),
        expected,
        position: el.position,
    }
}

fn no_text(el: &Element) -> Result<(), DocumentError> {
    if el.text.is_empty() {
        Ok(())
    } else {
        Err(DocumentError::TextContent {
            element: el.name.clone(),
            position: el.position,
        })
    }
}

fn unexpected_attribute(el: &Element, attribute: &str) -> DocumentError {
    DocumentError::UnexpectedAttribute {
        element: el.name.clone(),
        attribute: attribute.to_string(),
        position: el.position,
    }
}

fn parse_rule(el: &Element) -> Result<Rule, DocumentError> {
    if el.name != RULE_ELEMENT {
        return Err(unexpected(el, "rule"));
    }
    no_text(el)?;
    if let Some(child) = el.children.first() {
        return Err(unexpected(child, "no child elements inside rule"));
    }
    // The XML reader already rejects duplicate attributes on one element.
    Ok(Rule::from_selectors(
        el.attributes
            .iter()
            .map(|(name, value)| Selector::elementary(name.as_str(), value.as_str())),
    ))
}

fn parse_concept(el: &Element, is_root: bool) -> Result<Concept, DocumentError> {
    if el.name != CONCEPT_ELEMENT {
        return Err(unexpected(el, "concept"));
    }
    no_text(el)?;
    let mut name = None;
    for (attr, value) in &el.attributes {
        if attr == NAME_ATTRIBUTE {
            name = Some(value.clone());
        } else if !(is_root && is_namespace_declaration(attr)) {
            return Err(unexpected_attribute(el, attr));
        }
    }
    let rules = el.children.iter().map(parse_rule).collect::<Result<_, _>>()?;
    Ok(Concept { name, rules })
}

fn is_namespace_declaration(attr: &str) -> bool {
    attr == "xmlns" || attr.starts_with("xmlns:")
}

fn root_namespaces(root: &Element) -> (Option<String>, Vec<(String, String)>) {
    let mut default = None;
    let mut prefixed = Vec::new();
    for (attr, value) in &root.attributes {
        if attr == "xmlns" {
            default = Some(value.clone());
        } else if let Some(prefix) = attr.strip_prefix("xmlns:") {
            prefixed.push((prefix.to_string(), value.clone()));
        }
    }
    (default, prefixed)
}

/// Parses a concept document. Structure is checked here; attribute names
/// and values are checked against a universe by
/// [`validate_document`](super::validate_document).
pub fn parse_document(text: &str) -> Result<ConceptDocument, DocumentError> {
    let root = xml::parse(text)?;
    let (namespace, prefixed_namespaces) = root_namespaces(&root);
    if root.name == RULE_ELEMENT || root.split_name().0.is_some() {
        return Err(unexpected(&root, "a universe or concept root element"));
    }

    if root.name == CONCEPT_ELEMENT {
        let concept = parse_concept(&root, true)?;
        return Ok(ConceptDocument {
            universe_name: None,
            namespace,
            prefixed_namespaces,
            concepts: vec![concept],
        });
    }

    no_text(&root)?;
    if let Some((attr, _)) = root.attributes.iter().find(|(a, _)| !is_namespace_declaration(a)) {
        return Err(unexpected_attribute(&root, attr));
    }
    let concepts = root
        .children
        .iter()
        .map(|c| parse_concept(c, false))
        .collect::<Result<_, _>>()?;
    Ok(ConceptDocument {
        universe_name: Some(root.name.clone()),
        namespace,
        prefixed_namespaces,
        concepts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SerializeOptions {
    /// Expand value-set selectors into several elementary rule elements.
    pub expand: bool,
    /// Maximum number of rule elements the whole document may expand to.
    pub expansion_limit: usize,
}

impl Default for SerializeOptions {
    fn default() -> Self {
        Self {
            expand: true,
            expansion_limit: DEFAULT_EXPANSION_LIMIT,
        }
    }
}

/// Elementary rules equivalent to `rule`: the cross product of its selectors'
/// allowed values, in declaration order. Each entry lists `(attribute, value)`
/// in declaration order.
fn expand_rule<'a>(rule: &'a Rule, schema: &'a UniverseSchema) -> Vec<Vec<(&'a str, &'a str)>> {
    let mut out: Vec<Vec<(&str, &str)>> = vec![Vec::new()];
    for selector in rule.ordered_selectors(schema) {
        let values = selector.ordered_values(schema);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push((selector.attribute.as_str(), *v));
                    next
                })
            })
            .collect();
    }
    out
}

fn expanded_len(rule: &Rule) -> usize {
    rule.selectors()
        .map(|s| s.allowed.len())
        .fold(1usize, usize::saturating_mul)
}

pub fn serialize_document(doc: &ConceptDocument, schema: &UniverseSchema) -> Result<String, DocumentError> {
    serialize_document_with(doc, schema, SerializeOptions::default())
}

/// Writes the canonical text form: XML declaration, two-space indentation,
/// one element per line, rule attributes in declaration order, self-closing
/// empty elements, trailing newline.
pub fn serialize_document_with(
    doc: &ConceptDocument,
    schema: &UniverseSchema,
    options: SerializeOptions,
) -> Result<String, DocumentError> {
    if doc.is_bare() && doc.concepts.len() != 1 {
        return Err(DocumentError::BareConceptCount(doc.concepts.len()));
    }
    let mut emitted = 0usize;
    for (ci, concept) in doc.concepts.iter().enumerate() {
        for (ri, rule) in concept.rules.iter().enumerate() {
            rule.validate(schema)?;
            if !rule.is_elementary() && !options.expand {
                return Err(DocumentError::NonElementaryRule { concept: ci, rule: ri });
            }
            emitted = emitted.saturating_add(expanded_len(rule));
        }
    }
    if emitted > options.expansion_limit {
        return Err(DocumentError::ExpansionLimit {
            limit: options.expansion_limit,
            required: emitted,
        });
    }

    let mut out = String::new();
    out.push_str(XML_DECLARATION);
    out.push('\n');

    let mut root_attrs = String::new();
    if let Some(ns) = &doc.namespace {
        let _ = write!(root_attrs, " xmlns=\"{}\"", escape_attribute(ns));
    }
    for (prefix, uri) in &doc.prefixed_namespaces {
        let _ = write!(root_attrs, " xmlns:{}=\"{}\"", prefix, escape_attribute(uri));
    }

    if doc.is_bare() {
        write_concept(&mut out, &doc.concepts[0], &root_attrs, "", schema);
        return Ok(out);
    }

    let root = doc.root_name();
    if doc.concepts.is_empty() {
        let _ = writeln!(out, "<{root}{root_attrs}/>");
        return Ok(out);
    }
    let _ = writeln!(out, "<{root}{root_attrs}>");
    for concept in &doc.concepts {
        write_concept(&mut out, concept, "", "  ", schema);
    }
    let _ = writeln!(out, "</{root}>");
    Ok(out)
}

fn write_concept(out: &mut String, concept: &Concept, extra_attrs: &str, indent: &str, schema: &UniverseSchema) {
    let mut open = format!("{indent}<{CONCEPT_ELEMENT}{extra_attrs}");
    if let Some(name) = &concept.name {
        let _ = write!(open, " {NAME_ATTRIBUTE}=\"{}\"", escape_attribute(name));
    }
    let rules: Vec<_> = concept
        .rules
        .iter()
        .flat_map(|r| expand_rule(r, schema))
        .collect();
    if rules.is_empty() {
        let _ = writeln!(out, "{open}/>");
        return;
    }
    let _ = writeln!(out, "{open}>");
    for rule in rules {
        let _ = write!(out, "{indent}  <{RULE_ELEMENT}");
        for (attr, value) in rule {
            let _ = write!(out, " {attr}=\"{}\"", escape_attribute(value));
        }
        out.push_str("/>\n");
    }
    let _ = writeln!(out, "{indent}</{CONCEPT_ELEMENT}>");
}

/// Location of a concept element, for diagnostics.
pub(crate) fn concept_path(doc: &ConceptDocument, index: usize) -> String {
    if doc.is_bare() {
        format!("/{CONCEPT_ELEMENT}")
    } else {
        format!("/{}/{CONCEPT_ELEMENT}[{}]", doc.root_name(), index + 1)
    }
}
