use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::CalculusError;

/// Largest universe (as a power of two) accepted by [`UniverseSchema::new`].
///
/// Keeps every cardinality representable as `u128` and leaves headroom for
/// the alternating sums of inclusion-exclusion in `i128`.
pub const MAX_UNIVERSE_BITS: u32 = 100;

/// Element names that carry structural meaning in concept documents.
const RESERVED_UNIVERSE_NAMES: &[&str] = &["rule"];

/// Attribute name reserved for concept naming in documents.
pub const RESERVED_ATTRIBUTE_NAME: &str = "name";

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn check_value(attribute: &str, value: &str) -> Result<(), CalculusError> {
    let bad = value.is_empty()
        || value.trim() != value
        || value.contains(',')
        || value.chars().any(char::is_control);
    if bad {
        return Err(CalculusError::InvalidValue {
            attribute: attribute.to_string(),
            value: value.to_string(),
        });
    }
    Ok(())
}

/// An attribute `a: X -> W` together with its finite, ordered range `W`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeDef {
    name: String,
    range: Vec<String>,
}

impl AttributeDef {
    pub fn new<N, I, V>(name: N, range: I) -> Result<Self, CalculusError>
    where
        N: Into<String>,
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(CalculusError::InvalidIdentifier(name));
        }
        let range: Vec<String> = range.into_iter().map(Into::into).collect();
        if range.is_empty() {
            return Err(CalculusError::EmptyRange(name));
        }
        let mut seen = BTreeSet::new();
        for value in &range {
            check_value(&name, value)?;
            if !seen.insert(value.as_str()) {
                return Err(CalculusError::DuplicateValue {
                    attribute: name.clone(),
                    value: value.clone(),
                });
            }
        }
        Ok(Self { name, range })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Values in declaration order.
    pub fn range(&self) -> &[String] {
        &self.range
    }

    /// Position of `value` in the declared range.
    pub fn position(&self, value: &str) -> Option<usize> {
        self.range.iter().position(|v| v == value)
    }

    pub fn contains(&self, value: &str) -> bool {
        self.position(value).is_some()
    }
}

/// The declared attributes of a universe. The object set is the full
/// Cartesian product of the attribute ranges, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniverseSchema {
    name: String,
    namespace: String,
    attributes: Vec<AttributeDef>,
}

impl UniverseSchema {
    pub fn new(
        name: impl Into<String>,
        namespace: impl Into<String>,
        attributes: Vec<AttributeDef>,
    ) -> Result<Self, CalculusError> {
        let name = name.into();
        let namespace = namespace.into();
        if !is_identifier(&name) || RESERVED_UNIVERSE_NAMES.contains(&name.as_str()) {
            return Err(CalculusError::InvalidIdentifier(name));
        }
        if namespace.is_empty() || namespace.chars().any(|c| c.is_control() || c.is_whitespace()) {
            return Err(CalculusError::InvalidNamespace(namespace));
        }
        let mut seen = BTreeSet::new();
        for attr in &attributes {
            if attr.name == RESERVED_ATTRIBUTE_NAME {
                return Err(CalculusError::ReservedAttribute(attr.name.clone()));
            }
            if !seen.insert(attr.name.as_str()) {
                return Err(CalculusError::DuplicateAttribute(attr.name.clone()));
            }
        }
        let bits: f64 = attributes.iter().map(|a| (a.range.len() as f64).log2()).sum();
        if bits > f64::from(MAX_UNIVERSE_BITS) {
            return Err(CalculusError::UniverseTooLarge);
        }
        Ok(Self {
            name,
            namespace,
            attributes,
        })
    }

    /// Root element name of documents over this universe.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn attributes(&self) -> &[AttributeDef] {
        &self.attributes
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDef> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    /// `|W1| * ... * |Wn|`; the empty product is 1.
    pub fn universe_size(&self) -> u128 {
        self.attributes
            .iter()
            .map(|a| a.range.len() as u128)
            .product()
    }

    /// The attribute-value set: every `(attribute, value)` pair, attributes in
    /// declaration order and values in range order.
    pub fn attribute_value_pairs(&self) -> Vec<(&str, &str)> {
        self.attributes
            .iter()
            .flat_map(|a| a.range.iter().map(move |v| (a.name.as_str(), v.as_str())))
            .collect()
    }

    pub(crate) fn lookup(&self, attribute: &str) -> Result<(usize, &AttributeDef), CalculusError> {
        self.attributes
            .iter()
            .enumerate()
            .find(|(_, a)| a.name == attribute)
            .ok_or_else(|| CalculusError::UnknownAttribute(attribute.to_string()))
    }
}

/// One object of the universe: a value for every attribute, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectInstance {
    values: Vec<String>,
}

impl ObjectInstance {
    pub fn new<I, V>(values: I, schema: &UniverseSchema) -> Result<Self, CalculusError>
    where
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.len() != schema.attributes.len() {
            return Err(CalculusError::Arity {
                expected: schema.attributes.len(),
                found: values.len(),
            });
        }
        for (attr, value) in schema.attributes.iter().zip(&values) {
            if !attr.contains(value) {
                return Err(CalculusError::ValueOutOfRange {
                    attribute: attr.name.clone(),
                    value: value.clone(),
                });
            }
        }
        Ok(Self { values })
    }

    /// Parses a comma-separated value list in declaration order.
    ///
    /// A universe without attributes has exactly one object, written as the
    /// empty string.
    pub fn parse_csv(line: &str, schema: &UniverseSchema) -> Result<Self, CalculusError> {
        let line = line.trim();
        if schema.attributes.is_empty() && line.is_empty() {
            return Self::new(Vec::<String>::new(), schema);
        }
        Self::new(line.split(',').map(str::trim), schema)
    }

    pub(crate) fn from_indices(indices: &[usize], schema: &UniverseSchema) -> Self {
        let values = schema
            .attributes
            .iter()
            .zip(indices)
            .map(|(a, &i)| a.range[i].clone())
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn value_of<'a>(&'a self, attribute: &str, schema: &UniverseSchema) -> Option<&'a str> {
        schema
            .attribute_index(attribute)
            .and_then(|i| self.values.get(i))
            .map(String::as_str)
    }

    pub fn to_csv(&self) -> String {
        self.values.join(",")
    }
}

impl fmt::Display for ObjectInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.values.join(", "))
    }
}

/// A value-set selector `[a = w1] v ... v [a = wk]`: the objects whose
/// attribute takes one of the allowed values. A singleton is an elementary
/// selector; an empty allowed set selects nothing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selector {
    pub attribute: String,
    pub allowed: BTreeSet<String>,
}

impl Selector {
    pub fn new<I, V>(attribute: impl Into<String>, allowed: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        Self {
            attribute: attribute.into(),
            allowed: allowed.into_iter().map(Into::into).collect(),
        }
    }

    pub fn elementary(attribute: impl Into<String>, value: impl Into<String>) -> Self {
        Self::new(attribute, [value.into()])
    }

    pub fn is_elementary(&self) -> bool {
        self.allowed.len() == 1
    }

    /// Checks the selector's attribute and values against the schema.
    pub fn validate(&self, schema: &UniverseSchema) -> Result<(), CalculusError> {
        let (_, attr) = schema.lookup(&self.attribute)?;
        for value in &self.allowed {
            if !attr.contains(value) {
                return Err(CalculusError::ValueOutOfRange {
                    attribute: self.attribute.clone(),
                    value: value.clone(),
                });
            }
        }
        Ok(())
    }

    /// Allowed values in the attribute's range order.
    pub fn ordered_values<'a>(&'a self, schema: &'a UniverseSchema) -> Vec<&'a str> {
        match schema.attribute(&self.attribute) {
            Some(attr) => attr
                .range()
                .iter()
                .filter(|v| self.allowed.contains(*v))
                .map(String::as_str)
                .collect(),
            None => self.allowed.iter().map(String::as_str).collect(),
        }
    }
}

/// A conjunction of selectors, at most one per attribute. Attributes without
/// a selector are unconstrained.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    constraints: BTreeMap<String, Selector>,
}

impl Rule {
    /// The unconstrained rule; it matches every object.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_selectors<I: IntoIterator<Item = Selector>>(selectors: I) -> Self {
        let mut rule = Self::new();
        for s in selectors {
            rule.constrain(s);
        }
        rule
    }

    /// Builder form of [`Rule::constrain`] for elementary selectors.
    pub fn with(mut self, attribute: &str, value: &str) -> Self {
        self.constrain(Selector::elementary(attribute, value));
        self
    }

    /// Adds a selector. A second selector on an already constrained attribute
    /// is intersected with the existing one.
    pub fn constrain(&mut self, selector: Selector) {
        match self.constraints.get_mut(&selector.attribute) {
            Some(existing) => existing.allowed.retain(|v| selector.allowed.contains(v)),
            None => {
                self.constraints.insert(selector.attribute.clone(), selector);
            }
        }
    }

    /// Replaces the selector on the attribute, if any.
    pub fn set(&mut self, selector: Selector) -> Option<Selector> {
        self.constraints.insert(selector.attribute.clone(), selector)
    }

    pub fn remove(&mut self, attribute: &str) -> Option<Selector> {
        self.constraints.remove(attribute)
    }

    pub fn get(&self, attribute: &str) -> Option<&Selector> {
        self.constraints.get(attribute)
    }

    pub fn selectors(&self) -> impl Iterator<Item = &Selector> {
        self.constraints.values()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn is_elementary(&self) -> bool {
        self.constraints.values().all(Selector::is_elementary)
    }

    pub fn validate(&self, schema: &UniverseSchema) -> Result<(), CalculusError> {
        self.constraints.values().try_for_each(|s| s.validate(schema))
    }

    /// Selectors ordered by the schema's attribute declaration order.
    /// Selectors on undeclared attributes come last, by name.
    pub fn ordered_selectors<'a>(&'a self, schema: &UniverseSchema) -> Vec<&'a Selector> {
        let mut out: Vec<&Selector> = self.constraints.values().collect();
        out.sort_by_key(|s| (schema.attribute_index(&s.attribute).unwrap_or(usize::MAX), s.attribute.clone()));
        out
    }
}

/// A union of rules (disjunctive normal form), optionally named.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Concept {
    pub name: Option<String>,
    pub rules: Vec<Rule>,
}

impl Concept {
    pub fn new(rules: Vec<Rule>) -> Self {
        Self { name: None, rules }
    }

    pub fn named(name: impl Into<String>, rules: Vec<Rule>) -> Self {
        Self {
            name: Some(name.into()),
            rules,
        }
    }

    pub fn validate(&self, schema: &UniverseSchema) -> Result<(), CalculusError> {
        self.rules.iter().try_for_each(|r| r.validate(schema))
    }

    pub fn is_elementary(&self) -> bool {
        self.rules.iter().all(Rule::is_elementary)
    }
}

/// A universe object flagged by membership in a concept's extension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledExample {
    pub object: ObjectInstance,
    pub positive: bool,
}
