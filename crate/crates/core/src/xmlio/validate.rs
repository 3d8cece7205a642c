use std::collections::BTreeMap;
use std::fmt;

use super::document::{concept_path, ConceptDocument, RULE_ELEMENT};
use crate::calculus::UniverseSchema;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IssueCode {
    RootNameMismatch,
    NamespaceMismatch,
    ForeignNamespace,
    UndeclaredAttribute,
    ValueOutOfRange,
    NonElementarySelector,
    EmptyConcept,
    DuplicateRule,
    DuplicateConceptName,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::RootNameMismatch => "root-name-mismatch",
            IssueCode::NamespaceMismatch => "namespace-mismatch",
            IssueCode::ForeignNamespace => "foreign-namespace",
            IssueCode::UndeclaredAttribute => "undeclared-attribute",
            IssueCode::ValueOutOfRange => "value-out-of-range",
            IssueCode::NonElementarySelector => "non-elementary-selector",
            IssueCode::EmptyConcept => "empty-concept",
            IssueCode::DuplicateRule => "duplicate-rule",
            IssueCode::DuplicateConceptName => "duplicate-concept-name",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub severity: Severity,
    /// XPath-like location, e.g. `/emerald/concept[1]/rule[2]/@holding`.
    pub path: String,
    pub code: IssueCode,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}: {}", self.severity, self.path, self.code, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    /// True iff no issue has error severity.
    pub fn valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Issue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    fn push(&mut self, severity: Severity, path: String, code: IssueCode, message: String) {
        self.issues.push(Issue {
            severity,
            path,
            code,
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// Checks a parsed document against a universe. Never fails; every finding
/// is a report entry.
pub fn validate_document(doc: &ConceptDocument, schema: &UniverseSchema) -> ValidationReport {
    let mut report = ValidationReport::default();
    let root_path = format!("/{}", doc.root_name());

    if let Some(name) = &doc.universe_name {
        if name != schema.name() {
            report.push(
                Severity::Error,
                root_path.clone(),
                IssueCode::RootNameMismatch,
                format!("root element is <{name}>, expected <{}>", schema.name()),
            );
        }
    }
    if let Some(ns) = &doc.namespace {
        if ns != schema.namespace() {
            report.push(
                Severity::Error,
                format!("{root_path}/@xmlns"),
                IssueCode::NamespaceMismatch,
                format!("default namespace {ns:?} differs from {:?}", schema.namespace()),
            );
        }
    }
    for (prefix, uri) in &doc.prefixed_namespaces {
        report.push(
            Severity::Error,
            format!("{root_path}/@xmlns:{prefix}"),
            IssueCode::ForeignNamespace,
            format!("prefixed namespace {prefix:?} ({uri}) is not allowed in concept documents"),
        );
    }

    let mut names: BTreeMap<&str, usize> = BTreeMap::new();
    for (ci, concept) in doc.concepts.iter().enumerate() {
        let cpath = concept_path(doc, ci);
        if let Some(name) = &concept.name {
            if let Some(first) = names.insert(name.as_str(), ci) {
                report.push(
                    Severity::Warning,
                    cpath.clone(),
                    IssueCode::DuplicateConceptName,
                    format!("concept name {name:?} already used by concept {}", first + 1),
                );
            }
        }
        if concept.rules.is_empty() {
            report.push(
                Severity::Warning,
                cpath.clone(),
                IssueCode::EmptyConcept,
                "concept has no rules; its extension is empty".to_string(),
            );
        }
        for (ri, rule) in concept.rules.iter().enumerate() {
            let rpath = format!("{cpath}/{RULE_ELEMENT}[{}]", ri + 1);
            if let Some(first) = concept.rules[..ri].iter().position(|r| r == rule) {
                report.push(
                    Severity::Warning,
                    rpath.clone(),
                    IssueCode::DuplicateRule,
                    format!("rule repeats rule {}", first + 1),
                );
            }
            // Rules are keyed by attribute, so a duplicate attribute cannot
            // reach this point; the XML reader reports it as a parse error.
            for selector in rule.selectors() {
                let apath = format!("{rpath}/@{}", selector.attribute);
                let Some(attr) = schema.attribute(&selector.attribute) else {
                    report.push(
                        Severity::Error,
                        apath,
                        IssueCode::UndeclaredAttribute,
                        format!("attribute {:?} is not declared by universe {:?}", selector.attribute, schema.name()),
                    );
                    continue;
                };
                for value in &selector.allowed {
                    if !attr.contains(value) {
                        report.push(
                            Severity::Error,
                            apath.clone(),
                            IssueCode::ValueOutOfRange,
                            format!("value {value:?} is not one of {{{}}}", attr.range().join(", ")),
                        );
                    }
                }
                if !selector.is_elementary() {
                    report.push(
                        Severity::Warning,
                        apath,
                        IssueCode::NonElementarySelector,
                        format!(
                            "selector allows {} values; serialization expands it into elementary rules",
                            selector.allowed.len()
                        ),
                    );
                }
            }
        }
    }
    report
}
