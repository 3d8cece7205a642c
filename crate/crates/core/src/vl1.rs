//! VL1 bracket notation: `[attribute relation value]` selectors joined into
//! a disjunction of conjunctions.
//!
//! ```text
//! expression  := conjunction { ("v" | "|") conjunction }
//! conjunction := selector { ["&"] selector }
//! selector    := "[" attr rel value "]"
//! rel         := "=" | "<>" | "!=" | "<" | "<=" | ">" | ">="
//! ```
//!
//! Values holding whitespace, `]` or `"`, or starting with a relation
//! character, are written as double-quoted strings with `\"` and `\\` escapes.
//! The symbols `≠ ≤ ≥ ≦ ≧` are accepted as relations too.

use std::fmt;

use thiserror::Error;

use crate::calculus::{is_identifier, CalculusError, Concept, Rule, Selector, UniverseSchema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Eq,
        Relation::Ne,
        Relation::Lt,
        Relation::Le,
        Relation::Gt,
        Relation::Ge,
    ];

    /// Canonical ASCII token.
    pub fn token(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ne => "<>",
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }

    pub fn from_token(token: &str) -> Option<Self> {
        Some(match token {
            "=" => Relation::Eq,
            "<>" | "!=" | "≠" => Relation::Ne,
            "<" => Relation::Lt,
            "<=" | "≤" | "≦" => Relation::Le,
            ">" => Relation::Gt,
            ">=" | "≥" | "≧" => Relation::Ge,
            _ => return None,
        })
    }

    /// Whether a value at position `pos` satisfies the relation against the
    /// reference position `reference`, under declaration order.
    pub fn holds(self, pos: usize, reference: usize) -> bool {
        match self {
            Relation::Eq => pos == reference,
            Relation::Ne => pos != reference,
            Relation::Lt => pos < reference,
            Relation::Le => pos <= reference,
            Relation::Gt => pos > reference,
            Relation::Ge => pos >= reference,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

fn is_relation_char(c: char) -> bool {
    matches!(c, '=' | '<' | '>' | '!' | '≠' | '≤' | '≥' | '≦' | '≧' | '~')
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vl1Selector {
    pub attribute: String,
    pub relation: Relation,
    pub value: String,
}

impl fmt::Display for Vl1Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}{}", self.attribute, self.relation)?;
        let needs_quotes = self.value.is_empty()
            || self.value.starts_with(is_relation_char)
            || self.value.chars().any(|c| c.is_whitespace() || c == ']' || c == '"' || c == '\\');
        if needs_quotes {
            f.write_str("\"")?;
            for c in self.value.chars() {
                if c == '"' || c == '\\' {
                    f.write_str("\\")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("\"]")
        } else {
            write!(f, "{}]", self.value)
        }
    }
}

/// A disjunction of conjunctions of selectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vl1Expression {
    pub disjuncts: Vec<Vec<Vl1Selector>>,
}

impl fmt::Display for Vl1Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, conj) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" v ")?;
            }
            for s in conj {
                write!(f, "{s}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Vl1Error {
    #[error("syntax error at offset {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown relation {token:?} at offset {position}")]
    UnknownRelation { position: usize, token: String },
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("value {value:?} is not in the range of attribute {attribute:?}")]
    ValueNotInRange { attribute: String, value: String },
}

impl From<CalculusError> for Vl1Error {
    fn from(err: CalculusError) -> Self {
        match err {
            CalculusError::ValueOutOfRange { attribute, value } => {
                Vl1Error::ValueNotInRange { attribute, value }
            }
            CalculusError::UnknownAttribute(a) => Vl1Error::UnknownAttribute(a),
            other => Vl1Error::UnknownAttribute(other.to_string()),
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn error(&self, expected: &str) -> Vl1Error {
        Vl1Error::Syntax {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn expression(&mut self) -> Result<Vec<Vec<Vl1Selector>>, Vl1Error> {
        let mut disjuncts = vec![self.conjunction()?];
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Ok(disjuncts),
                Some('v' | '|') => {
                    self.bump();
                    disjuncts.push(self.conjunction()?);
                }
                Some(_) => return Err(self.error("'[', 'v', '|' or end of input")),
            }
        }
    }

    fn conjunction(&mut self) -> Result<Vec<Vl1Selector>, Vl1Error> {
        self.skip_ws();
        let mut selectors = vec![self.selector()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some('&') => {
                    self.bump();
                    self.skip_ws();
                    selectors.push(self.selector()?);
                }
                Some('[') => selectors.push(self.selector()?),
                _ => return Ok(selectors),
            }
        }
    }

    fn selector(&mut self) -> Result<Vl1Selector, Vl1Error> {
        if self.peek() != Some('[') {
            return Err(self.error("'['"));
        }
        self.bump();
        self.skip_ws();

        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        let attribute = &self.text[start..self.pos];
        if !is_identifier(attribute) {
            self.pos = start;
            return Err(self.error("attribute name"));
        }
        self.skip_ws();

        let rel_start = self.pos;
        while self.peek().is_some_and(is_relation_char) {
            self.bump();
        }
        let token = &self.text[rel_start..self.pos];
        if token.is_empty() {
            return Err(self.error("relation"));
        }
        let relation = Relation::from_token(token).ok_or_else(|| Vl1Error::UnknownRelation {
            position: rel_start,
            token: token.to_string(),
        })?;
        self.skip_ws();

        let value = if self.peek() == Some('"') {
            self.bump();
            let mut value = String::new();
            loop {
                match self.bump() {
                    Some('"') => break,
                    Some('\\') => match self.bump() {
                        Some(c) => value.push(c),
                        None => return Err(self.error("escaped character")),
                    },
                    Some(c) => value.push(c),
                    None => return Err(self.error("closing '\"'")),
                }
            }
            value
        } else {
            let v_start = self.pos;
            while self.peek().is_some_and(|c| !c.is_whitespace() && c != ']' && c != '"') {
                self.bump();
            }
            if v_start == self.pos {
                return Err(self.error("value"));
            }
            self.text[v_start..self.pos].to_string()
        };
        self.skip_ws();
        if self.peek() != Some(']') {
            return Err(self.error("']'"));
        }
        self.bump();

        Ok(Vl1Selector {
            attribute: attribute.to_string(),
            relation,
            value,
        })
    }
}

/// Parses without consulting a schema.
pub fn parse_vl1_unchecked(text: &str) -> Result<Vl1Expression, Vl1Error> {
    let mut parser = Parser { text, pos: 0 };
    let disjuncts = parser.expression()?;
    Ok(Vl1Expression { disjuncts })
}

/// Parses an expression and checks every attribute and value against `schema`.
pub fn parse_vl1(text: &str, schema: &UniverseSchema) -> Result<Vl1Expression, Vl1Error> {
    let expr = parse_vl1_unchecked(text)?;
    for selector in expr.disjuncts.iter().flatten() {
        check_selector(selector, schema)?;
    }
    Ok(expr)
}

fn check_selector(selector: &Vl1Selector, schema: &UniverseSchema) -> Result<usize, Vl1Error> {
    let attr = schema
        .attribute(&selector.attribute)
        .ok_or_else(|| Vl1Error::UnknownAttribute(selector.attribute.clone()))?;
    attr.position(&selector.value)
        .ok_or_else(|| Vl1Error::ValueNotInRange {
            attribute: selector.attribute.clone(),
            value: selector.value.clone(),
        })
}

/// Rewrites a relational selector as the set of range values satisfying it,
/// ordering the range by declaration.
pub fn expand_selector(selector: &Vl1Selector, schema: &UniverseSchema) -> Result<Selector, Vl1Error> {
    let reference = check_selector(selector, schema)?;
    let attr = schema
        .attribute(&selector.attribute)
        .expect("checked above");
    let allowed = attr
        .range()
        .iter()
        .enumerate()
        .filter(|(pos, _)| selector.relation.holds(*pos, reference))
        .map(|(_, v)| v.clone());
    Ok(Selector::new(selector.attribute.clone(), allowed))
}

/// Converts an expression to a concept in disjunctive normal form: one rule
/// per conjunction, selectors on a repeated attribute intersected.
pub fn lower_to_concept(expr: &Vl1Expression, schema: &UniverseSchema) -> Result<Concept, Vl1Error> {
    let mut rules = Vec::with_capacity(expr.disjuncts.len());
    for conjunction in &expr.disjuncts {
        let mut rule = Rule::new();
        for selector in conjunction {
            rule.constrain(expand_selector(selector, schema)?);
        }
        rules.push(rule);
    }
    Ok(Concept::new(rules))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{count_extension, AttributeDef};

    fn emerald() -> UniverseSchema {
        UniverseSchema::new(
            "emerald",
            "http://www.math-it.org/xml/2002/emerald.xsd",
            vec![
                AttributeDef::new("headShape", ["round", "square", "octagon"]).unwrap(),
                AttributeDef::new("bodyShape", ["round", "square", "octagon"]).unwrap(),
                AttributeDef::new("isSmiling", ["true", "false"]).unwrap(),
                AttributeDef::new("holding", ["sword", "balloon", "flag"]).unwrap(),
                AttributeDef::new("jacketColor", ["red", "yellow", "green", "blue"]).unwrap(),
                AttributeDef::new("hasTie", ["yes", "no"]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn sel(attribute: &str, relation: Relation, value: &str) -> Vl1Selector {
        Vl1Selector {
            attribute: attribute.into(),
            relation,
            value: value.into(),
        }
    }

    #[test]
    fn parses_concept_c() {
        let s = emerald();
        let e = parse_vl1(
            "[headShape=round][jacketColor=red] v [headShape=square][holding=balloon]",
            &s,
        )
        .unwrap();
        assert_eq!(e.disjuncts.len(), 2);
        assert!(e.disjuncts.iter().all(|c| c.len() == 2));
        assert_eq!(e.disjuncts[1][1], sel("holding", Relation::Eq, "balloon"));
    }

    #[test]
    fn parses_single_selector_and_alternate_tokens() {
        let s = emerald();
        let e = parse_vl1("[hasTie=yes]", &s).unwrap();
        assert_eq!(e.disjuncts, vec![vec![sel("hasTie", Relation::Eq, "yes")]]);

        let e = parse_vl1(" [ holding != sword ] & [hasTie <= no] | [jacketColor>=green]", &s).unwrap();
        assert_eq!(e.disjuncts[0][0].relation, Relation::Ne);
        assert_eq!(e.disjuncts[0][1].relation, Relation::Le);
        assert_eq!(e.disjuncts[1][0].relation, Relation::Ge);

        let e = parse_vl1("[holding≠sword][jacketColor≦red] v [jacketColor≧blue]", &s).unwrap();
        assert_eq!(e.disjuncts[0][1].relation, Relation::Le);
        assert_eq!(e.disjuncts[1][0].relation, Relation::Ge);
    }

    #[test]
    fn rejects_value_outside_range() {
        let err = parse_vl1("[headShape=triangle]", &emerald()).unwrap_err();
        assert_eq!(
            err,
            Vl1Error::ValueNotInRange {
                attribute: "headShape".into(),
                value: "triangle".into()
            }
        );
    }

    #[test]
    fn reports_syntax_and_relation_errors() {
        let s = emerald();
        assert!(matches!(
            parse_vl1("[headShape=round", &s),
            Err(Vl1Error::Syntax { position: 16, .. })
        ));
        assert!(matches!(
            parse_vl1("[headShape=>round]", &s),
            Err(Vl1Error::UnknownRelation { position: 10, .. })
        ));
        assert!(matches!(
            parse_vl1("[headShape round]", &s),
            Err(Vl1Error::Syntax { .. })
        ));
        assert!(matches!(parse_vl1("", &s), Err(Vl1Error::Syntax { position: 0, .. })));
        assert!(matches!(
            parse_vl1("[hasTie=yes] v", &s),
            Err(Vl1Error::Syntax { .. })
        ));
        assert_eq!(
            parse_vl1("[tail=long]", &s).unwrap_err(),
            Vl1Error::UnknownAttribute("tail".into())
        );
    }

    #[test]
    fn expands_relations_by_declaration_order() {
        let s = emerald();
        let cases = [
            (sel("holding", Relation::Ne, "sword"), vec!["balloon", "flag"]),
            (sel("jacketColor", Relation::Eq, "red"), vec!["red"]),
            (sel("jacketColor", Relation::Lt, "green"), vec!["red", "yellow"]),
            (sel("jacketColor", Relation::Le, "green"), vec!["red", "yellow", "green"]),
            (sel("jacketColor", Relation::Gt, "green"), vec!["blue"]),
            (sel("jacketColor", Relation::Ge, "yellow"), vec!["yellow", "green", "blue"]),
        ];
        for (vl1, expected) in cases {
            let expanded = expand_selector(&vl1, &s).unwrap();
            assert_eq!(expanded, Selector::new(vl1.attribute.clone(), expected), "{vl1}");
        }
    }

    #[test]
    fn lowering_intersects_repeated_attributes() {
        let s = emerald();
        let c = lower_to_concept(&parse_vl1("[holding=sword][holding<>sword]", &s).unwrap(), &s).unwrap();
        assert_eq!(c.rules.len(), 1);
        assert!(c.rules[0].get("holding").unwrap().allowed.is_empty());
        assert_eq!(count_extension(&c, &s).unwrap(), 0);

        let c = lower_to_concept(&parse_vl1("[holding<>sword]", &s).unwrap(), &s).unwrap();
        assert_eq!(c.rules[0].get("holding").unwrap(), &Selector::new("holding", ["balloon", "flag"]));
        assert_eq!(count_extension(&c, &s).unwrap(), 288);
    }

    #[test]
    fn display_quotes_awkward_values() {
        let s = sel("a", Relation::Ne, "two words]\"");
        assert_eq!(s.to_string(), r#"[a<>"two words]\""]"#);
        let back = parse_vl1_unchecked(&s.to_string()).unwrap();
        assert_eq!(back.disjuncts[0][0], s);
        assert_eq!(sel("a", Relation::Eq, "=x").to_string(), r#"[a="=x"]"#);
    }
}
