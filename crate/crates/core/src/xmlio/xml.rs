//! A small XML reader covering what concept and schema documents use: an
//! optional XML declaration, comments, elements, quoted attributes, and the
//! predefined entities plus numeric character references. DOCTYPE, CDATA and
//! processing instructions are rejected.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: {kind}")]
pub struct XmlError {
    pub position: Position,
    pub kind: XmlErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XmlErrorKind {
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEof(&'static str),
    #[error("expected {expected}, found {found:?}")]
    Unexpected { expected: &'static str, found: char },
    #[error("invalid name")]
    InvalidName,
    #[error("attribute {0:?} appears more than once")]
    DuplicateAttribute(String),
    #[error("attribute value must be quoted")]
    UnquotedAttribute,
    #[error("'<' is not allowed in attribute values")]
    LessThanInAttribute,
    #[error("unknown entity &{0};")]
    UnknownEntity(String),
    #[error("closing tag </{found}> does not match <{expected}>")]
    MismatchedTag { expected: String, found: String },
    #[error("{0} is not supported")]
    Unsupported(&'static str),
    #[error("content after the root element")]
    TrailingContent,
    #[error("no root element")]
    NoRoot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub attributes: Vec<(String, String)>,
    pub children: Vec<Element>,
    /// Non-whitespace character data directly inside this element.
    pub text: String,
    pub position: Position,
}

impl Element {
    pub fn attribute(&self, name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    /// Splits `prefix:local`; names without a colon have no prefix.
    pub fn split_name(&self) -> (Option<&str>, &str) {
        match self.name.split_once(':') {
            Some((p, l)) => (Some(p), l),
            None => (None, &self.name),
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == ':'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | ':' | '-' | '.')
}

impl<'a> Reader<'a> {
    fn position(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn err(&self, kind: XmlErrorKind) -> XmlError {
        XmlError {
            position: self.position(),
            kind,
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    fn advance(&mut self, s: &str) {
        for _ in s.chars() {
            self.bump();
        }
    }

    fn expect(&mut self, c: char, what: &'static str) -> Result<(), XmlError> {
        match self.peek() {
            Some(found) if found == c => {
                self.bump();
                Ok(())
            }
            Some(found) => Err(self.err(XmlErrorKind::Unexpected {
                expected: what,
                found,
            })),
            None => Err(self.err(XmlErrorKind::UnexpectedEof(what))),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn name(&mut self) -> Result<String, XmlError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if is_name_start(c) => {
                self.bump();
            }
            Some(_) => return Err(self.err(XmlErrorKind::InvalidName)),
            None => return Err(self.err(XmlErrorKind::UnexpectedEof("a name"))),
        }
        while self.peek().is_some_and(is_name_char) {
            self.bump();
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn comment(&mut self) -> Result<(), XmlError> {
        self.advance("<!--");
        loop {
            if self.starts_with("-->") {
                self.advance("-->");
                return Ok(());
            }
            if self.bump().is_none() {
                return Err(self.err(XmlErrorKind::UnexpectedEof("'-->'")));
            }
        }
    }

    /// Skips whitespace and comments; rejects unsupported markup.
    fn misc(&mut self) -> Result<(), XmlError> {
        loop {
            self.skip_ws();
            if self.starts_with("<!--") {
                self.comment()?;
            } else if self.starts_with("<!DOCTYPE") {
                return Err(self.err(XmlErrorKind::Unsupported("DOCTYPE")));
            } else if self.starts_with("<?") {
                return Err(self.err(XmlErrorKind::Unsupported("processing instruction")));
            } else {
                return Ok(());
            }
        }
    }

    fn declaration(&mut self) -> Result<(), XmlError> {
        self.skip_ws();
        if !self.starts_with("<?xml") {
            return Ok(());
        }
        self.advance("<?xml");
        if !self.peek().is_some_and(char::is_whitespace) {
            return Err(self.err(XmlErrorKind::Unsupported("processing instruction")));
        }
        loop {
            if self.starts_with("?>") {
                self.advance("?>");
                return Ok(());
            }
            if self.bump().is_none() {
                return Err(self.err(XmlErrorKind::UnexpectedEof("'?>'")));
            }
        }
    }

    fn entity(&mut self) -> Result<char, XmlError> {
        let at = self.position();
        self.bump(); // '&'
        let start = self.pos;
        while self.peek().is_some_and(|c| c != ';' && c != '<' && c != '&' && !c.is_whitespace()) {
            self.bump();
        }
        let name = self.src[start..self.pos].to_string();
        if self.peek() != Some(';') {
            return Err(XmlError {
                position: at,
                kind: XmlErrorKind::UnknownEntity(name),
            });
        }
        self.bump();
        let decoded = match name.as_str() {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            n if n.starts_with("#x") => u32::from_str_radix(&n[2..], 16).ok().and_then(char::from_u32),
            n if n.starts_with('#') => n[1..].parse().ok().and_then(char::from_u32),
            _ => None,
        };
        decoded.ok_or(XmlError {
            position: at,
            kind: XmlErrorKind::UnknownEntity(name),
        })
    }

    fn attribute_value(&mut self) -> Result<String, XmlError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            Some(_) => return Err(self.err(XmlErrorKind::UnquotedAttribute)),
            None => return Err(self.err(XmlErrorKind::UnexpectedEof("attribute value"))),
        };
        self.bump();
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err(XmlErrorKind::UnexpectedEof("closing quote"))),
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(value);
                }
                Some('<') => return Err(self.err(XmlErrorKind::LessThanInAttribute)),
                Some('&') => value.push(self.entity()?),
                // Attribute-value normalization.
                Some('\t' | '\n' | '\r') => {
                    self.bump();
                    value.push(' ');
                }
                Some(c) => {
                    self.bump();
                    value.push(c);
                }
            }
        }
    }

    fn element(&mut self) -> Result<Element, XmlError> {
        let position = self.position();
        self.expect('<', "'<'")?;
        let name = self.name()?;
        let mut attributes: Vec<(String, String)> = Vec::new();
        loop {
            let had_ws = self.peek().is_some_and(char::is_whitespace);
            self.skip_ws();
            match self.peek() {
                Some('/') => {
                    self.bump();
                    self.expect('>', "'>'")?;
                    return Ok(Element {
                        name,
                        attributes,
                        children: Vec::new(),
                        text: String::new(),
                        position,
                    });
                }
                Some('>') => {
                    self.bump();
                    break;
                }
                Some(c) if is_name_start(c) && had_ws => {
                    let at = self.position();
                    let attr = self.name()?;
                    self.skip_ws();
                    self.expect('=', "'='")?;
                    self.skip_ws();
                    let value = self.attribute_value()?;
                    if attributes.iter().any(|(n, _)| *n == attr) {
                        return Err(XmlError {
                            position: at,
                            kind: XmlErrorKind::DuplicateAttribute(attr),
                        });
                    }
                    attributes.push((attr, value));
                }
                Some(found) => {
                    return Err(self.err(XmlErrorKind::Unexpected {
                        expected: "attribute, '>' or '/>'",
                        found,
                    }))
                }
                None => return Err(self.err(XmlErrorKind::UnexpectedEof("'>'"))),
            }
        }

        let mut children = Vec::new();
        let mut text = String::new();
        loop {
            if self.starts_with("</") {
                self.advance("</");
                let at = self.position();
                let closing = self.name()?;
                self.skip_ws();
                self.expect('>', "'>'")?;
                if closing != name {
                    return Err(XmlError {
                        position: at,
                        kind: XmlErrorKind::MismatchedTag {
                            expected: name,
                            found: closing,
                        },
                    });
                }
                let text = text.trim().to_string();
                return Ok(Element {
                    name,
                    attributes,
                    children,
                    text,
                    position,
                });
            } else if self.starts_with("<!--") {
                self.comment()?;
            } else if self.starts_with("<![CDATA[") {
                return Err(self.err(XmlErrorKind::Unsupported("CDATA section")));
            } else if self.starts_with("<!") {
                return Err(self.err(XmlErrorKind::Unsupported("markup declaration")));
            } else if self.starts_with("<?") {
                return Err(self.err(XmlErrorKind::Unsupported("processing instruction")));
            } else if self.starts_with("<") {
                children.push(self.element()?);
            } else {
                match self.peek() {
                    None => return Err(self.err(XmlErrorKind::UnexpectedEof("closing tag"))),
                    Some('&') => text.push(self.entity()?),
                    Some(c) => {
                        self.bump();
                        text.push(c);
                    }
                }
            }
        }
    }
}

/// Parses a complete document and returns its root element.
pub fn parse(src: &str) -> Result<Element, XmlError> {
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let mut reader = Reader {
        src,
        pos: 0,
        line: 1,
        column: 1,
    };
    reader.declaration()?;
    reader.misc()?;
    if reader.peek().is_none() {
        return Err(reader.err(XmlErrorKind::NoRoot));
    }
    if reader.peek() != Some('<') {
        return Err(reader.err(XmlErrorKind::Unexpected {
            expected: "'<'",
            found: reader.peek().unwrap_or(' '),
        }));
    }
    let root = reader.element()?;
    reader.misc()?;
    if reader.peek().is_some() {
        return Err(reader.err(XmlErrorKind::TrailingContent));
    }
    Ok(root)
}

/// Escapes text for use inside a double-quoted attribute value.
pub fn escape_attribute(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}
