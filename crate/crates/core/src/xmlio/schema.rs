//! XML Schema form of a universe: a root element holding unbounded `concept`
//! elements, each holding unbounded `rule` elements that declare one optional
//! attribute per universe attribute, typed by an enumerated simple type.

use std::collections::{BTreeMap, BTreeSet};

use super::document::{CONCEPT_ELEMENT, NAME_ATTRIBUTE, RULE_ELEMENT, XML_DECLARATION};
use super::xml::{self, escape_attribute, Element};
use super::SchemaError;
use crate::calculus::{AttributeDef, UniverseSchema};

pub const XSD_NAMESPACE: &str = "http://www.w3.org/2001/XMLSchema";

const BOOLEAN_RANGE: [&str; 2] = ["true", "false"];

fn is_boolean_range(attr: &AttributeDef) -> bool {
    attr.range().iter().map(String::as_str).eq(BOOLEAN_RANGE)
}

fn upper_first(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Simple-type names, one per attribute: the attribute name with its first
/// letter uppercased, suffixed with a counter when two attributes collide.
fn type_names(schema: &UniverseSchema) -> Vec<String> {
    let mut used = BTreeSet::new();
    schema
        .attributes()
        .iter()
        .map(|a| {
            let base = upper_first(a.name());
            let mut name = base.clone();
            let mut n = 2;
            while !used.insert(name.clone()) {
                name = format!("{base}_{n}");
                n += 1;
            }
            name
        })
        .collect()
}

struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn open(&mut self, text: &str) {
        self.line(text);
        self.depth += 1;
    }

    fn close(&mut self, text: &str) {
        self.depth -= 1;
        self.line(text);
    }
}

fn write_concept_element(w: &mut Writer, schema: &UniverseSchema, types: &[String], occurs: &str) {
    w.open(&format!("<xsd:element name=\"{CONCEPT_ELEMENT}\"{occurs}>"));
    w.open("<xsd:complexType>");
    w.open("<xsd:sequence>");
    w.open(&format!(
        "<xsd:element name=\"{RULE_ELEMENT}\" minOccurs=\"0\" maxOccurs=\"unbounded\">"
    ));
    if schema.attributes().is_empty() {
        w.line("<xsd:complexType/>");
    } else {
        w.open("<xsd:complexType>");
        for (attr, ty) in schema.attributes().iter().zip(types) {
            w.line(&format!("<xsd:attribute name=\"{}\" type=\"{ty}\"/>", attr.name()));
        }
        w.close("</xsd:complexType>");
    }
    w.close("</xsd:element>");
    w.close("</xsd:sequence>");
    w.line(&format!("<xsd:attribute name=\"{NAME_ATTRIBUTE}\" type=\"xsd:string\"/>"));
    w.close("</xsd:complexType>");
    w.close("</xsd:element>");
}

/// Emits the XML Schema describing concept documents over `schema`.
///
/// A universe named `concept` yields the bare template, whose root element
/// is the concept element itself.
pub fn generate_schema(schema: &UniverseSchema) -> String {
    let types = type_names(schema);
    let ns = escape_attribute(schema.namespace());
    let mut w = Writer {
        out: String::new(),
        depth: 0,
    };
    w.line(XML_DECLARATION);
    w.open(&format!(
        "<xsd:schema xmlns:xsd=\"{XSD_NAMESPACE}\" targetNamespace=\"{ns}\" xmlns=\"{ns}\" elementFormDefault=\"qualified\">"
    ));

    if schema.name() == CONCEPT_ELEMENT {
        write_concept_element(&mut w, schema, &types, "");
    } else {
        w.open(&format!("<xsd:element name=\"{}\">", schema.name()));
        w.open("<xsd:complexType>");
        w.open("<xsd:sequence minOccurs=\"0\" maxOccurs=\"unbounded\">");
        write_concept_element(&mut w, schema, &types, " minOccurs=\"0\" maxOccurs=\"unbounded\"");
        w.close("</xsd:sequence>");
        w.close("</xsd:complexType>");
        w.close("</xsd:element>");
    }

    for (attr, ty) in schema.attributes().iter().zip(&types) {
        w.open(&format!("<xsd:simpleType name=\"{ty}\">"));
        if is_boolean_range(attr) {
            w.open("<xsd:restriction base=\"xsd:boolean\">");
            for v in BOOLEAN_RANGE {
                w.line(&format!("<xsd:pattern value=\"{v}\"/>"));
            }
        } else {
            w.open("<xsd:restriction base=\"xsd:string\">");
            for v in attr.range() {
                w.line(&format!("<xsd:enumeration value=\"{}\"/>", escape_attribute(v)));
            }
        }
        w.close("</xsd:restriction>");
        w.close("</xsd:simpleType>");
    }
    w.close("</xsd:schema>");
    w.out
}

/// Resolves element names against the XML Schema namespace prefix in use.
struct Xsd {
    prefix: Option<String>,
}

impl Xsd {
    fn from_root(root: &Element) -> Result<Self, SchemaError> {
        let mut prefix = None;
        let mut found = false;
        for (attr, value) in &root.attributes {
            if value != XSD_NAMESPACE {
                continue;
            }
            if attr == "xmlns" {
                found = true;
                prefix = None;
                break;
            }
            if let Some(p) = attr.strip_prefix("xmlns:") {
                found = true;
                prefix = Some(p.to_string());
            }
        }
        if !found {
            return Err(SchemaError::NotASchema);
        }
        let xsd = Self { prefix };
        if !xsd.is(root, "schema") {
            return Err(SchemaError::NotASchema);
        }
        Ok(xsd)
    }

    fn is(&self, el: &Element, local: &str) -> bool {
        let (p, l) = el.split_name();
        l == local && p == self.prefix.as_deref()
    }

    fn children<'e>(&'e self, el: &'e Element, local: &'e str) -> impl Iterator<Item = &'e Element> + 'e {
        el.children.iter().filter(move |c| self.is(c, local))
    }

    /// Depth-first search for an element declaration with the given name.
    fn find_declaration<'e>(&self, el: &'e Element, name: &str) -> Option<&'e Element> {
        for child in &el.children {
            if self.is(child, "element") && child.attribute("name") == Some(name) {
                return Some(child);
            }
            if self.is(child, "complexType") || self.is(child, "sequence") {
                if let Some(found) = self.find_declaration(child, name) {
                    return Some(found);
                }
            }
        }
        None
    }

    /// Splits a type reference into whether it names a built-in XML Schema
    /// type and its local part.
    fn type_ref<'t>(&self, reference: &'t str) -> (bool, &'t str) {
        match reference.split_once(':') {
            Some((p, local)) => (Some(p) == self.prefix.as_deref(), local),
            None => (self.prefix.is_none(), reference),
        }
    }
}

fn required_attr<'e>(el: &'e Element, attribute: &'static str) -> Result<&'e str, SchemaError> {
    el.attribute(attribute).ok_or_else(|| SchemaError::MissingAttribute {
        element: el.name.clone(),
        attribute,
    })
}

/// Range declared by a simple type: enumeration facets over a string base,
/// or literal `true`/`false` pattern facets over a boolean base.
fn simple_type_range(xsd: &Xsd, el: &Element, type_name: &str) -> Result<Vec<String>, SchemaError> {
    let unsupported = |facet: &str| SchemaError::UnsupportedFacet {
        type_name: type_name.to_string(),
        facet: facet.to_string(),
    };
    let restriction = xsd
        .children(el, "restriction")
        .next()
        .ok_or_else(|| unsupported("missing restriction"))?;
    let base = required_attr(restriction, "base")?;
    let (builtin, base_local) = xsd.type_ref(base);
    let boolean = match (builtin, base_local) {
        (true, "string" | "token" | "NMTOKEN") => false,
        (true, "boolean") => true,
        _ => {
            return Err(SchemaError::UnsupportedBase {
                type_name: type_name.to_string(),
                base: base.to_string(),
            })
        }
    };
    let mut values = Vec::new();
    for facet in &restriction.children {
        let (_, local) = facet.split_name();
        match (boolean, local) {
            (false, "enumeration") => values.push(required_attr(facet, "value")?.to_string()),
            (true, "pattern") => {
                let v = required_attr(facet, "value")?;
                if !BOOLEAN_RANGE.contains(&v) {
                    return Err(unsupported(&format!("pattern {v:?}")));
                }
                values.push(v.to_string());
            }
            _ => return Err(unsupported(local)),
        }
    }
    if boolean && values.is_empty() {
        values = BOOLEAN_RANGE.iter().map(|s| s.to_string()).collect();
    }
    Ok(values)
}

/// Recovers a universe from a schema document in the concept-template shape.
/// Accepts the concept sequence either directly inside the root element's
/// complex type or wrapped in an additional unbounded sequence.
pub fn parse_schema(text: &str) -> Result<UniverseSchema, SchemaError> {
    let root = xml::parse(text)?;
    let xsd = Xsd::from_root(&root)?;
    let namespace = required_attr(&root, "targetNamespace")?.to_string();

    let mut simple_types: BTreeMap<&str, &Element> = BTreeMap::new();
    for st in xsd.children(&root, "simpleType") {
        let name = required_attr(st, "name")?;
        if simple_types.insert(name, st).is_some() {
            return Err(SchemaError::DuplicateType(name.to_string()));
        }
    }

    let top = xsd
        .children(&root, "element")
        .next()
        .ok_or(SchemaError::MissingDeclaration("root element"))?;
    let universe_name = required_attr(top, "name")?;
    let concept = if universe_name == CONCEPT_ELEMENT {
        top
    } else {
        xsd.find_declaration(top, CONCEPT_ELEMENT)
            .ok_or(SchemaError::MissingDeclaration(CONCEPT_ELEMENT))?
    };
    let rule = xsd
        .find_declaration(concept, RULE_ELEMENT)
        .ok_or(SchemaError::MissingDeclaration(RULE_ELEMENT))?;

    let mut attributes = Vec::new();
    if let Some(complex) = xsd.children(rule, "complexType").next() {
        for decl in xsd.children(complex, "attribute") {
            let name = required_attr(decl, "name")?;
            let range = match decl.attribute("type") {
                Some(reference) => {
                    let (builtin, local) = xsd.type_ref(reference);
                    let st = simple_types
                        .get(local)
                        .filter(|_| !builtin)
                        .ok_or_else(|| SchemaError::UndeclaredType {
                            attribute: name.to_string(),
                            type_name: reference.to_string(),
                        })?;
                    simple_type_range(&xsd, st, local)?
                }
                None => {
                    let st = xsd.children(decl, "simpleType").next().ok_or_else(|| {
                        SchemaError::MissingAttribute {
                            element: decl.name.clone(),
                            attribute: "type",
                        }
                    })?;
                    simple_type_range(&xsd, st, name)?
                }
            };
            attributes.push(AttributeDef::new(name, range)?);
        }
    }
    Ok(UniverseSchema::new(universe_name, namespace, attributes)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_attribute_schema() {
        let s = UniverseSchema::new("u", "urn:u", vec![AttributeDef::new("a", ["x", "y"]).unwrap()]).unwrap();
        let text = generate_schema(&s);
        assert_eq!(text.matches("<xsd:simpleType ").count(), 1);
        assert_eq!(text.matches("<xsd:enumeration ").count(), 2);
        assert!(text.contains("<xsd:simpleType name=\"A\">"));
        assert_eq!(parse_schema(&text).unwrap(), s);
    }

    #[test]
    fn boolean_range_uses_pattern_facets() {
        let s = UniverseSchema::new("u", "urn:u", vec![AttributeDef::new("flag", ["true", "false"]).unwrap()]).unwrap();
        let text = generate_schema(&s);
        assert!(text.contains("<xsd:restriction base=\"xsd:boolean\">"));
        assert_eq!(text.matches("<xsd:pattern ").count(), 2);
        assert_eq!(parse_schema(&text).unwrap(), s);

        // Reversed order is not the boolean shape.
        let s = UniverseSchema::new("u", "urn:u", vec![AttributeDef::new("flag", ["false", "true"]).unwrap()]).unwrap();
        assert!(generate_schema(&s).contains("base=\"xsd:string\""));
    }

    #[test]
    fn colliding_type_names_get_suffixes() {
        let s = UniverseSchema::new(
            "u",
            "urn:u",
            vec![
                AttributeDef::new("color", ["r"]).unwrap(),
                AttributeDef::new("Color", ["g"]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(type_names(&s), vec!["Color", "Color_2"]);
        assert_eq!(parse_schema(&generate_schema(&s)).unwrap(), s);
    }

    #[test]
    fn concept_rooted_template() {
        let s = UniverseSchema::new("concept", "http://www.math-it.org/xml/2002/concept.xsd", vec![
            AttributeDef::new("attribute_1", ["w_11", "w_1m"]).unwrap(),
        ])
        .unwrap();
        let text = generate_schema(&s);
        assert!(text.contains("\n  <xsd:element name=\"concept\">\n"));
        assert_eq!(parse_schema(&text).unwrap(), s);
    }

    #[test]
    fn unknown_type_and_facet_errors() {
        let base = |attr_type: &str, facet: &str| {
            format!(
                r#"<xsd:schema xmlns:xsd="http://www.w3.org/2001/XMLSchema" targetNamespace="urn:u">
                 <xsd:element name="u"><xsd:complexType><xsd:sequence>
                  <xsd:element name="concept"><xsd:complexType><xsd:sequence>
                   <xsd:element name="rule"><xsd:complexType>
                    <xsd:attribute name="a" type="{attr_type}"/>
                   </xsd:complexType></xsd:element>
                  </xsd:sequence></xsd:complexType></xsd:element>
                 </xsd:sequence></xsd:complexType></xsd:element>
                 <xsd:simpleType name="A"><xsd:restriction base="xsd:string">{facet}</xsd:restriction></xsd:simpleType>
                </xsd:schema>"#
            )
        };
        let ok = parse_schema(&base("A", r#"<xsd:enumeration value="x"/>"#)).unwrap();
        assert_eq!(ok.attributes()[0].range(), ["x"]);
        assert!(matches!(
            parse_schema(&base("B", r#"<xsd:enumeration value="x"/>"#)),
            Err(SchemaError::UndeclaredType { .. })
        ));
        assert!(matches!(
            parse_schema(&base("xsd:string", "")),
            Err(SchemaError::UndeclaredType { .. })
        ));
        assert!(matches!(
            parse_schema(&base("A", r#"<xsd:minLength value="1"/>"#)),
            Err(SchemaError::UnsupportedFacet { .. })
        ));
    }

    #[test]
    fn missing_rule_declaration() {
        let text = r#"<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema" targetNamespace="urn:u">
            <xs:element name="u"><xs:complexType><xs:sequence>
              <xs:element name="concept"/>
            </xs:sequence></xs:complexType></xs:element></xs:schema>"#;
        assert_eq!(parse_schema(text), Err(SchemaError::MissingDeclaration("rule")));
        assert_eq!(parse_schema("<schema/>"), Err(SchemaError::NotASchema));
    }
}
