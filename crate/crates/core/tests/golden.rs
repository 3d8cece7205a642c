//! Golden files: the robots' universe, the two-rule concept and the
//! published schema.

mod common;

use attribcalc::calculus::{count_extension, Concept, Rule, Selector};
use attribcalc::universe_def::{load_universe, parse_universe_definition};
use attribcalc::xmlio::xml::{self, Element};
use attribcalc::xmlio::{
    generate_schema, parse_document, parse_schema, serialize_document, validate_document,
    ConceptDocument, IssueCode, Severity,
};
use common::*;


/// Schema structure with simple-type names replaced by the ranges they
/// declare and the optional concept-name attribute dropped.
fn schema_signature(text: &str) -> String {
    let root = xml::parse(text).unwrap();
    let types: Vec<(String, Vec<String>)> = root
        .children
        .iter()
        .filter(|c| c.name == "xsd:simpleType")
        .map(|st| {
            let restriction = &st.children[0];
            let values = restriction
                .children
                .iter()
                .map(|f| f.attribute("value").unwrap().to_string())
                .collect();
            (st.attribute("name").unwrap().to_string(), values)
        })
        .collect();

    fn walk(el: &Element, types: &[(String, Vec<String>)], out: &mut String) {
        if el.name == "xsd:simpleType" {
            return;
        }
        if el.name == "xsd:attribute" && el.attribute("name") == Some("name") {
            return;
        }
        out.push('<');
        out.push_str(&el.name);
        for (k, v) in &el.attributes {
            if k.starts_with("xmlns") {
                continue;
            }
            if el.name == "xsd:attribute" && k == "type" {
                let range = &types.iter().find(|(n, _)| n == v).unwrap().1;
                out.push_str(&format!(" type={{{}}}", range.join("|")));
            } else {
                out.push_str(&format!(" {k}={v}"));
            }
        }
        out.push('>');
        for c in &el.children {
            walk(c, types, out);
        }
        out.push_str("</>");
    }
    let mut out = String::new();
    walk(&root, &types, &mut out);
    out
}

#[test]
fn universe_sources_agree() {
    let from_def = parse_universe_definition(&fixture("emerald.universe")).unwrap();
    let from_xsd = parse_schema(&fixture("emerald_reference.xsd")).unwrap();
    assert_eq!(from_def, emerald());
    assert_eq!(from_xsd, emerald());
    assert_eq!(load_universe(&fixture("emerald_reference.xsd")).unwrap(), emerald());
    assert_eq!(emerald().universe_size(), 432);
}

#[test]
fn reference_schema_ranges_in_order() {
    let s = parse_schema(&fixture("emerald_reference.xsd")).unwrap();
    let got: Vec<(&str, Vec<&str>)> = s
        .attributes()
        .iter()
        .map(|a| (a.name(), a.range().iter().map(String::as_str).collect()))
        .collect();
    assert_eq!(
        got,
        vec![
            ("headShape", vec!["round", "square", "octagon"]),
            ("bodyShape", vec!["round", "square", "octagon"]),
            ("isSmiling", vec!["true", "false"]),
            ("holding", vec!["sword", "balloon", "flag"]),
            ("jacketColor", vec!["red", "yellow", "green", "blue"]),
            ("hasTie", vec!["yes", "no"]),
        ]
    );
}

#[test]
fn generated_schema_matches_reference_structure() {
    let generated = generate_schema(&emerald());
    assert_eq!(
        schema_signature(&generated),
        schema_signature(&fixture("emerald_reference.xsd"))
    );
    assert_eq!(parse_schema(&generated).unwrap(), emerald());
    // Uniform type naming differs from the published "Color".
    assert!(generated.contains("<xsd:attribute name=\"jacketColor\" type=\"JacketColor\"/>"));
}

#[test]
fn concept_template_parses() {
    let s = parse_schema(&fixture("concept_template.xsd")).unwrap();
    assert_eq!(s.name(), "concept");
    assert_eq!(s.namespace(), "http://www.math-it.org/xml/2002/concept.xsd");
    let names: Vec<&str> = s.attributes().iter().map(|a| a.name()).collect();
    assert_eq!(names, ["attribute_1", "attribute_n"]);
    assert_eq!(s.attributes()[1].range(), ["w_n1", "w_nk"]);
    assert_eq!(parse_schema(&generate_schema(&s)).unwrap(), s);
}

#[test]
fn snippet_parses_to_concept_c() {
    let doc = parse_document(&fixture("concept_c_snippet.xml")).unwrap();
    assert!(doc.is_bare());
    assert_eq!(doc.concepts.len(), 1);
    let c = &doc.concepts[0];
    assert_eq!(c.rules.len(), 2);
    assert_eq!(c, &concept_c());
    assert_eq!(c.rules[1].get("holding"), Some(&Selector::elementary("holding", "balloon")));
    assert_eq!(count_extension(c, &emerald()).unwrap(), 84);
}

#[test]
fn snippet_reserializes_canonically() {
    let snippet = fixture("concept_c_snippet.xml");
    let doc = parse_document(&snippet).unwrap();
    let text = serialize_document(&doc, &emerald()).unwrap();
    assert_eq!(text, canonicalize_listing(&snippet));
    assert_eq!(
        text,
        "<?xml version=\"1.0\"?>\n<concept>\n  <rule headShape=\"round\" jacketColor=\"red\"/>\n  <rule headShape=\"square\" holding=\"balloon\"/>\n</concept>\n"
    );
}

#[test]
fn wrapped_document_round_trip() {
    let s = emerald();
    let doc = ConceptDocument::for_schema(&s)
        .with_concept(Concept { name: Some("C".into()), ..concept_c() })
        .with_concept(Concept::default());
    let text = serialize_document(&doc, &s).unwrap();
    assert!(text.starts_with(&format!("<?xml version=\"1.0\"?>\n<emerald xmlns=\"{EMERALD_NS}\">\n  <concept name=\"C\">\n")));
    assert_eq!(parse_document(&text).unwrap(), doc);
    assert_eq!(serialize_document(&parse_document(&text).unwrap(), &s).unwrap(), text);
}

#[test]
fn serialization_orders_attributes_by_declaration() {
    let s = emerald();
    let doc = parse_document(
        r#"<emerald><concept><rule hasTie="no" headShape="octagon" isSmiling="true"/></concept></emerald>"#,
    )
    .unwrap();
    let text = serialize_document(&doc, &s).unwrap();
    assert!(text.contains(r#"<rule headShape="octagon" isSmiling="true" hasTie="no"/>"#));
}

#[test]
fn validation_examples() {
    let s = emerald();
    let report = validate_document(&parse_document(&fixture("concept_c_snippet.xml")).unwrap(), &s);
    assert!(report.valid());
    assert!(report.issues.is_empty());

    let doc = parse_document(r#"<emerald><concept><rule jacketColor="purple"/></concept></emerald>"#).unwrap();
    let report = validate_document(&doc, &s);
    assert!(!report.valid());
    assert_eq!(report.issues.len(), 1);
    assert_eq!(report.issues[0].code, IssueCode::ValueOutOfRange);
    assert_eq!(
        report.issues[0].to_string().split(':').next().unwrap(),
        "ERROR /emerald/concept[1]/rule[1]/@jacketColor value-out-of-range"
    );

    let doc = parse_document("<emerald><concept/></emerald>").unwrap();
    let report = validate_document(&doc, &s);
    assert!(report.valid());
    assert_eq!(report.issues[0].severity, Severity::Warning);
    assert_eq!(report.issues[0].code, IssueCode::EmptyConcept);
}

#[test]
fn validation_structure_findings() {
    let s = emerald();
    let doc = parse_document(
        r#"<robots xmlns="urn:other" xmlns:x="urn:x">
             <concept name="a"><rule tail="long"/><rule hasTie="yes"/><rule hasTie="yes"/></concept>
             <concept name="a"><rule/></concept>
           </robots>"#,
    )
    .unwrap();
    let report = validate_document(&doc, &s);
    let codes: Vec<(Severity, IssueCode)> = report.issues.iter().map(|i| (i.severity, i.code)).collect();
    assert_eq!(
        codes,
        vec![
            (Severity::Error, IssueCode::RootNameMismatch),
            (Severity::Error, IssueCode::NamespaceMismatch),
            (Severity::Error, IssueCode::ForeignNamespace),
            (Severity::Error, IssueCode::UndeclaredAttribute),
            (Severity::Warning, IssueCode::DuplicateRule),
            (Severity::Warning, IssueCode::DuplicateConceptName),
        ]
    );
}

#[test]
fn programmatic_value_sets_are_flagged_and_expanded() {
    let s = emerald();
    let rule = Rule::from_selectors([Selector::new("holding", ["balloon", "flag"])]);
    let doc = ConceptDocument::for_schema(&s).with_concept(Concept::new(vec![rule]));
    let report = validate_document(&doc, &s);
    assert!(report.valid());
    assert_eq!(report.issues[0].code, IssueCode::NonElementarySelector);

    let text = serialize_document(&doc, &s).unwrap();
    assert_eq!(text.matches("<rule ").count(), 2);
    let back = parse_document(&text).unwrap();
    assert!(attribcalc::calculus::equivalent(&doc.concepts[0], &back.concepts[0], &s).unwrap());
}
