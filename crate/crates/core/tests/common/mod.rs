#![allow(dead_code)]

use std::path::PathBuf;

use attribcalc::calculus::{AttributeDef, Concept, Rule, Selector, UniverseSchema};
use attribcalc::vl1::{Relation, Vl1Expression, Vl1Selector};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub const EMERALD_NS: &str = "http://www.math-it.org/xml/2002/emerald.xsd";

/// The robots' attributes and ranges.
pub fn emerald() -> UniverseSchema {
    UniverseSchema::new(
        "emerald",
        EMERALD_NS,
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

/// "head is round and jacket is red, or head is square and is holding a balloon"
pub fn concept_c() -> Concept {
    Concept::new(vec![
        Rule::new().with("headShape", "round").with("jacketColor", "red"),
        Rule::new().with("headShape", "square").with("holding", "balloon"),
    ])
}

/// Every object of the universe as value strings, by nested products.
pub fn all_objects(s: &UniverseSchema) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![vec![]];
    for attr in s.attributes() {
        out = out
            .into_iter()
            .flat_map(|p| {
                attr.range().iter().map(move |v| {
                    let mut n = p.clone();
                    n.push(v.clone());
                    n
                })
            })
            .collect();
    }
    out
}

/// Membership by direct reading of the definitions on value strings.
pub fn brute_member(c: &Concept, s: &UniverseSchema, values: &[String]) -> bool {
    c.rules.iter().any(|r| {
        r.selectors().all(|sel| {
            let i = s.attribute_index(&sel.attribute).unwrap();
            sel.allowed.contains(&values[i])
        })
    })
}

pub fn brute_count(c: &Concept, s: &UniverseSchema) -> u128 {
    all_objects(s).iter().filter(|v| brute_member(c, s, v)).count() as u128
}

/// Direct evaluation of a VL1 expression on one object, comparing range
/// positions without going through selector expansion.
pub fn vl1_holds(e: &Vl1Expression, s: &UniverseSchema, values: &[String]) -> bool {
    e.disjuncts.iter().any(|conj| {
        conj.iter().all(|sel| {
            let i = s.attribute_index(&sel.attribute).unwrap();
            let attr = &s.attributes()[i];
            let here = attr.position(&values[i]).unwrap();
            let there = attr.position(&sel.value).unwrap();
            match sel.relation {
                Relation::Eq => here == there,
                Relation::Ne => here != there,
                Relation::Lt => here < there,
                Relation::Le => here <= there,
                Relation::Gt => here > there,
                Relation::Ge => here >= there,
            }
        })
    })
}

pub fn random_schema<R: Rng>(rng: &mut R) -> UniverseSchema {
    let n = rng.gen_range(0..=4);
    let attrs = (0..n)
        .map(|i| {
            let size = rng.gen_range(1..=4);
            AttributeDef::new(format!("a{i}"), (0..size).map(|v| format!("v{v}"))).unwrap()
        })
        .collect();
    UniverseSchema::new("toy", "urn:toy", attrs).unwrap()
}

/// A random rule; selectors may be empty, partial or full value sets.
pub fn random_rule<R: Rng>(rng: &mut R, s: &UniverseSchema) -> Rule {
    let mut rule = Rule::new();
    for attr in s.attributes() {
        if rng.gen_bool(0.5) {
            let allowed: Vec<&String> = attr.range().iter().filter(|_| rng.gen_bool(0.6)).collect();
            rule.constrain(Selector::new(attr.name(), allowed.into_iter().cloned()));
        }
    }
    rule
}

/// A random rule using only elementary selectors.
pub fn random_elementary_rule<R: Rng>(rng: &mut R, s: &UniverseSchema) -> Rule {
    let mut rule = Rule::new();
    for attr in s.attributes() {
        if rng.gen_bool(0.5) {
            rule.constrain(Selector::elementary(attr.name(), attr.range().choose(rng).unwrap().as_str()));
        }
    }
    rule
}

pub fn random_concept<R: Rng>(rng: &mut R, s: &UniverseSchema) -> Concept {
    let k = rng.gen_range(0..=5);
    Concept::new((0..k).map(|_| random_rule(rng, s)).collect())
}

pub fn random_vl1<R: Rng>(rng: &mut R, s: &UniverseSchema) -> Option<Vl1Expression> {
    if s.attributes().is_empty() {
        return None;
    }
    let disjuncts = (0..rng.gen_range(1..=3))
        .map(|_| {
            (0..rng.gen_range(1..=3))
                .map(|_| {
                    let attr = s.attributes().choose(rng).unwrap();
                    Vl1Selector {
                        attribute: attr.name().to_string(),
                        relation: *Relation::ALL.choose(rng).unwrap(),
                        value: attr.range().choose(rng).unwrap().clone(),
                    }
                })
                .collect()
        })
        .collect();
    Some(Vl1Expression { disjuncts })
}

/// Strips the listing's common indentation and prepends the XML declaration.
pub fn canonicalize_listing(text: &str) -> String {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let indent = lines
        .iter()
        .map(|l| l.len() - l.trim_start().len())
        .min()
        .unwrap_or(0);
    let mut out = String::from("<?xml version=\"1.0\"?>\n");
    for l in lines {
        out.push_str(l[indent..].trim_end());
        out.push('\n');
    }
    out
}
