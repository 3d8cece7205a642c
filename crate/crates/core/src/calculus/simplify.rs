use super::types::{Concept, Rule, UniverseSchema};
use super::CalculusError;

/// Whether `general`'s extension contains `specific`'s, judged pointwise:
/// every attribute `general` constrains is constrained at least as tightly
/// by `specific`.
fn subsumes(general: &Rule, specific: &Rule) -> bool {
    general.selectors().all(|g| {
        specific
            .get(&g.attribute)
            .is_some_and(|s| s.allowed.is_subset(&g.allowed))
    })
}

/// Returns an extension-equal concept without contradictory rules, vacuous
/// full-range constraints, or rules subsumed by another surviving rule.
/// Survivors keep their relative order; among mutually subsuming rules the
/// earliest survives.
pub fn simplify(concept: &Concept, schema: &UniverseSchema) -> Result<Concept, CalculusError> {
    concept.validate(schema)?;

    let mut cleaned: Vec<Rule> = Vec::with_capacity(concept.rules.len());
    for rule in &concept.rules {
        if rule.selectors().any(|s| s.allowed.is_empty()) {
            continue;
        }
        let mut rule = rule.clone();
        let vacuous: Vec<String> = rule
            .selectors()
            .filter(|s| {
                schema
                    .attribute(&s.attribute)
                    .is_some_and(|a| a.range().len() == s.allowed.len())
            })
            .map(|s| s.attribute.clone())
            .collect();
        for attr in vacuous {
            rule.remove(&attr);
        }
        cleaned.push(rule);
    }

    let mut kept: Vec<usize> = Vec::new();
    for (i, rule) in cleaned.iter().enumerate() {
        if kept.iter().any(|&k| subsumes(&cleaned[k], rule)) {
            continue;
        }
        kept.retain(|&k| !subsumes(rule, &cleaned[k]));
        kept.push(i);
    }
    kept.sort_unstable();

    Ok(Concept {
        name: concept.name.clone(),
        rules: kept.into_iter().map(|k| cleaned[k].clone()).collect(),
    })
}
