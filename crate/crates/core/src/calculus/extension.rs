//! Set semantics of selectors, rules and concepts over the product universe.
//!
//! Every rule denotes a product set ("box"): per attribute, the allowed
//! positions (the whole range when the attribute is unconstrained). A concept
//! is a union of boxes. Enumeration merges the per-box lexicographic streams;
//! counting uses inclusion-exclusion over box intersections.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::types::{Concept, LabeledExample, ObjectInstance, Rule, Selector, UniverseSchema};
use super::valueset::ValueSet;
use super::CalculusError;

/// Default number of rules up to which counting uses inclusion-exclusion.
pub const DEFAULT_IE_RULE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    /// Concepts with more (non-empty) rules than this are counted by
    /// streaming enumeration instead of inclusion-exclusion.
    pub ie_rule_limit: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            ie_rule_limit: DEFAULT_IE_RULE_LIMIT,
        }
    }
}

fn object_value<'a>(
    object: &'a ObjectInstance,
    index: usize,
    schema: &UniverseSchema,
) -> Result<&'a str, CalculusError> {
    if object.values().len() != schema.attributes().len() {
        return Err(CalculusError::Arity {
            expected: schema.attributes().len(),
            found: object.values().len(),
        });
    }
    Ok(&object.values()[index])
}

pub fn selector_matches(
    selector: &Selector,
    object: &ObjectInstance,
    schema: &UniverseSchema,
) -> Result<bool, CalculusError> {
    let (index, _) = schema.lookup(&selector.attribute)?;
    let value = object_value(object, index, schema)?;
    Ok(selector.allowed.contains(value))
}

pub fn rule_matches(
    rule: &Rule,
    object: &ObjectInstance,
    schema: &UniverseSchema,
) -> Result<bool, CalculusError> {
    // Resolve every attribute first so that a mismatch is reported even when
    // an earlier conjunct already fails.
    let mut result = true;
    for selector in rule.selectors() {
        result &= selector_matches(selector, object, schema)?;
    }
    Ok(result)
}

pub fn concept_matches(
    concept: &Concept,
    object: &ObjectInstance,
    schema: &UniverseSchema,
) -> Result<bool, CalculusError> {
    let mut result = false;
    for rule in &concept.rules {
        result |= rule_matches(rule, object, schema)?;
    }
    Ok(result)
}

/// A rule's extension as a product of per-attribute position sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ProductSet {
    pub(crate) factors: Vec<ValueSet>,
}

impl ProductSet {
    pub fn full(schema: &UniverseSchema) -> Self {
        Self {
            factors: schema
                .attributes()
                .iter()
                .map(|a| ValueSet::full(a.range().len()))
                .collect(),
        }
    }

    pub fn from_rule(rule: &Rule, schema: &UniverseSchema) -> Result<Self, CalculusError> {
        let mut set = Self::full(schema);
        for selector in rule.selectors() {
            selector.validate(schema)?;
            let (index, attr) = schema.lookup(&selector.attribute)?;
            let mut allowed = ValueSet::empty(attr.range().len());
            for value in &selector.allowed {
                if let Some(pos) = attr.position(value) {
                    allowed.insert(pos);
                }
            }
            set.factors[index] = allowed;
        }
        Ok(set)
    }

    pub fn is_empty(&self) -> bool {
        self.factors.iter().any(ValueSet::is_empty)
    }

    pub fn cardinality(&self) -> u128 {
        self.factors.iter().map(|f| f.len() as u128).product()
    }

    pub fn intersect_with(&mut self, other: &ProductSet) {
        for (a, b) in self.factors.iter_mut().zip(&other.factors) {
            a.intersect_with(b);
        }
    }

    pub fn contains(&self, indices: &[usize]) -> bool {
        self.factors.iter().zip(indices).all(|(f, &i)| f.contains(i))
    }
}

/// A concept validated against a schema and reduced to its product sets.
#[derive(Debug, Clone)]
pub(crate) struct CompiledConcept {
    /// Non-empty boxes only; empty rules contribute nothing to the union.
    boxes: Vec<ProductSet>,
    full: ProductSet,
}

impl CompiledConcept {
    pub fn new(concept: &Concept, schema: &UniverseSchema) -> Result<Self, CalculusError> {
        let mut boxes = Vec::with_capacity(concept.rules.len());
        for rule in &concept.rules {
            let set = ProductSet::from_rule(rule, schema)?;
            if !set.is_empty() {
                boxes.push(set);
            }
        }
        Ok(Self {
            boxes,
            full: ProductSet::full(schema),
        })
    }

    pub fn contains(&self, indices: &[usize]) -> bool {
        self.boxes.iter().any(|b| b.contains(indices))
    }

    /// Exact union cardinality by inclusion-exclusion. Subsets whose
    /// intersection is already empty are pruned together with all their
    /// supersets. Returns `None` on arithmetic overflow.
    pub fn count_inclusion_exclusion(&self) -> Option<u128> {
        fn walk(boxes: &[ProductSet], start: usize, current: &ProductSet, depth: usize, acc: &mut i128) -> bool {
            for i in start..boxes.len() {
                let mut next = current.clone();
                next.intersect_with(&boxes[i]);
                if next.is_empty() {
                    continue;
                }
                let Ok(term) = i128::try_from(next.cardinality()) else {
                    return false;
                };
                // Odd-sized subsets add, even-sized subtract.
                let signed = if depth.is_multiple_of(2) { term } else { -term };
                match acc.checked_add(signed) {
                    Some(v) => *acc = v,
                    None => return false,
                }
                if !walk(boxes, i + 1, &next, depth + 1, acc) {
                    return false;
                }
            }
            true
        }

        let mut acc = 0i128;
        if !walk(&self.boxes, 0, &self.full, 0, &mut acc) {
            return None;
        }
        u128::try_from(acc).ok()
    }

    pub fn indices(&self) -> ExtensionIndices {
        ExtensionIndices::new(&self.boxes)
    }
}

/// Lexicographic odometer over one product set.
#[derive(Debug, Clone)]
struct BoxCursor {
    lists: Vec<Vec<usize>>,
    pos: Vec<usize>,
    done: bool,
}

impl BoxCursor {
    fn new(set: &ProductSet) -> Self {
        let lists: Vec<Vec<usize>> = set.factors.iter().map(ValueSet::positions).collect();
        let done = lists.iter().any(Vec::is_empty);
        Self {
            pos: vec![0; lists.len()],
            lists,
            done,
        }
    }

    fn current(&self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        Some(self.lists.iter().zip(&self.pos).map(|(l, &p)| l[p]).collect())
    }

    fn advance(&mut self) {
        for k in (0..self.pos.len()).rev() {
            if self.pos[k] + 1 < self.lists[k].len() {
                self.pos[k] += 1;
                return;
            }
            self.pos[k] = 0;
        }
        self.done = true;
    }
}

/// Merged, de-duplicated lexicographic stream of the union of product sets.
/// Memory is proportional to rules times attributes.
#[derive(Debug, Clone)]
pub(crate) struct ExtensionIndices {
    cursors: Vec<BoxCursor>,
    heap: BinaryHeap<Reverse<(Vec<usize>, usize)>>,
}

impl ExtensionIndices {
    fn new(boxes: &[ProductSet]) -> Self {
        let cursors: Vec<BoxCursor> = boxes.iter().map(BoxCursor::new).collect();
        let heap = cursors
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.current().map(|t| Reverse((t, i))))
            .collect();
        Self { cursors, heap }
    }

    fn step(&mut self, i: usize) {
        self.cursors[i].advance();
        if let Some(t) = self.cursors[i].current() {
            self.heap.push(Reverse((t, i)));
        }
    }
}

impl Iterator for ExtensionIndices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let Reverse((tuple, i)) = self.heap.pop()?;
        self.step(i);
        while let Some(Reverse((t, _))) = self.heap.peek() {
            if *t != tuple {
                break;
            }
            let Reverse((_, j)) = self.heap.pop().expect("peeked");
            self.step(j);
        }
        Some(tuple)
    }
}

/// Lexicographic odometer over the whole universe.
#[derive(Debug, Clone)]
pub(crate) struct UniverseIndices {
    sizes: Vec<usize>,
    pos: Vec<usize>,
    done: bool,
}

impl UniverseIndices {
    pub fn new(schema: &UniverseSchema) -> Self {
        let sizes: Vec<usize> = schema.attributes().iter().map(|a| a.range().len()).collect();
        Self {
            pos: vec![0; sizes.len()],
            done: sizes.contains(&0),
            sizes,
        }
    }
}

impl Iterator for UniverseIndices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.pos.clone();
        self.done = true;
        for k in (0..self.pos.len()).rev() {
            if self.pos[k] + 1 < self.sizes[k] {
                self.pos[k] += 1;
                self.done = false;
                break;
            }
            self.pos[k] = 0;
        }
        Some(out)
    }
}

/// Stream of the objects of a concept's extension in lexicographic order.
#[derive(Debug, Clone)]
pub struct Extension<'s> {
    inner: ExtensionIndices,
    schema: &'s UniverseSchema,
}

impl Iterator for Extension<'_> {
    type Item = ObjectInstance;

    fn next(&mut self) -> Option<ObjectInstance> {
        self.inner
            .next()
            .map(|t| ObjectInstance::from_indices(&t, self.schema))
    }
}

/// Stream of every object of a universe in lexicographic order.
#[derive(Debug, Clone)]
pub struct Universe<'s> {
    inner: UniverseIndices,
    schema: &'s UniverseSchema,
}

impl Iterator for Universe<'_> {
    type Item = ObjectInstance;

    fn next(&mut self) -> Option<ObjectInstance> {
        self.inner
            .next()
            .map(|t| ObjectInstance::from_indices(&t, self.schema))
    }
}

/// Stream of every universe object labeled against a concept.
#[derive(Debug, Clone)]
pub struct LabeledExamples<'s> {
    universe: UniverseIndices,
    concept: CompiledConcept,
    schema: &'s UniverseSchema,
}

impl Iterator for LabeledExamples<'_> {
    type Item = LabeledExample;

    fn next(&mut self) -> Option<LabeledExample> {
        let t = self.universe.next()?;
        Some(LabeledExample {
            positive: self.concept.contains(&t),
            object: ObjectInstance::from_indices(&t, self.schema),
        })
    }
}

pub fn universe(schema: &UniverseSchema) -> Universe<'_> {
    Universe {
        inner: UniverseIndices::new(schema),
        schema,
    }
}

pub fn enumerate_extension<'s>(
    concept: &Concept,
    schema: &'s UniverseSchema,
) -> Result<Extension<'s>, CalculusError> {
    let compiled = CompiledConcept::new(concept, schema)?;
    Ok(Extension {
        inner: compiled.indices(),
        schema,
    })
}

pub fn count_extension(concept: &Concept, schema: &UniverseSchema) -> Result<u128, CalculusError> {
    count_extension_with(concept, schema, CountOptions::default())
}

pub fn count_extension_with(
    concept: &Concept,
    schema: &UniverseSchema,
    options: CountOptions,
) -> Result<u128, CalculusError> {
    let compiled = CompiledConcept::new(concept, schema)?;
    if compiled.boxes.len() <= options.ie_rule_limit {
        if let Some(n) = compiled.count_inclusion_exclusion() {
            return Ok(n);
        }
    }
    Ok(compiled.indices().count() as u128)
}

/// Inclusion-exclusion count with no rule limit.
pub fn count_by_inclusion_exclusion(concept: &Concept, schema: &UniverseSchema) -> Result<u128, CalculusError> {
    let compiled = CompiledConcept::new(concept, schema)?;
    compiled
        .count_inclusion_exclusion()
        .ok_or(CalculusError::CountOverflow)
}

/// Count by walking the merged extension stream.
pub fn count_by_enumeration(concept: &Concept, schema: &UniverseSchema) -> Result<u128, CalculusError> {
    Ok(CompiledConcept::new(concept, schema)?.indices().count() as u128)
}

pub fn label_examples<'s>(
    concept: &Concept,
    schema: &'s UniverseSchema,
) -> Result<LabeledExamples<'s>, CalculusError> {
    Ok(LabeledExamples {
        universe: UniverseIndices::new(schema),
        concept: CompiledConcept::new(concept, schema)?,
        schema,
    })
}

/// The lexicographically first object in exactly one of two extensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Difference {
    pub object: ObjectInstance,
    /// True when the object belongs to the first concept only.
    pub in_first: bool,
}

pub fn first_difference(
    a: &Concept,
    b: &Concept,
    schema: &UniverseSchema,
) -> Result<Option<Difference>, CalculusError> {
    let mut left = CompiledConcept::new(a, schema)?.indices().peekable();
    let mut right = CompiledConcept::new(b, schema)?.indices().peekable();
    loop {
        let (in_first, t) = match (left.peek(), right.peek()) {
            (None, None) => return Ok(None),
            (Some(_), None) => (true, left.next()),
            (None, Some(_)) => (false, right.next()),
            (Some(x), Some(y)) => match x.cmp(y) {
                Ordering::Equal => {
                    left.next();
                    right.next();
                    continue;
                }
                Ordering::Less => (true, left.next()),
                Ordering::Greater => (false, right.next()),
            },
        };
        let t = t.expect("peeked");
        return Ok(Some(Difference {
            object: ObjectInstance::from_indices(&t, schema),
            in_first,
        }));
    }
}

/// Extension equality, decided by walking both lexicographic streams in lockstep.
pub fn equivalent(a: &Concept, b: &Concept, schema: &UniverseSchema) -> Result<bool, CalculusError> {
    Ok(first_difference(a, b, schema)?.is_none())
}
