//! Consistency rules of the differentiation model.
//!
//! R1 single root, tree shape, no cycles; R2 exactly one differentia per
//! non-root; R3 same-axis siblings carry distinct values; R4 an axis is used
//! at most once on any root-to-node path; R5 attributes are not redeclared
//! along a path; R6 class predicates only use visible attributes with
//! literals of the right type; R7 the denotation map targets existing
//! concepts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AttrValue, OkOntology, ValueType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    /// Names of the concepts (or classes, terms) involved.
    pub subjects: Vec<String>,
    pub message: String,
}

impl Violation {
    fn new(rule: Rule, subjects: Vec<String>, message: impl Into<String>) -> Self {
        Self {
            rule,
            subjects,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}

pub(super) fn check_consistency(o: &OkOntology) -> Vec<Violation> {
    let mut out = Vec::new();

    // R1
    let roots: Vec<&str> = o.concepts.values().filter(|c| c.is_root()).map(|c| c.name.as_str()).collect();
    if roots.len() != 1 {
        out.push(Violation::new(
            Rule::R1,
            roots.iter().map(|r| r.to_string()).collect(),
            format!("expected exactly one root, found {}", roots.len()),
        ));
    }
    let mut reported_cycles: BTreeSet<BTreeSet<String>> = BTreeSet::new();
    for c in o.concepts.values() {
        let Some(genus) = &c.genus else { continue };
        if !o.concepts.contains_key(genus) {
            out.push(Violation::new(Rule::R1, vec![c.name.clone()], format!("<{}> has undeclared genus <{genus}>", c.name)));
            continue;
        }
        // walk up until a root, an unknown genus, or a repeat
        let mut seen = vec![c.name.as_str()];
        let mut cur = genus.as_str();
        loop {
            if let Some(pos) = seen.iter().position(|n| *n == cur) {
                let cycle: BTreeSet<String> = seen[pos..].iter().map(|s| s.to_string()).collect();
                if seen[pos] == c.name && reported_cycles.insert(cycle.clone()) {
                    out.push(Violation::new(
                        Rule::R1,
                        cycle.iter().cloned().collect(),
                        format!("genus cycle through {}", seen[pos..].join(" -> ")),
                    ));
                }
                break;
            }
            seen.push(cur);
            match o.concepts.get(cur).and_then(|n| n.genus.as_deref()) {
                Some(next) => cur = next,
                None => break,
            }
        }
    }

    // R2
    for c in o.concepts.values().filter(|c| !c.is_root()) {
        if c.differentia.len() != 1 {
            out.push(Violation::new(
                Rule::R2,
                vec![c.name.clone()],
                format!("<{}> has {} differentiae, expected exactly one", c.name, c.differentia.len()),
            ));
        }
    }

    // R3
    let mut by_slot: BTreeMap<(&str, &str, &str), Vec<&str>> = BTreeMap::new();
    for c in o.concepts.values() {
        if let Some(genus) = &c.genus {
            for d in &c.differentia {
                by_slot.entry((genus, &d.axis, &d.value)).or_default().push(&c.name);
            }
        }
    }
    for ((genus, axis, value), siblings) in by_slot {
        if siblings.len() > 1 {
            out.push(Violation::new(
                Rule::R3,
                siblings.iter().map(|s| s.to_string()).collect(),
                format!("children of <{genus}> share {axis}={value}: {}", siblings.join(", ")),
            ));
        }
    }

    // R4: report the concept whose own differentia reuses an ancestor's axis
    for c in o.concepts.values() {
        let Ok(chain) = o.genus_chain(&c.name) else { continue };
        let ancestor_axes: BTreeSet<&str> = chain
            .iter()
            .filter_map(|a| o.concepts.get(a))
            .flat_map(|a| a.differentia.iter().map(|d| d.axis.as_str()))
            .collect();
        for d in &c.differentia {
            if ancestor_axes.contains(d.axis.as_str()) {
                out.push(Violation::new(
                    Rule::R4,
                    vec![c.name.clone()],
                    format!("<{}> differentiates again on axis `{}` already used above it", c.name, d.axis),
                ));
            }
        }
        let mut own = BTreeSet::new();
        for d in &c.differentia {
            if !own.insert(d.axis.as_str()) {
                out.push(Violation::new(Rule::R4, vec![c.name.clone()], format!("<{}> uses axis `{}` twice", c.name, d.axis)));
            }
        }
    }

    // R5
    for c in o.concepts.values() {
        let Ok(chain) = o.genus_chain(&c.name) else { continue };
        let inherited: BTreeSet<&str> = chain
            .iter()
            .filter_map(|a| o.concepts.get(a))
            .flat_map(|a| a.attributes.iter().map(|at| at.name.as_str()))
            .collect();
        let mut own = BTreeSet::new();
        for attr in &c.attributes {
            if inherited.contains(attr.name.as_str()) || !own.insert(attr.name.as_str()) {
                out.push(Violation::new(
                    Rule::R5,
                    vec![c.name.clone()],
                    format!("attribute `{}` on <{}> shadows a declaration on its path", attr.name, c.name),
                ));
            }
        }
    }

    // R6
    for class in &o.class_defs {
        let visible = match o.visible_attributes(&class.base_concept) {
            Ok(v) => v,
            Err(_) => {
                out.push(Violation::new(
                    Rule::R6,
                    vec![class.name.clone()],
                    format!("class `{}` ranges over undeclared concept <{}>", class.name, class.base_concept),
                ));
                continue;
            }
        };
        for cmp in &class.predicate {
            match visible.iter().find(|a| a.name == cmp.attribute) {
                None => out.push(Violation::new(
                    Rule::R6,
                    vec![class.name.clone()],
                    format!("class `{}` uses `{}`, not visible on <{}>", class.name, cmp.attribute, class.base_concept),
                )),
                Some(attr) => {
                    let ok = match (&attr.value_type, &cmp.value) {
                        (ValueType::Number, AttrValue::Number(_)) => true,
                        (ValueType::String, AttrValue::Text(_)) => true,
                        (ValueType::Enum(values), AttrValue::Text(v)) => values.contains(v),
                        _ => false,
                    };
                    if !ok {
                        out.push(Violation::new(
                            Rule::R6,
                            vec![class.name.clone()],
                            format!("class `{}` compares `{}` ({}) with {}", class.name, cmp.attribute, attr.value_type, cmp.value),
                        ));
                    }
                }
            }
        }
    }

    // R7
    for (term, concept) in &o.denotation {
        if !o.concepts.contains_key(concept) {
            out.push(Violation::new(
                Rule::R7,
                vec![term.clone()],
                format!("term \"{term}\" denotes undeclared concept <{concept}>"),
            ));
        }
    }

    out
}
