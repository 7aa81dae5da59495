//! Ontologies by specific differentiation.
//!
//! Every concept except the root is defined by its genus (parent concept)
//! and one specific difference: a value on a differentiation axis. Axes
//! are closed sets of mutually exclusive values, so concepts form a strict
//! Porphyry tree in which siblings differentiated on the same axis are
//! disjoint. Attributes are grafted onto the tree for describing instances;
//! classes and sets group instances by the state of their attributes.

mod check;
mod dsl;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::concept_id;

pub use check::{Rule, Violation};
pub use dsl::parse_dsl;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Differentia {
    pub axis: String,
    pub value: String,
}

impl Differentia {
    pub fn new(axis: impl Into<String>, value: impl Into<String>) -> Self {
        Self {
            axis: axis.into(),
            value: value.into(),
        }
    }
}

impl fmt::Display for Differentia {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.axis, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "values")]
pub enum ValueType {
    Number,
    String,
    Enum(Vec<String>),
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueType::Number => f.write_str("number"),
            ValueType::String => f.write_str("string"),
            ValueType::Enum(values) => write!(f, "enum({})", values.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDef {
    pub name: String,
    pub value_type: ValueType,
}

/// An attribute value, either in an instance state or as a predicate literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Number(f64),
    Text(String),
}

impl AttrValue {
    fn conforms_to(&self, ty: &ValueType) -> bool {
        match (self, ty) {
            (AttrValue::Number(_), ValueType::Number) => true,
            (AttrValue::Text(_), ValueType::String) => true,
            (AttrValue::Text(s), ValueType::Enum(values)) => values.contains(s),
            _ => false,
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Number(n) => write!(f, "{n}"),
            AttrValue::Text(s) => write!(f, "\"{s}\""),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CmpOp {
    fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }
}

/// `attribute op literal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub attribute: String,
    pub op: CmpOp,
    pub value: AttrValue,
}

impl Comparison {
    /// False when the attribute is absent or of another kind than the literal.
    pub fn holds_on(&self, state: &BTreeMap<String, AttrValue>) -> bool {
        let ord = match (state.get(&self.attribute), &self.value) {
            (Some(AttrValue::Number(a)), AttrValue::Number(b)) => a.partial_cmp(b),
            (Some(AttrValue::Text(a)), AttrValue::Text(b)) => Some(a.cmp(b)),
            _ => None,
        };
        ord.is_some_and(|o| self.op.holds(o))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDef {
    pub name: String,
    pub base_concept: String,
    pub predicate: Vec<Comparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetDef {
    pub name: String,
    pub predicate: Vec<Comparison>,
}

fn conjunction_holds(predicate: &[Comparison], state: &BTreeMap<String, AttrValue>) -> bool {
    predicate.iter().all(|c| c.holds_on(state))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OkConcept {
    pub name: String,
    /// `None` only for the root.
    pub genus: Option<String>,
    /// Exactly one entry on a consistent non-root concept; kept as a list so
    /// that malformed input can be represented and reported.
    pub differentia: Vec<Differentia>,
    #[serde(default)]
    pub attributes: Vec<AttributeDef>,
}

impl OkConcept {
    pub fn is_root(&self) -> bool {
        self.genus.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub id: String,
    pub concept: String,
    #[serde(default)]
    pub state: BTreeMap<String, AttrValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Similarity {
    pub lca: String,
    pub shared: Vec<Differentia>,
    pub distinguishing: (Vec<Differentia>, Vec<Differentia>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub classes: Vec<String>,
    pub sets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OkOntology {
    pub name: String,
    pub axes: IndexMap<String, Axis>,
    /// Declaration order is kept; exports walk the tree in pre-order over it.
    pub concepts: IndexMap<String, OkConcept>,
    #[serde(default)]
    pub class_defs: Vec<ClassDef>,
    #[serde(default)]
    pub set_defs: Vec<SetDef>,
    /// Term label → concept name.
    #[serde(default)]
    pub denotation: BTreeMap<String, String>,
}

impl OkOntology {
    /// A one-concept ontology.
    pub fn with_root(name: impl Into<String>, root: impl Into<String>) -> Self {
        let root = root.into();
        let mut concepts = IndexMap::new();
        concepts.insert(
            root.clone(),
            OkConcept {
                name: root,
                genus: None,
                differentia: Vec::new(),
                attributes: Vec::new(),
            },
        );
        Self {
            name: name.into(),
            axes: IndexMap::new(),
            concepts,
            class_defs: Vec::new(),
            set_defs: Vec::new(),
            denotation: BTreeMap::new(),
        }
    }

    pub fn add_axis(&mut self, name: impl Into<String>, values: &[&str]) -> Result<()> {
        let name = name.into();
        if self.axes.contains_key(&name) {
            return Err(Error::DupName(name));
        }
        self.axes.insert(
            name.clone(),
            Axis {
                name,
                values: values.iter().map(|v| v.to_string()).collect(),
            },
        );
        Ok(())
    }

    pub fn concept(&self, name: &str) -> Option<&OkConcept> {
        self.concepts.get(name)
    }

    fn require(&self, name: &str) -> Result<&OkConcept> {
        self.concepts.get(name).ok_or_else(|| Error::UnknownConcept(name.to_owned()))
    }

    pub fn root(&self) -> Option<&OkConcept> {
        self.concepts.values().find(|c| c.is_root())
    }

    /// Children in declaration order.
    pub fn children(&self, name: &str) -> Vec<&OkConcept> {
        self.concepts
            .values()
            .filter(|c| c.genus.as_deref() == Some(name))
            .collect()
    }

    /// Concepts in pre-order from the root, children in declaration order.
    pub fn preorder(&self) -> Vec<&OkConcept> {
        let mut out = Vec::with_capacity(self.concepts.len());
        let mut stack: Vec<&OkConcept> = self.concepts.values().filter(|c| c.is_root()).rev().collect();
        let mut seen = BTreeSet::new();
        while let Some(c) = stack.pop() {
            if !seen.insert(c.name.as_str()) {
                continue;
            }
            out.push(c);
            stack.extend(self.children(&c.name).into_iter().rev());
        }
        out
    }

    /// Ancestors of `name`, nearest first (genus, genus of genus, …, root).
    pub fn genus_chain(&self, name: &str) -> Result<Vec<String>> {
        let mut chain = Vec::new();
        let mut seen = BTreeSet::from([name.to_owned()]);
        let mut current = self.require(name)?;
        while let Some(genus) = &current.genus {
            if !seen.insert(genus.clone()) {
                break;
            }
            chain.push(genus.clone());
            match self.concepts.get(genus) {
                Some(next) => current = next,
                None => break,
            }
        }
        Ok(chain)
    }

    pub fn depth(&self, name: &str) -> Result<usize> {
        Ok(self.genus_chain(name)?.len())
    }

    /// Differentiae from the root down to `name`.
    pub fn path_differentiae(&self, name: &str) -> Result<Vec<Differentia>> {
        let mut path: Vec<&str> = vec![name];
        let chain = self.genus_chain(name)?;
        path.extend(chain.iter().map(String::as_str));
        Ok(path
            .iter()
            .rev()
            .filter_map(|n| self.concepts.get(*n))
            .flat_map(|c| c.differentia.iter().cloned())
            .collect())
    }

    /// Attributes declared on `name` or inherited from its ancestors.
    pub fn visible_attributes(&self, name: &str) -> Result<Vec<&AttributeDef>> {
        let mut names = vec![name.to_owned()];
        names.extend(self.genus_chain(name)?);
        Ok(names
            .iter()
            .rev()
            .filter_map(|n| self.concepts.get(n))
            .flat_map(|c| c.attributes.iter())
            .collect())
    }

    /// True iff `general` is `specific` or one of its ancestors.
    pub fn subsumes(&self, general: &str, specific: &str) -> Result<bool> {
        self.require(general)?;
        if general == specific {
            self.require(specific)?;
            return Ok(true);
        }
        Ok(self.genus_chain(specific)?.iter().any(|g| g == general))
    }

    /// The concept and all of its descendants.
    pub fn descendants(&self, name: &str) -> Result<BTreeSet<String>> {
        self.require(name)?;
        let mut out = BTreeSet::new();
        for c in self.concepts.keys() {
            if self.subsumes(name, c)? {
                out.insert(c.clone());
            }
        }
        Ok(out)
    }

    /// Lowest common ancestor plus the shared and distinguishing differentiae.
    pub fn similarity(&self, c1: &str, c2: &str) -> Result<Similarity> {
        let mut line1 = vec![c1.to_owned()];
        line1.extend(self.genus_chain(c1)?);
        let mut line2 = vec![c2.to_owned()];
        line2.extend(self.genus_chain(c2)?);
        let lca = line1
            .iter()
            .find(|n| line2.contains(n))
            .cloned()
            .ok_or_else(|| Error::UnknownConcept(format!("no common ancestor for {c1} and {c2}")))?;

        let shared = self.path_differentiae(&lca)?;
        let below = |line: &[String]| -> Vec<Differentia> {
            let cut = line.iter().position(|n| *n == lca).unwrap_or(line.len());
            line[..cut]
                .iter()
                .rev()
                .filter_map(|n| self.concepts.get(n))
                .flat_map(|c| c.differentia.iter().cloned())
                .collect()
        };
        Ok(Similarity {
            shared,
            distinguishing: (below(&line1), below(&line2)),
            lca,
        })
    }

    /// Adds `name` under `genus` with one differentia. Only local checks are
    /// made; axis reuse along the path is left to `check_consistency`.
    pub fn define_concept(&self, name: &str, genus: &str, differentia: Differentia) -> Result<OkOntology> {
        if self.concepts.contains_key(name) {
            return Err(Error::DupName(name.to_owned()));
        }
        if !self.concepts.contains_key(genus) {
            return Err(Error::UnknownGenus(genus.to_owned()));
        }
        let axis = self
            .axes
            .get(&differentia.axis)
            .ok_or_else(|| Error::UnknownAxis(differentia.axis.clone()))?;
        if !axis.values.contains(&differentia.value) {
            return Err(Error::BadValue {
                axis: differentia.axis,
                value: differentia.value,
            });
        }
        let mut next = self.clone();
        next.concepts.insert(
            name.to_owned(),
            OkConcept {
                name: name.to_owned(),
                genus: Some(genus.to_owned()),
                differentia: vec![differentia],
                attributes: Vec::new(),
            },
        );
        Ok(next)
    }

    /// Attaches an attribute to a concept.
    pub fn add_attribute(&mut self, concept: &str, attribute: AttributeDef) -> Result<()> {
        let c = self
            .concepts
            .get_mut(concept)
            .ok_or_else(|| Error::UnknownConcept(concept.to_owned()))?;
        c.attributes.push(attribute);
        Ok(())
    }

    /// Concept denoted by a term: the denotation map first, then a concept
    /// whose normalized name equals the normalized term.
    pub fn resolve_label(&self, label: &str) -> Option<String> {
        let key = concept_id(label);
        self.denotation
            .iter()
            .find(|(term, _)| concept_id(term) == key)
            .map(|(_, c)| c.clone())
            .or_else(|| self.concepts.keys().find(|n| concept_id(n) == key).cloned())
    }

    /// Classes (same nature, predicate holds) and sets (predicate holds,
    /// whatever the nature) the instance belongs to.
    pub fn classify_object(&self, instance: &ObjectInstance) -> Result<Classification> {
        let visible = self.visible_attributes(&instance.concept)?;
        for (key, value) in &instance.state {
            let attr = visible.iter().find(|a| a.name == *key).ok_or_else(|| {
                Error::Type(format!("attribute `{key}` is not defined on <{}>", instance.concept))
            })?;
            if !value.conforms_to(&attr.value_type) {
                return Err(Error::Type(format!(
                    "{}: `{key}` expects {}, got {value}",
                    instance.id, attr.value_type
                )));
            }
        }
        let mut out = Classification::default();
        for class in &self.class_defs {
            let nature = self.concepts.contains_key(&class.base_concept) && self.subsumes(&class.base_concept, &instance.concept)?;
            if nature && conjunction_holds(&class.predicate, &instance.state) {
                out.classes.push(class.name.clone());
            }
        }
        for set in &self.set_defs {
            if conjunction_holds(&set.predicate, &instance.state) {
                out.sets.push(set.name.clone());
            }
        }
        Ok(out)
    }

    /// Groups of siblings differentiated on the same axis, keyed by
    /// (genus, axis), members in declaration order.
    pub fn axis_sibling_groups(&self) -> Vec<((String, String), Vec<&OkConcept>)> {
        let mut groups: IndexMap<(String, String), Vec<&OkConcept>> = IndexMap::new();
        for parent in self.preorder() {
            for child in self.children(&parent.name) {
                for d in &child.differentia {
                    groups
                        .entry((parent.name.clone(), d.axis.clone()))
                        .or_default()
                        .push(child);
                }
            }
        }
        groups.into_iter().collect()
    }

    pub fn check_consistency(&self) -> Vec<Violation> {
        check::check_consistency(self)
    }
}
