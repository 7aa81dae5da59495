//! OWL 2 Functional Syntax and KIF serializations of an ontology.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::okmodel::{OkOntology, ValueType};
use crate::text::{strip_accents, word_tokens};

pub const DEFAULT_IRI: &str = "http://example.org/ontoterm#";

/// CamelCase local name: NFC, accents stripped, one capitalized chunk per
/// word. Names starting with a digit get a `C` prefix.
pub fn mangle(label: &str) -> String {
    camel(label, true)
}

fn camel(label: &str, upper_first: bool) -> String {
    let plain = strip_accents(&label.nfc().collect::<String>());
    let mut out = String::new();
    for (i, word) in word_tokens(&plain).iter().enumerate() {
        let mut chars = word.chars();
        if let Some(first) = chars.next() {
            if i == 0 && !upper_first {
                out.push(first);
            } else {
                out.extend(first.to_uppercase());
            }
            out.push_str(chars.as_str());
        }
    }
    if out.is_empty() {
        return if upper_first { "Concept".into() } else { "property".into() };
    }
    if out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, if upper_first { 'C' } else { 'p' });
    }
    out
}

/// Injective label → local name mapping over a fixed label set. Labels
/// sharing a mangled form are sorted; the first keeps it and the others get
/// `_2`, `_3`, … (mangled forms never contain `_`).
#[derive(Debug, Clone, Default)]
pub struct NameMangler {
    forward: BTreeMap<String, String>,
    reverse: BTreeMap<String, String>,
}

impl NameMangler {
    pub fn new<S: AsRef<str>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self::build(labels, true)
    }

    fn build<S: AsRef<str>>(labels: impl IntoIterator<Item = S>, upper_first: bool) -> Self {
        let unique: BTreeSet<String> = labels.into_iter().map(|l| l.as_ref().to_owned()).collect();
        let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for label in unique {
            groups.entry(camel(&label, upper_first)).or_default().push(label);
        }
        let mut m = Self::default();
        for (base, labels) in groups {
            for (i, label) in labels.into_iter().enumerate() {
                let name = if i == 0 { base.clone() } else { format!("{base}_{}", i + 1) };
                m.reverse.insert(name.clone(), label.clone());
                m.forward.insert(label, name);
            }
        }
        m
    }

    pub fn name(&self, label: &str) -> Option<&str> {
        self.forward.get(label).map(String::as_str)
    }

    pub fn label(&self, name: &str) -> Option<&str> {
        self.reverse.get(name).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

fn ensure_consistent(ontology: &OkOntology) -> Result<()> {
    let violations = ontology.check_consistency();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Inconsistent(violations))
    }
}

fn literal(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn xsd_range(ty: &ValueType) -> String {
    match ty {
        ValueType::Number => "xsd:decimal".into(),
        ValueType::String => "xsd:string".into(),
        ValueType::Enum(values) => {
            let lits: Vec<String> = values.iter().map(|v| format!("{}^^xsd:string", literal(v))).collect();
            format!("DataOneOf({})", lits.join(" "))
        }
    }
}

/// Class hierarchy, labels, differentia annotations, one `DisjointClasses`
/// per (genus, axis) group of two or more siblings, and data properties with
/// their declaring concepts as domain.
pub fn to_owl(ontology: &OkOntology, iri: &str) -> Result<String> {
    ensure_consistent(ontology)?;
    let order = ontology.preorder();
    let names = NameMangler::new(ontology.concepts.keys());
    let n = |c: &str| names.name(c).expect("every concept is mangled").to_owned();

    let mut out = String::new();
    let _ = writeln!(out, "Prefix(:=<{iri}>)");
    for (p, ns) in [
        ("owl", "http://www.w3.org/2002/07/owl#"),
        ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
        ("xml", "http://www.w3.org/XML/1998/namespace"),
        ("xsd", "http://www.w3.org/2001/XMLSchema#"),
        ("rdfs", "http://www.w3.org/2000/01/rdf-schema#"),
    ] {
        let _ = writeln!(out, "Prefix({p}:=<{ns}>)");
    }
    let ontology_iri = iri.trim_end_matches(['#', '/']);
    let _ = writeln!(out, "\nOntology(<{ontology_iri}>");
    out.push_str("Declaration(AnnotationProperty(:differentia))\n");
    for c in &order {
        let _ = writeln!(out, "Declaration(Class(:{}))", n(&c.name));
    }
    for c in &order {
        let _ = writeln!(out, "AnnotationAssertion(rdfs:label :{} {})", n(&c.name), literal(&c.name));
    }
    for c in &order {
        if let Some(g) = &c.genus {
            let _ = writeln!(out, "SubClassOf(:{} :{})", n(&c.name), n(g));
        }
    }
    for c in &order {
        for d in &c.differentia {
            let _ = writeln!(out, "AnnotationAssertion(:differentia :{} {})", n(&c.name), literal(&d.to_string()));
        }
    }
    for (_, members) in ontology.axis_sibling_groups() {
        if members.len() >= 2 {
            let list: Vec<String> = members.iter().map(|c| format!(":{}", n(&c.name))).collect();
            let _ = writeln!(out, "DisjointClasses({})", list.join(" "));
        }
    }

    let mut attributes: BTreeMap<&str, (Vec<&str>, Vec<&ValueType>)> = BTreeMap::new();
    for c in &order {
        for a in &c.attributes {
            let entry = attributes.entry(&a.name).or_default();
            entry.0.push(&c.name);
            if !entry.1.contains(&&a.value_type) {
                entry.1.push(&a.value_type);
            }
        }
    }
    let props = NameMangler::build(attributes.keys(), false);
    for (attr, (domains, types)) in &attributes {
        let p = props.name(attr).expect("every attribute is mangled");
        let _ = writeln!(out, "Declaration(DataProperty(:{p}))");
        let domain = match domains.as_slice() {
            [one] => format!(":{}", n(one)),
            many => format!("ObjectUnionOf({})", many.iter().map(|d| format!(":{}", n(d))).collect::<Vec<_>>().join(" ")),
        };
        let _ = writeln!(out, "DataPropertyDomain(:{p} {domain})");
        let range = match types.as_slice() {
            [one] => xsd_range(one),
            many => format!("DataUnionOf({})", many.iter().map(|t| xsd_range(t)).collect::<Vec<_>>().join(" ")),
        };
        let _ = writeln!(out, "DataPropertyRange(:{p} {range})");
    }
    out.push_str(")\n");
    Ok(out)
}

/// One implication per genus link, then one exclusion per pair of
/// siblings differentiated on the same axis.
pub fn kif_sentences(ontology: &OkOntology) -> Result<Vec<String>> {
    ensure_consistent(ontology)?;
    let names = NameMangler::new(ontology.concepts.keys());
    let n = |c: &str| names.name(c).expect("every concept is mangled").to_owned();
    let mut out = Vec::new();
    for c in ontology.preorder() {
        if let Some(g) = &c.genus {
            out.push(format!("(forall (?x) (=> ({} ?x) ({} ?x)))", n(&c.name), n(g)));
        }
    }
    for (_, members) in ontology.axis_sibling_groups() {
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                out.push(format!("(forall (?x) (not (and ({} ?x) ({} ?x))))", n(&a.name), n(&b.name)));
            }
        }
    }
    Ok(out)
}

pub fn to_kif(ontology: &OkOntology) -> Result<String> {
    Ok(kif_sentences(ontology)?.iter().map(|s| format!("{s}\n")).collect())
}
