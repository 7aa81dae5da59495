//! Concept-indexed document retrieval over either concept structure.
//!
//! Documents are attached only to the concepts their terms denote; a query
//! on a concept collects the documents of every concept it subsumes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, TermCandidate};
use crate::error::{Error, Result};
use crate::okmodel::OkOntology;
use crate::projection::Taxonomy;

/// What retrieval needs from a concept structure.
pub trait ConceptStructure {
    /// Short name used in reports (`projected`, `ok`).
    fn structure_name(&self) -> &str;
    fn has_concept(&self, concept: &str) -> bool;
    /// The concept and everything it subsumes.
    fn closure(&self, concept: &str) -> Result<BTreeSet<String>>;
    fn resolve_label(&self, label: &str) -> Option<String>;
}

impl ConceptStructure for Taxonomy {
    fn structure_name(&self) -> &str {
        "projected"
    }

    fn has_concept(&self, concept: &str) -> bool {
        self.concepts.contains_key(concept)
    }

    fn closure(&self, concept: &str) -> Result<BTreeSet<String>> {
        self.subsumed_closure(concept)
    }

    fn resolve_label(&self, label: &str) -> Option<String> {
        Taxonomy::resolve_label(self, label)
    }
}

impl ConceptStructure for OkOntology {
    fn structure_name(&self) -> &str {
        "ok"
    }

    fn has_concept(&self, concept: &str) -> bool {
        self.concepts.contains_key(concept)
    }

    fn closure(&self, concept: &str) -> Result<BTreeSet<String>> {
        self.descendants(concept)
    }

    fn resolve_label(&self, label: &str) -> Option<String> {
        OkOntology::resolve_label(self, label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AnnotationSource {
    TermOccurrence,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DocAnnotation {
    pub doc_id: String,
    pub concept: String,
    pub source: AnnotationSource,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocIndex {
    pub structure: String,
    pub annotations: BTreeSet<DocAnnotation>,
}

impl DocIndex {
    pub fn new(structure: &dyn ConceptStructure) -> Self {
        Self {
            structure: structure.structure_name().to_owned(),
            annotations: BTreeSet::new(),
        }
    }

    pub fn annotate_manually(&mut self, structure: &dyn ConceptStructure, doc_id: &str, concept: &str) -> Result<()> {
        if !structure.has_concept(concept) {
            return Err(Error::UnknownConcept(concept.to_owned()));
        }
        self.annotations.insert(DocAnnotation {
            doc_id: doc_id.to_owned(),
            concept: concept.to_owned(),
            source: AnnotationSource::Manual,
        });
        Ok(())
    }

    /// Documents annotated directly with `concept`.
    pub fn direct_docs(&self, concept: &str) -> BTreeSet<String> {
        self.annotations
            .iter()
            .filter(|a| a.concept == concept)
            .map(|a| a.doc_id.clone())
            .collect()
    }

    pub fn annotated_docs(&self) -> BTreeSet<String> {
        self.annotations.iter().map(|a| a.doc_id.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexOutcome {
    pub index: DocIndex,
    /// Documents left without any annotation (warning `E_UNALIGNED_ONLY`).
    pub unaligned_only: Vec<String>,
}

/// Annotates each document with the concepts of the aligned terms occurring
/// in it. `alignment` maps term labels to concepts of `structure`.
pub fn index_corpus(
    corpus: &Corpus,
    candidates: &[TermCandidate],
    structure: &dyn ConceptStructure,
    alignment: &BTreeMap<String, String>,
) -> Result<IndexOutcome> {
    let mut index = DocIndex::new(structure);
    for candidate in candidates {
        let Some(concept) = alignment.get(&candidate.label()) else {
            continue;
        };
        if !structure.has_concept(concept) {
            return Err(Error::UnknownConcept(concept.clone()));
        }
        for occ in &candidate.occurrences {
            index.annotations.insert(DocAnnotation {
                doc_id: occ.doc_id.clone(),
                concept: concept.clone(),
                source: AnnotationSource::TermOccurrence,
            });
        }
    }
    let annotated = index.annotated_docs();
    let unaligned_only: Vec<String> = corpus
        .documents
        .iter()
        .filter(|d| !annotated.contains(&d.id))
        .map(|d| d.id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    for doc in &unaligned_only {
        log::warn!("E_UNALIGNED_ONLY: {doc} has no aligned term in the {} structure", structure.structure_name());
    }
    Ok(IndexOutcome { index, unaligned_only })
}

/// Documents annotated with `concept` or any concept it subsumes.
pub fn query(index: &DocIndex, structure: &dyn ConceptStructure, concept: &str) -> Result<BTreeSet<String>> {
    let closure = structure.closure(concept)?;
    Ok(index
        .annotations
        .iter()
        .filter(|a| closure.contains(&a.concept))
        .map(|a| a.doc_id.clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureResult {
    pub structure: String,
    pub concept: String,
    pub closure: BTreeSet<String>,
    pub docs: BTreeSet<String>,
}

/// Why a document was returned: the closure members it is annotated with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocExplanation {
    pub doc_id: String,
    pub matched_a: Vec<String>,
    pub matched_b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecallComparison {
    pub label: String,
    pub a: StructureResult,
    pub b: StructureResult,
    pub only_a: BTreeSet<String>,
    pub only_b: BTreeSet<String>,
    pub symmetric_difference: BTreeSet<String>,
    pub explanations: Vec<DocExplanation>,
}

fn run_side(index: &DocIndex, structure: &dyn ConceptStructure, label: &str) -> Result<StructureResult> {
    let concept = structure.resolve_label(label).ok_or_else(|| Error::Unresolvable {
        label: label.to_owned(),
        structure: structure.structure_name().to_owned(),
    })?;
    Ok(StructureResult {
        structure: structure.structure_name().to_owned(),
        closure: structure.closure(&concept)?,
        docs: query(index, structure, &concept)?,
        concept,
    })
}

fn matched(index: &DocIndex, doc: &str, closure: &BTreeSet<String>) -> Vec<String> {
    index
        .annotations
        .iter()
        .filter(|a| a.doc_id == doc && closure.contains(&a.concept))
        .map(|a| a.concept.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Runs the same labelled query on two structures and explains the
/// difference document by document.
pub fn compare_recall(
    index_a: &DocIndex,
    structure_a: &dyn ConceptStructure,
    index_b: &DocIndex,
    structure_b: &dyn ConceptStructure,
    label: &str,
) -> Result<RecallComparison> {
    let a = run_side(index_a, structure_a, label)?;
    let b = run_side(index_b, structure_b, label)?;
    let only_a: BTreeSet<String> = a.docs.difference(&b.docs).cloned().collect();
    let only_b: BTreeSet<String> = b.docs.difference(&a.docs).cloned().collect();
    let symmetric_difference = only_a.union(&only_b).cloned().collect();
    let explanations = a
        .docs
        .union(&b.docs)
        .map(|doc| DocExplanation {
            doc_id: doc.clone(),
            matched_a: matched(index_a, doc, &a.closure),
            matched_b: matched(index_b, doc, &b.closure),
        })
        .collect();
    Ok(RecallComparison {
        label: label.to_owned(),
        a,
        b,
        only_a,
        only_b,
        symmetric_difference,
        explanations,
    })
}
