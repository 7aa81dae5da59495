//! Alignment of corpus terms with ontology concepts and comparison of the
//! projected taxonomy against the expert ontology.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::Lexicon;
use crate::okmodel::OkOntology;
use crate::projection::Taxonomy;
use crate::text::{concept_id, word_tokens};

pub const DEFAULT_STOPWORDS: [&str; 13] = ["de", "du", "des", "d", "à", "au", "aux", "la", "le", "les", "l", "un", "une"];

/// Multiset of content tokens.
pub type Bag = BTreeMap<String, usize>;

/// Turns labels into content tokens: lowercase NFC words, optionally
/// replaced by their lexicon lemma, minus stopwords.
#[derive(Debug, Clone)]
pub struct LabelNormalizer {
    stopwords: BTreeSet<String>,
    lexicon: Option<Lexicon>,
}

impl Default for LabelNormalizer {
    fn default() -> Self {
        Self::with_stopwords(DEFAULT_STOPWORDS)
    }
}

impl LabelNormalizer {
    pub fn with_stopwords<S: AsRef<str>>(stopwords: impl IntoIterator<Item = S>) -> Self {
        Self {
            stopwords: stopwords.into_iter().flat_map(|s| word_tokens(s.as_ref())).collect(),
            lexicon: None,
        }
    }

    /// One stopword per line, `#` comments.
    pub fn parse_stopwords(src: &str) -> Self {
        Self::with_stopwords(
            src.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn with_lexicon(mut self, lexicon: Lexicon) -> Self {
        self.lexicon = Some(lexicon);
        self
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    /// Content tokens in label order.
    pub fn content_tokens(&self, label: &str) -> Vec<String> {
        let mut out = Vec::new();
        for token in word_tokens(label) {
            if self.stopwords.contains(&token) {
                continue;
            }
            let lemma = self
                .lexicon
                .as_ref()
                .and_then(|lx| lx.lookup(&token))
                .map(|e| word_tokens(&e.lemma))
                .unwrap_or_else(|| vec![token]);
            out.extend(lemma.into_iter().filter(|t| !self.stopwords.contains(t)));
        }
        out
    }

    pub fn normalize(&self, label: &str) -> Bag {
        let mut bag = Bag::new();
        for t in self.content_tokens(label) {
            *bag.entry(t).or_default() += 1;
        }
        bag
    }
}

/// Bag of content tokens with the default stopword list.
pub fn normalize_label(label: &str) -> Bag {
    LabelNormalizer::default().normalize(label)
}

/// `a` ⊊ `b` as multisets.
pub fn is_strict_sub_bag(a: &Bag, b: &Bag) -> bool {
    a != b && a.iter().all(|(t, n)| b.get(t).is_some_and(|m| m >= n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AlignmentKind {
    Exact,
    Declared,
    Ellipsis,
    Ambiguous,
    Unmatched,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub term: String,
    pub concept: Option<String>,
    pub kind: AlignmentKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<String>,
}

impl AlignmentResult {
    fn resolved(term: &str, concept: String, kind: AlignmentKind) -> Self {
        Self {
            term: term.to_owned(),
            concept: Some(concept),
            kind,
            candidates: Vec::new(),
        }
    }

    fn ambiguous(term: &str, candidates: Vec<String>) -> Self {
        Self {
            term: term.to_owned(),
            concept: None,
            kind: AlignmentKind::Ambiguous,
            candidates,
        }
    }
}

/// Aligns terms against one ontology; concept bags are computed once.
pub struct Aligner<'a> {
    ontology: &'a OkOntology,
    normalizer: &'a LabelNormalizer,
    bags: Vec<(&'a str, Bag)>,
}

impl<'a> Aligner<'a> {
    pub fn new(ontology: &'a OkOntology, normalizer: &'a LabelNormalizer) -> Self {
        let bags = ontology
            .concepts
            .keys()
            .map(|name| (name.as_str(), normalizer.normalize(name)))
            .collect();
        Self {
            ontology,
            normalizer,
            bags,
        }
    }

    /// Head token: the first content token of the term.
    pub fn align(&self, term: &str) -> AlignmentResult {
        self.align_with_head(term, None)
    }

    /// As [`Aligner::align`], with the head given explicitly (a lemma or
    /// word of the term).
    pub fn align_with_head(&self, term: &str, head: Option<&str>) -> AlignmentResult {
        let key = concept_id(term);
        if let Some((_, concept)) = self.ontology.denotation.iter().find(|(t, _)| concept_id(t) == key) {
            return AlignmentResult::resolved(term, concept.clone(), AlignmentKind::Declared);
        }

        let tokens = self.normalizer.content_tokens(term);
        let bag = self.normalizer.normalize(term);
        let exact: Vec<&str> = self.bags.iter().filter(|(_, b)| *b == bag && !bag.is_empty()).map(|(n, _)| *n).collect();
        match exact.as_slice() {
            [one] => return AlignmentResult::resolved(term, (*one).to_owned(), AlignmentKind::Exact),
            [] => {}
            many => return AlignmentResult::ambiguous(term, many.iter().map(|s| s.to_string()).collect()),
        }

        let head = match head {
            Some(h) => self.normalizer.content_tokens(h).into_iter().next(),
            None => tokens.first().cloned(),
        };
        let Some(head) = head else {
            return self.unmatched(term);
        };
        let candidates: Vec<&str> = self
            .bags
            .iter()
            .filter(|(_, b)| b.contains_key(&head) && is_strict_sub_bag(&bag, b))
            .map(|(n, _)| *n)
            .collect();
        if candidates.is_empty() {
            return self.unmatched(term);
        }
        let deepest = candidates
            .iter()
            .copied()
            .max_by_key(|c| self.ontology.depth(c).unwrap_or(0))
            .expect("non-empty");
        let one_chain = candidates
            .iter()
            .all(|c| self.ontology.subsumes(c, deepest).unwrap_or(false));
        if one_chain {
            AlignmentResult::resolved(term, deepest.to_owned(), AlignmentKind::Ellipsis)
        } else {
            AlignmentResult::ambiguous(term, candidates.iter().map(|s| s.to_string()).collect())
        }
    }

    fn unmatched(&self, term: &str) -> AlignmentResult {
        AlignmentResult {
            term: term.to_owned(),
            concept: None,
            kind: AlignmentKind::Unmatched,
            candidates: Vec::new(),
        }
    }
}

/// Aligns one term with the default normalizer.
pub fn align_term(term: &str, ontology: &OkOntology) -> AlignmentResult {
    let normalizer = LabelNormalizer::default();
    Aligner::new(ontology, &normalizer).align(term)
}

/// Term → concept for every resolved alignment. Ambiguous terms are left
/// out and logged.
pub fn resolved_alignment<'r>(results: impl IntoIterator<Item = &'r AlignmentResult>) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    for r in results {
        match (&r.concept, r.kind) {
            (Some(c), _) => {
                map.insert(r.term.clone(), c.clone());
            }
            (None, AlignmentKind::Ambiguous) => {
                log::warn!("skipping ambiguous term \"{}\" (candidates: {})", r.term, r.candidates.join(", "))
            }
            (None, _) => {}
        }
    }
    map
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StructureVerdict {
    Agree,
    ParentElided,
    Conflict,
    Unaligned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyEntry {
    pub term: String,
    pub projected_parent: String,
    /// Ontology concept the term aligns with.
    pub concept: Option<String>,
    /// Genus chain of `concept`, nearest first.
    pub ok_parent_chain: Vec<String>,
    pub verdict: StructureVerdict,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub entries: Vec<DiscrepancyEntry>,
}

impl DiscrepancyReport {
    pub fn counts(&self) -> BTreeMap<StructureVerdict, usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.verdict).or_default() += 1;
        }
        out
    }

    pub fn entry(&self, term: &str) -> Option<&DiscrepancyEntry> {
        self.entries.iter().find(|e| e.term == term)
    }
}

/// One entry per projected concept that has a parent. A concept with
/// several parents keeps its most favourable verdict.
pub fn compare_structures(
    taxonomy: &Taxonomy,
    ontology: &OkOntology,
    alignments: &BTreeMap<String, AlignmentResult>,
) -> DiscrepancyReport {
    let aligned = |concept_id: &str| -> Option<String> {
        let c = taxonomy.concept(concept_id)?;
        std::iter::once(&c.label)
            .chain(c.denoting_terms.iter())
            .find_map(|t| alignments.get(t).and_then(|r| r.concept.clone()))
    };

    let mut entries = Vec::new();
    for concept in taxonomy.concepts.values() {
        let parents = taxonomy.parents(&concept.id);
        if parents.is_empty() {
            continue;
        }
        let own = aligned(&concept.id);
        let chain = own
            .as_deref()
            .and_then(|c| ontology.genus_chain(c).ok())
            .unwrap_or_default();
        let best = parents
            .iter()
            .map(|p| {
                let verdict = match (&own, aligned(p)) {
                    (Some(_), Some(ap)) => match chain.iter().position(|g| *g == ap) {
                        Some(0) => StructureVerdict::Agree,
                        Some(_) => StructureVerdict::ParentElided,
                        None => StructureVerdict::Conflict,
                    },
                    _ => StructureVerdict::Unaligned,
                };
                (verdict, *p)
            })
            .min()
            .expect("non-empty");
        entries.push(DiscrepancyEntry {
            term: concept.label.clone(),
            projected_parent: taxonomy.concept(best.1).map_or_else(|| best.1.to_owned(), |c| c.label.clone()),
            concept: own,
            ok_parent_chain: chain,
            verdict: best.0,
        });
    }
    DiscrepancyReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::okmodel::fixture::RELAIS_DSL;
    use crate::okmodel::parse_dsl;
    use crate::projection::Concept;

    fn fixture() -> OkOntology {
        parse_dsl(RELAIS_DSL).unwrap()
    }

    fn bag(items: &[&str]) -> Bag {
        let mut b = Bag::new();
        for i in items {
            *b.entry(i.to_string()).or_default() += 1;
        }
        b
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_label("relais de tension"), bag(&["relais", "tension"]));
        assert_eq!(normalize_label("Relais à seuil de tension"), bag(&["relais", "seuil", "tension"]));
        assert_eq!(normalize_label("relais tout ou rien"), bag(&["relais", "tout", "ou", "rien"]));
        assert_eq!(normalize_label("l'état de l'art"), bag(&["état", "art"]));
    }

    #[test]
    fn lemmas_from_lexicon() {
        let lx = Lexicon::parse("électromagnétiques\télectromagnétique\tADJ\n").unwrap();
        let n = LabelNormalizer::default().with_lexicon(lx);
        assert_eq!(n.normalize("relais électromagnétiques"), bag(&["relais", "électromagnétique"]));
    }

    #[test]
    fn fixture_alignments() {
        let o = fixture();
        let r = align_term("relais de tension", &o);
        assert_eq!((r.kind, r.concept.as_deref()), (AlignmentKind::Ellipsis, Some("relais à seuil de tension")));
        let r = align_term("relais à seuil", &o);
        assert_eq!((r.kind, r.concept.as_deref()), (AlignmentKind::Exact, Some("relais à seuil")));
        let r = align_term("relais", &o);
        assert_eq!((r.kind, r.concept.as_deref()), (AlignmentKind::Exact, Some("relais")));
        let r = align_term("relais TOR", &o);
        assert_eq!((r.kind, r.concept.as_deref()), (AlignmentKind::Declared, Some("relais tout ou rien")));
        let r = align_term("relais de fréquence", &o);
        assert_eq!((r.kind, r.concept), (AlignmentKind::Unmatched, None));
        assert!(r.candidates.is_empty());
    }

    #[test]
    fn unrelated_candidates_are_ambiguous() {
        let src = "concept \"pompe\" root\naxis a values x, y\n\
                   concept \"pompe à eau froide\" genus \"pompe\" diff a=x\n\
                   concept \"pompe à eau chaude\" genus \"pompe\" diff a=y\n";
        let r = align_term("pompe à eau", &parse_dsl(src).unwrap());
        assert_eq!(r.kind, AlignmentKind::Ambiguous);
        assert_eq!(r.candidates, ["pompe à eau froide", "pompe à eau chaude"]);
    }

    #[test]
    fn head_must_occur_in_concept() {
        let o = fixture();
        // both <relais à seuil> and its child contain «seuil»: deepest wins
        let n = LabelNormalizer::default();
        let a = Aligner::new(&o, &n);
        let r = a.align_with_head("seuil", Some("seuil"));
        assert_eq!(r.concept.as_deref(), Some("relais à seuil de tension"));
        let r = a.align_with_head("tension", Some("courant"));
        assert_eq!(r.kind, AlignmentKind::Unmatched);
    }

    fn projected() -> Taxonomy {
        let c = |l: &str| Concept {
            id: l.into(),
            label: l.into(),
            denoting_terms: vec![l.into()],
        };
        let labels = ["relais", "relais de tension", "relais tout ou rien", "relais à seuil", "relais électromagnétique", "relais de fréquence"];
        Taxonomy::from_parts(
            labels.iter().map(|l| c(l)),
            labels[1..].iter().map(|l| (l.to_string(), "relais".to_string())),
        )
        .unwrap()
    }

    #[test]
    fn structure_comparison() {
        let o = fixture();
        let t = projected();
        let n = LabelNormalizer::default();
        let a = Aligner::new(&o, &n);
        let alignments: BTreeMap<_, _> = t.concepts.keys().map(|k| (k.clone(), a.align(k))).collect();
        let report = compare_structures(&t, &o, &alignments);
        assert_eq!(report.entries.len(), 5);
        let v = |t: &str| report.entry(t).unwrap().verdict;
        assert_eq!(v("relais de tension"), StructureVerdict::ParentElided);
        assert_eq!(v("relais tout ou rien"), StructureVerdict::Agree);
        assert_eq!(v("relais à seuil"), StructureVerdict::Agree);
        assert_eq!(v("relais électromagnétique"), StructureVerdict::Agree);
        assert_eq!(v("relais de fréquence"), StructureVerdict::Unaligned);
        assert_eq!(
            report.entry("relais de tension").unwrap().ok_parent_chain,
            ["relais à seuil", "relais"]
        );
        assert_eq!(report.counts().values().sum::<usize>(), 5);
    }

    #[test]
    fn inverted_parent_is_conflict() {
        let o = fixture();
        let c = |l: &str| Concept {
            id: l.into(),
            label: l.into(),
            denoting_terms: vec![],
        };
        let t = Taxonomy::from_parts([c("relais"), c("relais à seuil")], [("relais".to_string(), "relais à seuil".to_string())]).unwrap();
        let alignments: BTreeMap<_, _> = t.concepts.keys().map(|k| (k.clone(), align_term(k, &o))).collect();
        let report = compare_structures(&t, &o, &alignments);
        assert_eq!(report.entries[0].verdict, StructureVerdict::Conflict);
    }
}
