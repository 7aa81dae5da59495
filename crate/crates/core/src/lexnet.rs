//! The lexical network: terms, typed lexical relations with evidence, and
//! the expert validation workflow.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedToken, Pos, TermCandidate};
use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    #[default]
    Candidate,
    Validated,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RelationKind {
    Hyponymy,
    Synonymy,
    Meronymy,
}

impl FromStr for RelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "hyponymy" => Ok(RelationKind::Hyponymy),
            "synonymy" => Ok(RelationKind::Synonymy),
            "meronymy" => Ok(RelationKind::Meronymy),
            _ => Err(format!("unknown relation kind `{s}`")),
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelationKind::Hyponymy => "hyponymy",
            RelationKind::Synonymy => "synonymy",
            RelationKind::Meronymy => "meronymy",
        })
    }
}

/// Where a relation came from. Variants are ordered by strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Evidence {
    SameHead,
    CopulaPattern,
    Declared,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub head: String,
    #[serde(default)]
    pub status: Status,
}

impl Term {
    pub fn new(label: impl Into<String>, head: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            head: head.into(),
            status: Status::Candidate,
        }
    }

    pub fn from_candidate(candidate: &TermCandidate) -> Self {
        Self::new(candidate.label(), candidate.head_lemma.clone())
    }
}

pub type RelationKey = (RelationKind, String, String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexicalRelation {
    pub kind: RelationKind,
    pub source: String,
    pub target: String,
    /// Strongest evidence seen for this edge.
    pub evidence: Evidence,
    /// Every evidence tag that produced this edge.
    pub evidence_all: BTreeSet<Evidence>,
    #[serde(default)]
    pub status: Status,
}

impl LexicalRelation {
    pub fn new(kind: RelationKind, source: impl Into<String>, target: impl Into<String>, evidence: Evidence) -> Self {
        Self {
            kind,
            source: source.into(),
            target: target.into(),
            evidence,
            evidence_all: BTreeSet::from([evidence]),
            status: Status::Candidate,
        }
    }

    pub fn hyponymy(source: impl Into<String>, target: impl Into<String>, evidence: Evidence) -> Self {
        Self::new(RelationKind::Hyponymy, source, target, evidence)
    }

    pub fn key(&self) -> RelationKey {
        (self.kind, self.source.clone(), self.target.clone())
    }

    fn reversed(&self) -> Self {
        Self {
            source: self.target.clone(),
            target: self.source.clone(),
            ..self.clone()
        }
    }

    fn absorb(&mut self, other: &LexicalRelation) {
        self.evidence_all.extend(other.evidence_all.iter().copied());
        self.evidence_all.insert(other.evidence);
        self.evidence = *self.evidence_all.iter().next_back().expect("non-empty evidence");
        if self.status == Status::Candidate {
            self.status = other.status;
        }
    }
}

/// Terms and their relations. Relations are keyed by (kind, source, target).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LexNetWire", into = "LexNetWire")]
pub struct LexNet {
    terms: BTreeMap<String, Term>,
    relations: BTreeMap<RelationKey, LexicalRelation>,
}

#[derive(Serialize, Deserialize)]
struct LexNetWire {
    terms: Vec<Term>,
    relations: Vec<LexicalRelation>,
}

impl From<LexNet> for LexNetWire {
    fn from(net: LexNet) -> Self {
        LexNetWire {
            terms: net.terms.into_values().collect(),
            relations: net.relations.into_values().collect(),
        }
    }
}

impl TryFrom<LexNetWire> for LexNet {
    type Error = Error;

    fn try_from(wire: LexNetWire) -> Result<Self> {
        let mut net = LexNet::default();
        for term in wire.terms {
            net.terms.entry(term.label.clone()).or_insert(term);
        }
        for rel in wire.relations {
            net.insert_relation(rel)?;
        }
        Ok(net)
    }
}

impl LexNet {
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.values()
    }

    pub fn term(&self, label: &str) -> Option<&Term> {
        self.terms.get(label)
    }

    pub fn relations(&self) -> impl Iterator<Item = &LexicalRelation> {
        self.relations.values()
    }

    pub fn relation(&self, kind: RelationKind, source: &str, target: &str) -> Option<&LexicalRelation> {
        self.relations.get(&(kind, source.to_owned(), target.to_owned()))
    }

    pub fn relations_of(&self, kind: RelationKind) -> impl Iterator<Item = &LexicalRelation> {
        self.relations.values().filter(move |r| r.kind == kind)
    }

    fn insert_relation(&mut self, rel: LexicalRelation) -> Result<()> {
        for end in [&rel.source, &rel.target] {
            if !self.terms.contains_key(end) {
                return Err(Error::UnknownTerm(end.clone()));
            }
        }
        if rel.source == rel.target {
            return Ok(());
        }
        let reverse = (rel.kind == RelationKind::Synonymy).then(|| rel.reversed());
        for r in std::iter::once(rel).chain(reverse) {
            match self.relations.get_mut(&r.key()) {
                Some(existing) => existing.absorb(&r),
                None => {
                    self.relations.insert(r.key(), r);
                }
            }
        }
        Ok(())
    }

    /// Hyponymy pairs asserted in both directions by non-rejected edges,
    /// reported once as (a, b) with a < b.
    pub fn contradictions(&self) -> Vec<(String, String)> {
        self.relations_of(RelationKind::Hyponymy)
            .filter(|r| r.status != Status::Rejected && r.source < r.target)
            .filter(|r| {
                self.relation(RelationKind::Hyponymy, &r.target, &r.source)
                    .is_some_and(|back| back.status != Status::Rejected)
            })
            .map(|r| (r.source.clone(), r.target.clone()))
            .collect()
    }

    /// A cycle in the validated hyponymy subgraph, if any, as the list of
    /// labels along it (first label repeated at the end).
    pub fn validated_hyponymy_cycle(&self) -> Option<Vec<String>> {
        let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for r in self.relations_of(RelationKind::Hyponymy) {
            if r.status == Status::Validated {
                adjacency.entry(&r.source).or_default().push(&r.target);
            }
        }
        find_cycle(&adjacency)
    }
}

/// Depth-first cycle search over a string-keyed adjacency map.
pub(crate) fn find_cycle(adjacency: &BTreeMap<&str, Vec<&str>>) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit<'a>(
        node: &'a str,
        adjacency: &BTreeMap<&'a str, Vec<&'a str>>,
        marks: &mut HashMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        marks.insert(node, Mark::Active);
        stack.push(node);
        for &next in adjacency.get(node).map(Vec::as_slice).unwrap_or_default() {
            match marks.get(next) {
                Some(Mark::Active) => {
                    let start = stack.iter().position(|n| *n == next).expect("active node on stack");
                    let mut cycle: Vec<String> = stack[start..].iter().map(|s| s.to_string()).collect();
                    cycle.push(next.to_owned());
                    return Some(cycle);
                }
                Some(Mark::Done) => {}
                None => {
                    if let Some(c) = visit(next, adjacency, marks, stack) {
                        return Some(c);
                    }
                }
            }
        }
        stack.pop();
        marks.insert(node, Mark::Done);
        None
    }

    let mut marks = HashMap::new();
    for &node in adjacency.keys() {
        if !marks.contains_key(node) {
            if let Some(c) = visit(node, adjacency, &mut marks, &mut Vec::new()) {
                return Some(c);
            }
        }
    }
    None
}

/// Hyponymy edges licensed by head sharing: a multi-lemma term whose head
/// is the full label of a shorter term is a hyponym of that term.
pub fn same_head_hyponyms(candidates: &[TermCandidate]) -> Vec<LexicalRelation> {
    let lengths: HashMap<String, usize> = candidates.iter().map(|c| (c.label(), c.lemmas.len())).collect();
    let mut edges = BTreeMap::new();
    for hyponym in candidates {
        let Some(&hypernym_len) = lengths.get(&hyponym.head_lemma) else {
            continue;
        };
        let label = hyponym.label();
        if hyponym.lemmas.len() > hypernym_len && label != hyponym.head_lemma {
            let rel = LexicalRelation::hyponymy(label, hyponym.head_lemma.clone(), Evidence::SameHead);
            edges.insert(rel.key(), rel);
        }
    }
    edges.into_values().collect()
}

const COPULAS: [&str; 2] = ["est", "sont"];

/// Longest known term whose lemma sequence matches `tokens` starting at
/// `start` (forward) or ending just before `start` (backward).
fn longest_term<'t>(terms: &'t [Vec<String>], tokens: &[AnnotatedToken], start: usize, forward: bool) -> Option<&'t [String]> {
    terms
        .iter()
        .filter(|t| {
            let n = t.len();
            let range = if forward {
                if start + n > tokens.len() {
                    return false;
                }
                start..start + n
            } else {
                if n > start {
                    return false;
                }
                start - n..start
            };
            tokens[range].iter().zip(t.iter()).all(|(tok, lemma)| tok.lemma == *lemma)
        })
        .max_by_key(|t| t.len())
        .map(Vec::as_slice)
}

/// Hyponymy edges from `DET? TermA est|sont DET? TermB` sentences. Terms are
/// given as lemma sequences; the longest known term on each side is used.
pub fn copula_relations(annotated_docs: &[Vec<AnnotatedToken>], known_terms: &[Vec<String>]) -> Vec<LexicalRelation> {
    let mut edges = BTreeMap::new();
    for tokens in annotated_docs {
        for (i, tok) in tokens.iter().enumerate() {
            if !COPULAS.contains(&tok.surface.to_lowercase().as_str()) {
                continue;
            }
            let Some(left) = longest_term(known_terms, tokens, i, false) else {
                continue;
            };
            let mut j = i + 1;
            let mut right = None;
            if j < tokens.len() && tokens[j].pos == Pos::Det {
                right = longest_term(known_terms, tokens, j + 1, true);
            }
            if right.is_none() {
                j = i + 1;
                right = longest_term(known_terms, tokens, j, true);
            }
            let Some(right) = right else {
                continue;
            };
            if left != right {
                let rel = LexicalRelation::hyponymy(left.join(" "), right.join(" "), Evidence::CopulaPattern);
                edges.insert(rel.key(), rel);
            }
        }
    }
    edges.into_values().collect()
}

/// Assembles a deduplicated network. Declared synonym pairs are added in
/// both directions with `DECLARED` evidence.
pub fn build_network(
    terms: impl IntoIterator<Item = Term>,
    relations: impl IntoIterator<Item = LexicalRelation>,
    synonym_declarations: &[(String, String)],
) -> Result<LexNet> {
    let mut net = LexNet::default();
    for term in terms {
        net.terms.entry(term.label.clone()).or_insert(term);
    }
    for rel in relations {
        net.insert_relation(rel)?;
    }
    for (a, b) in synonym_declarations {
        net.insert_relation(LexicalRelation::new(RelationKind::Synonymy, a.clone(), b.clone(), Evidence::Declared))?;
    }
    Ok(net)
}

/// Reads `a<TAB>b` synonym pairs (`#` comments).
pub fn parse_synonyms(src: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    let mut errors = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('\t') {
            Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
                pairs.push((a.trim().to_owned(), b.trim().to_owned()))
            }
            _ => errors.push(ParseError::syntax(idx + 1, "expected `term<TAB>term`")),
        }
    }
    if errors.is_empty() {
        Ok(pairs)
    } else {
        Err(Error::Parse(errors))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Validate,
    Reject,
}

impl Verdict {
    fn status(self) -> Status {
        match self {
            Verdict::Validate => Status::Validated,
            Verdict::Reject => Status::Rejected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Term {
        verdict: Verdict,
        label: String,
    },
    Relation {
        verdict: Verdict,
        kind: RelationKind,
        source: String,
        target: String,
    },
}

/// Splits a decision line into bare words and `"quoted"` labels.
fn decision_words(line: &str) -> std::result::Result<Vec<String>, String> {
    let mut words = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut word = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => word.push(ch),
                    None => return Err("unterminated quote".into()),
                }
            }
            words.push(word);
        } else {
            let mut word = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() {
                    break;
                }
                word.push(ch);
                chars.next();
            }
            words.push(word);
        }
    }
    Ok(words)
}

/// Parses `validate|reject term "<label>"` and
/// `validate|reject relation <kind> "<src>" "<dst>"` lines.
pub fn parse_decisions(src: &str) -> Result<Vec<Decision>> {
    let mut decisions = Vec::new();
    let mut errors = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let words = match decision_words(line) {
            Ok(w) => w,
            Err(msg) => {
                errors.push(ParseError::syntax(line_no, msg));
                continue;
            }
        };
        let verdict = match words.first().map(String::as_str) {
            Some("validate") => Verdict::Validate,
            Some("reject") => Verdict::Reject,
            _ => {
                errors.push(ParseError::syntax(line_no, "expected `validate` or `reject`"));
                continue;
            }
        };
        match (words.get(1).map(String::as_str), words.len()) {
            (Some("term"), 3) => decisions.push(Decision::Term {
                verdict,
                label: words[2].clone(),
            }),
            (Some("relation"), 5) => match words[2].parse() {
                Ok(kind) => decisions.push(Decision::Relation {
                    verdict,
                    kind,
                    source: words[3].clone(),
                    target: words[4].clone(),
                }),
                Err(msg) => errors.push(ParseError::syntax(line_no, msg)),
            },
            _ => errors.push(ParseError::syntax(
                line_no,
                "expected `term \"<label>\"` or `relation <kind> \"<src>\" \"<dst>\"`",
            )),
        }
    }
    if errors.is_empty() {
        Ok(decisions)
    } else {
        Err(Error::Parse(errors))
    }
}

/// Applies expert decisions in order. Validating a relation also validates
/// its still-undecided endpoint terms. Rejected terms then reject every
/// incident relation.
pub fn apply_validation(lexnet: &LexNet, decisions: &[Decision]) -> Result<LexNet> {
    let mut net = lexnet.clone();
    for decision in decisions {
        match decision {
            Decision::Term { verdict, label } => {
                let term = net
                    .terms
                    .get_mut(label)
                    .ok_or_else(|| Error::UnknownRef(format!("term \"{label}\"")))?;
                term.status = verdict.status();
            }
            Decision::Relation {
                verdict,
                kind,
                source,
                target,
            } => {
                let mut keys = vec![(*kind, source.clone(), target.clone())];
                if *kind == RelationKind::Synonymy {
                    keys.push((*kind, target.clone(), source.clone()));
                }
                for key in keys {
                    let rel = net.relations.get_mut(&key).ok_or_else(|| {
                        Error::UnknownRef(format!("relation {kind} \"{source}\" \"{target}\""))
                    })?;
                    rel.status = verdict.status();
                }
                if *verdict == Verdict::Validate {
                    for label in [source, target] {
                        if let Some(t) = net.terms.get_mut(label) {
                            if t.status == Status::Candidate {
                                t.status = Status::Validated;
                            }
                        }
                    }
                }
            }
        }
    }
    let rejected: BTreeSet<String> = net
        .terms
        .values()
        .filter(|t| t.status == Status::Rejected)
        .map(|t| t.label.clone())
        .collect();
    for rel in net.relations.values_mut() {
        if rejected.contains(&rel.source) || rejected.contains(&rel.target) {
            rel.status = Status::Rejected;
        }
    }
    Ok(net)
}

/// Summary shown to the expert after a validation pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub validated_terms: usize,
    pub rejected_terms: usize,
    pub validated_relations: usize,
    pub rejected_relations: usize,
    pub pending_relations: usize,
    /// Hyponymy asserted both ways (e.g. contradictory copula sentences).
    pub contradictions: Vec<(String, String)>,
    pub validated_cycle: Option<Vec<String>>,
}

impl ValidationReport {
    pub fn of(net: &LexNet) -> Self {
        let count_terms = |s| net.terms().filter(|t| t.status == s).count();
        let count_rels = |s| net.relations().filter(|r| r.status == s).count();
        Self {
            validated_terms: count_terms(Status::Validated),
            rejected_terms: count_terms(Status::Rejected),
            validated_relations: count_rels(Status::Validated),
            rejected_relations: count_rels(Status::Rejected),
            pending_relations: count_rels(Status::Candidate),
            contradictions: net.contradictions(),
            validated_cycle: net.validated_hyponymy_cycle(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{annotate, Document, Lexicon, LexiconEntry};

    fn cand(label: &str, head: &str) -> TermCandidate {
        TermCandidate {
            lemmas: label.split(' ').map(str::to_owned).collect(),
            pattern_id: "p".into(),
            head_lemma: head.into(),
            frequency: 1,
            occurrences: Vec::new(),
        }
    }

    fn fig2_candidates() -> Vec<TermCandidate> {
        vec![
            cand("relais", "relais"),
            cand("relais de tension", "relais"),
            cand("relais à seuil", "relais"),
            TermCandidate {
                lemmas: vec!["relais".into(), "tout ou rien".into()],
                ..cand("relais", "relais")
            },
            cand("relais électromagnétique", "relais"),
        ]
    }

    fn edges(rels: &[LexicalRelation]) -> Vec<(String, String)> {
        rels.iter().map(|r| (r.source.clone(), r.target.clone())).collect()
    }

    #[test]
    fn same_head_fig2() {
        let rels = same_head_hyponyms(&fig2_candidates());
        assert_eq!(rels.len(), 4);
        assert!(rels.iter().all(|r| r.target == "relais" && r.evidence == Evidence::SameHead));
        assert!(edges(&rels).contains(&("relais tout ou rien".into(), "relais".into())));
    }

    #[test]
    fn same_head_single_term() {
        assert!(same_head_hyponyms(&[cand("relais", "relais")]).is_empty());
    }

    #[test]
    fn same_head_is_flat() {
        let rels = same_head_hyponyms(&[
            cand("relais à seuil de tension", "relais"),
            cand("relais à seuil", "relais"),
            cand("relais", "relais"),
        ]);
        assert_eq!(
            edges(&rels),
            [
                ("relais à seuil".to_string(), "relais".to_string()),
                ("relais à seuil de tension".to_string(), "relais".to_string()),
            ]
        );
    }

    fn lexicon() -> Lexicon {
        let mut lex = Lexicon::new();
        for (s, l, p) in [
            ("un", "un", Pos::Det),
            ("une", "un", Pos::Det),
            ("relais", "relais", Pos::Noun),
            ("de", "de", Pos::Prep),
            ("à", "à", Pos::Prep),
            ("tension", "tension", Pos::Noun),
            ("turbine", "turbine", Pos::Noun),
            ("hélices", "hélices", Pos::Noun),
            ("kaplan", "kaplan", Pos::Adj),
            ("est", "être", Pos::Verb),
        ] {
            lex.insert(LexiconEntry {
                surface: s.into(),
                lemma: l.into(),
                pos: p,
            });
        }
        lex
    }

    fn copula(text: &str, terms: &[&str]) -> Vec<(String, String)> {
        let doc = Document {
            id: "d".into(),
            text: text.into(),
        };
        let tokens = annotate(&doc, &lexicon());
        let known: Vec<Vec<String>> = terms.iter().map(|t| t.split(' ').map(str::to_owned).collect()).collect();
        edges(&copula_relations(&[tokens], &known))
    }

    #[test]
    fn copula_sentence() {
        assert_eq!(
            copula("un relais de tension est un relais", &["relais", "relais de tension", "tension"]),
            [("relais de tension".to_string(), "relais".to_string())]
        );
    }

    #[test]
    fn copula_self_loop_dropped() {
        assert!(copula("un relais est un relais", &["relais"]).is_empty());
    }

    #[test]
    fn copula_kaplan() {
        assert_eq!(
            copula("Une turbine Kaplan est une turbine à hélices.", &["turbine kaplan", "turbine à hélices"]),
            [("turbine kaplan".to_string(), "turbine à hélices".to_string())]
        );
    }

    fn fig2_net() -> LexNet {
        let cands = fig2_candidates();
        build_network(cands.iter().map(Term::from_candidate), same_head_hyponyms(&cands), &[]).unwrap()
    }

    #[test]
    fn build_fig2() {
        let net = fig2_net();
        assert_eq!(net.terms().count(), 5);
        assert_eq!(net.relations_of(RelationKind::Hyponymy).count(), 4);
    }

    #[test]
    fn duplicate_edges_merge_evidence() {
        let terms = [Term::new("a b", "a"), Term::new("a", "a")];
        let net = build_network(
            terms,
            [
                LexicalRelation::hyponymy("a b", "a", Evidence::SameHead),
                LexicalRelation::hyponymy("a b", "a", Evidence::CopulaPattern),
                LexicalRelation::hyponymy("a b", "a", Evidence::SameHead),
            ],
            &[],
        )
        .unwrap();
        let rels: Vec<_> = net.relations().collect();
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].evidence, Evidence::CopulaPattern);
        assert_eq!(rels[0].evidence_all.len(), 2);
    }

    #[test]
    fn unknown_endpoint_is_an_error() {
        let err = build_network([Term::new("a", "a")], [LexicalRelation::hyponymy("a", "zz", Evidence::SameHead)], &[])
            .unwrap_err();
        assert_eq!(err.code(), "E_UNKNOWN_TERM");
        assert!(err.to_string().contains("zz"));
    }

    #[test]
    fn declared_synonyms_are_symmetric() {
        let net = build_network([Term::new("a", "a"), Term::new("b", "b")], [], &[("a".into(), "b".into())]).unwrap();
        assert!(net.relation(RelationKind::Synonymy, "a", "b").is_some());
        let back = net.relation(RelationKind::Synonymy, "b", "a").unwrap();
        assert_eq!(back.evidence, Evidence::Declared);
    }

    #[test]
    fn reject_term_cascades() {
        let net = build_network(
            [Term::new("xyzzy unit", "xyzzy"), Term::new("xyzzy", "xyzzy"), Term::new("unit", "unit")],
            [
                LexicalRelation::hyponymy("xyzzy unit", "xyzzy", Evidence::SameHead),
                LexicalRelation::new(RelationKind::Meronymy, "unit", "xyzzy unit", Evidence::Declared),
            ],
            &[],
        )
        .unwrap();
        let decisions = parse_decisions("reject term \"xyzzy unit\"\n").unwrap();
        let out = apply_validation(&net, &decisions).unwrap();
        assert_eq!(out.term("xyzzy unit").unwrap().status, Status::Rejected);
        assert_eq!(out.relations().filter(|r| r.status == Status::Rejected).count(), 2);
    }

    #[test]
    fn validate_fig2_edges() {
        let net = fig2_net();
        let src: String = net
            .relations()
            .map(|r| format!("validate relation hyponymy \"{}\" \"{}\"\n", r.source, r.target))
            .collect();
        let out = apply_validation(&net, &parse_decisions(&src).unwrap()).unwrap();
        assert_eq!(out.relations().filter(|r| r.status == Status::Validated).count(), 4);
        assert!(out.terms().all(|t| t.status == Status::Validated));
    }

    #[test]
    fn empty_decisions_are_identity() {
        let net = fig2_net();
        assert_eq!(apply_validation(&net, &parse_decisions("# nothing\n").unwrap()).unwrap(), net);
    }

    #[test]
    fn unknown_decision_reference() {
        let net = fig2_net();
        let err = apply_validation(&net, &parse_decisions("validate term \"nope\"").unwrap()).unwrap_err();
        assert_eq!(err.code(), "E_UNKNOWN_REF");
    }

    #[test]
    fn decision_syntax_errors_have_lines() {
        match parse_decisions("validate term \"a\"\nmaybe term \"b\"\nreject relation foo \"a\" \"b\"\n").unwrap_err() {
            Error::Parse(errs) => assert_eq!(errs.iter().map(|e| e.line).collect::<Vec<_>>(), [2, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn contradictions_and_cycles_are_reported() {
        let net = build_network(
            [Term::new("turbine kaplan", "turbine"), Term::new("turbine à hélices", "turbine")],
            [
                LexicalRelation::hyponymy("turbine kaplan", "turbine à hélices", Evidence::CopulaPattern),
                LexicalRelation::hyponymy("turbine à hélices", "turbine kaplan", Evidence::CopulaPattern),
            ],
            &[],
        )
        .unwrap();
        let report = ValidationReport::of(&net);
        assert_eq!(report.contradictions.len(), 1);
        assert!(report.validated_cycle.is_none());

        let all = parse_decisions(
            "validate relation hyponymy \"turbine kaplan\" \"turbine à hélices\"\n\
             validate relation hyponymy \"turbine à hélices\" \"turbine kaplan\"\n",
        )
        .unwrap();
        let validated = apply_validation(&net, &all).unwrap();
        assert_eq!(validated.validated_hyponymy_cycle().unwrap().len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let net = fig2_net();
        let json = serde_json::to_string(&net).unwrap();
        assert_eq!(serde_json::from_str::<LexNet>(&json).unwrap(), net);
    }
}
