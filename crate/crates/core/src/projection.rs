//! Projection of the validated lexical network onto a concept taxonomy.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexnet::{find_cycle, LexNet, RelationKind, Status};
use crate::text::concept_id;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: String,
    pub label: String,
    pub denoting_terms: Vec<String>,
}

/// A DAG of concepts. Edges are stored as (child id, parent id).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub concepts: BTreeMap<String, Concept>,
    pub subsumption: BTreeSet<(String, String)>,
    pub roots: BTreeSet<String>,
}

impl Taxonomy {
    pub fn from_parts(concepts: impl IntoIterator<Item = Concept>, edges: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let concepts: BTreeMap<String, Concept> = concepts.into_iter().map(|c| (c.id.clone(), c)).collect();
        let subsumption: BTreeSet<(String, String)> = edges.into_iter().collect();
        for (child, parent) in &subsumption {
            for end in [child, parent] {
                if !concepts.contains_key(end) {
                    return Err(Error::UnknownConcept(end.clone()));
                }
            }
        }
        let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (child, parent) in &subsumption {
            adjacency.entry(child).or_default().push(parent);
        }
        if let Some(cycle) = find_cycle(&adjacency) {
            return Err(Error::Cycle(cycle.iter().map(|id| concepts[id].label.clone()).collect()));
        }
        let with_parent: BTreeSet<&String> = subsumption.iter().map(|(c, _)| c).collect();
        let roots = concepts.keys().filter(|id| !with_parent.contains(id)).cloned().collect();
        Ok(Self {
            concepts,
            subsumption,
            roots,
        })
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn parents(&self, id: &str) -> Vec<&str> {
        self.subsumption
            .iter()
            .filter(|(c, _)| c == id)
            .map(|(_, p)| p.as_str())
            .collect()
    }

    pub fn children(&self, id: &str) -> Vec<&str> {
        self.subsumption
            .iter()
            .filter(|(_, p)| p == id)
            .map(|(c, _)| c.as_str())
            .collect()
    }

    /// The concept plus every concept it subsumes.
    pub fn subsumed_closure(&self, concept_id: &str) -> Result<BTreeSet<String>> {
        if !self.concepts.contains_key(concept_id) {
            return Err(Error::UnknownConcept(concept_id.to_owned()));
        }
        let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (c, p) in &self.subsumption {
            children.entry(p).or_default().push(c);
        }
        let mut seen = BTreeSet::from([concept_id.to_owned()]);
        let mut queue = VecDeque::from([concept_id]);
        while let Some(node) = queue.pop_front() {
            for &child in children.get(node).map(Vec::as_slice).unwrap_or_default() {
                if seen.insert(child.to_owned()) {
                    queue.push_back(child);
                }
            }
        }
        Ok(seen)
    }

    /// Term label → id of the concept it denotes.
    pub fn term_alignment(&self) -> BTreeMap<String, String> {
        self.concepts
            .values()
            .flat_map(|c| c.denoting_terms.iter().map(move |t| (t.clone(), c.id.clone())))
            .collect()
    }

    /// Finds a concept by label or by one of its denoting terms.
    pub fn resolve_label(&self, label: &str) -> Option<String> {
        let key = concept_id(label);
        if self.concepts.contains_key(&key) {
            return Some(key);
        }
        self.concepts
            .values()
            .find(|c| c.denoting_terms.iter().any(|t| concept_id(t) == key))
            .map(|c| c.id.clone())
    }

    /// Graphviz rendering, parent → child.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph taxonomy {\n  rankdir=TB;\n  node [shape=box];\n");
        for c in self.concepts.values() {
            let _ = writeln!(out, "  \"{}\" [label=\"<{}>\"];", escape(&c.id), escape(&c.label));
        }
        for (child, parent) in &self.subsumption {
            let _ = writeln!(out, "  \"{}\" -> \"{}\";", escape(parent), escape(child));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index (lexicographically smaller label) as root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// One concept per validated term (validated synonyms collapse into one
/// concept), one subsumption edge per validated hyponymy edge.
pub fn project(lexnet: &LexNet) -> Result<Taxonomy> {
    if let Some(cycle) = lexnet.validated_hyponymy_cycle() {
        return Err(Error::Cycle(cycle));
    }
    let validated: Vec<&str> = lexnet
        .terms()
        .filter(|t| t.status == Status::Validated)
        .map(|t| t.label.as_str())
        .collect();
    let index: BTreeMap<&str, usize> = validated.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let live = |label: &str, status: Status| status == Status::Validated && index.contains_key(label);

    let mut classes = UnionFind::new(validated.len());
    for r in lexnet.relations_of(RelationKind::Synonymy) {
        if live(&r.source, r.status) && live(&r.target, r.status) {
            classes.union(index[r.source.as_str()], index[r.target.as_str()]);
        }
    }

    // Concept ids come from the representative label; representatives that
    // normalize to the same id share a concept.
    let mut term_concept: BTreeMap<&str, String> = BTreeMap::new();
    let mut concepts: BTreeMap<String, Concept> = BTreeMap::new();
    for (i, label) in validated.iter().enumerate() {
        let rep = validated[classes.find(i)];
        let id = concept_id(rep);
        let concept = concepts.entry(id.clone()).or_insert_with(|| Concept {
            id: id.clone(),
            label: rep.to_owned(),
            denoting_terms: Vec::new(),
        });
        concept.denoting_terms.push((*label).to_owned());
        term_concept.insert(label, id);
    }

    let mut edges = BTreeSet::new();
    for r in lexnet.relations_of(RelationKind::Hyponymy) {
        if live(&r.source, r.status) && live(&r.target, r.status) {
            let (child, parent) = (&term_concept[r.source.as_str()], &term_concept[r.target.as_str()]);
            if child != parent {
                edges.insert((child.clone(), parent.clone()));
            }
        }
    }
    Taxonomy::from_parts(concepts.into_values(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexnet::{apply_validation, build_network, parse_decisions, Evidence, LexicalRelation, Term};

    const FIG2: [&str; 5] = [
        "relais",
        "relais de tension",
        "relais à seuil",
        "relais tout ou rien",
        "relais électromagnétique",
    ];

    fn fig2_validated() -> LexNet {
        let terms = FIG2.iter().map(|l| Term::new(*l, "relais"));
        let rels = FIG2[1..].iter().map(|l| LexicalRelation::hyponymy(*l, "relais", Evidence::SameHead));
        let net = build_network(terms, rels, &[]).unwrap();
        let decisions: String = FIG2[1..]
            .iter()
            .map(|l| format!("validate relation hyponymy \"{l}\" \"relais\"\n"))
            .collect();
        apply_validation(&net, &parse_decisions(&decisions).unwrap()).unwrap()
    }

    #[test]
    fn fig3_projection() {
        let tax = project(&fig2_validated()).unwrap();
        assert_eq!(tax.concepts.len(), 5);
        assert_eq!(tax.roots, BTreeSet::from(["relais".to_string()]));
        let mut kids = tax.children("relais");
        kids.sort();
        assert_eq!(kids, ["relais de tension", "relais tout ou rien", "relais à seuil", "relais électromagnétique"]);
        assert_eq!(tax.subsumption.len(), 4);
    }

    #[test]
    fn empty_network_projects_to_empty_taxonomy() {
        let tax = project(&LexNet::default()).unwrap();
        assert!(tax.concepts.is_empty() && tax.subsumption.is_empty() && tax.roots.is_empty());
    }

    #[test]
    fn candidate_material_is_excluded() {
        let terms = [Term::new("a", "a"), Term::new("a b", "a")];
        let net = build_network(terms, [LexicalRelation::hyponymy("a b", "a", Evidence::SameHead)], &[]).unwrap();
        assert!(project(&net).unwrap().concepts.is_empty());
    }

    #[test]
    fn synonyms_collapse() {
        let terms = ["relais", "relais de tension", "relais voltmétrique"].map(|l| Term::new(l, "relais"));
        let rels = [
            LexicalRelation::hyponymy("relais de tension", "relais", Evidence::SameHead),
            LexicalRelation::hyponymy("relais voltmétrique", "relais", Evidence::SameHead),
        ];
        let net = build_network(terms, rels, &[("relais de tension".into(), "relais voltmétrique".into())]).unwrap();
        let decisions = parse_decisions(
            "validate relation hyponymy \"relais de tension\" \"relais\"\n\
             validate relation hyponymy \"relais voltmétrique\" \"relais\"\n\
             validate relation synonymy \"relais de tension\" \"relais voltmétrique\"\n",
        )
        .unwrap();
        let tax = project(&apply_validation(&net, &decisions).unwrap()).unwrap();
        assert_eq!(tax.concepts.len(), 2);
        assert_eq!(tax.subsumption.len(), 1);
        let c = tax.concept("relais de tension").unwrap();
        assert_eq!(c.denoting_terms, ["relais de tension", "relais voltmétrique"]);
        assert_eq!(tax.resolve_label("Relais voltmétrique").as_deref(), Some("relais de tension"));
    }

    #[test]
    fn validated_cycle_is_refused() {
        let terms = [Term::new("a", "a"), Term::new("b", "b")];
        let rels = [
            LexicalRelation::hyponymy("a", "b", Evidence::CopulaPattern),
            LexicalRelation::hyponymy("b", "a", Evidence::CopulaPattern),
        ];
        let net = build_network(terms, rels, &[]).unwrap();
        let net = apply_validation(
            &net,
            &parse_decisions("validate relation hyponymy \"a\" \"b\"\nvalidate relation hyponymy \"b\" \"a\"").unwrap(),
        )
        .unwrap();
        let err = project(&net).unwrap_err();
        assert_eq!(err.code(), "E_CYCLE");
        assert!(err.to_string().contains('a') && err.to_string().contains('b'));
    }

    #[test]
    fn closure_on_fig3() {
        let tax = project(&fig2_validated()).unwrap();
        assert_eq!(tax.subsumed_closure("relais à seuil").unwrap(), BTreeSet::from(["relais à seuil".to_string()]));
        assert_eq!(tax.subsumed_closure("relais").unwrap().len(), 5);
        assert_eq!(tax.subsumed_closure("nope").unwrap_err().code(), "E_UNKNOWN_CONCEPT");
    }

    #[test]
    fn dot_output_lists_edges() {
        let dot = project(&fig2_validated()).unwrap().to_dot();
        assert!(dot.contains("\"relais\" -> \"relais à seuil\";"));
        assert_eq!(dot.matches("->").count(), 4);
    }
}
