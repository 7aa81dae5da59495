//! Generators and brute-force oracles shared by the integration suites.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ontoterm::projection::{Concept, Taxonomy};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/relais")
}

pub fn fixture_dsl() -> String {
    std::fs::read_to_string(fixture_dir().join("relais.ok")).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic runner with `cases` cases and no failure persistence.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

/// Random DAG over `n` nodes: edges only from higher to lower index, so
/// acyclic by construction. Edges are (child, parent).
pub fn random_dag(rng: &mut impl Rng, n: usize, density: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for child in 1..n {
        for parent in 0..child {
            if rng.gen_bool(density) {
                edges.push((child, parent));
            }
        }
    }
    edges
}

/// Random tree: node i > 0 gets one parent below i.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|c| (c, rng.gen_range(0..c))).collect()
}

pub fn node(i: usize) -> String {
    format!("n{i:03}")
}

pub fn taxonomy_from(n: usize, edges: &[(usize, usize)]) -> Taxonomy {
    Taxonomy::from_parts(
        (0..n).map(|i| Concept {
            id: node(i),
            label: node(i),
            denoting_terms: vec![node(i)],
        }),
        edges.iter().map(|(c, p)| (node(*c), node(*p))),
    )
    .unwrap()
}

/// Floyd–Warshall reflexive transitive closure; `reach[a][b]` iff a is
/// reachable from b going down (a ⊑ b).
pub fn reach_matrix(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(c, p) in edges {
        r[c][p] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// One node of a generated ontology.
#[derive(Debug, Clone)]
pub struct GenConcept {
    pub name: String,
    pub parent: Option<usize>,
    pub axis: Option<String>,
    pub value: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GenOntology {
    pub dsl: String,
    pub concepts: Vec<GenConcept>,
    pub axes: Vec<(String, Vec<String>)>,
}

impl GenOntology {
    pub fn non_root(&self) -> usize {
        self.concepts.iter().filter(|c| c.parent.is_some()).count()
    }

    /// (parent, axis) → number of children.
    pub fn groups(&self) -> BTreeMap<(usize, String), usize> {
        let mut g = BTreeMap::new();
        for c in &self.concepts {
            if let (Some(p), Some(a)) = (c.parent, &c.axis) {
                *g.entry((p, a.clone())).or_default() += 1;
            }
        }
        g
    }

    pub fn sibling_pairs(&self) -> usize {
        self.groups().values().map(|k| k * (k - 1) / 2).sum()
    }

    pub fn disjoint_groups(&self) -> usize {
        self.groups().values().filter(|k| **k >= 2).count()
    }

    /// Differentiae from the root to `i`, as axis=value strings.
    pub fn path(&self, mut i: usize) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(p) = self.concepts[i].parent {
            out.push(format!("{}={}", self.concepts[i].axis.as_ref().unwrap(), self.concepts[i].value.as_ref().unwrap()));
            i = p;
        }
        out.reverse();
        out
    }
}

const WORDS: [&str; 12] = [
    "pompe", "vanne", "relais", "moteur", "capteur", "eau", "haute", "basse", "pression", "chaude", "froide", "tension",
];

/// A consistent ontology of up to `max` concepts: axes are never reused
/// along a path and siblings on one axis take distinct values.
pub fn random_ontology(rng: &mut impl Rng, max: usize) -> GenOntology {
    let axes: Vec<(String, Vec<String>)> = (0..rng.gen_range(2..=6))
        .map(|a| {
            let n = rng.gen_range(2..=4);
            (format!("axe{a}"), (0..n).map(|v| format!("v{v}")).collect())
        })
        .collect();
    let target = rng.gen_range(1..=max);
    let mut concepts = vec![GenConcept {
        name: "racine".into(),
        parent: None,
        axis: None,
        value: None,
    }];
    let mut used: BTreeSet<(usize, String, String)> = BTreeSet::new();
    let mut attempts = 0;
    while concepts.len() < target && attempts < target * 20 {
        attempts += 1;
        let parent = rng.gen_range(0..concepts.len());
        let mut on_path = BTreeSet::new();
        let mut cur = Some(parent);
        while let Some(i) = cur {
            if let Some(a) = &concepts[i].axis {
                on_path.insert(a.clone());
            }
            cur = concepts[i].parent;
        }
        let free: Vec<&(String, Vec<String>)> = axes.iter().filter(|(a, _)| !on_path.contains(a)).collect();
        let Some((axis, values)) = free.choose(rng) else { continue };
        let open: Vec<&String> = values
            .iter()
            .filter(|v| !used.contains(&(parent, axis.clone(), (*v).clone())))
            .collect();
        let Some(value) = open.choose(rng) else { continue };
        used.insert((parent, axis.clone(), (*value).clone()));
        let words: Vec<&str> = (0..rng.gen_range(1..=3)).map(|_| *WORDS.choose(rng).unwrap()).collect();
        concepts.push(GenConcept {
            name: format!("{} {}", words.join(" "), concepts.len()),
            parent: Some(parent),
            axis: Some(axis.clone()),
            value: Some((*value).clone()),
        });
    }

    let mut dsl = String::from("ontology \"gen\"\n");
    for (a, values) in &axes {
        dsl.push_str(&format!("axis {a} values {}\n", values.join(", ")));
    }
    for c in &concepts {
        match c.parent {
            None => dsl.push_str(&format!("concept \"{}\" root\n", c.name)),
            Some(p) => dsl.push_str(&format!(
                "concept \"{}\" genus \"{}\" diff {}={}\n",
                c.name,
                concepts[p].name,
                c.axis.as_ref().unwrap(),
                c.value.as_ref().unwrap()
            )),
        }
    }
    GenOntology { dsl, concepts, axes }
}

/// Random document annotations: each doc gets up to three concepts.
pub fn random_annotations(rng: &mut impl Rng, docs: usize, concepts: usize) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    for d in 0..docs {
        for _ in 0..rng.gen_range(0..=3) {
            out.push((format!("D{d:03}"), rng.gen_range(0..concepts)));
        }
    }
    out
}

/// Copies the fixture to a scratch directory with output under it.
pub fn scratch_fixture() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(&fixture_dir(), dir.path());
    let config = dir.path().join("pipeline.toml");
    (dir, config)
}

pub fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.path().is_dir() {
            if entry.file_name() != "out" {
                copy_dir(&entry.path(), &target);
            }
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}
