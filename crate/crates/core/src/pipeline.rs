//! End-to-end run: every stage writes one JSON artifact under the output
//! directory, and `manifest.json` records input and output hashes so that
//! unchanged stages are loaded instead of recomputed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::align::{compare_structures, resolved_alignment, Aligner, AlignmentResult, DiscrepancyReport, LabelNormalizer};
use crate::corpus::{annotate, annotate_corpus, extract_candidates, load_corpus, parse_patterns, with_bare_noun, Corpus, Lexicon, PatternDef, TermCandidate};
use crate::error::{Error, Result};
use crate::export::{to_kif, to_owl, DEFAULT_IRI};
use crate::lexnet::{
    apply_validation, build_network, copula_relations, parse_decisions, parse_synonyms, same_head_hyponyms, LexNet, Status, Term,
    ValidationReport,
};
use crate::okmodel::{parse_dsl, OkOntology, Violation};
use crate::projection::{project, Taxonomy};
use crate::retrieval::{compare_recall, index_corpus, IndexOutcome, RecallComparison};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const ARTIFACTS: [&str; 8] = [
    "candidates.json",
    "lexnet.json",
    "validated.json",
    "taxonomy.json",
    "ok_check.json",
    "alignment.json",
    "retrieval.json",
    "export.json",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    pub lexicon: PathBuf,
    pub patterns: PathBuf,
    pub ontology: PathBuf,
    pub decisions: PathBuf,
    pub output: PathBuf,
    pub stopwords: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
    /// Labels queried on both structures in the retrieval stage.
    pub recall_labels: Vec<String>,
    pub iri: String,
}

impl PipelineConfig {
    /// Relative paths are taken from `base_dir`.
    pub fn from_toml_str(src: &str, base_dir: &Path) -> Result<Self> {
        let table: toml::Table = src.parse().map_err(|e: toml::de::Error| Error::Config(e.message().to_owned()))?;
        let path = |key: &str| -> Result<Option<PathBuf>> {
            match table.get(key) {
                None => Ok(None),
                Some(toml::Value::String(s)) => Ok(Some(base_dir.join(s))),
                Some(_) => Err(Error::Config(key.to_owned())),
            }
        };
        let required = |key: &str| path(key)?.ok_or_else(|| Error::Config(key.to_owned()));
        let recall_labels = match table.get("recall_labels") {
            None => Vec::new(),
            Some(toml::Value::Array(items)) => items
                .iter()
                .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| Error::Config("recall_labels".into())))
                .collect::<Result<_>>()?,
            Some(_) => return Err(Error::Config("recall_labels".into())),
        };
        let iri = match table.get("iri") {
            None => DEFAULT_IRI.to_owned(),
            Some(toml::Value::String(s)) => s.clone(),
            Some(_) => return Err(Error::Config("iri".into())),
        };
        Ok(Self {
            corpus: required("corpus")?,
            lexicon: required("lexicon")?,
            patterns: required("patterns")?,
            ontology: required("ontology")?,
            decisions: required("decisions")?,
            output: required("output")?,
            stopwords: path("stopwords")?,
            synonyms: path("synonyms")?,
            recall_labels,
            iri,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&src, path.parent().unwrap_or(Path::new(".")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatedArtifact {
    pub report: ValidationReport,
    pub network: LexNet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OkCheckArtifact {
    pub ontology: OkOntology,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentArtifact {
    pub alignments: Vec<AlignmentResult>,
    pub discrepancies: DiscrepancyReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalArtifact {
    pub projected: IndexOutcome,
    pub ok: IndexOutcome,
    pub comparisons: Vec<RecallComparison>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportArtifact {
    pub owl: String,
    pub kif: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub input_hash: String,
    pub artifact: String,
    pub output_hash: String,
    pub cache_hit: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub stages: Vec<StageRecord>,
}

impl Manifest {
    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }
}

// ---- stages, usable one by one ----

pub fn stage_extract(corpus: &Corpus, lexicon: &Lexicon, patterns: &[PatternDef]) -> Result<Vec<TermCandidate>> {
    let tokens: Vec<_> = corpus.documents.iter().flat_map(|d| annotate(d, lexicon)).collect();
    extract_candidates(&tokens, patterns)
}

/// Same-head and copula hyponymy plus declared synonyms.
pub fn stage_net(corpus: &Corpus, lexicon: &Lexicon, candidates: &[TermCandidate], synonyms: &[(String, String)]) -> Result<LexNet> {
    let known: Vec<Vec<String>> = candidates.iter().map(|c| c.lemmas.clone()).collect();
    let mut relations = same_head_hyponyms(candidates);
    relations.extend(copula_relations(&annotate_corpus(corpus, lexicon), &known));
    build_network(candidates.iter().map(Term::from_candidate), relations, synonyms)
}

pub fn stage_validate(network: &LexNet, decisions_src: &str) -> Result<ValidatedArtifact> {
    let validated = apply_validation(network, &parse_decisions(decisions_src)?)?;
    Ok(ValidatedArtifact {
        report: ValidationReport::of(&validated),
        network: validated,
    })
}

pub fn stage_ok_check(dsl_src: &str) -> Result<OkCheckArtifact> {
    let ontology = parse_dsl(dsl_src)?;
    let violations = ontology.check_consistency();
    Ok(OkCheckArtifact { ontology, violations })
}

/// Aligns every term denoting a projected concept. Heads come from the
/// network when given.
pub fn stage_align(taxonomy: &Taxonomy, network: Option<&LexNet>, ontology: &OkOntology, normalizer: &LabelNormalizer) -> AlignmentArtifact {
    let aligner = Aligner::new(ontology, normalizer);
    let mut by_term = BTreeMap::new();
    for concept in taxonomy.concepts.values() {
        for term in &concept.denoting_terms {
            let head = network
                .and_then(|n| n.term(term))
                .filter(|t| t.status == Status::Validated)
                .map(|t| t.head.as_str());
            by_term.insert(term.clone(), aligner.align_with_head(term, head));
        }
    }
    let discrepancies = compare_structures(taxonomy, ontology, &by_term);
    AlignmentArtifact {
        alignments: by_term.into_values().collect(),
        discrepancies,
    }
}

pub fn stage_index(
    corpus: &Corpus,
    candidates: &[TermCandidate],
    taxonomy: &Taxonomy,
    ontology: &OkOntology,
    alignment: &AlignmentArtifact,
    recall_labels: &[String],
) -> Result<RetrievalArtifact> {
    let projected = index_corpus(corpus, candidates, taxonomy, &taxonomy.term_alignment())?;
    let ok = index_corpus(corpus, candidates, ontology, &resolved_alignment(&alignment.alignments))?;
    let comparisons = recall_labels
        .iter()
        .map(|label| compare_recall(&projected.index, taxonomy, &ok.index, ontology, label))
        .collect::<Result<_>>()?;
    Ok(RetrievalArtifact { projected, ok, comparisons })
}

pub fn stage_export(ontology: &OkOntology, iri: &str) -> Result<ExportArtifact> {
    Ok(ExportArtifact {
        owl: to_owl(ontology, iri)?,
        kif: to_kif(ontology)?,
    })
}

// ---- orchestration ----

pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash over the tool version, the stage name and length-prefixed inputs.
fn input_hash(stage: &str, inputs: &[(&str, &[u8])]) -> String {
    let mut h = Sha256::new();
    for part in [TOOL_VERSION.as_bytes(), stage.as_bytes()] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part);
    }
    for (name, bytes) in inputs {
        h.update((name.len() as u64).to_le_bytes());
        h.update(name.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

struct Runner {
    out_dir: PathBuf,
    previous: Manifest,
    manifest: Manifest,
}

impl Runner {
    fn stage<T: Serialize + DeserializeOwned>(
        &mut self,
        name: &str,
        artifact: &str,
        inputs: &[(&str, &[u8])],
        compute: impl FnOnce() -> Result<T>,
    ) -> Result<(T, Vec<u8>)> {
        let hash = input_hash(name, inputs);
        let path = self.out_dir.join(artifact);
        if let Some(prev) = self.previous.stage(name).filter(|p| p.input_hash == hash && p.artifact == artifact) {
            if let Ok(bytes) = fs::read(&path) {
                if sha256_hex(&bytes) == prev.output_hash {
                    if let Ok(value) = serde_json::from_slice(&bytes) {
                        log::info!("{name}: unchanged inputs, reusing {artifact}");
                        self.record(name, hash, artifact, &bytes, true);
                        return Ok((value, bytes));
                    }
                }
            }
        }
        log::info!("{name}: computing {artifact}");
        let value = compute()?;
        let bytes = to_json_bytes(&value)?;
        fs::write(&path, &bytes).map_err(|e| Error::io(&path, e))?;
        self.record(name, hash, artifact, &bytes, false);
        Ok((value, bytes))
    }

    fn record(&mut self, name: &str, input_hash: String, artifact: &str, bytes: &[u8], cache_hit: bool) {
        self.manifest.stages.push(StageRecord {
            name: name.to_owned(),
            input_hash,
            artifact: artifact.to_owned(),
            output_hash: sha256_hex(bytes),
            cache_hit,
        });
    }

    fn write_manifest(&self) -> Result<()> {
        let path = self.out_dir.join("manifest.json");
        fs::write(&path, to_json_bytes(&self.manifest)?).map_err(|e| Error::io(&path, e))
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read(path)?).map_err(|_| Error::Encoding(path.to_path_buf()))
}

fn corpus_bytes(corpus: &Corpus) -> Vec<u8> {
    let mut out = Vec::new();
    for d in &corpus.documents {
        for part in [d.id.as_bytes(), d.text.as_bytes()] {
            out.extend((part.len() as u64).to_le_bytes());
            out.extend(part);
        }
    }
    out
}

/// Runs all stages. Consistency violations stop the run after
/// `ok_check.json` is written and are returned as `E_INCONSISTENT`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Manifest> {
    fs::create_dir_all(&config.output).map_err(|e| Error::io(&config.output, e))?;
    let previous = fs::read(config.output.join("manifest.json"))
        .ok()
        .and_then(|b| serde_json::from_slice::<Manifest>(&b).ok())
        .filter(|m| m.tool_version == TOOL_VERSION)
        .unwrap_or_default();
    let mut runner = Runner {
        out_dir: config.output.clone(),
        previous,
        manifest: Manifest {
            tool_version: TOOL_VERSION.to_owned(),
            stages: Vec::new(),
        },
    };
    let result = run_stages(config, &mut runner);
    runner.write_manifest()?;
    result.map(|()| runner.manifest)
}

fn run_stages(config: &PipelineConfig, runner: &mut Runner) -> Result<()> {
    let corpus = load_corpus(&config.corpus)?;
    let corpus_raw = corpus_bytes(&corpus);
    let lexicon_src = read_text(&config.lexicon)?;
    let lexicon = Lexicon::parse(&lexicon_src)?;
    let patterns_src = read_text(&config.patterns)?;
    let synonyms_src = config.synonyms.as_deref().map(read_text).transpose()?.unwrap_or_default();
    let stopwords_src = config.stopwords.as_deref().map(read_text).transpose()?;
    let decisions_src = read_text(&config.decisions)?;
    let dsl_src = read_text(&config.ontology)?;

    let (candidates, candidates_raw) = runner.stage(
        "extract",
        ARTIFACTS[0],
        &[
            ("corpus", &corpus_raw),
            ("lexicon", lexicon_src.as_bytes()),
            ("patterns", patterns_src.as_bytes()),
        ],
        || stage_extract(&corpus, &lexicon, &with_bare_noun(parse_patterns(&patterns_src)?)),
    )?;
    let candidates: Vec<TermCandidate> = candidates;

    let (_, lexnet_raw) = runner.stage::<LexNet>(
        "net",
        ARTIFACTS[1],
        &[
            ("corpus", &corpus_raw),
            ("lexicon", lexicon_src.as_bytes()),
            ("candidates", &candidates_raw),
            ("synonyms", synonyms_src.as_bytes()),
        ],
        || stage_net(&corpus, &lexicon, &candidates, &parse_synonyms(&synonyms_src)?),
    )?;

    let (validated, validated_raw) = runner.stage::<ValidatedArtifact>(
        "validate",
        ARTIFACTS[2],
        &[("lexnet", &lexnet_raw), ("decisions", decisions_src.as_bytes())],
        || stage_validate(&serde_json::from_slice(&lexnet_raw)?, &decisions_src),
    )?;

    let (taxonomy, taxonomy_raw) = runner.stage::<Taxonomy>("project", ARTIFACTS[3], &[("validated", &validated_raw)], || {
        project(&validated.network)
    })?;

    let (ok_check, ok_raw) =
        runner.stage::<OkCheckArtifact>("ok-check", ARTIFACTS[4], &[("ontology", dsl_src.as_bytes())], || stage_ok_check(&dsl_src))?;
    if !ok_check.violations.is_empty() {
        return Err(Error::Inconsistent(ok_check.violations));
    }
    let ontology = ok_check.ontology;

    let stop_bytes = stopwords_src.clone().unwrap_or_default();
    let (alignment, alignment_raw) = runner.stage::<AlignmentArtifact>(
        "align",
        ARTIFACTS[5],
        &[
            ("taxonomy", &taxonomy_raw),
            ("validated", &validated_raw),
            ("ok-check", &ok_raw),
            ("stopwords", stop_bytes.as_bytes()),
            ("lexicon", lexicon_src.as_bytes()),
        ],
        || {
            let normalizer = match &stopwords_src {
                Some(src) => LabelNormalizer::parse_stopwords(src),
                None => LabelNormalizer::default(),
            }
            .with_lexicon(lexicon.clone());
            Ok(stage_align(&taxonomy, Some(&validated.network), &ontology, &normalizer))
        },
    )?;

    let labels_raw = serde_json::to_vec(&config.recall_labels)?;
    runner.stage::<RetrievalArtifact>(
        "index",
        ARTIFACTS[6],
        &[
            ("corpus", &corpus_raw),
            ("candidates", &candidates_raw),
            ("taxonomy", &taxonomy_raw),
            ("ok-check", &ok_raw),
            ("alignment", &alignment_raw),
            ("recall-labels", &labels_raw),
        ],
        || stage_index(&corpus, &candidates, &taxonomy, &ontology, &alignment, &config.recall_labels),
    )?;

    runner.stage::<ExportArtifact>(
        "export",
        ARTIFACTS[7],
        &[("ok-check", &ok_raw), ("iri", config.iri.as_bytes())],
        || stage_export(&ontology, &config.iri),
    )?;
    Ok(())
}
