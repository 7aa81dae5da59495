use std::collections::BTreeSet;
use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use ontoterm::align::{LabelNormalizer, StructureVerdict};
use ontoterm::corpus::{load_corpus, load_patterns, Lexicon, PatternDef, TermCandidate};
use ontoterm::export::{to_kif, to_owl, DEFAULT_IRI};
use ontoterm::lexnet::{parse_synonyms, LexNet};
use ontoterm::okmodel::{parse_dsl, OkOntology};
use ontoterm::pipeline::{self, AlignmentArtifact, OkCheckArtifact, PipelineConfig, ValidatedArtifact};
use ontoterm::projection::Taxonomy;
use ontoterm::retrieval::{self, compare_recall, ConceptStructure, DocIndex, IndexOutcome};
use ontoterm::{Error, Result};

#[derive(Parser)]
#[command(name = "ontoterm", version, about = "Build, compare and export ontologies from technical text")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Owl,
    Kif,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StructureKind {
    Projected,
    Ok,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract term candidates from a corpus directory.
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        /// Pattern file; the built-in N, N-ADJ, N-PREP-N, N-PREP-N-PREP-N set otherwise.
        #[arg(long)]
        patterns: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Build the lexical network from extracted candidates.
    Net {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        synonyms: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Apply expert decisions to a lexical network.
    Validate {
        #[arg(long)]
        lexnet: PathBuf,
        #[arg(long)]
        decisions: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Project a validated network onto a concept taxonomy.
    Project {
        #[arg(long)]
        validated: PathBuf,
        /// Emit Graphviz instead of JSON.
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Parse an ontology and check its consistency rules.
    OkCheck {
        #[arg(long)]
        ontology: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Align projected terms with ontology concepts and compare structures.
    Align {
        #[arg(long)]
        taxonomy: PathBuf,
        #[arg(long)]
        ontology: PathBuf,
        /// Validated network, for term heads.
        #[arg(long)]
        validated: Option<PathBuf>,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Index the corpus on one structure.
    Index {
        #[arg(long, value_enum)]
        structure: StructureKind,
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        #[arg(long)]
        ontology: Option<PathBuf>,
        /// Alignment report (required for the ok structure).
        #[arg(long)]
        alignment: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Documents of a concept and of every concept it subsumes.
    Query {
        #[arg(long, value_enum)]
        structure: StructureKind,
        #[arg(long)]
        concept: String,
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        #[arg(long)]
        ontology: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Run one labelled query on both structures and diff the results.
    CompareRecall {
        #[arg(long)]
        label: String,
        #[arg(long)]
        projected_index: PathBuf,
        #[arg(long)]
        ok_index: PathBuf,
        #[arg(long)]
        taxonomy: PathBuf,
        #[arg(long)]
        ontology: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Export the ontology as OWL functional syntax or KIF.
    Export {
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long, value_enum, default_value = "owl")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = DEFAULT_IRI)]
        iri: String,
    },
    /// Run every stage from a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .write_style(if color_enabled(false) { env_logger::WriteStyle::Auto } else { env_logger::WriteStyle::Never })
        .init();

    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            if let Error::Inconsistent(violations) = &e {
                for v in violations {
                    eprintln!("  {v}");
                }
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn color_enabled(stdout: bool) -> bool {
    std::env::var_os("ONTOTERM_NO_COLOR").is_none()
        && if stdout { std::io::stdout().is_terminal() } else { std::io::stderr().is_terminal() }
}

fn paint(text: &str, code: &str) -> String {
    if color_enabled(true) {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_owned()
    }
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_owned()
    };
    let mut out = paint(&line(headers.iter().map(|h| h.to_string()).collect()), "1");
    out.push('\n');
    out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.clone()));
        out.push('\n');
    }
    out
}

fn emit(output: &Output, json: &impl Serialize, render: impl FnOnce() -> String) -> Result<()> {
    let text = match output.format {
        Format::Json => String::from_utf8(pipeline::to_json_bytes(json)?).expect("JSON is UTF-8"),
        Format::Table => render(),
    };
    write_out(output.out.as_deref(), &text)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OntologyFile {
    Checked(OkCheckArtifact),
    Bare(OkOntology),
}

/// A DSL file, or the JSON written by `ok-check`.
fn load_ontology(path: &Path) -> Result<OkOntology> {
    if path.extension().is_some_and(|e| e == "json") {
        Ok(match load_json::<OntologyFile>(path)? {
            OntologyFile::Checked(a) => a.ontology,
            OntologyFile::Bare(o) => o,
        })
    } else {
        parse_dsl(&read_text(path)?)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IndexFile {
    Outcome(IndexOutcome),
    Bare(DocIndex),
}

fn load_index(path: &Path) -> Result<DocIndex> {
    Ok(match load_json::<IndexFile>(path)? {
        IndexFile::Outcome(o) => o.index,
        IndexFile::Bare(i) => i,
    })
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    value.as_deref().ok_or_else(|| Error::Config(flag.to_owned()))
}

enum Structure {
    Projected(Taxonomy),
    Ok(OkOntology),
}

impl Structure {
    fn load(kind: StructureKind, taxonomy: &Option<PathBuf>, ontology: &Option<PathBuf>) -> Result<Self> {
        Ok(match kind {
            StructureKind::Projected => Structure::Projected(load_json(required(taxonomy, "--taxonomy")?)?),
            StructureKind::Ok => Structure::Ok(load_ontology(required(ontology, "--ontology")?)?),
        })
    }

    fn as_dyn(&self) -> &dyn ConceptStructure {
        match self {
            Structure::Projected(t) => t,
            Structure::Ok(o) => o,
        }
    }
}

fn verdict_cell(v: StructureVerdict) -> String {
    let (text, color) = match v {
        StructureVerdict::Agree => ("AGREE", "32"),
        StructureVerdict::ParentElided => ("PARENT_ELIDED", "33"),
        StructureVerdict::Conflict => ("CONFLICT", "31"),
        StructureVerdict::Unaligned => ("UNALIGNED", "2"),
    };
    paint(text, color)
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Extract {
            corpus,
            lexicon,
            patterns,
            output,
        } => {
            let corpus = load_corpus(&corpus)?;
            let lexicon = Lexicon::load(&lexicon)?;
            let patterns = match patterns {
                Some(p) => load_patterns(p)?,
                None => PatternDef::default_set(),
            };
            let candidates = pipeline::stage_extract(&corpus, &lexicon, &patterns)?;
            emit(&output, &candidates, || {
                let rows: Vec<_> = candidates
                    .iter()
                    .map(|c| vec![c.label(), c.pattern_id.clone(), c.head_lemma.clone(), c.frequency.to_string()])
                    .collect();
                table(&["term", "pattern", "head", "freq"], &rows)
            })?;
        }
        Command::Net {
            candidates,
            corpus,
            lexicon,
            synonyms,
            output,
        } => {
            let candidates: Vec<TermCandidate> = load_json(&candidates)?;
            let synonyms = match synonyms {
                Some(p) => parse_synonyms(&read_text(&p)?)?,
                None => Vec::new(),
            };
            let net = pipeline::stage_net(&load_corpus(&corpus)?, &Lexicon::load(&lexicon)?, &candidates, &synonyms)?;
            emit(&output, &net, || relations_table(&net))?;
        }
        Command::Validate {
            lexnet,
            decisions,
            output,
        } => {
            let net: LexNet = load_json(&lexnet)?;
            let validated = pipeline::stage_validate(&net, &read_text(&decisions)?)?;
            emit(&output, &validated, || {
                let r = &validated.report;
                let mut out = table(
                    &["validated terms", "rejected terms", "validated rel.", "rejected rel.", "pending rel."],
                    &[vec![
                        r.validated_terms.to_string(),
                        r.rejected_terms.to_string(),
                        r.validated_relations.to_string(),
                        r.rejected_relations.to_string(),
                        r.pending_relations.to_string(),
                    ]],
                );
                for (a, b) in &r.contradictions {
                    out.push_str(&format!("contradiction: «{a}» and «{b}» are hyponyms of each other\n"));
                }
                if let Some(cycle) = &r.validated_cycle {
                    out.push_str(&format!("validated cycle: {}\n", cycle.join(" -> ")));
                }
                out.push('\n');
                out.push_str(&relations_table(&validated.network));
                out
            })?;
        }
        Command::Project { validated, dot, output } => {
            let validated: ValidatedArtifact = load_json(&validated)?;
            let taxonomy = ontoterm::projection::project(&validated.network)?;
            if dot {
                write_out(output.out.as_deref(), &taxonomy.to_dot())?;
            } else {
                emit(&output, &taxonomy, || {
                    let rows: Vec<_> = taxonomy
                        .concepts
                        .values()
                        .map(|c| vec![format!("<{}>", c.label), taxonomy.parents(&c.id).join(", "), c.denoting_terms.join(", ")])
                        .collect();
                    table(&["concept", "parents", "terms"], &rows)
                })?;
            }
        }
        Command::OkCheck { ontology, output } => {
            let checked = pipeline::stage_ok_check(&read_text(&ontology)?)?;
            emit(&output, &checked, || {
                if checked.violations.is_empty() {
                    format!("consistent: {} concepts, {} axes\n", checked.ontology.concepts.len(), checked.ontology.axes.len())
                } else {
                    let rows: Vec<_> = checked
                        .violations
                        .iter()
                        .map(|v| vec![paint(&v.rule.to_string(), "31"), v.subjects.join(", "), v.message.clone()])
                        .collect();
                    table(&["rule", "subjects", "message"], &rows)
                }
            })?;
            if !checked.violations.is_empty() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Align {
            taxonomy,
            ontology,
            validated,
            stopwords,
            lexicon,
            output,
        } => {
            let taxonomy: Taxonomy = load_json(&taxonomy)?;
            let ontology = load_ontology(&ontology)?;
            let network = validated.map(|p| load_json::<ValidatedArtifact>(&p)).transpose()?.map(|v| v.network);
            let mut normalizer = match stopwords {
                Some(p) => LabelNormalizer::parse_stopwords(&read_text(&p)?),
                None => LabelNormalizer::default(),
            };
            if let Some(p) = lexicon {
                normalizer = normalizer.with_lexicon(Lexicon::load(p)?);
            }
            let report = pipeline::stage_align(&taxonomy, network.as_ref(), &ontology, &normalizer);
            emit(&output, &report, || {
                let rows: Vec<_> = report
                    .alignments
                    .iter()
                    .map(|a| {
                        let target = match (&a.concept, a.candidates.is_empty()) {
                            (Some(c), _) => format!("<{c}>"),
                            (None, false) => a.candidates.iter().map(|c| format!("<{c}>")).collect::<Vec<_>>().join(" | "),
                            (None, true) => "-".into(),
                        };
                        vec![format!("«{}»", a.term), format!("{:?}", a.kind).to_uppercase(), target]
                    })
                    .collect();
                let mut out = table(&["term", "kind", "concept"], &rows);
                out.push('\n');
                let rows: Vec<_> = report
                    .discrepancies
                    .entries
                    .iter()
                    .map(|e| vec![format!("«{}»", e.term), format!("«{}»", e.projected_parent), e.ok_parent_chain.join(" → "), verdict_cell(e.verdict)])
                    .collect();
                out.push_str(&table(&["term", "projected parent", "ontology genus chain", "verdict"], &rows));
                out
            })?;
        }
        Command::Index {
            structure,
            candidates,
            corpus,
            taxonomy,
            ontology,
            alignment,
            output,
        } => {
            let corpus = load_corpus(&corpus)?;
            let candidates: Vec<TermCandidate> = load_json(&candidates)?;
            let s = Structure::load(structure, &taxonomy, &ontology)?;
            let map = match &s {
                Structure::Projected(t) => t.term_alignment(),
                Structure::Ok(_) => {
                    let a: AlignmentArtifact = load_json(required(&alignment, "--alignment")?)?;
                    ontoterm::align::resolved_alignment(&a.alignments)
                }
            };
            let outcome = retrieval::index_corpus(&corpus, &candidates, s.as_dyn(), &map)?;
            emit(&output, &outcome, || {
                let rows: Vec<_> = outcome
                    .index
                    .annotations
                    .iter()
                    .map(|a| vec![a.doc_id.clone(), format!("<{}>", a.concept), format!("{:?}", a.source)])
                    .collect();
                let mut out = table(&["doc", "concept", "source"], &rows);
                if !outcome.unaligned_only.is_empty() {
                    out.push_str(&format!("E_UNALIGNED_ONLY: {}\n", outcome.unaligned_only.join(", ")));
                }
                out
            })?;
        }
        Command::Query {
            structure,
            concept,
            index,
            taxonomy,
            ontology,
            output,
        } => {
            let s = Structure::load(structure, &taxonomy, &ontology)?;
            let index = load_index(&index)?;
            let id = s.as_dyn().resolve_label(&concept).ok_or_else(|| Error::UnknownConcept(concept.clone()))?;
            let docs = retrieval::query(&index, s.as_dyn(), &id)?;
            #[derive(Serialize)]
            struct QueryReport<'a> {
                structure: &'a str,
                concept: &'a str,
                docs: &'a BTreeSet<String>,
            }
            let report = QueryReport {
                structure: s.as_dyn().structure_name(),
                concept: &id,
                docs: &docs,
            };
            emit(&output, &report, || {
                let rows: Vec<_> = docs.iter().map(|d| vec![d.clone()]).collect();
                table(&[&format!("docs for <{id}> ({})", report.structure)], &rows)
            })?;
        }
        Command::CompareRecall {
            label,
            projected_index,
            ok_index,
            taxonomy,
            ontology,
            output,
        } => {
            let taxonomy: Taxonomy = load_json(&taxonomy)?;
            let ontology = load_ontology(&ontology)?;
            let cmp = compare_recall(&load_index(&projected_index)?, &taxonomy, &load_index(&ok_index)?, &ontology, &label)?;
            emit(&output, &cmp, || {
                let mark = |b: bool| if b { "yes".to_owned() } else { paint("no", "31") };
                let rows: Vec<_> = cmp
                    .explanations
                    .iter()
                    .map(|e| {
                        vec![
                            e.doc_id.clone(),
                            mark(cmp.a.docs.contains(&e.doc_id)),
                            mark(cmp.b.docs.contains(&e.doc_id)),
                            e.matched_a.join(", "),
                            e.matched_b.join(", "),
                        ]
                    })
                    .collect();
                let mut out = table(&["doc", cmp.a.structure.as_str(), cmp.b.structure.as_str(), "matched (a)", "matched (b)"], &rows);
                let diff: Vec<_> = cmp.symmetric_difference.iter().cloned().collect();
                out.push_str(&format!("symmetric difference: {{{}}}\n", diff.join(", ")));
                out
            })?;
        }
        Command::Export { ontology, format, out, iri } => {
            let ontology = load_ontology(&ontology)?;
            let text = match format {
                ExportFormat::Owl => to_owl(&ontology, &iri)?,
                ExportFormat::Kif => to_kif(&ontology)?,
            };
            write_out(out.as_deref(), &text)?;
        }
        Command::Run { config, format } => {
            let config = PipelineConfig::load(&config)?;
            let manifest = pipeline::run_pipeline(&config)?;
            let output = Output { format, out: None };
            emit(&output, &manifest, || {
                let rows: Vec<_> = manifest
                    .stages
                    .iter()
                    .map(|s| {
                        vec![
                            s.name.clone(),
                            s.artifact.clone(),
                            if s.cache_hit { "cached".into() } else { "computed".into() },
                            s.output_hash[..12].to_owned(),
                        ]
                    })
                    .collect();
                table(&["stage", "artifact", "status", "sha256"], &rows)
            })?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn relations_table(net: &LexNet) -> String {
    let rows: Vec<_> = net
        .relations()
        .map(|r| {
            vec![
                r.kind.to_string(),
                format!("«{}»", r.source),
                format!("«{}»", r.target),
                format!("{:?}", r.evidence),
                format!("{:?}", r.status),
            ]
        })
        .collect();
    table(&["kind", "source", "target", "evidence", "status"], &rows)
}
