//! Corpus ingestion, dictionary lemmatization and POS-pattern term extraction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Adj,
    Prep,
    Det,
    Verb,
    Other,
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "N" | "NOUN" => Ok(Pos::Noun),
            "ADJ" | "A" => Ok(Pos::Adj),
            "PREP" | "P" => Ok(Pos::Prep),
            "DET" | "D" => Ok(Pos::Det),
            "VERB" | "V" => Ok(Pos::Verb),
            "OTHER" | "X" => Ok(Pos::Other),
            _ => Err(format!("unknown POS tag `{s}`")),
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pos::Noun => "NOUN",
            Pos::Adj => "ADJ",
            Pos::Prep => "PREP",
            Pos::Det => "DET",
            Pos::Verb => "VERB",
            Pos::Other => "OTHER",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }
}

/// Reads every `*.txt` file of `dir` as one document, ordered by id.
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<Corpus> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|ext| ext == "txt") {
            paths.push(path);
        }
    }
    paths.sort();

    let mut documents = Vec::with_capacity(paths.len());
    for path in paths {
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let text = String::from_utf8(bytes).map_err(|_| Error::Encoding(path.clone()))?;
        if text.trim().is_empty() {
            log::warn!("skipping empty document {}", path.display());
            continue;
        }
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        documents.push(Document { id, text });
    }
    if documents.is_empty() {
        return Err(Error::NoCorpus(dir.to_path_buf()));
    }
    documents.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Corpus { documents })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
}

fn lexicon_key(surface: &str) -> String {
    text::concept_id(&surface.replace(['\u{2019}', '\u{02BC}'], "'"))
}

/// Surface → (lemma, POS) dictionary. Lookup ignores case. Entries whose
/// surface contains spaces (`tout ou rien`) are matched greedily over
/// consecutive tokens and annotated as a single token.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    single: HashMap<String, LexiconEntry>,
    multi: HashMap<Vec<String>, LexiconEntry>,
    longest_multi: usize,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, entry: LexiconEntry) {
        let key = lexicon_key(&entry.surface);
        let parts: Vec<String> = key.split(' ').map(str::to_owned).collect();
        if parts.len() > 1 {
            self.longest_multi = self.longest_multi.max(parts.len());
            self.multi.entry(parts).or_insert(entry);
        } else {
            self.single.entry(key).or_insert(entry);
        }
    }

    pub fn lookup(&self, surface: &str) -> Option<&LexiconEntry> {
        self.single.get(&lexicon_key(surface))
    }

    pub fn len(&self) -> usize {
        self.single.len() + self.multi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parses the `surface<TAB>lemma<TAB>pos` format; `#` starts a comment.
    pub fn parse(src: &str) -> Result<Self> {
        let mut lexicon = Lexicon::new();
        let mut errors = Vec::new();
        for (idx, raw) in src.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 3 {
                errors.push(ParseError::syntax(line_no, "expected surface<TAB>lemma<TAB>pos"));
                continue;
            }
            if cols[0].is_empty() {
                errors.push(ParseError::syntax(line_no, "empty surface form"));
                continue;
            }
            match cols[2].parse::<Pos>() {
                Ok(pos) => lexicon.insert(LexiconEntry {
                    surface: cols[0].to_owned(),
                    lemma: if cols[1].is_empty() { cols[0].to_lowercase() } else { cols[1].to_owned() },
                    pos,
                }),
                Err(msg) => errors.push(ParseError::syntax(line_no, msg)),
            }
        }
        if errors.is_empty() {
            Ok(lexicon)
        } else {
            Err(Error::Parse(errors))
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let src = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&src)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedToken {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
    pub doc_id: String,
    pub offset: usize,
    pub end: usize,
}

/// Tokenizes and lemmatizes one document. Unknown words keep their
/// lowercased surface as lemma and are tagged `OTHER`.
pub fn annotate(document: &Document, lexicon: &Lexicon) -> Vec<AnnotatedToken> {
    let raw = text::tokenize(&document.text);
    let keys: Vec<String> = raw.iter().map(|t| lexicon_key(&t.surface)).collect();
    let mut out = Vec::with_capacity(raw.len());
    let mut i = 0;
    'tokens: while i < raw.len() {
        let longest = lexicon.longest_multi.min(raw.len() - i);
        for n in (2..=longest).rev() {
            if let Some(entry) = lexicon.multi.get(&keys[i..i + n]) {
                let surface = raw[i..i + n]
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                out.push(AnnotatedToken {
                    surface,
                    lemma: entry.lemma.clone(),
                    pos: entry.pos,
                    doc_id: document.id.clone(),
                    offset: raw[i].offset,
                    end: raw[i + n - 1].end,
                });
                i += n;
                continue 'tokens;
            }
        }
        let tok = &raw[i];
        let (lemma, pos) = match lexicon.single.get(&keys[i]) {
            Some(entry) => (entry.lemma.clone(), entry.pos),
            None => (tok.surface.to_lowercase(), Pos::Other),
        };
        out.push(AnnotatedToken {
            surface: tok.surface.clone(),
            lemma,
            pos,
            doc_id: document.id.clone(),
            offset: tok.offset,
            end: tok.end,
        });
        i += 1;
    }
    out
}

pub fn annotate_corpus(corpus: &Corpus, lexicon: &Lexicon) -> Vec<Vec<AnnotatedToken>> {
    corpus.documents.iter().map(|d| annotate(d, lexicon)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HeadPosition {
    #[default]
    FirstNoun,
    LastNoun,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternDef {
    pub id: String,
    pub sequence: Vec<Pos>,
    #[serde(default)]
    pub head_position: HeadPosition,
}

impl PatternDef {
    pub fn new(id: impl Into<String>, sequence: Vec<Pos>) -> Self {
        Self {
            id: id.into(),
            sequence,
            head_position: HeadPosition::FirstNoun,
        }
    }

    pub fn head_last(mut self) -> Self {
        self.head_position = HeadPosition::LastNoun;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sequence.is_empty() {
            return Err(Error::BadPattern {
                id: self.id.clone(),
                reason: "empty sequence".into(),
            });
        }
        if !self.sequence.contains(&Pos::Noun) {
            return Err(Error::BadPattern {
                id: self.id.clone(),
                reason: "sequence contains no NOUN".into(),
            });
        }
        Ok(())
    }

    fn matches_at(&self, tokens: &[AnnotatedToken], start: usize) -> bool {
        tokens.len() - start >= self.sequence.len()
            && self.sequence.iter().zip(&tokens[start..]).all(|(p, t)| *p == t.pos)
    }

    fn head_index(&self) -> usize {
        let mut nouns = self.sequence.iter().enumerate().filter(|(_, p)| **p == Pos::Noun);
        let found = match self.head_position {
            HeadPosition::FirstNoun => nouns.next(),
            HeadPosition::LastNoun => nouns.next_back(),
        };
        found.map(|(i, _)| i).unwrap_or(0)
    }

    /// The bare-noun pattern, so that hypernym heads exist as terms.
    pub fn bare_noun() -> Self {
        Self::new("N", vec![Pos::Noun])
    }

    /// N, N-ADJ, N-PREP-N, N-PREP-N-PREP-N.
    pub fn default_set() -> Vec<Self> {
        use Pos::*;
        vec![
            Self::bare_noun(),
            Self::new("N-ADJ", vec![Noun, Adj]),
            Self::new("N-PREP-N", vec![Noun, Prep, Noun]),
            Self::new("N-PREP-N-PREP-N", vec![Noun, Prep, Noun, Prep, Noun]),
        ]
    }
}

/// Parses `id: POS POS ... [head=first|last]` lines.
pub fn parse_patterns(src: &str) -> Result<Vec<PatternDef>> {
    let mut patterns = Vec::new();
    let mut errors = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((id, rest)) = line.split_once(':') else {
            errors.push(ParseError::syntax(line_no, "expected `id: POS ...`"));
            continue;
        };
        let id = id.trim();
        if id.is_empty() {
            errors.push(ParseError::syntax(line_no, "empty pattern id"));
            continue;
        }
        let mut pattern = PatternDef::new(id, Vec::new());
        for word in rest.split_whitespace() {
            if let Some(head) = word.strip_prefix("head=") {
                match head {
                    "first" => pattern.head_position = HeadPosition::FirstNoun,
                    "last" => pattern.head_position = HeadPosition::LastNoun,
                    other => errors.push(ParseError::syntax(line_no, format!("bad head position `{other}`"))),
                }
                continue;
            }
            match word.parse::<Pos>() {
                Ok(pos) => pattern.sequence.push(pos),
                Err(msg) => errors.push(ParseError::syntax(line_no, msg)),
            }
        }
        if let Err(e) = pattern.validate() {
            errors.push(ParseError::new("E_BAD_PATTERN", line_no, e.to_string()));
            continue;
        }
        if patterns.iter().any(|p: &PatternDef| p.id == pattern.id) {
            errors.push(ParseError::new("E_DUP_NAME", line_no, format!("pattern `{id}` defined twice")));
            continue;
        }
        patterns.push(pattern);
    }
    if errors.is_empty() {
        Ok(patterns)
    } else {
        Err(Error::Parse(errors))
    }
}

/// Loads a pattern file and makes sure a bare-noun pattern is present.
pub fn load_patterns(path: impl AsRef<Path>) -> Result<Vec<PatternDef>> {
    let path = path.as_ref();
    let src = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(with_bare_noun(parse_patterns(&src)?))
}

/// Prepends the bare-noun pattern unless one is already there.
pub fn with_bare_noun(mut patterns: Vec<PatternDef>) -> Vec<PatternDef> {
    if !patterns.iter().any(|p| p.sequence == [Pos::Noun]) {
        patterns.insert(0, PatternDef::bare_noun());
    }
    patterns
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Occurrence {
    pub doc_id: String,
    pub offset: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCandidate {
    pub lemmas: Vec<String>,
    pub pattern_id: String,
    #[serde(rename = "head")]
    pub head_lemma: String,
    pub frequency: usize,
    pub occurrences: Vec<Occurrence>,
}

impl TermCandidate {
    /// Space-joined lemmas; the term label used downstream.
    pub fn label(&self) -> String {
        self.lemmas.join(" ")
    }
}

/// Greedy leftmost-longest matching of `patterns` over each document's
/// tokens; matched spans never overlap. Candidates sharing a lemma sequence
/// are merged and the result is sorted by lemma sequence.
pub fn extract_candidates(tokens: &[AnnotatedToken], patterns: &[PatternDef]) -> Result<Vec<TermCandidate>> {
    if patterns.is_empty() {
        return Err(Error::BadPattern {
            id: String::new(),
            reason: "no patterns given".into(),
        });
    }
    for p in patterns {
        p.validate()?;
    }

    let mut merged: BTreeMap<Vec<String>, TermCandidate> = BTreeMap::new();
    for doc in tokens.chunk_by(|a, b| a.doc_id == b.doc_id) {
        let mut i = 0;
        while i < doc.len() {
            // first pattern wins among equal lengths
            let best = patterns
                .iter()
                .filter(|p| p.matches_at(doc, i))
                .fold(None::<&PatternDef>, |best, p| match best {
                    Some(b) if b.sequence.len() >= p.sequence.len() => Some(b),
                    _ => Some(p),
                });
            let Some(pattern) = best else {
                i += 1;
                continue;
            };
            let span = &doc[i..i + pattern.sequence.len()];
            let lemmas: Vec<String> = span.iter().map(|t| t.lemma.clone()).collect();
            let occurrence = Occurrence {
                doc_id: span[0].doc_id.clone(),
                offset: span[0].offset,
                end: span[span.len() - 1].end,
            };
            let head = span[pattern.head_index()].lemma.clone();
            let entry = merged.entry(lemmas.clone()).or_insert_with(|| TermCandidate {
                lemmas,
                pattern_id: pattern.id.clone(),
                head_lemma: head,
                frequency: 0,
                occurrences: Vec::new(),
            });
            entry.frequency += 1;
            entry.occurrences.push(occurrence);
            i += span.len();
        }
    }

    Ok(merged
        .into_values()
        .map(|mut c| {
            c.occurrences.sort();
            c
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon(rows: &[(&str, &str, Pos)]) -> Lexicon {
        let mut lex = Lexicon::new();
        for (s, l, p) in rows {
            lex.insert(LexiconEntry {
                surface: s.to_string(),
                lemma: l.to_string(),
                pos: *p,
            });
        }
        lex
    }

    fn doc(text: &str) -> Document {
        Document {
            id: "d".into(),
            text: text.into(),
        }
    }

    fn toks(rows: &[(&str, Pos)]) -> Vec<AnnotatedToken> {
        rows.iter()
            .enumerate()
            .map(|(i, (lemma, pos))| AnnotatedToken {
                surface: lemma.to_string(),
                lemma: lemma.to_string(),
                pos: *pos,
                doc_id: "d".into(),
                offset: i * 10,
                end: i * 10 + lemma.chars().count(),
            })
            .collect()
    }

    #[test]
    fn annotate_uses_lexicon_lemmas() {
        let lex = lexicon(&[
            ("relais", "relais", Pos::Noun),
            ("électromagnétiques", "électromagnétique", Pos::Adj),
            ("des", "de", Pos::Det),
        ]);
        let out = annotate(&doc("des relais électromagnétiques"), &lex);
        let got: Vec<_> = out.iter().map(|t| (t.lemma.as_str(), t.pos)).collect();
        assert_eq!(
            got,
            [("de", Pos::Det), ("relais", Pos::Noun), ("électromagnétique", Pos::Adj)]
        );
    }

    #[test]
    fn annotate_defaults() {
        assert!(annotate(&doc(""), &Lexicon::new()).is_empty());
        let out = annotate(&doc("Xyzzy"), &Lexicon::new());
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].lemma, "xyzzy");
        assert_eq!(out[0].pos, Pos::Other);
    }

    #[test]
    fn annotate_merges_multiword_entries() {
        let lex = lexicon(&[("relais", "relais", Pos::Noun), ("tout ou rien", "tout ou rien", Pos::Adj)]);
        let out = annotate(&doc("Relais Tout ou rien"), &lex);
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].surface, "Tout ou rien");
        assert_eq!(out[1].pos, Pos::Adj);
        assert_eq!((out[1].offset, out[1].end), (7, 19));
    }

    #[test]
    fn lexicon_lookup_is_case_insensitive() {
        let lex = Lexicon::parse("# comment\nRelais\trelais\tNOUN\nl'\tle\tDET\n").unwrap();
        assert_eq!(lex.lookup("RELAIS").unwrap().lemma, "relais");
        assert_eq!(lex.lookup("L’").unwrap().lemma, "le");
    }

    #[test]
    fn lexicon_rejects_bad_rows() {
        let err = Lexicon::parse("relais\trelais\n\tx\tNOUN\nfoo\tfoo\tWHAT\n").unwrap_err();
        match err {
            Error::Parse(errs) => assert_eq!(errs.iter().map(|e| e.line).collect::<Vec<_>>(), [1, 2, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn noun_adjective_pattern() {
        let t = toks(&[("relais", Pos::Noun), ("électromagnétique", Pos::Adj)]);
        let c = extract_candidates(&t, &[PatternDef::new("N-ADJ", vec![Pos::Noun, Pos::Adj])]).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].label(), "relais électromagnétique");
        assert_eq!(c[0].head_lemma, "relais");
    }

    #[test]
    fn noun_prep_noun_pattern() {
        let t = toks(&[("relais", Pos::Noun), ("de", Pos::Prep), ("tension", Pos::Noun)]);
        let c = extract_candidates(&t, &PatternDef::default_set()).unwrap();
        assert_eq!(c.len(), 1, "longest match must win over bare nouns: {c:?}");
        assert_eq!(c[0].label(), "relais de tension");
        assert_eq!(c[0].head_lemma, "relais");
        assert_eq!(c[0].pattern_id, "N-PREP-N");
    }

    #[test]
    fn head_last_option() {
        let t = toks(&[("voltage", Pos::Noun), ("relay", Pos::Noun)]);
        let p = PatternDef::new("N-N", vec![Pos::Noun, Pos::Noun]).head_last();
        let c = extract_candidates(&t, &[p]).unwrap();
        assert_eq!(c[0].head_lemma, "relay");
    }

    #[test]
    fn empty_tokens_give_no_candidates() {
        assert!(extract_candidates(&[], &PatternDef::default_set()).unwrap().is_empty());
    }

    #[test]
    fn pattern_without_noun_is_rejected() {
        let err = extract_candidates(&[], &[PatternDef::new("A", vec![Pos::Adj])]).unwrap_err();
        assert_eq!(err.code(), "E_BAD_PATTERN");
        assert_eq!(extract_candidates(&[], &[]).unwrap_err().code(), "E_BAD_PATTERN");
    }

    #[test]
    fn matches_do_not_cross_documents() {
        let mut t = toks(&[("relais", Pos::Noun), ("de", Pos::Prep), ("tension", Pos::Noun)]);
        t[2].doc_id = "e".into();
        let c = extract_candidates(&t, &PatternDef::default_set()).unwrap();
        let labels: Vec<_> = c.iter().map(TermCandidate::label).collect();
        assert_eq!(labels, ["relais", "tension"]);
    }

    #[test]
    fn pattern_file_syntax() {
        let p = parse_patterns("# patterns\nN-ADJ: NOUN ADJ\nNN: N N head=last\n").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1].head_position, HeadPosition::LastNoun);
        let err = parse_patterns("bad: ADJ PREP\n").unwrap_err();
        assert_eq!(err.code(), "E_BAD_PATTERN");
        assert_eq!(parse_patterns("noid NOUN\n").unwrap_err().code(), "E_SYNTAX");
    }

    #[test]
    fn load_corpus_orders_and_validates() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(load_corpus(dir.path()).unwrap_err().code(), "E_NO_CORPUS");
        fs::write(dir.path().join("b.txt"), "deux").unwrap();
        fs::write(dir.path().join("a.txt"), "un").unwrap();
        fs::write(dir.path().join("notes.md"), "ignored").unwrap();
        let corpus = load_corpus(dir.path()).unwrap();
        let ids: Vec<_> = corpus.documents.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["a", "b"]);

        fs::write(dir.path().join("c.txt"), b"caf\xe9").unwrap();
        match load_corpus(dir.path()).unwrap_err() {
            Error::Encoding(p) => assert!(p.ends_with("c.txt")),
            other => panic!("{other:?}"),
        }
    }
}
