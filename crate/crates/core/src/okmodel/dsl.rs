//! Line-oriented ontology language.
//!
//! ```text
//! ontology "<name>"
//! axis <id> values <v1>, <v2>[, ...]
//! concept <Id> root
//! concept <Id> genus <ParentId> diff <axis>=<value>
//! attribute <id> on <ConceptId> type number|string|enum(<v1>,...)
//! class <Id> over <ConceptId> where <attr> <op> <literal> [and ...]
//! set <Id> where <attr> <op> <literal> [and ...]
//! term "<surface label>" denotes <ConceptId>
//! ```
//!
//! Names may be bare words or double-quoted strings. Forward references are
//! allowed. Only name resolution happens here; structural rules are left to
//! the consistency checker.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;

use super::{AttrValue, AttributeDef, Axis, ClassDef, CmpOp, Comparison, Differentia, OkConcept, OkOntology, SetDef, ValueType};
use crate::error::{Error, ParseError, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Comma,
    LParen,
    RParen,
    Op(CmpOp),
}

fn lex_line(line: &str) -> std::result::Result<Vec<Tok>, String> {
    let mut toks = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some(esc) => s.push(esc),
                            None => return Err("unterminated string".into()),
                        },
                        Some(ch) => s.push(ch),
                        None => return Err("unterminated string".into()),
                    }
                }
                toks.push(Tok::Str(s));
            }
            ',' | '(' | ')' => {
                chars.next();
                toks.push(match c {
                    ',' => Tok::Comma,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                });
            }
            '=' | '≠' | '≤' | '≥' => {
                chars.next();
                toks.push(Tok::Op(match c {
                    '=' => CmpOp::Eq,
                    '≠' => CmpOp::Ne,
                    '≤' => CmpOp::Le,
                    _ => CmpOp::Ge,
                }));
            }
            '!' | '<' | '>' => {
                chars.next();
                let eq = chars.next_if_eq(&'=').is_some();
                toks.push(Tok::Op(match (c, eq) {
                    ('!', true) => CmpOp::Ne,
                    ('!', false) => return Err("expected `!=`".into()),
                    ('<', true) => CmpOp::Le,
                    ('<', false) => CmpOp::Lt,
                    ('>', true) => CmpOp::Ge,
                    _ => CmpOp::Gt,
                }));
            }
            _ => {
                let mut w = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || "\",()=!<>≠≤≥#".contains(ch) {
                        break;
                    }
                    w.push(ch);
                    chars.next();
                }
                toks.push(Tok::Word(w));
            }
        }
    }
    Ok(toks)
}

struct Cursor {
    toks: Vec<Tok>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn name(&mut self, what: &str) -> std::result::Result<String, String> {
        match self.next() {
            Some(Tok::Word(w)) | Some(Tok::Str(w)) => Ok(w),
            other => Err(format!("expected {what}, found {}", describe(other.as_ref()))),
        }
    }

    fn keyword(&mut self, kw: &str) -> std::result::Result<(), String> {
        match self.next() {
            Some(Tok::Word(w)) if w == kw => Ok(()),
            other => Err(format!("expected `{kw}`, found {}", describe(other.as_ref()))),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn finish(&self) -> std::result::Result<(), String> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(format!("unexpected {}", describe(Some(t)))),
        }
    }

    fn comma_list(&mut self, what: &str) -> std::result::Result<Vec<String>, String> {
        let mut out = vec![self.name(what)?];
        while self.eat(&Tok::Comma) {
            out.push(self.name(what)?);
        }
        Ok(out)
    }

    fn literal(&mut self) -> std::result::Result<AttrValue, String> {
        match self.next() {
            Some(Tok::Str(s)) => Ok(AttrValue::Text(s)),
            Some(Tok::Word(w)) => Ok(w.parse::<f64>().map(AttrValue::Number).unwrap_or(AttrValue::Text(w))),
            other => Err(format!("expected a literal, found {}", describe(other.as_ref()))),
        }
    }

    fn predicate(&mut self) -> std::result::Result<Vec<Comparison>, String> {
        let mut out = Vec::new();
        loop {
            let attribute = self.name("an attribute")?;
            let op = match self.next() {
                Some(Tok::Op(op)) => op,
                other => return Err(format!("expected a comparison operator, found {}", describe(other.as_ref()))),
            };
            let value = self.literal()?;
            out.push(Comparison { attribute, op, value });
            if self.is_keyword("and") {
                self.pos += 1;
            } else {
                return Ok(out);
            }
        }
    }
}

fn describe(tok: Option<&Tok>) -> String {
    match tok {
        None => "end of line".into(),
        Some(Tok::Word(w)) => format!("`{w}`"),
        Some(Tok::Str(s)) => format!("\"{s}\""),
        Some(Tok::Comma) => "`,`".into(),
        Some(Tok::LParen) => "`(`".into(),
        Some(Tok::RParen) => "`)`".into(),
        Some(Tok::Op(_)) => "an operator".into(),
    }
}

enum Decl {
    Ontology(String),
    Axis(String, Vec<String>),
    Concept {
        name: String,
        genus: Vec<String>,
        diffs: Vec<(String, String)>,
    },
    Attribute {
        name: String,
        concept: String,
        ty: ValueType,
    },
    Class(ClassDef),
    Set(SetDef),
    Term(String, String),
}

enum LineError {
    Syntax(String),
    Unsupported(String),
}

impl From<String> for LineError {
    fn from(s: String) -> Self {
        LineError::Syntax(s)
    }
}

fn parse_line(toks: Vec<Tok>) -> std::result::Result<Decl, LineError> {
    let mut cur = Cursor { toks, pos: 0 };
    let keyword = cur.name("a keyword")?;
    let decl = match keyword.as_str() {
        "ontology" => Decl::Ontology(cur.name("an ontology name")?),
        "axis" => {
            let name = cur.name("an axis name")?;
            cur.keyword("values")?;
            Decl::Axis(name, cur.comma_list("an axis value")?)
        }
        "concept" => {
            let name = cur.name("a concept name")?;
            if cur.is_keyword("root") {
                cur.pos += 1;
                Decl::Concept {
                    name,
                    genus: Vec::new(),
                    diffs: Vec::new(),
                }
            } else if cur.is_keyword("compound") {
                return Err(LineError::Unsupported("compound concepts are not supported".into()));
            } else {
                cur.keyword("genus")?;
                let genus = cur.comma_list("a genus")?;
                let mut diffs = Vec::new();
                if cur.is_keyword("diff") {
                    cur.pos += 1;
                    loop {
                        let axis = cur.name("an axis")?;
                        if !cur.eat(&Tok::Op(CmpOp::Eq)) {
                            return Err(LineError::Syntax("expected `=` in differentia".into()));
                        }
                        let value = cur.name("an axis value")?;
                        diffs.push((axis, value));
                        if !cur.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                Decl::Concept { name, genus, diffs }
            }
        }
        "attribute" => {
            let name = cur.name("an attribute name")?;
            cur.keyword("on")?;
            let concept = cur.name("a concept")?;
            cur.keyword("type")?;
            let ty = match cur.name("a type")?.as_str() {
                "number" => ValueType::Number,
                "string" => ValueType::String,
                "enum" => {
                    if !cur.eat(&Tok::LParen) {
                        return Err(LineError::Syntax("expected `(` after enum".into()));
                    }
                    let values = cur.comma_list("an enum value")?;
                    if !cur.eat(&Tok::RParen) {
                        return Err(LineError::Syntax("expected `)`".into()));
                    }
                    ValueType::Enum(values)
                }
                other => return Err(LineError::Syntax(format!("unknown type `{other}`"))),
            };
            Decl::Attribute { name, concept, ty }
        }
        "class" => {
            let name = cur.name("a class name")?;
            cur.keyword("over")?;
            let base_concept = cur.name("a concept")?;
            cur.keyword("where")?;
            Decl::Class(ClassDef {
                name,
                base_concept,
                predicate: cur.predicate()?,
            })
        }
        "set" => {
            let name = cur.name("a set name")?;
            cur.keyword("where")?;
            Decl::Set(SetDef {
                name,
                predicate: cur.predicate()?,
            })
        }
        "term" => {
            let label = cur.name("a term label")?;
            cur.keyword("denotes")?;
            Decl::Term(label, cur.name("a concept")?)
        }
        "compound" => return Err(LineError::Unsupported("compound concepts are not supported".into())),
        other => return Err(LineError::Syntax(format!("unknown declaration `{other}`"))),
    };
    cur.finish()?;
    debug_assert!(cur.at_end());
    Ok(decl)
}

/// Parses ontology source text. All errors are collected, each with its
/// line number.
pub fn parse_dsl(text: &str) -> Result<OkOntology> {
    let mut errors = Vec::new();
    let mut decls = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = match lex_line(line) {
            Ok(t) if t.is_empty() => continue,
            Ok(t) => t,
            Err(msg) => {
                errors.push(ParseError::syntax(line_no, msg));
                continue;
            }
        };
        match parse_line(toks) {
            Ok(d) => decls.push((line_no, d)),
            Err(LineError::Syntax(msg)) => errors.push(ParseError::syntax(line_no, msg)),
            Err(LineError::Unsupported(msg)) => errors.push(ParseError::new("E_UNSUPPORTED", line_no, msg)),
        }
    }

    let mut name: Option<String> = None;
    let mut axes: IndexMap<String, Axis> = IndexMap::new();
    let mut concepts: IndexMap<String, OkConcept> = IndexMap::new();
    let mut concept_lines: BTreeMap<String, usize> = BTreeMap::new();
    let mut attributes = Vec::new();
    let mut class_defs: Vec<ClassDef> = Vec::new();
    let mut set_defs: Vec<SetDef> = Vec::new();
    let mut denotation = BTreeMap::new();

    for (line, decl) in decls {
        match decl {
            Decl::Ontology(n) => {
                if name.replace(n).is_some() {
                    errors.push(ParseError::syntax(line, "ontology name declared twice"));
                }
            }
            Decl::Axis(axis, values) => {
                if axes.contains_key(&axis) {
                    errors.push(ParseError::new("E_DUP_NAME", line, format!("axis `{axis}` declared twice")));
                    continue;
                }
                if values.len() < 2 {
                    errors.push(ParseError::syntax(line, format!("axis `{axis}` needs at least two values")));
                    continue;
                }
                let distinct: BTreeSet<&String> = values.iter().collect();
                if distinct.len() != values.len() {
                    errors.push(ParseError::new("E_DUP_NAME", line, format!("axis `{axis}` repeats a value")));
                    continue;
                }
                axes.insert(axis.clone(), Axis { name: axis, values });
            }
            Decl::Concept { name: c, genus, diffs } => {
                if concepts.contains_key(&c) {
                    errors.push(ParseError::new("E_DUP_NAME", line, format!("concept `{c}` declared twice")));
                    continue;
                }
                if genus.len() > 1 {
                    errors.push(ParseError::new(
                        "E_MULTIPLE_GENUS",
                        line,
                        format!("concept `{c}` names {} genera; concepts form a tree", genus.len()),
                    ));
                    continue;
                }
                concept_lines.insert(c.clone(), line);
                concepts.insert(
                    c.clone(),
                    OkConcept {
                        name: c,
                        genus: genus.into_iter().next(),
                        differentia: diffs.into_iter().map(|(a, v)| Differentia::new(a, v)).collect(),
                        attributes: Vec::new(),
                    },
                );
            }
            Decl::Attribute { name: a, concept, ty } => attributes.push((line, concept, AttributeDef { name: a, value_type: ty })),
            Decl::Class(class) => {
                if class_defs.iter().any(|k| k.name == class.name) {
                    errors.push(ParseError::new("E_DUP_NAME", line, format!("class `{}` declared twice", class.name)));
                } else {
                    class_defs.push(class);
                }
            }
            Decl::Set(set) => {
                if set_defs.iter().any(|s| s.name == set.name) {
                    errors.push(ParseError::new("E_DUP_NAME", line, format!("set `{}` declared twice", set.name)));
                } else {
                    set_defs.push(set);
                }
            }
            Decl::Term(label, concept) => {
                if denotation.insert(label.clone(), concept).is_some() {
                    errors.push(ParseError::new("E_DUP_NAME", line, format!("term \"{label}\" declared twice")));
                }
            }
        }
    }

    for c in concepts.values() {
        let line = concept_lines[&c.name];
        if let Some(g) = &c.genus {
            if !concepts.contains_key(g) {
                errors.push(ParseError::new("E_UNKNOWN_GENUS", line, format!("genus `{g}` of `{}` is not declared", c.name)));
            }
        }
        for d in &c.differentia {
            match axes.get(&d.axis) {
                None => errors.push(ParseError::new("E_UNKNOWN_AXIS", line, format!("axis `{}` is not declared", d.axis))),
                Some(axis) if !axis.values.contains(&d.value) => errors.push(ParseError::new(
                    "E_BAD_VALUE",
                    line,
                    format!("`{}` is not a value of axis `{}`", d.value, d.axis),
                )),
                Some(_) => {}
            }
        }
    }
    for (line, concept, attr) in attributes {
        match concepts.get_mut(&concept) {
            Some(c) => c.attributes.push(attr),
            None => errors.push(ParseError::new(
                "E_UNKNOWN_CONCEPT",
                line,
                format!("attribute `{}` attached to undeclared concept `{concept}`", attr.name),
            )),
        }
    }
    if !concepts.values().any(OkConcept::is_root) {
        errors.push(ParseError::syntax(text.lines().count(), "no root concept declared"));
    }

    if !errors.is_empty() {
        errors.sort_by_key(|e| e.line);
        return Err(Error::Parse(errors));
    }
    Ok(OkOntology {
        name: name.unwrap_or_else(|| "ontology".into()),
        axes,
        concepts,
        class_defs,
        set_defs,
        denotation,
    })
}
