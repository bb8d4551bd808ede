//! Line-oriented grammar files.
//!
//! ```text
//! :format 1 ug            # or tag
//! :include ug-base        # bundled name or relative path
//! :options possessive-percolation
//! :features
//! agr
//! vf: fin bse inf
//! :channels
//! wh NP
//! :lexicon
//! swim V[vf:bse] <>
//! :rules
//! s: S[] -> NP[agr:?A] VP[agr:?A] ; push wh 0 -> 1
//! ```
//!
//! `#` starts a comment unless it is followed by a digit (an AVM tag).

mod tag;
mod ug;

use std::fs;
use std::path::{Path, PathBuf};

use crate::fs::{Env, Fs, FsParser, FsSyntaxError, Subst};

pub use tag::{load_tag_grammar, load_tag_str, print_tag_grammar, print_tag_tree, validate_tag};
pub use ug::{load_ug_grammar, load_ug_str, print_ug_grammar};

#[derive(Debug, thiserror::Error)]
pub enum DslError {
    #[error("{file}:{line}:{col}: {msg}")]
    Syntax { file: String, line: usize, col: usize, msg: String },
    #[error("{file}:{line}: undeclared feature '{name}'")]
    UndeclaredFeature { file: String, line: usize, name: String },
    #[error("rule '{rule}': bad gap threading: {reason}")]
    BadThreading { rule: String, reason: String },
    #[error("tree '{tree}': an auxiliary tree needs exactly one foot node, found {count}")]
    TwoFootNodes { tree: String, count: usize },
    #[error("tree '{tree}': initial trees take no foot node")]
    FootInInitial { tree: String },
    #[error("tree '{tree}' has no anchor")]
    NoAnchor { tree: String },
    #[error("grammar '{0}' not found")]
    MissingGrammar(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: expected a {expected} grammar, found {found}")]
    WrongFormat { file: String, expected: String, found: String },
}

impl DslError {
    pub(crate) fn syntax(file: &str, line: usize, col: usize, msg: impl Into<String>) -> Self {
        DslError::Syntax { file: file.to_string(), line, col, msg: msg.into() }
    }
}

pub type DslResult<T> = Result<T, DslError>;

/// Fragments shipped with the crate.
pub const BUNDLED: &[(&str, &str)] = &[
    ("ug-base", include_str!("../../fragments/ug-base.gram")),
    ("ug-poss", include_str!("../../fragments/ug-poss.gram")),
    ("tag-base", include_str!("../../fragments/tag-base.gram")),
    ("tag-gap", include_str!("../../fragments/tag-gap.gram")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub(crate) struct Source {
    pub name: String,
    pub text: String,
    pub dir: Option<PathBuf>,
}

/// Resolves a bundled name or a path (relative to `base` when given).
pub(crate) fn resolve(name: &str, base: Option<&Path>) -> DslResult<Source> {
    if let Some(t) = bundled(name) {
        return Ok(Source { name: name.to_string(), text: t.to_string(), dir: None });
    }
    let mut candidates = Vec::new();
    if let Some(b) = base {
        candidates.push(b.join(name));
    }
    candidates.push(PathBuf::from(name));
    for p in candidates {
        if p.is_file() {
            let text = fs::read_to_string(&p).map_err(|e| DslError::Io { path: p.display().to_string(), source: e })?;
            return Ok(Source { name: p.display().to_string(), text, dir: p.parent().map(Path::to_path_buf) });
        }
    }
    Err(DslError::MissingGrammar(name.to_string()))
}

#[derive(Clone, Debug)]
pub(crate) struct Line {
    pub no: usize,
    pub indent: usize,
    pub text: String,
}

#[derive(Debug)]
pub(crate) struct Section {
    pub name: String,
    pub args: Vec<String>,
    pub line: usize,
    pub body: Vec<Line>,
}

fn strip_comment(raw: &str) -> &str {
    let mut it = raw.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        if c == '#' && !it.peek().is_some_and(|(_, n)| n.is_ascii_digit()) {
            return &raw[..i];
        }
    }
    raw
}

/// Splits a file into `:header` sections; content before the first header
/// is a syntax error.
pub(crate) fn sections(file: &str, text: &str) -> DslResult<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let body = strip_comment(raw).trim_end();
        if body.trim().is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        if let Some(h) = body.strip_prefix(':') {
            let mut words = h.split_whitespace();
            let name = words.next().unwrap_or("").to_string();
            if name.is_empty() {
                return Err(DslError::syntax(file, no, 1, "empty section header"));
            }
            out.push(Section { name, args: words.map(str::to_string).collect(), line: no, body: Vec::new() });
        } else {
            match out.last_mut() {
                Some(s) => s.body.push(Line { no, indent, text: body.to_string() }),
                None => return Err(DslError::syntax(file, no, indent + 1, "content before the first section header")),
            }
        }
    }
    Ok(out)
}

/// Header fields common to both grammar kinds.
pub(crate) fn check_format(file: &str, secs: &[Section], expected: &str) -> DslResult<()> {
    let Some(f) = secs.iter().find(|s| s.name == "format") else {
        return Err(DslError::syntax(file, 1, 1, "missing ':format' header"));
    };
    if f.args.first().map(String::as_str) != Some("1") {
        return Err(DslError::syntax(file, f.line, 9, "unsupported format version"));
    }
    match f.args.get(1) {
        Some(k) if k == expected => Ok(()),
        Some(k) => Err(DslError::WrongFormat { file: file.to_string(), expected: expected.to_string(), found: k.clone() }),
        None => Err(DslError::syntax(file, f.line, 1, "format kind missing")),
    }
}

pub(crate) fn fs_err(file: &str, line: &Line, e: FsSyntaxError) -> DslError {
    DslError::syntax(file, line.no, e.pos + 1, e.msg)
}

/// A cursor over one line, with positions reported as 1-based columns.
pub(crate) struct LineCursor<'a> {
    pub file: &'a str,
    pub line: &'a Line,
    pub pos: usize,
}

impl<'a> LineCursor<'a> {
    pub fn new(file: &'a str, line: &'a Line) -> Self {
        LineCursor { file, line, pos: line.indent }
    }

    pub fn text(&self) -> &'a str {
        &self.line.text
    }

    pub fn skip_ws(&mut self) {
        let rest = &self.text()[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text().len()
    }

    pub fn rest(&self) -> &'a str {
        &self.text()[self.pos..]
    }

    pub fn err(&self, msg: impl Into<String>) -> DslError {
        DslError::syntax(self.file, self.line.no, self.pos + 1, msg)
    }

    pub fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &str) -> DslResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{tok}'")))
        }
    }

    /// A word of symbol characters.
    pub fn word(&mut self) -> DslResult<String> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.find(|c: char| !crate::fs::is_sym_char(c)).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected a name"));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }

    pub fn peek_word_is_fs_start(&mut self) -> bool {
        self.skip_ws();
        let mut cs = self.rest().chars();
        match cs.next() {
            Some('[') | Some('?') => true,
            Some('#') => cs.next().is_some_and(|c| c.is_ascii_digit()),
            _ => false,
        }
    }

    pub fn fs(&mut self, parser: &mut FsParser, env: &mut Subst) -> DslResult<Fs> {
        let (t, end) = parser.parse_prefix(self.text(), self.pos, env).map_err(|e| fs_err(self.file, self.line, e))?;
        self.pos = end;
        Ok(t)
    }

    /// `CAT` or `CAT[avm]`; the label must start with a letter.
    pub fn category(&mut self, parser: &mut FsParser, env: &mut Subst) -> DslResult<(String, Fs)> {
        self.skip_ws();
        let start = self.pos;
        let rest = self.rest();
        let len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
        if len == 0 || !rest.starts_with(|c: char| c.is_alphabetic()) {
            return Err(self.err("expected a category label"));
        }
        self.pos += len;
        let label = self.text()[start..self.pos].to_string();
        let fs = if self.rest().starts_with('[') || self.rest().starts_with('#') && self.peek_word_is_fs_start() {
            self.fs(parser, env)?
        } else {
            Fs::top()
        };
        Ok((label, fs))
    }
}

/// Feature names used anywhere in a term.
pub(crate) fn feature_names<E: Env + ?Sized>(env: &E, t: &Fs, out: &mut Vec<String>) {
    match env.resolve(t) {
        Fs::Avm(m) => {
            for (k, v) in &m {
                out.push(k.clone());
                feature_names(env, v, out);
            }
        }
        Fs::List(es, _) => {
            for e in &es {
                feature_names(env, e, out);
            }
        }
        _ => {}
    }
}

/// Atom values by feature name, for sort checks.
pub(crate) fn feature_values<E: Env + ?Sized>(env: &E, t: &Fs, out: &mut Vec<(String, String)>) {
    if let Fs::Avm(m) = env.resolve(t) {
        for (k, v) in &m {
            match v {
                Fs::Atom(a) => out.push((k.clone(), a.clone())),
                other => feature_values(env, other, out),
            }
        }
    }
}

/// Warnings from [`validate_ug`] / [`validate_tag`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Warning(pub String);

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub use ug::validate_ug;
