//! AVM text syntax.
//!
//! ```text
//! FS := atom | '#'n | '#'n FS | '[' feat ':' FS (',' feat ':' FS)* ']' | '[]'
//!     | '<' FS (',' FS)* ('|' Var)? '>' | '<>' | '?'name
//! ```

use std::collections::HashMap;
use std::fmt;

use super::{Env, Fs, Subst, VarId};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("AVM syntax error at offset {pos}: {msg}")]
pub struct FsSyntaxError {
    pub pos: usize,
    pub msg: String,
}

pub(crate) fn is_sym_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '+' | '.' | '\'')
}

/// Parses AVM text into a [`Subst`]; `?name` and `#n` scopes persist across
/// calls on one parser, so several patterns of a rule can share variables.
#[derive(Debug, Default)]
pub struct FsParser {
    vars: HashMap<String, VarId>,
    tags: HashMap<u32, VarId>,
}

pub fn parse_fs(text: &str, subst: &mut Subst) -> Result<Fs, FsSyntaxError> {
    let mut p = FsParser::default();
    let (t, end) = p.parse_prefix(text, 0, subst)?;
    let rest = &text[end..];
    if let Some((off, _)) = rest.char_indices().find(|(_, c)| !c.is_whitespace()) {
        return Err(FsSyntaxError { pos: end + off, msg: "trailing input".into() });
    }
    Ok(t)
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn err(&self, msg: impl Into<String>) -> FsSyntaxError {
        FsSyntaxError { pos: self.pos, msg: msg.into() }
    }

    fn expect(&mut self, c: char) -> Result<(), FsSyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn symbol(&mut self) -> Result<String, FsSyntaxError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if is_sym_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start {
            Err(self.err("expected a symbol"))
        } else {
            Ok(self.text[start..self.pos].to_string())
        }
    }

    fn number(&mut self) -> Result<u32, FsSyntaxError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.text[start..self.pos].parse().map_err(|_| FsSyntaxError { pos: start, msg: "expected a tag number".into() })
    }
}

impl FsParser {
    pub fn new() -> Self {
        Self::default()
    }

    /// Variable bound to `?name` in this scope, if any.
    pub fn var(&self, name: &str) -> Option<VarId> {
        self.vars.get(name).copied()
    }

    /// Parses one FS starting at byte offset `pos`; returns it and the offset
    /// just past it.
    pub fn parse_prefix(&mut self, text: &str, pos: usize, subst: &mut Subst) -> Result<(Fs, usize), FsSyntaxError> {
        let mut cur = Cursor { text, pos };
        let t = self.fs(&mut cur, subst)?;
        Ok((t, cur.pos))
    }

    fn fs(&mut self, cur: &mut Cursor, subst: &mut Subst) -> Result<Fs, FsSyntaxError> {
        cur.skip_ws();
        match cur.peek() {
            None => Err(cur.err("unexpected end of input")),
            Some('[') => {
                cur.pos += 1;
                let mut map = std::collections::BTreeMap::new();
                if cur.eat(']') {
                    return Ok(Fs::Avm(map));
                }
                loop {
                    let at = {
                        cur.skip_ws();
                        cur.pos
                    };
                    let feat = cur.symbol()?;
                    cur.expect(':')?;
                    let v = self.fs(cur, subst)?;
                    if map.contains_key(&feat) {
                        return Err(FsSyntaxError { pos: at, msg: format!("duplicate feature '{feat}'") });
                    }
                    map.insert(feat, v);
                    if cur.eat(']') {
                        return Ok(Fs::Avm(map));
                    }
                    cur.expect(',')?;
                }
            }
            Some('<') => {
                cur.pos += 1;
                let mut elems = Vec::new();
                if cur.eat('>') {
                    return Ok(Fs::List(elems, None));
                }
                loop {
                    elems.push(self.fs(cur, subst)?);
                    if cur.eat('>') {
                        return Ok(Fs::List(elems, None));
                    }
                    if cur.eat('|') {
                        cur.skip_ws();
                        let at = cur.pos;
                        let tail = match self.fs(cur, subst)? {
                            Fs::Var(v) => v,
                            _ => return Err(FsSyntaxError { pos: at, msg: "list tail must be a variable".into() }),
                        };
                        cur.expect('>')?;
                        return Ok(Fs::List(elems, Some(tail)));
                    }
                    cur.expect(',')?;
                }
            }
            Some('?') => {
                cur.pos += 1;
                let name = cur.symbol()?;
                let v = *self.vars.entry(name).or_insert_with(|| subst.fresh());
                Ok(Fs::Var(v))
            }
            Some('#') => {
                cur.pos += 1;
                let n = cur.number()?;
                let v = *self.tags.entry(n).or_insert_with(|| subst.fresh());
                cur.skip_ws();
                match cur.peek() {
                    Some(c) if c == '[' || c == '<' || c == '?' || c == '#' || is_sym_char(c) => {
                        let at = cur.pos;
                        let body = self.fs(cur, subst)?;
                        subst
                            .unify(&Fs::Var(v), &body)
                            .map_err(|c| FsSyntaxError { pos: at, msg: format!("inconsistent tag #{n}: {c}") })?;
                    }
                    _ => {}
                }
                Ok(Fs::Var(v))
            }
            Some(c) if is_sym_char(c) => Ok(Fs::Atom(cur.symbol()?)),
            Some(c) => Err(cur.err(format!("unexpected character '{c}'"))),
        }
    }
}

/// Prints terms with tags for shared nodes and `?k` for unbound variables.
/// Numbering is shared across all terms printed by one printer.
pub struct Printer<'a, E: Env + ?Sized> {
    env: &'a E,
    counts: HashMap<VarId, usize>,
    primed: bool,
    numbers: HashMap<VarId, usize>,
    emitted: std::collections::HashSet<VarId>,
}

impl<'a, E: Env + ?Sized> Printer<'a, E> {
    pub fn new(env: &'a E) -> Self {
        Printer { env, counts: HashMap::new(), primed: false, numbers: HashMap::new(), emitted: Default::default() }
    }

    /// Counts occurrences over every term that will be printed, so sharing
    /// across terms is shown with tags.
    pub fn prime<'t>(&mut self, terms: impl IntoIterator<Item = &'t Fs>) {
        for t in terms {
            super::count_occurrences(self.env, t, &mut self.counts);
        }
        self.primed = true;
    }

    pub fn print(&mut self, t: &Fs) -> String {
        if !self.primed {
            super::count_occurrences(self.env, t, &mut self.counts);
        }
        let mut out = String::new();
        self.write(t, &mut out).expect("string write");
        out
    }

    fn num(&mut self, r: VarId) -> usize {
        let n = self.numbers.len() + 1;
        *self.numbers.entry(r).or_insert(n)
    }

    fn write(&mut self, t: &Fs, out: &mut String) -> fmt::Result {
        use fmt::Write;
        match t {
            Fs::Atom(a) => out.write_str(a),
            Fs::Var(v) => self.write_var(*v, false, out),
            Fs::Avm(m) => {
                out.write_char('[')?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        out.write_str(", ")?;
                    }
                    write!(out, "{k}:")?;
                    self.write(v, out)?;
                }
                out.write_char(']')
            }
            Fs::List(elems, tail) => {
                out.write_char('<')?;
                let mut first = true;
                let mut sep = |out: &mut String| {
                    if !std::mem::take(&mut first) {
                        out.push_str(", ");
                    }
                };
                for e in elems {
                    sep(out);
                    self.write(e, out)?;
                }
                let mut tail = *tail;
                while let Some(tv) = tail {
                    let (r, b) = self.env.deref(tv);
                    match b {
                        Some(Fs::List(more, t2)) if self.counts.get(&r).copied().unwrap_or(0) <= 1 => {
                            let (more, t2) = (more.clone(), *t2);
                            for e in &more {
                                sep(out);
                                self.write(e, out)?;
                            }
                            tail = t2;
                        }
                        _ => {
                            out.push_str(" | ");
                            self.write_var(tv, true, out)?;
                            break;
                        }
                    }
                }
                out.write_char('>')
            }
        }
    }

    /// An unbound variable seen once is printed as `[]` unless it is a
    /// list tail.
    fn write_var(&mut self, v: VarId, tail: bool, out: &mut String) -> fmt::Result {
        use fmt::Write;
        let (r, b) = self.env.deref(v);
        match b {
            None if !tail && self.counts.get(&r).copied().unwrap_or(0) <= 1 => out.write_str("[]"),
            None => {
                let n = self.num(r);
                write!(out, "?{n}")
            }
            Some(Fs::Atom(a)) => out.write_str(a),
            Some(b) => {
                if self.counts.get(&r).copied().unwrap_or(0) >= 2 {
                    let n = self.num(r);
                    write!(out, "#{n}")?;
                    if self.emitted.insert(r) {
                        let b = b.clone();
                        self.write(&b, out)?;
                    }
                    Ok(())
                } else {
                    let b = b.clone();
                    self.write(&b, out)
                }
            }
        }
    }
}
