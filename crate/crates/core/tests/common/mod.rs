//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

pub mod fsgen;

use std::collections::BTreeSet;

use grambench::fs::{Env, Fs, Subst};
use grambench::ug::{
    extract_bindings, format_bindings, ChannelConfig, CompiledGrammar, FillerMark, NodeKind, ParseTree, UGParse,
    UgGrammar, FILLER_INDEX,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn toks(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

/// A parse identified by its rule-annotated bracketing and its bindings.
pub type ParseKey = (String, String);

pub fn key_of(tree: &ParseTree) -> ParseKey {
    let p = UGParse { tree: tree.clone(), bindings: Vec::new() };
    (tree.derivation_string(), format_bindings(&extract_bindings(&p)))
}

/// Exhaustive top-down enumeration of UG derivations with a tree depth
/// bound. Backtracks by cloning the substitution; no chart, no sharing.
pub struct UgOracle {
    g: CompiledGrammar,
    channels: Vec<String>,
}

struct Found {
    s: Subst,
    tree: ParseTree,
    end: usize,
}

impl UgOracle {
    pub fn new(g: &UgGrammar, config: ChannelConfig) -> Self {
        let g = CompiledGrammar::new(g, config);
        let channels = g.channel_names();
        UgOracle { g, channels }
    }

    pub fn enumerate(&self, tokens: &[&str], depth: usize) -> BTreeSet<ParseKey> {
        let mut s = Subst::new();
        let root = s.import(&self.g.root_pattern());
        let root_cat = self.g.root_cat.clone();
        self.derive(&s, &root, &root_cat, tokens, 0, depth)
            .into_iter()
            .filter(|f| f.end == tokens.len())
            .map(|f| key_of(&f.tree))
            .collect()
    }

    fn derive(&self, s: &Subst, goal: &Fs, cat: &str, tokens: &[&str], pos: usize, depth: usize) -> Vec<Found> {
        let mut out = Vec::new();
        if pos < tokens.len() {
            for lex in self.g.lexicon.get(tokens[pos]).into_iter().flatten().filter(|l| l.cat == cat) {
                let mut s2 = s.clone();
                let l = s2.import(&lex.fs);
                if s2.unify(goal, &l).is_ok() {
                    let tree = leaf(cat, pos, pos + 1, NodeKind::Word(lex.word.clone()));
                    out.push(Found { s: s2, tree, end: pos + 1 });
                }
            }
        }
        for ch in self.g.channels.iter().filter(|c| c.trace_cats.iter().any(|t| t == cat)) {
            let mut s2 = s.clone();
            if let Some(idx) = self.pop(&mut s2, goal, cat, &ch.name) {
                let tree = leaf(cat, pos, pos, NodeKind::Trace { channel: ch.name.clone(), index: idx });
                out.push(Found { s: s2, tree, end: pos });
            }
        }
        if depth == 0 {
            return out;
        }
        for r in self.g.rules.iter().filter(|r| r.mother_cat == cat) {
            let mut s2 = s.clone();
            let t = s2.import(&r.template);
            let Some((elems, _)) = s2.list_elems(&t) else { continue };
            if s2.unify(&elems[0], goal).is_err() {
                continue;
            }
            // partial sequences: (subst, children, position)
            let mut partial = vec![(s2, Vec::<ParseTree>::new(), pos)];
            for (k, dcat) in r.daughter_cats.iter().enumerate() {
                let mut next = Vec::new();
                for (sk, kids, p) in partial {
                    for mut f in self.derive(&sk, &elems[k + 1], dcat, tokens, p, depth - 1) {
                        if let Some((_, ch)) = r.fillers.iter().find(|(d, _)| *d == k) {
                            let idx = format!("f{p}");
                            let Some(slot) = f.s.get_path(&elems[k + 1], &[FILLER_INDEX]) else { continue };
                            if f.s.unify(&slot, &Fs::atom(&idx)).is_err() {
                                continue;
                            }
                            f.tree.filler = Some(FillerMark { channel: ch.clone(), index: idx });
                        }
                        let mut kids = kids.clone();
                        kids.push(f.tree);
                        next.push((f.s, kids, f.end));
                    }
                }
                partial = next;
            }
            for (sk, kids, end) in partial {
                let tree = ParseTree {
                    cat: cat.to_string(),
                    start: pos,
                    end,
                    kind: NodeKind::Phrase { rule: r.name.clone(), children: kids },
                    filler: None,
                    gaps: Vec::new(),
                };
                out.push(Found { s: sk, tree, end });
            }
        }
        out
    }

    /// Takes the first element off the `ch` list of `goal` if it is a
    /// filler of category `cat`; other lists pass through unchanged.
    fn pop(&self, s: &mut Subst, goal: &Fs, cat: &str, ch: &str) -> Option<String> {
        let gin = s.get_path(goal, &["gap", ch, "in"])?;
        let (elems, tail) = s.list_elems(&gin)?;
        let first = elems.first()?.clone();
        if s.resolve(&s.get_path(&first, &["cat"])?) != Fs::atom(cat) {
            return None;
        }
        let Fs::Atom(idx) = s.resolve(&s.get_path(&first, &["idx"])?) else { return None };
        let fh = s.get_path(&first, &["head"])?;
        let gh = s.get_path(goal, &["head"])?;
        s.unify(&gh, &fh).ok()?;
        let rest = match (elems.len(), tail) {
            (1, Some(v)) => Fs::Var(v),
            (1, None) => Fs::empty_list(),
            _ => Fs::List(elems[1..].to_vec(), tail),
        };
        let gout = s.get_path(goal, &["gap", ch, "out"])?;
        s.unify(&gout, &rest).ok()?;
        for other in self.channels.iter().filter(|c| *c != ch) {
            let i = s.get_path(goal, &["gap", other, "in"])?;
            let o = s.get_path(goal, &["gap", other, "out"])?;
            s.unify(&i, &o).ok()?;
        }
        Some(idx)
    }

    /// A random sentence of at most `max_len` words licensed by the grammar:
    /// the same top-down expansion with shuffled choices, picking words
    /// instead of reading them.
    pub fn generate(&self, rng: &mut impl Rng, max_len: usize, depth: usize) -> Option<Vec<String>> {
        let mut s = Subst::new();
        let root = s.import(&self.g.root_pattern());
        let root_cat = self.g.root_cat.clone();
        let mut budget = 20_000usize;
        let mut words = Vec::new();
        self.gen(&mut s, &root, &root_cat, rng, &mut words, max_len, depth, &mut budget)?;
        Some(words)
    }

    #[allow(clippy::too_many_arguments)]
    fn gen(
        &self,
        s: &mut Subst,
        goal: &Fs,
        cat: &str,
        rng: &mut impl Rng,
        words: &mut Vec<String>,
        max_len: usize,
        depth: usize,
        budget: &mut usize,
    ) -> Option<()> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        // 0 = word, 1 = trace, 2.. = rule
        let mut choices: Vec<usize> = vec![0, 1];
        if depth > 0 {
            choices.extend((0..self.g.rules.len()).filter(|&i| self.g.rules[i].mother_cat == cat).map(|i| i + 2));
        }
        choices.shuffle(rng);
        for c in choices {
            match c {
                0 => {
                    if words.len() >= max_len {
                        continue;
                    }
                    let mut lex: Vec<_> = self.g.lexicon.values().flatten().filter(|l| l.cat == cat).collect();
                    lex.sort_by(|a, b| a.word.cmp(&b.word));
                    lex.shuffle(rng);
                    for l in lex {
                        let mut s2 = s.clone();
                        let t = s2.import(&l.fs);
                        if s2.unify(goal, &t).is_ok() {
                            *s = s2;
                            words.push(l.word.clone());
                            return Some(());
                        }
                    }
                }
                1 => {
                    for ch in self.g.channels.iter().filter(|c| c.trace_cats.iter().any(|t| t == cat)) {
                        let mut s2 = s.clone();
                        if self.pop(&mut s2, goal, cat, &ch.name).is_some() {
                            *s = s2;
                            return Some(());
                        }
                    }
                }
                r => {
                    let rule = &self.g.rules[r - 2];
                    let mut s2 = s.clone();
                    let saved = words.len();
                    let t = s2.import(&rule.template);
                    let Some((elems, _)) = s2.list_elems(&t) else { continue };
                    if s2.unify(&elems[0], goal).is_err() {
                        continue;
                    }
                    let mut ok = true;
                    for (k, dcat) in rule.daughter_cats.iter().enumerate() {
                        let start = words.len();
                        if self.gen(&mut s2, &elems[k + 1], dcat, rng, words, max_len, depth - 1, budget).is_none() {
                            ok = false;
                            break;
                        }
                        if rule.fillers.iter().any(|(d, _)| *d == k) {
                            let slot = s2.get_path(&elems[k + 1], &[FILLER_INDEX]);
                            let idx = Fs::atom(format!("f{start}"));
                            if slot.map(|sl| s2.unify(&sl, &idx).is_ok()) != Some(true) {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        *s = s2;
                        return Some(());
                    }
                    words.truncate(saved);
                }
            }
        }
        None
    }
}

fn leaf(cat: &str, start: usize, end: usize, kind: NodeKind) -> ParseTree {
    ParseTree { cat: cat.to_string(), start, end, kind, filler: None, gaps: Vec::new() }
}
