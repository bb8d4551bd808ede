//! Earley-style chart parser over the compiled backbone. Items keep their
//! whole instantiated rule as one canonical feature structure, so two items
//! are the same exactly when their rule, span, progress, constraints and
//! partial trees agree.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::rc::Rc;

use super::grammar::{CompiledGrammar, CompiledRule, FILLER_INDEX};
use super::tree::{tree_bindings, FillerMark, GapState, NodeKind, ParseTree, UGParse};
use super::{ChannelConfig, UgError, UgGrammar};
use crate::fs::{Env, FeatureStructure, Fs, Subst};

#[derive(Clone, PartialEq, Eq, Hash)]
struct Item {
    rule: usize,
    start: usize,
    dot: usize,
    state: Rc<FeatureStructure>,
    children: Rc<Vec<ParseTree>>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Constituent {
    cat: String,
    start: usize,
    end: usize,
    fs: Rc<FeatureStructure>,
    tree: Rc<ParseTree>,
}

/// A grammar compiled for one channel configuration; reusable across
/// sentences.
pub struct UgParser {
    grammar: CompiledGrammar,
    start_rule: CompiledRule,
}

const START: usize = usize::MAX;

impl UgParser {
    pub fn new(g: &UgGrammar, config: ChannelConfig) -> Self {
        Self::from_compiled(CompiledGrammar::new(g, config))
    }

    pub fn from_compiled(grammar: CompiledGrammar) -> Self {
        let mut s = Subst::new();
        let root = s.import(&grammar.root_pattern());
        let start_rule = CompiledRule {
            name: "START".into(),
            mother_cat: "START".into(),
            daughter_cats: vec![grammar.root_cat.clone()],
            template: s.snapshot(&Fs::List(vec![Fs::top(), root], None)),
            fillers: Vec::new(),
        };
        UgParser { grammar, start_rule }
    }

    pub fn compiled(&self) -> &CompiledGrammar {
        &self.grammar
    }

    fn rule(&self, i: usize) -> &CompiledRule {
        if i == START {
            &self.start_rule
        } else {
            &self.grammar.rules[i]
        }
    }

    pub fn parse(&self, tokens: &[&str]) -> Result<Vec<UGParse>, UgError> {
        for (i, t) in tokens.iter().enumerate() {
            if !self.grammar.lexicon.contains_key(*t) {
                return Err(UgError::UnknownToken { word: t.to_string(), position: i });
            }
        }
        let n = tokens.len();
        let mut chart = Chart::new(n);
        chart.pending[0].push_back(Event::Item(Item {
            rule: START,
            start: 0,
            dot: 0,
            state: Rc::new(self.start_rule.template.clone()),
            children: Rc::new(Vec::new()),
        }));
        let mut parses = BTreeMap::new();
        for j in 0..=n {
            while let Some(ev) = chart.pending[j].pop_front() {
                match ev {
                    Event::Item(item) => self.process_item(&mut chart, tokens, j, item),
                    Event::Constituent(c) => {
                        if c.cat == "START" {
                            if c.start == 0 && c.end == n {
                                let tree = c.tree.children()[0].clone();
                                let bindings = tree_bindings(&tree);
                                parses.insert(tree.derivation_string(), UGParse { tree, bindings });
                            }
                            continue;
                        }
                        let waiting = chart.waiting.get(&(c.start, c.cat.clone())).cloned().unwrap_or_default();
                        for w in waiting {
                            if let Some(next) = self.complete(&w, &c) {
                                chart.add_item(j, next);
                            }
                        }
                    }
                }
            }
        }
        Ok(parses.into_values().collect())
    }

    fn process_item(&self, chart: &mut Chart, tokens: &[&str], j: usize, item: Item) {
        let rule = self.rule(item.rule);
        if item.dot == rule.daughter_cats.len() {
            let mut s = Subst::new();
            let st = s.import(&item.state);
            let mother = s.snapshot(&cats(&st)[0]);
            let tree = ParseTree {
                cat: rule.mother_cat.clone(),
                start: item.start,
                end: j,
                kind: NodeKind::Phrase { rule: rule.name.clone(), children: (*item.children).clone() },
                filler: None,
                gaps: Vec::new(),
            };
            chart.add_constituent(Constituent {
                cat: rule.mother_cat.clone(),
                start: item.start,
                end: j,
                fs: Rc::new(mother),
                tree: Rc::new(tree),
            });
            return;
        }
        let cat = rule.daughter_cats[item.dot].clone();
        chart.waiting.entry((j, cat.clone())).or_default().push(item.clone());
        let zero: Vec<Constituent> =
            chart.zero_width.get(&(j, cat.clone())).map(|v| v.to_vec()).unwrap_or_default();
        for c in zero {
            if let Some(next) = self.complete(&item, &c) {
                chart.add_item(j, next);
            }
        }
        // predict
        let mut s = Subst::new();
        let st = s.import(&item.state);
        let d = s.snapshot(&cats(&st)[item.dot + 1]);
        for (ri, r) in self.grammar.rules.iter().enumerate() {
            if r.mother_cat != cat || !chart.predicted[j].insert((ri, d.clone())) {
                continue;
            }
            let mut s2 = Subst::new();
            let t = s2.import(&r.template);
            let dt = s2.import(&d);
            if s2.unify(&cats(&t)[0], &dt).is_ok() {
                chart.add_item(
                    j,
                    Item { rule: ri, start: j, dot: 0, state: Rc::new(s2.snapshot(&t)), children: Rc::new(Vec::new()) },
                );
            }
        }
        // traces
        let names = self.grammar.channel_names();
        for ch in self.grammar.channels.iter().filter(|c| c.trace_cats.contains(&cat)) {
            let next = self.advance(&item, |s, d| {
                let idx = discharge(s, d, &cat, &ch.name, &names)?;
                Some(ParseTree {
                    cat: cat.clone(),
                    start: j,
                    end: j,
                    kind: NodeKind::Trace { channel: ch.name.clone(), index: idx },
                    filler: None,
                    gaps: Vec::new(),
                })
            });
            if let Some(next) = next {
                chart.add_item(j, next);
            }
        }
        // scan
        if j < tokens.len() {
            for lex in self.grammar.lexicon.get(tokens[j]).into_iter().flatten().filter(|l| l.cat == cat) {
                let next = self.advance(&item, |s, d| {
                    let l = s.import(&lex.fs);
                    s.unify(d, &l).ok()?;
                    Some(ParseTree {
                        cat: cat.clone(),
                        start: j,
                        end: j + 1,
                        kind: NodeKind::Word(lex.word.clone()),
                        filler: None,
                        gaps: Vec::new(),
                    })
                });
                if let Some(next) = next {
                    chart.add_item(j + 1, next);
                }
            }
        }
    }

    fn complete(&self, parent: &Item, c: &Constituent) -> Option<Item> {
        self.advance(parent, |s, d| {
            let m = s.import(&c.fs);
            s.unify(d, &m).ok()?;
            Some((*c.tree).clone())
        })
    }

    /// Moves the dot over one daughter; `attach` unifies the daughter and
    /// returns its subtree.
    fn advance(&self, item: &Item, attach: impl FnOnce(&mut Subst, &Fs) -> Option<ParseTree>) -> Option<Item> {
        let rule = self.rule(item.rule);
        let mut s = Subst::new();
        let st = s.import(&item.state);
        let d = cats(&st)[item.dot + 1].clone();
        let mut child = attach(&mut s, &d)?;
        if let Some((_, ch)) = rule.fillers.iter().find(|(k, _)| *k == item.dot) {
            let idx = format!("f{}", child.start);
            let slot = s.get_path(&d, &[FILLER_INDEX])?;
            s.unify(&slot, &Fs::atom(&idx)).ok()?;
            child.filler = Some(FillerMark { channel: ch.clone(), index: idx });
        }
        child.gaps = gap_states(&s, &d, &self.grammar.channel_names());
        let mut children = (*item.children).clone();
        children.push(child);
        Some(Item {
            rule: item.rule,
            start: item.start,
            dot: item.dot + 1,
            state: Rc::new(s.snapshot(&st)),
            children: Rc::new(children),
        })
    }
}

fn cats(st: &Fs) -> &[Fs] {
    match st {
        Fs::List(es, _) => es,
        _ => unreachable!("rule states are lists"),
    }
}

enum Event {
    Item(Item),
    Constituent(Constituent),
}

struct Chart {
    pending: Vec<VecDeque<Event>>,
    items: Vec<HashSet<Item>>,
    constituents: HashSet<Constituent>,
    waiting: HashMap<(usize, String), Vec<Item>>,
    zero_width: HashMap<(usize, String), Vec<Constituent>>,
    predicted: Vec<HashSet<(usize, FeatureStructure)>>,
}

impl Chart {
    fn new(n: usize) -> Self {
        Chart {
            pending: (0..=n).map(|_| VecDeque::new()).collect(),
            items: (0..=n).map(|_| HashSet::new()).collect(),
            constituents: HashSet::new(),
            waiting: HashMap::new(),
            zero_width: HashMap::new(),
            predicted: (0..=n).map(|_| HashSet::new()).collect(),
        }
    }

    fn add_item(&mut self, j: usize, item: Item) {
        if self.items[j].insert(item.clone()) {
            self.pending[j].push_back(Event::Item(item));
        }
    }

    fn add_constituent(&mut self, c: Constituent) {
        if self.constituents.insert(c.clone()) {
            if c.start == c.end {
                self.zero_width.entry((c.start, c.cat.clone())).or_default().push(c.clone());
            }
            self.pending[c.end].push_back(Event::Constituent(c));
        }
    }
}

pub(crate) fn rest_list(elems: &[Fs], tail: Option<u32>) -> Fs {
    if elems.is_empty() {
        match tail {
            Some(v) => Fs::Var(v),
            None => Fs::empty_list(),
        }
    } else {
        Fs::List(elems.to_vec(), tail)
    }
}

/// Fills slot `d` (category `slot_cat`) with a trace that pops the front of
/// its `ch` list; every other channel passes through. Returns the index of
/// the discharged filler.
pub(crate) fn discharge(s: &mut Subst, d: &Fs, slot_cat: &str, ch: &str, channels: &[String]) -> Option<String> {
    let gin = s.get_path(d, &["gap", ch, "in"])?;
    let (elems, tail) = s.list_elems(&gin)?;
    let front = elems.first()?.clone();
    if s.get_path(&front, &["cat"]).map(|c| s.resolve(&c)) != Some(Fs::atom(slot_cat)) {
        return None;
    }
    let idx = match s.get_path(&front, &["idx"]).map(|t| s.resolve(&t)) {
        Some(Fs::Atom(a)) => a,
        _ => return None,
    };
    let fhead = s.get_path(&front, &["head"])?;
    let dhead = s.get_path(d, &["head"])?;
    s.unify(&dhead, &fhead).ok()?;
    let rest = rest_list(&elems[1..], tail);
    let out = s.get_path(d, &["gap", ch, "out"])?;
    s.unify(&out, &rest).ok()?;
    for other in channels.iter().filter(|c| c.as_str() != ch) {
        let i = s.get_path(d, &["gap", other, "in"])?;
        let o = s.get_path(d, &["gap", other, "out"])?;
        s.unify(&i, &o).ok()?;
    }
    Some(idx)
}

fn index_list<E: Env>(s: &E, t: Option<Fs>) -> Vec<String> {
    let Some((elems, _)) = t.and_then(|t| s.list_elems(&t)) else { return Vec::new() };
    elems
        .iter()
        .map(|e| match s.get_path(e, &["idx"]).map(|i| s.resolve(&i)) {
            Some(Fs::Atom(a)) => a,
            _ => "?".to_string(),
        })
        .collect()
}

fn gap_states<E: Env>(s: &E, d: &Fs, channels: &[String]) -> Vec<GapState> {
    channels
        .iter()
        .map(|ch| GapState {
            channel: ch.clone(),
            gaps_in: index_list(s, s.get_path(d, &["gap", ch, "in"])),
            gaps_out: index_list(s, s.get_path(d, &["gap", ch, "out"])),
        })
        .collect()
}
