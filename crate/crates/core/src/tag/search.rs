//! Two independent ways of finding derivations: a left-to-right
//! depth-first search that matches anchors against the input as it walks
//! the derived tree, and an exhaustive breadth-first enumeration of
//! derivation trees used as a reference.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;
use std::str::FromStr;

use super::derived::{adjoin_in_place, finalize, substitute_in_place, DerivedTree};
use super::{
    enable_adjunct_gap_threading, Anchor, DerivNode, Derivation, GornAddress, NodeKind, OpKind, TagError, TagGrammar,
    TreeInstance, TreeKind, TreeNode,
};
use crate::fs::Fs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TagConfig {
    /// Without gap threading: a threaded grammar is taken back to its
    /// source.
    Baseline,
    /// With adjunct gap threading switched on.
    GapExt,
}

impl TagConfig {
    pub fn name(self) -> &'static str {
        match self {
            TagConfig::Baseline => "baseline",
            TagConfig::GapExt => "gap-ext",
        }
    }
}

impl FromStr for TagConfig {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(TagConfig::Baseline),
            "gap-ext" => Ok(TagConfig::GapExt),
            _ => Err(format!("unknown TAG configuration '{s}' (expected baseline or gap-ext)")),
        }
    }
}

/// A grammar prepared for one configuration.
pub struct TagParser {
    grammar: TagGrammar,
    instances: Vec<Rc<TreeInstance>>,
}

impl TagParser {
    pub fn new(g: &TagGrammar, config: TagConfig) -> Self {
        let grammar = match (config, &g.source) {
            (TagConfig::GapExt, None) if !g.channels.is_empty() => enable_adjunct_gap_threading(g),
            (TagConfig::Baseline, Some(src)) => (**src).clone(),
            _ => g.clone(),
        };
        Self::as_loaded(grammar)
    }

    fn as_loaded(grammar: TagGrammar) -> Self {
        let instances = grammar.instances().into_iter().map(Rc::new).collect();
        TagParser { grammar, instances }
    }

    pub fn grammar(&self) -> &TagGrammar {
        &self.grammar
    }

    fn usable(&self, tokens: &[&str]) -> Result<Vec<Rc<TreeInstance>>, TagError> {
        for (i, t) in tokens.iter().enumerate() {
            if !self.grammar.knows(t) {
                return Err(TagError::UnknownToken { word: t.to_string(), position: i });
            }
        }
        let counts = counts(tokens.iter().copied());
        Ok(self
            .instances
            .iter()
            .filter(|i| counts_fit(&counts, &HashMap::new(), &i.words))
            .cloned()
            .collect())
    }

    /// All valid derivations, ordered by derivation tree.
    pub fn parse(&self, tokens: &[&str]) -> Result<Vec<Derivation>, TagError> {
        let insts = self.usable(tokens)?;
        let mut s = Search {
            tokens,
            initial: by_label(&insts, TreeKind::Initial),
            aux: by_label(&insts, TreeKind::Auxiliary),
            insts,
            closure: closure(&self.grammar),
            eps_limit: tokens.len() + 2,
            results: BTreeMap::new(),
        };
        for i in s.initial.get(START).cloned().unwrap_or_default() {
            let inst = s.insts[i].clone();
            let tree = DerivedTree::from_instance(&inst);
            let mut reserved = HashMap::new();
            for w in &inst.words {
                *reserved.entry(w.clone()).or_default() += 1;
            }
            let st = State {
                tree,
                pos: 0,
                stack: vec![Task::Visit(Vec::new())],
                reserved,
                ops: Vec::new(),
                names: vec![inst.name.clone()],
                eps: usize::from(inst.words.is_empty()),
            };
            s.run(st);
        }
        Ok(s.results.into_values().collect())
    }
}

const START: &str = "S";

pub fn tag_parse(grammar: &TagGrammar, tokens: &[&str], config: TagConfig) -> Result<Vec<Derivation>, TagError> {
    TagParser::new(grammar, config).parse(tokens)
}

fn counts<'a>(ws: impl IntoIterator<Item = &'a str>) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for w in ws {
        *m.entry(w.to_string()).or_default() += 1;
    }
    m
}

/// Whether `reserved` plus `extra` fits into `avail`.
fn counts_fit(avail: &HashMap<String, usize>, reserved: &HashMap<String, usize>, extra: &[String]) -> bool {
    let mut need = reserved.clone();
    for w in extra {
        *need.entry(w.clone()).or_default() += 1;
    }
    need.iter().all(|(w, n)| avail.get(w).copied().unwrap_or(0) >= *n)
}

fn by_label(insts: &[Rc<TreeInstance>], kind: TreeKind) -> HashMap<String, Vec<usize>> {
    let mut m: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, inst) in insts.iter().enumerate().filter(|(_, i)| i.kind() == kind) {
        m.entry(inst.root_label().to_string()).or_default().push(i);
    }
    m
}

/// Root condition for threaded grammars: every list empty at the top.
fn closure(g: &TagGrammar) -> Option<Vec<String>> {
    g.source.as_ref()?;
    Some(g.channels.iter().map(|c| c.name.clone()).collect())
}

fn close_root(t: &mut DerivedTree, channels: &[String]) -> bool {
    let empty = Fs::avm([("in", Fs::empty_list()), ("out", Fs::empty_list())]);
    let want = Fs::avm([("gap", Fs::avm(channels.iter().map(|c| (c.clone(), empty.clone()))))]);
    let top = t.root.node.top.clone();
    t.env.unify(&top, &want).is_ok()
}

/// Finalizes and applies the root condition.
fn complete(t: &DerivedTree, channels: &Option<Vec<String>>) -> Option<DerivedTree> {
    let mut f = finalize(t).ok()?;
    if let Some(chs) = channels {
        if !close_root(&mut f, chs) {
            return None;
        }
    }
    Some(f)
}

#[derive(Clone)]
enum Task {
    Visit(Vec<usize>),
    Close(Vec<usize>),
}

#[derive(Clone)]
struct OpRec {
    parent: usize,
    addr: GornAddress,
    kind: OpKind,
    child: usize,
}

#[derive(Clone)]
struct State {
    tree: DerivedTree,
    pos: usize,
    stack: Vec<Task>,
    reserved: HashMap<String, usize>,
    ops: Vec<OpRec>,
    names: Vec<String>,
    eps: usize,
}

impl State {
    fn deriv_node(&self, id: usize) -> DerivNode {
        let mut d = DerivNode::leaf(self.names[id].clone());
        for op in self.ops.iter().filter(|o| o.parent == id) {
            d.attached.insert(op.addr.clone(), (op.kind, self.deriv_node(op.child)));
        }
        d
    }
}

struct Search<'a> {
    tokens: &'a [&'a str],
    insts: Vec<Rc<TreeInstance>>,
    initial: HashMap<String, Vec<usize>>,
    aux: HashMap<String, Vec<usize>>,
    closure: Option<Vec<String>>,
    eps_limit: usize,
    results: BTreeMap<DerivNode, Derivation>,
}

impl Search<'_> {
    fn fits(&self, st: &State, inst: &TreeInstance) -> bool {
        if inst.words.is_empty() && st.eps >= self.eps_limit {
            return false;
        }
        let avail = counts(self.tokens[st.pos..].iter().copied());
        counts_fit(&avail, &st.reserved, &inst.words)
    }

    fn attach(&mut self, st: &State, a: &[usize], i: usize, kind: OpKind) {
        let inst = self.insts[i].clone();
        if !self.fits(st, &inst) {
            return;
        }
        let mut s2 = st.clone();
        let addr = GornAddress(a.to_vec());
        let origin = s2.tree.root.at(a).expect("visited node").origin.clone();
        let placed = match kind {
            OpKind::Substitute => substitute_in_place(&mut s2.tree, &addr, &inst),
            OpKind::Adjoin => adjoin_in_place(&mut s2.tree, &addr, &inst),
        };
        let Ok(id) = placed else { return };
        debug_assert_eq!(id, s2.names.len());
        s2.names.push(inst.name.clone());
        s2.ops.push(OpRec { parent: origin.inst, addr: origin.addr, kind, child: id });
        for w in &inst.words {
            *s2.reserved.entry(w.clone()).or_default() += 1;
        }
        if inst.words.is_empty() {
            s2.eps += 1;
        }
        s2.stack.push(Task::Visit(a.to_vec()));
        self.run(s2);
    }

    fn run(&mut self, mut st: State) {
        loop {
            let Some(task) = st.stack.pop() else {
                self.finish(&st);
                return;
            };
            match task {
                Task::Close(a) => {
                    let n = &st.tree.root.at(&a).expect("visited node").node;
                    let (t, b) = (n.top.clone(), n.bot.clone());
                    if st.tree.env.unify(&t, &b).is_err() {
                        return;
                    }
                }
                Task::Visit(a) => {
                    let n = st.tree.root.at(&a).expect("visited node");
                    let label = n.label().to_string();
                    let kind = n.kind().clone();
                    let nkids = n.children.len();
                    if kind == NodeKind::Substitution {
                        for i in self.initial.get(&label).cloned().unwrap_or_default() {
                            self.attach(&st, &a, i, OpKind::Substitute);
                        }
                        return;
                    }
                    if n.adjoinable() {
                        for i in self.aux.get(&label).cloned().unwrap_or_default() {
                            self.attach(&st, &a, i, OpKind::Adjoin);
                        }
                    }
                    match kind {
                        NodeKind::Internal => {
                            st.stack.push(Task::Close(a.clone()));
                            for c in (0..nkids).rev() {
                                let mut ca = a.clone();
                                ca.push(c);
                                st.stack.push(Task::Visit(ca));
                            }
                        }
                        NodeKind::Anchor(Anchor::Word(w)) => {
                            if self.tokens.get(st.pos) != Some(&w.as_str()) {
                                return;
                            }
                            st.pos += 1;
                            if let Some(r) = st.reserved.get_mut(&w) {
                                *r -= 1;
                            }
                            st.stack.push(Task::Close(a));
                        }
                        NodeKind::Anchor(Anchor::Empty) => st.stack.push(Task::Close(a)),
                        _ => return,
                    }
                }
            }
        }
    }

    fn finish(&mut self, st: &State) {
        if st.pos != self.tokens.len() {
            return;
        }
        let Some(f) = complete(&st.tree, &self.closure) else { return };
        let root = st.deriv_node(0);
        self.results.entry(root.clone()).or_insert_with(|| Derivation::new(root, &f));
    }
}

/// Every derivation with at most `op_bound` operations whose derived tree
/// yields `tokens`, found by enumerating derivation trees breadth-first.
/// Only useful for short sentences. The grammar is used as given; pass
/// [`TagParser::grammar`] to enumerate under a configuration.
pub fn brute_force_derive(g: &TagGrammar, tokens: &[&str], op_bound: usize) -> Result<Vec<Derivation>, TagError> {
    let parser = TagParser::as_loaded(g.clone());
    let insts = parser.usable(tokens)?;
    let by_name: HashMap<String, Rc<TreeInstance>> = insts.iter().map(|i| (i.name.clone(), i.clone())).collect();
    let lookup = |n: &str| by_name.get(n).map(|i| (**i).clone());
    let avail = counts(tokens.iter().copied());
    let channels = closure(parser.grammar());

    let mut seen: HashSet<DerivNode> = HashSet::new();
    let mut frontier: Vec<(DerivNode, HashMap<String, usize>)> = Vec::new();
    for inst in insts.iter().filter(|i| i.kind() == TreeKind::Initial && i.root_label() == START) {
        let d = DerivNode::leaf(inst.name.clone());
        if seen.insert(d.clone()) {
            frontier.push((d, counts(inst.words.iter().map(String::as_str))));
        }
    }
    let mut results = BTreeMap::new();
    for depth in 0..=op_bound {
        let mut next = Vec::new();
        for (d, used) in &frontier {
            let mut sites = Vec::new();
            open_sites(d, &by_name, &mut Vec::new(), &mut sites);
            if sites.iter().all(|s| s.kind != OpKind::Substitute) {
                if let Ok(t) = d.derive(&lookup) {
                    if t.yield_words() == tokens {
                        if let Some(f) = complete(&t, &channels) {
                            results.entry(d.clone()).or_insert_with(|| Derivation::new(d.clone(), &f));
                        }
                    }
                }
            }
            if depth == op_bound {
                continue;
            }
            for site in &sites {
                for inst in insts.iter().filter(|i| i.root_label() == site.label) {
                    let want = if site.kind == OpKind::Substitute { TreeKind::Initial } else { TreeKind::Auxiliary };
                    if inst.kind() != want || !counts_fit(&avail, used, &inst.words) {
                        continue;
                    }
                    let mut nd = d.clone();
                    insert_at(&mut nd, &site.path, &site.addr, site.kind, DerivNode::leaf(inst.name.clone()));
                    if seen.contains(&nd) {
                        continue;
                    }
                    // operations that fail on their own prune the branch
                    if nd.derive(&lookup).is_err() {
                        seen.insert(nd);
                        continue;
                    }
                    seen.insert(nd.clone());
                    let mut u = used.clone();
                    for w in &inst.words {
                        *u.entry(w.clone()).or_default() += 1;
                    }
                    next.push((nd, u));
                }
            }
        }
        frontier = next;
    }
    Ok(results.into_values().collect())
}

struct Site {
    path: Vec<GornAddress>,
    addr: GornAddress,
    kind: OpKind,
    label: String,
}

fn open_sites(d: &DerivNode, insts: &HashMap<String, Rc<TreeInstance>>, path: &mut Vec<GornAddress>, out: &mut Vec<Site>) {
    let Some(inst) = insts.get(&d.tree) else { return };
    inst.tree.root.walk(&mut Vec::new(), &mut |a, n: &TreeNode| {
        let addr = GornAddress(a.to_vec());
        if d.attached.contains_key(&addr) {
            return;
        }
        let kind = match n.kind {
            NodeKind::Substitution => OpKind::Substitute,
            NodeKind::Internal | NodeKind::Anchor(_) if !n.no_adjoin => OpKind::Adjoin,
            _ => return,
        };
        out.push(Site { path: path.clone(), addr, kind, label: n.label.clone() });
    });
    for (a, (_, c)) in &d.attached {
        path.push(a.clone());
        open_sites(c, insts, path, out);
        path.pop();
    }
}

fn insert_at(d: &mut DerivNode, path: &[GornAddress], addr: &GornAddress, kind: OpKind, child: DerivNode) {
    match path.split_first() {
        None => {
            d.attached.insert(addr.clone(), (kind, child));
        }
        Some((first, rest)) => {
            let (_, c) = d.attached.get_mut(first).expect("path follows attachments");
            insert_at(c, rest, addr, kind, child);
        }
    }
}
