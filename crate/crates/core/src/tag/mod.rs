//! Feature-based tree-adjoining grammar.
//!
//! Nodes carry top and bottom feature structures. Substitution unifies the
//! slot's top with the initial tree's root top; adjunction unifies the
//! host's top with the auxiliary root's top and the host's bottom with the
//! foot's bottom. Each node's top and bottom must unify once the derivation
//! is complete; a failure there is a clash.

mod derivation;
mod derived;
mod gap;
mod search;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::fs::{Fs, Subst, VarId};
use crate::ug::ChannelDecl;

pub use derivation::{DerivNode, Derivation, OpKind};
pub use derived::{adjoin, finalize, substitute, DNode, DerivedTree, FinalizeError, Origin};
pub use gap::{enable_adjunct_gap_threading, OPT_ADJUNCT_GAPS};
pub use search::{brute_force_derive, tag_parse, TagConfig, TagParser};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Anchor {
    Word(String),
    /// Filled from the lexicon.
    Open,
    /// A phonologically empty anchor (trace).
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Internal,
    Anchor(Anchor),
    Substitution,
    Foot,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub label: String,
    pub kind: NodeKind,
    pub top: Fs,
    pub bot: Fs,
    pub children: Vec<TreeNode>,
    pub no_adjoin: bool,
    /// Pushes this constituent onto the next sibling's list for a channel.
    pub push: Option<String>,
    /// Channel an empty anchor discharges.
    pub trace: Option<String>,
    /// Filler index variable shared with the gap list element.
    pub idx: Option<Fs>,
}

impl TreeNode {
    pub fn new(label: impl Into<String>, kind: NodeKind) -> Self {
        TreeNode {
            label: label.into(),
            kind,
            top: Fs::top(),
            bot: Fs::top(),
            children: Vec::new(),
            no_adjoin: false,
            push: None,
            trace: None,
            idx: None,
        }
    }

    pub fn at(&self, addr: &GornAddress) -> Option<&TreeNode> {
        let mut n = self;
        for &i in &addr.0 {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    pub fn at_mut(&mut self, addr: &GornAddress) -> Option<&mut TreeNode> {
        let mut n = self;
        for &i in &addr.0 {
            n = n.children.get_mut(i)?;
        }
        Some(n)
    }

    /// Preorder walk with addresses.
    pub fn walk<'a>(&'a self, addr: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a TreeNode)) {
        f(addr, self);
        for (i, c) in self.children.iter().enumerate() {
            addr.push(i);
            c.walk(addr, f);
            addr.pop();
        }
    }

    pub fn walk_mut(&mut self, f: &mut impl FnMut(&mut TreeNode)) {
        f(self);
        for c in &mut self.children {
            c.walk_mut(f);
        }
    }

    pub(crate) fn count(&self, pred: &impl Fn(&TreeNode) -> bool) -> usize {
        pred(self) as usize + self.children.iter().map(|c| c.count(pred)).sum::<usize>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeKind {
    Initial,
    Auxiliary,
}

#[derive(Clone, Debug)]
pub struct ElementaryTree {
    pub name: String,
    pub kind: TreeKind,
    pub family: Option<String>,
    pub root: TreeNode,
    pub env: Subst,
    /// Lexicon entries for this tree name also anchor this tree.
    pub lex_as: Option<String>,
}

impl ElementaryTree {
    pub fn foot_address(&self) -> Option<GornAddress> {
        let mut out = None;
        self.root.walk(&mut Vec::new(), &mut |a, n| {
            if n.kind == NodeKind::Foot && out.is_none() {
                out = Some(GornAddress(a.to_vec()));
            }
        });
        out
    }

    pub fn foot_count(&self) -> usize {
        self.root.count(&|n| n.kind == NodeKind::Foot)
    }

    pub fn anchor_count(&self) -> usize {
        self.root.count(&|n| matches!(n.kind, NodeKind::Anchor(_)))
    }

    pub fn has_open_anchor(&self) -> bool {
        self.root.count(&|n| n.kind == NodeKind::Anchor(Anchor::Open)) > 0
    }

    /// Overt anchor words.
    pub fn words(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.root.walk(&mut Vec::new(), &mut |_, n| {
            if let NodeKind::Anchor(Anchor::Word(w)) = &n.kind {
                out.push(w.clone());
            }
        });
        out
    }

    pub fn lex_name(&self) -> &str {
        self.lex_as.as_deref().unwrap_or(&self.name)
    }
}

/// Tree addresses: child indices from the root. Printed 1-based and
/// dot-separated, with `0` for the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GornAddress(pub Vec<usize>);

impl GornAddress {
    pub fn root() -> Self {
        GornAddress(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        GornAddress(v)
    }
}

impl fmt::Display for GornAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl std::str::FromStr for GornAddress {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "0" {
            return Ok(GornAddress::root());
        }
        s.split('.')
            .map(|p| match p.parse::<usize>() {
                Ok(n) if n > 0 => Ok(n - 1),
                _ => Err(format!("bad address '{s}'")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(GornAddress)
    }
}

#[derive(Clone, Debug)]
pub struct TagLexEntry {
    pub word: String,
    pub tree: String,
    pub fs: Fs,
    pub env: Subst,
}

#[derive(Clone, Debug, Default)]
pub struct TagGrammar {
    pub name: String,
    pub features: BTreeMap<String, Option<Vec<String>>>,
    pub channels: Vec<ChannelDecl>,
    pub filler_features: Vec<String>,
    pub trees: Vec<ElementaryTree>,
    pub lexicon: Vec<TagLexEntry>,
    pub options: BTreeSet<String>,
    /// The grammar as written, when a transform has been applied.
    pub source: Option<Box<TagGrammar>>,
}

/// An elementary tree with all anchors filled.
#[derive(Clone, Debug)]
pub struct TreeInstance {
    pub name: String,
    pub tree: ElementaryTree,
    pub words: Vec<String>,
}

impl TreeInstance {
    pub fn kind(&self) -> TreeKind {
        self.tree.kind
    }

    pub fn root_label(&self) -> &str {
        &self.tree.root.label
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TagError {
    #[error("unknown token '{word}' at position {position}")]
    UnknownToken { word: String, position: usize },
    #[error("node at {0} is not a substitution node")]
    NotSubstitutionNode(GornAddress),
    #[error("node at {0} does not accept adjunction")]
    NotAdjoinable(GornAddress),
    #[error("label mismatch: node is {node}, tree root is {tree}")]
    LabelMismatch { node: String, tree: String },
    #[error("no node at address {0}")]
    BadAddress(GornAddress),
    #[error("tree '{0}' has the wrong kind for this operation")]
    WrongTreeKind(String),
    #[error("unknown tree '{0}'")]
    UnknownTree(String),
    #[error("unification failed: {0}")]
    Failure(crate::fs::Clash),
}

impl TagGrammar {
    pub fn tree(&self, name: &str) -> Option<&ElementaryTree> {
        self.trees.iter().find(|t| t.name == name)
    }

    pub fn knows(&self, word: &str) -> bool {
        self.lexicon.iter().any(|e| e.word == word) || self.trees.iter().any(|t| t.words().iter().any(|w| w == word))
    }

    /// Copy without the trees of the given families.
    pub fn without_family(&self, family: &str) -> TagGrammar {
        let mut g = self.clone();
        g.trees.retain(|t| t.family.as_deref() != Some(family));
        g
    }

    /// All anchored trees: trees with fixed anchors as they are, open trees
    /// once per lexicon entry that unifies with the anchor.
    pub fn instances(&self) -> Vec<TreeInstance> {
        let mut out = Vec::new();
        for t in &self.trees {
            if !t.has_open_anchor() {
                out.push(TreeInstance { name: t.name.clone(), words: t.words(), tree: t.clone() });
                continue;
            }
            for e in self.lexicon.iter().filter(|e| e.tree == t.lex_name()) {
                if let Some(inst) = anchor_tree(t, e) {
                    out.push(inst);
                }
            }
        }
        out
    }

    /// Instances whose overt anchors all occur in `tokens`.
    pub fn instances_for(&self, tokens: &[&str]) -> Result<Vec<Rc<TreeInstance>>, TagError> {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for t in tokens {
            *counts.entry(t).or_default() += 1;
        }
        for (i, t) in tokens.iter().enumerate() {
            if !self.knows(t) {
                return Err(TagError::UnknownToken { word: t.to_string(), position: i });
            }
        }
        Ok(self
            .instances()
            .into_iter()
            .filter(|inst| {
                let mut need: HashMap<&str, usize> = HashMap::new();
                for w in &inst.words {
                    *need.entry(w.as_str()).or_default() += 1;
                }
                need.iter().all(|(w, n)| counts.get(w).copied().unwrap_or(0) >= *n)
            })
            .map(Rc::new)
            .collect())
    }
}

fn anchor_tree(t: &ElementaryTree, e: &TagLexEntry) -> Option<TreeInstance> {
    let mut tree = t.clone();
    let mut map = HashMap::new();
    let lex = tree.env.transfer(&e.env, &e.fs, &mut map);
    let mut ok = true;
    let env = &mut tree.env;
    tree.root.walk_mut(&mut |n| {
        if n.kind == NodeKind::Anchor(Anchor::Open) {
            n.kind = NodeKind::Anchor(Anchor::Word(e.word.clone()));
            match env.unify(&n.bot, &lex) {
                Ok(b) => n.bot = b,
                Err(_) => ok = false,
            }
        }
    });
    if !ok {
        return None;
    }
    let name = format!("{}[{}]", t.name, e.word);
    tree.name = name.clone();
    Some(TreeInstance { name, words: tree.words(), tree })
}

/// Renames every term of a tree into `dst`.
pub(crate) fn transfer_node(dst: &mut Subst, src: &Subst, n: &TreeNode, map: &mut HashMap<VarId, VarId>) -> TreeNode {
    TreeNode {
        label: n.label.clone(),
        kind: n.kind.clone(),
        top: dst.transfer(src, &n.top, map),
        bot: dst.transfer(src, &n.bot, map),
        children: n.children.iter().map(|c| transfer_node(dst, src, c, map)).collect(),
        no_adjoin: n.no_adjoin,
        push: n.push.clone(),
        trace: n.trace.clone(),
        idx: n.idx.as_ref().map(|i| dst.transfer(src, i, map)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gorn_display_round_trip() {
        for s in ["0", "1", "2.1", "1.3.2"] {
            let a: GornAddress = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert!("0.1".parse::<GornAddress>().is_err());
    }
}
