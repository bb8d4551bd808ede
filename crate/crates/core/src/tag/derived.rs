//! Derived trees and the two combination operations.

use std::collections::HashMap;

use super::{transfer_node, Anchor, GornAddress, NodeKind, TagError, TreeInstance, TreeKind, TreeNode};
use crate::fs::{Clash, Env, Fs, Subst};
use crate::ug::{FillerMark, NodeKind as PNode, ParseTree};

/// Which elementary tree (by instance number within a derivation) and which
/// of its nodes a derived node comes from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Origin {
    pub inst: usize,
    pub addr: GornAddress,
}

#[derive(Clone, Debug)]
pub struct DNode {
    pub node: TreeNode,
    pub children: Vec<DNode>,
    pub origin: Origin,
    /// Set on the foot node of an adjoined tree, which holds the bottom half
    /// of the host node.
    pub adjoined: bool,
}

impl DNode {
    fn from_tree(n: &TreeNode, inst: usize, addr: &mut Vec<usize>) -> DNode {
        let children = n
            .children
            .iter()
            .enumerate()
            .map(|(i, c)| {
                addr.push(i);
                let d = DNode::from_tree(c, inst, addr);
                addr.pop();
                d
            })
            .collect();
        let mut node = n.clone();
        node.children.clear();
        DNode { node, children, origin: Origin { inst, addr: GornAddress(addr.clone()) }, adjoined: false }
    }

    pub fn label(&self) -> &str {
        &self.node.label
    }

    pub fn kind(&self) -> &NodeKind {
        &self.node.kind
    }

    pub fn adjoinable(&self) -> bool {
        matches!(self.node.kind, NodeKind::Internal | NodeKind::Anchor(_)) && !self.node.no_adjoin && !self.adjoined
    }

    pub fn at(&self, addr: &[usize]) -> Option<&DNode> {
        let mut n = self;
        for &i in addr {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    pub fn at_mut(&mut self, addr: &[usize]) -> Option<&mut DNode> {
        let mut n = self;
        for &i in addr {
            n = n.children.get_mut(i)?;
        }
        Some(n)
    }

    pub fn find(&self, origin: &Origin) -> Option<GornAddress> {
        let mut out = None;
        self.walk(&mut Vec::new(), &mut |a, n| {
            if out.is_none() && &n.origin == origin && !n.adjoined {
                out = Some(GornAddress(a.to_vec()));
            }
        });
        out
    }

    pub fn walk<'a>(&'a self, addr: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a DNode)) {
        f(addr, self);
        for (i, c) in self.children.iter().enumerate() {
            addr.push(i);
            c.walk(addr, f);
            addr.pop();
        }
    }

    /// Postorder walk.
    fn post<'a>(&'a self, addr: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a DNode) -> bool) -> bool {
        for (i, c) in self.children.iter().enumerate() {
            addr.push(i);
            let go = c.post(addr, f);
            addr.pop();
            if !go {
                return false;
            }
        }
        f(addr, self)
    }

    /// Overt words of the frontier.
    pub fn yield_words(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |_, n| {
            if let NodeKind::Anchor(Anchor::Word(w)) = &n.node.kind {
                out.push(w.clone());
            }
        });
        out
    }
}

#[derive(Clone, Debug)]
pub struct DerivedTree {
    pub root: DNode,
    pub env: Subst,
    pub(crate) next_inst: usize,
}

impl DerivedTree {
    /// A derived tree consisting of one elementary tree.
    pub fn from_instance(inst: &TreeInstance) -> DerivedTree {
        let mut env = Subst::new();
        let root = import(&mut env, inst, 0);
        DerivedTree { root, env, next_inst: 1 }
    }

    pub fn at(&self, addr: &GornAddress) -> Option<&DNode> {
        self.root.at(&addr.0)
    }

    pub fn yield_words(&self) -> Vec<String> {
        self.root.yield_words()
    }

    /// Token-indexed parse tree; ε anchors become traces.
    pub fn to_parse_tree(&self) -> ParseTree {
        let mut fillers = HashMap::new();
        let mut pos = 0;
        // first pass: spans of pushing nodes keyed by their index variable
        let tree = self.convert(&self.root, &mut pos, &mut fillers);
        let mut tree = tree;
        attach_trace_indices(&mut tree, &self.root, &fillers, &self.env);
        tree
    }

    fn convert(&self, n: &DNode, pos: &mut usize, fillers: &mut HashMap<u32, String>) -> ParseTree {
        let start = *pos;
        let kind = match &n.node.kind {
            NodeKind::Anchor(Anchor::Word(w)) => {
                *pos += 1;
                PNode::Word(w.clone())
            }
            NodeKind::Anchor(_) => PNode::Trace { channel: n.node.trace.clone().unwrap_or_default(), index: String::new() },
            _ => {
                let rule = format!("{}@{}", n.origin.inst, n.origin.addr);
                let children = n.children.iter().map(|c| self.convert(c, pos, fillers)).collect();
                PNode::Phrase { rule, children }
            }
        };
        let filler = match (&n.node.push, &n.node.idx) {
            (Some(ch), Some(idx)) => {
                let index = format!("f{start}");
                if let Some(v) = idx_rep(&self.env, idx) {
                    fillers.insert(v, index.clone());
                }
                Some(FillerMark { channel: ch.clone(), index })
            }
            _ => None,
        };
        ParseTree { cat: n.node.label.clone(), start, end: *pos, kind, filler, gaps: Vec::new() }
    }
}

fn idx_rep(env: &Subst, idx: &Fs) -> Option<u32> {
    match idx {
        Fs::Var(v) => Some(env.deref(*v).0),
        _ => None,
    }
}

fn attach_trace_indices(t: &mut ParseTree, n: &DNode, fillers: &HashMap<u32, String>, env: &Subst) {
    if let PNode::Trace { index, .. } = &mut t.kind {
        if let Some(i) = n.node.idx.as_ref().and_then(|i| idx_rep(env, i)).and_then(|v| fillers.get(&v)) {
            *index = i.clone();
        }
        return;
    }
    if let PNode::Phrase { children, .. } = &mut t.kind {
        for (c, d) in children.iter_mut().zip(&n.children) {
            attach_trace_indices(c, d, fillers, env);
        }
    }
}

fn import(env: &mut Subst, inst: &TreeInstance, id: usize) -> DNode {
    let mut map = HashMap::new();
    let node = transfer_node(env, &inst.tree.env, &inst.tree.root, &mut map);
    DNode::from_tree(&node, id, &mut Vec::new())
}

fn failure(c: Clash) -> TagError {
    TagError::Failure(c)
}

/// Replaces the substitution node at `addr` with a copy of `init`.
pub fn substitute(host: &DerivedTree, addr: &GornAddress, init: &TreeInstance) -> Result<DerivedTree, TagError> {
    let mut out = host.clone();
    substitute_in_place(&mut out, addr, init)?;
    Ok(out)
}

/// Adjoins a copy of `aux` at `addr`.
pub fn adjoin(host: &DerivedTree, addr: &GornAddress, aux: &TreeInstance) -> Result<DerivedTree, TagError> {
    let mut out = host.clone();
    adjoin_in_place(&mut out, addr, aux)?;
    Ok(out)
}

pub(crate) fn substitute_in_place(t: &mut DerivedTree, addr: &GornAddress, init: &TreeInstance) -> Result<usize, TagError> {
    let n = t.root.at(&addr.0).ok_or_else(|| TagError::BadAddress(addr.clone()))?;
    if n.node.kind != NodeKind::Substitution {
        return Err(TagError::NotSubstitutionNode(addr.clone()));
    }
    if init.kind() != TreeKind::Initial {
        return Err(TagError::WrongTreeKind(init.name.clone()));
    }
    if n.label() != init.root_label() {
        return Err(TagError::LabelMismatch { node: n.label().to_string(), tree: init.root_label().to_string() });
    }
    let slot = n.node.clone();
    let id = t.next_inst;
    let mut sub = import(&mut t.env, init, id);
    sub.node.top = t.env.unify(&slot.top, &sub.node.top).map_err(failure)?;
    if slot.push.is_some() {
        sub.node.push = slot.push;
        sub.node.idx = slot.idx;
    }
    t.next_inst += 1;
    *t.root.at_mut(&addr.0).expect("checked") = sub;
    Ok(id)
}

pub(crate) fn adjoin_in_place(t: &mut DerivedTree, addr: &GornAddress, aux: &TreeInstance) -> Result<usize, TagError> {
    let n = t.root.at(&addr.0).ok_or_else(|| TagError::BadAddress(addr.clone()))?;
    if !n.adjoinable() {
        return Err(TagError::NotAdjoinable(addr.clone()));
    }
    if aux.kind() != TreeKind::Auxiliary {
        return Err(TagError::WrongTreeKind(aux.name.clone()));
    }
    if n.label() != aux.root_label() {
        return Err(TagError::LabelMismatch { node: n.label().to_string(), tree: aux.root_label().to_string() });
    }
    let foot_addr = aux.tree.foot_address().ok_or_else(|| TagError::WrongTreeKind(aux.name.clone()))?;
    let id = t.next_inst;
    let mut a = import(&mut t.env, aux, id);
    let host = t.root.at(&addr.0).expect("checked").clone();
    a.node.top = t.env.unify(&host.node.top, &a.node.top).map_err(failure)?;
    let foot = a.at_mut(&foot_addr.0).expect("foot exists");
    let bot = t.env.unify(&host.node.bot, &foot.node.bot).map_err(failure)?;
    foot.node.kind = host.node.kind.clone();
    foot.node.bot = bot;
    if host.node.trace.is_some() {
        foot.node.trace = host.node.trace.clone();
        foot.node.idx = host.node.idx.clone();
    }
    foot.children = host.children;
    foot.adjoined = true;
    if host.node.push.is_some() {
        a.node.push = host.node.push.clone();
        a.node.idx = host.node.idx.clone();
    }
    t.next_inst += 1;
    *t.root.at_mut(&addr.0).expect("checked") = a;
    Ok(id)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FinalizeError {
    #[error("CLASH at node {addr} on {}", clash.path_string())]
    Clash { addr: GornAddress, clash: Clash },
    #[error("substitution node {0} left open")]
    OpenSubstitution(GornAddress),
}

impl FinalizeError {
    pub fn path(&self) -> Option<&[String]> {
        match self {
            FinalizeError::Clash { clash, .. } => Some(&clash.path),
            _ => None,
        }
    }
}

/// Unifies top and bottom of every node, bottom-up and left to right. The
/// first failure is reported with the node's address.
pub fn finalize(t: &DerivedTree) -> Result<DerivedTree, FinalizeError> {
    let mut out = t.clone();
    let mut err = None;
    let mut merged = Vec::new();
    let env = &mut out.env;
    t.root.post(&mut Vec::new(), &mut |a, n| {
        let addr = GornAddress(a.to_vec());
        if n.node.kind == NodeKind::Substitution {
            err = Some(FinalizeError::OpenSubstitution(addr));
            return false;
        }
        match env.unify(&n.node.top, &n.node.bot) {
            Ok(m) => {
                merged.push((addr, m));
                true
            }
            Err(clash) => {
                err = Some(FinalizeError::Clash { addr, clash });
                false
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    for (a, m) in merged {
        let n = out.root.at_mut(&a.0).expect("walked");
        n.node.top = m.clone();
        n.node.bot = m;
    }
    Ok(out)
}
