use std::collections::BTreeMap;
use std::fmt;

use super::derived::{adjoin_in_place, substitute_in_place, DerivedTree, Origin};
use super::{GornAddress, TagError, TreeInstance};
use crate::ug::{tree_bindings, Bindings, ParseTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Substitute,
    Adjoin,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Substitute => "substitute",
            OpKind::Adjoin => "adjoin",
        })
    }
}

/// A derivation tree: an elementary tree with the trees attached at its
/// addresses. Sibling order is by address, so two derivations that differ
/// only in the order of independent operations are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivNode {
    pub tree: String,
    pub attached: BTreeMap<GornAddress, (OpKind, DerivNode)>,
}

impl DerivNode {
    pub fn leaf(tree: impl Into<String>) -> Self {
        DerivNode { tree: tree.into(), attached: BTreeMap::new() }
    }

    pub fn size(&self) -> usize {
        1 + self.attached.values().map(|(_, c)| c.size()).sum::<usize>()
    }

    /// `(adjoin beta_did_inv @0 into alpha_intrans[swim])`, top-down.
    pub fn ops(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.ops_into(&mut out);
        out
    }

    fn ops_into(&self, out: &mut Vec<String>) {
        for (a, (op, c)) in &self.attached {
            out.push(format!("({op} {} @{a} into {})", c.tree, self.tree));
        }
        for (_, c) in self.attached.values() {
            c.ops_into(out);
        }
    }

    /// Names of all elementary trees used.
    pub fn trees(&self) -> Vec<&str> {
        let mut out = vec![self.tree.as_str()];
        for (_, c) in self.attached.values() {
            out.extend(c.trees());
        }
        out
    }

    /// Builds the derived tree, applying operations top-down.
    pub fn derive(&self, lookup: &dyn Fn(&str) -> Option<TreeInstance>) -> Result<DerivedTree, TagError> {
        let inst = lookup(&self.tree).ok_or_else(|| TagError::UnknownTree(self.tree.clone()))?;
        let mut t = DerivedTree::from_instance(&inst);
        self.apply(&mut t, 0, lookup)?;
        Ok(t)
    }

    fn apply(&self, t: &mut DerivedTree, id: usize, lookup: &dyn Fn(&str) -> Option<TreeInstance>) -> Result<(), TagError> {
        for (addr, (op, child)) in &self.attached {
            let inst = lookup(&child.tree).ok_or_else(|| TagError::UnknownTree(child.tree.clone()))?;
            let at = t.root.find(&Origin { inst: id, addr: addr.clone() }).ok_or_else(|| TagError::BadAddress(addr.clone()))?;
            let cid = match op {
                OpKind::Substitute => substitute_in_place(t, &at, &inst)?,
                OpKind::Adjoin => adjoin_in_place(t, &at, &inst)?,
            };
            child.apply(t, cid, lookup)?;
        }
        Ok(())
    }
}

/// A complete, valid derivation.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub root: DerivNode,
    /// Finalized derived tree, with the root gap lists closed when the
    /// grammar is threaded.
    pub derived: DerivedTree,
    pub tree: ParseTree,
    pub bindings: Bindings,
}

impl Derivation {
    pub(crate) fn new(root: DerivNode, finalized: &DerivedTree) -> Self {
        let tree = finalized.to_parse_tree();
        let bindings = tree_bindings(&tree);
        Derivation { root, derived: finalized.clone(), tree, bindings }
    }

    pub fn ops(&self) -> Vec<String> {
        self.root.ops()
    }

    pub fn uses_tree(&self, name: &str) -> bool {
        self.root.trees().iter().any(|t| *t == name || t.starts_with(&format!("{name}[")))
    }
}

impl PartialEq for Derivation {
    fn eq(&self, o: &Self) -> bool {
        self.root == o.root
    }
}

impl Eq for Derivation {}

impl PartialOrd for Derivation {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Derivation {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.root.cmp(&o.root)
    }
}
