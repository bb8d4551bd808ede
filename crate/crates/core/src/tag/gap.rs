//! Gap threading for TAG: every node gets per-channel `in`/`out` lists
//! wired left to right through its tree, filler nodes push onto the list of
//! their right sibling, and empty anchors marked as traces pop it. On top
//! of that, wh filler auxiliary trees and stranded-preposition variants of
//! adjunct trees are added.

use super::{Anchor, ElementaryTree, NodeKind, TagGrammar, TreeKind, TreeNode};
use crate::fs::{Env, Fs, Subst};

pub const OPT_ADJUNCT_GAPS: &str = "adjunct-gap-threading";

/// Channel whose fillers get their own auxiliary trees.
const WH: &str = "wh";

pub fn enable_adjunct_gap_threading(g: &TagGrammar) -> TagGrammar {
    if g.source.is_some() {
        return g.clone();
    }
    let mut out = g.clone();
    let mut src = g.clone();
    src.source = None;
    out.source = Some(Box::new(src));
    out.options.insert(OPT_ADJUNCT_GAPS.to_string());
    for f in ["gap", "in", "out", "cat", "head", "idx"] {
        out.features.entry(f.to_string()).or_insert(None);
    }
    for c in &g.channels {
        out.features.entry(c.name.clone()).or_insert(None);
    }

    let mut extra = Vec::new();
    if let Some(wh) = g.channels.iter().find(|c| c.name == WH) {
        for t in g.trees.iter().filter(|t| t.kind == TreeKind::Initial && wh.trace_cats.contains(&t.root.label)) {
            if let Some(f) = filler_tree(t) {
                extra.push(f);
            }
        }
    }
    for t in g.trees.iter().filter(|t| t.kind == TreeKind::Auxiliary) {
        let mut slots = Vec::new();
        t.root.walk(&mut Vec::new(), &mut |a, n| {
            if n.kind == NodeKind::Substitution {
                slots.push((a.to_vec(), n.label.clone()));
            }
        });
        let many = slots.len() > 1;
        for (k, (addr, label)) in slots.iter().enumerate() {
            for ch in g.channels.iter().filter(|c| c.trace_cats.contains(label)) {
                let mut s = t.clone();
                let n = s.root.at_mut(&super::GornAddress(addr.clone())).expect("walked");
                n.kind = NodeKind::Anchor(Anchor::Empty);
                n.trace = Some(ch.name.clone());
                s.name = if many { format!("{}_t{}_{}", t.name, k + 1, ch.name) } else { format!("{}_t_{}", t.name, ch.name) };
                s.lex_as = Some(t.lex_name().to_string());
                extra.push(s);
            }
        }
    }
    out.trees.extend(extra);

    let channels: Vec<String> = g.channels.iter().map(|c| c.name.clone()).collect();
    for t in &mut out.trees {
        let mut root = std::mem::replace(&mut t.root, TreeNode::new("", NodeKind::Internal));
        wire(&mut t.env, &mut root, &channels, &g.filler_features);
        t.root = root;
    }
    out
}

/// `S -> NP[wh:+, push wh] S*` built from an NP-rooted initial tree.
fn filler_tree(t: &ElementaryTree) -> Option<ElementaryTree> {
    let mut env = t.env.clone();
    let mut np = t.root.clone();
    let want = Fs::avm([("wh", Fs::atom("+"))]);
    np.top = env.unify(&np.top, &want).ok()?;
    np.push = Some(WH.to_string());
    let mut root = TreeNode::new("S", NodeKind::Internal);
    root.top = env.fresh_var();
    root.bot = env.fresh_var();
    let mut foot = TreeNode::new("S", NodeKind::Foot);
    foot.top = env.fresh_var();
    foot.bot = env.fresh_var();
    root.children = vec![np, foot];
    Some(ElementaryTree {
        name: format!("beta_wh_{}", t.name),
        kind: TreeKind::Auxiliary,
        family: Some(WH.to_string()),
        root,
        env,
        lex_as: Some(t.lex_name().to_string()),
    })
}

/// The `in` and `out` lists of `t` on channel `ch`, created if missing.
fn lists(env: &mut Subst, t: &mut Fs, ch: &str) -> (Fs, Fs) {
    let (i, o) = (env.fresh_var(), env.fresh_var());
    let shape = Fs::avm([("gap", Fs::avm([(ch, Fs::avm([("in", i), ("out", o)]))]))]);
    *t = box_term(env, t);
    env.unify(t, &shape).expect("gap features are reserved for threading");
    let i = env.get_path(t, &["gap", ch, "in"]).expect("just added");
    let o = env.get_path(t, &["gap", ch, "out"]).expect("just added");
    (i, o)
}

/// Makes sure `t` is a variable so unification results are kept.
fn box_term(env: &mut Subst, t: &Fs) -> Fs {
    if let Fs::Var(_) = t {
        return t.clone();
    }
    let v = env.fresh_var();
    env.unify(&v, t).expect("fresh variable");
    v
}

/// `[cat:C, head:[f:..], idx:I]` sharing the filler features of `top`.
fn element(env: &mut Subst, top: &mut Fs, cat: &str, feats: &[String]) -> (Fs, Fs) {
    *top = box_term(env, top);
    let mut head = Vec::new();
    for f in feats {
        let v = env.fresh_var();
        head.push((f.clone(), v));
    }
    let head = Fs::avm(head);
    // unification with open values cannot fail on shape alone
    let _ = env.unify(top, &head);
    let head = Fs::avm(feats.iter().map(|f| (f.clone(), env.get_path(top, &[f]).unwrap_or_else(Fs::top))));
    let idx = env.fresh_var();
    (Fs::avm([("cat", Fs::atom(cat)), ("head", head), ("idx", idx.clone())]), idx)
}

fn must(env: &mut Subst, a: &Fs, b: &Fs) {
    env.unify(a, b).expect("threading variables are fresh");
}

fn wire(env: &mut Subst, n: &mut TreeNode, channels: &[String], feats: &[String]) {
    for c in &mut n.children {
        wire(env, c, channels, feats);
    }
    match &n.kind {
        NodeKind::Internal => {
            for ch in channels {
                let (bin, bout) = lists(env, &mut n.bot, ch);
                let mut cur = bin;
                let k = n.children.len();
                for i in 0..k {
                    let (cin, cout) = lists(env, &mut n.children[i].top, ch);
                    must(env, &cur, &cin);
                    cur = cout;
                    if n.children[i].push.as_deref() == Some(ch.as_str()) && i + 1 < k {
                        let label = n.children[i].label.clone();
                        let (e, idx) = element(env, &mut n.children[i].top, &label, feats);
                        n.children[i].idx = Some(idx);
                        cur = Fs::List(vec![e], as_tail(env, &cur));
                    }
                }
                must(env, &cur, &bout);
            }
        }
        NodeKind::Anchor(Anchor::Empty) if n.trace.is_some() => {
            let tch = n.trace.clone().expect("checked");
            for ch in channels {
                let (i, o) = lists(env, &mut n.top, ch);
                if *ch == tch {
                    let label = n.label.clone();
                    let (e, idx) = element(env, &mut n.top, &label, feats);
                    n.idx = Some(idx);
                    let popped = Fs::List(vec![e], as_tail(env, &o));
                    must(env, &i, &popped);
                } else {
                    must(env, &i, &o);
                }
            }
        }
        NodeKind::Anchor(_) => {
            for ch in channels {
                let (i, o) = lists(env, &mut n.top, ch);
                must(env, &i, &o);
            }
        }
        NodeKind::Substitution | NodeKind::Foot => {
            for ch in channels {
                lists(env, &mut n.top, ch);
            }
        }
    }
}

/// A list tail must be a variable.
fn as_tail(env: &mut Subst, t: &Fs) -> Option<u32> {
    match t {
        Fs::Var(v) => Some(*v),
        other => {
            let v = env.fresh();
            env.define(v, other.clone());
            Some(v)
        }
    }
}
