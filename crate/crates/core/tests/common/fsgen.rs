//! Random small feature structures and a reference graph unifier.

use std::collections::{BTreeMap, HashMap, HashSet};

use grambench::fs::{fs_parse, Env, FeatureStructure, Fs, VarId};
use proptest::prelude::*;

/// Raw random structure; tags may repeat and nest arbitrarily.
#[derive(Clone, Debug)]
pub enum Raw {
    Atom(&'static str),
    Avm(BTreeMap<&'static str, Raw>),
    Tag(u8, Option<Box<Raw>>),
}

/// After normalization each tag is defined once, at its first occurrence,
/// and never inside its own definition.
#[derive(Clone, Debug)]
pub enum Norm {
    Atom(&'static str),
    Avm(Vec<(&'static str, Norm)>),
    Def(u8, Box<Norm>),
    Ref(u8),
}

pub fn normalize(r: &Raw, seen: &mut HashSet<u8>, open: &mut Vec<u8>) -> Norm {
    match r {
        Raw::Atom(a) => Norm::Atom(a),
        Raw::Avm(m) => Norm::Avm(m.iter().map(|(k, v)| (*k, normalize(v, seen, open))).collect()),
        Raw::Tag(n, v) => {
            if open.contains(n) {
                Norm::Avm(Vec::new())
            } else if seen.insert(*n) {
                open.push(*n);
                let body = v.as_ref().map(|v| normalize(v, seen, open)).unwrap_or(Norm::Avm(Vec::new()));
                open.pop();
                Norm::Def(*n, Box::new(body))
            } else {
                Norm::Ref(*n)
            }
        }
    }
}

pub fn render(n: &Norm, out: &mut String) {
    match n {
        Norm::Atom(a) => out.push_str(a),
        Norm::Avm(kv) => {
            out.push('[');
            for (i, (k, v)) in kv.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(k);
                out.push(':');
                render(v, out);
            }
            out.push(']');
        }
        Norm::Def(t, b) => {
            out.push_str(&format!("#{t} "));
            render(b, out);
        }
        Norm::Ref(t) => out.push_str(&format!("#{t}")),
    }
}

pub fn raw() -> impl Strategy<Value = Raw> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Raw::Atom),
        Just(Raw::Avm(BTreeMap::new())),
        (0u8..3).prop_map(|t| Raw::Tag(t, None)),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            3 => prop::collection::btree_map(prop::sample::select(vec!["a", "b", "c", "d"]), inner.clone(), 0..3)
                .prop_map(Raw::Avm),
            1 => ((0u8..3), inner).prop_map(|(t, v)| Raw::Tag(t, Some(Box::new(v)))),
        ]
    })
}

pub struct Sample {
    pub norm: Norm,
    pub fs: FeatureStructure,
}

pub fn sample() -> impl Strategy<Value = Sample> {
    raw().prop_map(|r| {
        let norm = normalize(&r, &mut HashSet::new(), &mut Vec::new());
        let mut text = String::new();
        render(&norm, &mut text);
        let fs = fs_parse(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
        Sample { norm, fs }
    })
}

impl std::fmt::Debug for Sample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.fs)
    }
}

/// Reference unifier: a node graph with union-find, no terms or variables.
#[derive(Clone, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    parent: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum Node {
    Top,
    Atom(String),
    Avm(BTreeMap<String, usize>),
}

impl Graph {
    fn add(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.parent.push(self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn build(&mut self, n: &Norm, tags: &mut HashMap<u8, usize>) -> usize {
        match n {
            Norm::Atom(a) => self.add(Node::Atom(a.to_string())),
            Norm::Avm(kv) if kv.is_empty() => self.add(Node::Top),
            Norm::Avm(kv) => {
                let m = kv.iter().map(|(k, v)| (k.to_string(), self.build(v, tags))).collect();
                self.add(Node::Avm(m))
            }
            Norm::Def(t, b) => {
                let id = self.build(b, tags);
                tags.insert(*t, id);
                id
            }
            Norm::Ref(t) => tags[t],
        }
    }

    fn unify(&mut self, a: usize, b: usize) -> bool {
        let mut stack = vec![(a, b)];
        while let Some((a, b)) = stack.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            match (self.nodes[ra].clone(), self.nodes[rb].clone()) {
                (Node::Top, _) => self.parent[ra] = rb,
                (_, Node::Top) => self.parent[rb] = ra,
                (Node::Atom(x), Node::Atom(y)) if x == y => self.parent[ra] = rb,
                (Node::Avm(ma), Node::Avm(mut mb)) => {
                    for (k, va) in ma {
                        match mb.get(&k) {
                            Some(&vb) => stack.push((va, vb)),
                            None => {
                                mb.insert(k, va);
                            }
                        }
                    }
                    self.nodes[rb] = Node::Avm(mb);
                    self.parent[ra] = rb;
                }
                _ => return false,
            }
        }
        true
    }

    fn acyclic(&mut self, root: usize) -> bool {
        fn go(g: &mut Graph, n: usize, onpath: &mut HashSet<usize>, done: &mut HashSet<usize>) -> bool {
            let r = g.find(n);
            if done.contains(&r) {
                return true;
            }
            if !onpath.insert(r) {
                return false;
            }
            if let Node::Avm(m) = g.nodes[r].clone() {
                for v in m.values() {
                    if !go(g, *v, onpath, done) {
                        return false;
                    }
                }
            }
            onpath.remove(&r);
            done.insert(r);
            true
        }
        go(self, root, &mut HashSet::new(), &mut HashSet::new())
    }

    /// Depth-first rendering with sorted features; a revisited node prints
    /// its visit number, atoms print as values.
    fn canon(&mut self, root: usize) -> String {
        fn go(g: &mut Graph, n: usize, nums: &mut HashMap<usize, usize>, out: &mut String) {
            let r = g.find(n);
            if let Node::Atom(a) = &g.nodes[r] {
                out.push_str(a);
                return;
            }
            if let Some(k) = nums.get(&r) {
                out.push_str(&format!("@{k}"));
                return;
            }
            let k = nums.len();
            nums.insert(r, k);
            match g.nodes[r].clone() {
                Node::Avm(m) if !m.is_empty() => {
                    out.push('{');
                    for (f, v) in m {
                        out.push_str(&f);
                        out.push('=');
                        go(g, v, nums, out);
                        out.push(';');
                    }
                    out.push('}');
                }
                _ => out.push_str("{}"),
            }
        }
        let mut s = String::new();
        go(self, root, &mut HashMap::new(), &mut s);
        s
    }
}

/// The same rendering read off a library result.
pub fn canon_fs(fs: &FeatureStructure) -> String {
    enum Id {
        Var(VarId),
        Inline(usize),
    }
    fn go(env: &BTreeMap<VarId, Fs>, t: &Fs, nums: &mut HashMap<String, usize>, fresh: &mut usize, out: &mut String) {
        let (id, body) = match t {
            Fs::Var(v) => {
                let (r, b) = env.deref(*v);
                (Id::Var(r), b.cloned())
            }
            other => {
                *fresh += 1;
                (Id::Inline(*fresh), Some(other.clone()))
            }
        };
        if let Some(Fs::Atom(a)) = &body {
            out.push_str(a);
            return;
        }
        let key = match id {
            Id::Var(r) => format!("v{r}"),
            Id::Inline(i) => format!("i{i}"),
        };
        if let Some(k) = nums.get(&key) {
            out.push_str(&format!("@{k}"));
            return;
        }
        let k = nums.len();
        nums.insert(key, k);
        match body {
            Some(Fs::Avm(m)) if !m.is_empty() => {
                out.push('{');
                for (f, v) in &m {
                    out.push_str(f);
                    out.push('=');
                    go(env, v, nums, fresh, out);
                    out.push(';');
                }
                out.push('}');
            }
            Some(Fs::List(..)) => panic!("lists are not generated"),
            _ => out.push_str("{}"),
        }
    }
    let mut s = String::new();
    go(fs.defs(), fs.root(), &mut HashMap::new(), &mut 0, &mut s);
    s
}

pub fn oracle(a: &Norm, b: &Norm) -> Option<String> {
    let mut g = Graph::default();
    let ra = g.build(a, &mut HashMap::new());
    let rb = g.build(b, &mut HashMap::new());
    if !g.unify(ra, rb) || !g.acyclic(ra) {
        return None;
    }
    Some(g.canon(ra))
}

pub fn single(n: &Norm) -> String {
    let mut g = Graph::default();
    let r = g.build(n, &mut HashMap::new());
    g.canon(r)
}

