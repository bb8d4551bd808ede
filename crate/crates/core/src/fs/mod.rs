//! Feature structures and the unification algebra shared by both engines.
//!
//! Terms ([`Fs`]) are open: an [`Fs::Var`] stands for a node whose value is
//! recorded in a [`Subst`]. Two positions holding the same variable are
//! re-entrant. Lists carry an optional tail variable so that partially known
//! lists (difference lists) can be extended by unification.
//!
//! [`FeatureStructure`] is the immutable, canonical value form: variables are
//! renumbered in depth-first order and only shared non-atomic nodes keep a
//! definition, so structural equality coincides with alphabetic variance.

mod text;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub use text::{parse_fs, FsParser, FsSyntaxError, Printer};
pub(crate) use text::is_sym_char;

pub type VarId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fs {
    Atom(String),
    Var(VarId),
    Avm(BTreeMap<String, Fs>),
    /// Elements plus an optional open tail.
    List(Vec<Fs>, Option<VarId>),
}

impl Fs {
    pub fn atom(name: impl Into<String>) -> Fs {
        Fs::Atom(name.into())
    }

    pub fn top() -> Fs {
        Fs::Avm(BTreeMap::new())
    }

    pub fn empty_list() -> Fs {
        Fs::List(Vec::new(), None)
    }

    pub fn avm<K: Into<String>>(pairs: impl IntoIterator<Item = (K, Fs)>) -> Fs {
        Fs::Avm(pairs.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    fn is_top(&self) -> bool {
        matches!(self, Fs::Avm(m) if m.is_empty())
    }
}

/// Failed unification: the feature path at which two values clashed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clash {
    pub path: Vec<String>,
}

impl Clash {
    pub fn path_string(&self) -> String {
        if self.path.is_empty() {
            "<root>".to_string()
        } else {
            self.path.join(".")
        }
    }
}

impl fmt::Display for Clash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CLASH at {}", self.path_string())
    }
}

/// Read access to variable bindings.
pub trait Env {
    fn binding(&self, v: VarId) -> Option<&Fs>;

    /// Follows variable-to-variable links; returns the representative and
    /// its non-variable value, if any.
    fn deref(&self, v: VarId) -> (VarId, Option<&Fs>) {
        let mut cur = v;
        loop {
            match self.binding(cur) {
                Some(Fs::Var(w)) if *w != cur => cur = *w,
                Some(Fs::Var(_)) | None => return (cur, None),
                Some(t) => return (cur, Some(t)),
            }
        }
    }

    /// Substitutes all bound variables. Sharing between bound nodes is
    /// expanded into copies; unbound variables are kept.
    fn resolve(&self, t: &Fs) -> Fs {
        match t {
            Fs::Atom(_) => t.clone(),
            Fs::Var(v) => match self.deref(*v) {
                (r, None) => Fs::Var(r),
                (_, Some(b)) => self.resolve(b),
            },
            Fs::Avm(m) => Fs::Avm(m.iter().map(|(k, v)| (k.clone(), self.resolve(v))).collect()),
            Fs::List(elems, tail) => {
                let mut out: Vec<Fs> = elems.iter().map(|e| self.resolve(e)).collect();
                let mut tail = *tail;
                while let Some(tv) = tail {
                    match self.deref(tv) {
                        (r, None) => {
                            tail = Some(r);
                            break;
                        }
                        (_, Some(Fs::List(more, t2))) => {
                            out.extend(more.iter().map(|e| self.resolve(e)));
                            tail = *t2;
                        }
                        (r, Some(_)) => {
                            tail = Some(r);
                            break;
                        }
                    }
                }
                Fs::List(out, tail)
            }
        }
    }

    /// Value at a feature path. Numeric steps index into lists.
    fn get_path(&self, t: &Fs, path: &[&str]) -> Option<Fs> {
        let mut cur = t.clone();
        for step in path {
            let node = match &cur {
                Fs::Var(v) => self.deref(*v).1.cloned()?,
                other => other.clone(),
            };
            cur = match node {
                Fs::Avm(m) => m.get(*step)?.clone(),
                Fs::List(..) => {
                    let idx: usize = step.parse().ok()?;
                    let (elems, _) = self.list_elems(&node)?;
                    elems.get(idx)?.clone()
                }
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Flattens a list term through bound tails.
    fn list_elems(&self, t: &Fs) -> Option<(Vec<Fs>, Option<VarId>)> {
        let node = match t {
            Fs::Var(v) => self.deref(*v).1?.clone(),
            other => other.clone(),
        };
        let Fs::List(elems, tail) = node else { return None };
        let mut out = elems;
        let mut tail = tail;
        while let Some(tv) = tail {
            match self.deref(tv) {
                (_, Some(Fs::List(more, t2))) => {
                    out.extend(more.iter().cloned());
                    tail = *t2;
                }
                (r, _) => {
                    tail = Some(r);
                    break;
                }
            }
        }
        Some((out, tail))
    }
}

impl Env for BTreeMap<VarId, Fs> {
    fn binding(&self, v: VarId) -> Option<&Fs> {
        self.get(&v)
    }
}

/// Mutable variable bindings. Acyclic by construction (occurs check).
#[derive(Clone, Debug, Default)]
pub struct Subst {
    map: HashMap<VarId, Fs>,
    next: VarId,
}

impl Env for Subst {
    fn binding(&self, v: VarId) -> Option<&Fs> {
        self.map.get(&v)
    }
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> VarId {
        let v = self.next;
        self.next += 1;
        v
    }

    pub fn fresh_var(&mut self) -> Fs {
        Fs::Var(self.fresh())
    }

    /// Records a definition for a variable that must currently be unbound.
    pub fn define(&mut self, v: VarId, t: Fs) {
        self.map.insert(v, t);
        if v >= self.next {
            self.next = v + 1;
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn unify(&mut self, a: &Fs, b: &Fs) -> Result<Fs, Clash> {
        let mut path = Vec::new();
        let saved = self.clone();
        let r = self.unify_at(a, b, &mut path);
        if r.is_err() {
            *self = saved;
        }
        r
    }

    fn occurs(&self, rep: VarId, t: &Fs) -> bool {
        match t {
            Fs::Atom(_) => false,
            Fs::Var(v) => match self.deref(*v) {
                (r, _) if r == rep => true,
                (_, None) => false,
                (_, Some(b)) => self.occurs(rep, b),
            },
            Fs::Avm(m) => m.values().any(|x| self.occurs(rep, x)),
            Fs::List(elems, tail) => {
                elems.iter().any(|x| self.occurs(rep, x))
                    || tail.is_some_and(|tv| self.occurs(rep, &Fs::Var(tv)))
            }
        }
    }

    fn bind_checked(&mut self, v: VarId, t: Fs, path: &[String]) -> Result<(), Clash> {
        if self.occurs(v, &t) {
            return Err(Clash { path: path.to_vec() });
        }
        self.map.insert(v, t);
        Ok(())
    }

    fn unify_at(&mut self, a: &Fs, b: &Fs, path: &mut Vec<String>) -> Result<Fs, Clash> {
        match (a, b) {
            (Fs::Var(x), Fs::Var(y)) => {
                let (rx, bx) = self.deref(*x);
                let (ry, by) = self.deref(*y);
                if rx == ry {
                    return Ok(Fs::Var(rx));
                }
                match (bx.cloned(), by.cloned()) {
                    (None, _) => {
                        self.bind_checked(rx, Fs::Var(ry), path)?;
                        Ok(Fs::Var(ry))
                    }
                    (Some(_), None) => {
                        self.bind_checked(ry, Fs::Var(rx), path)?;
                        Ok(Fs::Var(rx))
                    }
                    (Some(tx), Some(ty)) => {
                        self.map.insert(rx, Fs::Var(ry));
                        let u = self.unify_at(&tx, &ty, path)?;
                        self.map.remove(&ry);
                        self.bind_checked(ry, u, path)?;
                        Ok(Fs::Var(ry))
                    }
                }
            }
            (Fs::Var(x), t) | (t, Fs::Var(x)) => {
                let (rx, bx) = self.deref(*x);
                match bx.cloned() {
                    None => {
                        if !t.is_top() {
                            self.bind_checked(rx, t.clone(), path)?;
                        }
                        Ok(Fs::Var(rx))
                    }
                    Some(tx) => {
                        let u = self.unify_at(&tx, t, path)?;
                        self.map.remove(&rx);
                        self.bind_checked(rx, u, path)?;
                        Ok(Fs::Var(rx))
                    }
                }
            }
            (x, y) if x.is_top() => Ok(y.clone()),
            (x, y) if y.is_top() => Ok(x.clone()),
            (Fs::Atom(x), Fs::Atom(y)) => {
                if x == y {
                    Ok(a.clone())
                } else {
                    Err(Clash { path: path.clone() })
                }
            }
            (Fs::Avm(m1), Fs::Avm(m2)) => {
                let mut out = m1.clone();
                for (k, v2) in m2 {
                    let merged = match m1.get(k) {
                        Some(v1) => {
                            path.push(k.clone());
                            let u = self.unify_at(v1, v2, path)?;
                            path.pop();
                            u
                        }
                        None => v2.clone(),
                    };
                    out.insert(k.clone(), merged);
                }
                Ok(Fs::Avm(out))
            }
            (Fs::List(..), Fs::List(..)) => self.unify_lists(a, b, path),
            _ => Err(Clash { path: path.clone() }),
        }
    }

    fn unify_lists(&mut self, a: &Fs, b: &Fs, path: &mut Vec<String>) -> Result<Fs, Clash> {
        let clash = |p: &Vec<String>| Clash { path: p.clone() };
        let (e1, t1) = self.list_elems(a).ok_or_else(|| clash(path))?;
        let (e2, t2) = self.list_elems(b).ok_or_else(|| clash(path))?;
        let common = e1.len().min(e2.len());
        let mut out = Vec::with_capacity(e1.len().max(e2.len()));
        for i in 0..common {
            path.push(i.to_string());
            out.push(self.unify_at(&e1[i], &e2[i], path)?);
            path.pop();
        }
        let tail = match e1.len().cmp(&e2.len()) {
            std::cmp::Ordering::Equal => match (t1, t2) {
                (None, None) => None,
                (Some(x), None) | (None, Some(x)) => {
                    self.unify_at(&Fs::Var(x), &Fs::empty_list(), path)?;
                    None
                }
                (Some(x), Some(y)) => match self.unify_at(&Fs::Var(x), &Fs::Var(y), path)? {
                    Fs::Var(r) => Some(r),
                    _ => unreachable!("variable unification yields a variable"),
                },
            },
            std::cmp::Ordering::Greater => {
                let tv = t2.ok_or_else(|| clash(path))?;
                let rest = Fs::List(e1[common..].to_vec(), t1);
                self.unify_at(&Fs::Var(tv), &rest, path)?;
                out.extend(e1[common..].iter().cloned());
                t1
            }
            std::cmp::Ordering::Less => {
                let tv = t1.ok_or_else(|| clash(path))?;
                let rest = Fs::List(e2[common..].to_vec(), t2);
                self.unify_at(&Fs::Var(tv), &rest, path)?;
                out.extend(e2[common..].iter().cloned());
                t2
            }
        };
        Ok(Fs::List(out, tail))
    }

    /// Copies `t` from `src` into this substitution with fresh variables,
    /// preserving sharing. `map` carries the renaming so several terms of one
    /// frame can be copied consistently.
    pub fn transfer<E: Env + ?Sized>(&mut self, src: &E, t: &Fs, map: &mut HashMap<VarId, VarId>) -> Fs {
        match t {
            Fs::Atom(_) => t.clone(),
            Fs::Var(v) => Fs::Var(self.transfer_var(src, *v, map)),
            Fs::Avm(m) => Fs::Avm(m.iter().map(|(k, x)| (k.clone(), self.transfer(src, x, map))).collect()),
            Fs::List(elems, tail) => Fs::List(
                elems.iter().map(|e| self.transfer(src, e, map)).collect(),
                tail.map(|tv| self.transfer_var(src, tv, map)),
            ),
        }
    }

    fn transfer_var<E: Env + ?Sized>(&mut self, src: &E, v: VarId, map: &mut HashMap<VarId, VarId>) -> VarId {
        let (r, b) = src.deref(v);
        if let Some(&n) = map.get(&r) {
            return n;
        }
        let n = self.fresh();
        map.insert(r, n);
        if let Some(b) = b {
            let copied = self.transfer(src, b, map);
            self.map.insert(n, copied);
        }
        n
    }

    /// Brings a canonical value into this substitution under fresh variables.
    pub fn import(&mut self, fs: &FeatureStructure) -> Fs {
        let mut map = HashMap::new();
        self.transfer(&fs.defs, &fs.root, &mut map)
    }

    /// Canonical snapshot of a term.
    pub fn snapshot(&self, t: &Fs) -> FeatureStructure {
        compact(self, t)
    }
}

/// Immutable feature structure in canonical form.
///
/// Equality is alphabetic variance: variables are numbered by first
/// occurrence and shared nodes keep exactly one definition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureStructure {
    root: Fs,
    defs: BTreeMap<VarId, Fs>,
}

impl FeatureStructure {
    pub fn from_term<E: Env + ?Sized>(env: &E, t: &Fs) -> Self {
        compact(env, t)
    }

    pub fn top() -> Self {
        FeatureStructure { root: Fs::top(), defs: BTreeMap::new() }
    }

    pub fn root(&self) -> &Fs {
        &self.root
    }

    pub fn defs(&self) -> &BTreeMap<VarId, Fs> {
        &self.defs
    }

    pub fn is_atom(&self, name: &str) -> bool {
        matches!(self.defs.resolve(&self.root), Fs::Atom(a) if a == name)
    }

    pub fn resolved(&self) -> Fs {
        self.defs.resolve(&self.root)
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fs_print(self))
    }
}

impl std::str::FromStr for FeatureStructure {
    type Err = FsSyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        fs_parse(s)
    }
}

fn compact<E: Env + ?Sized>(env: &E, t: &Fs) -> FeatureStructure {
    let mut counts: HashMap<VarId, usize> = HashMap::new();
    count_occurrences(env, t, &mut counts);
    let mut b = Compactor { env, counts, numbers: HashMap::new(), defs: BTreeMap::new() };
    let root = b.build(t);
    FeatureStructure { root, defs: b.defs }
}

fn count_occurrences<E: Env + ?Sized>(env: &E, t: &Fs, counts: &mut HashMap<VarId, usize>) {
    match t {
        Fs::Atom(_) => {}
        Fs::Var(v) => count_var(env, *v, counts),
        Fs::Avm(m) => m.values().for_each(|x| count_occurrences(env, x, counts)),
        Fs::List(elems, tail) => {
            elems.iter().for_each(|x| count_occurrences(env, x, counts));
            if let Some(tv) = tail {
                count_var(env, *tv, counts);
            }
        }
    }
}

fn count_var<E: Env + ?Sized>(env: &E, v: VarId, counts: &mut HashMap<VarId, usize>) {
    let (r, b) = env.deref(v);
    let c = counts.entry(r).or_insert(0);
    *c += 1;
    if *c == 1 {
        if let Some(b) = b {
            count_occurrences(env, b, counts);
        }
    }
}

struct Compactor<'a, E: Env + ?Sized> {
    env: &'a E,
    counts: HashMap<VarId, usize>,
    numbers: HashMap<VarId, VarId>,
    defs: BTreeMap<VarId, Fs>,
}

impl<E: Env + ?Sized> Compactor<'_, E> {
    fn number(&mut self, r: VarId) -> (VarId, bool) {
        let n = self.numbers.len() as VarId;
        match self.numbers.get(&r) {
            Some(&k) => (k, false),
            None => {
                self.numbers.insert(r, n);
                (n, true)
            }
        }
    }

    fn build(&mut self, t: &Fs) -> Fs {
        match t {
            Fs::Atom(_) => t.clone(),
            Fs::Var(v) => self.build_var(*v),
            Fs::Avm(m) => Fs::Avm(m.iter().map(|(k, x)| (k.clone(), self.build(x))).collect()),
            Fs::List(elems, tail) => {
                let mut out: Vec<Fs> = elems.iter().map(|e| self.build(e)).collect();
                let mut tail = *tail;
                loop {
                    let Some(tv) = tail else { return Fs::List(out, None) };
                    let (r, b) = self.env.deref(tv);
                    match b {
                        Some(Fs::List(more, t2)) if self.counts.get(&r).copied().unwrap_or(0) <= 1 => {
                            let (more, t2) = (more.clone(), *t2);
                            out.extend(more.iter().map(|e| self.build(e)));
                            tail = t2;
                        }
                        _ => match self.build_var(tv) {
                            Fs::Var(n) => return Fs::List(out, Some(n)),
                            // an atom in tail position; keep it as a definition
                            other => {
                                let (n, _) = self.number(r);
                                self.defs.insert(n, other);
                                return Fs::List(out, Some(n));
                            }
                        },
                    }
                }
            }
        }
    }

    fn build_var(&mut self, v: VarId) -> Fs {
        let (r, b) = self.env.deref(v);
        match b {
            None => Fs::Var(self.number(r).0),
            Some(Fs::Atom(a)) => Fs::Atom(a.clone()),
            Some(b) => {
                if self.counts.get(&r).copied().unwrap_or(0) >= 2 {
                    let b = b.clone();
                    let (n, first) = self.number(r);
                    if first {
                        let built = self.build(&b);
                        self.defs.insert(n, built);
                    }
                    Fs::Var(n)
                } else {
                    let b = b.clone();
                    self.build(&b)
                }
            }
        }
    }
}

/// Most general unifier of two independent structures.
pub fn fs_unify(a: &FeatureStructure, b: &FeatureStructure) -> Result<FeatureStructure, Clash> {
    let mut s = Subst::new();
    let ta = s.import(a);
    let tb = s.import(b);
    let u = s.unify(&ta, &tb)?;
    Ok(s.snapshot(&u))
}

/// True iff `b` carries at least the information in `a`, including its
/// re-entrancies.
pub fn fs_subsumes(a: &FeatureStructure, b: &FeatureStructure) -> bool {
    let mut m = Matcher { a: &a.defs, b: &b.defs, seen: HashMap::new() };
    m.sub(&a.root, &b.root)
}

struct Matcher<'a> {
    a: &'a BTreeMap<VarId, Fs>,
    b: &'a BTreeMap<VarId, Fs>,
    /// a-node identity -> the b node it was matched with
    seen: HashMap<VarId, Node>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Node {
    Var(VarId),
    Atom(String),
    Unshared,
}

impl Matcher<'_> {
    fn sub(&mut self, a: &Fs, b: &Fs) -> bool {
        let (a_id, a_node) = match a {
            Fs::Var(v) => {
                let (r, bnd) = self.a.deref(*v);
                (Some(r), bnd.cloned())
            }
            other => (None, Some(other.clone())),
        };
        let (b_id, b_node) = match b {
            Fs::Var(v) => {
                let (r, bnd) = self.b.deref(*v);
                (Some(r), bnd.cloned())
            }
            other => (None, Some(other.clone())),
        };
        // atoms are values, so equal atoms count as the same node
        let b_key = match &b_node {
            Some(Fs::Atom(x)) => Node::Atom(x.clone()),
            _ => b_id.map_or(Node::Unshared, Node::Var),
        };
        if let Some(ra) = a_id {
            if let Some(prev) = self.seen.get(&ra) {
                return *prev != Node::Unshared && *prev == b_key;
            }
            self.seen.insert(ra, b_key);
        }
        let Some(a_node) = a_node else { return true };
        if a_node.is_top() {
            return true;
        }
        let Some(b_node) = b_node else { return false };
        match (&a_node, &b_node) {
            (Fs::Atom(x), Fs::Atom(y)) => x == y,
            (Fs::Avm(ma), Fs::Avm(mb)) => ma.iter().all(|(k, va)| mb.get(k).is_some_and(|vb| self.sub(va, vb))),
            (Fs::List(..), Fs::List(..)) => {
                let (ea, ta) = self.a.list_elems(&a_node).expect("list");
                let (eb, tb) = self.b.list_elems(&b_node).expect("list");
                if eb.len() < ea.len() || (ta.is_none() && (eb.len() != ea.len() || tb.is_some())) {
                    return false;
                }
                if !ea.iter().zip(eb.iter()).all(|(x, y)| self.sub(x, y)) {
                    return false;
                }
                match ta {
                    None => true,
                    Some(tv) => {
                        let rest = if eb.len() == ea.len() {
                            match tb {
                                Some(t) => Fs::Var(t),
                                None => Fs::empty_list(),
                            }
                        } else {
                            Fs::List(eb[ea.len()..].to_vec(), tb)
                        };
                        self.sub(&Fs::Var(tv), &rest)
                    }
                }
            }
            _ => false,
        }
    }
}

/// Value at `path`, or `None` when some step is absent.
pub fn fs_get(fs: &FeatureStructure, path: &[&str]) -> Option<FeatureStructure> {
    let t = fs.defs.get_path(&fs.root, path)?;
    Some(compact(&fs.defs, &t))
}

pub fn fs_print(fs: &FeatureStructure) -> String {
    let mut p = Printer::new(&fs.defs);
    p.print(&fs.root)
}

pub fn fs_parse(text: &str) -> Result<FeatureStructure, FsSyntaxError> {
    let mut s = Subst::new();
    let t = parse_fs(text, &mut s)?;
    Ok(s.snapshot(&t))
}

/// True iff the two values are equal up to variable renaming.
pub fn alphabetic_variants(a: &FeatureStructure, b: &FeatureStructure) -> bool {
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> FeatureStructure {
        fs_parse(s).unwrap()
    }

    #[test]
    fn empty_avm_is_identity() {
        let u = fs_unify(&p("[]"), &p("[agr:[num:sg]]")).unwrap();
        assert_eq!(u, p("[agr:[num:sg]]"));
    }

    #[test]
    fn atom_clash_reports_path() {
        let err = fs_unify(&p("[num:sg]"), &p("[num:pl]")).unwrap_err();
        assert_eq!(err.path, vec!["num".to_string()]);
        assert_eq!(err.to_string(), "CLASH at num");
    }

    #[test]
    fn reentrant_merge() {
        let u = fs_unify(&p("[a:#1[x:p], b:#1]"), &p("[b:[y:q]]")).unwrap();
        assert_eq!(u, p("[a:#1[x:p, y:q], b:#1]"));
        assert!(fs_get(&u, &["a", "y"]).unwrap().is_atom("q"));
        assert_eq!(fs_print(&u), "[a:#1[x:p, y:q], b:#1]");
    }

    #[test]
    fn get_absent() {
        assert!(fs_get(&p("[agr:[num:sg]]"), &["case"]).is_none());
        assert!(fs_get(&p("[agr:[num:sg]]"), &["agr", "num"]).unwrap().is_atom("sg"));
    }

    #[test]
    fn closed_lists_of_different_length_clash() {
        assert!(fs_unify(&p("<a, b>"), &p("<a>")).is_err());
        assert!(fs_unify(&p("<>"), &p("<a>")).is_err());
    }

    #[test]
    fn open_tail_binds_remainder() {
        let u = fs_unify(&p("[l:<a | ?t>, r:?t]"), &p("[l:<a, b, c>]")).unwrap();
        assert_eq!(fs_get(&u, &["r"]).unwrap(), p("<b, c>"));
        let u = fs_unify(&p("[l:<a | ?t>, r:?t]"), &p("[l:<a>]")).unwrap();
        assert_eq!(fs_get(&u, &["r"]).unwrap(), p("<>"));
    }

    #[test]
    fn occurs_check_fails() {
        assert!(fs_unify(&p("[a:?x, b:?x]"), &p("[a:[f:?y], b:?y]")).is_err());
        assert!(fs_unify(&p("[a:?x, b:<c | ?x>]"), &p("[a:?y, b:?y]")).is_err());
    }

    #[test]
    fn subsumption_basics() {
        assert!(fs_subsumes(&p("[]"), &p("[a:[b:c]]")));
        assert!(fs_subsumes(&p("[]"), &p("sg")));
        assert!(!fs_subsumes(&p("[num:sg]"), &p("[num:pl]")));
        assert!(fs_subsumes(&p("[a:?x, b:?x]"), &p("[a:#1[f:g], b:#1]")));
        assert!(!fs_subsumes(&p("[a:?x, b:?x]"), &p("[a:[f:g], b:[f:g]]")));
        assert!(fs_subsumes(&p("<a | ?t>"), &p("<a, b>")));
        assert!(!fs_subsumes(&p("<a>"), &p("<a | ?t>")));
    }

    #[test]
    fn failed_unify_leaves_subst_untouched() {
        let mut s = Subst::new();
        let x = s.fresh_var();
        let a = Fs::avm([("f", x.clone()), ("g", Fs::atom("a"))]);
        let b = Fs::avm([("f", Fs::atom("z")), ("g", Fs::atom("b"))]);
        assert!(s.unify(&a, &b).is_err());
        assert_eq!(s.resolve(&x), x);
    }

    #[test]
    fn resolve_is_idempotent() {
        let mut s = Subst::new();
        let t = parse_fs("[a:#1[x:?y], b:#1, c:<?y | ?z>]", &mut s).unwrap();
        let u = parse_fs("[c:<p, q>]", &mut s).unwrap();
        s.unify(&t, &u).unwrap();
        let once = s.resolve(&t);
        assert_eq!(s.resolve(&once), once);
    }
}
