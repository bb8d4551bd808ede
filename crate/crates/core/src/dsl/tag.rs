//! TAG grammar files.
//!
//! ```text
//! :trees
//! tree alpha_intrans initial
//!   S top=[displ_const:-] bot=[displ_const:?D]
//!     NP! top=[agr:?A]
//!     VP top=[displ_const:?D] bot=[displ_const:-]
//!       V^ top=[agr:?A]
//! :lexicon
//! swim alpha_intrans
//! ```
//!
//! Nesting follows indentation. After the label, `!` marks a substitution
//! node, `*` the foot, `^word` a fixed anchor, `^` an anchor filled from the
//! lexicon and `^ε` an empty one. Attributes: `NA`, `top=FS`, `bot=FS`,
//! `push=CHANNEL` and, on empty anchors, `trace=CHANNEL`.

use std::collections::{BTreeSet, HashMap};

use super::ug::{channels, features, names_of, MAX_INCLUDE_DEPTH};
use super::{check_format, feature_values, resolve, sections, DslError, DslResult, Line, LineCursor, Section, Source, Warning};
use crate::fs::{Fs, FsParser, Printer, Subst};
use crate::tag::{
    enable_adjunct_gap_threading, Anchor, ElementaryTree, NodeKind, TagGrammar, TagLexEntry, TreeKind, TreeNode,
    OPT_ADJUNCT_GAPS,
};

pub fn load_tag_grammar(name_or_path: &str) -> DslResult<TagGrammar> {
    finish(resolve(name_or_path, None)?)
}

pub fn load_tag_str(text: &str, name: &str) -> DslResult<TagGrammar> {
    finish(Source { name: name.to_string(), text: text.to_string(), dir: None })
}

fn finish(src: Source) -> DslResult<TagGrammar> {
    let mut g = TagGrammar { name: src.name.clone(), ..Default::default() };
    let mut refs = Vec::new();
    load_into(&mut g, &src, 0, &mut refs)?;
    for (file, line, tree) in refs {
        if !g.trees.iter().any(|t| t.lex_name() == tree) {
            return Err(DslError::syntax(&file, line, 1, format!("lexicon entry names unknown tree '{tree}'")));
        }
    }
    if g.options.contains(OPT_ADJUNCT_GAPS) {
        if g.channels.is_empty() {
            return Err(DslError::syntax(&src.name, 1, 1, "gap threading needs a ':channels' section"));
        }
        g = enable_adjunct_gap_threading(&g);
    }
    Ok(g)
}

type LexRefs = Vec<(String, usize, String)>;

fn load_into(g: &mut TagGrammar, src: &Source, depth: usize, refs: &mut LexRefs) -> DslResult<()> {
    let file = src.name.as_str();
    let secs = sections(file, &src.text)?;
    check_format(file, &secs, "tag")?;
    for s in secs.iter().filter(|s| s.name == "include") {
        if depth >= MAX_INCLUDE_DEPTH {
            return Err(DslError::syntax(file, s.line, 1, "includes nested too deeply"));
        }
        for a in &s.args {
            let inc = resolve(a, src.dir.as_deref())?;
            load_into(g, &inc, depth + 1, refs)?;
        }
    }
    let mut used: Vec<(usize, Vec<String>)> = Vec::new();
    let mut replaced_words = BTreeSet::new();
    for s in &secs {
        match s.name.as_str() {
            "format" | "include" => {}
            "options" => g.options.extend(s.args.iter().cloned()),
            "features" => features(file, s, &mut g.features)?,
            "channels" => channels(file, s, &mut g.channels)?,
            "fillers" => {
                g.filler_features = s.args.clone();
                for l in &s.body {
                    g.filler_features.extend(l.text.split_whitespace().map(str::to_string));
                }
            }
            "trees" => {
                for (t, line) in trees(file, s)? {
                    let mut terms = Vec::new();
                    t.root.walk(&mut Vec::new(), &mut |_, n| {
                        terms.push(n.top.clone());
                        terms.push(n.bot.clone());
                    });
                    used.push((line, names_of(&t.env, terms.iter())));
                    match g.trees.iter_mut().find(|x| x.name == t.name) {
                        Some(x) => *x = t,
                        None => g.trees.push(t),
                    }
                }
            }
            "lexicon" => {
                for l in &s.body {
                    let e = lex_entry(file, l)?;
                    used.push((l.no, names_of(&e.env, std::iter::once(&e.fs))));
                    refs.push((file.to_string(), l.no, e.tree.clone()));
                    if replaced_words.insert(e.word.clone()) {
                        g.lexicon.retain(|x| x.word != e.word);
                    }
                    g.lexicon.push(e);
                }
            }
            other => return Err(DslError::syntax(file, s.line, 2, format!("unknown section ':{other}'"))),
        }
    }
    for (line, names) in used {
        for n in names {
            if !g.features.contains_key(&n) {
                return Err(DslError::UndeclaredFeature { file: file.to_string(), line, name: n });
            }
        }
    }
    Ok(())
}

fn lex_entry(file: &str, l: &Line) -> DslResult<TagLexEntry> {
    let mut c = LineCursor::new(file, l);
    let word = c.word()?;
    let tree = c.word()?;
    let mut env = Subst::new();
    let fs = if c.at_end() { Fs::top() } else { c.fs(&mut FsParser::new(), &mut env)? };
    if !c.at_end() {
        return Err(c.err("unexpected text after lexicon entry"));
    }
    Ok(TagLexEntry { word, tree, fs, env })
}

fn boxed(env: &mut Subst, t: Fs) -> Fs {
    let v = env.fresh_var();
    env.unify(&v, &t).expect("fresh variable");
    v
}

/// Trees of a `:trees` section with the line of their header.
fn trees(file: &str, s: &Section) -> DslResult<Vec<(ElementaryTree, usize)>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < s.body.len() {
        let head = &s.body[i];
        let mut c = LineCursor::new(file, head);
        if c.word()? != "tree" {
            return Err(DslError::syntax(file, head.no, head.indent + 1, "expected 'tree NAME initial|auxiliary'"));
        }
        let name = c.word()?;
        let kind = match c.word()?.as_str() {
            "initial" => TreeKind::Initial,
            "auxiliary" => TreeKind::Auxiliary,
            _ => return Err(c.err("tree kind must be 'initial' or 'auxiliary'")),
        };
        let mut family = None;
        while !c.at_end() {
            if c.eat("family=") {
                family = Some(c.word()?);
            } else {
                return Err(c.err("unexpected text after tree header"));
            }
        }
        i += 1;
        let mut env = Subst::new();
        let mut parser = FsParser::new();
        // (indent, address) of open ancestors
        let mut stack: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut root: Option<TreeNode> = None;
        while i < s.body.len() && s.body[i].indent > head.indent {
            let l = &s.body[i];
            let n = node(file, l, &mut parser, &mut env)?;
            while stack.last().is_some_and(|(ind, _)| *ind >= l.indent) {
                stack.pop();
            }
            match (&mut root, stack.last()) {
                (None, _) => {
                    root = Some(n);
                    stack.push((l.indent, Vec::new()));
                }
                (Some(_), None) => return Err(DslError::syntax(file, l.no, l.indent + 1, "a tree has one root")),
                (Some(r), Some((_, addr))) => {
                    let parent = r.at_mut(&crate::tag::GornAddress(addr.clone())).expect("open ancestor");
                    if !matches!(parent.kind, NodeKind::Internal) {
                        return Err(DslError::syntax(file, l.no, l.indent + 1, "only internal nodes have children"));
                    }
                    parent.children.push(n);
                    let mut a = addr.clone();
                    a.push(parent.children.len() - 1);
                    stack.push((l.indent, a));
                }
            }
            i += 1;
        }
        let Some(root) = root else {
            return Err(DslError::syntax(file, head.no, 1, format!("tree '{name}' has no nodes")));
        };
        let t = ElementaryTree { name: name.clone(), kind, family, root, env, lex_as: None };
        check_tree(file, head.no, &t)?;
        out.push((t, head.no));
    }
    Ok(out)
}

fn check_tree(file: &str, line: usize, t: &ElementaryTree) -> DslResult<()> {
    let feet = t.foot_count();
    match t.kind {
        TreeKind::Initial if feet > 0 => return Err(DslError::FootInInitial { tree: t.name.clone() }),
        TreeKind::Auxiliary if feet != 1 => return Err(DslError::TwoFootNodes { tree: t.name.clone(), count: feet }),
        _ => {}
    }
    if t.anchor_count() == 0 {
        return Err(DslError::NoAnchor { tree: t.name.clone() });
    }
    let open = t.root.count(&|n| n.kind == NodeKind::Anchor(Anchor::Open));
    if open > 1 {
        return Err(DslError::syntax(file, line, 1, format!("tree '{}' has more than one lexicon anchor", t.name)));
    }
    if let Some(a) = t.foot_address() {
        let foot = t.root.at(&a).expect("found");
        if foot.label != t.root.label {
            return Err(DslError::syntax(file, line, 1, format!("tree '{}': foot label differs from root", t.name)));
        }
    }
    Ok(())
}

fn node(file: &str, l: &Line, parser: &mut FsParser, env: &mut Subst) -> DslResult<TreeNode> {
    let mut c = LineCursor::new(file, l);
    c.skip_ws();
    let rest = c.rest();
    let len = rest.find(|ch: char| !(ch.is_alphanumeric() || ch == '_')).unwrap_or(rest.len());
    if len == 0 || !rest.starts_with(|ch: char| ch.is_alphabetic()) {
        return Err(c.err("expected a node label"));
    }
    let label = rest[..len].to_string();
    c.pos += len;
    let kind = if c.rest().starts_with('!') {
        c.pos += 1;
        NodeKind::Substitution
    } else if c.rest().starts_with('*') {
        c.pos += 1;
        NodeKind::Foot
    } else if c.rest().starts_with('^') {
        c.pos += 1;
        if c.rest().starts_with('ε') {
            c.pos += 'ε'.len_utf8();
            NodeKind::Anchor(Anchor::Empty)
        } else if c.rest().starts_with(crate::fs::is_sym_char) {
            NodeKind::Anchor(Anchor::Word(c.word()?))
        } else {
            NodeKind::Anchor(Anchor::Open)
        }
    } else {
        NodeKind::Internal
    };
    let mut n = TreeNode::new(label, kind);
    let (mut top, mut bot) = (Fs::top(), Fs::top());
    while !c.at_end() {
        if c.eat("top=") {
            top = c.fs(parser, env)?;
        } else if c.eat("bot=") {
            bot = c.fs(parser, env)?;
        } else if c.eat("push=") {
            n.push = Some(c.word()?);
        } else if c.eat("trace=") {
            if n.kind != NodeKind::Anchor(Anchor::Empty) {
                return Err(c.err("only empty anchors can be traces"));
            }
            n.trace = Some(c.word()?);
        } else if c.eat("NA") {
            n.no_adjoin = true;
        } else {
            return Err(c.err("expected NA, top=, bot=, push= or trace="));
        }
    }
    n.top = boxed(env, top);
    n.bot = boxed(env, bot);
    Ok(n)
}

/// Open anchors without lexicon entries, entries that never anchor their
/// tree, substitution labels no initial tree provides, auxiliary trees that
/// can adjoin nowhere, and undeclared feature values.
pub fn validate_tag(g: &TagGrammar) -> Vec<Warning> {
    let g = g.source.as_deref().unwrap_or(g);
    let mut w = BTreeSet::new();
    let anchored: HashMap<String, usize> = g.instances().iter().fold(HashMap::new(), |mut m, i| {
        *m.entry(i.tree.lex_name().to_string()).or_default() += 1;
        m
    });
    let mut adjoinable: Vec<(&str, String)> = Vec::new();
    let initial_roots: BTreeSet<&str> =
        g.trees.iter().filter(|t| t.kind == TreeKind::Initial).map(|t| t.root.label.as_str()).collect();
    for t in &g.trees {
        if t.has_open_anchor() && !g.lexicon.iter().any(|e| e.tree == t.name) {
            w.insert(Warning(format!("tree '{}' has an open anchor and no lexicon entry", t.name)));
        }
        t.root.walk(&mut Vec::new(), &mut |_, n| {
            match n.kind {
                NodeKind::Substitution if !initial_roots.contains(n.label.as_str()) => {
                    w.insert(Warning(format!("tree '{}': no initial tree can fill {}!", t.name, n.label)));
                }
                NodeKind::Internal | NodeKind::Anchor(_) if !n.no_adjoin => {
                    adjoinable.push((t.name.as_str(), n.label.clone()));
                }
                _ => {}
            }
        });
        let mut vals = Vec::new();
        t.root.walk(&mut Vec::new(), &mut |_, n| {
            feature_values(&t.env, &n.top, &mut vals);
            feature_values(&t.env, &n.bot, &mut vals);
        });
        value_warnings(g, &format!("tree '{}'", t.name), &vals, &mut w);
    }
    for t in g.trees.iter().filter(|t| t.kind == TreeKind::Auxiliary) {
        if !adjoinable.iter().any(|(tree, l)| *tree != t.name && *l == t.root.label) {
            w.insert(Warning(format!("auxiliary tree '{}' has no {} node to adjoin to", t.name, t.root.label)));
        }
    }
    let mut per_entry: HashMap<(String, String), usize> = HashMap::new();
    for i in g.instances() {
        if let Some(word) = i.name.strip_suffix(']').and_then(|n| n.split_once('[')).map(|(_, w)| w.to_string()) {
            *per_entry.entry((word, i.tree.lex_name().to_string())).or_default() += 1;
        }
    }
    for e in &g.lexicon {
        if anchored.contains_key(&e.tree) && !per_entry.contains_key(&(e.word.clone(), e.tree.clone())) {
            w.insert(Warning(format!("lexicon: '{}' never anchors '{}'", e.word, e.tree)));
        }
        let mut vals = Vec::new();
        feature_values(&e.env, &e.fs, &mut vals);
        value_warnings(g, &format!("lexicon '{}'", e.word), &vals, &mut w);
    }
    w.into_iter().collect()
}

fn value_warnings(g: &TagGrammar, who: &str, vals: &[(String, String)], w: &mut BTreeSet<Warning>) {
    for (f, v) in vals {
        if let Some(Some(allowed)) = g.features.get(f) {
            if !allowed.contains(v) {
                w.insert(Warning(format!("{who}: value '{v}' is not declared for feature '{f}'")));
            }
        }
    }
}

/// Grammar text as written (before any transform); reloading gives the
/// same grammar.
pub fn print_tag_grammar(g: &TagGrammar) -> String {
    let g = g.source.as_deref().unwrap_or(g);
    let mut out = String::from(":format 1 tag\n");
    if !g.options.is_empty() {
        out.push_str(":options");
        for o in &g.options {
            out.push(' ');
            out.push_str(o);
        }
        out.push('\n');
    }
    out.push_str(":features\n");
    for (k, v) in &g.features {
        match v {
            Some(vs) => out.push_str(&format!("{k}: {}\n", vs.join(" "))),
            None => out.push_str(&format!("{k}\n")),
        }
    }
    if !g.channels.is_empty() {
        out.push_str(":channels\n");
        for c in &g.channels {
            out.push_str(&format!("{} {}\n", c.name, c.trace_cats.join(" ")));
        }
    }
    if !g.filler_features.is_empty() {
        out.push_str(&format!(":fillers {}\n", g.filler_features.join(" ")));
    }
    out.push_str(":trees\n");
    for t in &g.trees {
        out.push_str(&print_tag_tree(t));
    }
    out.push_str(":lexicon\n");
    for e in &g.lexicon {
        out.push_str(&format!("{} {}", e.word, e.tree));
        let mut pr = Printer::new(&e.env);
        pr.prime(std::iter::once(&e.fs));
        let body = pr.print(&e.fs);
        if body != "[]" {
            out.push(' ');
            out.push_str(&body);
        }
        out.push('\n');
    }
    out
}

/// One tree in grammar-file syntax: a `tree` header and indented nodes.
/// Shared variables print as `?A`, `?B`, ... consistently across nodes.
pub fn print_tag_tree(t: &ElementaryTree) -> String {
    let kind = match t.kind {
        TreeKind::Initial => "initial",
        TreeKind::Auxiliary => "auxiliary",
    };
    let mut out = format!("tree {} {kind}", t.name);
    if let Some(f) = &t.family {
        out.push_str(&format!(" family={f}"));
    }
    out.push('\n');
    let mut pr = Printer::new(&t.env);
    let mut terms = Vec::new();
    t.root.walk(&mut Vec::new(), &mut |_, n| {
        terms.push(&n.top);
        terms.push(&n.bot);
    });
    pr.prime(terms);
    print_node(&mut pr, &t.root, 1, &mut out);
    out
}

fn print_node(pr: &mut Printer<'_, Subst>, n: &TreeNode, depth: usize, out: &mut String) {
    out.push_str(&"  ".repeat(depth));
    out.push_str(&n.label);
    match &n.kind {
        NodeKind::Internal => {}
        NodeKind::Substitution => out.push('!'),
        NodeKind::Foot => out.push('*'),
        NodeKind::Anchor(Anchor::Open) => out.push('^'),
        NodeKind::Anchor(Anchor::Empty) => out.push_str("^ε"),
        NodeKind::Anchor(Anchor::Word(w)) => {
            out.push('^');
            out.push_str(w);
        }
    }
    if n.no_adjoin {
        out.push_str(" NA");
    }
    for (key, t) in [("top", &n.top), ("bot", &n.bot)] {
        let body = pr.print(t);
        if body != "[]" {
            out.push_str(&format!(" {key}={body}"));
        }
    }
    if let Some(p) = &n.push {
        out.push_str(&format!(" push={p}"));
    }
    if let Some(t) = &n.trace {
        out.push_str(&format!(" trace={t}"));
    }
    out.push('\n');
    for c in &n.children {
        print_node(pr, c, depth + 1, out);
    }
}
