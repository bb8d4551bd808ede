//! Unification-grammar files.
//!
//! Lexicon lines are `word CAT[head] <CAT[..], ...>`; the subcat list may be
//! omitted. Rules are `name: M -> D1 D2 ... ; push CHANNEL i -> j`. Schema
//! lines have the same shape with the keyword `COMPS` standing for the head's
//! subcat list; the first daughter is the head. A rule may spell out its
//! threading with `gap:[CH:[in:?X, out:?Y]]` on every category, in which case
//! the chain must be complete.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    check_format, feature_names, feature_values, resolve, sections, DslError, DslResult, Line, LineCursor, Section,
    Source, Warning,
};
use crate::fs::{Env, Fs, FsParser, Printer, Subst};
use crate::ug::{
    enable_possessive_percolation, ChannelDecl, FillerIntro, PercolatedFeature, Percolation, SchemaSlot,
    SchemaTemplate, UGCategory, UGLexEntry, UGRule, UgGrammar, OPT_POSSESSIVE,
};

const RESERVED: &[&str] = &["word"];
pub(super) const MAX_INCLUDE_DEPTH: usize = 8;

pub fn load_ug_grammar(name_or_path: &str) -> DslResult<UgGrammar> {
    let src = resolve(name_or_path, None)?;
    finish(src)
}

/// Loads grammar text; `name` is used in diagnostics.
pub fn load_ug_str(text: &str, name: &str) -> DslResult<UgGrammar> {
    finish(Source { name: name.to_string(), text: text.to_string(), dir: None })
}

fn finish(src: Source) -> DslResult<UgGrammar> {
    let mut g = UgGrammar { name: src.name.clone(), ..Default::default() };
    load_into(&mut g, &src, 0)?;
    if g.options.contains(OPT_POSSESSIVE) {
        g = enable_possessive_percolation(&g);
    }
    Ok(g)
}

fn load_into(g: &mut UgGrammar, src: &Source, depth: usize) -> DslResult<()> {
    let file = src.name.as_str();
    let secs = sections(file, &src.text)?;
    check_format(file, &secs, "ug")?;
    for s in secs.iter().filter(|s| s.name == "include") {
        if depth >= MAX_INCLUDE_DEPTH {
            return Err(DslError::syntax(file, s.line, 1, "includes nested too deeply"));
        }
        for a in &s.args {
            let inc = resolve(a, src.dir.as_deref())?;
            load_into(g, &inc, depth + 1)?;
        }
    }
    let mut used: Vec<(usize, Vec<String>)> = Vec::new();
    let mut replaced_words: BTreeSet<String> = BTreeSet::new();
    for s in &secs {
        match s.name.as_str() {
            "format" | "include" => {}
            "options" => g.options.extend(s.args.iter().cloned()),
            "features" => features(file, s, &mut g.features)?,
            "channels" => channels(file, s, &mut g.channels)?,
            "lexicon" => {
                for l in &s.body {
                    let e = lex_entry(file, l)?;
                    used.push((l.no, names_of(&e.env, std::iter::once(&e.cat.fs).chain(e.subcat.iter().map(|c| &c.fs)))));
                    if replaced_words.insert(e.word.clone()) {
                        g.lexicon.retain(|x| x.word != e.word);
                    }
                    g.lexicon.push(e);
                }
            }
            "rules" => {
                for l in &s.body {
                    let r = rule(file, l, g)?;
                    used.push((l.no, names_of(&r.env, std::iter::once(&r.mother.fs).chain(r.daughters.iter().map(|c| &c.fs)))));
                    match g.rules.iter_mut().find(|x| x.name == r.name) {
                        Some(x) => *x = r,
                        None => g.rules.push(r),
                    }
                }
            }
            "schemas" => {
                for l in &s.body {
                    let t = schema(file, l)?;
                    let terms: Vec<&Fs> = std::iter::once(&t.mother.fs)
                        .chain(t.slots.iter().filter_map(|s| match s {
                            SchemaSlot::Head(c) | SchemaSlot::Cat(c) => Some(&c.fs),
                            SchemaSlot::Comps => None,
                        }))
                        .collect();
                    used.push((l.no, names_of(&t.env, terms.into_iter())));
                    match g.schemas.iter_mut().find(|x| x.name == t.name) {
                        Some(x) => *x = t,
                        None => g.schemas.push(t),
                    }
                }
            }
            "percolate" => g.percolation = Some(percolation(file, s)?),
            other => return Err(DslError::syntax(file, s.line, 2, format!("unknown section ':{other}'"))),
        }
    }
    for (line, names) in used {
        for n in names {
            if !g.features.contains_key(&n) && !RESERVED.contains(&n.as_str()) {
                return Err(DslError::UndeclaredFeature { file: file.to_string(), line, name: n });
            }
        }
    }
    if let Some(p) = &g.percolation {
        for f in &p.features {
            if !g.features.contains_key(&f.name) {
                return Err(DslError::UndeclaredFeature { file: file.to_string(), line: 0, name: f.name.clone() });
            }
        }
    }
    Ok(())
}

pub(super) fn names_of<'a>(env: &Subst, terms: impl Iterator<Item = &'a Fs>) -> Vec<String> {
    let mut out = Vec::new();
    for t in terms {
        feature_names(env, t, &mut out);
    }
    out
}

pub(super) fn features(file: &str, s: &Section, out: &mut BTreeMap<String, Option<Vec<String>>>) -> DslResult<()> {
    for l in &s.body {
        let mut c = LineCursor::new(file, l);
        let name = c.word()?;
        let values = if c.eat(":") {
            let mut vs = Vec::new();
            while !c.at_end() {
                vs.push(c.word()?);
            }
            Some(vs)
        } else {
            None
        };
        if !c.at_end() {
            return Err(c.err("unexpected text after feature declaration"));
        }
        out.insert(name, values);
    }
    Ok(())
}

pub(super) fn channels(file: &str, s: &Section, out: &mut Vec<ChannelDecl>) -> DslResult<()> {
    for l in &s.body {
        let mut c = LineCursor::new(file, l);
        let name = c.word()?;
        let mut cats = Vec::new();
        while !c.at_end() {
            cats.push(c.word()?);
        }
        if cats.is_empty() {
            return Err(c.err("channel needs at least one trace category"));
        }
        let decl = ChannelDecl { name, trace_cats: cats };
        match out.iter_mut().find(|x| x.name == decl.name) {
            Some(x) => *x = decl,
            None => out.push(decl),
        }
    }
    Ok(())
}

fn lex_entry(file: &str, l: &Line) -> DslResult<UGLexEntry> {
    let mut c = LineCursor::new(file, l);
    let word = c.word()?;
    let mut env = Subst::new();
    let mut p = FsParser::new();
    let (cat, fs) = c.category(&mut p, &mut env)?;
    let mut subcat = Vec::new();
    if c.eat("<") && !c.eat(">") {
        loop {
            let (sc, sfs) = c.category(&mut p, &mut env)?;
            subcat.push(UGCategory::new(sc, sfs));
            if c.eat(">") {
                break;
            }
            c.expect(",")?;
        }
    }
    if !c.at_end() {
        return Err(c.err("unexpected text after lexical entry"));
    }
    Ok(UGLexEntry { word, cat: UGCategory::new(cat, fs), subcat, env })
}

struct RuleLine {
    name: String,
    mother: UGCategory,
    daughters: Vec<Option<UGCategory>>,
    pushes: Vec<FillerIntro>,
    env: Subst,
}

fn rule_line(file: &str, l: &Line, allow_comps: bool) -> DslResult<RuleLine> {
    let mut c = LineCursor::new(file, l);
    let name = c.word()?;
    c.expect(":")?;
    let mut env = Subst::new();
    let mut p = FsParser::new();
    let (mc, mfs) = c.category(&mut p, &mut env)?;
    c.expect("->")?;
    let mut daughters = Vec::new();
    while !c.at_end() && !c.rest().starts_with(';') {
        if allow_comps && c.rest().starts_with("COMPS") {
            c.pos += "COMPS".len();
            daughters.push(None);
            continue;
        }
        let (dc, dfs) = c.category(&mut p, &mut env)?;
        daughters.push(Some(UGCategory::new(dc, dfs)));
    }
    if daughters.is_empty() {
        return Err(c.err("rule needs at least one daughter"));
    }
    let mut pushes = Vec::new();
    while c.eat(";") {
        let kw = c.word()?;
        if kw != "push" {
            return Err(c.err(format!("unknown rule clause '{kw}'")));
        }
        let channel = c.word()?;
        let filler = num(&mut c)?;
        c.expect("->")?;
        let target = num(&mut c)?;
        pushes.push(FillerIntro { channel, filler, target });
    }
    if !c.at_end() {
        return Err(c.err("unexpected text after rule"));
    }
    Ok(RuleLine { name, mother: UGCategory::new(mc, mfs), daughters, pushes, env })
}

fn num(c: &mut LineCursor) -> DslResult<usize> {
    let w = c.word()?;
    w.parse().map_err(|_| c.err(format!("expected a daughter index, found '{w}'")))
}

fn rule(file: &str, l: &Line, g: &UgGrammar) -> DslResult<UGRule> {
    let rl = rule_line(file, l, false)?;
    let n = rl.daughters.len();
    let mut r = UGRule {
        name: rl.name,
        mother: rl.mother,
        daughters: rl.daughters.into_iter().map(|d| d.expect("no COMPS in rules")).collect(),
        fillers: rl.pushes,
        schema: false,
        env: rl.env,
    };
    for f in &r.fillers {
        if f.filler >= n || f.target >= n || f.filler == f.target {
            return Err(DslError::BadThreading {
                rule: r.name.clone(),
                reason: format!("push {} {} -> {} names a bad daughter", f.channel, f.filler, f.target),
            });
        }
        if !g.channels.iter().any(|c| c.name == f.channel) {
            return Err(DslError::BadThreading { rule: r.name.clone(), reason: format!("unknown channel '{}'", f.channel) });
        }
    }
    explicit_threading(&mut r, g)?;
    Ok(r)
}

/// Checks and strips hand-written `gap` annotations.
fn explicit_threading(r: &mut UGRule, g: &UgGrammar) -> DslResult<()> {
    let bad = |reason: String| DslError::BadThreading { rule: r.name.clone(), reason };
    let mut cats: Vec<Fs> = std::iter::once(r.mother.fs.clone()).chain(r.daughters.iter().map(|d| d.fs.clone())).collect();
    let mut gaps: Vec<Option<BTreeMap<String, Fs>>> = Vec::new();
    for c in &mut cats {
        let resolved = r.env.resolve(c);
        match resolved {
            Fs::Avm(mut m) => {
                let gap = m.remove("gap");
                gaps.push(match gap {
                    Some(Fs::Avm(gm)) => Some(gm),
                    Some(_) => return Err(bad("gap annotation must be an AVM of channels".into())),
                    None => None,
                });
                *c = Fs::Avm(m);
            }
            _ => gaps.push(None),
        }
    }
    if gaps.iter().all(Option::is_none) {
        return Ok(());
    }
    let mut chans: BTreeSet<String> = BTreeSet::new();
    for gm in gaps.iter().flatten() {
        chans.extend(gm.keys().cloned());
    }
    let var_of = |env: &Subst, m: &Option<BTreeMap<String, Fs>>, k: usize, ch: &str, dir: &str| -> Result<u32, String> {
        let who = if k == 0 { "mother".to_string() } else { format!("daughter {}", k - 1) };
        let cell = m.as_ref().and_then(|m| m.get(ch)).ok_or(format!("{who} omits gap variables for {ch}"))?;
        match env.get_path(cell, &[dir]) {
            Some(Fs::Var(v)) if env.deref(v).1.is_none() => Ok(env.deref(v).0),
            Some(_) => Err(format!("{who} {ch}.{dir} must be a variable")),
            None => Err(format!("{who} omits gap variables for {ch}")),
        }
    };
    for ch in &chans {
        if !g.channels.iter().any(|c| &c.name == ch) {
            return Err(bad(format!("unknown channel '{ch}'")));
        }
        if r.fillers.iter().any(|f| &f.channel == ch) {
            return Err(bad(format!("explicit {ch} threading cannot be combined with a push")));
        }
        let n = gaps.len();
        let ins: Vec<u32> = (0..n).map(|k| var_of(&r.env, &gaps[k], k, ch, "in")).collect::<Result<_, _>>().map_err(bad)?;
        let outs: Vec<u32> = (0..n).map(|k| var_of(&r.env, &gaps[k], k, ch, "out")).collect::<Result<_, _>>().map_err(bad)?;
        if ins[0] != ins[1] {
            return Err(bad(format!("{ch}: first daughter must start from the mother's list")));
        }
        for k in 1..n - 1 {
            if outs[k] != ins[k + 1] {
                return Err(bad(format!("{ch}: daughter {} does not pass its list to daughter {}", k - 1, k)));
            }
        }
        if outs[n - 1] != outs[0] {
            return Err(bad(format!("{ch}: last daughter must return the mother's list")));
        }
    }
    r.mother.fs = cats[0].clone();
    for (d, c) in r.daughters.iter_mut().zip(cats.into_iter().skip(1)) {
        d.fs = c;
    }
    Ok(())
}

fn schema(file: &str, l: &Line) -> DslResult<SchemaTemplate> {
    let rl = rule_line(file, l, true)?;
    if !rl.pushes.is_empty() {
        return Err(DslError::syntax(file, l.no, 1, "schemas take no push clauses"));
    }
    if rl.daughters.iter().filter(|d| d.is_none()).count() != 1 {
        return Err(DslError::syntax(file, l.no, 1, "a schema needs exactly one COMPS"));
    }
    let mut slots = Vec::new();
    for (i, d) in rl.daughters.into_iter().enumerate() {
        slots.push(match (i, d) {
            (0, Some(c)) => SchemaSlot::Head(c),
            (0, None) => return Err(DslError::syntax(file, l.no, 1, "the first schema daughter is the head")),
            (_, Some(c)) => SchemaSlot::Cat(c),
            (_, None) => SchemaSlot::Comps,
        });
    }
    Ok(SchemaTemplate { name: rl.name, mother: rl.mother, slots, env: rl.env })
}

fn percolation(file: &str, s: &Section) -> DslResult<Percolation> {
    let mut p = Percolation { targets: s.args.clone(), features: Vec::new() };
    for l in &s.body {
        let mut c = LineCursor::new(file, l);
        let name = c.word()?;
        let mut f = PercolatedFeature { name, sources: Vec::new(), default: None, from_word: false };
        while !c.at_end() {
            if c.eat("=word") {
                f.from_word = true;
            } else if c.eat("default=") {
                f.default = Some(c.word()?);
            } else {
                f.sources.push(c.word()?);
            }
        }
        p.features.push(f);
    }
    Ok(p)
}

/// Unused lexical categories, heads no schema accepts, undeclared feature
/// values, and idiom nouns missing from the lexicon.
pub fn validate_ug(g: &UgGrammar) -> Vec<Warning> {
    let mut w = BTreeSet::new();
    let mut consumed: BTreeSet<&str> = BTreeSet::new();
    for r in &g.rules {
        consumed.extend(r.daughters.iter().map(|d| d.cat.as_str()));
    }
    for t in &g.schemas {
        for s in &t.slots {
            if let SchemaSlot::Head(c) | SchemaSlot::Cat(c) = s {
                consumed.insert(c.cat.as_str());
            }
        }
    }
    for e in &g.lexicon {
        consumed.extend(e.subcat.iter().map(|c| c.cat.as_str()));
    }
    for e in &g.lexicon {
        if !consumed.contains(e.cat.cat.as_str()) {
            w.insert(Warning(format!("lexicon: '{}' has category {} which no rule uses", e.word, e.cat.cat)));
        }
        let heads: Vec<&SchemaTemplate> = g.schemas.iter().filter(|t| t.head_cat() == Some(e.cat.cat.as_str())).collect();
        if !heads.is_empty() && !heads.iter().any(|t| crate::ug::expand_subcat_schema(e, t).is_some()) {
            w.insert(Warning(format!("lexicon: '{}' is accepted by no schema", e.word)));
        }
        if let Some(Fs::Atom(noun)) = e.head_value("idiom") {
            if !g.knows(&noun) {
                w.insert(Warning(format!("lexicon: idiom '{}' pins '{}', which is not in the lexicon", e.word, noun)));
            }
        }
        let mut vals = Vec::new();
        for t in std::iter::once(&e.cat.fs).chain(e.subcat.iter().map(|c| &c.fs)) {
            feature_values(&e.env, t, &mut vals);
        }
        value_warnings(g, &format!("lexicon '{}'", e.word), &vals, &mut w);
    }
    for r in &g.rules {
        let mut vals = Vec::new();
        for t in std::iter::once(&r.mother.fs).chain(r.daughters.iter().map(|c| &c.fs)) {
            feature_values(&r.env, t, &mut vals);
        }
        value_warnings(g, &format!("rule '{}'", r.name), &vals, &mut w);
    }
    w.into_iter().collect()
}

fn value_warnings(g: &UgGrammar, who: &str, vals: &[(String, String)], w: &mut BTreeSet<Warning>) {
    for (f, v) in vals {
        if f == "word" || f == "idiom" || f == "lex" {
            continue;
        }
        if let Some(Some(allowed)) = g.features.get(f) {
            if !allowed.contains(v) {
                w.insert(Warning(format!("{who}: value '{v}' is not declared for feature '{f}'")));
            }
        }
    }
}

/// Flattened text of a grammar; reloading it gives the same grammar.
pub fn print_ug_grammar(g: &UgGrammar) -> String {
    let mut out = String::from(":format 1 ug\n");
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
    out.push_str(":channels\n");
    for c in &g.channels {
        out.push_str(&format!("{} {}\n", c.name, c.trace_cats.join(" ")));
    }
    if let Some(p) = &g.percolation {
        out.push_str(&format!(":percolate {}\n", p.targets.join(" ")));
        for f in &p.features {
            out.push_str(&f.name);
            for s in &f.sources {
                out.push(' ');
                out.push_str(s);
            }
            if let Some(d) = &f.default {
                out.push_str(&format!(" default={d}"));
            }
            if f.from_word {
                out.push_str(" =word");
            }
            out.push('\n');
        }
    }
    out.push_str(":lexicon\n");
    for e in &g.lexicon {
        let mut pr = Printer::new(&e.env);
        pr.prime(std::iter::once(&e.cat.fs).chain(e.subcat.iter().map(|c| &c.fs)));
        out.push_str(&format!("{} {}", e.word, cat_text(&mut pr, &e.cat)));
        if !e.subcat.is_empty() {
            let sc: Vec<String> = e.subcat.iter().map(|c| cat_text(&mut pr, c)).collect();
            out.push_str(&format!(" <{}>", sc.join(", ")));
        }
        out.push('\n');
    }
    out.push_str(":schemas\n");
    for t in &g.schemas {
        let mut pr = Printer::new(&t.env);
        let terms: Vec<&Fs> = std::iter::once(&t.mother.fs)
            .chain(t.slots.iter().filter_map(|s| match s {
                SchemaSlot::Head(c) | SchemaSlot::Cat(c) => Some(&c.fs),
                SchemaSlot::Comps => None,
            }))
            .collect();
        pr.prime(terms);
        let mut ds = Vec::new();
        for s in &t.slots {
            ds.push(match s {
                SchemaSlot::Head(c) | SchemaSlot::Cat(c) => cat_text(&mut pr, c),
                SchemaSlot::Comps => "COMPS".to_string(),
            });
        }
        out.push_str(&format!("{}: {} -> {}\n", t.name, cat_text(&mut pr, &t.mother), ds.join(" ")));
    }
    out.push_str(":rules\n");
    for r in &g.rules {
        let mut pr = Printer::new(&r.env);
        pr.prime(std::iter::once(&r.mother.fs).chain(r.daughters.iter().map(|c| &c.fs)));
        let ds: Vec<String> = r.daughters.iter().map(|c| cat_text(&mut pr, c)).collect();
        out.push_str(&format!("{}: {} -> {}", r.name, cat_text(&mut pr, &r.mother), ds.join(" ")));
        for f in &r.fillers {
            out.push_str(&format!(" ; push {} {} -> {}", f.channel, f.filler, f.target));
        }
        out.push('\n');
    }
    out
}

fn cat_text(pr: &mut Printer<'_, Subst>, c: &UGCategory) -> String {
    let body = pr.print(&c.fs);
    if body.starts_with('[') {
        format!("{}{}", c.cat, body)
    } else {
        format!("{} {}", c.cat, body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = ":format 1 ug\n:features\nagr\nvf: fin bse\n:channels\nwh NP\n";

    fn load(body: &str) -> DslResult<UgGrammar> {
        load_ug_str(&format!("{HEAD}{body}"), "test")
    }

    #[test]
    fn loads_minimal() {
        let g = load(":lexicon\nswim V[vf:bse] <>\nyou NP[agr:?A]\n:rules\ns: S[] -> NP[agr:?A] VP[agr:?A]\n").unwrap();
        assert_eq!(g.lexicon.len(), 2);
        assert_eq!(g.rules[0].daughters.len(), 2);
    }

    #[test]
    fn undeclared_feature() {
        let e = load(":lexicon\nswim V[tense:past]\n").unwrap_err();
        assert!(matches!(e, DslError::UndeclaredFeature { ref name, line: 8, .. } if name == "tense"), "{e}");
    }

    #[test]
    fn syntax_error_position() {
        let e = load(":rules\ns: S[] => NP[]\n").unwrap_err();
        assert!(matches!(e, DslError::Syntax { line: 8, col: 8, .. }), "{e}");
        let e = load(":lexicon\nswim V[vf bse]\n").unwrap_err();
        assert!(matches!(e, DslError::Syntax { line: 8, col: 11, .. }), "{e}");
    }

    #[test]
    fn daughter_omitting_gap_variables() {
        let e = load(":rules\nbad: S[gap:[wh:[in:?A, out:?C]]] -> NP[gap:[wh:[in:?A, out:?B]]] VP[]\n").unwrap_err();
        assert!(matches!(e, DslError::BadThreading { ref rule, .. } if rule == "bad"), "{e}");
        let e = load(":rules\nbad: S[gap:[wh:[in:?A, out:?C]]] -> NP[gap:[wh:[in:?A, out:?B]]] VP[gap:[wh:[in:?X, out:?C]]]\n").unwrap_err();
        assert!(matches!(e, DslError::BadThreading { .. }), "{e}");
    }

    #[test]
    fn explicit_threading_accepted_and_stripped() {
        let g = load(":rules\nok: S[gap:[wh:[in:?A, out:?C]]] -> NP[gap:[wh:[in:?A, out:?B]]] VP[gap:[wh:[in:?B, out:?C]]]\n").unwrap();
        let r = &g.rules[0];
        assert!(r.env.get_path(&r.mother.fs, &["gap"]).is_none());
    }

    #[test]
    fn bad_push() {
        let e = load(":rules\nx: S[] -> NP[] S[] ; push wh 0 -> 2\n").unwrap_err();
        assert!(matches!(e, DslError::BadThreading { .. }));
        let e = load(":rules\nx: S[] -> NP[] S[] ; push tough 0 -> 1\n").unwrap_err();
        assert!(matches!(e, DslError::BadThreading { .. }));
    }

    #[test]
    fn overlay_replaces_words_and_rules() {
        let dir = std::env::temp_dir().join(format!("grambench-dsl-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("base.gram"), format!("{HEAD}:lexicon\nswim V[vf:bse]\nswim V[vf:fin]\nyou NP[]\n:rules\ns: S[] -> NP[] VP[]\n")).unwrap();
        std::fs::write(dir.join("over.gram"), ":format 1 ug\n:include base.gram\n:lexicon\nswim V[vf:fin]\n:rules\ns: S[] -> NP[] V[]\n").unwrap();
        let g = load_ug_grammar(dir.join("over.gram").to_str().unwrap()).unwrap();
        assert_eq!(g.entries_for("swim").count(), 1);
        assert_eq!(g.entries_for("you").count(), 1);
        assert_eq!(g.rules.len(), 1);
        assert_eq!(g.rules[0].daughters[1].cat, "V");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn wrong_format_kind() {
        assert!(matches!(load_ug_str(":format 1 tag\n", "t"), Err(DslError::WrongFormat { .. })));
    }

    #[test]
    fn bundled_fragments_load_and_validate() {
        let base = load_ug_grammar("ug-base").unwrap();
        assert!(validate_ug(&base).is_empty(), "{:?}", validate_ug(&base));
        for w in ["which", "lake", "did", "you", "swim", "in"] {
            assert!(base.knows(w), "{w}");
        }
        assert!(base.rules.iter().any(|r| r.fillers.iter().any(|f| f.channel == "vmove")));
        assert!(base.rules.iter().any(|r| r.fillers.iter().any(|f| f.channel == "wh")));
        let poss = load_ug_grammar("ug-poss").unwrap();
        assert!(poss.percolated);
        let np = poss.rules.iter().find(|r| r.name == "np_det").unwrap();
        for f in ["poss", "poss_agr", "lex"] {
            assert!(np.env.get_path(&np.mother.fs, &[f]).is_some(), "{f}");
        }
        assert!(validate_ug(&poss).is_empty(), "{:?}", validate_ug(&poss));
    }

    #[test]
    fn unused_category_and_missing_idiom_noun_warn() {
        let g = load(":features\nidiom\n:lexicon\nzap Q[]\nhad V[idiom:way] <NP>\nyou NP[]\n:schemas\nvp: VP[] -> V[] COMPS\n:rules\ns: S[] -> NP[] VP[]\n").unwrap();
        let w: Vec<String> = validate_ug(&g).into_iter().map(|w| w.0).collect();
        assert!(w.iter().any(|m| m.contains("'zap'")), "{w:?}");
        assert!(w.iter().any(|m| m.contains("pins 'way'")), "{w:?}");
    }

    #[test]
    fn print_reload_is_stable() {
        for name in ["ug-base", "ug-poss"] {
            let g = load_ug_grammar(name).unwrap();
            let text = print_ug_grammar(&g);
            let again = load_ug_str(&text, "printed").unwrap();
            assert_eq!(print_ug_grammar(&again), text, "{name}");
        }
    }

    #[test]
    fn load_is_deterministic() {
        let a = print_ug_grammar(&load_ug_grammar("ug-poss").unwrap());
        let b = print_ug_grammar(&load_ug_grammar("ug-poss").unwrap());
        assert_eq!(a, b);
    }
}
