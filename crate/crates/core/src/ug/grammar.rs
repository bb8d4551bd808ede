use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::fs::{Env, FeatureStructure, Fs, Subst, VarId};

/// A category pattern: a label plus head features in the owner's variable
/// environment.
#[derive(Clone, Debug)]
pub struct UGCategory {
    pub cat: String,
    pub fs: Fs,
}

impl UGCategory {
    pub fn new(cat: impl Into<String>, fs: Fs) -> Self {
        UGCategory { cat: cat.into(), fs }
    }
}

/// Pushes the filler daughter onto the target daughter's gap list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FillerIntro {
    pub channel: String,
    pub filler: usize,
    pub target: usize,
}

#[derive(Clone, Debug)]
pub struct UGRule {
    pub name: String,
    pub mother: UGCategory,
    pub daughters: Vec<UGCategory>,
    pub fillers: Vec<FillerIntro>,
    /// Set on rules produced by subcat schema expansion.
    pub schema: bool,
    pub env: Subst,
}

#[derive(Clone, Debug)]
pub enum SchemaSlot {
    Head(UGCategory),
    Comps,
    Cat(UGCategory),
}

/// `VP -> V:[subcat=COMPS] COMPS ...`, instantiated once per head entry.
#[derive(Clone, Debug)]
pub struct SchemaTemplate {
    pub name: String,
    pub mother: UGCategory,
    pub slots: Vec<SchemaSlot>,
    pub env: Subst,
}

impl SchemaTemplate {
    pub fn head_cat(&self) -> Option<&str> {
        self.slots.iter().find_map(|s| match s {
            SchemaSlot::Head(c) => Some(c.cat.as_str()),
            _ => None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct UGLexEntry {
    pub word: String,
    pub cat: UGCategory,
    pub subcat: Vec<UGCategory>,
    pub env: Subst,
}

impl UGLexEntry {
    pub fn head_value(&self, feat: &str) -> Option<Fs> {
        self.env.get_path(&self.cat.fs, &[feat]).map(|t| self.env.resolve(&t))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelDecl {
    pub name: String,
    pub trace_cats: Vec<String>,
}

/// Head-feature percolation declaration: which daughter categories supply a
/// feature to the mother in rules building the target categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PercolatedFeature {
    pub name: String,
    pub sources: Vec<String>,
    pub default: Option<String>,
    /// Lexical sources lacking the feature take their surface form.
    pub from_word: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Percolation {
    pub targets: Vec<String>,
    pub features: Vec<PercolatedFeature>,
}

pub const OPT_POSSESSIVE: &str = "possessive-percolation";

#[derive(Clone, Debug, Default)]
pub struct UgGrammar {
    pub name: String,
    pub features: BTreeMap<String, Option<Vec<String>>>,
    pub channels: Vec<ChannelDecl>,
    pub lexicon: Vec<UGLexEntry>,
    pub rules: Vec<UGRule>,
    pub schemas: Vec<SchemaTemplate>,
    pub percolation: Option<Percolation>,
    pub options: BTreeSet<String>,
    /// Set once percolation has been applied; the transform is idempotent.
    pub percolated: bool,
}

impl UgGrammar {
    pub fn entries_for<'a>(&'a self, word: &'a str) -> impl Iterator<Item = &'a UGLexEntry> + 'a {
        self.lexicon.iter().filter(move |e| e.word == word)
    }

    pub fn knows(&self, word: &str) -> bool {
        self.lexicon.iter().any(|e| e.word == word)
    }

    /// Lexical rules plus one expanded rule per (schema, compatible head).
    pub fn all_rules(&self) -> Vec<UGRule> {
        let mut out = self.rules.clone();
        for t in &self.schemas {
            for e in &self.lexicon {
                if let Some(r) = expand_with(t, e) {
                    out.push(r);
                }
            }
        }
        out
    }
}

/// Expands a subcat schema for one head entry: the head slot is unified with
/// the entry and COMPS is replaced by the entry's subcat list.
pub fn expand_subcat_schema(entry: &UGLexEntry, template: &SchemaTemplate) -> Option<UGRule> {
    expand_with(template, entry)
}

fn expand_with(t: &SchemaTemplate, e: &UGLexEntry) -> Option<UGRule> {
    if t.head_cat() != Some(e.cat.cat.as_str()) {
        return None;
    }
    let mut env = Subst::new();
    let mut tmap = HashMap::new();
    let mut emap = HashMap::new();
    let mother = UGCategory::new(&t.mother.cat, env.transfer(&t.env, &t.mother.fs, &mut tmap));
    let entry_head = env.transfer(&e.env, &e.cat.fs, &mut emap);
    let entry_head = env.unify(&entry_head, &Fs::avm([("word", Fs::atom(&e.word))])).ok()?;
    let mut daughters = Vec::new();
    for slot in &t.slots {
        match slot {
            SchemaSlot::Head(c) => {
                let pat = env.transfer(&t.env, &c.fs, &mut tmap);
                let u = env.unify(&pat, &entry_head).ok()?;
                daughters.push(UGCategory::new(&c.cat, u));
            }
            SchemaSlot::Comps => {
                for s in &e.subcat {
                    daughters.push(UGCategory::new(&s.cat, env.transfer(&e.env, &s.fs, &mut emap)));
                }
            }
            SchemaSlot::Cat(c) => daughters.push(UGCategory::new(&c.cat, env.transfer(&t.env, &c.fs, &mut tmap))),
        }
    }
    Some(UGRule { name: format!("{}[{}]", t.name, e.word), mother, daughters, fillers: Vec::new(), schema: true, env })
}

/// Gap-list configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelConfig {
    /// WH and tough movement share one list; verb movement stays separate.
    Merged,
    /// One list per declared channel.
    Channelized,
}

impl ChannelConfig {
    pub fn name(self) -> &'static str {
        match self {
            ChannelConfig::Merged => "merged",
            ChannelConfig::Channelized => "channelized",
        }
    }

    /// Physical list a logical channel threads on.
    pub fn physical(self, channel: &str) -> &str {
        match (self, channel) {
            (ChannelConfig::Merged, "tough") => "wh",
            _ => channel,
        }
    }
}

impl std::str::FromStr for ChannelConfig {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "merged" => Ok(ChannelConfig::Merged),
            "channelized" => Ok(ChannelConfig::Channelized),
            other => Err(format!("unknown unification-grammar config '{other}'")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PhysChannel {
    pub name: String,
    pub trace_cats: Vec<String>,
}

/// A rule with its threading wired for one config. The template is the list
/// `<mother, d1, ..., dn>` of category structures `[head:H, gap:G]`.
#[derive(Clone, Debug)]
pub struct CompiledRule {
    pub name: String,
    pub mother_cat: String,
    pub daughter_cats: Vec<String>,
    pub template: FeatureStructure,
    /// (filler daughter, physical channel)
    pub fillers: Vec<(usize, String)>,
}

#[derive(Clone, Debug)]
pub struct CompiledLex {
    pub word: String,
    pub cat: String,
    pub fs: FeatureStructure,
}

#[derive(Clone, Debug)]
pub struct CompiledGrammar {
    pub config: ChannelConfig,
    pub channels: Vec<PhysChannel>,
    pub rules: Vec<CompiledRule>,
    pub lexicon: HashMap<String, Vec<CompiledLex>>,
    pub root_cat: String,
}

pub const FILLER_INDEX: &str = "fidx";

impl CompiledGrammar {
    pub fn new(g: &UgGrammar, config: ChannelConfig) -> Self {
        let mut channels: Vec<PhysChannel> = Vec::new();
        for c in &g.channels {
            let phys = config.physical(&c.name).to_string();
            match channels.iter_mut().find(|p| p.name == phys) {
                Some(p) => {
                    for t in &c.trace_cats {
                        if !p.trace_cats.contains(t) {
                            p.trace_cats.push(t.clone());
                        }
                    }
                }
                None => channels.push(PhysChannel { name: phys, trace_cats: c.trace_cats.clone() }),
            }
        }
        let names: Vec<String> = channels.iter().map(|c| c.name.clone()).collect();
        let rules = g.all_rules().iter().map(|r| compile_rule(r, &names, config)).collect();
        let mut lexicon: HashMap<String, Vec<CompiledLex>> = HashMap::new();
        for e in &g.lexicon {
            let mut s = Subst::new();
            let mut map = HashMap::new();
            let head = s.transfer(&e.env, &e.cat.fs, &mut map);
            let Ok(head) = s.unify(&head, &Fs::avm([("word", Fs::atom(&e.word))])) else { continue };
            let gap = pass_through(&mut s, &names);
            let fs = s.snapshot(&Fs::avm([("head", head), ("gap", gap)]));
            lexicon.entry(e.word.clone()).or_default().push(CompiledLex { word: e.word.clone(), cat: e.cat.cat.clone(), fs });
        }
        CompiledGrammar { config, channels, rules, lexicon, root_cat: "S".to_string() }
    }

    pub fn channel_names(&self) -> Vec<String> {
        self.channels.iter().map(|c| c.name.clone()).collect()
    }

    /// Root category: `S` with every gap list empty on entry and exit.
    pub fn root_pattern(&self) -> FeatureStructure {
        let mut s = Subst::new();
        let head = s.fresh_var();
        let gap = Fs::avm(
            self.channels
                .iter()
                .map(|c| (c.name.clone(), Fs::avm([("in", Fs::empty_list()), ("out", Fs::empty_list())]))),
        );
        s.snapshot(&Fs::avm([("head", head), ("gap", gap)]))
    }
}

pub(crate) fn pass_through(s: &mut Subst, channels: &[String]) -> Fs {
    Fs::avm(channels.iter().map(|c| {
        let v = s.fresh_var();
        (c.clone(), Fs::avm([("in", v.clone()), ("out", v)]))
    }))
}

fn compile_rule(r: &UGRule, channels: &[String], config: ChannelConfig) -> CompiledRule {
    let mut s = Subst::new();
    let mut map = HashMap::new();
    let mother_head = s.transfer(&r.env, &r.mother.fs, &mut map);
    let mut heads: Vec<Fs> = r.daughters.iter().map(|d| s.transfer(&r.env, &d.fs, &mut map)).collect();
    let mut fidx: BTreeMap<usize, Fs> = BTreeMap::new();
    for f in &r.fillers {
        if !matches!(heads[f.filler], Fs::Var(_)) {
            let v: VarId = s.fresh();
            s.define(v, heads[f.filler].clone());
            heads[f.filler] = Fs::Var(v);
        }
        fidx.entry(f.filler).or_insert_with(|| s.fresh_var());
    }
    let n = heads.len();
    let mut mother_gap = BTreeMap::new();
    let mut gaps: Vec<BTreeMap<String, Fs>> = vec![BTreeMap::new(); n];
    for ch in channels {
        let m_in = s.fresh();
        let mut cur = m_in;
        for (k, gap) in gaps.iter_mut().enumerate() {
            let pushed: Vec<Fs> = r
                .fillers
                .iter()
                .filter(|f| f.target == k && config.physical(&f.channel) == ch)
                .map(|f| {
                    Fs::avm([
                        ("cat", Fs::atom(&r.daughters[f.filler].cat)),
                        ("head", heads[f.filler].clone()),
                        ("idx", fidx[&f.filler].clone()),
                    ])
                })
                .collect();
            let d_in = if pushed.is_empty() { Fs::Var(cur) } else { Fs::List(pushed, Some(cur)) };
            let out = s.fresh();
            gap.insert(ch.clone(), Fs::avm([("in", d_in), ("out", Fs::Var(out))]));
            cur = out;
        }
        mother_gap.insert(ch.clone(), Fs::avm([("in", Fs::Var(m_in)), ("out", Fs::Var(cur))]));
    }
    let mut cats = vec![Fs::avm([("head", mother_head), ("gap", Fs::Avm(mother_gap))])];
    for (k, (h, g)) in heads.into_iter().zip(gaps).enumerate() {
        let mut m = BTreeMap::from([("head".to_string(), h), ("gap".to_string(), Fs::Avm(g))]);
        if let Some(i) = fidx.get(&k) {
            m.insert(FILLER_INDEX.to_string(), i.clone());
        }
        cats.push(Fs::Avm(m));
    }
    CompiledRule {
        name: r.name.clone(),
        mother_cat: r.mother.cat.clone(),
        daughter_cats: r.daughters.iter().map(|d| d.cat.clone()).collect(),
        template: s.snapshot(&Fs::List(cats, None)),
        fillers: r.fillers.iter().map(|f| (f.filler, config.physical(&f.channel).to_string())).collect(),
    }
}

/// Threads the declared head features from determiner/noun daughters up to
/// every NP-level mother, and turns idiom verb entries into constraints on
/// the possessive and lexical head of their object NP.
pub fn enable_possessive_percolation(g: &UgGrammar) -> UgGrammar {
    let mut out = g.clone();
    if out.percolated {
        return out;
    }
    out.percolated = true;
    out.options.insert(OPT_POSSESSIVE.to_string());
    let Some(perc) = out.percolation.clone() else { return out };
    for r in &mut out.rules {
        if !perc.targets.contains(&r.mother.cat) {
            continue;
        }
        for f in &perc.features {
            let src = f.sources.iter().find_map(|s| r.daughters.iter().position(|d| &d.cat == s));
            let add = match src {
                Some(k) => {
                    let v = r.env.fresh_var();
                    let d = r.daughters[k].fs.clone();
                    r.daughters[k].fs = unify_or_keep(&mut r.env, &d, &Fs::avm([(f.name.clone(), v.clone())]));
                    Some(v)
                }
                None => f.default.as_ref().map(Fs::atom),
            };
            if let Some(v) = add {
                let m = r.mother.fs.clone();
                r.mother.fs = unify_or_keep(&mut r.env, &m, &Fs::avm([(f.name.clone(), v)]));
            }
        }
    }
    for e in &mut out.lexicon {
        for f in perc.features.iter().filter(|f| f.from_word && f.sources.contains(&e.cat.cat)) {
            if e.head_value(&f.name).is_none() {
                let h = e.cat.fs.clone();
                e.cat.fs = unify_or_keep(&mut e.env, &h, &Fs::avm([(f.name.clone(), Fs::atom(&e.word))]));
            }
        }
        let Some(Fs::Atom(noun)) = e.head_value("idiom") else { continue };
        let Some(obj) = e.subcat.iter().position(|c| c.cat == "NP") else { continue };
        let agr = e.env.fresh_var();
        let h = e.cat.fs.clone();
        e.cat.fs = unify_or_keep(&mut e.env, &h, &Fs::avm([("agr", agr.clone())]));
        let o = e.subcat[obj].fs.clone();
        let constraint = Fs::avm([("poss", Fs::atom("+")), ("poss_agr", agr), ("lex", Fs::atom(noun))]);
        e.subcat[obj].fs = unify_or_keep(&mut e.env, &o, &constraint);
    }
    out
}

fn unify_or_keep(env: &mut Subst, a: &Fs, b: &Fs) -> Fs {
    env.unify(a, b).unwrap_or_else(|_| a.clone())
}
