//! Judgment corpus: sentences with expected accept/reject verdicts, run
//! against named grammars under a chosen engine and configuration.
//!
//! File format, one record per line, `#` starts a comment:
//!
//! ```text
//! id | engine | grammar | config | expected | sentence | bindings | cite
//! ```
//!
//! `bindings` is `-` or `filler->pos; ...` where `pos` counts the overt
//! tokens before the trace. A cite may start with a `[phenomenon]` tag.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::dsl::{load_tag_grammar, load_ug_grammar, DslError};
use crate::tag::{TagConfig, TagGrammar, TagParser};
use crate::ug::{Binding, ChannelConfig, UgGrammar, UgParser};

/// The corpus shipped with the crate.
pub const BUNDLED_CORPUS: &str = include_str!("../corpus/judgments.corpus");

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{file}:{line}: {msg}")]
    Syntax { file: String, line: usize, msg: String },
    #[error("grammar '{0}' not found")]
    MissingGrammar(String),
    #[error("grammar '{name}' failed to load: {source}")]
    Grammar {
        name: String,
        #[source]
        source: DslError,
    },
    #[error("unknown report format '{0}' (expected text or records)")]
    UnknownFormat(String),
    #[error("{0}")]
    BadSetup(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    Ug,
    Tag,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Ug => "ug",
            Engine::Tag => "tag",
        }
    }
}

impl FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ug" => Ok(Engine::Ug),
            "tag" => Ok(Engine::Tag),
            _ => Err(format!("unknown engine '{s}' (expected ug or tag)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Config {
    Ug(ChannelConfig),
    Tag(TagConfig),
}

impl Config {
    pub fn name(self) -> &'static str {
        match self {
            Config::Ug(c) => c.name(),
            Config::Tag(c) => c.name(),
        }
    }

    pub fn engine(self) -> Engine {
        match self {
            Config::Ug(_) => Engine::Ug,
            Config::Tag(_) => Engine::Tag,
        }
    }

    /// Parses a configuration name valid for `engine`.
    pub fn parse_for(engine: Engine, s: &str) -> Result<Config, String> {
        match engine {
            Engine::Ug => s.parse().map(Config::Ug),
            Engine::Tag => s.parse().map(Config::Tag),
        }
    }

    pub fn default_for(engine: Engine) -> Config {
        match engine {
            Engine::Ug => Config::Ug(ChannelConfig::Merged),
            Engine::Tag => Config::Tag(TagConfig::Baseline),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Expected {
    Accept,
    Reject,
}

impl Expected {
    pub fn name(self) -> &'static str {
        match self {
            Expected::Accept => "accept",
            Expected::Reject => "reject",
        }
    }
}

/// An engine, a grammar name or path, and a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Setup {
    pub grammar: String,
    pub config: Config,
}

impl Setup {
    pub fn new(grammar: impl Into<String>, config: Config) -> Self {
        Setup { grammar: grammar.into(), config }
    }

    pub fn engine(&self) -> Engine {
        self.config.engine()
    }
}

impl fmt::Display for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.engine().name(), self.grammar, self.config.name())
    }
}

/// `tag/tag-base/baseline`
impl FromStr for Setup {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split('/').collect();
        let [e, g, c] = parts[..] else {
            return Err(format!("expected engine/grammar/config, got '{s}'"));
        };
        let engine: Engine = e.parse()?;
        Ok(Setup::new(g, Config::parse_for(engine, c)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JudgmentEntry {
    pub id: String,
    pub sentence: Vec<String>,
    pub setup: Setup,
    pub expected: Expected,
    /// Filler to gap position, as `filler->pos` strings.
    pub expected_bindings: Option<BTreeSet<String>>,
    pub phenomenon: String,
    pub cite: String,
}

impl JudgmentEntry {
    pub fn engine(&self) -> Engine {
        self.setup.engine()
    }

    pub fn tokens(&self) -> Vec<&str> {
        self.sentence.iter().map(String::as_str).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    pub entries: Vec<JudgmentEntry>,
}

impl Corpus {
    pub fn bundled() -> Corpus {
        parse_corpus(BUNDLED_CORPUS, "judgments.corpus").expect("bundled corpus parses")
    }

    pub fn setups(&self) -> BTreeSet<Setup> {
        self.entries.iter().map(|e| e.setup.clone()).collect()
    }
}

pub fn load_corpus(path: &str) -> Result<Corpus, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_string(), source })?;
    parse_corpus(&text, path)
}

/// `which lake->6; did->4` as a set; `-` is the empty set.
pub fn parse_bindings(s: &str) -> Result<BTreeSet<String>, String> {
    let s = s.trim();
    if s == "-" || s.is_empty() {
        return Ok(BTreeSet::new());
    }
    let mut out = BTreeSet::new();
    for part in s.split(';') {
        let (filler, pos) = part.split_once("->").ok_or_else(|| format!("binding '{}' lacks '->'", part.trim()))?;
        let filler = filler.split_whitespace().collect::<Vec<_>>().join(" ");
        let pos: usize = pos.trim().parse().map_err(|_| format!("bad gap position in '{}'", part.trim()))?;
        if filler.is_empty() {
            return Err(format!("binding '{}' has no filler", part.trim()));
        }
        out.insert(format!("{filler}->{pos}"));
    }
    Ok(out)
}

pub fn binding_key(b: &Binding) -> String {
    format!("{}->{}", b.filler_text(), b.gap_pos)
}

pub fn parse_corpus(text: &str, file: &str) -> Result<Corpus, CorpusError> {
    let mut entries: Vec<JudgmentEntry> = Vec::new();
    let mut ids = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| CorpusError::Syntax { file: file.to_string(), line, msg };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let f: Vec<&str> = body.split('|').map(str::trim).collect();
        if f.len() != 8 {
            return Err(err(format!("expected 8 fields, found {}", f.len())));
        }
        let id = f[0].to_string();
        if id.is_empty() || !ids.insert(id.clone()) {
            return Err(err(format!("missing or duplicate id '{id}'")));
        }
        let engine: Engine = f[1].parse().map_err(err)?;
        let config = Config::parse_for(engine, f[3]).map_err(err)?;
        let expected = match f[4] {
            "accept" => Expected::Accept,
            "reject" => Expected::Reject,
            other => return Err(err(format!("expected accept or reject, found '{other}'"))),
        };
        let sentence: Vec<String> = f[5].split_whitespace().map(str::to_string).collect();
        if sentence.is_empty() {
            return Err(err("empty sentence".into()));
        }
        let expected_bindings = match f[6] {
            "" | "-" => None,
            b => Some(parse_bindings(b).map_err(err)?),
        };
        if expected_bindings.is_some() && expected == Expected::Reject {
            return Err(err("bindings given for a rejected sentence".into()));
        }
        let (phenomenon, cite) = match f[7].strip_prefix('[').and_then(|r| r.split_once(']')) {
            Some((p, c)) => (p.trim().to_string(), c.trim().to_string()),
            None => (String::new(), f[7].to_string()),
        };
        entries.push(JudgmentEntry {
            id,
            sentence,
            setup: Setup::new(f[2], config),
            expected,
            expected_bindings,
            phenomenon,
            cite,
        });
    }
    Ok(Corpus { entries })
}

/// Loaded grammars keyed by engine and name.
#[derive(Default)]
pub struct Grammars {
    ug: BTreeMap<String, UgGrammar>,
    tag: BTreeMap<String, TagGrammar>,
}

impl Grammars {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every grammar the corpus names.
    pub fn for_corpus(c: &Corpus) -> Result<Self, CorpusError> {
        let mut g = Grammars::new();
        for s in c.setups() {
            g.load(s.engine(), &s.grammar)?;
        }
        Ok(g)
    }

    pub fn load(&mut self, engine: Engine, name: &str) -> Result<(), CorpusError> {
        let wrap = |e: DslError| match e {
            DslError::MissingGrammar(n) => CorpusError::MissingGrammar(n),
            source => CorpusError::Grammar { name: name.to_string(), source },
        };
        match engine {
            Engine::Ug if !self.ug.contains_key(name) => {
                self.ug.insert(name.to_string(), load_ug_grammar(name).map_err(wrap)?);
            }
            Engine::Tag if !self.tag.contains_key(name) => {
                self.tag.insert(name.to_string(), load_tag_grammar(name).map_err(wrap)?);
            }
            _ => {}
        }
        Ok(())
    }

    pub fn insert_ug(&mut self, name: &str, g: UgGrammar) {
        self.ug.insert(name.to_string(), g);
    }

    pub fn insert_tag(&mut self, name: &str, g: TagGrammar) {
        self.tag.insert(name.to_string(), g);
    }

    pub fn ug(&self, name: &str) -> Option<&UgGrammar> {
        self.ug.get(name)
    }

    pub fn tag(&self, name: &str) -> Option<&TagGrammar> {
        self.tag.get(name)
    }
}

/// What one engine made of one sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub parses: usize,
    /// Binding set of each parse, in parse order.
    pub bindings: Vec<BTreeSet<String>>,
    /// Set when the sentence could not be parsed at all (unknown word).
    pub error: Option<String>,
}

impl Analysis {
    pub fn accepted(&self) -> bool {
        self.parses > 0
    }

    pub fn binding_sets(&self) -> BTreeSet<BTreeSet<String>> {
        self.bindings.iter().cloned().collect()
    }
}

pub fn analyze(setup: &Setup, tokens: &[&str], grammars: &Grammars) -> Result<Analysis, CorpusError> {
    let keys = |bs: &[Binding]| bs.iter().map(binding_key).collect::<BTreeSet<_>>();
    let missing = || CorpusError::MissingGrammar(setup.grammar.clone());
    let res = match setup.config {
        Config::Ug(c) => {
            let g = grammars.ug(&setup.grammar).ok_or_else(missing)?;
            UgParser::new(g, c)
                .parse(tokens)
                .map(|ps| ps.iter().map(|p| keys(&p.bindings)).collect::<Vec<_>>())
                .map_err(|e| e.to_string())
        }
        Config::Tag(c) => {
            let g = grammars.tag(&setup.grammar).ok_or_else(missing)?;
            TagParser::new(g, c)
                .parse(tokens)
                .map(|ds| ds.iter().map(|d| keys(&d.bindings)).collect::<Vec<_>>())
                .map_err(|e| e.to_string())
        }
    };
    Ok(match res {
        Ok(bindings) => Analysis { parses: bindings.len(), bindings, error: None },
        Err(e) => Analysis { parses: 0, bindings: Vec::new(), error: Some(e) },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryOutcome {
    pub id: String,
    pub setup: Setup,
    pub expected: Expected,
    pub passed: bool,
    pub parses: usize,
    /// Distinct binding sets found, formatted `a->1; b->2`.
    pub bindings: Vec<String>,
    pub elapsed: Duration,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunReport {
    pub outcomes: Vec<EntryOutcome>,
    pub passed: usize,
    pub failed: usize,
}

impl RunReport {
    fn from_outcomes(mut outcomes: Vec<EntryOutcome>) -> Self {
        outcomes.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = outcomes.iter().filter(|o| o.passed).count();
        RunReport { failed: outcomes.len() - passed, passed, outcomes }
    }

    pub fn total(&self) -> usize {
        self.outcomes.len()
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// The same report with every elapsed time set to zero.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        for o in &mut r.outcomes {
            o.elapsed = Duration::ZERO;
        }
        r
    }
}

fn join_set(s: &BTreeSet<String>) -> String {
    if s.is_empty() {
        "-".to_string()
    } else {
        s.iter().cloned().collect::<Vec<_>>().join("; ")
    }
}

fn judge(e: &JudgmentEntry, grammars: &Grammars) -> Result<EntryOutcome, CorpusError> {
    let start = Instant::now();
    let a = analyze(&e.setup, &e.tokens(), grammars)?;
    let elapsed = start.elapsed();
    let found = a.binding_sets();
    let (passed, note) = match (e.expected, &e.expected_bindings) {
        _ if a.error.is_some() => (false, a.error.clone()),
        (Expected::Reject, _) => (a.parses == 0, None),
        (Expected::Accept, None) => (a.parses > 0, None),
        (Expected::Accept, Some(want)) if a.parses > 0 && !found.contains(want) => {
            (false, Some(format!("no parse has bindings {}", join_set(want))))
        }
        (Expected::Accept, Some(_)) => (a.parses > 0, None),
    };
    Ok(EntryOutcome {
        id: e.id.clone(),
        setup: e.setup.clone(),
        expected: e.expected,
        passed,
        parses: a.parses,
        bindings: found.iter().map(join_set).collect(),
        elapsed,
        note,
    })
}

/// Runs every entry whose engine is in `engines` (all entries if empty).
/// Entries run on worker threads; the report is ordered by id.
pub fn run_corpus(corpus: &Corpus, engines: &[Engine], grammars: &Grammars) -> Result<RunReport, CorpusError> {
    let todo: Vec<&JudgmentEntry> =
        corpus.entries.iter().filter(|e| engines.is_empty() || engines.contains(&e.engine())).collect();
    for e in &todo {
        let present = match e.engine() {
            Engine::Ug => grammars.ug(&e.setup.grammar).is_some(),
            Engine::Tag => grammars.tag(&e.setup.grammar).is_some(),
        };
        if !present {
            return Err(CorpusError::MissingGrammar(e.setup.grammar.clone()));
        }
    }
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(todo.len().max(1));
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(todo.len()));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(e) = todo.get(i) else { break };
                let r = judge(e, grammars);
                results.lock().expect("no worker panics while holding the lock").push(r);
            });
        }
    });
    let outcomes = results.into_inner().expect("workers joined").into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(RunReport::from_outcomes(outcomes))
}

/// Which side accepts where the other rejects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Delta {
    Same,
    OnlyA,
    OnlyB,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineDiff {
    pub a: (Setup, Analysis),
    pub b: (Setup, Analysis),
    pub delta: Delta,
    /// Binding sets found only under `a`, and only under `b`.
    pub only_a: BTreeSet<BTreeSet<String>>,
    pub only_b: BTreeSet<BTreeSet<String>>,
}

impl EngineDiff {
    pub fn counts(&self) -> (usize, usize) {
        (self.a.1.parses, self.b.1.parses)
    }
}

pub fn diff_engines(tokens: &[&str], a: &Setup, b: &Setup, grammars: &Grammars) -> Result<EngineDiff, CorpusError> {
    let ra = analyze(a, tokens, grammars)?;
    let rb = analyze(b, tokens, grammars)?;
    let delta = match (ra.accepted(), rb.accepted()) {
        (true, false) => Delta::OnlyA,
        (false, true) => Delta::OnlyB,
        _ => Delta::Same,
    };
    let (sa, sb) = (ra.binding_sets(), rb.binding_sets());
    Ok(EngineDiff {
        only_a: sa.difference(&sb).cloned().collect(),
        only_b: sb.difference(&sa).cloned().collect(),
        a: (a.clone(), ra),
        b: (b.clone(), rb),
        delta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Records,
}

impl FromStr for ReportFormat {
    type Err = CorpusError;
    fn from_str(s: &str) -> Result<Self, CorpusError> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "records" => Ok(ReportFormat::Records),
            _ => Err(CorpusError::UnknownFormat(s.to_string())),
        }
    }
}

pub fn export_report(report: &RunReport, format: &str) -> Result<String, CorpusError> {
    Ok(match format.parse()? {
        ReportFormat::Text => text_table(report),
        ReportFormat::Records => records(report),
    })
}

fn outcome(o: &EntryOutcome) -> &'static str {
    if o.passed {
        "pass"
    } else {
        "FAIL"
    }
}

fn bindings_cell(o: &EntryOutcome) -> String {
    if o.bindings.is_empty() {
        "-".to_string()
    } else {
        o.bindings.join(" | ")
    }
}

fn text_table(r: &RunReport) -> String {
    let w = r.outcomes.iter().map(|o| o.id.len()).max().unwrap_or(0).max(2);
    let sw = r.outcomes.iter().map(|o| o.setup.to_string().len()).max().unwrap_or(0).max(5);
    let mut out = format!(
        "{:<w$}  {:<sw$}  {:<8}  {:<7}  {:>6}  {:>10}  {}\n",
        "id", "setup", "expected", "outcome", "parses", "time_ms", "bindings"
    );
    out.push_str(&format!("{}\n", "-".repeat(w + sw + 48)));
    for o in &r.outcomes {
        out.push_str(&format!(
            "{:<w$}  {:<sw$}  {:<8}  {:<7}  {:>6}  {:>10.1}  {}",
            o.id,
            o.setup.to_string(),
            o.expected.name(),
            outcome(o),
            o.parses,
            o.elapsed.as_secs_f64() * 1000.0,
            bindings_cell(o)
        ));
        if let Some(n) = &o.note {
            out.push_str(&format!("  ({n})"));
        }
        out.push('\n');
    }
    if !r.outcomes.is_empty() {
        out.push_str(&format!("{} entries, {} passed, {} failed\n", r.total(), r.passed, r.failed));
    }
    out
}

fn records(r: &RunReport) -> String {
    let mut out = String::from("id\tengine\tgrammar\tconfig\texpected\toutcome\tparses\tbindings\telapsed_us\n");
    for o in &r.outcomes {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            o.id,
            o.setup.engine().name(),
            o.setup.grammar,
            o.setup.config.name(),
            o.expected.name(),
            if o.passed { "pass" } else { "fail" },
            o.parses,
            bindings_cell(o),
            o.elapsed.as_micros()
        ));
    }
    out
}
