mod common;

use std::collections::BTreeSet;

use common::{toks, UgOracle};
use grambench::corpus::{
    diff_engines, export_report, parse_corpus, run_corpus, Config, Corpus, Delta, Engine, Expected, Grammars, RunReport,
    Setup,
};
use grambench::dsl::load_ug_grammar;
use grambench::tag::TagConfig;
use grambench::ug::ChannelConfig;

fn bundled_run() -> RunReport {
    let c = Corpus::bundled();
    run_corpus(&c, &[], &Grammars::for_corpus(&c).unwrap()).unwrap()
}

fn has(c: &Corpus, sentence: &str, setup: &str, expected: Expected) -> bool {
    let setup: Setup = setup.parse().unwrap();
    c.entries.iter().any(|e| e.sentence.join(" ") == sentence && e.setup == setup && e.expected == expected)
}

#[test]
fn bundled_corpus_all_pass() {
    let r = bundled_run();
    let failing: Vec<_> = r.outcomes.iter().filter(|o| !o.passed).collect();
    assert!(failing.is_empty(), "{failing:#?}");
    assert_eq!(r.passed + r.failed, r.total());
    let ex1 = r.outcomes.iter().find(|o| o.id == "ex1-ug-merged").unwrap();
    assert_eq!(ex1.bindings, ["did->4; which lake->6"]);
}

#[test]
fn bundled_corpus_covers_the_judgments() {
    use Expected::{Accept, Reject};
    let c = Corpus::bundled();
    assert!(c.entries.len() >= 16);
    for (s, setup, exp) in [
        ("which lake did you swim in", "ug/ug-base/merged", Accept),
        ("which violin are these sonatas hard to play on", "ug/ug-base/merged", Accept),
        ("which sonatas is this violin hard to play on", "ug/ug-base/merged", Reject),
        ("which articles are men most fun to shop for with", "ug/ug-base/channelized", Accept),
        ("which articles are men most fun to shop for with", "ug/ug-base/merged", Reject),
        ("which articles are men most fun to shop with for", "ug/ug-base/channelized", Accept),
        ("john had his way", "tag/tag-base/baseline", Accept),
        ("john had her way", "tag/tag-base/baseline", Reject),
        ("he shook his pretty head", "tag/tag-base/baseline", Accept),
        ("she shrugged her powerful shoulders", "tag/tag-base/baseline", Accept),
        ("which lake did you swim in", "tag/tag-base/baseline", Reject),
        ("which lake did you swim in", "tag/tag-gap/gap-ext", Accept),
        ("john had her way", "ug/ug-poss/merged", Reject),
    ] {
        assert!(has(&c, s, setup, exp), "{s} {setup} {exp:?}");
    }
    // the paired inversion trees appear in at least one accepted TAG entry
    assert!(c.entries.iter().any(|e| e.engine() == Engine::Tag && e.sentence[0] == "did" && e.expected == Accept));
}

#[test]
fn bundled_entries_use_known_words_and_consistent_bindings() {
    let c = Corpus::bundled();
    let g = Grammars::for_corpus(&c).unwrap();
    for e in &c.entries {
        assert!(e.expected_bindings.is_none() || e.expected == Expected::Accept, "{}", e.id);
        let known = |w: &str| match e.setup.config {
            Config::Ug(_) => g.ug(&e.setup.grammar).unwrap().knows(w),
            Config::Tag(_) => true,
        };
        assert!(e.tokens().iter().all(|w| known(w)), "{}", e.id);
    }
}

#[test]
fn runs_are_deterministic_modulo_timing() {
    let a = bundled_run();
    let b = bundled_run();
    assert_eq!(a.without_timing(), b.without_timing());
    for f in ["text", "records"] {
        assert_eq!(
            export_report(&a.without_timing(), f).unwrap(),
            export_report(&b.without_timing(), f).unwrap()
        );
    }
}

#[test]
fn engine_filter() {
    let c = Corpus::bundled();
    let g = Grammars::for_corpus(&c).unwrap();
    let r = run_corpus(&c, &[Engine::Tag], &g).unwrap();
    assert!(r.total() > 0 && r.outcomes.iter().all(|o| o.setup.engine() == Engine::Tag));
}

#[test]
fn empty_corpus_exports_headers_only() {
    let c = parse_corpus("# nothing here\n", "empty").unwrap();
    let r = run_corpus(&c, &[], &Grammars::new()).unwrap();
    assert_eq!((r.total(), r.passed, r.failed), (0, 0, 0));
    assert_eq!(export_report(&r, "records").unwrap().lines().count(), 1);
    let text = export_report(&r, "text").unwrap();
    assert!(text.lines().count() <= 2 && text.starts_with("id"), "{text}");
}

#[test]
fn export_formats() {
    let r = bundled_run();
    let text = export_report(&r, "text").unwrap();
    // header, rule, one row per entry, totals
    assert_eq!(text.lines().count(), r.total() + 3);
    let widths: BTreeSet<usize> = text.lines().skip(2).take(r.total()).map(|l| l.find("pass").unwrap()).collect();
    assert_eq!(widths.len(), 1, "columns line up");
    let rec = export_report(&r, "records").unwrap();
    let header: Vec<&str> = rec.lines().next().unwrap().split('\t').collect();
    assert!(header.contains(&"id") && header.contains(&"outcome") && header.contains(&"parses"));
    for (line, o) in rec.lines().skip(1).zip(&r.outcomes) {
        let f: Vec<&str> = line.split('\t').collect();
        assert_eq!(f.len(), header.len());
        assert_eq!(f[0], o.id);
        assert_eq!(f[header.iter().position(|h| *h == "parses").unwrap()], o.parses.to_string());
    }
    assert!(export_report(&r, "xml").is_err());
}

#[test]
fn diff_adjunct_extraction() {
    let s = toks("which lake did you swim in");
    let a = Setup::new("tag-base", Config::Tag(TagConfig::Baseline));
    let b = Setup::new("tag-gap", Config::Tag(TagConfig::GapExt));
    let mut g = Grammars::new();
    g.load(Engine::Tag, "tag-base").unwrap();
    g.load(Engine::Tag, "tag-gap").unwrap();
    let d = diff_engines(&s, &a, &b, &g).unwrap();
    assert_eq!(d.counts().0, 0);
    assert!(d.counts().1 >= 1);
    assert_eq!(d.delta, Delta::OnlyB);
}

#[test]
fn diff_simple_sentence_has_no_delta() {
    let s = toks("you swim");
    let a = Setup::new("ug-base", Config::Ug(ChannelConfig::Merged));
    let b = Setup::new("ug-base", Config::Ug(ChannelConfig::Channelized));
    let mut g = Grammars::new();
    g.load(Engine::Ug, "ug-base").unwrap();
    let d = diff_engines(&s, &a, &b, &g).unwrap();
    assert_eq!(d.counts(), (1, 1));
    assert_eq!(d.delta, Delta::Same);
    assert!(d.only_a.is_empty() && d.only_b.is_empty());
}

#[test]
fn diff_idiom_against_literal_reading() {
    let s = toks("john had her way");
    let poss = Setup::new("ug-poss", Config::Ug(ChannelConfig::Merged));
    let base = Setup::new("ug-base", Config::Ug(ChannelConfig::Merged));
    let mut g = Grammars::new();
    g.load(Engine::Ug, "ug-poss").unwrap();
    g.load(Engine::Ug, "ug-base").unwrap();
    let d = diff_engines(&s, &poss, &base, &g).unwrap();
    // counts agree with exhaustive enumeration on each fragment
    for (name, n) in [("ug-poss", d.counts().0), ("ug-base", d.counts().1)] {
        let want = UgOracle::new(&load_ug_grammar(name).unwrap(), ChannelConfig::Merged).enumerate(&s, 12);
        assert_eq!(n, want.len(), "{name}");
    }
    assert_eq!(d.counts().0, 0);
    assert!(d.counts().1 >= 1);
    assert_eq!(d.delta, Delta::OnlyB);
}
