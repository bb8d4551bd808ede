//! Acceptance checks. Prints one line per criterion and exits non-zero if
//! any of them fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::fsgen::{oracle, sample, Sample};
use common::{key_of, toks, UgOracle};
use grambench::corpus::{export_report, run_corpus, Config, Corpus, Engine, Grammars, RunReport};
use grambench::dsl::{load_tag_grammar, load_ug_grammar};
use grambench::fs::{fs_subsumes, fs_unify};
use grambench::tag::{
    brute_force_derive, finalize, tag_parse, DerivNode, FinalizeError, GornAddress, OpKind, TagConfig, TagParser,
    TreeInstance,
};
use grambench::ug::{arcs_cross, check_ncd, ug_parse, ChannelConfig, UGParse};
use proptest::test_runner::{Config as RunnerConfig, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_bundled() -> Result<RunReport, String> {
    let c = Corpus::bundled();
    let g = Grammars::for_corpus(&c).map_err(|e| e.to_string())?;
    run_corpus(&c, &[], &g).map_err(|e| e.to_string())
}

fn judgments() -> Check {
    let c = Corpus::bundled();
    let r = run_bundled()?;
    let failing: Vec<&str> = r.outcomes.iter().filter(|o| !o.passed).map(|o| o.id.as_str()).collect();
    ensure(failing.is_empty(), || format!("failing entries: {failing:?}"))?;
    let required = [
        ("which lake did you swim in", "ug/ug-base/merged", true),
        ("which violin are these sonatas hard to play on", "ug/ug-base/merged", true),
        ("which sonatas is this violin hard to play on", "ug/ug-base/merged", false),
        ("which articles are men most fun to shop for with", "ug/ug-base/channelized", true),
        ("which articles are men most fun to shop with for", "ug/ug-base/channelized", true),
        ("john had his way", "tag/tag-base/baseline", true),
        ("he shook his pretty head", "tag/tag-base/baseline", true),
        ("she shrugged her powerful shoulders", "tag/tag-base/baseline", true),
        ("john had her way", "tag/tag-base/baseline", false),
        ("which lake did you swim in", "tag/tag-base/baseline", false),
        ("which lake did you swim in", "tag/tag-gap/gap-ext", true),
    ];
    for (s, setup, accept) in required {
        let found = c.entries.iter().any(|e| {
            e.sentence.join(" ") == s
                && e.setup.to_string() == setup
                && (e.expected == grambench::corpus::Expected::Accept) == accept
        });
        ensure(found, || format!("corpus lacks '{s}' on {setup}"))?;
    }
    let ex1 = c.entries.iter().find(|e| e.id == "ex1-ug-merged").ok_or("no ex1 entry")?;
    let want = ex1.expected_bindings.as_ref().ok_or("ex1 has no bindings")?;
    ensure(want.contains("which lake->6") && want.contains("did->4"), || format!("ex1 bindings {want:?}"))?;
    Ok(format!("{}/{} entries pass", r.passed, r.total()))
}

fn single_tree(name: &str) -> DerivNode {
    let mut d = DerivNode::leaf("alpha_intrans[swim]");
    d.attached.insert(GornAddress(vec![0]), (OpKind::Substitute, DerivNode::leaf("alpha_pron[you]")));
    let at = if name == "beta_did_inv" { GornAddress::root() } else { GornAddress(vec![1]) };
    d.attached.insert(at, (OpKind::Adjoin, DerivNode::leaf(name)));
    d
}

fn pairing() -> Check {
    let g = load_tag_grammar("tag-base").map_err(|e| e.to_string())?;
    let trees: BTreeMap<String, TreeInstance> = g.instances().into_iter().map(|i| (i.name.clone(), i)).collect();
    let look = |n: &str| trees.get(n).cloned();
    for t in ["beta_did_inv", "beta_vtrace"] {
        let derived = single_tree(t).derive(&look).map_err(|e| format!("{t}: {e:?}"))?;
        match finalize(&derived) {
            Err(e @ FinalizeError::Clash { .. }) => {
                let path = e.path().unwrap_or_default();
                ensure(path == ["displ_const"], || format!("{t} alone clashes at {path:?}"))?;
            }
            other => return Err(format!("{t} alone: {other:?}")),
        }
    }
    let mut checked = 0;
    let mut sentences: Vec<(String, TagConfig, String)> = Corpus::bundled()
        .entries
        .iter()
        .filter_map(|e| match e.setup.config {
            Config::Tag(c) => Some((e.setup.grammar.clone(), c, e.sentence.join(" "))),
            Config::Ug(_) => None,
        })
        .collect();
    sentences.push(("tag-base".into(), TagConfig::Baseline, "did john have his way".into()));
    sentences.push(("tag-base".into(), TagConfig::Baseline, "did you swim".into()));
    for (gname, c, s) in sentences {
        let g = load_tag_grammar(&gname).map_err(|e| e.to_string())?;
        for d in tag_parse(&g, &toks(&s), c).map_err(|e| e.to_string())? {
            let (a, b) = (d.uses_tree("beta_did_inv"), d.uses_tree("beta_vtrace"));
            ensure(a == b, || format!("'{s}' has an unpaired inversion tree"))?;
            if a {
                checked += 1;
            }
        }
    }
    ensure(checked > 0, || "no inverted derivation found".into())?;
    Ok(format!("single trees clash at displ_const; {checked} inverted derivations all paired"))
}

fn algebra() -> Check {
    const CASES: u32 = 1000;
    let mut runner = TestRunner::new_with_rng(
        RunnerConfig { cases: CASES, failure_persistence: None, ..RunnerConfig::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let strat = (sample(), sample(), sample());
    runner
        .run(&strat, |(a, b, c): (Sample, Sample, Sample)| {
            let u = |x: &Sample, y: &Sample| fs_unify(&x.fs, &y.fs).ok();
            proptest::prop_assert_eq!(fs_unify(&a.fs, &a.fs).ok(), Some(a.fs.clone()), "idempotence");
            proptest::prop_assert_eq!(u(&a, &b), u(&b, &a), "commutativity");
            let left = fs_unify(&a.fs, &b.fs).and_then(|ab| fs_unify(&ab, &c.fs)).ok();
            let right = fs_unify(&b.fs, &c.fs).and_then(|bc| fs_unify(&a.fs, &bc)).ok();
            proptest::prop_assert_eq!(left, right, "associativity");
            if let Some(ab) = u(&a, &b) {
                proptest::prop_assert!(fs_subsumes(&a.fs, &ab) && fs_subsumes(&b.fs, &ab), "monotonicity");
            }
            let got = u(&a, &b).map(|x| common::fsgen::canon_fs(&x));
            proptest::prop_assert_eq!(got, oracle(&a.norm, &b.norm), "graph oracle");
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{CASES} random triples; idempotence, commutativity, associativity, monotonicity hold"))
}

fn oracles() -> Check {
    let mut n = 0;
    let mut seen = BTreeSet::new();
    for e in Corpus::bundled().entries.iter().filter(|e| e.sentence.len() <= 8) {
        let s = e.tokens();
        if !seen.insert((e.setup.to_string(), e.sentence.clone())) {
            continue;
        }
        match e.setup.config {
            Config::Ug(c) => {
                let g = load_ug_grammar(&e.setup.grammar).map_err(|e| e.to_string())?;
                let got: BTreeSet<_> =
                    ug_parse(&g, &s, c).map_err(|e| e.to_string())?.iter().map(|p| key_of(&p.tree)).collect();
                let want = UgOracle::new(&g, c).enumerate(&s, 12);
                ensure(got == want, || format!("{}: ug parser {} vs enumerator {}", e.id, got.len(), want.len()))?;
            }
            Config::Tag(c) => {
                let g = load_tag_grammar(&e.setup.grammar).map_err(|e| e.to_string())?;
                let p = TagParser::new(&g, c);
                let got: BTreeSet<_> = p.parse(&s).map_err(|e| e.to_string())?.iter().map(|d| d.ops()).collect();
                let want: BTreeSet<_> = brute_force_derive(p.grammar(), &s, 10)
                    .map_err(|e| e.to_string())?
                    .iter()
                    .map(|d| d.ops())
                    .collect();
                ensure(got == want, || format!("{}: tag parser {} vs brute force {}", e.id, got.len(), want.len()))?;
            }
        }
        n += 1;
    }
    Ok(format!("{n} corpus sentences of at most 8 tokens agree with the reference enumerators"))
}

/// Parse counts on each config, and whether arcs on different channels cross.
fn ncd_one(gname: &str, s: &[&str]) -> Result<(usize, usize, bool), String> {
    let g = load_ug_grammar(gname).map_err(|e| e.to_string())?;
    let ps: Vec<UGParse> = ug_parse(&g, s, ChannelConfig::Merged).map_err(|e| e.to_string())?;
    for p in &ps {
        ensure(check_ncd(&p.bindings, ChannelConfig::Merged).is_pass(), || format!("merged crossing in {s:?}"))?;
    }
    let cs = ug_parse(&g, s, ChannelConfig::Channelized).map_err(|e| e.to_string())?;
    let mut crossing = false;
    for p in &cs {
        ensure(check_ncd(&p.bindings, ChannelConfig::Channelized).is_pass(), || {
            format!("same-channel crossing in {s:?}")
        })?;
        let b = &p.bindings;
        for (i, x) in b.iter().enumerate() {
            crossing |= b[i + 1..].iter().any(|y| x.channel != y.channel && arcs_cross(x, y));
        }
    }
    Ok((ps.len(), cs.len(), crossing))
}

fn ncd() -> Check {
    let (mut merged, mut channelized, mut corpus_crossing) = (0, 0, false);
    let mut check = |g: &str, s: &[&str], in_corpus: bool| -> Result<(), String> {
        let (m, c, x) = ncd_one(g, s)?;
        merged += m;
        channelized += c;
        corpus_crossing |= x && in_corpus;
        Ok(())
    };
    let mut corpus_sentences = BTreeSet::new();
    for e in Corpus::bundled().entries.iter().filter(|e| e.engine() == Engine::Ug) {
        corpus_sentences.insert((e.setup.grammar.clone(), e.sentence.join(" ")));
    }
    for (g, s) in &corpus_sentences {
        check(g, &toks(s), true)?;
    }
    let g = load_ug_grammar("ug-base").map_err(|e| e.to_string())?;
    let gen = UgOracle::new(&g, ChannelConfig::Merged);
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let mut random = 0;
    for _ in 0..2000 {
        if random == 50 {
            break;
        }
        if let Some(words) = gen.generate(&mut rng, 10, 10) {
            let s = words.join(" ");
            let n = ug_parse(&g, &toks(&s), ChannelConfig::Merged).map_err(|e| e.to_string())?.len();
            ensure(n > 0, || format!("generated '{s}' does not parse"))?;
            check("ug-base", &toks(&s), false)?;
            random += 1;
        }
    }
    ensure(random == 50, || format!("only {random} random sentences generated"))?;
    ensure(corpus_crossing, || "no cross-channel crossing in the corpus".into())?;
    Ok(format!(
        "{merged} merged and {channelized} channelized parses nested per list ({} corpus + {random} random sentences); cross-channel crossing seen",
        corpus_sentences.len()
    ))
}

fn determinism() -> Check {
    let a = run_bundled()?.without_timing();
    let b = run_bundled()?.without_timing();
    for f in ["text", "records"] {
        let (x, y) = (export_report(&a, f).map_err(|e| e.to_string())?, export_report(&b, f).map_err(|e| e.to_string())?);
        ensure(x == y, || format!("{f} exports differ"))?;
    }
    Ok("two corpus runs export identical reports".into())
}

fn main() {
    let checks: [Criterion; 6] = [
        ("corpus judgments", judgments),
        ("inversion pairing", pairing),
        ("unification algebra", algebra),
        ("oracle equivalence", oracles),
        ("no crossing dependencies", ncd),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {} ({name}): PASS: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
