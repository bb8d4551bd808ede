//! Command-line front end. Exit codes: 0 success, 1 no parse / failing
//! entries / clash, 2 usage or load errors.

use std::io::Write;

use clap::{Parser, Subcommand};

use crate::corpus::{
    diff_engines, export_report, load_corpus, run_corpus, Config, Corpus, Delta, Engine, Grammars, Setup,
};
use crate::dsl::{load_tag_grammar, load_ug_grammar, print_tag_tree};
use crate::fs::{fs_parse, fs_print, fs_unify};
use crate::tag::{TagConfig, TagParser};
use crate::ug::{format_bindings, UgParser};

#[derive(Parser, Debug)]
#[command(name = "grambench", version, about = "Unification grammar and TAG workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a sentence and print trees, bindings and (for TAG) derivations.
    Parse {
        #[arg(long)]
        engine: String,
        /// Bundled fragment name or path to a grammar file.
        #[arg(long)]
        grammar: String,
        /// merged|channelized (ug), baseline|gap-ext (tag).
        #[arg(long)]
        config: Option<String>,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(required = true)]
        sentence: Vec<String>,
    },
    /// Run a judgment corpus (the bundled one by default).
    Corpus {
        path: Option<String>,
        /// Only run entries for this engine.
        #[arg(long)]
        engine: Option<String>,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Unify two AVMs written as text.
    Unify { a: String, b: String },
    /// Print an elementary tree with its feature structures.
    ShowTree {
        name: String,
        #[arg(long, default_value = "tag-base")]
        grammar: String,
        #[arg(long, default_value = "baseline")]
        config: String,
    },
    /// Compare one sentence under two setups written engine/grammar/config.
    Diff {
        a: String,
        b: String,
        #[arg(required = true)]
        sentence: Vec<String>,
    },
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let r = match cli.command {
        Command::Parse { engine, grammar, config, format, sentence } => {
            parse(&engine, &grammar, config.as_deref(), &format, &sentence, out)
        }
        Command::Corpus { path, engine, format } => corpus(path.as_deref(), engine.as_deref(), &format, out),
        Command::Unify { a, b } => unify(&a, &b, out),
        Command::ShowTree { name, grammar, config } => show_tree(&name, &grammar, &config, out),
        Command::Diff { a, b, sentence } => diff(&a, &b, &sentence, out),
    };
    match r {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

type CmdResult = Result<i32, String>;

fn io(e: std::io::Error) -> String {
    e.to_string()
}

fn tokens(sentence: &[String]) -> Vec<&str> {
    sentence.iter().flat_map(|s| s.split_whitespace()).collect()
}

fn check_format(f: &str) -> Result<(), String> {
    match f {
        "text" | "records" => Ok(()),
        _ => Err(format!("unknown format '{f}' (expected text or records)")),
    }
}

fn parse(engine: &str, grammar: &str, config: Option<&str>, format: &str, sentence: &[String], out: &mut dyn Write) -> CmdResult {
    check_format(format)?;
    let engine: Engine = engine.parse()?;
    let config = match config {
        Some(c) => Config::parse_for(engine, c)?,
        None => Config::default_for(engine),
    };
    let toks = tokens(sentence);
    if toks.is_empty() {
        return Err("empty sentence".into());
    }
    // tree, bindings, derivation ops
    let parses: Vec<(String, String, Option<String>)> = match config {
        Config::Ug(c) => {
            let g = load_ug_grammar(grammar).map_err(|e| e.to_string())?;
            let ps = UgParser::new(&g, c).parse(&toks).map_err(|e| e.to_string())?;
            ps.iter().map(|p| (p.tree.bracketed(), format_bindings(&p.bindings), None)).collect()
        }
        Config::Tag(c) => {
            let g = load_tag_grammar(grammar).map_err(|e| e.to_string())?;
            let ds = TagParser::new(&g, c).parse(&toks).map_err(|e| e.to_string())?;
            ds.iter()
                .map(|d| (d.tree.bracketed(), format_bindings(&d.bindings), Some(d.ops().join(" "))))
                .collect()
        }
    };
    for (i, (tree, b, ops)) in parses.iter().enumerate() {
        if format == "records" {
            write!(out, "{}\t{tree}\t{b}", i + 1).map_err(io)?;
            if let Some(o) = ops {
                write!(out, "\t{}", if o.is_empty() { "-" } else { o }).map_err(io)?;
            }
            writeln!(out).map_err(io)?;
        } else {
            writeln!(out, "parse {}: {tree}", i + 1).map_err(io)?;
            writeln!(out, "  bindings: {b}").map_err(io)?;
            if let Some(o) = ops {
                writeln!(out, "  derivation: {}", if o.is_empty() { "(no operations)" } else { o }).map_err(io)?;
            }
        }
    }
    if format == "text" {
        let n = parses.len();
        writeln!(out, "{n} parse{}", if n == 1 { "" } else { "s" }).map_err(io)?;
    }
    Ok(if parses.is_empty() { 1 } else { 0 })
}

fn corpus(path: Option<&str>, engine: Option<&str>, format: &str, out: &mut dyn Write) -> CmdResult {
    check_format(format)?;
    let c = match path {
        Some(p) => load_corpus(p).map_err(|e| e.to_string())?,
        None => Corpus::bundled(),
    };
    let engines: Vec<Engine> = engine.map(str::parse).transpose()?.into_iter().collect();
    let g = Grammars::for_corpus(&c).map_err(|e| e.to_string())?;
    let r = run_corpus(&c, &engines, &g).map_err(|e| e.to_string())?;
    let doc = export_report(&r, format).map_err(|e| e.to_string())?;
    write!(out, "{doc}").map_err(io)?;
    Ok(if r.all_passed() { 0 } else { 1 })
}

fn unify(a: &str, b: &str, out: &mut dyn Write) -> CmdResult {
    let fa = fs_parse(a).map_err(|e| format!("first AVM: {e}"))?;
    let fb = fs_parse(b).map_err(|e| format!("second AVM: {e}"))?;
    match fs_unify(&fa, &fb) {
        Ok(u) => {
            writeln!(out, "{}", fs_print(&u)).map_err(io)?;
            Ok(0)
        }
        Err(c) => {
            writeln!(out, "{c}").map_err(io)?;
            Ok(1)
        }
    }
}

fn show_tree(name: &str, grammar: &str, config: &str, out: &mut dyn Write) -> CmdResult {
    let config: TagConfig = config.parse()?;
    let g = load_tag_grammar(grammar).map_err(|e| e.to_string())?;
    let p = TagParser::new(&g, config);
    let t = p.grammar().tree(name).ok_or_else(|| format!("no tree named '{name}' in {grammar}"))?;
    write!(out, "{}", print_tag_tree(t)).map_err(io)?;
    Ok(0)
}

fn diff(a: &str, b: &str, sentence: &[String], out: &mut dyn Write) -> CmdResult {
    let sa: Setup = a.parse()?;
    let sb: Setup = b.parse()?;
    let mut g = Grammars::new();
    for s in [&sa, &sb] {
        g.load(s.engine(), &s.grammar).map_err(|e| e.to_string())?;
    }
    let d = diff_engines(&tokens(sentence), &sa, &sb, &g).map_err(|e| e.to_string())?;
    for (s, r) in [&d.a, &d.b] {
        write!(out, "{s}: {} parses", r.parses).map_err(io)?;
        if let Some(e) = &r.error {
            write!(out, " ({e})").map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    let delta = match d.delta {
        Delta::Same => "no accept/reject difference".to_string(),
        Delta::OnlyA => format!("accepted only by {sa}"),
        Delta::OnlyB => format!("accepted only by {sb}"),
    };
    writeln!(out, "{delta}").map_err(io)?;
    for (s, only) in [(&sa, &d.only_a), (&sb, &d.only_b)] {
        for set in only {
            let b = if set.is_empty() { "-".to_string() } else { set.iter().cloned().collect::<Vec<_>>().join("; ") };
            writeln!(out, "bindings only under {s}: {b}").map_err(io)?;
        }
    }
    Ok(0)
}
