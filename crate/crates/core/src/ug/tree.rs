use std::collections::BTreeMap;
use std::fmt::Write;

use super::ChannelConfig;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FillerMark {
    pub channel: String,
    pub index: String,
}

/// Filler indices on a node's gap lists for one channel, front first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GapState {
    pub channel: String,
    pub gaps_in: Vec<String>,
    pub gaps_out: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Phrase { rule: String, children: Vec<ParseTree> },
    Word(String),
    Trace { channel: String, index: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParseTree {
    pub cat: String,
    pub start: usize,
    pub end: usize,
    pub kind: NodeKind,
    pub filler: Option<FillerMark>,
    pub gaps: Vec<GapState>,
}

impl ParseTree {
    pub fn children(&self) -> &[ParseTree] {
        match &self.kind {
            NodeKind::Phrase { children, .. } => children,
            _ => &[],
        }
    }

    /// Overt words, left to right.
    pub fn words(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let NodeKind::Word(w) = &t.kind {
                out.push(w.as_str());
            }
        });
        out
    }

    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ParseTree)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Display numbers for filler indices, in order of filler position.
    fn numbering(&self) -> BTreeMap<String, usize> {
        let mut fillers = Vec::new();
        self.walk(&mut |t| {
            if let Some(m) = &t.filler {
                fillers.push((t.start, m.index.clone()));
            }
        });
        fillers.sort();
        fillers.into_iter().enumerate().map(|(i, (_, idx))| (idx, i + 1)).collect()
    }

    /// `[S [NP#1 [D which] [N lake]] ... [NP t#1]]`
    pub fn bracketed(&self) -> String {
        let nums = self.numbering();
        let mut out = String::new();
        self.bracket_into(&nums, false, &mut out);
        out
    }

    /// Like [`bracketed`](Self::bracketed) with rule names, used as the
    /// identity of a parse.
    pub fn derivation_string(&self) -> String {
        let nums = self.numbering();
        let mut out = String::new();
        self.bracket_into(&nums, true, &mut out);
        out
    }

    fn bracket_into(&self, nums: &BTreeMap<String, usize>, rules: bool, out: &mut String) {
        let num = |i: &str| nums.get(i).map(|n| n.to_string()).unwrap_or_else(|| i.to_string());
        out.push('[');
        out.push_str(&self.cat);
        if let Some(m) = &self.filler {
            let _ = write!(out, "#{}", num(&m.index));
        }
        match &self.kind {
            NodeKind::Word(w) => {
                out.push(' ');
                out.push_str(w);
            }
            NodeKind::Trace { index, .. } if index.is_empty() => out.push_str(" t"),
            NodeKind::Trace { index, .. } => {
                let _ = write!(out, " t#{}", num(index));
            }
            NodeKind::Phrase { rule, children } => {
                if rules {
                    let _ = write!(out, "/{rule}");
                }
                for c in children {
                    out.push(' ');
                    c.bracket_into(nums, rules, out);
                }
            }
        }
        out.push(']');
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binding {
    pub index: String,
    pub channel: String,
    pub filler_cat: String,
    pub filler_span: (usize, usize),
    pub filler_words: Vec<String>,
    /// Number of overt tokens before the trace.
    pub gap_pos: usize,
}

impl Binding {
    pub fn filler_text(&self) -> String {
        self.filler_words.join(" ")
    }
}

/// Bindings of one parse, ordered by filler position.
pub type Bindings = Vec<Binding>;

/// `which lake->6; did->4`, ordered by filler position.
pub fn format_bindings(b: &[Binding]) -> String {
    if b.is_empty() {
        return "-".to_string();
    }
    b.iter().map(|x| format!("{}->{}", x.filler_text(), x.gap_pos)).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UGParse {
    pub tree: ParseTree,
    pub bindings: Bindings,
}

/// Each filler matched with the position of its trace.
pub fn extract_bindings(parse: &UGParse) -> Bindings {
    tree_bindings(&parse.tree)
}

pub(crate) fn tree_bindings(tree: &ParseTree) -> Bindings {
    let mut fillers = Vec::new();
    let mut traces = BTreeMap::new();
    tree.walk(&mut |t| {
        if let Some(m) = &t.filler {
            fillers.push((t, m));
        }
        if let NodeKind::Trace { index, .. } = &t.kind {
            traces.insert(index.clone(), t.start);
        }
    });
    let mut out: Bindings = fillers
        .into_iter()
        .filter_map(|(t, m)| {
            Some(Binding {
                index: m.index.clone(),
                channel: m.channel.clone(),
                filler_cat: t.cat.clone(),
                filler_span: (t.start, t.end),
                filler_words: t.words().into_iter().map(str::to_string).collect(),
                gap_pos: *traces.get(&m.index)?,
            })
        })
        .collect();
    out.sort_by_key(|b| (b.filler_span, b.index.clone()));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NcdResult {
    Pass,
    /// The first pair of crossing arcs.
    Violation(Box<(Binding, Binding)>),
}

impl NcdResult {
    pub fn is_pass(&self) -> bool {
        matches!(self, NcdResult::Pass)
    }
}

fn arc(b: &Binding) -> (usize, usize) {
    let f = b.filler_span.0;
    (f.min(b.gap_pos), f.max(b.gap_pos))
}

pub fn arcs_cross(a: &Binding, b: &Binding) -> bool {
    let ((a1, a2), (b1, b2)) = (arc(a), arc(b));
    (a1 < b1 && b1 < a2 && a2 < b2) || (b1 < a1 && a1 < b2 && b2 < a2)
}

/// Crossing arcs are checked only between arcs that share a gap list under
/// `config`.
pub fn check_ncd(bindings: &[Binding], config: ChannelConfig) -> NcdResult {
    for (i, a) in bindings.iter().enumerate() {
        for b in &bindings[i + 1..] {
            if config.physical(&a.channel) == config.physical(&b.channel) && arcs_cross(a, b) {
                return NcdResult::Violation(Box::new((a.clone(), b.clone())));
            }
        }
    }
    NcdResult::Pass
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(ch: &str, start: usize, gap: usize) -> Binding {
        Binding {
            index: format!("f{start}"),
            channel: ch.into(),
            filler_cat: "NP".into(),
            filler_span: (start, start + 1),
            filler_words: vec![format!("w{start}")],
            gap_pos: gap,
        }
    }

    #[test]
    fn crossing_definition() {
        assert!(arcs_cross(&b("wh", 1, 4), &b("wh", 2, 5)));
        assert!(!arcs_cross(&b("wh", 1, 5), &b("wh", 2, 4)));
        assert!(!arcs_cross(&b("wh", 1, 2), &b("wh", 3, 4)));
    }

    #[test]
    fn ncd_per_config() {
        let arcs = vec![b("wh", 1, 4), b("tough", 2, 5)];
        assert!(matches!(check_ncd(&arcs, ChannelConfig::Merged), NcdResult::Violation(..)));
        assert_eq!(check_ncd(&arcs, ChannelConfig::Channelized), NcdResult::Pass);
        // verb movement never shares a list
        let arcs = vec![b("wh", 1, 4), b("vmove", 2, 5)];
        assert_eq!(check_ncd(&arcs, ChannelConfig::Merged), NcdResult::Pass);
        assert_eq!(check_ncd(&[], ChannelConfig::Merged), NcdResult::Pass);
    }

    #[test]
    fn bracket_numbers_fillers_by_position() {
        let leaf = |cat: &str, w: &str, i: usize| ParseTree {
            cat: cat.into(),
            start: i,
            end: i + 1,
            kind: NodeKind::Word(w.into()),
            filler: None,
            gaps: vec![],
        };
        let mut np = leaf("NP", "it", 0);
        np.filler = Some(FillerMark { channel: "wh".into(), index: "f0".into() });
        let t = ParseTree {
            cat: "S".into(),
            start: 0,
            end: 2,
            kind: NodeKind::Phrase {
                rule: "r".into(),
                children: vec![
                    np,
                    leaf("V", "go", 1),
                    ParseTree {
                        cat: "NP".into(),
                        start: 2,
                        end: 2,
                        kind: NodeKind::Trace { channel: "wh".into(), index: "f0".into() },
                        filler: None,
                        gaps: vec![],
                    },
                ],
            },
            filler: None,
            gaps: vec![],
        };
        assert_eq!(t.bracketed(), "[S [NP#1 it] [V go] [NP t#1]]");
        assert_eq!(t.derivation_string(), "[S/r [NP#1 it] [V go] [NP t#1]]");
        assert_eq!(format_bindings(&tree_bindings(&t)), "it->2");
    }
}
