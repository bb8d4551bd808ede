//! Unification grammar with subcat schemas and list-valued gap threading.
//!
//! Every category is compiled to `[head:H, gap:[CH:[in:L, out:L], ...]]`
//! with one entry per physical channel. A gap list element is
//! `[cat:C, head:H, idx:I]`; fillers prepend, traces pop the front.

mod grammar;
mod parse;
mod tree;

pub use grammar::{
    enable_possessive_percolation, expand_subcat_schema, ChannelConfig, ChannelDecl, CompiledGrammar, CompiledLex,
    CompiledRule, FillerIntro, PercolatedFeature, Percolation, PhysChannel, SchemaSlot, SchemaTemplate, UGCategory,
    UGLexEntry, UGRule, UgGrammar, FILLER_INDEX, OPT_POSSESSIVE,
};
pub use parse::UgParser;
pub(crate) use tree::tree_bindings;
pub use tree::{
    arcs_cross, check_ncd, extract_bindings, format_bindings, Binding, Bindings, FillerMark, GapState, NcdResult,
    NodeKind, ParseTree, UGParse,
};

use crate::fs::{Env, FeatureStructure, Fs, Subst};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UgError {
    #[error("unknown token '{word}' at position {position}")]
    UnknownToken { word: String, position: usize },
}

/// All complete parses, ordered by derivation string.
pub fn ug_parse(grammar: &UgGrammar, tokens: &[&str], config: ChannelConfig) -> Result<Vec<UGParse>, UgError> {
    UgParser::new(grammar, config).parse(tokens)
}

/// A pending filler on a gap list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapSpec {
    pub channel: String,
    pub filler_cat: String,
    pub filler_fs: FeatureStructure,
    pub index: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceProposal {
    pub gap: GapSpec,
    /// Slot head after unification with the filler.
    pub head: FeatureStructure,
    pub gaps_out: FeatureStructure,
}

/// Builds a gap list element.
pub fn gap_element(filler_cat: &str, filler_head: &FeatureStructure, index: &str) -> FeatureStructure {
    let mut s = Subst::new();
    let h = s.import(filler_head);
    s.snapshot(&Fs::avm([("cat", Fs::atom(filler_cat)), ("head", h), ("idx", Fs::atom(index))]))
}

/// A trace for a `slot_cat` slot with head constraints `slot_head`, popping
/// the front of `gaps_in`; `None` if the list is empty, the front filler has
/// another category, or its head clashes with the slot.
pub fn propose_trace(
    channel: &str,
    slot_cat: &str,
    slot_head: &FeatureStructure,
    gaps_in: &FeatureStructure,
) -> Option<TraceProposal> {
    let mut s = Subst::new();
    let head = s.fresh_var();
    let slot_head = s.import(slot_head);
    s.unify(&head, &slot_head).ok()?;
    let gin = s.import(gaps_in);
    let out = s.fresh_var();
    let slot = Fs::avm([
        ("head", head.clone()),
        ("gap", Fs::avm([(channel, Fs::avm([("in", gin.clone()), ("out", out.clone())]))])),
    ]);
    let (elems, _) = s.list_elems(&gin)?;
    let front = elems.first()?.clone();
    let index = parse::discharge(&mut s, &slot, slot_cat, channel, &[channel.to_string()])?;
    let fhead = s.get_path(&front, &["head"])?;
    Some(TraceProposal {
        gap: GapSpec { channel: channel.to_string(), filler_cat: slot_cat.to_string(), filler_fs: s.snapshot(&fhead), index },
        head: s.snapshot(&head),
        gaps_out: s.snapshot(&out),
    })
}
