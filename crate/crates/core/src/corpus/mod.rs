//! Debate data model, ingestion, preprocessing filters, and the fallback
//! text embedder.
//!
//! A corpus is a list of [`Debate`]s. Each debate holds temporally ordered
//! rounds of one PRO and one CON [`Utterance`], a vote record for the
//! "made more convincing arguments" criterion, and an optional forfeit
//! marker. Every utterance carries its sentences, one proposition type per
//! sentence, directed support edges between sentences, and an optional
//! precomputed text embedding.

mod embed;
mod parse;
mod validate;

pub use embed::{fallback_embed, DEFAULT_EMBED_DIM, DEFAULT_LAST_K};
pub use parse::{
    parse_corpus, parse_external_features, write_corpus, ExternalFeatures, LineError,
    ParsedCorpus, SchemaVersion,
};
pub use validate::{validate_graph, GraphFinding, ValidationReport};

use serde::{Deserialize, Serialize};

/// Semantic category of a sentence in an argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropositionType {
    /// Advocates a specific course of action.
    Policy,
    /// Subjective judgment.
    Value,
    /// Objective assertion.
    Fact,
    /// Personal experience of the debater.
    Testimony,
    /// Citation or quotation of a source.
    Reference,
}

impl PropositionType {
    /// All five variants, in canonical order.
    pub const ALL: [PropositionType; 5] = [
        PropositionType::Policy,
        PropositionType::Value,
        PropositionType::Fact,
        PropositionType::Testimony,
        PropositionType::Reference,
    ];

    /// Lowercase name, which is also the serialized form.
    pub fn name(self) -> &'static str {
        match self {
            PropositionType::Policy => "policy",
            PropositionType::Value => "value",
            PropositionType::Fact => "fact",
            PropositionType::Testimony => "testimony",
            PropositionType::Reference => "reference",
        }
    }
}

impl std::fmt::Display for PropositionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Directed support relation: sentence `src` supports sentence `dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct SupportEdge {
    pub src: usize,
    pub dst: usize,
}

impl SupportEdge {
    pub fn new(src: usize, dst: usize) -> Self {
        SupportEdge { src, dst }
    }
}

impl From<(usize, usize)> for SupportEdge {
    fn from((src, dst): (usize, usize)) -> Self {
        SupportEdge { src, dst }
    }
}

impl From<SupportEdge> for (usize, usize) {
    fn from(e: SupportEdge) -> Self {
        (e.src, e.dst)
    }
}

/// One side's turn in one round: sentences, their proposition types, the
/// support graph over sentence indices, and an optional text embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub sentences: Vec<String>,
    pub prop_types: Vec<PropositionType>,
    #[serde(default)]
    pub edges: Vec<SupportEdge>,
    #[serde(default)]
    pub embedding: Option<Vec<f64>>,
}

impl Utterance {
    pub fn new(sentences: Vec<String>, prop_types: Vec<PropositionType>) -> Self {
        Utterance {
            sentences,
            prop_types,
            edges: Vec::new(),
            embedding: None,
        }
    }

    /// Number of sentences.
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Debate side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Pro,
    Con,
}

impl Side {
    /// Class index used by the classifiers: PRO = 0, CON = 1.
    pub fn class_index(self) -> usize {
        match self {
            Side::Pro => 0,
            Side::Con => 1,
        }
    }

    pub fn from_class_index(idx: usize) -> Side {
        if idx == 0 {
            Side::Pro
        } else {
            Side::Con
        }
    }

    pub fn opponent(self) -> Side {
        match self {
            Side::Pro => Side::Con,
            Side::Con => Side::Pro,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Pro => "pro",
            Side::Con => "con",
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One round: the PRO utterance followed by the CON utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub pro: Utterance,
    pub con: Utterance,
}

/// A two-sided debate, the unit of prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Debate {
    pub id: String,
    pub topic: String,
    pub rounds: Vec<Round>,
    pub votes_pro: u32,
    pub votes_con: u32,
    #[serde(default)]
    pub forfeit: Option<Side>,
}

impl Debate {
    /// The side with strictly more "made more convincing arguments" votes,
    /// or `None` on a tie.
    pub fn winner(&self) -> Option<Side> {
        match self.votes_pro.cmp(&self.votes_con) {
            std::cmp::Ordering::Greater => Some(Side::Pro),
            std::cmp::Ordering::Less => Some(Side::Con),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Absolute vote difference.
    pub fn vote_margin(&self) -> u32 {
        self.votes_pro.abs_diff(self.votes_con)
    }

    /// Utterances in temporal order: pro then con within each round.
    pub fn utterances(&self) -> impl Iterator<Item = (usize, Side, &Utterance)> {
        self.rounds.iter().enumerate().flat_map(|(i, r)| {
            [(i, Side::Pro, &r.pro), (i, Side::Con, &r.con)]
        })
    }

    /// All utterances of one side, in round order.
    pub fn side_utterances(&self, side: Side) -> impl Iterator<Item = &Utterance> {
        self.rounds.iter().map(move |r| match side {
            Side::Pro => &r.pro,
            Side::Con => &r.con,
        })
    }

    /// Sentence count of the longest utterance in the debate.
    pub fn max_utterance_len(&self) -> usize {
        self.utterances().map(|(_, _, u)| u.len()).max().unwrap_or(0)
    }
}

/// Per-rule bookkeeping for [`filter_debates_with_stats`]. A debate that
/// violates several rules is counted once under each rule it violates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FilterStats {
    pub input: usize,
    pub kept: usize,
    pub dropped_margin: usize,
    pub dropped_length: usize,
    pub dropped_forfeit: usize,
}

/// Preprocessing filter: keep debates with a decisive vote margin, no
/// over-long utterance, and (optionally) no forfeit. Order-preserving and
/// idempotent.
pub fn filter_debates(
    debates: &[Debate],
    min_margin: u32,
    max_sentences: usize,
    drop_forfeits: bool,
) -> Vec<Debate> {
    filter_debates_with_stats(debates, min_margin, max_sentences, drop_forfeits).0
}

/// Same filter, also reporting how many debates each rule removed.
pub fn filter_debates_with_stats(
    debates: &[Debate],
    min_margin: u32,
    max_sentences: usize,
    drop_forfeits: bool,
) -> (Vec<Debate>, FilterStats) {
    let mut stats = FilterStats {
        input: debates.len(),
        ..FilterStats::default()
    };
    let mut kept = Vec::new();
    for d in debates {
        let margin_ok = d.vote_margin() >= min_margin;
        let length_ok = d.max_utterance_len() <= max_sentences;
        let forfeit_ok = !drop_forfeits || d.forfeit.is_none();
        if !margin_ok {
            stats.dropped_margin += 1;
        }
        if !length_ok {
            stats.dropped_length += 1;
        }
        if !forfeit_ok {
            stats.dropped_forfeit += 1;
        }
        if margin_ok && length_ok && forfeit_ok {
            kept.push(d.clone());
        }
    }
    stats.kept = kept.len();
    (kept, stats)
}

/// Default minimum vote margin: ties and one-vote margins are eliminated.
pub const DEFAULT_MIN_MARGIN: u32 = 2;
/// Default cap on sentences per utterance (one round, one side).
pub const DEFAULT_MAX_SENTENCES: usize = 40;
