//! Argument-structure features: proposition n-gram frequencies, support-link
//! n-gram frequencies, and graph motif indicators, assembled into one
//! fixed-order feature vector per utterance.
//!
//! Ordering contract for the assembled vector: unigram frequencies, then
//! bigrams, then trigrams, then link bigrams, then the five graph indicators
//! (basic, regular convergent, regular divergent, multi convergent, multi
//! divergent). Under the default vocabulary the vector is 32-dimensional
//! (5 + 8 + 10 + 4 + 5).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Debate, PropositionType, Utterance};
use crate::error::{Error, Result};

use PropositionType::{Fact, Policy, Reference, Testimony, Value};

/// n-gram window size over the proposition sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgramOrder {
    Unigram,
    Bigram,
    Trigram,
}

impl NgramOrder {
    pub fn window(self) -> usize {
        match self {
            NgramOrder::Unigram => 1,
            NgramOrder::Bigram => 2,
            NgramOrder::Trigram => 3,
        }
    }
}

/// The retained n-gram inventory. Slot order of every feature vector is the
/// order of these lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub unigrams: Vec<PropositionType>,
    pub bigrams: Vec<[PropositionType; 2]>,
    pub trigrams: Vec<[PropositionType; 3]>,
    pub link_bigrams: Vec<[PropositionType; 2]>,
}

impl Vocabulary {
    /// The default retained inventory: 5 unigrams, 8 bigrams, 10 trigrams,
    /// and 4 link bigrams, for a 32-dimensional assembled vector.
    pub fn default_inventory() -> Self {
        Vocabulary {
            unigrams: vec![Policy, Value, Fact, Testimony, Reference],
            bigrams: vec![
                [Value, Value],
                [Testimony, Value],
                [Value, Testimony],
                [Value, Policy],
                [Policy, Value],
                [Fact, Value],
                [Value, Fact],
                [Testimony, Testimony],
            ],
            trigrams: vec![
                [Value, Value, Value],
                [Testimony, Value, Value],
                [Value, Value, Policy],
                [Value, Value, Testimony],
                [Value, Testimony, Value],
                [Fact, Value, Value],
                [Policy, Value, Value],
                [Value, Fact, Value],
                [Value, Policy, Value],
                [Value, Value, Fact],
            ],
            link_bigrams: vec![
                [Value, Value],
                [Value, Policy],
                [Fact, Value],
                [Testimony, Value],
            ],
        }
    }

    /// Total assembled feature length: all n-gram slots plus the five graph
    /// indicators.
    pub fn feature_len(&self) -> usize {
        self.unigrams.len()
            + self.bigrams.len()
            + self.trigrams.len()
            + self.link_bigrams.len()
            + MOTIF_NAMES.len()
    }

    /// Offsets of the five slot groups within the assembled vector:
    /// (unigram, bigram, trigram, link, graph).
    pub fn group_offsets(&self) -> (usize, usize, usize, usize, usize) {
        let uni = 0;
        let bi = uni + self.unigrams.len();
        let tri = bi + self.bigrams.len();
        let link = tri + self.trigrams.len();
        let graph = link + self.link_bigrams.len();
        (uni, bi, tri, link, graph)
    }

    /// One name per assembled slot, e.g. `uni_policy`, `bi_value_value`,
    /// `tri_value_testimony_value`, `link_fact_value`, `graph_basic`.
    pub fn slot_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.feature_len());
        for t in &self.unigrams {
            names.push(format!("uni_{t}"));
        }
        for [a, b] in &self.bigrams {
            names.push(format!("bi_{a}_{b}"));
        }
        for [a, b, c] in &self.trigrams {
            names.push(format!("tri_{a}_{b}_{c}"));
        }
        for [a, b] in &self.link_bigrams {
            names.push(format!("link_{a}_{b}"));
        }
        for m in MOTIF_NAMES {
            names.push(format!("graph_{m}"));
        }
        names
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary::default_inventory()
    }
}

/// Graph indicator names, in slot order.
pub const MOTIF_NAMES: [&str; 5] = [
    "basic",
    "regular_convergent",
    "regular_divergent",
    "multi_convergent",
    "multi_divergent",
];

/// Assembled per-utterance feature vector. All n-gram entries lie in [0, 1];
/// graph indicator entries are 0 or 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Frequencies of in-vocabulary proposition n-grams: count of each n-gram
/// divided by the total number of windows (`len - n + 1`). Sequences shorter
/// than `n` yield all zeros. Out-of-vocabulary n-grams count toward the
/// denominator but have no output slot.
pub fn proposition_ngram_freq(
    prop_types: &[PropositionType],
    order: NgramOrder,
    vocab: &Vocabulary,
) -> Vec<f64> {
    let n = order.window();
    match order {
        NgramOrder::Unigram => {
            ngram_freq_over(prop_types, n, &vocab.unigrams, |w| w[0])
        }
        NgramOrder::Bigram => {
            ngram_freq_over(prop_types, n, &vocab.bigrams, |w| [w[0], w[1]])
        }
        NgramOrder::Trigram => {
            ngram_freq_over(prop_types, n, &vocab.trigrams, |w| [w[0], w[1], w[2]])
        }
    }
}

fn ngram_freq_over<K: Ord + Copy>(
    prop_types: &[PropositionType],
    n: usize,
    slots: &[K],
    key: impl Fn(&[PropositionType]) -> K,
) -> Vec<f64> {
    let mut out = vec![0.0; slots.len()];
    if prop_types.len() < n {
        return out;
    }
    let index: BTreeMap<K, usize> = slots.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let total = (prop_types.len() - n + 1) as f64;
    for window in prop_types.windows(n) {
        if let Some(&slot) = index.get(&key(window)) {
            out[slot] += 1.0;
        }
    }
    for v in &mut out {
        *v /= total;
    }
    out
}

/// Frequencies of in-vocabulary link bigrams: each support edge `a -> b`
/// yields the pair `(type(a), type(b))`; each pair's value is its count over
/// the total edge count. No edges yields all zeros. Edges touching an
/// out-of-range index are skipped.
pub fn link_bigram_freq(u: &Utterance, vocab: &Vocabulary) -> Vec<f64> {
    let mut out = vec![0.0; vocab.link_bigrams.len()];
    if u.edges.is_empty() {
        return out;
    }
    let index: BTreeMap<[PropositionType; 2], usize> = vocab
        .link_bigrams
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, i))
        .collect();
    let total = u.edges.len() as f64;
    for e in &u.edges {
        if e.src >= u.prop_types.len() || e.dst >= u.prop_types.len() {
            continue;
        }
        let pair = [u.prop_types[e.src], u.prop_types[e.dst]];
        if let Some(&slot) = index.get(&pair) {
            out[slot] += 1.0;
        }
    }
    for v in &mut out {
        *v /= total;
    }
    out
}

fn degree_tables(u: &Utterance) -> (Vec<usize>, Vec<usize>) {
    let n = u.sentences.len();
    let mut din = vec![0usize; n];
    let mut dout = vec![0usize; n];
    for e in &u.edges {
        if e.src < n && e.dst < n && e.src != e.dst {
            dout[e.src] += 1;
            din[e.dst] += 1;
        }
    }
    (din, dout)
}

/// Binary indicators for the five argument-graph motifs, in slot order
/// [basic, regular convergent, regular divergent, multi convergent, multi
/// divergent]:
///
/// - basic: some edge `a -> b` with out-degree(a) = 1 and in-degree(b) = 1;
/// - regular convergent: some node with in-degree exactly 2;
/// - regular divergent: some node with out-degree exactly 2;
/// - multi convergent: some node with in-degree above 2;
/// - multi divergent: some node with out-degree above 2.
pub fn graph_motif_indicators(u: &Utterance) -> [f64; 5] {
    let (din, dout) = degree_tables(u);
    let n = u.sentences.len();

    let basic = u.edges.iter().any(|e| {
        e.src < n && e.dst < n && e.src != e.dst && dout[e.src] == 1 && din[e.dst] == 1
    });
    let regular_convergent = din.iter().any(|&d| d == 2);
    let regular_divergent = dout.iter().any(|&d| d == 2);
    let multi_convergent = din.iter().any(|&d| d > 2);
    let multi_divergent = dout.iter().any(|&d| d > 2);

    [
        basic as u8 as f64,
        regular_convergent as u8 as f64,
        regular_divergent as u8 as f64,
        multi_convergent as u8 as f64,
        multi_divergent as u8 as f64,
    ]
}

/// Occurrence counts behind the motif indicators, plus the two structures
/// that stay out of the assembled vector: serial chains, and linked
/// arguments, which an edge list cannot tell apart from convergent ones and
/// which are therefore reported under the convergent counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MotifDiagnostics {
    /// Edges a -> b with out-degree(a) = 1 and in-degree(b) = 1.
    pub basic_edges: usize,
    /// Nodes with in-degree exactly 2 (also covers linked arguments).
    pub regular_convergent_nodes: usize,
    /// Nodes with out-degree exactly 2.
    pub regular_divergent_nodes: usize,
    /// Nodes with in-degree above 2 (also covers linked arguments).
    pub multi_convergent_nodes: usize,
    /// Nodes with out-degree above 2.
    pub multi_divergent_nodes: usize,
    /// Midpoints of serial chains: nodes with both an incoming and an
    /// outgoing edge.
    pub serial_midpoints: usize,
}

pub fn motif_diagnostics(u: &Utterance) -> MotifDiagnostics {
    let (din, dout) = degree_tables(u);
    let n = u.sentences.len();
    MotifDiagnostics {
        basic_edges: u
            .edges
            .iter()
            .filter(|e| {
                e.src < n && e.dst < n && e.src != e.dst && dout[e.src] == 1 && din[e.dst] == 1
            })
            .count(),
        regular_convergent_nodes: din.iter().filter(|&&d| d == 2).count(),
        regular_divergent_nodes: dout.iter().filter(|&&d| d == 2).count(),
        multi_convergent_nodes: din.iter().filter(|&&d| d > 2).count(),
        multi_divergent_nodes: dout.iter().filter(|&&d| d > 2).count(),
        serial_midpoints: (0..n).filter(|&v| din[v] > 0 && dout[v] > 0).count(),
    }
}

/// Build a vocabulary from a training corpus: an n-gram is retained iff it
/// occurs in at least `threshold` of the training debates (counting a debate
/// once if the n-gram appears in any utterance of either side). All five
/// unigrams are always retained. Lists are ordered by descending document
/// frequency, ties broken lexicographically on type names.
pub fn build_vocabulary(training: &[Debate], threshold: f64) -> Result<Vocabulary> {
    if training.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if !(0.0..=1.0).contains(&threshold) || threshold.is_nan() {
        return Err(Error::InvalidThreshold(threshold));
    }

    let mut uni: BTreeMap<[PropositionType; 1], usize> = BTreeMap::new();
    let mut bi: BTreeMap<[PropositionType; 2], usize> = BTreeMap::new();
    let mut tri: BTreeMap<[PropositionType; 3], usize> = BTreeMap::new();
    let mut link: BTreeMap<[PropositionType; 2], usize> = BTreeMap::new();

    for d in training {
        let mut d_uni = std::collections::BTreeSet::new();
        let mut d_bi = std::collections::BTreeSet::new();
        let mut d_tri = std::collections::BTreeSet::new();
        let mut d_link = std::collections::BTreeSet::new();
        for (_, _, u) in d.utterances() {
            for w in u.prop_types.windows(1) {
                d_uni.insert([w[0]]);
            }
            for w in u.prop_types.windows(2) {
                d_bi.insert([w[0], w[1]]);
            }
            for w in u.prop_types.windows(3) {
                d_tri.insert([w[0], w[1], w[2]]);
            }
            for e in &u.edges {
                if e.src < u.prop_types.len() && e.dst < u.prop_types.len() {
                    d_link.insert([u.prop_types[e.src], u.prop_types[e.dst]]);
                }
            }
        }
        for k in d_uni {
            *uni.entry(k).or_default() += 1;
        }
        for k in d_bi {
            *bi.entry(k).or_default() += 1;
        }
        for k in d_tri {
            *tri.entry(k).or_default() += 1;
        }
        for k in d_link {
            *link.entry(k).or_default() += 1;
        }
    }

    let n = training.len() as f64;

    fn name_key<const N: usize>(gram: &[PropositionType; N]) -> Vec<&'static str> {
        gram.iter().map(|t| t.name()).collect()
    }

    fn retain<const N: usize>(
        counts: BTreeMap<[PropositionType; N], usize>,
        n: f64,
        threshold: f64,
    ) -> Vec<[PropositionType; N]> {
        let mut kept: Vec<_> = counts
            .into_iter()
            .filter(|&(_, c)| c as f64 / n >= threshold)
            .collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| name_key(&a.0).cmp(&name_key(&b.0))));
        kept.into_iter().map(|(k, _)| k).collect()
    }

    // Unigrams ignore the threshold but share the ordering rule; unseen
    // types have document frequency zero.
    let mut uni_all: Vec<([PropositionType; 1], usize)> = PropositionType::ALL
        .iter()
        .map(|&t| ([t], uni.get(&[t]).copied().unwrap_or(0)))
        .collect();
    uni_all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| name_key(&a.0).cmp(&name_key(&b.0))));

    Ok(Vocabulary {
        unigrams: uni_all.into_iter().map(|([t], _)| t).collect(),
        bigrams: retain(bi, n, threshold),
        trigrams: retain(tri, n, threshold),
        link_bigrams: retain(link, n, threshold),
    })
}

/// Concatenate all feature groups for one utterance, in the fixed slot
/// order. Deterministic.
pub fn assemble_features(u: &Utterance, vocab: &Vocabulary) -> FeatureVector {
    let mut values = Vec::with_capacity(vocab.feature_len());
    values.extend(proposition_ngram_freq(&u.prop_types, NgramOrder::Unigram, vocab));
    values.extend(proposition_ngram_freq(&u.prop_types, NgramOrder::Bigram, vocab));
    values.extend(proposition_ngram_freq(&u.prop_types, NgramOrder::Trigram, vocab));
    values.extend(link_bigram_freq(u, vocab));
    values.extend(graph_motif_indicators(u));
    FeatureVector(values)
}
