//! Seeded generator of synthetic labeled debates with planted persuasion
//! signals, for end-to-end validation without a real corpus.
//!
//! The default plant makes winners testimony-heavy and divergent-argument
//! prone, with facts supporting values more often, while losers lean on
//! policy propositions. `signal_strength` interpolates every side-dependent
//! parameter toward the winner/loser average: at 0 the two sides are
//! statistically identical and nothing is learnable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Debate, PropositionType, Round, Side, SupportEdge, Utterance};
use crate::error::{Error, Result};

/// Proposition-type probabilities in canonical order
/// [policy, value, fact, testimony, reference].
pub type TypeDist = [f64; 5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantConfig {
    pub n_debates: usize,
    pub rounds_min: usize,
    pub rounds_max: usize,
    pub sentences_min: usize,
    pub sentences_max: usize,
    pub winner_type_dist: TypeDist,
    pub loser_type_dist: TypeDist,
    /// Probability of a consecutive-sentence support edge, per adjacent pair.
    pub base_link_prob: f64,
    /// Probability that each FACT sentence supports some VALUE sentence.
    pub winner_fact_value_prob: f64,
    pub loser_fact_value_prob: f64,
    /// Probability of planting one divergent argument per utterance.
    pub winner_divergent_prob: f64,
    pub loser_divergent_prob: f64,
    /// 0 = winner and loser indistinguishable, 1 = full planted contrast.
    pub signal_strength: f64,
    pub seed: u64,
}

impl Default for PlantConfig {
    fn default() -> Self {
        PlantConfig {
            n_debates: 500,
            rounds_min: 2,
            rounds_max: 3,
            sentences_min: 3,
            sentences_max: 6,
            winner_type_dist: [0.06, 0.34, 0.16, 0.38, 0.06],
            loser_type_dist: [0.38, 0.34, 0.16, 0.06, 0.06],
            base_link_prob: 0.25,
            winner_fact_value_prob: 0.75,
            loser_fact_value_prob: 0.20,
            winner_divergent_prob: 0.55,
            loser_divergent_prob: 0.18,
            signal_strength: 1.0,
            seed: 42,
        }
    }
}

impl PlantConfig {
    pub fn validate(&self) -> Result<()> {
        let sums_to_one = |d: &TypeDist| (d.iter().sum::<f64>() - 1.0).abs() < 1e-9;
        if !sums_to_one(&self.winner_type_dist) || !sums_to_one(&self.loser_type_dist) {
            return Err(Error::InvalidConfig(
                "proposition-type distributions must sum to 1".into(),
            ));
        }
        if self
            .winner_type_dist
            .iter()
            .chain(self.loser_type_dist.iter())
            .any(|&p| p < 0.0)
        {
            return Err(Error::InvalidConfig("negative type probability".into()));
        }
        if self.rounds_min < 1 || self.rounds_min > self.rounds_max {
            return Err(Error::InvalidConfig("empty rounds range".into()));
        }
        if self.sentences_min < 1 || self.sentences_min > self.sentences_max {
            return Err(Error::InvalidConfig("empty sentences range".into()));
        }
        if !(0.0..=1.0).contains(&self.signal_strength) {
            return Err(Error::InvalidConfig(format!(
                "signal strength {} outside [0, 1]",
                self.signal_strength
            )));
        }
        for p in [
            self.base_link_prob,
            self.winner_fact_value_prob,
            self.loser_fact_value_prob,
            self.winner_divergent_prob,
            self.loser_divergent_prob,
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Effective per-side generation parameters after signal interpolation.
struct SideParams {
    type_dist: TypeDist,
    fact_value_prob: f64,
    divergent_prob: f64,
}

fn interpolate(side: f64, other: f64, strength: f64) -> f64 {
    let common = 0.5 * (side + other);
    common + strength * (side - common)
}

fn side_params(cfg: &PlantConfig, winning: bool) -> SideParams {
    let s = cfg.signal_strength;
    let (own_dist, other_dist) = if winning {
        (&cfg.winner_type_dist, &cfg.loser_type_dist)
    } else {
        (&cfg.loser_type_dist, &cfg.winner_type_dist)
    };
    let mut type_dist = [0.0; 5];
    for i in 0..5 {
        type_dist[i] = interpolate(own_dist[i], other_dist[i], s);
    }
    let (own_fv, other_fv, own_div, other_div) = if winning {
        (
            cfg.winner_fact_value_prob,
            cfg.loser_fact_value_prob,
            cfg.winner_divergent_prob,
            cfg.loser_divergent_prob,
        )
    } else {
        (
            cfg.loser_fact_value_prob,
            cfg.winner_fact_value_prob,
            cfg.loser_divergent_prob,
            cfg.winner_divergent_prob,
        )
    };
    SideParams {
        type_dist,
        fact_value_prob: interpolate(own_fv, other_fv, s),
        divergent_prob: interpolate(own_div, other_div, s),
    }
}

fn sample_type(dist: &TypeDist, rng: &mut impl Rng) -> PropositionType {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return PropositionType::ALL[i];
        }
    }
    PropositionType::Reference
}

/// Word pools keyed to each proposition type, so the hashing text embedder
/// sees a type-correlated signal.
fn type_words(t: PropositionType) -> &'static [&'static str] {
    match t {
        PropositionType::Policy => &[
            "should", "must", "propose", "ban", "mandate", "law", "enact", "require",
        ],
        PropositionType::Value => &[
            "good", "bad", "wrong", "better", "fair", "unjust", "worth", "matters",
        ],
        PropositionType::Fact => &[
            "data", "study", "evidence", "rate", "measured", "percent", "record", "shows",
        ],
        PropositionType::Testimony => &[
            "personally", "experience", "remember", "lived", "saw", "felt", "myself", "once",
        ],
        PropositionType::Reference => &[
            "according", "source", "cited", "quote", "report", "article", "author", "states",
        ],
    }
}

const FILLER_WORDS: [&str; 8] = ["the", "a", "is", "it", "and", "to", "of", "that"];

const TOPICS: [&str; 8] = [
    "school uniforms",
    "space exploration funding",
    "four day work week",
    "plastic bag bans",
    "mandatory voting",
    "homework in primary school",
    "public transit fares",
    "video game ratings",
];

fn synth_sentence(t: PropositionType, rng: &mut impl Rng) -> String {
    let pool = type_words(t);
    let words = rng.gen_range(4..=8usize);
    let mut s = Vec::with_capacity(words);
    for _ in 0..words {
        if rng.gen_bool(0.7) {
            s.push(pool[rng.gen_range(0..pool.len())]);
        } else {
            s.push(FILLER_WORDS[rng.gen_range(0..FILLER_WORDS.len())]);
        }
    }
    s.join(" ")
}

fn synth_utterance(cfg: &PlantConfig, params: &SideParams, rng: &mut impl Rng) -> Utterance {
    let n = rng.gen_range(cfg.sentences_min..=cfg.sentences_max);
    let types: Vec<PropositionType> = (0..n).map(|_| sample_type(&params.type_dist, rng)).collect();
    let sentences: Vec<String> = types.iter().map(|&t| synth_sentence(t, rng)).collect();

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut push = |edges: &mut Vec<(usize, usize)>, src: usize, dst: usize| {
        if src != dst && seen.insert((src, dst)) {
            edges.push((src, dst));
        }
    };

    // Adjacent-sentence chain links.
    for i in 0..n.saturating_sub(1) {
        if rng.gen_bool(cfg.base_link_prob) {
            push(&mut edges, i, i + 1);
        }
    }
    // Facts supporting values.
    for i in 0..n {
        if types[i] == PropositionType::Fact && rng.gen_bool(params.fact_value_prob) {
            let values: Vec<usize> = (0..n)
                .filter(|&j| j != i && types[j] == PropositionType::Value)
                .collect();
            if !values.is_empty() {
                push(&mut edges, i, values[rng.gen_range(0..values.len())]);
            }
        }
    }
    // One planted divergent argument: a source supporting two targets.
    if n >= 3 && rng.gen_bool(params.divergent_prob) {
        let src = rng.gen_range(0..n);
        let targets: Vec<usize> = (0..n).filter(|&j| j != src).collect();
        let first = rng.gen_range(0..targets.len());
        let mut second = rng.gen_range(0..targets.len() - 1);
        if second >= first {
            second += 1;
        }
        push(&mut edges, src, targets[first]);
        push(&mut edges, src, targets[second]);
    }

    let mut u = Utterance::new(sentences, types);
    u.edges = edges.into_iter().map(|(a, b)| SupportEdge::new(a, b)).collect();
    u
}

/// Generate a labeled corpus. Deterministic for a fixed config: each debate
/// derives its generator from `seed ^ index`.
pub fn generate_corpus(cfg: &PlantConfig) -> Result<Vec<Debate>> {
    cfg.validate()?;
    let winner_params = side_params(cfg, true);
    let loser_params = side_params(cfg, false);

    (0..cfg.n_debates)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ i as u64);
            let winner = if rng.gen_bool(0.5) { Side::Pro } else { Side::Con };
            let n_rounds = rng.gen_range(cfg.rounds_min..=cfg.rounds_max);

            let mut rounds = Vec::with_capacity(n_rounds);
            for _ in 0..n_rounds {
                let pro_params = if winner == Side::Pro { &winner_params } else { &loser_params };
                let con_params = if winner == Side::Con { &winner_params } else { &loser_params };
                let pro = synth_utterance(cfg, pro_params, &mut rng);
                let con = synth_utterance(cfg, con_params, &mut rng);
                rounds.push(Round { pro, con });
            }

            let winner_votes = rng.gen_range(5..=7u32);
            let margin = rng.gen_range(2..=4u32);
            let loser_votes = winner_votes - margin;
            let (votes_pro, votes_con) = match winner {
                Side::Pro => (winner_votes, loser_votes),
                Side::Con => (loser_votes, winner_votes),
            };

            Ok(Debate {
                id: format!("synth-{i:06}"),
                topic: TOPICS[rng.gen_range(0..TOPICS.len())].to_string(),
                rounds,
                votes_pro,
                votes_con,
                forfeit: None,
            })
        })
        .collect()
}
