//! Winner-vs-loser feature contrast: for every feature slot, pair each
//! debate's winner-side mean value with its loser-side mean value and run a
//! signed-rank test across debates.

use serde::Serialize;

use crate::argfeatures::{assemble_features, Vocabulary};
use crate::corpus::Debate;
use crate::error::{Error, Result};

use super::stats::wilcoxon_signed_rank;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    WinnerHigher,
    LoserHigher,
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status")]
pub enum ContrastOutcome {
    Tested { w: f64, p_value: f64 },
    InsufficientData { usable_pairs: usize },
    AllDifferencesZero,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotContrast {
    pub name: String,
    pub winner_mean: f64,
    pub loser_mean: f64,
    pub direction: Direction,
    pub outcome: ContrastOutcome,
}

impl SlotContrast {
    pub fn p_value(&self) -> Option<f64> {
        match self.outcome {
            ContrastOutcome::Tested { p_value, .. } => Some(p_value),
            _ => None,
        }
    }
}

/// Per-slot winner-vs-loser contrast over a labeled corpus, sorted by
/// ascending p-value (untestable slots last). Each debate contributes one
/// pair per slot: the mean feature value over its winner-side utterances vs
/// the mean over its loser-side utterances.
pub fn feature_contrast(corpus: &[Debate], vocab: &Vocabulary) -> Result<Vec<SlotContrast>> {
    if corpus.is_empty() {
        return Err(Error::InsufficientData("empty corpus".into()));
    }
    let feat_len = vocab.feature_len();
    let mut winner_vals = vec![Vec::with_capacity(corpus.len()); feat_len];
    let mut loser_vals = vec![Vec::with_capacity(corpus.len()); feat_len];

    for d in corpus {
        let winner = d.winner().ok_or_else(|| Error::UnlabeledDebate(d.id.clone()))?;
        let means = |side| -> Vec<f64> {
            let mut acc = vec![0.0f64; feat_len];
            let mut count = 0usize;
            for u in d.side_utterances(side) {
                for (a, v) in acc.iter_mut().zip(assemble_features(u, vocab).values()) {
                    *a += v;
                }
                count += 1;
            }
            for a in &mut acc {
                *a /= count as f64;
            }
            acc
        };
        let w = means(winner);
        let l = means(winner.opponent());
        for s in 0..feat_len {
            winner_vals[s].push(w[s]);
            loser_vals[s].push(l[s]);
        }
    }

    let names = vocab.slot_names();
    let mut slots: Vec<SlotContrast> = (0..feat_len)
        .map(|s| {
            let x = &winner_vals[s];
            let y = &loser_vals[s];
            let winner_mean = x.iter().sum::<f64>() / x.len() as f64;
            let loser_mean = y.iter().sum::<f64>() / y.len() as f64;
            let direction = match winner_mean.partial_cmp(&loser_mean) {
                Some(std::cmp::Ordering::Greater) => Direction::WinnerHigher,
                Some(std::cmp::Ordering::Less) => Direction::LoserHigher,
                _ => Direction::Equal,
            };
            let outcome = match wilcoxon_signed_rank(x, y) {
                Ok(r) => ContrastOutcome::Tested { w: r.w, p_value: r.p_value },
                Err(Error::AllDifferencesZero) => ContrastOutcome::AllDifferencesZero,
                Err(Error::InsufficientData(_)) => ContrastOutcome::InsufficientData {
                    usable_pairs: x.iter().zip(y).filter(|(a, b)| a != b).count(),
                },
                Err(e) => panic!("unexpected signed-rank failure: {e}"),
            };
            SlotContrast {
                name: names[s].clone(),
                winner_mean,
                loser_mean,
                direction,
                outcome,
            }
        })
        .collect();

    slots.sort_by(|a, b| match (a.p_value(), b.p_value()) {
        (Some(pa), Some(pb)) => pa.partial_cmp(&pb).expect("finite p-values"),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok(slots)
}
