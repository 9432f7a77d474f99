//! Training loop: per-debate Adagrad steps with early stopping on
//! validation loss.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::argfeatures::Vocabulary;
use crate::corpus::Debate;
use crate::error::{Error, Result};
use crate::neural::{
    AdagradState, DEFAULT_EPSILON, DEFAULT_LEARNING_RATE, DEFAULT_WEIGHT_DECAY,
};

use super::{
    debate_to_sequences, forward, loss_and_grads, AblationFlags, DualStreamModel, ModelDims,
    SequencePair,
};

/// Hyperparameters and ablation switches for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub weight_decay: f64,
    pub dropout: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub text_dim: usize,
    pub text_hidden: usize,
    pub arg_hidden: usize,
    pub ablation: AblationFlags,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: DEFAULT_LEARNING_RATE,
            weight_decay: DEFAULT_WEIGHT_DECAY,
            dropout: 0.5,
            max_epochs: 50,
            patience: 5,
            seed: 0,
            text_dim: crate::corpus::DEFAULT_EMBED_DIM,
            text_hidden: 32,
            arg_hidden: 4,
            ablation: AblationFlags::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.patience < 1 {
            return Err(Error::InvalidConfig("patience must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::InvalidConfig(format!(
                "dropout {} outside [0, 1)",
                self.dropout
            )));
        }
        if !self.lr.is_finite() || self.lr < 0.0 {
            return Err(Error::InvalidConfig(format!("bad learning rate {}", self.lr)));
        }
        if !self.ablation.any_stream() {
            return Err(Error::InvalidConfig(
                "all feature streams disabled; at least one must stay enabled".into(),
            ));
        }
        if self.text_hidden == 0 || self.arg_hidden == 0 || self.text_dim == 0 {
            return Err(Error::InvalidConfig("zero layer width".into()));
        }
        Ok(())
    }

    pub fn model_dims(&self, vocab: &Vocabulary) -> ModelDims {
        ModelDims {
            text_input: self.text_dim,
            text_hidden: self.text_hidden,
            arg_input: vocab.feature_len(),
            arg_hidden: self.arg_hidden,
        }
    }
}

/// One line of the training history log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val_acc: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the best-validation-loss epoch.
    pub model: DualStreamModel,
    pub history: Vec<EpochStats>,
    /// 1-based epoch the returned parameters come from; None when no epoch ran.
    pub best_epoch: Option<usize>,
}

struct Instance {
    id: String,
    seqs: SequencePair,
    label: usize,
}

fn prepare(debates: &[Debate], vocab: &Vocabulary, cfg: &TrainConfig) -> Result<Vec<Instance>> {
    debates
        .iter()
        .map(|d| {
            let label = d
                .winner()
                .ok_or_else(|| Error::UnlabeledDebate(d.id.clone()))?
                .class_index();
            Ok(Instance {
                id: d.id.clone(),
                seqs: debate_to_sequences(d, vocab, &cfg.ablation, cfg.text_dim),
                label,
            })
        })
        .collect()
}

/// Train a dual-stream model: one full pass per epoch in a seed-shuffled
/// order, one Adagrad step per debate, early stopping once validation loss
/// has not improved for `patience` consecutive epochs. Returns the
/// parameters from the best-validation-loss epoch. Fully deterministic for
/// fixed seed and data.
pub fn train(
    train_set: &[Debate],
    val_set: &[Debate],
    cfg: &TrainConfig,
    vocab: &Vocabulary,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::InvalidConfig(
            "training and validation sets must be non-empty".into(),
        ));
    }

    let train_insts = prepare(train_set, vocab, cfg)?;
    let val_insts = prepare(val_set, vocab, cfg)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = DualStreamModel::new(cfg.model_dims(vocab), &mut rng);
    let mut opt = AdagradState::new_like(&model.param_slices(), DEFAULT_EPSILON);

    let mut history = Vec::new();
    let mut best: Option<(f64, DualStreamModel, usize)> = None;
    let mut stale_epochs = 0usize;

    let mut order: Vec<usize> = (0..train_insts.len()).collect();
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for &i in &order {
            let inst = &train_insts[i];
            let dropout_seed: u64 = rng.gen();
            let (loss, grads, _) = loss_and_grads(
                &model,
                &inst.seqs,
                inst.label,
                cfg.dropout,
                true,
                dropout_seed,
            )?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    debate_id: inst.id.clone(),
                });
            }
            loss_sum += loss;
            let grad_slices = grads.param_slices();
            let mut param_slices = model.param_slices_mut();
            opt.step(&mut param_slices, &grad_slices, cfg.lr, cfg.weight_decay);
        }
        let train_loss = loss_sum / train_insts.len() as f64;

        let (val_loss, val_acc) = validation_stats(&model, &val_insts)?;
        history.push(EpochStats {
            epoch,
            train_loss,
            val_loss,
            val_acc,
            alpha: model.alpha(),
        });

        let improved = best.as_ref().map_or(true, |(b, _, _)| val_loss < *b);
        if improved {
            best = Some((val_loss, model.clone(), epoch));
            stale_epochs = 0;
        } else {
            stale_epochs += 1;
            if stale_epochs >= cfg.patience {
                break;
            }
        }
    }

    let (model, best_epoch) = match best {
        Some((_, m, e)) => (m, Some(e)),
        None => (model, None),
    };
    Ok(TrainOutcome {
        model,
        history,
        best_epoch,
    })
}

fn validation_stats(model: &DualStreamModel, insts: &[Instance]) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0); // unused at inference
    let mut loss_sum = 0.0;
    let mut correct = 0usize;
    for inst in insts {
        let probs = forward(model, &inst.seqs, 0.0, false, &mut rng)?;
        loss_sum += crate::neural::cross_entropy(&probs, inst.label);
        let pred = if probs[0] >= probs[1] { 0 } else { 1 };
        if pred == inst.label {
            correct += 1;
        }
    }
    Ok((
        loss_sum / insts.len() as f64,
        correct as f64 / insts.len() as f64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{PropositionType, Round, Side, Utterance};

    fn tiny_cfg(seed: u64) -> TrainConfig {
        TrainConfig {
            text_dim: 8,
            text_hidden: 3,
            arg_hidden: 2,
            max_epochs: 3,
            seed,
            ..TrainConfig::default()
        }
    }

    fn labeled_debate(id: &str, winner: Side, lead: PropositionType) -> Debate {
        let mk = |t: PropositionType| {
            Utterance::new(vec![format!("word {t}"), format!("more {t}")], vec![t, t])
        };
        let (votes_pro, votes_con) = match winner {
            Side::Pro => (6, 2),
            Side::Con => (2, 6),
        };
        let other = match lead {
            PropositionType::Testimony => PropositionType::Policy,
            _ => PropositionType::Testimony,
        };
        let (pro_t, con_t) = match winner {
            Side::Pro => (lead, other),
            Side::Con => (other, lead),
        };
        Debate {
            id: id.into(),
            topic: "t".into(),
            rounds: vec![Round { pro: mk(pro_t), con: mk(con_t) }],
            votes_pro,
            votes_con,
            forfeit: None,
        }
    }

    fn tiny_corpus(n: usize) -> Vec<Debate> {
        (0..n)
            .map(|i| {
                let winner = if i % 2 == 0 { Side::Pro } else { Side::Con };
                labeled_debate(&format!("d{i}"), winner, PropositionType::Testimony)
            })
            .collect()
    }

    #[test]
    fn zero_epochs_returns_initialized_model_and_empty_history() {
        let corpus = tiny_corpus(6);
        let cfg = TrainConfig {
            max_epochs: 0,
            ..tiny_cfg(9)
        };
        let vocab = Vocabulary::default_inventory();
        let out = train(&corpus[..4], &corpus[4..], &cfg, &vocab).unwrap();
        assert!(out.history.is_empty());
        assert_eq!(out.best_epoch, None);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fresh = DualStreamModel::new(cfg.model_dims(&vocab), &mut rng);
        assert_eq!(out.model, fresh);
    }

    #[test]
    fn identical_seeds_give_bitwise_identical_histories() {
        let corpus = tiny_corpus(8);
        let cfg = tiny_cfg(1234);
        let vocab = Vocabulary::default_inventory();
        let a = train(&corpus[..6], &corpus[6..], &cfg, &vocab).unwrap();
        let b = train(&corpus[..6], &corpus[6..], &cfg, &vocab).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.model, b.model);
    }

    #[test]
    fn returned_model_has_best_recorded_val_loss() {
        let corpus = tiny_corpus(10);
        let cfg = TrainConfig {
            max_epochs: 8,
            ..tiny_cfg(7)
        };
        let vocab = Vocabulary::default_inventory();
        let out = train(&corpus[..8], &corpus[8..], &cfg, &vocab).unwrap();
        let best_recorded = out
            .history
            .iter()
            .map(|e| e.val_loss)
            .fold(f64::INFINITY, f64::min);
        let best_epoch = out.best_epoch.unwrap();
        let returned = out.history[best_epoch - 1].val_loss;
        assert_eq!(returned, best_recorded);
    }

    #[test]
    fn all_streams_disabled_is_rejected() {
        let cfg = TrainConfig {
            ablation: AblationFlags {
                use_text: false,
                use_prop_ngrams: false,
                use_link_ngrams: false,
                use_graph: false,
            },
            ..tiny_cfg(0)
        };
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn empty_sets_are_rejected() {
        let corpus = tiny_corpus(4);
        let vocab = Vocabulary::default_inventory();
        assert!(train(&[], &corpus, &tiny_cfg(0), &vocab).is_err());
        assert!(train(&corpus, &[], &tiny_cfg(0), &vocab).is_err());
    }
}
