//! Binary logistic regression baseline over debate-level feature vectors.

use crate::argfeatures::{assemble_features, Vocabulary};
use crate::corpus::{Debate, ExternalFeatures, Side};
use crate::error::{Error, Result};
use crate::neural::sigmoid;

#[derive(Debug, Clone, PartialEq)]
pub struct LrModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

/// Fit by full-batch gradient descent on the L2-regularized negative
/// log-likelihood. Labels are `true` for class one.
pub fn lr_train(
    data: &[(Vec<f64>, bool)],
    l2: f64,
    lr: f64,
    epochs: usize,
) -> Result<LrModel> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let dim = data[0].0.len();
    if data.iter().any(|(x, _)| x.len() != dim) {
        return Err(Error::DimensionMismatch(
            "inconsistent feature dimensions in training data".into(),
        ));
    }
    let n = data.len() as f64;
    let mut w = vec![0.0f64; dim];
    let mut b = 0.0f64;

    for _ in 0..epochs {
        let mut gw = vec![0.0f64; dim];
        let mut gb = 0.0f64;
        for (x, y) in data {
            let z = x.iter().zip(&w).map(|(xi, wi)| xi * wi).sum::<f64>() + b;
            let err = sigmoid(z) - if *y { 1.0 } else { 0.0 };
            for (g, xi) in gw.iter_mut().zip(x) {
                *g += err * xi;
            }
            gb += err;
        }
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= lr * (g / n + l2 * *wi);
        }
        b -= lr * gb / n;
    }
    Ok(LrModel { weights: w, bias: b })
}

/// Predicted probability of class one.
pub fn lr_predict(m: &LrModel, x: &[f64]) -> Result<f64> {
    if x.len() != m.weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} features, model expects {}",
            x.len(),
            m.weights.len()
        )));
    }
    let z = x.iter().zip(&m.weights).map(|(xi, wi)| xi * wi).sum::<f64>() + m.bias;
    Ok(sigmoid(z))
}

/// Debate-level feature vector for the baseline: the mean of per-utterance
/// argument-structure vectors over all PRO utterances, concatenated with the
/// CON mean, optionally followed by external sidecar features
/// (pro, con, shared). `include_arg = false` drops the argument-structure
/// part, leaving only the external features.
pub fn debate_lr_features(
    d: &Debate,
    vocab: &Vocabulary,
    include_arg: bool,
    external: Option<&ExternalFeatures>,
) -> Vec<f64> {
    let mut out = Vec::new();
    if include_arg {
        for side in [Side::Pro, Side::Con] {
            let mut mean = vec![0.0f64; vocab.feature_len()];
            let mut count = 0usize;
            for u in d.side_utterances(side) {
                for (m, v) in mean.iter_mut().zip(assemble_features(u, vocab).values()) {
                    *m += v;
                }
                count += 1;
            }
            if count > 0 {
                for m in &mut mean {
                    *m /= count as f64;
                }
            }
            out.extend(mean);
        }
    }
    if let Some(ext) = external {
        out.extend(&ext.pro_features);
        out.extend(&ext.con_features);
        out.extend(&ext.shared_features);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{PropositionType, Round, Utterance};

    #[test]
    fn separable_points_reach_full_training_accuracy() {
        let data = vec![
            (vec![1.0, 0.0], false),
            (vec![0.0, 1.0], true),
        ];
        let m = lr_train(&data, 0.0, 1.0, 500).unwrap();
        assert!(lr_predict(&m, &[1.0, 0.0]).unwrap() < 0.5);
        assert!(lr_predict(&m, &[0.0, 1.0]).unwrap() > 0.5);
    }

    #[test]
    fn zero_features_balanced_labels_predict_half() {
        let data = vec![
            (vec![0.0, 0.0], false),
            (vec![0.0, 0.0], true),
            (vec![0.0, 0.0], false),
            (vec![0.0, 0.0], true),
        ];
        let m = lr_train(&data, 0.0, 0.5, 300).unwrap();
        let p = lr_predict(&m, &[0.0, 0.0]).unwrap();
        assert!((p - 0.5).abs() < 1e-9, "p = {p}");
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let m = LrModel { weights: vec![1.0, 2.0], bias: 0.0 };
        assert!(lr_predict(&m, &[1.0]).is_err());
        let data = vec![(vec![1.0], true), (vec![1.0, 2.0], false)];
        assert!(lr_train(&data, 0.0, 0.1, 10).is_err());
    }

    #[test]
    fn debate_features_are_per_side_means() {
        use PropositionType::*;
        let u = |t: PropositionType| Utterance::new(vec![format!("{t}")], vec![t]);
        let d = Debate {
            id: "d".into(),
            topic: "t".into(),
            rounds: vec![
                Round { pro: u(Value), con: u(Policy) },
                Round { pro: u(Testimony), con: u(Policy) },
            ],
            votes_pro: 6,
            votes_con: 2,
            forfeit: None,
        };
        let vocab = Vocabulary::default_inventory();
        let feats = debate_lr_features(&d, &vocab, true, None);
        assert_eq!(feats.len(), 64);
        let names = vocab.slot_names();
        let uni_value = names.iter().position(|n| n == "uni_value").unwrap();
        let uni_policy = names.iter().position(|n| n == "uni_policy").unwrap();
        // PRO said value once and testimony once -> mean 0.5 each.
        assert_eq!(feats[uni_value], 0.5);
        // CON said policy in both rounds -> mean 1.0 on the CON half.
        assert_eq!(feats[32 + uni_policy], 1.0);
    }

    #[test]
    fn external_features_are_appended() {
        let d = Debate {
            id: "d".into(),
            topic: "t".into(),
            rounds: vec![Round {
                pro: Utterance::new(vec![], vec![]),
                con: Utterance::new(vec![], vec![]),
            }],
            votes_pro: 6,
            votes_con: 2,
            forfeit: None,
        };
        let ext = ExternalFeatures {
            id: "d".into(),
            pro_features: vec![1.0],
            con_features: vec![2.0],
            shared_features: vec![3.0, 4.0],
        };
        let vocab = Vocabulary::default_inventory();
        let both = debate_lr_features(&d, &vocab, true, Some(&ext));
        assert_eq!(both.len(), 64 + 4);
        assert_eq!(&both[64..], &[1.0, 2.0, 3.0, 4.0]);
        let ext_only = debate_lr_features(&d, &vocab, false, Some(&ext));
        assert_eq!(ext_only, vec![1.0, 2.0, 3.0, 4.0]);
    }
}
