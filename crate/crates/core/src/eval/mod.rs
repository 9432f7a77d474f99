//! Cross-validation harness, accuracy metrics, significance tests,
//! annotation-quality metrics, and the winner-vs-loser feature contrast.

mod agreement;
mod contrast;
mod stats;

pub use agreement::{
    annotation_consistency, krippendorff_alpha, AnnotationItem, AnnotationSet,
    CategoryConsistency, ConsistencyReport,
};
pub use contrast::{feature_contrast, ContrastOutcome, Direction, SlotContrast};
pub use stats::{
    paired_t_test, wilcoxon_signed_rank, wilcoxon_signed_rank_tailed, TTestResult, Tail,
    WilcoxonMethod, WilcoxonResult, WILCOXON_EXACT_MAX_N, WILCOXON_MIN_N,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::argfeatures::{build_vocabulary, Vocabulary};
use crate::corpus::{Debate, Side};
use crate::error::{Error, Result};
use crate::model::{
    debate_lr_features, evaluate_accuracy, lr_predict, lr_train, train, AblationFlags,
    TrainConfig,
};

/// Where the feature vocabulary comes from during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum VocabSource {
    /// The fixed default inventory.
    Default,
    /// Built per training fold at the given document-frequency threshold,
    /// so no test-fold information leaks into the vocabulary.
    Built { threshold: f64 },
}

impl VocabSource {
    fn realize(&self, training: &[Debate]) -> Result<Vocabulary> {
        match self {
            VocabSource::Default => Ok(Vocabulary::default_inventory()),
            VocabSource::Built { threshold } => build_vocabulary(training, *threshold),
        }
    }

    fn describe(&self) -> String {
        match self {
            VocabSource::Default => "default".into(),
            VocabSource::Built { threshold } => format!("built(threshold={threshold})"),
        }
    }
}

/// Accuracy of predicted winners against vote-derived labels.
pub fn accuracy(predictions: &[Side], labels: &[Side]) -> f64 {
    assert_eq!(predictions.len(), labels.len());
    if predictions.is_empty() {
        return 0.0;
    }
    let hits = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    hits as f64 / predictions.len() as f64
}

/// Accuracy of always predicting the more common winner.
pub fn majority_baseline(corpus: &[Debate]) -> Result<f64> {
    if corpus.is_empty() {
        return Err(Error::InsufficientData("empty corpus".into()));
    }
    let mut pro = 0usize;
    for d in corpus {
        match d.winner() {
            Some(Side::Pro) => pro += 1,
            Some(Side::Con) => {}
            None => return Err(Error::UnlabeledDebate(d.id.clone())),
        }
    }
    let con = corpus.len() - pro;
    Ok(pro.max(con) as f64 / corpus.len() as f64)
}

/// Seed-shuffled partition of `0..n` into `k` near-equal folds. Every index
/// lands in exactly one fold.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("fold count {k} must be at least 2")));
    }
    if n < k {
        return Err(Error::InsufficientData(format!(
            "{n} debates cannot fill {k} folds"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// Significance-test entry of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceEntry {
    pub test: String,
    pub comparison: String,
    pub statistic: f64,
    pub p_value: f64,
}

/// Result of one ablation variant inside a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantResult {
    pub name: String,
    pub ablation: AblationFlags,
    pub per_seed_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
}

/// Cross-validation report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub tool_version: String,
    pub seed: u64,
    pub k: usize,
    pub n_debates: usize,
    pub vocab_source: String,
    pub config: TrainConfig,
    pub majority_baseline: f64,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    /// Filled by [`ablation_sweep`]-style drivers; empty for a single run.
    pub ablations: Vec<VariantResult>,
    pub significance: Vec<SignificanceEntry>,
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Carve an early-stopping validation set (10%, at least one debate) out of
/// a training pool, deterministically for the given seed.
fn split_train_val(pool: &[usize], seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut order = pool.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let val_len = (pool.len() / 10).max(1);
    let val = order[..val_len].to_vec();
    let train = order[val_len..].to_vec();
    (train, val)
}

fn gather(corpus: &[Debate], idx: &[usize]) -> Vec<Debate> {
    idx.iter().map(|&i| corpus[i].clone()).collect()
}

/// k-fold cross-validation of the dual-stream model: for each fold, train
/// on the remaining folds (with 10% carved off for early stopping) and test
/// on the held-out fold. Folds run in parallel; each derives its own seed
/// from the configured seed plus the fold index, so reports are independent
/// of scheduling.
pub fn kfold_evaluate(
    corpus: &[Debate],
    k: usize,
    cfg: &TrainConfig,
    vocab_source: VocabSource,
) -> Result<EvalReport> {
    cfg.validate()?;
    let folds = kfold_indices(corpus.len(), k, cfg.seed)?;
    let majority = majority_baseline(corpus)?;

    let fold_accuracies: Vec<f64> = folds
        .par_iter()
        .enumerate()
        .map(|(f, test_idx)| -> Result<f64> {
            let pool: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, fold)| fold.iter().copied())
                .collect();
            let fold_seed = cfg.seed.wrapping_add(f as u64);
            let (train_idx, val_idx) = split_train_val(&pool, fold_seed);

            let train_set = gather(corpus, &train_idx);
            let val_set = gather(corpus, &val_idx);
            let test_set = gather(corpus, test_idx);

            let vocab = vocab_source.realize(&train_set)?;
            let fold_cfg = TrainConfig { seed: fold_seed, ..cfg.clone() };
            let outcome = train(&train_set, &val_set, &fold_cfg, &vocab)?;
            evaluate_accuracy(&outcome.model, &test_set, &vocab, &cfg.ablation)
        })
        .collect::<Result<Vec<f64>>>()?;

    let (mean, std) = mean_and_std(&fold_accuracies);
    Ok(EvalReport {
        tool_version: crate::TOOL_VERSION.into(),
        seed: cfg.seed,
        k,
        n_debates: corpus.len(),
        vocab_source: vocab_source.describe(),
        config: cfg.clone(),
        majority_baseline: majority,
        fold_accuracies,
        mean_accuracy: mean,
        std_accuracy: std,
        ablations: Vec::new(),
        significance: Vec::new(),
    })
}

/// The ablation rows every sweep reports, mirroring the model comparison
/// table: the full model, the model without all argument-structure features,
/// and one row per removed feature group.
pub fn standard_variants() -> Vec<(String, AblationFlags)> {
    let full = AblationFlags::default();
    vec![
        ("full".into(), full),
        (
            "no_arg_struct".into(),
            AblationFlags {
                use_prop_ngrams: false,
                use_link_ngrams: false,
                use_graph: false,
                ..full
            },
        ),
        ("no_prop_ngrams".into(), AblationFlags { use_prop_ngrams: false, ..full }),
        ("no_link_ngrams".into(), AblationFlags { use_link_ngrams: false, ..full }),
        ("no_graph".into(), AblationFlags { use_graph: false, ..full }),
        ("no_text".into(), AblationFlags { use_text: false, ..full }),
    ]
}

/// Ablation sweep report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub tool_version: String,
    pub seeds: Vec<u64>,
    pub n_debates: usize,
    pub test_fraction: f64,
    pub majority_baseline: f64,
    pub config: TrainConfig,
    pub variants: Vec<VariantResult>,
    pub significance: Vec<SignificanceEntry>,
}

/// Run every standard ablation variant over the given seeds. Each seed
/// fixes one train/validation/test split (test = `test_fraction`, 10% of
/// the remainder for early stopping) shared by all variants, so per-seed
/// accuracies are paired across variants. When at least two seeds are given,
/// a paired t-test compares the full model against each ablation.
pub fn ablation_sweep(
    corpus: &[Debate],
    cfg: &TrainConfig,
    seeds: &[u64],
    test_fraction: f64,
) -> Result<SweepReport> {
    cfg.validate()?;
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("ablation sweep needs at least one seed".into()));
    }
    if !(0.0..1.0).contains(&test_fraction) || test_fraction == 0.0 {
        return Err(Error::InvalidConfig(format!(
            "test fraction {test_fraction} outside (0, 1)"
        )));
    }
    let n = corpus.len();
    let test_len = ((n as f64) * test_fraction).round().max(1.0) as usize;
    if test_len >= n {
        return Err(Error::InsufficientData(
            "test fraction leaves no training data".into(),
        ));
    }
    let variants = standard_variants();

    // One cell per (seed, variant), trained in parallel.
    let cells: Vec<(usize, usize)> = (0..seeds.len())
        .flat_map(|s| (0..variants.len()).map(move |v| (s, v)))
        .collect();
    let accuracies: Vec<((usize, usize), f64)> = cells
        .par_iter()
        .map(|&(s, v)| -> Result<((usize, usize), f64)> {
            let seed = seeds[s];
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let test_idx = &order[..test_len];
            let pool = &order[test_len..];
            let (train_idx, val_idx) = split_train_val(pool, seed.wrapping_add(1));

            let train_set = gather(corpus, &train_idx);
            let val_set = gather(corpus, &val_idx);
            let test_set = gather(corpus, test_idx);
            let vocab = Vocabulary::default_inventory();

            let run_cfg = TrainConfig {
                seed,
                ablation: variants[v].1,
                ..cfg.clone()
            };
            let outcome = train(&train_set, &val_set, &run_cfg, &vocab)?;
            let acc = evaluate_accuracy(&outcome.model, &test_set, &vocab, &run_cfg.ablation)?;
            Ok(((s, v), acc))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut per_variant = vec![vec![0.0f64; seeds.len()]; variants.len()];
    for ((s, v), acc) in accuracies {
        per_variant[v][s] = acc;
    }

    let variant_results: Vec<VariantResult> = variants
        .iter()
        .zip(&per_variant)
        .map(|((name, flags), accs)| VariantResult {
            name: name.clone(),
            ablation: *flags,
            per_seed_accuracy: accs.clone(),
            mean_accuracy: accs.iter().sum::<f64>() / accs.len() as f64,
        })
        .collect();

    let mut significance = Vec::new();
    if seeds.len() >= 2 {
        let full = &per_variant[0];
        for (i, (name, _)) in variants.iter().enumerate().skip(1) {
            match paired_t_test(full, &per_variant[i]) {
                Ok(r) => significance.push(SignificanceEntry {
                    test: "paired_t".into(),
                    comparison: format!("full_vs_{name}"),
                    statistic: r.t,
                    p_value: r.p_value,
                }),
                Err(Error::ZeroVariance) => {}
                Err(e) => return Err(e),
            }
        }
    }

    Ok(SweepReport {
        tool_version: crate::TOOL_VERSION.into(),
        seeds: seeds.to_vec(),
        n_debates: n,
        test_fraction,
        majority_baseline: majority_baseline(corpus)?,
        config: cfg.clone(),
        variants: variant_results,
        significance,
    })
}

/// Which feature set a logistic-regression baseline uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LrFeatureMode {
    ArgStruct,
    External,
    ArgStructPlusExternal,
}

/// k-fold cross-validation of a logistic-regression baseline over
/// debate-level features.
pub fn kfold_evaluate_lr(
    corpus: &[Debate],
    k: usize,
    seed: u64,
    mode: LrFeatureMode,
    external: Option<&std::collections::BTreeMap<String, crate::corpus::ExternalFeatures>>,
    vocab: &Vocabulary,
) -> Result<EvalReport> {
    let folds = kfold_indices(corpus.len(), k, seed)?;
    let majority = majority_baseline(corpus)?;

    let include_arg = mode != LrFeatureMode::External;
    let use_external = mode != LrFeatureMode::ArgStruct;
    if use_external && external.is_none() {
        return Err(Error::InvalidConfig(
            "external feature mode requires an external sidecar".into(),
        ));
    }

    let featurize = |d: &Debate| -> Result<(Vec<f64>, bool)> {
        let ext = if use_external {
            Some(external.unwrap().get(&d.id).ok_or_else(|| {
                Error::AnnotationMismatch(format!("no external features for debate {}", d.id))
            })?)
        } else {
            None
        };
        let label = d.winner().ok_or_else(|| Error::UnlabeledDebate(d.id.clone()))?;
        Ok((
            debate_lr_features(d, vocab, include_arg, ext),
            label == Side::Con,
        ))
    };
    let data: Vec<(Vec<f64>, bool)> = corpus.iter().map(featurize).collect::<Result<_>>()?;

    let mut fold_accuracies = Vec::with_capacity(k);
    for (f, test_idx) in folds.iter().enumerate() {
        let train_data: Vec<(Vec<f64>, bool)> = folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, fold)| fold.iter().map(|&i| data[i].clone()))
            .collect();
        let model = lr_train(&train_data, 1e-3, 0.5, 400)?;
        let mut correct = 0usize;
        for &i in test_idx {
            let p_con = lr_predict(&model, &data[i].0)?;
            let predicted_con = p_con >= 0.5;
            if predicted_con == data[i].1 {
                correct += 1;
            }
        }
        fold_accuracies.push(correct as f64 / test_idx.len() as f64);
    }

    let (mean, std) = mean_and_std(&fold_accuracies);
    Ok(EvalReport {
        tool_version: crate::TOOL_VERSION.into(),
        seed,
        k,
        n_debates: corpus.len(),
        vocab_source: "default".into(),
        config: TrainConfig { seed, ..TrainConfig::default() },
        majority_baseline: majority,
        fold_accuracies,
        mean_accuracy: mean,
        std_accuracy: std,
        ablations: Vec::new(),
        significance: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_partition_every_index() {
        let folds = kfold_indices(23, 5, 7).unwrap();
        assert_eq!(folds.len(), 5);
        let mut seen: Vec<usize> = folds.iter().flatten().copied().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..23).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(|f| f.len()).collect();
        assert_eq!(sizes, vec![5, 5, 5, 4, 4]);
    }

    #[test]
    fn fold_assignment_is_seed_deterministic() {
        assert_eq!(kfold_indices(40, 5, 3).unwrap(), kfold_indices(40, 5, 3).unwrap());
        assert_ne!(kfold_indices(40, 5, 3).unwrap(), kfold_indices(40, 5, 4).unwrap());
    }

    #[test]
    fn too_few_folds_rejected() {
        assert!(kfold_indices(10, 1, 0).is_err());
        assert!(kfold_indices(3, 5, 0).is_err());
    }

    #[test]
    fn constant_predictor_accuracy_equals_majority_share() {
        let labels = vec![Side::Pro, Side::Pro, Side::Con, Side::Pro, Side::Con];
        let constant = vec![Side::Pro; 5];
        assert_eq!(accuracy(&constant, &labels), 3.0 / 5.0);
    }

    #[test]
    fn majority_baseline_is_larger_class_share() {
        let mk = |pro: u32, con: u32| Debate {
            id: format!("{pro}-{con}"),
            topic: "t".into(),
            rounds: vec![crate::corpus::Round {
                pro: crate::corpus::Utterance::new(vec![], vec![]),
                con: crate::corpus::Utterance::new(vec![], vec![]),
            }],
            votes_pro: pro,
            votes_con: con,
            forfeit: None,
        };
        let corpus = vec![mk(5, 2), mk(6, 1), mk(2, 5), mk(9, 0)];
        assert_eq!(majority_baseline(&corpus).unwrap(), 0.75);
    }
}
