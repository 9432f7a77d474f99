//! Model checkpoints: a single JSON document holding shapes, flattened
//! parameter arrays, the vocabulary, and the experiment seed.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::argfeatures::Vocabulary;
use crate::error::{Error, Result};

use super::{AblationFlags, DualStreamModel, ModelDims};

/// Checkpoint format version this build writes and reads.
pub const CHECKPOINT_FORMAT: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: u32,
    pub tool_version: String,
    pub seed: u64,
    pub dims: ModelDims,
    pub ablation: AblationFlags,
    pub vocabulary: Vocabulary,
    pub combine_logit: f64,
    pub tensors: Vec<TensorEntry>,
}

fn tensor2(name: &str, a: &Array2<f64>) -> TensorEntry {
    TensorEntry {
        name: name.into(),
        shape: a.shape().to_vec(),
        values: a.iter().copied().collect(),
    }
}

fn tensor1(name: &str, a: &Array1<f64>) -> TensorEntry {
    TensorEntry {
        name: name.into(),
        shape: vec![a.len()],
        values: a.to_vec(),
    }
}

impl Checkpoint {
    pub fn from_model(
        model: &DualStreamModel,
        vocab: &Vocabulary,
        seed: u64,
        ablation: AblationFlags,
    ) -> Self {
        let mut tensors = Vec::new();
        for (prefix, lstm) in [
            ("text_fwd", &model.text_fwd),
            ("text_bwd", &model.text_bwd),
            ("arg_fwd", &model.arg_fwd),
            ("arg_bwd", &model.arg_bwd),
        ] {
            tensors.push(tensor2(&format!("{prefix}.wx"), &lstm.wx));
            tensors.push(tensor2(&format!("{prefix}.wh"), &lstm.wh));
            tensors.push(tensor1(&format!("{prefix}.b"), &lstm.b));
        }
        for (prefix, dense) in [("text_head", &model.text_head), ("arg_head", &model.arg_head)] {
            tensors.push(tensor2(&format!("{prefix}.w"), &dense.w));
            tensors.push(tensor1(&format!("{prefix}.b"), &dense.b));
        }
        Checkpoint {
            format: CHECKPOINT_FORMAT,
            tool_version: crate::TOOL_VERSION.into(),
            seed,
            dims: model.dims,
            ablation,
            vocabulary: vocab.clone(),
            combine_logit: model.combine_logit,
            tensors,
        }
    }

    pub fn into_model(self) -> Result<(DualStreamModel, Vocabulary, u64, AblationFlags)> {
        if self.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint format {} (expected {CHECKPOINT_FORMAT})",
                self.format
            )));
        }
        let mut model = DualStreamModel::zeros(self.dims);
        model.combine_logit = self.combine_logit;
        for entry in &self.tensors {
            load_tensor(&mut model, entry)?;
        }
        Ok((model, self.vocabulary, self.seed, self.ablation))
    }
}

fn load_tensor(model: &mut DualStreamModel, entry: &TensorEntry) -> Result<()> {
    let fail = |what: &str| {
        Error::Checkpoint(format!(
            "tensor {}: {what} (shape {:?})",
            entry.name, entry.shape
        ))
    };
    let as2 = |target: &mut Array2<f64>| -> Result<()> {
        if entry.shape != target.shape() {
            return Err(fail("shape mismatch"));
        }
        for (t, v) in target.iter_mut().zip(&entry.values) {
            *t = *v;
        }
        Ok(())
    };
    let as1 = |target: &mut Array1<f64>| -> Result<()> {
        if entry.shape != [target.len()] {
            return Err(fail("shape mismatch"));
        }
        for (t, v) in target.iter_mut().zip(&entry.values) {
            *t = *v;
        }
        Ok(())
    };
    if entry.values.len() != entry.shape.iter().product::<usize>() {
        return Err(fail("value count does not match shape"));
    }
    match entry.name.as_str() {
        "text_fwd.wx" => as2(&mut model.text_fwd.wx),
        "text_fwd.wh" => as2(&mut model.text_fwd.wh),
        "text_fwd.b" => as1(&mut model.text_fwd.b),
        "text_bwd.wx" => as2(&mut model.text_bwd.wx),
        "text_bwd.wh" => as2(&mut model.text_bwd.wh),
        "text_bwd.b" => as1(&mut model.text_bwd.b),
        "arg_fwd.wx" => as2(&mut model.arg_fwd.wx),
        "arg_fwd.wh" => as2(&mut model.arg_fwd.wh),
        "arg_fwd.b" => as1(&mut model.arg_fwd.b),
        "arg_bwd.wx" => as2(&mut model.arg_bwd.wx),
        "arg_bwd.wh" => as2(&mut model.arg_bwd.wh),
        "arg_bwd.b" => as1(&mut model.arg_bwd.b),
        "text_head.w" => as2(&mut model.text_head.w),
        "text_head.b" => as1(&mut model.text_head.b),
        "arg_head.w" => as2(&mut model.arg_head.w),
        "arg_head.b" => as1(&mut model.arg_head.b),
        other => Err(Error::Checkpoint(format!("unknown tensor {other}"))),
    }
}

pub fn save_checkpoint(
    path: impl AsRef<Path>,
    model: &DualStreamModel,
    vocab: &Vocabulary,
    seed: u64,
    ablation: AblationFlags,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let ckpt = Checkpoint::from_model(model, vocab, seed, ablation);
    serde_json::to_writer(BufWriter::new(file), &ckpt)?;
    Ok(())
}

pub fn load_checkpoint(
    path: impl AsRef<Path>,
) -> Result<(DualStreamModel, Vocabulary, u64, AblationFlags)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let ckpt: Checkpoint = serde_json::from_reader(BufReader::new(file))?;
    ckpt.into_model()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn checkpoint_roundtrip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dims = ModelDims {
            text_input: 6,
            text_hidden: 3,
            arg_input: 32,
            arg_hidden: 2,
        };
        let mut model = DualStreamModel::new(dims, &mut rng);
        model.combine_logit = -0.37;
        let vocab = Vocabulary::default_inventory();

        let f = tempfile::NamedTempFile::new().unwrap();
        save_checkpoint(f.path(), &model, &vocab, 99, AblationFlags::default()).unwrap();
        let (loaded, loaded_vocab, seed, flags) = load_checkpoint(f.path()).unwrap();
        assert_eq!(loaded, model);
        assert_eq!(loaded_vocab, vocab);
        assert_eq!(seed, 99);
        assert_eq!(flags, AblationFlags::default());
    }

    #[test]
    fn wrong_format_version_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dims = ModelDims {
            text_input: 2,
            text_hidden: 2,
            arg_input: 32,
            arg_hidden: 2,
        };
        let model = DualStreamModel::new(dims, &mut rng);
        let vocab = Vocabulary::default_inventory();
        let mut ckpt = Checkpoint::from_model(&model, &vocab, 0, AblationFlags::default());
        ckpt.format = 999;
        assert!(matches!(ckpt.into_model(), Err(Error::Checkpoint(_))));
    }
}
