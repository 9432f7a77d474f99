//! Deterministic fallback text embedder.
//!
//! A hashing bag-of-words substitute for the pretrained sentence encoder,
//! used whenever an utterance carries no stored embedding. It is explicitly
//! not a contextual-encoder reproduction; it only guarantees a stable,
//! text-dependent vector with the same truncation convention as the real
//! encoder: only the last few sentences of an utterance are considered.

use super::Utterance;

/// Default embedding width, matching the stored-embedding convention.
pub const DEFAULT_EMBED_DIM: usize = 768;
/// Default truncation: keep the last three sentences.
pub const DEFAULT_LAST_K: usize = 3;

/// Embed the last `min(last_k, len)` sentences of an utterance: lowercase,
/// split on non-alphanumeric characters, hash each token into one of `dim`
/// buckets, accumulate counts, then L2-normalize. Text with no tokens maps
/// to the zero vector. Same text, same vector, always.
pub fn fallback_embed(u: &Utterance, dim: usize, last_k: usize) -> Vec<f64> {
    assert!(dim > 0, "embedding dimension must be positive");
    assert!(last_k >= 1, "last_k must be at least 1");

    let mut counts = vec![0.0f64; dim];
    let start = u.sentences.len().saturating_sub(last_k);
    for sentence in &u.sentences[start..] {
        for token in sentence
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
        {
            let bucket = (fnv1a_64(token.to_lowercase().as_bytes()) % dim as u64) as usize;
            counts[bucket] += 1.0;
        }
    }

    let norm = counts.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in &mut counts {
            *c /= norm;
        }
    }
    counts
}

/// FNV-1a, 64-bit. Stable across platforms and releases, unlike the
/// standard library's default hasher.
fn fnv1a_64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut hash = OFFSET;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PropositionType;

    fn utt(sentences: &[&str]) -> Utterance {
        Utterance::new(
            sentences.iter().map(|s| s.to_string()).collect(),
            vec![PropositionType::Value; sentences.len()],
        )
    }

    #[test]
    fn empty_utterance_is_zero_vector() {
        let v = fallback_embed(&utt(&[]), 16, 3);
        assert_eq!(v.len(), 16);
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn deterministic_bitwise() {
        let u = utt(&["The cat sat.", "On the mat!"]);
        let a = fallback_embed(&u, 768, 3);
        let b = fallback_embed(&u, 768, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn only_last_k_sentences_matter() {
        let long = utt(&["one", "two here", "three x", "four y z", "five end"]);
        let tail = utt(&["three x", "four y z", "five end"]);
        assert_eq!(fallback_embed(&long, 64, 3), fallback_embed(&tail, 64, 3));
    }

    #[test]
    fn unit_norm_when_any_token_exists() {
        let v = fallback_embed(&utt(&["hello world"]), 32, 3);
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn punctuation_only_text_is_zero() {
        let v = fallback_embed(&utt(&["... !!! ---"]), 8, 3);
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn case_insensitive_tokens() {
        assert_eq!(
            fallback_embed(&utt(&["Apple Banana"]), 128, 3),
            fallback_embed(&utt(&["apple banana"]), 128, 3)
        );
    }
}
