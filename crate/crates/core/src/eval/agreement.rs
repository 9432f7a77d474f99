//! Annotation-quality metrics: Krippendorff's alpha (nominal metric) and
//! system-vs-annotator consistency.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labels collected for one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationItem {
    pub id: String,
    pub labels: Vec<String>,
}

/// A set of annotated items over a declared nominal category set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationSet {
    categories: Vec<String>,
    items: Vec<AnnotationItem>,
}

impl AnnotationSet {
    /// Build with an explicit category set; every label must belong to it.
    pub fn new(categories: Vec<String>, items: Vec<AnnotationItem>) -> Result<Self> {
        for item in &items {
            for l in &item.labels {
                if !categories.contains(l) {
                    return Err(Error::AnnotationMismatch(format!(
                        "item {}: label {l:?} not in the declared categories",
                        item.id
                    )));
                }
            }
        }
        Ok(AnnotationSet { categories, items })
    }

    /// Build with the category set inferred from the observed labels.
    pub fn from_items(items: Vec<AnnotationItem>) -> Self {
        let mut categories: Vec<String> = items
            .iter()
            .flat_map(|i| i.labels.iter().cloned())
            .collect();
        categories.sort();
        categories.dedup();
        AnnotationSet { categories, items }
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn items(&self) -> &[AnnotationItem] {
        &self.items
    }
}

/// Krippendorff's alpha for nominal data: `1 - D_o / D_e` computed from the
/// coincidence matrix over pairable values. Items with fewer than two labels
/// are excluded from pairing. Perfect agreement yields exactly 1.
pub fn krippendorff_alpha(a: &AnnotationSet) -> Result<f64> {
    let cat_index: BTreeMap<&str, usize> = a
        .categories
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let k = a.categories.len();
    let mut coincidence = vec![vec![0.0f64; k]; k];
    let mut pairable_items = 0usize;

    for item in &a.items {
        let m = item.labels.len();
        if m < 2 {
            continue;
        }
        pairable_items += 1;
        let weight = 1.0 / (m as f64 - 1.0);
        for (i, li) in item.labels.iter().enumerate() {
            for (j, lj) in item.labels.iter().enumerate() {
                if i == j {
                    continue;
                }
                coincidence[cat_index[li.as_str()]][cat_index[lj.as_str()]] += weight;
            }
        }
    }

    if pairable_items == 0 {
        return Err(Error::NoPairableValues);
    }
    if pairable_items < 2 {
        return Err(Error::InsufficientData(
            "alpha needs at least 2 items with 2 or more labels".into(),
        ));
    }

    let n: f64 = coincidence.iter().flatten().sum();
    let marginals: Vec<f64> = (0..k).map(|c| coincidence[c].iter().sum()).collect();

    let observed_disagreement: f64 = (0..k)
        .flat_map(|c| (0..k).filter(move |&d| d != c).map(move |d| (c, d)))
        .map(|(c, d)| coincidence[c][d])
        .sum::<f64>()
        / n;
    if observed_disagreement == 0.0 {
        return Ok(1.0);
    }
    let expected_disagreement: f64 = (0..k)
        .flat_map(|c| (0..k).filter(move |&d| d != c).map(move |d| (c, d)))
        .map(|(c, d)| marginals[c] * marginals[d])
        .sum::<f64>()
        / (n * (n - 1.0));

    Ok(1.0 - observed_disagreement / expected_disagreement)
}

/// Per-category entry of a consistency report.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CategoryConsistency {
    pub items: usize,
    pub consistent: usize,
    pub fraction: f64,
}

/// Fraction of items where the system label matches at least one annotator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub overall: f64,
    pub n_items: usize,
    /// Keyed by system label, mirroring per-type result tables.
    pub per_category: BTreeMap<String, CategoryConsistency>,
}

/// Compare system labels to human annotations by item id. Every system item
/// must exist in the annotation set.
pub fn annotation_consistency(
    system_labels: &[(String, String)],
    annotations: &AnnotationSet,
) -> Result<ConsistencyReport> {
    if system_labels.is_empty() {
        return Err(Error::InsufficientData("no system labels".into()));
    }
    let by_id: BTreeMap<&str, &AnnotationItem> = annotations
        .items
        .iter()
        .map(|i| (i.id.as_str(), i))
        .collect();

    let mut consistent = 0usize;
    let mut per_category: BTreeMap<String, CategoryConsistency> = BTreeMap::new();
    for (id, label) in system_labels {
        let item = by_id
            .get(id.as_str())
            .ok_or_else(|| Error::AnnotationMismatch(format!("no annotations for item {id}")))?;
        let hit = item.labels.iter().any(|l| l == label);
        let entry = per_category.entry(label.clone()).or_default();
        entry.items += 1;
        if hit {
            entry.consistent += 1;
            consistent += 1;
        }
    }
    for entry in per_category.values_mut() {
        entry.fraction = entry.consistent as f64 / entry.items as f64;
    }
    Ok(ConsistencyReport {
        overall: consistent as f64 / system_labels.len() as f64,
        n_items: system_labels.len(),
        per_category,
    })
}
