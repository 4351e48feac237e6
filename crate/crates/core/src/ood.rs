//! Out-of-distribution detection scored by AUROC.
//!
//! OoD instances are the positive class; a higher uncertainty score should
//! indicate OoD. The estimator is the Mann-Whitney statistic with half credit
//! for ties, computed from average ranks. All counting is done in integers
//! (ranks are doubled so tie averages stay integral) and divided once at the
//! end, so the rank and pairwise routes produce bit-identical values.

use rayon::prelude::*;

use crate::error::{Result, UqError};
use crate::measures::{decompose, Component, ScoringRule, SecondOrderSample};
use crate::selective::shared_classes;

/// Uncertainty scores of in-distribution and out-of-distribution instances.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSplit {
    id_scores: Vec<f64>,
    ood_scores: Vec<f64>,
}

impl ScoreSplit {
    pub fn new(id_scores: Vec<f64>, ood_scores: Vec<f64>) -> Result<Self> {
        Ok(Self {
            id_scores: validate_side(id_scores, "in-distribution")?,
            ood_scores: validate_side(ood_scores, "out-of-distribution")?,
        })
    }

    pub fn id_scores(&self) -> &[f64] {
        &self.id_scores
    }

    pub fn ood_scores(&self) -> &[f64] {
        &self.ood_scores
    }

    /// The split with the roles of the two sides exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            id_scores: self.ood_scores.clone(),
            ood_scores: self.id_scores.clone(),
        }
    }
}

fn validate_side(scores: Vec<f64>, side: &'static str) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(UqError::EmptySide { side });
    }
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(UqError::NonFiniteScore { side, index });
    }
    // -0.0 and 0.0 must land in the same tie group.
    Ok(scores.into_iter().map(|s| s + 0.0).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AurocResult {
    pub auroc: f64,
    pub n_id: usize,
    pub n_ood: usize,
    /// Rule and component that produced the scores, when known.
    pub criterion: Option<(ScoringRule, Component)>,
}

/// AUROC via a single sort with average ranks for ties.
pub fn auroc(split: &ScoreSplit) -> AurocResult {
    let n_id = split.id_scores.len();
    let n_ood = split.ood_scores.len();

    let mut pooled: Vec<(f64, bool)> = split
        .ood_scores
        .iter()
        .map(|&s| (s, true))
        .chain(split.id_scores.iter().map(|&s| (s, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Sum of doubled average ranks of the OoD scores.
    let mut rank_sum2: u128 = 0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        let doubled_rank = (i + 1 + j) as u128;
        let positives = pooled[i..j].iter().filter(|p| p.1).count() as u128;
        rank_sum2 += doubled_rank * positives;
        i = j;
    }
    let m = n_ood as u128;
    let u2 = rank_sum2 - m * (m + 1);
    AurocResult {
        auroc: ratio(u2, n_id, n_ood),
        n_id,
        n_ood,
        criterion: None,
    }
}

/// AUROC straight from the definition, over all `n_id · n_ood` pairs.
pub fn auroc_pairwise(split: &ScoreSplit) -> AurocResult {
    let n_id = split.id_scores.len();
    let n_ood = split.ood_scores.len();
    let mut u2: u128 = 0;
    for &o in &split.ood_scores {
        for &i in &split.id_scores {
            if o > i {
                u2 += 2;
            } else if o == i {
                u2 += 1;
            }
        }
    }
    AurocResult {
        auroc: ratio(u2, n_id, n_ood),
        n_id,
        n_ood,
        criterion: None,
    }
}

fn ratio(u2: u128, n_id: usize, n_ood: usize) -> f64 {
    u2 as f64 / (2 * n_id as u128 * n_ood as u128) as f64
}

/// Scores every sample by `component` under `rule` and computes the AUROC.
pub fn run_ood(
    id_samples: &[SecondOrderSample],
    ood_samples: &[SecondOrderSample],
    rule: ScoringRule,
    component: Component,
) -> Result<AurocResult> {
    if id_samples.is_empty() {
        return Err(UqError::EmptySide {
            side: "in-distribution",
        });
    }
    if ood_samples.is_empty() {
        return Err(UqError::EmptySide {
            side: "out-of-distribution",
        });
    }
    shared_classes(id_samples.iter().chain(ood_samples))?;
    let score = |samples: &[SecondOrderSample]| -> Vec<f64> {
        samples
            .par_iter()
            .map(|s| decompose(rule, s).get(component))
            .collect()
    };
    let split = ScoreSplit::new(score(id_samples), score(ood_samples))?;
    let mut result = auroc(&split);
    result.criterion = Some((rule, component));
    Ok(result)
}
