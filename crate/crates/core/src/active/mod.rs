//! Pool-based active learning with a bagged-tree ensemble.
//!
//! Each round fits the ensemble on the labeled set, records the zero-one
//! loss of the model-average prediction on a fixed test set, then moves a
//! batch of pool instances into the labeled set according to an
//! [`AcquisitionStrategy`].

pub mod data;
pub mod forest;

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use data::{
    blob_centers, make_blobs, make_epistemic_gap, make_epistemic_gap_with, BlobConfig,
    EpistemicGap, GapConfig, TabularDataset,
};
pub use forest::{fit, predict_second_order, DecisionTree, EnsembleLearner, LearnerConfig};

use crate::error::{Result, UqError};
use crate::measures::{decompose, Component, ScoringRule, SecondOrderSample};

/// ChaCha stream reserved for acquisition draws; tree streams use small indices.
const ACQUISITION_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AcquisitionStrategy {
    Random,
    Uncertainty {
        rule: ScoringRule,
        component: Component,
    },
}

impl AcquisitionStrategy {
    pub fn epistemic(rule: ScoringRule) -> Self {
        AcquisitionStrategy::Uncertainty {
            rule,
            component: Component::Epistemic,
        }
    }
}

impl fmt::Display for AcquisitionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcquisitionStrategy::Random => f.write_str("random"),
            AcquisitionStrategy::Uncertainty { rule, component } => {
                write!(f, "{rule}-{component}")
            }
        }
    }
}

/// Accepts `random`, `<rule>` (epistemic), `<rule>:<component>` or `<rule>-<component>`.
impl FromStr for AcquisitionStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("random") {
            return Ok(AcquisitionStrategy::Random);
        }
        if let Ok(rule) = s.parse::<ScoringRule>() {
            return Ok(AcquisitionStrategy::epistemic(rule));
        }
        let split = s.split_once(':').or_else(|| s.rsplit_once('-'));
        match split {
            Some((rule, component)) => Ok(AcquisitionStrategy::Uncertainty {
                rule: rule.parse()?,
                component: component.parse()?,
            }),
            None => Err(format!("unknown acquisition strategy `{s}`")),
        }
    }
}

/// Picks `batch` positions of `pool_samples`.
///
/// `Random` draws uniformly without replacement and returns the positions in
/// ascending order. `Uncertainty` returns the `batch` largest component
/// values, largest first, ties to the smaller position.
pub fn acquire<R: Rng + ?Sized>(
    pool_samples: &[SecondOrderSample],
    strategy: AcquisitionStrategy,
    batch: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = pool_samples.len();
    if batch > n {
        return Err(UqError::BatchTooLarge {
            requested: batch,
            available: n,
        });
    }
    match strategy {
        AcquisitionStrategy::Random => {
            let mut picked = sample(rng, n, batch).into_vec();
            picked.sort_unstable();
            Ok(picked)
        }
        AcquisitionStrategy::Uncertainty { rule, component } => {
            let scores: Vec<f64> = pool_samples
                .par_iter()
                .map(|s| decompose(rule, s).get(component))
                .collect();
            Ok(top_k(&scores, batch))
        }
    }
}

fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Disjoint row-index sets of one active-learning experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSplit {
    pub initial: Vec<usize>,
    pub pool: Vec<usize>,
    pub test: Vec<usize>,
}

impl From<&EpistemicGap> for DataSplit {
    fn from(g: &EpistemicGap) -> Self {
        Self {
            initial: g.initial.clone(),
            pool: g.pool.clone(),
            test: g.test.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRound {
    pub round: usize,
    pub labeled_count: usize,
    pub test_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveLearningTrace {
    pub strategy: AcquisitionStrategy,
    pub seed: u64,
    pub rounds: Vec<TraceRound>,
}

impl ActiveLearningTrace {
    /// First round whose test loss is at most `target`.
    pub fn rounds_to_target(&self, target: f64) -> Option<usize> {
        self.rounds
            .iter()
            .find(|r| r.test_loss <= target)
            .map(|r| r.round)
    }

    pub fn final_loss(&self) -> f64 {
        self.rounds.last().map_or(f64::NAN, |r| r.test_loss)
    }
}

/// Zero-one loss of the model-average argmax over `rows` of `data`.
pub fn zero_one_error(
    learner: &EnsembleLearner,
    data: &TabularDataset,
    rows: &[usize],
) -> Result<f64> {
    if rows.is_empty() {
        return Err(UqError::EmptyInput);
    }
    let wrong = rows
        .par_iter()
        .map(|&i| {
            let s = learner.predict_second_order(data.row(i))?;
            Ok(usize::from(s.mean().argmax() != data.label(i)))
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum::<usize>();
    Ok(wrong as f64 / rows.len() as f64)
}

fn check_split(data: &TabularDataset, split: &DataSplit) -> Result<()> {
    let mut owner = vec![false; data.len()];
    for &i in split.initial.iter().chain(&split.pool).chain(&split.test) {
        if i >= data.len() {
            return Err(UqError::IndexOutOfRange {
                index: i,
                len: data.len(),
            });
        }
        if std::mem::replace(&mut owner[i], true) {
            return Err(UqError::SplitOverlap(i));
        }
    }
    if split.test.is_empty() {
        return Err(UqError::EmptyInput);
    }
    Ok(())
}

/// Runs `rounds` acquisition rounds of `batch` instances each.
///
/// The trace has `rounds + 1` entries: the evaluation before any acquisition
/// and one after each round. Labeled rows are kept sorted so the fit (seeded
/// with `seed` every round) depends only on the labeled set.
#[allow(clippy::too_many_arguments)]
pub fn run_active_learning(
    data: &TabularDataset,
    split: &DataSplit,
    config: &LearnerConfig,
    strategy: AcquisitionStrategy,
    rounds: usize,
    batch: usize,
    seed: u64,
) -> Result<ActiveLearningTrace> {
    check_split(data, split)?;
    let needed = rounds.saturating_mul(batch);
    if needed > split.pool.len() {
        return Err(UqError::BatchTooLarge {
            requested: needed,
            available: split.pool.len(),
        });
    }

    let mut labeled = split.initial.clone();
    labeled.sort_unstable();
    let mut pool = split.pool.clone();
    pool.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ACQUISITION_STREAM);

    let mut trace = Vec::with_capacity(rounds + 1);
    for round in 0..=rounds {
        let learner = fit(config, &data.subset(&labeled)?, seed)?;
        trace.push(TraceRound {
            round,
            labeled_count: labeled.len(),
            test_loss: zero_one_error(&learner, data, &split.test)?,
        });
        if round == rounds {
            break;
        }

        let pool_samples = pool
            .par_iter()
            .map(|&i| learner.predict_second_order(data.row(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut picked = acquire(&pool_samples, strategy, batch, &mut rng)?;
        picked.sort_unstable();
        for &pos in picked.iter().rev() {
            labeled.push(pool.remove(pos));
        }
        labeled.sort_unstable();
    }
    Ok(ActiveLearningTrace {
        strategy,
        seed,
        rounds: trace,
    })
}
