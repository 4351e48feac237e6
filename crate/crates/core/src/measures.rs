//! Proper scoring rules and the total / aleatoric / epistemic decomposition
//! of finite second-order beliefs.
//!
//! A belief over the class-probability simplex is represented by `M` sampled
//! first-order distributions (ensemble members, posterior draws). For a proper
//! scoring rule `ℓ` with expected loss `L(θ̂, θ) = E_{y~θ} ℓ(θ̂, y)`, entropy
//! `H(θ) = L(θ, θ)` and divergence `D(θ̂, θ) = L(θ̂, θ) − H(θ)`:
//!
//! ```text
//! TU = mean_m L(θ̄, θ_m)     AU = mean_m H(θ_m)     EU = mean_m D(θ̄, θ_m)
//! ```
//!
//! where `θ̄` is the member average. [`decompose`] evaluates the closed forms of
//! each rule, [`generic_triple`] evaluates the expectations using nothing but
//! [`loss`] and serves as the oracle for the closed forms.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, UqError};

/// Maximum allowed deviation of `sum(probs)` from 1.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

/// Entries down to this negative value are treated as rounding noise and clamped to zero.
const NEGATIVE_SLACK: f64 = 1e-12;

/// A point on the probability simplex over `K >= 2` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalDistribution {
    probs: Vec<f64>,
}

impl CategoricalDistribution {
    /// Validates `probs` verbatim (no renormalization).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_simplex(&probs, false)
    }

    pub fn uniform(classes: usize) -> Result<Self> {
        if classes < 2 {
            return Err(UqError::TooFewClasses(classes));
        }
        Ok(Self {
            probs: vec![1.0 / classes as f64; classes],
        })
    }

    pub fn point_mass(classes: usize, class: usize) -> Result<Self> {
        if classes < 2 {
            return Err(UqError::TooFewClasses(classes));
        }
        if class >= classes {
            return Err(UqError::LabelOutOfRange {
                label: class,
                classes,
            });
        }
        let mut probs = vec![0.0; classes];
        probs[class] = 1.0;
        Ok(Self { probs })
    }

    /// Wraps a vector already known to satisfy the simplex invariants.
    pub(crate) fn from_trusted(probs: Vec<f64>) -> Self {
        debug_assert!(probs.len() >= 2);
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-6);
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_classes(&self) -> usize {
        self.probs.len()
    }

    /// Index of the largest probability; ties go to the smallest index.
    pub fn argmax(&self) -> usize {
        argmax(&self.probs)
    }

    pub fn max_prob(&self) -> f64 {
        self.probs[self.argmax()]
    }

    pub fn l2_norm(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum::<f64>().sqrt()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }
}

/// Smallest-index argmax of a non-empty slice.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Turns a raw probability vector into a [`CategoricalDistribution`].
///
/// Without `renormalize` the simplex invariants are checked as given (entries
/// in `[-1e-12, 0)` are clamped to zero). With `renormalize` negative entries
/// are clamped and the vector is divided by its sum.
pub fn validate_simplex(raw: &[f64], renormalize: bool) -> Result<CategoricalDistribution> {
    if raw.is_empty() {
        return Err(UqError::EmptyVector);
    }
    if raw.len() < 2 {
        return Err(UqError::TooFewClasses(raw.len()));
    }
    if let Some((index, &value)) = raw.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(UqError::NonFinite { index, value });
    }

    if renormalize {
        let clamped: Vec<f64> = raw.iter().map(|&v| v.max(0.0)).collect();
        let sum: f64 = clamped.iter().sum();
        if sum <= 0.0 {
            return Err(UqError::ZeroMass { sum });
        }
        let probs = clamped.into_iter().map(|v| v / sum).collect();
        return Ok(CategoricalDistribution { probs });
    }

    if let Some((index, &value)) = raw.iter().enumerate().find(|(_, &v)| v < -NEGATIVE_SLACK) {
        return Err(UqError::NegativeEntry { index, value });
    }
    let sum: f64 = raw.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
        return Err(UqError::NotNormalized { sum });
    }
    let probs = raw.iter().map(|&v| v.max(0.0)).collect();
    Ok(CategoricalDistribution { probs })
}

/// `M >= 1` first-order distributions over a shared class set, plus their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderSample {
    members: Vec<CategoricalDistribution>,
    mean: CategoricalDistribution,
}

impl SecondOrderSample {
    pub fn new(members: Vec<CategoricalDistribution>) -> Result<Self> {
        let first = members.first().ok_or(UqError::EmptyInput)?;
        let k = first.n_classes();
        if let Some(bad) = members.iter().find(|m| m.n_classes() != k) {
            return Err(UqError::DimensionMismatch {
                expected: k,
                found: bad.n_classes(),
            });
        }
        let mean = average(&members, k);
        Ok(Self { members, mean })
    }

    /// Builds a sample from raw rows, validating each with [`validate_simplex`].
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], renormalize: bool) -> Result<Self> {
        let members = rows
            .iter()
            .map(|r| validate_simplex(r.as_ref(), renormalize))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn members(&self) -> &[CategoricalDistribution] {
        &self.members
    }

    /// The Bayesian model average `θ̄`.
    pub fn mean(&self) -> &CategoricalDistribution {
        &self.mean
    }

    pub fn n_members(&self) -> usize {
        self.members.len()
    }

    pub fn n_classes(&self) -> usize {
        self.mean.n_classes()
    }
}

fn average(members: &[CategoricalDistribution], k: usize) -> CategoricalDistribution {
    // Identical members average to themselves exactly.
    if members.iter().all(|m| m == &members[0]) {
        return members[0].clone();
    }
    let mut acc = vec![0.0; k];
    for m in members {
        for (a, p) in acc.iter_mut().zip(m.probs()) {
            *a += p;
        }
    }
    let scale = members.len() as f64;
    CategoricalDistribution::from_trusted(acc.into_iter().map(|a| a / scale).collect())
}

/// Component-wise mean of the members of `sample`.
pub fn mean_distribution(sample: &SecondOrderSample) -> CategoricalDistribution {
    sample.mean().clone()
}

/// The four supported proper scoring rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScoringRule {
    Log,
    Brier,
    ZeroOne,
    Spherical,
}

impl ScoringRule {
    pub const ALL: [ScoringRule; 4] = [
        ScoringRule::Log,
        ScoringRule::Brier,
        ScoringRule::ZeroOne,
        ScoringRule::Spherical,
    ];

    /// Zero-one loss is proper but not strictly proper.
    pub fn is_strictly_proper(self) -> bool {
        !matches!(self, ScoringRule::ZeroOne)
    }

    pub fn name(self) -> &'static str {
        match self {
            ScoringRule::Log => "log",
            ScoringRule::Brier => "brier",
            ScoringRule::ZeroOne => "zero-one",
            ScoringRule::Spherical => "spherical",
        }
    }
}

impl fmt::Display for ScoringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoringRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "log" => Ok(ScoringRule::Log),
            "brier" => Ok(ScoringRule::Brier),
            "zero-one" | "zeroone" | "zero_one" | "01" => Ok(ScoringRule::ZeroOne),
            "spherical" => Ok(ScoringRule::Spherical),
            other => Err(format!("unknown scoring rule `{other}`")),
        }
    }
}

/// Which part of the decomposition to use as a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Total,
    Aleatoric,
    Epistemic,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Total, Component::Aleatoric, Component::Epistemic];

    pub fn name(self) -> &'static str {
        match self {
            Component::Total => "total",
            Component::Aleatoric => "aleatoric",
            Component::Epistemic => "epistemic",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "total" | "tu" => Ok(Component::Total),
            "aleatoric" | "au" => Ok(Component::Aleatoric),
            "epistemic" | "eu" => Ok(Component::Epistemic),
            other => Err(format!("unknown uncertainty component `{other}`")),
        }
    }
}

/// Total, aleatoric and epistemic uncertainty under one scoring rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyTriple {
    pub total: f64,
    pub aleatoric: f64,
    pub epistemic: f64,
    pub rule: ScoringRule,
}

impl UncertaintyTriple {
    pub fn get(&self, component: Component) -> f64 {
        match component {
            Component::Total => self.total,
            Component::Aleatoric => self.aleatoric,
            Component::Epistemic => self.epistemic,
        }
    }

    /// `total − aleatoric − epistemic`, with `∞ − ∞` read as zero when one of
    /// the parts carries the infinity.
    pub fn residual(&self) -> f64 {
        if self.total.is_infinite() {
            if self.aleatoric.is_infinite() || self.epistemic.is_infinite() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.total - self.aleatoric - self.epistemic
        }
    }
}

fn check_dims(prediction: &CategoricalDistribution, truth: &CategoricalDistribution) -> Result<()> {
    if prediction.n_classes() != truth.n_classes() {
        return Err(UqError::DimensionMismatch {
            expected: truth.n_classes(),
            found: prediction.n_classes(),
        });
    }
    Ok(())
}

/// Loss of predicting `prediction` when class `label` (0-based) is observed.
///
/// The log loss is `+∞` when the observed class has probability zero.
pub fn loss(rule: ScoringRule, prediction: &CategoricalDistribution, label: usize) -> Result<f64> {
    let classes = prediction.n_classes();
    if label >= classes {
        return Err(UqError::LabelOutOfRange { label, classes });
    }
    Ok(loss_unchecked(rule, prediction.probs(), label))
}

pub(crate) fn loss_unchecked(rule: ScoringRule, p: &[f64], label: usize) -> f64 {
    match rule {
        ScoringRule::Log => {
            if p[label] == 0.0 {
                f64::INFINITY
            } else {
                -p[label].ln()
            }
        }
        ScoringRule::Brier => p
            .iter()
            .enumerate()
            .map(|(k, &pk)| {
                let target = if k == label { 1.0 } else { 0.0 };
                (pk - target) * (pk - target)
            })
            .sum(),
        ScoringRule::ZeroOne => {
            if argmax(p) == label {
                0.0
            } else {
                1.0
            }
        }
        ScoringRule::Spherical => {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            1.0 - p[label] / norm
        }
    }
}

fn expected_loss_unchecked(rule: ScoringRule, prediction: &[f64], truth: &[f64]) -> f64 {
    // Zero-probability outcomes contribute nothing, even with an infinite loss.
    truth
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > 0.0)
        .map(|(y, &t)| t * loss_unchecked(rule, prediction, y))
        .sum()
}

/// `E_{y~truth} ℓ(prediction, y)`.
pub fn expected_loss(
    rule: ScoringRule,
    prediction: &CategoricalDistribution,
    truth: &CategoricalDistribution,
) -> Result<f64> {
    check_dims(prediction, truth)?;
    Ok(expected_loss_unchecked(
        rule,
        prediction.probs(),
        truth.probs(),
    ))
}

/// Generalized entropy `H(θ) = L(θ, θ)` in closed form.
pub fn entropy(rule: ScoringRule, truth: &CategoricalDistribution) -> f64 {
    let t = truth.probs();
    let h = match rule {
        ScoringRule::Log => t.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum(),
        ScoringRule::Brier => 1.0 - t.iter().map(|x| x * x).sum::<f64>(),
        ScoringRule::ZeroOne => 1.0 - truth.max_prob(),
        ScoringRule::Spherical => 1.0 - truth.l2_norm(),
    };
    h.max(0.0)
}

/// Divergence `D(θ̂, θ) = L(θ̂, θ) − H(θ)` in closed form.
///
/// For the log loss this is `KL(truth ‖ prediction)` and may be `+∞`.
pub fn divergence(
    rule: ScoringRule,
    prediction: &CategoricalDistribution,
    truth: &CategoricalDistribution,
) -> Result<f64> {
    check_dims(prediction, truth)?;
    Ok(divergence_unchecked(rule, prediction, truth))
}

fn divergence_unchecked(
    rule: ScoringRule,
    prediction: &CategoricalDistribution,
    truth: &CategoricalDistribution,
) -> f64 {
    let (p, t) = (prediction.probs(), truth.probs());
    if p == t {
        return 0.0;
    }
    match rule {
        ScoringRule::Log => t
            .iter()
            .zip(p)
            .filter(|(&tk, _)| tk > 0.0)
            .map(|(&tk, &pk)| {
                if pk == 0.0 {
                    f64::INFINITY
                } else {
                    tk * (tk / pk).ln()
                }
            })
            .sum(),
        ScoringRule::Brier => t.iter().zip(p).map(|(tk, pk)| (pk - tk) * (pk - tk)).sum(),
        ScoringRule::ZeroOne => truth.max_prob() - t[prediction.argmax()],
        ScoringRule::Spherical => {
            let dot: f64 = t.iter().zip(p).map(|(tk, pk)| tk * pk).sum();
            truth.l2_norm() - dot / prediction.l2_norm()
        }
    }
}

/// Closed-form decomposition of `sample` under `rule`.
///
/// Total uncertainty depends on `θ̄` only; aleatoric is the mean member
/// entropy; epistemic is the mean divergence of `θ̄` from each member.
pub fn decompose(rule: ScoringRule, sample: &SecondOrderSample) -> UncertaintyTriple {
    let mean = sample.mean();
    let m = sample.n_members() as f64;
    let total = entropy(rule, mean);
    let aleatoric = sample
        .members()
        .iter()
        .map(|th| entropy(rule, th))
        .sum::<f64>()
        / m;
    let epistemic = sample
        .members()
        .iter()
        .map(|th| divergence_unchecked(rule, mean, th))
        .sum::<f64>()
        / m;
    UncertaintyTriple {
        total,
        aleatoric,
        epistemic,
        rule,
    }
}

/// Decomposition from the expectation definitions, using only [`loss`] and
/// finite label sums. `EU` is obtained as `TU − AU`.
pub fn generic_triple(rule: ScoringRule, sample: &SecondOrderSample) -> UncertaintyTriple {
    let mean = sample.mean().probs();
    let m = sample.n_members() as f64;
    let total = sample
        .members()
        .iter()
        .map(|th| expected_loss_unchecked(rule, mean, th.probs()))
        .sum::<f64>()
        / m;
    let aleatoric = sample
        .members()
        .iter()
        .map(|th| expected_loss_unchecked(rule, th.probs(), th.probs()))
        .sum::<f64>()
        / m;
    UncertaintyTriple {
        total,
        aleatoric,
        epistemic: total - aleatoric,
        rule,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(p: &[f64]) -> CategoricalDistribution {
        CategoricalDistribution::new(p.to_vec()).unwrap()
    }

    fn sample(rows: &[&[f64]]) -> SecondOrderSample {
        SecondOrderSample::from_rows(rows, false).unwrap()
    }

    #[test]
    fn validate_exact_point() {
        let d = validate_simplex(&[0.5, 0.5], false).unwrap();
        assert_eq!(d.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn validate_renormalizes() {
        let d = validate_simplex(&[2.0, 2.0], true).unwrap();
        assert_eq!(d.probs(), &[0.5, 0.5]);
        let d = validate_simplex(&[-0.5, 1.0, 3.0], true).unwrap();
        assert_eq!(d.probs(), &[0.0, 0.25, 0.75]);
    }

    #[test]
    fn validate_errors() {
        assert!(matches!(
            validate_simplex(&[0.5, 0.4], false),
            Err(UqError::NotNormalized { .. })
        ));
        assert!(matches!(
            validate_simplex(&[1.5, -0.5], false),
            Err(UqError::NegativeEntry { index: 1, .. })
        ));
        assert!(matches!(
            validate_simplex(&[0.0, -1.0], true),
            Err(UqError::ZeroMass { .. })
        ));
        assert!(matches!(
            validate_simplex(&[], false),
            Err(UqError::EmptyVector)
        ));
        assert!(matches!(
            validate_simplex(&[1.0], false),
            Err(UqError::TooFewClasses(1))
        ));
        assert!(matches!(
            validate_simplex(&[f64::NAN, 1.0], true),
            Err(UqError::NonFinite { index: 0, .. })
        ));
    }

    #[test]
    fn validate_tolerates_rounding() {
        let d = validate_simplex(&[0.5 + 4e-10, 0.5, -1e-13], false).unwrap();
        assert_eq!(d.probs()[2], 0.0);
    }

    #[test]
    fn mean_examples() {
        assert_eq!(
            mean_distribution(&sample(&[&[1.0, 0.0], &[0.0, 1.0]])).probs(),
            &[0.5, 0.5]
        );
        let m = mean_distribution(&sample(&[&[0.9, 0.1], &[0.5, 0.5]]));
        assert!((m.probs()[0] - 0.7).abs() < 1e-15 && (m.probs()[1] - 0.3).abs() < 1e-15);
        assert_eq!(
            mean_distribution(&sample(&[&[0.3, 0.7]])).probs(),
            &[0.3, 0.7]
        );
    }

    #[test]
    fn mixed_class_counts_rejected() {
        let err = SecondOrderSample::new(vec![dist(&[0.5, 0.5]), dist(&[0.2, 0.3, 0.5])]);
        assert!(matches!(
            err,
            Err(UqError::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
        assert!(matches!(
            SecondOrderSample::new(vec![]),
            Err(UqError::EmptyInput)
        ));
    }

    #[test]
    fn loss_examples() {
        let ln2 = std::f64::consts::LN_2;
        assert!((loss(ScoringRule::Log, &dist(&[0.5, 0.5]), 0).unwrap() - ln2).abs() < 1e-15);
        assert!((loss(ScoringRule::Brier, &dist(&[0.8, 0.2]), 1).unwrap() - 1.28).abs() < 1e-12);
        assert_eq!(
            loss(ScoringRule::ZeroOne, &dist(&[0.8, 0.2]), 1).unwrap(),
            1.0
        );
        let s = loss(ScoringRule::Spherical, &dist(&[0.6, 0.4]), 0).unwrap();
        assert!((s - 0.167_949_705_662_156_3).abs() < 1e-12, "{s}");
    }

    #[test]
    fn log_loss_of_impossible_label_is_infinite() {
        assert_eq!(
            loss(ScoringRule::Log, &dist(&[1.0, 0.0]), 1).unwrap(),
            f64::INFINITY
        );
        assert!(matches!(
            loss(ScoringRule::Log, &dist(&[1.0, 0.0]), 2),
            Err(UqError::LabelOutOfRange {
                label: 2,
                classes: 2
            })
        ));
    }

    #[test]
    fn zero_one_ties_go_to_smallest_index() {
        let d = dist(&[0.4, 0.4, 0.2]);
        assert_eq!(d.argmax(), 0);
        assert_eq!(loss(ScoringRule::ZeroOne, &d, 0).unwrap(), 0.0);
        assert_eq!(loss(ScoringRule::ZeroOne, &d, 1).unwrap(), 1.0);
    }

    #[test]
    fn expected_loss_examples() {
        let u = dist(&[0.5, 0.5]);
        let l = expected_loss(ScoringRule::Log, &u, &u).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-15);
        let l = expected_loss(ScoringRule::Brier, &dist(&[1.0, 0.0]), &u).unwrap();
        assert!((l - 1.0).abs() < 1e-15);
        let l =
            expected_loss(ScoringRule::ZeroOne, &dist(&[0.7, 0.3]), &dist(&[0.2, 0.8])).unwrap();
        assert!((l - 0.8).abs() < 1e-15);
    }

    #[test]
    fn expected_loss_annihilates_infinite_terms() {
        let pred = dist(&[1.0, 0.0]);
        let truth = dist(&[1.0, 0.0]);
        assert_eq!(expected_loss(ScoringRule::Log, &pred, &truth).unwrap(), 0.0);
        let truth = dist(&[0.5, 0.5]);
        assert_eq!(
            expected_loss(ScoringRule::Log, &pred, &truth).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn expected_loss_dimension_mismatch() {
        let r = expected_loss(
            ScoringRule::Brier,
            &dist(&[0.5, 0.5]),
            &dist(&[0.2, 0.3, 0.5]),
        );
        assert!(matches!(r, Err(UqError::DimensionMismatch { .. })));
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy(ScoringRule::Brier, &dist(&[0.5, 0.5])) - 0.5).abs() < 1e-15);
        assert!((entropy(ScoringRule::ZeroOne, &dist(&[0.7, 0.3])) - 0.3).abs() < 1e-15);
        assert_eq!(entropy(ScoringRule::Log, &dist(&[1.0, 0.0])), 0.0);
    }

    #[test]
    fn entropy_matches_self_expected_loss() {
        let d = dist(&[0.1, 0.2, 0.3, 0.4]);
        for rule in ScoringRule::ALL {
            let h = entropy(rule, &d);
            let l = expected_loss(rule, &d, &d).unwrap();
            assert!((h - l).abs() < 1e-12, "{rule}: {h} vs {l}");
        }
    }

    #[test]
    fn divergence_examples() {
        let u = dist(&[0.5, 0.5]);
        assert_eq!(divergence(ScoringRule::Log, &u, &u).unwrap(), 0.0);
        let d = divergence(ScoringRule::Brier, &dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
        let d = divergence(ScoringRule::ZeroOne, &dist(&[0.4, 0.6]), &dist(&[0.7, 0.3])).unwrap();
        assert!((d - 0.4).abs() < 1e-15);
        let d = divergence(ScoringRule::ZeroOne, &dist(&[0.6, 0.4]), &dist(&[0.9, 0.1])).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn log_divergence_infinite_outside_support() {
        let d = divergence(ScoringRule::Log, &dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap();
        assert_eq!(d, f64::INFINITY);
        let d = divergence(ScoringRule::Log, &dist(&[0.5, 0.5]), &dist(&[1.0, 0.0])).unwrap();
        assert!((d - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn strictness_flags() {
        assert!(ScoringRule::Log.is_strictly_proper());
        assert!(ScoringRule::Brier.is_strictly_proper());
        assert!(ScoringRule::Spherical.is_strictly_proper());
        assert!(!ScoringRule::ZeroOne.is_strictly_proper());
    }

    #[test]
    fn single_member_has_zero_epistemic() {
        let s = sample(&[&[0.2, 0.3, 0.5]]);
        for rule in ScoringRule::ALL {
            assert_eq!(decompose(rule, &s).epistemic, 0.0, "{rule}");
        }
    }

    #[test]
    fn brier_and_zero_one_fixtures() {
        let t = decompose(ScoringRule::Brier, &sample(&[&[1.0, 0.0], &[0.0, 1.0]]));
        assert!((t.total - 0.5).abs() < 1e-12);
        assert!(t.aleatoric.abs() < 1e-12);
        assert!((t.epistemic - 0.5).abs() < 1e-12);

        let t = decompose(ScoringRule::ZeroOne, &sample(&[&[0.9, 0.1], &[0.4, 0.6]]));
        assert!((t.total - 0.35).abs() < 1e-12);
        assert!((t.aleatoric - 0.25).abs() < 1e-12);
        assert!((t.epistemic - 0.10).abs() < 1e-12);
    }

    #[test]
    fn generic_point_mass_and_spherical() {
        let t = generic_triple(ScoringRule::Log, &sample(&[&[1.0, 0.0]]));
        assert_eq!((t.total, t.aleatoric, t.epistemic), (0.0, 0.0, 0.0));

        let t = generic_triple(ScoringRule::Spherical, &sample(&[&[0.5, 0.5], &[0.5, 0.5]]));
        let expected = 1.0 - 0.5f64.sqrt();
        assert!((t.total - expected).abs() < 1e-12);
        assert!((t.aleatoric - expected).abs() < 1e-12);
        assert!(t.epistemic.abs() < 1e-12);
    }

    #[test]
    fn residual_is_extended_real_aware() {
        let t = UncertaintyTriple {
            total: f64::INFINITY,
            aleatoric: 1.0,
            epistemic: f64::INFINITY,
            rule: ScoringRule::Log,
        };
        assert_eq!(t.residual(), 0.0);
    }

    #[test]
    fn parse_names() {
        for rule in ScoringRule::ALL {
            assert_eq!(rule.name().parse::<ScoringRule>().unwrap(), rule);
        }
        for c in Component::ALL {
            assert_eq!(c.name().parse::<Component>().unwrap(), c);
        }
        assert!("hinge".parse::<ScoringRule>().is_err());
    }
}
