//! Loss-rejection curves and the area under them (AULC).
//!
//! Instances are ranked by a score, the `k` best-ranked are retained, and the
//! mean task loss of the retained prefix is recorded for `k = 1..n`. The AULC
//! is the Riemann sum `(1/n) Σ_k (1/k) Σ_{j<=k} c_{π(j)}`, which rearranges to
//! `(1/n) Σ_j w_j c_{π(j)}` with harmonic tail weights `w_j = Σ_{k>=j} 1/k`.
//! Because the weights decrease, the area is minimized by retaining instances
//! in non-decreasing order of expected loss.

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Result, UqError};
use crate::measures::{decompose, loss, Component, ScoringRule, SecondOrderSample};

/// Largest `n` accepted by the brute-force permutation oracle.
pub const BRUTE_FORCE_MAX: usize = 8;

/// Per-instance losses (realized or expected). May contain `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceLosses(Vec<f64>);

impl InstanceLosses {
    pub fn new(losses: Vec<f64>) -> Result<Self> {
        if losses.is_empty() {
            return Err(UqError::EmptyInput);
        }
        if let Some((index, &value)) = losses
            .iter()
            .enumerate()
            .find(|(_, v)| v.is_nan() || **v < 0.0)
        {
            return Err(UqError::InvalidLoss { index, value });
        }
        Ok(Self(losses))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sort direction for the retained prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Least uncertain first: low AULC means good selective prediction.
    #[default]
    Ascending,
    /// Most uncertain first.
    Descending,
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ascending" | "asc" => Ok(Direction::Ascending),
            "descending" | "desc" => Ok(Direction::Descending),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Ascending => "ascending",
            Direction::Descending => "descending",
        })
    }
}

/// What produced an [`Ordering`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Criterion {
    Uncertainty {
        rule: ScoringRule,
        component: Component,
    },
    Scores,
}

/// A permutation of `0..n`; `perm[j]` is the instance retained at position `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ordering {
    pub perm: Vec<usize>,
    pub criterion: Criterion,
    pub direction: Direction,
}

impl Ordering {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            criterion: Criterion::Scores,
            direction: Direction::Ascending,
        }
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        check_permutation(&perm)?;
        Ok(Self {
            perm,
            criterion: Criterion::Scores,
            direction: Direction::Ascending,
        })
    }
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(UqError::InvalidPermutation(n));
        }
    }
    Ok(())
}

/// Stable sort of instance indices by score; ties keep original index order.
pub fn order_by_scores(scores: &[f64], direction: Direction) -> Ordering {
    let mut perm: Vec<usize> = (0..scores.len()).collect();
    match direction {
        Direction::Ascending => perm.sort_by(|&a, &b| scores[a].total_cmp(&scores[b])),
        Direction::Descending => perm.sort_by(|&a, &b| scores[b].total_cmp(&scores[a])),
    }
    Ordering {
        perm,
        criterion: Criterion::Scores,
        direction,
    }
}

/// Orders instances by one uncertainty component, least uncertain first.
pub fn order_by_uncertainty(
    samples: &[SecondOrderSample],
    rule: ScoringRule,
    component: Component,
) -> Result<Ordering> {
    order_by_uncertainty_dir(samples, rule, component, Direction::Ascending)
}

pub fn order_by_uncertainty_dir(
    samples: &[SecondOrderSample],
    rule: ScoringRule,
    component: Component,
    direction: Direction,
) -> Result<Ordering> {
    shared_classes(samples.iter())?;
    let scores: Vec<f64> = samples
        .par_iter()
        .map(|s| decompose(rule, s).get(component))
        .collect();
    let mut ordering = order_by_scores(&scores, direction);
    ordering.criterion = Criterion::Uncertainty { rule, component };
    Ok(ordering)
}

pub(crate) fn shared_classes<'a>(
    mut samples: impl Iterator<Item = &'a SecondOrderSample>,
) -> Result<usize> {
    let k = samples.next().ok_or(UqError::EmptyInput)?.n_classes();
    for s in samples {
        if s.n_classes() != k {
            return Err(UqError::DimensionMismatch {
                expected: k,
                found: s.n_classes(),
            });
        }
    }
    Ok(k)
}

/// One point of a loss-rejection curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Number of retained instances.
    pub retained: usize,
    /// Mean loss over the retained prefix.
    pub mean_loss: f64,
}

impl CurvePoint {
    pub fn coverage(&self, n: usize) -> f64 {
        self.retained as f64 / n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AulcResult {
    pub aulc: f64,
    pub curve: Vec<CurvePoint>,
}

/// Harmonic tail weights `w_j = Σ_{k=j}^{n} 1/k` for `j = 1..n`.
pub fn harmonic_weights(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    let mut acc = 0.0;
    for j in (0..n).rev() {
        acc += 1.0 / (j + 1) as f64;
        w[j] = acc;
    }
    w
}

fn check_lengths(losses: &InstanceLosses, ordering: &Ordering) -> Result<()> {
    if losses.len() != ordering.perm.len() {
        return Err(UqError::LengthMismatch {
            losses: losses.len(),
            perm: ordering.perm.len(),
        });
    }
    check_permutation(&ordering.perm)
}

/// Loss-rejection curve and its area, via the prefix-mean Riemann sum.
pub fn aulc(losses: &InstanceLosses, ordering: &Ordering) -> Result<AulcResult> {
    check_lengths(losses, ordering)?;
    let c = losses.as_slice();
    let n = c.len();
    let mut curve = Vec::with_capacity(n);
    let mut prefix = 0.0;
    let mut area = 0.0;
    for (j, &idx) in ordering.perm.iter().enumerate() {
        prefix += c[idx];
        let k = j + 1;
        let mean_loss = prefix / k as f64;
        area += mean_loss;
        curve.push(CurvePoint {
            retained: k,
            mean_loss,
        });
    }
    Ok(AulcResult {
        aulc: area / n as f64,
        curve,
    })
}

/// The same area as [`aulc`], computed as the harmonic-weighted sum.
pub fn aulc_weighted(losses: &InstanceLosses, ordering: &Ordering) -> Result<f64> {
    check_lengths(losses, ordering)?;
    let c = losses.as_slice();
    let n = c.len();
    let weighted: f64 = harmonic_weights(n)
        .iter()
        .zip(&ordering.perm)
        .map(|(w, &idx)| w * c[idx])
        .sum();
    Ok(weighted / n as f64)
}

fn riemann_area(c: &[f64], perm: &[usize]) -> f64 {
    let mut prefix = 0.0;
    let mut area = 0.0;
    for (j, &idx) in perm.iter().enumerate() {
        prefix += c[idx];
        area += prefix / (j + 1) as f64;
    }
    area / c.len() as f64
}

/// Exhaustive search over all `n!` orderings for the smallest AULC.
///
/// Permutations are scanned in lexicographic order and only a strictly
/// smaller area replaces the incumbent, so the lexicographically first
/// minimizer is returned.
pub fn optimal_aulc_bruteforce(expected_losses: &InstanceLosses) -> Result<(Ordering, f64)> {
    let n = expected_losses.len();
    if n > BRUTE_FORCE_MAX {
        return Err(UqError::TooLarge(n));
    }
    let (perm, best) = scan_permutations(expected_losses.as_slice(), None);
    Ok((
        Ordering {
            perm,
            criterion: Criterion::Scores,
            direction: Direction::Ascending,
        },
        best,
    ))
}

/// Parallel variant of [`optimal_aulc_bruteforce`]; the result is identical.
pub fn optimal_aulc_bruteforce_par(expected_losses: &InstanceLosses) -> Result<(Ordering, f64)> {
    let n = expected_losses.len();
    if n > BRUTE_FORCE_MAX {
        return Err(UqError::TooLarge(n));
    }
    let c = expected_losses.as_slice();
    // One task per leading element; lexicographic order is preserved across
    // tasks because the leading element is the most significant position.
    let per_head: Vec<(Vec<usize>, f64)> = (0..n)
        .into_par_iter()
        .map(|head| scan_permutations(c, Some(head)))
        .collect();
    let (perm, best) = per_head
        .into_iter()
        .reduce(|acc, cand| if cand.1 < acc.1 { cand } else { acc })
        .expect("n >= 1");
    Ok((
        Ordering {
            perm,
            criterion: Criterion::Scores,
            direction: Direction::Ascending,
        },
        best,
    ))
}

fn scan_permutations(c: &[f64], head: Option<usize>) -> (Vec<usize>, f64) {
    let n = c.len();
    let mut best_perm: Vec<usize> = Vec::new();
    let mut best = f64::INFINITY;
    let mut consider = |perm: Vec<usize>| {
        let area = riemann_area(c, &perm);
        if best_perm.is_empty() || area < best {
            best = area;
            best_perm = perm;
        }
    };
    match head {
        None => (0..n).permutations(n).for_each(&mut consider),
        Some(h) => {
            let rest: Vec<usize> = (0..n).filter(|&i| i != h).collect();
            let len = rest.len();
            rest.into_iter().permutations(len).for_each(|tail| {
                let mut perm = Vec::with_capacity(n);
                perm.push(h);
                perm.extend(tail);
                consider(perm);
            });
        }
    }
    (best_perm, best)
}

/// Selective prediction with the model average as point prediction.
///
/// The realized task loss of instance `i` is `ℓ_task(θ̄_i, y_i)`; instances are
/// retained in the order given by `uncertainty_rule` / `component`.
pub fn run_selective_prediction(
    predictions: &[(SecondOrderSample, usize)],
    task_rule: ScoringRule,
    uncertainty_rule: ScoringRule,
    component: Component,
    direction: Direction,
) -> Result<AulcResult> {
    let samples: Vec<SecondOrderSample> = predictions.iter().map(|(s, _)| s.clone()).collect();
    let ordering = order_by_uncertainty_dir(&samples, uncertainty_rule, component, direction)?;
    let losses = predictions
        .par_iter()
        .map(|(s, y)| loss(task_rule, s.mean(), *y))
        .collect::<Result<Vec<f64>>>()?;
    aulc(&InstanceLosses::new(losses)?, &ordering)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn losses(v: &[f64]) -> InstanceLosses {
        InstanceLosses::new(v.to_vec()).unwrap()
    }

    fn perm(p: &[usize]) -> Ordering {
        Ordering::from_perm(p.to_vec()).unwrap()
    }

    #[test]
    fn single_instance() {
        let r = aulc(&losses(&[0.37]), &perm(&[0])).unwrap();
        assert_eq!(r.aulc, 0.37);
        assert_eq!(
            r.curve,
            vec![CurvePoint {
                retained: 1,
                mean_loss: 0.37
            }]
        );
    }

    #[test]
    fn two_instances_both_orders() {
        let l = losses(&[0.0, 1.0]);
        assert!((aulc(&l, &perm(&[0, 1])).unwrap().aulc - 0.25).abs() < 1e-15);
        assert!((aulc(&l, &perm(&[1, 0])).unwrap().aulc - 0.75).abs() < 1e-15);
    }

    #[test]
    fn three_instances_ascending() {
        let l = losses(&[0.1, 0.5, 0.2]);
        let r = aulc(&l, &perm(&[0, 2, 1])).unwrap();
        let expected = (0.1 + 0.15 + 0.8 / 3.0) / 3.0;
        assert!((r.aulc - expected).abs() < 1e-12);
        assert!((r.aulc - 0.172_222).abs() < 1e-6);
        let w = aulc_weighted(&l, &perm(&[0, 2, 1])).unwrap();
        assert!((w - r.aulc).abs() < 1e-12);
    }

    #[test]
    fn length_and_permutation_errors() {
        let l = losses(&[0.1, 0.2]);
        assert!(matches!(
            aulc(&l, &perm(&[0, 1, 2])),
            Err(UqError::LengthMismatch { losses: 2, perm: 3 })
        ));
        assert!(Ordering::from_perm(vec![0, 0]).is_err());
        assert!(InstanceLosses::new(vec![]).is_err());
        assert!(InstanceLosses::new(vec![-0.1]).is_err());
        assert!(InstanceLosses::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn infinite_loss_poisons_the_area() {
        let l = losses(&[0.1, f64::INFINITY]);
        let r = aulc(&l, &perm(&[0, 1])).unwrap();
        assert_eq!(r.curve[0].mean_loss, 0.1);
        assert_eq!(r.aulc, f64::INFINITY);
        assert_eq!(aulc_weighted(&l, &perm(&[0, 1])).unwrap(), f64::INFINITY);
    }

    #[test]
    fn weights_strictly_decrease() {
        let w = harmonic_weights(50);
        assert!(w.windows(2).all(|p| p[0] > p[1]));
        assert!(*w.last().unwrap() > 0.0);
        assert!((w[0] - (1..=50).map(|k| 1.0 / k as f64).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn scores_order_stably() {
        assert_eq!(
            order_by_scores(&[0.9, 0.1, 0.5], Direction::Ascending).perm,
            vec![1, 2, 0]
        );
        assert_eq!(
            order_by_scores(&[0.3; 4], Direction::Ascending).perm,
            vec![0, 1, 2, 3]
        );
        assert_eq!(
            order_by_scores(&[0.3; 4], Direction::Descending).perm,
            vec![0, 1, 2, 3]
        );
        assert_eq!(
            order_by_scores(&[0.9, 0.1, 0.5], Direction::Descending).perm,
            vec![0, 2, 1]
        );
    }

    #[test]
    fn brute_force_examples() {
        let (o, best) = optimal_aulc_bruteforce(&losses(&[0.5, 0.1, 0.2])).unwrap();
        assert_eq!(o.perm, vec![1, 2, 0]);
        assert!((best - 0.172_222).abs() < 1e-6);

        let (o, best) = optimal_aulc_bruteforce(&losses(&[0.3, 0.3, 0.3])).unwrap();
        assert_eq!(o.perm, vec![0, 1, 2]);
        assert!((best - 0.3).abs() < 1e-15);

        let (o, best) = optimal_aulc_bruteforce(&losses(&[0.0, 1.0])).unwrap();
        assert_eq!(o.perm, vec![0, 1]);
        assert!((best - 0.25).abs() < 1e-15);
    }

    #[test]
    fn brute_force_guard() {
        let l = losses(&[0.1; 9]);
        assert!(matches!(
            optimal_aulc_bruteforce(&l),
            Err(UqError::TooLarge(9))
        ));
        assert!(matches!(
            optimal_aulc_bruteforce_par(&l),
            Err(UqError::TooLarge(9))
        ));
    }

    #[test]
    fn parallel_scan_matches_sequential() {
        let l = losses(&[0.4, 0.1, 0.4, 0.7, 0.0, 0.1]);
        let seq = optimal_aulc_bruteforce(&l).unwrap();
        let par = optimal_aulc_bruteforce_par(&l).unwrap();
        assert_eq!(seq.0.perm, par.0.perm);
        assert_eq!(seq.1.to_bits(), par.1.to_bits());
    }
}
