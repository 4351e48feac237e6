//! Self-checks that compare each fast path against an independent oracle.
//!
//! | suite             | fast path                         | oracle                            |
//! |-------------------|-----------------------------------|-----------------------------------|
//! | `decompose`       | closed-form [`decompose`]         | expectation-form [`generic_triple`] |
//! | `aulc`            | ascending sort, weighted sum      | all permutations, Riemann sum     |
//! | `auroc`           | rank-sum estimator                | all pairs                         |
//! | `binary-ordering` | total uncertainty under each rule | ranking under the log rule        |

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fuzz::random_sample;
use crate::measures::{decompose, generic_triple, ScoringRule, UncertaintyTriple};
use crate::ood::{auroc, auroc_pairwise, ScoreSplit};
use crate::selective::{
    aulc, aulc_weighted, optimal_aulc_bruteforce, order_by_scores, Direction, InstanceLosses,
    Ordering,
};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Decompose,
    Aulc,
    Auroc,
    BinaryOrdering,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Decompose,
        Suite::Aulc,
        Suite::Auroc,
        Suite::BinaryOrdering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Decompose => "decompose",
            Suite::Aulc => "aulc",
            Suite::Auroc => "auroc",
            Suite::BinaryOrdering => "binary-ordering",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Deliberate corruption used to check that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fault {
    /// Adds `delta` to the closed-form epistemic value of `rule`.
    EpistemicOffset { rule: ScoringRule, delta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

pub fn run_suites(suites: &[Suite], options: &VerifyOptions) -> Vec<SuiteReport> {
    suites.iter().map(|&s| run_suite(s, options)).collect()
}

pub fn run_suite(suite: Suite, options: &VerifyOptions) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let checks = match suite {
        Suite::Decompose => decompose_checks(&mut rng, options.fault),
        Suite::Aulc => aulc_checks(&mut rng),
        Suite::Auroc => auroc_checks(&mut rng),
        Suite::BinaryOrdering => binary_ordering_checks(&mut rng),
    };
    SuiteReport { suite, checks }
}

fn closed_form(
    rule: ScoringRule,
    triple: UncertaintyTriple,
    fault: Option<Fault>,
) -> UncertaintyTriple {
    match fault {
        Some(Fault::EpistemicOffset { rule: r, delta }) if r == rule => UncertaintyTriple {
            epistemic: triple.epistemic + delta,
            ..triple
        },
        _ => triple,
    }
}

fn decompose_checks(rng: &mut ChaCha8Rng, fault: Option<Fault>) -> Vec<Check> {
    const CASES: usize = 10_000;
    let mut additivity = 0.0f64;
    let mut oracle = 0.0f64;
    let mut negativity = 0.0f64;
    for _ in 0..CASES {
        let k = rng.random_range(2..=10);
        let m = rng.random_range(1..=50);
        let sample = random_sample(rng, k, m);
        for rule in ScoringRule::ALL {
            let closed = closed_form(rule, decompose(rule, &sample), fault);
            let generic = generic_triple(rule, &sample);
            additivity = additivity.max(closed.residual().abs());
            oracle = oracle
                .max((closed.total - generic.total).abs())
                .max((closed.aleatoric - generic.aleatoric).abs())
                .max((closed.epistemic - generic.epistemic).abs());
            negativity = negativity
                .max(-closed.total)
                .max(-closed.aleatoric)
                .max(-closed.epistemic - 1e-12);
        }
    }
    vec![
        Check {
            name: "TU = AU + EU".into(),
            cases: CASES,
            worst: additivity,
            tolerance: 1e-9,
        },
        Check {
            name: "closed form = expectation form".into(),
            cases: CASES,
            worst: oracle,
            tolerance: 1e-9,
        },
        Check {
            name: "non-negativity".into(),
            cases: CASES,
            worst: negativity.max(0.0),
            tolerance: 0.0,
        },
    ]
}

fn aulc_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    const BRUTE: usize = 200;
    const FORMS: usize = 1_000;
    let mut brute = 0.0f64;
    for _ in 0..BRUTE {
        let n = rng.random_range(2..=7);
        let c = InstanceLosses::new((0..n).map(|_| rng.random::<f64>()).collect()).expect("n >= 2");
        let (_, best) = optimal_aulc_bruteforce(&c).expect("n <= 7");
        let sorted = order_by_scores(c.as_slice(), Direction::Ascending);
        let by_sort = aulc(&c, &sorted).expect("lengths match").aulc;
        brute = brute.max((best - by_sort).abs());
    }
    let mut forms = 0.0f64;
    for _ in 0..FORMS {
        let n = rng.random_range(1..=500);
        let c = InstanceLosses::new((0..n).map(|_| rng.random::<f64>()).collect()).expect("n >= 1");
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), rng);
        let o = Ordering::from_perm(perm).expect("shuffled identity");
        let riemann = aulc(&c, &o).expect("lengths match").aulc;
        let weighted = aulc_weighted(&c, &o).expect("lengths match");
        forms = forms.max((riemann - weighted).abs());
    }
    vec![
        Check {
            name: "brute force = ascending sort".into(),
            cases: BRUTE,
            worst: brute,
            tolerance: 1e-9,
        },
        Check {
            name: "Riemann sum = weighted sum".into(),
            cases: FORMS,
            worst: forms,
            tolerance: 1e-12,
        },
    ]
}

fn auroc_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    const CASES: usize = 200;
    let mut agreement = 0.0f64;
    let mut complement = 0.0f64;
    for _ in 0..CASES {
        let n_id = rng.random_range(1..=1000);
        let n_ood = rng.random_range(1..=1000);
        // A coarse grid for some cases forces ties.
        let grid = if rng.random_bool(0.5) { 20.0 } else { 0.0 };
        let shift = rng.random_range(0.0..0.5);
        let draw = |rng: &mut ChaCha8Rng, n: usize, shift: f64| -> Vec<f64> {
            (0..n)
                .map(|_| {
                    let v: f64 = rng.random::<f64>() + shift;
                    if grid > 0.0 {
                        (v * grid).round() / grid
                    } else {
                        v
                    }
                })
                .collect()
        };
        let id = draw(rng, n_id, 0.0);
        let ood = draw(rng, n_ood, shift);
        let split = ScoreSplit::new(id, ood).expect("non-empty finite");
        let fast = auroc(&split).auroc;
        agreement = agreement.max((fast - auroc_pairwise(&split).auroc).abs());
        complement = complement.max((fast + auroc(&split.swapped()).auroc - 1.0).abs());
    }
    vec![
        Check {
            name: "rank form = pairwise form".into(),
            cases: CASES,
            worst: agreement,
            tolerance: 1e-12,
        },
        Check {
            name: "complement symmetry".into(),
            cases: CASES,
            worst: complement,
            tolerance: 0.0,
        },
    ]
}

fn binary_ordering_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    const CASES: usize = 1_000;
    let samples: Vec<_> = (0..CASES)
        .map(|_| {
            let m = rng.random_range(1..=20);
            random_sample(rng, 2, m)
        })
        .collect();
    let ranking = |rule: ScoringRule| {
        let scores: Vec<f64> = samples.iter().map(|s| decompose(rule, s).total).collect();
        order_by_scores(&scores, Direction::Ascending).perm
    };
    let reference = ranking(ScoringRule::Log);
    let mismatches = ScoringRule::ALL
        .iter()
        .map(|&rule| {
            ranking(rule)
                .iter()
                .zip(&reference)
                .filter(|(a, b)| a != b)
                .count()
        })
        .max()
        .unwrap_or(0);
    vec![Check {
        name: "identical K=2 rankings".into(),
        cases: CASES,
        worst: mismatches as f64,
        tolerance: 0.0,
    }]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn injected_fault_is_detected() {
        let opts = VerifyOptions {
            seed: 1,
            fault: Some(Fault::EpistemicOffset {
                rule: ScoringRule::ZeroOne,
                delta: 1e-6,
            }),
        };
        let report = run_suite(Suite::Decompose, &opts);
        assert!(!report.passed());
    }
}
