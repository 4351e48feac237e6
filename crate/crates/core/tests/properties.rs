use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uqscore_core::selective::{harmonic_weights, order_by_scores};
use uqscore_core::{
    acquire, aulc, aulc_weighted, auroc, auroc_pairwise, decompose, divergence, entropy,
    expected_loss, generic_triple, optimal_aulc_bruteforce, AcquisitionStrategy,
    CategoricalDistribution, Component, Direction, InstanceLosses, Ordering, ScoreSplit,
    ScoringRule, SecondOrderSample,
};

fn distribution(k: usize) -> impl Strategy<Value = CategoricalDistribution> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 6 => 0.0..1.0f64], k).prop_map(
        move |mut w| {
            if w.iter().all(|&x| x == 0.0) {
                w[0] = 1.0;
            }
            let s: f64 = w.iter().sum();
            CategoricalDistribution::new(w.into_iter().map(|x| x / s).collect())
                .expect("normalized")
        },
    )
}

fn sample() -> impl Strategy<Value = SecondOrderSample> {
    (2usize..=6, 1usize..=12).prop_flat_map(|(k, m)| {
        prop::collection::vec(distribution(k), m)
            .prop_map(|members| SecondOrderSample::new(members).expect("shared k"))
    })
}

fn pair() -> impl Strategy<Value = (CategoricalDistribution, CategoricalDistribution)> {
    (2usize..=6).prop_flat_map(|k| (distribution(k), distribution(k)))
}

fn rule() -> impl Strategy<Value = ScoringRule> {
    prop::sample::select(ScoringRule::ALL.to_vec())
}

fn losses_and_perm(max: usize) -> impl Strategy<Value = (Vec<f64>, Vec<usize>)> {
    (1..=max).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0..5.0f64, n),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn components_add_up(s in sample(), r in rule()) {
        let t = decompose(r, &s);
        prop_assert!(t.residual().abs() <= 1e-9);
        prop_assert!(t.total >= 0.0 && t.aleatoric >= 0.0 && t.epistemic >= -1e-12);
    }

    #[test]
    fn closed_form_matches_expectation_form(s in sample(), r in rule()) {
        let a = decompose(r, &s);
        let b = generic_triple(r, &s);
        for c in Component::ALL {
            let (x, y) = (a.get(c), b.get(c));
            prop_assert!(x == y || (x - y).abs() <= 1e-9, "{c}: {x} vs {y}");
        }
    }

    #[test]
    fn identical_members_have_no_epistemic_part(d in distribution(4), m in 1usize..8, r in rule()) {
        let s = SecondOrderSample::new(vec![d; m]).unwrap();
        prop_assert_eq!(decompose(r, &s).epistemic, 0.0);
    }

    #[test]
    fn divergence_is_non_negative((pred, truth) in pair(), r in rule()) {
        prop_assert!(divergence(r, &pred, &truth).unwrap() >= -1e-12);
        prop_assert_eq!(divergence(r, &truth, &truth).unwrap(), 0.0);
    }

    #[test]
    fn expected_loss_splits_into_entropy_and_divergence((pred, truth) in pair(), r in rule()) {
        let l = expected_loss(r, &pred, &truth).unwrap();
        let d = divergence(r, &pred, &truth).unwrap();
        if l.is_finite() {
            prop_assert!((l - entropy(r, &truth) - d).abs() <= 1e-9);
        } else {
            prop_assert!(d.is_infinite());
        }
    }

    #[test]
    fn aulc_forms_agree((c, perm) in losses_and_perm(200)) {
        let c = InstanceLosses::new(c).unwrap();
        let o = Ordering::from_perm(perm).unwrap();
        let riemann = aulc(&c, &o).unwrap().aulc;
        prop_assert!((riemann - aulc_weighted(&c, &o).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn ascending_sort_is_optimal(c in prop::collection::vec(0.0..1.0f64, 1..=6)) {
        let c = InstanceLosses::new(c).unwrap();
        let (_, best) = optimal_aulc_bruteforce(&c).unwrap();
        let sorted = aulc(&c, &order_by_scores(c.as_slice(), Direction::Ascending)).unwrap().aulc;
        prop_assert!((best - sorted).abs() <= 1e-9);
    }

    #[test]
    fn curve_ends_at_the_mean_loss((c, perm) in losses_and_perm(50)) {
        let n = c.len();
        let mean = c.iter().sum::<f64>() / n as f64;
        let r = aulc(&InstanceLosses::new(c).unwrap(), &Ordering::from_perm(perm).unwrap()).unwrap();
        prop_assert_eq!(r.curve.len(), n);
        prop_assert_eq!(r.curve[n - 1].retained, n);
        prop_assert!((r.curve[n - 1].mean_loss - mean).abs() <= 1e-12);
    }

    #[test]
    fn harmonic_weights_sum_to_n(n in 1usize..400) {
        let w = harmonic_weights(n);
        prop_assert!((w.iter().sum::<f64>() - n as f64).abs() <= 1e-9);
        prop_assert!(w.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn auroc_rank_form_matches_pairs(
        id in prop::collection::vec(0u8..12, 1..150),
        ood in prop::collection::vec(0u8..12, 1..150),
    ) {
        let split = ScoreSplit::new(
            id.iter().map(|&v| f64::from(v) / 4.0).collect(),
            ood.iter().map(|&v| f64::from(v) / 4.0).collect(),
        ).unwrap();
        let fast = auroc(&split).auroc;
        prop_assert_eq!(fast.to_bits(), auroc_pairwise(&split).auroc.to_bits());
        prop_assert_eq!(fast + auroc(&split.swapped()).auroc, 1.0);
        prop_assert!((0.0..=1.0).contains(&fast));
    }

    #[test]
    fn auroc_ignores_monotone_transforms(
        id in prop::collection::vec(-5.0..5.0f64, 1..80),
        ood in prop::collection::vec(-5.0..5.0f64, 1..80),
    ) {
        let a = auroc(&ScoreSplit::new(id.clone(), ood.clone()).unwrap()).auroc;
        let t = |v: &Vec<f64>| v.iter().map(|x| x.exp() * 3.0 + 1.0).collect::<Vec<_>>();
        let b = auroc(&ScoreSplit::new(t(&id), t(&ood)).unwrap()).auroc;
        prop_assert_eq!(a, b);
    }

    /// Members that all share the argmax of their mean carry no zero-one EU,
    /// and acquisition prefers any disagreeing instance over them.
    #[test]
    fn zero_one_acquisition_skips_agreeing_instances(
        pool in prop::collection::vec(sample(), 2..20),
        batch in 1usize..6,
    ) {
        let k = pool[0].n_classes();
        let pool: Vec<SecondOrderSample> = pool.into_iter().filter(|s| s.n_classes() == k).collect();
        let agrees = |s: &SecondOrderSample| {
            let top = s.mean().argmax();
            s.members().iter().all(|m| m.probs()[m.argmax()] == m.probs()[top])
        };
        for s in pool.iter().filter(|s| agrees(s)) {
            prop_assert!(decompose(ScoringRule::ZeroOne, s).epistemic <= 1e-12);
        }
        let batch = batch.min(pool.len());
        let disagreeing = pool.iter().filter(|s| !agrees(s)).count();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let picked = acquire(&pool, AcquisitionStrategy::epistemic(ScoringRule::ZeroOne), batch, &mut rng).unwrap();
        for (rank, &i) in picked.iter().enumerate() {
            if rank < disagreeing {
                prop_assert!(!agrees(&pool[i]));
            }
        }
    }
}
