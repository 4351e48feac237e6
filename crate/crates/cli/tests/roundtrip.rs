use proptest::prelude::*;
use uqscore_cli::{parse_predictions_str, serialize_predictions, PredictionRecord};
use uqscore_core::{CategoricalDistribution, SecondOrderSample};

fn member(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, k).prop_map(|mut w| {
        w[0] += 1e-3;
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    })
}

fn record() -> impl Strategy<Value = PredictionRecord> {
    (
        2usize..6,
        1usize..6,
        "[a-zA-Z0-9 _\"\\\\é-]{0,12}",
        any::<bool>(),
    )
        .prop_flat_map(|(k, m, id, labeled)| {
            (prop::collection::vec(member(k), m), 1..=k).prop_map(move |(rows, label)| {
                let members = rows
                    .into_iter()
                    .map(|r| CategoricalDistribution::new(r).expect("normalized"))
                    .collect();
                PredictionRecord {
                    id: id.clone(),
                    sample: SecondOrderSample::new(members).expect("shared k"),
                    label: labeled.then_some(label),
                    line: 0,
                }
            })
        })
}

proptest! {
    #[test]
    fn parse_inverts_serialize(records in prop::collection::vec(record(), 0..8)) {
        let text = serialize_predictions(&records);
        let parsed = parse_predictions_str(&text, false).unwrap();
        prop_assert_eq!(parsed.len(), records.len());
        for (i, (a, b)) in records.iter().zip(&parsed).enumerate() {
            prop_assert_eq!(&a.id, &b.id);
            prop_assert_eq!(a.label, b.label);
            prop_assert_eq!(b.line, i + 1);
            for (x, y) in a.sample.members().iter().zip(b.sample.members()) {
                let bits = |d: &CategoricalDistribution| d.probs().iter().map(|p| p.to_bits()).collect::<Vec<_>>();
                prop_assert_eq!(bits(x), bits(y));
            }
        }
        prop_assert_eq!(serialize_predictions(&parsed), text);
    }
}
