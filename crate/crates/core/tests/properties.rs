use hybrid_transfer::density_ratio::{domain_weight, LinearDiscriminator};
use hybrid_transfer::io::{load_dataset, write_dataset, CsvSchema};
use hybrid_transfer::learner::{train, Provenance, WeightedSet};
use hybrid_transfer::metrics::{sign_test, Metrics};
use hybrid_transfer::pipeline::{hybrid_weights, NegativePolicy};
use hybrid_transfer::{Dataset, Domain, HybridConfig, Hyperparams, LearnerKind, Standardizer, WeightVector};
use proptest::prelude::*;

fn dataset(domain: Domain, d: usize, max_n: usize) -> impl Strategy<Value = Dataset> {
    prop::collection::vec((prop::collection::vec(-5.0..5.0f64, d), 0u8..2), 2..max_n).prop_map(move |rows| {
        let (x, y): (Vec<Vec<f64>>, Vec<u8>) = rows.into_iter().unzip();
        Dataset::new(domain, d, x.concat(), y).unwrap()
    })
}

proptest! {
    #[test]
    fn hybrid_weights_respect_policy_bounds(
        pairs in prop::collection::vec((1e-6..50.0f64, -20.0..20.0f64), 1..50),
        clip in 1.0..20.0f64,
    ) {
        let (d, t): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let clamp = HybridConfig { clip_max: clip, ..HybridConfig::default() };
        let hw = hybrid_weights(&d, &t, &clamp).unwrap();
        for (i, &w) in hw.weights.values.iter().enumerate() {
            prop_assert!((0.0..=clip).contains(&w));
            prop_assert_eq!(w, (d[i] + t[i]).clamp(0.0, clip));
        }
        let allow = HybridConfig { negative_policy: NegativePolicy::Allow, ..clamp };
        let hw = hybrid_weights(&d, &t, &allow).unwrap();
        for (i, &w) in hw.weights.values.iter().enumerate() {
            prop_assert_eq!(w, (d[i] + t[i]).min(clip));
        }
        prop_assert_eq!(hw.clamped, 0);
    }

    #[test]
    fn log_domain_weight_is_affine(
        w in prop::collection::vec(-3.0..3.0f64, 3),
        c in -3.0..3.0f64,
        x in prop::collection::vec(-4.0..4.0f64, 3),
        y in prop::collection::vec(-4.0..4.0f64, 3),
        a in 0.0..1.0f64,
    ) {
        let disc = LinearDiscriminator::new(w, c);
        let lw = |p: &[f64]| domain_weight(&disc, p).unwrap().value.ln();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(u, v)| a * u + (1.0 - a) * v).collect();
        let lhs = lw(&mid);
        let rhs = a * lw(&x) + (1.0 - a) * lw(&y);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn macro_f1_is_invariant_to_swapping_classes(
        pairs in prop::collection::vec((0u8..2, 0u8..2), 1..200),
    ) {
        let (t, p): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let m = Metrics::from_labels(&t, &p).unwrap();
        let flip = |v: &[u8]| v.iter().map(|&b| 1 - b).collect::<Vec<u8>>();
        let s = Metrics::from_labels(&flip(&t), &flip(&p)).unwrap();
        prop_assert_eq!(m.macro_f1, s.macro_f1);
        prop_assert_eq!(m.accuracy, s.accuracy);
        prop_assert_eq!(m.confusion.swapped(), s.confusion);
    }

    #[test]
    fn standardizer_round_trips(ds in dataset(Domain::Source, 3, 40)) {
        let st = Standardizer::fit(&[&ds]).unwrap();
        let back = st.invert(&st.apply(&ds).unwrap()).unwrap();
        for (a, b) in back.features().iter().zip(ds.features()) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
        prop_assert_eq!(back.labels(), ds.labels());
    }

    #[test]
    fn sign_test_p_value_is_a_probability(
        pairs in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 0..40),
    ) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let t = sign_test(&a, &b);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&t.p_value));
        prop_assert_eq!(t.wins + t.losses + t.ties, a.len());
        let r = sign_test(&b, &a);
        prop_assert_eq!((r.wins, r.losses), (t.losses, t.wins));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn csv_round_trip_is_exact(ds in dataset(Domain::Target, 2, 30)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.csv");
        write_dataset(&path, &ds).unwrap();
        let back = load_dataset(&path, &CsvSchema::default(), Domain::Target).unwrap();
        prop_assert_eq!(back, ds);
    }

    #[test]
    fn training_ignores_row_order(
        target in dataset(Domain::Target, 2, 20),
        source in dataset(Domain::Source, 2, 30),
        seed in any::<u64>(),
        alpha in 0.1..0.9f64,
    ) {
        let w: Vec<f64> = (0..source.n()).map(|j| ((j as u64 ^ seed) % 5) as f64).collect();
        let mut order: Vec<usize> = (0..source.n()).collect();
        order.sort_by_key(|&j| (j as u64).wrapping_mul(seed | 1).rotate_left(17));
        let shuffled = source.subset(&order).unwrap();
        let w_shuffled: Vec<f64> = order.iter().map(|&j| w[j]).collect();
        let hp = Hyperparams { boosting_rounds: 10, ..Hyperparams::default() };
        for kind in [LearnerKind::LogReg, LearnerKind::BoostedStumps] {
            let a = WeightedSet::blend(&target, &source, &w, alpha).unwrap();
            let b = WeightedSet::blend(&target, &shuffled, &w_shuffled, alpha).unwrap();
            prop_assert!((1.0..2.0).contains(&a.mass()));
            let (ma, mb) = (train(kind, &a, &hp).unwrap(), train(kind, &b, &hp).unwrap());
            prop_assert_eq!(ma.params, mb.params);
        }
    }

    #[test]
    fn clipped_weights_stay_in_range(values in prop::collection::vec(-100.0..100.0f64, 0..50), clip in 1.0..30.0f64) {
        let w = WeightVector::clipped(values.clone(), clip, Provenance::Custom).unwrap();
        for (a, b) in w.values.iter().zip(&values) {
            prop_assert_eq!(*a, b.clamp(0.0, clip));
        }
    }
}
