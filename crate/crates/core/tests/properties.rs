use proptest::prelude::*;

use tsml::data::{parse_ts, write_ts, DatasetMetadata};
use tsml::distances::distance;
use tsml::supervised::{generate_kernels, KNeighbors, KnnConfig, RocketConfig};
use tsml::transform::{fourier_features, pad, truncate, znorm, PadFill, PadPolicy, PadTarget};
use tsml::{ClassLabels, Collection, CollectionEstimator, DistanceKind, DistanceSpec, LabelVector, Series};

fn values(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, len)
}

fn series(v: &[f64]) -> Series {
    Series::univariate(v.to_vec()).unwrap()
}

fn ragged(max_cases: usize, min_len: usize) -> impl Strategy<Value = Collection> {
    prop::collection::vec(values(min_len..20), 1..max_cases)
        .prop_map(|cases| Collection::ragged(&cases.iter().map(|c| series(c)).collect::<Vec<_>>()).unwrap())
}

fn elastic_spec() -> impl Strategy<Value = DistanceSpec> {
    prop::sample::select(vec![
        DistanceKind::Dtw,
        DistanceKind::Ddtw,
        DistanceKind::Wdtw,
        DistanceKind::Wddtw,
        DistanceKind::Erp,
        DistanceKind::Edr,
        DistanceKind::Lcss,
        DistanceKind::Msm,
        DistanceKind::Twe,
    ])
    .prop_map(DistanceSpec::new)
}

proptest! {
    #[test]
    fn distances_are_symmetric_and_zero_on_identity(spec in elastic_spec(), x in values(3..15), y in values(3..15)) {
        let (a, b) = (series(&x), series(&y));
        let xy = distance(a.view(), b.view(), &spec).unwrap();
        let yx = distance(b.view(), a.view(), &spec).unwrap();
        prop_assert!((xy - yx).abs() <= 1e-9 * xy.abs().max(1.0), "{xy} vs {yx}");
        prop_assert!(xy >= 0.0);
        prop_assert_eq!(distance(a.view(), a.view(), &spec).unwrap(), 0.0);
    }

    #[test]
    fn wider_band_never_costs_more(x in values(4..25), y in values(4..25), w in 0.0..1.0f64, extra in 0.0..1.0f64) {
        let floor = x.len().abs_diff(y.len()) as f64 / x.len().max(y.len()) as f64;
        let w = floor + (1.0 - floor) * w;
        let wider = w + (1.0 - w) * extra;
        let d = |w: f64| distance(series(&x).view(), series(&y).view(), &DistanceSpec::new(DistanceKind::Dtw).with_window(w)).unwrap();
        prop_assert!(d(wider) <= d(w));
    }

    #[test]
    fn pad_then_truncate_restores_shortest_prefix(c in ragged(6, 1), fill in prop::sample::select(vec![PadFill::Zero, PadFill::LastValue, PadFill::Mean])) {
        let padded = pad(&c, &PadPolicy::new(fill, PadTarget::Auto)).unwrap();
        let longest = *c.lengths().iter().max().unwrap();
        prop_assert!(padded.is_dense());
        prop_assert_eq!(padded.common_length(), Some(longest));
        for (i, case) in c.cases().enumerate() {
            prop_assert_eq!(&padded.case(i).values()[..case.n_timepoints()], case.values());
        }
        let cut = truncate(&c);
        let shortest = *c.lengths().iter().min().unwrap();
        prop_assert_eq!(cut.common_length(), Some(shortest));
        for (i, case) in c.cases().enumerate() {
            prop_assert_eq!(cut.case(i).values(), &case.values()[..shortest]);
        }
    }

    #[test]
    fn znorm_is_idempotent(x in values(2..40)) {
        let once = znorm(series(&x).view());
        let twice = znorm(once.view());
        for (a, b) in once.values().iter().zip(twice.values()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn fourier_magnitudes_ignore_circular_shift(x in values(8..33), shift in 0usize..32) {
        let n = x.len();
        let shifted: Vec<f64> = (0..n).map(|t| x[(t + shift) % n]).collect();
        let k = n / 2;
        let a = fourier_features(series(&x).view(), k).unwrap();
        let b = fourier_features(series(&shifted).view(), k).unwrap();
        for (p, q) in a.values.iter().zip(&b.values) {
            prop_assert!((p - q).abs() < 1e-9 * p.abs().max(1.0));
        }
    }

    #[test]
    fn ts_round_trip(c in ragged(6, 1), targets in prop::collection::vec(-1e6..1e6f64, 6)) {
        let labels = LabelVector::Target(targets[..c.n_cases()].to_vec());
        let meta = DatasetMetadata::describe("prop", &c, &labels);
        let (c2, l2, m2) = parse_ts(&write_ts(&c, &labels, &meta).unwrap()).unwrap();
        prop_assert_eq!(c2, c);
        prop_assert_eq!(l2, labels);
        prop_assert_eq!(m2, meta);
    }

    #[test]
    fn one_nn_recovers_distinct_training_labels(c in ragged(6, 3), spec in elastic_spec()) {
        let n = c.n_cases();
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let labels = LabelVector::Class(ClassLabels::from_text(&names));
        let mut knn = KNeighbors::new(KnnConfig::new(1, spec));
        knn.fit(&c, &labels).unwrap();
        let predicted = knn.predict(&c).unwrap();
        for i in 0..n {
            // duplicates may resolve to an earlier case at distance zero
            let label = predicted.as_class().unwrap().label(i).to_string();
            let j: usize = label[1..].parse().unwrap();
            let d = distance(c.case(i), c.case(j), &spec).unwrap();
            prop_assert!(j == i || d == 0.0, "case {i} predicted {label}");
        }
    }

    #[test]
    fn ppv_lies_in_unit_interval(x in values(9..60), seed in 0u64..1000) {
        for kernel in generate_kernels(&RocketConfig::new(20, seed), 1, x.len()).unwrap() {
            let (max, ppv) = kernel.apply(&x);
            prop_assert!((0.0..=1.0).contains(&ppv));
            prop_assert!(max.is_finite());
        }
    }
}
