mod common;

use common::{exhaustive_splits, small_set};
use defect_tune::dataset::{parse_release, Attribute, Schema};
use defect_tune::learners::{cart_split_score, RegressionTree, TreeParams};
use defect_tune::metrics::{confusion, Goal};
use proptest::prelude::*;

#[test]
fn cart_root_split_is_the_exhaustive_argmin() {
    let mut unique = 0;
    for seed in 0..200 {
        let rows = small_set(seed);
        let candidates = exhaustive_splits(&rows);
        let tree = RegressionTree::fit(&rows, &TreeParams::default(), seed);
        let Some((attr, cut)) = tree.root_split() else {
            assert!(rows.iter().all(|r| r.defect_count() == rows[0].defect_count()));
            continue;
        };
        let best = candidates.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        let chosen = candidates
            .iter()
            .find(|c| c.0 == attr.index() && c.1 == cut)
            .expect("chosen split is a midpoint candidate");
        assert!((chosen.2 - best).abs() < 1e-9, "seed {seed}: {} vs {best}", chosen.2);
        let ties: Vec<_> = candidates.iter().filter(|c| c.2 - best < 1e-9).collect();
        if ties.len() == 1 {
            unique += 1;
        }
        // Earliest attribute, then lowest cut, among the tied minima.
        assert_eq!((ties[0].0, ties[0].1), (attr.index(), cut), "seed {seed}");
        let lib = cart_split_score(&rows, attr, cut).unwrap();
        assert!((lib - chosen.2).abs() < 1e-9);
    }
    assert!(unique > 20);
}

fn brute_force(actual: &[bool], predicted: &[bool]) -> [f64; 4] {
    let count = |a: bool, p: bool| actual.iter().zip(predicted).filter(|(x, y)| **x == a && **y == p).count() as f64;
    let (tn, fn_, fp, tp) = (count(false, false), count(true, false), count(false, true), count(true, true));
    let ratio = |x: f64, y: f64| if y == 0.0 { 0.0 } else { x / y };
    let pd = ratio(tp, fn_ + tp);
    let pf = ratio(fp, tn + fp);
    let prec = ratio(tp, tp + fp);
    let f = ratio(2.0 * pd * prec, pd + prec);
    [pd, pf, prec, f]
}

proptest! {
    #[test]
    fn measures_match_a_recount(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..200)) {
        let (actual, predicted): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
        let cm = confusion(&actual, &predicted).unwrap();
        let expect = brute_force(&actual, &predicted);
        for (goal, e) in [Goal::Pd, Goal::Pf, Goal::Prec, Goal::F].into_iter().zip(expect) {
            prop_assert!((goal.score(&cm) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn promise_layout_round_trips(seed in 0u64..1000, n in 1usize..40) {
        let release = defect_tune::dataset::Release::new("p", 0, common::synthetic_rows(n, 0.0, seed)).unwrap();
        let text = common::promise_csv(&release, "p", "1.0");
        let back = parse_release(text.as_bytes(), &Schema::default(), "p", 0).unwrap();
        prop_assert_eq!(back.len(), n);
        prop_assert_eq!(back.id_columns(), &["name".to_string(), "version".to_string(), "name".to_string()]);
        for (a, b) in back.instances().iter().zip(release.instances()) {
            prop_assert_eq!(a.metrics(), b.metrics());
            prop_assert_eq!(a.defect_count(), b.defect_count());
        }
        prop_assert_eq!(back.defective_count(), release.defective_count());
        let loc = Attribute::from_name("loc").unwrap();
        prop_assert_eq!(back.instances()[0].metric(loc), release.instances()[0].metric(loc));
    }
}
