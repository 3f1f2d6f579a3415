mod common;

use common::{class_from_masks, log2_floor, ls_oracle, masks, tree_exists, vc_oracle};
use littlestone::concept::families::{power_set, singletons, thresholds};
use littlestone::dimensions::{
    is_shattered, ls_at_most, ls_dimension, run_online_game, vc_dimension, verify_mistake_tree,
    Opponent,
};
use littlestone::verify::check_dimension_facts;
use proptest::prelude::*;

fn class_strategy() -> impl Strategy<Value = (usize, Vec<u64>)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec(0u64..(1 << n), 1..=24)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn vc_matches_subset_enumeration((n, rows) in class_strategy()) {
        let class = class_from_masks(n, &rows);
        let (vc, witness) = vc_dimension(&class).into_parts().unwrap();
        prop_assert_eq!(Some(vc), vc_oracle(&class));
        prop_assert!(witness.is_valid(&class));
        prop_assert_eq!(witness.set.len(), vc);
    }

    #[test]
    fn ls_matches_exhaustive_tree_search((n, rows) in class_strategy()) {
        let class = class_from_masks(n, &rows);
        let (ls, tree) = ls_dimension(&class).into_parts().unwrap();
        prop_assert_eq!(Some(ls), ls_oracle(&class));
        prop_assert_eq!(tree.depth(), ls);
        prop_assert!(verify_mistake_tree(&class, &tree).unwrap());
    }

    #[test]
    fn vc_at_most_ls_at_most_log_size((n, rows) in class_strategy()) {
        let class = class_from_masks(n, &rows);
        let vc = vc_dimension(&class).value().unwrap();
        let ls = ls_dimension(&class).value().unwrap();
        prop_assert!(vc <= ls);
        prop_assert!(ls <= log2_floor(class.distinct_len()));
    }

    #[test]
    fn ls_is_subadditive_over_splits((n, rows) in class_strategy(), split in any::<u32>()) {
        let first: Vec<u64> = rows.iter().enumerate().filter(|(i, _)| split >> (i % 32) & 1 == 1).map(|(_, &m)| m).collect();
        let second: Vec<u64> = rows.iter().enumerate().filter(|(i, _)| split >> (i % 32) & 1 == 0).map(|(_, &m)| m).collect();
        prop_assume!(!first.is_empty() && !second.is_empty());
        let whole = ls_dimension(&class_from_masks(n, &rows)).value().unwrap();
        let a = ls_dimension(&class_from_masks(n, &first)).value().unwrap();
        let b = ls_dimension(&class_from_masks(n, &second)).value().unwrap();
        prop_assert!(whole <= a + b + 1);
    }

    #[test]
    fn ls_at_most_flips_exactly_at_ls((n, rows) in class_strategy()) {
        let class = class_from_masks(n, &rows);
        let ls = ls_dimension(&class).value().unwrap();
        for d in 0..=n + 1 {
            prop_assert_eq!(ls_at_most(&class, d), d >= ls);
        }
    }

    #[test]
    fn soa_meets_the_mistake_bound((n, rows) in class_strategy(), order_seed in any::<u64>()) {
        let class = class_from_masks(n, &rows);
        let ls = ls_dimension(&class).value().unwrap();
        let adversary = run_online_game(&class, &Opponent::OptimalAdversary, usize::MAX).unwrap();
        prop_assert_eq!(adversary.mistakes, ls);
        let mut order: Vec<usize> = (0..n).collect();
        let mut state = order_seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
        for concept in 0..class.len() {
            let target = Opponent::Target { concept, order: Some(order.clone()) };
            let game = run_online_game(&class, &target, usize::MAX).unwrap();
            prop_assert!(game.mistakes <= ls);
            for step in &game.steps {
                prop_assert_eq!(step.correct, class.contains(concept, step.element));
            }
        }
    }

    #[test]
    fn shattering_is_hereditary((n, rows) in class_strategy(), pick in any::<u64>()) {
        let class = class_from_masks(n, &rows);
        let set: Vec<usize> = (0..n).filter(|&x| pick >> x & 1 == 1).collect();
        if is_shattered(&class, &set).unwrap().is_some() {
            for drop in 0..set.len() {
                let mut sub = set.clone();
                sub.remove(drop);
                prop_assert!(is_shattered(&class, &sub).unwrap().is_some());
            }
        }
    }

    #[test]
    fn fact_report_passes((n, rows) in class_strategy(), seed in any::<u64>()) {
        let report = check_dimension_facts(&class_from_masks(n, &rows), seed);
        prop_assert!(report.passed(), "{}", report.to_text());
    }
}

#[test]
fn oracle_sanity() {
    let class = power_set(3);
    assert_eq!(masks(&class).len(), 8);
    assert!(tree_exists(&masks(&class), 3, 3));
    assert!(!tree_exists(&masks(&class), 3, 4));
}

#[test]
fn known_families() {
    for m in 1..=4 {
        let t = thresholds((1 << m) - 1);
        assert_eq!(t.len(), 1 << m);
        assert_eq!(vc_dimension(&t).value(), Some(1));
        assert_eq!(ls_dimension(&t).value(), Some(m));
        let p = power_set(m);
        assert_eq!(vc_dimension(&p).value(), Some(m));
        assert_eq!(ls_dimension(&p).value(), Some(m));
    }
    for n in 2..=8 {
        let s = singletons(n);
        assert_eq!(vc_dimension(&s).value(), Some(1));
        assert_eq!(ls_dimension(&s).value(), Some(1));
    }
}

#[test]
fn empty_class_has_no_dimension() {
    let class = class_from_masks(3, &[]);
    assert_eq!(vc_dimension(&class).value(), None);
    assert_eq!(ls_dimension(&class).value(), None);
}
