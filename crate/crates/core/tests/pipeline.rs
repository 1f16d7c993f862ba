use coexist_core::completion::{complete, relabel_completions, SearchConfig, Verdict};
use coexist_core::model::SignPattern;
use coexist_core::stability::check_point;
use coexist_core::witness::{find_witness, WitnessConfig};
use proptest::prelude::*;

fn cfg(trials: u64) -> WitnessConfig {
    WitnessConfig {
        trials,
        ..WitnessConfig::default()
    }
}

#[test]
fn witness_is_inside_the_completion_set() {
    for text in ["++++++", "+-++-+", "++++++++++++", "+-++++++-+-+"] {
        let sp = SignPattern::parse(text).unwrap();
        let set = complete(&sp, SearchConfig::default()).unwrap();
        let w = find_witness(&sp, &cfg(5_000)).unwrap().expect("witness");
        assert!(check_point(&w.point).feasible_stable());
        assert!(set.contains(&w.full_chirotope().unwrap()), "{text}");
    }
}

#[test]
fn impossible_patterns_have_no_witness() {
    for text in ["--+--+", "---+---+---+"] {
        let sp = SignPattern::parse(text).unwrap();
        assert_eq!(
            complete(&sp, SearchConfig::default()).unwrap().verdict(),
            Verdict::Impossible
        );
        assert!(find_witness(&sp, &cfg(1_000)).unwrap().is_none());
    }
}

fn n3_pattern() -> impl Strategy<Value = SignPattern> {
    prop::collection::vec(any::<bool>(), 9).prop_map(|bits| {
        let text: String = bits.iter().map(|&b| if b { '+' } else { '-' }).collect();
        SignPattern::parse_compact(&text).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn relabelling_permutes_completions(sp in n3_pattern(), k in 0usize..6) {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let perm = perms[k];
        let base = complete(&sp, SearchConfig::default()).unwrap();
        let moved = complete(&sp.permute(&perm), SearchConfig::default()).unwrap();
        let mut mapped = relabel_completions(3, &base.completions, &perm);
        mapped.sort();
        prop_assert_eq!(mapped, moved.completions);
    }

    #[test]
    fn full_checks_refine_the_relaxation(sp in n3_pattern()) {
        let full = complete(&sp, SearchConfig::default()).unwrap();
        let open = complete(&sp, SearchConfig::chirotope_only()).unwrap();
        for c in &full.completions {
            prop_assert!(open.contains(c));
        }
    }
}
