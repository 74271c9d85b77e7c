mod common;

use std::collections::HashSet;

use common::fixture;
use frame_augment::augment::AugmentOptions;
use frame_augment::ingest;
use frame_augment::model::{Corpus, Lexicon, Source};
use frame_augment::splits::{
    apply_holdout, build_experiment, holdout_candidates, plan_holdout, HoldoutPlan, SplitError,
};
use frame_augment::Morphology;
use proptest::prelude::*;

fn demo() -> (Lexicon, Corpus) {
    let lex = ingest::load_lexicon(fixture("demo/lexicon.jsonl")).unwrap();
    let corpus = ingest::load_corpus(fixture("demo/corpus.jsonl"), &lex).unwrap();
    (lex, corpus)
}

#[test]
fn oversized_request_takes_every_candidate() {
    let (lex, corpus) = demo();
    let plan = plan_holdout(&lex, &corpus, 50, 7);
    assert_eq!(plan.n, 50);
    assert_eq!(plan.held_out.len(), holdout_candidates(&lex, &corpus).len());
    let lexicographic = corpus.sets().iter().filter(|s| s.source == Source::Lexicographic).count();
    assert_eq!(plan.stripped_ids.len(), lexicographic);
}

#[test]
fn empty_plan_keeps_the_corpus() {
    let (lex, corpus) = demo();
    let plan = plan_holdout(&lex, &corpus, 0, 0);
    assert!(plan.held_out.is_empty());
    let (baseline, stripped) = apply_holdout(&corpus, &plan).unwrap();
    assert_eq!(baseline, corpus);
    assert!(stripped.is_empty());
}

#[test]
fn unknown_id_is_a_plan_mismatch() {
    let (_, corpus) = demo();
    let plan = HoldoutPlan { seed: 0, n: 1, held_out: vec![], stripped_ids: vec!["nope".into()] };
    assert!(matches!(apply_holdout(&corpus, &plan), Err(SplitError::PlanMismatch(_))));
}

#[test]
fn unknown_unit_is_a_plan_mismatch() {
    let (lex, corpus) = demo();
    let plan = HoldoutPlan { seed: 0, n: 1, held_out: vec!["Nowhere/x.v".into()], stripped_ids: vec![] };
    let err = frame_augment::splits::run_plan(&lex, &corpus, plan, &Morphology::bundled(), AugmentOptions::default());
    assert!(matches!(err, Err(SplitError::PlanMismatch(_))));
}

#[test]
fn plan_survives_json() {
    let (lex, corpus) = demo();
    let plan = plan_holdout(&lex, &corpus, 6, 3);
    let back: HoldoutPlan = serde_json::from_str(&serde_json::to_string(&plan).unwrap()).unwrap();
    assert_eq!(back, plan);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn plans_are_deterministic_and_sized(seed in any::<u64>(), n in 0usize..30) {
        let (lex, corpus) = demo();
        let a = plan_holdout(&lex, &corpus, n, seed);
        let b = plan_holdout(&lex, &corpus, n, seed);
        prop_assert_eq!(&a, &b);
        let other = plan_holdout(&lex, &corpus, n, seed ^ 1);
        prop_assert_eq!(a.held_out.len(), other.held_out.len());
        prop_assert_eq!(a.held_out.len(), n.min(holdout_candidates(&lex, &corpus).len()));
        let mut sorted = a.held_out.clone();
        sorted.sort();
        prop_assert_eq!(&sorted, &a.held_out);
    }

    #[test]
    fn experiment_partitions_the_corpus(seed in any::<u64>(), n in 0usize..30) {
        let (lex, corpus) = demo();
        let exp = build_experiment(&lex, &corpus, n, seed, &Morphology::bundled(), AugmentOptions::default()).unwrap();
        prop_assert_eq!(exp.baseline.len() + exp.stripped.len(), corpus.len());
        prop_assert!(exp.stripped.sets().iter().all(|s| s.source == Source::Lexicographic));
        let baseline: HashSet<&str> = exp.baseline.sets().iter().map(|s| s.id.as_str()).collect();
        prop_assert!(exp.stripped.sets().iter().all(|s| !baseline.contains(s.id.as_str())));
        prop_assert_eq!(exp.augmented.len(), exp.baseline.len() + exp.records.len());
        prop_assert!(exp.baseline.sets().iter().all(|s| exp.augmented.contains_id(&s.id)));
        // Full-text sets are never held out.
        for s in corpus.sets().iter().filter(|s| s.source != Source::Lexicographic) {
            prop_assert!(baseline.contains(s.id.as_str()));
        }
    }
}
