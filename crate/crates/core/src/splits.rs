//! Held-out experiment construction.
//!
//! A plan removes the lexicographic annotation of `n` randomly chosen
//! lexical units. The baseline training corpus is what remains; the
//! augmented training corpus adds sentences generated for the held-out
//! units from their sisters in the baseline.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augment::{self, AugmentOptions, AugmentStats, AugmentationRecord};
use crate::model::{AnnotationSet, Corpus, LexicalUnit, Lexicon, ModelError, Source};
use crate::morphology::Morphology;

/// SplitMix64. Every random choice in the crate goes through this
/// generator so a seed reproduces a plan in any language.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `0..n`. Draws below `2^64 mod n` are rejected so
    /// the modulo carries no bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let threshold = n.wrapping_neg() % n;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % n;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoldoutPlan {
    pub seed: u64,
    pub n: usize,
    /// `Frame/lu` keys, sorted.
    pub held_out: Vec<String>,
    /// Ids of removed sets, in corpus order.
    pub stripped_ids: Vec<String>,
}

pub fn lu_key(frame: &str, lu: &str) -> String {
    format!("{frame}/{lu}")
}

fn split_key(key: &str) -> Option<(&str, &str)> {
    key.split_once('/')
}

impl HoldoutPlan {
    /// Ids kept in the baseline.
    pub fn baseline_ids<'a>(&self, corpus: &'a Corpus) -> Vec<&'a str> {
        let stripped: HashSet<&str> = self.stripped_ids.iter().map(String::as_str).collect();
        corpus
            .sets()
            .iter()
            .map(|s| s.id.as_str())
            .filter(|id| !stripped.contains(id))
            .collect()
    }

    pub fn held_out_lus(&self, lexicon: &Lexicon) -> Result<Vec<LexicalUnit>, SplitError> {
        self.held_out
            .iter()
            .map(|key| {
                split_key(key)
                    .and_then(|(f, l)| lexicon.lu(f, l))
                    .cloned()
                    .ok_or_else(|| SplitError::PlanMismatch(format!("unknown lexical unit {key}")))
            })
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("plan does not match corpus: {0}")]
    PlanMismatch(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Lexical units with at least one lexicographic set, sorted by (frame, name).
pub fn holdout_candidates<'a>(lexicon: &'a Lexicon, corpus: &Corpus) -> Vec<&'a LexicalUnit> {
    let mut out: Vec<&LexicalUnit> = lexicon
        .lus()
        .filter(|lu| {
            corpus
                .sets_for(&lu.frame, &lu.name)
                .any(|s| s.source == Source::Lexicographic)
        })
        .collect();
    out.sort_by(|a, b| (&a.frame, &a.name).cmp(&(&b.frame, &b.name)));
    out
}

/// Samples `n` candidates uniformly without replacement with a partial
/// Fisher-Yates shuffle. Asking for more than exist takes them all.
pub fn plan_holdout(lexicon: &Lexicon, corpus: &Corpus, n: usize, seed: u64) -> HoldoutPlan {
    let mut pool = holdout_candidates(lexicon, corpus);
    let k = n.min(pool.len());
    if k < n {
        log::warn!(
            "asked to hold out {n} lexical units but only {} are annotated; taking all",
            pool.len()
        );
    }
    let mut rng = SplitMix64::new(seed);
    for i in 0..k {
        let j = i + rng.below((pool.len() - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool.sort_by(|a, b| (&a.frame, &a.name).cmp(&(&b.frame, &b.name)));

    let chosen: BTreeSet<(&str, &str)> =
        pool.iter().map(|lu| (lu.frame.as_str(), lu.name.as_str())).collect();
    let stripped_ids = corpus
        .sets()
        .iter()
        .filter(|s| {
            s.source == Source::Lexicographic
                && chosen.contains(&(s.frame.as_str(), s.lu_name.as_str()))
        })
        .map(|s| s.id.clone())
        .collect();
    HoldoutPlan {
        seed,
        n,
        held_out: pool.iter().map(|lu| lu_key(&lu.frame, &lu.name)).collect(),
        stripped_ids,
    }
}

/// Splits `corpus` into the baseline and the stripped gold sets.
pub fn apply_holdout(corpus: &Corpus, plan: &HoldoutPlan) -> Result<(Corpus, Corpus), SplitError> {
    let stripped: HashSet<&str> = plan.stripped_ids.iter().map(String::as_str).collect();
    if let Some(missing) = plan.stripped_ids.iter().find(|id| !corpus.contains_id(id)) {
        return Err(SplitError::PlanMismatch(format!("id {missing} not in corpus")));
    }
    let (gold, kept): (Vec<AnnotationSet>, Vec<AnnotationSet>) = corpus
        .sets()
        .iter()
        .cloned()
        .partition(|s| stripped.contains(s.id.as_str()));
    Ok((Corpus::new(kept)?, Corpus::new(gold)?))
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub plan: HoldoutPlan,
    pub baseline: Corpus,
    pub augmented: Corpus,
    pub stripped: Corpus,
    pub records: Vec<AugmentationRecord>,
    pub stats: AugmentStats,
}

pub fn build_experiment(
    lexicon: &Lexicon,
    corpus: &Corpus,
    n: usize,
    seed: u64,
    morph: &Morphology,
    options: AugmentOptions,
) -> Result<Experiment, SplitError> {
    let plan = plan_holdout(lexicon, corpus, n, seed);
    run_plan(lexicon, corpus, plan, morph, options)
}

/// Builds the experiment for an existing plan.
pub fn run_plan(
    lexicon: &Lexicon,
    corpus: &Corpus,
    plan: HoldoutPlan,
    morph: &Morphology,
    options: AugmentOptions,
) -> Result<Experiment, SplitError> {
    let (baseline, stripped) = apply_holdout(corpus, &plan)?;
    let held_out = plan.held_out_lus(lexicon)?;
    let aug = augment::augment_lus(lexicon, &baseline, &held_out, morph, options);
    let augmented = Corpus::new(
        baseline
            .sets()
            .iter()
            .cloned()
            .chain(aug.records.iter().map(|r| r.annotation.clone()))
            .collect(),
    )?;
    Ok(Experiment {
        plan,
        baseline,
        augmented,
        stripped,
        records: aug.records,
        stats: aug.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from an independent implementation.
    #[test]
    fn splitmix_vectors() {
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xe220_a839_7b1d_cdaf);
        assert_eq!(g.next_u64(), 0x6e78_9e6a_a1b9_65f4);
        assert_eq!(g.next_u64(), 0x06c4_5d18_8009_454f);
        assert_eq!(g.next_u64(), 0xf88b_b8a8_724c_81ec);
        let mut g = SplitMix64::new(42);
        assert_eq!(g.next_u64(), 0xbdd7_3226_2feb_6e95);
        assert_eq!(g.next_u64(), 0x28ef_e333_b266_f103);
    }

    #[test]
    fn bounded_draws() {
        let mut g = SplitMix64::new(42);
        let draws: Vec<u64> = (0..8).map(|_| g.below(10)).collect();
        assert_eq!(draws, [3, 1, 8, 4, 0, 2, 5, 8]);
        assert_eq!(SplitMix64::new(7).below(1), 0);
    }

    #[test]
    fn rejection_threshold_for_large_range() {
        let n = (1u64 << 63) + 1;
        assert_eq!(n.wrapping_neg() % n, (1u64 << 63) - 1);
        let mut g = SplitMix64::new(3);
        for _ in 0..100 {
            assert!(g.below(n) < n);
        }
    }
}
