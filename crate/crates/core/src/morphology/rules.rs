//! Regular English inflection rules.

use super::{FeatureBundle, Number, VerbForm};

/// Polysyllabic verbs with final stress, which double their final consonant
/// like stressed monosyllables do.
const DOUBLING_POLYSYLLABLES: &[&str] = &[
    "abhor", "acquit", "admit", "allot", "annul", "begin", "commit", "compel", "confer",
    "control", "defer", "deter", "embed", "emit", "equip", "excel", "expel", "extol",
    "forbid", "forget", "incur", "infer", "occur", "omit", "patrol", "permit", "prefer",
    "propel", "rebel", "recur", "refer", "regret", "remit", "submit", "transfer", "transmit",
    "upset",
];

fn is_plain_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Vowel test used for syllable counting: `u` after `q` is consonantal and
/// `y` is vocalic anywhere but word-initially.
fn is_vowel_at(w: &[char], i: usize) -> bool {
    match w[i] {
        'u' if i > 0 && w[i - 1] == 'q' => false,
        'y' => i > 0,
        c => is_plain_vowel(c),
    }
}

fn syllables(w: &[char]) -> usize {
    let mut count = 0;
    let mut in_vowel = false;
    for i in 0..w.len() {
        let v = is_vowel_at(w, i);
        if v && !in_vowel {
            count += 1;
        }
        in_vowel = v;
    }
    count
}

/// Consonant, single plain vowel, consonant other than w/x/y.
fn ends_cvc(w: &[char]) -> bool {
    let n = w.len();
    if n < 3 {
        return false;
    }
    let (c1, v, c2) = (n - 3, n - 2, n - 1);
    let vowel = is_plain_vowel(w[v]) && !(w[v] == 'u' && w[c1] == 'q');
    vowel && !is_vowel_at(w, c1) && !is_vowel_at(w, c2) && !matches!(w[c2], 'w' | 'x' | 'y')
}

fn lower(lemma: &str) -> Vec<char> {
    lemma.to_lowercase().chars().collect()
}

pub(crate) fn doubles_final_consonant(lemma: &str) -> bool {
    let w = lower(lemma);
    let word: String = w.iter().collect();
    (syllables(&w) == 1 && ends_cvc(&w)) || DOUBLING_POLYSYLLABLES.contains(&word.as_str())
}

fn consonant_y(w: &[char]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == 'y' && !is_plain_vowel(w[n - 2])
}

fn drop_last(lemma: &str) -> &str {
    let mut it = lemma.char_indices();
    match it.next_back() {
        Some((i, _)) => &lemma[..i],
        None => lemma,
    }
}

fn double_last(lemma: &str) -> String {
    let mut s = lemma.to_string();
    if let Some(c) = lemma.chars().last() {
        s.push(c);
    }
    s
}

/// Noun plural and verb third person singular share one suffix rule.
pub(crate) fn s_form(lemma: &str) -> String {
    let w = lower(lemma);
    let sibilant = matches!(w.last(), Some('s' | 'x' | 'z')) || w.ends_with(&['c', 'h']) || w.ends_with(&['s', 'h']);
    if sibilant {
        format!("{lemma}es")
    } else if consonant_y(&w) {
        format!("{}ies", drop_last(lemma))
    } else {
        format!("{lemma}s")
    }
}

pub(crate) fn past(lemma: &str) -> String {
    let w = lower(lemma);
    if w.last() == Some(&'e') {
        format!("{lemma}d")
    } else if consonant_y(&w) {
        format!("{}ied", drop_last(lemma))
    } else if doubles_final_consonant(lemma) {
        format!("{}ed", double_last(lemma))
    } else {
        format!("{lemma}ed")
    }
}

pub(crate) fn gerund(lemma: &str) -> String {
    let w = lower(lemma);
    let n = w.len();
    if w.ends_with(&['i', 'e']) {
        format!("{}ying", drop_last(drop_last(lemma)))
    } else if n > 2 && w[n - 1] == 'e' && !matches!(w[n - 2], 'e' | 'o' | 'y') {
        format!("{}ing", drop_last(lemma))
    } else if doubles_final_consonant(lemma) {
        format!("{}ing", double_last(lemma))
    } else {
        format!("{lemma}ing")
    }
}

pub(crate) fn regular_form(lemma: &str, bundle: FeatureBundle) -> String {
    match bundle {
        FeatureBundle::Noun(Number::Singular) => lemma.to_string(),
        FeatureBundle::Noun(Number::Plural) => s_form(lemma),
        FeatureBundle::Verb(VerbForm::Base) => lemma.to_string(),
        FeatureBundle::Verb(VerbForm::ThirdSg) => s_form(lemma),
        FeatureBundle::Verb(VerbForm::Past | VerbForm::PastParticiple) => past(lemma),
        FeatureBundle::Verb(VerbForm::Gerund) => gerund(lemma),
        FeatureBundle::Uninflected => lemma.to_string(),
    }
}
