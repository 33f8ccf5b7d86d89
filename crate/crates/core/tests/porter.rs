//! Stemmer output frozen from an independent Porter implementation.

use streetlens_core::textprep::stem;

const FIXTURE: &str = include_str!("porter_fixture.tsv");

fn pairs() -> impl Iterator<Item = (&'static str, &'static str)> {
    FIXTURE.lines().map(|l| l.split_once('\t').expect("word<TAB>stem"))
}

#[test]
fn matches_reference_stems() {
    let mismatches: Vec<_> = pairs()
        .filter_map(|(w, expected)| {
            let got = stem(w);
            (got != expected).then(|| format!("{w}: expected {expected}, got {got}"))
        })
        .collect();
    assert!(mismatches.is_empty(), "{mismatches:#?}");
    assert!(pairs().count() > 400);
}

#[test]
fn stemming_is_idempotent_on_fixture() {
    for (_, s) in pairs() {
        assert_eq!(stem(s), s, "stem of stem `{s}` changed");
    }
}
