mod common;

use rayon::prelude::*;
use semipos::semipos::{classify_msp, classify_sp, sample_sp, MspVerdict};
use semipos::PolyCone;

#[test]
fn samples_are_semipositive_and_not_all_minimal() {
    let k = PolyCone::orthant(3);
    let verdicts: Vec<_> = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let a = sample_sp(3, 3, &k, &k, seed).unwrap();
            let sp = classify_sp(&a, &k, &k).unwrap();
            assert!(sp.is_semipositive(), "seed {seed}");
            assert!(common::orthant_verdict_holds(&a, &sp), "seed {seed}");
            classify_msp(&a, &k, &k).unwrap()
        })
        .collect();
    let redundant = verdicts.iter().filter(|v| matches!(v, MspVerdict::Redundant { .. })).count();
    let minimal = verdicts.iter().filter(|v| matches!(v, MspVerdict::Minimal { .. })).count();
    assert_eq!(redundant + minimal, 1000);
    assert!(redundant > 0, "no redundantly semipositive sample among 1000");
}

#[test]
fn sampling_is_seed_stable_over_general_cones() {
    let k1 = PolyCone::parse("dim 2\n1 0\n1 1\n-1 2\n").unwrap();
    let k2 = PolyCone::parse("dim 3\n1 0 0\n0 1 0\n0 0 1\n1 1 -1\n").unwrap();
    for seed in 0..20 {
        let a = sample_sp(3, 2, &k1, &k2, seed).unwrap();
        assert_eq!(a, sample_sp(3, 2, &k1, &k2, seed).unwrap());
        let v = classify_sp(&a, &k1, &k2).unwrap();
        assert!(v.is_semipositive());
        assert!(v.verify(&a, &k1, &k2).unwrap());
    }
    assert_ne!(sample_sp(3, 2, &k1, &k2, 0).unwrap(), sample_sp(3, 2, &k1, &k2, 1).unwrap());
}
