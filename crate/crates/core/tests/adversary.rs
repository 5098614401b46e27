mod common;

use affine_fair::adversary::{all_adversaries, min_hitting_set, Adversary, AgreementFunction, Family, FairAdversary};
use affine_fair::procset::ProcSet;
use proptest::prelude::*;
use serde::{Deserialize, Serialize};

/// Plain recursion on explicit lists of live sets, no memo and no bitmasks.
fn setcon_oracle(sets: &[ProcSet]) -> usize {
    sets.iter()
        .map(|s| {
            s.iter()
                .map(|a| {
                    let rest = s.without(a);
                    let below: Vec<ProcSet> = sets.iter().copied().filter(|t| t.is_subset(rest)).collect();
                    setcon_oracle(&below) + 1
                })
                .min()
                .unwrap()
        })
        .max()
        .unwrap_or(0)
}

/// Smallest hitting set by scanning every subset in order of size.
fn hitting_oracle(n: usize, sets: &[ProcSet]) -> Option<usize> {
    if sets.iter().any(|s| s.is_empty()) {
        return None;
    }
    ProcSet::full(n).subsets().filter(|h| sets.iter().all(|s| s.intersects(*h))).map(ProcSet::len).min()
}

fn family(n: usize) -> impl Strategy<Value = Family> {
    let subsets = (1u32 << n) - 1;
    (0u32..(1 << subsets)).prop_map(|code| Family::from_bits(code << 1))
}

fn live(adv: &Adversary) -> Vec<ProcSet> {
    adv.live_sets().iter().collect()
}

#[test]
fn setcon_matches_oracle_on_every_adversary_of_three() {
    let mut count = 0;
    for adv in all_adversaries(3) {
        assert_eq!(adv.setcon(), setcon_oracle(&live(&adv)), "{adv}");
        count += 1;
    }
    assert_eq!(count, 128);
}

#[test]
fn known_agreement_powers() {
    for n in 1..=5 {
        for k in 1..=n {
            let adv = Adversary::k_of(n, k).unwrap();
            assert_eq!(adv.setcon(), k);
            let alpha = AgreementFunction::from_adversary(&adv).unwrap();
            for p in ProcSet::full(n).subsets() {
                assert_eq!(alpha.get(p), p.len().min(k));
            }
        }
        for t in 0..n {
            let adv = Adversary::t_resilient(n, t).unwrap();
            assert_eq!(adv.setcon(), t + 1);
            let alpha = AgreementFunction::from_adversary(&adv).unwrap();
            for p in ProcSet::full(n).subsets() {
                assert_eq!(alpha.get(p), (p.len() + t + 1).saturating_sub(n));
            }
        }
    }
}

#[test]
fn symmetric_shortcut_agrees_with_recursion() {
    for n in 1..=4 {
        for mask in 1u32..(1 << n) {
            let sizes: Vec<usize> = (1..=n).filter(|s| mask & (1 << (s - 1)) != 0).collect();
            let adv = Adversary::symmetric(n, &sizes).unwrap();
            assert!(adv.is_symmetric());
            assert_eq!(adv.symmetric_setcon_shortcut(), Some(sizes.len()));
            assert_eq!(adv.setcon(), sizes.len());
            assert!(adv.is_fair(), "{adv}");
        }
    }
}

#[test]
fn superset_closed_power_is_hitting_size() {
    for n in 1..=4 {
        for adv in all_adversaries(n).filter(Adversary::is_superset_closed) {
            assert_eq!(adv.setcon(), adv.csize(), "{adv}");
            assert!(adv.is_fair(), "{adv}");
        }
    }
}

#[test]
fn every_derived_alpha_is_valid_at_three() {
    for adv in all_adversaries(3) {
        let alpha = AgreementFunction::from_adversary(&adv).unwrap();
        alpha.validate().unwrap();
        assert!(alpha.get(ProcSet::EMPTY) == 0);
        if adv.is_fair() {
            assert_eq!(alpha.subtraction_bound_witness(), None, "{adv}");
        }
    }
}

#[test]
fn alpha_validation_rejects_bad_functions() {
    assert!(AgreementFunction::from_fn(3, |p| 3 - p.len()).is_err());
    assert!(AgreementFunction::from_fn(3, |p| if p.len() == 3 { 2 } else { 0 }).is_err());
    assert!(AgreementFunction::from_fn(3, |p| p.len().min(1)).is_ok());
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct FairnessSweep {
    fair: usize,
    total: usize,
    first_unfair: String,
    witness_p: ProcSet,
    witness_q: ProcSet,
    lhs: usize,
    rhs: usize,
}

#[test]
fn fairness_sweep_at_three() {
    let all: Vec<Adversary> = all_adversaries(3).collect();
    let fair = all.iter().filter(|a| a.is_fair()).count();
    let unfair = all.iter().find(|a| !a.is_fair()).unwrap();
    let (p, q, lhs, rhs) = unfair.fairness_witness().unwrap();
    assert_ne!(lhs, rhs);
    assert!(q.is_subset(p));
    assert!(FairAdversary::new(unfair.clone()).is_err());
    common::golden(
        "fairness_sweep_n3.json",
        &FairnessSweep {
            fair,
            total: all.len(),
            first_unfair: unfair.to_string(),
            witness_p: p,
            witness_q: q,
            lhs,
            rhs,
        },
    );
}

#[test]
fn singleton_adversary_is_unfair() {
    let adv = Adversary::explicit(3, [ProcSet::from_ids([1])]).unwrap();
    let (p, q, lhs, rhs) = adv.fairness_witness().unwrap();
    let restricted: Vec<ProcSet> = live(&adv).into_iter().filter(|s| s.is_subset(p) && s.intersects(q)).collect();
    assert_eq!(lhs, setcon_oracle(&restricted));
    assert_eq!(rhs, q.len().min(setcon_oracle(&live(&adv.restrict(p)))));
}

#[test]
fn spec_round_trip() {
    let advs = [
        Adversary::k_of(3, 2).unwrap(),
        Adversary::t_resilient(3, 1).unwrap(),
        Adversary::symmetric(3, &[1, 3]).unwrap(),
        Adversary::superset_closed(3, &[ProcSet::from_ids([2]), ProcSet::from_ids([1, 3])]).unwrap(),
        Adversary::explicit(3, [ProcSet::from_ids([1, 2])]).unwrap(),
    ];
    for adv in advs {
        let spec = adv.to_spec();
        let text = serde_json::to_string(&spec).unwrap();
        let back = serde_json::from_str::<affine_fair::AdversarySpec>(&text).unwrap().build().unwrap();
        assert_eq!(back.live_sets(), adv.live_sets());
    }
}

proptest! {
    #[test]
    fn hitting_set_matches_scan(f in family(4)) {
        let sets: Vec<ProcSet> = f.iter().collect();
        let ours = min_hitting_set(&sets);
        prop_assert_eq!(ours.map(ProcSet::len), hitting_oracle(4, &sets));
        if let Some(h) = ours {
            prop_assert!(sets.iter().all(|s| s.intersects(h)));
        }
    }

    #[test]
    fn setcon_matches_oracle_at_four(f in family(4)) {
        let adv = Adversary::from_family(4, f).unwrap();
        prop_assert_eq!(adv.setcon(), setcon_oracle(&live(&adv)));
    }

    #[test]
    fn setcon_is_monotone_in_the_family(a in family(4), b in family(4)) {
        let small = Adversary::from_family(4, Family::from_bits(a.bits() & b.bits())).unwrap();
        let big = Adversary::from_family(4, a).unwrap();
        prop_assert!(small.setcon() <= big.setcon());
    }

    #[test]
    fn setcon_bounded_by_hitting_size(f in family(4)) {
        let adv = Adversary::from_family(4, f).unwrap();
        prop_assert!(adv.setcon() <= adv.csize());
        prop_assert!(adv.setcon() <= 4);
    }

    #[test]
    fn derived_alpha_is_valid_at_four(f in family(4)) {
        let adv = Adversary::from_family(4, f).unwrap();
        prop_assert!(AgreementFunction::from_adversary(&adv).is_ok());
    }
}
