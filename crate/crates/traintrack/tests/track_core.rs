mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use traintrack::io::{parse_track, write_track};
use traintrack::moves::{split, Direction};
use traintrack::{canonical_label, canonical_track, isomorphic, isomorphisms, BranchKind, Surface, TrackError, TrainTrack};

fn permuted(t: &TrainTrack, seed: u64) -> TrainTrack {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut br: Vec<u32> = (0..t.branch_capacity() as u32).collect();
    let mut sw: Vec<u32> = (0..t.switch_capacity() as u32).collect();
    br.shuffle(&mut rng);
    sw.shuffle(&mut rng);
    t.relabeled(&|s| sw[s as usize], &|b| br[b as usize])
}

#[test]
fn catalog_counts_match_the_euler_formulas() {
    for e in common::catalog_entries() {
        let t = &e.track;
        let s = e.surface;
        assert!(t.validate(&s).unwrap().is_ok(), "{}", e.name);
        assert_eq!(t.surface(), Some(s), "{}", e.name);
        assert_eq!(t.branch_count() as i64, s.maximal_branch_count(), "{}", e.name);
        assert_eq!(t.switch_count() as i64, s.maximal_switch_count(), "{}", e.name);
        let regions = t.regions();
        let doubled: i64 = regions.iter().map(|r| r.double_euler()).sum();
        assert_eq!(doubled, 2 * s.euler_characteristic(), "{}", e.name);
        let trigons = regions.iter().filter(|r| r.is_trigon()).count() as i64;
        let monogons = regions.iter().filter(|r| r.is_punctured_monogon()).count() as u32;
        assert_eq!(trigons, s.maximal_trigon_count(), "{}", e.name);
        assert_eq!(monogons, s.punctures, "{}", e.name);
        assert!(s.complexity() >= 2);
    }
}

#[test]
fn s05_catalog_track_has_one_trigon_and_five_monogons() {
    let e = &common::catalog_entries()[0];
    assert_eq!(e.name, "s05-a");
    let c = traintrack::dual_bigon::census(&e.track);
    assert_eq!((c.trigons, c.monogons, c.bigons, c.other), (1, 5, 0, 0));
}

#[test]
fn unpunctured_disc_region_is_forbidden() {
    // A single closed curve on the sphere bounds two discs without cusps.
    let t = parse_track("track bigons=0\nsw 0 a:0.0 b:0.1\nbr 0 0.a0 0.b0\n").unwrap();
    let rep = t.validate(&Surface::new(0, 0)).unwrap();
    let clauses: BTreeSet<&str> = rep.violations.iter().map(|v| v.clause()).collect();
    assert!(clauses.contains("forbidden region"), "{rep:?}");
}

#[test]
fn bigons_are_legal_only_in_bigon_tracks() {
    for e in common::catalog_entries() {
        let mut dual = traintrack::dual_bigon::dual_track(&e.track).unwrap().dual;
        assert!(dual.allows_bigons());
        assert!(dual.validate(&e.surface).unwrap().is_ok(), "{}", e.name);
        dual.set_allows_bigons(false);
        let rep = dual.validate(&e.surface).unwrap();
        assert!(rep.violations.iter().all(|v| v.clause() == "forbidden region"), "{}", e.name);
        assert!(!rep.is_ok());
    }
}

#[test]
fn connector_alone_bounds_two_regions() {
    for e in common::catalog_entries() {
        for (l, s) in common::planted_connectors(e.name) {
            assert_eq!(e.track.classify_branch(l), BranchKind::Large);
            assert_eq!(e.track.classify_branch(s), BranchKind::Small);
            let c = e.track.subtrack(&BTreeSet::from([l, s])).unwrap();
            let regions = c.regions();
            assert_eq!(regions.len(), 2, "{} {l}/{s}", e.name);
            assert!(regions.iter().all(|r| r.cusps() == 0));
        }
    }
}

#[test]
fn classification_is_consistent_with_slot_counts() {
    for e in common::catalog_entries() {
        let t = &e.track;
        for b in t.branch_ids() {
            let ends = [0u8, 1].map(|end| t.is_large_half(traintrack::HalfBranch::new(b, end)));
            let expected = match ends {
                [true, true] => BranchKind::Large,
                [false, false] => BranchKind::Small,
                _ => BranchKind::Mixed,
            };
            assert_eq!(t.classify_branch(b), expected);
        }
        assert!(t.is_generic());
        assert_eq!(t.excess_valence(), 0);
    }
}

#[test]
fn right_and_left_splits_differ() {
    for e in common::catalog_entries() {
        for b in e.track.large_branches() {
            let r = split(&e.track, b, Direction::Right).unwrap().0;
            let l = split(&e.track, b, Direction::Left).unwrap().0;
            assert_ne!(canonical_label(&r), canonical_label(&l), "{} branch {b}", e.name);
        }
    }
}

#[test]
fn print_parse_is_the_identity() {
    for e in common::catalog_entries() {
        let text = write_track(&e.track);
        assert_eq!(write_track(&parse_track(&text).unwrap()), text);
        let canon = write_track(&canonical_track(&e.track));
        assert_eq!(write_track(&parse_track(&canon).unwrap()), canon);
        let dual = traintrack::dual_bigon::dual_track(&e.track).unwrap().dual;
        let text = write_track(&dual);
        assert_eq!(write_track(&parse_track(&text).unwrap()), text);
    }
}

#[test]
fn parse_errors_carry_positions() {
    let cases = [
        ("track bigons=2\n", 1, 7),
        ("track bigons=0\nsw 0 a:0.0\n", 2, 1),
        ("track bigons=0\nsw 0 a:0.0 b:0.x\n", 2, 14),
        ("track bigons=0\nsw 0 a:0.0 b:0.1\nfoo\n", 3, 1),
        ("track bigons=0\nsw 0 a:0.0 b:0.1\nbr 0 0.a0 1.b0\n", 3, 1),
        ("\n\n", 2, 1),
    ];
    for (text, line, column) in cases {
        match parse_track(text) {
            Err(TrackError::Parse { line: l, column: c, .. }) => assert_eq!((l, c), (line, column), "{text:?}"),
            other => panic!("{text:?} parsed as {other:?}"),
        }
    }
}

#[test]
fn switch_side_swap_and_branch_reversal_keep_the_form() {
    for e in common::catalog_entries() {
        let base = canonical_label(&e.track);
        for s in e.track.switch_ids() {
            assert_eq!(canonical_label(&e.track.with_sides_swapped(s)), base);
        }
        for b in e.track.branch_ids() {
            assert_eq!(canonical_label(&e.track.with_branch_reversed(b)), base);
        }
    }
}

#[test]
fn isomorphisms_include_the_identity() {
    for e in common::catalog_entries() {
        let isos = isomorphisms(&e.track, &e.track);
        assert!(isos.iter().any(|m| m.iter().all(|(k, (v, rev))| k == v && !rev)), "{}", e.name);
        let p = permuted(&e.track, 3);
        assert_eq!(isomorphisms(&e.track, &p).len(), isos.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_form_is_relabel_invariant(idx in 0usize..6, seed in any::<u64>()) {
        let e = &common::catalog_entries()[idx];
        let p = permuted(&e.track, seed);
        prop_assert_eq!(canonical_label(&p), canonical_label(&e.track));
        prop_assert!(isomorphic(&p, &e.track));
        prop_assert!(p.validate(&e.surface).unwrap().is_ok());
    }

    #[test]
    fn split_tracks_round_trip_through_text(idx in 0usize..6, seed in any::<u64>(), len in 0usize..6) {
        let e = &common::catalog_entries()[idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (t, _) = common::random_walk(&e.track, len, &mut rng);
        let text = write_track(&t);
        prop_assert_eq!(write_track(&parse_track(&text).unwrap()), text);
        prop_assert!(t.validate(&e.surface).unwrap().is_ok());
    }
}
