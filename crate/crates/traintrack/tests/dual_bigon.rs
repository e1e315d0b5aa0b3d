mod common;

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use traintrack::dual_bigon::{
    census, dual_track, induced_tangential, output_ok, polygon_side_weights, run_pipeline, sneak_up, DualKind,
};
use traintrack::measures::{is_maximal, is_tangential, random_integral_transverse};
use traintrack::rational::q;
use traintrack::{canonical_label, TrainTrack};

fn permuted(t: &TrainTrack, seed: u64) -> TrainTrack {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut br: Vec<u32> = (0..t.branch_capacity() as u32).collect();
    let mut sw: Vec<u32> = (0..t.switch_capacity() as u32).collect();
    br.shuffle(&mut rng);
    sw.shuffle(&mut rng);
    t.relabeled(&|s| sw[s as usize], &|b| br[b as usize])
}

#[test]
fn dual_census_keeps_trigons_and_monogons() {
    for e in common::catalog_entries() {
        let d = dual_track(&e.track).unwrap();
        let (cs, cd) = (census(&e.track), census(&d.dual));
        assert_eq!((cd.trigons, cd.monogons, cd.other), (cs.trigons, cs.monogons, 0), "{}", e.name);
        let bigons = match &e.name[..3] {
            "s05" => 8,
            "s12" => 8,
            _ => 12,
        };
        assert_eq!(cd.bigons, bigons, "{}", e.name);
        assert!(d.dual.validate(&e.surface).unwrap().is_ok());
        // Every source branch is crossed by exactly one dual arc.
        let arcs: BTreeSet<u32> =
            d.dual.branch_ids().filter(|&b| d.kinds[b as usize] == Some(DualKind::Arc)).collect();
        assert_eq!(arcs, e.track.branch_ids().collect());
    }
}

#[test]
fn dual_construction_commutes_with_relabelling() {
    for e in common::catalog_entries() {
        let a = dual_track(&e.track).unwrap().dual;
        let b = dual_track(&permuted(&e.track, 17)).unwrap().dual;
        assert_eq!(canonical_label(&a), canonical_label(&b), "{}", e.name);
    }
}

#[test]
fn induced_weights_vanish_exactly_inside_regions() {
    for e in common::catalog_entries() {
        let d = dual_track(&e.track).unwrap();
        let nu = induced_tangential(&d, &e.guide).unwrap();
        assert!(is_tangential(&d.dual, &nu, false));
        let zeros: BTreeSet<u32> = d.dual.branch_ids().filter(|&b| nu[b as usize].is_zero()).collect();
        assert_eq!(zeros, d.interior_branches().into_iter().collect(), "{}", e.name);
        for b in e.track.branch_ids() {
            assert_eq!(nu[b as usize], e.guide[b as usize]);
        }
    }
}

#[test]
fn sneak_up_leaves_every_side_with_weight_two() {
    let mut done = 0;
    for e in common::catalog_entries() {
        let d = dual_track(&e.track).unwrap();
        let Ok(s) = sneak_up(&d, &e.guide) else { continue };
        for w in polygon_side_weights(&d.dual, &s.mu_star).iter().flatten() {
            assert_eq!(*w, q(2), "{}", e.name);
        }
        assert_eq!(&s.total - &s.induced_total, s.predicted_change);
        let expected_pulled: usize = d.sides.iter().map(|x| if x.connector.is_some() { 2 } else { 1 }).sum();
        assert_eq!(s.pulled, expected_pulled);
        assert!(is_tangential(&d.dual, &s.mu_star, true));
        done += 1;
    }
    assert!(done >= 3, "{done}");
}

#[test]
fn dual_tracks_are_not_valid_inputs() {
    let e = &common::catalog_entries()[0];
    let d = dual_track(&e.track).unwrap();
    assert!(!is_maximal(&d.dual));
    assert!(dual_track(&d.dual).is_err());
}

#[test]
fn collapse_pipeline_on_random_guides() {
    let e = common::catalog_entries().into_iter().find(|e| e.name == "s05-b").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut accepted = 0;
    for seed in 0..12u64 {
        let mu = random_integral_transverse(&e.track, &mut rng, 4, 16).unwrap();
        let d = dual_track(&e.track).unwrap();
        if sneak_up(&d, &mu).is_err() {
            continue;
        }
        let p = run_pipeline(&e.track, &mu, seed, 4).unwrap();
        output_ok(&p.outcome).unwrap();
        assert!(p.outcome.collapse_events.iter().all(|(before, after)| after < before));
        assert_eq!(census(&p.outcome.track).bigons, 0);
        assert!(p.outcome.trace.len() <= p.outcome.budget);
        assert!(p.outcome.track.validate(&e.surface).unwrap().is_ok());
        accepted += 1;
    }
    assert!(accepted > 0);
}
