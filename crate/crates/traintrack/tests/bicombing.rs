mod common;

use std::collections::{BTreeMap, HashSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use traintrack::bicombing::{
    circle_multi_split, connector_circle, find_symmetric_paths, level_one_config, level_one_partition, sigma_move,
    tight_multi_sequence, twist_sign, LevelOne,
};
use traintrack::io::write_track;
use traintrack::moves;
use traintrack::strips::{enumerate_strip, phi_of, replay, EnumerateOptions, SplittingSequence, Target};
use traintrack::{BranchId, Direction, SplitRecord, TrainTrack};

/// True when `goal` is reached from `t` by splitting each label as often as
/// `counts` says, in some order and with some directions.
fn reaches(t: &TrainTrack, counts: &BTreeMap<BranchId, i64>, goal: &str, seen: &mut HashSet<(String, Vec<i64>)>) -> bool {
    if counts.values().all(|&c| c == 0) {
        return write_track(t) == goal;
    }
    let key = (write_track(t), counts.values().copied().collect());
    if !seen.insert(key) {
        return false;
    }
    for (&b, &c) in counts {
        if c == 0 || !t.large_branches().contains(&b) {
            continue;
        }
        for d in [Direction::Right, Direction::Left] {
            let next = moves::split(t, b, d).unwrap().0;
            let mut rest = counts.clone();
            *rest.get_mut(&b).unwrap() -= 1;
            if reaches(&next, &rest, goal, seen) {
                return true;
            }
        }
    }
    false
}

fn count_map(recs: &[SplitRecord]) -> BTreeMap<BranchId, i64> {
    let mut m = BTreeMap::new();
    for r in recs {
        *m.entry(r.slot).or_insert(0) += 1;
    }
    m
}

#[test]
fn planted_connectors_are_special_circles() {
    for e in common::catalog_entries() {
        for (l, s) in common::planted_connectors(e.name) {
            let c = connector_circle(&e.track, l, s).unwrap();
            assert!(c.circle);
            assert_eq!(c.labels().len(), 2);
            assert!(find_symmetric_paths(&e.track).iter().any(|p| p.circle && p.branch_set() == c.branch_set()));
            let tw = circle_multi_split(&e.track, &c, 8).unwrap();
            assert_eq!(tw.k, 1, "{} {l}/{s}", e.name);
            assert!(tw.lengths.iter().all(|&n| n == 2));
            let sign = twist_sign(&e.track, l, s).unwrap();
            let mirror = e.track.mirrored();
            assert_eq!(twist_sign(&mirror, l, s).unwrap(), -sign, "{} {l}/{s}", e.name);
            let mc = connector_circle(&mirror, l, s).unwrap();
            assert_eq!(circle_multi_split(&mirror, &mc, 8).unwrap().lengths, tw.lengths);
        }
    }
}

#[test]
fn a_single_split_target_is_reached_in_one_move() {
    for e in common::catalog_entries() {
        for b in e.track.large_branches() {
            let rec = SplitRecord::new(b, Direction::Right);
            let c = level_one_config(&e.track, &[rec], b).unwrap();
            assert!(c.branches().contains(&b));
            let (t, done, rest) = sigma_move(&e.track, &[rec]).unwrap();
            assert_eq!(done, vec![rec], "{} branch {b}", e.name);
            assert!(rest.is_empty());
            assert_eq!(t, moves::split(&e.track, b, Direction::Right).unwrap().0);
        }
    }
}

#[test]
fn empty_targets_do_not_move() {
    let e = &common::catalog_entries()[0];
    let (t, done, rest) = sigma_move(&e.track, &[]).unwrap();
    assert_eq!(t, e.track);
    assert!(done.is_empty() && rest.is_empty());
    let tm = tight_multi_sequence(&e.track, &[]).unwrap();
    assert_eq!(tm.stations.len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// A move lands on the join of the strip vertices that lie below the
    /// multi-split of each splittable configuration.
    #[test]
    fn sigma_move_matches_the_strip(idx in 0usize..6, seed in any::<u64>(), len in 1usize..6) {
        let e = &common::catalog_entries()[idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, recs) = common::random_walk(&e.track, len, &mut rng);
        let t = &e.track;
        let strip = enumerate_strip(t, &Target::Track(SplittingSequence::new(t.clone(), recs.clone())), EnumerateOptions::default()).unwrap();
        let mut expected = vec![0i64; strip.dim];
        for c in level_one_partition(t, &recs).unwrap() {
            let LevelOne::Splittable { records, .. } = c else { continue };
            let ms_end = write_track(&replay(t, &records).unwrap());
            let ms_phi = phi_of(strip.dim, &records);
            let below: Vec<usize> = (0..strip.len())
                .filter(|&v| {
                    let phi = &strip.vertices[v].phi;
                    if phi.iter().zip(&ms_phi).any(|(a, b)| a > b) {
                        return false;
                    }
                    let rest: BTreeMap<BranchId, i64> = count_map(&records)
                        .into_iter()
                        .map(|(b, n)| (b, n - phi[b as usize]))
                        .collect();
                    reaches(&strip.vertices[v].track, &rest, &ms_end, &mut HashSet::new())
                })
                .collect();
            let top = below.iter().copied().max_by_key(|&v| strip.vertices[v].depth).unwrap();
            for &v in &below {
                let (p, q) = (&strip.vertices[v].phi, &strip.vertices[top].phi);
                prop_assert!(p.iter().zip(q).all(|(a, b)| a <= b), "no largest vertex below a multi-split");
            }
            for (x, y) in expected.iter_mut().zip(&strip.vertices[top].phi) {
                *x += y;
            }
        }
        let (_, done, rest) = sigma_move(t, &recs).unwrap();
        prop_assert_eq!(phi_of(strip.dim, &done), expected);
        prop_assert_eq!(done.len() + rest.len(), recs.len());
        let tm = tight_multi_sequence(t, &recs).unwrap();
        prop_assert!(tm.moves.len() <= recs.len());
        prop_assert_eq!(tm.stations.last().unwrap(), &replay(t, &recs).unwrap());
    }
}
