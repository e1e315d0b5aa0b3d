mod common;

use std::collections::{BTreeSet, HashSet, VecDeque};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use traintrack::io::write_track;
use traintrack::moves::{self, corners};
use traintrack::strips::{
    canonical_sequence, enumerate_strip, find_splitting_sequence, guided_sequence, phi_of, replay, tighten,
    EnumerateOptions, SplittingSequence, Subtrack, Target,
};
use traintrack::{BranchId, Direction, SplitRecord, TrainTrack, TrackError};

const FULL: EnumerateOptions = EnumerateOptions { radius: None, jobs: None };

fn far_apart_pair(t: &TrainTrack) -> Option<(BranchId, BranchId)> {
    let large = t.large_branches();
    for &a in &large {
        for &b in &large {
            let (ka, kb) = (corners(t, a).ok()?, corners(t, b).ok()?);
            if a < b && [ka.s, ka.t].iter().all(|s| *s != kb.s && *s != kb.t) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Commutation used by the reordering: both slots are large in the current
/// track and their end switches are disjoint.
fn commutes(t: &TrainTrack, f: BranchId, e: BranchId) -> bool {
    use traintrack::{BranchKind, HalfBranch};
    if f == e || t.classify_branch(f) != BranchKind::Large || t.classify_branch(e) != BranchKind::Large {
        return false;
    }
    let ends = |b: BranchId| [0u8, 1].map(|k| t.endpoint(HalfBranch::new(b, k)).switch);
    let (sf, se) = (ends(f), ends(e));
    !sf.iter().any(|s| se.contains(s))
}

/// Every reordering reachable by swapping adjacent commuting records.
fn reorderings(base: &TrainTrack, recs: &[SplitRecord]) -> Vec<Vec<SplitRecord>> {
    let mut seen: HashSet<Vec<SplitRecord>> = HashSet::from([recs.to_vec()]);
    let mut queue = VecDeque::from([recs.to_vec()]);
    while let Some(r) = queue.pop_front() {
        let mut cur = base.clone();
        for i in 0..r.len().saturating_sub(1) {
            if commutes(&cur, r[i].slot, r[i + 1].slot) {
                let mut s = r.clone();
                s.swap(i, i + 1);
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
            cur = moves::apply(&cur, r[i]).unwrap();
        }
    }
    seen.into_iter().collect()
}

#[test]
fn target_equal_to_base_gives_one_vertex() {
    for e in common::catalog_entries() {
        let seq = SplittingSequence::new(e.track.clone(), vec![]);
        let strip = enumerate_strip(&e.track, &Target::Track(seq), FULL).unwrap();
        assert_eq!(strip.len(), 1);
        assert!(strip.edges.is_empty() && !strip.truncated);
    }
}

#[test]
fn two_commuting_splits_span_a_square() {
    let e = common::catalog_entries().into_iter().find(|e| far_apart_pair(&e.track).is_some()).unwrap();
    let (a, b) = far_apart_pair(&e.track).unwrap();
    let recs = vec![SplitRecord::new(a, Direction::Right), SplitRecord::new(b, Direction::Left)];
    let seq = SplittingSequence::new(e.track.clone(), recs.clone());
    let strip = enumerate_strip(&e.track, &Target::Track(seq), FULL).unwrap();
    assert_eq!(strip.len(), 4);
    assert_eq!(strip.edges.len(), 4);
    let cx = traintrack::cubical::build_complex(&strip, false).unwrap();
    assert_eq!(cx.f_vector(), vec![4, 4, 1]);
    let qi = traintrack::cubical::qi_constants(&strip).unwrap();
    assert_eq!(qi.upper_sq, traintrack::rational::q(2));
    assert_eq!(qi.lower_sq, traintrack::rational::q(1));
    let va = strip.vertex_of(&phi_of(strip.dim, &recs[..1])).unwrap();
    let vb = strip.vertex_of(&phi_of(strip.dim, &recs[1..])).unwrap();
    let top = strip.vertex_of(&phi_of(strip.dim, &recs)).unwrap();
    assert_eq!(strip.meet(va, vb).unwrap(), 0);
    assert_eq!(strip.join(va, vb).unwrap(), top);
    let line = traintrack::bicombing::combing_line(&strip, 0, top).unwrap();
    assert_eq!(line, vec![0, top]);
}

#[test]
fn guide_strips_record_consistent_phi_and_tracks() {
    for e in common::catalog_entries() {
        let strip = enumerate_strip(&e.track, &Target::Guide(e.guide.clone()), EnumerateOptions { radius: Some(4), jobs: None })
            .unwrap();
        for (i, v) in strip.vertices.iter().enumerate() {
            let path = strip.path_to(i);
            assert_eq!(path.len(), v.depth);
            assert_eq!(phi_of(strip.dim, &path), v.phi);
            assert_eq!(replay(&e.track, &path).unwrap(), v.track, "{} vertex {i}", e.name);
            assert!(traintrack::measures::is_transverse(&v.track, v.mu.as_ref().unwrap()));
        }
        assert!(traintrack::cubical::superlevel_sets_connected(&strip).is_none(), "{}", e.name);
    }
}

#[test]
fn guided_sequences_are_found_again_by_search() {
    for e in common::catalog_entries() {
        let (seq, _) = guided_sequence(&e.track, &e.guide, 3).unwrap();
        let end = seq.end().unwrap();
        let found = find_splitting_sequence(&e.track, &end, 3).unwrap().expect("reachable");
        assert!(found.len() <= seq.records.len());
        assert_eq!(write_track(&replay(&e.track, &found).unwrap()), write_track(&end));
    }
}

#[test]
fn tightening_never_raises_subtrack_complexity() {
    let mut tightened = 0;
    for e in common::catalog_entries() {
        for drop in e.track.branch_ids() {
            let keep: BTreeSet<BranchId> = e.track.branch_ids().filter(|&b| b != drop).collect();
            let sigma = Subtrack::new(keep);
            if !sigma.is_valid_in(&e.track) {
                continue;
            }
            let Some(&start) = sigma.branches.iter().find(|&&b| sigma.branch_path(&e.track, b).len() > 1) else { continue };
            let sub = e.track.subtrack(&sigma.branches).unwrap();
            let Some(w) = traintrack::measures::positive_transverse(&sub) else { continue };
            let carried = traintrack::measures::padded(&w, e.track.branch_capacity());
            assert!(traintrack::measures::is_transverse(&e.track, &carried));
            match tighten(&e.track, &sigma, start, &carried, 64) {
                Ok(t) => {
                    assert!(t.complexity_trace.windows(2).all(|w| w[1] <= w[0]), "{} drop {drop}", e.name);
                    assert_eq!(t.sigma.branch_path(&t.track, t.branch).len(), 1);
                    assert_eq!(replay(&e.track, &t.records).unwrap(), t.track);
                    tightened += 1;
                }
                Err(TrackError::Unsupported(_) | TrackError::Budget(_)) => {}
                Err(other) => panic!("{} drop {drop}: {other}", e.name),
            }
        }
    }
    assert!(tightened > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_sequence_is_the_smallest_reordering(idx in 0usize..6, seed in any::<u64>(), len in 1usize..6) {
        let e = &common::catalog_entries()[idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (end, recs) = common::random_walk(&e.track, len, &mut rng);
        let seq = SplittingSequence::new(e.track.clone(), recs.clone());
        let canon = canonical_sequence(&seq).unwrap();
        let all = reorderings(&e.track, &recs);
        for r in &all {
            prop_assert_eq!(&replay(&e.track, r).unwrap(), &end);
        }
        let best = all.iter().min_by_key(|r| r.iter().map(|x| x.slot).collect::<Vec<_>>()).unwrap();
        let slots = |r: &[SplitRecord]| r.iter().map(|x| x.slot).collect::<Vec<_>>();
        prop_assert_eq!(slots(&canon.records), slots(best));
        prop_assert_eq!(canon.end().unwrap(), end);
    }

    #[test]
    fn strip_vertices_finish_with_their_residual(idx in 0usize..6, seed in any::<u64>(), len in 1usize..6) {
        let e = &common::catalog_entries()[idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (end, recs) = common::random_walk(&e.track, len, &mut rng);
        let strip = enumerate_strip(&e.track, &Target::Track(SplittingSequence::new(e.track.clone(), recs.clone())), FULL).unwrap();
        prop_assert!(strip.vertex_of(&phi_of(strip.dim, &recs)).is_some());
        for (i, v) in strip.vertices.iter().enumerate() {
            let mut path = strip.path_to(i);
            prop_assert_eq!(&replay(&e.track, &path).unwrap(), &v.track);
            path.extend(v.residual.iter().copied());
            prop_assert_eq!(&replay(&e.track, &path).unwrap(), &end);
            prop_assert_eq!(v.depth + v.residual.len(), recs.len());
        }
    }
}
