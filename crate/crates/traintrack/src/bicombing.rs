//! Alternating trainpaths and circles, multi-splits along them, moves
//! towards a target and the resulting combing lines.
//!
//! Only special paths and circles are recognized directly; paths that are
//! special only after shifts are not searched for.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::canonical::canonical_label;
use crate::error::TrackError;
use crate::moves::{self, Direction, SplitRecord};
use crate::rational::Q;
use crate::strips::{self, FlatStrip};
use crate::track::{BranchId, BranchKind, Dart, TrainTrack};

/// Side of the path on which the neighbour at an interior switch lies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Turn {
    Left,
    Right,
}

impl Turn {
    pub fn flip(self) -> Turn {
        match self {
            Turn::Left => Turn::Right,
            Turn::Right => Turn::Left,
        }
    }
}

/// Turn taken when passing smoothly from `d_in` to `d_out`, or `None` when
/// the passage is not smooth.
pub fn turn(t: &TrainTrack, d_in: Dart, d_out: Dart) -> Option<Turn> {
    let a = t.endpoint(d_in.head());
    let b = t.endpoint(d_out.tail());
    if a.switch != b.switch || a.side == b.side {
        return None;
    }
    // The region left of `d_in` runs along the path exactly when nothing
    // attaches on the left.
    if t.next_dart(d_in) == (d_out, false) {
        Some(Turn::Right)
    } else {
        Some(Turn::Left)
    }
}

/// A special trainpath or circle with its turn certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricPath {
    pub darts: Vec<Dart>,
    pub circle: bool,
    /// Turns at the interior switches (all switches for circles).
    pub turns: Vec<Turn>,
}

impl SymmetricPath {
    pub fn labels(&self) -> Vec<BranchId> {
        self.darts.iter().map(|d| d.branch).collect()
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn branch_set(&self) -> BTreeSet<BranchId> {
        self.labels().into_iter().collect()
    }

    fn key(&self) -> Vec<BranchId> {
        if self.circle {
            let mut l = self.labels();
            l.sort_unstable();
            l
        } else {
            let a = self.labels();
            let mut b = a.clone();
            b.reverse();
            a.min(b)
        }
    }
}

/// Checks the special conditions for an open path.
pub fn is_special_path(t: &TrainTrack, darts: &[Dart]) -> Option<Vec<Turn>> {
    if darts.is_empty() || darts.len() % 2 == 0 {
        return None;
    }
    let mut sw = BTreeSet::new();
    let mut br = BTreeSet::new();
    if !sw.insert(t.endpoint(darts[0].tail()).switch) {
        return None;
    }
    for d in darts {
        if !br.insert(d.branch) || !sw.insert(t.endpoint(d.head()).switch) {
            return None;
        }
    }
    check_pattern(t, darts, false)
}

fn check_pattern(t: &TrainTrack, darts: &[Dart], circle: bool) -> Option<Vec<Turn>> {
    for (i, d) in darts.iter().enumerate() {
        let want = if i % 2 == 0 { BranchKind::Large } else { BranchKind::Small };
        if t.classify_branch(d.branch) != want {
            return None;
        }
    }
    let n = darts.len();
    let pairs = if circle { n } else { n - 1 };
    let mut turns = Vec::with_capacity(pairs);
    for i in 0..pairs {
        let tr = turn(t, darts[i], darts[(i + 1) % n])?;
        if let Some(&prev) = turns.last() {
            if prev == tr {
                return None;
            }
        }
        turns.push(tr);
    }
    if circle && turns.len() >= 2 && turns[0] == turns[turns.len() - 1] {
        return None;
    }
    Some(turns)
}

/// Checks the special conditions for a closed circle of even length.
pub fn is_special_circle(t: &TrainTrack, darts: &[Dart]) -> Option<Vec<Turn>> {
    if darts.len() < 2 || darts.len() % 2 == 1 {
        return None;
    }
    let mut sw = BTreeSet::new();
    let mut br = BTreeSet::new();
    for d in darts {
        if !br.insert(d.branch) || !sw.insert(t.endpoint(d.head()).switch) {
            return None;
        }
    }
    check_pattern(t, darts, true)
}

/// Forced extension of a special path starting with the large dart
/// `start`, taking the small branch at position `first` at the first
/// switch.
fn extend(t: &TrainTrack, start: Dart, first: usize) -> Option<SymmetricPath> {
    let mut darts = vec![start];
    let mut turns: Vec<Turn> = Vec::new();
    let origin = t.endpoint(start.tail()).switch;
    let mut switches = BTreeSet::from([origin, t.endpoint(start.head()).switch]);
    if switches.len() < 2 {
        return None;
    }
    loop {
        let last = *darts.last().expect("nonempty");
        let ep = t.endpoint(last.head());
        let other = t.switch(ep.switch).side(ep.side.other());
        if other.len() != 2 {
            break;
        }
        // Pick the small branch whose turn alternates with the last one.
        let mut chosen = None;
        for (pos, h) in other.iter().enumerate() {
            let d = h.departing();
            if t.classify_branch(d.branch) != BranchKind::Small || darts.iter().any(|x| x.branch == d.branch) {
                continue;
            }
            let tr = turn(t, last, d)?;
            let ok = match turns.last() {
                Some(&p) => tr != p,
                None => pos == first,
            };
            if ok {
                chosen = Some((d, tr));
            }
        }
        let Some((small, tr_small)) = chosen else { break };
        let w = t.endpoint(small.head());
        if w.switch == origin {
            // Closing up: the next dart must be the start again.
            if let Some(tr) = turn(t, small, start) {
                let mut cturns = turns.clone();
                cturns.push(tr_small);
                cturns.push(tr);
                let mut cd = darts.clone();
                cd.push(small);
                if let Some(ct) = is_special_circle(t, &cd) {
                    debug_assert_eq!(ct.len(), cturns.len());
                    return Some(SymmetricPath { darts: cd, circle: true, turns: ct });
                }
            }
            break;
        }
        if switches.contains(&w.switch) {
            break;
        }
        let sole = t.switch(w.switch).side(w.side.other());
        if sole.len() != 1 {
            break;
        }
        let large = sole[0].departing();
        if t.classify_branch(large.branch) != BranchKind::Large || darts.iter().any(|x| x.branch == large.branch) {
            break;
        }
        let far = t.endpoint(large.head()).switch;
        if far == w.switch || switches.contains(&far) {
            break;
        }
        let Some(tr_large) = turn(t, small, large) else { break };
        if tr_large == tr_small {
            break;
        }
        darts.push(small);
        darts.push(large);
        turns.push(tr_small);
        turns.push(tr_large);
        switches.insert(w.switch);
        switches.insert(far);
    }
    let turns = is_special_path(t, &darts)?;
    Some(SymmetricPath { darts, circle: false, turns })
}

/// All maximal special paths and all special circles, deterministic order.
pub fn find_symmetric_paths(t: &TrainTrack) -> Vec<SymmetricPath> {
    let mut found: Vec<SymmetricPath> = Vec::new();
    for e in t.large_branches() {
        for fwd in [true, false] {
            for first in 0..2 {
                if let Some(p) = extend(t, Dart::new(e, fwd), first) {
                    if !found.iter().any(|q| q.key() == p.key() && q.circle == p.circle) {
                        found.push(p);
                    }
                }
            }
        }
    }
    let contained = |small: &SymmetricPath, big: &SymmetricPath| -> bool {
        if small.circle || big.circle || small.len() >= big.len() {
            return false;
        }
        let s = small.labels();
        let mut r = s.clone();
        r.reverse();
        let b = big.labels();
        b.windows(s.len()).any(|w| w == s.as_slice() || w == r.as_slice())
    };
    let mut out: Vec<SymmetricPath> =
        found.iter().filter(|p| !found.iter().any(|q| contained(p, q))).cloned().collect();
    out.sort_by_key(|p| (u8::from(!p.circle), p.key()));
    out
}

/// Orients a list of labels as a trainpath in `t`, if possible.
pub fn path_from_labels(t: &TrainTrack, labels: &[BranchId], circle: bool) -> Option<Vec<Dart>> {
    'outer: for fwd in [true, false] {
        let mut darts = vec![Dart::new(*labels.first()?, fwd)];
        for &l in &labels[1..] {
            let last = *darts.last().expect("nonempty");
            let next = [Dart::new(l, true), Dart::new(l, false)].into_iter().find(|&d| turn(t, last, d).is_some());
            match next {
                Some(d) => darts.push(d),
                None => continue 'outer,
            }
        }
        if circle && turn(t, *darts.last().expect("nonempty"), darts[0]).is_none() {
            continue;
        }
        return Some(darts);
    }
    None
}

/// Direction of the split at `f` that makes the given neighbours winners.
pub fn winner_direction(t: &TrainTrack, f: BranchId, neighbours: &[BranchId]) -> Result<Direction, TrackError> {
    let k = moves::corners(t, f)?;
    let mut right = false;
    let mut left = false;
    for (i, h) in k.halves().iter().enumerate() {
        if neighbours.contains(&h.branch) {
            if i % 2 == 0 {
                right = true;
            } else {
                left = true;
            }
        }
    }
    match (right, left) {
        (true, false) => Ok(Direction::Right),
        (false, true) => Ok(Direction::Left),
        _ => Err(TrackError::Precondition(format!("no split at {f} has winners {neighbours:?}"))),
    }
}

/// Outcome of a multi-split.
#[derive(Clone, Debug)]
pub struct MultiSplit {
    pub track: TrainTrack,
    pub records: Vec<SplitRecord>,
    /// Residual path labels after each level (open paths only).
    pub residuals: Vec<Vec<BranchId>>,
}

fn neighbours_in(labels: &[BranchId], i: usize, circle: bool) -> Vec<BranchId> {
    let n = labels.len();
    let mut v = Vec::new();
    if circle {
        if n > 1 {
            v.push(labels[(i + n - 1) % n]);
            v.push(labels[(i + 1) % n]);
        }
    } else {
        if i > 0 {
            v.push(labels[i - 1]);
        }
        if i + 1 < n {
            v.push(labels[i + 1]);
        }
    }
    v
}

/// One split at every label of the path, each at the first moment it is
/// large, with its path neighbours as winners.
fn single_pass(
    t: &TrainTrack,
    labels: &[BranchId],
    circle: bool,
    fallback: Option<&[BranchId]>,
    lone: Option<Direction>,
) -> Result<(TrainTrack, Vec<SplitRecord>), TrackError> {
    let mut cur = t.clone();
    let mut done = vec![false; labels.len()];
    let mut recs = Vec::new();
    while done.iter().any(|d| !d) {
        let next = (0..labels.len()).find(|&i| !done[i] && cur.classify_branch(labels[i]) == BranchKind::Large);
        let Some(i) = next else {
            return Err(TrackError::Invariant(format!("multi-split along {labels:?} stalls: no unsplit branch is large")));
        };
        let mut nb = neighbours_in(labels, i, circle);
        if nb.is_empty() {
            if let Some(orig) = fallback {
                let j = orig.iter().position(|&x| x == labels[i]).expect("residual inside the original path");
                nb = neighbours_in(orig, j, false);
            }
        }
        let dir = if nb.is_empty() {
            lone.ok_or_else(|| TrackError::Precondition("a single-branch path needs a direction".into()))?
        } else {
            winner_direction(&cur, labels[i], &nb)?
        };
        let r = SplitRecord::new(labels[i], dir);
        cur = moves::apply(&cur, r)?;
        recs.push(r);
        done[i] = true;
    }
    Ok((cur, recs))
}

/// Longest special contiguous sublist of `labels` in `t`.
fn longest_special(t: &TrainTrack, labels: &[BranchId]) -> Vec<BranchId> {
    let n = labels.len();
    for len in (1..=n).rev().filter(|l| l % 2 == 1) {
        for start in 0..=n - len {
            let sub = &labels[start..start + len];
            if let Some(d) = path_from_labels(t, sub, false) {
                if is_special_path(t, &d).is_some() {
                    return sub.to_vec();
                }
            }
        }
    }
    vec![]
}

/// The level-one multi-split along an open special path. `lone` is the
/// direction used when the path is a single branch.
pub fn rho_level_one(t: &TrainTrack, labels: &[BranchId], lone: Option<Direction>) -> Result<MultiSplit, TrackError> {
    let (track, records) = single_pass(t, labels, false, None, lone)?;
    let res = if labels.len() == 1 { vec![] } else { longest_special(&track, labels) };
    Ok(MultiSplit { track, records, residuals: vec![res] })
}

/// The full multi-split along an open special path: level-one multi-splits
/// on the successive residual paths until the residual is empty.
pub fn rho_multi_split(t: &TrainTrack, path: &SymmetricPath, lone: Option<Direction>) -> Result<MultiSplit, TrackError> {
    if path.circle {
        return Err(TrackError::Precondition("rho_multi_split needs an open path".into()));
    }
    if is_special_path(t, &path.darts).is_none() {
        return Err(TrackError::Precondition("path is not special".into()));
    }
    let orig = path.labels();
    let mut cur = t.clone();
    let mut labels = orig.clone();
    let mut records = Vec::new();
    let mut residuals = Vec::new();
    let mut first = true;
    while !labels.is_empty() {
        let lone_dir = if first { lone } else { None };
        let fb = if first { None } else { Some(orig.as_slice()) };
        let (next, recs) = single_pass(&cur, &labels, false, fb, lone_dir)?;
        let res = if labels.len() == 1 { vec![] } else { longest_special(&next, &labels) };
        if res.len() + 2 > labels.len() && !res.is_empty() {
            return Err(TrackError::Invariant("residual path did not shrink by two".into()));
        }
        cur = next;
        records.extend(recs);
        residuals.push(res.clone());
        labels = res;
        first = false;
    }
    Ok(MultiSplit { track: cur, records, residuals })
}

/// Result of iterating circle modifications until the track recurs.
#[derive(Clone, Debug)]
pub struct CircleTwist {
    pub track: TrainTrack,
    pub records: Vec<SplitRecord>,
    /// Number of modifications until the canonical form recurred.
    pub k: usize,
    /// Circle length after each modification.
    pub lengths: Vec<usize>,
}

/// One modification along a special circle: a split at every branch of
/// the circle with its circle neighbours as winners.
pub fn circle_modification(t: &TrainTrack, labels: &[BranchId]) -> Result<(TrainTrack, Vec<SplitRecord>), TrackError> {
    single_pass(t, labels, true, None, None)
}

/// Iterates circle modifications until the canonical form of `t` recurs.
pub fn circle_multi_split(t: &TrainTrack, circle: &SymmetricPath, max_iter: usize) -> Result<CircleTwist, TrackError> {
    if !circle.circle || is_special_circle(t, &circle.darts).is_none() {
        return Err(TrackError::Precondition("not a special circle".into()));
    }
    let labels = circle.labels();
    let start = canonical_label(t);
    let mut cur = t.clone();
    let mut records = Vec::new();
    let mut lengths = Vec::new();
    for k in 1..=max_iter {
        let (next, recs) = circle_modification(&cur, &labels)?;
        let d = path_from_labels(&next, &labels, true)
            .ok_or_else(|| TrackError::Invariant("circle image is not a trainpath".into()))?;
        if is_special_circle(&next, &d).is_none() {
            return Err(TrackError::Invariant("circle image is not special".into()));
        }
        lengths.push(d.len());
        cur = next;
        records.extend(recs);
        if canonical_label(&cur) == start {
            return Ok(CircleTwist { track: cur, records, k, lengths });
        }
    }
    Err(TrackError::Budget(format!("no recurrence within {max_iter} modifications")))
}

/// Whether a track reached by `prefix` from `t` is splittable to the end of
/// `residual`, and the remaining residual if so.
pub fn splittable_after(
    t: &TrainTrack,
    residual: &[SplitRecord],
    prefix: &[SplitRecord],
) -> Result<Option<Vec<SplitRecord>>, TrackError> {
    let mut cur = t.clone();
    let mut res = residual.to_vec();
    for r in prefix {
        if !cur.has_branch(r.slot) || cur.classify_branch(r.slot) != BranchKind::Large {
            return Ok(None);
        }
        if strips::front_loadable(&cur, &res, r.slot)? != Some(*r) {
            return Ok(None);
        }
        let j = res.iter().position(|x| x.slot == r.slot).expect("front-loadable record exists");
        res.remove(j);
        cur = moves::apply(&cur, *r)?;
    }
    Ok(Some(res))
}

/// A level-one configuration through a large branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelOne {
    Splittable {
        path: SymmetricPath,
        /// The full multi-split records (the Dehn twist for circles).
        records: Vec<SplitRecord>,
        /// Number of distinct maximal candidates found; 1 when unique.
        candidates: usize,
    },
    NonSplittable(BranchId),
}

impl LevelOne {
    pub fn branches(&self) -> BTreeSet<BranchId> {
        match self {
            LevelOne::Splittable { path, .. } => path.branch_set(),
            LevelOne::NonSplittable(e) => BTreeSet::from([*e]),
        }
    }
}

/// Candidate special paths and circles through `e`.
fn candidates_through(t: &TrainTrack, e: BranchId) -> Vec<SymmetricPath> {
    let mut out: Vec<SymmetricPath> = Vec::new();
    for p in find_symmetric_paths(t) {
        if p.circle {
            if p.labels().contains(&e) {
                out.push(p);
            }
            continue;
        }
        let l = p.labels();
        let Some(i) = l.iter().position(|&x| x == e) else { continue };
        for a in (0..=i).step_by(2) {
            for b in (i..l.len()).step_by(2) {
                let darts = p.darts[a..=b].to_vec();
                if let Some(turns) = is_special_path(t, &darts) {
                    let sp = SymmetricPath { darts, circle: false, turns };
                    if !out.iter().any(|q| q.key() == sp.key() && !q.circle) {
                        out.push(sp);
                    }
                }
            }
        }
    }
    out
}

/// The level-one configuration through `e` relative to the target given by
/// `residual` (a witness sequence from `t`).
pub fn level_one_config(t: &TrainTrack, residual: &[SplitRecord], e: BranchId) -> Result<LevelOne, TrackError> {
    if !t.has_branch(e) || t.classify_branch(e) != BranchKind::Large {
        return Err(TrackError::Precondition(format!("branch {e} is not large")));
    }
    let mut best: Vec<(SymmetricPath, Vec<SplitRecord>)> = Vec::new();
    for cand in candidates_through(t, e) {
        let ms = if cand.circle {
            circle_multi_split(t, &cand, 2 * cand.len() + 2).map(|c| c.records)
        } else if cand.len() == 1 {
            let mut ok = None;
            for d in [Direction::Right, Direction::Left] {
                let r = vec![SplitRecord::new(e, d)];
                if splittable_after(t, residual, &r)?.is_some() {
                    ok = Some(r);
                    break;
                }
            }
            match ok {
                Some(r) => Ok(r),
                None => continue,
            }
        } else {
            rho_level_one(t, &cand.labels(), None).map(|m| m.records)
        };
        let Ok(recs) = ms else { continue };
        if splittable_after(t, residual, &recs)?.is_none() {
            continue;
        }
        let better = best.first().map_or(true, |(b, _)| cand.len() > b.len());
        let tie = best.first().is_some_and(|(b, _)| cand.len() == b.len());
        if better {
            best = vec![(cand, recs)];
        } else if tie {
            best.push((cand, recs));
        }
    }
    if best.is_empty() {
        return Ok(LevelOne::NonSplittable(e));
    }
    let candidates = best.len();
    let (path, level_recs) = best.swap_remove(0);
    let records = if path.circle || path.len() == 1 {
        level_recs
    } else {
        let lone = None;
        rho_multi_split(t, &path, lone)?.records
    };
    Ok(LevelOne::Splittable { path, records, candidates })
}

/// All level-one configurations of `t`, one per distinct branch set.
pub fn level_one_partition(t: &TrainTrack, residual: &[SplitRecord]) -> Result<Vec<LevelOne>, TrackError> {
    let mut out: Vec<LevelOne> = Vec::new();
    for e in t.large_branches() {
        let c = level_one_config(t, residual, e)?;
        if !out.iter().any(|x| x.branches() == c.branches()) {
            out.push(c);
        }
    }
    Ok(out)
}

/// One move towards the target: at every splittable configuration, the
/// meet of its multi-split with the target. Returns the new track, the
/// records performed and the remaining residual.
pub fn sigma_move(
    t: &TrainTrack,
    residual: &[SplitRecord],
) -> Result<(TrainTrack, Vec<SplitRecord>, Vec<SplitRecord>), TrackError> {
    if residual.is_empty() {
        return Ok((t.clone(), vec![], vec![]));
    }
    let mut cur = t.clone();
    let mut res = residual.to_vec();
    let mut performed = Vec::new();
    for c in level_one_partition(t, residual)? {
        let LevelOne::Splittable { records, .. } = c else { continue };
        // Meet of the multi-split with the target, computed from `t`, then
        // replayed on top of earlier configurations.
        let (_, part) = strips::meet(t, &records, residual)?;
        let rest = splittable_after(&cur, &res, &part)?
            .ok_or_else(|| TrackError::Invariant("moves at disjoint configurations do not combine".into()))?;
        cur = strips::replay(&cur, &part)?;
        res = rest;
        performed.extend(part);
    }
    if performed.is_empty() {
        return Err(TrackError::Invariant("a move towards a distinct target made no progress".into()));
    }
    Ok((cur, performed, res))
}

/// The stations of the tight multi-sequence from `t` to the end of the
/// witness `records`, with the records of each move.
#[derive(Clone, Debug)]
pub struct TightMultiSequence {
    pub stations: Vec<TrainTrack>,
    pub moves: Vec<Vec<SplitRecord>>,
}

impl TightMultiSequence {
    /// Phi vector of every station relative to the start.
    pub fn phis(&self, dim: usize) -> Vec<Vec<i64>> {
        let mut acc = vec![0i64; dim];
        let mut out = vec![acc.clone()];
        for m in &self.moves {
            for r in m {
                acc[r.slot as usize] += 1;
            }
            out.push(acc.clone());
        }
        out
    }
}

pub fn tight_multi_sequence(t: &TrainTrack, records: &[SplitRecord]) -> Result<TightMultiSequence, TrackError> {
    let mut stations = vec![t.clone()];
    let mut moves_done = Vec::new();
    let mut cur = t.clone();
    let mut res = records.to_vec();
    let budget = records.len() + 1;
    while !res.is_empty() {
        if moves_done.len() >= budget {
            return Err(TrackError::Budget("tight multi-sequence exceeded its length bound".into()));
        }
        let (next, done, rest) = sigma_move(&cur, &res)?;
        cur = next;
        res = rest;
        stations.push(cur.clone());
        moves_done.push(done);
    }
    Ok(TightMultiSequence { stations, moves: moves_done })
}

/// Records leading from the vertex reached by `prefix` to the vertex
/// reached by `full`, both taken from the same base.
pub fn residual_between(
    base: &TrainTrack,
    full: &[SplitRecord],
    prefix: &[SplitRecord],
) -> Result<Vec<SplitRecord>, TrackError> {
    splittable_after(base, full, prefix)?
        .ok_or_else(|| TrackError::Precondition("prefix is not a predecessor of the sequence end".into()))
}

/// Combing line between two strip vertices, as a list of vertex ids: the
/// reversed tight multi-sequence from the meet to `x` followed by the one
/// from the meet to `y`.
pub fn combing_line(strip: &FlatStrip, x: usize, y: usize) -> Result<Vec<usize>, TrackError> {
    let m = strip.meet(x, y)?;
    let gx = station_ids(strip, m, x)?;
    let gy = station_ids(strip, m, y)?;
    let mut path: Vec<usize> = gx.into_iter().rev().collect();
    path.extend(gy.into_iter().skip(1));
    Ok(path)
}

/// Strip vertex ids of the stations of the tight multi-sequence between
/// two comparable strip vertices.
pub fn station_ids(strip: &FlatStrip, from: usize, to: usize) -> Result<Vec<usize>, TrackError> {
    let pf = strip.path_to(from);
    let pt = strip.path_to(to);
    let res = residual_between(&strip.base, &pt, &pf)?;
    let tm = tight_multi_sequence(&strip.vertices[from].track, &res)?;
    let base_phi = &strip.vertices[from].phi;
    tm.phis(strip.dim)
        .iter()
        .map(|d| {
            let phi: Vec<i64> = base_phi.iter().zip(d).map(|(a, b)| a + b).collect();
            strip.vertex_of(&phi).ok_or_else(|| TrackError::Invariant("station outside the strip".into()))
        })
        .collect()
}

/// Fellow-traveller constant of two curves given as vertex lists, with
/// graph distances from `dist[u][v]`. Returns `None` when both endpoint
/// distances vanish and the curves differ.
pub fn fellow_constant(c1: &[usize], c2: &[usize], dist: &dyn Fn(usize, usize) -> usize) -> Option<Q> {
    let (c1, c2) = if c1.len() <= c2.len() { (c1, c2) } else { (c2, c1) };
    let a1 = c1.len() - 1;
    let d0 = dist(c1[0], c2[0]);
    let d1 = dist(c1[a1], c2[c2.len() - 1]);
    let denom = d0 + d1;
    let mut worst = Q::zero();
    for (i, &u) in c1.iter().enumerate() {
        let d = dist(u, c2[i]);
        if d > 0 && denom == 0 {
            return None;
        }
        if denom > 0 {
            let r = Q::new((d as i64).into(), (denom as i64).into());
            if r > worst {
                worst = r;
            }
        }
    }
    for &v in &c2[a1..] {
        let d = dist(c1[a1], v);
        if d > 0 && d1 == 0 {
            return None;
        }
        if d1 > 0 {
            let r = Q::new((d as i64).into(), (d1 as i64).into());
            if r > worst {
                worst = r;
            }
        }
    }
    Some(worst)
}

/// Sign of a twist connector: positive when the twisting split is a right
/// split.
pub fn twist_sign(t: &TrainTrack, large: BranchId, small: BranchId) -> Result<i8, TrackError> {
    let circle = connector_circle(t, large, small)?;
    let d = winner_direction(t, large, &[small])?;
    debug_assert!(circle.circle);
    Ok(if d == Direction::Right { 1 } else { -1 })
}

/// The special circle formed by a twist connector.
pub fn connector_circle(t: &TrainTrack, large: BranchId, small: BranchId) -> Result<SymmetricPath, TrackError> {
    if t.classify_branch(large) != BranchKind::Large || t.classify_branch(small) != BranchKind::Small {
        return Err(TrackError::Precondition(format!("{large}/{small} is not a twist connector")));
    }
    let darts = path_from_labels(t, &[large, small], true)
        .ok_or_else(|| TrackError::Precondition(format!("{large}/{small} is not a twist connector")))?;
    let turns = is_special_circle(t, &darts)
        .ok_or_else(|| TrackError::Precondition(format!("{large}/{small} is not a special circle")))?;
    Ok(SymmetricPath { darts, circle: true, turns })
}

/// Crossing weight of a transverse measure at a connector: the weight of
/// the outside branch at either connector switch.
pub fn crossing_weight(t: &TrainTrack, mu: &[Q], large: BranchId, small: BranchId) -> Result<Q, TrackError> {
    let k = moves::corners(t, large)?;
    let outside = k.halves().iter().find(|h| h.branch != small).map(|h| h.branch);
    outside
        .map(|b| mu[b as usize].clone())
        .ok_or_else(|| TrackError::Precondition("connector has no outside branch".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_dist(a: usize, b: usize) -> usize {
        a.abs_diff(b)
    }

    #[test]
    fn identical_curves_travel_together() {
        let c = [0, 1, 2, 3];
        assert_eq!(fellow_constant(&c, &c, &line_dist), Some(Q::zero()));
    }

    #[test]
    fn curves_with_shared_ends_and_different_paths_are_unbounded() {
        assert_eq!(fellow_constant(&[0, 1, 2], &[0, 5, 2], &line_dist), None);
    }

    #[test]
    fn offset_curves_have_constant_one() {
        // Paired points are one apart against an endpoint sum of two; the
        // final points alone give the ratio 1/1.
        let c = fellow_constant(&[0, 1, 2], &[1, 2, 3], &line_dist).unwrap();
        assert_eq!(c, Q::from_integer(1.into()));
    }

    #[test]
    fn turns_flip() {
        for t in [Turn::Left, Turn::Right] {
            assert_ne!(t.flip(), t);
            assert_eq!(t.flip().flip(), t);
        }
    }
}
