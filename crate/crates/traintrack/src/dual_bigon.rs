//! The dual bigon track of a complete train track, the tangential measures
//! it inherits from a transverse measure, and the collapse of its bigons to
//! a complete train track carrying a guide.
//!
//! Dual arcs keep the label of the branch they cross. Inside each region a
//! side with `l` branches gets a fan point `p` where its dual arcs meet; if
//! `l >= 2` a connector runs from `p` to a second point `P`, otherwise
//! `P = p`. The points `P` of the sides of a trigon are joined pairwise by
//! three inner arcs bounding the central trigon; in a punctured monogon the
//! inner arc is a loop around the puncture.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::TrackError;
use crate::measures::{self, is_maximal};
use crate::moves;
use crate::rational::{q, Q};
use crate::track::{BranchId, BranchKind, Dart, HalfBranch, SwitchId, TrainTrack};

/// What a dual branch is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualKind {
    /// Crosses the source branch with the same label.
    Arc,
    /// Joins the fan point of a side to its second point.
    Connector,
    /// Joins two second points inside a region, or loops around a puncture.
    Inner,
}

/// One side of a complementary region of the source track.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideInfo {
    pub region: usize,
    pub index: usize,
    /// Source darts along the side, in boundary order.
    pub darts: Vec<Dart>,
    pub fan: SwitchId,
    pub point: SwitchId,
    pub connector: Option<BranchId>,
    /// Inner arcs towards the previous and next side (equal in a monogon).
    pub inner_prev: BranchId,
    pub inner_next: BranchId,
}

#[derive(Clone, Debug)]
pub struct DualityData {
    pub source: TrainTrack,
    pub dual: TrainTrack,
    /// Kind of every dual label, `None` for unused labels.
    pub kinds: Vec<Option<DualKind>>,
    pub sides: Vec<SideInfo>,
}

impl DualityData {
    /// Branches lying inside regions of the source track.
    pub fn interior_branches(&self) -> Vec<BranchId> {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, k)| matches!(k, Some(DualKind::Connector | DualKind::Inner)))
            .map(|(i, _)| i as BranchId)
            .collect()
    }
}

/// Region counts of a track: trigons, punctured monogons, bigons, other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Census {
    pub trigons: usize,
    pub monogons: usize,
    pub bigons: usize,
    pub other: usize,
}

pub fn census(t: &TrainTrack) -> Census {
    let mut c = Census { trigons: 0, monogons: 0, bigons: 0, other: 0 };
    for r in t.regions() {
        if r.is_trigon() {
            c.trigons += 1;
        } else if r.is_punctured_monogon() {
            c.monogons += 1;
        } else if r.is_bigon() {
            c.bigons += 1;
        } else {
            c.other += 1;
        }
    }
    c
}

fn half_of(d: Dart) -> HalfBranch {
    HalfBranch::new(d.branch, if d.forward { 0 } else { 1 })
}

/// Builds the dual bigon track.
pub fn dual_track(t: &TrainTrack) -> Result<DualityData, TrackError> {
    if !is_maximal(t) || !t.is_generic() {
        return Err(TrackError::Precondition("dual track needs a maximal generic track".into()));
    }
    let regions = t.regions();
    let cap = t.branch_capacity() as BranchId;
    let mut next_branch = cap;
    let mut next_switch: SwitchId = 0;
    let mut fresh_b = || {
        next_branch += 1;
        next_branch - 1
    };
    let mut kinds: Vec<Option<DualKind>> = (0..cap).map(|b| t.has_branch(b).then_some(DualKind::Arc)).collect();
    let mut sides: Vec<SideInfo> = Vec::new();
    for (ri, r) in regions.iter().enumerate() {
        if !(r.is_trigon() || r.is_punctured_monogon()) {
            return Err(TrackError::Precondition(format!("region {ri} is neither a trigon nor a punctured monogon")));
        }
        let rs = r.sides();
        let k = rs.len();
        let inner: Vec<BranchId> = (0..k).map(|_| fresh_b()).collect();
        let first = sides.len();
        for (i, darts) in rs.into_iter().enumerate() {
            let fan = next_switch;
            next_switch += 1;
            let (point, connector) = if darts.len() >= 2 {
                next_switch += 1;
                (fan + 1, Some(fresh_b()))
            } else {
                (fan, None)
            };
            // Inner arc `i` runs from side `i` to side `i + 1`.
            let inner_next = inner[i];
            let inner_prev = inner[(i + k - 1) % k];
            sides.push(SideInfo { region: ri, index: i, darts, fan, point, connector, inner_prev, inner_next });
        }
        for s in &sides[first..] {
            if let Some(c) = s.connector {
                grow(&mut kinds, c, DualKind::Connector);
            }
        }
        for &b in &inner {
            grow(&mut kinds, b, DualKind::Inner);
        }
    }
    let mut sw: Vec<(SwitchId, Vec<HalfBranch>, Vec<HalfBranch>)> = Vec::new();
    for s in &sides {
        // Facing the side, its last dart is leftmost.
        let fan_x: Vec<HalfBranch> = s.darts.iter().rev().map(|&d| half_of(d)).collect();
        // Facing into the region, the previous side is on the left.
        let point_y = if s.inner_prev == s.inner_next {
            vec![HalfBranch::new(s.inner_next, 0), HalfBranch::new(s.inner_next, 1)]
        } else {
            vec![HalfBranch::new(s.inner_prev, 1), HalfBranch::new(s.inner_next, 0)]
        };
        match s.connector {
            Some(c) => {
                sw.push((s.fan, fan_x, vec![HalfBranch::new(c, 0)]));
                sw.push((s.point, vec![HalfBranch::new(c, 1)], point_y));
            }
            None => sw.push((s.fan, fan_x, point_y)),
        }
    }
    let dual = TrainTrack::from_switches(sw, true)?;
    // Punctures sit inside the loops.
    let anchors: Vec<Dart> = dual.regions().iter().filter(|r| r.cusps() == 1).map(|r| r.darts[0]).collect();
    let dual = dual.with_punctures(&anchors)?;
    let src = census(t);
    let got = census(&dual);
    if got.trigons != src.trigons || got.monogons != src.monogons || got.other != 0 {
        return Err(TrackError::Invariant(format!("dual census {got:?} does not match source {src:?}")));
    }
    Ok(DualityData { source: t.clone(), dual, kinds, sides })
}

fn grow(kinds: &mut Vec<Option<DualKind>>, b: BranchId, k: DualKind) {
    if kinds.len() <= b as usize {
        kinds.resize(b as usize + 1, None);
    }
    kinds[b as usize] = Some(k);
}

fn check_guide(t: &TrainTrack, mu: &[Q]) -> Result<(), TrackError> {
    if !measures::is_transverse(t, mu) {
        return Err(TrackError::Measure("guide violates a switch condition".into()));
    }
    for b in t.branch_ids() {
        let w = &mu[b as usize];
        if !w.is_integer() || *w < q(4) {
            return Err(TrackError::Precondition(format!("guide weight {w} on branch {b} is not an integer of at least 4")));
        }
    }
    Ok(())
}

/// Dual arcs take the guide weight of the branch they cross; branches
/// inside regions get zero.
pub fn induced_tangential(d: &DualityData, mu: &[Q]) -> Result<Vec<Q>, TrackError> {
    check_guide(&d.source, mu)?;
    let mut nu = vec![Q::zero(); d.dual.branch_capacity()];
    for b in d.dual.branch_ids() {
        if d.kinds[b as usize] == Some(DualKind::Arc) {
            nu[b as usize] = mu[b as usize].clone();
        }
    }
    if !measures::is_tangential(&d.dual, &nu, false) {
        return Err(TrackError::Invariant("induced weights are not tangential".into()));
    }
    Ok(nu)
}

/// Result of pulling strands of the guide multicurve into the regions.
#[derive(Clone, Debug)]
pub struct SneakUp {
    pub mu_star: Vec<Q>,
    /// Strands pulled in, two per side with several branches and one per
    /// single-branch side.
    pub pulled: usize,
    pub induced_total: Q,
    pub total: Q,
    /// Exact total change predicted from the strand routes.
    pub predicted_change: Q,
}

/// Pulls strands into every region. Each side sends one strand through the
/// central region, crossing both inner arcs at its second point; a side with
/// several branches also sends one strand across its connector. A pulled
/// strand no longer crosses the dual arcs of its side.
pub fn sneak_up(d: &DualityData, mu: &[Q]) -> Result<SneakUp, TrackError> {
    let nu = induced_tangential(d, mu)?;
    let mut w = nu.clone();
    let mut pulled = 0usize;
    let mut change = Q::zero();
    for s in &d.sides {
        let l = s.darts.len() as i64;
        let strands = if s.connector.is_some() { 2 } else { 1 };
        pulled += strands;
        for dt in &s.darts {
            w[dt.branch as usize] -= q(strands as i64);
        }
        w[s.inner_prev as usize] += q(1);
        w[s.inner_next as usize] += q(1);
        change += q(2 - l);
        if let Some(c) = s.connector {
            w[c as usize] += q(1);
            change += q(1 - l);
        }
    }
    for b in d.dual.branch_ids() {
        if !w[b as usize].is_positive() {
            return Err(TrackError::Measure(format!(
                "dual arc {b} keeps no strand after pulling; guide weight {} is too small for its two sides",
                mu[b as usize]
            )));
        }
    }
    let sum = |v: &[Q]| d.dual.branch_ids().fold(Q::zero(), |a, b| a + &v[b as usize]);
    let induced_total = sum(&nu);
    let total = sum(&w);
    if !measures::is_tangential(&d.dual, &w, true) {
        return Err(TrackError::Invariant("pulled weights are not a strict tangential measure".into()));
    }
    Ok(SneakUp { mu_star: w, pulled, induced_total, total, predicted_change: change })
}

/// Side weights of every trigon and punctured monogon.
pub fn polygon_side_weights(t: &TrainTrack, w: &[Q]) -> Vec<Vec<Q>> {
    t.regions()
        .iter()
        .filter(|r| r.is_trigon() || r.is_punctured_monogon())
        .map(|r| r.sides().iter().map(|s| t.path_weight(s, w, Q::zero())).collect())
        .collect()
}

/// The state of the collapse: a bigon track with a strict tangential
/// measure and a positive transverse measure standing for the carried
/// lamination.
#[derive(Clone, Debug)]
pub struct Quadruple {
    pub eta: TrainTrack,
    pub guide: Vec<Q>,
    pub nu: Vec<Q>,
}

/// One audited step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLine {
    pub step: usize,
    pub action: String,
    pub bigons: usize,
    pub selfint: usize,
}

impl std::fmt::Display for TraceLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "step{} {} bigons={} selfint={}", self.step, self.action, self.bigons, self.selfint)
    }
}

#[derive(Clone, Debug)]
pub struct CollapseOutcome {
    pub track: TrainTrack,
    pub guide: Vec<Q>,
    pub nu: Vec<Q>,
    pub trace: Vec<TraceLine>,
    /// Bigon counts before and after every bigon collapse.
    pub collapse_events: Vec<(usize, usize)>,
    pub budget: usize,
}

/// Boundary of a bigon split at its cusps: `e` runs from the first cusp to
/// the second with the bigon on its left, `f` runs from the first cusp to
/// the second with the bigon on its right.
#[derive(Clone, Debug)]
struct BigonSides {
    e: Vec<Dart>,
    f: Vec<Dart>,
}

fn bigon_sides(walk: &[Dart], cusp_after: &[bool]) -> BigonSides {
    let n = walk.len();
    let cusps: Vec<usize> = (0..n).filter(|&i| cusp_after[i]).collect();
    let (ca, cb) = (cusps[0], cusps[1]);
    let e: Vec<Dart> = (1..=((cb + n - ca) % n)).map(|k| walk[(ca + k) % n]).collect();
    let mut f: Vec<Dart> = (1..=((ca + n - cb) % n)).map(|k| walk[(cb + k) % n].reversed()).collect();
    f.reverse();
    BigonSides { e, f }
}

/// Number of branches met twice by the boundary walk.
fn self_intersection(walk: &[Dart]) -> usize {
    let mut seen = BTreeSet::new();
    let mut twice = BTreeSet::new();
    for d in walk {
        if !seen.insert(d.branch) {
            twice.insert(d.branch);
        }
    }
    twice.len()
}

fn embedded(t: &TrainTrack, walk: &[Dart]) -> bool {
    let mut br = BTreeSet::new();
    let mut sw = BTreeSet::new();
    walk.iter().all(|d| br.insert(d.branch) && sw.insert(t.endpoint(d.head()).switch))
}

fn bigons(t: &TrainTrack) -> Vec<crate::track::Region> {
    t.regions().into_iter().filter(|r| r.is_bigon()).collect()
}

/// Moves the head of dart `d` to a new bivalent switch; the rest of the
/// branch gets a fresh label. Returns the dart continuing beyond the new
/// switch.
fn subdivide(t: &mut TrainTrack, d: Dart, nu: &mut Vec<Q>, guide: &mut Vec<Q>, at: &Q) -> Dart {
    let nb = t.fresh_branch();
    let z = t.fresh_switch();
    let h = d.head();
    let ep = t.endpoint(h);
    for x in t.switch_mut(ep.switch).sides[ep.side.index()].iter_mut() {
        if *x == h {
            *x = HalfBranch::new(nb, 1);
        }
    }
    let zs = t.switch_mut(z);
    zs.sides[0] = vec![h];
    zs.sides[1] = vec![HalfBranch::new(nb, 0)];
    t.resync_endpoints();
    let cap = t.branch_capacity();
    nu.resize(cap, Q::zero());
    guide.resize(cap, Q::zero());
    nu[nb as usize] = &nu[d.branch as usize] - at;
    nu[d.branch as usize] = at.clone();
    guide[nb as usize] = guide[d.branch as usize].clone();
    Dart::new(nb, true)
}

/// Identifies the two sides of a bigon by matching `nu` prefix sums,
/// starting from the first cusp.
///
/// When one side ends with the branch the other side starts with, that
/// branch joins the two cusps and the rest of the first side is a loop.
/// The zip then runs around the loop, as many times as the joining branch
/// is long, over the part already zipped, so the bigon closes up into a
/// single circle.
fn collapse_bigon(q0: &Quadruple, sides: &BigonSides) -> Result<Quadruple, TrackError> {
    let mut t = q0.eta.clone();
    let mut nu = q0.nu.clone();
    let mut guide = q0.guide.clone();
    let sets = t.punctured_region_dart_sets();
    let mut touched: Vec<BranchId> = Vec::new();
    let mut es: VecDeque<Dart> = sides.e.iter().copied().collect();
    let mut fs: VecDeque<Dart> = sides.f.iter().copied().collect();
    // Which side loops back, if any.
    let wrap_e = sides.e.len() > 1 && sides.e.last() == sides.f.first();
    let wrap_f = !wrap_e && sides.f.len() > 1 && sides.f.last() == sides.e.first();
    if wrap_e {
        es.pop_back();
    } else if wrap_f {
        fs.pop_back();
    }
    // Darts of the loop side as they stand after the current round.
    let mut done: Vec<Dart> = Vec::new();
    let mut refilled = false;
    loop {
        if wrap_e && es.is_empty() && !fs.is_empty() {
            es = done.drain(..).collect();
            refilled = true;
        }
        if wrap_f && fs.is_empty() && !es.is_empty() {
            fs = done.drain(..).collect();
            refilled = true;
        }
        let (Some(&e), Some(&f)) = (es.front(), fs.front()) else { break };
        es.pop_front();
        fs.pop_front();
        if !t.has_branch(e.branch) || !t.has_branch(f.branch) || e.branch == f.branch {
            return Err(TrackError::Invariant("bigon sides overlap in a way the zip cannot follow".into()));
        }
        touched.extend([e.branch, f.branch]);
        let (ne, nf) = (nu[e.branch as usize].clone(), nu[f.branch as usize].clone());
        if ne < nf {
            let rest = subdivide(&mut t, f, &mut nu, &mut guide, &ne);
            touched.push(rest.branch);
            fs.push_front(rest);
        } else if nf < ne {
            let rest = subdivide(&mut t, e, &mut nu, &mut guide, &nf);
            touched.push(rest.branch);
            es.push_front(rest);
        }
        merge_parallel(&mut t, e, f)?;
        guide[e.branch as usize] = &guide[e.branch as usize] + &guide[f.branch as usize];
        guide[f.branch as usize] = Q::zero();
        nu[f.branch as usize] = Q::zero();
        if wrap_e || wrap_f {
            // A merged pair survives under the `e` label, also on the loop
            // side when that is `f`.
            done.push(e);
        }
    }
    let leftover = if wrap_e { !fs.is_empty() } else if wrap_f { !es.is_empty() } else { !es.is_empty() || !fs.is_empty() };
    if leftover || ((wrap_e || wrap_f) && !refilled) {
        return Err(TrackError::Invariant("bigon sides have different weights".into()));
    }
    t.resync_endpoints();
    t.restore_punctures(&sets, &touched)?;
    let cap = t.branch_capacity();
    nu.truncate(cap);
    guide.truncate(cap);
    Ok(Quadruple { eta: t, guide, nu })
}

/// Merges two branches leaving a switch at adjacent slots and bounding a
/// bigon corner; `f` sits before `e`. Their far switches are identified.
fn merge_parallel(t: &mut TrainTrack, e: Dart, f: Dart) -> Result<(), TrackError> {
    let x = t.endpoint(e.tail());
    let xf = t.endpoint(f.tail());
    if x != xf {
        return Err(TrackError::Invariant("bigon corner branches leave different switches".into()));
    }
    let ye = t.endpoint(e.head());
    let yf = t.endpoint(f.head());
    let fh = f.head();
    let ft = f.tail();
    t.switch_mut(x.switch).sides[x.side.index()].retain(|&h| h != ft);
    if ye.switch == yf.switch {
        t.switch_mut(ye.switch).sides[ye.side.index()].retain(|&h| h != fh);
    } else {
        let se = t.switch(ye.switch).clone();
        let sf = t.switch(yf.switch).clone();
        let main_e = se.side(ye.side);
        let main_f = sf.side(yf.side);
        if main_e.last() != Some(&e.head()) || main_f.first() != Some(&fh) {
            return Err(TrackError::Invariant("bigon side is not smooth at an interior switch".into()));
        }
        let mut main: Vec<HalfBranch> = main_e.to_vec();
        main.extend_from_slice(&main_f[1..]);
        let mut other: Vec<HalfBranch> = sf.side(yf.side.other()).to_vec();
        other.extend_from_slice(se.side(ye.side.other()));
        let s = t.switch_mut(ye.switch);
        s.sides[ye.side.index()] = main;
        s.sides[ye.side.other().index()] = other;
        t.remove_switch(yf.switch);
    }
    t.branches[f.branch as usize] = None;
    t.resync_endpoints();
    Ok(())
}

/// Runs the collapse with a step budget. `p_factor` times the initial
/// branch count bounds the number of steps.
///
/// Cusp separation and isolated self-intersection points both sit at
/// switches of valence at least 4, and both are removed by combing. The
/// loop therefore combs the whole track back to generic before looking at
/// the next bigon; afterwards a non-embedded bigon boundary always runs
/// twice through some branch.
pub fn lambda_collapse(start: Quadruple, p_factor: usize) -> Result<CollapseOutcome, TrackError> {
    let budget = p_factor * start.eta.branch_count();
    let mut cur = start;
    let mut trace = Vec::new();
    let mut events = Vec::new();
    let mut step = 0usize;
    loop {
        if cur.eta.switch_ids().any(|s| cur.eta.switch(s).valence() >= 4) {
            step += 1;
            let (t, nu, g, steps) = moves::comb(&cur.eta, &cur.nu, Some(&cur.guide))?;
            cur = Quadruple { eta: t, nu, guide: g.expect("guide transported") };
            let bs = bigons(&cur.eta);
            let si = bs.iter().map(|r| self_intersection(&r.darts)).sum();
            trace.push(TraceLine { step, action: format!("comb:{steps}"), bigons: bs.len(), selfint: si });
        }
        let bs = bigons(&cur.eta);
        if bs.is_empty() {
            break;
        }
        step += 1;
        if step > budget {
            return Err(TrackError::Budget(format!("collapse exceeded {budget} steps")));
        }
        let before = bs.len();
        let pick = bs.iter().position(|r| embedded(&cur.eta, &r.darts));
        if let Some(i) = pick {
            let b = &bs[i];
            let sides = bigon_sides(&b.darts, &b.cusp_after);
            cur = smooth(collapse_bigon(&cur, &sides)?);
            let nb = bigons(&cur.eta);
            let after = nb.len();
            events.push((before, after));
            let si = nb.iter().map(|r| self_intersection(&r.darts)).sum();
            trace.push(TraceLine { step, action: "collapse".into(), bigons: after, selfint: si });
            if after >= before {
                return Err(TrackError::Invariant("bigon collapse did not reduce the bigon count".into()));
            }
            continue;
        }
        let b = &bs[0];
        let cusp_switches: Vec<SwitchId> = b
            .cusp_after
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(i, _)| cur.eta.endpoint(b.darts[i].head()).switch)
            .collect();
        let (next, action) = match resolve_self_intersection(&cur, &b.darts, &cusp_switches)? {
            Some(x) => x,
            None => {
                let sides = bigon_sides(&b.darts, &b.cusp_after);
                let wraps = repeated_branches(&b.darts).len() == 1
                    && (sides.e.last() == sides.f.first() || sides.f.last() == sides.e.first());
                if !wraps {
                    return Err(unresolved(&cur.eta, &b.darts));
                }
                let next = smooth(collapse_bigon(&cur, &sides)?);
                let after = bigons(&next.eta).len();
                events.push((before, after));
                if after >= before {
                    return Err(TrackError::Invariant("bigon collapse did not reduce the bigon count".into()));
                }
                (next, "collapse-circle".to_string())
            }
        };
        cur = next;
        let nb = bigons(&cur.eta);
        let si = nb.iter().map(|r| self_intersection(&r.darts)).sum();
        trace.push(TraceLine { step, action, bigons: nb.len(), selfint: si });
    }
    cur.eta.set_allows_bigons(false);
    step += 1;
    trace.push(TraceLine { step, action: "stop".into(), bigons: 0, selfint: 0 });
    Ok(CollapseOutcome { track: cur.eta, guide: cur.guide, nu: cur.nu, trace, collapse_events: events, budget })
}

/// Splits a large self-intersection branch away from the cusps or shifts a
/// mixed one. `None` when neither applies.
fn resolve_self_intersection(
    q0: &Quadruple,
    walk: &[Dart],
    cusps: &[SwitchId],
) -> Result<Option<(Quadruple, String)>, TrackError> {
    let t = &q0.eta;
    let twice = repeated_branches(walk);
    let away = |b: BranchId| {
        let br = t.branch(b);
        !cusps.contains(&br.ends[0].switch) && !cusps.contains(&br.ends[1].switch)
    };
    // The guide must decide the split direction; balanced branches are
    // passed over.
    let splittable = |b: &&BranchId| {
        t.classify_branch(**b) == BranchKind::Large
            && moves::mu_direction(t, &q0.guide, **b).is_ok_and(|d| d != moves::Direction::Collision)
    };
    let pick = twice.iter().filter(splittable).find(|&&b| away(b));
    // Large branches touching a cusp only come up when the boundary meets
    // itself along more than one branch; splitting them is the fallback.
    let pick = pick.or_else(|| if twice.len() > 1 { twice.iter().find(splittable) } else { None });
    if let Some(&e) = pick {
        let dir = moves::mu_direction(t, &q0.guide, e)?;
        let g = moves::transport_transverse(t, &q0.guide, moves::SplitRecord::new(e, dir))?;
        let (s, _) = moves::split(t, e, dir)?;
        let nu = split_tangential(t, &s, &q0.nu, e, dir)?;
        return Ok(Some((Quadruple { eta: s, guide: g, nu }, format!("split:{e}{}", dir.letter()))));
    }
    if let Some(&b) = twice.iter().find(|&&b| t.classify_branch(b) == BranchKind::Mixed) {
        let g = moves::transport_shift(t, &q0.guide, b)?;
        let (s, _) = moves::shift(t, b)?;
        let nu = shift_tangential(t, &s, &q0.nu, b)?;
        return Ok(Some((Quadruple { eta: s, guide: g, nu }, format!("shift:{b}"))));
    }
    if let Some(&e) = twice.iter().find(|&&b| t.classify_branch(b) == BranchKind::Large) {
        return Err(TrackError::Balanced(e));
    }
    Ok(None)
}

fn repeated_branches(walk: &[Dart]) -> Vec<BranchId> {
    let mut count = std::collections::BTreeMap::<BranchId, usize>::new();
    for d in walk {
        *count.entry(d.branch).or_default() += 1;
    }
    count.into_iter().filter(|&(_, c)| c >= 2).map(|(b, _)| b).collect()
}

fn unresolved(t: &TrainTrack, walk: &[Dart]) -> TrackError {
    let kinds: Vec<String> =
        repeated_branches(walk).iter().map(|&b| format!("{b}:{:?}", t.classify_branch(b))).collect();
    TrackError::Unsupported(format!(
        "bigon with self-intersection branches {kinds:?} needs a configuration this implementation does not resolve"
    ))
}

/// Tangential weights after a split. Lengths are kept along the two smooth
/// paths through the old large branch: the losing corners absorb its
/// weight and the diagonal keeps it, so every region beside a cusp at an
/// end of the branch gains the same amount on both cusp sides.
fn split_tangential(
    before: &TrainTrack,
    after: &TrainTrack,
    nu: &[Q],
    e: BranchId,
    dir: moves::Direction,
) -> Result<Vec<Q>, TrackError> {
    let k = moves::corners(before, e)?;
    let mut out = nu.to_vec();
    let losers = if dir == moves::Direction::Right { [k.b, k.d] } else { [k.a, k.c] };
    for h in losers {
        out[h.branch as usize] = &out[h.branch as usize] + &nu[e as usize];
    }
    checked_or_refit(after, out)
}

/// Tangential weights after a shift: the half-branch that slides onto the
/// small end of the shifted branch gains its weight, the one that slides
/// away loses it.
fn shift_tangential(before: &TrainTrack, after: &TrainTrack, nu: &[Q], b: BranchId) -> Result<Vec<Q>, TrackError> {
    let mut out = nu.to_vec();
    let moved: Vec<HalfBranch> = after
        .switch_ids()
        .flat_map(|s| after.switch(s).sides.iter().flatten().copied().collect::<Vec<_>>())
        .filter(|&h| h.branch != b && before.endpoint(h).switch != after.endpoint(h).switch)
        .collect();
    let small = if before.is_large_half(HalfBranch::new(b, 0)) { HalfBranch::new(b, 1) } else { HalfBranch::new(b, 0) };
    let v = before.endpoint(small).switch;
    for h in moved {
        let w = &nu[b as usize];
        out[h.branch as usize] = if after.endpoint(h).switch == v {
            &out[h.branch as usize] + w
        } else {
            &out[h.branch as usize] - w
        };
    }
    checked_or_refit(after, out)
}

/// Keeps `nu` when it is a strict positive tangential measure, otherwise
/// falls back to a fresh one from the linear program.
fn checked_or_refit(t: &TrainTrack, nu: Vec<Q>) -> Result<Vec<Q>, TrackError> {
    if measures::is_positive(t, &nu) && measures::is_tangential(t, &nu, true) {
        return Ok(nu);
    }
    measures::positive_tangential(t, true)
        .ok_or_else(|| TrackError::Measure("track admits no strict positive tangential measure".into()))
}

/// Smooths bivalent switches, adding tangential weights of merged branches.
fn smooth(q0: Quadruple) -> Quadruple {
    let (t, merged) = q0.eta.smooth_bivalent();
    let mut nu = q0.nu;
    let mut guide = q0.guide;
    for (gone, keep) in merged {
        nu[keep as usize] = &nu[keep as usize] + &nu[gone as usize];
        nu[gone as usize] = Q::zero();
        guide[gone as usize] = Q::zero();
    }
    Quadruple { eta: t, guide, nu }
}

/// Everything the pipeline produces from a source track and guide.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub duality: DualityData,
    pub sneak: SneakUp,
    pub outcome: CollapseOutcome,
    /// Number of lamination proxies drawn; more than one when a proxy left
    /// a split direction undecided.
    pub proxy_draws: u64,
}

/// Proxies tried before a balanced guide is reported as an error.
pub const PROXY_ATTEMPTS: u64 = 8;

/// A positive transverse measure on the dual track standing for the carried
/// lamination: a seeded random interior point of the recurrence cone.
pub fn lambda_proxy(d: &DualityData, seed: u64) -> Result<Vec<Q>, TrackError> {
    use rand::SeedableRng;
    use rand::Rng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // Wide random coefficients make equal corner weights, which would leave
    // a split direction undecided, unlikely.
    let mut acc = vec![Q::zero(); d.dual.branch_capacity()];
    for _ in 0..8 {
        let w = measures::random_positive_transverse(&d.dual, &mut rng, 1, 50)
            .ok_or_else(|| TrackError::Measure("dual track is not recurrent".into()))?;
        let c = q(rng.gen_range(1..=1_000_000));
        for b in d.dual.branch_ids() {
            acc[b as usize] += &c * &w[b as usize];
        }
    }
    Ok(acc)
}

pub fn run_pipeline(t: &TrainTrack, mu: &[Q], seed: u64, p_factor: usize) -> Result<Pipeline, TrackError> {
    let duality = dual_track(t)?;
    let sneak = sneak_up(&duality, mu)?;
    let mut draw = 0;
    loop {
        let guide = lambda_proxy(&duality, seed.wrapping_add(draw))?;
        draw += 1;
        let start = Quadruple { eta: duality.dual.clone(), guide, nu: sneak.mu_star.clone() };
        match lambda_collapse(start, p_factor) {
            Ok(outcome) => return Ok(Pipeline { duality, sneak, outcome, proxy_draws: draw }),
            Err(TrackError::Balanced(_)) if draw < PROXY_ATTEMPTS => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Checks the pipeline output: generic, maximal, transversely recurrent and
/// carrying the transported guide with positive weights.
pub fn output_ok(o: &CollapseOutcome) -> Result<(), TrackError> {
    let t = &o.track;
    if !t.is_generic() {
        return Err(TrackError::Invariant("output is not generic".into()));
    }
    if !is_maximal(t) {
        return Err(TrackError::Invariant("output is not maximal".into()));
    }
    if measures::positive_tangential(t, false).is_none() {
        return Err(TrackError::Invariant("output is not transversely recurrent".into()));
    }
    if !measures::is_transverse(t, &o.guide) || !measures::is_positive(t, &o.guide) {
        return Err(TrackError::Invariant("transported guide is not a positive transverse measure".into()));
    }
    Ok(())
}
