//! Elementary moves: split, collapse, shift, collision and combing, with
//! exact transport of weights.
//!
//! Corner convention at a large branch `e`. Let `s` be the switch holding
//! end 0 of `e` and `t` the switch holding end 1. The opposite side of `s`
//! lists `[b, a]` and the opposite side of `t` lists `[d, c]`. Drawing `e`
//! horizontally from `s` on the left to `t` on the right, `a` is the upper
//! left corner, `b` the lower left, `c` the lower right and `d` the upper
//! right. A right split keeps `a` and `c` as winners and produces the
//! diagonal from the upper left to the lower right, so under the switch
//! condition the diagonal weight is `mu(a) - mu(d) = mu(c) - mu(b)`. A left
//! split keeps `b` and `d`. Relabelling `e` end-to-end swaps `a <-> c` and
//! `b <-> d`, which leaves both rules unchanged.
//!
//! Every move keeps the labels of surviving branches, so the slot bijection
//! of a split is the identity and the diagonal inherits the label of `e`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::TrackError;
use crate::rational::{q, Q};
use crate::track::{BranchId, BranchKind, Dart, HalfBranch, Side, SwitchId, TrainTrack};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Right,
    Left,
    Collision,
}

impl Direction {
    pub fn letter(self) -> char {
        match self {
            Direction::Right => 'R',
            Direction::Left => 'L',
            Direction::Collision => 'X',
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
            Direction::Collision => Direction::Collision,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// A split (or collision) at a branch slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplitRecord {
    pub slot: BranchId,
    pub direction: Direction,
}

impl SplitRecord {
    pub fn new(slot: BranchId, direction: Direction) -> Self {
        SplitRecord { slot, direction }
    }
}

impl fmt::Display for SplitRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "split {} {}", self.slot, self.direction)
    }
}

/// Map from branch slots of a source track to slots of its image.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SlotBijection {
    pub map: BTreeMap<BranchId, BranchId>,
}

impl SlotBijection {
    pub fn identity(t: &TrainTrack) -> Self {
        SlotBijection { map: t.branch_ids().map(|b| (b, b)).collect() }
    }

    pub fn without(mut self, b: BranchId) -> Self {
        self.map.remove(&b);
        self
    }

    pub fn apply(&self, b: BranchId) -> Option<BranchId> {
        self.map.get(&b).copied()
    }

    pub fn compose(&self, next: &SlotBijection) -> SlotBijection {
        SlotBijection { map: self.map.iter().filter_map(|(&k, v)| next.apply(*v).map(|w| (k, w))).collect() }
    }
}

/// The four corner half-branches around a large branch together with its
/// endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Corners {
    pub e: BranchId,
    pub s: SwitchId,
    pub s_side: Side,
    pub t: SwitchId,
    pub t_side: Side,
    pub a: HalfBranch,
    pub b: HalfBranch,
    pub c: HalfBranch,
    pub d: HalfBranch,
}

impl Corners {
    /// Corner half-branches as `[a, b, c, d]`.
    pub fn halves(&self) -> [HalfBranch; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Locates the corners of a large branch whose endpoints are trivalent.
pub fn corners(t: &TrainTrack, e: BranchId) -> Result<Corners, TrackError> {
    if !t.has_branch(e) {
        return Err(TrackError::Precondition(format!("no branch {e}")));
    }
    if t.classify_branch(e) != BranchKind::Large {
        return Err(TrackError::Precondition(format!("branch {e} is not large")));
    }
    let e0 = t.endpoint(HalfBranch::new(e, 0));
    let e1 = t.endpoint(HalfBranch::new(e, 1));
    if e0.switch == e1.switch {
        return Err(TrackError::Precondition(format!("large branch {e} is a closed loop")));
    }
    let ys = t.switch(e0.switch).side(e0.side.other());
    let zs = t.switch(e1.switch).side(e1.side.other());
    if ys.len() != 2 || zs.len() != 2 {
        return Err(TrackError::Precondition(format!("large branch {e} has a non-trivalent endpoint")));
    }
    Ok(Corners {
        e,
        s: e0.switch,
        s_side: e0.side,
        t: e1.switch,
        t_side: e1.side,
        b: ys[0],
        a: ys[1],
        d: zs[0],
        c: zs[1],
    })
}

/// Splits `t` at the large branch `e`. The diagonal keeps the label `e`.
pub fn split(t: &TrainTrack, e: BranchId, dir: Direction) -> Result<(TrainTrack, SlotBijection), TrackError> {
    if dir == Direction::Collision {
        return Err(TrackError::Precondition("a split needs direction R or L".into()));
    }
    let k = corners(t, e)?;
    let sets = t.punctured_region_dart_sets();
    let mut out = t.clone();
    let e0 = HalfBranch::new(e, 0);
    let e1 = HalfBranch::new(e, 1);
    {
        let (y, yp, z, zp) = match dir {
            Direction::Right => (vec![k.d, e0], vec![k.a], vec![k.b, e1], vec![k.c]),
            _ => (vec![e0, k.c], vec![k.b], vec![e1, k.a], vec![k.d]),
        };
        let s = out.switch_mut(k.s);
        s.sides[k.s_side.index()] = y;
        s.sides[k.s_side.other().index()] = yp;
        let tt = out.switch_mut(k.t);
        tt.sides[k.t_side.index()] = z;
        tt.sides[k.t_side.other().index()] = zp;
    }
    out.resync_endpoints();
    out.restore_punctures(&sets, &[e])?;
    Ok((out, SlotBijection::identity(t)))
}

/// Collapses a small branch when it is the diagonal of a generic split.
/// Returns `None` for small branches that are not collapsible, in
/// particular when both neighbours lie on the same side of the branch.
pub fn collapse(t: &TrainTrack, f: BranchId) -> Result<Option<(TrainTrack, SlotBijection)>, TrackError> {
    if !t.has_branch(f) {
        return Err(TrackError::Precondition(format!("no branch {f}")));
    }
    if t.classify_branch(f) != BranchKind::Small {
        return Err(TrackError::Precondition(format!("branch {f} is not small")));
    }
    let f0 = HalfBranch::new(f, 0);
    let f1 = HalfBranch::new(f, 1);
    let u = t.slot(f0);
    let v = t.slot(f1);
    if u.switch == v.switch {
        return Ok(None);
    }
    let su = t.switch(u.switch);
    let sv = t.switch(v.switch);
    let (uy, uyp) = (su.side(u.side), su.side(u.side.other()));
    let (vz, vzp) = (sv.side(v.side), sv.side(v.side.other()));
    if uy.len() != 2 || vz.len() != 2 || uyp.len() != 1 || vzp.len() != 1 || u.pos != v.pos {
        return Ok(None);
    }
    let (a, b, c, d) = if u.pos == 1 {
        (uyp[0], vz[0], vzp[0], uy[0])
    } else {
        (vz[1], uyp[0], uy[1], vzp[0])
    };
    let sets = t.punctured_region_dart_sets();
    let mut out = t.clone();
    {
        let s = out.switch_mut(u.switch);
        s.sides[u.side.index()] = vec![f0];
        s.sides[u.side.other().index()] = vec![b, a];
        let tt = out.switch_mut(v.switch);
        tt.sides[v.side.index()] = vec![f1];
        tt.sides[v.side.other().index()] = vec![d, c];
    }
    out.resync_endpoints();
    out.restore_punctures(&sets, &[f])?;
    Ok(Some((out, SlotBijection::identity(t))))
}

/// Data describing a shift along a mixed branch.
struct ShiftShape {
    u: SwitchId,
    u_side: Side,
    v: SwitchId,
    v_side: Side,
    /// True when the neighbour `z` sits after the branch on its small side.
    z_after: bool,
}

fn shift_shape(t: &TrainTrack, b: BranchId) -> Result<ShiftShape, TrackError> {
    if !t.has_branch(b) {
        return Err(TrackError::Precondition(format!("no branch {b}")));
    }
    if t.classify_branch(b) != BranchKind::Mixed {
        return Err(TrackError::Precondition(format!("branch {b} is not mixed")));
    }
    let (large, small) = if t.is_large_half(HalfBranch::new(b, 0)) {
        (HalfBranch::new(b, 0), HalfBranch::new(b, 1))
    } else {
        (HalfBranch::new(b, 1), HalfBranch::new(b, 0))
    };
    let lu = t.slot(large);
    let sv = t.slot(small);
    if lu.switch == sv.switch {
        return Err(TrackError::Precondition(format!("mixed branch {b} is a loop")));
    }
    let uprime = t.switch(lu.switch).side(lu.side.other()).len();
    let vlen = t.switch(sv.switch).side(sv.side).len();
    if uprime < 2 || vlen != 2 {
        return Err(TrackError::Precondition(format!("mixed branch {b} is not in shift position")));
    }
    Ok(ShiftShape { u: lu.switch, u_side: lu.side, v: sv.switch, v_side: sv.side, z_after: sv.pos == 0 })
}

/// Shifts along a mixed branch: the neighbour sharing the small end slides
/// past the large end.
pub fn shift(t: &TrainTrack, b: BranchId) -> Result<(TrainTrack, SlotBijection), TrackError> {
    let sh = shift_shape(t, b)?;
    let sets = t.punctured_region_dart_sets();
    let mut out = t.clone();
    let up: Vec<HalfBranch> = t.switch(sh.u).side(sh.u_side.other()).to_vec();
    let vs: Vec<HalfBranch> = t.switch(sh.v).side(sh.v_side).to_vec();
    let k = up.len();
    let (new_up, new_v) = if sh.z_after {
        let (bs, z) = (vs[0], vs[1]);
        let mut nu: Vec<_> = up[1..].to_vec();
        nu.push(z);
        (nu, vec![up[0], bs])
    } else {
        let (z, bs) = (vs[0], vs[1]);
        let mut nu = vec![z];
        nu.extend_from_slice(&up[..k - 1]);
        (nu, vec![bs, up[k - 1]])
    };
    out.switch_mut(sh.u).sides[sh.u_side.other().index()] = new_up;
    out.switch_mut(sh.v).sides[sh.v_side.index()] = new_v;
    out.resync_endpoints();
    out.restore_punctures(&sets, &[b])?;
    Ok((out, SlotBijection::identity(t)))
}

/// Transverse weight transport along a shift.
pub fn transport_shift(t: &TrainTrack, mu: &[Q], b: BranchId) -> Result<Vec<Q>, TrackError> {
    let sh = shift_shape(t, b)?;
    let up = t.switch(sh.u).side(sh.u_side.other());
    let vs = t.switch(sh.v).side(sh.v_side);
    let w = |h: &HalfBranch| mu[h.branch as usize].clone();
    let nb = if sh.z_after {
        up[1..].iter().map(w).fold(w(&vs[1]), |a, x| a + x)
    } else {
        up[..up.len() - 1].iter().map(w).fold(w(&vs[0]), |a, x| a + x)
    };
    let mut out = mu.to_vec();
    out[b as usize] = nb;
    Ok(out)
}

/// Removes a branch. Switches keep their remaining half-branches, so a
/// trivalent switch adjacent to the branch becomes bivalent.
pub(crate) fn remove_branch(t: &TrainTrack, e: BranchId) -> Result<TrainTrack, TrackError> {
    let sets = t.punctured_region_dart_sets();
    let mut out = t.clone();
    for end in 0..2u8 {
        let h = HalfBranch::new(e, end);
        let ep = out.endpoint(h);
        out.switch_mut(ep.switch).sides[ep.side.index()].retain(|&x| x != h);
    }
    out.branches[e as usize] = None;
    out.resync_endpoints();
    out.marks.retain(|d| d.branch != e);
    // The two regions beside the branch merge; two punctures meeting in one
    // region is reported by the re-anchoring.
    out.restore_punctures(&sets, &[e])?;
    Ok(out)
}

/// Collision: a split followed by removal of the diagonal. Bivalent switches
/// are kept, so the branch count drops by exactly one.
pub fn collide(t: &TrainTrack, e: BranchId, dir: Direction) -> Result<(TrainTrack, SlotBijection), TrackError> {
    let d = if dir == Direction::Collision { Direction::Right } else { dir };
    let (s, bij) = split(t, e, d)?;
    let out = remove_branch(&s, e)?;
    Ok((out, bij.without(e)))
}

/// Applies a split record (splits for R/L, collision for X).
pub fn apply(t: &TrainTrack, rec: SplitRecord) -> Result<TrainTrack, TrackError> {
    match rec.direction {
        Direction::Collision => collide(t, rec.slot, Direction::Right).map(|x| x.0),
        d => split(t, rec.slot, d).map(|x| x.0),
    }
}

/// Split direction dictated by a transverse measure.
pub fn mu_direction(t: &TrainTrack, mu: &[Q], e: BranchId) -> Result<Direction, TrackError> {
    let k = corners(t, e)?;
    if !mu[e as usize].is_positive() {
        return Err(TrackError::Measure(format!("branch {e} has zero weight")));
    }
    let ma = &mu[k.a.branch as usize];
    let md = &mu[k.d.branch as usize];
    Ok(match ma.cmp(md) {
        std::cmp::Ordering::Greater => Direction::Right,
        std::cmp::Ordering::Less => Direction::Left,
        std::cmp::Ordering::Equal => Direction::Collision,
    })
}

/// Transports a transverse measure through a split record. The winners and
/// the other corners keep their weights; the diagonal receives
/// `|mu(a) - mu(d)|`, and zero (removal) for a collision.
pub fn transport_transverse(t: &TrainTrack, mu: &[Q], rec: SplitRecord) -> Result<Vec<Q>, TrackError> {
    let k = corners(t, rec.slot)?;
    let ma = mu[k.a.branch as usize].clone();
    let md = mu[k.d.branch as usize].clone();
    let mut out = mu.to_vec();
    match rec.direction {
        Direction::Right => {
            if ma < md {
                return Err(TrackError::Measure(format!("right split needs mu(a) >= mu(d), got {ma} < {md}")));
            }
            out[rec.slot as usize] = ma - md;
        }
        Direction::Left => {
            if md < ma {
                return Err(TrackError::Measure(format!("left split needs mu(d) >= mu(a), got {md} < {ma}")));
            }
            out[rec.slot as usize] = md - ma;
        }
        Direction::Collision => {
            if ma != md {
                return Err(TrackError::Measure(format!("collision needs mu(a) = mu(d), got {ma} != {md}")));
            }
            out[rec.slot as usize] = Q::zero();
        }
    }
    Ok(out)
}

/// Switch-condition residuals of a weight vector, one per switch.
pub fn switch_residuals(t: &TrainTrack, mu: &[Q]) -> Vec<Q> {
    t.switch_ids()
        .map(|s| {
            let sw = t.switch(s);
            let sa: Q = sw.sides[0].iter().map(|h| mu[h.branch as usize].clone()).sum();
            let sb: Q = sw.sides[1].iter().map(|h| mu[h.branch as usize].clone()).sum();
            sa - sb
        })
        .collect()
}

/// Outcome of one combing step.
#[derive(Clone, Debug)]
pub struct CombStep {
    pub track: TrainTrack,
    pub nu: Vec<Q>,
    /// Transverse weights transported alongside, if supplied.
    pub mu: Option<Vec<Q>>,
    pub q: Q,
    pub new_branch: BranchId,
    pub new_switch: SwitchId,
}

/// Weight affine in a parameter: `alpha + beta * q`.
#[derive(Clone, Debug)]
pub(crate) struct Affine {
    pub(crate) alpha: Q,
    pub(crate) beta: Q,
}

impl Affine {
    pub(crate) fn add(&self, o: &Affine) -> Affine {
        Affine { alpha: &self.alpha + &o.alpha, beta: &self.beta + &o.beta }
    }
}

/// Open interval `(lo, hi)` of admissible parameters, `hi = None` for
/// unbounded.
pub(crate) struct Interval {
    pub(crate) lo: Q,
    pub(crate) hi: Option<Q>,
}

impl Interval {
    /// Intersects with `{ q : alpha + beta q > 0 }`.
    pub(crate) fn positive(&mut self, f: &Affine) -> bool {
        if f.beta.is_zero() {
            return f.alpha.is_positive();
        }
        let root = -&f.alpha / &f.beta;
        if f.beta.is_positive() {
            if root > self.lo {
                self.lo = root;
            }
        } else {
            self.hi = Some(match self.hi.take() {
                Some(h) if h < root => h,
                _ => root,
            });
        }
        true
    }
}

/// One combing step at a switch of valence at least 4. Moves the outermost
/// half-branch of the larger side into the interior of its neighbour and
/// assigns weights with the slack parameter at the midpoint of the
/// admissible interval. `mu`, when given, is transported as a transverse
/// measure.
pub fn comb_step(t: &TrainTrack, s: SwitchId, nu: &[Q], mu: Option<&[Q]>) -> Result<CombStep, TrackError> {
    let sw = t.switch(s);
    if sw.valence() < 4 {
        return Err(TrackError::Precondition(format!("switch {s} has valence {}", sw.valence())));
    }
    let out_side = if sw.sides[1].len() > sw.sides[0].len() { Side::B } else { Side::A };
    let ys = sw.side(out_side).to_vec();
    let hm = ys[0];
    let hm1 = ys[1];
    // The parameter `q` must stay below every outgoing weight.
    let mut iv = Interval { lo: Q::zero(), hi: None };
    for h in &ys {
        let w = nu[h.branch as usize].clone();
        iv.positive(&Affine { alpha: w, beta: q(-1) });
    }
    let sets = t.punctured_region_dart_sets();
    let mut out = t.clone();
    let c1 = out.fresh_branch();
    let n = out.fresh_switch();
    {
        let mut new_y = vec![HalfBranch::new(c1, 0)];
        new_y.extend_from_slice(&ys[2..]);
        out.switch_mut(s).sides[out_side.index()] = new_y;
        let ns = out.switch_mut(n);
        ns.sides[0] = vec![HalfBranch::new(c1, 1)];
        ns.sides[1] = vec![hm, hm1];
    }
    out.resync_endpoints();
    out.restore_punctures(&sets, &[])?;
    // Affine weights on the new track.
    let cap = out.branch_capacity();
    let mut aff: Vec<Affine> = (0..cap)
        .map(|i| Affine { alpha: nu.get(i).cloned().unwrap_or_else(Q::zero), beta: Q::zero() })
        .collect();
    aff[c1 as usize] = Affine { alpha: Q::zero(), beta: q(1) };
    aff[hm.branch as usize].beta -= q(1);
    aff[hm1.branch as usize].beta -= q(1);
    for b in out.branch_ids() {
        if !iv.positive(&aff[b as usize]) {
            return Err(TrackError::Measure(format!("comb at switch {s}: branch {b} cannot stay positive")));
        }
    }
    let side_w = |path: &[Dart]| -> Affine {
        path.iter().fold(Affine { alpha: Q::zero(), beta: Q::zero() }, |acc, d| acc.add(&aff[d.branch as usize]))
    };
    for r in out.regions() {
        let sides: Vec<Affine> = r.sides().iter().map(|p| side_w(p)).collect();
        if r.is_bigon() && sides.len() == 2 {
            if sides[0].alpha != sides[1].alpha || sides[0].beta != sides[1].beta {
                return Err(TrackError::Measure(format!("comb at switch {s}: bigon sides become unequal")));
            }
        } else if !r.punctured && r.cusps() >= 3 {
            let total = sides.iter().fold(Affine { alpha: Q::zero(), beta: Q::zero() }, |a, x| a.add(x));
            for si in &sides {
                // strict: total - 2 * side > 0
                let f = Affine { alpha: &total.alpha - q(2) * &si.alpha, beta: &total.beta - q(2) * &si.beta };
                if !iv.positive(&f) {
                    return Err(TrackError::Measure(format!("comb at switch {s}: strict polygon inequality fails")));
                }
            }
        }
    }
    let hi = iv.hi.clone().ok_or_else(|| TrackError::Invariant("comb interval unbounded".into()))?;
    if hi <= iv.lo {
        return Err(TrackError::Measure(format!("comb at switch {s}: no admissible slack parameter")));
    }
    let qv = (&iv.lo + &hi) / q(2);
    let mut nu2 = vec![Q::zero(); cap];
    for b in out.branch_ids() {
        let a = &aff[b as usize];
        nu2[b as usize] = &a.alpha + &a.beta * &qv;
    }
    let mu2 = mu.map(|m| {
        let mut v: Vec<Q> = (0..cap).map(|i| m.get(i).cloned().unwrap_or_else(Q::zero)).collect();
        v[c1 as usize] = &m[hm.branch as usize] + &m[hm1.branch as usize];
        if hm.branch == hm1.branch {
            v[c1 as usize] = m[hm.branch as usize].clone() * q(2);
        }
        v
    });
    Ok(CombStep { track: out, nu: nu2, mu: mu2, q: qv, new_branch: c1, new_switch: n })
}

/// Combs every switch of valence at least 4, lowest label first, until the
/// track is generic. Returns the final track, weights and the number of steps.
pub fn comb(t: &TrainTrack, nu: &[Q], mu: Option<&[Q]>) -> Result<(TrainTrack, Vec<Q>, Option<Vec<Q>>, usize), TrackError> {
    let mut cur = t.clone();
    let mut nu = nu.to_vec();
    let mut mu = mu.map(|m| m.to_vec());
    let mut steps = 0;
    loop {
        let next = cur.switch_ids().find(|&s| cur.switch(s).valence() >= 4);
        let Some(s) = next else { break };
        let st = comb_step(&cur, s, &nu, mu.as_deref())?;
        cur = st.track;
        nu = st.nu;
        mu = st.mu;
        steps += 1;
    }
    Ok((cur, nu, mu, steps))
}

/// Combs one switch until it is trivalent.
pub fn comb_switch(
    t: &TrainTrack,
    s: SwitchId,
    nu: &[Q],
    mu: Option<&[Q]>,
) -> Result<(TrainTrack, Vec<Q>, Option<Vec<Q>>, usize), TrackError> {
    let mut cur = t.clone();
    let mut nu = nu.to_vec();
    let mut mu = mu.map(|m| m.to_vec());
    let mut steps = 0;
    while cur.switch(s).valence() >= 4 {
        let st = comb_step(&cur, s, &nu, mu.as_deref())?;
        cur = st.track;
        nu = st.nu;
        mu = st.mu;
        steps += 1;
    }
    Ok((cur, nu, mu, steps))
}

/// Absolute value helper for callers comparing weights.
pub fn abs_diff(x: &Q, y: &Q) -> Q {
    (x - y).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn interval_tracks_both_bounds() {
        let mut iv = Interval { lo: q(0), hi: None };
        // 3 - 2q > 0 caps the interval at 3/2.
        assert!(iv.positive(&Affine { alpha: q(3), beta: q(-2) }));
        assert_eq!(iv.hi, Some(qf(3, 2)));
        // -1 + 4q > 0 raises the floor to 1/4.
        assert!(iv.positive(&Affine { alpha: q(-1), beta: q(4) }));
        assert_eq!(iv.lo, qf(1, 4));
        // A looser cap leaves the interval alone.
        assert!(iv.positive(&Affine { alpha: q(5), beta: q(-1) }));
        assert_eq!(iv.hi, Some(qf(3, 2)));
        assert!(!iv.positive(&Affine { alpha: q(0), beta: q(0) }));
        assert!(iv.positive(&Affine { alpha: q(1), beta: q(0) }));
    }

    #[test]
    fn affine_sums_componentwise() {
        let s = Affine { alpha: q(1), beta: q(2) }.add(&Affine { alpha: q(3), beta: q(-5) });
        assert_eq!((s.alpha, s.beta), (q(4), q(-3)));
    }

    #[test]
    fn direction_letters() {
        assert_eq!(Direction::Right.opposite(), Direction::Left);
        assert_eq!(Direction::Right.letter(), 'R');
        assert_eq!(Direction::Left.letter(), 'L');
        assert_eq!(abs_diff(&q(2), &q(7)), q(5));
    }
}
