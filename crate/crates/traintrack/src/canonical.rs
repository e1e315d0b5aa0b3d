//! Canonical forms of tracks up to orientation-preserving ribbon isomorphism.
//!
//! For every starting half-branch a breadth-first traversal relabels
//! switches and branches in discovery order; the lexicographically smallest
//! resulting code wins. Swapping the two side names of a switch and
//! reversing a branch's end numbering do not change the ribbon structure, and
//! the traversal is insensitive to both.

use std::collections::VecDeque;
use std::fmt;

use crate::io;
use crate::track::{Dart, HalfBranch, SwitchId, TrainTrack};

/// A canonical serialization: equal iff the tracks are isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(pub String);

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

struct Labeling {
    code: Vec<u32>,
    switch_order: Vec<SwitchId>,
    /// Switch id -> (new label, which old side becomes new side A).
    sw_new: Vec<Option<(u32, usize)>>,
    /// Branch id -> (new label, old end that becomes new end 0).
    br_new: Vec<Option<(u32, u8)>>,
}

fn traverse(t: &TrainTrack, start: HalfBranch) -> Labeling {
    let mut sw_new: Vec<Option<(u32, usize)>> = vec![None; t.switch_capacity()];
    let mut br_new: Vec<Option<(u32, u8)>> = vec![None; t.branch_capacity()];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let ep = t.endpoint(start);
    sw_new[ep.switch as usize] = Some((0, ep.side.index()));
    order.push(ep.switch);
    queue.push_back(ep.switch);
    let mut next_sw = 1u32;
    let mut next_br = 0u32;
    let mut code = Vec::new();
    while let Some(u) = queue.pop_front() {
        let (_, first) = sw_new[u as usize].expect("queued switches are labeled");
        let sw = t.switch(u);
        let sides = [&sw.sides[first], &sw.sides[1 - first]];
        code.push(sides[0].len() as u32);
        code.push(sides[1].len() as u32);
        for side in sides {
            for &h in side.iter() {
                if br_new[h.branch as usize].is_none() {
                    br_new[h.branch as usize] = Some((next_br, h.end));
                    next_br += 1;
                    let far = t.endpoint(h.opposite());
                    if sw_new[far.switch as usize].is_none() {
                        sw_new[far.switch as usize] = Some((next_sw, far.side.index()));
                        next_sw += 1;
                        order.push(far.switch);
                        queue.push_back(far.switch);
                    }
                }
                let (bl, e0) = br_new[h.branch as usize].expect("just labeled");
                code.push(bl);
                code.push(u32::from(h.end != e0));
            }
        }
    }
    Labeling { code, switch_order: order, sw_new, br_new }
}

fn map_dart(l: &Labeling, d: Dart, br_base: u32) -> Dart {
    let (nb, e0) = l.br_new[d.branch as usize].expect("dart in component");
    // A dart is forward when it leaves from end 0; the new end 0 is old end e0.
    let tail_old = d.tail().end;
    Dart::new(nb + br_base, tail_old == e0)
}

/// Computes the canonically relabeled track.
pub fn canonical_track(t: &TrainTrack) -> TrainTrack {
    let comps = t.components();
    let regions = t.regions();
    let mut best_per_comp: Vec<(Vec<u32>, Labeling)> = Vec::new();
    for comp in &comps {
        let mut best: Option<Labeling> = None;
        for &s in comp {
            let sw = t.switch(s);
            for side in &sw.sides {
                // Only the side matters for the traversal, so one start per side.
                if let Some(&h) = side.first() {
                    let mut l = traverse(t, h);
                    append_decorations(t, &regions, &mut l);
                    if best.as_ref().map_or(true, |b| l.code < b.code) {
                        best = Some(l);
                    }
                }
            }
        }
        let b = best.expect("components are nonempty");
        best_per_comp.push((b.code.clone(), b));
    }
    best_per_comp.sort_by(|a, b| a.0.cmp(&b.0));
    let mut switches = Vec::new();
    let mut punct = Vec::new();
    let mut marks = Vec::new();
    let (mut sw_base, mut br_base) = (0u32, 0u32);
    for (_, l) in &best_per_comp {
        for &s in &l.switch_order {
            let (ns, first) = l.sw_new[s as usize].expect("labeled");
            let sw = t.switch(s);
            let conv = |v: &Vec<HalfBranch>| -> Vec<HalfBranch> {
                v.iter()
                    .map(|h| {
                        let (nb, e0) = l.br_new[h.branch as usize].expect("labeled");
                        HalfBranch::new(nb + br_base, u8::from(h.end != e0))
                    })
                    .collect()
            };
            switches.push((ns + sw_base, conv(&sw.sides[first]), conv(&sw.sides[1 - first])));
        }
        for r in regions.iter().filter(|r| r.punctured) {
            if l.br_new[r.darts[0].branch as usize].is_some() {
                punct.push(r.darts.iter().map(|&d| map_dart(l, d, br_base)).min().expect("nonempty region"));
            }
        }
        for &m in t.marks() {
            if l.br_new[m.branch as usize].is_some() {
                marks.push(map_dart(l, m, br_base));
            }
        }
        sw_base += l.switch_order.len() as u32;
        br_base += l.br_new.iter().filter(|x| x.is_some()).count() as u32;
    }
    TrainTrack::from_switches(switches, t.allows_bigons())
        .expect("canonical relabeling is a bijection")
        .with_punctures(&punct)
        .expect("relabeling keeps punctures distinct")
        .with_marks(&marks)
}

fn append_decorations(t: &TrainTrack, regions: &[crate::track::Region], l: &mut Labeling) {
    let mut p: Vec<u32> = regions
        .iter()
        .filter(|r| r.punctured && l.br_new[r.darts[0].branch as usize].is_some())
        .map(|r| r.darts.iter().map(|&d| map_dart(l, d, 0).index() as u32).min().expect("nonempty"))
        .collect();
    p.sort();
    let mut m: Vec<u32> = t
        .marks()
        .iter()
        .filter(|d| l.br_new[d.branch as usize].is_some())
        .map(|&d| map_dart(l, d, 0).index() as u32)
        .collect();
    m.sort();
    l.code.push(u32::MAX);
    l.code.extend(p);
    l.code.push(u32::MAX);
    l.code.extend(m);
}

/// Canonical form of a track: the serialization of its canonical relabeling.
pub fn canonical_label(t: &TrainTrack) -> CanonicalForm {
    CanonicalForm(io::write_track(&canonical_track(t)))
}

/// True iff the two tracks are isomorphic as decorated ribbon structures.
pub fn isomorphic(a: &TrainTrack, b: &TrainTrack) -> bool {
    a.branch_count() == b.branch_count() && a.switch_count() == b.switch_count() && canonical_label(a) == canonical_label(b)
}

/// Every orientation-preserving ribbon isomorphism from a connected track
/// `a` onto `b`, as maps from branch labels of `a` to `(label of b,
/// reversed)` where `reversed` tells whether end numbering flips.
pub fn isomorphisms(a: &TrainTrack, b: &TrainTrack) -> Vec<std::collections::BTreeMap<u32, (u32, bool)>> {
    let mut out = Vec::new();
    if a.branch_count() != b.branch_count() || a.switch_count() != b.switch_count() || a.components().len() != 1 {
        return out;
    }
    let Some(sa) = a.switch_ids().next() else { return out };
    let ha = a.switch(sa).sides[0][0];
    let ra = a.regions();
    let rb = b.regions();
    let mut la = traverse(a, ha);
    append_decorations(a, &ra, &mut la);
    for s in b.switch_ids() {
        for side in &b.switch(s).sides {
            let Some(&hb) = side.first() else { continue };
            let mut lb = traverse(b, hb);
            append_decorations(b, &rb, &mut lb);
            if lb.code != la.code {
                continue;
            }
            let mut inv = vec![None; b.branch_capacity()];
            for (i, x) in lb.br_new.iter().enumerate() {
                if let Some((n, e0)) = x {
                    inv[*n as usize] = Some((i as u32, *e0));
                }
            }
            let mut map = std::collections::BTreeMap::new();
            for (i, x) in la.br_new.iter().enumerate() {
                if let Some((n, e0a)) = x {
                    let (j, e0b) = inv[*n as usize].expect("codes agree");
                    map.insert(i as u32, (j, *e0a != e0b));
                }
            }
            if !out.contains(&map) {
                out.push(map);
            }
        }
    }
    out
}
