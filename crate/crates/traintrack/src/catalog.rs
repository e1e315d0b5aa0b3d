//! Seed tracks: random search for maximal generic birecurrent tracks with
//! planted twist connectors, and helpers to locate the frozen catalog.
//!
//! A twist connector occupies two switches `s`, `t`. Its large branch runs
//! from `s` to `t` and its small branch closes the loop; each of the two
//! switches keeps one free slot for an outside branch. The remaining
//! switches are trivalent with one sole slot. Free slots are matched at
//! random and the result is kept when the traced regions are exactly the
//! trigons and punctured monogons of a maximal track on the requested
//! surface and both recurrence problems are feasible.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::measures::{completeness_surrogate, integral_at_least, positive_transverse};
use crate::rational::Q;
use crate::track::{BranchId, HalfBranch, Surface, SwitchId, TrainTrack};

/// Search parameters.
#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub surface: Surface,
    /// Number of planted twist connectors.
    pub connectors: usize,
    /// When set, sole slots outside the connectors never pair with each
    /// other, so the only large branches are the connectors' large branches.
    pub connectors_only_large: bool,
}

/// A found seed track with the labels of its planted connectors.
#[derive(Clone, Debug)]
pub struct Seed {
    pub track: TrainTrack,
    /// `(large, small)` branch labels per connector.
    pub connectors: Vec<(BranchId, BranchId)>,
}

#[derive(Clone, Copy)]
struct FreeSlot {
    switch: SwitchId,
    side: usize,
    pos: usize,
    sole: bool,
}

/// One random attempt. Returns a track only if its region census matches a
/// maximal track on the surface; recurrence is not checked here.
pub fn random_candidate<R: Rng>(spec: &SearchSpec, rng: &mut R) -> Option<Seed> {
    let v = spec.surface.maximal_switch_count() as usize;
    let e = spec.surface.maximal_branch_count() as usize;
    let k = spec.connectors;
    if 2 * k > v {
        return None;
    }
    // Side lists with placeholders, filled as branches are assigned.
    let mut sides: Vec<[Vec<Option<HalfBranch>>; 2]> = Vec::with_capacity(v);
    let mut free: Vec<FreeSlot> = Vec::new();
    let mut next_branch: BranchId = 0;
    let mut connectors = Vec::new();
    for i in 0..k {
        let s = (2 * i) as SwitchId;
        let t = s + 1;
        let large = next_branch;
        let small = next_branch + 1;
        next_branch += 2;
        // Mirror images of the connector put the small branch at corners
        // {a, c} or {b, d}.
        let mirror = rng.gen_bool(0.5);
        let (sp, op) = if mirror { (0, 1) } else { (1, 0) };
        let mut s_other = vec![None, None];
        s_other[sp] = Some(HalfBranch::new(small, 1));
        let mut t_other = vec![None, None];
        t_other[sp] = Some(HalfBranch::new(small, 0));
        sides.push([vec![Some(HalfBranch::new(large, 0))], s_other]);
        sides.push([vec![Some(HalfBranch::new(large, 1))], t_other]);
        free.push(FreeSlot { switch: s, side: 1, pos: op, sole: false });
        free.push(FreeSlot { switch: t, side: 1, pos: op, sole: false });
        connectors.push((large, small));
    }
    for s in 2 * k..v {
        sides.push([vec![None], vec![None, None]]);
        let sid = s as SwitchId;
        free.push(FreeSlot { switch: sid, side: 0, pos: 0, sole: true });
        free.push(FreeSlot { switch: sid, side: 1, pos: 0, sole: false });
        free.push(FreeSlot { switch: sid, side: 1, pos: 1, sole: false });
    }
    free.shuffle(rng);
    let mut pairs: Vec<(FreeSlot, FreeSlot)> = Vec::new();
    if spec.connectors_only_large {
        let (sole, mut rest): (Vec<FreeSlot>, Vec<FreeSlot>) = free.into_iter().partition(|f| f.sole);
        if rest.len() < sole.len() {
            return None;
        }
        for s in sole {
            let o = rest.pop()?;
            pairs.push((s, o));
        }
        while rest.len() >= 2 {
            let a = rest.pop()?;
            let b = rest.pop()?;
            pairs.push((a, b));
        }
    } else {
        while free.len() >= 2 {
            let a = free.pop()?;
            let b = free.pop()?;
            pairs.push((a, b));
        }
    }
    for (a, b) in pairs {
        let id = next_branch;
        next_branch += 1;
        sides[a.switch as usize][a.side][a.pos] = Some(HalfBranch::new(id, 0));
        sides[b.switch as usize][b.side][b.pos] = Some(HalfBranch::new(id, 1));
    }
    if next_branch as usize != e {
        return None;
    }
    let sw: Vec<(SwitchId, Vec<HalfBranch>, Vec<HalfBranch>)> = sides
        .into_iter()
        .enumerate()
        .map(|(i, [a, b])| (i as SwitchId, a.into_iter().map(|h| h.expect("filled")).collect(), b.into_iter().map(|h| h.expect("filled")).collect()))
        .collect();
    let t = TrainTrack::from_switches(sw, false).ok()?;
    if t.components().len() != 1 {
        return None;
    }
    let regions = t.regions();
    let trigons = regions.iter().filter(|r| r.is_trigon()).count() as i64;
    let monogons: Vec<_> = regions.iter().filter(|r| r.cusps() == 1 && r.double_euler() == 1).collect();
    if trigons != spec.surface.maximal_trigon_count()
        || monogons.len() as u32 != spec.surface.punctures
        || regions.len() as i64 != trigons + monogons.len() as i64
    {
        return None;
    }
    let anchors: Vec<_> = monogons.iter().map(|r| r.darts[0]).collect();
    let t = t.with_punctures(&anchors).ok()?;
    if t.surface()? != spec.surface {
        return None;
    }
    Some(Seed { track: t, connectors })
}

/// Searches until a candidate passes every surrogate check, or `attempts`
/// runs out.
pub fn search<R: Rng>(spec: &SearchSpec, rng: &mut R, attempts: usize) -> Option<Seed> {
    for _ in 0..attempts {
        if let Some(seed) = random_candidate(spec, rng) {
            if completeness_surrogate(&seed.track).all() {
                return Some(seed);
            }
        }
    }
    None
}

/// A positive integral guide with every weight at least `floor`.
pub fn integral_guide(t: &TrainTrack, floor: i64) -> Option<Vec<Q>> {
    let w = positive_transverse(t)?;
    Some(integral_at_least(t, &w, floor))
}

/// Weight vector of the closed curve formed by a connector.
pub fn connector_curve(t: &TrainTrack, large: BranchId, small: BranchId) -> Vec<Q> {
    let mut w = vec![Q::from_integer(0.into()); t.branch_capacity()];
    w[large as usize] = Q::from_integer(1.into());
    w[small as usize] = Q::from_integer(1.into());
    w
}

/// Names of the frozen catalog entries.
pub const NAMES: [&str; 6] = ["s05-a", "s05-b", "s12-a", "s12-b", "s20-a", "s20-b"];

/// Directory holding the frozen catalog in a source checkout.
pub fn catalog_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../catalog")
}

/// Surface of a catalog entry, read from its name prefix.
pub fn surface_of(name: &str) -> Option<Surface> {
    match name.get(..3)? {
        "s05" => Some(Surface::new(0, 5)),
        "s12" => Some(Surface::new(1, 2)),
        "s20" => Some(Surface::new(2, 0)),
        _ => None,
    }
}

/// Loads a catalog track and its guide.
pub fn load(name: &str) -> Result<(TrainTrack, Vec<Q>), crate::error::TrackError> {
    let dir = catalog_dir();
    let read = |ext: &str| {
        std::fs::read_to_string(dir.join(format!("{name}.{ext}")))
            .map_err(|e| crate::error::TrackError::Precondition(format!("cannot read catalog entry {name}.{ext}: {e}")))
    };
    let t = crate::io::parse_track(&read("trk")?)?;
    let mut g = crate::io::parse_weights(&read("gm")?)?;
    g.resize(t.branch_capacity().max(g.len()), Q::from_integer(0.into()));
    Ok((t, g))
}
