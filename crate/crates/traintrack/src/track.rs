//! Ribbon data model for train tracks and bigon tracks.
//!
//! A track is stored purely combinatorially. Every switch has two ordered
//! sides. Each side lists its half-branches from left to right as seen by
//! an observer standing at the switch and facing into that side. With this
//! convention the clockwise order around a switch is side `A` followed by
//! side `B`, and the two sides play symmetric roles.
//!
//! Complementary regions are traced with the region on the left of each
//! directed branch traversal ("dart"). Arriving at a switch through the
//! half-branch in position `j` of side `Y`, the walk turns back into
//! position `j + 1` of the same side when it exists (a cusp of the region),
//! and otherwise passes smoothly to position `0` of the opposite side.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::TrackError;

/// Stable branch label. Moves keep labels of surviving branches fixed, so a
/// label doubles as the branch slot used by slot bijections and by the
/// standard embedding of flat strips.
pub type BranchId = u32;
/// Stable switch label.
pub type SwitchId = u32;

/// One of the two sides of a switch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }

    pub fn from_index(i: usize) -> Side {
        if i == 0 {
            Side::A
        } else {
            Side::B
        }
    }
}

/// One end of a branch: `end` is 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfBranch {
    pub branch: BranchId,
    pub end: u8,
}

impl HalfBranch {
    pub fn new(branch: BranchId, end: u8) -> Self {
        HalfBranch { branch, end }
    }

    pub fn opposite(self) -> HalfBranch {
        HalfBranch { branch: self.branch, end: 1 - self.end }
    }

    /// The dart leaving the switch through this half-branch.
    pub fn departing(self) -> Dart {
        Dart { branch: self.branch, forward: self.end == 0 }
    }

    /// The dart arriving at the switch through this half-branch.
    pub fn arriving(self) -> Dart {
        Dart { branch: self.branch, forward: self.end == 1 }
    }
}

/// Where a branch end is attached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endpoint {
    pub switch: SwitchId,
    pub side: Side,
}

/// A fully resolved slot: switch, side and position within the side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub switch: SwitchId,
    pub side: Side,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Switch {
    pub sides: [Vec<HalfBranch>; 2],
}

impl Switch {
    pub fn side(&self, s: Side) -> &[HalfBranch] {
        &self.sides[s.index()]
    }

    pub fn valence(&self) -> usize {
        self.sides[0].len() + self.sides[1].len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Branch {
    pub ends: [Endpoint; 2],
}

/// A directed traversal of a branch. `forward` runs from end 0 to end 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub branch: BranchId,
    pub forward: bool,
}

impl Dart {
    pub fn new(branch: BranchId, forward: bool) -> Self {
        Dart { branch, forward }
    }

    pub fn reversed(self) -> Dart {
        Dart { branch: self.branch, forward: !self.forward }
    }

    /// Half-branch the dart leaves from.
    pub fn tail(self) -> HalfBranch {
        HalfBranch::new(self.branch, if self.forward { 0 } else { 1 })
    }

    /// Half-branch the dart arrives through.
    pub fn head(self) -> HalfBranch {
        HalfBranch::new(self.branch, if self.forward { 1 } else { 0 })
    }

    /// Dense index used for deterministic ordering.
    pub fn index(self) -> usize {
        2 * self.branch as usize + usize::from(!self.forward)
    }

    pub fn from_index(i: usize) -> Dart {
        Dart { branch: (i / 2) as BranchId, forward: i % 2 == 0 }
    }
}

/// Classification of a branch by the isolation of its half-branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchKind {
    Large,
    Small,
    Mixed,
}

/// A surface of genus `genus` with `punctures` punctures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Surface {
    pub genus: u32,
    pub punctures: u32,
}

impl Surface {
    pub fn new(genus: u32, punctures: u32) -> Self {
        Surface { genus, punctures }
    }

    /// The complexity `3g - 3 + m`.
    pub fn complexity(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.punctures as i64
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.punctures as i64
    }

    /// Branch count of a maximal generic track.
    pub fn maximal_branch_count(&self) -> i64 {
        18 * self.genus as i64 - 18 + 6 * self.punctures as i64
    }

    /// Switch count of a maximal generic track.
    pub fn maximal_switch_count(&self) -> i64 {
        12 * self.genus as i64 - 12 + 4 * self.punctures as i64
    }

    /// Number of trigons in a maximal track.
    pub fn maximal_trigon_count(&self) -> i64 {
        4 * self.genus as i64 - 4 + self.punctures as i64
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{{{},{}}}", self.genus, self.punctures)
    }
}

/// A complementary region. The boundary is a closed walk of darts with the
/// region on the left; `cusp_after[i]` records a cusp between dart `i` and
/// dart `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub darts: Vec<Dart>,
    pub cusp_after: Vec<bool>,
    pub punctured: bool,
}

impl Region {
    pub fn cusps(&self) -> usize {
        self.cusp_after.iter().filter(|&&c| c).count()
    }

    /// Twice the cusped Euler characteristic `chi_0 - k/2`.
    pub fn double_euler(&self) -> i64 {
        let chi0 = if self.punctured { 0 } else { 1 };
        2 * chi0 - self.cusps() as i64
    }

    pub fn is_trigon(&self) -> bool {
        !self.punctured && self.cusps() == 3
    }

    pub fn is_bigon(&self) -> bool {
        !self.punctured && self.cusps() == 2
    }

    pub fn is_punctured_monogon(&self) -> bool {
        self.punctured && self.cusps() == 1
    }

    /// Sides of the region: maximal cusp-free runs of the boundary walk.
    /// A region without cusps has a single closed side.
    pub fn sides(&self) -> Vec<Vec<Dart>> {
        let n = self.darts.len();
        let Some(first_cusp) = self.cusp_after.iter().position(|&c| c) else {
            return vec![self.darts.clone()];
        };
        let mut sides = Vec::new();
        let mut cur = Vec::new();
        for k in 1..=n {
            let i = (first_cusp + k) % n;
            cur.push(self.darts[i]);
            if self.cusp_after[i] {
                sides.push(std::mem::take(&mut cur));
            }
        }
        sides
    }
}

/// A train track or bigon track.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainTrack {
    pub(crate) switches: Vec<Option<Switch>>,
    pub(crate) branches: Vec<Option<Branch>>,
    pub(crate) allows_bigons: bool,
    /// One anchor dart per punctured region, normalized to the minimal dart
    /// of that region.
    pub(crate) punctures: Vec<Dart>,
    /// Optional branch-interior marks, each on the left side of a dart.
    pub(crate) marks: Vec<Dart>,
}

impl TrainTrack {
    /// Builds a track from switch side lists. Branch endpoints are derived
    /// from the side lists; every branch id must appear exactly twice, once
    /// per end.
    pub fn from_switches(
        switches: Vec<(SwitchId, Vec<HalfBranch>, Vec<HalfBranch>)>,
        allows_bigons: bool,
    ) -> Result<Self, TrackError> {
        let max_sw = switches.iter().map(|s| s.0).max().map_or(0, |m| m as usize + 1);
        let mut sw: Vec<Option<Switch>> = vec![None; max_sw];
        let mut ends: BTreeMap<BranchId, [Option<Endpoint>; 2]> = BTreeMap::new();
        for (id, a, b) in switches {
            if sw[id as usize].is_some() {
                return Err(TrackError::Structural(format!("duplicate switch {id}")));
            }
            for (side, list) in [(Side::A, &a), (Side::B, &b)] {
                for h in list.iter() {
                    if h.end > 1 {
                        return Err(TrackError::Structural(format!(
                            "half-branch {}.{} has no such end",
                            h.branch, h.end
                        )));
                    }
                    let slot = &mut ends.entry(h.branch).or_insert([None, None])[h.end as usize];
                    if slot.is_some() {
                        return Err(TrackError::Structural(format!(
                            "half-branch {}.{} attached twice",
                            h.branch, h.end
                        )));
                    }
                    *slot = Some(Endpoint { switch: id, side });
                }
            }
            sw[id as usize] = Some(Switch { sides: [a, b] });
        }
        let max_br = ends.keys().next_back().map_or(0, |&m| m as usize + 1);
        let mut br = vec![None; max_br];
        for (id, e) in ends {
            match e {
                [Some(e0), Some(e1)] => br[id as usize] = Some(Branch { ends: [e0, e1] }),
                _ => {
                    return Err(TrackError::Structural(format!("branch {id} has a dangling end")))
                }
            }
        }
        let t = TrainTrack { switches: sw, branches: br, allows_bigons, punctures: vec![], marks: vec![] };
        Ok(t)
    }

    /// Marks the regions containing the given darts as punctured.
    pub fn with_punctures(mut self, anchors: &[Dart]) -> Result<Self, TrackError> {
        for d in anchors {
            if !self.has_branch(d.branch) {
                return Err(TrackError::Structural(format!("puncture anchor on missing branch {}", d.branch)));
            }
        }
        self.punctures = anchors.to_vec();
        self.normalize_punctures()?;
        Ok(self)
    }

    pub fn with_marks(mut self, marks: &[Dart]) -> Self {
        self.marks = marks.to_vec();
        self.marks.sort();
        self.marks.dedup();
        self
    }

    pub fn allows_bigons(&self) -> bool {
        self.allows_bigons
    }

    pub fn set_allows_bigons(&mut self, allow: bool) {
        self.allows_bigons = allow;
    }

    pub fn punctures(&self) -> &[Dart] {
        &self.punctures
    }

    pub fn marks(&self) -> &[Dart] {
        &self.marks
    }

    pub fn has_branch(&self, b: BranchId) -> bool {
        self.branches.get(b as usize).is_some_and(|x| x.is_some())
    }

    pub fn has_switch(&self, s: SwitchId) -> bool {
        self.switches.get(s as usize).is_some_and(|x| x.is_some())
    }

    pub fn branch(&self, b: BranchId) -> &Branch {
        self.branches[b as usize].as_ref().expect("branch id in range")
    }

    pub fn switch(&self, s: SwitchId) -> &Switch {
        self.switches[s as usize].as_ref().expect("switch id in range")
    }

    pub(crate) fn switch_mut(&mut self, s: SwitchId) -> &mut Switch {
        self.switches[s as usize].as_mut().expect("switch id in range")
    }

    pub fn branch_ids(&self) -> impl Iterator<Item = BranchId> + '_ {
        self.branches.iter().enumerate().filter(|(_, b)| b.is_some()).map(|(i, _)| i as BranchId)
    }

    pub fn switch_ids(&self) -> impl Iterator<Item = SwitchId> + '_ {
        self.switches.iter().enumerate().filter(|(_, s)| s.is_some()).map(|(i, _)| i as SwitchId)
    }

    pub fn branch_count(&self) -> usize {
        self.branches.iter().filter(|b| b.is_some()).count()
    }

    pub fn switch_count(&self) -> usize {
        self.switches.iter().filter(|s| s.is_some()).count()
    }

    /// One past the largest branch label; measure vectors use this length.
    pub fn branch_capacity(&self) -> usize {
        self.branches.len()
    }

    pub fn switch_capacity(&self) -> usize {
        self.switches.len()
    }

    pub fn endpoint(&self, h: HalfBranch) -> Endpoint {
        self.branch(h.branch).ends[h.end as usize]
    }

    pub fn slot(&self, h: HalfBranch) -> Slot {
        let ep = self.endpoint(h);
        let pos = self
            .switch(ep.switch)
            .side(ep.side)
            .iter()
            .position(|&x| x == h)
            .expect("ribbon structure is consistent");
        Slot { switch: ep.switch, side: ep.side, pos }
    }

    pub fn side_len(&self, ep: Endpoint) -> usize {
        self.switch(ep.switch).side(ep.side).len()
    }

    /// A half-branch is large iff it is the only slot on its side.
    pub fn is_large_half(&self, h: HalfBranch) -> bool {
        self.side_len(self.endpoint(h)) == 1
    }

    pub fn classify_branch(&self, b: BranchId) -> BranchKind {
        let l0 = self.is_large_half(HalfBranch::new(b, 0));
        let l1 = self.is_large_half(HalfBranch::new(b, 1));
        match (l0, l1) {
            (true, true) => BranchKind::Large,
            (false, false) => BranchKind::Small,
            _ => BranchKind::Mixed,
        }
    }

    pub fn large_branches(&self) -> Vec<BranchId> {
        self.branch_ids().filter(|&b| self.classify_branch(b) == BranchKind::Large).collect()
    }

    pub fn small_branches(&self) -> Vec<BranchId> {
        self.branch_ids().filter(|&b| self.classify_branch(b) == BranchKind::Small).collect()
    }

    pub fn mixed_branches(&self) -> Vec<BranchId> {
        self.branch_ids().filter(|&b| self.classify_branch(b) == BranchKind::Mixed).collect()
    }

    /// True when every switch has exactly three half-branches.
    pub fn is_generic(&self) -> bool {
        self.switch_ids().all(|s| self.switch(s).valence() == 3)
    }

    /// Excess valence `sum (V(s) - 3)` over switches of valence at least 3.
    pub fn excess_valence(&self) -> usize {
        self.switch_ids().map(|s| self.switch(s).valence().saturating_sub(3)).sum()
    }

    /// The dart following `d` along the boundary of the region on its left,
    /// together with a flag telling whether the turn is a cusp.
    pub fn next_dart(&self, d: Dart) -> (Dart, bool) {
        let h = d.head();
        let slot = self.slot(h);
        let sw = self.switch(slot.switch);
        let side = sw.side(slot.side);
        if slot.pos + 1 < side.len() {
            (side[slot.pos + 1].departing(), true)
        } else {
            (sw.side(slot.side.other())[0].departing(), false)
        }
    }

    /// The dart preceding `d` along its left region.
    pub fn prev_dart(&self, d: Dart) -> (Dart, bool) {
        let h = d.tail();
        let slot = self.slot(h);
        let sw = self.switch(slot.switch);
        let side = sw.side(slot.side);
        if slot.pos > 0 {
            (side[slot.pos - 1].arriving(), true)
        } else {
            let other = sw.side(slot.side.other());
            (other[other.len() - 1].arriving(), false)
        }
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        self.branch_ids().flat_map(|b| [Dart::new(b, true), Dart::new(b, false)])
    }

    /// Traces boundary cycles without consulting puncture marks. Cycles are
    /// ordered by their minimal dart and start there.
    fn trace_cycles(&self) -> Vec<(Vec<Dart>, Vec<bool>)> {
        let mut seen = vec![false; 2 * self.branch_capacity()];
        let mut out = Vec::new();
        for d in self.darts() {
            if seen[d.index()] {
                continue;
            }
            let mut darts = Vec::new();
            let mut cusps = Vec::new();
            let mut cur = d;
            loop {
                seen[cur.index()] = true;
                darts.push(cur);
                let (nx, cusp) = self.next_dart(cur);
                cusps.push(cusp);
                cur = nx;
                if cur == d {
                    break;
                }
            }
            out.push((darts, cusps));
        }
        out
    }

    /// Region index of every dart, indexed by `Dart::index`.
    pub fn region_of_darts(&self) -> Vec<usize> {
        let mut map = vec![usize::MAX; 2 * self.branch_capacity()];
        for (i, (darts, _)) in self.trace_cycles().iter().enumerate() {
            for d in darts {
                map[d.index()] = i;
            }
        }
        map
    }

    /// All complementary regions in deterministic order.
    pub fn regions(&self) -> Vec<Region> {
        let cycles = self.trace_cycles();
        let mut punct = vec![false; cycles.len()];
        if !self.punctures.is_empty() {
            let map = self.region_of_darts();
            for p in &self.punctures {
                punct[map[p.index()]] = true;
            }
        }
        cycles
            .into_iter()
            .zip(punct)
            .map(|((darts, cusp_after), punctured)| Region { darts, cusp_after, punctured })
            .collect()
    }

    /// Re-anchors each puncture at the minimal dart of its region and
    /// rejects two punctures in one region.
    pub(crate) fn normalize_punctures(&mut self) -> Result<(), TrackError> {
        let cycles = self.trace_cycles();
        let map = self.region_of_darts();
        let mut anchors = BTreeSet::new();
        for p in &self.punctures {
            let r = map[p.index()];
            if !anchors.insert(cycles[r].0[0]) {
                return Err(TrackError::Structural("two punctures in one region".into()));
            }
        }
        self.punctures = anchors.into_iter().collect();
        Ok(())
    }

    /// Connected components as sorted lists of switch ids.
    pub fn components(&self) -> Vec<Vec<SwitchId>> {
        let mut comp = vec![usize::MAX; self.switch_capacity()];
        let mut out = Vec::new();
        for s in self.switch_ids() {
            if comp[s as usize] != usize::MAX {
                continue;
            }
            let idx = out.len();
            let mut list = vec![];
            let mut queue = VecDeque::from([s]);
            comp[s as usize] = idx;
            while let Some(u) = queue.pop_front() {
                list.push(u);
                for side in &self.switch(u).sides {
                    for h in side {
                        let v = self.endpoint(h.opposite()).switch;
                        if comp[v as usize] == usize::MAX {
                            comp[v as usize] = idx;
                            queue.push_back(v);
                        }
                    }
                }
            }
            list.sort();
            out.push(list);
        }
        out
    }

    /// Genus of the closed surface obtained by capping every boundary cycle
    /// with a disc, for a connected track. Returns `None` when the Euler
    /// count is odd or exceeds 2.
    pub fn derived_genus(&self) -> Option<u32> {
        let v = self.switch_count() as i64;
        let e = self.branch_count() as i64;
        let f = self.trace_cycles().len() as i64;
        let chi = v - e + f;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return None;
        }
        Some(((2 - chi) / 2) as u32)
    }

    /// The surface described by the track: derived genus and puncture count.
    pub fn surface(&self) -> Option<Surface> {
        self.derived_genus().map(|g| Surface::new(g, self.punctures.len() as u32))
    }

    /// Checks that every half-branch listed at a switch agrees with the
    /// endpoint stored on its branch.
    pub fn check_structure(&self) -> Result<(), TrackError> {
        for s in self.switch_ids() {
            let sw = self.switch(s);
            for side in [Side::A, Side::B] {
                for h in sw.side(side) {
                    if !self.has_branch(h.branch) {
                        return Err(TrackError::Structural(format!(
                            "switch {s} refers to missing branch {}",
                            h.branch
                        )));
                    }
                    let ep = self.endpoint(*h);
                    if ep.switch != s || ep.side != side {
                        return Err(TrackError::Structural(format!(
                            "half-branch {}.{} listed at switch {s} but attached elsewhere",
                            h.branch, h.end
                        )));
                    }
                }
            }
        }
        for b in self.branch_ids() {
            for end in 0..2u8 {
                let h = HalfBranch::new(b, end);
                let ep = self.endpoint(h);
                if !self.has_switch(ep.switch) {
                    return Err(TrackError::Structural(format!("branch {b} attached to missing switch {}", ep.switch)));
                }
                let count = self.switch(ep.switch).side(ep.side).iter().filter(|&&x| x == h).count();
                if count != 1 {
                    return Err(TrackError::Structural(format!("half-branch {b}.{end} occurs {count} times")));
                }
            }
        }
        Ok(())
    }

    /// Checks every invariant of a legal track on `surface`.
    pub fn validate(&self, surface: &Surface) -> Result<ValidationReport, TrackError> {
        self.check_structure()?;
        let mut violations = Vec::new();
        for s in self.switch_ids() {
            let sw = self.switch(s);
            if sw.sides[0].is_empty() || sw.sides[1].is_empty() {
                violations.push(Violation::EmptySide { switch: s });
            }
        }
        if !violations.is_empty() {
            return Ok(ValidationReport { violations });
        }
        let comps = self.components();
        if comps.len() != 1 {
            violations.push(Violation::Disconnected { components: comps.len() });
        }
        for s in self.switch_ids() {
            if self.switch(s).valence() == 2 && !self.on_closed_curve_component(s) {
                violations.push(Violation::BivalentSwitch { switch: s });
            }
        }
        let regions = self.regions();
        let mut double_chi = 0i64;
        for (i, r) in regions.iter().enumerate() {
            double_chi += r.double_euler();
            let allowed = r.double_euler() < 0 || (self.allows_bigons && r.is_bigon());
            if !allowed {
                violations.push(Violation::ForbiddenRegion { region: i, cusps: r.cusps(), punctured: r.punctured });
            }
        }
        if double_chi != 2 * surface.euler_characteristic() {
            violations.push(Violation::EulerMismatch { expected: surface.euler_characteristic(), found_double: double_chi });
        }
        if self.punctures.len() as u32 != surface.punctures {
            violations.push(Violation::PunctureCount { expected: surface.punctures, found: self.punctures.len() as u32 });
        }
        Ok(ValidationReport { violations })
    }

    fn on_closed_curve_component(&self, s: SwitchId) -> bool {
        let comps = self.components();
        let comp = comps.iter().find(|c| c.contains(&s)).expect("switch lies in a component");
        comp.iter().all(|&u| self.switch(u).valence() == 2)
    }

    /// Sum of branch weights along a list of darts, with multiplicity.
    pub fn path_weight<T: Clone + std::ops::Add<Output = T>>(&self, path: &[Dart], w: &[T], zero: T) -> T {
        path.iter().fold(zero, |acc, d| acc + w[d.branch as usize].clone())
    }

    /// Allocates a fresh branch label.
    pub(crate) fn fresh_branch(&mut self) -> BranchId {
        self.branches.push(None);
        (self.branches.len() - 1) as BranchId
    }

    pub(crate) fn fresh_switch(&mut self) -> SwitchId {
        self.switches.push(Some(Switch::default()));
        (self.switches.len() - 1) as SwitchId
    }

    /// Rebuilds branch endpoints from the switch side lists.
    pub(crate) fn resync_endpoints(&mut self) {
        let mut ends: Vec<[Option<Endpoint>; 2]> = vec![[None, None]; self.branches.len()];
        for (s, sw) in self.switches.iter().enumerate() {
            let Some(sw) = sw else { continue };
            for side in [Side::A, Side::B] {
                for h in sw.side(side) {
                    if ends.len() <= h.branch as usize {
                        ends.resize(h.branch as usize + 1, [None, None]);
                    }
                    ends[h.branch as usize][h.end as usize] = Some(Endpoint { switch: s as SwitchId, side });
                }
            }
        }
        self.branches = ends
            .into_iter()
            .map(|e| match e {
                [Some(a), Some(b)] => Some(Branch { ends: [a, b] }),
                [None, None] => None,
                _ => panic!("half-attached branch after local rewrite"),
            })
            .collect();
        while matches!(self.branches.last(), Some(None)) {
            self.branches.pop();
        }
        while matches!(self.switches.last(), Some(None)) {
            self.switches.pop();
        }
    }

    pub(crate) fn remove_switch(&mut self, s: SwitchId) {
        self.switches[s as usize] = None;
    }

    /// Smooths every bivalent switch that does not lie on a closed-curve
    /// component, merging its two branches into one. The surviving label is
    /// the smaller of the two. Returns the list of `(removed, kept)` pairs.
    pub fn smooth_bivalent(&self) -> (TrainTrack, Vec<(BranchId, BranchId)>) {
        let mut t = self.clone();
        let mut sets = t.punctured_region_dart_sets();
        let mut merged = Vec::new();
        loop {
            let cand = t.switch_ids().find(|&s| t.switch(s).valence() == 2 && !t.on_closed_curve_component(s));
            let Some(s) = cand else { break };
            let h0 = t.switch(s).sides[0][0];
            let h1 = t.switch(s).sides[1][0];
            let (keep, gone, keep_half, gone_half) =
                if h0.branch < h1.branch { (h0.branch, h1.branch, h0, h1) } else { (h1.branch, h0.branch, h1, h0) };
            let far = gone_half.opposite();
            t.remove_switch(s);
            let far_ep = t.endpoint(far);
            for h in t.switch_mut(far_ep.switch).sides[far_ep.side.index()].iter_mut() {
                if *h == far {
                    *h = keep_half;
                }
            }
            t.branches[gone as usize] = None;
            t.resync_endpoints();
            let remap = |d: Dart| -> Dart {
                if d.branch != gone {
                    d
                } else if d.tail() == gone_half {
                    Dart::new(keep, keep_half.end == 1)
                } else {
                    Dart::new(keep, keep_half.end == 0)
                }
            };
            for set in sets.iter_mut() {
                for d in set.iter_mut() {
                    *d = remap(*d);
                }
            }
            t.marks = t.marks.iter().map(|&d| remap(d)).collect();
            merged.push((gone, keep));
        }
        t.restore_punctures(&sets, &[]).expect("smoothing keeps punctured regions distinct");
        (t, merged)
    }

    /// Every dart of each punctured region, used to re-anchor punctures
    /// before a local rewrite destroys the current anchor.
    pub(crate) fn punctured_region_dart_sets(&self) -> Vec<Vec<Dart>> {
        let regions = self.regions();
        regions.into_iter().filter(|r| r.punctured).map(|r| r.darts).collect()
    }

    /// Restores puncture marks after a rewrite: each punctured region is
    /// identified by any surviving dart from its former boundary.
    pub(crate) fn restore_punctures(&mut self, sets: &[Vec<Dart>], avoid: &[BranchId]) -> Result<(), TrackError> {
        let mut anchors = Vec::new();
        for set in sets {
            let pick = set
                .iter()
                .copied()
                .find(|d| !avoid.contains(&d.branch) && self.has_branch(d.branch))
                .ok_or_else(|| TrackError::Structural("punctured region lost every anchor".into()))?;
            anchors.push(pick);
        }
        self.punctures = anchors;
        self.normalize_punctures()
    }

    /// Relabels switches and branches by the given maps. Branch ends and
    /// orders are untouched.
    pub fn relabeled(&self, sw_map: &dyn Fn(SwitchId) -> SwitchId, br_map: &dyn Fn(BranchId) -> BranchId) -> TrainTrack {
        let mut switches = Vec::new();
        for s in self.switch_ids() {
            let sw = self.switch(s);
            let side = |v: &Vec<HalfBranch>| v.iter().map(|h| HalfBranch::new(br_map(h.branch), h.end)).collect::<Vec<_>>();
            switches.push((sw_map(s), side(&sw.sides[0]), side(&sw.sides[1])));
        }
        let t = TrainTrack::from_switches(switches, self.allows_bigons).expect("relabeling is bijective");
        let p: Vec<Dart> = self.punctures.iter().map(|d| Dart::new(br_map(d.branch), d.forward)).collect();
        let m: Vec<Dart> = self.marks.iter().map(|d| Dart::new(br_map(d.branch), d.forward)).collect();
        t.with_punctures(&p).expect("relabeling keeps punctures distinct").with_marks(&m)
    }

    /// Reverses the end numbering of a branch.
    pub fn with_branch_reversed(&self, b: BranchId) -> TrainTrack {
        let mut t = self.clone();
        for s in t.switch_ids().collect::<Vec<_>>() {
            for side in 0..2 {
                for h in t.switch_mut(s).sides[side].iter_mut() {
                    if h.branch == b {
                        h.end = 1 - h.end;
                    }
                }
            }
        }
        t.resync_endpoints();
        let flip = |d: Dart| if d.branch == b { d.reversed() } else { d };
        let sets: Vec<Vec<Dart>> = self.punctured_region_dart_sets().into_iter().map(|s| s.into_iter().map(flip).collect()).collect();
        t.marks = t.marks.iter().map(|&d| flip(d)).collect();
        t.restore_punctures(&sets, &[]).expect("reversal keeps regions");
        t
    }

    /// The mirror image: every side list reversed, which reverses the
    /// orientation of the surface.
    pub fn mirrored(&self) -> TrainTrack {
        let mut switches = Vec::new();
        for s in self.switch_ids() {
            let sw = self.switch(s);
            let mut a = sw.sides[0].clone();
            let mut b = sw.sides[1].clone();
            a.reverse();
            b.reverse();
            switches.push((s, a, b));
        }
        let t = TrainTrack::from_switches(switches, self.allows_bigons).expect("mirroring keeps the ribbon structure");
        // Region boundaries are traversed backwards in the mirror: the region
        // left of a dart becomes the region left of the reversed dart.
        let p: Vec<Dart> = self.punctures.iter().map(|d| d.reversed()).collect();
        let m: Vec<Dart> = self.marks.iter().map(|d| d.reversed()).collect();
        t.with_punctures(&p).expect("mirroring keeps punctures distinct").with_marks(&m)
    }

    /// Swaps the names of the two sides of a switch, which leaves the ribbon
    /// structure unchanged.
    pub fn with_sides_swapped(&self, s: SwitchId) -> TrainTrack {
        let mut t = self.clone();
        t.switch_mut(s).sides.swap(0, 1);
        t.resync_endpoints();
        t
    }

    /// The subtrack spanned by a set of branches, if it is a legal branch
    /// subset: every switch it meets keeps at least one branch on each side.
    pub fn subtrack(&self, keep: &BTreeSet<BranchId>) -> Result<TrainTrack, TrackError> {
        if keep.is_empty() {
            return Err(TrackError::Precondition("empty subtrack".into()));
        }
        let mut switches = Vec::new();
        for s in self.switch_ids() {
            let sw = self.switch(s);
            let a: Vec<_> = sw.sides[0].iter().copied().filter(|h| keep.contains(&h.branch)).collect();
            let b: Vec<_> = sw.sides[1].iter().copied().filter(|h| keep.contains(&h.branch)).collect();
            if a.is_empty() && b.is_empty() {
                continue;
            }
            if a.is_empty() || b.is_empty() {
                return Err(TrackError::Precondition(format!("switch {s} loses a whole side")));
            }
            switches.push((s, a, b));
        }
        TrainTrack::from_switches(switches, self.allows_bigons)
    }
}

/// One violated invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptySide { switch: SwitchId },
    Disconnected { components: usize },
    BivalentSwitch { switch: SwitchId },
    ForbiddenRegion { region: usize, cusps: usize, punctured: bool },
    EulerMismatch { expected: i64, found_double: i64 },
    PunctureCount { expected: u32, found: u32 },
}

impl Violation {
    /// Short clause name used in reports.
    pub fn clause(&self) -> &'static str {
        match self {
            Violation::EmptySide { .. } => "empty switch side",
            Violation::Disconnected { .. } => "disconnected",
            Violation::BivalentSwitch { .. } => "bivalent switch",
            Violation::ForbiddenRegion { .. } => "forbidden region",
            Violation::EulerMismatch { .. } => "euler mismatch",
            Violation::PunctureCount { .. } => "puncture count",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySide { switch } => write!(f, "empty switch side: switch {switch}"),
            Violation::Disconnected { components } => write!(f, "disconnected: {components} components"),
            Violation::BivalentSwitch { switch } => write!(f, "bivalent switch: switch {switch}"),
            Violation::ForbiddenRegion { region, cusps, punctured } => {
                write!(f, "forbidden region: region {region} cusps={cusps} punctured={punctured}")
            }
            Violation::EulerMismatch { expected, found_double } => {
                write!(f, "euler mismatch: expected {expected}, found {}/2", found_double)
            }
            Violation::PunctureCount { expected, found } => {
                write!(f, "puncture count: expected {expected}, found {found}")
            }
        }
    }
}

/// Outcome of [`TrainTrack::validate`]: empty iff the track is legal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}
