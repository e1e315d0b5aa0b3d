//! Splitting sequences, flat strips and their lattice operations.
//!
//! Moves keep branch labels, so a branch label is also a coordinate of the
//! standard embedding: `phi[b]` counts the splits performed at label `b`.
//! "Splittable to a target" is always decided relative to a witness
//! sequence, by commuting records to the front.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::TrackError;
use crate::measures::{completeness_surrogate, positive_transverse};
use crate::moves::{self, Direction, SplitRecord};
use crate::rational::Q;
use crate::track::{BranchId, BranchKind, Dart, HalfBranch, SwitchId, TrainTrack};

/// A base track and an ordered list of split records.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingSequence {
    pub base: TrainTrack,
    pub records: Vec<SplitRecord>,
}

impl SplittingSequence {
    pub fn new(base: TrainTrack, records: Vec<SplitRecord>) -> Self {
        SplittingSequence { base, records }
    }

    /// Every intermediate track, starting with the base. Fails when a record
    /// is a collision or its slot is not large at its turn.
    pub fn stations(&self) -> Result<Vec<TrainTrack>, TrackError> {
        let mut out = vec![self.base.clone()];
        for (i, r) in self.records.iter().enumerate() {
            if r.direction == Direction::Collision {
                return Err(TrackError::Precondition(format!("record {i} is a collision")));
            }
            let next = moves::apply(out.last().expect("nonempty"), *r)
                .map_err(|e| TrackError::Precondition(format!("record {i} ({r}) cannot be applied: {e}")))?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn end(&self) -> Result<TrainTrack, TrackError> {
        replay(&self.base, &self.records)
    }

    pub fn phi(&self) -> Vec<i64> {
        phi_of(self.base.branch_capacity(), &self.records)
    }
}

/// Applies records in order.
pub fn replay(base: &TrainTrack, records: &[SplitRecord]) -> Result<TrainTrack, TrackError> {
    let mut cur = base.clone();
    for r in records {
        cur = moves::apply(&cur, *r)?;
    }
    Ok(cur)
}

/// Split counts per label.
pub fn phi_of(dim: usize, records: &[SplitRecord]) -> Vec<i64> {
    let mut v = vec![0i64; dim];
    for r in records {
        v[r.slot as usize] += 1;
    }
    v
}

/// Front-loading test: returns the first residual record at `e` when it
/// can be commuted to the front of `residual`.
///
/// The record at position `j` is bubbled backwards. Passing the record at
/// position `i` is allowed when, in the track reached after the first `i`
/// records, both slots are large and share no switch.
pub fn front_loadable(t: &TrainTrack, residual: &[SplitRecord], e: BranchId) -> Result<Option<SplitRecord>, TrackError> {
    if !t.has_branch(e) || t.classify_branch(e) != BranchKind::Large {
        return Err(TrackError::Precondition(format!("branch {e} is not large")));
    }
    let Some(j) = residual.iter().position(|r| r.slot == e) else { return Ok(None) };
    if residual[j].direction == Direction::Collision {
        return Ok(None);
    }
    let mut cur = t.clone();
    for r in &residual[..j] {
        if !commute_ok(&cur, r.slot, e) {
            return Ok(None);
        }
        cur = moves::apply(&cur, *r)?;
    }
    Ok(Some(residual[j]))
}

fn end_switches(t: &TrainTrack, b: BranchId) -> [SwitchId; 2] {
    [t.endpoint(HalfBranch::new(b, 0)).switch, t.endpoint(HalfBranch::new(b, 1)).switch]
}

fn commute_ok(t: &TrainTrack, f: BranchId, e: BranchId) -> bool {
    if f == e || !t.has_branch(f) || !t.has_branch(e) {
        return false;
    }
    if t.classify_branch(f) != BranchKind::Large || t.classify_branch(e) != BranchKind::Large {
        return false;
    }
    let sf = end_switches(t, f);
    let se = end_switches(t, e);
    !sf.iter().any(|s| se.contains(s))
}

/// Removes the first record at `rec.slot`.
fn drop_first(residual: &[SplitRecord], slot: BranchId) -> Vec<SplitRecord> {
    let mut out = residual.to_vec();
    if let Some(j) = out.iter().position(|r| r.slot == slot) {
        out.remove(j);
    }
    out
}

/// Lexicographically smallest reordering of a witness sequence: at each
/// step the smallest front-loadable label is taken.
pub fn canonical_sequence(seq: &SplittingSequence) -> Result<SplittingSequence, TrackError> {
    let target = seq.end()?;
    let mut cur = seq.base.clone();
    let mut residual = seq.records.clone();
    let mut out = Vec::with_capacity(residual.len());
    while !residual.is_empty() {
        let mut picked = None;
        for e in cur.large_branches() {
            if let Some(r) = front_loadable(&cur, &residual, e)? {
                picked = Some(r);
                break;
            }
        }
        let r = picked.ok_or_else(|| TrackError::Invariant("no front-loadable record in a valid residual".into()))?;
        cur = moves::apply(&cur, r)?;
        residual = drop_first(&residual, r.slot);
        out.push(r);
    }
    if cur != target {
        return Err(TrackError::Invariant("canonical reordering reached a different track".into()));
    }
    Ok(SplittingSequence::new(seq.base.clone(), out))
}

/// What a strip is splittable to.
#[derive(Clone, Debug)]
pub enum Target {
    /// The end of a witness splitting sequence.
    Track(SplittingSequence),
    /// A positive transverse measure standing in for a lamination.
    Guide(Vec<Q>),
}

#[derive(Clone, Debug)]
pub struct StripVertex {
    pub track: TrainTrack,
    pub phi: Vec<i64>,
    pub depth: usize,
    /// BFS parent and the record leading here.
    pub parent: Option<(usize, SplitRecord)>,
    /// Remaining records to the target (track targets).
    pub residual: Vec<SplitRecord>,
    /// Transported guide (guide targets).
    pub mu: Option<Vec<Q>>,
    /// True when the vertex sits on the radius cap and has unexplored
    /// children.
    pub frontier: bool,
    /// Number of children in the full strip, known only below the cap.
    pub out_degree: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StripEdge {
    pub from: usize,
    pub to: usize,
    pub record: SplitRecord,
}

#[derive(Clone, Debug)]
pub struct FlatStrip {
    pub base: TrainTrack,
    pub dim: usize,
    pub vertices: Vec<StripVertex>,
    pub edges: Vec<StripEdge>,
    pub index: HashMap<Vec<i64>, usize>,
    pub radius: Option<usize>,
    pub truncated: bool,
    guide: Option<Vec<Q>>,
}

/// Children of a vertex, in increasing label order.
fn children(v: &StripVertex, target: &Target) -> Result<Vec<(SplitRecord, StripVertex)>, TrackError> {
    let mut out = Vec::new();
    for e in v.track.large_branches() {
        let rec = match target {
            Target::Track(_) => match front_loadable(&v.track, &v.residual, e)? {
                Some(r) => r,
                None => continue,
            },
            Target::Guide(_) => {
                let mu = v.mu.as_ref().expect("guide strips carry a measure");
                match moves::mu_direction(&v.track, mu, e) {
                    Ok(Direction::Collision) => continue,
                    Ok(d) => SplitRecord::new(e, d),
                    Err(TrackError::Precondition(_)) => continue,
                    Err(err) => return Err(err),
                }
            }
        };
        let track = moves::apply(&v.track, rec)?;
        let mu = match &v.mu {
            Some(m) => Some(moves::transport_transverse(&v.track, m, rec)?),
            None => None,
        };
        let residual = if matches!(target, Target::Track(_)) { drop_first(&v.residual, e) } else { vec![] };
        let mut phi = v.phi.clone();
        phi[e as usize] += 1;
        out.push((
            rec,
            StripVertex { track, phi, depth: v.depth + 1, parent: None, residual, mu, frontier: false, out_degree: None },
        ));
    }
    Ok(out)
}

/// Enumeration options.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnumerateOptions {
    /// Maximal `|phi|_1`; `None` enumerates the whole strip.
    pub radius: Option<usize>,
    /// Worker threads for frontier expansion; `None` or `Some(1)` runs on
    /// the calling thread.
    pub jobs: Option<usize>,
}

/// Breadth-first enumeration of the strip from `base` towards `target`.
/// Vertices are deduplicated by `phi`; a repeated `phi` must reproduce the
/// same labelled track, which is checked.
pub fn enumerate_strip(base: &TrainTrack, target: &Target, opts: EnumerateOptions) -> Result<FlatStrip, TrackError> {
    let dim = base.branch_capacity();
    let (residual, mu) = match target {
        Target::Track(seq) => {
            if &seq.base != base {
                return Err(TrackError::Precondition("witness sequence starts at a different track".into()));
            }
            seq.stations()?;
            (seq.records.clone(), None)
        }
        Target::Guide(g) => {
            if !crate::measures::is_transverse(base, g) || !crate::measures::is_positive(base, g) {
                return Err(TrackError::Measure("guide is not a positive transverse measure".into()));
            }
            (vec![], Some(g.clone()))
        }
    };
    let root = StripVertex {
        track: base.clone(),
        phi: vec![0; dim],
        depth: 0,
        parent: None,
        residual,
        mu,
        frontier: false,
        out_degree: None,
    };
    let mut strip = FlatStrip {
        base: base.clone(),
        dim,
        vertices: vec![root],
        edges: vec![],
        index: HashMap::new(),
        radius: opts.radius,
        truncated: false,
        guide: match target {
            Target::Guide(g) => Some(g.clone()),
            _ => None,
        },
    };
    strip.index.insert(vec![0; dim], 0);
    let pool = match opts.jobs {
        Some(n) if n > 1 => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| TrackError::Unsupported(format!("thread pool: {e}")))?,
        ),
        _ => None,
    };
    let mut level: Vec<usize> = vec![0];
    let mut depth = 0usize;
    while !level.is_empty() {
        let expand = |&i: &usize| children(&strip.vertices[i], target);
        let kids: Vec<Result<Vec<(SplitRecord, StripVertex)>, TrackError>> = match &pool {
            Some(p) => p.install(|| level.par_iter().map(expand).collect()),
            None => level.iter().map(expand).collect(),
        };
        let at_cap = opts.radius.is_some_and(|r| depth >= r);
        let mut next = Vec::new();
        for (&parent, ks) in level.iter().zip(kids) {
            let ks = ks?;
            if at_cap {
                if !ks.is_empty() {
                    strip.vertices[parent].frontier = true;
                    strip.truncated = true;
                }
                continue;
            }
            strip.vertices[parent].out_degree = Some(ks.len());
            for (rec, mut child) in ks {
                let to = match strip.index.get(&child.phi) {
                    Some(&existing) => {
                        if strip.vertices[existing].track != child.track {
                            return Err(TrackError::Invariant(format!(
                                "phi {:?} reached with two different tracks",
                                child.phi
                            )));
                        }
                        existing
                    }
                    None => {
                        child.parent = Some((parent, rec));
                        let id = strip.vertices.len();
                        strip.index.insert(child.phi.clone(), id);
                        strip.vertices.push(child);
                        next.push(id);
                        id
                    }
                };
                strip.edges.push(StripEdge { from: parent, to, record: rec });
            }
        }
        level = next;
        depth += 1;
    }
    strip.edges.sort();
    strip.edges.dedup();
    Ok(strip)
}

impl FlatStrip {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_of(&self, phi: &[i64]) -> Option<usize> {
        self.index.get(phi).copied()
    }

    /// Records along the BFS tree from the base to `v`.
    pub fn path_to(&self, v: usize) -> Vec<SplitRecord> {
        let mut out = Vec::new();
        let mut cur = v;
        while let Some((p, r)) = self.vertices[cur].parent {
            out.push(r);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Undirected adjacency lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// Directed children lists.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        adj
    }

    /// Unweighted graph distances from `v` in the undirected strip graph.
    pub fn distances_from(&self, v: usize, adj: &[Vec<usize>]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertices.len()];
        dist[v] = 0;
        let mut q = VecDeque::from([v]);
        while let Some(u) = q.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// True when `to` is reachable from `from` along split edges.
    pub fn splittable(&self, from: usize, to: usize) -> bool {
        if self.vertices[from].phi.iter().zip(&self.vertices[to].phi).any(|(a, b)| a > b) {
            return false;
        }
        let out = self.out_edges();
        let mut seen = vec![false; self.vertices.len()];
        let mut q = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = q.pop_front() {
            if u == to {
                return true;
            }
            for &w in &out[u] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        false
    }

    /// Text export: vertex lines then edge lines.
    pub fn export(&self) -> String {
        let mut s = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let phi: Vec<String> = v.phi.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("v {i} phi:{}\n", phi.join(",")));
        }
        for e in &self.edges {
            s.push_str(&format!("e {} {} {} {}\n", e.from, e.to, e.record.slot, e.record.direction));
        }
        s
    }

    /// Meet of two strip vertices: their greatest common predecessor.
    pub fn meet(&self, a: usize, b: usize) -> Result<usize, TrackError> {
        let (_, recs) = meet(&self.base, &self.path_to(a), &self.path_to(b))?;
        let phi = phi_of(self.dim, &recs);
        self.vertex_of(&phi).ok_or_else(|| TrackError::Invariant("meet lies outside the strip".into()))
    }

    /// Projection of a track given by a sequence from the base onto the
    /// strip.
    pub fn project(&self, zeta: &[SplitRecord]) -> Result<usize, TrackError> {
        replay(&self.base, zeta).map_err(|e| TrackError::Precondition(format!("zeta is not reachable from the base: {e}")))?;
        let recs = match &self.guide {
            Some(g) => guide_prefix(&self.base, g, zeta)?,
            None => {
                let target = self.target_records();
                meet(&self.base, zeta, &target)?.1
            }
        };
        let phi = phi_of(self.dim, &recs);
        self.vertex_of(&phi).ok_or_else(|| TrackError::Budget("projection lies beyond the enumerated radius".into()))
    }

    /// Records from the base to the target of a track-target strip: the
    /// path to the unique sink.
    fn target_records(&self) -> Vec<SplitRecord> {
        let sink = (0..self.vertices.len())
            .find(|&i| self.vertices[i].residual.is_empty() && self.vertices[i].out_degree == Some(0))
            .unwrap_or(0);
        let mut p = self.path_to(sink);
        p.extend(self.vertices[sink].residual.iter().copied());
        p
    }

    /// The join: the vertex whose phi is `phi(a) + phi(b) - phi(meet)`,
    /// checked to be reachable from both.
    pub fn join(&self, a: usize, b: usize) -> Result<usize, TrackError> {
        let m = self.meet(a, b)?;
        let pa = &self.vertices[a].phi;
        let pb = &self.vertices[b].phi;
        let pm = &self.vertices[m].phi;
        let phi: Vec<i64> = (0..self.dim).map(|i| pa[i] + pb[i] - pm[i]).collect();
        let j = self.vertex_of(&phi).ok_or_else(|| TrackError::Budget("join lies beyond the enumerated radius".into()))?;
        if !self.splittable(a, j) || !self.splittable(b, j) {
            return Err(TrackError::Invariant("join candidate is not splittable from both vertices".into()));
        }
        Ok(j)
    }
}

/// Greatest common prefix (up to reordering) of two sequences from `base`.
/// Returns the meet track and the records leading to it.
pub fn meet(base: &TrainTrack, a: &[SplitRecord], b: &[SplitRecord]) -> Result<(TrainTrack, Vec<SplitRecord>), TrackError> {
    let mut cur = base.clone();
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut out = Vec::new();
    loop {
        let mut step = None;
        for e in cur.large_branches() {
            let x = front_loadable(&cur, &ra, e)?;
            let y = front_loadable(&cur, &rb, e)?;
            if let (Some(x), Some(y)) = (x, y) {
                if x == y {
                    step = Some(x);
                    break;
                }
            }
        }
        let Some(r) = step else { break };
        cur = moves::apply(&cur, r)?;
        ra = drop_first(&ra, r.slot);
        rb = drop_first(&rb, r.slot);
        out.push(r);
    }
    Ok((cur, out))
}

/// Longest reorderable prefix of `zeta` consisting of guide-directed
/// splits.
fn guide_prefix(base: &TrainTrack, guide: &[Q], zeta: &[SplitRecord]) -> Result<Vec<SplitRecord>, TrackError> {
    let mut cur = base.clone();
    let mut mu = guide.to_vec();
    let mut res = zeta.to_vec();
    let mut out = Vec::new();
    loop {
        let mut step = None;
        for e in cur.large_branches() {
            if let Some(r) = front_loadable(&cur, &res, e)? {
                if moves::mu_direction(&cur, &mu, e).ok() == Some(r.direction) {
                    step = Some(r);
                    break;
                }
            }
        }
        let Some(r) = step else { break };
        mu = moves::transport_transverse(&cur, &mu, r)?;
        cur = moves::apply(&cur, r)?;
        res = drop_first(&res, r.slot);
        out.push(r);
    }
    Ok(out)
}

/// A subtrack of a track, given by the branch labels it uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subtrack {
    pub branches: BTreeSet<BranchId>,
}

impl Subtrack {
    pub fn new(branches: BTreeSet<BranchId>) -> Self {
        Subtrack { branches }
    }

    /// The complexity: number of track branches contained in the subtrack.
    pub fn complexity(&self) -> usize {
        self.branches.len()
    }

    pub fn is_valid_in(&self, t: &TrainTrack) -> bool {
        self.branches.iter().all(|&b| t.has_branch(b)) && t.subtrack(&self.branches).is_ok()
    }

    /// The number of subtrack half-branches at a switch, per side.
    fn side_counts(&self, t: &TrainTrack, s: SwitchId) -> [usize; 2] {
        let sw = t.switch(s);
        [0, 1].map(|i| sw.sides[i].iter().filter(|h| self.branches.contains(&h.branch)).count())
    }

    /// The trainpath of track branches forming the subtrack branch through
    /// `b`, continued through switches where the subtrack has one
    /// half-branch per side. Darts run in a fixed direction.
    pub fn branch_path(&self, t: &TrainTrack, b: BranchId) -> Vec<Dart> {
        let pass = |h: HalfBranch| -> Option<HalfBranch> {
            let ep = t.endpoint(h);
            let c = self.side_counts(t, ep.switch);
            if c != [1, 1] {
                return None;
            }
            let other = t.switch(ep.switch).side(ep.side.other());
            other.iter().copied().find(|x| self.branches.contains(&x.branch))
        };
        let start = Dart::new(b, true);
        let mut fwd = vec![start];
        let mut cur = start;
        let mut closed = false;
        while let Some(n) = pass(cur.head()) {
            let d = n.departing();
            if d == start {
                closed = true;
                break;
            }
            fwd.push(d);
            cur = d;
        }
        if closed {
            return fwd;
        }
        let mut back = Vec::new();
        let mut cur = start;
        while let Some(p) = pass(cur.tail()) {
            let d = p.arriving();
            back.push(d);
            cur = d;
        }
        back.reverse();
        back.extend(fwd);
        back
    }

    /// Applies a split of the ambient track to the subtrack labels: the
    /// diagonal stays when the subtrack still needs it.
    pub fn after_split(&self, after: &TrainTrack, f: BranchId) -> Result<Subtrack, TrackError> {
        if !self.branches.contains(&f) {
            return Ok(self.clone());
        }
        let with = self.clone();
        if with.is_valid_in(after) {
            return Ok(with);
        }
        let mut without = self.clone();
        without.branches.remove(&f);
        if !without.branches.is_empty() && without.is_valid_in(after) {
            return Ok(without);
        }
        Err(TrackError::Measure(format!("split at {f} does not carry the subtrack")))
    }
}

/// Result of tightening.
#[derive(Clone, Debug)]
pub struct Tightened {
    pub track: TrainTrack,
    pub sigma: Subtrack,
    pub guide: Vec<Q>,
    pub records: Vec<SplitRecord>,
    /// The label now forming the subtrack branch.
    pub branch: BranchId,
    /// Subtrack complexity after every split, starting with the input.
    pub complexity_trace: Vec<usize>,
}

/// Splits at large proper subbranches of the subtrack branch through `e`,
/// in guide direction, until that branch is a single track branch.
pub fn tighten(
    t: &TrainTrack,
    sigma: &Subtrack,
    e: BranchId,
    guide: &[Q],
    budget: usize,
) -> Result<Tightened, TrackError> {
    if !sigma.branches.contains(&e) || !sigma.is_valid_in(t) {
        return Err(TrackError::Precondition(format!("branch {e} is not in a valid subtrack")));
    }
    let mut cur = t.clone();
    let mut sg = sigma.clone();
    let mut mu = guide.to_vec();
    let mut records = Vec::new();
    let mut trace = vec![sg.complexity()];
    let mut anchor = e;
    loop {
        let path = sg.branch_path(&cur, anchor);
        if path.len() <= 1 {
            break;
        }
        if records.len() >= budget {
            return Err(TrackError::Budget(format!("tightening exceeded {budget} splits")));
        }
        let Some(f) = path.iter().map(|d| d.branch).filter(|&b| cur.classify_branch(b) == BranchKind::Large).min() else {
            return Err(TrackError::Unsupported(format!("subtrack branch through {anchor} has no large proper subbranch")));
        };
        let dir = moves::mu_direction(&cur, &mu, f)?;
        if dir == Direction::Collision {
            return Err(TrackError::Measure(format!("guide collides at {f}")));
        }
        let rec = SplitRecord::new(f, dir);
        let next = moves::apply(&cur, rec)?;
        let nsg = sg.after_split(&next, f)?;
        mu = moves::transport_transverse(&cur, &mu, rec)?;
        if !nsg.branches.contains(&anchor) {
            anchor = path.iter().map(|d| d.branch).find(|b| nsg.branches.contains(b)).ok_or_else(|| {
                TrackError::Invariant("subtrack branch vanished during tightening".into())
            })?;
        }
        cur = next;
        sg = nsg;
        records.push(rec);
        trace.push(sg.complexity());
    }
    Ok(Tightened { track: cur, sigma: sg, guide: mu, records, branch: anchor, complexity_trace: trace })
}

/// One segment of a sequence induced by a subtrack split: tighten at `e`,
/// then split the now single large branch in direction `dir`.
pub fn induced_step(
    t: &TrainTrack,
    sigma: &Subtrack,
    e: BranchId,
    dir: Direction,
    guide: &[Q],
    budget: usize,
) -> Result<Tightened, TrackError> {
    let mut tt = tighten(t, sigma, e, guide, budget)?;
    let f = tt.branch;
    if tt.track.classify_branch(f) != BranchKind::Large {
        return Err(TrackError::Unsupported(format!("tight subtrack branch {f} is not large in the ambient track")));
    }
    let rec = SplitRecord::new(f, dir);
    let next = moves::apply(&tt.track, rec)?;
    let sg = tt.sigma.after_split(&next, f)?;
    tt.guide = match moves::transport_transverse(&tt.track, &tt.guide, rec) {
        Ok(m) => m,
        Err(_) => tt.guide.clone(),
    };
    tt.track = next;
    tt.sigma = sg;
    tt.records.push(rec);
    tt.complexity_trace.push(tt.sigma.complexity());
    Ok(tt)
}

/// Which split directions at a large branch keep the completeness
/// surrogate.
pub fn complete_directions(t: &TrainTrack, e: BranchId) -> Result<Vec<Direction>, TrackError> {
    let mut out = Vec::new();
    for d in [Direction::Right, Direction::Left] {
        let (s, _) = moves::split(t, e, d)?;
        if completeness_surrogate(&s).all() {
            out.push(d);
        }
    }
    Ok(out)
}

/// A large branch is rigid when the collision there is not recurrent.
pub fn is_rigid(t: &TrainTrack, e: BranchId) -> Result<bool, TrackError> {
    let (c, _) = moves::collide(t, e, Direction::Right)?;
    Ok(positive_transverse(&c).is_none())
}

/// Splits at rigid large branches (in their unique complete direction)
/// until none is left. Returns the final track and the records.
pub fn normalize_rigid(t: &TrainTrack, budget: usize) -> Result<(TrainTrack, Vec<SplitRecord>), TrackError> {
    let mut cur = t.clone();
    let mut recs = Vec::new();
    loop {
        let mut found = None;
        for e in cur.large_branches() {
            if is_rigid(&cur, e)? {
                found = Some(e);
                break;
            }
        }
        let Some(e) = found else { break };
        if recs.len() >= budget {
            return Err(TrackError::Budget(format!("rigid normalization exceeded {budget} splits")));
        }
        let dirs = complete_directions(&cur, e)?;
        let d = match dirs.as_slice() {
            [d] => *d,
            _ => return Err(TrackError::Invariant(format!("rigid branch {e} has {} complete directions", dirs.len()))),
        };
        let rec = SplitRecord::new(e, d);
        cur = moves::apply(&cur, rec)?;
        recs.push(rec);
    }
    Ok((cur, recs))
}

/// Guide-directed sequence of a given length, always splitting the
/// smallest large label whose guide direction is not a collision.
pub fn guided_sequence(t: &TrainTrack, guide: &[Q], len: usize) -> Result<(SplittingSequence, Vec<Q>), TrackError> {
    let mut cur = t.clone();
    let mut mu = guide.to_vec();
    let mut recs = Vec::new();
    for _ in 0..len {
        let mut step = None;
        for e in cur.large_branches() {
            if !mu[e as usize].is_positive() {
                continue;
            }
            match moves::mu_direction(&cur, &mu, e)? {
                Direction::Collision => continue,
                d => {
                    step = Some(SplitRecord::new(e, d));
                    break;
                }
            }
        }
        let Some(r) = step else { break };
        mu = moves::transport_transverse(&cur, &mu, r)?;
        cur = moves::apply(&cur, r)?;
        recs.push(r);
    }
    Ok((SplittingSequence::new(t.clone(), recs), mu))
}

/// Breadth-first search for a splitting sequence from `from` to `to`,
/// trying labels in increasing order and Right before Left. A sequence
/// reaching `to` with identical labels is preferred; otherwise the shortest
/// sequence reaching an isomorphic track is returned. `None` when neither
/// exists within `max_len` splits.
pub fn find_splitting_sequence(
    from: &TrainTrack,
    to: &TrainTrack,
    max_len: usize,
) -> Result<Option<Vec<SplitRecord>>, TrackError> {
    if from.branch_count() != to.branch_count() || from.switch_count() != to.switch_count() {
        return Ok(None);
    }
    let exact = crate::io::write_track(to);
    if let Some(r) = bfs_sequence(from, max_len, &|t| crate::io::write_track(t) == exact)? {
        return Ok(Some(r));
    }
    let goal = crate::canonical::canonical_label(to);
    bfs_sequence(from, max_len, &|t| crate::canonical::canonical_label(t) == goal)
}

fn bfs_sequence(
    from: &TrainTrack,
    max_len: usize,
    hit: &dyn Fn(&TrainTrack) -> bool,
) -> Result<Option<Vec<SplitRecord>>, TrackError> {
    let mut seen: BTreeSet<String> = BTreeSet::from([crate::io::write_track(from)]);
    let mut queue: VecDeque<(TrainTrack, Vec<SplitRecord>)> = VecDeque::from([(from.clone(), vec![])]);
    while let Some((t, recs)) = queue.pop_front() {
        if hit(&t) {
            return Ok(Some(recs));
        }
        if recs.len() == max_len {
            continue;
        }
        for e in t.large_branches() {
            for d in [Direction::Right, Direction::Left] {
                let rec = SplitRecord::new(e, d);
                let next = moves::apply(&t, rec)?;
                if seen.insert(crate::io::write_track(&next)) {
                    let mut r = recs.clone();
                    r.push(rec);
                    queue.push_back((next, r));
                }
            }
        }
    }
    Ok(None)
}

/// Number of guide-weight zero entries; useful to check positivity after
/// transport.
pub fn zero_weights(t: &TrainTrack, mu: &[Q]) -> usize {
    t.branch_ids().filter(|&b| mu[b as usize].is_zero()).count()
}

/// Histogram of vertex depths.
pub fn depth_histogram(strip: &FlatStrip) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for v in &strip.vertices {
        *h.entry(v.depth).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drop_first_removes_one_record() {
        let r = |s, d| SplitRecord::new(s, d);
        let res = vec![r(3, Direction::Right), r(5, Direction::Left), r(3, Direction::Left)];
        assert_eq!(drop_first(&res, 3), vec![r(5, Direction::Left), r(3, Direction::Left)]);
        assert_eq!(drop_first(&res, 9), res);
    }

    #[test]
    fn phi_counts_labels() {
        let recs = [SplitRecord::new(1, Direction::Right), SplitRecord::new(1, Direction::Left), SplitRecord::new(0, Direction::Right)];
        assert_eq!(phi_of(3, &recs), vec![1, 2, 0]);
    }
}
