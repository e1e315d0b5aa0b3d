//! Cube complexes spanned by flat strips, vertex links and the flag test.
//!
//! A cube is a base vertex together with a set of split labels. The
//! maximal extension contains a `k`-cube exactly when all of its
//! `(k-1)`-faces are present, starting from the edges of the strip.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use crate::error::TrackError;
use crate::rational::{decimal, Q};
use crate::strips::FlatStrip;
use crate::track::BranchId;

/// A cube: base vertex id and sorted direction labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub base: usize,
    pub dirs: Vec<BranchId>,
}

#[derive(Clone, Debug)]
pub struct CubicalComplex {
    pub phis: Vec<Vec<i64>>,
    /// `cubes[k]` lists the `k`-cubes.
    pub cubes: Vec<Vec<Cube>>,
    index: HashMap<Vec<i64>, usize>,
    present: HashSet<Cube>,
    /// Vertices whose whole star lies inside the enumerated region.
    pub complete: Vec<bool>,
}

fn shifted(phi: &[i64], dirs: &[BranchId], sign: i64) -> Vec<i64> {
    let mut p = phi.to_vec();
    for &d in dirs {
        p[d as usize] += sign;
    }
    p
}

impl CubicalComplex {
    /// Builds a complex from explicit cube lists. Used for hand-made
    /// complexes; no maximality is imposed.
    pub fn from_parts(phis: Vec<Vec<i64>>, cubes: Vec<Cube>) -> Self {
        let index = phis.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let mut by_dim: Vec<Vec<Cube>> = vec![vec![]];
        for i in 0..phis.len() {
            by_dim[0].push(Cube { base: i, dirs: vec![] });
        }
        for mut c in cubes {
            c.dirs.sort_unstable();
            let k = c.dirs.len();
            if k == 0 {
                continue;
            }
            while by_dim.len() <= k {
                by_dim.push(vec![]);
            }
            by_dim[k].push(c);
        }
        for v in by_dim.iter_mut() {
            v.sort();
            v.dedup();
        }
        let present = by_dim.iter().flatten().cloned().collect();
        let complete = vec![true; phis.len()];
        CubicalComplex { phis, cubes: by_dim, index, present, complete }
    }

    pub fn vertex_of(&self, phi: &[i64]) -> Option<usize> {
        self.index.get(phi).copied()
    }

    pub fn has_cube(&self, c: &Cube) -> bool {
        self.present.contains(c)
    }

    pub fn max_dimension(&self) -> usize {
        self.cubes.iter().rposition(|v| !v.is_empty()).unwrap_or(0)
    }

    /// Text export, one line per cube of positive dimension.
    pub fn export(&self) -> String {
        let mut s = String::new();
        for (k, list) in self.cubes.iter().enumerate().skip(1) {
            for c in list {
                let d: Vec<String> = c.dirs.iter().map(|x| x.to_string()).collect();
                s.push_str(&format!("cube {k} {} {}\n", c.base, d.join(",")));
            }
        }
        s
    }

    /// Counts of cubes per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.cubes.iter().map(|v| v.len()).collect()
    }
}

/// The maximal cube complex of a strip. Truncated strips are accepted only
/// with `accept_truncated`; their vertices near the cap are marked
/// incomplete so that link checks can skip them.
pub fn build_complex(strip: &FlatStrip, accept_truncated: bool) -> Result<CubicalComplex, TrackError> {
    if strip.truncated && !accept_truncated {
        return Err(TrackError::Precondition("strip is truncated; pass the acceptance flag to build anyway".into()));
    }
    let phis: Vec<Vec<i64>> = strip.vertices.iter().map(|v| v.phi.clone()).collect();
    let index: HashMap<Vec<i64>, usize> = strip.index.clone();
    let mut up: Vec<Vec<BranchId>> = vec![vec![]; phis.len()];
    for e in &strip.edges {
        up[e.from].push(e.record.slot);
    }
    for u in up.iter_mut() {
        u.sort_unstable();
        u.dedup();
    }
    let mut by_dim: Vec<Vec<Cube>> = vec![(0..phis.len()).map(|i| Cube { base: i, dirs: vec![] }).collect()];
    let mut present: HashSet<Cube> = by_dim[0].iter().cloned().collect();
    let mut k = 1;
    loop {
        let mut layer = Vec::new();
        for (v, dirs) in up.iter().enumerate() {
            if dirs.len() < k {
                continue;
            }
            for combo in combinations(dirs, k) {
                let ok = combo.iter().enumerate().all(|(i, &d)| {
                    let mut face: Vec<BranchId> = combo.clone();
                    face.remove(i);
                    let lower = Cube { base: v, dirs: face.clone() };
                    let upper_base = index.get(&shifted(&phis[v], &[d], 1)).copied();
                    present.contains(&lower)
                        && upper_base.is_some_and(|b| present.contains(&Cube { base: b, dirs: face }))
                });
                if ok {
                    layer.push(Cube { base: v, dirs: combo });
                }
            }
        }
        if layer.is_empty() {
            break;
        }
        present.extend(layer.iter().cloned());
        by_dim.push(layer);
        k += 1;
    }
    let complete = strip
        .vertices
        .iter()
        .map(|v| match (strip.radius, strip.truncated) {
            (Some(r), true) => !v.frontier && v.out_degree.map_or(v.depth <= r, |o| v.depth + o <= r),
            _ => true,
        })
        .collect();
    Ok(CubicalComplex { phis, cubes: by_dim, index, present, complete })
}

fn combinations(items: &[BranchId], k: usize) -> Vec<Vec<BranchId>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[BranchId], k: usize, start: usize, cur: &mut Vec<BranchId>, out: &mut Vec<Vec<BranchId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

/// A link vertex: `(label, +1)` for an edge leaving `v`, `(label, -1)` for
/// an edge arriving at `v`.
pub type LinkVertex = (BranchId, i8);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkComplex {
    pub vertex: usize,
    pub vertices: Vec<LinkVertex>,
    /// Simplices as sorted vertex lists, all dimensions, including the
    /// vertices themselves.
    pub simplices: BTreeSet<Vec<LinkVertex>>,
}

impl LinkComplex {
    pub fn edges(&self) -> Vec<(LinkVertex, LinkVertex)> {
        self.simplices.iter().filter(|s| s.len() == 2).map(|s| (s[0], s[1])).collect()
    }
}

/// The link of a vertex, read off the cubes containing it.
pub fn link(cx: &CubicalComplex, v: usize) -> LinkComplex {
    let phi = &cx.phis[v];
    let mut simplices = BTreeSet::new();
    for list in cx.cubes.iter().skip(1) {
        for c in list {
            let base = &cx.phis[c.base];
            // v = base + x_S for some S within the directions.
            let diff: Vec<i64> = phi.iter().zip(base).map(|(a, b)| a - b).collect();
            let mut ok = true;
            let mut simplex = Vec::with_capacity(c.dirs.len());
            for (i, &d) in diff.iter().enumerate() {
                let inside = c.dirs.binary_search(&(i as BranchId)).is_ok();
                if (d != 0 && !inside) || !(0..=1).contains(&d) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for &dir in &c.dirs {
                let sign = if diff[dir as usize] == 1 { -1 } else { 1 };
                simplex.push((dir, sign));
            }
            simplex.sort_unstable();
            simplices.insert(simplex);
        }
    }
    let vertices: Vec<LinkVertex> = simplices.iter().filter(|s| s.len() == 1).map(|s| s[0]).collect();
    LinkComplex { vertex: v, vertices, simplices }
}

/// True when every clique of the link's one-skeleton is a simplex.
pub fn is_flag(l: &LinkComplex) -> bool {
    let n = l.vertices.len();
    let pos: HashMap<LinkVertex, usize> = l.vertices.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut adj = vec![vec![false; n]; n];
    for (a, b) in l.edges() {
        let (i, j) = (pos[&a], pos[&b]);
        adj[i][j] = true;
        adj[j][i] = true;
    }
    // Extend cliques one vertex at a time, in increasing index order.
    let mut stack: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    while let Some(c) = stack.pop() {
        if c.len() >= 3 {
            let mut s: Vec<LinkVertex> = c.iter().map(|&i| l.vertices[i]).collect();
            s.sort_unstable();
            if !l.simplices.contains(&s) {
                return false;
            }
        }
        let last = *c.last().expect("nonempty clique");
        for j in last + 1..n {
            if c.iter().all(|&i| adj[i][j]) {
                let mut d = c.clone();
                d.push(j);
                stack.push(d);
            }
        }
    }
    true
}

/// Result of checking all links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagReport {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<usize>,
}

/// Checks the flag condition at every complete vertex.
pub fn check_links(cx: &CubicalComplex) -> FlagReport {
    let ids: Vec<usize> = (0..cx.phis.len()).filter(|&v| cx.complete[v]).collect();
    let failures: Vec<usize> = ids.par_iter().copied().filter(|&v| !is_flag(&link(cx, v))).collect();
    FlagReport { checked: ids.len(), skipped: cx.phis.len() - ids.len(), failures }
}

/// Quasi-isometry constants of the embedding, as exact squares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QiConstants {
    pub lower_sq: Q,
    pub upper_sq: Q,
}

impl QiConstants {
    /// Decimal renderings of the constants themselves (6 digits).
    pub fn decimals(&self) -> (String, String) {
        (sqrt_decimal(&self.lower_sq, 6), sqrt_decimal(&self.upper_sq, 6))
    }
}

/// Square root of a nonnegative rational, rounded to `digits` places.
pub fn sqrt_decimal(x: &Q, digits: u32) -> String {
    use num_bigint::BigInt;
    let scale = BigInt::from(10u32).pow(2 * digits + 2);
    let scaled = (x * Q::from_integer(scale)).to_integer();
    let root = scaled.sqrt();
    decimal(&Q::new(root, BigInt::from(10u32).pow(digits + 1)), digits)
}

/// Ratios of strip graph distance to Euclidean distance of `phi`, over all
/// vertex pairs in one connected strip.
pub fn qi_constants(strip: &FlatStrip) -> Result<QiConstants, TrackError> {
    let n = strip.len();
    if n < 2 {
        return Err(TrackError::Precondition("qi constants need at least two vertices".into()));
    }
    let adj = strip.adjacency();
    let per: Vec<Option<(Q, Q)>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let dist = strip.distances_from(u, &adj);
            let mut lo: Option<Q> = None;
            let mut hi: Option<Q> = None;
            for v in u + 1..n {
                let d = dist[v] as i64;
                let e2: i64 = strip.vertices[u].phi.iter().zip(&strip.vertices[v].phi).map(|(a, b)| (a - b) * (a - b)).sum();
                let r = Q::new((d * d).into(), e2.into());
                if lo.as_ref().map_or(true, |x| &r < x) {
                    lo = Some(r.clone());
                }
                if hi.as_ref().map_or(true, |x| &r > x) {
                    hi = Some(r);
                }
            }
            lo.zip(hi)
        })
        .collect();
    let mut lower_sq: Option<Q> = None;
    let mut upper_sq: Option<Q> = None;
    for (lo, hi) in per.into_iter().flatten() {
        if lower_sq.as_ref().map_or(true, |x| &lo < x) {
            lower_sq = Some(lo);
        }
        if upper_sq.as_ref().map_or(true, |x| &hi > x) {
            upper_sq = Some(hi);
        }
    }
    Ok(QiConstants { lower_sq: lower_sq.expect("pairs exist"), upper_sq: upper_sq.expect("pairs exist") })
}

/// For every label and threshold, the vertices with `phi[label] >= s`
/// induce a connected subgraph. Returns the first failing pair.
pub fn superlevel_sets_connected(strip: &FlatStrip) -> Option<(BranchId, i64)> {
    let adj = strip.adjacency();
    for i in 0..strip.dim {
        let max = strip.vertices.iter().map(|v| v.phi[i]).max().unwrap_or(0);
        for s in 1..=max {
            let members: Vec<usize> = (0..strip.len()).filter(|&v| strip.vertices[v].phi[i] >= s).collect();
            let Some(&start) = members.first() else { continue };
            let mut seen = HashSet::from([start]);
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if strip.vertices[w].phi[i] >= s && seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            if seen.len() != members.len() {
                return Some((i as BranchId, s));
            }
        }
    }
    None
}

/// Fixed-field summary of a complex.
pub fn stats_line(strip: &FlatStrip, cx: &CubicalComplex) -> String {
    let f: Vec<String> = cx.f_vector().iter().map(|x| x.to_string()).collect();
    let flags = check_links(cx);
    format!(
        "vertices={} edges={} truncated={} max_cube_dim={} f_vector={} links_checked={} links_flag={}",
        strip.len(),
        strip.edges.len(),
        u8::from(strip.truncated),
        cx.max_dimension(),
        f.join(","),
        flags.checked,
        u8::from(flags.failures.is_empty())
    )
}
