#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use traintrack::catalog;
use traintrack::moves::{self, Direction, SplitRecord};
use traintrack::{HalfBranch, Q, Side, Surface, TrainTrack};

pub struct Entry {
    pub name: &'static str,
    pub surface: Surface,
    pub track: TrainTrack,
    pub guide: Vec<Q>,
}

pub fn catalog_entries() -> Vec<Entry> {
    catalog::NAMES
        .iter()
        .map(|&name| {
            let (track, guide) = catalog::load(name).expect("catalog entry loads");
            Entry { name, surface: catalog::surface_of(name).expect("known surface"), track, guide }
        })
        .collect()
}

/// Planted connectors listed in the header comment of a catalog entry.
pub fn planted_connectors(name: &str) -> Vec<(u32, u32)> {
    let text = std::fs::read_to_string(catalog::catalog_dir().join(format!("{name}.trk"))).unwrap();
    let header = text.lines().next().unwrap();
    let list = header.split("(large/small)").nth(1).unwrap();
    list.split_whitespace()
        .map(|p| {
            let (l, s) = p.split_once('/').unwrap();
            (l.parse().unwrap(), s.parse().unwrap())
        })
        .collect()
}

/// A random walk of `len` splits with uniformly chosen large branch and
/// direction.
pub fn random_walk<R: Rng>(t: &TrainTrack, len: usize, rng: &mut R) -> (TrainTrack, Vec<SplitRecord>) {
    let mut cur = t.clone();
    let mut recs = Vec::new();
    for _ in 0..len {
        let large = cur.large_branches();
        let Some(&e) = large.choose(rng) else { break };
        let d = if rng.gen_bool(0.5) { Direction::Right } else { Direction::Left };
        let rec = SplitRecord::new(e, d);
        cur = moves::apply(&cur, rec).unwrap();
        recs.push(rec);
    }
    (cur, recs)
}

/// Switch conditions of a track as integer rows over all branch labels,
/// written independently of the library: at every switch the half-branches
/// of side a weigh as much as those of side b.
pub fn switch_rows(t: &TrainTrack) -> Vec<Vec<i64>> {
    let n = t.branch_capacity();
    t.switch_ids()
        .map(|s| {
            let mut row = vec![0i64; n];
            let sw = t.switch(s);
            for h in sw.side(Side::A) {
                row[h.branch as usize] += 1;
            }
            for h in sw.side(Side::B) {
                row[h.branch as usize] -= 1;
            }
            row
        })
        .collect()
}

fn r(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Solves `m x = rhs` by exact elimination; `None` unless the solution is
/// unique.
fn solve_unique(mut m: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>, cols: usize) -> Option<Vec<BigRational>> {
    let rows = m.len();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let Some(p) = (pivot_row..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(pivot_row, p);
        rhs.swap(pivot_row, p);
        let inv = m[pivot_row][c].recip();
        for k in 0..cols {
            m[pivot_row][k] = &m[pivot_row][k] * &inv;
        }
        rhs[pivot_row] = &rhs[pivot_row] * &inv;
        for i in 0..rows {
            if i != pivot_row && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let v = &m[pivot_row][k] * &f;
                    m[i][k] -= v;
                }
                let v = &rhs[pivot_row] * &f;
                rhs[i] -= v;
            }
        }
        pivots.push(c);
        pivot_row += 1;
    }
    if pivots.len() < cols {
        return None;
    }
    if (pivot_row..rows).any(|i| !rhs[i].is_zero()) {
        return None;
    }
    Some((0..cols).map(|i| rhs[i].clone()).collect())
}

/// Vertices of `{w >= 0, rows w = 0, sum w = 1}` restricted to the labels in
/// `labels`, found by trying every support set.
pub fn vertices(rows: &[Vec<i64>], labels: &[usize]) -> Vec<Vec<(usize, BigRational)>> {
    let n = labels.len();
    assert!(n <= 16, "vertex enumeration is exponential");
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| labels[i]).collect();
        let mut m: Vec<Vec<BigRational>> = rows.iter().map(|row| support.iter().map(|&b| r(row[b])).collect()).collect();
        let mut rhs = vec![BigRational::zero(); rows.len()];
        m.push(vec![BigRational::one(); support.len()]);
        rhs.push(BigRational::one());
        if let Some(x) = solve_unique(m, rhs, support.len()) {
            if x.iter().all(|v| v.is_positive()) {
                out.push(support.into_iter().zip(x).collect());
            }
        }
    }
    out
}

/// Recurrence by vertex enumeration: a strictly positive solution exists
/// iff every branch is positive at some vertex of the normalized cone.
pub fn oracle_recurrent(t: &TrainTrack) -> bool {
    let labels: Vec<usize> = t.branch_ids().map(|b| b as usize).collect();
    let verts = vertices(&switch_rows(t), &labels);
    labels.iter().all(|b| verts.iter().any(|v| v.iter().any(|(l, _)| l == b)))
}

/// One-move neighbours of a track: every split, collision and shift that
/// applies.
pub fn one_move_neighbours(t: &TrainTrack) -> Vec<TrainTrack> {
    let mut out = Vec::new();
    for e in t.large_branches() {
        for d in [Direction::Right, Direction::Left] {
            out.push(moves::split(t, e, d).unwrap().0);
            if let Ok((c, _)) = moves::collide(t, e, d) {
                out.push(c);
            }
        }
    }
    for b in t.mixed_branches() {
        if let Ok((s, _)) = moves::shift(t, b) {
            out.push(s);
        }
    }
    out
}

/// Residual of the switch condition at one switch, computed from the raw
/// slot lists.
pub fn raw_residual(t: &TrainTrack, mu: &[Q], s: u32) -> Q {
    let sw = t.switch(s);
    let sum = |hs: &[HalfBranch]| hs.iter().fold(Q::zero(), |a, h| a + &mu[h.branch as usize]);
    sum(sw.side(Side::A)) - sum(sw.side(Side::B))
}

/// Elapsed seconds of a closure, with its result.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = std::time::Instant::now();
    let v = f();
    (v, start.elapsed().as_secs_f64())
}
