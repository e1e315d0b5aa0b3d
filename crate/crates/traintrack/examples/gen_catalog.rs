//! Regenerates the frozen seed catalog under `catalog/`.
//!
//! `a` tracks have the planted twist connectors as their only large
//! branches and ship a pants guide (a positive guide plus a large multiple
//! of every connector curve). `b` tracks allow arbitrary large branches and
//! ship a random generic guide.

use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use traintrack::catalog::{connector_curve, integral_guide, search, SearchSpec, Seed};
use traintrack::io::{write_track, write_weights};
use traintrack::measures::{integral_at_least, random_positive_transverse};
use traintrack::{BranchKind, Q, Surface};

fn find(spec: &SearchSpec, base_seed: u64) -> (u64, Seed) {
    (0..4096u64)
        .into_par_iter()
        .find_map_first(|i| {
            let seed = base_seed * 1_000_003 + i;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            search(spec, &mut rng, 20_000).map(|s| (seed, s))
        })
        .expect("search exhausted")
}

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../catalog");
    fs::create_dir_all(&root).unwrap();
    let surfaces = [("s05", Surface::new(0, 5)), ("s12", Surface::new(1, 2)), ("s20", Surface::new(2, 0))];
    for (si, (tag, surface)) in surfaces.iter().enumerate() {
        for (variant, only) in [("a", true), ("b", false)] {
            let spec = SearchSpec { surface: *surface, connectors: surface.complexity() as usize, connectors_only_large: only };
            let (seed, found) = find(&spec, 17 + si as u64 * 2 + u64::from(only));
            // Branch 7 is made large so that `split <entry> e7 R` is legal
            // on every entry.
            let swap = found.track.large_branches().into_iter().find(|_| found.track.classify_branch(7) != BranchKind::Large);
            let perm = |b: u32| match swap {
                Some(x) if b == x => 7,
                Some(x) if b == 7 => x,
                _ => b,
            };
            let t = &found.track.relabeled(&|s| s, &perm);
            let connectors: Vec<(u32, u32)> = found.connectors.iter().map(|&(l, s)| (perm(l), perm(s))).collect();
            let guide: Vec<Q> = if only {
                let mut g = integral_guide(t, 4).unwrap();
                for &(l, s) in &connectors {
                    let c = connector_curve(t, l, s);
                    for (x, y) in g.iter_mut().zip(c) {
                        *x += y * Q::from_integer(100.into());
                    }
                }
                g
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
                let w = random_positive_transverse(t, &mut rng, 6, 40).unwrap();
                integral_at_least(t, &w, 4)
            };
            let name = format!("{tag}-{variant}");
            let conn: Vec<String> = connectors.iter().map(|(l, s)| format!("{l}/{s}")).collect();
            let header = format!("# {name}: {surface}, search seed {seed}, planted connectors (large/small) {}\n", conn.join(" "));
            fs::write(root.join(format!("{name}.trk")), format!("{header}{}", write_track(t))).unwrap();
            fs::write(root.join(format!("{name}.gm")), format!("{header}{}", write_weights(t, &guide))).unwrap();
            println!("{name}: seed {seed}, {} branches", t.branch_count());
        }
    }
}
