mod common;

use std::collections::BTreeSet;

use traintrack::cubical::{build_complex, check_links, is_flag, link, qi_constants, sqrt_decimal, Cube, CubicalComplex};
use traintrack::rational::q;
use traintrack::strips::{enumerate_strip, EnumerateOptions, SplittingSequence, Target};
use traintrack::{Direction, SplitRecord};

fn guided(idx: usize, radius: usize) -> traintrack::strips::FlatStrip {
    let e = &common::catalog_entries()[idx];
    enumerate_strip(&e.track, &Target::Guide(e.guide.clone()), EnumerateOptions { radius: Some(radius), jobs: None }).unwrap()
}

#[test]
fn a_single_vertex_strip_is_one_point() {
    let e = &common::catalog_entries()[0];
    let strip = enumerate_strip(&e.track, &Target::Track(SplittingSequence::new(e.track.clone(), vec![])), EnumerateOptions::default())
        .unwrap();
    let cx = build_complex(&strip, false).unwrap();
    assert_eq!(cx.f_vector(), vec![1]);
    assert_eq!(cx.max_dimension(), 0);
    assert!(qi_constants(&strip).is_err());
}

#[test]
fn a_single_split_gives_an_isometric_edge() {
    let e = &common::catalog_entries()[0];
    let b = e.track.large_branches()[0];
    let seq = SplittingSequence::new(e.track.clone(), vec![SplitRecord::new(b, Direction::Right)]);
    let strip = enumerate_strip(&e.track, &Target::Track(seq), EnumerateOptions::default()).unwrap();
    let cx = build_complex(&strip, false).unwrap();
    assert_eq!(cx.f_vector(), vec![2, 1]);
    let qi = qi_constants(&strip).unwrap();
    assert_eq!((qi.lower_sq.clone(), qi.upper_sq.clone()), (q(1), q(1)));
    assert_eq!(qi.decimals(), ("1.000000".to_string(), "1.000000".to_string()));
}

#[test]
fn truncated_strips_need_the_flag() {
    let strip = guided(2, 3);
    assert!(strip.truncated);
    assert!(build_complex(&strip, false).is_err());
    assert!(build_complex(&strip, true).is_ok());
}

#[test]
fn cubes_are_closed_under_faces_and_edges_match_the_strip() {
    for idx in 0..6 {
        let strip = guided(idx, 4);
        let cx = build_complex(&strip, true).unwrap();
        for list in cx.cubes.iter().skip(1) {
            for c in list {
                for (i, _) in c.dirs.iter().enumerate() {
                    let mut rest = c.dirs.clone();
                    let d = rest.remove(i);
                    assert!(cx.has_cube(&Cube { base: c.base, dirs: rest.clone() }));
                    let mut phi = cx.phis[c.base].clone();
                    phi[d as usize] += 1;
                    let far = cx.vertex_of(&phi).expect("opposite face base is a vertex");
                    if !rest.is_empty() {
                        assert!(cx.has_cube(&Cube { base: far, dirs: rest }));
                    }
                }
            }
        }
        let strip_edges: BTreeSet<(usize, usize)> = strip.edges.iter().map(|e| (e.from, e.to)).collect();
        let cube_edges: BTreeSet<(usize, usize)> = cx.cubes[1]
            .iter()
            .map(|c| {
                let mut phi = cx.phis[c.base].clone();
                phi[c.dirs[0] as usize] += 1;
                (c.base, cx.vertex_of(&phi).unwrap())
            })
            .collect();
        assert_eq!(strip_edges, cube_edges, "entry {idx}");
        assert!(check_links(&cx).failures.is_empty(), "entry {idx}");
    }
}

#[test]
fn hollow_corner_is_not_flag() {
    // Three squares around the origin of Z^3 without the solid cube.
    let phis: Vec<Vec<i64>> = vec![
        vec![0, 0, 0],
        vec![1, 0, 0],
        vec![0, 1, 0],
        vec![0, 0, 1],
        vec![1, 1, 0],
        vec![1, 0, 1],
        vec![0, 1, 1],
    ];
    let sq = |dirs: Vec<u32>| Cube { base: 0, dirs };
    let mut cubes = vec![sq(vec![0, 1]), sq(vec![0, 2]), sq(vec![1, 2])];
    for (base, d) in [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 0), (2, 2), (3, 0), (3, 1)] {
        cubes.push(Cube { base, dirs: vec![d] });
    }
    let cx = CubicalComplex::from_parts(phis, cubes);
    let l = link(&cx, 0);
    assert_eq!(l.vertices.len(), 3);
    assert_eq!(l.edges().len(), 3);
    assert!(!is_flag(&l));
    assert_eq!(check_links(&cx).failures, vec![0]);
}

#[test]
fn square_roots_round_to_six_places() {
    assert_eq!(sqrt_decimal(&q(2), 6), "1.414214");
    assert_eq!(sqrt_decimal(&q(4), 6), "2.000000");
    assert_eq!(sqrt_decimal(&traintrack::rational::qf(1, 4), 3), "0.500");
}
