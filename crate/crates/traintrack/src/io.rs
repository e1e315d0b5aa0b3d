//! Line-oriented text formats.
//!
//! Track grammar, one record per line, `#` starts a comment:
//!
//! ```text
//! track bigons=<0|1>
//! sw <id> a:<half>[,<half>]* b:<half>[,<half>]*
//! br <id> <slot> <slot>
//! punct <region-index>
//! mark <branch> <+|->
//! ```
//!
//! A `<half>` is `<branch>.<end>` with `end` 0 or 1; a `<slot>` is
//! `<switch>.<a|b><pos>`. Branch lines repeat the information of the switch
//! lines and are cross-checked on parse. Region indices refer to the
//! deterministic region order of [`TrainTrack::regions`].
//!
//! Measures are lines `<branch> <num>/<den>` (or `<branch> <int>`); split
//! records are lines `split <branch> R|L|X`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::TrackError;
use crate::moves::{Direction, SplitRecord};
use crate::rational::Q;
use crate::track::{BranchId, Dart, HalfBranch, Side, SwitchId, TrainTrack};

fn side_char(s: Side) -> char {
    match s {
        Side::A => 'a',
        Side::B => 'b',
    }
}

/// Serializes a track.
pub fn write_track(t: &TrainTrack) -> String {
    let mut out = String::new();
    writeln!(out, "track bigons={}", u8::from(t.allows_bigons())).unwrap();
    for s in t.switch_ids() {
        let sw = t.switch(s);
        let fmt_side =
            |v: &[HalfBranch]| v.iter().map(|h| format!("{}.{}", h.branch, h.end)).collect::<Vec<_>>().join(",");
        writeln!(out, "sw {} a:{} b:{}", s, fmt_side(sw.side(Side::A)), fmt_side(sw.side(Side::B))).unwrap();
    }
    for b in t.branch_ids() {
        let s0 = t.slot(HalfBranch::new(b, 0));
        let s1 = t.slot(HalfBranch::new(b, 1));
        writeln!(
            out,
            "br {} {}.{}{} {}.{}{}",
            b,
            s0.switch,
            side_char(s0.side),
            s0.pos,
            s1.switch,
            side_char(s1.side),
            s1.pos
        )
        .unwrap();
    }
    if !t.punctures().is_empty() {
        let map = t.region_of_darts();
        let mut idx: Vec<usize> = t.punctures().iter().map(|d| map[d.index()]).collect();
        idx.sort();
        for i in idx {
            writeln!(out, "punct {i}").unwrap();
        }
    }
    for m in t.marks() {
        writeln!(out, "mark {} {}", m.branch, if m.forward { '+' } else { '-' }).unwrap();
    }
    out
}

fn perr(line: usize, column: usize, msg: impl Into<String>) -> TrackError {
    TrackError::Parse { line, column, msg: msg.into() }
}

/// Splits a line into whitespace separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_u32(tok: &str, line: usize, col: usize) -> Result<u32, TrackError> {
    tok.parse::<u32>().map_err(|_| perr(line, col, format!("expected a nonnegative integer, found `{tok}`")))
}

fn parse_half(tok: &str, line: usize, col: usize) -> Result<HalfBranch, TrackError> {
    let (b, e) = tok.split_once('.').ok_or_else(|| perr(line, col, format!("expected <branch>.<end>, found `{tok}`")))?;
    let b = parse_u32(b, line, col)?;
    let e = match e {
        "0" => 0,
        "1" => 1,
        _ => return Err(perr(line, col, format!("branch end must be 0 or 1, found `{e}`"))),
    };
    Ok(HalfBranch::new(b, e))
}

fn parse_side_list(tok: &str, prefix: &str, line: usize, col: usize) -> Result<Vec<HalfBranch>, TrackError> {
    let body = tok.strip_prefix(prefix).ok_or_else(|| perr(line, col, format!("expected `{prefix}` list")))?;
    if body.is_empty() {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    let mut c = col + prefix.len();
    for part in body.split(',') {
        out.push(parse_half(part, line, c)?);
        c += part.len() + 1;
    }
    Ok(out)
}

fn parse_slot(tok: &str, line: usize, col: usize) -> Result<(SwitchId, Side, usize), TrackError> {
    let (s, rest) = tok.split_once('.').ok_or_else(|| perr(line, col, format!("expected <switch>.<side><pos>, found `{tok}`")))?;
    let s = parse_u32(s, line, col)?;
    let mut chars = rest.chars();
    let side = match chars.next() {
        Some('a') => Side::A,
        Some('b') => Side::B,
        _ => return Err(perr(line, col, format!("expected side a or b in `{tok}`"))),
    };
    let pos = parse_u32(chars.as_str(), line, col)? as usize;
    Ok((s, side, pos))
}

/// Parses a track, cross-checking branch records against switch records.
pub fn parse_track(text: &str) -> Result<TrainTrack, TrackError> {
    let mut bigons = false;
    let mut switches = Vec::new();
    let mut branch_lines: Vec<(usize, usize, BranchId, [(SwitchId, Side, usize); 2])> = Vec::new();
    let mut puncts = Vec::new();
    let mut marks = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let toks = tokens(strip_comment(raw));
        let Some(&(c0, head)) = toks.first() else { continue };
        match head {
            "track" => {
                for &(c, t) in &toks[1..] {
                    match t {
                        "bigons=0" => bigons = false,
                        "bigons=1" => bigons = true,
                        _ => return Err(perr(ln, c, format!("unknown track attribute `{t}`"))),
                    }
                }
            }
            "sw" => {
                if toks.len() != 4 {
                    return Err(perr(ln, c0, "switch record needs: sw <id> a:<list> b:<list>"));
                }
                let id = parse_u32(toks[1].1, ln, toks[1].0)?;
                let a = parse_side_list(toks[2].1, "a:", ln, toks[2].0)?;
                let b = parse_side_list(toks[3].1, "b:", ln, toks[3].0)?;
                switches.push((id, a, b));
            }
            "br" => {
                if toks.len() != 4 {
                    return Err(perr(ln, c0, "branch record needs: br <id> <slot> <slot>"));
                }
                let id = parse_u32(toks[1].1, ln, toks[1].0)?;
                let s0 = parse_slot(toks[2].1, ln, toks[2].0)?;
                let s1 = parse_slot(toks[3].1, ln, toks[3].0)?;
                branch_lines.push((ln, c0, id, [s0, s1]));
            }
            "punct" => {
                if toks.len() != 2 {
                    return Err(perr(ln, c0, "puncture record needs: punct <region-index>"));
                }
                puncts.push((ln, toks[1].0, parse_u32(toks[1].1, ln, toks[1].0)? as usize));
            }
            "mark" => {
                if toks.len() != 3 {
                    return Err(perr(ln, c0, "mark record needs: mark <branch> <+|->"));
                }
                let b = parse_u32(toks[1].1, ln, toks[1].0)?;
                let fwd = match toks[2].1 {
                    "+" => true,
                    "-" => false,
                    t => return Err(perr(ln, toks[2].0, format!("expected + or -, found `{t}`"))),
                };
                marks.push((ln, c0, Dart::new(b, fwd)));
            }
            other => return Err(perr(ln, c0, format!("unknown record `{other}`"))),
        }
    }
    let last = text.lines().count().max(1);
    if switches.is_empty() {
        return Err(perr(last, 1, "no switch records"));
    }
    let ids: Vec<SwitchId> = switches.iter().map(|s| s.0).collect();
    let t = TrainTrack::from_switches(switches, bigons)?;
    for (ln, col, id, slots) in &branch_lines {
        if !t.has_branch(*id) {
            return Err(perr(*ln, *col, format!("branch {id} does not occur at any switch")));
        }
        for (end, &(s, side, pos)) in slots.iter().enumerate() {
            if !ids.contains(&s) {
                return Err(perr(*ln, *col, format!("dangling slot reference to switch {s}")));
            }
            let actual = t.slot(HalfBranch::new(*id, end as u8));
            if actual.switch != s || actual.side != side || actual.pos != pos {
                return Err(perr(*ln, *col, format!("branch {id} end {end} disagrees with switch records")));
            }
        }
    }
    if !branch_lines.is_empty() && branch_lines.len() != t.branch_count() {
        return Err(perr(last, 1, "branch records do not cover every branch"));
    }
    for &(ln, col, m) in &marks {
        if !t.has_branch(m.branch) {
            return Err(perr(ln, col, format!("mark on missing branch {}", m.branch)));
        }
    }
    let marks: Vec<Dart> = marks.into_iter().map(|m| m.2).collect();
    let regions = t.regions();
    let mut anchors = Vec::new();
    for (ln, col, i) in puncts {
        let r = regions.get(i).ok_or_else(|| perr(ln, col, format!("no region with index {i}")))?;
        anchors.push(r.darts[0]);
    }
    let t = t.with_punctures(&anchors).map_err(|e| perr(last, 1, e.to_string()))?;
    Ok(t.with_marks(&marks))
}

/// Formats a rational as `num/den`.
pub fn fmt_q(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Formats a rational with six decimals followed by the exact value.
pub fn fmt_q_decimal(q: &Q) -> String {
    format!("{} ({})", crate::rational::decimal(q, 6), fmt_q(q))
}

pub fn parse_q(tok: &str, line: usize, col: usize) -> Result<Q, TrackError> {
    let (n, d) = match tok.split_once('/') {
        Some((n, d)) => (n, d),
        None => (tok, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| perr(line, col, format!("bad numerator in `{tok}`")))?;
    let d: BigInt = d.parse().map_err(|_| perr(line, col, format!("bad denominator in `{tok}`")))?;
    if d.is_zero() {
        return Err(perr(line, col, "zero denominator"));
    }
    Ok(Q::new(n, d))
}

/// Serializes a weight vector indexed by branch label.
pub fn write_weights(t: &TrainTrack, w: &[Q]) -> String {
    let mut out = String::new();
    for b in t.branch_ids() {
        writeln!(out, "{} {}", b, fmt_q(&w[b as usize])).unwrap();
    }
    out
}

/// Parses a weight vector; missing branches default to zero.
pub fn parse_weights(text: &str) -> Result<Vec<Q>, TrackError> {
    let mut pairs = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let toks = tokens(strip_comment(raw));
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 2 {
            return Err(perr(ln, toks[0].0, "measure record needs: <branch> <num>/<den>"));
        }
        let b = parse_u32(toks[0].1, ln, toks[0].0)?;
        let q = parse_q(toks[1].1, ln, toks[1].0)?;
        pairs.push((b as usize, q));
    }
    let n = pairs.iter().map(|p| p.0 + 1).max().unwrap_or(0);
    let mut w = vec![Q::zero(); n];
    for (b, q) in pairs {
        w[b] = q;
    }
    Ok(w)
}

pub fn write_split(r: &SplitRecord) -> String {
    let d = match r.direction {
        Direction::Right => 'R',
        Direction::Left => 'L',
        Direction::Collision => 'X',
    };
    format!("split {} {}", r.slot, d)
}

pub fn parse_splits(text: &str) -> Result<Vec<SplitRecord>, TrackError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let toks = tokens(strip_comment(raw));
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 3 || toks[0].1 != "split" {
            return Err(perr(ln, toks[0].0, "split record needs: split <branch> R|L|X"));
        }
        let slot = parse_u32(toks[1].1, ln, toks[1].0)?;
        let direction = match toks[2].1 {
            "R" => Direction::Right,
            "L" => Direction::Left,
            "X" => Direction::Collision,
            t => return Err(perr(ln, toks[2].0, format!("expected R, L or X, found `{t}`"))),
        };
        out.push(SplitRecord { slot, direction });
    }
    Ok(out)
}

/// Exact integer check used by guide parsing.
pub fn is_integral(q: &Q) -> bool {
    q.denom().is_one()
}
