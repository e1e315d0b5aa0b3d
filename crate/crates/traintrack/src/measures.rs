//! Transverse and tangential measures and their exact feasibility problems.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::error::TrackError;
use crate::lp::{self, Cmp, Lp, Outcome, Row};
use crate::rational::{q, Q};
use crate::track::{Region, TrainTrack};

/// Weights indexed by branch label. Entries at dead labels are zero.
pub type Weights = Vec<Q>;

/// One linear constraint on branch weights, with coefficients keyed by branch
/// label.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    pub coeffs: Vec<(u32, Q)>,
}

impl LinearForm {
    pub fn eval(&self, w: &[Q]) -> Q {
        self.coeffs.iter().fold(Q::zero(), |acc, (b, c)| acc + c * &w[*b as usize])
    }
}

/// Switch conditions, one form per switch: side A minus side B.
pub fn switch_forms(t: &TrainTrack) -> Vec<LinearForm> {
    t.switch_ids()
        .map(|s| {
            let sw = t.switch(s);
            let mut acc = std::collections::BTreeMap::<u32, Q>::new();
            for h in &sw.sides[0] {
                *acc.entry(h.branch).or_insert_with(Q::zero) += q(1);
            }
            for h in &sw.sides[1] {
                *acc.entry(h.branch).or_insert_with(Q::zero) -= q(1);
            }
            LinearForm { coeffs: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
        })
        .collect()
}

/// Tangential region constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionForms {
    /// Forms required to vanish (bigon side differences).
    pub equalities: Vec<LinearForm>,
    /// Forms required to be nonnegative: for each side of an unpunctured
    /// region with at least three cusps, the other sides minus that side.
    pub inequalities: Vec<LinearForm>,
}

fn side_form(r: &Region, sign_of: impl Fn(usize) -> i64) -> LinearForm {
    let mut acc = std::collections::BTreeMap::<u32, Q>::new();
    for (i, side) in r.sides().iter().enumerate() {
        let sg = sign_of(i);
        for d in side {
            *acc.entry(d.branch).or_insert_with(Q::zero) += q(sg);
        }
    }
    LinearForm { coeffs: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
}

/// Builds the tangential constraints from traced regions, counting each
/// branch with its multiplicity along a side.
pub fn region_forms(t: &TrainTrack) -> RegionForms {
    let mut equalities = Vec::new();
    let mut inequalities = Vec::new();
    for r in t.regions() {
        if r.punctured {
            continue;
        }
        let k = r.cusps();
        if k == 2 {
            equalities.push(side_form(&r, |i| if i == 0 { 1 } else { -1 }));
        } else if k >= 3 {
            for j in 0..k {
                inequalities.push(side_form(&r, |i| if i == j { -1 } else { 1 }));
            }
        }
    }
    RegionForms { equalities, inequalities }
}

/// True iff `mu` is nonnegative and satisfies every switch condition.
pub fn is_transverse(t: &TrainTrack, mu: &[Q]) -> bool {
    mu.len() >= t.branch_capacity()
        && t.branch_ids().all(|b| !mu[b as usize].is_negative())
        && switch_forms(t).iter().all(|f| f.eval(mu).is_zero())
}

/// True iff `nu` is nonnegative and satisfies the tangential constraints,
/// with strict polygon inequalities when `strict` is set.
pub fn is_tangential(t: &TrainTrack, nu: &[Q], strict: bool) -> bool {
    if nu.len() < t.branch_capacity() || t.branch_ids().any(|b| nu[b as usize].is_negative()) {
        return false;
    }
    let f = region_forms(t);
    f.equalities.iter().all(|e| e.eval(nu).is_zero())
        && f.inequalities.iter().all(|e| {
            let v = e.eval(nu);
            if strict {
                v.is_positive()
            } else {
                !v.is_negative()
            }
        })
}

pub fn is_positive(t: &TrainTrack, w: &[Q]) -> bool {
    t.branch_ids().all(|b| w.get(b as usize).is_some_and(|x| x.is_positive()))
}

/// Column index of each live branch in the LP.
fn columns(t: &TrainTrack) -> (Vec<u32>, Vec<usize>) {
    let ids: Vec<u32> = t.branch_ids().collect();
    let mut col = vec![usize::MAX; t.branch_capacity()];
    for (i, &b) in ids.iter().enumerate() {
        col[b as usize] = i;
    }
    (ids, col)
}

/// Rows expressing `form(x) (cmp) rhs` under the substitution `x = 1 + y`.
fn shifted_row(form: &LinearForm, col: &[usize], cmp: Cmp, extra: Option<(usize, Q)>) -> Row {
    let mut coeffs: Vec<(usize, Q)> = form.coeffs.iter().map(|(b, c)| (col[*b as usize], c.clone())).collect();
    let constant: Q = form.coeffs.iter().fold(Q::zero(), |acc, (_, c)| acc + c);
    if let Some(e) = extra {
        coeffs.push(e);
    }
    Row::new(coeffs, cmp, -constant)
}

fn unshift(ids: &[u32], cap: usize, y: &[Q]) -> Weights {
    let mut w = vec![Q::zero(); cap];
    for (i, &b) in ids.iter().enumerate() {
        w[b as usize] = &y[i] + Q::one();
    }
    w
}

/// A strictly positive transverse measure, if one exists. Solves
/// `{ A x = 0, x >= 1 }` exactly.
pub fn positive_transverse(t: &TrainTrack) -> Option<Weights> {
    let (ids, col) = columns(t);
    let rows: Vec<Row> = switch_forms(t).iter().map(|f| shifted_row(f, &col, Cmp::Eq, None)).collect();
    lp::feasible_point(ids.len(), rows).map(|y| unshift(&ids, t.branch_capacity(), &y))
}

/// A strictly positive tangential measure, if one exists. In strict mode a
/// shared slack `s <= 1` is added to every polygon inequality and maximized;
/// the witness is returned only when the optimum is positive.
pub fn positive_tangential(t: &TrainTrack, strict: bool) -> Option<Weights> {
    let (ids, col) = columns(t);
    let n = ids.len();
    let forms = region_forms(t);
    let mut rows: Vec<Row> = forms.equalities.iter().map(|f| shifted_row(f, &col, Cmp::Eq, None)).collect();
    let slack = n;
    for f in &forms.inequalities {
        let extra = if strict { Some((slack, q(-1))) } else { None };
        rows.push(shifted_row(f, &col, Cmp::Ge, extra));
    }
    if strict {
        rows.push(Row::new(vec![(slack, q(1))], Cmp::Le, q(1)));
        let out = lp::solve(&Lp { vars: n + 1, rows, objective: vec![(slack, q(1))] });
        match out {
            Outcome::Optimal { x, value } if value.is_positive() => Some(unshift(&ids, t.branch_capacity(), &x[..n])),
            _ => None,
        }
    } else {
        lp::feasible_point(n, rows).map(|y| unshift(&ids, t.branch_capacity(), &y))
    }
}

/// The subtrack of branches with positive weight.
pub fn positive_subtrack(t: &TrainTrack, mu: &[Q]) -> Result<TrainTrack, TrackError> {
    if !switch_forms(t).iter().all(|f| f.eval(mu).is_zero()) {
        return Err(TrackError::Measure("weights violate a switch condition".into()));
    }
    let keep: BTreeSet<u32> = t.branch_ids().filter(|&b| mu[b as usize].is_positive()).collect();
    if keep.is_empty() {
        return Err(TrackError::Measure("measure has empty support".into()));
    }
    t.subtrack(&keep)
}

/// Checkable stand-in for completeness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurrogateReport {
    pub maximal: bool,
    pub generic: bool,
    pub recurrent: bool,
    pub transversely_recurrent: bool,
}

impl SurrogateReport {
    pub fn all(&self) -> bool {
        self.maximal && self.generic && self.recurrent && self.transversely_recurrent
    }
}

impl std::fmt::Display for SurrogateReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "surrogate maximal={} generic={} recurrent={} transversely_recurrent={}",
            u8::from(self.maximal),
            u8::from(self.generic),
            u8::from(self.recurrent),
            u8::from(self.transversely_recurrent)
        )
    }
}

/// Maximal means every region is a trigon or a punctured monogon and the
/// track has no bigons.
pub fn is_maximal(t: &TrainTrack) -> bool {
    let regions = t.regions();
    !regions.is_empty()
        && regions.iter().all(|r| (r.is_trigon() && !r.punctured) || r.is_punctured_monogon())
        && t.components().len() == 1
}

pub fn completeness_surrogate(t: &TrainTrack) -> SurrogateReport {
    SurrogateReport {
        maximal: is_maximal(t),
        generic: t.is_generic(),
        recurrent: positive_transverse(t).is_some(),
        transversely_recurrent: positive_tangential(t, false).is_some(),
    }
}

/// Scales a weight vector by a rational.
pub fn scale(w: &[Q], f: &Q) -> Weights {
    w.iter().map(|x| x * f).collect()
}

/// Pads a weight vector with zeros up to `len`.
pub fn padded(w: &[Q], len: usize) -> Weights {
    let mut v = w.to_vec();
    if v.len() < len {
        v.resize(len, Q::zero());
    }
    v
}

/// A random strictly positive transverse measure: a positive combination of
/// optima of `{ A x = 0, 1 <= x <= cap }` under random objectives. Ties
/// among weights become unlikely as `rounds` grows.
pub fn random_positive_transverse<R: rand::Rng>(t: &TrainTrack, rng: &mut R, rounds: usize, cap: i64) -> Option<Weights> {
    let (ids, col) = columns(t);
    let n = ids.len();
    let mut base: Vec<Row> = switch_forms(t).iter().map(|f| shifted_row(f, &col, Cmp::Eq, None)).collect();
    for i in 0..n {
        base.push(Row::new(vec![(i, q(1))], Cmp::Le, q(cap - 1)));
    }
    let mut acc = vec![Q::zero(); t.branch_capacity()];
    for _ in 0..rounds.max(1) {
        let objective: Vec<(usize, Q)> = (0..n).map(|i| (i, q(rng.gen_range(-5..=5)))).collect();
        let out = lp::solve(&Lp { vars: n, rows: base.clone(), objective });
        let y = out.point()?;
        let w = unshift(&ids, t.branch_capacity(), y);
        let c = q(rng.gen_range(1..=7));
        for b in t.branch_ids() {
            acc[b as usize] += &c * &w[b as usize];
        }
    }
    Some(acc)
}

/// A random integral transverse measure with every live weight in
/// `[lo, hi]`. Branches are fixed one at a time in random order to a random
/// value that keeps the remaining system feasible. `None` when no such
/// measure exists.
pub fn random_integral_transverse<R: rand::Rng>(t: &TrainTrack, rng: &mut R, lo: i64, hi: i64) -> Option<Weights> {
    use rand::seq::SliceRandom;
    let (ids, col) = columns(t);
    let n = ids.len();
    let mut rows: Vec<Row> = switch_forms(t)
        .iter()
        .map(|f| Row::new(f.coeffs.iter().map(|(b, c)| (col[*b as usize], c.clone())).collect(), Cmp::Eq, Q::zero()))
        .collect();
    for i in 0..n {
        rows.push(Row::new(vec![(i, q(1))], Cmp::Ge, q(lo)));
        rows.push(Row::new(vec![(i, q(1))], Cmp::Le, q(hi)));
    }
    lp::feasible_point(n, rows.clone())?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in order {
        let mut values: Vec<i64> = (lo..=hi).collect();
        values.shuffle(rng);
        let chosen = values.into_iter().find(|&v| {
            let mut trial = rows.clone();
            trial.push(Row::new(vec![(i, q(1))], Cmp::Eq, q(v)));
            lp::feasible_point(n, trial).is_some()
        })?;
        rows.push(Row::new(vec![(i, q(1))], Cmp::Eq, q(chosen)));
    }
    let x = lp::feasible_point(n, rows)?;
    let mut w = vec![Q::zero(); t.branch_capacity()];
    for (i, &b) in ids.iter().enumerate() {
        w[b as usize] = x[i].clone();
    }
    Some(w)
}

/// Scales a positive rational vector to integers with every live weight at
/// least `floor`.
pub fn integral_at_least(t: &TrainTrack, w: &[Q], floor: i64) -> Weights {
    let lcm = t
        .branch_ids()
        .fold(num_bigint::BigInt::from(1), |acc, b| num_integer::Integer::lcm(&acc, w[b as usize].denom()));
    let scaled: Vec<Q> = w.iter().map(|x| x * Q::from_integer(lcm.clone())).collect();
    let min = t.branch_ids().map(|b| scaled[b as usize].clone()).min().unwrap_or_else(|| q(1));
    let f = q(floor);
    let factor = if min >= f || !min.is_positive() { q(1) } else { (f / min).ceil() };
    scaled.iter().map(|x| x * &factor).collect()
}
