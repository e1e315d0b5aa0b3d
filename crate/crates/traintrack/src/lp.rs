//! Exact two-phase simplex over the rationals with Bland's anti-cycling rule.
//!
//! Problems are stated over nonnegative variables `x >= 0` with rows of the
//! form `a . x (<=|=|>=) b` and a linear objective to maximize.

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<(usize, Q)>,
    pub cmp: Cmp,
    pub rhs: Q,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, Q)>, cmp: Cmp, rhs: Q) -> Self {
        Row { coeffs, cmp, rhs }
    }
}

/// A linear program `max c.x` subject to rows and `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct Lp {
    pub vars: usize,
    pub rows: Vec<Row>,
    pub objective: Vec<(usize, Q)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

impl Outcome {
    pub fn point(&self) -> Option<&[Q]> {
        match self {
            Outcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    obj: Vec<Q>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        if !piv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
        }
        let prow: Vec<(usize, Q)> =
            self.rows[r].iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect();
        let elim = |row: &mut Vec<Q>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for (j, v) in &prow {
                row[*j] -= &f * v;
            }
        };
        for i in 0..self.rows.len() {
            if i != r {
                elim(&mut self.rows[i]);
            }
        }
        elim(&mut self.obj);
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the current objective row, restricted to
    /// columns in `allowed`. Returns false when unbounded.
    fn run(&mut self, allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let enter = (0..self.cols).find(|&j| allowed(j) && self.obj[j].is_positive());
            let Some(c) = enter else { return true };
            let mut best: Option<(Q, usize, usize)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((br, bb, _)) => ratio < *br || (ratio == *br && self.basis[i] < *bb),
                    };
                    if better {
                        best = Some((ratio, self.basis[i], i));
                    }
                }
            }
            let Some((_, _, r)) = best else { return false };
            self.pivot(r, c);
        }
    }
}

/// Solves the program exactly.
pub fn solve(lp: &Lp) -> Outcome {
    let n = lp.vars;
    let m = lp.rows.len();
    // Column layout: structural, then one slack/surplus per inequality row,
    // then one artificial per row that needs one.
    let mut slack_of = vec![None; m];
    let mut art_of = vec![None; m];
    let mut cols = n;
    let mut norm: Vec<(Vec<(usize, Q)>, Cmp, Q)> = Vec::with_capacity(m);
    for row in &lp.rows {
        let (coeffs, cmp, rhs) = if row.rhs.is_negative() {
            let flipped = match row.cmp {
                Cmp::Le => Cmp::Ge,
                Cmp::Ge => Cmp::Le,
                Cmp::Eq => Cmp::Eq,
            };
            (row.coeffs.iter().map(|(j, v)| (*j, -v)).collect(), flipped, -&row.rhs)
        } else {
            (row.coeffs.clone(), row.cmp, row.rhs.clone())
        };
        norm.push((coeffs, cmp, rhs));
    }
    for (i, (_, cmp, _)) in norm.iter().enumerate() {
        if *cmp != Cmp::Eq {
            slack_of[i] = Some(cols);
            cols += 1;
        }
    }
    let first_art = cols;
    for (i, (_, cmp, _)) in norm.iter().enumerate() {
        if *cmp != Cmp::Le {
            art_of[i] = Some(cols);
            cols += 1;
        }
    }
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, (coeffs, cmp, rhs)) in norm.into_iter().enumerate() {
        let mut r = vec![Q::zero(); cols + 1];
        for (j, v) in coeffs {
            r[j] += v;
        }
        match cmp {
            Cmp::Le => {
                r[slack_of[i].expect("slack")] = Q::one();
                basis.push(slack_of[i].expect("slack"));
            }
            Cmp::Ge => {
                r[slack_of[i].expect("surplus")] = -Q::one();
                r[art_of[i].expect("art")] = Q::one();
                basis.push(art_of[i].expect("art"));
            }
            Cmp::Eq => {
                r[art_of[i].expect("art")] = Q::one();
                basis.push(art_of[i].expect("art"));
            }
        }
        r[cols] = rhs;
        rows.push(r);
    }
    // Phase one: maximize minus the sum of artificials.
    let mut obj = vec![Q::zero(); cols + 1];
    for (i, r) in rows.iter().enumerate() {
        if basis[i] >= first_art {
            for j in 0..=cols {
                if j < first_art || j == cols {
                    obj[j] += &r[j];
                }
            }
        }
    }
    let mut tab = Tableau { rows, obj, basis, cols };
    tab.run(&|_| true);
    if tab.obj[cols].is_positive() {
        return Outcome::Infeasible;
    }
    // Drive remaining artificials out of the basis or drop redundant rows.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= first_art {
            if let Some(c) = (0..first_art).find(|&j| !tab.rows[i][j].is_zero()) {
                tab.pivot(i, c);
                i += 1;
            } else {
                tab.rows.remove(i);
                tab.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    // Phase two.
    let mut c = vec![Q::zero(); cols + 1];
    for (j, v) in &lp.objective {
        c[*j] += v;
    }
    let mut obj = c.clone();
    for (i, r) in tab.rows.iter().enumerate() {
        let cb = &c[tab.basis[i]];
        if !cb.is_zero() {
            for j in 0..=cols {
                if !r[j].is_zero() {
                    obj[j] -= cb * &r[j];
                }
            }
        }
    }
    tab.obj = obj;
    if !tab.run(&|j| j < first_art) {
        return Outcome::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[i][cols].clone();
        }
    }
    let value = lp.objective.iter().fold(Q::zero(), |acc, (j, v)| acc + v * &x[*j]);
    Outcome::Optimal { x, value }
}

/// Feasibility only: a point satisfying every row, or `None`.
pub fn feasible_point(vars: usize, rows: Vec<Row>) -> Option<Vec<Q>> {
    match solve(&Lp { vars, rows, objective: vec![] }) {
        Outcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn small_maximization() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6
        let lp = Lp {
            vars: 2,
            rows: vec![
                Row::new(vec![(0, q(1)), (1, q(2))], Cmp::Le, q(4)),
                Row::new(vec![(0, q(3)), (1, q(1))], Cmp::Le, q(6)),
            ],
            objective: vec![(0, q(1)), (1, q(1))],
        };
        match solve(&lp) {
            Outcome::Optimal { x, value } => {
                assert_eq!(x, vec![qf(8, 5), qf(6, 5)]);
                assert_eq!(value, qf(14, 5));
            }
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let inf = Lp { vars: 1, rows: vec![Row::new(vec![(0, q(1))], Cmp::Ge, q(2)), Row::new(vec![(0, q(1))], Cmp::Le, q(1))], objective: vec![] };
        assert_eq!(solve(&inf), Outcome::Infeasible);
        let unb = Lp { vars: 1, rows: vec![Row::new(vec![(0, q(1))], Cmp::Ge, q(2))], objective: vec![(0, q(1))] };
        assert_eq!(solve(&unb), Outcome::Unbounded);
    }

    #[test]
    fn equality_with_redundant_row() {
        let rows = vec![
            Row::new(vec![(0, q(1)), (1, q(-1))], Cmp::Eq, q(0)),
            Row::new(vec![(0, q(2)), (1, q(-2))], Cmp::Eq, q(0)),
            Row::new(vec![(0, q(1))], Cmp::Ge, q(3)),
        ];
        let x = feasible_point(2, rows).expect("feasible");
        assert_eq!(x[0], x[1]);
        assert!(x[0] >= q(3));
    }
}
