//! Dense two-phase simplex over an exact field, Bland's rule throughout.
//!
//! Variables are free. Internally each is split as `x = x+ - x-`.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub rel: Relation,
    pub rhs: S,
}

impl<S> Constraint<S> {
    pub fn le(coeffs: Vec<S>, rhs: S) -> Self {
        Constraint {
            coeffs,
            rel: Relation::Le,
            rhs,
        }
    }

    pub fn eq(coeffs: Vec<S>, rhs: S) -> Self {
        Constraint {
            coeffs,
            rel: Relation::Eq,
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome<S> {
    Optimal { x: Vec<S>, value: S },
    Unbounded,
    Infeasible,
}

struct Tableau<S> {
    rows: Vec<Vec<S>>,
    basis: Vec<usize>,
    /// Columns excluded from entering (artificials in phase two).
    blocked: Vec<bool>,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl<S: Scalar> Tableau<S> {
    fn width(&self) -> usize {
        self.blocked.len()
    }

    fn rhs(&self, i: usize) -> &S {
        &self.rows[i][self.width()]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let inv = S::one() / self.rows[r][col].clone();
        for x in self.rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        self.basis[r] = col;
    }

    /// One Bland step maximizing `cost · z`.
    fn step(&mut self, cost: &[S]) -> Step {
        let entering = (0..self.width()).find(|&j| {
            if self.blocked[j] || self.basis.contains(&j) {
                return false;
            }
            let reduced = self
                .rows
                .iter()
                .zip(&self.basis)
                .fold(cost[j].clone(), |acc, (row, &b)| acc - cost[b].clone() * row[j].clone());
            reduced.is_positive()
        });
        let Some(col) = entering else {
            return Step::Optimal;
        };
        let mut best: Option<(usize, S)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][col];
            if !a.is_positive() {
                continue;
            }
            let ratio = self.rhs(i).clone() / a.clone();
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        match best {
            None => Step::Unbounded,
            Some((r, _)) => {
                self.pivot(r, col);
                Step::Pivoted
            }
        }
    }

    fn run(&mut self, cost: &[S]) -> bool {
        loop {
            match self.step(cost) {
                Step::Optimal => return true,
                Step::Unbounded => return false,
                Step::Pivoted => {}
            }
        }
    }

    fn value(&self, cost: &[S]) -> S {
        self.basis
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, &b)| acc + cost[b].clone() * self.rhs(i).clone())
    }

    fn solution(&self) -> Vec<S> {
        let mut z = vec![S::zero(); self.width()];
        for (i, &b) in self.basis.iter().enumerate() {
            z[b] = self.rhs(i).clone();
        }
        z
    }
}

/// Maximize `objective · x` over free `x` subject to the constraints.
pub fn maximize<S: Scalar>(objective: &[S], constraints: &[Constraint<S>]) -> LpOutcome<S> {
    let m = objective.len();
    let slack_count = constraints.iter().filter(|c| c.rel == Relation::Le).count();
    let art_start = 2 * m + slack_count;
    let mut rows = Vec::with_capacity(constraints.len());
    let mut basis = Vec::with_capacity(constraints.len());
    let mut artificial_rows = Vec::new();
    let mut slack = 2 * m;
    for (i, con) in constraints.iter().enumerate() {
        assert_eq!(con.coeffs.len(), m, "constraint {i} has the wrong width");
        let flip = con.rhs.is_negative();
        let sign = |x: S| if flip { -x } else { x };
        let mut row: Vec<S> = con.coeffs.iter().cloned().map(sign).collect();
        row.extend(con.coeffs.iter().cloned().map(|x| sign(-x)));
        row.resize(art_start, S::zero());
        let mut slack_is_basic = false;
        if con.rel == Relation::Le {
            row[slack] = sign(S::one());
            slack_is_basic = !flip;
            if slack_is_basic {
                basis.push(slack);
            }
            slack += 1;
        }
        row.push(sign(con.rhs.clone()));
        if !slack_is_basic {
            artificial_rows.push(i);
            basis.push(usize::MAX);
        }
        rows.push(row);
    }
    let width = art_start + artificial_rows.len();
    for row in rows.iter_mut() {
        let rhs = row.pop().expect("row has a right side");
        row.resize(width, S::zero());
        row.push(rhs);
    }
    for (a, &i) in artificial_rows.iter().enumerate() {
        rows[i][art_start + a] = S::one();
        basis[i] = art_start + a;
    }
    let mut t = Tableau {
        rows,
        basis,
        blocked: vec![false; width],
    };

    if !artificial_rows.is_empty() {
        let mut cost = vec![S::zero(); width];
        for c in cost.iter_mut().skip(art_start) {
            *c = -S::one();
        }
        t.run(&cost);
        if !t.value(&cost).is_zero() {
            return LpOutcome::Infeasible;
        }
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art_start {
                match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for b in t.blocked.iter_mut().skip(art_start) {
            *b = true;
        }
    }

    let mut cost = vec![S::zero(); width];
    for j in 0..m {
        cost[j] = objective[j].clone();
        cost[m + j] = -objective[j].clone();
    }
    if !t.run(&cost) {
        return LpOutcome::Unbounded;
    }
    let z = t.solution();
    let x = (0..m).map(|j| z[j].clone() - z[m + j].clone()).collect();
    LpOutcome::Optimal {
        x,
        value: t.value(&cost),
    }
}

/// Optimal solution of `maximize`, then lexicographically smallest among the
/// optimal ones: `x_0` is minimized with the objective fixed, then `x_1`, and
/// so on. A coordinate that is unbounded below on the current face is left
/// free and the next coordinate is tried.
pub fn lexicographic_maximize<S: Scalar>(objective: &[S], constraints: &[Constraint<S>]) -> LpOutcome<S> {
    let (mut x, value) = match maximize(objective, constraints) {
        LpOutcome::Optimal { x, value } => (x, value),
        other => return other,
    };
    let m = objective.len();
    let mut face = constraints.to_vec();
    face.push(Constraint::eq(objective.to_vec(), value.clone()));
    for j in 0..m {
        let mut unit = vec![S::zero(); m];
        unit[j] = -S::one();
        if let LpOutcome::Optimal { x: y, value: v } = maximize(&unit, &face) {
            unit[j] = S::one();
            face.push(Constraint::eq(unit, -v));
            x = y;
        }
    }
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn v(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| Q::from_i64(x)).collect()
    }

    fn q(x: i64) -> Q {
        Q::from_i64(x)
    }

    #[test]
    fn textbook_problem() {
        let cons = vec![
            Constraint::le(v(&[1, 1]), q(4)),
            Constraint::le(v(&[1, 3]), q(6)),
            Constraint::le(v(&[-1, 0]), q(0)),
            Constraint::le(v(&[0, -1]), q(0)),
        ];
        match maximize(&v(&[3, 2]), &cons) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, q(12));
                assert_eq!(x, v(&[4, 0]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_right_sides_need_phase_one() {
        let cons = vec![Constraint::le(v(&[-1]), q(-2)), Constraint::le(v(&[1]), q(5))];
        match maximize(&v(&[-1]), &cons) {
            LpOutcome::Optimal { x, value } => assert_eq!((x, value), (v(&[2]), q(-2))),
            other => panic!("{other:?}"),
        }
        let cons = vec![Constraint::le(v(&[1]), q(-1)), Constraint::le(v(&[-1]), q(0))];
        assert_eq!(maximize(&v(&[1]), &cons), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_and_equalities() {
        let cons = vec![Constraint::le(v(&[-1]), q(0))];
        assert_eq!(maximize(&v(&[1]), &cons), LpOutcome::Unbounded);
        let cons = vec![Constraint::eq(v(&[1, 1]), q(3)), Constraint::eq(v(&[2, 2]), q(6))];
        match maximize(
            &v(&[1, 0]),
            &[cons.clone(), vec![Constraint::le(v(&[1, 0]), q(1))]].concat(),
        ) {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, v(&[1, 2])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lexicographic_tie_break() {
        // Optimal face x + y = 2 with 0 <= x, y <= 2: lexicographic minimum is (0, 2).
        let cons = vec![
            Constraint::le(v(&[1, 1]), q(2)),
            Constraint::le(v(&[-1, 0]), q(0)),
            Constraint::le(v(&[0, -1]), q(0)),
            Constraint::le(v(&[0, 1]), q(2)),
        ];
        match lexicographic_maximize(&v(&[1, 1]), &cons) {
            LpOutcome::Optimal { x, value } => assert_eq!((x, value), (v(&[0, 2]), q(2))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the largest-coefficient rule.
        let r = |p, d| Q::ratio(p, d);
        let cons = vec![
            Constraint::le(vec![r(1, 4), r(-60, 1), r(-1, 25), r(9, 1)], q(0)),
            Constraint::le(vec![r(1, 2), r(-90, 1), r(-1, 50), r(3, 1)], q(0)),
            Constraint::le(v(&[0, 0, 1, 0]), q(1)),
            Constraint::le(v(&[-1, 0, 0, 0]), q(0)),
            Constraint::le(v(&[0, -1, 0, 0]), q(0)),
            Constraint::le(v(&[0, 0, -1, 0]), q(0)),
            Constraint::le(v(&[0, 0, 0, -1]), q(0)),
        ];
        let obj = vec![r(3, 4), r(-150, 1), r(1, 50), r(-6, 1)];
        match maximize(&obj, &cons) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(1, 20)),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        /// Box-constrained problems have the obvious corner optimum.
        #[test]
        fn box_optimum(c in proptest::collection::vec(-5i64..6, 1..4), lo in -3i64..0, hi in 1i64..4) {
            let m = c.len();
            let mut cons = Vec::new();
            for j in 0..m {
                let mut e = vec![q(0); m];
                e[j] = q(1);
                cons.push(Constraint::le(e.clone(), q(hi)));
                e[j] = q(-1);
                cons.push(Constraint::le(e, q(-lo)));
            }
            let expect: i64 = c.iter().map(|&cj| if cj > 0 { cj * hi } else { cj * lo }).sum();
            match maximize(&v(&c), &cons) {
                LpOutcome::Optimal { x, value } => {
                    prop_assert_eq!(value.clone(), q(expect));
                    let dot = x.iter().zip(&c).fold(q(0), |a, (xi, &ci)| a + xi.clone() * q(ci));
                    prop_assert_eq!(dot, value);
                }
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }
}
