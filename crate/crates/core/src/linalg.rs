//! Exact Gaussian elimination.

use crate::scalar::Scalar;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<S: Scalar>(rows: &mut [Vec<S>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = S::one() / rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let pivot = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(pivot).skip(col) {
                    *x = x.clone() - f.clone() * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    rref(&mut rows.to_vec()).len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution<S> {
    Unique(Vec<S>),
    Inconsistent,
    Underdetermined { rank: usize, unknowns: usize },
}

/// Solve `A x = b` for `A` given row by row.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Solution<S> {
    let unknowns = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| row.iter().cloned().chain([rhs.clone()]).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&unknowns) {
        return Solution::Inconsistent;
    }
    if pivots.len() < unknowns {
        return Solution::Underdetermined {
            rank: pivots.len(),
            unknowns,
        };
    }
    Solution::Unique(aug[..unknowns].iter().map(|row| row[unknowns].clone()).collect())
}

/// Coefficients expressing `v` in terms of `rows`, if `v` lies in their span.
pub fn span_coefficients<S: Scalar>(rows: &[Vec<S>], v: &[S]) -> Option<Vec<S>> {
    let m = rows.len();
    let transposed: Vec<Vec<S>> = (0..v.len())
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect();
    if m == 0 {
        return v.iter().all(S::is_zero).then(Vec::new);
    }
    let mut aug: Vec<Vec<S>> = transposed
        .into_iter()
        .zip(v)
        .map(|(mut row, x)| {
            row.push(x.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&m) {
        return None;
    }
    let mut coeffs = vec![S::zero(); m];
    for (r, &c) in pivots.iter().enumerate() {
        coeffs[c] = aug[r][m].clone();
    }
    Some(coeffs)
}

/// `f` with `a = f * b`, when `b` is non-zero and the vectors are proportional.
pub fn proportionality<S: Scalar>(a: &[S], b: &[S]) -> Option<S> {
    if a.len() != b.len() {
        return None;
    }
    let j = b.iter().position(|x| !x.is_zero())?;
    let f = a[j].clone() / b[j].clone();
    a.iter().zip(b).all(|(x, y)| *x == f.clone() * y.clone()).then_some(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn v(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| Q::from_i64(x)).collect()
    }

    #[test]
    fn rank_and_solve() {
        let a = vec![v(&[1, 2]), v(&[2, 4]), v(&[0, 1])];
        assert_eq!(rank(&a), 2);
        assert_eq!(solve(&a, &v(&[3, 6, 1])), Solution::Unique(v(&[1, 1])));
        assert_eq!(solve(&a, &v(&[3, 7, 1])), Solution::Inconsistent);
        assert_eq!(
            solve(&a[..2], &v(&[3, 6])),
            Solution::Underdetermined { rank: 1, unknowns: 2 }
        );
    }

    #[test]
    fn span_and_scale() {
        let rows = vec![v(&[1, 0, 1]), v(&[0, 1, 1])];
        assert_eq!(span_coefficients(&rows, &v(&[2, 3, 5])), Some(v(&[2, 3])));
        assert_eq!(span_coefficients(&rows, &v(&[2, 3, 4])), None);
        assert_eq!(proportionality(&v(&[2, 4]), &v(&[1, 2])), Some(Q::from_i64(2)));
        assert_eq!(proportionality(&v(&[2, 5]), &v(&[1, 2])), None);
        assert_eq!(proportionality(&v(&[0, 0]), &v(&[0, 0])), None);
    }
}
