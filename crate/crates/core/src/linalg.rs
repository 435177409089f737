//! Exact rational linear algebra at desk scale.
//!
//! Everything here works over `BigRational` with no rounding anywhere.
//! Matrices are row-major `Vec<Vec<Rat>>`; callers keep shapes consistent.
//! Sizes in this crate are tiny (dimensions <= ~10, a few dozen rows), so
//! the implementations favor a direct, checkable style over performance.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Exact rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Mutable row `i` together with shared row `r` of the same matrix.
/// Requires `i != r`.
fn row_pair<T>(m: &mut [Vec<T>], i: usize, r: usize) -> (&mut [T], &[T]) {
    debug_assert_ne!(i, r);
    if i < r {
        let (head, tail) = m.split_at_mut(r);
        (&mut head[i], &tail[0])
    } else {
        let (head, tail) = m.split_at_mut(i);
        (&mut tail[0], &head[r])
    }
}

/// Reduced row echelon form in place. Returns the pivot column indices in
/// row order. Pivot search scans columns left to right, so callers control
/// elimination priority by column order.
pub fn rref(rows: &mut [Vec<Rat>]) -> Vec<usize> {
    let nrows = rows.len();
    if nrows == 0 {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let (target, pivot) = row_pair(rows, i, r);
                for (x, p) in target.iter_mut().zip(pivot) {
                    let sub = p * &f;
                    *x = &*x - &sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a matrix (copy-based).
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    rref(&mut m).len()
}

/// Determinant of a square integer matrix, computed by exact rational
/// elimination. Empty matrix has determinant 1.
pub fn det_int(m: &[Vec<i64>]) -> Rat {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m.iter().map(|row| row.iter().map(|&x| rat(x)).collect()).collect();
    debug_assert!(a.iter().all(|row| row.len() == n));
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= a[c][c].clone();
        let inv = a[c][c].clone();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &inv;
                let (target, pivot) = row_pair(&mut a, i, c);
                for (x, p) in target[c..].iter_mut().zip(&pivot[c..]) {
                    let sub = p * &f;
                    *x = &*x - &sub;
                }
            }
        }
    }
    det
}

/// Solves `a * x = b` for square invertible `a`. Returns None when `a` is
/// singular.
pub fn solve_square(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// Inverse of a square matrix, or None when singular.
pub fn inverse(a: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// True when `target` lies in the row span of `span_rows`.
pub fn in_span(span_rows: &[Vec<Rat>], target: &[Rat]) -> bool {
    let base = rank(span_rows);
    let mut ext: Vec<Vec<Rat>> = span_rows.to_vec();
    ext.push(target.to_vec());
    rank(&ext) == base
}

/// One linear constraint `coeffs . x >= rhs`.
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
}

/// Exact feasibility of a system of non-strict linear inequalities over Q.
///
/// Phase-I simplex with Bland's rule: always terminates, no tolerance
/// anywhere. Variables are free (internally split as differences of
/// nonnegative parts).
pub fn lp_feasible(constraints: &[Constraint], nvars: usize) -> bool {
    let m = constraints.len();
    if m == 0 {
        return true;
    }
    debug_assert!(constraints.iter().all(|c| c.coeffs.len() == nvars));
    // Columns: u_0..u_{n-1}, w_0..w_{n-1} (x = u - w), s_0..s_{m-1} (surplus,
    // A x - s = b), a_0..a_{m-1} (artificials), then the rhs column.
    let ncols = 2 * nvars + 2 * m;
    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for (i, con) in constraints.iter().enumerate() {
        let mut row = vec![Rat::zero(); ncols + 1];
        let flip = con.rhs.is_negative();
        let sgn = if flip { -Rat::one() } else { Rat::one() };
        for (j, c) in con.coeffs.iter().enumerate() {
            row[j] = c * &sgn;
            row[nvars + j] = -(c * &sgn);
        }
        row[2 * nvars + i] = -&sgn * Rat::one();
        row[2 * nvars + m + i] = Rat::one();
        row[ncols] = &con.rhs * &sgn;
        t.push(row);
    }
    // Reduced-cost row for minimizing the artificial sum: basis starts as the
    // artificial columns, so obj[j] = (column sum) - cost_j and the rhs entry
    // is the current objective value.
    let mut obj = vec![Rat::zero(); ncols + 1];
    for j in 0..=ncols {
        for row in &t {
            obj[j] += &row[j];
        }
    }
    for x in &mut obj[2 * nvars + m..ncols] {
        *x -= Rat::one();
    }
    let mut basis: Vec<usize> = (2 * nvars + m..ncols).collect();
    loop {
        // Bland: entering column is the lowest index with positive reduced cost.
        let Some(e) = (0..ncols).find(|&j| obj[j].is_positive()) else {
            return obj[ncols].is_zero();
        };
        // Ratio test; Bland tie-break on the smallest leaving basis index.
        let mut leave: Option<(usize, Rat)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[e].is_positive() {
                let ratio = &row[ncols] / &row[e];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("phase-I objective is bounded below by zero");
        let inv = t[r][e].clone();
        for x in t[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..m {
            if i != r && !t[i][e].is_zero() {
                let f = t[i][e].clone();
                let (target, pivot) = row_pair(&mut t, i, r);
                for (x, p) in target.iter_mut().zip(pivot) {
                    let sub = p * &f;
                    *x = &*x - &sub;
                }
            }
        }
        if !obj[e].is_zero() {
            let f = obj[e].clone();
            for (x, p) in obj.iter_mut().zip(&t[r]) {
                let sub = p * &f;
                *x = &*x - &sub;
            }
        }
        basis[r] = e;
    }
}
