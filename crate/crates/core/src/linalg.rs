//! Gaussian elimination on small dense systems.

use crate::scalar::Field;

/// Row-major dense matrix of arbitrary shape.
pub type Dense<F> = Vec<Vec<F>>;

/// Reduce `m` in place to reduced row echelon form and return the pivot columns.
///
/// Entries within `tol` of zero count as zero. Rows are pivoted on the
/// largest magnitude, which is irrelevant for exact input and stabilizes
/// binary64 input.
pub fn rref<F: Field>(m: &mut Dense<F>, tol: f64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !m[i][c].near_zero(tol))
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()).then(b.cmp(&a)));
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv = F::one() / m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].near_zero(0.0) {
                let f = m[i][c].clone();
                for k in 0..cols {
                    let d = f.clone() * m[r][k].clone();
                    m[i][k] = m[i][k].clone() - d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &Dense<F>, tol: f64) -> usize {
    rref(&mut m.clone(), tol).len()
}

/// Basis of the right null space `{v : m v = 0}`.
pub fn kernel<F: Field>(m: &Dense<F>, tol: f64) -> Vec<Vec<F>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = m.clone();
    let pivots = rref(&mut r, tol);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); cols];
            v[f] = F::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[row][f].clone();
            }
            v
        })
        .collect()
}

/// A solution of `m x = b`, or `None` when the system is inconsistent.
/// Free variables are set to zero.
pub fn solve<F: Field>(m: &Dense<F>, b: &[F], tol: f64) -> Option<Vec<F>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut aug: Dense<F> = m
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, tol);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![F::zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][cols].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, if nonsingular.
pub fn inverse<F: Field>(m: &Dense<F>, tol: f64) -> Option<Dense<F>> {
    let n = m.len();
    let mut aug: Dense<F> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug, tol);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec<F: Field>(m: &Dense<F>, v: &[F]) -> Vec<F> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Q};

    fn qm(rows: &[&[i64]]) -> Dense<Q> {
        rows.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&m, 0.0), 2);
        let k = kernel(&m, 0.0);
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&m, &k[0]).iter().all(|v| *v == Q::from_i64(0)));
    }

    #[test]
    fn solving() {
        let m = qm(&[&[2, 1], &[1, 3]]);
        let x = solve(&m, &[q(3, 1), q(5, 1)], 0.0).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
        let s = qm(&[&[1, 1], &[2, 2]]);
        assert!(solve(&s, &[q(1, 1), q(3, 1)], 0.0).is_none());
    }

    #[test]
    fn inverting() {
        let m = qm(&[&[2, 1], &[1, 3]]);
        let inv = inverse(&m, 0.0).unwrap();
        assert_eq!(inv, vec![vec![q(3, 5), q(-1, 5)], vec![q(-1, 5), q(2, 5)]]);
        assert!(inverse(&qm(&[&[1, 2], &[2, 4]]), 0.0).is_none());
    }

    #[test]
    fn approx_backend() {
        let m: Dense<f64> = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let x = solve(&m, &[5.0, 6.0], 1e-12).unwrap();
        assert!((x[0] + 4.0).abs() < 1e-12 && (x[1] - 4.5).abs() < 1e-12);
    }
}
