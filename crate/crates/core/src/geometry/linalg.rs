//! Small dense linear algebra over the generic scalar: vector helpers, a
//! one-sided Jacobi SVD, and a pivoted determinant. Everything here targets
//! matrices with at most a handful of rows and columns, where Jacobi
//! iteration is both simple and accurate to machine precision.

use crate::scalar::r;
use crate::Real;

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub(crate) fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub(crate) fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub(crate) fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

pub(crate) fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    norm(&sub(a, b))
}

/// `m * v` for a row-major matrix.
pub(crate) fn mat_vec<T: Real>(m: &[Vec<T>], v: &[T]) -> Vec<T> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Arithmetic mean of a non-empty point set.
pub(crate) fn centroid<T: Real>(points: &[Vec<T>]) -> Vec<T> {
    let d = points[0].len();
    let inv = T::one() / r::<T>(points.len() as f64);
    let mut c = vec![T::zero(); d];
    for p in points {
        for (ck, &pk) in c.iter_mut().zip(p) {
            *ck = *ck + pk * inv;
        }
    }
    c
}

/// Singular values (descending) and matching right singular vectors.
pub(crate) struct Svd<T> {
    pub singular_values: Vec<T>,
    /// `right_vectors[k]` is the unit right singular vector for
    /// `singular_values[k]`; together they form an orthonormal basis of the
    /// column space of the input's transpose.
    pub right_vectors: Vec<Vec<T>>,
}

/// One-sided Jacobi SVD of a row-major `m x d` matrix. Rotations are applied
/// to column pairs until all columns are mutually orthogonal; the singular
/// values are then the column norms and the accumulated rotations give the
/// right singular vectors. Accurate to machine precision for the small
/// matrices used here.
pub(crate) fn jacobi_svd<T: Real>(rows: &[Vec<T>], d: usize) -> Svd<T> {
    let mut cols: Vec<Vec<T>> = (0..d).map(|j| rows.iter().map(|row| row[j]).collect()).collect();
    let mut v: Vec<Vec<T>> = (0..d)
        .map(|j| (0..d).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();

    let tol = T::epsilon() * r::<T>(8.0);
    for _sweep in 0..64 {
        let mut rotated = false;
        for i in 0..d {
            for j in i + 1..d {
                let a = dot(&cols[i], &cols[i]);
                let b = dot(&cols[j], &cols[j]);
                let c = dot(&cols[i], &cols[j]);
                if c.abs() <= tol * (a * b).sqrt() || c == T::zero() {
                    continue;
                }
                let zeta = (b - a) / (c + c);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                rotate_pair(&mut cols, i, j, cs, sn);
                rotate_pair(&mut v, i, j, cs, sn);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let norms: Vec<T> = cols.iter().map(|c| norm(c)).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).expect("finite norms"));
    Svd {
        singular_values: order.iter().map(|&k| norms[k]).collect(),
        right_vectors: order.iter().map(|&k| v[k].clone()).collect(),
    }
}

/// Applies the plane rotation to columns `i < j` in place.
fn rotate_pair<T: Real>(cols: &mut [Vec<T>], i: usize, j: usize, cs: T, sn: T) {
    let (head, tail) = cols.split_at_mut(j);
    for (a, b) in head[i].iter_mut().zip(tail[0].iter_mut()) {
        let (x, y) = (*a, *b);
        *a = cs * x - sn * y;
        *b = sn * x + cs * y;
    }
}

/// Largest singular value of a row-major matrix.
pub(crate) fn spectral_norm<T: Real>(m: &[Vec<T>]) -> T {
    if m.is_empty() || m[0].is_empty() {
        return T::zero();
    }
    jacobi_svd(m, m[0].len()).singular_values[0]
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det<T: Real>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    let mut sign = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).expect("finite"))
            .expect("non-empty");
        if m[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            sign = -sign;
        }
        let pivot_row = m[col].clone();
        for entries in m.iter_mut().skip(col + 1) {
            let factor = entries[col] / pivot_row[col];
            for (value, &upper) in entries[col..n].iter_mut().zip(&pivot_row[col..n]) {
                *value = *value - factor * upper;
            }
        }
    }
    (0..n).fold(sign, |acc, i| acc * m[i][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn svd_recovers_axis_scales() {
        let rows: Vec<Vec<f64>> = vec![vec![3.0, 0.0], vec![0.0, 4.0], vec![0.0, 0.0]];
        let svd = jacobi_svd(&rows, 2);
        assert_relative_eq!(svd.singular_values[0], 4.0, max_relative = 1e-14);
        assert_relative_eq!(svd.singular_values[1], 3.0, max_relative = 1e-14);
        assert_relative_eq!(svd.right_vectors[0][1].abs(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn svd_right_vectors_are_orthonormal() {
        let rows: Vec<Vec<f64>> = vec![
            vec![1.0, 2.0, 0.5],
            vec![-0.3, 0.7, 1.1],
            vec![0.9, -0.2, 0.4],
            vec![0.1, 0.6, -1.3],
        ];
        let svd = jacobi_svd(&rows, 3);
        for i in 0..3 {
            assert_relative_eq!(norm(&svd.right_vectors[i]), 1.0, max_relative = 1e-12);
            for j in i + 1..3 {
                assert!(dot(&svd.right_vectors[i], &svd.right_vectors[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn svd_detects_exact_rank_deficiency() {
        // Two copies of the same direction: one tiny singular value only.
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![-1.0, -1.0, 0.0]];
        let svd = jacobi_svd(&rows, 3);
        assert!(svd.singular_values[1] < 1e-14 * svd.singular_values[0].max(1.0));
        assert!(svd.singular_values[2] < 1e-14);
    }

    #[test]
    fn determinant_matches_known_values() {
        assert_relative_eq!(det(vec![vec![2.0, 0.0], vec![0.0, 3.0]]), 6.0);
        assert_relative_eq!(
            det(vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]),
            -1.0
        );
        assert_relative_eq!(det(vec![vec![1.0, 2.0], vec![2.0, 4.0]]), 0.0);
    }
}
