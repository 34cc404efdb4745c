//! Euclidean projection onto the convex hull of a small vertex set, solved
//! with Wolfe's minimum-norm-point algorithm: descent over an active vertex
//! set ("corral") with exact affine least-squares solves on it. Finitely
//! terminating and accurate to machine precision at the vertex counts used
//! here.

use super::linalg::{dist, dot, sub};
use crate::scalar::r;
use crate::Real;

/// Result of projecting a point onto a polytope given by its vertices.
#[derive(Clone, Debug)]
pub struct PolytopeProjection<T> {
    /// Euclidean distance from the target to the hull.
    pub distance: T,
    /// The closest hull point.
    pub point: Vec<T>,
    /// Convex coefficients over the vertices producing `point`.
    pub coefficients: Vec<T>,
}

/// Distance from `target` to `conv(vertices)`.
pub fn dist_to_polytope<T: Real>(target: &[T], vertices: &[Vec<T>]) -> PolytopeProjection<T> {
    assert!(!vertices.is_empty(), "polytope needs at least one vertex");
    let m = vertices.len();
    // Work with the shifted vertices so the problem is min ||sum lambda_j y_j||.
    let shifted: Vec<Vec<T>> = vertices.iter().map(|v| sub(v, target)).collect();
    // The duality-gap noise floor is eps * ||y||^2, so the stopping
    // tolerance must scale with the squared vertex magnitudes.
    let scale2 = shifted.iter().map(|y| dot(y, y)).fold(T::zero(), T::max);
    if scale2 == T::zero() {
        return PolytopeProjection {
            distance: T::zero(),
            point: target.to_vec(),
            coefficients: vec![T::one() / r::<T>(m as f64); m],
        };
    }
    let tol = T::epsilon() * r::<T>(256.0) * scale2;
    let drop_tol = T::epsilon() * r::<T>(64.0);

    let start = (0..m)
        .min_by(|&a, &b| {
            dot(&shifted[a], &shifted[a])
                .partial_cmp(&dot(&shifted[b], &shifted[b]))
                .expect("finite coordinates")
        })
        .expect("non-empty");
    let mut active: Vec<usize> = vec![start];
    let mut weights: Vec<T> = vec![T::one()];
    let mut x = shifted[start].clone();

    'major: for _ in 0..64 * m {
        // Most descending vertex under the current point.
        let (best, best_ip) = (0..m)
            .map(|j| (j, dot(&x, &shifted[j])))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite coordinates"))
            .expect("non-empty");
        if dot(&x, &x) - best_ip <= tol || active.contains(&best) {
            break;
        }
        active.push(best);
        weights.push(T::zero());

        for _ in 0..64 * m {
            let affine = match affine_min_norm(&shifted, &active) {
                AffineSolution::Solved(solution) => solution,
                AffineSolution::Dependent(position) => {
                    // The vertex adds nothing to the affine hull; remove it
                    // (and its mass) and solve again.
                    if active.len() <= 1 {
                        break 'major;
                    }
                    active.remove(position);
                    let removed = weights.remove(position);
                    let total = T::one() - removed;
                    if total <= T::zero() {
                        break 'major;
                    }
                    for w in weights.iter_mut() {
                        *w = *w / total;
                    }
                    continue;
                }
                AffineSolution::Degenerate => break 'major,
            };
            if affine.iter().all(|&c| c > drop_tol) {
                weights = affine;
                break;
            }
            // Step from `weights` toward `affine` until a coordinate hits
            // zero, then drop the vanished vertices.
            let mut theta = T::one();
            for (&w, &a) in weights.iter().zip(&affine) {
                if a <= drop_tol && w > a {
                    theta = theta.min(w / (w - a));
                }
            }
            let blended: Vec<T> = weights
                .iter()
                .zip(&affine)
                .map(|(&w, &a)| (T::one() - theta) * w + theta * a)
                .collect();
            let keep: Vec<bool> = blended.iter().map(|&w| w > drop_tol).collect();
            if keep.iter().all(|k| !k) {
                break 'major;
            }
            active = active
                .iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(&idx, _)| idx)
                .collect();
            weights = blended
                .iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(&w, _)| w)
                .collect();
            let total = weights.iter().fold(T::zero(), |acc, &w| acc + w);
            for w in weights.iter_mut() {
                *w = *w / total;
            }
        }
        x = combine(&shifted, &active, &weights);
    }

    let mut coefficients = vec![T::zero(); m];
    for (&idx, &w) in active.iter().zip(&weights) {
        coefficients[idx] = coefficients[idx] + w;
    }
    let mut point = vec![T::zero(); target.len()];
    for (c, v) in coefficients.iter().zip(vertices) {
        if *c != T::zero() {
            for (pk, &vk) in point.iter_mut().zip(v) {
                *pk = *pk + *c * vk;
            }
        }
    }
    PolytopeProjection { distance: dist(&point, target), point, coefficients }
}

fn combine<T: Real>(shifted: &[Vec<T>], active: &[usize], weights: &[T]) -> Vec<T> {
    let d = shifted[0].len();
    let mut x = vec![T::zero(); d];
    for (&idx, &w) in active.iter().zip(weights) {
        for (xk, &yk) in x.iter_mut().zip(&shifted[idx]) {
            *xk = *xk + w * yk;
        }
    }
    x
}

enum AffineSolution<T> {
    Solved(Vec<T>),
    /// The corral vertex at this position is affinely dependent on the
    /// others and can be dropped without changing the affine hull.
    Dependent(usize),
    Degenerate,
}

/// Barycentric coordinates of the minimum-norm point of the affine hull of
/// the active vertices: solves the KKT system
/// `[0 1^T; 1 G] [mu; lambda] = [1; 0]` with `G` the Gram matrix,
/// normalized by the largest Gram diagonal so pivot magnitudes are
/// comparable across scales.
fn affine_min_norm<T: Real>(shifted: &[Vec<T>], active: &[usize]) -> AffineSolution<T> {
    let s = active.len();
    let mut gram = vec![vec![T::zero(); s]; s];
    let mut g_scale = T::zero();
    for a in 0..s {
        for b in a..s {
            let value = dot(&shifted[active[a]], &shifted[active[b]]);
            gram[a][b] = value;
            gram[b][a] = value;
            if a == b {
                g_scale = g_scale.max(value);
            }
        }
    }
    if g_scale == T::zero() {
        // Every active vertex coincides with the target.
        return AffineSolution::Solved(vec![T::one() / r::<T>(s as f64); s]);
    }

    let n = s + 1;
    let mut system = vec![vec![T::zero(); n + 1]; n];
    for j in 0..s {
        system[0][j + 1] = T::one();
        system[j + 1][0] = T::one();
        for b in 0..s {
            system[j + 1][b + 1] = gram[j][b] / g_scale;
        }
    }
    system[0][n] = T::one();

    // Elimination with partial (row) pivoting keeps columns attached to
    // their variables, so a collapsed pivot names the dependent vertex.
    let pivot_floor = r::<T>(1e-12);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                system[a][col].abs().partial_cmp(&system[b][col].abs()).expect("finite")
            })
            .expect("non-empty");
        if !system[pivot][col].is_finite() {
            return AffineSolution::Degenerate;
        }
        if system[pivot][col].abs() <= pivot_floor {
            if col == 0 {
                return AffineSolution::Degenerate;
            }
            return AffineSolution::Dependent(col - 1);
        }
        system.swap(pivot, col);
        let pivot_row = system[col].clone();
        for (row, entries) in system.iter_mut().enumerate() {
            if row == col {
                continue;
            }
            let factor = entries[col] / pivot_row[col];
            for (value, &upper) in entries[col..=n].iter_mut().zip(&pivot_row[col..=n]) {
                *value = *value - factor * upper;
            }
        }
    }
    let mut solution = vec![T::zero(); s];
    for i in 0..s {
        solution[i] = system[i + 1][n] / system[i + 1][i + 1];
        if !solution[i].is_finite() {
            return AffineSolution::Degenerate;
        }
    }
    AffineSolution::Solved(solution)
}
