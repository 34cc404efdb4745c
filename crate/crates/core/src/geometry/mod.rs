//! Geometric primitives: half-space distances, orthogonal projections,
//! thickness, affine dimension, hull volumes, and rotational segment-volume
//! bounds.

mod hull;
mod linalg;
mod radius;
mod simplex;

pub use hull::{monte_carlo_volume, VolumeEstimate};
pub use radius::{ball_coeff, segment_volume_bounds, RadiusFunction, SegmentVolumeBounds};
pub use simplex::{dist_to_polytope, PolytopeProjection};

pub(crate) use linalg::{add, centroid, dist, dot, jacobi_svd, mat_vec, norm, scale, sub};

use crate::scalar::r;
use crate::{Error, Real, Result};

/// Default sample count for the Monte Carlo volume fallback.
pub const MC_VOLUME_SAMPLES: usize = 200_000;
/// Fixed seed for the Monte Carlo volume fallback, so `hull_volume` stays a
/// pure function of its input.
pub const MC_VOLUME_SEED: u64 = 0x5eed_u64;

/// Open half-space `{ h : <h - q, v> < 0 }` given by a boundary point `q`
/// and an outward normal `v`.
#[derive(Clone, Debug)]
pub struct HalfSpace<T> {
    q: Vec<T>,
    v: Vec<T>,
}

impl<T: Real> HalfSpace<T> {
    pub fn new(q: Vec<T>, v: Vec<T>) -> Result<Self> {
        if q.len() != v.len() {
            return Err(Error::ShapeMismatch);
        }
        if norm(&v) == T::zero() {
            return Err(Error::ZeroNormal);
        }
        Ok(Self { q, v })
    }

    pub fn q(&self) -> &[T] {
        &self.q
    }

    pub fn v(&self) -> &[T] {
        &self.v
    }

    /// Signed distance of `z` to the boundary hyperplane, negative inside.
    pub fn signed_offset(&self, z: &[T]) -> T {
        dot(&sub(z, &self.q), &self.v) / norm(&self.v)
    }

    pub fn contains(&self, z: &[T]) -> bool {
        self.signed_offset(z) < T::zero()
    }
}

/// Distance from a point outside (or on the boundary of) the half-space to
/// the half-space: `<z - q, v> / ||v||`. Points strictly inside violate the
/// formula's precondition and are rejected.
pub fn dist_to_halfspace<T: Real>(z: &[T], half_space: &HalfSpace<T>) -> Result<T> {
    let offset = half_space.signed_offset(z);
    if offset < T::zero() {
        return Err(Error::PointInsideHalfSpace);
    }
    Ok(offset)
}

/// A symmetric idempotent matrix acting as an orthogonal projection.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoProjection<T> {
    matrix: Vec<Vec<T>>,
}

impl<T: Real> OrthoProjection<T> {
    pub fn identity(d: usize) -> Self {
        let matrix = (0..d)
            .map(|i| (0..d).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        Self { matrix }
    }

    /// Wraps a matrix after verifying symmetry, idempotence, and eigenvalues
    /// in `{0, 1}` within `1e-10`.
    pub fn from_matrix(matrix: Vec<Vec<T>>) -> Result<Self> {
        let p = Self { matrix };
        p.validate(r::<T>(1e-10))?;
        Ok(p)
    }

    /// Projection with kernel spanned by the given vectors: `I - B B^T` for
    /// an orthonormal basis `B` of their span.
    pub fn with_kernel_spanned_by(directions: &[Vec<T>], d: usize) -> Self {
        let mut matrix = Self::identity(d).matrix;
        if directions.is_empty() {
            return Self { matrix };
        }
        let svd = linalg::jacobi_svd(directions, d);
        let cutoff = r::<T>(1e-12) * svd.singular_values[0].max(T::one());
        for (sigma, basis_vec) in svd.singular_values.iter().zip(&svd.right_vectors) {
            if *sigma <= cutoff {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    matrix[i][j] = matrix[i][j] - basis_vec[i] * basis_vec[j];
                }
            }
        }
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        mat_vec(&self.matrix, x)
    }

    /// Rank, i.e. the dimension of the image.
    pub fn rank(&self) -> usize {
        linalg::jacobi_svd(&self.matrix, self.dim())
            .singular_values
            .iter()
            .filter(|&&s| s > r::<T>(0.5))
            .count()
    }

    /// Dimension of the kernel.
    pub fn kernel_dim(&self) -> usize {
        self.dim() - self.rank()
    }

    /// Checks `P = P^T`, `P^2 = P`, and eigenvalues in `{0, 1}`, each within
    /// `tol`.
    pub fn validate(&self, tol: T) -> Result<()> {
        let d = self.dim();
        if self.matrix.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidProjection);
        }
        for i in 0..d {
            for j in 0..d {
                if (self.matrix[i][j] - self.matrix[j][i]).abs() > tol {
                    return Err(Error::InvalidProjection);
                }
                let squared = dot(&self.matrix[i], &column(&self.matrix, j));
                if (squared - self.matrix[i][j]).abs() > tol {
                    return Err(Error::InvalidProjection);
                }
            }
        }
        // Symmetric PSD: singular values coincide with eigenvalues.
        for sigma in linalg::jacobi_svd(&self.matrix, d).singular_values {
            if sigma.abs() > tol && (sigma - T::one()).abs() > tol {
                return Err(Error::InvalidProjection);
            }
        }
        Ok(())
    }
}

fn column<T: Real>(m: &[Vec<T>], j: usize) -> Vec<T> {
    m.iter().map(|row| row[j]).collect()
}

/// Largest singular value of the difference of two projections.
pub fn projection_distance<T: Real>(a: &OrthoProjection<T>, b: &OrthoProjection<T>) -> T {
    let d = a.dim();
    let diff: Vec<Vec<T>> =
        (0..d).map(|i| (0..d).map(|j| a.matrix[i][j] - b.matrix[i][j]).collect()).collect();
    linalg::spectral_norm(&diff)
}

/// Orthogonal projection onto the complement of the direction space of a
/// point set (the span of the differences against the first point). A
/// singleton, whose direction space is `{0}`, gives the identity.
pub fn direction_projection<T: Real>(points: &[Vec<T>]) -> OrthoProjection<T> {
    assert!(!points.is_empty(), "direction space needs at least one point");
    let d = points[0].len();
    let diffs: Vec<Vec<T>> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    OrthoProjection::with_kernel_spanned_by(&diffs, d)
}

/// Maximum projected pairwise distance `max ||P (x - y)||` over the set.
pub fn thickness<T: Real>(points: &[Vec<T>], projection: &OrthoProjection<T>) -> T {
    assert!(!points.is_empty(), "thickness needs at least one point");
    let projected: Vec<Vec<T>> = points.iter().map(|p| projection.apply(p)).collect();
    let mut best = T::zero();
    for i in 0..projected.len() {
        for j in i + 1..projected.len() {
            best = best.max(dist(&projected[i], &projected[j]));
        }
    }
    best
}

/// Dimension of the affine hull: the number of singular values of the
/// centered point matrix above `tol * max(largest singular value, 1)`.
pub fn affine_dim<T: Real>(points: &[Vec<T>], tol: T) -> usize {
    assert!(!points.is_empty(), "affine dimension needs at least one point");
    assert!(tol > T::zero(), "tolerance must be positive");
    let center = centroid(points);
    let rows: Vec<Vec<T>> = points.iter().map(|p| sub(p, &center)).collect();
    let svd = linalg::jacobi_svd(&rows, points[0].len());
    let cutoff = tol * svd.singular_values[0].max(T::one());
    svd.singular_values.iter().filter(|&&s| s > cutoff).count()
}

/// Default relative tolerance for [`affine_dim`].
pub fn affine_dim_default_tol<T: Real>() -> T {
    r::<T>(1e-8)
}

/// Volume of the convex hull: exact facet-based computation for `d <= 4`,
/// Monte Carlo estimate (fixed internal seed) for `d >= 5`.
pub fn hull_volume<T: Real>(points: &[Vec<T>]) -> T {
    assert!(!points.is_empty(), "hull volume needs at least one point");
    let d = points[0].len();
    assert!(d >= 1, "ambient dimension must be positive");
    if d <= 4 {
        hull::hull_volume_exact(points)
    } else {
        monte_carlo_volume(points, MC_VOLUME_SAMPLES, MC_VOLUME_SEED).value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit<T: Real>(d: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
        // Box-Muller pairs, normalized.
        let mut v: Vec<f64> = Vec::with_capacity(d);
        while v.len() < d {
            let u1: f64 = rng.gen::<f64>().max(1e-12);
            let u2: f64 = rng.gen();
            let mag = (-2.0 * u1.ln()).sqrt();
            v.push(mag * (std::f64::consts::TAU * u2).cos());
            if v.len() < d {
                v.push(mag * (std::f64::consts::TAU * u2).sin());
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|&x| r::<T>(x / n)).collect()
    }

    #[test]
    fn halfspace_distance_along_axis() {
        let hs = HalfSpace::new(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_relative_eq!(dist_to_halfspace(&[2.0, 0.0], &hs).unwrap(), 2.0);
    }

    #[test]
    fn boundary_points_have_zero_distance() {
        let hs = HalfSpace::new(vec![1.0, 1.0], vec![0.0, 2.0]).unwrap();
        assert_relative_eq!(dist_to_halfspace(&[5.0, 1.0], &hs).unwrap(), 0.0);
    }

    #[test]
    fn interior_points_are_rejected() {
        let hs = HalfSpace::new(vec![0.0], vec![1.0]).unwrap();
        assert!(matches!(dist_to_halfspace(&[-0.5], &hs), Err(Error::PointInsideHalfSpace)));
    }

    #[test]
    fn zero_normal_is_rejected() {
        assert!(matches!(HalfSpace::new(vec![0.0], vec![0.0]), Err(Error::ZeroNormal)));
    }

    #[test]
    fn halfspace_formula_matches_sampled_infimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..20 {
            let q: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let v: Vec<f64> = random_unit(3, &mut rng);
            let hs = HalfSpace::new(q.clone(), v.clone()).unwrap();
            let offset = 0.2 + rng.gen::<f64>();
            let z: Vec<f64> = add(&q, &scale(&v, offset));
            let formula = dist_to_halfspace(&z, &hs).unwrap();
            let mut best = f64::INFINITY;
            for _ in 0..100_000 {
                // Points of H concentrated near the foot of the perpendicular.
                let depth = rng.gen::<f64>().max(1e-9) * 0.05;
                let mut h = sub(&z, &scale(&v, formula + depth));
                let tangent: Vec<f64> = random_unit(3, &mut rng);
                let lateral = rng.gen::<f64>() * 0.05;
                for k in 0..3 {
                    h[k] += (tangent[k] - dot(&tangent, &v) * v[k]) * lateral;
                }
                if hs.contains(&h) {
                    best = best.min(dist(&z, &h));
                }
            }
            assert!(best >= formula - 1e-9);
            assert!(best - formula <= 1e-3, "sampled {best} vs formula {formula}");
        }
    }

    #[test]
    fn direction_projection_kills_spanned_axis() {
        let pts = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]];
        let p = direction_projection(&pts);
        assert_eq!(p.rank(), 2);
        let expected = [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(p.matrix()[i][j], expected[i][j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn singleton_and_coincident_points_give_identity() {
        let p = direction_projection(&[vec![1.0, 2.0]]);
        assert_eq!(p, OrthoProjection::identity(2));
        let p = direction_projection(&[vec![1.0, 2.0], vec![1.0, 2.0]]);
        assert_eq!(p, OrthoProjection::identity(2));
    }

    #[test]
    fn direction_projections_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for m in 1..=4 {
            let pts: Vec<Vec<f64>> =
                (0..m).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
            let p = direction_projection(&pts);
            p.validate(1e-10).unwrap();
            assert_eq!(p.kernel_dim(), affine_dim(&pts, 1e-8).min(3));
        }
    }

    #[test]
    fn thickness_examples() {
        let pts = vec![vec![0.0, 0.0], vec![3.0, 4.0]];
        assert_relative_eq!(thickness(&pts, &OrthoProjection::identity(2)), 5.0);
        let second_axis =
            OrthoProjection::from_matrix(vec![vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_relative_eq!(thickness(&pts, &second_axis), 4.0);
        assert_eq!(thickness(&[vec![1.0, 1.0]], &OrthoProjection::identity(2)), 0.0);
    }

    #[test]
    fn thickness_is_bounded_by_diameter() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..50 {
            let pts: Vec<Vec<f64>> =
                (0..5).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
            let kernel: Vec<Vec<f64>> = (0..2).map(|_| random_unit(3, &mut rng)).collect();
            let p = OrthoProjection::with_kernel_spanned_by(&kernel, 3);
            let diam = thickness(&pts, &OrthoProjection::identity(3));
            assert!(thickness(&pts, &p) <= diam + 1e-12);
        }
    }

    #[test]
    fn thickness_is_lipschitz_in_the_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..50 {
            let pts: Vec<Vec<f64>> =
                (0..6).map(|_| (0..3).map(|_| rng.gen::<f64>() * 2.0).collect()).collect();
            let ka: Vec<Vec<f64>> = (0..1).map(|_| random_unit(3, &mut rng)).collect();
            let kb: Vec<Vec<f64>> = (0..2).map(|_| random_unit(3, &mut rng)).collect();
            let pa = OrthoProjection::with_kernel_spanned_by(&ka, 3);
            let pb = OrthoProjection::with_kernel_spanned_by(&kb, 3);
            let gap = (thickness(&pts, &pa) - thickness(&pts, &pb)).abs();
            let diam = thickness(&pts, &OrthoProjection::identity(3));
            assert!(gap <= projection_distance(&pa, &pb) * diam + 1e-9);
        }
    }

    #[test]
    fn affine_dim_on_constructed_clouds() {
        let collinear: Vec<Vec<f64>> =
            (0..4).map(|i| vec![i as f64, 2.0 * i as f64, -i as f64]).collect();
        assert_eq!(affine_dim(&collinear, 1e-8), 1);
        let simplex = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert_eq!(affine_dim(&simplex, 1e-8), 3);
        let identical = vec![vec![0.4, 0.4]; 3];
        assert_eq!(affine_dim(&identical, 1e-8), 0);
    }

    #[test]
    fn hull_volume_zero_iff_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..30 {
            // Degenerate: random points in a random plane through the origin.
            let u: Vec<f64> = random_unit(3, &mut rng);
            let w: Vec<f64> = random_unit(3, &mut rng);
            let planar: Vec<Vec<f64>> = (0..6)
                .map(|_| {
                    let a = rng.gen::<f64>() * 2.0 - 1.0;
                    let b = rng.gen::<f64>() * 2.0 - 1.0;
                    (0..3).map(|k| a * u[k] + b * w[k]).collect()
                })
                .collect();
            assert!(affine_dim(&planar, 1e-8) <= 2);
            assert!(hull_volume(&planar) <= 1e-12);

            let solid: Vec<Vec<f64>> =
                (0..6).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
            if affine_dim(&solid, 1e-8) == 3 {
                assert!(hull_volume(&solid) > 1e-12);
            }
        }
    }

    #[test]
    fn hull_volume_is_invariant_under_rigid_motions() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..20 {
            let pts: Vec<Vec<f64>> =
                (0..7).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
            // Random orthogonal matrix from Gram-Schmidt on Gaussian columns.
            let mut q: Vec<Vec<f64>> = Vec::new();
            while q.len() < 3 {
                let mut v: Vec<f64> = random_unit(3, &mut rng);
                for b in &q {
                    let proj = dot(&v, b);
                    for k in 0..3 {
                        v[k] -= proj * b[k];
                    }
                }
                let n = norm(&v);
                if n > 1e-6 {
                    q.push(v.iter().map(|x| x / n).collect());
                }
            }
            let shift: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 10.0 - 5.0).collect();
            let moved: Vec<Vec<f64>> = pts
                .iter()
                .map(|p| (0..3).map(|i| dot(&q[i], p) + shift[i]).collect())
                .collect();
            let a = hull_volume(&pts);
            let b = hull_volume(&moved);
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
    }

    #[test]
    fn high_dimensional_volume_falls_back_to_monte_carlo() {
        // Unit cross-polytope in dimension 5: volume 2^5 / 5!.
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for k in 0..5 {
            for sign in [1.0, -1.0] {
                let mut e = vec![0.0; 5];
                e[k] = sign;
                pts.push(e);
            }
        }
        let expected = 32.0 / 120.0;
        let vol = hull_volume(&pts);
        assert!((vol - expected).abs() < 0.01, "estimate {vol} vs {expected}");
    }

    #[test]
    fn invalid_projection_matrices_are_rejected() {
        assert!(OrthoProjection::from_matrix(vec![vec![0.5, 0.0], vec![0.0, 1.0]]).is_err());
        assert!(OrthoProjection::from_matrix(vec![vec![1.0, 0.1], vec![0.0, 1.0]]).is_err());
    }
}
