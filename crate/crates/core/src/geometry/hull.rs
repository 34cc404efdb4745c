//! Convex-hull volume: an exact incremental (beneath-beyond) hull with a
//! simplex-fan decomposition for low dimensions, and a Monte Carlo
//! membership estimator backed by brute-force supporting half-spaces for
//! higher dimensions and for oracle checks.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::{centroid, det, dot, jacobi_svd, norm, sub};
use crate::scalar::r;
use crate::Real;

/// Monte Carlo volume estimate with its standard error.
#[derive(Clone, Debug)]
pub struct VolumeEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub samples: usize,
}

struct Facet<T> {
    verts: Vec<usize>,
    normal: Vec<T>,
    offset: T,
}

/// Exact hull volume for `1 <= d <= 4` (the incremental construction works
/// for any `d`, but the facet count grows quickly). Returns 0 when the
/// points span an affine subspace of dimension below `d`.
pub(crate) fn hull_volume_exact<T: Real>(points: &[Vec<T>]) -> T {
    let d = points[0].len();
    if d == 1 {
        let mut lo = points[0][0];
        let mut hi = points[0][0];
        for p in points {
            lo = lo.min(p[0]);
            hi = hi.max(p[0]);
        }
        return hi - lo;
    }

    let scale = spread_scale(points);
    if scale == T::zero() {
        return T::zero();
    }
    let Some(simplex) = initial_simplex(points, scale) else {
        return T::zero();
    };

    let interior = centroid(&simplex.iter().map(|&i| points[i].clone()).collect::<Vec<_>>());
    let mut facets: Vec<Facet<T>> = Vec::new();
    for skip in 0..simplex.len() {
        let verts: Vec<usize> =
            simplex.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
        if let Some(f) = make_facet(points, verts, &interior) {
            facets.push(f);
        }
    }

    let eps = r::<T>(1e-12) * scale;
    for (p_idx, p) in points.iter().enumerate() {
        if simplex.contains(&p_idx) {
            continue;
        }
        let mut visible = Vec::new();
        let mut hidden = Vec::new();
        for f in facets.drain(..) {
            if dot(&f.normal, p) - f.offset > eps {
                visible.push(f);
            } else {
                hidden.push(f);
            }
        }
        if visible.is_empty() {
            facets = hidden;
            continue;
        }
        // A ridge of exactly one visible facet borders a hidden facet: it is
        // on the horizon and spawns a replacement facet through `p`.
        let mut ridge_count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for f in &visible {
            for skip in 0..f.verts.len() {
                let mut ridge: Vec<usize> = f
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                ridge.sort_unstable();
                *ridge_count.entry(ridge).or_insert(0) += 1;
            }
        }
        facets = hidden;
        for (ridge, count) in ridge_count {
            if count == 1 {
                let mut verts = ridge;
                verts.push(p_idx);
                if let Some(f) = make_facet(points, verts, &interior) {
                    facets.push(f);
                }
            }
        }
    }

    let factorial = (1..=d).fold(T::one(), |acc, k| acc * r::<T>(k as f64));
    let mut volume = T::zero();
    for f in &facets {
        let rows: Vec<Vec<T>> = f.verts.iter().map(|&v| sub(&points[v], &interior)).collect();
        volume = volume + det(rows).abs() / factorial;
    }
    volume
}

/// Greedy affinely independent subset of size `d + 1`, or `None` when the
/// points are (numerically) contained in a lower-dimensional flat.
fn initial_simplex<T: Real>(points: &[Vec<T>], scale: T) -> Option<Vec<usize>> {
    let d = points[0].len();
    let tol = r::<T>(1e-12) * scale;
    let base = 0usize;
    let mut chosen = vec![base];
    let mut basis: Vec<Vec<T>> = Vec::new();
    for _ in 0..d {
        let mut best: Option<(usize, T, Vec<T>)> = None;
        for (idx, p) in points.iter().enumerate() {
            if chosen.contains(&idx) {
                continue;
            }
            let mut resid = sub(p, &points[base]);
            for b in &basis {
                let proj = dot(&resid, b);
                for (rk, bk) in resid.iter_mut().zip(b) {
                    *rk = *rk - proj * *bk;
                }
            }
            let len = norm(&resid);
            if best.as_ref().is_none_or(|(_, cur, _)| len > *cur) {
                best = Some((idx, len, resid));
            }
        }
        let (idx, len, resid) = best?;
        if len <= tol {
            return None;
        }
        basis.push(scale_unit(&resid, len));
        chosen.push(idx);
    }
    Some(chosen)
}

fn scale_unit<T: Real>(v: &[T], len: T) -> Vec<T> {
    v.iter().map(|&x| x / len).collect()
}

/// Oriented hyperplane through `verts`, facing away from `interior`.
fn make_facet<T: Real>(points: &[Vec<T>], verts: Vec<usize>, interior: &[T]) -> Option<Facet<T>> {
    let d = points[0].len();
    let diffs: Vec<Vec<T>> =
        verts[1..].iter().map(|&v| sub(&points[v], &points[verts[0]])).collect();
    let svd = jacobi_svd(&diffs, d);
    // The facet spans d-1 independent directions; anything less is a sliver.
    if d >= 2 && svd.singular_values[d - 2] <= r::<T>(1e-12) * svd.singular_values[0].max(T::one())
    {
        return None;
    }
    let mut normal = svd.right_vectors[d - 1].clone();
    let mut offset = dot(&normal, &points[verts[0]]);
    if dot(&normal, interior) > offset {
        normal = normal.iter().map(|&x| -x).collect();
        offset = -offset;
    }
    Some(Facet { verts, normal, offset })
}

fn spread_scale<T: Real>(points: &[Vec<T>]) -> T {
    let mut scale = T::zero();
    for p in points {
        scale = scale.max(norm(&sub(p, &points[0])));
    }
    scale
}

/// Supporting half-spaces `(unit normal, offset)` with `<x, n> <= offset`
/// for every input point, found by brute force over all `d`-subsets. This is
/// an independent route to the hull boundary, used for membership tests.
pub(crate) fn supporting_halfspaces<T: Real>(points: &[Vec<T>]) -> Vec<(Vec<T>, T)> {
    let d = points[0].len();
    let m = points.len();
    let scale = spread_scale(points).max(T::one());
    let tol = r::<T>(1e-9) * scale;
    let mut planes = Vec::new();
    if m < d {
        return planes;
    }
    for combo in (0..m).combinations(d) {
        let diffs: Vec<Vec<T>> =
            combo[1..].iter().map(|&v| sub(&points[v], &points[combo[0]])).collect();
        let svd = if d == 1 { None } else { Some(jacobi_svd(&diffs, d)) };
        let normal = match (&svd, d) {
            (None, _) => vec![T::one()],
            (Some(s), _) => {
                if d >= 2 && s.singular_values[d - 2] <= r::<T>(1e-10) * scale {
                    continue; // affinely dependent subset: no unique plane
                }
                s.right_vectors[d - 1].clone()
            }
        };
        let level = dot(&normal, &points[combo[0]]);
        let mut lo = level;
        let mut hi = level;
        for p in points {
            let v = dot(&normal, p);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi <= level + tol {
            planes.push((normal.clone(), level + tol));
        }
        if lo >= level - tol {
            planes.push((normal.iter().map(|&x| -x).collect(), -(level - tol)));
        }
    }
    planes
}

/// Monte Carlo hull volume: uniform samples in the bounding box classified
/// against the brute-force supporting half-spaces.
pub fn monte_carlo_volume<T: Real>(points: &[Vec<T>], samples: usize, seed: u64) -> VolumeEstimate<T> {
    let d = points[0].len();
    let mut lo = points[0].clone();
    let mut hi = points[0].clone();
    for p in points {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let box_volume = (0..d).fold(T::one(), |acc, k| acc * (hi[k] - lo[k]));
    if box_volume == T::zero() {
        return VolumeEstimate { value: T::zero(), std_error: T::zero(), samples };
    }
    let planes = supporting_halfspaces(points);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inside = 0usize;
    let mut x = vec![T::zero(); d];
    for _ in 0..samples {
        for k in 0..d {
            let u: f64 = rng.gen();
            x[k] = lo[k] + (hi[k] - lo[k]) * r::<T>(u);
        }
        if planes.iter().all(|(n, off)| dot(n, &x) <= *off) {
            inside += 1;
        }
    }
    let frac = r::<T>(inside as f64 / samples as f64);
    let value = box_volume * frac;
    let std_error = box_volume * (frac * (T::one() - frac) / r::<T>(samples as f64)).sqrt();
    VolumeEstimate { value, std_error, samples }
}
