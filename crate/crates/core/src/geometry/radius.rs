//! Rotational bodies described by a sampled concave radius function along
//! the first axis, unit-ball volumes, and the closed-form bounds on the
//! volumes of the two segments split at the `alpha`-quantile.

use crate::scalar::r;
use crate::{Error, Real, Result};

/// A nonnegative function on `[0, h]` given by finitely many samples, with
/// `xi = 0` and `xi = h` included. Construction verifies the discrete
/// concavity (midpoint) inequality on every consecutive sample triple.
#[derive(Clone, Debug)]
pub struct RadiusFunction<T> {
    h: T,
    samples: Vec<(T, T)>,
}

impl<T: Real> RadiusFunction<T> {
    pub fn new(h: T, samples: Vec<(T, T)>) -> Result<Self> {
        if !h.is_finite() || h <= T::zero() || samples.len() < 2 {
            return Err(Error::BadRadiusDomain);
        }
        if samples.iter().any(|&(x, v)| !x.is_finite() || !v.is_finite()) {
            return Err(Error::BadRadiusDomain);
        }
        let first = samples[0].0;
        let last = samples[samples.len() - 1].0;
        let edge_tol = r::<T>(1e-12) * h;
        if first.abs() > edge_tol || (last - h).abs() > edge_tol {
            return Err(Error::BadRadiusDomain);
        }
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::BadRadiusDomain);
            }
        }
        let max_r = samples.iter().fold(T::zero(), |acc, &(_, v)| acc.max(v));
        if samples.iter().any(|&(_, v)| v < T::zero()) {
            return Err(Error::BadRadiusDomain);
        }
        let tol = r::<T>(1e-9) * max_r.max(T::one());
        for w in samples.windows(3) {
            let (x0, v0) = w[0];
            let (x1, v1) = w[1];
            let (x2, v2) = w[2];
            let chord = v0 + (v2 - v0) * (x1 - x0) / (x2 - x0);
            if v1 < chord - tol {
                return Err(Error::NonConcaveSamples { xi: x1.to_f64().unwrap_or(f64::NAN) });
            }
        }
        Ok(Self { h, samples })
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn samples(&self) -> &[(T, T)] {
        &self.samples
    }

    /// Piecewise-linear interpolation of the samples.
    pub fn value_at(&self, xi: T) -> T {
        if xi <= self.samples[0].0 {
            return self.samples[0].1;
        }
        if xi >= self.samples[self.samples.len() - 1].0 {
            return self.samples[self.samples.len() - 1].1;
        }
        let idx = self.samples.partition_point(|&(x, _)| x <= xi);
        let (x0, v0) = self.samples[idx - 1];
        let (x1, v1) = self.samples[idx];
        v0 + (v1 - v0) * (xi - x0) / (x1 - x0)
    }
}

/// Volume of the unit ball in `m` dimensions (`m = 0` gives 1).
pub fn ball_coeff<T: Real>(m: usize) -> T {
    let mut values = [T::one(), r::<T>(2.0)];
    if m <= 1 {
        return values[m];
    }
    for k in 2..=m {
        let next = values[0] * (T::PI() + T::PI()) / r::<T>(k as f64);
        values[0] = values[1];
        values[1] = next;
    }
    values[1]
}

/// Quadrature values and closed-form caps for the two rotational segments
/// split at `(1 - alpha) * h`.
#[derive(Clone, Debug)]
pub struct SegmentVolumeBounds<T> {
    pub left_integral: T,
    pub left_bound: T,
    pub left_budget: T,
    pub right_integral: T,
    pub right_bound: T,
    pub right_budget: T,
}

impl<T: Real> SegmentVolumeBounds<T> {
    /// The left integral must not exceed its cap and the right integral must
    /// not fall short of its floor, each within the quadrature budget.
    pub fn holds(&self) -> bool {
        let slack_l = r::<T>(1e-12) * self.left_bound.abs().max(T::one());
        let slack_r = r::<T>(1e-12) * self.right_bound.abs().max(T::one());
        self.left_integral <= self.left_bound + self.left_budget + slack_l
            && self.right_integral >= self.right_bound - self.right_budget - slack_r
    }
}

/// Integrates `C_{d-1} r(xi)^{d-1}` over both segments by the trapezoid rule
/// on the given samples and evaluates the closed-form segment bounds with
/// `r0 = r((1 - alpha) h)`.
pub fn segment_volume_bounds<T: Real>(
    radius: &RadiusFunction<T>,
    alpha: T,
    d: usize,
) -> Result<SegmentVolumeBounds<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::BadQuantile);
    }
    assert!(d >= 1, "dimension must be positive");
    let h = radius.h();
    let split = (T::one() - alpha) * h;
    let r0 = radius.value_at(split);
    let coeff = ball_coeff::<T>(d - 1);

    let integrand = |value: T| -> T {
        if d == 1 {
            coeff
        } else {
            coeff * value.powi((d - 1) as i32)
        }
    };

    let mut left: Vec<(T, T)> = Vec::new();
    let mut right: Vec<(T, T)> = Vec::new();
    for &(x, v) in radius.samples() {
        if x < split {
            left.push((x, integrand(v)));
        } else if x > split {
            right.push((x, integrand(v)));
        }
    }
    left.push((split, integrand(r0)));
    right.insert(0, (split, integrand(r0)));

    let (left_integral, left_budget) = trapezoid(&left);
    let (right_integral, right_budget) = trapezoid(&right);

    let alpha_pow = if d == 1 { T::one() } else { alpha.powi((d - 1) as i32) };
    let r0_pow = if d == 1 { T::one() } else { r0.powi((d - 1) as i32) };
    let base = coeff * r0_pow * h / (alpha_pow * r::<T>(d as f64));
    let left_bound = base * (T::one() - alpha.powi(d as i32));
    let right_bound = base * alpha.powi(d as i32);

    Ok(SegmentVolumeBounds {
        left_integral,
        left_bound,
        left_budget,
        right_integral,
        right_bound,
        right_budget,
    })
}

/// Composite trapezoid rule plus an error budget from second divided
/// differences of the integrand (with a 1.5x safety factor for kinks that
/// fall inside an interval).
fn trapezoid<T: Real>(samples: &[(T, T)]) -> (T, T) {
    let mut integral = T::zero();
    for w in samples.windows(2) {
        let width = w[1].0 - w[0].0;
        integral = integral + (w[0].1 + w[1].1) * width / r::<T>(2.0);
    }
    let mut curvature = vec![T::zero(); samples.len().saturating_sub(1)];
    for (i, w) in samples.windows(3).enumerate() {
        let (x0, g0) = w[0];
        let (x1, g1) = w[1];
        let (x2, g2) = w[2];
        let d01 = (g1 - g0) / (x1 - x0);
        let d12 = (g2 - g1) / (x2 - x1);
        let second = ((d12 - d01) / (x2 - x0)).abs() * r::<T>(2.0);
        curvature[i] = curvature[i].max(second);
        curvature[i + 1] = curvature[i + 1].max(second);
    }
    let mut budget = T::zero();
    for (i, w) in samples.windows(2).enumerate() {
        let width = w[1].0 - w[0].0;
        budget = budget + width * width * width / r::<T>(12.0) * curvature[i];
    }
    (integral, budget * r::<T>(1.5))
}
