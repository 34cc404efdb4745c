//! Trace-level verifiers: per-round volume contraction against the
//! `1 - alpha^d` cap, the convergence-round bound, one-step thickness
//! contraction under the broadcast projection, limit-subspace estimation,
//! the isolated-source impossibility witness, and the empty half-space
//! attraction zone. Verifiers never mutate the trace and report every
//! violating round, not just the first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adversary::{imposs_graph, AdversaryKind, AdversarySpec};
use crate::dynamics::{decompose_update, run, ExecutionTrace, StateVector, WeightRule};
use crate::geometry::{
    affine_dim, affine_dim_default_tol, direction_projection, dist_to_halfspace, hull_volume,
    thickness, HalfSpace, OrthoProjection,
};
use crate::scalar::r;
use crate::{Error, Real, Result};

/// One verified inequality `lhs <= rhs + tol`; `margin` is the slack
/// `rhs + tol - lhs` (negative exactly when the check fails).
#[derive(Clone, Debug)]
pub struct RoundCheck<T> {
    pub t: usize,
    pub lhs: T,
    pub rhs: T,
    pub margin: T,
    pub pass: bool,
}

impl<T: Real> RoundCheck<T> {
    fn bound(t: usize, lhs: T, rhs: T, tol: T) -> Self {
        let margin = rhs + tol - lhs;
        Self { t, lhs, rhs, margin, pass: margin >= T::zero() }
    }
}

/// Why a round was excluded from a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkipReason {
    /// No broadcasting set was designated for the round.
    EmptyBroadcastSet,
    /// The designated set is larger than the ambient dimension.
    BroadcastSetLargerThanDimension,
    /// The previous hull volume is already (numerically) zero.
    AlreadyDegenerate,
}

#[derive(Clone, Debug)]
pub struct SkippedRound {
    pub t: usize,
    pub reason: SkipReason,
}

/// Per-round hull-volume ratios against the `1 - alpha_t^d` cap.
#[derive(Clone, Debug)]
pub struct ContractionReport<T> {
    pub checks: Vec<RoundCheck<T>>,
    pub skipped: Vec<SkippedRound>,
    /// Measured minimum broadcasting weight per checked round.
    pub alphas: Vec<(usize, T)>,
}

impl<T: Real> ContractionReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn violations(&self) -> Vec<&RoundCheck<T>> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Checks `vol(P(t)) / vol(P(t-1)) <= 1 - alpha_t^d + tol` for every round
/// with a non-empty designated broadcasting set of size at most `d` and a
/// non-degenerate previous state; other rounds are skipped with a reason.
pub fn verify_volume_contraction<T: Real>(trace: &ExecutionTrace<T>, tol: T) -> ContractionReport<T> {
    let d = trace.d();
    let volumes: Vec<T> = (0..=trace.rounds()).map(|t| hull_volume(trace.state(t).points())).collect();
    // The ratio is undefined at volume zero. Numerically, a round is treated
    // as already degenerate when the volume hits this floor or when the
    // point spread is so small that the step's own rounding (absolute in the
    // coordinate scale) dominates the ratio.
    let volume_floor = (volumes[0] * r::<T>(1e-12)).max(T::min_positive_value());
    let spread_floor = r::<T>(1e-5) * (T::one() + trace.state(0).spread());
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let mut alphas = Vec::new();
    for t in 1..=trace.rounds() {
        let m_len = trace.record(t).round.m_set.len();
        if m_len == 0 {
            skipped.push(SkippedRound { t, reason: SkipReason::EmptyBroadcastSet });
            continue;
        }
        if m_len > d {
            skipped.push(SkippedRound { t, reason: SkipReason::BroadcastSetLargerThanDimension });
            continue;
        }
        if volumes[t - 1] <= volume_floor || trace.before(t).spread() <= spread_floor {
            skipped.push(SkippedRound { t, reason: SkipReason::AlreadyDegenerate });
            continue;
        }
        let alpha = trace.measured_alpha(t).expect("non-empty m_set");
        alphas.push((t, alpha));
        let ratio = volumes[t] / volumes[t - 1];
        let cap = T::one() - alpha.powi(d as i32);
        checks.push(RoundCheck::bound(t, ratio, cap, tol));
    }
    ContractionReport { checks, skipped, alphas }
}

/// Outcome of the convergence-round bound.
#[derive(Clone, Debug)]
pub struct ConvergenceReport<T> {
    /// Smallest measured minimum broadcasting weight over the trace.
    pub alpha: T,
    pub initial_volume: T,
    pub epsilon: T,
    /// Round by which the volume must be below `epsilon`:
    /// `ceil(alpha^-d * ln(vol(P(0)) / epsilon))`.
    pub bound_round: usize,
    pub volume_at_bound: T,
    /// First round whose volume is at most `epsilon`.
    pub first_round_within: Option<usize>,
    pub pass: bool,
}

/// Asserts `vol(P(t)) <= epsilon` at the bound round implied by the weakest
/// measured broadcasting weight. The trace must reach the bound round.
pub fn verify_convergence_bound<T: Real>(
    trace: &ExecutionTrace<T>,
    epsilon: T,
) -> Result<ConvergenceReport<T>> {
    let initial_volume = trace.initial_volume();
    if epsilon >= initial_volume {
        return Ok(ConvergenceReport {
            alpha: T::nan(),
            initial_volume,
            epsilon,
            bound_round: 0,
            volume_at_bound: initial_volume,
            first_round_within: Some(0),
            pass: true,
        });
    }
    let alpha = trace.min_measured_alpha()?;
    let d = trace.d() as i32;
    let bound = (alpha.powi(-d) * (initial_volume / epsilon).ln()).ceil();
    let bound_round = bound.to_usize().ok_or(Error::TraceTooShort {
        needed: usize::MAX,
        have: trace.rounds(),
    })?;
    if trace.rounds() < bound_round {
        return Err(Error::TraceTooShort { needed: bound_round, have: trace.rounds() });
    }
    let volume_at_bound = hull_volume(trace.state(bound_round).points());
    let first_round_within = (0..=trace.rounds())
        .find(|&t| hull_volume(trace.state(t).points()) <= epsilon);
    Ok(ConvergenceReport {
        alpha,
        initial_volume,
        epsilon,
        bound_round,
        volume_at_bound,
        first_round_within,
        pass: volume_at_bound <= epsilon,
    })
}

/// One-step thickness contraction plus monotonicity of thickness under
/// fixed projections.
#[derive(Clone, Debug)]
pub struct ThicknessReport<T> {
    /// `thickness(X(t), P_t) <= (1 - alpha_t) * thickness(X(t-1), P_t)`.
    pub checks: Vec<RoundCheck<T>>,
    /// `thickness(X(t), P) <= thickness(X(t-1), P)` for fixed projections.
    pub monotonicity: Vec<RoundCheck<T>>,
    /// Rounds whose broadcast projection failed the symmetry/idempotence
    /// validation.
    pub invalid_projections: Vec<usize>,
}

impl<T: Real> ThicknessReport<T> {
    pub fn passed(&self) -> bool {
        self.invalid_projections.is_empty()
            && self.checks.iter().all(|c| c.pass)
            && self.monotonicity.iter().all(|c| c.pass)
    }

    pub fn violations(&self) -> Vec<&RoundCheck<T>> {
        self.checks.iter().chain(&self.monotonicity).filter(|c| !c.pass).collect()
    }
}

/// Verifies, for every round `t`, the one-step contraction of the thickness
/// under the projection orthogonal to the broadcast direction space of
/// round `t`, within `tol`. Every round must have a non-empty designated
/// broadcasting set.
pub fn verify_thickness_contraction<T: Real>(
    trace: &ExecutionTrace<T>,
    tol: T,
) -> Result<ThicknessReport<T>> {
    let d = trace.d();
    let mut checks = Vec::new();
    let mut monotonicity = Vec::new();
    let mut invalid_projections = Vec::new();

    // Fixed projections for the monotonicity side: the identity plus two
    // seeded random kernels.
    let mut fixed = vec![OrthoProjection::identity(d)];
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    for kernel_dim in [1usize, 2] {
        if kernel_dim < d {
            let dirs: Vec<Vec<T>> = (0..kernel_dim)
                .map(|_| (0..d).map(|_| r::<T>(rng.gen::<f64>() * 2.0 - 1.0)).collect())
                .collect();
            fixed.push(OrthoProjection::with_kernel_spanned_by(&dirs, d));
        }
    }

    for t in 1..=trace.rounds() {
        let record = trace.record(t);
        if record.round.m_set.is_empty() {
            return Err(Error::RoundWithoutBroadcastSet { round: t });
        }
        let alpha = trace.measured_alpha(t).expect("non-empty m_set");
        let broadcast_points = trace.before(t).select(&record.round.m_set);
        let projection = direction_projection(&broadcast_points);
        if projection.validate(r::<T>(1e-10)).is_err() {
            invalid_projections.push(t);
        }
        let before = thickness(trace.before(t).points(), &projection);
        let after = thickness(trace.after(t).points(), &projection);
        checks.push(RoundCheck::bound(t, after, (T::one() - alpha) * before, tol));
        for p in &fixed {
            let lhs = thickness(trace.after(t).points(), p);
            let rhs = thickness(trace.before(t).points(), p);
            monotonicity.push(RoundCheck::bound(t, lhs, rhs, tol));
        }
    }
    Ok(ThicknessReport { checks, monotonicity, invalid_projections })
}

/// Estimated attracting affine subspace of the tail of an execution.
#[derive(Clone, Debug)]
pub struct SubspaceEstimate<T> {
    /// Number of trailing states pooled.
    pub window: usize,
    /// Orthonormal directions of the estimated subspace.
    pub basis: Vec<Vec<T>>,
    /// Estimated dimension (number of kept directions).
    pub dim: usize,
    /// Largest distance of a pooled point to the estimated subspace.
    pub residual: T,
}

/// Pools the last `window` states, centers them, and keeps the singular
/// directions whose root-mean-square spread exceeds `tol`.
pub fn estimate_limit_subspace<T: Real>(
    trace: &ExecutionTrace<T>,
    window: usize,
    tol: T,
) -> Result<SubspaceEstimate<T>> {
    if window == 0 || window > trace.rounds() {
        return Err(Error::WindowTooLong { window, rounds: trace.rounds() });
    }
    let mut pooled: Vec<Vec<T>> = Vec::with_capacity(window * trace.n());
    for t in trace.rounds() + 1 - window..=trace.rounds() {
        pooled.extend(trace.state(t).points().iter().cloned());
    }
    let center = crate::geometry::centroid(&pooled);
    let rows: Vec<Vec<T>> = pooled.iter().map(|p| crate::geometry::sub(p, &center)).collect();
    let svd = crate::geometry::jacobi_svd(&rows, trace.d());
    let rms_scale = r::<T>((pooled.len() as f64).sqrt());
    let mut basis = Vec::new();
    for (sigma, vector) in svd.singular_values.iter().zip(&svd.right_vectors) {
        if *sigma / rms_scale > tol {
            basis.push(vector.clone());
        }
    }
    let mut residual = T::zero();
    for row in &rows {
        let mut rest = row.clone();
        for b in &basis {
            let proj = crate::geometry::dot(row, b);
            for (x, &bk) in rest.iter_mut().zip(b) {
                *x = *x - proj * bk;
            }
        }
        residual = residual.max(crate::geometry::norm(&rest));
    }
    Ok(SubspaceEstimate { window, dim: basis.len(), basis, residual })
}

/// Per-round impossibility witness: source values stay exactly constant and
/// keep full affine dimension.
#[derive(Clone, Debug)]
pub struct ImpossibilityRound {
    pub t: usize,
    pub sources_constant: bool,
    pub witness_dim: usize,
}

#[derive(Clone, Debug)]
pub struct ImpossibilityReport {
    /// The `s + 2` isolated source processes.
    pub sources: Vec<usize>,
    /// Required affine dimension of the source outputs (`s + 1`).
    pub expected_dim: usize,
    pub rounds: Vec<ImpossibilityRound>,
}

impl ImpossibilityReport {
    pub fn passed(&self) -> bool {
        self.rounds.iter().all(|r| r.sources_constant && r.witness_dim == self.expected_dim)
    }
}

/// Runs the averaging rule on the static isolated-source graph with the
/// witness initial vectors (`s + 2` sources at the standard basis of
/// `R^(s+1)` plus the origin) and checks that the source outputs remain
/// exactly constant with affine dimension `s + 1` every round: no
/// `s`-dimensional subspace can attract them.
pub fn verify_impossibility<T: Real>(
    n: usize,
    s: usize,
    rounds: usize,
    rule: &WeightRule<T>,
) -> Result<ImpossibilityReport> {
    let k = s + 1;
    let graph = imposs_graph(n, k)?;
    let d = k;
    let sources: Vec<usize> = (0..=k).collect();
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let mut p = vec![T::zero(); d];
        if i < k {
            p[i] = T::one();
        } else if i > k {
            p[0] = T::one(); // attached to source 0
        }
        points.push(p);
    }
    let x0 = StateVector::new(points)?;
    let spec = AdversarySpec::new(n, AdversaryKind::Static { graph }, None, 0)?;
    let trace = run(&spec, rule, &x0, rounds, 1)?;

    let expected_dim = k;
    let mut report_rounds = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let state = trace.state(t);
        let sources_constant =
            sources.iter().all(|&i| state.point(i) == x0.point(i));
        let witness_points = state.select(&sources);
        let witness_dim = affine_dim(&witness_points, affine_dim_default_tol::<T>());
        report_rounds.push(ImpossibilityRound { t, sources_constant, witness_dim });
    }
    Ok(ImpossibilityReport { sources, expected_dim, rounds: report_rounds })
}

/// Per-process reconstruction checks of the convex decomposition.
#[derive(Clone, Debug)]
pub struct DecompositionReport<T> {
    /// One check per (round, process): `lhs` is the worst of the
    /// reconstruction error, the certificate-sum error, and the most
    /// negative certificate coefficient.
    pub checks: Vec<RoundCheck<T>>,
    pub skipped: Vec<SkippedRound>,
}

impl<T: Real> DecompositionReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn violations(&self) -> Vec<&RoundCheck<T>> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Decomposes every process update against the round's measured minimum
/// broadcasting weight and checks, within `tol`, that the reconstruction
/// reproduces the step output and that both convexity certificates are
/// valid distributions. Rounds without a designated broadcasting set are
/// skipped.
pub fn verify_decomposition<T: Real>(trace: &ExecutionTrace<T>, tol: T) -> DecompositionReport<T> {
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for t in 1..=trace.rounds() {
        let record = trace.record(t);
        if record.round.m_set.is_empty() {
            skipped.push(SkippedRound { t, reason: SkipReason::EmptyBroadcastSet });
            continue;
        }
        let alpha = trace.measured_alpha(t).expect("non-empty m_set");
        for i in 0..trace.n() {
            let decomposition = match decompose_update(
                record.weights.row(i),
                trace.before(t),
                &record.round.m_set,
                alpha,
            ) {
                Ok(d) => d,
                Err(_) => {
                    // Can only happen on corrupted weights; report as failure.
                    checks.push(RoundCheck::bound(t, T::infinity(), T::zero(), tol));
                    continue;
                }
            };
            let rebuilt = decomposition.reconstruct(alpha);
            let error = crate::geometry::dist(&rebuilt, trace.after(t).point(i));
            let certificate_error = certificate_error(&decomposition.xi_coefficients)
                .max(certificate_error(&decomposition.xi_prime_coefficients));
            checks.push(RoundCheck::bound(t, error.max(certificate_error), T::zero(), tol));
        }
    }
    DecompositionReport { checks, skipped }
}

/// How far the coefficients are from being a probability distribution.
fn certificate_error<T: Real>(coefficients: &[T]) -> T {
    let sum = coefficients.iter().fold(T::zero(), |acc, &c| acc + c);
    let negativity =
        coefficients.iter().fold(T::zero(), |acc, &c| acc.max((-c).max(T::zero())));
    (sum - T::one()).abs().max(negativity)
}

/// Options for the empty half-space attraction check.
#[derive(Clone, Copy, Debug)]
pub struct HalfSpaceZoneOptions<T> {
    /// Half-spaces sampled per round.
    pub trials: usize,
    /// Scale of the outward offset pushing each supporting hyperplane away
    /// from the hull.
    pub sigma: T,
    pub seed: u64,
    pub tol: T,
}

impl<T: Real> Default for HalfSpaceZoneOptions<T> {
    fn default() -> Self {
        Self { trials: 50, sigma: r::<T>(0.5), seed: 0xD15C, tol: r::<T>(1e-9) }
    }
}

/// Per-round, per-trial checks of the attraction zone.
#[derive(Clone, Debug)]
pub struct HalfSpaceZoneReport<T> {
    pub checks: Vec<RoundCheck<T>>,
    pub skipped: Vec<SkippedRound>,
}

impl<T: Real> HalfSpaceZoneReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn violations(&self) -> Vec<&RoundCheck<T>> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// For each round, samples open half-spaces empty of `X(t-1)` (supporting
/// hyperplanes pushed outward by a half-normal offset) and checks
/// `dist(X(t), H) >= alpha_t * dist(P_M(t-1), H)`. The polytope distance
/// reduces to the least vertex distance because the half-space distance is
/// linear over the hull.
pub fn verify_halfspace_zone<T: Real>(
    trace: &ExecutionTrace<T>,
    options: HalfSpaceZoneOptions<T>,
) -> HalfSpaceZoneReport<T> {
    assert!(options.trials >= 1, "at least one trial per round");
    let d = trace.d();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for t in 1..=trace.rounds() {
        let record = trace.record(t);
        if record.round.m_set.is_empty() {
            skipped.push(SkippedRound { t, reason: SkipReason::EmptyBroadcastSet });
            continue;
        }
        let alpha = trace.measured_alpha(t).expect("non-empty m_set");
        let previous = trace.before(t);
        let current = trace.after(t);
        for _ in 0..options.trials {
            let normal: Vec<T> = random_unit(d, &mut rng);
            let offset = r::<T>(standard_normal(&mut rng).abs()) * options.sigma;
            // Supporting point: the vertex minimizing <x, normal>.
            let support = previous
                .points()
                .iter()
                .min_by(|a, b| {
                    crate::geometry::dot(a, &normal)
                        .partial_cmp(&crate::geometry::dot(b, &normal))
                        .expect("finite coordinates")
                })
                .expect("non-empty state");
            let q = crate::geometry::sub(support, &crate::geometry::scale(&normal, offset));
            let half_space = HalfSpace::new(q, normal).expect("unit normal");

            let lhs = current
                .points()
                .iter()
                .map(|p| half_space.signed_offset(p))
                .fold(T::infinity(), T::min);
            let rhs_dist = record
                .round
                .m_set
                .iter()
                .map(|&j| {
                    dist_to_halfspace(previous.point(j), &half_space)
                        .unwrap_or(T::zero())
                        .max(T::zero())
                })
                .fold(T::infinity(), T::min);
            checks.push(RoundCheck {
                t,
                lhs,
                rhs: alpha * rhs_dist,
                margin: lhs - alpha * rhs_dist + options.tol,
                pass: lhs >= alpha * rhs_dist - options.tol,
            });
        }
    }
    HalfSpaceZoneReport { checks, skipped }
}

/// Standard normal draw via Box-Muller; consumes two uniforms.
fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Uniform unit vector.
fn random_unit<T: Real>(d: usize, rng: &mut impl Rng) -> Vec<T> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| standard_normal(rng)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-9 {
            return v.iter().map(|&x| r::<T>(x / len)).collect();
        }
    }
}
