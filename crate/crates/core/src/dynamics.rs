//! The averaging engine: weight rules, the round update, minimum
//! broadcasting weight, the convex decomposition of a step against the
//! broadcasting set, and full seeded executions producing traces.

use serde::{Deserialize, Serialize};

use crate::adversary::{weight_rng, AdversarySpec, RelaySchedule, ScheduledRound};
use crate::geometry::{self, hull_volume};
use crate::scalar::r;
use crate::{Error, Real, Result};

/// The `n` process vectors in `R^d` at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    d: usize,
    points: Vec<Vec<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn new(points: Vec<Vec<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::ShapeMismatch);
        }
        let d = points[0].len();
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(Error::ShapeMismatch);
        }
        for (process, p) in points.iter().enumerate() {
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteState { process });
            }
        }
        Ok(Self { d, points })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    /// Points selected by the given (sorted) index set.
    pub fn select(&self, indices: &[usize]) -> Vec<Vec<T>> {
        indices.iter().map(|&i| self.points[i].clone()).collect()
    }

    /// Largest pairwise distance.
    pub fn spread(&self) -> T {
        let mut best = T::zero();
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                best = best.max(geometry::dist(&self.points[i], &self.points[j]));
            }
        }
        best
    }
}

/// Row-stochastic averaging weights for one round; `w[i][j]` is the weight
/// process `i` places on the vector received from `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix<T> {
    w: Vec<Vec<T>>,
}

impl<T: Real> WeightMatrix<T> {
    /// Wraps rows without validation; the invariants are checked against a
    /// round graph by [`WeightMatrix::validate`], so that deliberately
    /// corrupted tables can flow into negative-control checks.
    pub fn from_rows(w: Vec<Vec<T>>) -> Self {
        Self { w }
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.w[i]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.w
    }

    /// Checks shape, nonnegativity, row sums within `tol` of 1, and support
    /// confined to in-edges of `graph`.
    pub fn validate(&self, graph: &crate::graph::CommGraph, tol: T) -> Result<()> {
        let n = graph.n();
        if self.w.len() != n || self.w.iter().any(|row| row.len() != n) {
            return Err(Error::BadWeightTable { n });
        }
        for (i, row) in self.w.iter().enumerate() {
            let mut sum = T::zero();
            for (j, &value) in row.iter().enumerate() {
                if value < T::zero() || (value > T::zero() && !graph.has_edge(j, i)) {
                    return Err(Error::UnsupportedWeight {
                        row: i,
                        col: j,
                        value: value.to_f64().unwrap_or(f64::NAN),
                    });
                }
                sum = sum + value;
            }
            if (sum - T::one()).abs() > tol {
                return Err(Error::RowNotStochastic {
                    row: i,
                    sum: sum.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }
}

/// How the per-round weights are chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
#[serde(bound(serialize = "T: serde::Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
pub enum WeightRule<T> {
    /// Uniform weight over the in-neighborhood.
    EqualNeighbor,
    /// Grants every in-neighbor at least `alpha` and spreads the remaining
    /// mass uniformly over the in-neighborhood simplex.
    RandomAlphaSafe { alpha: T },
    /// A fixed table, used verbatim (not normalized, not validated here).
    Custom { table: Vec<Vec<T>> },
}

/// Evaluates the rule on one scheduled round. Rows of the stochastic rules
/// are re-normalized to absorb rounding. `rng` drives the random rule and is
/// untouched by the deterministic ones.
pub fn weights_for<T: Real>(
    rule: &WeightRule<T>,
    round: &ScheduledRound,
    rng: &mut impl rand::Rng,
) -> Result<WeightMatrix<T>> {
    let n = round.graph.n();
    let mut rows = vec![vec![T::zero(); n]; n];
    match rule {
        WeightRule::EqualNeighbor => {
            for (i, row) in rows.iter_mut().enumerate() {
                let neighbors = round.graph.in_neighbors(i);
                let share = T::one() / r::<T>(neighbors.len() as f64);
                for j in neighbors {
                    row[j] = share;
                }
            }
        }
        WeightRule::RandomAlphaSafe { alpha } => {
            let alpha = *alpha;
            let max_in_degree =
                (0..n).map(|i| round.graph.in_neighbors(i).len()).max().unwrap_or(1);
            if alpha <= T::zero() || alpha * r::<T>(max_in_degree as f64) > T::one() {
                return Err(Error::InfeasibleAlpha {
                    alpha: alpha.to_f64().unwrap_or(f64::NAN),
                    max_in_degree,
                });
            }
            for (i, row) in rows.iter_mut().enumerate() {
                let neighbors = round.graph.in_neighbors(i);
                let deg = r::<T>(neighbors.len() as f64);
                let residual = T::one() - alpha * deg;
                // Uniform point on the simplex via normalized exponentials.
                let draws: Vec<T> = neighbors
                    .iter()
                    .map(|_| {
                        let u: f64 = rng.gen::<f64>();
                        r::<T>(-(1.0 - u).max(f64::MIN_POSITIVE).ln())
                    })
                    .collect();
                let total = draws.iter().fold(T::zero(), |acc, &x| acc + x);
                for (j, e) in neighbors.into_iter().zip(draws) {
                    row[j] = alpha + residual * e / total;
                }
            }
        }
        WeightRule::Custom { table } => {
            if table.len() != n || table.iter().any(|row| row.len() != n) {
                return Err(Error::BadWeightTable { n });
            }
            return Ok(WeightMatrix::from_rows(table.clone()));
        }
    }
    for row in &mut rows {
        let sum = row.iter().fold(T::zero(), |acc, &x| acc + x);
        for x in row.iter_mut() {
            *x = *x / sum;
        }
    }
    Ok(WeightMatrix::from_rows(rows))
}

/// One averaging round: `x'_i = sum_j w[i][j] x_j`.
pub fn step<T: Real>(x: &StateVector<T>, w: &WeightMatrix<T>) -> Result<StateVector<T>> {
    let n = x.n();
    if w.n() != n || w.rows().iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch);
    }
    let d = x.d();
    let mut points = vec![vec![T::zero(); d]; n];
    for (i, out) in points.iter_mut().enumerate() {
        for (j, &weight) in w.row(i).iter().enumerate() {
            if weight != T::zero() {
                for (o, &xk) in out.iter_mut().zip(x.point(j)) {
                    *o = *o + weight * xk;
                }
            }
        }
    }
    StateVector::new(points)
}

/// Least total weight any process places on the broadcasting set:
/// `min_i sum_{j in m_set} w[i][j]`.
pub fn min_broadcast_weight<T: Real>(w: &WeightMatrix<T>, m_set: &[usize]) -> Result<T> {
    if m_set.is_empty() {
        return Err(Error::EmptyBroadcastSet);
    }
    let mut best = T::infinity();
    for i in 0..w.n() {
        let mass = m_set.iter().fold(T::zero(), |acc, &j| acc + w.row(i)[j]);
        best = best.min(mass);
    }
    Ok(best)
}

/// Convex decomposition of one process update against the broadcasting set:
/// `x_i(t) = alpha * xi + (1 - alpha) * xi_prime` with `xi` a convex
/// combination of broadcast values and `xi_prime` of all values.
#[derive(Clone, Debug)]
pub struct Decomposition<T> {
    /// Point of the broadcast polytope.
    pub xi: Vec<T>,
    /// Point of the full polytope.
    pub xi_prime: Vec<T>,
    /// Convex coefficients of `xi` over `m_set` (same order).
    pub xi_coefficients: Vec<T>,
    /// Convex coefficients of `xi_prime` over all processes.
    pub xi_prime_coefficients: Vec<T>,
}

impl<T: Real> Decomposition<T> {
    /// `alpha * xi + (1 - alpha) * xi_prime`, which must reproduce the step
    /// output of the decomposed process.
    pub fn reconstruct(&self, alpha: T) -> Vec<T> {
        geometry::add(
            &geometry::scale(&self.xi, alpha),
            &geometry::scale(&self.xi_prime, T::one() - alpha),
        )
    }
}

/// Splits the update of the process with weight row `w_row` into the
/// broadcast average `xi` and the complementary point `xi_prime`, with
/// convexity certificates. Requires `0 < alpha <= w_M` where `w_M` is the
/// row's total broadcast mass.
pub fn decompose_update<T: Real>(
    w_row: &[T],
    x: &StateVector<T>,
    m_set: &[usize],
    alpha: T,
) -> Result<Decomposition<T>> {
    if m_set.is_empty() {
        return Err(Error::EmptyBroadcastSet);
    }
    if w_row.len() != x.n() {
        return Err(Error::ShapeMismatch);
    }
    if alpha <= T::zero() {
        return Err(Error::AlphaNotPositive);
    }
    let w_m = m_set.iter().fold(T::zero(), |acc, &j| acc + w_row[j]);
    if alpha > w_m {
        return Err(Error::AlphaExceedsBroadcastMass {
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
            w_m: w_m.to_f64().unwrap_or(f64::NAN),
        });
    }
    let d = x.d();

    let xi_coefficients: Vec<T> = m_set.iter().map(|&j| w_row[j] / w_m).collect();
    let mut xi = vec![T::zero(); d];
    for (c, &j) in xi_coefficients.iter().zip(m_set) {
        for (out, &xk) in xi.iter_mut().zip(x.point(j)) {
            *out = *out + *c * xk;
        }
    }

    let one = T::one();
    let eps = T::epsilon() * r::<T>(8.0);
    let (xi_prime, xi_prime_coefficients) = if one - w_m <= eps || one - alpha <= eps {
        // All mass on the broadcast set (or alpha = 1 forces it): the
        // complementary point collapses onto xi.
        let mut coeffs = vec![T::zero(); x.n()];
        for (c, &j) in xi_coefficients.iter().zip(m_set) {
            coeffs[j] = *c;
        }
        (xi.clone(), coeffs)
    } else {
        // hat_xi is the average over the complement, and xi_prime blends it
        // with xi so that alpha * xi + (1 - alpha) * xi_prime telescopes back
        // to w_M * xi + (1 - w_M) * hat_xi.
        let mut hat = vec![T::zero(); d];
        let complement_mass = one - w_m;
        for (j, &weight) in w_row.iter().enumerate() {
            if m_set.contains(&j) {
                continue;
            }
            let c = weight / complement_mass;
            for (out, &xk) in hat.iter_mut().zip(x.point(j)) {
                *out = *out + c * xk;
            }
        }
        let blend_xi = (w_m - alpha) / (one - alpha);
        let blend_hat = (one - w_m) / (one - alpha);
        let xi_prime = geometry::add(&geometry::scale(&xi, blend_xi), &geometry::scale(&hat, blend_hat));
        let mut coeffs = vec![T::zero(); x.n()];
        for (c, &j) in xi_coefficients.iter().zip(m_set) {
            coeffs[j] = blend_xi * *c;
        }
        for (j, coeff) in coeffs.iter_mut().enumerate() {
            if !m_set.contains(&j) {
                *coeff = w_row[j] / (one - alpha);
            }
        }
        (xi_prime, coeffs)
    };

    Ok(Decomposition { xi, xi_prime, xi_coefficients, xi_prime_coefficients })
}

/// One executed round: the schedule plus the weights actually used.
#[derive(Clone, Debug)]
pub struct RoundRecord<T> {
    pub round: ScheduledRound,
    pub weights: WeightMatrix<T>,
}

/// A complete execution: states `x(0), ..., x(rounds)` and per-round
/// records. State `t` of a record equals state `t - 1`'s successor by
/// construction, so the before/after views below always agree.
#[derive(Clone, Debug)]
pub struct ExecutionTrace<T> {
    d: usize,
    n: usize,
    initial_volume: T,
    states: Vec<StateVector<T>>,
    records: Vec<RoundRecord<T>>,
}

impl<T: Real> ExecutionTrace<T> {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Hull volume of the initial state.
    pub fn initial_volume(&self) -> T {
        self.initial_volume
    }

    /// Number of executed rounds.
    pub fn rounds(&self) -> usize {
        self.records.len()
    }

    /// State after round `t` (`t = 0` is the initial state).
    pub fn state(&self, t: usize) -> &StateVector<T> {
        &self.states[t]
    }

    pub fn states(&self) -> &[StateVector<T>] {
        &self.states
    }

    /// State entering round `t >= 1`.
    pub fn before(&self, t: usize) -> &StateVector<T> {
        &self.states[t - 1]
    }

    /// State leaving round `t >= 1`.
    pub fn after(&self, t: usize) -> &StateVector<T> {
        &self.states[t]
    }

    /// Record of round `t >= 1`.
    pub fn record(&self, t: usize) -> &RoundRecord<T> {
        &self.records[t - 1]
    }

    pub fn records(&self) -> &[RoundRecord<T>] {
        &self.records
    }

    /// Measured minimum broadcasting weight of round `t`, `None` when the
    /// round has no designated broadcasting set.
    pub fn measured_alpha(&self, t: usize) -> Option<T> {
        let record = self.record(t);
        if record.round.m_set.is_empty() {
            return None;
        }
        Some(min_broadcast_weight(&record.weights, &record.round.m_set).expect("non-empty m_set"))
    }

    /// Smallest measured minimum broadcasting weight over all rounds, or an
    /// error naming the first round without a broadcasting set.
    pub fn min_measured_alpha(&self) -> Result<T> {
        let mut best = T::infinity();
        for t in 1..=self.rounds() {
            let alpha =
                self.measured_alpha(t).ok_or(Error::RoundWithoutBroadcastSet { round: t })?;
            best = best.min(alpha);
        }
        Ok(best)
    }
}

/// Runs `rounds` averaging rounds of `rule` under the adversary, composing
/// `relay_rounds` raw graphs per macro-round (`1` disables relaying). The
/// execution is a pure function of `(spec, rule, x0, rounds, relay_rounds)`.
pub fn run<T: Real>(
    spec: &AdversarySpec,
    rule: &WeightRule<T>,
    x0: &StateVector<T>,
    rounds: usize,
    relay_rounds: usize,
) -> Result<ExecutionTrace<T>> {
    if rounds == 0 {
        return Err(Error::ZeroRounds);
    }
    if x0.n() != spec.n {
        return Err(Error::ShapeMismatch);
    }
    let schedule = RelaySchedule::new(spec.clone(), relay_rounds)?;
    let mut states = Vec::with_capacity(rounds + 1);
    let mut records = Vec::with_capacity(rounds);
    states.push(x0.clone());
    for t in 1..=rounds {
        let round = schedule.round(t)?;
        let mut rng = weight_rng(spec.seed, t);
        let weights = weights_for(rule, &round, &mut rng)?;
        let next = step(states.last().expect("non-empty"), &weights)?;
        states.push(next);
        records.push(RoundRecord { round, weights });
    }
    Ok(ExecutionTrace {
        d: x0.d(),
        n: x0.n(),
        initial_volume: hull_volume(x0.points()),
        states,
        records,
    })
}
