//! Acceptance suite: every criterion from the verification contract, one
//! test per criterion, each printing a pass line with the claim it covers.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use avgsim::adversary::{
    default_relay_rounds, imposs_graph, sample_k_rooted, AdversaryKind, AdversarySpec,
};
use avgsim::analysis::{
    estimate_limit_subspace, verify_convergence_bound, verify_decomposition,
    verify_halfspace_zone, verify_impossibility, verify_thickness_contraction,
    verify_volume_contraction, HalfSpaceZoneOptions,
};
use avgsim::dynamics::{run, ExecutionTrace, StateVector, WeightRule};
use avgsim::geometry::{
    affine_dim, ball_coeff, dist_to_halfspace, hull_volume, monte_carlo_volume,
    segment_volume_bounds, HalfSpace, RadiusFunction,
};
use avgsim::graph::CommGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (n, d) combinations with full-dimensional initial hulls.
const FAMILY: [(usize, usize); 8] =
    [(3, 1), (4, 1), (5, 1), (3, 2), (4, 2), (5, 2), (4, 3), (5, 3)];

fn random_x0(n: usize, d: usize, seed: u64) -> StateVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StateVector::new((0..n).map(|_| (0..d).map(|_| rng.gen::<f64>()).collect()).collect()).unwrap()
}

fn broadcastable_trace(n: usize, d: usize, k: usize, seed: u64, rounds: usize) -> ExecutionTrace<f64> {
    let spec = AdversarySpec::new(n, AdversaryKind::RandomKBroadcastable, Some(k), seed).unwrap();
    run(&spec, &WeightRule::EqualNeighbor, &random_x0(n, d, seed ^ 0x5a5a), rounds, 1).unwrap()
}

/// k-broadcastable family whose k broadcasters never hear anyone else, so
/// their values pin an affine subspace of dimension exactly k - 1.
fn pinned_source_family(n: usize, k: usize, count: usize, seed: u64) -> Vec<CommGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut edges = Vec::new();
            for i in k..n {
                edges.push((rng.gen_range(0..k), i));
                for j in k..n {
                    if i != j && rng.gen::<f64>() < 0.3 {
                        edges.push((i, j));
                    }
                }
            }
            CommGraph::new(n, edges).unwrap()
        })
        .collect()
}

#[test]
fn criterion_01_volume_contraction_rate() {
    let mut executions = 0;
    let mut checked_rounds = 0;
    for &(n, d) in &FAMILY {
        for seed in 0..7u64 {
            let trace = broadcastable_trace(n, d, d, 100 + seed, 120);
            let report = verify_volume_contraction(&trace, 1e-9);
            assert!(
                report.passed(),
                "volume ratio above 1 - alpha^d (n={n}, d={d}, seed={seed}): {:?}",
                report.violations().first()
            );
            executions += 1;
            checked_rounds += report.checks.len();
        }
    }
    assert!(executions >= 50);
    assert!(checked_rounds > 300, "only {checked_rounds} rounds checked");
    println!(
        "[PASS] criterion 1 (lemma7): {} executions, {} per-round contraction checks",
        executions, checked_rounds
    );
}

#[test]
fn criterion_02_convergence_round_bound() {
    let epsilons = [1e-2, 1e-4];
    let mut seeds_used = 0;
    for &(n, d) in &FAMILY {
        for seed in 0..13u64 {
            let x0 = random_x0(n, d, 7000 + seed);
            let vol0 = hull_volume(x0.points());
            // Worst-case bound round with the equal-neighbor weight floor 1/n.
            let rounds = if vol0 <= 1e-4 {
                1
            } else {
                ((n as f64).powi(d as i32) * (vol0 / 1e-4).ln()).ceil() as usize + 2
            };
            let spec =
                AdversarySpec::new(n, AdversaryKind::RandomKBroadcastable, Some(d), 7000 + seed)
                    .unwrap();
            let trace = run(&spec, &WeightRule::EqualNeighbor, &x0, rounds, 1).unwrap();
            for eps in epsilons {
                let report = verify_convergence_bound(&trace, eps).unwrap();
                assert!(
                    report.pass,
                    "vol {} above eps {eps} at bound round {} (n={n}, d={d}, seed={seed})",
                    report.volume_at_bound, report.bound_round
                );
            }
            seeds_used += 1;
        }
    }
    assert!(seeds_used >= 100);
    println!(
        "[PASS] criterion 2 (theorem3): {} executions within the bound for eps in {:?}",
        seeds_used, epsilons
    );
}

#[test]
fn criterion_03_one_step_thickness_contraction() {
    let d = 3;
    let mut checked = 0;
    for n in [4usize, 5] {
        for k in 1..=3usize {
            for seed in 0..9u64 {
                let trace = broadcastable_trace(n, d, k, 300 + seed, 150);
                let report = verify_thickness_contraction(&trace, 1e-9).unwrap();
                assert!(
                    report.passed(),
                    "thickness violation (n={n}, k={k}, seed={seed}): {:?}",
                    report.violations().first()
                );
                checked += report.checks.len();
            }
        }
    }
    assert!(checked >= 150 * 54);
    println!("[PASS] criterion 3 (lemma13): {} one-step thickness checks", checked);
}

#[test]
fn criterion_04_limit_subspace_dimension() {
    let n = 5;
    let d = 3;
    let rounds = 240;
    let window = 25;
    for k in 1..=3usize {
        for seed in 0..5u64 {
            let trace = broadcastable_trace(n, d, k, 400 + seed, rounds);
            let estimate = estimate_limit_subspace(&trace, window, 1e-7).unwrap();
            assert!(
                estimate.dim < k,
                "dim {} above k - 1 (k={k}, seed={seed})",
                estimate.dim
            );
            assert!(estimate.residual <= 1e-6, "residual {}", estimate.residual);
        }
        // Pinned broadcasters reproduce the point / line / plane limits with
        // the dimension met exactly.
        let graphs = pinned_source_family(n, k, 6, 500 + k as u64);
        for seed in 0..3u64 {
            let spec = AdversarySpec::new(
                n,
                AdversaryKind::Explicit { graphs: graphs.clone() },
                Some(k),
                600 + seed,
            )
            .unwrap();
            let x0 = random_x0(n, d, 700 + seed);
            let trace = run(&spec, &WeightRule::EqualNeighbor, &x0, rounds, 1).unwrap();
            let estimate = estimate_limit_subspace(&trace, window, 1e-7).unwrap();
            assert_eq!(estimate.dim, k - 1, "pinned family must realize dimension k - 1");
            assert!(estimate.residual <= 1e-6, "residual {}", estimate.residual);
        }
    }
    println!(
        "[PASS] criterion 4 (theorem4): limits of dimension <= k-1 (and exactly k-1 when pinned) for k in 1..=3"
    );
}

#[test]
fn criterion_05_impossibility_witness() {
    for s in 0..=2usize {
        let n = s + 3;
        let report = verify_impossibility::<f64>(n, s, 60, &WeightRule::EqualNeighbor).unwrap();
        assert_eq!(report.sources.len(), s + 2);
        assert_eq!(report.expected_dim, s + 1);
        assert!(report.passed(), "witness failed for s = {s}");
    }
    println!(
        "[PASS] criterion 5 (theorem2): s + 2 exactly-constant sources spanning dimension s + 1 for s in 0..=2"
    );
}

#[test]
fn criterion_06_rooted_products_become_broadcastable() {
    let mut products = 0;
    for n in [3usize, 4, 5] {
        let len = default_relay_rounds(n);
        for k in [1usize, 2] {
            let mut rng = ChaCha8Rng::seed_from_u64(0xC6 + (n * 10 + k) as u64);
            for _ in 0..1000 {
                let mut product = sample_k_rooted(n, k, &mut rng).unwrap();
                for _ in 1..len {
                    product = product.compose(&sample_k_rooted(n, k, &mut rng).unwrap()).unwrap();
                }
                assert!(
                    product.is_k_broadcastable(k).unwrap(),
                    "product of {len} {k}-rooted graphs on n={n} not {k}-broadcastable"
                );
                products += 1;
            }
        }
    }
    assert_eq!(products, 6000);
    println!(
        "[PASS] criterion 6 (theorem1): 6000 products of ceil((pi^2+6)/6*n+1) rooted graphs, zero violations"
    );
}

#[test]
fn criterion_07_halfspace_distance_formula_vs_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
    let unit = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..3)
                .map(|_| {
                    let u1: f64 = rng.gen::<f64>().max(1e-12);
                    let u2: f64 = rng.gen();
                    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
                })
                .collect();
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len > 1e-9 {
                return v.iter().map(|x| x / len).collect();
            }
        }
    };
    for case in 0..100 {
        let q: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let v = unit(&mut rng);
        let hs = HalfSpace::new(q.clone(), v.clone()).unwrap();
        let true_dist = 0.3 + rng.gen::<f64>();
        let tangent = unit(&mut rng);
        let lateral = rng.gen::<f64>() * 0.5;
        let z: Vec<f64> = (0..3)
            .map(|i| {
                let t_perp = tangent[i] - tangent.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() * v[i];
                q[i] + true_dist * v[i] + lateral * t_perp
            })
            .collect();
        let formula = dist_to_halfspace(&z, &hs).unwrap();
        let mut best = f64::INFINITY;
        for _ in 0..100_000 {
            let depth = rng.gen::<f64>().max(1e-9) * 0.05;
            let side = unit(&mut rng);
            let spread = rng.gen::<f64>() * 0.05;
            let h: Vec<f64> = (0..3)
                .map(|i| {
                    let s_perp = side[i] - side.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() * v[i];
                    z[i] - (formula + depth) * v[i] + spread * s_perp
                })
                .collect();
            if hs.contains(&h) {
                let dist = z.iter().zip(&h).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                best = best.min(dist);
            }
        }
        assert!(best >= formula - 1e-9, "case {case}: infimum below the formula");
        assert!(best - formula <= 1e-3, "case {case}: sampled {best} vs formula {formula}");
    }
    println!("[PASS] criterion 7 (lemma1): formula matches sampled infimum within 1e-3 on 100 instances");
}

#[test]
fn criterion_08_halfspace_attraction_zone() {
    let mut checks = 0;
    for seed in 0..20u64 {
        let trace = broadcastable_trace(4, 2, 2, 800 + seed, 30);
        let report = verify_halfspace_zone(
            &trace,
            HalfSpaceZoneOptions { trials: 50, sigma: 0.5, seed: 900 + seed, tol: 1e-9 },
        );
        assert!(
            report.passed(),
            "zone violation at seed {seed}: {:?}",
            report.violations().first()
        );
        checks += report.checks.len();
    }
    assert!(checks >= 20 * 30 * 50);
    println!("[PASS] criterion 8 (lemma2): {} empty-half-space checks, zero violations", checks);
}

#[test]
fn criterion_09_segment_volume_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC9);
    let grid = |h: f64, f: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> {
        (0..=400).map(|i| {
            let x = h * i as f64 / 400.0;
            (x, f(x))
        }).collect()
    };
    for case in 0..50 {
        let h = 0.5 + rng.gen::<f64>() * 2.0;
        let lines: Vec<(f64, f64)> = (0..4)
            .map(|_| {
                let at0 = rng.gen::<f64>() * 2.0 + 0.1;
                let ath = rng.gen::<f64>() * 2.0 + 0.1;
                (at0, (ath - at0) / h)
            })
            .collect();
        let f = |x: f64| lines.iter().map(|(a, b)| a + b * x).fold(f64::INFINITY, f64::min);
        let radius = RadiusFunction::new(h, grid(h, &f)).unwrap();
        for d in [1usize, 2, 3] {
            for alpha in [0.25, 0.5, 0.75] {
                let bounds = segment_volume_bounds(&radius, alpha, d).unwrap();
                assert!(bounds.holds(), "case {case} d={d} alpha={alpha}: {bounds:?}");
            }
        }
    }
    // The extremal affine radius turns both bounds into equalities.
    for d in [1usize, 2, 3] {
        for alpha in [0.25, 0.5, 0.75] {
            let h = 1.0;
            let radius = RadiusFunction::new(h, grid(h, &|x| h - x)).unwrap();
            let b = segment_volume_bounds(&radius, alpha, d).unwrap();
            assert!(
                (b.left_integral - b.left_bound).abs() <= b.left_budget + 1e-9,
                "left equality d={d} alpha={alpha}"
            );
            assert!(
                (b.right_integral - b.right_bound).abs() <= b.right_budget + 1e-9,
                "right equality d={d} alpha={alpha}"
            );
            assert!(b.holds());
        }
    }
    // Sanity anchor for the closed forms: C_0 = 1, C_1 = 2, C_2 = pi.
    assert!((ball_coeff::<f64>(2) - std::f64::consts::PI).abs() < 1e-14);
    println!(
        "[PASS] criterion 9 (lemma6): 50 random concave radius functions within budget, extremal case tight"
    );
}

#[test]
fn criterion_10_decomposition_reconstruction() {
    let mut checks = 0;
    for &(n, d) in &FAMILY {
        for seed in 0..3u64 {
            let trace = broadcastable_trace(n, d, d, 1000 + seed, 100);
            let report = verify_decomposition(&trace, 1e-12);
            assert!(
                report.passed(),
                "reconstruction violation (n={n}, d={d}, seed={seed}): {:?}",
                report.violations().first()
            );
            checks += report.checks.len();
        }
    }
    for k in 1..=3usize {
        for seed in 0..3u64 {
            let trace = broadcastable_trace(5, 3, k, 1100 + seed, 100);
            let report = verify_decomposition(&trace, 1e-12);
            assert!(report.passed(), "k-sweep violation (k={k}, seed={seed})");
            checks += report.checks.len();
        }
        let graphs = pinned_source_family(5, k, 6, 1200 + k as u64);
        let spec = AdversarySpec::new(
            5,
            AdversaryKind::Explicit { graphs },
            Some(k),
            1300 + k as u64,
        )
        .unwrap();
        let trace =
            run(&spec, &WeightRule::EqualNeighbor, &random_x0(5, 3, 1400 + k as u64), 100, 1)
                .unwrap();
        let report = verify_decomposition(&trace, 1e-12);
        assert!(report.passed(), "pinned-family violation (k={k})");
        checks += report.checks.len();
    }
    println!(
        "[PASS] criterion 10 (lemma9): {} per-process reconstructions within 1e-12 with valid certificates",
        checks
    );
}

#[test]
fn criterion_11_geometry_oracles() {
    // Hull volume against the Monte Carlo membership oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC11);
    for cloud in 0..20 {
        let pts: Vec<Vec<f64>> =
            (0..8).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect();
        let exact = hull_volume(&pts);
        let estimate = monte_carlo_volume(&pts, 200_000, 7000 + cloud);
        assert!(
            (estimate.value - exact).abs() <= 3.0 * estimate.std_error,
            "cloud {cloud}: exact {exact} vs estimate {} (sigma {})",
            estimate.value,
            estimate.std_error
        );
    }
    // Affine dimension on constructed degenerate clouds.
    let mut rng = ChaCha8Rng::seed_from_u64(0xC12);
    for _ in 0..20 {
        let origin: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
        let dir: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() - 0.5).collect();
        let collinear: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..3).map(|k| origin[k] + i as f64 * dir[k]).collect())
            .collect();
        assert_eq!(affine_dim(&collinear, 1e-8), 1);

        let dir2: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() - 0.5).collect();
        let coplanar: Vec<Vec<f64>> = (0..6)
            .map(|_| {
                let a = rng.gen::<f64>() * 2.0 - 1.0;
                let b = rng.gen::<f64>() * 2.0 - 1.0;
                (0..3).map(|k| origin[k] + a * dir[k] + b * dir2[k]).collect()
            })
            .collect();
        assert!(affine_dim(&coplanar, 1e-8) <= 2);
    }
    let simplex = vec![
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ];
    assert_eq!(affine_dim(&simplex, 1e-8), 3);
    assert_eq!(affine_dim(&vec![vec![0.5, 0.5, 0.5]; 4], 1e-8), 0);
    println!(
        "[PASS] criterion 11 (geometry): hull volume within 3 sigma of Monte Carlo on 20 clouds; affine dimension exact on degenerate clouds"
    );
}

/// Both directions of the solvability characterization at desk scale:
/// rooted adversaries with relaying reach dimension <= s, while the
/// isolated-source construction keeps dimension s + 1.
#[test]
fn characterization_in_both_directions() {
    for s in 0..=1usize {
        let k = s + 1;
        let n = 4;
        let spec =
            AdversarySpec::new(n, AdversaryKind::RandomKRooted, Some(k), 3000 + s as u64).unwrap();
        let x0 = random_x0(n, 3, 3100 + s as u64);
        let trace =
            run(&spec, &WeightRule::EqualNeighbor, &x0, 250, default_relay_rounds(n)).unwrap();
        let estimate = estimate_limit_subspace(&trace, 25, 1e-7).unwrap();
        assert!(estimate.dim <= s, "relayed rooted run reached dim {}", estimate.dim);
        assert!(estimate.residual <= 1e-6);

        let report = verify_impossibility::<f64>(n, s, 40, &WeightRule::EqualNeighbor).unwrap();
        assert!(report.passed());
        assert_eq!(report.expected_dim, s + 1);
        // The witness graph itself fails the rootedness cutoff.
        assert!(!imposs_graph(n, k).unwrap().is_k_rooted(k));
    }
    println!("[PASS] characterization: rooted + relaying contracts to dim <= s; non-rooted witness stays at s + 1");
}
