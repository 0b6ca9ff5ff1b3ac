//! Randomized invariant suites shared by the `properties` and `acceptance`
//! test targets. Every suite runs [`CASES`] generated cases.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use theta_core::analysis::{canonical_partition, elbow_from_sizes, theta_grid, top_m_clusters, tsg_under_permutation};
use theta_core::baselines::{kmeans, kmeanspp_init, lloyd, KMeansConfig};
use theta_core::datagen::{format_labels, format_matrix, grid_blobs, highdim_blobs, parse_labels, parse_matrix};
use theta_core::metrics::{inertia, nmi, ssd_centroid_score};
use theta_core::theta::tsg_with;
use theta_core::*;

pub const CASES: u32 = 1000;
const E: Metric = Metric::Euclidean;

type Outcome = Result<(), TestCaseError>;

/// Runs `test` on `CASES` values drawn from `strategy`.
fn check<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Outcome) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new(config).run(&strategy, test).map_err(|e| e.to_string())
}

/// Small random dataset: 1..=max_n rows, 1..=4 columns, coordinates in
/// [-10, 10].
pub fn dataset(max_n: usize) -> impl Strategy<Value = DataMatrix> {
    (1..=max_n, 1usize..=4).prop_flat_map(|(n, d)| {
        prop::collection::vec(-10.0f64..10.0, n * d).prop_map(move |v| DataMatrix::new(n, d, v).unwrap())
    })
}

pub fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Batch means of the members of each label.
pub fn batch_means(x: &DataMatrix, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let d = x.n_features();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for (row, &l) in x.rows().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(row) {
            *s += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| s.into_iter().map(|v| v / c as f64).collect())
        .collect()
}

/// Labels in 0..k, sizes match, no empty cluster, centroids are member means.
fn assert_valid_partition(x: &DataMatrix, c: &Clustering, mean_tol: f64) -> Outcome {
    let k = c.k();
    prop_assert_eq!(c.labels().len(), x.n_samples());
    prop_assert!(k >= 1 && k <= x.n_samples());
    let mut counts = vec![0usize; k];
    for &l in c.labels() {
        prop_assert!(l < k);
        counts[l] += 1;
    }
    prop_assert_eq!(&counts[..], c.sizes());
    prop_assert!(counts.iter().all(|&n| n > 0));
    let means = batch_means(x, c.labels(), k);
    for (j, mean) in means.iter().enumerate() {
        for (a, b) in mean.iter().zip(c.centroids().row(j)) {
            prop_assert!((a - b).abs() <= mean_tol * (1.0 + a.abs()), "centroid {j}: {a} vs {b}");
        }
    }
    Ok(())
}

/// Breadth-first connected components of the graph linking centroids closer
/// than `eps`; each node maps to the smallest id in its component.
pub fn bfs_components(c: &DataMatrix, eps: f64) -> Vec<usize> {
    let k = c.n_samples();
    let mut comp = vec![usize::MAX; k];
    for start in 0..k {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for (v, slot) in comp.iter_mut().enumerate() {
                if *slot == usize::MAX && sq(c.row(u), c.row(v)).sqrt() < eps {
                    *slot = start;
                    queue.push_back(v);
                }
            }
        }
    }
    comp
}

/// Well-separated clusters: `k` centres `spacing` apart on the first axis,
/// each point within `radius` of its centre.
fn separated_clusters(
    k: usize,
    per: usize,
    d: usize,
    spacing: f64,
    radius: f64,
    offsets: &[f64],
) -> (DataMatrix, Vec<usize>) {
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut it = offsets.chunks_exact(d).cycle();
    for c in 0..k {
        for _ in 0..per {
            let raw = it.next().unwrap();
            // Scale into the ball of the given radius.
            let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
            for (j, v) in raw.iter().enumerate() {
                let base = if j == 0 { c as f64 * spacing } else { 0.0 };
                values.push(base + radius * v / norm);
            }
            labels.push(c);
        }
    }
    (DataMatrix::new(k * per, d, values).unwrap(), labels)
}

fn separated_params() -> impl Strategy<Value = (usize, usize, usize, f64, Vec<f64>, u64)> {
    (
        1usize..6,
        1usize..8,
        1usize..4,
        0.5f64..5.0,
        prop::collection::vec(-1.0f64..1.0, 64),
        any::<u64>(),
    )
}

// ---------------------------------------------------------------- primitives

pub fn distance_is_symmetric_and_nonnegative() -> Result<(), String> {
    let pair = (1usize..=16).prop_flat_map(|d| {
        (
            prop::collection::vec(-1e3..1e3f64, d),
            prop::collection::vec(-1e3..1e3f64, d),
        )
    });
    check(pair, |(a, b)| {
        let ab = distance(E, &a, &b).unwrap();
        prop_assert_eq!(ab, distance(E, &b, &a).unwrap());
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(distance(E, &a, &a).unwrap(), 0.0);
        Ok(())
    })
}

pub fn incremental_mean_matches_batch_mean() -> Result<(), String> {
    let points = (1usize..=100)
        .prop_flat_map(|d| prop::collection::vec(prop::collection::vec(-100.0..100.0f64, d), 1..1000));
    check(points, |points| {
        let d = points[0].len();
        let mut centroid = points[0].clone();
        let mut count = 1;
        for p in &points[1..] {
            (centroid, count) = running_mean_update(&centroid, count, p).unwrap();
        }
        prop_assert_eq!(count, points.len());
        for j in 0..d {
            let batch = points.iter().map(|p| p[j]).sum::<f64>() / points.len() as f64;
            let scale = points.iter().map(|p| p[j].abs()).fold(0.0, f64::max).max(1e-300);
            prop_assert!((centroid[j] - batch).abs() <= 1e-9 * scale, "coordinate {j}: {} vs {batch}", centroid[j]);
        }
        Ok(())
    })
}

pub fn permutation_is_deterministic_bijection() -> Result<(), String> {
    check((1usize..500, any::<u64>()), |(n, seed)| {
        let p = seeded_permutation(n, Seed(seed)).unwrap();
        prop_assert_eq!(&p, &seeded_permutation(n, Seed(seed)).unwrap());
        let mut sorted = p;
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        Ok(())
    })
}

// ------------------------------------------------------------ theta family

pub fn tsg_partition_is_valid() -> Result<(), String> {
    check((dataset(40), 0.0f64..8.0), |(x, theta)| {
        let (c, _) = tsg(&x, theta, E).unwrap();
        assert_valid_partition(&x, &c, 1e-9)?;
        // Labels are numbered by first appearance.
        prop_assert_eq!(canonical_partition(c.labels()), c.labels().to_vec());
        Ok(())
    })
}

pub fn tsg_replay_respects_threshold() -> Result<(), String> {
    // Replays the assignment with independently maintained batch means: a
    // sample joins the nearest existing centroid when it lies within theta,
    // otherwise it founds a new cluster.
    check((dataset(40), 0.0f64..8.0), |(x, theta)| {
        let (c, _) = tsg(&x, theta, E).unwrap();
        let d = x.n_features();
        let mut sums: Vec<Vec<f64>> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        let slack = 1e-9;
        for (i, row) in x.rows().enumerate() {
            let dists: Vec<f64> = sums
                .iter()
                .zip(&counts)
                .map(|(s, &n)| {
                    let mean: Vec<f64> = s.iter().map(|v| v / n as f64).collect();
                    sq(row, &mean).sqrt()
                })
                .collect();
            let l = c.labels()[i];
            if l == sums.len() {
                prop_assert!(dists.iter().all(|&dd| dd > theta - slack), "sample {i} founded a cluster within theta");
                sums.push(vec![0.0; d]);
                counts.push(0);
            } else {
                prop_assert!(l < sums.len());
                prop_assert!(dists[l] <= theta + slack, "sample {i} joined a cluster beyond theta");
                let best = dists.iter().cloned().fold(f64::INFINITY, f64::min);
                prop_assert!(dists[l] <= best + slack, "sample {i} did not join the nearest cluster");
            }
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(row) {
                *s += v;
            }
        }
        Ok(())
    })
}

pub fn tsg_distance_count_is_exact() -> Result<(), String> {
    // Sample i is compared with every cluster that exists when it arrives.
    check((dataset(60), 0.0f64..8.0), |(x, theta)| {
        let (c, stats) = tsg(&x, theta, E).unwrap();
        let mut seen = 0u64;
        let mut expected = 0u64;
        for &l in c.labels() {
            expected += seen;
            if l as u64 == seen {
                seen += 1;
            }
        }
        prop_assert_eq!(stats.distance_evaluations, expected);
        Ok(())
    })
}

pub fn order_invariance_frozen_centroids() -> Result<(), String> {
    // Every cluster fits in a ball of radius theta/2 (diameter <= theta) and
    // different clusters are more than theta apart.
    check(separated_params(), |(k, per, d, theta, offsets, seed)| {
        let (x, truth) = separated_clusters(k, per, d, 2.5 * theta, 0.5 * theta, &offsets);
        let perm = seeded_permutation(x.n_samples(), Seed(seed)).unwrap();
        let (c, _) = tsg_with(&x.select_rows(&perm).unwrap(), theta, E, CentroidUpdate::Frozen).unwrap();
        let mut labels = vec![0; x.n_samples()];
        for (pos, &orig) in perm.iter().enumerate() {
            labels[orig] = c.labels()[pos];
        }
        prop_assert_eq!(canonical_partition(&labels), canonical_partition(&truth));
        Ok(())
    })
}

pub fn order_invariance_running_mean() -> Result<(), String> {
    // Running-mean centroids stay inside each cluster's ball of radius
    // theta/2; with centres 3 theta apart no other cluster is within reach.
    check(separated_params(), |(k, per, d, theta, offsets, seed)| {
        let (x, truth) = separated_clusters(k, per, d, 3.0 * theta, 0.5 * theta, &offsets);
        let perm = seeded_permutation(x.n_samples(), Seed(seed)).unwrap();
        let labels = tsg_under_permutation(&x, theta, &perm, E).unwrap();
        prop_assert_eq!(canonical_partition(&labels), canonical_partition(&truth));
        prop_assert_eq!(nmi(&labels, &truth).unwrap(), 1.0);
        Ok(())
    })
}

pub fn tdg_partition_is_valid_and_deterministic() -> Result<(), String> {
    check(
        (dataset(30), 0.0f64..8.0, 1usize..5, any::<u64>()),
        |(x, theta, iterations, seed)| {
            let (a, sa) = tdg(&x, theta, iterations, Seed(seed), E).unwrap();
            assert_valid_partition(&x, &a, 1e-9)?;
            prop_assert_eq!(sa.shuffles_performed, iterations);
            let (b, sb) = tdg(&x, theta, iterations, Seed(seed), E).unwrap();
            prop_assert_eq!(a.labels(), b.labels());
            prop_assert_eq!(a.centroids(), b.centroids());
            prop_assert_eq!(sa.distance_evaluations, sb.distance_evaluations);
            Ok(())
        },
    )
}

pub fn tdg_single_pass_matches_unrolled_steps() -> Result<(), String> {
    // One iteration equals: shuffle, group, group the centroids, assign to
    // the nearest pooled centroid, drop empties, take member means.
    check((dataset(30), 0.0f64..8.0, any::<u64>()), |(x, theta, seed)| {
        let (got, _) = tdg(&x, theta, 1, Seed(seed), E).unwrap();
        let perm = seeded_permutation(x.n_samples(), Seed(seed).derive(0)).unwrap();
        let (first, _) = tsg(&x.select_rows(&perm).unwrap(), theta, E).unwrap();
        let (meta, _) = tsg(first.centroids(), theta, E).unwrap();
        let assigned = assign_to_centroids(&x, meta.centroids(), E).unwrap();
        let manual = Clustering::from_labels(&x, &assigned).unwrap();
        prop_assert_eq!(canonical_partition(got.labels()), canonical_partition(manual.labels()));
        Ok(())
    })
}

pub fn chain_merge_matches_bfs() -> Result<(), String> {
    check(
        (1usize..=50, prop::collection::vec(-20.0f64..20.0, 100), 0.0f64..8.0),
        |(k, coords, eps)| {
            let c = DataMatrix::new(k, 2, coords[..2 * k].to_vec()).unwrap();
            prop_assert_eq!(chain_merge(&c, eps, E).unwrap(), bfs_components(&c, eps));
            Ok(())
        },
    )
}

pub fn chain_relabel_is_idempotent() -> Result<(), String> {
    check(
        (1usize..30, prop::collection::vec((0usize..30, 0usize..30), 0..40)),
        |(k, raw_edges)| {
            let edges: Vec<(usize, usize)> = raw_edges.into_iter().map(|(a, b)| (a % k, b % k)).collect();
            let first = ChainingList::from_edges(k, &edges).unwrap().relabel(100);
            // Each id maps to the smallest member of its chain...
            for (i, &r) in first.iter().enumerate() {
                prop_assert!(r <= i);
                prop_assert_eq!(first[r], r);
            }
            // ...and chaining the result again changes nothing.
            let again_edges: Vec<(usize, usize)> = first.iter().enumerate().map(|(i, &r)| (i, r)).collect();
            let again = ChainingList::from_edges(k, &again_edges).unwrap().relabel(100);
            prop_assert_eq!(again, first);
            Ok(())
        },
    )
}

pub fn tnc_coarsens_as_epsilon_grows() -> Result<(), String> {
    check(
        (dataset(30), 0.1f64..4.0, 0.0f64..6.0, 0.0f64..6.0, any::<u64>()),
        |(x, theta, e1, e2, seed)| {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let p = ThetaParams::new(theta).with_iterations(2);
            let fine = tnc(&x, &p.with_epsilon(lo), Seed(seed), E).unwrap();
            let coarse = tnc(&x, &p.with_epsilon(hi), Seed(seed), E).unwrap();
            prop_assert!(fine.clustering.k() >= coarse.clustering.k());
            // Samples together at the smaller epsilon stay together.
            let mut map = HashMap::new();
            for (&f, &c) in fine.clustering.labels().iter().zip(coarse.clustering.labels()) {
                prop_assert_eq!(*map.entry(f).or_insert(c), c);
            }
            prop_assert_eq!(fine.micro.labels(), coarse.micro.labels());
            prop_assert!(fine.clustering.k() <= fine.micro.k());
            Ok(())
        },
    )
}

// ------------------------------------------------------------------ metrics

pub fn nmi_symmetry_range_and_relabeling() -> Result<(), String> {
    check(
        (
            prop::collection::vec(0usize..6, 1..80),
            prop::collection::vec(0usize..6, 80),
            1usize..50,
            any::<u64>(),
        ),
        |(a, b_all, shift, seed)| {
            let n = a.len();
            let b = &b_all[..n];
            let ab = nmi(&a, b).unwrap();
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab, nmi(b, &a).unwrap());
            prop_assert_eq!(nmi(&a, &a).unwrap(), 1.0);
            // Renaming labels with a bijection leaves the score unchanged.
            let renamed: Vec<usize> = a.iter().map(|&l| 10 * l + shift).collect();
            prop_assert!((nmi(&renamed, b).unwrap() - ab).abs() < 1e-12);
            // So does permuting the samples of both labelings together.
            let perm = seeded_permutation(n, Seed(seed)).unwrap();
            let pa: Vec<usize> = perm.iter().map(|&i| a[i]).collect();
            let pb: Vec<usize> = perm.iter().map(|&i| b[i]).collect();
            prop_assert!((nmi(&pa, &pb).unwrap() - ab).abs() < 1e-12);
            Ok(())
        },
    )
}

pub fn ssd_is_order_invariant_and_bounded() -> Result<(), String> {
    check(
        (
            1usize..12,
            1usize..12,
            prop::collection::vec(-10.0f64..10.0, 48),
            0.0f64..5.0,
            any::<u64>(),
        ),
        |(kt, kp, coords, tol, seed)| {
            let truth = DataMatrix::new(kt, 2, coords[..2 * kt].to_vec()).unwrap();
            let pred = DataMatrix::new(kp, 2, coords[24..24 + 2 * kp].to_vec()).unwrap();
            let s = ssd_centroid_score(&pred, &truth, tol).unwrap();
            prop_assert!((0.0..=100.0).contains(&s));
            let pt = truth.select_rows(&seeded_permutation(kt, Seed(seed)).unwrap()).unwrap();
            let pp = pred.select_rows(&seeded_permutation(kp, Seed(seed ^ 1)).unwrap()).unwrap();
            prop_assert_eq!(ssd_centroid_score(&pp, &pt, tol).unwrap(), s);
            prop_assert_eq!(ssd_centroid_score(&truth, &truth, 0.0).unwrap(), 100.0);
            Ok(())
        },
    )
}

// ---------------------------------------------------------------- baselines

pub fn lloyd_inertia_never_increases() -> Result<(), String> {
    check((dataset(40), 1usize..8, any::<u64>()), |(x, k_raw, seed)| {
        let k = k_raw.min(x.n_samples());
        let init = kmeanspp_init(&x, k, Seed(seed)).unwrap();
        let out = lloyd(&x, &init, 50, 0.0, E).unwrap();
        for w in out.inertia_history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{:?}", out.inertia_history);
        }
        let final_inertia = inertia(&x, &out.clustering, E).unwrap();
        prop_assert!((final_inertia - out.inertia).abs() <= 1e-9 * (1.0 + final_inertia));
        prop_assert!(out.inertia <= out.inertia_history[0] * (1.0 + 1e-12) + 1e-12);
        Ok(())
    })
}

pub fn kmeans_gives_k_nonempty_clusters_deterministically() -> Result<(), String> {
    check((dataset(30), 1usize..8, any::<u64>()), |(x, k_raw, seed)| {
        let k = k_raw.min(x.n_samples());
        let cfg = KMeansConfig::new(k).with_n_init(2).with_max_iter(50).with_seed(Seed(seed));
        let (a, _) = kmeans(&x, &cfg, E).unwrap();
        prop_assert_eq!(a.k(), k);
        assert_valid_partition(&x, &a, 1e-9)?;
        let (b, _) = kmeans(&x, &cfg, E).unwrap();
        prop_assert_eq!(a.labels(), b.labels());
        Ok(())
    })
}

// ----------------------------------------------------------------- analysis

pub fn top_m_keeps_exactly_m() -> Result<(), String> {
    check((dataset(40), 0.0f64..6.0, 1usize..10), |(x, theta, m_raw)| {
        let (c, _) = tsg(&x, theta, E).unwrap();
        let m = m_raw.min(c.k());
        let top = top_m_clusters(&x, &c, m, E).unwrap();
        prop_assert_eq!(top.k(), m);
        assert_valid_partition(&x, &top, 1e-9)?;
        Ok(())
    })
}

pub fn elbow_is_within_range() -> Result<(), String> {
    check(prop::collection::vec(1usize..500, 1..40), |sizes| {
        let (e, sorted) = elbow_from_sizes(&sizes);
        prop_assert!(e >= 1 && e <= sizes.len());
        prop_assert!(sorted.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(sorted.iter().sum::<usize>(), sizes.iter().sum::<usize>());
        Ok(())
    })
}

pub fn theta_grid_is_increasing() -> Result<(), String> {
    check((0.0f64..5.0, 0.0f64..5.0, 0.05f64..1.0), |(min, span, step)| {
        let grid = theta_grid(min, min + span, step).unwrap();
        prop_assert_eq!(grid.len(), (span / step + 1e-9).floor() as usize + 1);
        prop_assert_eq!(grid[0], min);
        prop_assert!(grid.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(*grid.last().unwrap() <= min + span + 1e-9);
        Ok(())
    })
}

pub fn canonical_partition_ignores_label_names() -> Result<(), String> {
    check((prop::collection::vec(0usize..8, 1..60), 1usize..100), |(labels, shift)| {
        let renamed: Vec<usize> = labels.iter().map(|&l| (l + shift) * 3).collect();
        prop_assert_eq!(canonical_partition(&labels), canonical_partition(&renamed));
        let distinct: BTreeSet<usize> = labels.iter().copied().collect();
        prop_assert_eq!(canonical_partition(&labels).iter().max().unwrap() + 1, distinct.len());
        Ok(())
    })
}

// ------------------------------------------------------------------ datagen

pub fn grid_blobs_are_deterministic_and_centred() -> Result<(), String> {
    check(
        (1usize..4, 1usize..4, 1.0f64..20.0, 0.1f64..3.0, any::<u64>()),
        |(rows, cols, sep, sigma, seed)| {
            let n = 60;
            let (a, ga) = grid_blobs(rows, cols, sep, sigma, n, Seed(seed)).unwrap();
            let (b, gb) = grid_blobs(rows, cols, sep, sigma, n, Seed(seed)).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(&ga, &gb);
            prop_assert_eq!(a.n_samples(), rows * cols * n);
            // Sample means lie within 6 standard errors of the generating means.
            let means = batch_means(&a, &ga.labels, ga.k());
            let bound = 6.0 * sigma / (n as f64).sqrt();
            for (m, truth) in means.iter().zip(ga.true_centroids.rows()) {
                for (u, v) in m.iter().zip(truth) {
                    prop_assert!((u - v).abs() < bound, "{u} vs {v}");
                }
            }
            Ok(())
        },
    )
}

pub fn highdim_blobs_are_deterministic() -> Result<(), String> {
    check((1usize..4, 1usize..20, any::<u64>()), |(k, d, seed)| {
        let (a, ga) = highdim_blobs(k, d, 1.6, 1.0, 5, Seed(seed)).unwrap();
        let (b, _) = highdim_blobs(k, d, 1.6, 1.0, 5, Seed(seed)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.n_features(), d);
        prop_assert!((ga.separation - 1.6 * (d as f64).sqrt()).abs() < 1e-12);
        Ok(())
    })
}

pub fn data_files_round_trip() -> Result<(), String> {
    check(
        (dataset(20), prop::collection::vec(0usize..1000, 1..50)),
        |(x, labels)| {
            let path = std::path::Path::new("mem");
            prop_assert_eq!(parse_matrix(&format_matrix(&x), path).unwrap(), x);
            prop_assert_eq!(parse_labels(&format_labels(&labels), path).unwrap(), labels);
            Ok(())
        },
    )
}

/// Every suite, by name.
pub type Suite = fn() -> Result<(), String>;

pub const SUITES: &[(&str, Suite)] = &[
    ("distance_is_symmetric_and_nonnegative", distance_is_symmetric_and_nonnegative),
    ("incremental_mean_matches_batch_mean", incremental_mean_matches_batch_mean),
    ("permutation_is_deterministic_bijection", permutation_is_deterministic_bijection),
    ("tsg_partition_is_valid", tsg_partition_is_valid),
    ("tsg_replay_respects_threshold", tsg_replay_respects_threshold),
    ("tsg_distance_count_is_exact", tsg_distance_count_is_exact),
    ("order_invariance_frozen_centroids", order_invariance_frozen_centroids),
    ("order_invariance_running_mean", order_invariance_running_mean),
    ("tdg_partition_is_valid_and_deterministic", tdg_partition_is_valid_and_deterministic),
    ("tdg_single_pass_matches_unrolled_steps", tdg_single_pass_matches_unrolled_steps),
    ("chain_merge_matches_bfs", chain_merge_matches_bfs),
    ("chain_relabel_is_idempotent", chain_relabel_is_idempotent),
    ("tnc_coarsens_as_epsilon_grows", tnc_coarsens_as_epsilon_grows),
    ("nmi_symmetry_range_and_relabeling", nmi_symmetry_range_and_relabeling),
    ("ssd_is_order_invariant_and_bounded", ssd_is_order_invariant_and_bounded),
    ("lloyd_inertia_never_increases", lloyd_inertia_never_increases),
    (
        "kmeans_gives_k_nonempty_clusters_deterministically",
        kmeans_gives_k_nonempty_clusters_deterministically,
    ),
    ("top_m_keeps_exactly_m", top_m_keeps_exactly_m),
    ("elbow_is_within_range", elbow_is_within_range),
    ("theta_grid_is_increasing", theta_grid_is_increasing),
    ("canonical_partition_ignores_label_names", canonical_partition_ignores_label_names),
    ("grid_blobs_are_deterministic_and_centred", grid_blobs_are_deterministic_and_centred),
    ("highdim_blobs_are_deterministic", highdim_blobs_are_deterministic),
    ("data_files_round_trip", data_files_round_trip),
];
