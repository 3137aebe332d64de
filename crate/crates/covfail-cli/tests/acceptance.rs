//! Acceptance suite: ten criteria covering the whole pipeline, each checked
//! against an independent oracle or a hand-provable family and reported as a
//! single printed pass/fail line (visible with `--nocapture`).

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use covfail::complex::{
    build_rips_2skeleton, graph_betti, CommunicationGraph, Edge, SimplicialComplex2, Triangle,
    VertexId,
};
use covfail::deathsets::{
    brute_force_death_sets, cake_or_death, classify_subset, DeathClass, DeathSetOptions,
};
use covfail::fixtures;
use covfail::monitor::{init_monitor, FailureEvent, MonitorStatus};
use covfail::persistence::{
    build_boundary_matrix, check_criterion, criterion_oracle, homology_ranks, reduce,
};
use covfail::probability::{
    prob_failure_bruteforce, prob_failure_exact, prob_failure_mc, Distribution, FailureModel,
};
use covfail::reduction::{
    count_fundamental_classes, count_st_paths, reduce_instance, reliability_bruteforce_1d,
    reliability_bruteforce_2d, ReliabilityInstance,
};
use covfail_cli::coverage::{coverage_oracle, ConvexPolygon};
use covfail_cli::generator::{generate, GeneratorSpec};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($arg)+)),
        }
    };
}

fn criterion(number: usize, name: &str, body: impl FnOnce() -> Result<String, String>) {
    match body() {
        Ok(detail) => println!("criterion {number} ({name}): PASS — {detail}"),
        Err(msg) => {
            println!("criterion {number} ({name}): FAIL — {msg}");
            panic!("criterion {number} ({name}) failed: {msg}");
        }
    }
}

// ---------------------------------------------------------------------------
// Instance generators shared across criteria.

/// Random fenced connectivity graph: a fence ring with sparse chords plus
/// `n_interior` sensors wired to each other and the fence with density `p`.
fn random_fenced_graph(
    rng: &mut ChaCha8Rng,
    k_fence: usize,
    n_interior: usize,
    p: f64,
) -> CommunicationGraph {
    let mut g = CommunicationGraph::new();
    let fence_labels: Vec<String> = (1..=k_fence).map(|i| format!("v{i}")).collect();
    for l in &fence_labels {
        g.add_node(l, None, None).unwrap();
    }
    let refs: Vec<&str> = fence_labels.iter().map(|s| s.as_str()).collect();
    g.set_fence_by_labels(&refs).unwrap();
    for i in 0..k_fence {
        g.add_edge_by_labels(&fence_labels[i], &fence_labels[(i + 1) % k_fence])
            .unwrap();
    }
    for i in 0..k_fence {
        for j in i + 2..k_fence {
            if i == 0 && j == k_fence - 1 {
                continue;
            }
            if rng.random_bool(p / 4.0) {
                g.add_edge_by_labels(&fence_labels[i], &fence_labels[j])
                    .unwrap();
            }
        }
    }
    for i in 1..=n_interior {
        g.add_node(&format!("u{i}"), None, None).unwrap();
    }
    for i in 1..=n_interior {
        for j in i + 1..=n_interior {
            if rng.random_bool(p) {
                g.add_edge_by_labels(&format!("u{i}"), &format!("u{j}"))
                    .unwrap();
            }
        }
        for l in &fence_labels {
            if rng.random_bool(p) {
                g.add_edge_by_labels(&format!("u{i}"), l).unwrap();
            }
        }
    }
    g
}

fn geometric_complex(seed: u64, n: usize, r_b: f64) -> SimplicialComplex2 {
    let spec = GeneratorSpec {
        polygon: ConvexPolygon::unit_square(),
        n_interior: n,
        r_b,
        r_c: None,
        fence_spacing: None,
        seed,
        failure: None,
    };
    build_rips_2skeleton(&generate(&spec).unwrap().graph).unwrap()
}

/// The instance family shared by criteria 2, 4, and 5: 100 random fenced
/// graphs with 1..=10 interior sensors.
fn small_interior_instances() -> Vec<SimplicialComplex2> {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let mut out = Vec::new();
    for t in 0..100 {
        let k_fence = 4 + t % 5;
        let n = 1 + t % 10;
        let p = [0.3, 0.45, 0.6, 0.75][t % 4];
        let g = random_fenced_graph(&mut rng, k_fence, n, p);
        out.push(build_rips_2skeleton(&g).unwrap());
    }
    out
}

/// Random triangulated disk: a fence polygon fan-triangulated, with interior
/// vertices added by triangle subdivision, plus fin (one glued triangle) and
/// pendant (one edge) decorations. By construction H1 = H2 = 0, matching the
/// preconditions of the link-condition theorem, with both flagged and
/// unflagged interior vertices.
fn random_disk_complex(
    rng: &mut ChaCha8Rng,
    k_fence: usize,
    inserts: usize,
    decorations: usize,
) -> SimplicialComplex2 {
    let v = |i: usize| VertexId(i as u32);
    let mut labels: Vec<String> = (1..=k_fence).map(|i| format!("f{i}")).collect();
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    let mut triangles: BTreeSet<Triangle> = BTreeSet::new();
    for i in 0..k_fence {
        edges.insert(Edge::new(v(i), v((i + 1) % k_fence)));
    }
    for i in 1..k_fence - 1 {
        edges.insert(Edge::new(v(0), v(i)));
        edges.insert(Edge::new(v(0), v(i + 1)));
        triangles.insert(Triangle::new(v(0), v(i), v(i + 1)));
    }
    let mut next = k_fence;
    for _ in 0..inserts {
        let ts: Vec<Triangle> = triangles.iter().copied().collect();
        let t = ts[rng.random_range(0..ts.len())];
        triangles.remove(&t);
        let w = v(next);
        labels.push(format!("w{}", next - k_fence + 1));
        next += 1;
        let [a, b, c] = t.vertices();
        for (x, y) in [(a, b), (b, c), (a, c)] {
            triangles.insert(Triangle::new(w, x, y));
        }
        for x in [a, b, c] {
            edges.insert(Edge::new(w, x));
        }
    }
    for _ in 0..decorations {
        let p = v(next);
        labels.push(format!("w{}", next - k_fence + 1));
        next += 1;
        if rng.random_bool(0.5) {
            let es: Vec<Edge> = edges.iter().copied().collect();
            let e = es[rng.random_range(0..es.len())];
            let (x, y) = e.endpoints();
            edges.insert(Edge::new(p, x));
            edges.insert(Edge::new(p, y));
            triangles.insert(Triangle::new(p, x, y));
        } else {
            let u = v(rng.random_range(0..next - 1));
            edges.insert(Edge::new(p, u));
        }
    }
    let positions = vec![None; labels.len()];
    let fence: Vec<VertexId> = (0..k_fence).map(v).collect();
    SimplicialComplex2::from_simplices(labels, positions, fence, edges, triangles).unwrap()
}

fn random_reliability(rng: &mut ChaCha8Rng, n_v: usize, n_e: usize) -> ReliabilityInstance {
    let vertices: Vec<String> = (0..n_v).map(|i| format!("x{i}")).collect();
    let mut edges = Vec::new();
    let mut p = Vec::new();
    for _ in 0..n_e {
        let a = rng.random_range(0..n_v);
        let mut b = rng.random_range(0..n_v);
        while b == a {
            b = rng.random_range(0..n_v);
        }
        edges.push((a, b));
        p.push(rng.random_range(0.05..0.95));
    }
    ReliabilityInstance::new(vertices, edges, p, 0, n_v - 1, 0.5).unwrap()
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_01_check_agrees_with_oracle() {
    criterion(1, "criterion check vs linear-system oracle", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut checked = 0usize;
        let mut verify = |k: &SimplicialComplex2| -> Result<(), String> {
            let (order, d) = build_boundary_matrix(k);
            let s = reduce(&d);
            let fast = check_criterion(&s, &order).is_some();
            let slow = criterion_oracle(k).pass;
            ensure!(
                fast == slow,
                "instance {checked}: reduction says {fast}, oracle says {slow}"
            );
            checked += 1;
            Ok(())
        };
        for t in 0..350usize {
            let k_fence = 4 + t % 7;
            let n = t % 9;
            let p = 0.15 + 0.65 * (t % 13) as f64 / 12.0;
            let g = random_fenced_graph(&mut rng, k_fence, n, p);
            verify(&build_rips_2skeleton(&g).unwrap())?;
        }
        for s in 0..150u64 {
            let r_b = 0.5 + 0.3 * (s % 4) as f64 / 3.0;
            let k = geometric_complex(s, (s % 10) as usize, r_b);
            ensure!(
                k.vertex_count() <= 25,
                "geometric instance {s} has {} nodes",
                k.vertex_count()
            );
            verify(&k)?;
        }
        let elapsed = start.elapsed();
        ensure!(checked >= 500, "only {checked} instances");
        ensure!(
            elapsed < Duration::from_secs(10),
            "took {elapsed:?}, budget 10s"
        );
        Ok(format!("{checked} instances, 0 mismatches, {elapsed:.2?}"))
    });
}

#[test]
fn criterion_02_death_set_enumeration_matches_brute_force() {
    criterion(2, "minimal death sets vs brute force", || {
        let start = Instant::now();
        let mut checked = 0usize;
        for (i, k) in small_interior_instances().iter().enumerate() {
            let fast = cake_or_death(k, &DeathSetOptions::default())
                .map_err(|e| format!("instance {i}: {e}"))?;
            let brute = brute_force_death_sets(k, 10).map_err(|e| format!("instance {i}: {e}"))?;
            ensure!(
                fast.minimal_death_sets == brute.minimal_death_sets,
                "instance {i}: families differ ({} vs {} sets)",
                fast.minimal_death_sets.len(),
                brute.minimal_death_sets.len()
            );
            ensure!(
                fast.baseline_failed == brute.baseline_failed,
                "instance {i}: baseline verdicts differ"
            );
            checked += 1;
        }
        let elapsed = start.elapsed();
        ensure!(checked >= 100, "only {checked} instances");
        ensure!(
            elapsed < Duration::from_secs(60),
            "took {elapsed:?}, budget 60s"
        );
        Ok(format!(
            "{checked} instances, families identical, {elapsed:.2?}"
        ))
    });
}

#[test]
fn criterion_03_transpositions_preserve_the_factorisation() {
    criterion(3, "transposition soundness", || {
        let mut rng = ChaCha8Rng::seed_from_u64(303);
        let mut instances: Vec<SimplicialComplex2> = vec![
            fixtures::fence_only(8),
            fixtures::wheel(6),
            fixtures::pair(),
            fixtures::twin(),
        ];
        for t in 0..6 {
            let g = random_fenced_graph(&mut rng, 5 + t % 3, 3 + t % 3, 0.55);
            instances.push(build_rips_2skeleton(&g).unwrap());
        }
        let mut total = 0usize;
        for (idx, k) in instances.iter().enumerate() {
            let (_, d) = build_boundary_matrix(k);
            let mut s = reduce(&d);
            let mut done = 0;
            let mut attempts = 0;
            while done < 150 {
                attempts += 1;
                ensure!(
                    attempts < 30_000,
                    "instance {idx}: ran out of legal transpositions"
                );
                let i = rng.random_range(0..s.len() - 1);
                if s.transpose(i).is_err() {
                    continue; // illegal (block boundary or incident pair)
                }
                done += 1;
                total += 1;
                s.validate()
                    .map_err(|e| format!("instance {idx} after {done} swaps: {e}"))?;
                let fresh = reduce(&s.permuted_boundary());
                let fresh_pairs = fresh.pairs();
                let ours: BTreeSet<(u32, u32)> = s
                    .pairs()
                    .iter()
                    .map(|&(r, c)| {
                        (
                            s.position_of(r as usize) as u32,
                            s.position_of(c as usize) as u32,
                        )
                    })
                    .collect();
                ensure!(
                    ours == fresh_pairs,
                    "instance {idx} after {done} swaps: pairing diverged from fresh reduce"
                );
            }
        }
        ensure!(total >= 1000, "only {total} transpositions");
        Ok(format!(
            "{total} legal transpositions across {} instances, all invariants held",
            instances.len()
        ))
    });
}

#[test]
fn criterion_04_supersets_of_death_sets_die() {
    criterion(4, "death-set superset closure", || {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let mut supersets_checked = 0usize;
        for (i, k) in small_interior_instances().iter().enumerate() {
            let report = cake_or_death(k, &DeathSetOptions::default())
                .map_err(|e| format!("instance {i}: {e}"))?;
            if report.minimal_death_sets.is_empty() {
                continue;
            }
            let (order, d) = build_boundary_matrix(k);
            let s0 = reduce(&d);
            let n = report.interior.len();
            for &set in &report.minimal_death_sets {
                for _ in 0..50 {
                    let mut sup = set;
                    for bit in 0..n {
                        if rng.random_bool(0.5) {
                            sup = sup.with(bit);
                        }
                    }
                    let class = classify_subset(k, &order, &s0, &report.interior, sup)
                        .map_err(|e| format!("instance {i}: {e}"))?;
                    ensure!(
                        class == DeathClass::Death,
                        "instance {i}: superset {:?} of a death set classified Cake",
                        report.interior.labels_of(sup, k)
                    );
                    supersets_checked += 1;
                }
            }
        }
        ensure!(
            supersets_checked >= 1000,
            "only {supersets_checked} supersets"
        );
        Ok(format!("{supersets_checked} supersets, all Death"))
    });
}

#[test]
fn criterion_05_probability_matches_brute_force_and_monte_carlo() {
    criterion(
        5,
        "failure probability: exact, brute force, Monte Carlo",
        || {
            let times = [0.1, 0.5, 1.0, 2.0, 5.0];
            let mut compared = 0usize;
            for (idx, k) in small_interior_instances().iter_mut().enumerate() {
                for (i, v) in k
                    .interior_vertices()
                    .collect::<Vec<_>>()
                    .into_iter()
                    .enumerate()
                {
                    let dist = match (i + idx) % 3 {
                        0 => Distribution::Exponential {
                            rate: 0.3 + 0.1 * (i % 5) as f64,
                        },
                        1 => Distribution::Weibull {
                            shape: 1.4,
                            scale: 2.0,
                        },
                        _ => Distribution::Fixed {
                            p: 0.2 + 0.06 * (i % 10) as f64,
                        },
                    };
                    k.set_failure(v, Some(dist));
                }
                let model =
                    FailureModel::from_complex(k).map_err(|e| format!("instance {idx}: {e}"))?;
                let report = cake_or_death(k, &DeathSetOptions::default())
                    .map_err(|e| format!("instance {idx}: {e}"))?;
                ensure!(
                    report.truncated_at_size.is_none(),
                    "instance {idx}: enumeration truncated"
                );
                let exact = prob_failure_exact(
                    &report.minimal_death_sets,
                    &report.interior,
                    &model,
                    &times,
                    20,
                )
                .map_err(|e| format!("instance {idx}: {e}"))?;
                let brute = prob_failure_bruteforce(k, &model, &times, 10)
                    .map_err(|e| format!("instance {idx}: {e}"))?;
                for (a, b) in exact.points.iter().zip(&brute.points) {
                    ensure!(
                        (a.probability - b.probability).abs() <= 1e-12,
                        "instance {idx} at t={}: exact {} vs brute {}",
                        a.t,
                        a.probability,
                        b.probability
                    );
                }
                compared += 1;
            }
            ensure!(compared >= 100, "only {compared} instances");

            // Fixtures with fixed p = 0.5 and hand-computed failure probabilities.
            let fixture_cases: [(&str, SimplicialComplex2, f64); 3] = [
                ("twin", fixtures::twin(), 0.75),
                ("pair", fixtures::pair(), 0.25),
                ("wheel", fixtures::wheel(6), 0.5),
            ];
            for (name, mut k, expected) in fixture_cases {
                for v in k.interior_vertices().collect::<Vec<_>>() {
                    k.set_failure(v, Some(Distribution::Fixed { p: 0.5 }));
                }
                let model = FailureModel::from_complex(&k).unwrap();
                let report = cake_or_death(&k, &DeathSetOptions::default()).unwrap();
                let exact = prob_failure_exact(
                    &report.minimal_death_sets,
                    &report.interior,
                    &model,
                    &[1.0],
                    20,
                )
                .unwrap();
                ensure!(
                    (exact.points[0].probability - expected).abs() <= 1e-12,
                    "{name}: exact {} vs hand value {expected}",
                    exact.points[0].probability
                );
                let mc = prob_failure_mc(
                    &report.minimal_death_sets,
                    &report.interior,
                    &model,
                    &[1.0],
                    100_000,
                    20_240_823,
                )
                .unwrap();
                let stderr = mc.points[0].stderr.unwrap();
                ensure!(
                    (mc.points[0].probability - expected).abs() <= 3.0 * stderr,
                    "{name}: mc {} vs {expected} (3 stderr = {})",
                    mc.points[0].probability,
                    3.0 * stderr
                );
            }
            Ok(format!(
                "{compared} instances exact==brute at 5 times; twin/pair/wheel within 3 stderr"
            ))
        },
    );
}

#[test]
fn criterion_06_link_flags_predict_single_removal_failures() {
    criterion(6, "link condition biconditional", || {
        let mut rng = ChaCha8Rng::seed_from_u64(600);
        let mut qualified = 0usize;
        let mut flagged_count = 0usize;
        let mut unflagged_count = 0usize;
        for trial in 0..300 {
            let k_fence = rng.random_range(4..10);
            let inserts = rng.random_range(0..8);
            let decorations = rng.random_range(0..6);
            if inserts + decorations == 0 {
                continue;
            }
            let k = random_disk_complex(&mut rng, k_fence, inserts, decorations);
            let (h1, h2) = homology_ranks(&k);
            ensure!(
                h1 == 0 && h2 == 0,
                "trial {trial}: disk family lost its precondition (h1={h1}, h2={h2})"
            );
            qualified += 1;
            for w in k.interior_vertices().collect::<Vec<_>>() {
                let flagged = graph_betti(&k.link(w)).1 > 0;
                let pruned = k.remove_vertices(&BTreeSet::from([w])).unwrap();
                let breaks = !criterion_oracle(&pruned).pass;
                ensure!(
                    flagged == breaks,
                    "trial {trial}, vertex {}: flagged={flagged} but removal breaking={breaks}",
                    k.label(w)
                );
                if flagged {
                    flagged_count += 1;
                } else {
                    unflagged_count += 1;
                }
            }
        }
        ensure!(qualified >= 200, "only {qualified} qualifying instances");
        ensure!(
            flagged_count >= 100 && unflagged_count >= 100,
            "family not two-sided: {flagged_count} flagged, {unflagged_count} unflagged"
        );

        // Instances violating the preconditions are excluded above but must
        // surface the second-homology warning at monitor startup.
        let state = init_monitor(&fixtures::pair()).unwrap();
        ensure!(
            state
                .init_warnings()
                .iter()
                .any(|w| w.contains("second homology")),
            "pair fixture produced no second-homology warning"
        );
        Ok(format!(
            "{qualified} instances, {flagged_count} flagged + {unflagged_count} unflagged vertices, biconditional exact"
        ))
    });
}

#[test]
fn criterion_07_incremental_links_match_recomputation() {
    criterion(7, "incremental link maintenance", || {
        let mut rng = ChaCha8Rng::seed_from_u64(707);
        let mut events_checked = 0usize;
        let mut streams = 0usize;
        for trial in 0..150 {
            let g = random_fenced_graph(&mut rng, 5 + trial % 4, 3 + trial % 4, 0.7);
            let k = build_rips_2skeleton(&g).unwrap();
            let Ok(mut m) = init_monitor(&k) else {
                continue;
            };
            streams += 1;
            let mut order: Vec<String> = k
                .interior_vertices()
                .map(|v| k.label(v).to_string())
                .collect();
            order.shuffle(&mut rng);
            for (i, label) in order.iter().enumerate() {
                let ev = FailureEvent {
                    time: i as f64,
                    vertex: label.clone(),
                };
                if m.process_failure(&ev).is_err() {
                    break;
                }
                events_checked += 1;
                let live = m.complex().clone();
                for u in live.interior_vertices() {
                    let expect = live.link(u);
                    ensure!(
                        m.link_of(u) == Some(&expect),
                        "trial {trial} after {label}: stored link of {} diverged",
                        live.label(u)
                    );
                    ensure!(
                        m.flagged(u) == Some(graph_betti(&expect).1 > 0),
                        "trial {trial} after {label}: flag of {} diverged",
                        live.label(u)
                    );
                }
                if matches!(m.status(), MonitorStatus::CriterionFailed { .. }) {
                    break;
                }
            }
        }
        ensure!(events_checked >= 100, "only {events_checked} events");
        Ok(format!(
            "{events_checked} events across {streams} streams, links and flags exact"
        ))
    });
}

#[test]
fn criterion_08_reduction_preserves_reliability() {
    criterion(8, "reliability reduction fidelity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(801);
        let mut compared = 0usize;
        for trial in 0..50 {
            let (n_v, n_e) = if trial < 40 {
                (2 + trial % 5, 1 + trial % 9)
            } else {
                (3 + trial % 2, 10 + trial % 3)
            };
            let g = random_reliability(&mut rng, n_v, n_e);
            let x = reduce_instance(&g).map_err(|e| format!("trial {trial}: {e}"))?;
            let r2 =
                reliability_bruteforce_2d(&x, 12).map_err(|e| format!("trial {trial}: {e}"))?;
            let r1 =
                reliability_bruteforce_1d(&g, 12).map_err(|e| format!("trial {trial}: {e}"))?;
            ensure!(
                (r2 - r1).abs() < 1e-12,
                "trial {trial} ({n_v} vertices, {n_e} edges): 2d {r2} vs 1d {r1}"
            );
            compared += 1;
        }
        ensure!(compared >= 50, "only {compared} instances");

        // Layered family: chains of segments with 1 or 2 parallel edges. The
        // fundamental-class count must equal the s-t path count exactly.
        let mut chains = 0usize;
        for trial in 0..12 {
            let segments = 3 + trial % 4;
            let widths: Vec<usize> = (0..segments).map(|_| rng.random_range(1..=2)).collect();
            let vertices: Vec<String> = (0..=segments).map(|i| format!("c{i}")).collect();
            let mut edges = Vec::new();
            let mut p = Vec::new();
            for (i, &w) in widths.iter().enumerate() {
                for _ in 0..w {
                    edges.push((i, i + 1));
                    p.push(rng.random_range(0.1..0.9));
                }
            }
            let g = ReliabilityInstance::new(vertices, edges, p, 0, segments, 0.5).unwrap();
            let expected: u64 = widths.iter().map(|&w| w as u64).product();
            let x = reduce_instance(&g).unwrap();
            let classes = count_fundamental_classes(&x);
            let paths = count_st_paths(&g);
            ensure!(
                classes == paths && paths == expected,
                "chain {trial} widths {widths:?}: {classes} classes, {paths} paths, expected {expected}"
            );
            chains += 1;
        }
        Ok(format!(
            "{compared} instances 2d==1d within 1e-12; {chains} layered chains counted exactly"
        ))
    });
}

#[test]
fn criterion_09_criterion_pass_implies_geometric_coverage() {
    criterion(9, "coverage soundness at r_c = r_b/sqrt(3)", || {
        let poly = ConvexPolygon::unit_square();
        let mut passes = 0usize;
        let mut generated = 0usize;
        for seed in 0..200u64 {
            let r_b = [0.35, 0.4, 0.45, 0.5][(seed % 4) as usize];
            let n = 8 + (seed % 25) as usize;
            let spec = GeneratorSpec {
                polygon: ConvexPolygon::unit_square(),
                n_interior: n,
                r_b,
                r_c: None,
                fence_spacing: None,
                seed,
                failure: None,
            };
            let out = generate(&spec).unwrap();
            let k = build_rips_2skeleton(&out.graph).unwrap();
            generated += 1;
            let (order, d) = build_boundary_matrix(&k);
            if check_criterion(&reduce(&d), &order).is_none() {
                continue;
            }
            passes += 1;
            let positions: Vec<[f64; 2]> = (0..out.graph.node_count())
                .map(|i| out.graph.node(VertexId(i as u32)).position.unwrap())
                .collect();
            let verdict = coverage_oracle(&positions, out.r_c, &poly, out.r_c / 50.0).unwrap();
            ensure!(
                verdict.covered,
                "seed {seed} (r_b={r_b}, n={n}): criterion passed but sample {:?} uncovered",
                verdict.worst_uncovered
            );
        }
        ensure!(generated >= 200, "only {generated} instances");
        ensure!(
            passes >= 30,
            "only {passes} passing instances; sweep too weak"
        );
        Ok(format!(
            "{generated} instances, {passes} criterion passes, all geometrically covered"
        ))
    });
}

#[test]
fn criterion_10_verdict_depends_only_on_triangle_boundaries() {
    criterion(10, "2-skeleton invariance over 4-clique faces", || {
        let mut rng = ChaCha8Rng::seed_from_u64(1010);
        let mut instances: Vec<SimplicialComplex2> = vec![fixtures::pair()];
        for t in 0..40 {
            let g = random_fenced_graph(&mut rng, 4 + t % 3, 2 + t % 3, 0.85);
            instances.push(build_rips_2skeleton(&g).unwrap());
        }
        let mut faces_tested = 0usize;
        let mut cliques_seen = 0usize;
        for (idx, k) in instances.iter().enumerate() {
            let verdict = criterion_oracle(k).pass;
            let vs: Vec<VertexId> = k.vertices().collect();
            let all_triangles: BTreeSet<Triangle> = k.triangles().collect();
            for a in 0..vs.len() {
                for b in a + 1..vs.len() {
                    for c in b + 1..vs.len() {
                        for d in c + 1..vs.len() {
                            let q = [vs[a], vs[b], vs[c], vs[d]];
                            let clique = q
                                .iter()
                                .enumerate()
                                .all(|(i, &x)| q[i + 1..].iter().all(|&y| k.has_edge(x, y)));
                            if !clique {
                                continue;
                            }
                            cliques_seen += 1;
                            let faces = [
                                Triangle::new(q[0], q[1], q[2]),
                                Triangle::new(q[0], q[1], q[3]),
                                Triangle::new(q[0], q[2], q[3]),
                                Triangle::new(q[1], q[2], q[3]),
                            ];
                            // The four faces of a filled tetrahedron form a
                            // 2-cycle: their edge boundaries cancel pairwise.
                            let mut boundary: BTreeSet<Edge> = BTreeSet::new();
                            for f in &faces {
                                for e in f.edges() {
                                    if !boundary.insert(e) {
                                        boundary.remove(&e);
                                    }
                                }
                            }
                            ensure!(
                                boundary.is_empty(),
                                "instance {idx}: tetrahedron boundary is not a 2-cycle"
                            );
                            // Each face's boundary is spanned by the other
                            // three, so removing or re-adding one face must
                            // never change the verdict.
                            for f in &faces {
                                let mut reduced = all_triangles.clone();
                                reduced.remove(f);
                                let k2 = SimplicialComplex2::from_simplices(
                                    (0..k.vertex_count())
                                        .map(|i| k.label(VertexId(i as u32)).to_string())
                                        .collect(),
                                    (0..k.vertex_count())
                                        .map(|i| k.position(VertexId(i as u32)))
                                        .collect(),
                                    k.fence().to_vec(),
                                    k.edges().collect(),
                                    reduced,
                                )
                                .unwrap();
                                let v2 = criterion_oracle(&k2).pass;
                                ensure!(
                                    v2 == verdict,
                                    "instance {idx}: dropping one 4-clique face flipped the verdict {verdict} -> {v2}"
                                );
                                faces_tested += 1;
                            }
                        }
                    }
                }
            }
        }
        ensure!(
            cliques_seen >= 20 && faces_tested >= 80,
            "too few 4-cliques ({cliques_seen}) or faces ({faces_tested})"
        );
        Ok(format!(
            "{cliques_seen} 4-cliques, {faces_tested} face drops, verdict never changed"
        ))
    });
}
