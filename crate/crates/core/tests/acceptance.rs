//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! straight to stdout so the lines survive output capture.

mod common;

use std::io::Write;

use nalgebra::Vector3;
use rand::Rng;

use stemos::geo::{map_residuals, pnp_residuals, solve_map_alignment, solve_pnp, MapProjection, RigidTransform};
use stemos::metrics::{compute_metrics, run_suite, SuiteConfig, SuiteReport};
use stemos::spatial::{build_scene_tree, Domain, Level, ObjectGraph, PredicateParams};
use stemos::stem::{read_log, reduce, restore, snapshot, write_log};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn report(n: usize, name: &str, o: &Outcome, secs: f64) {
    let line = format!("criterion {n} {name}: {} ({}) [{secs:.1}s]\n", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn metric_identity() -> Outcome {
    let mut worst_abs: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    let mut pass = true;
    for (sr, aest, ss) in common::PUBLISHED {
        let m = compute_metrics(&[common::synthetic_report(sr, aest)]).expect("non-empty");
        let got = m.ss.expect("completions");
        let abs = (got - ss).abs();
        worst_abs = worst_abs.max(abs);
        worst_rel = worst_rel.max(abs / ss);
        // Published SS values are rounded to two decimals.
        pass &= abs <= 0.005 + 1e-12;
    }
    Outcome { pass, detail: format!("worst |SS - published| = {worst_abs:.4}, worst relative {:.2}%", 100.0 * worst_rel) }
}

fn fold_determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut mismatches = 0;
    for seed in 0..100u64 {
        let (events, built) = common::event_script(seed, 1000);
        let path = dir.path().join(format!("{seed}.jsonl"));
        write_log(&path, &events).expect("write");
        let replayed = reduce(&common::m0(), &read_log(&path).expect("read")).expect("replay");
        let cut = common::rng(seed ^ 0xc07).random_range(0..=events.len());
        let head = reduce(&common::m0(), &events[..cut]).expect("head");
        let resumed = reduce(&restore(&snapshot(&head)).expect("restore"), &events[cut..]).expect("tail");
        let want = snapshot(&built);
        if snapshot(&replayed) != want || snapshot(&resumed) != want {
            mismatches += 1;
        }
    }
    Outcome { pass: mismatches == 0, detail: format!("{mismatches}/100 scripts diverged") }
}

fn relation_closure() -> Outcome {
    let params = PredicateParams::default();
    let mut bad = 0;
    let mut checks = 0;
    for seed in 0..1000u64 {
        let mut g = ObjectGraph::new();
        let max_nodes = 1 + (seed as usize % 15);
        for op in common::graph_ops(seed, max_nodes, 40, &params) {
            common::apply_op(&mut g, &op, &params);
            checks += 1;
            if common::edge_set(&g) != common::brute_force_edges(&g, &params) {
                bad += 1;
            }
        }
    }
    Outcome { pass: bad == 0, detail: format!("{bad} mismatches over {checks} edits on 1000 graphs") }
}

fn alignment() -> Outcome {
    let mut r = common::rng(42);
    let proj = MapProjection { scale: 20.0, offset: [100.0, 50.0] };
    let k = common::camera();
    let (mut clean_rot, mut clean_cost): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let truth = common::map_pose(&mut r);
        let points = common::cloud(&mut r, 30);
        let targets = common::map_targets(&points, &proj, &truth, None);
        match solve_map_alignment(&points, &targets, &proj, &RigidTransform::identity()) {
            Ok(a) => {
                clean_rot = clean_rot.max(a.transform.rotation_error(&truth));
                clean_cost = clean_cost.max(a.cost);
            }
            Err(_) => clean_rot = f64::INFINITY,
        }
        let cam = common::random_rotation(&mut r, 0.5).compose(&RigidTransform::from_translation(Vector3::new(0.2, -0.1, 0.3)));
        let pairs = common::render(&mut r, 20, &cam, &k, 0.0);
        let init = common::random_rotation(&mut r, 10f64.to_radians()).compose(&cam);
        match solve_pnp(&pairs, &k, &init) {
            Ok(s) => {
                clean_rot = clean_rot.max(s.transform.rotation_error(&cam));
                clean_cost = clean_cost.max(s.cost);
            }
            Err(_) => clean_rot = f64::INFINITY,
        }
    }
    let mut noisy_rot: f64 = 0.0;
    for _ in 0..100 {
        let truth = common::map_pose(&mut r);
        let points = common::cloud(&mut r, 30);
        // Metric noise of 0.01 m, expressed in map units.
        let targets = common::map_targets(&points, &proj, &truth, Some((&mut r, 0.01 * proj.scale)));
        noisy_rot = noisy_rot.max(
            solve_map_alignment(&points, &targets, &proj, &RigidTransform::identity()).map_or(f64::INFINITY, |a| a.transform.rotation_error(&truth)),
        );
        let cam = common::random_rotation(&mut r, 0.5);
        let pairs = common::render(&mut r, 50, &cam, &k, 0.5);
        let init = common::random_rotation(&mut r, 10f64.to_radians()).compose(&cam);
        noisy_rot = noisy_rot.max(solve_pnp(&pairs, &k, &init).map_or(f64::INFINITY, |s| s.transform.rotation_error(&cam)));
    }
    let mut jac: f64 = 0.0;
    for _ in 0..50 {
        let t = common::map_pose(&mut r);
        let points = common::cloud(&mut r, 8);
        let targets = common::map_targets(&points, &proj, &common::map_pose(&mut r), None);
        let (_, j) = map_residuals(&points, &targets, &proj, &t);
        let fd = common::fd_jacobian(&t, 1e-6, |x| map_residuals(&points, &targets, &proj, x).0.iter().copied().collect());
        jac = jac.max(common::jacobian_error(&j, &fd));
        let pose = common::random_rotation(&mut r, 0.4);
        let pairs = common::render(&mut r, 8, &pose, &k, 1.0);
        let (_, j) = pnp_residuals(&pairs, &k, &pose).expect("in front");
        let fd = common::fd_jacobian(&pose, 1e-6, |x| pnp_residuals(&pairs, &k, x).expect("in front").0.iter().copied().collect());
        jac = jac.max(common::jacobian_error(&j, &fd));
    }
    Outcome {
        pass: clean_rot < 1e-6 && clean_cost < 1e-12 && noisy_rot.to_degrees() < 1.0 && jac < 1e-5,
        detail: format!(
            "noiseless rot {clean_rot:.1e} rad cost {clean_cost:.1e}; noisy max rot {:.3} deg; jacobian rel err {jac:.1e}",
            noisy_rot.to_degrees()
        ),
    }
}

fn scheduler() -> Outcome {
    let (mut violations, mut orphans, mut dispatched) = (0, 0, 0);
    for seed in 0..500u64 {
        let run = common::simulate_schedule(seed);
        violations += run.violations;
        orphans += run.orphans;
        dispatched += run.dispatched;
    }
    Outcome {
        pass: violations == 0 && orphans == 0,
        detail: format!("{violations} barrier/exclusivity and {orphans} conservation violations, {dispatched} dispatches"),
    }
}

fn metric(r: &SuiteReport, cell: &str, arm: &str) -> (f64, f64, f64) {
    r.get(cell, arm).map_or((0.0, 0.0, f64::INFINITY), |m| (m.sr, m.msr, m.aest.unwrap_or(f64::INFINITY)))
}

fn lifelong() -> Outcome {
    let r = run_suite(&SuiteConfig::lifelong());
    let mut pass = true;
    let mut parts = Vec::new();
    for level in ["L1", "L2"] {
        let cell = format!("{level}/SQ5");
        let gap = metric(&r, &cell, "memory").1 - metric(&r, &cell, "baseline").1;
        pass &= gap >= 30.0;
        parts.push(format!("{cell} MSR gap {gap:.1}pp"));
    }
    for sq in [1, 3, 5] {
        let cell = format!("L2/SQ{sq}");
        let ratio = metric(&r, &cell, "memory").2 / metric(&r, &cell, "baseline").2;
        pass &= ratio <= 0.8;
        parts.push(format!("{cell} AEST ratio {ratio:.2}"));
    }
    Outcome { pass, detail: parts.join(", ") }
}

fn robustness() -> Outcome {
    let r = run_suite(&SuiteConfig::robustness());
    let mut parts = Vec::new();
    let mut pass = true;
    let mut gaps = Vec::new();
    for mode in ["E1", "E2", "E3"] {
        let (m, b) = (metric(&r, mode, "memory").0, metric(&r, mode, "baseline").0);
        pass &= m > b;
        let rel = if b > 0.0 { (m - b) / b } else { f64::INFINITY };
        gaps.push((mode, m - b, rel));
        parts.push(format!("{mode} {m:.1} vs {b:.1} (+{:.1}pp, +{:.0}%)", m - b, 100.0 * rel));
    }
    let e2 = gaps[1];
    let largest = gaps.iter().all(|g| g.0 == "E2" || (e2.1 > g.1 && e2.2 > g.2));
    pass &= largest;
    let ablation = run_suite(&SuiteConfig::ablation());
    let emb = metric(&ablation, "household/L1", "no_embodiment").0;
    pass &= emb == 0.0;
    parts.push(format!("E2 largest: {largest}, no-embodiment SR {emb:.1}"));
    Outcome { pass, detail: parts.join(", ") }
}

fn scalability() -> Outcome {
    let r = run_suite(&SuiteConfig::scalability());
    let rows: Vec<(f64, f64)> = [1, 3, 5].iter().map(|n| {
        let (sr, _, aest) = metric(&r, &format!("wheeled_x{n}"), "memory");
        (sr, aest)
    }).collect();
    let decreasing = rows.windows(2).all(|w| w[1].1 < w[0].1);
    let drop = rows.iter().map(|x| rows[0].0 - x.0).fold(0.0, f64::max);
    Outcome {
        pass: decreasing && drop <= 10.0,
        detail: format!(
            "AEST {:.2} -> {:.2} -> {:.2}, SR {:.1} -> {:.1} -> {:.1}",
            rows[0].1, rows[1].1, rows[2].1, rows[0].0, rows[1].0, rows[2].0
        ),
    }
}

fn bands() -> Outcome {
    let mut violations = 0;
    let mut worlds = 0;
    for (level, ok) in [
        (Level::L1, (|n| n < 20) as fn(usize) -> bool),
        (Level::L2, |n| (20..=30).contains(&n)),
        (Level::L3, |n| (40..=50).contains(&n)),
    ] {
        for domain in Domain::ALL {
            for seed in 0..100 {
                let tree = build_scene_tree(&stemos::sim::generate_world(domain, level, seed)).expect("valid world");
                worlds += 1;
                if !ok(tree.nodes.len() + tree.object_count()) {
                    violations += 1;
                }
            }
        }
    }
    Outcome { pass: violations == 0, detail: format!("{violations} out-of-band worlds of {worlds}") }
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("metric identity", metric_identity),
        ("fold determinism", fold_determinism),
        ("relation closure", relation_closure),
        ("alignment recovery", alignment),
        ("scheduler safety", scheduler),
        ("lifelong trend", lifelong),
        ("robustness trend", robustness),
        ("scalability trend", scalability),
        ("world bands", bands),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let o = run();
        report(i + 1, name, &o, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
