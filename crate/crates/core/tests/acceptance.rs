//! Acceptance gate: runs criteria 1 to 9 and prints one PASS/FAIL line per
//! criterion. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spherenav::batch::{admissible_start, compare};
use spherenav::controller::{control, xi, ControlParams};
use spherenav::geometry::{vector, Point, Vector};
use spherenav::oracle2d::{oracle_length, single_obstacle_optimal_length};
use spherenav::scenarios::{blind_starts, cluttered, congested_params, generations_fixture};
use spherenav::shadow::{classify, shadow_aperture};
use spherenav::simulator::{simulate, Outcome, SimParams, TrajectoryRecord};
use spherenav::world::{random_world, validate, Obstacle, RandomWorldParams, World};

/// Every trajectory simulated by the harness, for the safety criterion.
#[derive(Default)]
struct SafetyLedger {
    trajectories: usize,
    /// Smallest `min_clearance / r0` seen.
    worst: f64,
}

impl SafetyLedger {
    fn add(&mut self, min_clearance: f64, workspace_radius: f64) {
        let scaled = min_clearance / workspace_radius;
        if self.trajectories == 0 || scaled < self.worst {
            self.worst = scaled;
        }
        self.trajectories += 1;
    }

    fn add_record(&mut self, rec: &TrajectoryRecord, world: &World) {
        self.add(rec.min_clearance, world.workspace_radius());
    }
}

struct Verdict {
    pass: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

fn report(number: usize, title: &str, v: &Verdict) -> bool {
    let within = v.limit.is_none_or(|l| v.elapsed <= l);
    let pass = v.pass && within;
    let limit = v.limit.map_or(String::new(), |l| format!(", limit {:.0} s", l.as_secs_f64()));
    println!(
        "criterion {number} [{}] {title}: {} ({:.1} s{limit})",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        v.elapsed.as_secs_f64()
    );
    pass
}

/// Angle between two vectors from the parallel and orthogonal parts of `a`
/// relative to `b`; independent of the library's angle routine.
fn reference_angle(a: &Vector, b: &Vector) -> f64 {
    let bh = b / b.norm();
    let along = a.dot(&bh);
    let across = (a - &bh * along).norm();
    across.atan2(along)
}

fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vector {
    loop {
        let v = Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let norm = v.norm();
        if norm > 1e-3 && norm <= 1.0 {
            return v / norm;
        }
    }
}

fn random_orthogonal_unit<R: Rng>(rng: &mut R, axis: &Vector) -> Vector {
    loop {
        let v = random_unit(rng, axis.len());
        let w = &v - axis * v.dot(axis);
        if w.norm() > 1e-3 {
            return w.normalize();
        }
    }
}

fn criterion_1() -> Verdict {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut worst_gap, mut worst_cone, mut worst_norm) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for k in 0..1000 {
        let n = 2 + k % 3;
        let x = Vector::from_fn(n, |_, _| rng.gen_range(-5.0..5.0));
        let axis = random_unit(&mut rng, n);
        let r = rng.gen_range(0.2..3.0);
        let d = r * rng.gen_range(1.02..8.0);
        let obstacle = Obstacle::new(&x + &axis * d, r);
        let theta = (r / d).asin();
        let beta = theta * rng.gen_range(1e-3..1.0 - 1e-3);
        let side = random_orthogonal_unit(&mut rng, &axis);
        let u = (&axis * beta.cos() + &side * beta.sin()) * rng.gen_range(0.1..10.0);
        let out = xi(&u, &x, &obstacle).expect("u points into the cone");
        let attained = reference_angle(&u, &out);
        let mut best = f64::INFINITY;
        for _ in 0..10_000 {
            let s = random_orthogonal_unit(&mut rng, &axis);
            let w = &axis * theta.cos() + s * theta.sin();
            best = best.min(reference_angle(&u, &w));
        }
        worst_gap = worst_gap.max(attained - best);
        worst_cone = worst_cone.max((reference_angle(&out, &axis) - theta).abs());
        let expected = u.norm() * beta.sin() / theta.sin();
        worst_norm = worst_norm.max((out.norm() - expected).abs() / expected);
    }
    Verdict {
        pass: worst_gap <= 1e-6 && worst_cone <= 1e-9 && worst_norm <= 1e-9,
        detail: format!(
            "1000 instances, angle excess over best sample {worst_gap:.2e} rad (≤ 1e-6), cone error {worst_cone:.2e} rad (≤ 1e-9), norm error {worst_norm:.2e} (≤ 1e-9)"
        ),
        elapsed: clock.elapsed(),
        limit: Some(Duration::from_secs(10)),
    }
}

fn criterion_2(safety: &mut SafetyLedger) -> Verdict {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let r0 = 10.0;
    let params = SimParams::defaults(r0, 1.0);
    let (mut worst_over, mut worst_under) = (0.0f64, 0.0f64);
    let mut runs = 0;
    let mut failures = Vec::new();
    while runs < 20 {
        let c = random_unit(&mut rng, 2) * rng.gen_range(0.0..6.0);
        let r = rng.gen_range(0.5..2.0);
        let world = World::new(2, r0, vec![Obstacle::new(c.clone(), r)]).expect("well formed");
        let xd = random_unit(&mut rng, 2) * rng.gen_range(0.0..8.0);
        if world.clearance(&xd) < 0.5 {
            continue;
        }
        let x0 = random_unit(&mut rng, 2) * rng.gen_range(0.0..9.5);
        let blocked = spherenav::geometry::point_segment_distance(&c, &x0, &xd) < r;
        if !blocked || !admissible_start(&world, &xd, &x0) || !validate(&world, Some(&xd)).is_valid() {
            continue;
        }
        runs += 1;
        let gmap = classify(&world, &xd);
        let rec = simulate(&world, &xd, &x0, &gmap, &params).expect("valid start");
        safety.add_record(&rec, &world);
        let optimal = single_obstacle_optimal_length(&x0, &xd, &c, r).expect("off the half-line");
        let length = rec.length_to(&xd);
        let ratio = length / optimal - 1.0;
        worst_over = worst_over.max(ratio);
        worst_under = worst_under.min(ratio);
        if rec.outcome != Outcome::Converged || !(-0.005..=0.01).contains(&ratio) {
            failures.push(format!("{:?} {:?} ratio {ratio:.3e}", x0.as_slice(), rec.outcome));
        }
    }
    Verdict {
        pass: failures.is_empty(),
        detail: format!(
            "20 blocked configurations, length excess max {worst_over:.2e} (≤ 1e-2), min {worst_under:.2e} (≥ -5e-3){}",
            if failures.is_empty() { String::new() } else { format!(", failures {failures:?}") }
        ),
        elapsed: clock.elapsed(),
        limit: Some(Duration::from_secs(30)),
    }
}

/// The five comparison worlds shared by criteria 4 and 5.
fn comparison_worlds() -> Vec<(u64, World, Point)> {
    [(1u64, 10usize), (2, 11), (3, 12), (4, 13), (5, 13)]
        .into_iter()
        .map(|(seed, m)| {
            let params = congested_params(2, m, 10.0);
            let world = random_world(seed, &params).expect("world generation");
            (seed, world, params.destination.clone())
        })
        .collect()
}

fn criteria_4_and_5(safety: &mut SafetyLedger) -> (Verdict, Verdict, Vec<f64>) {
    let clock = Instant::now();
    let mut lines4 = Vec::new();
    let mut lines5 = Vec::new();
    let (mut pass4, mut pass5) = (true, true);
    let mut straight_ratios = Vec::new();
    let mut sim_time = Duration::ZERO;
    for (seed, world, xd) in comparison_worlds() {
        let params = SimParams::defaults(world.workspace_radius(), 1.0);
        let t = Instant::now();
        let report = compare(&world, &xd, 100, 1000 + seed, 0.01, &params).expect("comparison");
        sim_time += t.elapsed();
        let converged = report.counts.get(&Outcome::Converged).copied().unwrap_or(0);
        for r in &report.records {
            safety.add(r.min_clearance, world.workspace_radius());
            let straight = (Point::from_vec(r.start.clone()) - &xd).norm();
            straight_ratios.push(r.oracle_length / straight);
        }
        pass4 &= converged == 100;
        pass5 &= report.match_rate >= 0.85;
        lines4.push(format!("world {seed} ({} obstacles): {converged}/100", world.len()));
        let detours = report
            .records
            .iter()
            .filter(|r| r.oracle_length > (Point::from_vec(r.start.clone()) - &xd).norm() * (1.0 + 1e-9))
            .count();
        lines5.push(format!(
            "world {seed}: {:.0}% ({detours} starts need a detour)",
            100.0 * report.match_rate
        ));
    }
    let elapsed = clock.elapsed();
    (
        Verdict {
            pass: pass4,
            detail: format!("converged within t_max = 50: {}", lines4.join(", ")),
            elapsed: sim_time,
            limit: Some(Duration::from_secs(300)),
        },
        Verdict {
            pass: pass5,
            detail: format!("match rate at 1% (≥ 85% each): {}", lines5.join(", ")),
            elapsed,
            limit: Some(Duration::from_secs(600)),
        },
        straight_ratios,
    )
}

fn criterion_6(safety: &mut SafetyLedger) -> Verdict {
    let clock = Instant::now();
    let disk = |c: &[f64], r: f64| Obstacle::new(vector(c), r);
    // (world, destination, start on a central half-line, lateral direction)
    let mut fixtures: Vec<(World, Point, Point, Vector)> = vec![
        (World::new(2, 10.0, vec![disk(&[3., 0.], 1.0)]).unwrap(), vector(&[0., 0.]), vector(&[6., 0.]), vector(&[0., 1.])),
        (World::new(2, 10.0, vec![disk(&[0., -4.], 1.5)]).unwrap(), vector(&[0., 0.]), vector(&[0., -8.]), vector(&[1., 0.])),
        (World::new(2, 10.0, vec![disk(&[4., 2.], 1.0)]).unwrap(), vector(&[1., 2.]), vector(&[7.5, 2.]), vector(&[0., -1.])),
        (
            World::new(2, 10.0, vec![disk(&[-3., 0.], 1.0), disk(&[0., 5.], 1.0)]).unwrap(),
            vector(&[0., 0.]),
            vector(&[-8., 0.]),
            vector(&[0., 1.]),
        ),
        (World::new(2, 10.0, vec![disk(&[-2., 3.], 1.25)]).unwrap(), vector(&[-2., -2.]), vector(&[-2., 7.]), vector(&[1., 0.])),
        (World::new(3, 10.0, vec![disk(&[3., 0., 0.], 1.0)]).unwrap(), vector(&[0., 0., 0.]), vector(&[6., 0., 0.]), vector(&[0., 0., 1.])),
        (World::new(3, 10.0, vec![disk(&[0., 0., -4.], 1.5)]).unwrap(), vector(&[0., 0., 0.]), vector(&[0., 0., -8.]), vector(&[1., 0., 0.])),
        (World::new(3, 10.0, vec![disk(&[1., 5., 1.], 1.0)]).unwrap(), vector(&[1., 1., 1.]), vector(&[1., 8., 1.]), vector(&[0., 0., -1.])),
        (
            World::new(4, 10.0, vec![disk(&[0., 0., 0., 4.], 1.0)]).unwrap(),
            vector(&[0., 0., 0., 0.]),
            vector(&[0., 0., 0., 7.]),
            vector(&[0., 1., 0., 0.]),
        ),
    ];
    let (w, xd) = generations_fixture();
    fixtures.push((w, xd, vector(&[6.5, 0.]), vector(&[0., -1.])));
    let mut ok = 0;
    let mut failures = Vec::new();
    for (k, (world, xd, on_line, lateral)) in fixtures.iter().enumerate() {
        assert!(validate(world, Some(xd)).is_valid(), "fixture {k} invalid");
        let gmap = classify(world, xd);
        let params = SimParams::defaults(world.workspace_radius(), 1.0);
        let stalled = simulate(world, xd, on_line, &gmap, &params).expect("valid start");
        let perturbed_start = on_line + lateral * (1e-6 * world.workspace_radius());
        let perturbed = simulate(world, xd, &perturbed_start, &gmap, &params).expect("valid start");
        safety.add_record(&stalled, world);
        safety.add_record(&perturbed, world);
        if stalled.outcome == Outcome::Stalled && perturbed.outcome == Outcome::Converged {
            ok += 1;
        } else {
            failures.push(format!("fixture {k}: {:?}/{:?}", stalled.outcome, perturbed.outcome));
        }
    }
    Verdict {
        pass: ok == fixtures.len(),
        detail: format!(
            "{ok}/{} fixtures stall on the half-line and converge after a 1e-6·r0 lateral offset{}",
            fixtures.len(),
            if failures.is_empty() { String::new() } else { format!(", {failures:?}") }
        ),
        elapsed: clock.elapsed(),
        limit: None,
    }
}

fn criterion_7() -> Verdict {
    let clock = Instant::now();
    let (world, xd) = cluttered(2, 7).expect("world");
    let r0 = world.workspace_radius();
    let gmap = classify(&world, &xd);
    let cp = ControlParams::new(1.0, &world);
    let h = 1e-5 * r0;
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut pairs = 0;
    let mut worst = 0.0f64;
    let mut attempts = 0;
    while pairs < 200 && attempts < 100_000 {
        attempts += 1;
        let k = rng.gen_range(0..world.len());
        let o = &world.obstacles()[k];
        let phi = shadow_aperture(&xd, o).expect("destination outside");
        let rel = &o.center - &xd;
        let axis = rel[1].atan2(rel[0]);
        let side = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let a = axis + side * phi;
        let dir = vector(&[a.cos(), a.sin()]);
        let normal = vector(&[-a.sin(), a.cos()]);
        let s = rng.gen_range(rel.norm() * phi.cos()..r0 * 1.2);
        let p = &xd + &dir * s;
        let x = &p + &normal * (h / 2.0);
        let y = &p - &normal * (h / 2.0);
        if world.clearance(&x) < 1e-3 * r0 || world.clearance(&y) < 1e-3 * r0 {
            continue;
        }
        let (ux, _) = control(&x, &world, &xd, &gmap, &cp).expect("control");
        let (uy, _) = control(&y, &world, &xd, &gmap, &cp).expect("control");
        worst = worst.max((&ux - &uy).norm() / (&x - &y).norm());
        pairs += 1;
    }
    let bound = 10.0 * 1.0 * r0;
    Verdict {
        pass: pairs == 200 && worst <= bound,
        detail: format!("{pairs} pairs at separation 1e-5·r0, max ‖Δu‖/‖Δx‖ = {worst:.3} (≤ {bound})"),
        elapsed: clock.elapsed(),
        limit: None,
    }
}

fn criterion_8(straight_ratios: &[f64]) -> Verdict {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst = 0.0f64;
    let mut instances = 0;
    let mut lowest_ratio = straight_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    while instances < 100 {
        let c = random_unit(&mut rng, 2) * rng.gen_range(0.0..5.0);
        let r = rng.gen_range(0.3..2.5);
        let world = World::new(2, 10.0, vec![Obstacle::new(c.clone(), r)]).expect("well formed");
        let s = random_unit(&mut rng, 2) * rng.gen_range(0.0..9.5);
        let t = random_unit(&mut rng, 2) * rng.gen_range(0.0..9.5);
        if world.clearance(&s) <= 0.0 || world.clearance(&t) <= 0.0 {
            continue;
        }
        let Ok(analytic) = single_obstacle_optimal_length(&s, &t, &c, r) else {
            continue;
        };
        if spherenav::geometry::point_segment_distance(&c, &s, &t) >= r {
            continue;
        }
        instances += 1;
        let graph = oracle_length(&world, &s, &t).expect("reachable");
        worst = worst.max((graph - analytic).abs() / analytic);
        lowest_ratio = lowest_ratio.min(graph / (&s - &t).norm());
    }
    Verdict {
        pass: worst <= 1e-9 && lowest_ratio >= 1.0 - 1e-12,
        detail: format!(
            "100 blocked single-disk instances, max relative gap {worst:.2e} (≤ 1e-9); min shortest/straight over {} lengths = {lowest_ratio:.12}",
            100 + straight_ratios.len()
        ),
        elapsed: clock.elapsed(),
        limit: None,
    }
}

fn criterion_9(safety: &mut SafetyLedger) -> Verdict {
    let clock = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    let mut run = |world: &World, xd: &Point, starts: &[Point], label: String, safety: &mut SafetyLedger| {
        let gmap = classify(world, xd);
        let params = SimParams::defaults(world.workspace_radius(), 1.0);
        let mut converged = 0;
        let mut worst = f64::INFINITY;
        for x0 in starts {
            let rec = simulate(world, xd, x0, &gmap, &params).expect("valid start");
            safety.add_record(&rec, world);
            worst = worst.min(rec.min_clearance);
            converged += usize::from(rec.outcome == Outcome::Converged);
        }
        let ok = converged == starts.len() && worst >= -1e-6 * world.workspace_radius();
        pass &= ok;
        parts.push(format!("{label}: {converged}/{} converged, min clearance {worst:.2e}", starts.len()));
    };
    let (w3, xd3) = cluttered(3, 3).expect("3D world");
    let starts3 = blind_starts(&w3, &xd3, 15, 33).expect("starts");
    run(&w3, &xd3, &starts3, format!("n=3, {} obstacles", w3.len()), safety);
    for n in [4usize, 5] {
        let params = RandomWorldParams::new(n, 3, 10.0);
        let world = random_world(40 + n as u64, &params).expect("world");
        let starts = blind_starts(&world, &params.destination, 5, 50 + n as u64).expect("starts");
        run(&world, &params.destination, &starts, format!("n={n}, 3 obstacles"), safety);
    }
    Verdict {
        pass,
        detail: parts.join("; "),
        elapsed: clock.elapsed(),
        limit: None,
    }
}

/// Additional runs feeding the safety criterion: the planar cluttered scene
/// from fifteen starts and a single-obstacle comparison.
fn extra_runs(safety: &mut SafetyLedger) -> (bool, String) {
    let (world, xd) = cluttered(2, 1).expect("world");
    let gmap = classify(&world, &xd);
    let params = SimParams::defaults(world.workspace_radius(), 1.0);
    let mut converged = 0;
    for x0 in blind_starts(&world, &xd, 15, 11).expect("starts") {
        let rec = simulate(&world, &xd, &x0, &gmap, &params).expect("valid start");
        safety.add_record(&rec, &world);
        converged += usize::from(rec.outcome == Outcome::Converged);
    }
    let single = World::new(2, 10.0, vec![Obstacle::new(vector(&[2.5, -1.0]), 1.8)]).expect("world");
    let origin = vector(&[0., 0.]);
    let report = compare(&single, &origin, 100, 9, 0.01, &params).expect("comparison");
    for r in &report.records {
        safety.add(r.min_clearance, 10.0);
    }
    (
        converged == 15 && report.match_rate == 1.0,
        format!(
            "planar 13-obstacle scene {converged}/15 converged; single-obstacle match rate {:.0}%",
            100.0 * report.match_rate
        ),
    )
}

fn main() {
    // Respect `cargo test -- --list` and filters by running only when the
    // harness is invoked without a filter that excludes it.
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut safety = SafetyLedger::default();
    let mut all = true;

    let v1 = criterion_1();
    all &= report(1, "closed-form projection equals brute-force optimum", &v1);
    let v2 = criterion_2(&mut safety);
    all &= report(2, "single-obstacle paths are within 1% of the shortest", &v2);
    let (v4, v5, straight) = criteria_4_and_5(&mut safety);
    let v6 = criterion_6(&mut safety);
    let v7 = criterion_7();
    let v8 = criterion_8(&straight);
    let v9 = criterion_9(&mut safety);
    let (extra_ok, extra_detail) = extra_runs(&mut safety);

    let v3 = Verdict {
        pass: safety.trajectories >= 600 && safety.worst >= -1e-6,
        detail: format!(
            "{} trajectories, min clearance {:.3e}·r0 (≥ -1e-6·r0)",
            safety.trajectories, safety.worst
        ),
        elapsed: Duration::ZERO,
        limit: None,
    };
    all &= report(3, "no trajectory leaves free space", &v3);
    all &= report(4, "random starts converge in five cluttered worlds", &v4);
    all &= report(5, "trajectories match shortest paths", &v5);
    all &= report(6, "central half-lines are repelling equilibria", &v6);
    all &= report(7, "control is continuous across shadow boundaries", &v7);
    all &= report(8, "tangent-graph shortest paths agree with the closed form", &v8);
    all &= report(9, "navigation works in three to five dimensions", &v9);
    println!("additional runs [{}]: {extra_detail}", if extra_ok { "PASS" } else { "FAIL" });
    all &= extra_ok;

    if !all {
        std::process::exit(1);
    }
}
