//! Ready-made worlds used by the examples, the tests and the acceptance
//! harness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NavError, Result};
use crate::geometry::{vector, Point};
use crate::shadow::{classify, region_query};
use crate::world::{random_world, validate, Obstacle, RandomWorldParams, World};

/// Random-world parameters for densely packed workspaces: radii between
/// 8 % and 20 % of `r0` and gaps of 2 % of `r0`, destination at the origin.
pub fn congested_params(dimension: usize, obstacles: usize, workspace_radius: f64) -> RandomWorldParams {
    let mut params = RandomWorldParams::new(dimension, obstacles, workspace_radius);
    params.radius_range = (0.08 * workspace_radius, 0.2 * workspace_radius);
    params.min_gap = 0.02 * workspace_radius;
    params
}

/// Seven obstacles around the origin whose generations are
/// `[1, 1, 1, 2, 2, 0, 0]`: three in plain view, two partly behind the first
/// two, and two entirely behind them.
pub fn generations_fixture() -> (World, Point) {
    let disk = |x: f64, y: f64, r: f64| Obstacle::new(vector(&[x, y]), r);
    let world = World::new(
        2,
        12.0,
        vec![
            disk(4.0, 0.0, 1.0),
            disk(0.0, 4.0, 1.0),
            disk(-4.0, -1.0, 1.0),
            disk(8.0, 1.4, 0.8),
            disk(1.3, 8.0, 0.8),
            disk(9.0, -0.9, 0.5),
            disk(-0.9, 9.0, 0.5),
        ],
    )
    .expect("fixture is well formed");
    (world, vector(&[0.0, 0.0]))
}

/// A 13-obstacle congested world with the destination at the origin, the
/// planar analogue of a cluttered showcase scene.
pub fn cluttered(dimension: usize, seed: u64) -> Result<(World, Point)> {
    let params = congested_params(dimension, 13, 10.0);
    let world = random_world(seed, &params)?;
    let destination = params.destination.clone();
    if !validate(&world, Some(&destination)).is_valid() {
        return Err(NavError::Invalid("generated world violates the assumptions".into()));
    }
    Ok((world, destination))
}

/// `count` starts spread evenly on a circle (first two coordinates) of
/// radius `radius`, nudged off obstacles and excluded half-line tubes by
/// scanning outwards in radius.
pub fn ring_starts(world: &World, destination: &Point, count: usize, radius: f64) -> Vec<Point> {
    let n = world.dimension();
    let mut starts = Vec::with_capacity(count);
    for k in 0..count {
        let a = std::f64::consts::TAU * (k as f64 + 0.5) / count as f64;
        let mut rho = radius;
        loop {
            let mut p = Point::zeros(n);
            p[0] = rho * a.cos();
            p[1] = rho * a.sin();
            if n > 2 {
                // Lift out of the plane so that 3D runs are not planar.
                p[2] = 0.15 * rho * (3.0 * a).sin();
            }
            if crate::batch::admissible_start(world, destination, &p) {
                starts.push(p);
                break;
            }
            rho *= 0.97;
        }
    }
    starts
}

/// `count` admissible random starts inside the blind set, so that every run
/// has to go around at least one obstacle. Starts are drawn behind the
/// obstacles in turn, inside their shadow cones. Deterministic in `seed`.
pub fn blind_starts(world: &World, destination: &Point, count: usize, seed: u64) -> Result<Vec<Point>> {
    if world.is_empty() {
        return Err(NavError::Invalid("a world without obstacles has no blind set".into()));
    }
    let gmap = classify(world, destination);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = world.dimension();
    let r0 = world.workspace_radius();
    let mut starts = Vec::with_capacity(count);
    let mut attempts = 0;
    while starts.len() < count {
        if attempts == 100_000 {
            return Err(NavError::Generation { attempts });
        }
        let o = &world.obstacles()[attempts % world.len()];
        attempts += 1;
        let rel = &o.center - destination;
        let dist = rel.norm();
        let axis = &rel / dist;
        let phi = (o.radius / dist).asin();
        // Direction inside the shadow cone.
        let hint = Point::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let side = &hint - &axis * hint.dot(&axis);
        if side.norm() < 1e-6 {
            continue;
        }
        let tilt = phi * rng.gen_range(0.0..0.9);
        let dir = &axis * tilt.cos() + side.normalize() * tilt.sin();
        let reach = rng.gen_range(dist + o.radius..r0);
        let q = destination + dir * reach;
        if crate::batch::admissible_start(world, destination, &q) && region_query(&q, world, destination, &gmap).in_blind {
            starts.push(q);
        }
    }
    Ok(starts)
}
