//! The feedback law.
//!
//! Where the destination is in sight the vehicle moves straight to it under
//! `u_d = −γ(x − x_d)`. In the blind set the nominal control is projected
//! onto the enclosing cone of the obstacle owning the current sub-shadow,
//! then successively onto the cones of obstacles standing in front of the
//! last projected one, until the resulting direction is unobstructed.

use serde::Serialize;

use crate::error::{NavError, Result};
use crate::geometry::{angle, enclosing_half_aperture_saturating, unit_angle, Point, Vector, ANGLE_TOL};
use crate::shadow::{region_query, GenerationMap};
use crate::world::{Obstacle, ObstacleId, World};

/// Below this norm an intermediate control is treated as zero.
const ZERO_CONTROL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ControlParams {
    /// Gain of the nominal control, in 1/time.
    pub gamma: f64,
    /// Maximum number of projections per evaluation.
    pub max_chain: usize,
}

impl ControlParams {
    /// Gain `gamma` with the chain cap set to the number of obstacles.
    pub fn new(gamma: f64, world: &World) -> Self {
        ControlParams {
            gamma,
            max_chain: world.len().max(1),
        }
    }
}

/// Ordered obstacles used by the successive projections at one position,
/// with the intermediate controls `u₀ … u_h`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProjectionChain {
    pub obstacles: Vec<ObstacleId>,
    pub controls: Vec<Vector>,
}

impl ProjectionChain {
    /// Number of projections `h`.
    pub fn h(&self) -> usize {
        self.obstacles.len()
    }
}

pub fn nominal(x: &Point, destination: &Point, gamma: f64) -> Vector {
    (x - destination) * -gamma
}

/// Angle between `u` and the direction from `x` to the obstacle center.
pub fn beta(u: &Vector, x: &Point, obstacle: &Obstacle) -> Result<f64> {
    angle(u, &(&obstacle.center - x))
}

/// Closest direction to `u` on the cone with vertex `x` enclosing
/// `obstacle`, scaled so that it coincides with `u` on the cone surface.
///
/// Requires `u` to point into the enclosing cone (`β ≤ θ`). Computed as
/// `u − ‖u‖ sin(θ − β)/sin θ · v_c` with `v_c` the unit direction to the
/// center, which stays well defined when `β = 0`.
pub fn xi(u: &Vector, x: &Point, obstacle: &Obstacle) -> Result<Vector> {
    let to_center = &obstacle.center - x;
    let dist = to_center.norm();
    if dist < obstacle.radius {
        return Err(NavError::domain("xi evaluated inside the obstacle"));
    }
    let norm_u = u.norm();
    if !(norm_u > 0.0) {
        return Err(NavError::domain("xi of a zero control"));
    }
    let axis = to_center / dist;
    let theta = enclosing_half_aperture_saturating(dist, obstacle.radius);
    let beta = unit_angle(&(u / norm_u), &axis);
    if beta > theta + ANGLE_TOL {
        return Err(NavError::domain(format!(
            "control does not point into the enclosing cone (β = {beta}, θ = {theta})"
        )));
    }
    Ok(cone_projection(u, norm_u, &axis, theta, beta))
}

fn cone_projection(u: &Vector, norm_u: f64, axis: &Vector, theta: f64, beta: f64) -> Vector {
    if beta >= theta - ANGLE_TOL {
        return u.clone();
    }
    if beta == 0.0 {
        return Vector::zeros(u.len());
    }
    u - axis * (norm_u * (theta - beta).sin() / theta.sin())
}

/// Projection used inside the control loop: saturates the aperture for
/// positions numerically inside the ball and leaves controls already outside
/// the cone untouched.
fn project_in_loop(u: &Vector, x: &Point, obstacle: &Obstacle) -> Vector {
    let to_center = &obstacle.center - x;
    let dist = to_center.norm();
    let norm_u = u.norm();
    if !(dist > 0.0) || !(norm_u > 0.0) {
        return u.clone();
    }
    let axis = to_center / dist;
    let theta = enclosing_half_aperture_saturating(dist, obstacle.radius);
    let beta = unit_angle(&(u / norm_u), &axis);
    cone_projection(u, norm_u, &axis, theta, beta)
}

/// Distance from the point with planar coordinates `(p1, p2)`, `p2 ≥ 0`, to
/// the hat of an enclosing cone whose vertex is the origin, axis the first
/// coordinate, obstacle center at distance `d` and half-aperture `theta`.
///
/// In this plane the hat is bounded by the two tangent segments and the arc
/// of the circle with diameter `[0, d]` between the tangent points.
fn planar_hat_distance(p1: f64, p2: f64, d: f64, theta: f64) -> f64 {
    let half = 0.5 * d;
    let from_mid = (p1 - half).hypot(p2);
    let inside_wedge = (p1 == 0.0 && p2 == 0.0) || p2.atan2(p1) <= theta + ANGLE_TOL;
    if inside_wedge && from_mid <= half {
        return 0.0;
    }
    let tangent_len = d * theta.cos();
    let (t1, t2) = (tangent_len * theta.cos(), tangent_len * theta.sin());
    // Segment from the vertex to the tangent point.
    let seg_len_sq = t1 * t1 + t2 * t2;
    let s = if seg_len_sq > 0.0 {
        ((p1 * t1 + p2 * t2) / seg_len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let d_seg = (p1 - s * t1).hypot(p2 - s * t2);
    let omega = p2.atan2(p1 - half);
    let d_arc = if omega <= 2.0 * theta {
        (from_mid - half).abs()
    } else {
        (p1 - t1).hypot(p2 - t2).min((p1 - d).hypot(p2))
    };
    d_seg.min(d_arc)
}

/// Whether the ball `ball` meets the hat of the cone with vertex `x`
/// enclosing `obstacle`. Cone, diameter sphere and ball are all symmetric
/// about the plane through `x`, the obstacle center and the ball center, so
/// the test is carried out exactly in that plane.
pub fn ball_meets_hat(x: &Point, obstacle: &Obstacle, ball: &Obstacle) -> bool {
    let rel = &obstacle.center - x;
    let d = rel.norm();
    if !(d > 0.0) {
        return false;
    }
    let axis = rel / d;
    let p = &ball.center - x;
    let p1 = p.dot(&axis);
    let p2 = (&p - &axis * p1).norm();
    let theta = enclosing_half_aperture_saturating(d, obstacle.radius);
    planar_hat_distance(p1, p2, d, theta) <= ball.radius
}

/// Obstacles other than `id` whose boundary meets the hat of the cone with
/// vertex `x` enclosing obstacle `id`: the obstacles standing between `x`
/// and that obstacle.
pub fn shadowed_obstacles(x: &Point, id: ObstacleId, world: &World) -> Vec<ObstacleId> {
    let obstacle = world.obstacle(id);
    world
        .ids()
        .filter(|&k| k != id && ball_meets_hat(x, obstacle, world.obstacle(k)))
        .collect()
}

/// Next obstacle of the chain after obstacle `id`: among the obstacles in
/// front of it whose enclosing cone strictly contains `u`, the one with the
/// smallest surface gap to obstacle `id`.
pub fn next_obstacle(u: &Vector, x: &Point, id: ObstacleId, world: &World) -> Option<ObstacleId> {
    let norm_u = u.norm();
    if !(norm_u > 0.0) {
        return None;
    }
    let dir = u / norm_u;
    let current = world.obstacle(id);
    let mut best: Option<(f64, ObstacleId)> = None;
    for k in shadowed_obstacles(x, id, world) {
        let candidate = world.obstacle(k);
        let to_center = &candidate.center - x;
        let dist = to_center.norm();
        if !(dist > 0.0) {
            continue;
        }
        let theta = enclosing_half_aperture_saturating(dist, candidate.radius);
        if unit_angle(&dir, &(to_center / dist)) >= theta - ANGLE_TOL {
            continue;
        }
        let gap = (&candidate.center - &current.center).norm() - candidate.radius - current.radius;
        if best.is_none_or(|(g, _)| gap < g) {
            best = Some((gap, k));
        }
    }
    best.map(|(_, k)| k)
}

/// Evaluates the feedback law at `x`, returning the control and the
/// projection chain that produced it.
pub fn control(
    x: &Point,
    world: &World,
    destination: &Point,
    gmap: &GenerationMap,
    params: &ControlParams,
) -> Result<(Vector, ProjectionChain)> {
    let u0 = nominal(x, destination, params.gamma);
    let region = region_query(x, world, destination, gmap);
    let mut chain = ProjectionChain {
        obstacles: Vec::new(),
        controls: vec![u0],
    };
    let Some(mut current) = region.owner else {
        let u = chain.controls[0].clone();
        return Ok((u, chain));
    };
    loop {
        let previous = chain.controls.last().expect("chain starts with u0");
        if previous.norm() < ZERO_CONTROL {
            break;
        }
        let projected = project_in_loop(previous, x, world.obstacle(current));
        chain.obstacles.push(current);
        let zero = projected.norm() < ZERO_CONTROL;
        chain.controls.push(projected);
        if zero {
            break;
        }
        let projected = chain.controls.last().expect("just pushed");
        match next_obstacle(projected, x, current, world) {
            None => break,
            Some(k) if chain.obstacles.contains(&k) => {
                return Err(NavError::Chain {
                    reason: format!("obstacle {k} selected twice"),
                    chain: chain.obstacles,
                });
            }
            Some(_) if chain.obstacles.len() >= params.max_chain => {
                return Err(NavError::Chain {
                    reason: format!("chain cap {} reached", params.max_chain),
                    chain: chain.obstacles,
                });
            }
            Some(k) => current = k,
        }
    }
    let u = chain.controls.last().expect("non-empty").clone();
    Ok((u, chain))
}
