//! Shadow regions cast by obstacles as seen from the destination, obstacle
//! generations, and ownership of blind-set points.
//!
//! The shadow of obstacle `i` is the part of free space inside the cone with
//! vertex `x_d` enclosing the obstacle and beyond the sphere with diameter
//! `[x_d, cᵢ]`. For points of free space this is exactly the set of positions
//! whose segment to `x_d` crosses the obstacle.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{NavError, Result};
use crate::geometry::{
    clamped_asin, cone_contains, orthogonal_unit, segment_ball_entry, unit_angle, Cone, Point, Relation, Vector,
    ANGLE_TOL,
};
use crate::world::{Obstacle, ObstacleId, World};

/// Half-aperture `φᵢ` of the cone from the destination enclosing `obstacle`.
pub fn shadow_aperture(destination: &Point, obstacle: &Obstacle) -> Result<f64> {
    let dist = (&obstacle.center - destination).norm();
    if dist <= obstacle.radius {
        return Err(NavError::domain("destination lies inside an obstacle"));
    }
    Ok(clamped_asin(obstacle.radius / dist))
}

fn shadow_cone(destination: &Point, obstacle: &Obstacle) -> Result<Cone> {
    let phi = shadow_aperture(destination, obstacle)?;
    Cone::new(destination.clone(), &obstacle.center - destination, phi)
}

/// Whether `x` lies in the shadow region of `obstacle` with respect to
/// `destination`.
pub fn in_shadow(x: &Point, obstacle: &Obstacle, destination: &Point) -> Result<bool> {
    let cone = shadow_cone(destination, obstacle)?;
    Ok(x != destination && behind_sphere(x, obstacle, destination) && cone_contains(&cone, x, Relation::Le, ANGLE_TOL))
}

/// `(c − x)ᵀ(x_d − x) ≥ 0`: `x` is outside the open ball with diameter
/// `[x_d, c]`.
fn behind_sphere(x: &Point, obstacle: &Obstacle, destination: &Point) -> bool {
    (&obstacle.center - x).dot(&(destination - x)) >= 0.0
}

/// Whether `x` lies on the exit set: the conical part of the shadow boundary.
pub fn on_exit_set(x: &Point, obstacle: &Obstacle, destination: &Point, tol: f64) -> Result<bool> {
    let cone = shadow_cone(destination, obstacle)?;
    Ok(x != destination && behind_sphere(x, obstacle, destination) && cone_contains(&cone, x, Relation::Eq, tol))
}

/// Membership of `q` in the hat of the cone with vertex `x` enclosing
/// `obstacle`: the part of that cone inside the ball with diameter `[x, c]`,
/// i.e. between `x` and the circle of tangency.
pub fn in_hat(q: &Point, x: &Point, obstacle: &Obstacle) -> Result<bool> {
    let dist = (&obstacle.center - x).norm();
    if dist < obstacle.radius {
        return Err(NavError::domain("vertex lies inside the obstacle"));
    }
    let theta = clamped_asin(obstacle.radius / dist);
    let cone = Cone::new(x.clone(), &obstacle.center - x, theta)?;
    Ok(cone_contains(&cone, q, Relation::Le, ANGLE_TOL) && (&obstacle.center - q).dot(&(x - q)) <= 0.0)
}

/// Distance along the unit ray `origin + s·dir` to the first point of the
/// ball, or to the closest approach when the ray misses it.
fn ray_entry(origin: &Point, dir: &Vector, obstacle: &Obstacle) -> (f64, bool) {
    let rel = &obstacle.center - origin;
    let along = dir.dot(&rel);
    let miss_sq = rel.norm_squared() - along * along;
    let r_sq = obstacle.radius * obstacle.radius;
    if miss_sq <= r_sq && along >= 0.0 {
        (along - (r_sq - miss_sq).max(0.0).sqrt(), true)
    } else {
        (along, false)
    }
}

/// Whether the ball of `ball` meets the shadow region cast by `occluder`.
///
/// Both enclosing cones from the destination are circular, so they share a
/// direction iff their axes are within `φ_occluder + φ_ball`; along shared
/// directions the two disjoint balls keep a fixed depth order, which is
/// read off one shared ray in the plane of the two axes.
pub fn ball_intersects_shadow(destination: &Point, occluder: &Obstacle, ball: &Obstacle) -> bool {
    let (Ok(phi_o), Ok(phi_b)) = (shadow_aperture(destination, occluder), shadow_aperture(destination, ball)) else {
        return false;
    };
    let axis_o = (&occluder.center - destination).normalize();
    let axis_b = (&ball.center - destination).normalize();
    let alpha = unit_angle(&axis_o, &axis_b);
    if alpha > phi_o + phi_b + ANGLE_TOL {
        return false;
    }
    let lo = (-phi_o).max(alpha - phi_b);
    let hi = phi_o.min(alpha + phi_b);
    let t = if lo <= hi { 0.5 * (lo + hi) } else { hi };
    let w = orthogonal_unit(&axis_o, &axis_b);
    let dir = &axis_o * t.cos() + &w * t.sin();
    let (entry_o, _) = ray_entry(destination, &dir, occluder);
    let (entry_b, _) = ray_entry(destination, &dir, ball);
    entry_b > entry_o
}

const HIDDEN_SAMPLES: usize = 256;

/// Whether every ray from the destination towards `obstacles[k]` meets
/// another obstacle first. Rays are sampled in the planes spanned by the
/// obstacle axis and each other obstacle axis (plus coordinate planes above
/// two dimensions), with the analytic cone-boundary crossings added.
pub fn fully_hidden(world: &World, destination: &Point, k: usize) -> bool {
    let obstacles = world.obstacles();
    let target = &obstacles[k];
    let Ok(phi) = shadow_aperture(destination, target) else {
        return false;
    };
    let axis = (&target.center - destination).normalize();

    let mut azimuths: Vec<(Vector, Vec<f64>)> = Vec::new();
    for (j, other) in obstacles.iter().enumerate() {
        if j == k {
            continue;
        }
        let other_axis = (&other.center - destination).normalize();
        let w = orthogonal_unit(&axis, &other_axis);
        // Signed angle of the other axis in the (axis, w) plane.
        let alpha = other_axis.dot(&w).atan2(other_axis.dot(&axis));
        let phi_j = shadow_aperture(destination, other).unwrap_or(0.0);
        let mut extra = Vec::new();
        for edge in [alpha - phi_j, alpha + phi_j] {
            for nudge in [-1e-9, 1e-9] {
                let t = edge + nudge;
                if t.abs() < phi {
                    extra.push(t);
                }
            }
        }
        azimuths.push((w, extra));
    }
    if world.dimension() > 2 {
        for m in 0..world.dimension() {
            let mut e = Vector::zeros(world.dimension());
            e[m] = 1.0;
            azimuths.push((orthogonal_unit(&axis, &e), Vec::new()));
        }
    }
    if azimuths.is_empty() {
        return false;
    }

    let edge = phi * (1.0 - 1e-9);
    let n_half = HIDDEN_SAMPLES as i64;
    for (w, extra) in &azimuths {
        let sampled = (-n_half..=n_half).map(|s| edge * s as f64 / n_half as f64);
        for t in sampled.chain(extra.iter().copied()) {
            let dir = &axis * t.cos() + w * t.sin();
            let (entry_k, hit_k) = ray_entry(destination, &dir, target);
            if !hit_k {
                continue;
            }
            let blocked = obstacles.iter().enumerate().any(|(j, other)| {
                if j == k {
                    return false;
                }
                let (entry_j, hit_j) = ray_entry(destination, &dir, other);
                hit_j && entry_j < entry_k
            });
            if !blocked {
                return false;
            }
        }
    }
    true
}

/// Visibility classification of the obstacles from a destination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationMap {
    generation: Vec<usize>,
    shadow_links: Vec<Vec<ObstacleId>>,
    s: usize,
}

#[derive(Serialize)]
struct GenerationJson {
    generations: BTreeMap<String, usize>,
    s: usize,
}

impl GenerationMap {
    /// Generation of an obstacle: 1 for fully visible from the destination,
    /// `j ≥ 2` for partially visible and behind a generation `j − 1`
    /// obstacle, 0 for fully hidden.
    pub fn generation(&self, id: ObstacleId) -> usize {
        self.generation[id.index()]
    }

    /// Obstacles whose shadow regions the ball of `id` intersects.
    pub fn shadow_links(&self, id: ObstacleId) -> &[ObstacleId] {
        &self.shadow_links[id.index()]
    }

    /// Number of non-zero generations.
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.generation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generation.is_empty()
    }

    pub fn generations(&self) -> &[usize] {
        &self.generation
    }

    pub fn to_json(&self) -> Result<String> {
        let json = GenerationJson {
            generations: self
                .generation
                .iter()
                .enumerate()
                .map(|(k, &g)| (ObstacleId::from_index(k).to_string(), g))
                .collect(),
            s: self.s,
        };
        crate::io::to_json_string(&json)
    }
}

/// Labels every obstacle with its generation.
///
/// Generation 1 obstacles intersect no other shadow region. Generation `j`
/// obstacles are the not fully hidden ones intersecting the shadow of a
/// generation `j − 1` obstacle. Fully hidden obstacles are generation 0.
pub fn classify(world: &World, destination: &Point) -> GenerationMap {
    let obstacles = world.obstacles();
    let m = obstacles.len();
    let links: Vec<Vec<ObstacleId>> = (0..m)
        .map(|k| {
            (0..m)
                .filter(|&i| i != k && ball_intersects_shadow(destination, &obstacles[i], &obstacles[k]))
                .map(ObstacleId::from_index)
                .collect()
        })
        .collect();
    let hidden: Vec<bool> = (0..m)
        .map(|k| !links[k].is_empty() && fully_hidden(world, destination, k))
        .collect();

    let mut generation: Vec<Option<usize>> = (0..m)
        .map(|k| {
            if hidden[k] {
                Some(0)
            } else if links[k].is_empty() {
                Some(1)
            } else {
                None
            }
        })
        .collect();
    let mut level = 1;
    loop {
        let next: Vec<usize> = (0..m)
            .filter(|&k| {
                generation[k].is_none() && links[k].iter().any(|i| generation[i.index()] == Some(level))
            })
            .collect();
        if next.is_empty() {
            break;
        }
        level += 1;
        for k in next {
            generation[k] = Some(level);
        }
    }
    // Partially visible obstacles occluded only by hidden ones go one
    // generation beyond the deepest labelled one.
    let mut s = generation.iter().flatten().copied().max().unwrap_or(0);
    if generation.iter().any(Option::is_none) {
        s += 1;
    }
    let generation = generation.into_iter().map(|g| g.unwrap_or(s)).collect();
    GenerationMap {
        generation,
        shadow_links: links,
        s,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionQueryResult {
    pub in_blind: bool,
    pub owner: Option<ObstacleId>,
    pub owner_generation: Option<usize>,
}

/// Finds the obstacle whose sub-shadow contains `x`: the lowest-generation
/// obstacle shadowing `x`, ties broken by the obstacle met first along the
/// segment from the destination to `x`.
pub fn region_query(x: &Point, world: &World, destination: &Point, gmap: &GenerationMap) -> RegionQueryResult {
    let mut best: Option<(usize, f64, ObstacleId)> = None;
    for id in world.ids() {
        let generation = gmap.generation(id);
        if generation == 0 {
            continue;
        }
        let obstacle = world.obstacle(id);
        if clearly_unshadowed(x, obstacle, destination) || !in_shadow(x, obstacle, destination).unwrap_or(false) {
            continue;
        }
        let depth = segment_ball_entry(destination, x, &obstacle.center, obstacle.radius).unwrap_or(1.0);
        let better = match best {
            None => true,
            Some((g, d, _)) => generation < g || (generation == g && depth < d),
        };
        if better {
            best = Some((generation, depth, id));
        }
    }
    match best {
        Some((generation, _, id)) => RegionQueryResult {
            in_blind: true,
            owner: Some(id),
            owner_generation: Some(generation),
        },
        None => RegionQueryResult {
            in_blind: false,
            owner: None,
            owner_generation: None,
        },
    }
}

/// Cheap sufficient test for `x` lying outside the shadow: the segment from
/// the destination to `x` passes the obstacle with a margin well above the
/// angular tolerance of the exact test.
fn clearly_unshadowed(x: &Point, obstacle: &Obstacle, destination: &Point) -> bool {
    let (mut aa, mut ap, mut pp) = (0.0, 0.0, 0.0);
    for ((xi, ci), di) in x.iter().zip(obstacle.center.iter()).zip(destination.iter()) {
        let a = xi - di;
        let p = ci - di;
        aa += a * a;
        ap += a * p;
        pp += p * p;
    }
    let s = if aa > 0.0 { (ap / aa).clamp(0.0, 1.0) } else { 0.0 };
    let dist_sq = pp - 2.0 * s * ap + s * s * aa;
    let slack = obstacle.radius + 1e-6 * (pp.sqrt() + aa.sqrt());
    dist_sq > slack * slack
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vector;

    fn obstacle(c: &[f64], r: f64) -> Obstacle {
        Obstacle::new(vector(c), r)
    }

    #[test]
    fn shadow_membership() {
        let o = obstacle(&[0., 0.], 1.0);
        let xd = vector(&[5., 0.]);
        assert!(in_shadow(&vector(&[-3., 0.]), &o, &xd).unwrap());
        assert!(!in_shadow(&vector(&[3., 0.]), &o, &xd).unwrap());
        assert!(!in_shadow(&vector(&[0., 3.]), &o, &xd).unwrap());
        assert!(!in_shadow(&xd, &o, &xd).unwrap());
        assert!(in_shadow(&vector(&[0., 0.]), &o, &vector(&[0.5, 0.])).is_err());
    }

    #[test]
    fn exit_set_membership() {
        let o = obstacle(&[0., 0.], 1.0);
        let xd = vector(&[5., 0.]);
        // Tangent point from xd: angle acos(r/d) from the center-to-xd direction.
        let a = (1.0f64 / 5.0).acos();
        let tangent = vector(&[a.cos(), a.sin()]);
        let beyond = &tangent + (&tangent - &xd) * 0.8;
        assert!(on_exit_set(&beyond, &o, &xd, 1e-9).unwrap());
        assert!(!on_exit_set(&vector(&[-3., 0.]), &o, &xd, 1e-9).unwrap());
        assert!(!on_exit_set(&vector(&[3., 0.5]), &o, &xd, 1e-9).unwrap());
    }

    #[test]
    fn hat_membership() {
        let o = obstacle(&[4., 0.], 2.0);
        let x = vector(&[0., 0.]);
        // Beyond the ball on the axis: outside the diameter sphere [x, c].
        assert!(!in_hat(&vector(&[9., 0.]), &x, &o).unwrap());
        // Between the vertex and the near surface: (c - q)ᵀ(x - q) = -1·3 < 0.
        assert!(in_hat(&vector(&[1., 0.]), &x, &o).unwrap());
        assert!(in_hat(&x, &x, &o).unwrap());
        // Outside the enclosing cone.
        assert!(!in_hat(&vector(&[1., 1.]), &x, &o).unwrap());
        assert!(in_hat(&vector(&[0., 0.]), &vector(&[3., 0.]), &o).is_err());
    }

    #[test]
    fn depth_order_test() {
        let xd = vector(&[0., 0.]);
        let near = obstacle(&[3., 0.], 1.0);
        let far = obstacle(&[6., 0.5], 1.0);
        assert!(ball_intersects_shadow(&xd, &near, &far));
        assert!(!ball_intersects_shadow(&xd, &far, &near));
        let aside = obstacle(&[0., 5.], 1.0);
        assert!(!ball_intersects_shadow(&xd, &near, &aside));
    }

    #[test]
    fn single_obstacle_is_first_generation() {
        let w = World::new(2, 10.0, vec![obstacle(&[3., 1.], 1.0)]).unwrap();
        let g = classify(&w, &vector(&[0., 0.]));
        assert_eq!(g.generations(), &[1]);
        assert_eq!(g.s(), 1);
        assert_eq!(g.to_json().unwrap(), "{\n  \"generations\": {\n    \"1\": 1\n  },\n  \"s\": 1\n}\n");
    }

    #[test]
    fn hidden_obstacle_is_generation_zero() {
        let w = World::new(2, 10.0, vec![obstacle(&[3., 0.], 1.5), obstacle(&[7., 0.], 0.5)]).unwrap();
        let g = classify(&w, &vector(&[0., 0.]));
        assert_eq!(g.generations(), &[1, 0]);
        assert_eq!(g.shadow_links(ObstacleId(2)), &[ObstacleId(1)]);
    }

    #[test]
    fn region_owner_prefers_lower_generation() {
        let xd = vector(&[0., 0.]);
        let w = World::new(2, 10.0, vec![obstacle(&[3., 0.], 1.0), obstacle(&[6., 1.8], 1.0)]).unwrap();
        let g = classify(&w, &xd);
        assert_eq!(g.generations(), &[1, 2]);
        // Behind both obstacles on a ray through both balls.
        let x = vector(&[9.0 * 0.3f64.cos(), 9.0 * 0.3f64.sin()]);
        assert!(in_shadow(&x, &w.obstacles()[0], &xd).unwrap());
        assert!(in_shadow(&x, &w.obstacles()[1], &xd).unwrap());
        let q = region_query(&x, &w, &xd, &g);
        assert_eq!(q.owner, Some(ObstacleId(1)));
        assert_eq!(q.owner_generation, Some(1));
        // Only behind the second obstacle.
        let y = vector(&[9.0 * 0.4f64.cos(), 9.0 * 0.4f64.sin()]);
        let q = region_query(&y, &w, &xd, &g);
        assert_eq!(q.owner, Some(ObstacleId(2)));
        // Clear line of sight.
        let q = region_query(&vector(&[0., 5.]), &w, &xd, &g);
        assert!(!q.in_blind);
        assert_eq!(q.owner, None);
    }
}
