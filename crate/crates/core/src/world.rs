//! Sphere-world model: a ball workspace centred at the origin punctured by
//! disjoint spherical obstacles, plus navigation scenarios.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::geometry::{point_ray_distance, Point};
use crate::io;

/// Stable 1-based obstacle identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObstacleId(pub usize);

impl ObstacleId {
    pub fn from_index(index: usize) -> Self {
        ObstacleId(index + 1)
    }

    /// Position in [`World::obstacles`].
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for ObstacleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Obstacle {
    pub center: Point,
    pub radius: f64,
}

impl Obstacle {
    pub fn new(center: Point, radius: f64) -> Self {
        Obstacle { center, radius }
    }

    /// Signed distance from `q` to the obstacle surface.
    pub fn surface_distance(&self, q: &Point) -> f64 {
        (q - &self.center).norm() - self.radius
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct World {
    dimension: usize,
    workspace_radius: f64,
    obstacles: Vec<Obstacle>,
}

impl World {
    /// Builds a world after checking its structural invariants (dimension,
    /// finiteness, positive radii). The sphere-world assumptions are checked
    /// separately by [`validate`].
    pub fn new(dimension: usize, workspace_radius: f64, obstacles: Vec<Obstacle>) -> Result<Self> {
        if dimension < 2 {
            return Err(NavError::Invalid(format!("dimension {dimension} < 2")));
        }
        if !(workspace_radius.is_finite() && workspace_radius > 0.0) {
            return Err(NavError::Invalid(format!(
                "workspace radius {workspace_radius} must be positive"
            )));
        }
        for (k, o) in obstacles.iter().enumerate() {
            let id = ObstacleId::from_index(k);
            if o.center.len() != dimension {
                return Err(NavError::Invalid(format!(
                    "obstacle {id} has dimension {} but the world has {dimension}",
                    o.center.len()
                )));
            }
            if o.center.iter().any(|c| !c.is_finite()) {
                return Err(NavError::Invalid(format!("obstacle {id} has a non-finite center")));
            }
            if !(o.radius.is_finite() && o.radius > 0.0) {
                return Err(NavError::Invalid(format!("obstacle {id} radius must be positive")));
            }
            if o.radius >= workspace_radius {
                return Err(NavError::Invalid(format!(
                    "obstacle {id} radius is not below the workspace radius"
                )));
            }
        }
        Ok(World {
            dimension,
            workspace_radius,
            obstacles,
        })
    }

    pub fn empty(dimension: usize, workspace_radius: f64) -> Result<Self> {
        World::new(dimension, workspace_radius, Vec::new())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn workspace_radius(&self) -> f64 {
        self.workspace_radius
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn obstacle(&self, id: ObstacleId) -> &Obstacle {
        &self.obstacles[id.index()]
    }

    pub fn len(&self) -> usize {
        self.obstacles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obstacles.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ObstacleId> {
        (0..self.obstacles.len()).map(ObstacleId::from_index)
    }

    /// Closed free space: inside the workspace and outside every obstacle
    /// interior.
    pub fn free_space_contains(&self, q: &Point) -> bool {
        self.clearance(q) >= 0.0
    }

    /// `min(r0 − ‖q‖, minᵢ ‖q − cᵢ‖ − rᵢ)`, negative iff `q` is not free.
    pub fn clearance(&self, q: &Point) -> f64 {
        self.obstacles
            .iter()
            .map(|o| o.surface_distance(q))
            .fold(self.workspace_radius - q.norm(), f64::min)
    }

    pub(crate) fn check_point(&self, q: &Point, what: &str) -> Result<()> {
        if q.len() != self.dimension {
            return Err(NavError::Invalid(format!(
                "{what} has dimension {} but the world has {}",
                q.len(),
                self.dimension
            )));
        }
        if q.iter().any(|c| !c.is_finite()) {
            return Err(NavError::Invalid(format!("{what} is not finite")));
        }
        Ok(())
    }
}

/// A sphere-world assumption violated by a world.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "assumption")]
pub enum Violation {
    /// Obstacle not strictly inside the workspace (`‖cᵢ‖ + rᵢ < r0` fails).
    #[serde(rename = "A1")]
    NotContained { obstacle: ObstacleId },
    /// Two obstacles touch or overlap (`‖cᵢ − cⱼ‖ > rᵢ + rⱼ` fails).
    #[serde(rename = "A2")]
    Overlapping { obstacles: [ObstacleId; 2] },
    /// The destination-anchored central half-line behind `source` meets the
    /// ball of `blocking`.
    #[serde(rename = "A3")]
    CentralHalfLineBlocked {
        source: ObstacleId,
        blocking: ObstacleId,
    },
    /// The destination is outside the workspace or inside an obstacle.
    #[serde(rename = "destination")]
    DestinationNotFree,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, assumption: &str) -> bool {
        self.violations.iter().any(|v| match v {
            Violation::NotContained { .. } => assumption == "A1",
            Violation::Overlapping { .. } => assumption == "A2",
            Violation::CentralHalfLineBlocked { .. } => assumption == "A3",
            Violation::DestinationNotFree => assumption == "destination",
        })
    }
}

/// Checks the sphere-world assumptions. The central half-line condition is
/// checked statically for the destination-anchored half-lines
/// `{cₖ + δ(cₖ − x_d), δ > 0}`, so it requires a destination.
pub fn validate(world: &World, destination: Option<&Point>) -> ValidationReport {
    let mut violations = Vec::new();
    let r0 = world.workspace_radius();
    let obstacles = world.obstacles();
    for (k, o) in obstacles.iter().enumerate() {
        if !(o.center.norm() + o.radius < r0) {
            violations.push(Violation::NotContained {
                obstacle: ObstacleId::from_index(k),
            });
        }
    }
    for i in 0..obstacles.len() {
        for j in (i + 1)..obstacles.len() {
            let (a, b) = (&obstacles[i], &obstacles[j]);
            if !((&a.center - &b.center).norm() > a.radius + b.radius) {
                violations.push(Violation::Overlapping {
                    obstacles: [ObstacleId::from_index(i), ObstacleId::from_index(j)],
                });
            }
        }
    }
    if let Some(xd) = destination {
        if xd.len() != world.dimension() || !world.free_space_contains(xd) {
            violations.push(Violation::DestinationNotFree);
        } else {
            for (source, blocking) in central_half_line_hits(world, xd, 0.0) {
                violations.push(Violation::CentralHalfLineBlocked { source, blocking });
            }
        }
    }
    ValidationReport {
        valid: violations.is_empty(),
        violations,
    }
}

/// Pairs `(k, i)` such that the half-line behind obstacle `k` as seen from
/// `destination` passes within `margin` of obstacle `i`.
pub fn central_half_line_hits(world: &World, destination: &Point, margin: f64) -> Vec<(ObstacleId, ObstacleId)> {
    let obstacles = world.obstacles();
    let mut hits = Vec::new();
    for (k, source) in obstacles.iter().enumerate() {
        let dir = &source.center - destination;
        if dir.norm() == 0.0 {
            continue;
        }
        for (i, other) in obstacles.iter().enumerate() {
            if i != k && point_ray_distance(&other.center, &source.center, &dir) <= other.radius + margin {
                hits.push((ObstacleId::from_index(k), ObstacleId::from_index(i)));
            }
        }
    }
    hits
}

/// Navigation scenario: destination, start set, gain and integration
/// settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub destination: Point,
    pub starts: Vec<Point>,
    pub gamma: f64,
    pub dt: f64,
    pub t_max: f64,
    pub tol: f64,
}

impl Scenario {
    pub fn check(&self, world: &World) -> Result<()> {
        world.check_point(&self.destination, "destination")?;
        if !world.free_space_contains(&self.destination) {
            return Err(NavError::Invalid("destination is not in free space".into()));
        }
        for (k, s) in self.starts.iter().enumerate() {
            world.check_point(s, &format!("start {k}"))?;
            if !world.free_space_contains(s) {
                return Err(NavError::Invalid(format!("start {k} is not in free space")));
            }
        }
        for (name, v) in [("gamma", self.gamma), ("dt", self.dt), ("t_max", self.t_max), ("tol", self.tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(NavError::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Random worlds

#[derive(Clone, Debug)]
pub struct RandomWorldParams {
    pub dimension: usize,
    pub obstacles: usize,
    pub workspace_radius: f64,
    pub radius_range: (f64, f64),
    /// Minimum gap between obstacles, to the workspace boundary, to the
    /// destination and between central half-lines and other obstacles.
    pub min_gap: f64,
    pub destination: Point,
    /// Total number of obstacle placement attempts before giving up.
    pub max_attempts: usize,
}

impl RandomWorldParams {
    /// Defaults for `m` obstacles in a workspace of radius `r0` with the
    /// destination at the origin.
    pub fn new(dimension: usize, obstacles: usize, workspace_radius: f64) -> Self {
        RandomWorldParams {
            dimension,
            obstacles,
            workspace_radius,
            radius_range: (0.06 * workspace_radius, 0.15 * workspace_radius),
            min_gap: 0.05 * workspace_radius,
            destination: Point::zeros(dimension),
            max_attempts: 200_000,
        }
    }
}

const PLACEMENT_TRIES: usize = 2_000;

/// Rejection-samples a world satisfying the containment, disjointness and
/// static central half-line conditions with the configured gaps. The result
/// is a deterministic function of `seed` and `params`.
pub fn random_world(seed: u64, params: &RandomWorldParams) -> Result<World> {
    let n = params.dimension;
    let r0 = params.workspace_radius;
    let (r_min, r_max) = params.radius_range;
    if n < 2 || !(r0 > 0.0) || !(r_min > 0.0) || r_max < r_min || params.destination.len() != n {
        return Err(NavError::Invalid("infeasible random world parameters".into()));
    }
    let xd = &params.destination;
    let gap = params.min_gap;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0usize;
    'world: while attempts < params.max_attempts {
        let mut placed: Vec<Obstacle> = Vec::with_capacity(params.obstacles);
        while placed.len() < params.obstacles {
            let mut ok = false;
            for _ in 0..PLACEMENT_TRIES {
                attempts += 1;
                if attempts >= params.max_attempts {
                    break 'world;
                }
                let radius = if r_max > r_min { rng.gen_range(r_min..=r_max) } else { r_min };
                let reach = r0 - radius - gap;
                if reach <= 0.0 {
                    continue;
                }
                let center = sample_ball(&mut rng, n, reach);
                let candidate = Obstacle::new(center, radius);
                if candidate.surface_distance(xd) < gap {
                    continue;
                }
                if placed
                    .iter()
                    .any(|o| (&o.center - &candidate.center).norm() - o.radius - radius < gap)
                {
                    continue;
                }
                if !half_lines_clear(&placed, &candidate, xd, gap) {
                    continue;
                }
                placed.push(candidate);
                ok = true;
                break;
            }
            if !ok {
                continue 'world;
            }
        }
        return World::new(n, r0, placed);
    }
    Err(NavError::Generation { attempts })
}

fn half_lines_clear(placed: &[Obstacle], candidate: &Obstacle, xd: &Point, gap: f64) -> bool {
    let dir_new = &candidate.center - xd;
    placed.iter().all(|o| {
        let dir_old = &o.center - xd;
        point_ray_distance(&o.center, &candidate.center, &dir_new) > o.radius + gap
            && point_ray_distance(&candidate.center, &o.center, &dir_old) > candidate.radius + gap
    })
}

/// Uniform sample from the ball of the given radius centred at the origin.
pub(crate) fn sample_ball<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Point {
    loop {
        let p = Point::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0));
        if p.norm_squared() <= 1.0 {
            return p * radius;
        }
    }
}

// ---------------------------------------------------------------------------
// Files

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObstacleFile {
    center: Vec<f64>,
    radius: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldFile {
    dimension: usize,
    workspace_radius: f64,
    obstacles: Vec<ObstacleFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    destination: Vec<f64>,
    starts: Vec<Vec<f64>>,
    gamma: f64,
    dt: f64,
    t_max: f64,
    tol: f64,
}

pub fn world_to_json(world: &World) -> Result<String> {
    let file = WorldFile {
        dimension: world.dimension(),
        workspace_radius: world.workspace_radius(),
        obstacles: world
            .obstacles()
            .iter()
            .map(|o| ObstacleFile {
                center: o.center.iter().copied().collect(),
                radius: o.radius,
            })
            .collect(),
    };
    io::to_json_string(&file)
}

pub fn world_from_json(text: &str) -> Result<World> {
    let file: WorldFile = serde_json::from_str(text)?;
    let obstacles = file
        .obstacles
        .into_iter()
        .map(|o| Obstacle::new(Point::from_vec(o.center), o.radius))
        .collect();
    World::new(file.dimension, file.workspace_radius, obstacles)
}

pub fn load_world(path: &Path) -> Result<World> {
    world_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_world(path: &Path, world: &World) -> Result<()> {
    std::fs::write(path, world_to_json(world)?)?;
    Ok(())
}

pub fn scenario_to_json(scenario: &Scenario) -> Result<String> {
    let file = ScenarioFile {
        destination: scenario.destination.iter().copied().collect(),
        starts: scenario.starts.iter().map(|s| s.iter().copied().collect()).collect(),
        gamma: scenario.gamma,
        dt: scenario.dt,
        t_max: scenario.t_max,
        tol: scenario.tol,
    };
    io::to_json_string(&file)
}

pub fn scenario_from_json(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    Ok(Scenario {
        destination: Point::from_vec(file.destination),
        starts: file.starts.into_iter().map(Point::from_vec).collect(),
        gamma: file.gamma,
        dt: file.dt,
        t_max: file.t_max,
        tol: file.tol,
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    scenario_from_json(&std::fs::read_to_string(path)?)
}

pub fn save_scenario(path: &Path, scenario: &Scenario) -> Result<()> {
    std::fs::write(path, scenario_to_json(scenario)?)?;
    Ok(())
}
