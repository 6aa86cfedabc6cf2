//! Closed-loop integration of `ẋ = u(x)` with safety, stall and convergence
//! monitors, trajectory recording and path-length bookkeeping.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::controller::{control, ControlParams};
use crate::error::{NavError, Result};
use crate::geometry::{Point, Vector};
use crate::shadow::GenerationMap;
use crate::world::{ObstacleId, World};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub gamma: f64,
    pub dt: f64,
    pub t_max: f64,
    pub conv_tol: f64,
    pub stall_speed_tol: f64,
    pub stall_window: f64,
    pub safety_tol: f64,
    /// Fraction of the clearance a single step may cover.
    pub clearance_step_cap: f64,
}

impl SimParams {
    /// Defaults scaled to a workspace of radius `r0` and gain `gamma`.
    pub fn defaults(workspace_radius: f64, gamma: f64) -> Self {
        SimParams {
            gamma,
            dt: 1e-3,
            t_max: 50.0 / gamma,
            conv_tol: 1e-3 * workspace_radius,
            stall_speed_tol: 1e-6 * gamma * workspace_radius,
            stall_window: 1.0 / gamma,
            safety_tol: 1e-6 * workspace_radius,
            clearance_step_cap: 0.25,
        }
    }

    /// Defaults overridden by the gain, step, horizon and convergence
    /// tolerance of a scenario.
    pub fn from_scenario(world: &World, scenario: &crate::world::Scenario) -> Self {
        SimParams {
            dt: scenario.dt,
            t_max: scenario.t_max,
            conv_tol: scenario.tol,
            ..SimParams::defaults(world.workspace_radius(), scenario.gamma)
        }
    }

    pub fn check(&self) -> Result<()> {
        let positive = [
            self.gamma,
            self.dt,
            self.t_max,
            self.conv_tol,
            self.stall_speed_tol,
            self.stall_window,
            self.safety_tol,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(NavError::Invalid("simulation parameters must be positive and finite".into()));
        }
        if !(self.clearance_step_cap > 0.0 && self.clearance_step_cap < 1.0) {
            return Err(NavError::Invalid("clearance_step_cap must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Converged,
    Stalled,
    Unsafe,
    Timeout,
    Diagnostic,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: Point,
    pub u: Vector,
    pub chain: Vec<ObstacleId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub samples: Vec<Sample>,
    pub path_length: f64,
    pub min_clearance: f64,
    pub outcome: Outcome,
    /// Obstacles whose closed ball the path entered and left, in exit order.
    pub visited_obstacles: Vec<ObstacleId>,
    pub steps: usize,
    pub diagnostic: Option<String>,
}

impl TrajectoryRecord {
    pub fn start(&self) -> &Point {
        &self.samples[0].x
    }

    pub fn end(&self) -> &Point {
        &self.samples.last().expect("at least the start sample").x
    }

    /// Path length plus the straight closing distance from the last sample
    /// to the destination.
    pub fn length_to(&self, destination: &Point) -> f64 {
        self.path_length + (self.end() - destination).norm()
    }

    pub fn to_csv(&self) -> String {
        let n = self.start().len();
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",x{i}");
        }
        for i in 1..=n {
            let _ = write!(out, ",u{i}");
        }
        out.push_str(",chain\n");
        for s in &self.samples {
            out.push_str(&crate::io::format_f64(s.t));
            for v in s.x.iter().chain(s.u.iter()) {
                out.push(',');
                out.push_str(&crate::io::format_f64(*v));
            }
            out.push(',');
            let ids: Vec<String> = s.chain.iter().map(|id| id.to_string()).collect();
            out.push_str(&ids.join(";"));
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            outcome: self.outcome,
            path_length: self.path_length,
            min_clearance: self.min_clearance,
            steps: self.steps,
            start: self.start().as_slice().to_vec(),
            end: self.end().as_slice().to_vec(),
            t_final: self.samples.last().map_or(0.0, |s| s.t),
            visited_obstacles: self.visited_obstacles.clone(),
            diagnostic: self.diagnostic.clone(),
            wall_time: None,
        }
    }
}

/// Per-run summary written next to each trajectory CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub outcome: Outcome,
    pub path_length: f64,
    pub min_clearance: f64,
    pub steps: usize,
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub t_final: f64,
    pub visited_obstacles: Vec<ObstacleId>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostic: Option<String>,
    /// Seconds; omitted unless requested so that outputs stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time: Option<f64>,
}

struct Dynamics<'a> {
    world: &'a World,
    destination: &'a Point,
    gmap: &'a GenerationMap,
    control: ControlParams,
}

impl Dynamics<'_> {
    fn eval(&self, x: &Point) -> Result<(Vector, Vec<ObstacleId>)> {
        let (u, chain) = control(x, self.world, self.destination, self.gmap, &self.control)?;
        Ok((u, chain.obstacles))
    }

    fn velocity(&self, x: &Point) -> Result<Vector> {
        Ok(control(x, self.world, self.destination, self.gmap, &self.control)?.0)
    }

    /// One capped RK4 step from `x` with `k1 = u(x)` already known.
    fn rk4(&self, x: &Point, k1: &Vector, params: &SimParams, dt: f64) -> Result<(Point, f64)> {
        let speed = k1.norm();
        let reach = params.clearance_step_cap * self.world.clearance(x).max(params.conv_tol);
        let h = if speed * dt > reach { reach / speed } else { dt };
        let k2 = self.velocity(&(x + k1 * (0.5 * h)))?;
        let k3 = self.velocity(&(x + &k2 * (0.5 * h)))?;
        let k4 = self.velocity(&(x + &k3 * h))?;
        let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        Ok((next, h))
    }
}

/// One RK4 step of the closed loop of nominal length `dt`, shortened so that
/// the displacement estimate `‖u(x)‖·dt` stays within a fixed fraction of the
/// clearance. Returns the new position and the step actually taken.
pub fn step(
    x: &Point,
    world: &World,
    destination: &Point,
    gmap: &GenerationMap,
    params: &SimParams,
    dt: f64,
) -> Result<(Point, f64)> {
    let dynamics = Dynamics {
        world,
        destination,
        gmap,
        control: ControlParams::new(params.gamma, world),
    };
    let k1 = dynamics.velocity(x)?;
    dynamics.rk4(x, &k1, params, dt)
}

/// Integrates the closed loop from `x0` until convergence, stall, safety
/// violation, timeout or a controller diagnostic.
pub fn simulate(
    world: &World,
    destination: &Point,
    x0: &Point,
    gmap: &GenerationMap,
    params: &SimParams,
) -> Result<TrajectoryRecord> {
    params.check()?;
    world.check_point(x0, "start")?;
    world.check_point(destination, "destination")?;
    if !world.free_space_contains(x0) {
        return Err(NavError::domain("start is not in free space"));
    }
    let dynamics = Dynamics {
        world,
        destination,
        gmap,
        control: ControlParams::new(params.gamma, world),
    };
    let mut record = TrajectoryRecord {
        samples: Vec::new(),
        path_length: 0.0,
        min_clearance: world.clearance(x0),
        outcome: Outcome::Timeout,
        visited_obstacles: Vec::new(),
        steps: 0,
        diagnostic: None,
    };
    let mut x = x0.clone();
    let mut t = 0.0;
    let mut stall_since: Option<f64> = None;
    let (mut u, chain) = match dynamics.eval(&x) {
        Ok(v) => v,
        Err(e) => return Ok(diagnostic_record(record, x, e)),
    };
    record.samples.push(Sample {
        t,
        x: x.clone(),
        u: u.clone(),
        chain,
    });
    loop {
        let to_goal = (&x - destination).norm();
        if to_goal <= params.conv_tol {
            record.outcome = Outcome::Converged;
            break;
        }
        if t >= params.t_max {
            record.outcome = Outcome::Timeout;
            break;
        }
        if u.norm() <= params.stall_speed_tol && to_goal > 10.0 * params.conv_tol {
            let since = *stall_since.get_or_insert(t);
            if t - since >= params.stall_window {
                record.outcome = Outcome::Stalled;
                break;
            }
        } else {
            stall_since = None;
        }
        let stepped = dynamics
            .rk4(&x, &u, params, params.dt)
            .and_then(|(next, h)| dynamics.eval(&next).map(|(u, chain)| (next, h, u, chain)));
        let (next, h, next_u, chain) = match stepped {
            Ok(v) => v,
            Err(e) => {
                record.diagnostic = Some(e.to_string());
                record.outcome = Outcome::Diagnostic;
                break;
            }
        };
        record.path_length += (&next - &x).norm();
        record.steps += 1;
        t += h;
        x = next;
        u = next_u;
        let clearance = world.clearance(&x);
        record.min_clearance = record.min_clearance.min(clearance);
        record.samples.push(Sample {
            t,
            x: x.clone(),
            u: u.clone(),
            chain,
        });
        if clearance < -params.safety_tol {
            record.outcome = Outcome::Unsafe;
            break;
        }
    }
    record.visited_obstacles = local_maneuver_lengths(&record, world, destination, 0.0)
        .into_iter()
        .filter_map(|m| m.obstacle)
        .collect();
    Ok(record)
}

fn diagnostic_record(mut record: TrajectoryRecord, x: Point, e: NavError) -> TrajectoryRecord {
    let n = x.len();
    record.samples.push(Sample {
        t: 0.0,
        x,
        u: Vector::zeros(n),
        chain: Vec::new(),
    });
    record.outcome = Outcome::Diagnostic;
    record.diagnostic = Some(e.to_string());
    record
}

/// One local maneuver: the part of the path from `entry` to `exit`, where
/// `exit` is the point at which the path leaves the inflated ball of
/// `obstacle` (or the destination for the last maneuver).
#[derive(Clone, Debug, PartialEq)]
pub struct Maneuver {
    pub obstacle: Option<ObstacleId>,
    pub entry: Point,
    pub exit: Point,
    pub length: f64,
}

/// Distance to a ball surface below which the path counts as touching it.
const CONTACT_TOL: f64 = 1e-6;

/// Splits the trajectory into local maneuvers at the points where it leaves
/// an inflated obstacle ball `B(c_i, r_i + eps)`.
///
/// Each maneuver starts where the previous one ended (the first at the
/// start). The last one ends at the destination, its length including the
/// straight closing distance from the final sample. A trajectory touching no
/// inflated ball yields a single maneuver with no obstacle. Contact is
/// decided with a tolerance of `1e-6·r0`.
pub fn local_maneuver_lengths(
    record: &TrajectoryRecord,
    world: &World,
    destination: &Point,
    eps: f64,
) -> Vec<Maneuver> {
    let tol = CONTACT_TOL * world.workspace_radius();
    let samples = &record.samples;
    let excess = |x: &Point, k: usize| {
        let o = &world.obstacles()[k];
        (x - &o.center).norm() - (o.radius + eps) - tol
    };
    // (sample index, fraction in [0, 1] towards the next sample, obstacle).
    let mut exits: Vec<(usize, f64, ObstacleId)> = Vec::new();
    let mut inside: Vec<bool> = (0..world.len()).map(|k| excess(&samples[0].x, k) <= 0.0).collect();
    for j in 1..samples.len() {
        for (k, was_inside) in inside.iter_mut().enumerate() {
            let now = excess(&samples[j].x, k);
            if *was_inside && now > 0.0 {
                let before = excess(&samples[j - 1].x, k);
                let frac = if now - before > 0.0 { (-before / (now - before)).clamp(0.0, 1.0) } else { 1.0 };
                exits.push((j - 1, frac, ObstacleId::from_index(k)));
            }
            *was_inside = now <= 0.0;
        }
    }
    // Balls still touched at the end are left there.
    let last = samples.len() - 1;
    for (k, &was_inside) in inside.iter().enumerate() {
        if was_inside {
            exits.push((last, 0.0, ObstacleId::from_index(k)));
        }
    }
    exits.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).expect("finite fractions"));

    // Cumulative arc length at each sample.
    let mut cumulative = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for j in 1..samples.len() {
        acc += (&samples[j].x - &samples[j - 1].x).norm();
        cumulative.push(acc);
    }
    let point_at = |j: usize, frac: f64| -> (Point, f64) {
        if j + 1 >= samples.len() || frac == 0.0 {
            return (samples[j].x.clone(), cumulative[j]);
        }
        let a = &samples[j].x;
        let b = &samples[j + 1].x;
        (a + (b - a) * frac, cumulative[j] + frac * (b - a).norm())
    };
    let total = cumulative[last] + (&samples[last].x - destination).norm();

    let mut maneuvers = Vec::new();
    let mut entry = samples[0].x.clone();
    let mut entry_s = 0.0;
    for (i, &(j, frac, id)) in exits.iter().enumerate() {
        let (exit, s) = if i + 1 == exits.len() {
            (destination.clone(), total)
        } else {
            point_at(j, frac)
        };
        maneuvers.push(Maneuver {
            obstacle: Some(id),
            entry: entry.clone(),
            exit: exit.clone(),
            length: s - entry_s,
        });
        entry = exit;
        entry_s = s;
    }
    if maneuvers.is_empty() {
        maneuvers.push(Maneuver {
            obstacle: None,
            entry,
            exit: destination.clone(),
            length: total,
        });
    }
    maneuvers
}
