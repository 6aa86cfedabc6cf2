//! Seeded start sampling, parallel multi-start runs and comparisons with
//! the shortest path.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{NavError, Result};
use crate::geometry::{point_ray_distance, Point};
use crate::oracle2d::{match_lengths, oracle_length};
use crate::shadow::GenerationMap;
use crate::simulator::{simulate, Outcome, SimParams, TrajectoryRecord};
use crate::world::{sample_ball, World};

/// Exclusion distance of sampled starts, as a fraction of `r0`.
pub const START_MARGIN: f64 = 1e-3;

const MAX_START_ATTEMPTS: usize = 1_000_000;

/// Whether `q` is an admissible random start: clearance and distance to the
/// destination above `START_MARGIN·r0`, and at least that far from every
/// destination-anchored central half-line.
pub fn admissible_start(world: &World, destination: &Point, q: &Point) -> bool {
    let margin = START_MARGIN * world.workspace_radius();
    if world.clearance(q) <= margin || (q - destination).norm() <= margin {
        return false;
    }
    world.obstacles().iter().all(|o| {
        let dir = &o.center - destination;
        let len = dir.norm();
        len == 0.0 || point_ray_distance(q, &o.center, &(dir / len)) > margin
    })
}

/// `count` admissible starts drawn uniformly from the workspace by
/// rejection. Deterministic in `seed`.
pub fn sample_starts(world: &World, destination: &Point, count: usize, seed: u64) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(count);
    let mut attempts = 0;
    while starts.len() < count {
        if attempts == MAX_START_ATTEMPTS {
            return Err(NavError::Generation { attempts });
        }
        attempts += 1;
        let q = sample_ball(&mut rng, world.dimension(), world.workspace_radius());
        if admissible_start(world, destination, &q) {
            starts.push(q);
        }
    }
    Ok(starts)
}

/// Simulates every start in parallel. Results keep the order of `starts`.
pub fn run_starts(
    world: &World,
    destination: &Point,
    starts: &[Point],
    gmap: &GenerationMap,
    params: &SimParams,
) -> Result<Vec<TrajectoryRecord>> {
    starts
        .par_iter()
        .map(|x0| simulate(world, destination, x0, gmap, params))
        .collect()
}

/// One start of a comparison against the shortest path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRecord {
    pub index: usize,
    pub start: Vec<f64>,
    pub outcome: Outcome,
    /// Trajectory length including the closing distance to the destination.
    pub tp_length: f64,
    pub oracle_length: f64,
    pub matched: bool,
    pub min_clearance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareParams {
    pub seed: u64,
    pub n_starts: usize,
    pub rel_tol: f64,
    pub destination: Vec<f64>,
    pub sim: SimParams,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchReport {
    pub params: CompareParams,
    /// Matched runs over converged runs.
    pub match_rate: f64,
    pub counts: BTreeMap<Outcome, usize>,
    pub records: Vec<CompareRecord>,
}

/// Simulates `n_starts` sampled starts of a planar world and compares each
/// converged trajectory with the shortest path.
///
/// Fails when a trajectory beats the shortest path by more than the
/// integration slack.
pub fn compare(
    world: &World,
    destination: &Point,
    n_starts: usize,
    seed: u64,
    rel_tol: f64,
    params: &SimParams,
) -> Result<BatchReport> {
    let gmap = crate::shadow::classify(world, destination);
    let starts = sample_starts(world, destination, n_starts, seed)?;
    let records: Vec<CompareRecord> = starts
        .par_iter()
        .enumerate()
        .map(|(index, x0)| -> Result<CompareRecord> {
            let rec = simulate(world, destination, x0, &gmap, params)?;
            let oracle = oracle_length(world, x0, destination)?;
            let tp_length = rec.length_to(destination);
            let matched = rec.outcome == Outcome::Converged && match_lengths(tp_length, oracle, rel_tol)?;
            Ok(CompareRecord {
                index,
                start: x0.as_slice().to_vec(),
                outcome: rec.outcome,
                tp_length,
                oracle_length: oracle,
                matched,
                min_clearance: rec.min_clearance,
            })
        })
        .collect::<Result<_>>()?;
    let mut counts = BTreeMap::new();
    for r in &records {
        *counts.entry(r.outcome).or_insert(0) += 1;
    }
    let converged = counts.get(&Outcome::Converged).copied().unwrap_or(0);
    let matched = records.iter().filter(|r| r.matched).count();
    Ok(BatchReport {
        params: CompareParams {
            seed,
            n_starts,
            rel_tol,
            destination: destination.as_slice().to_vec(),
            sim: *params,
        },
        match_rate: if converged > 0 { matched as f64 / converged as f64 } else { 0.0 },
        counts,
        records,
    })
}

impl BatchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,outcome,tp_length,oracle_length,matched\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.index,
                r.outcome,
                crate::io::format_f64(r.tp_length),
                crate::io::format_f64(r.oracle_length),
                r.matched
            ));
        }
        out
    }
}
