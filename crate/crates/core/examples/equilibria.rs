//! Starts on the half-line behind an obstacle stall, since the nominal
//! control points at the obstacle center. A tiny lateral offset escapes.
//!
//! ```bash
//! cargo run --example equilibria
//! ```

use spherenav::geometry::vector;
use spherenav::shadow::classify;
use spherenav::simulator::{simulate, SimParams};
use spherenav::world::{Obstacle, World};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let world = World::new(2, 10.0, vec![Obstacle::new(vector(&[3.0, 0.0]), 1.0)])?;
    let destination = vector(&[0.0, 0.0]);
    let gmap = classify(&world, &destination);
    let params = SimParams::defaults(10.0, 1.0);

    for offset in [0.0, 1e-5, 1e-3] {
        let start = vector(&[7.0, offset]);
        let record = simulate(&world, &destination, &start, &gmap, &params)?;
        let end = record.end();
        println!(
            "offset {offset:7.0e}: {:<9} after t = {:6.2}, ended at ({:.4}, {:.4})",
            record.outcome.to_string(),
            record.samples.last().map_or(0.0, |s| s.t),
            end[0],
            end[1]
        );
    }
    Ok(())
}
