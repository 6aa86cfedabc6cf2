//! Fifteen starts around a cluttered planar world, drawn with the shaded
//! shadow regions into an SVG file.
//!
//! ```bash
//! cargo run --release --example multi_start_2d -- out.svg
//! ```

use spherenav::batch::run_starts;
use spherenav::scenarios::{cluttered, ring_starts};
use spherenav::shadow::classify;
use spherenav::simulator::SimParams;
use spherenav::svg::{render, Scene};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let target = std::env::args().nth(1).unwrap_or_else(|| "multi_start_2d.svg".into());
    let (world, destination) = cluttered(2, 1)?;
    let gmap = classify(&world, &destination);
    let starts = ring_starts(&world, &destination, 15, 9.5);
    let records = run_starts(&world, &destination, &starts, &gmap, &SimParams::defaults(10.0, 1.0))?;

    for (k, r) in records.iter().enumerate() {
        println!(
            "start {k:2}: {:<9} length {:7.3}  min clearance {:.2e}",
            r.outcome.to_string(),
            r.length_to(&destination),
            r.min_clearance
        );
    }
    let scene = Scene {
        world: Some(&world),
        destination: Some(&destination),
        generations: Some(&gmap),
        trajectories: records
            .iter()
            .map(|r| r.samples.iter().map(|s| [s.x[0], s.x[1]]).collect())
            .collect(),
        ..Scene::default()
    };
    std::fs::write(&target, render(&scene)?)?;
    println!("wrote {target}");
    Ok(())
}
