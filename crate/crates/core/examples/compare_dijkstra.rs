//! Compares trajectories from random starts with shortest paths through the
//! tangent graph, and saves the worst pair as an overlay.
//!
//! ```bash
//! cargo run --release --example compare_dijkstra -- 100
//! ```

use spherenav::batch::compare;
use spherenav::geometry::Point;
use spherenav::oracle2d::{build_tangent_graph, shortest_path};
use spherenav::scenarios::cluttered;
use spherenav::shadow::classify;
use spherenav::simulator::{simulate, SimParams};
use spherenav::svg::{render, Scene};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let starts: usize = std::env::args().nth(1).map_or(Ok(40), |s| s.parse())?;
    let (world, destination) = cluttered(2, 2)?;
    let params = SimParams::defaults(10.0, 1.0);
    let report = compare(&world, &destination, starts, 11, 0.01, &params)?;
    println!("match rate {:.1}% over {starts} starts", 100.0 * report.match_rate);
    println!("outcomes   {:?}", report.counts);

    let worst = report
        .records
        .iter()
        .max_by(|a, b| (a.tp_length / a.oracle_length).total_cmp(&(b.tp_length / b.oracle_length)))
        .ok_or("no starts")?;
    println!(
        "worst start {}: trajectory {:.4}, shortest {:.4} (+{:.2}%)",
        worst.index,
        worst.tp_length,
        worst.oracle_length,
        100.0 * (worst.tp_length / worst.oracle_length - 1.0)
    );

    let x0 = Point::from_vec(worst.start.clone());
    let record = simulate(&world, &destination, &x0, &classify(&world, &destination), &params)?;
    let path = shortest_path(&build_tangent_graph(&world, &x0, &destination)?)?;
    let scene = Scene {
        world: Some(&world),
        destination: Some(&destination),
        trajectories: vec![record.samples.iter().map(|s| [s.x[0], s.x[1]]).collect()],
        oracle_paths: vec![path.polyline(std::f64::consts::PI / 90.0)],
        ..Scene::default()
    };
    std::fs::write("compare_worst.svg", render(&scene)?)?;
    println!("wrote compare_worst.svg");
    Ok(())
}
