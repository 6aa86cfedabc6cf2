//! One disk between the start and the destination: the trajectory wraps
//! the disk and its length matches the closed-form shortest path.
//!
//! ```bash
//! cargo run --example single_obstacle
//! ```

use spherenav::geometry::vector;
use spherenav::oracle2d::single_obstacle_optimal_length;
use spherenav::shadow::classify;
use spherenav::simulator::{simulate, SimParams};
use spherenav::world::{Obstacle, World};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let world = World::new(2, 10.0, vec![Obstacle::new(vector(&[4.0, 0.0]), 1.5)])?;
    let destination = vector(&[0.0, 0.0]);
    let start = vector(&[8.0, 0.6]);

    let gmap = classify(&world, &destination);
    let record = simulate(&world, &destination, &start, &gmap, &SimParams::defaults(10.0, 1.0))?;
    let traveled = record.length_to(&destination);
    let optimal = single_obstacle_optimal_length(&start, &destination, &world.obstacles()[0].center, 1.5)?;

    println!("outcome          {}", record.outcome);
    println!("steps            {}", record.steps);
    println!("min clearance    {:.3e}", record.min_clearance);
    println!("trajectory       {traveled:.6}");
    println!("shortest path    {optimal:.6}");
    println!("relative excess  {:.3e}", traveled / optimal - 1.0);
    Ok(())
}
