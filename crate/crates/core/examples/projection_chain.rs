//! Evaluates the feedback law at points behind one or two obstacles and
//! prints the successive cone projections that produce the control.
//!
//! ```bash
//! cargo run --example projection_chain
//! ```

use spherenav::controller::{beta, control, ControlParams};
use spherenav::geometry::{angle, vector};
use spherenav::shadow::classify;
use spherenav::world::{Obstacle, World};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // The small disk sits just past the upper tangent of the large one as
    // seen from x, so the first projection turns the control into its cone
    // and a second projection is needed.
    let x = vector(&[10.0, 0.3]);
    let c1 = vector(&[5.0, 0.0]);
    let to_c1 = &c1 - &x;
    let tangent = to_c1[1].atan2(to_c1[0]) - (1.5 / to_c1.norm()).asin() + 0.1;
    let c2 = &x + vector(&[tangent.cos(), tangent.sin()]) * 2.5;
    let world = World::new(2, 20.0, vec![Obstacle::new(c1, 1.5), Obstacle::new(c2, 0.5)])?;
    let destination = vector(&[0.0, 0.0]);
    let gmap = classify(&world, &destination);
    let params = ControlParams::new(1.0, &world);
    println!("generations {:?}", gmap.generations());

    for p in [[x[0], x[1]], [8.0, -0.4], [2.0, 5.0]] {
        let x = vector(&p);
        let (u, chain) = control(&x, &world, &destination, &gmap, &params)?;
        println!("x = ({}, {})  h = {}", p[0], p[1], chain.h());
        for (k, id) in chain.obstacles.iter().enumerate() {
            let before = &chain.controls[k];
            let after = &chain.controls[k + 1];
            let o = world.obstacle(*id);
            println!(
                "  project on obstacle {id}: beta {:.4} -> {:.4} rad, turned by {:.4} rad",
                beta(before, &x, o)?,
                beta(after, &x, o)?,
                angle(before, after)?
            );
        }
        println!("  u = ({:.5}, {:.5})", u[0], u[1]);
    }
    Ok(())
}
