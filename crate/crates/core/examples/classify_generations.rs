//! Labels obstacles by how deep they sit in each other's shadows and asks
//! which obstacle governs a few sample points.
//!
//! ```bash
//! cargo run --example classify_generations
//! ```

use spherenav::geometry::vector;
use spherenav::scenarios::generations_fixture;
use spherenav::shadow::{classify, region_query};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (world, destination) = generations_fixture();
    let gmap = classify(&world, &destination);

    for (id, o) in world.ids().zip(world.obstacles()) {
        let links: Vec<String> = gmap.shadow_links(id).iter().map(|k| k.to_string()).collect();
        println!(
            "obstacle {id}: center ({:5.2}, {:5.2}) radius {:.2}  generation {}  meets shadows of [{}]",
            o.center[0],
            o.center[1],
            o.radius,
            gmap.generation(id),
            links.join(", ")
        );
    }
    println!("deepest generation: {}", gmap.s());

    for p in [[2.0, 2.0], [6.5, 0.0], [10.5, -1.0], [-8.0, -2.0]] {
        let x = vector(&p);
        let q = region_query(&x, &world, &destination, &gmap);
        match q.owner {
            Some(id) => println!("({:5.2}, {:5.2}) lies behind obstacle {id} (generation {})", p[0], p[1], gmap.generation(id)),
            None => println!("({:5.2}, {:5.2}) sees the destination", p[0], p[1]),
        }
    }
    print!("{}", gmap.to_json()?);
    Ok(())
}
