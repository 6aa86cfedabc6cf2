//! Generates a seeded random world, validates it and round-trips it through
//! the JSON file format.
//!
//! ```bash
//! cargo run --example random_world -- 42
//! ```

use spherenav::world::{random_world, validate, world_from_json, world_to_json, RandomWorldParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map_or(Ok(42), |s| s.parse())?;
    let params = RandomWorldParams::new(2, 12, 10.0);
    let world = random_world(seed, &params)?;
    let report = validate(&world, Some(&params.destination));
    println!("seed {seed}: {} obstacles, valid = {}", world.len(), report.is_valid());

    let text = world_to_json(&world)?;
    let back = world_from_json(&text)?;
    assert_eq!(back, world, "JSON round trip is exact");
    print!("{text}");
    Ok(())
}
