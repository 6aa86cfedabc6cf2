//! The same law in three dimensions: starts hidden behind obstacles of a
//! cluttered ball world, with per-run summaries as JSON lines.
//!
//! ```bash
//! cargo run --release --example multi_start_3d
//! ```

use spherenav::batch::run_starts;
use spherenav::scenarios::{blind_starts, cluttered};
use spherenav::shadow::classify;
use spherenav::simulator::SimParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (world, destination) = cluttered(3, 3)?;
    let gmap = classify(&world, &destination);
    println!("generations {:?}", gmap.generations());
    let starts = blind_starts(&world, &destination, 10, 5)?;
    let records = run_starts(&world, &destination, &starts, &gmap, &SimParams::defaults(10.0, 1.0))?;
    for r in &records {
        println!("{}", serde_json::to_string(&r.summary())?);
    }
    Ok(())
}
