//! Computes every stable correlator up to a budget and prints a summary line per key.
//!
//! `cargo run --release --example correlators -- 8`

use std::time::Instant;

use open_tr::key::CorrelatorKey;
use open_tr::recursion::{CorrelatorStore, Flavor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget: u32 = std::env::args().nth(1).map_or(Ok(8), |s| s.parse())?;
    let store = CorrelatorStore::new(Flavor::Baseline);
    let start = Instant::now();
    for c in store.ensure_budget(budget)? {
        let key = c.key();
        println!(
            "W{key}: {} terms, symmetric: {}",
            c.value().len(),
            c.symmetry_witness().is_none()
        );
        if c.value().len() <= 2 {
            println!("    {}", c.value());
        }
    }
    println!("{} keys in {:?}", CorrelatorKey::stable_keys(budget).len(), start.elapsed());
    Ok(())
}
