//! Compares the residue recursion with the constraint solver key by key.
//!
//! `cargo run --release --example dual_pipeline -- 7`

use open_tr::oracle::solve_f;
use open_tr::recursion::{CorrelatorStore, Flavor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget: u32 = std::env::args().nth(1).map_or(Ok(7), |s| s.parse())?;
    let f = solve_f(budget)?;
    let store = CorrelatorStore::new(Flavor::Baseline);
    let mut all = true;
    for w in store.ensure_budget(budget)? {
        let same = &f.correlator_differential(w.key()) == w.value();
        all &= same;
        println!("W{}: {} terms, {}", w.key(), w.value().len(), if same { "equal" } else { "DIFFERENT" });
    }
    println!("free energy has {} monomials; pipelines agree: {all}", f.poly().len());
    Ok(())
}
