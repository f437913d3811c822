//! Intersection numbers checked against both pipelines, plus the `(T, S)` rescaling.

use open_tr::numbers::{table_to_text, tabulate, to_kp};
use open_tr::oracle::solve_f;
use open_tr::recursion::{CorrelatorStore, Flavor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget: u32 = std::env::args().nth(1).map_or(Ok(6), |s| s.parse())?;
    let f = solve_f(budget)?;
    let store = CorrelatorStore::new(Flavor::Baseline);
    let table = tabulate(&store, &f, budget)?;
    print!("{}", table_to_text(&table));
    let low = f.poly().filter(|m, _| m.degree() <= 2);
    println!("F (degree <= 2) in T, S: {}", to_kp(&low));
    println!("disagreements: {}", table.disagreements().count());
    Ok(())
}
