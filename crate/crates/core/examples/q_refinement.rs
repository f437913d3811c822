//! Graded correlators: `Q = 1` reduction, powers of `Q`, and the first asymmetric key.

use open_tr::q_refinement::{compute_q_correlator, structure_report, symmetry_report, SymmetryStatus};
use open_tr::recursion::{CorrelatorStore, Flavor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget: u32 = std::env::args().nth(1).map_or(Ok(8), |s| s.parse())?;
    let graded = CorrelatorStore::new(Flavor::QGraded);
    let plain = CorrelatorStore::new(Flavor::Baseline);
    for base in plain.ensure_budget(budget)? {
        let q = compute_q_correlator(&graded, base.key())?;
        let s = structure_report(&q, &base);
        let sym = symmetry_report(&q);
        println!(
            "W{} Q-powers {:?} (bound {}), Q=1 ok: {}, {:?}",
            base.key(),
            s.q_powers,
            s.degree_bound,
            s.reduces_to_baseline,
            sym.status
        );
        if sym.status == SymmetryStatus::Asymmetric {
            println!("    {}", serde_json::to_string(&sym.witness)?);
        }
    }
    Ok(())
}
