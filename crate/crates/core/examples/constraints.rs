//! Applies the shifted constraints to the solved free energy and to `F = 0`.

use open_tr::oracle::{apply_lhat, apply_mhat, render_residual_table, residual_report, solve_f, TruncatedFreeEnergy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget: u32 = std::env::args().nth(1).map_or(Ok(8), |s| s.parse())?;
    let empty = TruncatedFreeEnergy::empty(budget);
    println!("L^_0 exp(0) = {}", apply_lhat(0, &empty)?);
    println!("M^_0 exp(0) = {}", apply_mhat(0, &empty)?);
    let f = solve_f(budget)?;
    for (m, c) in f.poly().terms().take(8) {
        println!("  {c} * {m}");
    }
    print!("{}", render_residual_table(&residual_report(&f, 0..=4)?));
    Ok(())
}
