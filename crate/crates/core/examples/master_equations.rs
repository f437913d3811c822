//! Residuals of the two projected master equations, for the solved `F` and for `F = 0`.

use open_tr::oracle::{solve_f, MasterEquations, TruncatedFreeEnergy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget: u32 = std::env::args().nth(1).map_or(Ok(7), |s| s.parse())?;
    let zero = MasterEquations::new(&TruncatedFreeEnergy::empty(budget));
    println!("F = 0: residual 2 has {} terms", zero.residual2()?.len());
    let me = MasterEquations::new(&solve_f(budget)?);
    println!("solved F: residual 2 = {}", me.residual2()?);
    println!("solved F: residual 3 = {}", me.residual3()?);
    Ok(())
}
