//! Principal specialization of `F` and the quantum curve residual stratum by stratum.

use open_tr::algebra::Rational;
use open_tr::oracle::solve_f;
use open_tr::specialization::{principal_specialize, quantum_curve_report, QValue, UnstableDecomposition};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let order: i32 = std::env::args().nth(1).map_or(Ok(2), |s| s.parse())?;
    let f = solve_f(2 * order as u32 + 3)?;
    let psi = principal_specialize(&f, order, UnstableDecomposition::ScaledCubic)?;
    for t in psi.terms() {
        let log = if t.log { " log(z^2/2)" } else { "" };
        println!("hbar^{} z^{} Q^{}{log}: {}", t.hbar_power, t.z_exponent, t.q_power, t.coefficient);
    }
    for q in [QValue::Value(Rational::one()), QValue::Symbolic] {
        let report = quantum_curve_report(&psi, &q)?;
        println!("{}", serde_json::to_string(&report)?);
    }
    Ok(())
}
