//! Exact Laurent differentials: sums, products, derivatives, diagonals and residues.

use open_tr::algebra::{Exponents, LaurentDifferential, Rational, Variable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let vars = vec![Variable::form("z1"), Variable::form("z2")];
    let a = LaurentDifferential::from_terms(
        vars.clone(),
        [
            (Exponents::from_slice(&[-2, -1]), Rational::new(3, 4)),
            (Exponents::from_slice(&[-1, -2]), Rational::new(3, 4)),
        ],
    );
    let b = LaurentDifferential::monomial(vec![Variable::scalar("w")], &[2], Rational::new(-1, 3));
    println!("a          = {a}");
    println!("a + a      = {}", a.add(&a)?);
    println!("a * b      = {}", a.mul(&b));
    println!("d/dz1 a    = {}", a.differentiate("z1")?);
    println!("z2 = z1    = {}", a.set_equal(&["z1", "z2"], "z1")?);
    println!("Res_z2 a   = {}", a.residue_at_zero("z2")?);
    println!("a at z2<>z1 = {}", a.rename(&[("z1", "z2"), ("z2", "z1")])?.reorder(&["z1", "z2"])?);
    Ok(())
}
