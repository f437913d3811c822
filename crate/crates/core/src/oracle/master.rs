//! Loop-equation form of the constraints: residuals of the two master equations
//! built from `U = delta F` on the curve `x = z^2/2`.

use super::tpoly::TPoly;
use super::OracleError;
use crate::algebra::{AlgebraError, Exponents, LaurentDifferential, Rational, Variable};

use super::free_energy::TruncatedFreeEnergy;

const Z: &str = "z";

/// Variables of master-equation series: `z` followed by `t1..t_width`.
fn layout(width: u32, weight: i32) -> Vec<Variable> {
    let mut v = vec![Variable::new(Z, weight)];
    v.extend((1..=width).map(|k| Variable::scalar(&format!("t{k}"))));
    v
}

struct Series {
    width: u32,
    budget: u32,
}

impl Series {
    /// `sum` of `p * z^{zexp} dz^{weight}` pieces as one differential.
    fn build(&self, weight: i32, pieces: impl IntoIterator<Item = (TPoly, i32)>) -> LaurentDifferential {
        let mut terms = Vec::new();
        for (p, zexp) in pieces {
            for (m, c) in p.terms() {
                let mut e = Exponents::from_elem(0, self.width as usize + 1);
                e[0] = zexp;
                for &k in m.indices() {
                    e[k as usize] += 1;
                }
                terms.push((e, c.clone()));
            }
        }
        LaurentDifferential::from_terms(layout(self.width, weight), terms)
    }

    /// `omega = 2 sum k - 2 zexp - 3 tdeg - 8 form`; additive under products, and
    /// a term of a residual sits at level `(omega + 15) / 3`.
    fn omega(e: &[i32], form: i32) -> i64 {
        let sum_k: i64 = e[1..].iter().enumerate().map(|(i, &x)| (i as i64 + 1) * x as i64).sum();
        let tdeg: i64 = e[1..].iter().map(|&x| x as i64).sum();
        2 * sum_k - 2 * e[0] as i64 - 3 * tdeg - 8 * form as i64
    }

    fn omega_cap(&self) -> i64 {
        3 * self.budget as i64 - 15
    }

    fn keep_level(&self, a: &LaurentDifferential) -> LaurentDifferential {
        let form = a.weight(Z);
        let cap = self.omega_cap();
        a.filter(|e, _| Self::omega(e, form) <= cap)
    }

    /// Product whose terms are kept only if, after a later shift `extra` in omega
    /// and further factors of omega at least `rest_min`, they can still land within budget.
    fn mul(&self, a: &LaurentDifferential, b: &LaurentDifferential, extra: i64) -> LaurentDifferential {
        let form = a.weight(Z) + b.weight(Z);
        let cap = self.omega_cap() - extra;
        a.mul_filtered(b, |e| Self::omega(e, form) <= cap)
    }
}

fn d1(a: &LaurentDifferential) -> Result<LaurentDifferential, AlgebraError> {
    let d = a.differentiate(Z)?;
    Ok(d.neg().add(&a.shift(Z, -1, 0))?.shift(Z, 0, 1))
}

fn d2(a: &LaurentDifferential) -> Result<LaurentDifferential, AlgebraError> {
    let first = a.differentiate(Z)?;
    let second = first.differentiate(Z)?;
    let three = Rational::from(3);
    Ok(second
        .sub(&first.shift(Z, -1, 0).scale(&three))?
        .add(&a.shift(Z, -2, 0).scale(&three))?
        .scale(&Rational::new(1, 2))
        .shift(Z, 0, 2))
}

/// `P^(2)` keeps `z^{-2m} dz`, `P^(3)` keeps `z^{-2m-1} dz` (`m >= 1`).
pub fn project(which: u8, a: &LaurentDifferential) -> Result<LaurentDifferential, OracleError> {
    let zi = a
        .index_of(Z)
        .ok_or_else(|| AlgebraError::UnknownVariable(Z.to_string()))?;
    Ok(match which {
        2 => a.filter(|e, _| e[zi] <= -2 && e[zi] % 2 == 0),
        3 => a.filter(|e, _| e[zi] <= -3 && e[zi] % 2 != 0),
        _ => return Err(OracleError::BadProjection(which)),
    })
}

/// The same projections as residues `Res_{w=0} k(z, w) a(w)` against
/// `1/2 (1/(z-w) - 1/(z+w))` and `1/2 (1/(z-w) + 1/(z+w)) - 1/z`.
pub fn residue_form_of_projection(which: u8, a: &LaurentDifferential) -> Result<LaurentDifferential, OracleError> {
    let first = match which {
        2 => 1,
        3 => 2,
        _ => return Err(OracleError::BadProjection(which)),
    };
    let Some((lo, _)) = a.exponent_range(Z) else {
        return Ok(a.clone());
    };
    let order = (-lo).max(0);
    let moved = a.rename(&[(Z, "w")])?;
    let kernel = LaurentDifferential::from_terms(
        vec![Variable::form(Z), Variable::scalar("w")],
        (first..=order)
            .step_by(2)
            .map(|k| (Exponents::from_slice(&[-k - 1, k]), Rational::one())),
    );
    let r = kernel.mul(&moved).residue_at_zero("w")?;
    let names = a.var_names();
    Ok(r.reorder(&names)?)
}

/// Pieces of the master equations for a given `F`.
pub struct MasterEquations {
    series: Series,
    u: LaurentDifferential,
    du: LaurentDifferential,
    ddu: LaurentDifferential,
}

impl MasterEquations {
    pub fn new(f: &TruncatedFreeEnergy) -> Self {
        let d = f.max_index();
        let series = Series {
            width: 2 * d + 6,
            budget: f.budget(),
        };
        let poly = f.poly();
        let firsts: Vec<(u32, TPoly)> = (1..=d).map(|j| (j, poly.derivative(j))).collect();

        // U~ = U - z^2 dz + t + dz/z
        let mut pieces: Vec<(TPoly, i32)> = firsts
            .iter()
            .map(|(j, p)| (p.clone(), -(*j as i32) - 1))
            .collect();
        pieces.push((TPoly::constant(-Rational::one()), 2));
        pieces.push((TPoly::constant(Rational::one()), -1));
        for k in 1..=series.width {
            let m = super::tpoly::TMonomial::from_indices(&[k]);
            pieces.push((TPoly::monomial(m, Rational::from(k as i64)), k as i32 - 1));
        }
        let u = series.build(1, pieces);

        // delta U~ with delta t renormalized to dz^2 / (4 z^2)
        let mut pieces2 = vec![(TPoly::constant(Rational::new(1, 4)), -2)];
        let mut pieces3 = Vec::new();
        for (i, fi) in &firsts {
            for (j, fij) in firsts.iter().map(|(j, _)| (*j, fi.derivative(*j))) {
                if fij.is_zero() {
                    continue;
                }
                pieces2.push((fij.clone(), -(*i as i32) - (j as i32) - 2));
                for l in 1..=d {
                    let fijl = fij.derivative(l);
                    if !fijl.is_zero() {
                        pieces3.push((fijl, -(*i as i32) - (j as i32) - (l as i32) - 3));
                    }
                }
            }
        }
        let du = series.build(2, pieces2);
        let ddu = series.build(3, pieces3);
        MasterEquations { series, u, du, ddu }
    }

    /// `U~` as a differential in `z` with time coefficients.
    pub fn u_tilde(&self) -> &LaurentDifferential {
        &self.u
    }

    /// `P^(2)[(U~^2 + delta U~ + D1 U~) / (2 eta)]`, `eta = -z^2 dz`, within budget.
    pub fn residual2(&self) -> Result<LaurentDifferential, OracleError> {
        let s = &self.series;
        let sq = s.mul(&self.u, &self.u, 12);
        let body = sq.add(&self.du)?.add(&d1(&self.u)?)?;
        let scaled = body.scale(&Rational::new(-1, 2)).shift(Z, -2, -1);
        project(2, &s.keep_level(&scaled))
    }

    /// `P^(3)[(U~^3 + 3 U~ delta U~ + delta^2 U~ - D2 U~) / (3 eta^2)]`, within budget.
    pub fn residual3(&self) -> Result<LaurentDifferential, OracleError> {
        let s = &self.series;
        let sq = s.mul(&self.u, &self.u, 24 - 12);
        let cube = s.mul(&sq, &self.u, 24);
        let mixed = s.mul(&self.u, &self.du, 24).scale(&Rational::from(3));
        let body = cube.add(&mixed)?.add(&self.ddu)?.sub(&d2(&self.u)?)?;
        let scaled = body.scale(&Rational::new(1, 3)).shift(Z, -4, -2);
        project(3, &s.keep_level(&scaled))
    }

    /// Residual `which` in {2, 3}.
    pub fn residual(&self, which: u8) -> Result<LaurentDifferential, OracleError> {
        match which {
            2 => self.residual2(),
            3 => self.residual3(),
            _ => Err(OracleError::BadProjection(which)),
        }
    }
}

/// Master-equation residual `which` for `F`, truncated to `F`'s budget.
pub fn master_equation_residual(which: u8, f: &TruncatedFreeEnergy) -> Result<LaurentDifferential, OracleError> {
    MasterEquations::new(f).residual(which)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_form(terms: &[(i32, i64)]) -> LaurentDifferential {
        LaurentDifferential::from_terms(
            vec![Variable::form(Z), Variable::scalar("t1")],
            terms
                .iter()
                .map(|&(e, c)| (Exponents::from_slice(&[e, 0]), Rational::from(c))),
        )
    }

    #[test]
    fn projections() {
        let a = z_form(&[(-4, 1)]);
        assert_eq!(project(2, &a).unwrap(), a);
        assert!(project(2, &z_form(&[(-3, 1)])).unwrap().is_zero());
        assert_eq!(project(3, &z_form(&[(-3, 1)])).unwrap(), z_form(&[(-3, 1)]));
        assert!(project(2, &z_form(&[(2, 1)])).unwrap().is_zero());
        assert!(project(3, &z_form(&[(2, 1)])).unwrap().is_zero());
        assert_eq!(project(3, &z_form(&[(-5, 1)])).unwrap(), z_form(&[(-5, 1)]));
        assert!(project(2, &z_form(&[(-5, 1)])).unwrap().is_zero());
    }

    #[test]
    fn residue_form_agrees_with_span_projection() {
        let a = z_form(&[(-7, 3), (-6, -2), (-5, 1), (-4, 5), (-3, 7), (-2, 1), (-1, 4), (0, 2), (3, 9)]);
        for which in [2, 3] {
            assert_eq!(
                residue_form_of_projection(which, &a).unwrap(),
                project(which, &a).unwrap()
            );
        }
    }

    #[test]
    fn trivial_free_energy_leaves_an_obstruction() {
        let f = TruncatedFreeEnergy::empty(6);
        let r2 = master_equation_residual(2, &f).unwrap();
        assert!(!r2.is_zero());
    }

    #[test]
    fn solved_free_energy_satisfies_both() {
        let f = super::super::solve_f(6).unwrap();
        let me = MasterEquations::new(&f);
        assert!(me.residual2().unwrap().is_zero(), "{}", me.residual2().unwrap());
        assert!(me.residual3().unwrap().is_zero(), "{}", me.residual3().unwrap());
    }
}
