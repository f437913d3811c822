//! Kernel expansions, the Bergman kernel, and the differential operators
//! `D1`, `D2` that enter the residue recursion.

use std::collections::HashMap;

use crate::algebra::{AlgebraError, Exponents, LaurentDifferential, Rational, Variable};

/// Name of the integration variable.
pub const INTEGRATION_VAR: &str = "w";

/// Truncated expansion of `int_{zeta=0}^{sign * w} B(target, zeta)` around `w = 0`:
/// `sum_{k=1}^{order} (sign * w)^k target^{-(k+1)} d(target)`.
pub fn expand_b_integral(target: &str, sign: i32, order: u32) -> LaurentDifferential {
    assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
    let vars = vec![Variable::form(target), Variable::scalar(INTEGRATION_VAR)];
    LaurentDifferential::from_terms(
        vars,
        (1..=order as i32).map(|k| {
            let c = if sign < 0 && k % 2 == 1 { -1 } else { 1 };
            (Exponents::from_slice(&[-(k + 1), k]), Rational::from(c))
        }),
    )
}

/// `B(a, b) = da db / (a - b)^2`, expanded for `|a| < |b|` up to `a^{order-1}`.
///
/// The result remembers that it is singular on `a = b`, so identifying the two
/// variables later is rejected.
pub fn bergman_expansion(a: &str, b: &str, order: u32) -> LaurentDifferential {
    let vars = vec![Variable::form(a), Variable::form(b)];
    LaurentDifferential::from_terms(
        vars,
        (1..=order as i32).map(|k| (Exponents::from_slice(&[k - 1, -(k + 1)]), Rational::from(k))),
    )
    .mark_singular_pair(a, b)
}

/// The renormalized diagonal `W~_{0,2}(v, v) = dv^2 / (4 v^2)`.
pub fn tilde_w02_diagonal(v: &str) -> LaurentDifferential {
    LaurentDifferential::monomial(vec![Variable::new(v, 2)], &[-2], Rational::new(1, 4))
}

/// Truncated recursion kernel `K^(j)(target, w)` for `j` in {2, 3}.
#[derive(Clone, Debug)]
pub struct KernelExpansion {
    j: u8,
    order: u32,
    target: String,
    value: LaurentDifferential,
}

/// Builds `K^(j)` from its defining combination
/// `((-1)^j int_0^{-w} B - int_0^{w} B) / (2j (-w^2 dw)^{j-1})`.
pub fn kernel(j: u8, target: &str, order: u32) -> KernelExpansion {
    assert!(j == 2 || j == 3, "kernel index must be 2 or 3");
    let plus = expand_b_integral(target, 1, order);
    let minus = expand_b_integral(target, -1, order);
    let sign = if j % 2 == 0 { Rational::one() } else { -Rational::one() };
    let numerator = minus
        .scale(&sign)
        .sub(&plus)
        .expect("both expansions share one layout");
    let jm1 = j as i32 - 1;
    // (-w^2 dw)^{j-1} = (-1)^{j-1} w^{2(j-1)} dw^{j-1}
    let prefactor = Rational::new(if jm1 % 2 == 0 { 1 } else { -1 }, 2 * j as i64);
    let value = numerator
        .scale(&prefactor)
        .shift(INTEGRATION_VAR, -2 * jm1, -jm1);
    KernelExpansion {
        j,
        order,
        target: target.to_string(),
        value,
    }
}

impl KernelExpansion {
    pub fn j(&self) -> u8 {
        self.j
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn value(&self) -> &LaurentDifferential {
        &self.value
    }

    /// `Res_{w -> 0} K(target, w) * integrand`, without forming the full product.
    ///
    /// The integrand must carry `dw^j` so that the combined weight in `w` is one.
    pub fn residue_against(
        &self,
        integrand: &LaurentDifferential,
    ) -> Result<LaurentDifferential, AlgebraError> {
        let wi = integrand
            .index_of(INTEGRATION_VAR)
            .ok_or_else(|| AlgebraError::UnknownVariable(INTEGRATION_VAR.to_string()))?;
        let combined = integrand.vars()[wi].weight() + self.value.weight(INTEGRATION_VAR);
        if combined != 1 {
            return Err(AlgebraError::ResidueWeight {
                variable: INTEGRATION_VAR.to_string(),
                weight: combined,
            });
        }
        let kw = self.value.index_of(INTEGRATION_VAR).expect("kernel has w");
        let kt = self.value.index_of(&self.target).expect("kernel has target");
        let by_w: HashMap<i32, (i32, &Rational)> = self
            .value
            .terms()
            .map(|(e, c)| (e[kw], (e[kt], c)))
            .collect();

        let mut vars = vec![Variable::form(&self.target)];
        vars.extend(
            integrand
                .vars()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != wi)
                .map(|(_, v)| v.clone()),
        );
        let terms = integrand.terms().filter_map(|(e, c)| {
            let &(t_exp, kc) = by_w.get(&(-1 - e[wi]))?;
            let mut out = Exponents::with_capacity(e.len());
            out.push(t_exp);
            out.extend(e.iter().enumerate().filter(|&(i, _)| i != wi).map(|(_, &x)| x));
            Some((out, c * kc))
        });
        Ok(LaurentDifferential::from_terms(vars, terms))
    }
}

/// `D1 = dv (-d/dv + 1/v)`; raises the weight in `v` by one.
pub fn apply_d1(a: &LaurentDifferential, v: &str) -> Result<LaurentDifferential, AlgebraError> {
    let d = a.differentiate(v)?;
    d.neg().add(&a.shift(v, -1, 0)).map(|s| s.shift(v, 0, 1))
}

/// `D2 = (dv^2 / 2) (d^2/dv^2 - (3/v) d/dv + 3/v^2)`; raises the weight in `v` by two.
pub fn apply_d2(a: &LaurentDifferential, v: &str) -> Result<LaurentDifferential, AlgebraError> {
    let d1 = a.differentiate(v)?;
    let d2 = d1.differentiate(v)?;
    let three = Rational::from(3);
    let sum = d2
        .sub(&d1.shift(v, -1, 0).scale(&three))?
        .add(&a.shift(v, -2, 0).scale(&three))?;
    Ok(sum.scale(&Rational::new(1, 2)).shift(v, 0, 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w_form(weight: i32, terms: &[(i32, Rational)]) -> LaurentDifferential {
        LaurentDifferential::from_terms(
            vec![Variable::new("w", weight)],
            terms
                .iter()
                .map(|(e, c)| (Exponents::from_slice(&[*e]), c.clone())),
        )
    }

    /// Term-by-term integration of `(z0 - zeta)^{-2} = sum_k (k+1) zeta^k z0^{-k-2}`
    /// from 0 to `s*w`.
    fn integrate_bergman_oracle(sign: i64, order: u32) -> Vec<(i32, i32, Rational)> {
        (0..order as i64)
            .map(|k| {
                // (k+1) * (s w)^{k+1} / (k+1) * z0^{-k-2}
                let c = Rational::new((k + 1) * sign.pow((k + 1) as u32), k + 1);
                (-(k as i32) - 2, k as i32 + 1, c)
            })
            .collect()
    }

    #[test]
    fn b_integral_matches_termwise_integration() {
        for (sign, order) in [(1, 3), (-1, 2), (1, 1), (-1, 7)] {
            let e = expand_b_integral("z0", sign, order);
            let oracle = integrate_bergman_oracle(sign as i64, order);
            assert_eq!(e.len(), oracle.len());
            for (zexp, wexp, c) in oracle {
                assert_eq!(e.coefficient(&[zexp, wexp]).unwrap(), c);
            }
        }
        assert_eq!(
            expand_b_integral("z0", 1, 1).to_string(),
            "1 * z0^-2 w dz0"
        );
    }

    #[test]
    fn kernel_leading_terms() {
        let k2 = kernel(2, "z0", 9);
        assert_eq!(k2.value().weight("w"), -1);
        assert_eq!(k2.value().weight("z0"), 1);
        assert_eq!(k2.value().coefficient(&[-2, -1]).unwrap(), Rational::new(1, 2));
        let k3 = kernel(3, "z0", 9);
        assert_eq!(k3.value().weight("w"), -2);
        assert_eq!(k3.value().coefficient(&[-3, -2]).unwrap(), Rational::new(-1, 3));
    }

    #[test]
    fn kernel_closed_forms_and_parity() {
        let order = 12;
        let k2 = kernel(2, "z0", order);
        for (e, c) in k2.value().terms() {
            // w^{2i-1} / (2 z0^{2i+2})
            assert_eq!(e[1].rem_euclid(2), 1);
            assert_eq!(e[0], -(e[1] + 3));
            assert_eq!(*c, Rational::new(1, 2));
        }
        assert_eq!(k2.value().len(), 6);
        let k3 = kernel(3, "z0", order);
        for (e, c) in k3.value().terms() {
            // -w^{2i-4} / (3 z0^{2i+1})
            assert_eq!(e[1].rem_euclid(2), 0);
            assert_eq!(e[0], -(e[1] + 5));
            assert_eq!(*c, Rational::new(-1, 3));
        }
        assert_eq!(k3.value().len(), 6);
    }

    #[test]
    fn fused_residue_matches_product_then_residue() {
        let k = kernel(2, "x0", 10);
        let integrand = LaurentDifferential::from_terms(
            vec![Variable::form("x1"), Variable::new("w", 2)],
            [
                (Exponents::from_slice(&[-2, -2]), Rational::new(3, 2)),
                (Exponents::from_slice(&[-4, 0]), Rational::new(-1, 5)),
                (Exponents::from_slice(&[-2, 4]), Rational::from(7)),
            ],
        );
        let fused = k.residue_against(&integrand).unwrap();
        let direct = k.value().mul(&integrand).residue_at_zero("w").unwrap();
        assert_eq!(fused, direct);
        assert!(!fused.is_zero());
    }

    #[test]
    fn d1_examples() {
        let a = w_form(1, &[(-1, Rational::one())]);
        assert_eq!(apply_d1(&a, "w").unwrap(), w_form(2, &[(-2, Rational::from(2))]));
        let b = w_form(1, &[(-3, Rational::one())]);
        assert_eq!(apply_d1(&b, "w").unwrap(), w_form(2, &[(-4, Rational::from(4))]));
        let c = w_form(1, &[(1, Rational::one())]);
        let d = apply_d1(&c, "w").unwrap();
        assert!(d.is_zero());
        assert_eq!(d.weight("w"), 2);
    }

    #[test]
    fn d2_examples() {
        let a = w_form(1, &[(-1, Rational::one())]);
        assert_eq!(apply_d2(&a, "w").unwrap(), w_form(3, &[(-3, Rational::from(4))]));
        let b = w_form(1, &[(1, Rational::one())]);
        assert!(apply_d2(&b, "w").unwrap().is_zero());
        let c = w_form(1, &[(-2, Rational::one())]);
        assert_eq!(
            apply_d2(&c, "w").unwrap(),
            w_form(3, &[(-4, Rational::new(15, 2))])
        );
    }

    #[test]
    fn tilde_diagonal() {
        let t = tilde_w02_diagonal("w");
        assert_eq!(t.coefficient(&[-2]).unwrap(), Rational::new(1, 4));
        assert_eq!(t.weight("w"), 2);
        assert_eq!(t.to_string(), "1/4 * w^-2 dw^2");
    }

    #[test]
    fn bergman_diagonal_is_refused() {
        let b = bergman_expansion("w1", "w2", 5);
        assert!(matches!(
            b.set_equal(&["w1", "w2"], "w"),
            Err(AlgebraError::UnrenormalizedDiagonal { .. })
        ));
        assert_eq!(b.coefficient(&[2, -4]).unwrap(), Rational::from(3));
    }
}
