//! Truncated free energy and the order-by-order constraint solver.

use std::collections::BTreeSet;

use super::operator::{ExpCache, Operator};
use super::tpoly::{TMonomial, TPoly};
use super::OracleError;
use crate::algebra::{Exponents, LaurentDifferential, Rational, Variable};
use crate::key::CorrelatorKey;

/// `F = sum_h u^{2h-2} F_h` truncated to `4h + n <= budget`, stored at `u = 1`.
///
/// A monomial `prod t_{k_i}` of degree `n` sits in genus `h` with
/// `sum k_i = 6h - 6 + 3n`, so the genus is implied by the monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedFreeEnergy {
    budget: u32,
    max_index: u32,
    poly: TPoly,
}

/// Key `(h, n)` a monomial belongs to, or `None` for a fractional or negative genus.
pub fn key_of(m: &TMonomial) -> Option<CorrelatorKey> {
    let n = m.degree() as i64;
    let num = m.weight() - 3 * n + 6;
    if n == 0 || num < 0 || num % 3 != 0 {
        return None;
    }
    Some(CorrelatorKey::new((num / 3) as u32, n as u32))
}

/// Level `4h + n` of the free-energy monomial `m * t_j` that a residual monomial
/// `m` of a mode-`j` constraint feeds; errors when the implied `u`-power is fractional.
pub fn residual_level(m: &TMonomial, j: u32) -> Result<i64, OracleError> {
    let lambda = 2 * m.weight() - 3 * m.degree() as i64;
    let num = lambda + 2 * j as i64 + 9;
    if num % 3 != 0 {
        return Err(OracleError::FractionalU {
            monomial: m.to_string(),
            mode: j,
        });
    }
    Ok(num / 3)
}

impl TruncatedFreeEnergy {
    pub fn empty(budget: u32) -> Self {
        TruncatedFreeEnergy {
            budget,
            max_index: CorrelatorKey::max_t_index(budget),
            poly: TPoly::zero(),
        }
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    /// Largest time index a stable monomial within budget can carry.
    pub fn max_index(&self) -> u32 {
        self.max_index
    }

    pub fn poly(&self) -> &TPoly {
        &self.poly
    }

    pub fn coefficient(&self, m: &TMonomial) -> Rational {
        self.poly.coefficient(m)
    }

    /// Adds `c * m`, refusing monomials outside the homogeneous stable range.
    pub fn insert(&mut self, m: TMonomial, c: Rational) -> Result<(), OracleError> {
        let key = key_of(&m).ok_or_else(|| OracleError::Inhomogeneous(m.to_string()))?;
        if !key.is_stable() || key.level() > self.budget {
            return Err(OracleError::OutOfBudget {
                monomial: m.to_string(),
                budget: self.budget,
            });
        }
        self.poly.add_term(m, c);
        Ok(())
    }

    pub fn keys(&self) -> BTreeSet<CorrelatorKey> {
        self.poly.terms().filter_map(|(m, _)| key_of(m)).collect()
    }

    /// `F_{h,n}`.
    pub fn component(&self, key: CorrelatorKey) -> TPoly {
        self.poly.filter(|m, _| key_of(m) == Some(key))
    }

    /// `delta_1 ... delta_n F_{h,n}` as a differential in `z1..zn`, where
    /// `delta_i = sum_k dz_i / z_i^{k+1} d/dt_k`.
    pub fn correlator_differential(&self, key: CorrelatorKey) -> LaurentDifferential {
        let n = key.n as usize;
        let vars: Vec<Variable> = (1..=n).map(|i| Variable::form(&format!("z{i}"))).collect();
        let mut terms = Vec::new();
        for (m, c) in self.component(key).terms() {
            let coef = c * &m.symmetry_factor();
            for perm in distinct_permutations(m.indices()) {
                let e: Exponents = perm.iter().map(|&k| -(k as i32) - 1).collect();
                terms.push((e, coef.clone()));
            }
        }
        LaurentDifferential::from_terms(vars, terms)
    }

    /// Rebuilds `F` from correlators in variables `z1..zn`, reading each monomial
    /// once from its sorted exponent pattern.
    pub fn from_correlators<'a, I>(budget: u32, correlators: I) -> Result<Self, OracleError>
    where
        I: IntoIterator<Item = (CorrelatorKey, &'a LaurentDifferential)>,
    {
        let mut f = TruncatedFreeEnergy::empty(budget);
        for (key, w) in correlators {
            if key.level() > budget {
                continue;
            }
            let n = key.n as usize;
            if w.vars().len() != n {
                return Err(OracleError::NonCanonical(format!(
                    "{key} has variables {:?}",
                    w.var_names()
                )));
            }
            for (e, c) in w.terms() {
                if e.iter().any(|&x| x > -2) {
                    return Err(OracleError::NonCanonical(format!(
                        "{key} has exponent vector {e:?}"
                    )));
                }
                let ks: Vec<u32> = e.iter().map(|&x| (-x - 1) as u32).collect();
                if ks.windows(2).any(|p| p[0] > p[1]) {
                    continue;
                }
                let m = TMonomial::from_indices(&ks);
                let coef = c / &m.symmetry_factor();
                f.insert(m, coef)?;
            }
        }
        Ok(f)
    }
}

/// All distinct orderings of a sorted multiset, in lexicographic order.
pub(crate) fn distinct_permutations(sorted: &[u32]) -> Vec<Vec<u32>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// Solves the constraints level by level for the unique `F` with `F(0) = 0`.
///
/// At each level every mode `j <= D` fixes `dF/dt_j` through its constraint with
/// the leading `-J_j` removed; the pieces are integrated with the Euler operator and
/// checked for integrability.
pub fn solve_f(budget: u32) -> Result<TruncatedFreeEnergy, OracleError> {
    let mut f = TruncatedFreeEnergy::empty(budget);
    let d = f.max_index;
    let ops: Vec<Operator> = (1..=d)
        .map(|j| Operator::constraint_for_mode(j, d).without_derivative(j))
        .collect();
    for level in 1..=budget as i64 {
        let current = f.poly.clone();
        let mut cache = ExpCache::new(&current);
        let mut forced: Vec<TPoly> = Vec::with_capacity(d as usize);
        for (idx, op) in ops.iter().enumerate() {
            let j = idx as u32 + 1;
            let mut bad = None;
            let rhs = op.apply_exp_cached(&mut cache, |m| match residual_level(m, j) {
                Ok(l) => l == level,
                Err(e) => {
                    bad.get_or_insert(e);
                    false
                }
            });
            if let Some(e) = bad {
                return Err(e);
            }
            forced.push(rhs);
        }
        let mut piece = TPoly::zero();
        for (idx, dj) in forced.iter().enumerate() {
            let j = idx as u32 + 1;
            for (m, c) in dj.terms() {
                let full = m.with(j);
                let deg = Rational::from(full.degree() as i64);
                piece.add_term(full, c / &deg);
            }
        }
        for (idx, dj) in forced.iter().enumerate() {
            let j = idx as u32 + 1;
            let derived = piece.derivative(j);
            if &derived != dj {
                let diff = derived.sub(dj);
                let (m, _) = diff.terms().next().expect("nonzero difference");
                return Err(OracleError::Inconsistent {
                    level: level as u32,
                    mode: j,
                    monomial: m.to_string(),
                    forced: dj.coefficient(m).to_string(),
                    integrated: derived.coefficient(m).to_string(),
                });
            }
        }
        for (m, c) in piece.terms() {
            f.insert(m.clone(), c.clone())?;
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(ix: &[u32]) -> TMonomial {
        TMonomial::from_indices(ix)
    }

    #[test]
    fn keys_of_monomials() {
        assert_eq!(key_of(&t(&[1, 1, 1])), Some(CorrelatorKey::new(0, 3)));
        assert_eq!(key_of(&t(&[3])), Some(CorrelatorKey::new(2, 1)));
        assert_eq!(key_of(&t(&[1, 2])), Some(CorrelatorKey::new(1, 2)));
        assert_eq!(key_of(&t(&[1])), None);
        assert_eq!(key_of(&t(&[2])), None);
    }

    #[test]
    fn permutations_of_multisets() {
        assert_eq!(distinct_permutations(&[1, 1, 2]).len(), 3);
        assert_eq!(distinct_permutations(&[1, 2, 3]).len(), 6);
        assert_eq!(distinct_permutations(&[4]), vec![vec![4]]);
    }

    #[test]
    fn inhomogeneous_monomials_are_refused() {
        let mut f = TruncatedFreeEnergy::empty(8);
        assert!(matches!(
            f.insert(t(&[1, 2, 2]), Rational::one()),
            Err(OracleError::Inhomogeneous(_))
        ));
        assert!(f.insert(t(&[1, 1, 1]), Rational::new(1, 6)).is_ok());
    }

    #[test]
    fn low_order_solution() {
        let f = solve_f(6).unwrap();
        let q = Rational::new;
        assert_eq!(f.coefficient(&t(&[1, 1, 1])), q(1, 6));
        assert_eq!(f.coefficient(&t(&[1, 1, 1, 3])), q(1, 2));
        assert_eq!(f.coefficient(&t(&[1, 2])), q(2, 1));
        assert_eq!(f.coefficient(&t(&[2, 2, 2])), q(4, 3));
        assert_eq!(f.coefficient(&t(&[1, 1, 4])), q(4, 1));
        assert_eq!(f.coefficient(&t(&[1, 2, 3])), q(6, 1));
        assert_eq!(f.coefficient(&t(&[3])), q(13, 8));
        assert_eq!(f.coefficient(&t(&[1, 5])), q(65, 8));
        assert_eq!(f.coefficient(&t(&[2, 4])), q(8, 1));
        assert_eq!(f.coefficient(&t(&[3, 3])), q(39, 16));
        for (m, _) in f.poly().terms() {
            assert!(key_of(m).is_some());
        }
    }

    #[test]
    fn correlator_round_trip() {
        let f = solve_f(6).unwrap();
        let key = CorrelatorKey::new(1, 3);
        let w = f.correlator_differential(key);
        let back = TruncatedFreeEnergy::from_correlators(6, [(key, &w)]).unwrap();
        assert_eq!(back.poly(), &f.component(key));
    }
}
