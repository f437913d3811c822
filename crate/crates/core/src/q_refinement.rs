//! Experimental `Q`-graded correlators: `W_{1/2,1} -> Q W_{1/2,1}` and `D_j -> Q^j D_j`
//! in the recursion, with `Q` kept symbolic. Diagnostics cover the `Q = 1` reduction,
//! the degree and parity structure in `Q`, and permutation symmetry.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{Exponents, LaurentDifferential, Rational, Variable};
use crate::key::CorrelatorKey;
use crate::recursion::{Correlator, CorrelatorStore, Flavor, RecursionError, Q_VAR};

/// Label attached to every report built from graded values.
pub const EXPERIMENTAL: &str = "experimental";

/// A graded correlator in `z1..zn` and `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QCorrelator {
    key: CorrelatorKey,
    value: Arc<LaurentDifferential>,
}

fn with_q(key: CorrelatorKey, value: &LaurentDifferential) -> Result<LaurentDifferential, RecursionError> {
    let mut layout: Vec<Variable> = (1..=key.n).map(|i| Variable::form(&format!("z{i}"))).collect();
    layout.push(Variable::scalar(Q_VAR));
    Ok(value.conform(&layout)?)
}

impl QCorrelator {
    pub fn new(key: CorrelatorKey, value: &LaurentDifferential) -> Result<Self, RecursionError> {
        Ok(QCorrelator {
            key,
            value: Arc::new(with_q(key, value)?),
        })
    }

    pub fn key(&self) -> CorrelatorKey {
        self.key
    }

    pub fn value(&self) -> &LaurentDifferential {
        &self.value
    }

    fn q_index(&self) -> usize {
        self.key.n as usize
    }

    /// Specialization at `Q = q`.
    pub fn at(&self, q: &Rational) -> LaurentDifferential {
        self.value.substitute(Q_VAR, q).expect("Q is a scalar of the layout")
    }

    /// Largest power of `Q`, `None` for the zero correlator.
    pub fn q_degree(&self) -> Option<i32> {
        let qi = self.q_index();
        self.value.terms().map(|(e, _)| e[qi]).max()
    }

    /// Powers of `Q` that occur.
    pub fn q_powers(&self) -> Vec<i32> {
        let qi = self.q_index();
        let mut v: Vec<i32> = self.value.terms().map(|(e, _)| e[qi]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Coefficient of `prod z_i^{e_i}` as a polynomial in `Q`, lowest power first.
    pub fn q_polynomial(&self, z_exponents: &[i32]) -> QPolynomial {
        let qi = self.q_index();
        let coeffs = self
            .value
            .terms()
            .filter(|(e, _)| e[..qi] == *z_exponents)
            .map(|(e, c)| (e[qi], c.clone()))
            .collect();
        QPolynomial(coeffs)
    }

    /// Sorted distinct `z`-exponent vectors.
    fn z_patterns(&self) -> Vec<Exponents> {
        let qi = self.q_index();
        let mut v: Vec<Exponents> = self.value.terms().map(|(e, _)| Exponents::from_slice(&e[..qi])).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Polynomial in `Q` with exact coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QPolynomial(BTreeMap<i32, Rational>);

impl QPolynomial {
    pub fn coefficient(&self, power: i32) -> Rational {
        self.0.get(&power).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(p, c)| match p {
                0 => c.to_string(),
                1 => format!("{c} Q"),
                p => format!("{c} Q^{p}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// The graded correlator of `key` from a `Q`-graded store; `(1/2,1)` gives `Q dz/z`.
pub fn compute_q_correlator(store: &CorrelatorStore, key: CorrelatorKey) -> Result<QCorrelator, RecursionError> {
    if store.flavor() != Flavor::QGraded {
        return Err(RecursionError::FlavorMismatch {
            expected: Flavor::QGraded,
            found: store.flavor(),
        });
    }
    if key == CorrelatorKey::new(1, 1) {
        let v = LaurentDifferential::monomial(
            vec![Variable::form("z1"), Variable::scalar(Q_VAR)],
            &[-1, 1],
            Rational::one(),
        );
        return QCorrelator::new(key, &v);
    }
    if !key.is_stable() {
        return Err(RecursionError::Unstable(key));
    }
    let c = store.ensure(key)?;
    QCorrelator::new(key, c.value())
}

/// Structural audit of one graded correlator against its baseline.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub key: String,
    pub label: &'static str,
    pub reduces_to_baseline: bool,
    pub q_degree: Option<i32>,
    /// `2h`.
    pub degree_bound: u32,
    /// Every power of `Q` has the parity of `2h`.
    pub parity_consistent: bool,
    pub q_powers: Vec<i32>,
}

impl StructureReport {
    pub fn holds(&self) -> bool {
        self.reduces_to_baseline && self.q_degree.is_none_or(|d| d as u32 <= self.degree_bound) && self.parity_consistent
    }
}

pub fn structure_report(q: &QCorrelator, baseline: &Correlator) -> StructureReport {
    let twice = q.key.twice_genus();
    let powers = q.q_powers();
    StructureReport {
        key: q.key.to_string(),
        label: EXPERIMENTAL,
        reduces_to_baseline: q.at(&Rational::one()) == *baseline.value(),
        q_degree: q.q_degree(),
        degree_bound: twice,
        parity_consistent: powers.iter().all(|&p| p.rem_euclid(2) as u32 == twice % 2),
        q_powers: powers,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryStatus {
    Symmetric,
    Asymmetric,
}

/// A transposition and a `z`-monomial whose `Q`-coefficients differ across it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QWitness {
    pub permutation: (usize, usize),
    pub z_exponents: Vec<i32>,
    pub polynomial: String,
    pub swapped_polynomial: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub key: String,
    pub complexity: i64,
    pub label: &'static str,
    pub status: SymmetryStatus,
    pub witness: Option<QWitness>,
}

/// Checks all transpositions `(i, j)` of the `z` variables.
pub fn symmetry_report(q: &QCorrelator) -> SymmetryReport {
    let n = q.key.n as usize;
    let mut witness = None;
    'outer: for pattern in q.z_patterns() {
        for i in 0..n {
            for j in i + 1..n {
                if pattern[i] == pattern[j] {
                    continue;
                }
                let mut swapped = pattern.clone();
                swapped.swap(i, j);
                let a = q.q_polynomial(&pattern);
                let b = q.q_polynomial(&swapped);
                if a != b {
                    witness = Some(QWitness {
                        permutation: (i, j),
                        z_exponents: pattern.to_vec(),
                        polynomial: a.to_string(),
                        swapped_polynomial: b.to_string(),
                    });
                    break 'outer;
                }
            }
        }
    }
    SymmetryReport {
        key: q.key.to_string(),
        complexity: q.key.complexity(),
        label: EXPERIMENTAL,
        status: if witness.is_some() {
            SymmetryStatus::Asymmetric
        } else {
            SymmetryStatus::Symmetric
        },
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_one_is_q_over_z() {
        let store = CorrelatorStore::new(Flavor::QGraded);
        let q = compute_q_correlator(&store, CorrelatorKey::new(1, 1)).unwrap();
        assert_eq!(q.value().to_string(), "1 * z1^-1 Q dz1");
        assert_eq!(q.q_degree(), Some(1));
    }

    #[test]
    fn half_two_is_linear_in_q() {
        let key = CorrelatorKey::new(1, 2);
        let graded = CorrelatorStore::new(Flavor::QGraded);
        let plain = CorrelatorStore::new(Flavor::Baseline);
        let q = compute_q_correlator(&graded, key).unwrap();
        let base = plain.ensure(key).unwrap();
        assert_eq!(q.q_powers(), vec![1]);
        assert_eq!(q.at(&Rational::from(5)), base.value().scale(&Rational::from(5)));
        let r = structure_report(&q, &base);
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn low_complexity_is_symmetric() {
        let graded = CorrelatorStore::new(Flavor::QGraded);
        for key in CorrelatorKey::stable_keys(6) {
            if key.complexity() < 3 {
                let q = compute_q_correlator(&graded, key).unwrap();
                assert_eq!(symmetry_report(&q).status, SymmetryStatus::Symmetric, "{key}");
            }
        }
    }

    #[test]
    fn polynomial_rendering() {
        let p = QPolynomial([(0, Rational::new(1, 8)), (2, Rational::from(3))].into_iter().collect());
        assert_eq!(p.to_string(), "1/8 + 3 Q^2");
        assert_eq!(p.coefficient(1), Rational::zero());
    }
}
