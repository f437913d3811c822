//! Residue recursion for the correlators `W_{g,n}` of the curve `x = z^2/2, y = z`
//! with the half-integer genus corrections.
//!
//! ```text
//! W_{g,n+1}(z0, z) = Res_{w=0} K2(z0,w) [R2 + D1 W_{g-1/2,n+1}(w,z)]
//!                  + Res_{w=0} K3(z0,w) [R3 - D2 W_{g-1,n+1}(w,z)]
//! ```

mod assemble;
pub mod cache;
mod kernel;
mod store;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, LaurentDifferential, Rational, Variable};
use crate::key::CorrelatorKey;

pub use assemble::{assemble_r2, assemble_r3, CorrelatorSource};
pub use kernel::{
    apply_d1, apply_d2, bergman_expansion, expand_b_integral, kernel, tilde_w02_diagonal,
    KernelExpansion, INTEGRATION_VAR,
};
pub use store::{CorrelatorStore, StoreStats};

/// Name of the refinement parameter in graded correlators.
pub const Q_VAR: &str = "Q";

/// Plain correlators, or the refinement weighting `W_{1/2,1}` by `Q` and `D_j` by `Q^j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Baseline,
    QGraded,
}

impl Flavor {
    pub fn tag(self) -> u8 {
        match self {
            Flavor::Baseline => 0,
            Flavor::QGraded => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Flavor::Baseline),
            1 => Some(Flavor::QGraded),
            _ => None,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Baseline => "baseline",
            Flavor::QGraded => "q-graded",
        })
    }
}

#[derive(Debug, Error)]
pub enum RecursionError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{0} is unstable; use base_correlator")]
    Unstable(CorrelatorKey),
    #[error("expected a {expected} store, got {found}")]
    FlavorMismatch { expected: Flavor, found: Flavor },
    #[error("{0} is stable; use compute_correlator")]
    NotBase(CorrelatorKey),
    #[error("computing {target} needs {missing}, which is not in the store")]
    MissingDependency {
        target: CorrelatorKey,
        missing: CorrelatorKey,
    },
    #[error("cache record {path}: {reason}")]
    CacheCorrupt { path: String, reason: String },
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// A computed stable correlator in canonical variables `z1..zn` (and `Q` when graded).
#[derive(Clone, Debug, PartialEq)]
pub struct Correlator {
    key: CorrelatorKey,
    flavor: Flavor,
    value: Arc<LaurentDifferential>,
}

/// A transposition of two variables that changes a coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryWitness {
    pub swap: (usize, usize),
    pub exponents: Vec<i32>,
    pub coefficient: String,
    pub swapped_coefficient: String,
}

impl Correlator {
    pub fn new(key: CorrelatorKey, flavor: Flavor, value: LaurentDifferential) -> Self {
        Correlator {
            key,
            flavor,
            value: Arc::new(value),
        }
    }

    pub fn key(&self) -> CorrelatorKey {
        self.key
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn value(&self) -> &LaurentDifferential {
        &self.value
    }

    pub fn shared_value(&self) -> Arc<LaurentDifferential> {
        self.value.clone()
    }

    /// Coefficient of `prod dz_i / z_i^{poles_i}` (the `Q`-free part when graded).
    pub fn coefficient(&self, poles: &[i32]) -> Result<Rational, AlgebraError> {
        let mut exps: Vec<i32> = poles.iter().map(|p| -p).collect();
        exps.resize(self.value.vars().len(), 0);
        self.value.coefficient(&exps)
    }

    /// First adjacent transposition of `z`-variables under which some coefficient
    /// changes, or `None` when the value is fully symmetric.
    pub fn symmetry_witness(&self) -> Option<SymmetryWitness> {
        symmetry_witness(&self.value, self.key.n as usize)
    }

    /// First term whose total pole order differs from `6g - 6 + 4n` or that has a
    /// nonnegative exponent.
    pub fn homogeneity_violation(&self) -> Option<Vec<i32>> {
        let n = self.key.n as usize;
        let total = self.key.total_pole_order();
        self.value
            .terms()
            .find(|(e, _)| {
                let z = &e[..n];
                z.iter().any(|&x| x >= 0) || -z.iter().map(|&x| x as i64).sum::<i64>() != total
            })
            .map(|(e, _)| e.to_vec())
    }
}

/// Checks symmetry in the first `n` variables via adjacent transpositions.
pub fn symmetry_witness(value: &LaurentDifferential, n: usize) -> Option<SymmetryWitness> {
    for (e, c) in value.terms() {
        for i in 0..n.saturating_sub(1) {
            if e[i] == e[i + 1] {
                continue;
            }
            let mut s = e.clone();
            s.swap(i, i + 1);
            let other = value.coefficient(&s).expect("same arity");
            if &other != c {
                return Some(SymmetryWitness {
                    swap: (i, i + 1),
                    exponents: e.to_vec(),
                    coefficient: c.to_string(),
                    swapped_coefficient: other.to_string(),
                });
            }
        }
    }
    None
}

/// Initial data of the recursion.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseCorrelator {
    /// `W_{0,1} = -z^2 dz` or `W_{1/2,1} = dz/z`.
    Differential(LaurentDifferential),
    /// `W_{0,2} = B(z1, z2)`, only ever used through [`bergman_expansion`].
    Bergman,
}

pub fn base_correlator(key: CorrelatorKey) -> Result<BaseCorrelator, RecursionError> {
    let z = vec![Variable::form("z1")];
    match (key.twice_genus(), key.n) {
        (0, 1) => Ok(BaseCorrelator::Differential(LaurentDifferential::monomial(
            z,
            &[2],
            -Rational::one(),
        ))),
        (1, 1) => Ok(BaseCorrelator::Differential(LaurentDifferential::monomial(
            z,
            &[-1],
            Rational::one(),
        ))),
        (0, 2) => Ok(BaseCorrelator::Bergman),
        _ => Err(RecursionError::NotBase(key)),
    }
}

/// Kernel truncation order that is always sufficient for `key`: `6g - 6 + 4(n+2) + 4`.
pub fn required_kernel_order(key: CorrelatorKey) -> u32 {
    (key.total_pole_order() + 12).max(1) as u32
}

/// Stable keys read directly by one recursion step for `key`.
pub fn direct_dependencies(key: CorrelatorKey) -> BTreeSet<CorrelatorKey> {
    let t = key.twice_genus() as i64;
    let big_n = key.n as i64;
    let n = big_n - 1;
    let mut out = BTreeSet::new();
    let mut push = |tw: i64, m: i64| {
        if tw >= 0 && m >= 1 {
            let k = CorrelatorKey::new(tw as u32, m as u32);
            if k.is_stable() && k != key {
                out.insert(k);
            }
        }
    };
    push(t - 2, big_n + 1);
    push(t - 1, big_n);
    push(t - 2, big_n);
    push(t - 4, big_n + 2);
    for t1 in 0..=t {
        for m1 in 0..=n {
            push(t1, m1 + 1);
            push(t - t1, n - m1 + 1);
        }
    }
    for t1 in 0..=t - 2 {
        for m1 in 0..=n {
            push(t1, m1 + 1);
            push(t - 2 - t1, n - m1 + 2);
        }
    }
    for t1 in 0..=t {
        for t2 in 0..=t - t1 {
            for m1 in 0..=n {
                for m2 in 0..=n - m1 {
                    push(t1, m1 + 1);
                    push(t2, m2 + 1);
                    push(t - t1 - t2, n - m1 - m2 + 1);
                }
            }
        }
    }
    out
}

/// Every stable key `key` transitively depends on, excluding `key`.
pub fn dependencies(key: CorrelatorKey) -> BTreeSet<CorrelatorKey> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![key];
    while let Some(k) = stack.pop() {
        for d in direct_dependencies(k) {
            assert!(d.level() < k.level(), "dependency {d} of {k} is not smaller");
            if seen.insert(d) {
                stack.push(d);
            }
        }
    }
    seen
}

/// Runs one recursion step for a stable key, reading smaller keys from `source`.
pub fn compute_correlator<S: CorrelatorSource + ?Sized>(
    key: CorrelatorKey,
    source: &S,
) -> Result<Correlator, RecursionError> {
    compute_correlator_with_order(key, source, required_kernel_order(key))
}

pub fn compute_correlator_with_order<S: CorrelatorSource + ?Sized>(
    key: CorrelatorKey,
    source: &S,
    order: u32,
) -> Result<Correlator, RecursionError> {
    if !key.is_stable() {
        return Err(RecursionError::Unstable(key));
    }
    let (i2, i3) = assemble::integrands(key, source, order)?;
    let (a, b) = rayon::join(
        || kernel(2, "z0", order).residue_against(&i2),
        || kernel(3, "z0", order).residue_against(&i3),
    );
    let sum = a?.add(&b?)?;
    let names: Vec<(String, String)> = (0..key.n as usize)
        .map(|i| (format!("z{i}"), format!("z{}", i + 1)))
        .collect();
    let pairs: Vec<(&str, &str)> = names.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Ok(Correlator::new(key, source.flavor(), sum.rename(&pairs)?))
}
