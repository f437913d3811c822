//! Principal specialization `t_k -> hbar / (k z^k)`, `u -> hbar` of the free energy
//! and the quantum curve
//! `(hbar^3 d^3/dx^3 - 2 hbar x d/dx + 2 hbar (Q - 1)) e^Psi = 0` with `x = z^2/2`.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, Exponents, LaurentDifferential, Rational, Variable};
use crate::key::CorrelatorKey;
use crate::oracle::{key_of, TruncatedFreeEnergy};

pub const HBAR: &str = "hbar";
pub const Z: &str = "z";
pub const Q: &str = "Q";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecializationError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("free energy budget {budget} does not cover stratum {key} needed for hbar order {order}")]
    MissingStratum {
        key: CorrelatorKey,
        budget: u32,
        order: i32,
    },
}

/// How the unstable pieces of `Psi` are supplied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnstableDecomposition {
    #[default]
    /// `z^3 / (3 hbar) - (2Q + 1)/4 log(z^2/2)`; at `Q = 1` the log coefficient is `-3/4`.
    ScaledCubic,
    /// `z^3 / 3 - 3/4 log(z^2/2)` with no `hbar` on the cubic term.
    Literal,
}

/// `Psi = sum_m hbar^m (rational part in z) + sum_m hbar^m c_m log(z^2/2)`,
/// with coefficients polynomial in `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct WKBSeries {
    order: i32,
    decomposition: UnstableDecomposition,
    rational: LaurentDifferential,
    log: LaurentDifferential,
}

fn series_vars() -> Vec<Variable> {
    vec![Variable::scalar(HBAR), Variable::scalar(Z), Variable::scalar(Q)]
}

fn log_vars() -> Vec<Variable> {
    vec![Variable::scalar(HBAR), Variable::scalar(Q)]
}

/// One coefficient of a WKB series: `hbar^hbar_power z^z_exponent` (times `log(z^2/2)`
/// when `log` is set) carries `coefficient`, a polynomial in `Q` rendered as text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WkbTerm {
    pub hbar_power: i32,
    pub z_exponent: i32,
    pub log: bool,
    pub q_power: i32,
    pub coefficient: String,
}

impl WKBSeries {
    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn decomposition(&self) -> UnstableDecomposition {
        self.decomposition
    }

    pub fn rational_part(&self) -> &LaurentDifferential {
        &self.rational
    }

    pub fn log_part(&self) -> &LaurentDifferential {
        &self.log
    }

    /// Coefficient of `hbar^m z^e` (or of `hbar^m log(z^2/2)` when `log`), at `Q^0`.
    pub fn coefficient(&self, m: i32, e: i32, log: bool) -> Rational {
        if log {
            self.log.coefficient(&[m, 0]).expect("arity")
        } else {
            self.rational.coefficient(&[m, e, 0]).expect("arity")
        }
    }

    pub fn terms(&self) -> Vec<WkbTerm> {
        let mut out: Vec<WkbTerm> = self
            .rational
            .terms()
            .map(|(e, c)| WkbTerm {
                hbar_power: e[0],
                z_exponent: e[1],
                log: false,
                q_power: e[2],
                coefficient: c.to_string(),
            })
            .collect();
        out.extend(self.log.terms().map(|(e, c)| WkbTerm {
            hbar_power: e[0],
            z_exponent: 0,
            log: true,
            q_power: e[1],
            coefficient: c.to_string(),
        }));
        out
    }
}

/// Stable keys with `2h - 2 + n = m`.
pub fn strata_keys(m: i32) -> Vec<CorrelatorKey> {
    if m < 1 {
        return Vec::new();
    }
    (1..=(m as u32 + 2))
        .filter_map(|n| {
            let twice = m + 2 - n as i32;
            (twice >= 0).then(|| CorrelatorKey::new(twice as u32, n))
        })
        .filter(|k| k.is_stable())
        .collect()
}

/// `Psi~` from `F` through `hbar^order`, plus the unstable pieces.
pub fn principal_specialize(
    f: &TruncatedFreeEnergy,
    order: i32,
    decomposition: UnstableDecomposition,
) -> Result<WKBSeries, SpecializationError> {
    for m in 1..=order {
        if let Some(&key) = strata_keys(m).iter().find(|k| k.level() > f.budget()) {
            return Err(SpecializationError::MissingStratum {
                key,
                budget: f.budget(),
                order,
            });
        }
    }
    let mut terms = Vec::new();
    for (mono, c) in f.poly().terms() {
        let Some(key) = key_of(mono) else { continue };
        let m = key.complexity() as i32;
        if m > order {
            continue;
        }
        let denom: i64 = mono.indices().iter().map(|&k| k as i64).product();
        terms.push((
            Exponents::from_slice(&[m, -(mono.weight() as i32), 0]),
            c / &Rational::from(denom),
        ));
    }
    let cubic_hbar = match decomposition {
        UnstableDecomposition::ScaledCubic => -1,
        UnstableDecomposition::Literal => 0,
    };
    terms.push((Exponents::from_slice(&[cubic_hbar, 3, 0]), Rational::new(1, 3)));
    let rational = LaurentDifferential::from_terms(series_vars(), terms);
    let log = match decomposition {
        UnstableDecomposition::ScaledCubic => LaurentDifferential::from_terms(
            log_vars(),
            [
                (Exponents::from_slice(&[0, 0]), Rational::new(-1, 4)),
                (Exponents::from_slice(&[0, 1]), Rational::new(-1, 2)),
            ],
        ),
        UnstableDecomposition::Literal => LaurentDifferential::monomial(log_vars(), &[0, 0], Rational::new(-3, 4)),
    };
    Ok(WKBSeries {
        order,
        decomposition,
        rational,
        log,
    })
}

/// Value of the parameter `Q` in a residual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QValue {
    Symbolic,
    Value(Rational),
}

/// `e^{-Psi} (hbar^3 d^3/dx^3 - 2 hbar x d/dx + 2 hbar (Q - 1)) e^Psi`
/// through `hbar^{order+1}`, as a series in `hbar`, `z` and `Q`.
///
/// With `P = hbar dPsi/dx` this is `P^3 + 3 hbar P P' + hbar^2 P'' - 2 x P + 2 hbar (Q - 1)`.
pub fn quantum_curve_residual(psi: &WKBSeries, q: &QValue) -> Result<LaurentDifferential, SpecializationError> {
    let top = psi.order + 1;
    let keep = move |e: &[i32]| e[0] <= top;
    let ddx = |a: &LaurentDifferential| -> Result<LaurentDifferential, AlgebraError> {
        Ok(a.differentiate(Z)?.shift(Z, -1, 0))
    };
    // d/dx of c log(z^2/2) is 2c / z^2
    let log_as_z = psi.log.conform(&series_vars())?;
    let p = ddx(&psi.rational)?
        .add(&log_as_z.shift(Z, -2, 0).scale(&Rational::from(2)))?
        .shift(HBAR, 1, 0)
        .filter(|e, _| e[0] <= top);
    let p1 = ddx(&p)?;
    let p2 = ddx(&p1)?;
    let p_sq = p.mul_filtered(&p, keep);
    let cube = p_sq.mul_filtered(&p, keep);
    let mixed = p.mul_filtered(&p1, keep).shift(HBAR, 1, 0).scale(&Rational::from(3));
    let second = p2.shift(HBAR, 2, 0);
    // -2 x P = -z^2 P
    let drift = p.shift(Z, 2, 0).neg();
    let q_term = LaurentDifferential::from_terms(
        series_vars(),
        [
            (Exponents::from_slice(&[1, 0, 1]), Rational::from(2)),
            (Exponents::from_slice(&[1, 0, 0]), Rational::from(-2)),
        ],
    );
    let r = cube
        .add(&mixed)?
        .add(&second)?
        .add(&drift)?
        .add(&q_term)?
        .filter(|e, _| e[0] <= top);
    Ok(match q {
        QValue::Symbolic => r,
        QValue::Value(v) => r.substitute(Q, v)?,
    })
}

/// The `hbar^k` part of a residual, as a series in the remaining variables.
pub fn stratum(residual: &LaurentDifferential, k: i32) -> Result<LaurentDifferential, SpecializationError> {
    let hi = residual
        .index_of(HBAR)
        .ok_or_else(|| AlgebraError::UnknownVariable(HBAR.to_string()))?;
    Ok(residual.filter(|e, _| e[hi] == k).substitute(HBAR, &Rational::one())?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratumReport {
    pub hbar_power: i32,
    pub vanishes: bool,
    /// Most singular surviving term when nonzero.
    pub leading: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuantumCurveReport {
    pub decomposition: UnstableDecomposition,
    pub q: QValue,
    pub order: i32,
    pub strata: Vec<StratumReport>,
}

impl QuantumCurveReport {
    pub fn all_vanish(&self) -> bool {
        self.strata.iter().all(|s| s.vanishes)
    }
}

/// Per-stratum summary for `hbar^0 .. hbar^{order+1}`.
pub fn quantum_curve_report(psi: &WKBSeries, q: &QValue) -> Result<QuantumCurveReport, SpecializationError> {
    let r = quantum_curve_residual(psi, q)?;
    let mut strata = Vec::new();
    for k in 0..=psi.order + 1 {
        let s = stratum(&r, k)?;
        let leading = s.terms().next().map(|(e, c)| {
            let one = LaurentDifferential::from_terms(s.vars().to_vec(), [(e.clone(), c.clone())]);
            one.to_string()
        });
        strata.push(StratumReport {
            hbar_power: k,
            vanishes: s.is_zero(),
            leading,
        });
    }
    Ok(QuantumCurveReport {
        decomposition: psi.decomposition,
        q: q.clone(),
        order: psi.order,
        strata,
    })
}
