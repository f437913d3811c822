//! Intersection numbers read off the correlators, the `t <-> (T, S)` rescaling,
//! tables checked against the constraint solver, and JSON/CSV exports.
//!
//! `T_i = (2i+1)!! t_{2i+1}` and `S_i = 2^{i+1} (i+1)! t_{2i+2}`; a bracket
//! `<tau_{a_1} .. sigma_{b_1} ..>_h` is the derivative of `F` in these coordinates.

use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{double_factorial_odd, factorial, Rational};
use crate::key::{CorrelatorKey, GenusIndex};
use crate::oracle::{key_of, OracleError, TMonomial, TPoly, TruncatedFreeEnergy};
use crate::recursion::{Correlator, CorrelatorStore, Flavor, RecursionError};

#[derive(Debug, Error)]
pub enum NumbersError {
    #[error("{key} lies outside budget {budget}")]
    OutOfBudget { key: CorrelatorKey, budget: u32 },
    #[error("no intersection numbers on unstable {0}")]
    Unstable(CorrelatorKey),
    #[error(transparent)]
    Recursion(#[from] RecursionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0} pipeline mismatches; first at {1}")]
    Disagreement(usize, String),
}

/// `<prod tau_{a_i} prod sigma_{b_j}>_h`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct IntersectionIndex {
    pub h: GenusIndex,
    pub interior: Vec<u32>,
    pub boundary: Vec<u32>,
}

impl IntersectionIndex {
    pub fn new(h: GenusIndex, mut interior: Vec<u32>, mut boundary: Vec<u32>) -> Self {
        interior.sort_unstable();
        boundary.sort_unstable();
        IntersectionIndex { h, interior, boundary }
    }

    /// The index whose `t`-indices are those of `m`.
    pub fn from_t_indices(h: GenusIndex, ks: &[u32]) -> Self {
        let interior = ks.iter().filter(|k| *k % 2 == 1).map(|k| (k - 1) / 2).collect();
        let boundary = ks.iter().filter(|k| *k % 2 == 0).map(|k| k / 2 - 1).collect();
        IntersectionIndex::new(h, interior, boundary)
    }

    pub fn n(&self) -> u32 {
        (self.interior.len() + self.boundary.len()) as u32
    }

    pub fn key(&self) -> CorrelatorKey {
        CorrelatorKey::new(self.h.twice(), self.n())
    }

    /// `k = 2a+1` for `tau_a`, `k = 2b+2` for `sigma_b`, ascending.
    pub fn t_indices(&self) -> Vec<u32> {
        let mut ks: Vec<u32> = self
            .interior
            .iter()
            .map(|a| 2 * a + 1)
            .chain(self.boundary.iter().map(|b| 2 * b + 2))
            .collect();
        ks.sort_unstable();
        ks
    }

    /// `sum (2a_i+1) + sum (2b_j+2) = 6h - 6 + 3n`.
    pub fn satisfies_dimension(&self) -> bool {
        let sum: i64 = self.t_indices().iter().map(|&k| k as i64).sum();
        sum == self.key().t_weight()
    }

    /// `prod (2a+1)!! * prod 2^{b+1} (b+1)!`, the factor between the
    /// `t`-derivative and the bracket.
    pub fn normalization(&self) -> Rational {
        let mut r = Rational::one();
        for &a in &self.interior {
            r = r * double_factorial_odd(a + 1);
        }
        for &b in &self.boundary {
            r = r * Rational::from(2i64).pow(b as i32 + 1) * factorial(b + 1);
        }
        r
    }
}

impl fmt::Display for IntersectionIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .interior
            .iter()
            .map(|a| format!("tau{a}"))
            .chain(self.boundary.iter().map(|b| format!("sigma{b}")))
            .collect();
        write!(f, "<{}>_{}", parts.join(" "), self.h)
    }
}

/// A bracket value, zero with `dimension_violated` when the index is off-degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extracted {
    pub value: Rational,
    pub dimension_violated: bool,
}

/// Bracket from a computed correlator whose key matches `idx`.
pub fn bracket_from_correlator(w: &Correlator, idx: &IntersectionIndex) -> Rational {
    let poles: Vec<i32> = idx.t_indices().iter().map(|&k| k as i32 + 1).collect();
    let raw = w.coefficient(&poles).expect("arity matches key");
    raw / idx.normalization()
}

/// Bracket from the free energy: coefficient times `prod m_i!`, then normalized.
pub fn bracket_from_free_energy(f: &TruncatedFreeEnergy, idx: &IntersectionIndex) -> Rational {
    let m = TMonomial::from_indices(&idx.t_indices());
    f.coefficient(&m) * m.symmetry_factor() / idx.normalization()
}

/// `<..>_h` read from `W_{h,n}` in a baseline store.
pub fn extract_number(
    store: &CorrelatorStore,
    budget: u32,
    idx: &IntersectionIndex,
) -> Result<Extracted, NumbersError> {
    let key = idx.key();
    if !key.is_stable() {
        return Err(NumbersError::Unstable(key));
    }
    if key.level() > budget {
        return Err(NumbersError::OutOfBudget { key, budget });
    }
    if !idx.satisfies_dimension() {
        return Ok(Extracted {
            value: Rational::zero(),
            dimension_violated: true,
        });
    }
    let w = store.ensure(key)?;
    Ok(Extracted {
        value: bracket_from_correlator(&w, idx),
        dimension_violated: false,
    })
}

/// Label of one `(T, S)` generator: `T_i` for `t_{2i+1}`, `S_i` for `t_{2i+2}`.
pub fn kp_generator(k: u32) -> String {
    if k % 2 == 1 {
        format!("T{}", (k - 1) / 2)
    } else {
        format!("S{}", k / 2 - 1)
    }
}

/// `X_k / t_k` where `X_k` is the `(T, S)` generator paired with `t_k`.
pub fn kp_scale(k: u32) -> Rational {
    if k % 2 == 1 {
        double_factorial_odd((k + 1) / 2)
    } else {
        let i = k / 2 - 1;
        Rational::from(2i64).pow(i as i32 + 1) * factorial(i + 1)
    }
}

/// Polynomial in `T_i, S_i`; monomials reuse `t`-indices to name generators.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KpPoly(TPoly);

impl KpPoly {
    pub fn coefficient(&self, generators: &[u32]) -> Rational {
        self.0.coefficient(&TMonomial::from_indices(generators))
    }

    pub fn as_indexed(&self) -> &TPoly {
        &self.0
    }
}

impl fmt::Display for KpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .0
            .terms()
            .map(|(m, c)| {
                let names: Vec<String> = m.indices().iter().map(|&k| kp_generator(k)).collect();
                if names.is_empty() {
                    c.to_string()
                } else {
                    format!("{c} * {}", names.join(" "))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

fn rescale(p: &TPoly, invert: bool) -> TPoly {
    let mut out = TPoly::zero();
    for (m, c) in p.terms() {
        let mut s = Rational::one();
        for &k in m.indices() {
            s = s * kp_scale(k);
        }
        let s = if invert { s } else { s.recip() };
        out.add_term(m.clone(), c * &s);
    }
    out
}

/// Substitutes `t_k = X_k / scale_k`.
pub fn to_kp(p: &TPoly) -> KpPoly {
    KpPoly(rescale(p, false))
}

/// Substitutes `X_k = scale_k t_k`.
pub fn from_kp(p: &KpPoly) -> TPoly {
    rescale(&p.0, true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Recursion,
    Oracle,
    BothAgree,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Recursion => "recursion",
            Provenance::Oracle => "oracle",
            Provenance::BothAgree => "both-agree",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub index: IntersectionIndex,
    pub value: Rational,
    pub provenance: Provenance,
    /// Value from the other pipeline when the two differ.
    pub other: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub budget: u32,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn disagreements(&self) -> impl Iterator<Item = &TableRow> {
        self.rows.iter().filter(|r| r.provenance != Provenance::BothAgree)
    }
}

/// All nonzero brackets with `4h + n <= budget`, from a baseline store and the
/// constraint solution, ordered by `h`, then `n`, then `t`-indices.
pub fn tabulate(store: &CorrelatorStore, f: &TruncatedFreeEnergy, budget: u32) -> Result<Table, NumbersError> {
    if store.flavor() != Flavor::Baseline {
        return Err(RecursionError::FlavorMismatch {
            expected: Flavor::Baseline,
            found: store.flavor(),
        }
        .into());
    }
    let mut rows = Vec::new();
    for w in store.ensure_budget(budget)? {
        let key = w.key();
        if key.level() > f.budget() {
            return Err(NumbersError::OutOfBudget { key, budget: f.budget() });
        }
        let n = key.n as usize;
        let mut patterns: Vec<Vec<u32>> = w
            .value()
            .terms()
            .map(|(e, _)| e[..n].iter().map(|&x| (-x - 1) as u32).collect::<Vec<u32>>())
            .filter(|ks| ks.windows(2).all(|p| p[0] <= p[1]))
            .collect();
        patterns.extend(
            f.component(key)
                .terms()
                .filter(|(m, _)| key_of(m) == Some(key))
                .map(|(m, _)| m.indices().to_vec()),
        );
        patterns.sort();
        patterns.dedup();
        for ks in patterns {
            let idx = IntersectionIndex::from_t_indices(key.genus, &ks);
            let rec = bracket_from_correlator(&w, &idx);
            let ora = bracket_from_free_energy(f, &idx);
            let (value, provenance, other) = if rec == ora {
                (rec, Provenance::BothAgree, None)
            } else {
                (rec, Provenance::Recursion, Some(ora))
            };
            rows.push(TableRow {
                index: idx,
                value,
                provenance,
                other,
            });
        }
    }
    rows.sort_by(|a, b| {
        (a.index.h, a.index.n(), a.index.t_indices()).cmp(&(b.index.h, b.index.n(), b.index.t_indices()))
    });
    Ok(Table { budget, rows })
}

#[derive(Serialize)]
struct RationalJson {
    num: String,
    den: String,
}

impl From<&Rational> for RationalJson {
    fn from(r: &Rational) -> Self {
        RationalJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

#[derive(Serialize)]
struct IndicesJson<'a> {
    interior: &'a [u32],
    boundary: &'a [u32],
}

#[derive(Serialize)]
struct RowJson<'a> {
    h: String,
    indices: IndicesJson<'a>,
    value: RationalJson,
    provenance: Provenance,
}

#[derive(Serialize)]
struct TableJson<'a> {
    format: &'static str,
    version: u32,
    budget: u32,
    rows: Vec<RowJson<'a>>,
}

pub const TABLE_FORMAT: &str = "open-tr/intersection-numbers";
pub const CORRELATOR_FORMAT: &str = "open-tr/correlators";
pub const EXPORT_VERSION: u32 = 1;

pub fn table_to_json(t: &Table) -> String {
    let doc = TableJson {
        format: TABLE_FORMAT,
        version: EXPORT_VERSION,
        budget: t.budget,
        rows: t
            .rows
            .iter()
            .map(|r| RowJson {
                h: r.index.h.to_string(),
                indices: IndicesJson {
                    interior: &r.index.interior,
                    boundary: &r.index.boundary,
                },
                value: (&r.value).into(),
                provenance: r.provenance,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data");
    s.push('\n');
    s
}

fn join(v: &[u32]) -> String {
    v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

pub fn table_to_csv(t: &Table) -> String {
    let mut out = String::from("h,interior,boundary,value,provenance\n");
    for r in &t.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.index.h,
            join(&r.index.interior),
            join(&r.index.boundary),
            r.value,
            r.provenance
        );
    }
    out
}

pub fn table_to_text(t: &Table) -> String {
    let mut out = String::new();
    for r in &t.rows {
        let _ = writeln!(out, "{} = {}  [{}]", r.index, r.value, r.provenance);
    }
    out
}

#[derive(Serialize)]
struct TermJson {
    exponents: Vec<i32>,
    value: RationalJson,
}

#[derive(Serialize)]
struct CorrelatorJson {
    g: String,
    n: u32,
    variables: Vec<String>,
    text: String,
    terms: Vec<TermJson>,
}

#[derive(Serialize)]
struct CorrelatorsJson {
    format: &'static str,
    version: u32,
    flavor: Flavor,
    budget: u32,
    correlators: Vec<CorrelatorJson>,
}

/// Versioned JSON of the given correlators, in the order supplied.
pub fn correlators_to_json(flavor: Flavor, budget: u32, ws: &[std::sync::Arc<Correlator>]) -> String {
    let doc = CorrelatorsJson {
        format: CORRELATOR_FORMAT,
        version: EXPORT_VERSION,
        flavor,
        budget,
        correlators: ws
            .iter()
            .map(|w| CorrelatorJson {
                g: w.key().genus.to_string(),
                n: w.key().n,
                variables: w.value().var_names().iter().map(|s| s.to_string()).collect(),
                text: w.value().to_string(),
                terms: w
                    .value()
                    .terms()
                    .map(|(e, c)| TermJson {
                        exponents: e.to_vec(),
                        value: c.into(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data");
    s.push('\n');
    s
}

/// Correlators as CSV: one line per term.
pub fn correlators_to_csv(ws: &[std::sync::Arc<Correlator>]) -> String {
    let mut out = String::from("g,n,exponents,value\n");
    for w in ws {
        for (e, c) in w.value().terms() {
            let ex: Vec<String> = e.iter().map(i32::to_string).collect();
            let _ = writeln!(out, "{},{},{},{}", w.key().genus, w.key().n, ex.join(" "), c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::solve_f;

    fn g(twice: u32) -> GenusIndex {
        GenusIndex::from_twice(twice)
    }

    #[test]
    fn coordinate_generators() {
        let t1 = TPoly::monomial(TMonomial::from_indices(&[1]), Rational::one());
        assert_eq!(to_kp(&t1).to_string(), "1 * T0");
        let t2 = TPoly::monomial(TMonomial::from_indices(&[2]), Rational::one());
        assert_eq!(to_kp(&t2).to_string(), "1/2 * S0");
        let t3 = TPoly::monomial(TMonomial::from_indices(&[3]), Rational::one());
        assert_eq!(to_kp(&t3).coefficient(&[3]), Rational::new(1, 3));
        let t4 = TPoly::monomial(TMonomial::from_indices(&[4]), Rational::one());
        assert_eq!(to_kp(&t4).coefficient(&[4]), Rational::new(1, 8));
    }

    #[test]
    fn anchors_from_free_energy() {
        let f = solve_f(6).unwrap();
        let tau = IntersectionIndex::new(g(0), vec![0, 0, 0], vec![]);
        assert_eq!(bracket_from_free_energy(&f, &tau), Rational::one());
        let sigma = IntersectionIndex::new(g(1), vec![], vec![0, 0, 0]);
        assert_eq!(bracket_from_free_energy(&f, &sigma), Rational::one());
    }

    #[test]
    fn dimension_violation_is_zero() {
        let store = CorrelatorStore::new(Flavor::Baseline);
        let idx = IntersectionIndex::new(g(0), vec![0, 0, 1], vec![]);
        let e = extract_number(&store, 8, &idx).unwrap();
        assert!(e.dimension_violated);
        assert!(e.value.is_zero());
        let far = IntersectionIndex::new(g(4), vec![0], vec![]);
        assert!(matches!(
            extract_number(&store, 8, &far),
            Err(NumbersError::OutOfBudget { .. })
        ));
    }

    #[test]
    fn extraction_is_order_independent() {
        let store = CorrelatorStore::new(Flavor::Baseline);
        let a = IntersectionIndex::new(g(1), vec![0, 1], vec![]);
        let b = IntersectionIndex::new(g(1), vec![1, 0], vec![]);
        assert_eq!(a, b);
        assert_eq!(
            extract_number(&store, 8, &a).unwrap(),
            extract_number(&store, 8, &b).unwrap()
        );
    }

    #[test]
    fn small_table() {
        let store = CorrelatorStore::new(Flavor::Baseline);
        let f = solve_f(4).unwrap();
        let t = tabulate(&store, &f, 4).unwrap();
        assert_eq!(t.disagreements().count(), 0, "{:?}", t.disagreements().collect::<Vec<_>>());
        let first = &t.rows[0];
        assert_eq!(first.index.to_string(), "<tau0 tau0 tau0>_0");
        assert_eq!(first.value, Rational::one());
        assert!(table_to_csv(&t).starts_with("h,interior,boundary,value,provenance\n0,0 0 0,,1,both-agree\n"));
        let empty = tabulate(&store, &f, 0).unwrap();
        assert_eq!(table_to_csv(&empty), "h,interior,boundary,value,provenance\n");
    }
}
