use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use super::{AlgebraError, Rational};

/// Per-term exponent vector, one slot per registered variable.
pub type Exponents = SmallVec<[i32; 8]>;

/// A named variable together with the number of `d(name)` factors it carries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    name: Arc<str>,
    weight: i32,
}

impl Variable {
    pub fn new(name: &str, weight: i32) -> Self {
        Variable {
            name: Arc::from(name),
            weight,
        }
    }

    /// A variable with one attached differential.
    pub fn form(name: &str) -> Self {
        Variable::new(name, 1)
    }

    /// A variable with no attached differential (a parameter or a coefficient variable).
    pub fn scalar(name: &str) -> Self {
        Variable::new(name, 0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }

    pub fn with_weight(&self, weight: i32) -> Self {
        Variable {
            name: self.name.clone(),
            weight,
        }
    }
}

/// Sparse multivariate Laurent polynomial with exact coefficients and an
/// explicit differential weight per variable.
///
/// Terms are keyed by dense exponent vectors over the ordered variable list and
/// iterate in lexicographic order. Zero coefficients are never stored; the zero
/// value is the empty term set over a declared variable list.
#[derive(Clone)]
pub struct LaurentDifferential {
    vars: Vec<Variable>,
    terms: BTreeMap<Exponents, Rational>,
    /// Pairs of variables whose expansion came from a kernel that is singular on
    /// their diagonal. Identifying such a pair is refused by `set_equal`.
    singular: Vec<[Arc<str>; 2]>,
}

type Accumulator = HashMap<Exponents, Rational>;

fn accumulate(acc: &mut Accumulator, exps: Exponents, coef: Rational) {
    use std::collections::hash_map::Entry;
    match acc.entry(exps) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += coef;
        }
        Entry::Vacant(e) => {
            e.insert(coef);
        }
    }
}

fn finish(acc: Accumulator) -> BTreeMap<Exponents, Rational> {
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

impl LaurentDifferential {
    pub fn zero(vars: Vec<Variable>) -> Self {
        LaurentDifferential {
            vars,
            terms: BTreeMap::new(),
            singular: Vec::new(),
        }
    }

    /// The constant `c` with no variables.
    pub fn constant(c: Rational) -> Self {
        Self::from_terms(Vec::new(), [(Exponents::new(), c)])
    }

    pub fn monomial(vars: Vec<Variable>, exps: &[i32], coef: Rational) -> Self {
        assert_eq!(vars.len(), exps.len(), "exponent arity must match variables");
        Self::from_terms(vars, [(Exponents::from_slice(exps), coef)])
    }

    pub fn from_terms<I>(vars: Vec<Variable>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, Rational)>,
    {
        let mut acc = Accumulator::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent arity must match variables");
            accumulate(&mut acc, e, c);
        }
        LaurentDifferential {
            vars,
            terms: finish(acc),
            singular: Vec::new(),
        }
    }

    /// Marks `a`/`b` as a pair whose diagonal is singular for this value.
    pub fn mark_singular_pair(mut self, a: &str, b: &str) -> Self {
        self.singular.push([Arc::from(a), Arc::from(b)]);
        self
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var_names(&self) -> Vec<&str> {
        self.vars.iter().map(Variable::name).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name() == name)
    }

    fn require(&self, name: &str) -> Result<usize, AlgebraError> {
        self.index_of(name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
    }

    /// Differential weight carried by `name`, zero if the variable is absent.
    pub fn weight(&self, name: &str) -> i32 {
        self.index_of(name).map_or(0, |i| self.vars[i].weight())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Reorders variables to `order`, which must be a permutation of the current names.
    pub fn reorder(&self, order: &[&str]) -> Result<Self, AlgebraError> {
        if order.len() != self.vars.len() {
            return Err(self.mismatch(order));
        }
        let perm: Vec<usize> = order
            .iter()
            .map(|n| self.index_of(n).ok_or_else(|| self.mismatch(order)))
            .collect::<Result<_, _>>()?;
        let vars = perm.iter().map(|&i| self.vars[i].clone()).collect();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (perm.iter().map(|&i| e[i]).collect(), c.clone()))
            .collect();
        Ok(LaurentDifferential {
            vars,
            terms,
            singular: self.singular.clone(),
        })
    }

    fn mismatch(&self, other: &[&str]) -> AlgebraError {
        AlgebraError::VariableMismatch {
            left: self.var_names().join(","),
            right: other.join(","),
        }
    }

    /// Re-expresses `self` over `layout`: every current variable must appear in
    /// the layout with the same weight; layout variables absent from `self` are
    /// added with exponent zero and must have weight zero.
    pub fn conform(&self, layout: &[Variable]) -> Result<Self, AlgebraError> {
        let mut slot = Vec::with_capacity(layout.len());
        for v in layout {
            match self.index_of(v.name()) {
                Some(i) => {
                    if self.vars[i].weight() != v.weight() {
                        return Err(AlgebraError::FormDegreeMismatch {
                            variable: v.name().to_string(),
                            left: self.vars[i].weight(),
                            right: v.weight(),
                        });
                    }
                    slot.push(Some(i));
                }
                None => {
                    if v.weight() != 0 {
                        return Err(AlgebraError::FormDegreeMismatch {
                            variable: v.name().to_string(),
                            left: 0,
                            right: v.weight(),
                        });
                    }
                    slot.push(None);
                }
            }
        }
        for v in &self.vars {
            if !layout.iter().any(|l| l.name() == v.name()) {
                return Err(AlgebraError::VariableMismatch {
                    left: self.var_names().join(","),
                    right: layout.iter().map(Variable::name).collect::<Vec<_>>().join(","),
                });
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                (
                    slot.iter().map(|s| s.map_or(0, |i| e[i])).collect(),
                    c.clone(),
                )
            })
            .collect();
        Ok(LaurentDifferential {
            vars: layout.to_vec(),
            terms,
            singular: self.singular.clone(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        let other = self.aligned(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in other.terms {
            use std::collections::btree_map::Entry;
            match terms.entry(e) {
                Entry::Occupied(mut o) => {
                    *o.get_mut() += c;
                    if o.get().is_zero() {
                        o.remove();
                    }
                }
                Entry::Vacant(v) => {
                    v.insert(c);
                }
            }
        }
        let mut singular = self.singular.clone();
        singular.extend(other.singular);
        Ok(LaurentDifferential {
            vars: self.vars.clone(),
            terms,
            singular,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    /// `other` re-expressed in `self`'s variable order, or a structural error.
    fn aligned(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.vars.len() != other.vars.len() {
            return Err(self.mismatch(&other.var_names()));
        }
        for v in &self.vars {
            match other.index_of(v.name()) {
                None => return Err(self.mismatch(&other.var_names())),
                Some(j) if other.vars[j].weight() != v.weight() => {
                    return Err(AlgebraError::FormDegreeMismatch {
                        variable: v.name().to_string(),
                        left: v.weight(),
                        right: other.vars[j].weight(),
                    })
                }
                _ => {}
            }
        }
        if self.vars == other.vars {
            Ok(other.clone())
        } else {
            other.reorder(&self.var_names())
        }
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|c| -c)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return LaurentDifferential::zero(self.vars.clone());
        }
        self.map_coefficients(|c| c * s)
    }

    fn map_coefficients(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        LaurentDifferential {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
            singular: self.singular.clone(),
        }
    }

    /// Exact product. The variable list is the union (left order first) and
    /// differential weights add per variable.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_filtered(other, |_| true)
    }

    /// Product keeping only the terms accepted by `keep`, which sees the
    /// exponent vector over the union layout before any coefficient work.
    pub fn mul_filtered(&self, other: &Self, keep: impl Fn(&[i32]) -> bool) -> Self {
        let mut vars = self.vars.clone();
        let mut map = Vec::with_capacity(other.vars.len());
        for v in &other.vars {
            match vars.iter().position(|u| u.name() == v.name()) {
                Some(i) => {
                    vars[i] = vars[i].with_weight(vars[i].weight() + v.weight());
                    map.push(i);
                }
                None => {
                    vars.push(v.clone());
                    map.push(vars.len() - 1);
                }
            }
        }
        let width = vars.len();
        let mut acc = Accumulator::new();
        let mut e = Exponents::from_elem(0, width);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                e.iter_mut().for_each(|x| *x = 0);
                e[..ea.len()].copy_from_slice(ea);
                for (k, &x) in eb.iter().enumerate() {
                    e[map[k]] += x;
                }
                if keep(&e) {
                    accumulate(&mut acc, e.clone(), ca * cb);
                }
            }
        }
        let mut singular = self.singular.clone();
        singular.extend(other.singular.iter().cloned());
        LaurentDifferential {
            vars,
            terms: finish(acc),
            singular,
        }
    }

    /// Term-wise derivative of the coefficient function; weights are untouched.
    pub fn differentiate(&self, name: &str) -> Result<Self, AlgebraError> {
        let i = self.require(name)?;
        let mut acc = Accumulator::new();
        for (e, c) in &self.terms {
            if e[i] != 0 {
                let mut f = e.clone();
                f[i] -= 1;
                accumulate(&mut acc, f, c * &Rational::from(e[i]));
            }
        }
        Ok(LaurentDifferential {
            vars: self.vars.clone(),
            terms: finish(acc),
            singular: self.singular.clone(),
        })
    }

    /// Identifies every variable in `from` with `to`, summing exponents and weights.
    pub fn set_equal(&self, from: &[&str], to: &str) -> Result<Self, AlgebraError> {
        for f in from {
            self.require(f)?;
        }
        let merged = |n: &str| from.contains(&n) || n == to;
        for [a, b] in &self.singular {
            if a != b && merged(a) && merged(b) {
                return Err(AlgebraError::UnrenormalizedDiagonal {
                    left: a.to_string(),
                    right: b.to_string(),
                });
            }
        }
        let mut vars: Vec<Variable> = Vec::new();
        let mut map = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            let target = if merged(v.name()) { to } else { v.name() };
            match vars.iter().position(|u| u.name() == target) {
                Some(i) => {
                    vars[i] = vars[i].with_weight(vars[i].weight() + v.weight());
                    map.push(i);
                }
                None => {
                    vars.push(Variable::new(target, v.weight()));
                    map.push(vars.len() - 1);
                }
            }
        }
        let mut acc = Accumulator::new();
        for (e, c) in &self.terms {
            let mut f = Exponents::from_elem(0, vars.len());
            for (k, &x) in e.iter().enumerate() {
                f[map[k]] += x;
            }
            accumulate(&mut acc, f, c.clone());
        }
        let rename = |n: &Arc<str>| -> Arc<str> {
            if merged(n) {
                Arc::from(to)
            } else {
                n.clone()
            }
        };
        let singular = self
            .singular
            .iter()
            .map(|[a, b]| [rename(a), rename(b)])
            .filter(|[a, b]| a != b)
            .collect();
        Ok(LaurentDifferential {
            vars,
            terms: finish(acc),
            singular,
        })
    }

    /// Renames variables pairwise. Targets must not collide with untouched variables.
    pub fn rename(&self, pairs: &[(&str, &str)]) -> Result<Self, AlgebraError> {
        let mut vars = self.vars.clone();
        for (from, to) in pairs {
            let i = self.require(from)?;
            vars[i] = Variable::new(to, self.vars[i].weight());
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|u| u.name() == v.name()) {
                return Err(AlgebraError::RenameCollision(v.name().to_string()));
            }
        }
        let lookup = |n: &Arc<str>| -> Arc<str> {
            pairs
                .iter()
                .find(|(f, _)| **f == **n)
                .map_or_else(|| n.clone(), |(_, t)| Arc::from(*t))
        };
        Ok(LaurentDifferential {
            vars,
            terms: self.terms.clone(),
            singular: self
                .singular
                .iter()
                .map(|[a, b]| [lookup(a), lookup(b)])
                .collect(),
        })
    }

    /// Exact coefficient at `exps` (zero when absent).
    pub fn coefficient(&self, exps: &[i32]) -> Result<Rational, AlgebraError> {
        if exps.len() != self.vars.len() {
            return Err(AlgebraError::ArityMismatch {
                expected: self.vars.len(),
                found: exps.len(),
            });
        }
        Ok(self.terms.get(exps).cloned().unwrap_or_else(Rational::zero))
    }

    /// Coefficient of `name^{-1} d(name)`, with `name` removed from the variable list.
    pub fn residue_at_zero(&self, name: &str) -> Result<Self, AlgebraError> {
        let i = self.require(name)?;
        let weight = self.vars[i].weight();
        if weight != 1 {
            return Err(AlgebraError::ResidueWeight {
                variable: name.to_string(),
                weight,
            });
        }
        let vars = self
            .vars
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, v)| v.clone())
            .collect();
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[i] == -1)
            .map(|(e, c)| {
                let f: Exponents = e
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i)
                    .map(|(_, &x)| x)
                    .collect();
                (f, c.clone())
            })
            .collect();
        Ok(LaurentDifferential {
            vars,
            terms,
            singular: self
                .singular
                .iter()
                .filter(|[a, b]| **a != *name && **b != *name)
                .cloned()
                .collect(),
        })
    }

    /// Multiplies by `name^exp` and adds `dweight` differentials of `name`.
    /// The variable is appended if absent.
    pub fn shift(&self, name: &str, exp: i32, dweight: i32) -> Self {
        let mut out = self.clone();
        let i = match out.index_of(name) {
            Some(i) => i,
            None => {
                out.vars.push(Variable::new(name, 0));
                out.terms = out
                    .terms
                    .into_iter()
                    .map(|(mut e, c)| {
                        e.push(0);
                        (e, c)
                    })
                    .collect();
                out.vars.len() - 1
            }
        };
        out.vars[i] = out.vars[i].with_weight(out.vars[i].weight() + dweight);
        if exp != 0 {
            out.terms = out
                .terms
                .into_iter()
                .map(|(mut e, c)| {
                    e[i] += exp;
                    (e, c)
                })
                .collect();
        }
        out
    }

    /// Evaluates the variable `name` at `value`, removing it from the variable list.
    /// Its differential weight must be zero.
    pub fn substitute(&self, name: &str, value: &Rational) -> Result<Self, AlgebraError> {
        let i = self.require(name)?;
        if self.vars[i].weight() != 0 {
            return Err(AlgebraError::FormDegreeMismatch {
                variable: name.to_string(),
                left: self.vars[i].weight(),
                right: 0,
            });
        }
        if value.is_zero() && self.terms.keys().any(|e| e[i] < 0) {
            return Err(AlgebraError::ZeroDenominator);
        }
        let mut acc = Accumulator::new();
        for (e, c) in &self.terms {
            let f: Exponents = e
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, &x)| x)
                .collect();
            accumulate(&mut acc, f, c * &value.pow(e[i]));
        }
        let vars = self
            .vars
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, v)| v.clone())
            .collect();
        Ok(LaurentDifferential {
            vars,
            terms: finish(acc),
            singular: self.singular.clone(),
        })
    }

    /// Keeps the terms for which `keep` returns true.
    pub fn filter(&self, keep: impl Fn(&[i32], &Rational) -> bool) -> Self {
        LaurentDifferential {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, c)| keep(e, c))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
            singular: self.singular.clone(),
        }
    }

    /// Largest and smallest exponent of `name` over all terms.
    pub fn exponent_range(&self, name: &str) -> Option<(i32, i32)> {
        let i = self.index_of(name)?;
        let mut it = self.terms.keys().map(|e| e[i]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
    }
}

impl PartialEq for LaurentDifferential {
    fn eq(&self, other: &Self) -> bool {
        match self.aligned(other) {
            Ok(o) => o.terms == self.terms,
            Err(_) => false,
        }
    }
}

impl fmt::Display for LaurentDifferential {
    /// Canonical rendering: lexicographic term order, coefficients as `p/q`,
    /// e.g. `-1/3 * z0^-3 w^-2 dz0 dw^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let diffs: Vec<String> = self
            .vars
            .iter()
            .filter(|v| v.weight() != 0)
            .map(|v| match v.weight() {
                1 => format!("d{}", v.name()),
                w => format!("d{}^{}", v.name(), w),
            })
            .collect();
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = self
                .vars
                .iter()
                .zip(e.iter())
                .filter(|(_, &x)| x != 0)
                .map(|(v, &x)| match x {
                    1 => v.name().to_string(),
                    x => format!("{}^{}", v.name(), x),
                })
                .collect();
            factors.extend(diffs.iter().cloned());
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c} * {}", factors.join(" "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.var_names().join(","), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn one_var(name: &str, weight: i32, terms: &[(i32, Rational)]) -> LaurentDifferential {
        LaurentDifferential::from_terms(
            vec![Variable::new(name, weight)],
            terms
                .iter()
                .map(|(e, c)| (Exponents::from_slice(&[*e]), c.clone())),
        )
    }

    #[test]
    fn add_examples() {
        let a = one_var("z", 1, &[(-2, q(1, 1))]);
        assert!(a.add(&a.neg()).unwrap().is_zero());

        let b = one_var("z", 1, &[(-1, q(1, 1))]);
        let c = one_var("z", 1, &[(-3, q(1, 1))]);
        let s = b.add(&c).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_string(), "1 * z^-3 dz + 1 * z^-1 dz");

        let d = one_var("z", 1, &[(-7, q(3, 4))]);
        let e = one_var("z", 1, &[(-7, q(1, 4))]);
        assert_eq!(d.add(&e).unwrap(), one_var("z", 1, &[(-7, q(1, 1))]));
    }

    #[test]
    fn add_rejects_mismatches() {
        let a = one_var("z", 1, &[(-2, q(1, 1))]);
        let b = one_var("w", 1, &[(-2, q(1, 1))]);
        assert!(matches!(a.add(&b), Err(AlgebraError::VariableMismatch { .. })));
        let c = one_var("z", 2, &[(-2, q(1, 1))]);
        assert!(matches!(a.add(&c), Err(AlgebraError::FormDegreeMismatch { .. })));
    }

    #[test]
    fn mul_examples() {
        let a = one_var("z", 1, &[(-1, q(1, 1))]);
        assert_eq!(a.mul(&a), one_var("z", 2, &[(-2, q(1, 1))]));

        let b = one_var("w", 1, &[(-2, q(1, 1))]);
        let c = one_var("w", 1, &[(2, q(-1, 1))]);
        let p = b.mul(&c);
        assert_eq!(p, one_var("w", 2, &[(0, q(-1, 1))]));
        assert_eq!(p.to_string(), "-1 * dw^2");

        let d = one_var("z1", 1, &[(-2, q(1, 1))]);
        let e = one_var("z2", 1, &[(-3, q(1, 1))]);
        let p = d.mul(&e);
        assert_eq!(p.coefficient(&[-2, -3]).unwrap(), q(1, 1));
        assert_eq!(p.to_string(), "1 * z1^-2 z2^-3 dz1 dz2");
    }

    #[test]
    fn differentiate_examples() {
        let a = one_var("z", 1, &[(-1, q(1, 1))]);
        assert_eq!(
            a.differentiate("z").unwrap(),
            one_var("z", 1, &[(-2, q(-1, 1))])
        );
        let b = one_var("z", 1, &[(2, q(1, 1))]);
        assert_eq!(
            b.differentiate("z").unwrap(),
            one_var("z", 1, &[(1, q(2, 1))])
        );
        let c = one_var("z", 1, &[(0, q(5, 1))]);
        assert!(c.differentiate("z").unwrap().is_zero());
        assert!(matches!(
            c.differentiate("w"),
            Err(AlgebraError::UnknownVariable(_))
        ));
    }

    #[test]
    fn set_equal_examples() {
        let vars = vec![Variable::form("w1"), Variable::form("w2")];
        let a = LaurentDifferential::monomial(vars, &[-2, -3], q(1, 1));
        let d = a.set_equal(&["w1", "w2"], "w").unwrap();
        assert_eq!(d, one_var("w", 2, &[(-5, q(1, 1))]));

        let vars = vec![Variable::form("w1"), Variable::form("w2"), Variable::form("w3")];
        let b = LaurentDifferential::monomial(vars, &[-1, -1, -1], q(1, 1));
        let d = b.set_equal(&["w1", "w2", "w3"], "w").unwrap();
        assert_eq!(d, one_var("w", 3, &[(-3, q(1, 1))]));

        let singular = LaurentDifferential::monomial(
            vec![Variable::form("w1"), Variable::form("w2")],
            &[0, -2],
            q(1, 1),
        )
        .mark_singular_pair("w1", "w2");
        assert!(matches!(
            singular.set_equal(&["w1", "w2"], "w"),
            Err(AlgebraError::UnrenormalizedDiagonal { .. })
        ));
        // identifying only one side of the pair with a fresh name is fine
        assert!(singular.set_equal(&["w1"], "v").is_ok());
    }

    #[test]
    fn coefficient_examples() {
        let a = one_var("z", 1, &[(-4, q(1, 1))]);
        assert_eq!(a.coefficient(&[-4]).unwrap(), q(1, 1));
        assert_eq!(a.coefficient(&[-3]).unwrap(), q(0, 1));
        assert!(a.coefficient(&[-3, 1]).is_err());
    }

    #[test]
    fn residue_examples() {
        let a = one_var("w", 1, &[(-1, q(1, 1))]);
        let r = a.residue_at_zero("w").unwrap();
        assert_eq!(r, LaurentDifferential::constant(q(1, 1)));
        let b = one_var("w", 1, &[(-2, q(1, 1))]);
        assert!(b.residue_at_zero("w").unwrap().is_zero());
        let c = LaurentDifferential::monomial(
            vec![Variable::form("z0"), Variable::form("w")],
            &[-4, -1],
            q(1, 1),
        );
        assert_eq!(
            c.residue_at_zero("w").unwrap(),
            one_var("z0", 1, &[(-4, q(1, 1))])
        );
        let d = one_var("w", 2, &[(-1, q(1, 1))]);
        assert!(matches!(
            d.residue_at_zero("w"),
            Err(AlgebraError::ResidueWeight { .. })
        ));
    }

    #[test]
    fn canonical_rendering() {
        let a = LaurentDifferential::monomial(
            vec![Variable::form("z0"), Variable::new("w", 2)],
            &[-3, -2],
            q(-1, 3),
        );
        assert_eq!(a.to_string(), "-1/3 * z0^-3 w^-2 dz0 dw^2");
        assert_eq!(LaurentDifferential::zero(vec![]).to_string(), "0");
    }

    #[test]
    fn substitute_and_shift() {
        let vars = vec![Variable::form("z"), Variable::scalar("Q")];
        let a = LaurentDifferential::from_terms(
            vars,
            [
                (Exponents::from_slice(&[-1, 1]), q(2, 1)),
                (Exponents::from_slice(&[-1, 2]), q(-1, 1)),
            ],
        );
        let s = a.substitute("Q", &q(1, 1)).unwrap();
        assert_eq!(s, one_var("z", 1, &[(-1, q(1, 1))]));
        let t = s.shift("z", -1, 1);
        assert_eq!(t, one_var("z", 2, &[(-2, q(1, 1))]));
    }
}
