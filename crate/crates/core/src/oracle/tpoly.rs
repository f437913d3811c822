//! Sparse polynomials in the times `t_1, t_2, ...`.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::algebra::Rational;

/// Multiset of time indices, kept sorted: `[1, 1, 3]` is `t_1^2 t_3`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TMonomial(SmallVec<[u32; 8]>);

impl TMonomial {
    pub fn one() -> Self {
        TMonomial(SmallVec::new())
    }

    pub fn from_indices(indices: &[u32]) -> Self {
        assert!(indices.iter().all(|&k| k > 0), "time indices start at 1");
        let mut v: SmallVec<[u32; 8]> = SmallVec::from_slice(indices);
        v.sort_unstable();
        TMonomial(v)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// `sum k_i`.
    pub fn weight(&self) -> i64 {
        self.0.iter().map(|&k| k as i64).sum()
    }

    pub fn multiplicity(&self, k: u32) -> usize {
        self.0.iter().filter(|&&x| x == k).count()
    }

    pub fn max_index(&self) -> u32 {
        self.0.last().copied().unwrap_or(0)
    }

    pub fn times(&self, other: &TMonomial) -> TMonomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        TMonomial(v)
    }

    pub fn with(&self, k: u32) -> TMonomial {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&x| x <= k);
        v.insert(pos, k);
        TMonomial(v)
    }

    /// Removes one factor `t_k`, if present.
    pub fn without(&self, k: u32) -> Option<TMonomial> {
        let pos = self.0.iter().position(|&x| x == k)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(TMonomial(v))
    }

    /// `prod_k m_k!` over the multiplicities `m_k`.
    pub fn symmetry_factor(&self) -> Rational {
        let mut out = Rational::one();
        let mut i = 0;
        while i < self.0.len() {
            let j = self.0[i..].iter().take_while(|&&x| x == self.0[i]).count();
            out = out * crate::algebra::factorial(j as u32);
            i += j;
        }
        out
    }
}

impl fmt::Display for TMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let mut i = 0;
        let mut first = true;
        while i < self.0.len() {
            let k = self.0[i];
            let m = self.multiplicity(k);
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if m == 1 {
                write!(f, "t{k}")?;
            } else {
                write!(f, "t{k}^{m}")?;
            }
            i += m;
        }
        Ok(())
    }
}

impl fmt::Debug for TMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Exact polynomial in the times with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TPoly(BTreeMap<TMonomial, Rational>);

impl TPoly {
    pub fn zero() -> Self {
        TPoly(BTreeMap::new())
    }

    pub fn constant(c: Rational) -> Self {
        TPoly::monomial(TMonomial::one(), c)
    }

    pub fn monomial(m: TMonomial, c: Rational) -> Self {
        let mut p = TPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TMonomial, &Rational)> {
        self.0.iter()
    }

    pub fn coefficient(&self, m: &TMonomial) -> Rational {
        self.0.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: TMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(m) {
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

    pub fn add_scaled(&mut self, other: &TPoly, s: &Rational) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.0 {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn add(&self, other: &TPoly) -> TPoly {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one());
        out
    }

    pub fn sub(&self, other: &TPoly) -> TPoly {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn scale(&self, s: &Rational) -> TPoly {
        let mut out = TPoly::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn mul(&self, other: &TPoly) -> TPoly {
        self.mul_filtered(other, |_| true)
    }

    pub fn mul_filtered(&self, other: &TPoly, keep: impl Fn(&TMonomial) -> bool) -> TPoly {
        let mut out = TPoly::zero();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                let m = a.times(b);
                if keep(&m) {
                    out.add_term(m, ca * cb);
                }
            }
        }
        out
    }

    /// Multiplies every term by `t_{mults}` (no coefficients).
    pub fn times_monomial(&self, m: &TMonomial) -> TPoly {
        TPoly(self.0.iter().map(|(a, c)| (a.times(m), c.clone())).collect())
    }

    pub fn derivative(&self, k: u32) -> TPoly {
        let mut out = TPoly::zero();
        for (m, c) in &self.0 {
            let mult = m.multiplicity(k);
            if mult > 0 {
                out.add_term(
                    m.without(k).expect("present"),
                    c * &Rational::from(mult as i64),
                );
            }
        }
        out
    }

    pub fn filter(&self, keep: impl Fn(&TMonomial, &Rational) -> bool) -> TPoly {
        TPoly(
            self.0
                .iter()
                .filter(|(m, c)| keep(m, c))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        )
    }

    pub fn max_index(&self) -> u32 {
        self.0.keys().map(TMonomial::max_index).max().unwrap_or(0)
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c} * {m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_basics() {
        let m = TMonomial::from_indices(&[3, 1, 1]);
        assert_eq!(m.indices(), &[1, 1, 3]);
        assert_eq!(m.to_string(), "t1^2 t3");
        assert_eq!(m.weight(), 5);
        assert_eq!(m.symmetry_factor(), Rational::from(2));
        assert_eq!(m.with(2).indices(), &[1, 1, 2, 3]);
        assert_eq!(m.without(1).unwrap().indices(), &[1, 3]);
        assert!(m.without(2).is_none());
    }

    #[test]
    fn derivative_and_product() {
        let p = TPoly::monomial(TMonomial::from_indices(&[1, 1, 1]), Rational::new(1, 6));
        let d = p.derivative(1);
        assert_eq!(d.to_string(), "1/2 * t1^2");
        let q = d.mul(&TPoly::monomial(TMonomial::from_indices(&[2]), Rational::from(2)));
        assert_eq!(q.to_string(), "1 * t1^2 t2");
        assert!(q.sub(&q).is_zero());
    }
}
