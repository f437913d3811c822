//! Normal-ordered differential operators built from the modes
//! `J_k = d/dt_k (k > 0)`, `J_0 = 0`, `J_{-a} = a t_a`, with `u = 1`.

use std::collections::{BTreeMap, HashMap};

use smallvec::SmallVec;

use super::tpoly::{TMonomial, TPoly};
use crate::algebra::Rational;

type Indices = SmallVec<[u32; 3]>;

/// `coef * prod t_{mults} * prod d/dt_{derivs}`; the mode factors `a` of
/// `J_{-a}` are already folded into `coef`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpTerm {
    pub coef: Rational,
    pub mults: TMonomial,
    pub derivs: TMonomial,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Operator {
    terms: BTreeMap<(TMonomial, TMonomial), Rational>,
}

impl Operator {
    pub fn zero() -> Self {
        Operator::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut op = Operator::zero();
        op.push(c, &[]);
        op
    }

    /// Adds `c * :J_{m1} J_{m2} ...:`.
    pub fn push(&mut self, c: Rational, modes: &[i64]) {
        if c.is_zero() || modes.contains(&0) {
            return;
        }
        let mut coef = c;
        let mut mults = Indices::new();
        let mut derivs = Indices::new();
        for &m in modes {
            if m > 0 {
                derivs.push(m as u32);
            } else {
                mults.push((-m) as u32);
                coef = coef * Rational::from(-m);
            }
        }
        let key = (TMonomial::from_indices(&mults), TMonomial::from_indices(&derivs));
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = OpTerm> + '_ {
        self.terms.iter().map(|((m, d), c)| OpTerm {
            coef: c.clone(),
            mults: m.clone(),
            derivs: d.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_scaled(&mut self, other: &Operator, s: &Rational) {
        for (key, c) in &other.terms {
            let e = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
            *e += c * s;
            if e.is_zero() {
                self.terms.remove(key);
            }
        }
    }

    pub fn plus(mut self, other: &Operator, s: i64) -> Operator {
        self.add_scaled(other, &Rational::from(s));
        self
    }

    /// `J_k`.
    pub fn j(k: i64) -> Operator {
        let mut op = Operator::zero();
        op.push(Rational::one(), &[k]);
        op
    }

    /// `L_m = 1/2 sum_{a+b=m} :J_a J_b:`, keeping derivatives up to `t_d`.
    pub fn l(m: i64, d: u32) -> Operator {
        let d = d as i64;
        let half = Rational::new(1, 2);
        let mut op = Operator::zero();
        for a in (m - d)..=d {
            let b = m - a;
            if b <= d {
                op.push(half.clone(), &[a, b]);
            }
        }
        op
    }

    /// `M_m = 1/3 sum_{a+b+c=m} :J_a J_b J_c:`, keeping derivatives up to `t_d`.
    pub fn m(m: i64, d: u32) -> Operator {
        let d = d as i64;
        let third = Rational::new(1, 3);
        let mut op = Operator::zero();
        for a in (m - 2 * d)..=d {
            for b in (m - 2 * d)..=d {
                let c = m - a - b;
                if c <= d {
                    op.push(third.clone(), &[a, b, c]);
                }
            }
        }
        op
    }

    /// `L^_k = L_{2k} + (k+2) J_{2k} + 13/8 delta_{k,0} - J_{2k+3}`.
    pub fn l_hat(k: i64, d: u32) -> Operator {
        let mut op = Operator::l(2 * k, d);
        op.push(Rational::from(k + 2), &[2 * k]);
        if k == 0 {
            op.push(Rational::new(13, 8), &[]);
        }
        op.push(-Rational::one(), &[2 * k + 3]);
        op
    }

    /// `M^_k = -M_{2k} + 2(L_{2k+3} - L_{2k}) + 2 J_{2k+3}
    ///        + (2/3 k^2 + 2k + 1/12) J_{2k} + 3/4 delta_{k,0} - J_{2k+6}`.
    pub fn m_hat(k: i64, d: u32) -> Operator {
        let mut op = Operator::zero();
        op.add_scaled(&Operator::m(2 * k, d), &-Rational::one());
        op.add_scaled(&Operator::l(2 * k + 3, d), &Rational::from(2));
        op.add_scaled(&Operator::l(2 * k, d), &Rational::from(-2));
        op.push(Rational::from(2), &[2 * k + 3]);
        let c = Rational::new(2, 3) * Rational::from(k * k) + Rational::from(2 * k) + Rational::new(1, 12);
        op.push(c, &[2 * k]);
        if k == 0 {
            op.push(Rational::new(3, 4), &[]);
        }
        op.push(-Rational::one(), &[2 * k + 6]);
        op
    }

    /// `M^o_k = -M^_k + 2(k+2) L^_k`.
    pub fn m_hat_o(k: i64, d: u32) -> Operator {
        let mut op = Operator::zero();
        op.add_scaled(&Operator::m_hat(k, d), &-Rational::one());
        op.add_scaled(&Operator::l_hat(k, d), &Rational::from(2 * (k + 2)));
        op
    }

    /// The constraint whose leading term is `-J_j`: `L^_{(j-3)/2}` for odd `j`,
    /// `M^_{(j-6)/2}` for even `j`.
    pub fn constraint_for_mode(j: u32, d: u32) -> Operator {
        let j = j as i64;
        if j % 2 == 1 {
            Operator::l_hat((j - 3) / 2, d)
        } else {
            Operator::m_hat((j - 6) / 2, d)
        }
    }

    /// Removes the `c * d/dt_j` term.
    pub fn without_derivative(&self, j: u32) -> Operator {
        let mut out = self.clone();
        out.terms
            .remove(&(TMonomial::one(), TMonomial::from_indices(&[j])));
        out
    }

    /// Plain action on a polynomial.
    pub fn apply(&self, p: &TPoly) -> TPoly {
        let mut out = TPoly::zero();
        for ((mults, derivs), c) in &self.terms {
            let mut q = p.clone();
            for &k in derivs.indices() {
                q = q.derivative(k);
                if q.is_zero() {
                    break;
                }
            }
            if !q.is_zero() {
                out.add_scaled(&q.times_monomial(mults), c);
            }
        }
        out
    }

    /// `e^{-F} (this) e^F`, keeping only monomials accepted by `keep`.
    pub fn apply_exp(&self, f: &TPoly, keep: impl FnMut(&TMonomial) -> bool) -> TPoly {
        let mut cache = ExpCache::new(f);
        self.apply_exp_cached(&mut cache, keep)
    }

    pub fn apply_exp_cached(&self, cache: &mut ExpCache<'_>, mut keep: impl FnMut(&TMonomial) -> bool) -> TPoly {
        let mut out = TPoly::zero();
        for ((mults, derivs), c) in &self.terms {
            let e = cache.get(derivs);
            for (m, ec) in e.terms() {
                let full = m.times(mults);
                if keep(&full) {
                    out.add_term(full, ec * c);
                }
            }
        }
        out
    }
}

/// Memo of `E_S = e^{-F} d_S e^F`, via `E_{S+j} = d_j E_S + F_j E_S`.
pub struct ExpCache<'f> {
    f: &'f TPoly,
    firsts: HashMap<u32, TPoly>,
    memo: HashMap<TMonomial, TPoly>,
}

impl<'f> ExpCache<'f> {
    pub fn new(f: &'f TPoly) -> Self {
        ExpCache {
            f,
            firsts: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    fn first(&mut self, j: u32) -> TPoly {
        let f = self.f;
        self.firsts.entry(j).or_insert_with(|| f.derivative(j)).clone()
    }

    pub fn get(&mut self, s: &TMonomial) -> TPoly {
        if s.degree() == 0 {
            return TPoly::constant(Rational::one());
        }
        if let Some(p) = self.memo.get(s) {
            return p.clone();
        }
        let j = s.max_index();
        let rest = s.without(j).expect("nonempty");
        let er = self.get(&rest);
        let fj = self.first(j);
        let out = er.derivative(j).add(&fj.mul(&er));
        self.memo.insert(s.clone(), out.clone());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(ix: &[u32]) -> TPoly {
        TPoly::monomial(TMonomial::from_indices(ix), Rational::one())
    }

    #[test]
    fn modes() {
        assert!(Operator::j(0).is_empty());
        let jm1 = Operator::j(-1);
        assert_eq!(jm1.apply(&TPoly::constant(Rational::one())), mono(&[1]));
        let jm3 = Operator::j(-3);
        assert_eq!(
            jm3.apply(&TPoly::constant(Rational::one())),
            mono(&[3]).scale(&Rational::from(3))
        );
        assert_eq!(Operator::j(3).apply(&mono(&[3])), TPoly::constant(Rational::one()));
    }

    #[test]
    fn l_minus_two_is_half_t1_squared() {
        let l = Operator::l(-2, 5);
        assert_eq!(
            l.apply(&TPoly::constant(Rational::one())),
            mono(&[1, 1]).scale(&Rational::new(1, 2))
        );
    }

    #[test]
    fn sentinels_on_trivial_free_energy() {
        let zero = TPoly::zero();
        let l0 = Operator::l_hat(0, 8).apply_exp(&zero, |_| true);
        assert_eq!(l0, TPoly::constant(Rational::new(13, 8)));
        let l1 = Operator::l_hat(1, 8).apply_exp(&zero, |_| true);
        assert!(l1.is_zero());
        let m0 = Operator::m_hat(0, 8).apply_exp(&zero, |_| true);
        assert_eq!(m0, TPoly::constant(Rational::new(3, 4)));
    }

    #[test]
    fn exp_action_matches_direct_derivatives() {
        // e^{-F} d1 d1 e^F = F_11 + F_1^2 for F = t1^3/6 + t2
        let f = mono(&[1, 1, 1]).scale(&Rational::new(1, 6)).add(&mono(&[2]));
        let mut cache = ExpCache::new(&f);
        let e = cache.get(&TMonomial::from_indices(&[1, 1]));
        let f1 = f.derivative(1);
        let expect = f1.derivative(1).add(&f1.mul(&f1));
        assert_eq!(e, expect);
        let e12 = cache.get(&TMonomial::from_indices(&[1, 2]));
        assert_eq!(e12, f1.mul(&f.derivative(2)));
    }
}
