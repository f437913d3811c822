//! Residue integrands for one step of the recursion.

use std::sync::Arc;

use rayon::prelude::*;

use super::kernel::{apply_d1, apply_d2, bergman_expansion, tilde_w02_diagonal, INTEGRATION_VAR};
use super::{Flavor, RecursionError, Q_VAR};
use crate::algebra::{LaurentDifferential, Rational, Variable};
use crate::key::CorrelatorKey;

/// Read access to already computed correlators.
pub trait CorrelatorSource: Sync {
    fn flavor(&self) -> Flavor;
    /// Stable correlator in canonical variables `z1..zn` (plus `Q` when graded).
    fn lookup(&self, key: CorrelatorKey) -> Option<Arc<LaurentDifferential>>;
}

/// Name of the `i`-th spectator variable of the target.
pub(crate) fn spectator(i: usize) -> String {
    format!("z{}", i + 1)
}

/// Variables an integrand for `key` lives on: `z1..zn`, `w` with weight `j`, optionally `Q`.
pub(crate) fn integrand_layout(n: usize, j: i32, flavor: Flavor) -> Vec<Variable> {
    let mut vars: Vec<Variable> = (0..n).map(|i| Variable::form(&spectator(i))).collect();
    vars.push(Variable::new(INTEGRATION_VAR, j));
    if flavor == Flavor::QGraded {
        vars.push(Variable::scalar(Q_VAR));
    }
    vars
}

/// Largest single pole order in any variable of `W_{key}`.
pub(crate) fn pole_cap(key: CorrelatorKey) -> i64 {
    key.total_pole_order() - 2 * (key.n as i64 - 1)
}

struct Assembler<'a, S: CorrelatorSource + ?Sized> {
    source: &'a S,
    target: CorrelatorKey,
    bergman_order: u32,
    flavor: Flavor,
}

impl<'a, S: CorrelatorSource + ?Sized> Assembler<'a, S> {
    fn new(source: &'a S, target: CorrelatorKey, order: u32) -> Self {
        let cap = pole_cap(target).max(2) as u32;
        Assembler {
            source,
            target,
            bergman_order: order.min(cap - 1),
            flavor: source.flavor(),
        }
    }

    fn spectators(&self) -> usize {
        self.target.n as usize - 1
    }

    fn q_power(&self, p: i32) -> LaurentDifferential {
        LaurentDifferential::monomial(vec![Variable::scalar(Q_VAR)], &[p], Rational::one())
    }

    /// `W_{twice/2, |slots|}` with its variables renamed to `slots`; `None` when the
    /// genus is negative. The Bergman kernel is returned expanded with `slots[0]` small.
    fn factor(&self, twice: i64, slots: &[&str]) -> Result<Option<LaurentDifferential>, RecursionError> {
        if twice < 0 || slots.is_empty() {
            return Ok(None);
        }
        let key = CorrelatorKey::new(twice as u32, slots.len() as u32);
        let v = slots[0];
        let value = match (key.twice_genus(), key.n) {
            (0, 1) => LaurentDifferential::monomial(vec![Variable::form(v)], &[2], -Rational::one()),
            (1, 1) => {
                let base = LaurentDifferential::monomial(vec![Variable::form(v)], &[-1], Rational::one());
                match self.flavor {
                    Flavor::Baseline => base,
                    Flavor::QGraded => base.mul(&self.q_power(1)),
                }
            }
            (0, 2) => bergman_expansion(v, slots[1], self.bergman_order),
            _ => {
                let stored = self
                    .source
                    .lookup(key)
                    .ok_or(RecursionError::MissingDependency {
                        target: self.target,
                        missing: key,
                    })?;
                let names: Vec<String> = (0..slots.len()).map(spectator).collect();
                let pairs: Vec<(&str, &str)> = names
                    .iter()
                    .map(String::as_str)
                    .zip(slots.iter().copied())
                    .collect();
                stored.rename(&pairs)?
            }
        };
        Ok(Some(value))
    }

    /// `W~_{twice/2, 2 + |rest|}(w, w, rest)`, renormalized on the `(0,2)` diagonal.
    fn diagonal2(&self, twice: i64, rest: &[&str]) -> Result<Option<LaurentDifferential>, RecursionError> {
        if twice < 0 {
            return Ok(None);
        }
        if twice == 0 && rest.is_empty() {
            return Ok(Some(tilde_w02_diagonal(INTEGRATION_VAR)));
        }
        let mut slots = vec!["w#a", "w#b"];
        slots.extend_from_slice(rest);
        match self.factor(twice, &slots)? {
            Some(f) => Ok(Some(f.set_equal(&["w#a", "w#b"], INTEGRATION_VAR)?)),
            None => Ok(None),
        }
    }

    /// `W_{twice/2, 3 + |rest|}(w, w, w, rest)`.
    fn diagonal3(&self, twice: i64, rest: &[&str]) -> Result<Option<LaurentDifferential>, RecursionError> {
        let mut slots = vec!["w#a", "w#b", "w#c"];
        slots.extend_from_slice(rest);
        match self.factor(twice, &slots)? {
            Some(f) => Ok(Some(f.set_equal(&["w#a", "w#b", "w#c"], INTEGRATION_VAR)?)),
            None => Ok(None),
        }
    }

    /// `W_{twice/2, 1 + |rest|}(w, rest)` unless it is the target itself.
    fn single(&self, twice: i64, rest: &[&str]) -> Result<Option<LaurentDifferential>, RecursionError> {
        if twice == self.target.twice_genus() as i64 && rest.len() + 1 == self.target.n as usize {
            return Ok(None);
        }
        let mut slots = vec![INTEGRATION_VAR];
        slots.extend_from_slice(rest);
        self.factor(twice, &slots)
    }

    fn sum(&self, parts: Vec<LaurentDifferential>, j: i32) -> Result<LaurentDifferential, RecursionError> {
        let layout = integrand_layout(self.spectators(), j, self.flavor);
        let mut acc = LaurentDifferential::zero(layout.clone());
        for p in parts {
            acc = acc.add(&p.conform(&layout)?)?;
        }
        Ok(acc)
    }

    fn r2(&self) -> Result<LaurentDifferential, RecursionError> {
        let n = self.spectators();
        let names: Vec<String> = (0..n).map(spectator).collect();
        let zs: Vec<&str> = names.iter().map(String::as_str).collect();
        let twice = self.target.twice_genus() as i64;

        let mut jobs: Vec<(i64, u64)> = Vec::new();
        for g1 in 0..=twice {
            for mask in 0..(1u64 << n) {
                jobs.push((g1, mask));
            }
        }
        let pieces = jobs
            .par_iter()
            .map(|&(g1, mask)| -> Result<Option<LaurentDifferential>, RecursionError> {
                let (z1, z2) = split2(&zs, mask);
                let (Some(a), Some(b)) = (self.single(g1, &z1)?, self.single(twice - g1, &z2)?) else {
                    return Ok(None);
                };
                Ok(Some(a.mul(&b)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut parts: Vec<LaurentDifferential> = pieces.into_iter().flatten().collect();
        if let Some(d) = self.diagonal2(twice - 2, &zs)? {
            parts.push(d);
        }
        self.sum(parts, 2)
    }

    fn r3(&self) -> Result<LaurentDifferential, RecursionError> {
        let n = self.spectators();
        let names: Vec<String> = (0..n).map(spectator).collect();
        let zs: Vec<&str> = names.iter().map(String::as_str).collect();
        let twice = self.target.twice_genus() as i64;
        let three = Rational::from(3);

        let mut parts = Vec::new();
        if let Some(d) = self.diagonal3(twice - 4, &zs)? {
            parts.push(d);
        }

        let mixed: Vec<(i64, u64)> = (0..=twice - 2)
            .flat_map(|g1| (0..(1u64 << n)).map(move |m| (g1, m)))
            .collect();
        let mixed_parts = mixed
            .par_iter()
            .map(|&(g1, mask)| -> Result<Option<LaurentDifferential>, RecursionError> {
                let (z1, z2) = split2(&zs, mask);
                let (Some(a), Some(b)) = (self.single(g1, &z1)?, self.diagonal2(twice - 2 - g1, &z2)?) else {
                    return Ok(None);
                };
                Ok(Some(a.mul(&b).scale(&three)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        parts.extend(mixed_parts.into_iter().flatten());

        let mut triples: Vec<(i64, i64, u64)> = Vec::new();
        for g1 in 0..=twice {
            for g2 in 0..=twice - g1 {
                for a in 0..3u64.pow(n as u32) {
                    triples.push((g1, g2, a));
                }
            }
        }
        let triple_parts = triples
            .par_iter()
            .map(|&(g1, g2, assign)| -> Result<Option<LaurentDifferential>, RecursionError> {
                let groups = split3(&zs, assign);
                let genera = [g1, g2, twice - g1 - g2];
                let mut product: Option<LaurentDifferential> = None;
                for (g, z) in genera.iter().zip(groups.iter()) {
                    let Some(f) = self.single(*g, z)? else {
                        return Ok(None);
                    };
                    product = Some(match product {
                        None => f,
                        Some(p) => p.mul(&f),
                    });
                }
                Ok(product)
            })
            .collect::<Result<Vec<_>, _>>()?;
        parts.extend(triple_parts.into_iter().flatten());
        self.sum(parts, 3)
    }

    /// `D_j W_{g - j/2, n+1}(w, z)`, graded by `Q^j` in the refined flavor.
    fn d_term(&self, j: i32) -> Result<Option<LaurentDifferential>, RecursionError> {
        let n = self.spectators();
        let names: Vec<String> = (0..n).map(spectator).collect();
        let mut slots = vec![INTEGRATION_VAR];
        slots.extend(names.iter().map(String::as_str));
        let Some(w) = self.factor(self.target.twice_genus() as i64 - j as i64, &slots)? else {
            return Ok(None);
        };
        let mut d = if j == 1 {
            apply_d1(&w, INTEGRATION_VAR)?
        } else {
            apply_d2(&w, INTEGRATION_VAR)?
        };
        if self.flavor == Flavor::QGraded {
            d = d.mul(&self.q_power(j));
        }
        Ok(Some(d))
    }
}

fn split2<'s>(zs: &[&'s str], mask: u64) -> (Vec<&'s str>, Vec<&'s str>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, z) in zs.iter().enumerate() {
        if mask >> i & 1 == 1 {
            a.push(*z);
        } else {
            b.push(*z);
        }
    }
    (a, b)
}

fn split3<'s>(zs: &[&'s str], mut assign: u64) -> [Vec<&'s str>; 3] {
    let mut out: [Vec<&str>; 3] = Default::default();
    for z in zs {
        out[(assign % 3) as usize].push(*z);
        assign /= 3;
    }
    out
}

fn check_target(key: CorrelatorKey) -> Result<(), RecursionError> {
    if key.n == 0 {
        return Err(RecursionError::Unstable(key));
    }
    Ok(())
}

/// `R^(2) W_{g,n+1}(w; z1..zn)` for `key = (g, n+1)`: the diagonal term and the
/// quadratic sum, excluding factors equal to the target.
pub fn assemble_r2<S: CorrelatorSource + ?Sized>(
    key: CorrelatorKey,
    source: &S,
    order: u32,
) -> Result<LaurentDifferential, RecursionError> {
    check_target(key)?;
    Assembler::new(source, key, order).r2()
}

/// `R^(3) W_{g,n+1}(w; z1..zn)`: the triple diagonal, the mixed term and the cubic sum.
pub fn assemble_r3<S: CorrelatorSource + ?Sized>(
    key: CorrelatorKey,
    source: &S,
    order: u32,
) -> Result<LaurentDifferential, RecursionError> {
    check_target(key)?;
    Assembler::new(source, key, order).r3()
}

/// The two residue integrands `(R^(2) + D1 W, R^(3) - D2 W)`.
pub(crate) fn integrands<S: CorrelatorSource + ?Sized>(
    key: CorrelatorKey,
    source: &S,
    order: u32,
) -> Result<(LaurentDifferential, LaurentDifferential), RecursionError> {
    check_target(key)?;
    let asm = Assembler::new(source, key, order);
    let (r2, r3) = rayon::join(|| asm.r2(), || asm.r3());
    let mut i2 = r2?;
    let mut i3 = r3?;
    let layout2 = integrand_layout(asm.spectators(), 2, asm.flavor);
    let layout3 = integrand_layout(asm.spectators(), 3, asm.flavor);
    if let Some(d) = asm.d_term(1)? {
        i2 = i2.add(&d.conform(&layout2)?)?;
    }
    if let Some(d) = asm.d_term(2)? {
        i3 = i3.sub(&d.conform(&layout3)?)?;
    }
    Ok((i2, i3))
}
