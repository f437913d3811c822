use std::collections::BTreeMap;

use open_tr::algebra::{factorial, Rational};
use open_tr::key::{CorrelatorKey, GenusIndex};
use open_tr::numbers::{tabulate, IntersectionIndex, Provenance};
use open_tr::oracle::solve_f;
use open_tr::recursion::cache::DiskCache;
use open_tr::recursion::{compute_correlator_with_order, required_kernel_order, CorrelatorStore, Flavor, RecursionError};

const BUDGET: u32 = 7;

fn table() -> BTreeMap<IntersectionIndex, Rational> {
    let store = CorrelatorStore::new(Flavor::Baseline);
    let f = solve_f(BUDGET).unwrap();
    let t = tabulate(&store, &f, BUDGET).unwrap();
    assert_eq!(t.disagreements().count(), 0);
    assert!(t.rows.iter().all(|r| r.provenance == Provenance::BothAgree));
    t.rows.into_iter().map(|r| (r.index, r.value)).collect()
}

fn lookup(t: &BTreeMap<IntersectionIndex, Rational>, idx: &IntersectionIndex) -> Option<Rational> {
    if !idx.key().is_stable() || idx.key().level() > BUDGET {
        return None;
    }
    Some(t.get(idx).cloned().unwrap_or_else(Rational::zero))
}

#[test]
fn genus_zero_is_multinomial() {
    let t = table();
    let mut seen = 0;
    for (idx, v) in &t {
        if idx.h.twice() != 0 {
            continue;
        }
        assert!(idx.boundary.is_empty());
        let n = idx.n();
        let mut expect = factorial(n - 3);
        for &a in &idx.interior {
            expect = expect / factorial(a);
        }
        assert_eq!(v, &expect, "{idx}");
        seen += 1;
    }
    assert!(seen >= 7);
}

#[test]
fn string_equation() {
    let t = table();
    let mut checked = 0;
    for (idx, v) in &t {
        let Some(pos) = idx.interior.iter().position(|&a| a == 0) else { continue };
        let mut rest = idx.interior.clone();
        rest.remove(pos);
        let mut expect = Rational::zero();
        let mut complete = true;
        for i in 0..rest.len() {
            if rest[i] == 0 {
                continue;
            }
            let mut lowered = rest.clone();
            lowered[i] -= 1;
            let j = IntersectionIndex::new(idx.h, lowered, idx.boundary.clone());
            match lookup(&t, &j) {
                Some(x) => expect += x,
                None => complete = false,
            }
        }
        for i in 0..idx.boundary.len() {
            if idx.boundary[i] == 0 {
                continue;
            }
            let mut lowered = idx.boundary.clone();
            lowered[i] -= 1;
            let j = IntersectionIndex::new(idx.h, rest.clone(), lowered);
            match lookup(&t, &j) {
                Some(x) => expect += x,
                None => complete = false,
            }
        }
        let reduced = IntersectionIndex::new(idx.h, rest, idx.boundary.clone());
        if complete && reduced.key().is_stable() {
            assert_eq!(v, &expect, "{idx}");
            checked += 1;
        }
    }
    assert!(checked >= 20, "{checked}");
}

#[test]
fn dilaton_equation() {
    let t = table();
    let mut checked = 0;
    for (idx, v) in &t {
        let Some(pos) = idx.interior.iter().position(|&a| a == 1) else { continue };
        let mut rest = idx.interior.clone();
        rest.remove(pos);
        let j = IntersectionIndex::new(idx.h, rest, idx.boundary.clone());
        let Some(x) = lookup(&t, &j) else { continue };
        let chi = j.key().complexity();
        assert_eq!(v, &(x * Rational::from(chi)), "{idx}");
        checked += 1;
    }
    assert!(checked >= 10, "{checked}");
}

#[test]
fn open_anchors() {
    let t = table();
    let half = GenusIndex::from_twice(1);
    assert_eq!(t[&IntersectionIndex::new(half, vec![0], vec![0])], Rational::one());
    assert_eq!(t[&IntersectionIndex::new(half, vec![], vec![0, 0, 0])], Rational::one());
    assert_eq!(t[&IntersectionIndex::new(GenusIndex::from_twice(0), vec![0, 0, 0], vec![])], Rational::one());
}

#[test]
fn doubled_kernel_order_changes_nothing() {
    let store = CorrelatorStore::new(Flavor::Baseline);
    for w in store.ensure_budget(6).unwrap() {
        let key = w.key();
        let wide = compute_correlator_with_order(key, &store, 2 * required_kernel_order(key)).unwrap();
        assert_eq!(wide.value(), w.value(), "{key}");
    }
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cold = CorrelatorStore::new(Flavor::QGraded).with_cache_dir(dir.path()).unwrap();
    let a = cold.ensure_budget(6).unwrap();
    assert_eq!(cold.stats().loaded, 0);

    let warm = CorrelatorStore::new(Flavor::QGraded).with_cache_dir(dir.path()).unwrap();
    let b = warm.ensure_budget(6).unwrap();
    assert_eq!(warm.stats().computed, 0);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.value(), y.value());
    }

    let key = CorrelatorKey::new(1, 3);
    let cache = DiskCache::open(dir.path()).unwrap();
    assert!(cache.load(Flavor::Baseline, key).unwrap().is_none());
    let path = cache.path(Flavor::QGraded, key);
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() / 2);
    std::fs::write(&path, bytes).unwrap();
    let broken = CorrelatorStore::new(Flavor::QGraded).with_cache_dir(dir.path()).unwrap();
    assert!(matches!(broken.ensure(key), Err(RecursionError::CacheCorrupt { .. })));
}

#[test]
fn thread_count_does_not_matter() {
    let one = CorrelatorStore::new(Flavor::Baseline).with_threads(1).unwrap();
    let many = CorrelatorStore::new(Flavor::Baseline).with_threads(4).unwrap();
    let a = one.ensure_budget(6).unwrap();
    let b = many.ensure_budget(6).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.value(), y.value());
    }
}
