//! Memoizing store that computes correlators level by level.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use rayon::prelude::*;

use super::assemble::CorrelatorSource;
use super::cache::DiskCache;
use super::{compute_correlator, dependencies, Correlator, Flavor, RecursionError};
use crate::algebra::LaurentDifferential;
use crate::key::CorrelatorKey;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StoreStats {
    pub computed: usize,
    pub loaded: usize,
}

pub struct CorrelatorStore {
    flavor: Flavor,
    entries: RwLock<BTreeMap<CorrelatorKey, Arc<Correlator>>>,
    scheduling: Mutex<()>,
    cache: Option<DiskCache>,
    pool: Option<rayon::ThreadPool>,
    computed: AtomicUsize,
    loaded: AtomicUsize,
}

impl CorrelatorStore {
    pub fn new(flavor: Flavor) -> Self {
        CorrelatorStore {
            flavor,
            entries: RwLock::new(BTreeMap::new()),
            scheduling: Mutex::new(()),
            cache: None,
            pool: None,
            computed: AtomicUsize::new(0),
            loaded: AtomicUsize::new(0),
        }
    }

    /// Persists every computed correlator under `dir` and reuses records found there.
    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Result<Self, RecursionError> {
        self.cache = Some(DiskCache::open(dir)?);
        Ok(self)
    }

    /// Runs computations on a dedicated pool; `1` gives a fully sequential run.
    pub fn with_threads(mut self, threads: usize) -> Result<Self, RecursionError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| RecursionError::ThreadPool(e.to_string()))?;
        self.pool = Some(pool);
        Ok(self)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn stats(&self) -> StoreStats {
        StoreStats {
            computed: self.computed.load(Ordering::Relaxed),
            loaded: self.loaded.load(Ordering::Relaxed),
        }
    }

    pub fn get(&self, key: CorrelatorKey) -> Option<Arc<Correlator>> {
        self.entries.read().expect("store lock").get(&key).cloned()
    }

    pub fn keys(&self) -> Vec<CorrelatorKey> {
        self.entries.read().expect("store lock").keys().copied().collect()
    }

    /// Inserts `c` unless the key is already present; returns the published value.
    pub fn publish(&self, c: Correlator) -> Arc<Correlator> {
        let mut map = self.entries.write().expect("store lock");
        map.entry(c.key()).or_insert_with(|| Arc::new(c)).clone()
    }

    /// Computes `key` and everything it depends on.
    pub fn ensure(&self, key: CorrelatorKey) -> Result<Arc<Correlator>, RecursionError> {
        if !key.is_stable() {
            return Err(RecursionError::Unstable(key));
        }
        let mut keys = dependencies(key);
        keys.insert(key);
        self.ensure_all(keys)?;
        Ok(self.get(key).expect("just ensured"))
    }

    /// Computes every stable key with `4g + n <= budget`, returned in key order.
    pub fn ensure_budget(&self, budget: u32) -> Result<Vec<Arc<Correlator>>, RecursionError> {
        let keys: BTreeSet<CorrelatorKey> = CorrelatorKey::stable_keys(budget).into_iter().collect();
        self.ensure_all(keys.clone())?;
        Ok(keys.into_iter().map(|k| self.get(k).expect("ensured")).collect())
    }

    fn ensure_all(&self, keys: BTreeSet<CorrelatorKey>) -> Result<(), RecursionError> {
        let _guard = self.scheduling.lock().expect("scheduling lock");
        let mut by_level: BTreeMap<u32, Vec<CorrelatorKey>> = BTreeMap::new();
        for k in keys {
            if self.get(k).is_none() {
                by_level.entry(k.level()).or_default().push(k);
            }
        }
        for (_, level) in by_level {
            let run = || {
                level
                    .par_iter()
                    .map(|&k| self.produce(k))
                    .collect::<Result<Vec<_>, _>>()
            };
            let done = match &self.pool {
                Some(pool) => pool.install(run)?,
                None => run()?,
            };
            for c in done {
                self.publish(c);
            }
        }
        Ok(())
    }

    fn produce(&self, key: CorrelatorKey) -> Result<Correlator, RecursionError> {
        if let Some(cache) = &self.cache {
            if let Some(value) = cache.load(self.flavor, key)? {
                self.loaded.fetch_add(1, Ordering::Relaxed);
                return Ok(Correlator::new(key, self.flavor, value));
            }
        }
        let c = compute_correlator(key, self)?;
        self.computed.fetch_add(1, Ordering::Relaxed);
        if let Some(cache) = &self.cache {
            cache.store(self.flavor, key, c.value())?;
        }
        Ok(c)
    }
}

impl CorrelatorSource for CorrelatorStore {
    fn flavor(&self) -> Flavor {
        self.flavor
    }

    fn lookup(&self, key: CorrelatorKey) -> Option<Arc<LaurentDifferential>> {
        self.get(key).map(|c| c.shared_value())
    }
}
