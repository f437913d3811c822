//! On-disk correlator cache: a cold run writes records, a warm run reads them back.

use open_tr::recursion::cache::{decode, encode};
use open_tr::recursion::{CorrelatorStore, Flavor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("open-tr-example-cache");
    let _ = std::fs::remove_dir_all(&dir);
    let budget = 6;

    let cold = CorrelatorStore::new(Flavor::Baseline).with_cache_dir(&dir)?;
    let a = cold.ensure_budget(budget)?;
    println!("cold: {:?}", cold.stats());

    let warm = CorrelatorStore::new(Flavor::Baseline).with_cache_dir(&dir)?.with_threads(1)?;
    let b = warm.ensure_budget(budget)?;
    println!("warm: {:?}", warm.stats());
    println!("identical: {}", a.iter().zip(&b).all(|(x, y)| x.value() == y.value()));

    let w = &a[0];
    let bytes = encode(Flavor::Baseline, w.key(), w.value());
    let (_, key, value) = decode(&bytes)?;
    println!("record for W{key}: {} bytes, {}", bytes.len(), value);
    Ok(())
}
