//! Append-only on-disk cache for the enumeration histograms, keyed by
//! (group, prime, index exponent, code revision). Entries are plain JSON
//! documents written atomically; a failed read just recomputes.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::zetacore::Group;

/// Bump when the enumeration or weight computation changes meaning.
const CACHE_REV: u32 = 1;

/// Default enumeration budget (in visited lattices). Sized so the largest
/// acceptance run — the `q = 3`, `n = 3` central enumeration at 25,195,108
/// lattices — fits with headroom, while `q = 3`, `n = 4` (~6*10^9) is
/// rejected rather than attempted.
pub const DEFAULT_BUDGET: u64 = 40_000_000;

/// Budgets and cache location for the oracle enumerations.
#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub budget: u64,
    pub cache_dir: Option<PathBuf>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            budget: DEFAULT_BUDGET,
            cache_dir: default_cache_dir(),
        }
    }
}

impl OracleConfig {
    pub fn without_cache() -> Self {
        OracleConfig {
            budget: DEFAULT_BUDGET,
            cache_dir: None,
        }
    }

    pub fn with_budget(budget: u64) -> Self {
        OracleConfig {
            budget,
            ..Default::default()
        }
    }
}

/// `NILZETA_CACHE_DIR` overrides; otherwise a directory under the system
/// temp dir. `None` disables caching.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Ok(dir) = std::env::var("NILZETA_CACHE_DIR") {
        if dir.is_empty() {
            return None;
        }
        return Some(PathBuf::from(dir));
    }
    Some(std::env::temp_dir().join("nilzeta-cache"))
}

#[derive(Serialize, Deserialize)]
struct HistogramDoc {
    group: String,
    q: u64,
    m: u32,
    rev: u32,
    histogram: BTreeMap<u32, u64>,
}

fn key_path(dir: &PathBuf, group: Group, q: u64, m: u32) -> PathBuf {
    dir.join(format!(
        "weights-{}-q{}-m{}-rev{}.json",
        group.name(),
        q,
        m,
        CACHE_REV
    ))
}

pub(super) fn load_histogram(
    cfg: &OracleConfig,
    group: Group,
    q: u64,
    m: u32,
) -> Option<BTreeMap<u32, u64>> {
    let dir = cfg.cache_dir.as_ref()?;
    let path = key_path(dir, group, q, m);
    let data = fs::read_to_string(path).ok()?;
    let doc: HistogramDoc = serde_json::from_str(&data).ok()?;
    if doc.group == group.name() && doc.q == q && doc.m == m && doc.rev == CACHE_REV {
        Some(doc.histogram)
    } else {
        None
    }
}

pub(super) fn store_histogram(
    cfg: &OracleConfig,
    group: Group,
    q: u64,
    m: u32,
    hist: &BTreeMap<u32, u64>,
) {
    let Some(dir) = cfg.cache_dir.as_ref() else {
        return;
    };
    if fs::create_dir_all(dir).is_err() {
        return;
    }
    let doc = HistogramDoc {
        group: group.name().to_string(),
        q,
        m,
        rev: CACHE_REV,
        histogram: hist.clone(),
    };
    let Ok(json) = serde_json::to_string_pretty(&doc) else {
        return;
    };
    let final_path = key_path(dir, group, q, m);
    let tmp_path = final_path.with_extension(format!("tmp.{}", std::process::id()));
    if fs::write(&tmp_path, json).is_ok() {
        let _ = fs::rename(&tmp_path, &final_path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_directory() {
        let dir = std::env::temp_dir().join(format!("nilzeta-cache-test-{}", std::process::id()));
        let cfg = OracleConfig {
            budget: 1000,
            cache_dir: Some(dir.clone()),
        };
        let mut hist = BTreeMap::new();
        hist.insert(3u32, 63u64);
        store_histogram(&cfg, Group::F24, 2, 1, &hist);
        assert_eq!(load_histogram(&cfg, Group::F24, 2, 1), Some(hist));
        assert_eq!(load_histogram(&cfg, Group::F24, 3, 1), None);
        let _ = fs::remove_dir_all(dir);
    }
}
