//! On-disk report cache under `DW_CACHE_DIR`.
//!
//! Entries are keyed by a digest of the command, its inputs' digests, its
//! parameters and the bounds, so editing an input changes the key and stale
//! entries are simply never read again.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::report::Report;

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn from_env() -> Option<Cache> {
        std::env::var_os("DW_CACHE_DIR").map(|d| Cache { dir: PathBuf::from(d) })
    }

    pub fn key(material: &Value) -> String {
        let text = serde_json::to_string(material).expect("key material serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A missing entry is a miss; an unreadable one is a miss with a warning.
    pub fn load(&self, key: &str) -> Option<Report> {
        let path = self.path(key);
        let text = fs::read_to_string(&path).ok()?;
        match serde_json::from_str(&text) {
            Ok(r) => Some(r),
            Err(e) => {
                eprintln!(
                    "warning: cache entry {} is corrupted ({e}); recomputing",
                    path.display()
                );
                None
            }
        }
    }

    pub fn store(&self, key: &str, report: &Report) -> Result<()> {
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating cache directory {}", self.dir.display()))?;
        let path = self.path(key);
        // write-then-rename so a concurrent reader never sees half a file
        let tmp = self.dir.join(format!("{key}.json.tmp{}", std::process::id()));
        fs::write(&tmp, report.to_json()).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
