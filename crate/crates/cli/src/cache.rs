//! JSON-lines coefficient cache: a header line with the schema version, then
//! one entry per kernel coefficient.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use tperiods::exact::Cyclotomic;
use tperiods::kernels::{KernelKind, KernelSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub kind: KernelKind,
    pub weight: u32,
    pub ell: u32,
    pub modulus: u64,
    pub label: u64,
    pub n: usize,
}

impl CacheKey {
    pub fn new(spec: &KernelSpec, n: usize) -> Self {
        CacheKey {
            kind: spec.kind(),
            weight: spec.weight(),
            ell: spec.ell(),
            modulus: spec.chi().modulus(),
            label: spec.chi().label(),
            n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub value: Cyclotomic,
    pub schema_version: u32,
}

#[derive(Serialize, Deserialize)]
struct Header {
    schema_version: u32,
}

pub struct CoeffCache {
    path: PathBuf,
    entries: HashMap<CacheKey, Cyclotomic>,
    /// The file is missing or has an unusable header and must be rewritten.
    fresh: bool,
}

impl CoeffCache {
    pub fn open(path: &Path) -> Result<Self> {
        let mut cache = CoeffCache {
            path: path.to_path_buf(),
            entries: HashMap::new(),
            fresh: true,
        };
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(e).with_context(|| format!("reading cache {}", path.display())),
        };
        let mut lines = text.lines().enumerate();
        match lines.next().map(|(_, l)| serde_json::from_str::<Header>(l)) {
            Some(Ok(h)) if h.schema_version == SCHEMA_VERSION => cache.fresh = false,
            Some(_) => {
                eprintln!(
                    "warning: cache {} has no schema_version {SCHEMA_VERSION} header; starting over",
                    path.display()
                );
                return Ok(cache);
            }
            None => return Ok(cache),
        }
        for (i, line) in lines {
            match serde_json::from_str::<CacheEntry>(line) {
                Ok(e) if e.schema_version == SCHEMA_VERSION => {
                    cache.entries.insert(e.key, e.value);
                }
                Ok(_) => eprintln!("warning: cache line {} has a stale schema version; ignored", i + 1),
                Err(err) => eprintln!("warning: skipping corrupt cache line {}: {err}", i + 1),
            }
        }
        Ok(cache)
    }

    pub fn get(&self, key: &CacheKey) -> Option<&Cyclotomic> {
        self.entries.get(key)
    }

    /// Coefficients `1..=terms` of `spec` if every one is cached.
    pub fn lookup(&self, spec: &KernelSpec, terms: usize) -> Option<Vec<Cyclotomic>> {
        (1..=terms).map(|n| self.get(&CacheKey::new(spec, n)).cloned()).collect()
    }

    /// Appends entries not already present.
    pub fn store(&mut self, spec: &KernelSpec, values: &[Cyclotomic]) -> Result<()> {
        let new: Vec<CacheEntry> = values
            .iter()
            .enumerate()
            .map(|(i, v)| CacheEntry {
                key: CacheKey::new(spec, i + 1),
                value: v.clone(),
                schema_version: SCHEMA_VERSION,
            })
            .filter(|e| self.entries.get(&e.key) != Some(&e.value))
            .collect();
        if new.is_empty() {
            return Ok(());
        }
        let mut file = if self.fresh {
            let mut f = fs::File::create(&self.path)?;
            serde_json::to_writer(&mut f, &Header { schema_version: SCHEMA_VERSION })?;
            writeln!(f)?;
            for (key, value) in &self.entries {
                let e = CacheEntry {
                    key: key.clone(),
                    value: value.clone(),
                    schema_version: SCHEMA_VERSION,
                };
                writeln!(f, "{}", serde_json::to_string(&e)?)?;
            }
            self.fresh = false;
            f
        } else {
            OpenOptions::new().append(true).open(&self.path)?
        };
        for e in new {
            writeln!(file, "{}", serde_json::to_string(&e)?)?;
            self.entries.insert(e.key, e.value);
        }
        Ok(())
    }
}
