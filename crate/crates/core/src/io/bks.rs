use std::collections::BTreeMap;
use std::io::Read;

use serde::Deserialize;

use crate::{Cost, Error, Result};

const BUNDLED: &str = include_str!("../../data/bks.csv");

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BksEntry {
    pub instance: String,
    pub bks: Cost,
    pub provenance: String,
}

/// Best-known objective per instance name.
#[derive(Debug, Clone, Default)]
pub struct BksRegistry {
    entries: BTreeMap<String, BksEntry>,
}

impl BksRegistry {
    /// Registry shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_reader(BUNDLED.as_bytes()).expect("bundled registry is valid")
    }

    /// Reads a CSV with columns `instance,bks,provenance`.
    pub fn from_reader(reader: impl Read) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let e: BksEntry = row?;
            if !(e.bks > 0.0) {
                return Err(Error::Semantic(format!(
                    "bks for {}: must be positive",
                    e.instance
                )));
            }
            if entries.contains_key(&e.instance) {
                return Err(Error::Semantic(format!(
                    "bks: duplicate instance {}",
                    e.instance
                )));
            }
            entries.insert(e.instance.clone(), e);
        }
        Ok(BksRegistry { entries })
    }

    pub fn get(&self, instance: &str) -> Option<Cost> {
        self.entries.get(instance).map(|e| e.bks)
    }

    pub fn entry(&self, instance: &str) -> Option<&BksEntry> {
        self.entries.get(instance)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
