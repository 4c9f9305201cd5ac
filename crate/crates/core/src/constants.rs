//! Provenance-annotated table of external constants (percolation thresholds).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SHIPPED: &str = include_str!("../data/constants.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Rigorous,
    Numerical,
    SelfSimulated,
    Override,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub key: String,
    pub value: f64,
    pub source: Source,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Deserialize)]
struct TableFile {
    constant: Vec<Constant>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsTable {
    entries: BTreeMap<String, Constant>,
}

impl Default for ConstantsTable {
    fn default() -> Self {
        Self::parse(SHIPPED).expect("shipped constants table parses")
    }
}

impl ConstantsTable {
    pub fn parse(text: &str) -> Result<Self> {
        let file: TableFile =
            toml::from_str(text).map_err(|e| Error::config("constants", e.to_string()))?;
        let entries = file
            .constant
            .into_iter()
            .map(|c| (c.key.clone(), c))
            .collect();
        Ok(ConstantsTable { entries })
    }

    /// Replace values by key; overridden entries are tagged [`Source::Override`].
    pub fn with_overrides(mut self, overrides: &BTreeMap<String, f64>) -> Self {
        for (key, &value) in overrides {
            self.entries.insert(
                key.clone(),
                Constant {
                    key: key.clone(),
                    value,
                    source: Source::Override,
                    note: "set in run configuration".into(),
                },
            );
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&Constant> {
        self.entries.get(key)
    }

    fn value(&self, key: &str) -> Result<f64> {
        self.get(key)
            .map(|c| c.value)
            .ok_or_else(|| Error::config(format!("constants.{key}"), "no such constant"))
    }

    /// Bond percolation threshold of Z^d.
    pub fn bond_pc(&self, d: usize) -> Result<f64> {
        self.value(&format!("bond_pc.{d}"))
    }

    /// Site percolation threshold of Z^s.
    pub fn site_pc(&self, s: usize) -> Result<f64> {
        self.value(&format!("site_pc.{s}"))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constant> {
        self.entries.values()
    }
}
