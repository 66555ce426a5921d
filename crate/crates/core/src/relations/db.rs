use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::eliminate::{BoundaryExpression, ProvenanceStep};
use super::monomial::Monomial;
use crate::error::{Error, Result};
use crate::strata::{TautClass, TautClassJson};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DbKey {
    pub genus: u32,
    pub markings: u32,
    pub monomial: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DbRecord {
    pub key: DbKey,
    pub value: TautClassJson,
    pub provenance: Vec<ProvenanceStep>,
    pub sha256: String,
}

fn digest(key: &DbKey, value: &TautClassJson, provenance: &[ProvenanceStep]) -> Result<String> {
    let body = serde_json::to_string(&(key, value, provenance))?;
    Ok(hex::encode(Sha256::digest(body.as_bytes())))
}

/// Append-only store of boundary expressions, one JSON record per line,
/// each carrying a SHA-256 of its content.
pub struct RelationDb {
    path: PathBuf,
    records: HashMap<DbKey, DbRecord>,
}

impl RelationDb {
    /// Opens (or creates) the database, verifying every stored hash.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut records = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: DbRecord = serde_json::from_str(&line)
                    .map_err(|e| Error::Integrity(format!("line {}: {e}", i + 1)))?;
                if digest(&rec.key, &rec.value, &rec.provenance)? != rec.sha256 {
                    return Err(Error::Integrity(format!("hash mismatch on line {}", i + 1)));
                }
                if let Some(old) = records.get(&rec.key) {
                    let old: &DbRecord = old;
                    if old.sha256 != rec.sha256 {
                        return Err(Error::Integrity(format!("conflicting records for {:?}", rec.key)));
                    }
                }
                records.insert(rec.key.clone(), rec);
            }
        }
        Ok(RelationDb { path, records })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn key(g: u32, m: &Monomial) -> DbKey {
        DbKey { genus: g, markings: m.markings(), monomial: m.to_string() }
    }

    pub fn get(&self, g: u32, m: &Monomial) -> Result<Option<BoundaryExpression>> {
        let Some(rec) = self.records.get(&Self::key(g, m)) else {
            return Ok(None);
        };
        let value = TautClass::from_json(&rec.value)?;
        Ok(Some(BoundaryExpression { value, provenance: rec.provenance.clone() }))
    }

    /// Stores a record; storing the same key again must reproduce the
    /// stored content exactly.
    pub fn insert(&mut self, g: u32, m: &Monomial, e: &BoundaryExpression) -> Result<()> {
        let key = Self::key(g, m);
        let value = e.value.to_json();
        let sha256 = digest(&key, &value, &e.provenance)?;
        if let Some(old) = self.records.get(&key) {
            if old.sha256 != sha256 {
                return Err(Error::Integrity(format!("re-derived {} differs from the stored record", key.monomial)));
            }
            return Ok(());
        }
        let rec = DbRecord { key: key.clone(), value, provenance: e.provenance.clone(), sha256 };
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(f, "{}", serde_json::to_string(&rec)?)?;
        self.records.insert(key, rec);
        Ok(())
    }
}
