//! Sealed, named record sets backed by memory or a directory tree.
//!
//! A directory store lays a set out as `<root>/<name>/part-<i>`, one file per
//! partition, each a run of length-prefixed records:
//!
//! ```text
//! key        i32 LE
//! value_len  u32 LE
//! value      value_len bytes
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use super::Record;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("record set {0:?} is already sealed")]
    AlreadySealed(String),
    #[error("record set {0:?} not found")]
    NotFound(String),
    #[error("record set {name:?} has {count} partitions, asked for {index}")]
    NoSuchPartition {
        name: String,
        index: usize,
        count: usize,
    },
    #[error("corrupt partition {name}/part-{index}: {reason}")]
    Corrupt {
        name: String,
        index: usize,
        reason: String,
    },
    #[error("invalid record set name {0:?}")]
    BadName(String),
}

/// Handle to a sealed record set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RecordSetId {
    name: String,
    partitions: usize,
}

impl RecordSetId {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn partitions(&self) -> usize {
        self.partitions
    }
}

enum Backend {
    Memory {
        sets: BTreeMap<String, Vec<Arc<Vec<u8>>>>,
        texts: BTreeMap<String, String>,
    },
    Directory {
        root: PathBuf,
    },
}

pub struct RecordStore {
    // The lock serialises seals; reads of sealed data take it only briefly.
    backend: Mutex<Backend>,
}

const SEAL_MARKER: &str = "_SEALED";

impl RecordStore {
    pub fn in_memory() -> Self {
        Self {
            backend: Mutex::new(Backend::Memory {
                sets: BTreeMap::new(),
                texts: BTreeMap::new(),
            }),
        }
    }

    pub fn directory(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self {
            backend: Mutex::new(Backend::Directory { root }),
        })
    }

    pub fn root(&self) -> Option<PathBuf> {
        match &*self.backend.lock().unwrap() {
            Backend::Memory { .. } => None,
            Backend::Directory { root } => Some(root.clone()),
        }
    }

    /// Writes and seals a record set. Fails if the name is taken.
    pub fn seal(&self, name: &str, partitions: &[Vec<Record>]) -> Result<RecordSetId, StoreError> {
        check_name(name)?;
        let encoded: Vec<Vec<u8>> = partitions.iter().map(|p| encode_partition(p)).collect();
        let mut backend = self.backend.lock().unwrap();
        match &mut *backend {
            Backend::Memory { sets, .. } => {
                if sets.contains_key(name) {
                    return Err(StoreError::AlreadySealed(name.to_string()));
                }
                sets.insert(name.to_string(), encoded.into_iter().map(Arc::new).collect());
            }
            Backend::Directory { root } => {
                let dir = root.join(name);
                if dir.join(SEAL_MARKER).exists() {
                    return Err(StoreError::AlreadySealed(name.to_string()));
                }
                fs::create_dir_all(&dir)?;
                for (i, bytes) in encoded.iter().enumerate() {
                    fs::write(dir.join(format!("part-{i}")), bytes)?;
                }
                fs::write(dir.join(SEAL_MARKER), encoded.len().to_string())?;
            }
        }
        Ok(RecordSetId {
            name: name.to_string(),
            partitions: partitions.len(),
        })
    }

    /// Looks up a sealed set by name.
    pub fn open(&self, name: &str) -> Result<RecordSetId, StoreError> {
        let backend = self.backend.lock().unwrap();
        let partitions = match &*backend {
            Backend::Memory { sets, .. } => sets
                .get(name)
                .map(Vec::len)
                .ok_or_else(|| StoreError::NotFound(name.to_string()))?,
            Backend::Directory { root } => {
                let marker = root.join(name).join(SEAL_MARKER);
                let text = fs::read_to_string(&marker)
                    .map_err(|_| StoreError::NotFound(name.to_string()))?;
                text.trim().parse().map_err(|_| StoreError::Corrupt {
                    name: name.to_string(),
                    index: 0,
                    reason: "bad seal marker".into(),
                })?
            }
        };
        Ok(RecordSetId {
            name: name.to_string(),
            partitions,
        })
    }

    /// Raw bytes of one partition.
    pub fn partition_bytes(&self, set: &RecordSetId, index: usize) -> Result<Arc<Vec<u8>>, StoreError> {
        if index >= set.partitions {
            return Err(StoreError::NoSuchPartition {
                name: set.name.clone(),
                index,
                count: set.partitions,
            });
        }
        let backend = self.backend.lock().unwrap();
        match &*backend {
            Backend::Memory { sets, .. } => sets
                .get(&set.name)
                .and_then(|parts| parts.get(index))
                .cloned()
                .ok_or_else(|| StoreError::NotFound(set.name.clone())),
            Backend::Directory { root } => {
                let path = root.join(&set.name).join(format!("part-{index}"));
                Ok(Arc::new(fs::read(path)?))
            }
        }
    }

    pub fn read_partition(&self, set: &RecordSetId, index: usize) -> Result<Vec<Record>, StoreError> {
        let bytes = self.partition_bytes(set, index)?;
        decode_partition(&bytes).map_err(|reason| StoreError::Corrupt {
            name: set.name.clone(),
            index,
            reason,
        })
    }

    /// All records, partition by partition.
    pub fn read(&self, set: &RecordSetId) -> Result<Vec<Record>, StoreError> {
        let mut out = Vec::new();
        for i in 0..set.partitions {
            out.extend(self.read_partition(set, i)?);
        }
        Ok(out)
    }

    /// Every sealed set's partition bytes, keyed by name.
    pub fn snapshot(&self) -> Result<BTreeMap<String, Vec<Vec<u8>>>, StoreError> {
        let names = self.list()?;
        let mut out = BTreeMap::new();
        for name in names {
            let set = self.open(&name)?;
            let parts = (0..set.partitions)
                .map(|i| self.partition_bytes(&set, i).map(|b| b.as_ref().clone()))
                .collect::<Result<Vec<_>, _>>()?;
            out.insert(name, parts);
        }
        Ok(out)
    }

    pub fn list(&self) -> Result<Vec<String>, StoreError> {
        let backend = self.backend.lock().unwrap();
        match &*backend {
            Backend::Memory { sets, .. } => Ok(sets.keys().cloned().collect()),
            Backend::Directory { root } => {
                let mut names = Vec::new();
                for entry in fs::read_dir(root)? {
                    let entry = entry?;
                    if entry.path().join(SEAL_MARKER).exists() {
                        names.push(entry.file_name().to_string_lossy().into_owned());
                    }
                }
                names.sort();
                Ok(names)
            }
        }
    }

    /// Stores a human-readable text artifact next to the record sets.
    pub fn write_text(&self, name: &str, text: &str) -> Result<(), StoreError> {
        check_name(name)?;
        let mut backend = self.backend.lock().unwrap();
        match &mut *backend {
            Backend::Memory { texts, .. } => {
                texts.insert(name.to_string(), text.to_string());
            }
            Backend::Directory { root } => fs::write(root.join(name), text)?,
        }
        Ok(())
    }

    pub fn read_text(&self, name: &str) -> Result<String, StoreError> {
        let backend = self.backend.lock().unwrap();
        match &*backend {
            Backend::Memory { texts, .. } => texts
                .get(name)
                .cloned()
                .ok_or_else(|| StoreError::NotFound(name.to_string())),
            Backend::Directory { root } => {
                fs::read_to_string(root.join(name)).map_err(|_| StoreError::NotFound(name.to_string()))
            }
        }
    }
}

fn check_name(name: &str) -> Result<(), StoreError> {
    let ok = !name.is_empty()
        && name != "."
        && name != ".."
        && name != SEAL_MARKER
        && !name.contains(['/', '\\']);
    if ok {
        Ok(())
    } else {
        Err(StoreError::BadName(name.to_string()))
    }
}

pub fn encode_partition(records: &[Record]) -> Vec<u8> {
    let size: usize = records.iter().map(|r| 8 + r.value.len()).sum();
    let mut out = Vec::with_capacity(size);
    for r in records {
        out.extend_from_slice(&r.key.to_le_bytes());
        out.extend_from_slice(&(r.value.len() as u32).to_le_bytes());
        out.extend_from_slice(&r.value);
    }
    out
}

pub fn decode_partition(mut bytes: &[u8]) -> Result<Vec<Record>, String> {
    let mut out = Vec::new();
    while !bytes.is_empty() {
        if bytes.len() < 8 {
            return Err(format!("{} stray bytes at end of partition", bytes.len()));
        }
        let key = i32::from_le_bytes(bytes[0..4].try_into().unwrap());
        let len = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        if bytes.len() < 8 + len {
            return Err(format!("value of {len} bytes runs past end of partition"));
        }
        out.push(Record::new(key, bytes[8..8 + len].to_vec()));
        bytes = &bytes[8 + len..];
    }
    Ok(out)
}
