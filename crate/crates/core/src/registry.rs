//! Known-optimum registry: a plain text file of `name value` lines.
//!
//! Values are reference data only. Tests recompute optima with the exact
//! solvers wherever the instance is small enough.

use std::collections::BTreeMap;
use std::path::Path;
use std::{fs, io};

use thiserror::Error;

use crate::tsplib::{Cost, Instance};

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("registry I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("registry line {line}: expected `name value`, got {text:?}")]
    Malformed { line: usize, text: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OptimaRegistry {
    entries: BTreeMap<String, Cost>,
}

impl OptimaRegistry {
    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            if let Some((name, value)) = parse_line(raw, idx + 1)? {
                entries.insert(name.to_string(), value);
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RegistryError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn get(&self, name: &str) -> Option<Cost> {
        self.entries.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Cost)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Copies the registry value for this instance's name, if any.
    pub fn annotate(&self, instance: &mut Instance) {
        instance.known_optimum = self.get(instance.name());
    }

    /// Sets `name` to `value` in the registry file, keeping comments and the
    /// order of other lines. Creates the file when missing. Running it twice
    /// with the same arguments leaves identical bytes.
    pub fn upsert_file(path: impl AsRef<Path>, name: &str, value: Cost) -> Result<(), RegistryError> {
        let path = path.as_ref();
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(e.into()),
        };
        let mut lines: Vec<String> = Vec::new();
        let mut replaced = false;
        for (idx, raw) in text.lines().enumerate() {
            match parse_line(raw, idx + 1)? {
                Some((existing, _)) if existing == name => {
                    if !replaced {
                        lines.push(format!("{name} {value}"));
                        replaced = true;
                    }
                }
                _ => lines.push(raw.to_string()),
            }
        }
        if !replaced {
            lines.push(format!("{name} {value}"));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        fs::write(path, out)?;
        Ok(())
    }
}

fn parse_line(raw: &str, line: usize) -> Result<Option<(&str, Cost)>, RegistryError> {
    let content = raw.split('#').next().unwrap_or("").trim();
    if content.is_empty() {
        return Ok(None);
    }
    let mut parts = content.split_whitespace();
    let malformed = || RegistryError::Malformed {
        line,
        text: raw.to_string(),
    };
    let name = parts.next().ok_or_else(malformed)?;
    let value = parts
        .next()
        .and_then(|v| v.parse::<Cost>().ok())
        .ok_or_else(malformed)?;
    if parts.next().is_some() {
        return Err(malformed());
    }
    Ok(Some((name, value)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_entries() {
        let reg = OptimaRegistry::parse("# optima\nbr17 39  # Repetto\n\nftv33 1286\n").unwrap();
        assert_eq!(reg.get("br17"), Some(39));
        assert_eq!(reg.get("ftv33"), Some(1286));
        assert_eq!(reg.get("nope"), None);
        assert_eq!(reg.len(), 2);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(
            OptimaRegistry::parse("br17\n"),
            Err(RegistryError::Malformed { line: 1, .. })
        ));
        assert!(OptimaRegistry::parse("br17 x\n").is_err());
        assert!(OptimaRegistry::parse("br17 1 2\n").is_err());
    }

    #[test]
    fn upsert_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("optima.txt");
        fs::write(&path, "# header\nbr17 40\nother 5\n").unwrap();
        OptimaRegistry::upsert_file(&path, "br17", 39).unwrap();
        let once = fs::read(&path).unwrap();
        OptimaRegistry::upsert_file(&path, "br17", 39).unwrap();
        assert_eq!(once, fs::read(&path).unwrap());
        assert_eq!(
            String::from_utf8(once).unwrap(),
            "# header\nbr17 39\nother 5\n"
        );

        OptimaRegistry::upsert_file(&path, "fresh", 7).unwrap();
        assert_eq!(OptimaRegistry::load(&path).unwrap().get("fresh"), Some(7));
    }
}
