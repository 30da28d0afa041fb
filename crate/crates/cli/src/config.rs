//! `key=value` config files. Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use twoel::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
    origin: String,
}

impl Config {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: origin.into(),
                    message: format!("line {}: expected key=value", n + 1),
                });
            };
            values.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(Self { values, origin: origin.into() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Flag value if given, else the config entry.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| Error::Parse { path: self.origin.clone(), message: format!("{key} = {v}: {e}") }),
        }
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.pick(flag, key)?.ok_or_else(|| Error::Contract(format!("missing --{key}")))
    }
}
