//! Flat `key = value` configuration with `[section]` headers.
//!
//! Keys outside any section apply to every command that reads them; a
//! command's own section overrides them. Every key in the command's section
//! must be consumed, so typos fail before any computation starts.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use ini::Ini;

use crate::CliError;

pub struct Params {
    values: BTreeMap<String, String>,
    own: BTreeSet<String>,
    used: RefCell<BTreeSet<String>>,
}

impl Params {
    pub fn empty() -> Self {
        Self {
            values: BTreeMap::new(),
            own: BTreeSet::new(),
            used: RefCell::new(BTreeSet::new()),
        }
    }

    pub fn parse(text: &str, section: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::config("config", e.to_string()))?;
        let mut values = BTreeMap::new();
        for (name, props) in ini.iter() {
            if name.is_none() {
                for (k, v) in props.iter() {
                    values.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
        }
        // section values win over top-level ones
        let mut own = BTreeSet::new();
        if let Some(props) = ini.section(Some(section)) {
            for (k, v) in props.iter() {
                values.insert(k.trim().to_string(), v.trim().to_string());
                own.insert(k.trim().to_string());
            }
        }
        Ok(Self {
            values,
            own,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.values.get(key).map(String::as_str)
    }

    pub fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::config(key, format!("cannot parse {v:?}: {e}"))),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.opt(key)?.ok_or_else(|| CliError::config(key, "missing required key"))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse()
                        .map_err(|e| CliError::config(key, format!("cannot parse {:?}: {e}", x.trim())))
                })
                .collect::<Result<Vec<T>, _>>()
                .map(Some),
        }
    }

    pub fn require_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.list(key)?.ok_or_else(|| CliError::config(key, "missing required key"))
    }

    /// Fails on the first key of the command's section that was never read.
    pub fn finish(&self) -> Result<(), CliError> {
        let used = self.used.borrow();
        match self.own.iter().find(|k| !used.contains(*k)) {
            Some(k) => Err(CliError::config(k, "unknown key")),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section_overrides_top_level() {
        let p = Params::parse("n = 5\nseed = 3\n[test]\nn = 7\n[stat]\nn = 9\n", "test").unwrap();
        assert_eq!(p.require::<usize>("n").unwrap(), 7);
        assert_eq!(p.require::<u64>("seed").unwrap(), 3);
        p.finish().unwrap();
        // top-level keys a command does not read are fine
        Params::parse("kind = general\n[selftest]\n", "selftest").unwrap().finish().unwrap();
    }

    #[test]
    fn unknown_key_named() {
        let p = Params::parse("[test]\nalhpa = 1\n", "test").unwrap();
        let e = p.finish().unwrap_err();
        assert!(e.to_string().contains("alhpa"));
    }

    #[test]
    fn lists_parse() {
        let p = Params::parse("[sweep]\nn = 10, 20,40\n", "sweep").unwrap();
        assert_eq!(p.require_list::<usize>("n").unwrap(), vec![10, 20, 40]);
        let e = Params::parse("[sweep]\nn = 10,x\n", "sweep").unwrap().require_list::<usize>("n").unwrap_err();
        assert!(e.to_string().contains("n"));
    }
}
