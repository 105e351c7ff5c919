//! Name-keyed registries for interchangeable strategies.
//!
//! Each family (duct profiles, data kinds, outflow closures, field
//! interpolants, experiment presets) exposes a `default_registry()` that
//! installs the built-in variants; callers can register more before use.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<String, Arc<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self { kind, entries: BTreeMap::new() }
    }

    pub fn register(&mut self, name: impl Into<String>, entry: Arc<T>) -> &mut Self {
        self.entries.insert(name.into(), entry);
        self
    }

    pub fn with(mut self, name: impl Into<String>, entry: Arc<T>) -> Self {
        self.register(name, entry);
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy { kind: self.kind, name: name.to_string() })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}
