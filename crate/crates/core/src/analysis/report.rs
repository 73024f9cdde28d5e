use std::fmt::{Display, Write as _};

use crate::real::Real;

/// Ordered `key=value` records, one per line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    /// Reals use the same 17-significant-digit format as the ledger.
    pub fn push_real<T: Real>(&mut self, key: impl Into<String>, value: T) {
        self.push(key, format_real(value));
    }

    pub fn extend(&mut self, other: KeyValues) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

pub fn format_real<T: Real>(v: T) -> String {
    format!("{:.16e}", v.to_f64_lossy())
}
