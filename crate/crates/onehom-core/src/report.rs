//! Named residual values with tolerances and verdicts.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Debug)]
pub struct ResidualEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// A list of named residuals; `pass` means `|value| <= tolerance`.
#[derive(Clone, Debug, Default)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let pass = value.is_finite() && value.abs() <= tolerance;
        self.entries.push(ResidualEntry {
            name: name.into(),
            value,
            tolerance,
            pass,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}
