use alloc::string::String;
use alloc::vec::Vec;

/// Outcome of an exact identity check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub checked: u64,
    pub skipped: u64,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn new(name: &str) -> Self {
        CheckReport { name: name.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 16 {
            self.failures.push(witness());
        }
    }
}
