//! Validation reports shared by every validator in the crate.
//!
//! Structural problems (wrong table sizes, out-of-range entries, missing or
//! extra composition entries) are kept apart from law violations; validators
//! only check laws once the structure is sound.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Name of the law or structural condition, e.g. `"associativity"`.
    pub law: String,
    /// Human-readable witness: the offending arrows/elements and both sides.
    pub witness: String,
}

impl Violation {
    pub fn new(law: impl Into<String>, witness: impl Into<String>) -> Self {
        Self {
            law: law.into(),
            witness: witness.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.law, self.witness)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub structural: Vec<Violation>,
    pub laws: Vec<Violation>,
}

impl Report {
    pub fn ok() -> Self {
        Self::default()
    }

    pub fn is_ok(&self) -> bool {
        self.structural.is_empty() && self.laws.is_empty()
    }

    pub fn has_structural(&self) -> bool {
        !self.structural.is_empty()
    }

    pub(crate) fn structural(&mut self, law: impl Into<String>, witness: impl Into<String>) {
        self.structural.push(Violation::new(law, witness));
    }

    pub(crate) fn law(&mut self, law: impl Into<String>, witness: impl Into<String>) {
        self.laws.push(Violation::new(law, witness));
    }

    /// Whether some violation (structural or law) carries the given name.
    pub fn mentions(&self, law: &str) -> bool {
        self.violations().any(|v| v.law == law)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.structural.iter().chain(self.laws.iter())
    }

    pub fn summary(&self) -> String {
        match self.violations().next() {
            None => "ok".to_string(),
            Some(first) => {
                let n = self.structural.len() + self.laws.len();
                if n == 1 {
                    first.to_string()
                } else {
                    format!("{first} (and {} more)", n - 1)
                }
            }
        }
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(crate::Error::Invalid(self))
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for v in &self.structural {
            writeln!(f, "structural {v}")?;
        }
        for v in &self.laws {
            writeln!(f, "law {v}")?;
        }
        Ok(())
    }
}
