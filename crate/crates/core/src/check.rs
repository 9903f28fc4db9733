//! Named pass/fail outcomes with an optional witness, shared by every
//! verification routine and the reports built from them.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: true,
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed: false,
            witness: Some(witness.into()),
        }
    }

    /// Passes when `witness` is `None`.
    pub fn from_witness(name: impl Into<String>, witness: Option<String>) -> Self {
        match witness {
            None => Check::pass(name),
            Some(w) => Check::fail(name, w),
        }
    }

    /// Folds several checks into one that fails with the first witness.
    pub fn all(name: impl Into<String>, parts: impl IntoIterator<Item = Check>) -> Self {
        let first = parts.into_iter().find(|c| !c.passed);
        Check::from_witness(
            name,
            first.map(|c| format!("{}: {}", c.name, c.witness.unwrap_or_default())),
        )
    }
}
