//! Plain-text discrepancy report: one line per adjudicated formula.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// A formula whose closed form disagrees with the reference value.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    /// Formula as written in the model being checked.
    pub anchor: String,
    pub printed: f64,
    pub oracle: f64,
    pub relative_deviation: f64,
    /// Where the comparison was made (parameters) and what it implies.
    pub context: String,
}

impl Discrepancy {
    pub fn new(anchor: impl Into<String>, printed: f64, oracle: f64, context: impl Into<String>) -> Self {
        let scale = oracle.abs().max(1e-300);
        Discrepancy {
            anchor: anchor.into(),
            printed,
            oracle,
            relative_deviation: (printed - oracle).abs() / scale,
            context: context.into(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} | printed={:.16e} | oracle={:.16e} | rel_dev={:.3e} | {}",
            self.anchor, self.printed, self.oracle, self.relative_deviation, self.context
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Notes {
    entries: Vec<Discrepancy>,
}

impl Notes {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, d: Discrepancy) {
        self.entries.push(d);
    }

    pub fn extend(&mut self, other: Notes) {
        self.entries.extend(other.entries);
    }

    pub fn entries(&self) -> &[Discrepancy] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_anchor(&self, anchor: &str) -> bool {
        self.entries.iter().any(|d| d.anchor == anchor)
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# formula | printed value | reference value | relative deviation | context\n");
        for d in &self.entries {
            let _ = writeln!(out, "{}", d.line());
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_line_per_entry() {
        let mut n = Notes::new();
        n.push(Discrepancy::new("h(1/4)", -0.3465735902799727, 0.0, "vacuum entropy"));
        n.push(Discrepancy::new("V22", 0.25, 0.26, "alpha=1"));
        let text = n.render();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(2).unwrap().starts_with("V22 | printed=2.5"));
        assert!(n.contains_anchor("h(1/4)"));
    }
}
