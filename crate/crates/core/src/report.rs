//! Structured verification reports with a canonical JSON form.
//!
//! The JSON serialization is byte-deterministic: all maps are ordered, no
//! floats appear, and timing is deliberately excluded (it lives only in the
//! human-readable rendering).

use std::collections::BTreeMap;

use serde::Serialize;

/// One named check inside a report.
#[derive(Clone, Debug, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckItem {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        CheckItem { name: name.to_string(), pass, detail: detail.into() }
    }
}

/// A self-contained verification report.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub field: String,
    pub params: BTreeMap<String, String>,
    pub items: Vec<CheckItem>,
    pub tables: BTreeMap<String, Vec<String>>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(id: &str, field: &str) -> Self {
        VerificationReport {
            id: id.to_string(),
            field: field.to_string(),
            params: BTreeMap::new(),
            items: Vec::new(),
            tables: BTreeMap::new(),
            pass: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) -> &mut Self {
        self.pass &= pass;
        self.items.push(CheckItem::new(name, pass, detail));
        self
    }

    pub fn table<T: ToString>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> &mut Self {
        self.tables
            .insert(name.to_string(), rows.into_iter().map(|r| r.to_string()).collect());
        self
    }

    /// Canonical machine form: compact JSON with ordered keys and a trailing
    /// newline. Byte-identical across runs on identical inputs.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("report serialization");
        s.push('\n');
        s
    }

    /// Human-readable rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== {} (field {})\n", self.id, self.field));
        for (k, v) in &self.params {
            out.push_str(&format!("   {k} = {v}\n"));
        }
        for (name, rows) in &self.tables {
            out.push_str(&format!("   {name}: {}\n", rows.join(", ")));
        }
        for item in &self.items {
            let mark = if item.pass { "ok  " } else { "FAIL" };
            if item.detail.is_empty() {
                out.push_str(&format!(" [{mark}] {}\n", item.name));
            } else {
                out.push_str(&format!(" [{mark}] {}: {}\n", item.name, item.detail));
            }
        }
        out.push_str(&format!("=> {}\n", if self.pass { "PASS" } else { "FAIL" }));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_is_deterministic() {
        let mut r = VerificationReport::new("demo", "Q");
        r.param("n", 2).check("a", true, "").table("dims", [1, 2, 3]);
        let mut r2 = VerificationReport::new("demo", "Q");
        r2.param("n", 2).check("a", true, "").table("dims", [1, 2, 3]);
        assert_eq!(r.to_json(), r2.to_json());
        assert!(r.to_json().ends_with('\n'));
    }
}
