use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{compress, is_classified, DiffReport, RowStatus};
use crate::criterion::CriterionSet;
use crate::error::{Error, Result};
use crate::escalation::EscalationResult;

/// Value of the `schema` key in every JSON document.
pub const JSON_SCHEMA_VERSION: &str = "gonal/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(Format::Markdown),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Parse(format!("unknown format {other:?}"))),
        }
    }
}

pub trait Emit: Serialize + DeserializeOwned {
    /// Value of the `kind` key in JSON output.
    const KIND: &'static str;

    fn markdown(&self) -> String;
    fn csv(&self) -> String;
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema: &'static str,
    kind: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn emit<T: Emit>(value: &T, format: Format) -> Result<String> {
    Ok(match format {
        Format::Markdown => value.markdown(),
        Format::Csv => value.csv(),
        Format::Json => {
            let mut s = serde_json::to_string(&Envelope {
                schema: JSON_SCHEMA_VERSION,
                kind: T::KIND,
                body: value,
            })?;
            s.push('\n');
            s
        }
    })
}

/// Reads a document written by [`emit`] in JSON form.
pub fn parse_json<T: Emit>(text: &str) -> Result<T> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Parse("expected a JSON object".into()))?;
    let field = |obj: &serde_json::Map<String, serde_json::Value>, key: &str| {
        obj.get(key).and_then(|v| v.as_str()).map(str::to_owned)
    };
    if field(obj, "schema").as_deref() != Some(JSON_SCHEMA_VERSION) {
        return Err(Error::Parse(format!(
            "unsupported schema {:?}",
            field(obj, "schema")
        )));
    }
    if field(obj, "kind").as_deref() != Some(T::KIND) {
        return Err(Error::Parse(format!(
            "expected kind {:?}, found {:?}",
            T::KIND,
            field(obj, "kind")
        )));
    }
    obj.remove("schema");
    obj.remove("kind");
    Ok(serde_json::from_value(value)?)
}

fn coeff_cells(coeffs: &[u64]) -> Vec<String> {
    coeffs.iter().map(u64::to_string).collect()
}

impl Emit for EscalationResult {
    const KIND: &'static str = "escalation";

    fn markdown(&self) -> String {
        let mut out = String::new();
        let label = if is_classified(self.m, self.n) {
            "New"
        } else {
            "Candidates for new"
        };
        let _ = writeln!(
            out,
            "## {label} tight T({})-universal {}-gonal forms (bound {})\n",
            self.n, self.m, self.bound
        );
        out.push_str("| k | E(k) | U(k) | NU(k) | A(k) |\n|---|---|---|---|---|\n");
        for level in &self.levels {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                level.k,
                level.nodes.len(),
                level.universal().count(),
                level.new_universal.len(),
                level.active().count()
            );
        }
        match self.terminal_depth {
            Some(l) => {
                let _ = writeln!(out, "\nTerminated at l = {l}.\n");
            }
            None => {
                let _ = writeln!(
                    out,
                    "\nStopped by the depth guard at k = {}.\n",
                    self.max_depth
                );
            }
        }

        let rows = compress(self.new_universal());
        if rows.is_empty() {
            out.push_str("| a1 | Conditions on a_k |\n|---|---|\n");
            return out;
        }
        let mut blocks: BTreeMap<usize, Vec<_>> = BTreeMap::new();
        for row in rows {
            blocks.entry(row.free_len()).or_default().push(row);
        }
        for (k, rows) in blocks {
            let _ = writeln!(out, "### k = {k}\n");
            let heads: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
            let _ = writeln!(out, "| {} | Conditions on a{k} |", heads.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(k + 1));
            for row in rows {
                let mut cells = coeff_cells(row.prefix.as_slice());
                if !row.is_fixed() {
                    cells.push(format!("a{k}"));
                }
                let _ = writeln!(out, "| {} | {} |", cells.join(" | "), row.condition_text());
            }
            out.push('\n');
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from("length,coefficients\n");
        for v in self.new_universal() {
            let _ = writeln!(out, "{},{}", v.len(), coeff_cells(v.as_slice()).join(" "));
        }
        out
    }
}

impl Emit for CriterionSet {
    const KIND: &'static str = "criterion_set";

    fn markdown(&self) -> String {
        let mut out = String::new();
        let mark = if is_classified(self.m, self.n) {
            "†"
        } else {
            ""
        };
        let _ = writeln!(out, "| m | n | CS(m,n) | γ |\n|---|---|---|---|");
        let elems = coeff_cells(&self.elements).join(",");
        let _ = writeln!(
            out,
            "| {} | {}{mark} | {{{elems}}} | {} |",
            self.m, self.n, self.gamma
        );
        if !self.provenance.is_empty() {
            out.push_str("\n| g | vector with truant g |\n|---|---|\n");
            for (g, v) in &self.provenance {
                let _ = writeln!(out, "| {g} | {v} |");
            }
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from("m,n,bound,element,source\n");
        for g in &self.elements {
            let source = self
                .provenance
                .get(g)
                .map(|v| coeff_cells(v.as_slice()).join(" "))
                .unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{g},{source}", self.m, self.n, self.bound);
        }
        out
    }
}

/// `γ(m, 1)` for several `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaTable {
    pub bound: u64,
    /// `m -> γ`.
    pub gammas: BTreeMap<u64, u64>,
}

impl Emit for GammaTable {
    const KIND: &'static str = "gamma_table";

    fn markdown(&self) -> String {
        let ms: Vec<String> = self
            .gammas
            .keys()
            .map(|&m| {
                let mark = if is_classified(m, 1) { "†" } else { "" };
                format!("{m}{mark}")
            })
            .collect();
        let gs: Vec<String> = self.gammas.values().map(u64::to_string).collect();
        format!(
            "| m | {} |\n|{}\n| γ_m | {} |\n",
            ms.join(" | "),
            "---|".repeat(ms.len() + 1),
            gs.join(" | ")
        )
    }

    fn csv(&self) -> String {
        let mut out = String::from("m,gamma\n");
        for (m, g) in &self.gammas {
            let _ = writeln!(out, "{m},{g}");
        }
        out
    }
}

impl Emit for DiffReport {
    const KIND: &'static str = "diff_report";

    fn markdown(&self) -> String {
        let mut out = format!("{self}");
        out.push('\n');
        out
    }

    fn csv(&self) -> String {
        let mut out = String::from("table,row,status,expected,actual\n");
        for row in &self.rows {
            let (status, expected, actual) = match &row.status {
                RowStatus::Match => ("match", "", ""),
                RowStatus::Skipped => ("skipped", "", ""),
                RowStatus::Mismatch { expected, actual } => {
                    ("mismatch", expected.as_str(), actual.as_str())
                }
            };
            let _ = writeln!(
                out,
                "{},{},{status},{},{}",
                self.table,
                csv_field(&row.label),
                csv_field(expected),
                csv_field(actual)
            );
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
