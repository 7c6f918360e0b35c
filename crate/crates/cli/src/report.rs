//! Human-readable and JSON renderings of verification results.

use desmod_core::checkers::{PropertyResult, Witness};
use serde::{Deserialize, Serialize};

/// Version of the JSON record layout. Bump on any incompatible change.
pub const FORMAT_VERSION: u32 = 1;

/// The JSON record: a `format-version` field followed by the result's own fields
/// (`property`, `verdict`, `witness`, `bound`, `stats`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    #[serde(rename = "format-version")]
    pub format_version: u32,
    #[serde(flatten)]
    pub result: PropertyResult,
}

/// JSON record for a failed invocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    #[serde(rename = "format-version")]
    pub format_version: u32,
    pub error: ErrorBody,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    /// `input` (exit code 2) or `budget` (exit code 3).
    pub kind: String,
    pub message: String,
}

fn words(w: &[String]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.join(" ")
    }
}

fn set(s: &[String]) -> String {
    format!("{{{}}}", s.join(", "))
}

fn witness_text(w: &Witness, out: &mut String) {
    match w {
        Witness::Lasso {
            prefix,
            cycle,
            tail,
            states,
            exact,
        } => {
            out.push_str(&format!(
                "witness: lasso ({})\n",
                if *exact { "observer" } else { "detector" }
            ));
            out.push_str(&format!("  prefix: {}\n", words(prefix)));
            out.push_str(&format!("  cycle: {}\n", words(cycle)));
            if !tail.is_empty() {
                out.push_str(&format!("  tail: {}\n", words(tail)));
            }
            for s in states {
                out.push_str(&format!("  estimate: {}\n", set(s)));
            }
        }
        Witness::Revealing { word, estimate } => {
            out.push_str("witness: revealing word\n");
            out.push_str(&format!("  word: {}\n", words(word)));
            out.push_str(&format!("  estimate: {}\n", set(estimate)));
        }
        Witness::FaultPair {
            string,
            observation,
            actual,
            estimate,
            region,
        } => {
            out.push_str("witness: undiagnosable fault\n");
            out.push_str(&format!("  string: {}\n", words(string)));
            out.push_str(&format!("  observation: {}\n", words(observation)));
            out.push_str(&format!("  actual: {}\n", set(actual)));
            out.push_str(&format!("  estimate: {}\n", set(estimate)));
            out.push_str(&format!(
                "  region: {region} pair states without an all-fault estimate\n"
            ));
        }
    }
}

/// Renders `result`; the witness is included only when `witness` is set.
pub fn emit_report(result: &PropertyResult, json: bool, witness: bool) -> String {
    let mut result = result.clone();
    if !witness {
        result.witness = None;
    }
    if json {
        let report = Report {
            format_version: FORMAT_VERSION,
            result,
        };
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        return s;
    }
    let mut out = String::new();
    out.push_str(&format!("property: {}\n", result.property.name()));
    out.push_str(&format!(
        "verdict: {}\n",
        if result.verdict.holds() {
            "holds"
        } else {
            "violated"
        }
    ));
    out.push_str(&format!("engine: {}\n", result.stats.engine.name()));
    out.push_str(&format!(
        "explored: {} nodes, {} composite states\n",
        result.stats.explored, result.stats.composite_states
    ));
    if let Some(b) = result.bound {
        out.push_str(&format!("bound: {b}\n"));
    }
    if let Some(w) = &result.witness {
        witness_text(w, &mut out);
    }
    out
}

pub fn emit_error(kind: &str, message: &str) -> String {
    let mut s = serde_json::to_string_pretty(&ErrorReport {
        format_version: FORMAT_VERSION,
        error: ErrorBody {
            kind: kind.to_string(),
            message: message.to_string(),
        },
    })
    .expect("error report serializes");
    s.push('\n');
    s
}
