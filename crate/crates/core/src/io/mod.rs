//! Instance files, solution documents, best-known values and run reports.

mod bks;
mod canonical;
mod family;
mod report;
mod solution;

pub use bks::{BksEntry, BksRegistry};
pub use canonical::{parse_canonical, serialize_canonical, HEADER};
pub use family::{parse_prodhon, PRODHON_GRAMMAR};
pub use report::{format_gap, gap_pct, gap_report, ReportRow, RunRecord, RunReport};
pub use solution::{
    read_solution, solution_from_json, solution_to_json, write_solution, RouteDoc, SolutionDoc,
};

use std::path::Path;
use std::str::FromStr;

use crate::model::Instance;
use crate::{Error, Result};

/// Which grammar to read an instance file with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Canonical,
    /// Canonical when the file starts with the canonical header, else `prodhon`.
    Auto,
    Prodhon,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Format::Canonical),
            "auto" => Ok(Format::Auto),
            "prodhon" => Ok(Format::Prodhon),
            other => Err(Error::InvalidArgument(format!(
                "unknown instance format {other:?}"
            ))),
        }
    }
}

/// Instance name from a path: the file stem without a `coord` prefix.
pub fn instance_name(path: &Path) -> String {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance");
    stem.strip_prefix("coord").unwrap_or(stem).to_string()
}

pub fn parse_instance_str(text: &str, name: &str, format: Format) -> Result<Instance> {
    match format {
        Format::Canonical => parse_canonical(text, name),
        Format::Prodhon => parse_prodhon(text, name),
        Format::Auto => {
            let canonical = canonical::records(text)
                .first()
                .is_some_and(|(_, t)| t.join(" ") == HEADER);
            if canonical {
                parse_canonical(text, name)
            } else {
                parse_prodhon(text, name)
            }
        }
    }
}

pub fn parse_instance(path: impl AsRef<Path>, format: Format) -> Result<Instance> {
    let path = path.as_ref();
    parse_instance_str(
        &std::fs::read_to_string(path)?,
        &instance_name(path),
        format,
    )
}

/// One depot configuration per nonempty line, as whitespace-separated
/// 0-based depot indices. `#` starts a comment.
pub fn parse_seed_configs(text: &str) -> Result<Vec<Vec<usize>>> {
    canonical::records(text)
        .into_iter()
        .map(|(line, toks)| {
            toks.iter()
                .map(|t| canonical::number(t, line, "depot index"))
                .collect()
        })
        .collect()
}
