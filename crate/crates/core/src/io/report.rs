use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::bks::BksRegistry;
use crate::{Cost, Result};

/// Outcome of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub seed: u64,
    pub best: Cost,
    pub time_s: f64,
    pub ttb_s: f64,
}

/// `100 * (best - bks) / bks`.
pub fn gap_pct(best: Cost, bks: Cost) -> f64 {
    100.0 * (best - bks) / bks
}

/// Two decimals, with negative zero printed as `0.00`.
pub fn format_gap(gap: f64) -> String {
    let s = format!("{gap:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

/// One report line: a single run, or the aggregate over an instance's runs
/// (`seed` is `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub instance: String,
    pub seed: Option<u64>,
    pub best: Cost,
    pub avg: Cost,
    pub time_s: f64,
    pub ttb_s: f64,
    pub gap: Option<String>,
}

impl ReportRow {
    pub fn improved(&self) -> bool {
        self.gap.as_deref().is_some_and(|g| g.starts_with('-'))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
    /// Instances without a registry entry.
    pub unmatched: Vec<String>,
}

fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.0}")
    } else {
        format!("{x:.2}")
    }
}

impl RunReport {
    /// Columns `instance,seed,best,avg,time_s,ttb_s,gap_pct`. Aggregate rows
    /// carry `all` as the seed; the gap is empty for unmatched instances.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "instance", "seed", "best", "avg", "time_s", "ttb_s", "gap_pct",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.instance.clone(),
                r.seed.map_or("all".to_string(), |s| s.to_string()),
                num(r.best),
                num(r.avg),
                format!("{:.2}", r.time_s),
                format!("{:.2}", r.ttb_s),
                r.gap.clone().unwrap_or_default(),
            ])?;
        }
        Ok(
            String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
                .expect("csv output is utf-8"),
        )
    }

    /// Aligned text table of the aggregate rows with an `improved` marker and
    /// an unmatched section.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<24} {:>14} {:>14} {:>10} {:>10} {:>8}",
            "instance", "best", "avg", "time_s", "ttb_s", "gap_pct"
        );
        for r in self.rows.iter().filter(|r| r.seed.is_none()) {
            let gap = r.gap.clone().unwrap_or_else(|| "-".into());
            let flag = if r.improved() { "  improved" } else { "" };
            let _ = writeln!(
                out,
                "{:<24} {:>14} {:>14} {:>10.2} {:>10.2} {:>8}{flag}",
                r.instance,
                num(r.best),
                num(r.avg),
                r.time_s,
                r.ttb_s,
                gap
            );
        }
        if !self.unmatched.is_empty() {
            let _ = writeln!(out, "unmatched:");
            for u in &self.unmatched {
                let _ = writeln!(out, "  {u}");
            }
        }
        out
    }
}

/// Per-run rows followed by one aggregate row per instance, ordered by
/// instance name then seed. A run row's `avg` is its own best; the aggregate
/// takes the minimum best, the mean best and the mean timings.
pub fn gap_report(runs: &[RunRecord], registry: &BksRegistry) -> RunReport {
    let mut by_instance: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in runs {
        by_instance.entry(r.instance.as_str()).or_default().push(r);
    }
    let mut report = RunReport::default();
    for (name, mut rs) in by_instance {
        rs.sort_by(|a, b| a.seed.cmp(&b.seed).then(a.best.total_cmp(&b.best)));
        let bks = registry.get(name);
        if bks.is_none() {
            report.unmatched.push(name.to_string());
        }
        let gap = |best: Cost| bks.map(|b| format_gap(gap_pct(best, b)));
        for r in &rs {
            report.rows.push(ReportRow {
                instance: name.to_string(),
                seed: Some(r.seed),
                best: r.best,
                avg: r.best,
                time_s: r.time_s,
                ttb_s: r.ttb_s,
                gap: gap(r.best),
            });
        }
        let k = rs.len() as f64;
        let best = rs.iter().map(|r| r.best).fold(Cost::INFINITY, Cost::min);
        report.rows.push(ReportRow {
            instance: name.to_string(),
            seed: None,
            best,
            avg: rs.iter().map(|r| r.best).sum::<Cost>() / k,
            time_s: rs.iter().map(|r| r.time_s).sum::<f64>() / k,
            ttb_s: rs.iter().map(|r| r.ttb_s).sum::<f64>() / k,
            gap: gap(best),
        });
    }
    report
}
