//! Command reports: one JSON document per run, or aligned text.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::dcx::{Orientation, SpectralPage};
use crate::selftest::CriterionOutcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn pass(check: impl Into<String>) -> Self {
        Verdict { check: check.into(), ok: true, witness: None }
    }

    pub fn fail(check: impl Into<String>, witness: impl ToString) -> Self {
        Verdict { check: check.into(), ok: false, witness: Some(witness.to_string()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerveRow {
    pub tuple: String,
    pub fiber_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Table {
    Cohomology { window: (usize, usize), dims: Vec<usize> },
    Spectral { page: u8, orientation: Orientation, window: (usize, usize), dims: Vec<Vec<usize>>, valid: Vec<Vec<bool>> },
    Nerve { level: usize, tuples: Vec<NerveRow> },
    Selftest { criteria: Vec<CriterionOutcome> },
}

impl Table {
    pub fn spectral(page: &SpectralPage, window: (usize, usize)) -> Self {
        Table::Spectral {
            page: page.page,
            orientation: page.orientation,
            window,
            dims: page.dims.clone(),
            valid: page.valid.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
    pub timing_us: u64,
    pub exit_status: i32,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report { command, verdicts: Vec::new(), tables: Vec::new(), timing_us: 0, exit_status: EXIT_OK }
    }

    pub fn all_ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "$ {}", self.command.join(" ")).unwrap();
        if !self.verdicts.is_empty() {
            let width = self.verdicts.iter().map(|v| v.check.chars().count()).max().unwrap_or(0);
            for v in &self.verdicts {
                let status = if v.ok { "ok" } else { "FAILED" };
                write!(out, "  {:<width$}  {status}", v.check).unwrap();
                if let Some(w) = &v.witness {
                    write!(out, ": {w}").unwrap();
                }
                out.push('\n');
            }
        }
        for t in &self.tables {
            render_table(&mut out, t);
        }
        writeln!(out, "time {} ms, exit {}", self.timing_us / 1000, self.exit_status).unwrap();
        out
    }
}

fn render_rows(out: &mut String, rows: &[Vec<String>]) {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    for row in rows {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        writeln!(out, "  {}", cells.join("  ").trim_end()).unwrap();
    }
}

fn render_table(out: &mut String, t: &Table) {
    match t {
        Table::Cohomology { window, dims } => {
            writeln!(out, "total cohomology, window ({}, {})", window.0, window.1).unwrap();
            let mut rows = vec![vec!["n".to_string()], vec!["dim H^n".to_string()]];
            for (n, d) in dims.iter().enumerate() {
                rows[0].push(n.to_string());
                rows[1].push(d.to_string());
            }
            render_rows(out, &rows);
        }
        Table::Spectral { page, orientation, window, dims, valid } => {
            writeln!(out, "E{page} page, {orientation}, window ({}, {}); rows p, columns q, '.' masked", window.0, window.1)
                .unwrap();
            let q_count = dims.first().map_or(0, Vec::len);
            let mut rows = vec![std::iter::once("p\\q".to_string()).chain((0..q_count).map(|q| q.to_string())).collect()];
            for (p, (d, v)) in dims.iter().zip(valid).enumerate() {
                let mut row = vec![p.to_string()];
                row.extend(d.iter().zip(v).map(|(d, &ok)| if ok { d.to_string() } else { ".".to_string() }));
                rows.push(row);
            }
            render_rows(out, &rows);
        }
        Table::Nerve { level, tuples } => {
            writeln!(out, "nerve level {level}: {} tuples", tuples.len()).unwrap();
            let mut rows = vec![vec!["tuple".to_string(), "fiber dim".to_string()]];
            rows.extend(tuples.iter().map(|r| vec![r.tuple.clone(), r.fiber_dim.to_string()]));
            render_rows(out, &rows);
        }
        Table::Selftest { criteria } => {
            for c in criteria {
                writeln!(out, "  {c}").unwrap();
            }
        }
    }
}
