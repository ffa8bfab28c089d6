//! The `laq` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::dcx::{assemble, e1_page, e2_page, total_cohomology, Orientation};
use crate::fingroupoid::validate_groupoid;
use crate::laq::{check_multiplicative, nerve_algebroid, validate_la, LaGroupoid};
use crate::model::{self, ModelError};
use crate::report::{NerveRow, Report, Table, Verdict, EXIT_FAILURE, EXIT_OK, EXIT_PARSE};
use crate::selftest;

#[derive(Parser, Debug)]
#[command(name = "laq", version, about = "Exact cohomology of LA-groupoids over finite bases")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the groupoid axioms, the fiber brackets, the LA-groupoid conditions and multiplicativity.
    Validate { file: PathBuf },
    /// Dimensions of the total cohomology.
    Cohomology {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        /// Truncation window P,Q; must be at least N+1 in both directions.
        #[arg(long, value_parser = parse_window)]
        window: Option<(usize, usize)>,
    },
    /// First or second page of the spectral sequence.
    Spectral {
        file: PathBuf,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
        page: u8,
        #[arg(long, default_value = "delta-first", value_parser = parse_orientation)]
        orientation: Orientation,
        #[arg(long, value_parser = parse_window, default_value = "4,4")]
        window: (usize, usize),
    },
    /// Composable tuples at one nerve level with their fiber dimensions.
    Nerve {
        file: PathBuf,
        #[arg(short = 'q', long = "level", default_value_t = 1)]
        level: usize,
    },
    /// Run the acceptance suite.
    Selftest,
}

fn parse_window(s: &str) -> Result<(usize, usize), String> {
    let (p, q) = s.split_once(',').ok_or("expected P,Q")?;
    Ok((p.trim().parse().map_err(|e| format!("{e}"))?, q.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_orientation(s: &str) -> Result<Orientation, String> {
    s.parse()
}

/// Parses `args` (including the program name), runs the command and writes
/// the report. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let echo = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let start = Instant::now();
    let mut report = execute(&cli.command, Report::new(echo));
    report.timing_us = start.elapsed().as_micros() as u64;
    let rendered = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    let _ = stdout.write_all(rendered.as_bytes());
    if report.exit_status != EXIT_OK {
        if let Some(v) = report.verdicts.iter().find(|v| !v.ok) {
            let _ = writeln!(stderr, "laq: {} failed: {}", v.check, v.witness.as_deref().unwrap_or(""));
        }
    }
    report.exit_status
}

fn execute(command: &Command, mut report: Report) -> Report {
    let file = match command {
        Command::Selftest => {
            let outcomes = selftest::run_all();
            for o in &outcomes {
                report.verdicts.push(if o.passed {
                    Verdict::pass(format!("criterion {}", o.id))
                } else {
                    Verdict::fail(format!("criterion {}", o.id), &o.detail)
                });
            }
            report.tables.push(Table::Selftest { criteria: outcomes });
            report.exit_status = if report.all_ok() { EXIT_OK } else { EXIT_FAILURE };
            return report;
        }
        Command::Validate { file }
        | Command::Cohomology { file, .. }
        | Command::Spectral { file, .. }
        | Command::Nerve { file, .. } => file,
    };
    let Some(l) = load(file, &mut report) else { return report };
    if !validate(&l, &mut report) {
        report.exit_status = EXIT_FAILURE;
        return report;
    }
    let result = match command {
        Command::Validate { .. } | Command::Selftest => Ok(()),
        Command::Cohomology { max_degree, window, .. } => {
            let window = window.unwrap_or((max_degree + 1, max_degree + 1));
            assemble(&l, window.0, window.1)
                .and_then(|c| total_cohomology(&c, *max_degree))
                .map(|t| report.tables.push(Table::Cohomology { window: t.window, dims: t.dims }))
                .map_err(|e| Verdict::fail("cohomology", e))
        }
        Command::Spectral { page, orientation, window, .. } => assemble(&l, window.0, window.1)
            .map(|c| {
                let p = if *page == 1 { e1_page(&c, *orientation) } else { e2_page(&c, *orientation) };
                report.tables.push(Table::spectral(&p, *window));
            })
            .map_err(|e| Verdict::fail("spectral sequence", e)),
        Command::Nerve { level, .. } => nerve_algebroid(&l, *level)
            .map(|n| {
                let tuples = n
                    .fibers
                    .iter()
                    .map(|f| NerveRow { tuple: f.tuple.display(l.base()), fiber_dim: f.dim() })
                    .collect();
                report.tables.push(Table::Nerve { level: *level, tuples });
            })
            .map_err(|e| Verdict::fail("nerve", e)),
    };
    if let Err(v) = result {
        report.verdicts.push(v);
        report.exit_status = EXIT_FAILURE;
    }
    report
}

fn load(file: &Path, report: &mut Report) -> Option<LaGroupoid> {
    let bytes = match std::fs::read(file) {
        Ok(b) => b,
        Err(e) => {
            report.verdicts.push(Verdict::fail("read", format!("{}: {e}", file.display())));
            report.exit_status = EXIT_PARSE;
            return None;
        }
    };
    match model::load(&bytes) {
        Ok(l) => {
            report.verdicts.push(Verdict::pass("parse"));
            Some(l)
        }
        Err(e @ ModelError::Build(_)) => {
            report.verdicts.push(Verdict::pass("parse"));
            report.verdicts.push(Verdict::fail("build", e));
            report.exit_status = EXIT_FAILURE;
            None
        }
        Err(e) => {
            report.verdicts.push(Verdict::fail("parse", e));
            report.exit_status = EXIT_PARSE;
            None
        }
    }
}

/// Runs the checks in order and records a verdict for each; stops at the first failure.
fn validate(l: &LaGroupoid, report: &mut Report) -> bool {
    let fibers = |name: &str, b: &crate::liealg::LieFiberBundle| {
        b.validate().map_err(|(i, f)| format!("{name} fiber over {}: {f}", b.labels()[i]))
    };
    let checks: [(&str, Box<dyn Fn() -> Result<(), String> + '_>); 4] = [
        ("groupoid axioms", Box::new(|| validate_groupoid(l.base()).map_err(|e| e.to_string()))),
        ("fiber brackets", Box::new(|| fibers("A", l.side()).and_then(|_| fibers("Ω", l.top())))),
        ("LA-groupoid conditions", Box::new(|| validate_la(l).map_err(|e| e.to_string()))),
        ("multiplicativity", Box::new(|| check_multiplicative(l).map_err(|e| e.to_string()))),
    ];
    for (name, check) in checks {
        match check() {
            Ok(()) => report.verdicts.push(Verdict::pass(name)),
            Err(w) => {
                report.verdicts.push(Verdict::fail(name, w));
                return false;
            }
        }
    }
    true
}
