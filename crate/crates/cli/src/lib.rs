//! Batch front end: reads a TOML problem spec, runs one job and produces a
//! JSON report (or a flat CSV table).

pub mod error;
mod jobs;
pub mod quantity;
pub mod report;
pub mod spec;

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub use error::CliError;
pub use quantity::{Quantity, Unit};
pub use report::Report;
pub use spec::{parse_spec, OutputFormat, ParsedSpec, ProblemSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Measure,
    Exponents,
    Verify,
    Universal,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Measure => "measure",
            Command::Exponents => "exponents",
            Command::Verify => "verify",
            Command::Universal => "universal",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
    /// Stamp the report with the current time.
    pub timestamp: bool,
}

/// Reads and parses a spec file; relative file references resolve against its directory.
pub fn load_spec(path: &Path) -> Result<ParsedSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Spec(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text, path.parent().unwrap_or(Path::new(".")))
}

pub fn run(parsed: &ParsedSpec, command: Command, opts: &RunOptions) -> Result<Report, CliError> {
    spec::check_for_command(&parsed.spec, command)?;
    for w in &parsed.warnings {
        log::warn!("{w}");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;

    let spec = &parsed.spec;
    let generated_at_unix = opts
        .timestamp
        .then(|| SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
    let mut report = Report {
        report_version: spec.spec_version,
        command: command.name().into(),
        provenance: report::Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generated_at_unix,
            tolerances: report::Tolerances {
                solver_tol: Quantity::prob(spec.solver.tol),
                max_sweeps: Quantity::new(spec.solver.max_sweeps as f64, Unit::Sweeps),
                order_one_band: Quantity::order(renyi_hyp::prob::ORDER_ONE_BAND),
                lp_feasibility: Quantity::prob(renyi_hyp::oracle::lp::LP_TOL),
                type_cap: Quantity::new(spec.oracle.type_cap as f64, Unit::Count),
                grid_resolution: Quantity::count(spec.oracle.grid_resolution),
                max_members: Quantity::count(spec.oracle.max_members),
            },
        },
        warnings: parsed.warnings.clone(),
        non_converged: Vec::new(),
        spec: spec.clone(),
        measures: Vec::new(),
        exponents: None,
        verify: Vec::new(),
        universal: Vec::new(),
    };
    log::info!("running {} job", command.name());
    pool.install(|| -> Result<(), CliError> {
        let nc = &mut report.non_converged;
        match command {
            Command::Measure => report.measures = jobs::measure(parsed, nc)?,
            Command::Exponents => report.exponents = Some(jobs::exponents(parsed, nc)?),
            Command::Verify => report.verify = jobs::verify(parsed, nc)?,
            Command::Universal => report.universal = jobs::universal(parsed, nc)?,
        }
        Ok(())
    })?;
    Ok(report)
}

/// Renders a report in the requested format.
pub fn render(report: &Report, format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Report => report.to_json(),
        OutputFormat::Table => report.to_csv(),
    }
}
