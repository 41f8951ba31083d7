//! Command-line front end: parses arguments, runs one library pipeline and
//! writes an `mgl-report/1` JSON report.
//!
//! Exit codes: 0 success, 1 invalid input, 2 solver failure, 3 I/O error.

pub mod args;
pub mod commands;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::Parser;

pub use commands::load_surface;
pub use error::{CliError, CliResult};

/// Runs the command line `argv` (program name first) against the process's
/// standard streams and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// [`run`] with explicit output streams; the report goes to `out` unless
/// `--output` is given, messages go to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    match go(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn go(cli: &args::Cli, out: &mut dyn Write) -> CliResult<()> {
    configure_threads()?;
    let t0 = Instant::now();
    let (report, output) = commands::execute(&cli.command)?;
    let text = report.render(t0.elapsed().as_secs_f64() * 1e3);
    match output {
        Some(path) => std::fs::write(&path, text).map_err(|e| CliError::io(&path, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

/// Sizes the global worker pool from `MGL_THREADS`. The pool can only be set
/// once per process; later calls keep the first size.
fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("MGL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("MGL_THREADS must be a positive integer, got `{v}`")))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
