//! `varmotion` command-line front end.
//!
//! Exit codes: 0 success, 1 an acceptance suite had failures, 2 usage
//! error, 3 domain/parameter/model or I/O error.

use std::io;
use std::process::ExitCode;

use clap::{Command, CommandFactory, FromArgMatches};

mod args;
mod output;
mod run;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Model(varmotion::Error),
    Io(io::Error),
}

impl From<varmotion::Error> for CliError {
    fn from(e: varmotion::Error) -> Self {
        CliError::Model(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// The clap tree with negative numbers accepted as values everywhere.
fn command() -> Command {
    fn allow(cmd: Command) -> Command {
        cmd.allow_negative_numbers(true).mut_subcommands(allow)
    }
    allow(args::Cli::command())
}

fn parse<I, T>(argv: I) -> Result<args::Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = command().try_get_matches_from(argv)?;
    args::Cli::from_arg_matches(&matches)
}

fn main() -> ExitCode {
    let cli = parse(std::env::args_os()).unwrap_or_else(|e| e.exit());
    let result = run::dispatch(cli.command).and_then(|emit| {
        output::write(&emit.text, emit.out.as_deref())?;
        Ok(emit.code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("varmotion: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn run(argv: &[&str]) -> Result<run::Emit, CliError> {
        let mut full = vec!["varmotion"];
        full.extend_from_slice(argv);
        let cli = parse(full).map_err(|e| CliError::Usage(e.to_string()))?;
        run::dispatch(cli.command)
    }

    fn csv_rows(text: &str) -> Vec<Vec<String>> {
        text.lines()
            .skip(2)
            .map(|l| l.split(',').map(str::to_owned).collect())
            .collect()
    }

    #[test]
    fn clap_definition_is_consistent() {
        command().debug_assert();
    }

    #[test]
    fn telegraph_density_grid() {
        let e = run(&["telegraph", "density", "--lambda", "1", "--c", "1", "--t", "1", "--grid", "101"]).unwrap();
        let lines: Vec<&str> = e.text.lines().collect();
        assert!(lines[0].starts_with("# ") && lines[0].contains("\"command\":\"telegraph density\""));
        assert_eq!(lines[1], "z,f");
        let rows = csv_rows(&e.text);
        assert_eq!(rows.len(), 101);
        assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() > 0.0));
    }

    #[test]
    fn euler_coefficients() {
        let e = run(&["euler", "--n", "2", "--a", "1", "--theta", "1"]).unwrap();
        let v: Value = serde_json::from_str(&e.text).unwrap();
        let c: Vec<f64> = serde_json::from_value(v["coefficients"].clone()).unwrap();
        assert_eq!(c, vec![0.0, -1.0, 1.0]);
        let e = run(&["euler", "--n", "2", "--a", "1", "--theta", "1", "--x", "3"]).unwrap();
        let v: Value = serde_json::from_str(&e.text).unwrap();
        assert_eq!(v["value"], 6.0);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["telegraph", "density", "--bogus", "1"]).err().unwrap().code(), 2);
        assert_eq!(run(&["nope"]).err().unwrap().code(), 2);
        assert_eq!(run(&["telegraph", "density", "--lambda", "-1"]).err().unwrap().code(), 3);
        assert_eq!(run(&["euler", "--n", "2", "--a", "1", "--theta", "-0.5"]).err().unwrap().code(), 3);
        assert_eq!(run(&["euler", "--n", "65", "--a", "1", "--theta", "1"]).err().unwrap().code(), 3);
        assert_eq!(run(&["telegraph", "moments", "--replicas", "10"]).err().unwrap().code(), 2);
        assert_eq!(run(&["timevar", "cov", "--sigma", "table"]).err().unwrap().code(), 2);
        assert_eq!(run(&["motion1d", "density", "--family", "logistic", "--x0", "1.5"]).err().unwrap().code(), 3);
    }

    #[test]
    fn sampling_is_deterministic() {
        let argv = ["planar", "sample", "--p", "0.3", "--replicas", "50", "--seed", "9"];
        let (a, b) = (run(&argv).unwrap().text, run(&argv).unwrap().text);
        assert_eq!(a, b);
        assert_eq!(csv_rows(&a).len(), 50);
        let other = run(&["planar", "sample", "--p", "0.3", "--replicas", "50", "--seed", "10"]).unwrap();
        assert_ne!(a, other.text);
    }

    #[test]
    fn every_subcommand_runs() {
        let cases: &[&[&str]] = &[
            &["telegraph", "sample", "--replicas", "20", "--seed", "1"],
            &["telegraph", "cdf", "--grid", "11"],
            &["telegraph", "moments", "--n", "4", "--replicas", "200", "--seed", "1"],
            &["motion1d", "sample", "--family", "power", "--variant", "absorb", "--x0", "0.3", "--replicas", "20", "--seed", "2"],
            &["motion1d", "density", "--family", "logistic", "--x0", "0.3", "--grid", "11"],
            &["motion1d", "support", "--family", "linear", "--x0", "2"],
            &["motion1d", "moments", "--family", "logistic", "--x0", "0.3", "--replicas", "100", "--seed", "3"],
            &["planar", "density", "--grid", "7", "--family", "symlogistic"],
            &["planar", "boundary", "--replicas", "100", "--seed", "4"],
            &["planar", "support", "--points", "5"],
            &["dirdep", "sample", "--start", "d1", "--replicas", "20", "--seed", "5"],
            &["dirdep", "mean", "--grid", "3", "--replicas", "50", "--seed", "5"],
            &["dirdep", "condmean", "--n", "2"],
            &["dirdep", "collapse", "--c", "3", "--replicas", "100", "--seed", "6"],
            &["timevar", "sample", "--sigma", "linear", "--replicas", "20", "--seed", "7"],
            &["timevar", "cov", "--sigma", "affine", "--sigma-a", "1", "--sigma-b", "0.5", "--s", "0.5"],
            &["timevar", "limit", "--grid", "9"],
            &["geo2d", "sample", "--p", "0.3", "--replicas", "20", "--seed", "8"],
            &["geo2d", "density", "--grid", "5"],
            &["geo2d", "limit", "--p", "0.3", "--grid", "5"],
            &["geo2d", "params", "--p", "0.3", "--format", "json"],
        ];
        for argv in cases {
            let e = run(argv).unwrap_or_else(|err| panic!("{argv:?}: {err}"));
            assert_eq!(e.code, 0);
            assert!(e.text.ends_with('\n'));
        }
    }

    #[test]
    fn json_tables_echo_the_config() {
        let e = run(&["geo2d", "params", "--p", "0.25", "--format", "json"]).unwrap();
        let v: Value = serde_json::from_str(&e.text).unwrap();
        assert_eq!(v["meta"]["p"], 0.25);
        assert_eq!(v["meta"]["version"], varmotion::VERSION);
        assert_eq!(v["columns"][4], "rho");
        assert_eq!(v["rows"][0][4], -0.5);
    }

    #[test]
    fn table_sigma_from_file() {
        let dir = std::env::temp_dir().join(format!("varmotion-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sigma.csv");
        std::fs::write(&path, "t,sigma\n0,1\n0.5,1\n2,1\n").unwrap();
        let p = path.to_str().unwrap();
        let e = run(&["timevar", "cov", "--sigma", "table", "--table", p, "--lambda", "2"]).unwrap();
        let rows = csv_rows(&e.text);
        let cov: f64 = rows[0][2].parse().unwrap();
        let params = varmotion::telegraph::TelegraphParams::new(2.0, 1.0).unwrap();
        assert!((cov - varmotion::timevar::unit_sigma_variance(&params, 1.0)).abs() < 1e-8);
        std::fs::remove_dir_all(dir).ok();
    }
}
