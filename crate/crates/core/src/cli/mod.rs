//! Command-line front end.
//!
//! [`input`] reads and writes mixture-pair files, [`commands`] implements the
//! subcommands as functions returning their rendered output, and
//! [`experiment`] holds the random-mixture protocol used for benchmarking.

pub mod commands;
pub mod experiment;
pub mod input;

use std::fmt;

/// Failure of a CLI command, mapped onto a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or a malformed/invalid input file (exit code 2).
    Usage(String),
    /// A numerical routine failed (exit code 3).
    Numerical(String),
    /// Reading or writing a file failed (exit code 1).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "error: {s}"),
            CliError::Numerical(s) => write!(f, "numerical failure: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Numerical(s) => CliError::Numerical(s),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Float formatting for CSV and text output: 17 significant digits in
/// scientific notation, `inf`/`-inf`/`nan` for non-finite values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, f64::MAX] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_f64(f64::NAN), "nan");
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }
}
