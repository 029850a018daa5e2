//! Float text used in every report and CSV.

use crate::error::CliError;

/// Environment variable selecting a fixed number of significant digits.
pub const PRECISION_ENV: &str = "LASEKIT_PRECISION";

/// Shortest round-trip text by default, or a fixed count of significant
/// digits in scientific notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FloatFormat {
    digits: Option<usize>,
}

impl FloatFormat {
    pub fn shortest() -> Self {
        Self { digits: None }
    }

    pub fn significant(digits: usize) -> Result<Self, CliError> {
        if !(1..=17).contains(&digits) {
            return Err(CliError::config(format!("{PRECISION_ENV}: expected 1..=17 digits, got {digits}")));
        }
        Ok(Self { digits: Some(digits) })
    }

    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var(PRECISION_ENV) {
            Ok(v) if !v.trim().is_empty() => {
                let digits = v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::config(format!("{PRECISION_ENV}: expected an integer, got `{v}`")))?;
                Self::significant(digits)
            }
            _ => Ok(Self::shortest()),
        }
    }

    pub fn is_shortest(&self) -> bool {
        self.digits.is_none()
    }

    pub fn fmt(&self, v: f64) -> String {
        if v.is_nan() {
            return "nan".into();
        }
        if v.is_infinite() {
            return if v > 0.0 { "inf".into() } else { "-inf".into() };
        }
        match self.digits {
            Some(d) => format!("{:.*e}", d - 1, v),
            // Both forms are the shortest text that parses back to `v`.
            None if v == 0.0 || (1e-4..1e15).contains(&v.abs()) => format!("{v}"),
            None => format!("{v:e}"),
        }
    }
}
