//! Config-file loading, range syntax and flag resolution.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

/// A scalar from the config file; numbers and strings both feed the same
/// parsers as the command line.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl Scalar {
    pub fn as_text(&self) -> String {
        match self {
            Scalar::Int(v) => v.to_string(),
            Scalar::Float(v) => v.to_string(),
            Scalar::Bool(v) => v.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }
}

/// Flat key-value config file. Keys mirror the long flag names with `-`
/// replaced by `_`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<Scalar>,
    pub i: Option<Scalar>,
    pub r: Option<Scalar>,
    pub askew: Option<Scalar>,
    pub px: Option<Scalar>,
    pub pz: Option<Scalar>,
    pub pz_lo: Option<Scalar>,
    pub pz_hi: Option<Scalar>,
    pub period: Option<Scalar>,
    pub trials: Option<Scalar>,
    pub horizon: Option<Scalar>,
    pub max_iter: Option<Scalar>,
    pub mode: Option<Scalar>,
    pub seed: Option<Scalar>,
    pub jobs: Option<Scalar>,
    pub serial: Option<Scalar>,
    pub policy: Option<Scalar>,
    pub prior: Option<Scalar>,
    pub prior_window: Option<Scalar>,
    pub prior_init: Option<Scalar>,
    pub initial_r: Option<Scalar>,
    pub out: Option<Scalar>,
    pub json: Option<Scalar>,
    pub out_dir: Option<Scalar>,
    pub stem: Option<Scalar>,
    pub alist: Option<Scalar>,
    pub syndrome: Option<Scalar>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("--config: cannot read {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("--config: {}: {e}", path.display())))
    }
}

/// Command-line text wins over the config file; `None` when neither is set.
pub fn pick(flag: &Option<String>, file: &Option<Scalar>) -> Option<String> {
    flag.clone().or_else(|| file.as_ref().map(Scalar::as_text))
}

pub fn parse_value<T: std::str::FromStr>(flag: &str, text: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    text.trim()
        .parse()
        .map_err(|e| CliError::Usage(format!("--{flag}: cannot parse {text:?}: {e}")))
}

/// Resolves one scalar flag, falling back to `default`.
pub fn resolve<T: std::str::FromStr>(
    flag: &str,
    cli: &Option<String>,
    file: &Option<Scalar>,
    default: T,
) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    match pick(cli, file) {
        Some(text) => parse_value(flag, &text),
        None => Ok(default),
    }
}

pub fn require<T: std::str::FromStr>(
    flag: &str,
    cli: &Option<String>,
    file: &Option<Scalar>,
) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    let text = pick(cli, file).ok_or_else(|| CliError::Usage(format!("--{flag} is required")))?;
    parse_value(flag, &text)
}

/// Rounds away binary noise from accumulated steps, e.g. 0.01 + 3·0.005.
fn tidy(x: f64) -> f64 {
    format!("{x:.12}").parse().expect("formatted float parses")
}

/// Parses `lo:hi:step` (inclusive), a comma list, or a single value.
pub fn parse_f64_range(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: &str| CliError::Usage(format!("--{flag}: {msg} in {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step): (f64, f64, f64) = (
                parse_value(flag, lo)?,
                parse_value(flag, hi)?,
                parse_value(flag, step)?,
            );
            if step.is_nan() || step <= 0.0 || hi < lo {
                return Err(bad("range needs lo <= hi and a positive step"));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|k| tidy(lo + k as f64 * step)).collect())
        }
        [_] => text.split(',').map(|t| parse_value(flag, t)).collect(),
        _ => Err(bad("expected lo:hi:step")),
    }
}

pub fn parse_u32_range(flag: &str, text: &str) -> Result<Vec<u32>, CliError> {
    let bad = |msg: &str| CliError::Usage(format!("--{flag}: {msg} in {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step): (u32, u32, u32) = (
                parse_value(flag, lo)?,
                parse_value(flag, hi)?,
                parse_value(flag, step)?,
            );
            if step == 0 || hi < lo {
                return Err(bad("range needs lo <= hi and a positive step"));
            }
            Ok((lo..=hi).step_by(step as usize).collect())
        }
        [lo, hi] => {
            let (lo, hi): (u32, u32) = (parse_value(flag, lo)?, parse_value(flag, hi)?);
            if hi < lo {
                return Err(bad("range needs lo <= hi"));
            }
            Ok((lo..=hi).collect())
        }
        [_] => text.split(',').map(|t| parse_value(flag, t)).collect(),
        _ => Err(bad("expected lo:hi:step")),
    }
}

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "AQNCC_OUT_DIR";

pub fn output_dir(cli: &Option<String>, file: &Option<Scalar>) -> PathBuf {
    pick(cli, file)
        .or_else(|| std::env::var(OUT_DIR_ENV).ok())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}
