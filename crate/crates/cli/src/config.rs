//! Config files: a TOML table whose keys are flag names. Top-level keys apply
//! to every subcommand, a `[subcommand]` table only to that one. The values
//! are spliced in as flags ahead of the command line, so explicit flags win.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::CliError;

const GLOBAL_VALUE_FLAGS: [&str; 3] = ["--format", "--output", "-o"];

fn tokens_for(key: &str, value: &toml::Value, out: &mut Vec<OsString>) -> Result<(), CliError> {
    let flag = format!("--{key}");
    let scalar = |v: &toml::Value| -> Result<String, CliError> {
        match v {
            toml::Value::String(s) => Ok(s.clone()),
            toml::Value::Integer(i) => Ok(i.to_string()),
            toml::Value::Float(f) => Ok(f.to_string()),
            _ => Err(CliError::Validation(format!("config key `{key}`: unsupported value"))),
        }
    };
    match value {
        toml::Value::Boolean(true) => out.push(flag.into()),
        toml::Value::Boolean(false) => {}
        toml::Value::Array(items) => {
            let parts = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
            out.push(flag.into());
            out.push(parts.join(",").into());
        }
        v => {
            out.push(flag.into());
            out.push(scalar(v)?.into());
        }
    }
    Ok(())
}

/// Flags contributed by `path` for `command`.
pub fn config_tokens(path: &Path, command: &str) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Validation(format!("invalid config {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (key, value) in &table {
        match value {
            toml::Value::Table(section) if key == command => {
                for (k, v) in section {
                    tokens_for(k, v, &mut out)?;
                }
            }
            toml::Value::Table(_) => {}
            _ if key == "config" => {
                return Err(CliError::Validation("config files cannot nest".into()));
            }
            v => tokens_for(key, v, &mut out)?,
        }
    }
    Ok(out)
}

/// Index of the subcommand name and the `--config` value, if any.
pub fn scan(args: &[OsString]) -> (Option<usize>, Option<PathBuf>) {
    let mut config = None;
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if let Some(v) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(v));
        } else if s == "--config" {
            config = args.get(i + 1).map(PathBuf::from);
            i += 1;
        } else if GLOBAL_VALUE_FLAGS.contains(&s.as_ref()) {
            i += 1;
        } else if !s.starts_with('-') {
            return (Some(i), config.or_else(|| scan_rest(&args[i + 1..])));
        }
        i += 1;
    }
    (None, config)
}

fn scan_rest(args: &[OsString]) -> Option<PathBuf> {
    let mut found = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if let Some(v) = s.strip_prefix("--config=") {
            found = Some(PathBuf::from(v));
        } else if s == "--config" {
            found = it.next().map(PathBuf::from);
        }
    }
    found
}

/// `args` with `extra` inserted directly after position `pos`.
pub fn splice(args: &[OsString], pos: usize, extra: Vec<OsString>) -> Vec<OsString> {
    let mut out = args[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[pos + 1..]);
    out
}
