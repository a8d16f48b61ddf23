//! Flat `key = value` config files, expanded into command-line flags.
//!
//! `subcommand = game` names the command when none is given on the command
//! line. Every other key becomes `--key value` (underscores become dashes);
//! `true` becomes a bare switch and `false` drops it. Flags given on the
//! command line come later and override the file.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Parses a config file body into ordered `(key, value)` pairs.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key = value, got `{line}`", lineno + 1);
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            bail!("config line {}: empty key", lineno + 1);
        }
        out.push((key, v.trim().trim_matches('"').to_string()));
    }
    Ok(out)
}

/// Removes `--config <path>` from `args` and splices the file's flags in
/// right after the subcommand, one of `names`.
pub fn expand(args: Vec<String>, names: &[String]) -> Result<Vec<String>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut path = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().context("--config needs a path")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config {path}"))?;
    let mut flags = Vec::new();
    let mut subcommand = None;
    for (k, v) in parse(&text)? {
        match (k.as_str(), v.as_str()) {
            ("subcommand", _) => subcommand = Some(v),
            (_, "true") => flags.push(format!("--{k}")),
            (_, "false") => {}
            _ => {
                flags.push(format!("--{k}"));
                flags.push(v);
            }
        }
    }
    let pos = rest.iter().skip(1).position(|a| names.contains(a)).map(|p| p + 1);
    let at = match (pos, subcommand) {
        (Some(p), _) => p + 1,
        (None, Some(s)) => {
            rest.insert(1, s);
            2
        }
        (None, None) => bail!("config {path} names no subcommand and none was given"),
    };
    rest.splice(at..at, flags);
    Ok(rest)
}
