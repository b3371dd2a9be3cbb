//! `key = value` config files. Each key is the long name of a flag; the
//! values are spliced into the argument list ahead of the command-line flags,
//! so flags given on the command line win.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::{ArgAction, Command};

pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn longs(cmd: &Command, into: &mut BTreeSet<String>) {
    for a in cmd.get_arguments() {
        if let Some(l) = a.get_long() {
            into.insert(l.to_string());
        }
    }
    for s in cmd.get_subcommands() {
        longs(s, into);
    }
}

/// Inserts the config entries that apply to the subcommand `path` right
/// after the subcommand's name in `raw`. Keys no command knows are an error;
/// keys of other commands are skipped.
pub fn splice(root: &Command, raw: &[OsString], path: &[&str], file: &Path) -> Result<Vec<OsString>, String> {
    let text = fs::read_to_string(file).map_err(|e| format!("cannot read config {}: {e}", file.display()))?;
    let entries = parse(&text)?;

    let mut root = root.clone();
    root.build();
    let mut leaf = &root;
    for name in path {
        leaf = leaf.find_subcommand(name).expect("path comes from a successful parse");
    }
    let mut known = BTreeSet::new();
    longs(&root, &mut known);

    let mut tokens = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        if !known.contains(&key) {
            return Err(format!("config key `{key}` is not a flag of any command"));
        }
        let Some(arg) = leaf.get_arguments().find(|a| a.get_long() == Some(key.as_str())) else {
            continue;
        };
        match arg.get_action() {
            ArgAction::SetTrue => match value.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "" => tokens.push(OsString::from(format!("--{key}"))),
                "false" | "no" | "0" => {}
                _ => return Err(format!("config key `{key}` expects true or false, got `{value}`")),
            },
            _ => tokens.push(OsString::from(format!("--{key}={value}"))),
        }
    }

    let mut at = 0;
    for name in path {
        at += 1 + raw[at + 1..]
            .iter()
            .position(|t| t == name)
            .expect("subcommand name present in arguments");
    }
    let mut out = raw[..=at].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&raw[at + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let e = parse("# run\nin_fmt = U1.3\n\nhazard-free=true  # trailing\n").unwrap();
        assert_eq!(e, [("in-fmt".to_string(), "U1.3".to_string()), ("hazard-free".into(), "true".into())]);
        assert!(parse("just a line").is_err());
        assert!(parse(" = 3").is_err());
    }
}
