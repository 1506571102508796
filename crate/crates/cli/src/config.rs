//! `--config` files: one `key=value` per line, `#` starts a comment. A key
//! names a long flag and is used only when the command line does not set
//! that flag itself. Boolean flags take `true` or `false`.

use std::collections::HashSet;

use anyhow::{bail, Context};
use clap::Command;

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn subcommand<'a>(cmd: &'a Command, argv: &[String]) -> Option<&'a Command> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            it.next();
        } else if !a.starts_with('-') {
            return cmd.find_subcommand(a);
        }
    }
    None
}

fn is_set(argv: &[String], long: &str) -> bool {
    let flag = format!("--{long}");
    let prefix = format!("--{long}=");
    argv.iter().any(|a| *a == flag || a.starts_with(&prefix))
}

pub fn merge(cmd: &Command, mut argv: Vec<String>) -> anyhow::Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let known: HashSet<String> = cmd
        .get_subcommands()
        .flat_map(|s| s.get_arguments())
        .chain(cmd.get_arguments())
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();
    let Some(sub) = subcommand(cmd, &argv) else {
        return Ok(argv);
    };
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{path}:{}: expected key=value", i + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        if key == "config" || !known.contains(key) {
            bail!("{path}:{}: unknown key `{key}`", i + 1);
        }
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key));
        let Some(arg) = arg else {
            // Meant for another subcommand.
            continue;
        };
        if is_set(&argv, key) {
            continue;
        }
        if arg.get_action().takes_values() {
            extra.push(format!("--{key}={value}"));
        } else {
            match value {
                "true" => extra.push(format!("--{key}")),
                "false" => {}
                _ => bail!("{path}:{}: `{key}` takes true or false", i + 1),
            }
        }
    }
    argv.extend(extra);
    Ok(argv)
}
