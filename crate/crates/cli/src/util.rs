use std::io::{Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context};

/// Contents of `path`, or of stdin for `-`.
pub fn read_input(path: &Path) -> anyhow::Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes to `path`, or to stdout when there is none.
pub fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => stdout(text),
    }
}

/// Writes to stdout. A reader that went away, as in `| head`, is not an
/// error.
pub fn stdout(text: &str) -> anyhow::Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

pub fn print_json(v: &serde_json::Value) {
    let _ = stdout(&pretty(v));
}

pub fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Parses `x=2,y=3`. Later duplicates are rejected.
pub fn parse_assignments(s: &str) -> anyhow::Result<Vec<(String, u64)>> {
    let mut out: Vec<(String, u64)> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("expected name=value, got `{part}`"))?;
        let (k, v) = (k.trim(), v.trim());
        if out.iter().any(|(x, _)| x == k) {
            bail!("`{k}` assigned twice");
        }
        let v: u64 = v.parse().with_context(|| format!("value of `{k}`"))?;
        out.push((k.to_string(), v));
    }
    Ok(out)
}

pub fn parse_vector(s: &str) -> anyhow::Result<Vec<u64>> {
    s.split(',')
        .map(|p| p.trim().parse::<u64>().with_context(|| format!("bad vector entry `{p}`")))
        .collect()
}

/// A count such as `5000000`, `5e6` or `2.5e3`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if !(x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64) {
        return Err(format!("`{s}` is not a whole nonnegative number"));
    }
    Ok(x as u64)
}

/// A byte size with an optional `K`, `M` or `G` suffix (powers of 1024).
pub fn parse_bytes(s: &str) -> Option<u64> {
    let s = s.trim();
    let (num, mult) = match s.char_indices().last()? {
        (i, 'k' | 'K') => (&s[..i], 1 << 10),
        (i, 'm' | 'M') => (&s[..i], 1 << 20),
        (i, 'g' | 'G') => (&s[..i], 1 << 30),
        _ => (s, 1),
    };
    num.trim().parse::<u64>().ok()?.checked_mul(mult)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("5e6"), Ok(5_000_000));
        assert_eq!(parse_count("12"), Ok(12));
        assert_eq!(parse_count("2.5e3"), Ok(2500));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn bytes() {
        assert_eq!(parse_bytes("2K"), Some(2048));
        assert_eq!(parse_bytes("3G"), Some(3 << 30));
        assert_eq!(parse_bytes("100"), Some(100));
        assert_eq!(parse_bytes("x"), None);
    }

    #[test]
    fn assignments() {
        assert_eq!(parse_assignments("x=2, y=0").unwrap(), [("x".into(), 2), ("y".into(), 0)]);
        assert!(parse_assignments("x=2,x=3").is_err());
        assert!(parse_assignments("x").is_err());
        assert!(parse_assignments("").unwrap().is_empty());
    }
}
