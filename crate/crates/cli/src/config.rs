//! `key = value` config files, merged into the command line as `--key value`
//! unless the flag is already given.

use std::fs;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Entry>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("line {}: expected key = value, got {raw:?}", i + 1));
        };
        let key = k.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(format!("line {}: bad key {key:?}", i + 1));
        }
        out.push(Entry {
            line: i + 1,
            key: key.replace('_', "-"),
            value: v.trim().to_string(),
        });
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
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

fn given(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
}

/// Appends config entries to `args`; returns the merged list and the entries
/// that were used, for error messages.
pub fn merge(args: Vec<String>) -> Result<(Vec<String>, Vec<Entry>), String> {
    let Some(path) = config_path(&args) else {
        return Ok((args, Vec::new()));
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("config {path}: {e}"))?;
    let entries = parse(&text).map_err(|e| format!("config {path}: {e}"))?;
    let mut merged = args.clone();
    let mut used = Vec::new();
    for e in entries {
        if given(&args, &e.key) {
            continue;
        }
        match e.value.as_str() {
            "true" => merged.push(format!("--{}", e.key)),
            "false" => {}
            v => {
                merged.push(format!("--{}", e.key));
                merged.push(v.to_string());
            }
        }
        used.push(e);
    }
    Ok((merged, used))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let e = parse("# run\nX = 10000\n\ncheck_upto=50 # trailing\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[1].line, e[1].key.as_str(), e[1].value.as_str()), (4, "check-upto", "50"));
        assert!(parse("X 100").unwrap_err().starts_with("line 1"));
        assert!(parse("a b = 1").is_err());
    }

    #[test]
    fn flags_override_config() {
        let args: Vec<String> = ["cubic-lpf", "scan", "--X", "2000"].iter().map(|s| s.to_string()).collect();
        assert!(given(&args, "X"));
        assert!(!given(&args, "c"));
    }
}
