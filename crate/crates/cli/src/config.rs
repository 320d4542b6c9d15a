use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use oblique_core::matkit::RealMatrix;

use crate::error::CliError;

/// Reads a command configuration. A manifest written by the same command is
/// accepted too and replays its recorded configuration.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>, command: &str) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let bad = |m: String| CliError::Config(format!("{}: {m}", path.display()));
    let text = fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if value.get("software").is_some() {
        let recorded = value.get("command").and_then(Value::as_str).unwrap_or_default();
        if recorded != command {
            return Err(bad(format!("manifest of `{recorded}` cannot configure `{command}`")));
        }
        value = value.get("config").cloned().unwrap_or(Value::Null);
    }
    serde_json::from_value(value).map_err(|e| bad(e.to_string()))
}

/// Inline matrix: rows separated by `;`, entries by `,` or whitespace.
pub fn parse_matrix(text: &str) -> Result<RealMatrix, CliError> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| {
            row.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| CliError::Config(format!("bad matrix entry {t:?} in {text:?}")))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    RealMatrix::try_from(rows).map_err(|e| CliError::Config(format!("matrix {text:?}: {e}")))
}

/// Overwrites `slot` when the flag was given.
pub fn set<T: Clone>(slot: &mut T, flag: &Option<T>) {
    if let Some(v) = flag {
        *slot = v.clone();
    }
}

/// Overwrites a list when the flag was given at least once.
pub fn set_list<T: Clone>(slot: &mut Vec<T>, flag: &[T]) {
    if !flag.is_empty() {
        *slot = flag.to_vec();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Default, serde::Deserialize, PartialEq)]
    #[serde(default, deny_unknown_fields)]
    struct Demo {
        x: f64,
    }

    #[test]
    fn inline_matrices() {
        let m = parse_matrix("1,2; 3 4").unwrap();
        assert_eq!(m.rows(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(matches!(parse_matrix("1,2;3"), Err(CliError::Config(_))));
        assert!(matches!(parse_matrix("1,x;3,4"), Err(CliError::Config(_))));
    }

    #[test]
    fn manifests_replay_their_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        fs::write(&p, r#"{"software":"s","command":"demo","config":{"x":2.5}}"#).unwrap();
        assert_eq!(load::<Demo>(Some(&p), "demo").unwrap(), Demo { x: 2.5 });
        assert!(matches!(load::<Demo>(Some(&p), "other"), Err(CliError::Config(_))));
        fs::write(&p, r#"{"y":1}"#).unwrap();
        assert!(matches!(load::<Demo>(Some(&p), "demo"), Err(CliError::Config(_))));
        assert_eq!(load::<Demo>(None, "demo").unwrap(), Demo::default());
    }
}
