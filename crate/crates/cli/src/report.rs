//! JSON run reports and file output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const TOOL: &str = "omsim";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Envelope shared by every command. No timestamps: identical inputs give
/// identical bytes.
#[derive(Debug, Serialize)]
pub struct RunReport<I: Serialize, O: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_sha256: Option<String>,
    pub inputs: I,
    pub outputs: O,
    pub warnings: Vec<String>,
}

impl<I: Serialize, O: Serialize> RunReport<I, O> {
    pub fn new(command: &'static str, config: Option<&[u8]>, inputs: I, outputs: O, warnings: Vec<String>) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command,
            config_sha256: config.map(sha256_hex),
            inputs,
            outputs,
            warnings: dedup(warnings),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report types serialize infallibly");
        s.push('\n');
        s
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Drops repeated warnings, keeping first occurrences in order.
pub fn dedup(warnings: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(warnings.len());
    for w in warnings {
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// Writes finite values as numbers and the rest as `"+inf"`, `"-inf"`, `"nan"`.
pub fn extended_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("+inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn dedup_keeps_order() {
        let w = dedup(vec!["b".into(), "a".into(), "b".into()]);
        assert_eq!(w, ["b", "a"]);
    }

    #[test]
    fn infinities_become_strings() {
        #[derive(Serialize)]
        struct T {
            #[serde(serialize_with = "extended_f64")]
            x: f64,
        }
        assert_eq!(serde_json::to_string(&T { x: f64::INFINITY }).unwrap(), r#"{"x":"+inf"}"#);
        assert_eq!(serde_json::to_string(&T { x: 1.5 }).unwrap(), r#"{"x":1.5}"#);
    }
}
