//! JSON run configs.
//!
//! A config names a subcommand and its flags:
//!
//! ```json
//! { "command": "solve", "args": { "K": "k.csv", "n": 4, "k": 2, "N": 256 }, "output": "run.json" }
//! ```
//!
//! Each `args` entry becomes `--key value`; `true` becomes a bare flag and
//! `false` or `null` drop the flag. The result is parsed exactly like a
//! command line, so defaults and validation are shared.

use std::path::Path;

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::report::Failure;

const SCHEMA: &str = include_str!("../config.schema.json");

const COMMANDS: [&str; 7] = ["identities", "radial", "degree", "reduce", "solve", "moments", "energy"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    command: String,
    #[serde(default)]
    args: Map<String, Value>,
    #[serde(default)]
    output: Option<String>,
}

pub fn schema() -> Value {
    serde_json::from_str(SCHEMA).expect("bundled schema is valid JSON")
}

/// Reads a config file and returns the equivalent argument vector.
pub fn load(path: &Path) -> Result<Vec<String>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    to_argv(&cfg)
}

fn to_argv(cfg: &RunConfig) -> Result<Vec<String>, Failure> {
    if !COMMANDS.contains(&cfg.command.as_str()) {
        return Err(Failure::usage(format!("unknown command {:?}, expected one of {COMMANDS:?}", cfg.command)));
    }
    let mut argv = vec!["sigmak".to_string(), cfg.command.clone()];
    for (key, value) in &cfg.args {
        let flag = format!("--{key}");
        match value {
            Value::Bool(true) => argv.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Number(x) => argv.extend([flag, x.to_string()]),
            Value::String(s) => argv.extend([flag, s.clone()]),
            Value::Array(_) | Value::Object(_) => {
                return Err(Failure::usage(format!("argument {key:?} must be a scalar")));
            }
        }
    }
    if let Some(out) = &cfg.output {
        argv.extend(["--output".to_string(), out.clone()]);
    }
    Ok(argv)
}
