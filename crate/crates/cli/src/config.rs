//! JSON run files: `{"command": "oracle", "alpha": "1", "width": 4, "prune": true}` becomes
//! `oracle --alpha 1 --width 4 --prune`, so a run file and a command line can never diverge.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context};
use serde_json::{Map, Value};

use crate::Usage;

pub fn argv_from_file(path: &Path, workers: Option<usize>) -> anyhow::Result<Vec<OsString>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    argv_from_value(&doc, workers)
}

pub fn argv_from_value(doc: &Value, workers: Option<usize>) -> anyhow::Result<Vec<OsString>> {
    let Value::Object(map) = doc else {
        bail!(Usage("run file must be a JSON object".into()));
    };
    let Some(Value::String(command)) = map.get("command") else {
        bail!(Usage("run file needs a string `command`".into()));
    };
    let mut argv: Vec<OsString> = vec!["mushy".into()];
    if let Some(w) = workers {
        argv.push(format!("--workers={w}").into());
    }
    argv.push(command.into());
    push_flags(map, &mut argv)?;
    Ok(argv)
}

fn push_flags(map: &Map<String, Value>, argv: &mut Vec<OsString>) -> anyhow::Result<()> {
    for (key, value) in map {
        if key == "command" {
            continue;
        }
        // Nested groups such as `"params": {...}` are flattened.
        if let Value::Object(inner) = value {
            push_flags(inner, argv)?;
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => argv.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(scalar).collect::<anyhow::Result<_>>()?;
                argv.push(format!("{flag}={}", parts.join(",")).into());
            }
            v => argv.push(format!("{flag}={}", scalar(v)?).into()),
        }
    }
    Ok(())
}

fn scalar(v: &Value) -> anyhow::Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => bail!(Usage(format!("unsupported run-file value {other}"))),
    }
}
