//! Artifact writers. Every artifact carries the format version and the
//! effective configuration.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::CliError;

pub const FORMAT_VERSION: &str = "satlab/1";

pub type Echo = [(String, String)];

/// Writes to `path`, or to standard output when absent.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(content.as_bytes()).and_then(|()| out.flush()) {
                // a closed downstream pipe (e.g. `| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

/// CSV with `#` comment lines for the version and configuration, then the header.
pub fn csv(version: &str, echo: &Echo, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = format!("# format_version = {version}\n");
    for (k, v) in echo {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn config_object(echo: &Echo) -> Value {
    Value::Object(echo.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect::<Map<_, _>>())
}

/// JSON object `{format_version, config, ...payload}`.
pub fn json(version: &str, echo: &Echo, payload: Value) -> Result<String, CliError> {
    let mut obj = Map::new();
    obj.insert("format_version".into(), Value::String(version.into()));
    obj.insert("config".into(), config_object(echo));
    match payload {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("data".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(obj))?;
    s.push('\n');
    Ok(s)
}

/// Shortest round-trip decimal; non-finite values print as `nan`/`inf`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let echo = vec![("d".to_string(), "2".to_string())];
        let s = csv("v/1", &echo, &["a", "b"], vec![vec!["1".into(), "2".into()]]);
        assert_eq!(s, "# format_version = v/1\n# d = 2\na,b\n1,2\n");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -3.25e-17, 1e300, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::NAN), "nan");
    }
}
