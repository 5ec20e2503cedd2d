use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use fracsum_core::Result;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};

/// A command's result in both output formats.
pub struct Output {
    pub stem: &'static str,
    pub csv: String,
    pub json: Value,
}

fn generated() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix {secs}")
}

pub fn render(cfg: &RunConfig, command: &str, out: &Output) -> String {
    match cfg.format {
        Format::Csv => {
            let mut s = String::new();
            for line in cfg.header_lines(command) {
                s.push_str("# ");
                s.push_str(&line);
                s.push('\n');
            }
            if cfg.timestamp {
                s.push_str(&format!("# generated {}\n", generated()));
            }
            s.push_str(&out.csv);
            s
        }
        Format::Json => {
            let mut rec = json!({
                "command": command,
                "config": cfg,
                "result": out.json,
            });
            if cfg.timestamp {
                rec["generated"] = Value::String(generated());
            }
            let mut s = serde_json::to_string_pretty(&rec).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

/// Writes to `<out>/<stem>.<ext>` through a temporary file in the same
/// directory, or to stdout when no directory is configured.
pub fn emit(cfg: &RunConfig, command: &str, out: &Output) -> Result<()> {
    let text = render(cfg, command, out);
    match &cfg.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.{}", out.stem, cfg.format.ext()));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.as_file().sync_all()?;
            tmp.persist(&path).map_err(|e| e.error)?;
        }
    }
    Ok(())
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
