use std::fmt::Write as _;
use std::io::Write;

use warpgeom::catalog::{get_preset, list_presets};

use super::emit;
use crate::error::{CliError, EXIT_OK};
use crate::output::{to_json, Document};
use crate::settings::Settings;

pub const KEYS: [&str; 3] = ["json", "show", "output"];

pub fn run(s: &Settings, out: &mut dyn Write) -> Result<i32, CliError> {
    let json = s.flag("json")?;
    let text = match s.get("show") {
        Some(name) => {
            let p = get_preset(name)?;
            if json {
                to_json(&Document::new("presets", s.echo(), p))
            } else {
                p.to_config()
            }
        }
        None => {
            let all = list_presets();
            if json {
                to_json(&Document::new("presets", s.echo(), all))
            } else {
                let width = all.iter().map(|p| p.name.len()).max().unwrap_or(0);
                let mut t = String::new();
                for p in &all {
                    let _ = writeln!(t, "{:<width$}  f(t) = {}  on {}", p.name, p.expression, p.interval);
                }
                t
            }
        }
    };
    emit(s, &text, out)?;
    Ok(EXIT_OK)
}
