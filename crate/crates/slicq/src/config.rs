//! `key = value` parameter files.
//!
//! Recognized keys: `xi_min`, `xi_max`, `xi_s`, `bins`, `shape`,
//! `min_filter_len`. Blank lines and `#` comments are ignored; missing keys
//! keep their defaults.

use std::path::Path;

use slicq_core::CqParams;

use crate::error::{CliError, Result};

pub fn parse_config(text: &str) -> Result<CqParams> {
    let mut params = CqParams::default();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key = value", no + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| {
            CliError::Usage(format!(
                "config line {}: {key} must be {what}, got {value:?}",
                no + 1
            ))
        };
        match key {
            "xi_min" => params.min_freq = value.parse().map_err(|_| bad("a number"))?,
            "xi_max" => params.max_freq = value.parse().map_err(|_| bad("a number"))?,
            "xi_s" => params.sample_rate = value.parse().map_err(|_| bad("a number"))?,
            "bins" => {
                params.bins_per_octave = value.parse().map_err(|_| bad("a positive integer"))?
            }
            "min_filter_len" => {
                params.min_filter_len = value.parse().map_err(|_| bad("a positive integer"))?
            }
            "shape" => params.shape = value.parse().map_err(|_| bad("hann or blackman_harris"))?,
            _ => {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key {key:?}",
                    no + 1
                )))
            }
        }
    }
    params
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(params)
}

pub fn load_config(path: &Path) -> Result<CqParams> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}
