//! CSV and JSON writers for the data products the binary emits. All floats
//! go through `Display`, which prints the shortest round-trip decimal, and
//! files always end with a trailing newline (LF).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::analysis::Histogram;
use crate::cf_engine::CFGrid;
use crate::error::Result;
use crate::samplers::PopulationState;

/// Grid CSV: header `s,re,im`, one row per grid point.
pub fn cf_grid_csv(grid: &CFGrid) -> String {
    let mut out = String::from("s,re,im\n");
    for (s, v) in grid.points.iter().zip(&grid.values) {
        let _ = writeln!(out, "{},{},{}", s, v.re, v.im);
    }
    out
}

/// Sample CSV: header `value`, one row per draw.
pub fn samples_csv(values: &[f64]) -> String {
    let mut out = String::from("value\n");
    for v in values {
        let _ = writeln!(out, "{v}");
    }
    out
}

/// Population CSV: header `generation,index,value`, generations in order.
pub fn population_csv(states: &[PopulationState]) -> String {
    let mut out = String::from("generation,index,value\n");
    for state in states {
        for (i, v) in state.values.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", state.generation, i, v);
        }
    }
    out
}

/// Histogram CSV: header `bin_lo,bin_hi,value`.
pub fn histogram_csv(hist: &Histogram) -> String {
    let mut out = String::from("bin_lo,bin_hi,value\n");
    for b in &hist.bins {
        let _ = writeln!(out, "{},{},{}", b.lo, b.hi, b.value);
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}
