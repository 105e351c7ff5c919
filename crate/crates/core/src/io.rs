//! CSV files of a run directory and the plot script.
//!
//! Floats are written in Rust's shortest round-trip form, so a snapshot read
//! back from disk is bit-identical to the one written.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::GasParameters;
use crate::solver::FieldSnapshot;

pub const SNAPSHOT_HEADER: &str = "x,rho,v,S,R,xi";
/// Index of the snapshot files of a run with their exact times.
pub const SNAPSHOT_INDEX: &str = "snapshots.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const CLAIMS_FILE: &str = "claims.csv";
pub const RUN_CONFIG_FILE: &str = "run.toml";
pub const PLOT_SCRIPT: &str = "norms.gp";

pub fn snapshot_file_name(t: f64) -> String {
    format!("snap_t{t:.6}.csv")
}

/// Directory name of one member of a sweep.
pub fn nu_dir_name(nu: f64) -> String {
    format!("nu_{nu:e}")
}

pub fn snapshot_csv(snap: &FieldSnapshot) -> String {
    let (s, r) = (snap.s(), snap.r());
    let mut out = String::with_capacity(64 * snap.len());
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for i in 0..snap.len() {
        let _ = writeln!(out, "{},{},{},{},{},{}", snap.x()[i], snap.rho()[i], snap.v()[i], s[i], r[i], r[i] - s[i]);
    }
    out
}

fn parse_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), msg: msg.into() }
}

/// Columns `x`, `rho`, `v` of a snapshot file; the invariant columns are
/// derived and ignored.
pub fn parse_snapshot_csv(text: &str, path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SNAPSHOT_HEADER => {}
        other => return Err(parse_err(path, format!("expected header `{SNAPSHOT_HEADER}`, got {other:?}"))),
    }
    let (mut x, mut rho, mut v) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(parse_err(path, format!("line {}: expected 6 columns", n + 2)));
        }
        let num = |c: &str| c.trim().parse::<f64>().map_err(|e| parse_err(path, format!("line {}: {e}", n + 2)));
        x.push(num(cols[0])?);
        rho.push(num(cols[1])?);
        v.push(num(cols[2])?);
    }
    Ok((x, rho, v))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// Write every `every`-th snapshot (and always the last one) plus the index.
pub fn write_snapshots(dir: &Path, snaps: &[&FieldSnapshot], every: usize) -> Result<Vec<PathBuf>> {
    let every = every.max(1);
    fs::create_dir_all(dir)?;
    let mut index = String::from("file,t\n");
    let mut written = Vec::new();
    for (j, snap) in snaps.iter().enumerate() {
        if j % every != 0 && j + 1 != snaps.len() {
            continue;
        }
        let name = snapshot_file_name(snap.t());
        let path = dir.join(&name);
        fs::write(&path, snapshot_csv(snap))?;
        let _ = writeln!(index, "{name},{}", snap.t());
        written.push(path);
    }
    fs::write(dir.join(SNAPSHOT_INDEX), index)?;
    Ok(written)
}

fn read_index(dir: &Path) -> Result<Vec<(PathBuf, f64)>> {
    let path = dir.join(SNAPSHOT_INDEX);
    if path.exists() {
        let text = fs::read_to_string(&path)?;
        let mut out = Vec::new();
        for (n, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let (name, t) = line.split_once(',').ok_or_else(|| parse_err(&path, format!("line {}", n + 1)))?;
            let t = t.trim().parse::<f64>().map_err(|e| parse_err(&path, format!("line {}: {e}", n + 1)))?;
            out.push((dir.join(name.trim()), t));
        }
        return Ok(out);
    }
    // no index: take the time from the file name
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let p = entry?.path();
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        if let Some(t) = name.strip_prefix("snap_t").and_then(|r| r.strip_suffix(".csv")) {
            if let Ok(t) = t.parse::<f64>() {
                out.push((p.clone(), t));
            }
        }
    }
    Ok(out)
}

/// All snapshots of a run directory in time order, sharing one grid.
pub fn read_snapshots(dir: &Path, params: GasParameters) -> Result<Vec<FieldSnapshot>> {
    let mut files = read_index(dir)?;
    files.sort_by(|a, b| a.1.total_cmp(&b.1));
    if files.is_empty() {
        return Err(Error::Usage(format!("no snapshots in {}", dir.display())));
    }
    let mut grid: Option<Arc<Vec<f64>>> = None;
    let mut out = Vec::with_capacity(files.len());
    for (path, t) in files {
        let text = fs::read_to_string(&path).map_err(|e| parse_err(&path, e.to_string()))?;
        let (x, rho, v) = parse_snapshot_csv(&text, &path)?;
        let x = match &grid {
            Some(g) if g.as_slice() == x.as_slice() => Arc::clone(g),
            Some(_) => return Err(parse_err(&path, "grid differs from the first snapshot")),
            None => {
                let g = Arc::new(x);
                grid = Some(Arc::clone(&g));
                g
            }
        };
        out.push(FieldSnapshot::new(t, x, rho, v, params)?);
    }
    Ok(out)
}

/// Gnuplot script drawing `sup rho`, `sup v`, `sup rho_x`, `sup v_x`
/// against `t`, one curve per run. `runs` pairs a label with the
/// diagnostics file relative to the script.
pub fn plot_script(runs: &[(String, PathBuf)], image: &str) -> String {
    let mut out = String::new();
    out.push_str("set datafile separator ','\n");
    out.push_str("set terminal pngcairo size 1200,900\n");
    let _ = writeln!(out, "set output '{image}'");
    out.push_str("set multiplot layout 2,2\n");
    out.push_str("set xlabel 't'\n");
    out.push_str("set key top right\n");
    for (col, title) in [(2, "sup rho"), (3, "sup |v|"), (4, "sup |rho_x|"), (5, "sup |v_x|")] {
        let _ = writeln!(out, "set title '{title}'");
        let curves: Vec<String> = runs
            .iter()
            .map(|(label, file)| format!("'{}' skip 1 using 1:{col} with lines title '{label}'", file.display()))
            .collect();
        let _ = writeln!(out, "plot {}", curves.join(", \\\n     "));
    }
    out.push_str("unset multiplot\n");
    out
}
