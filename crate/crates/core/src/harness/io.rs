//! CSV and JSON persistence.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fbm::{SamplePath, TimeGrid};
use crate::report::{reports_to_json, RunReport};

fn header(dim: usize, indexed: bool) -> String {
    let mut cols: Vec<String> = Vec::with_capacity(dim + 2);
    if indexed {
        cols.push("path".into());
    }
    cols.push("t".into());
    cols.extend((1..=dim).map(|j| format!("x{j}")));
    cols.join(",")
}

fn push_rows(out: &mut String, path: &SamplePath, index: Option<usize>) {
    for k in 0..path.len() {
        if let Some(i) = index {
            let _ = write!(out, "{i},");
        }
        let _ = write!(out, "{:.16e}", path.grid().t(k));
        for v in path.row(k) {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
}

/// One path as `t,x1,...,xd`, one row per grid point.
pub fn path_to_csv(path: &SamplePath) -> String {
    let mut out = header(path.dim(), false);
    out.push('\n');
    push_rows(&mut out, path, None);
    out
}

/// Several paths stacked as `path,t,x1,...,xd`.
pub fn paths_to_csv(paths: &[SamplePath]) -> String {
    let dim = paths.first().map_or(1, SamplePath::dim);
    let mut out = header(dim, true);
    out.push('\n');
    for (i, p) in paths.iter().enumerate() {
        push_rows(&mut out, p, Some(i));
    }
    out
}

/// Parses the single-path format written by [`path_to_csv`].
pub fn path_from_csv(text: &str) -> Result<SamplePath> {
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| Error::InvalidInput("empty CSV".into()))?;
    let cols: Vec<&str> = head.split(',').collect();
    if cols.first() != Some(&"t") || cols.len() < 2 {
        return Err(Error::InvalidInput(format!("unexpected header '{head}'")));
    }
    let dim = cols.len() - 1;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad number in '{line}': {e}")))?;
        if fields.len() != dim + 1 {
            return Err(Error::LengthMismatch {
                expected: dim + 1,
                got: fields.len(),
            });
        }
        times.push(fields[0]);
        values.extend_from_slice(&fields[1..]);
    }
    if times.len() < 2 {
        return Err(Error::InvalidInput("a path needs at least two rows".into()));
    }
    let grid = TimeGrid::new(*times.last().unwrap(), times.len() - 1)?;
    for (k, t) in times.iter().enumerate() {
        if (t - grid.t(k)).abs() > 1e-12 * grid.horizon().max(1.0) {
            return Err(Error::InvalidInput("time column is not a uniform grid from 0".into()));
        }
    }
    SamplePath::new(grid, dim, values)
}

/// One-column CSV with the given header.
pub fn column_to_csv(name: &str, values: &[f64]) -> String {
    let mut out = format!("{name}\n");
    for v in values {
        let _ = writeln!(out, "{v:.16e}");
    }
    out
}

/// Rows of equal length under a header of `names`.
pub fn rows_to_csv(names: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = names.join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn write_reports(path: &Path, reports: &[RunReport]) -> Result<()> {
    let mut text = reports_to_json(reports)?;
    text.push('\n');
    write_text(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_roundtrip_is_exact() {
        let g = TimeGrid::new(1.0, 7).unwrap();
        let values: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin() / 3.0).collect();
        let p = SamplePath::new(g, 2, values).unwrap();
        let text = path_to_csv(&p);
        assert!(text.starts_with("t,x1,x2\n"));
        assert_eq!(path_from_csv(&text).unwrap(), p);
    }

    #[test]
    fn stacked_header() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        let p = SamplePath::from_scalar(g, vec![0.0, 1.0, 2.0]).unwrap();
        let text = paths_to_csv(&[p.clone(), p]);
        assert!(text.starts_with("path,t,x1\n"));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn malformed_input() {
        assert!(path_from_csv("").is_err());
        assert!(path_from_csv("x,y\n0,0\n").is_err());
        assert!(path_from_csv("t,x1\n0,0\n0.5,1,2\n").is_err());
        assert!(path_from_csv("t,x1\n0,0\n0.5,abc\n").is_err());
    }
}
