//! CSV readers. Errors carry the 1-based line number of the offending row.

use crate::error::{io_error, CliError, CliResult};
use std::io::Read;
use std::path::Path;

/// Points, values and optional noise scales read from a `t1..td,value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTable {
    pub dim: usize,
    pub coords: Vec<f64>,
    pub values: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
}

/// Observations grouped by curve, in first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub ids: Vec<String>,
    pub t: Vec<Vec<f64>>,
    pub values: Option<Vec<Vec<f64>>>,
}

fn open(path: &Path) -> CliResult<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(std::io::stdin()));
    }
    let f = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    Ok(Box::new(f))
}

fn reader(path: &Path) -> CliResult<csv::Reader<Box<dyn Read>>> {
    Ok(csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(open(path)?))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map(|p| p.line());
    if e.is_io_error() {
        return CliError::Io(format!("{}: {e}", path.display()));
    }
    match line {
        Some(l) => CliError::usage(format!("{}: line {l}: {e}", path.display())),
        None => CliError::usage(format!("{}: {e}", path.display())),
    }
}

fn headers(path: &Path, rdr: &mut csv::Reader<Box<dyn Read>>) -> CliResult<Vec<String>> {
    Ok(rdr
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect())
}

fn column(path: &Path, headers: &[String], name: &str) -> CliResult<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::usage(format!("{}: missing column '{name}'", path.display())))
}

fn parse_field(path: &Path, line: u64, name: &str, raw: &str) -> CliResult<f64> {
    let v: f64 = raw.parse().map_err(|_| {
        CliError::usage(format!("{}: line {line}: column '{name}': cannot parse '{raw}' as a number", path.display()))
    })?;
    if !v.is_finite() {
        return Err(CliError::usage(format!(
            "{}: line {line}: column '{name}': value is not finite",
            path.display()
        )));
    }
    Ok(v)
}

/// Coordinate columns: `t` alone, or `t1, …, td` in any order.
fn coordinate_columns(path: &Path, headers: &[String]) -> CliResult<Vec<usize>> {
    if let Some(i) = headers.iter().position(|h| h == "t") {
        if headers.iter().any(|h| h == "t1") {
            return Err(CliError::usage(format!("{}: both 't' and 't1' columns present", path.display())));
        }
        return Ok(vec![i]);
    }
    let mut indexed: Vec<(usize, usize)> = headers
        .iter()
        .enumerate()
        .filter_map(|(col, h)| {
            let k: usize = h.strip_prefix('t')?.parse().ok()?;
            Some((k, col))
        })
        .collect();
    if indexed.is_empty() {
        return Err(CliError::usage(format!(
            "{}: missing coordinate columns (expected 't' or 't1..td')",
            path.display()
        )));
    }
    indexed.sort_unstable();
    for (want, &(k, _)) in (1..).zip(&indexed) {
        if k != want {
            return Err(CliError::usage(format!("{}: missing column 't{want}'", path.display())));
        }
    }
    Ok(indexed.into_iter().map(|(_, c)| c).collect())
}

pub fn read_points(path: &Path, sigma_col: Option<&str>) -> CliResult<PointTable> {
    let mut rdr = reader(path)?;
    let hdr = headers(path, &mut rdr)?;
    let tcols = coordinate_columns(path, &hdr)?;
    let vcol = column(path, &hdr, "value")?;
    let scol = sigma_col.map(|name| column(path, &hdr, name)).transpose()?;
    let dim = tcols.len();
    let mut out = PointTable {
        dim,
        coords: Vec::new(),
        values: Vec::new(),
        sigma: scol.map(|_| Vec::new()),
    };
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        for &c in &tcols {
            out.coords.push(parse_field(path, line, &hdr[c], &rec[c])?);
        }
        out.values.push(parse_field(path, line, "value", &rec[vcol])?);
        if let (Some(c), Some(s)) = (scol, out.sigma.as_mut()) {
            let v = parse_field(path, line, &hdr[c], &rec[c])?;
            if v < 0.0 {
                return Err(CliError::usage(format!(
                    "{}: line {line}: noise scale must be non-negative",
                    path.display()
                )));
            }
            s.push(v);
        }
    }
    if out.values.is_empty() {
        return Err(CliError::usage(format!("{}: no data rows", path.display())));
    }
    Ok(out)
}

/// Reads `curve,t[,value]`; `need_values` makes the value column mandatory.
pub fn read_curves(path: &Path, need_values: bool) -> CliResult<CurveTable> {
    let mut rdr = reader(path)?;
    let hdr = headers(path, &mut rdr)?;
    let ccol = column(path, &hdr, "curve")?;
    let tcol = column(path, &hdr, "t")?;
    let vcol = if need_values {
        Some(column(path, &hdr, "value")?)
    } else {
        hdr.iter().position(|h| h == "value")
    };
    let mut out = CurveTable {
        ids: Vec::new(),
        t: Vec::new(),
        values: vcol.map(|_| Vec::new()),
    };
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let id = &rec[ccol];
        let k = match out.ids.iter().position(|x| x == id) {
            Some(k) => k,
            None => {
                out.ids.push(id.to_string());
                out.t.push(Vec::new());
                if let Some(v) = out.values.as_mut() {
                    v.push(Vec::new());
                }
                out.ids.len() - 1
            }
        };
        out.t[k].push(parse_field(path, line, "t", &rec[tcol])?);
        if let (Some(c), Some(v)) = (vcol, out.values.as_mut()) {
            v[k].push(parse_field(path, line, "value", &rec[c])?);
        }
    }
    if out.ids.is_empty() {
        return Err(CliError::usage(format!("{}: no data rows", path.display())));
    }
    Ok(out)
}

/// Two-column `t,density` table.
pub fn read_density_table(path: &Path) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let mut rdr = reader(path)?;
    let hdr = headers(path, &mut rdr)?;
    let tcol = column(path, &hdr, "t")?;
    let dcol = column(path, &hdr, "density")?;
    let (mut g, mut v) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        g.push(parse_field(path, line, "t", &rec[tcol])?);
        v.push(parse_field(path, line, "density", &rec[dcol])?);
    }
    Ok((g, v))
}
