use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::ScenarioConfig;
use crate::error::{Error, Result};
use crate::grid::{make_grid, WaveField};
use crate::scenario::{ScenarioOutput, ScenarioReport, TimeSeries};

pub const SNAPSHOT_MAGIC: &str = "ABQSNAP1";

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// CSV with a header row; values carry 17 significant digits.
pub fn write_timeseries(series: &TimeSeries, path: &Path) -> Result<()> {
    let mut s = series.columns.join(",");
    s.push('\n');
    for row in &series.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    fs::write(path, s).map_err(|e| io_err(path, e))
}

pub fn write_report(report: &ScenarioReport, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, json + "\n").map_err(|e| io_err(path, e))
}

/// Geometry and metadata carried by a snapshot header.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotHeader {
    pub t: f64,
    pub gauge: String,
}

/// `ABQSNAP1 nx ny dx dy x0 y0 t gauge=<descriptor>`, then `re im` per node,
/// `y` outer.
pub fn write_snapshot(field: &WaveField, gauge: &str, t: f64, path: &Path) -> Result<()> {
    if gauge.is_empty() || gauge.contains(char::is_whitespace) {
        return Err(Error::config(format!("gauge descriptor '{gauge}' must be a single token")));
    }
    let g = field.grid();
    let mut s = String::with_capacity(48 * g.len() + 128);
    let _ = writeln!(
        s,
        "{SNAPSHOT_MAGIC} {} {} {:e} {:e} {:e} {:e} {:e} gauge={gauge}",
        g.nx, g.ny, g.dx, g.dy, g.x0, g.y0, t
    );
    for a in field.amplitudes() {
        let _ = writeln!(s, "{:e} {:e}", a.re, a.im);
    }
    fs::write(path, s).map_err(|e| io_err(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<(WaveField, SnapshotHeader)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let bad = |m: &str| Error::Io(format!("{}: {m}", path.display()));
    let mut lines = text.lines();
    let head: Vec<&str> = lines.next().ok_or_else(|| bad("empty snapshot"))?.split_whitespace().collect();
    if head.len() != 9 || head[0] != SNAPSHOT_MAGIC || !head[8].starts_with("gauge=") {
        return Err(bad("malformed snapshot header"));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad("malformed number in header"));
    let nx: usize = head[1].parse().map_err(|_| bad("malformed nx"))?;
    let ny: usize = head[2].parse().map_err(|_| bad("malformed ny"))?;
    let grid = make_grid(nx, ny, num(head[3])?, num(head[4])?, num(head[5])?, num(head[6])?)?;
    let t = num(head[7])?;
    let mut amp = Vec::with_capacity(grid.len());
    for line in lines {
        let mut it = line.split_whitespace();
        let (re, im) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(bad("malformed amplitude line")),
        };
        amp.push(Complex64::new(num(re)?, num(im)?));
    }
    if amp.len() != grid.len() {
        return Err(bad("snapshot has the wrong number of amplitudes"));
    }
    Ok((WaveField::from_amplitudes(&grid, amp)?, SnapshotHeader { t, gauge: head[8]["gauge=".len()..].to_string() }))
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// Writes the config echo, version, report, one CSV per series and the
/// snapshots into `dir`. Returns the files written.
pub fn write_output_dir(cfg: &ScenarioConfig, output: &ScenarioOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: String, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let p = dir.join(name);
        f(&p)?;
        written.push(p);
        Ok(())
    };
    let scenario = cfg.scenario.name();
    put("config.echo".into(), &|p| {
        let text = format!("# abflux {}\n{}", crate::VERSION, cfg.echo());
        fs::write(p, text).map_err(|e| io_err(p, e))
    })?;
    put(format!("{scenario}.report.json"), &|p| write_report(&output.report, p))?;
    for s in &output.report.series {
        put(format!("{scenario}.{}.csv", sanitize(&s.name)), &|p| write_timeseries(s, p))?;
    }
    for s in &output.snapshots {
        put(format!("{}_t{:.4}.snap", sanitize(&s.name), s.t), &|p| write_snapshot(&s.field, &s.gauge, s.t, p))?;
    }
    Ok(written)
}
