//! Comma-separated file formats. Floats are written in shortest round-trip
//! exponent form, so a write followed by a read reproduces every value bit
//! for bit. Missing values are written as empty fields.

use std::fs::File;
use std::path::Path;

use cfi_core::analysis::{CoincidenceHistogram, Peak};
use cfi_core::grid::{Axis, Intensity1D};
use cfi_core::sim::{Channel, FringeScan, ScanPoint, ScanSource, Tag, TimeTagStream};
use cfi_core::states::{tabulated_1d, tabulated_2d, uniform_axis};
use cfi_core::{
    FrequencyGrid, JointSpectralAmplitude2D, SpectralAmplitude1D, TemporalAmplitude1D, TimeGrid,
};
use num_complex::Complex64;

use crate::error::{Result, ToolError};

pub const AMPLITUDE_1D: &[&str] = &["omega_rad_s", "re", "im"];
pub const AMPLITUDE_2D: &[&str] = &["omega_s", "omega_i", "re", "im"];
pub const TEMPORAL_1D: &[&str] = &["t_s", "re", "im"];
pub const JSI: &[&str] = &["omega_rad_s", "intensity"];
pub const JTI: &[&str] = &["t_s", "intensity"];
pub const VISIBILITY_SWEEP: &[&str] = &["phi_rad", "visibility"];
pub const PROBABILITY_SWEEP: &[&str] = &["phi_t_rad", "probability"];
pub const SCAN: &[&str] = &["phi_t_rad", "coincidences", "integration_s"];
pub const TAGS: &[&str] = &["channel", "tick"];
pub const HISTOGRAM: &[&str] = &["dt_s", "count"];
pub const PEAKS: &[&str] = &["center_s", "area", "rms_s"];
pub const FIT: &[&str] = &["param", "value", "sigma"];
pub const PHASE: &[&str] = &["omega_rad_s", "phase_rad"];

pub fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

/// Writes a header and rows.
pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(err) => ToolError::io(path, err),
        other => ToolError::Runtime(format!("{}: {other:?}", path.display())),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| ToolError::io(path, e))
}

/// Rows of a file whose header must equal `header`. Each row comes with its
/// 1-based line number.
pub struct Table {
    path: std::path::PathBuf,
    pub rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    pub fn read(path: &Path, header: &[&str]) -> Result<Self> {
        let file = File::open(path).map_err(|e| ToolError::io(path, e))?;
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
        let found = r
            .headers()
            .map_err(|e| ToolError::format(path, format!("line 1: {e}")))?
            .clone();
        if found.iter().map(str::trim).ne(header.iter().copied()) {
            return Err(ToolError::format(
                path,
                format!(
                    "line 1: expected header `{}`, found `{}`",
                    header.join(","),
                    found.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                ToolError::format(path, format!("line {line}: {e}"))
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, record));
        }
        Ok(Self {
            path: path.to_path_buf(),
            rows,
        })
    }

    fn error(&self, line: u64, message: impl std::fmt::Display) -> ToolError {
        ToolError::format(&self.path, format!("line {line}: {message}"))
    }

    pub fn f64(&self, k: usize, col: usize) -> Result<f64> {
        let (line, rec) = &self.rows[k];
        let field = rec[col].trim();
        field
            .parse()
            .map_err(|_| self.error(*line, format!("column {} is not a number: `{field}`", col + 1)))
    }

    pub fn opt_f64(&self, k: usize, col: usize) -> Result<Option<f64>> {
        if self.rows[k].1[col].trim().is_empty() {
            Ok(None)
        } else {
            self.f64(k, col).map(Some)
        }
    }

    pub fn u64(&self, k: usize, col: usize) -> Result<u64> {
        let (line, rec) = &self.rows[k];
        let field = rec[col].trim();
        field.parse().map_err(|_| {
            self.error(*line, format!("column {} is not a non-negative integer: `{field}`", col + 1))
        })
    }

    pub fn str(&self, k: usize, col: usize) -> &str {
        self.rows[k].1[col].trim()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn columns(&self, cols: &[usize]) -> Result<Vec<Vec<f64>>> {
        cols.iter()
            .map(|&c| (0..self.len()).map(|k| self.f64(k, c)).collect())
            .collect()
    }

    /// Converts a kernel error that names a data row into one naming the line.
    fn locate(&self, err: cfi_core::Error) -> ToolError {
        match err {
            cfi_core::Error::NonUniform { row } if row < self.len() => {
                self.error(self.rows[row].0, "sample spacing is not uniform")
            }
            other => ToolError::format(&self.path, other.to_string()),
        }
    }
}

fn complex_rows<'a, G: Axis + 'a>(grid: &G, values: &'a [Complex64]) -> impl Iterator<Item = Vec<String>> + 'a {
    let grid = *grid;
    values
        .iter()
        .enumerate()
        .map(move |(k, v)| vec![fmt(grid.point(k)), fmt(v.re), fmt(v.im)])
}

pub fn write_amplitude_1d(path: &Path, state: &SpectralAmplitude1D) -> Result<()> {
    write_csv(path, AMPLITUDE_1D, complex_rows(state.grid(), state.values()))
}

pub fn write_temporal_1d(path: &Path, jta: &TemporalAmplitude1D) -> Result<()> {
    write_csv(path, TEMPORAL_1D, complex_rows(jta.grid(), jta.values()))
}

/// Reads a tabulated 1-D amplitude; returns the normalized state and its
/// norm before rescaling.
pub fn read_amplitude_1d(path: &Path) -> Result<(SpectralAmplitude1D, f64)> {
    let t = Table::read(path, AMPLITUDE_1D)?;
    let cols = t.columns(&[0, 1, 2])?;
    let values = cols[1].iter().zip(&cols[2]).map(|(&re, &im)| Complex64::new(re, im)).collect();
    tabulated_1d(&cols[0], values).map_err(|e| t.locate(e))
}

pub fn write_amplitude_2d(path: &Path, state: &JointSpectralAmplitude2D) -> Result<()> {
    let (gs, gi) = (*state.grid_s(), *state.grid_i());
    let rows = (0..gs.len()).flat_map(move |s| {
        (0..gi.len()).map(move |i| {
            let v = state.get(s, i);
            vec![fmt(gs.point(s)), fmt(gi.point(i)), fmt(v.re), fmt(v.im)]
        })
    });
    write_csv(path, AMPLITUDE_2D, rows)
}

pub fn read_amplitude_2d(path: &Path) -> Result<(JointSpectralAmplitude2D, f64)> {
    let t = Table::read(path, AMPLITUDE_2D)?;
    let cols = t.columns(&[0, 1, 2, 3])?;
    let rows: Vec<_> = (0..t.len())
        .map(|k| (cols[0][k], cols[1][k], Complex64::new(cols[2][k], cols[3][k])))
        .collect();
    tabulated_2d(&rows).map_err(|e| t.locate(e))
}

/// Whether the file starts with the 2-D amplitude header.
pub fn is_amplitude_2d(path: &Path) -> Result<bool> {
    Ok(first_line(path)?.trim() == AMPLITUDE_2D.join(","))
}

pub fn first_line(path: &Path) -> Result<String> {
    use std::io::BufRead;
    let file = File::open(path).map_err(|e| ToolError::io(path, e))?;
    let mut line = String::new();
    std::io::BufReader::new(file)
        .read_line(&mut line)
        .map_err(|e| ToolError::io(path, e))?;
    Ok(line)
}

fn intensity_rows<G: Axis>(intensity: &Intensity1D<G>) -> Vec<Vec<String>> {
    let grid = *intensity.grid();
    intensity
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| vec![fmt(grid.point(k)), fmt(*v)])
        .collect()
}

pub fn write_jsi(path: &Path, jsi: &Intensity1D<FrequencyGrid>) -> Result<()> {
    write_csv(path, JSI, intensity_rows(jsi))
}

pub fn write_jti(path: &Path, jti: &Intensity1D<TimeGrid>) -> Result<()> {
    write_csv(path, JTI, intensity_rows(jti))
}

fn read_intensity(path: &Path, header: &[&str]) -> Result<(usize, f64, f64, Vec<f64>)> {
    let t = Table::read(path, header)?;
    let mut cols = t.columns(&[0, 1])?;
    let (n, d, center) = uniform_axis(&cols[0]).map_err(|e| t.locate(e))?;
    Ok((n, d, center, cols.remove(1)))
}

pub fn read_jsi(path: &Path) -> Result<Intensity1D<FrequencyGrid>> {
    let (n, d, c, values) = read_intensity(path, JSI)?;
    Ok(Intensity1D::new(FrequencyGrid::new(n, d, c)?, values)?)
}

pub fn read_jti(path: &Path) -> Result<Intensity1D<TimeGrid>> {
    let (n, d, c, values) = read_intensity(path, JTI)?;
    Ok(Intensity1D::new(TimeGrid::new(n, d, c)?, values)?)
}

pub fn write_pairs(path: &Path, header: &[&str], rows: &[(f64, f64)]) -> Result<()> {
    write_csv(path, header, rows.iter().map(|(x, y)| vec![fmt(*x), fmt(*y)]))
}

/// Reads a two-column numeric file such as a sweep.
pub fn read_pairs(path: &Path, header: &[&str]) -> Result<Vec<(f64, f64)>> {
    let t = Table::read(path, header)?;
    (0..t.len()).map(|k| Ok((t.f64(k, 0)?, t.f64(k, 1)?))).collect()
}

pub fn write_scan(path: &Path, scan: &FringeScan) -> Result<()> {
    let rows = scan
        .points
        .iter()
        .map(|p| vec![fmt(p.phi_t), p.coincidences.to_string(), fmt(p.integration)]);
    write_csv(path, SCAN, rows)
}

/// Reads a fringe scan; the file does not record how the phase was set, so
/// the scan is labelled as a drift scan.
pub fn read_scan(path: &Path) -> Result<FringeScan> {
    let t = Table::read(path, SCAN)?;
    let points = (0..t.len())
        .map(|k| {
            Ok(ScanPoint {
                phi_t: t.f64(k, 0)?,
                coincidences: t.u64(k, 1)?,
                integration: t.f64(k, 2)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(FringeScan {
        points,
        source: ScanSource::Drift,
    })
}

pub fn write_tags_csv(path: &Path, stream: &TimeTagStream) -> Result<()> {
    let rows = stream
        .records()
        .iter()
        .map(|t| vec![t.channel.code().to_string(), t.tick.to_string()]);
    write_csv(path, TAGS, rows)
}

/// Reads the debug tag form. The file carries no tick length, so it is
/// supplied by the caller; the acquisition is taken to end after the last tag.
pub fn read_tags_csv(path: &Path, tick: f64) -> Result<TimeTagStream> {
    let t = Table::read(path, TAGS)?;
    let mut records = Vec::with_capacity(t.len());
    for k in 0..t.len() {
        let line = t.rows[k].0;
        let code = t.u64(k, 0)?;
        let channel = u8::try_from(code)
            .ok()
            .and_then(Channel::from_code)
            .ok_or_else(|| t.error(line, format!("unknown channel {code}")))?;
        let tick = t.u64(k, 1)?;
        if records.last().is_some_and(|prev: &Tag| tick < prev.tick) {
            return Err(t.error(line, "tick is earlier than the previous record"));
        }
        records.push(Tag { tick, channel });
    }
    let duration = records.last().map_or(0.0, |r| (r.tick + 1) as f64 * tick);
    Ok(TimeTagStream::new(records, tick, duration)?)
}

pub fn write_histogram(path: &Path, hist: &CoincidenceHistogram) -> Result<()> {
    let rows = hist
        .centers()
        .zip(&hist.counts)
        .map(|(dt, c)| vec![fmt(dt), c.to_string()]);
    write_csv(path, HISTOGRAM, rows)
}

pub fn read_histogram(path: &Path) -> Result<Vec<(f64, u64)>> {
    let t = Table::read(path, HISTOGRAM)?;
    (0..t.len()).map(|k| Ok((t.f64(k, 0)?, t.u64(k, 1)?))).collect()
}

pub fn write_peaks(path: &Path, peaks: &[Peak]) -> Result<()> {
    let rows = peaks
        .iter()
        .map(|p| vec![fmt(p.center), fmt(p.area), fmt(p.rms_width)]);
    write_csv(path, PEAKS, rows)
}

pub fn read_peaks(path: &Path) -> Result<Vec<Peak>> {
    let t = Table::read(path, PEAKS)?;
    (0..t.len())
        .map(|k| {
            Ok(Peak {
                center: t.f64(k, 0)?,
                area: t.f64(k, 1)?,
                rms_width: t.f64(k, 2)?,
            })
        })
        .collect()
}

/// One row of a fit or visibility report.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub value: f64,
    pub sigma: Option<f64>,
}

impl Param {
    pub fn new(name: &str, value: f64, sigma: Option<f64>) -> Self {
        Self {
            name: name.to_string(),
            value,
            sigma,
        }
    }
}

pub fn write_params(path: &Path, params: &[Param]) -> Result<()> {
    let rows = params
        .iter()
        .map(|p| vec![p.name.clone(), fmt(p.value), fmt_opt(p.sigma)]);
    write_csv(path, FIT, rows)
}

pub fn read_params(path: &Path) -> Result<Vec<Param>> {
    let t = Table::read(path, FIT)?;
    (0..t.len())
        .map(|k| {
            Ok(Param {
                name: t.str(k, 0).to_string(),
                value: t.f64(k, 1)?,
                sigma: t.opt_f64(k, 2)?,
            })
        })
        .collect()
}

/// Phase per grid point; points outside the support have no phase.
pub fn write_phase(path: &Path, grid: &FrequencyGrid, phase: &[Option<f64>]) -> Result<()> {
    let rows = phase
        .iter()
        .enumerate()
        .map(|(k, p)| vec![fmt(grid.point(k)), fmt_opt(*p)]);
    write_csv(path, PHASE, rows)
}

pub fn read_phase(path: &Path) -> Result<Vec<(f64, Option<f64>)>> {
    let t = Table::read(path, PHASE)?;
    (0..t.len()).map(|k| Ok((t.f64(k, 0)?, t.opt_f64(k, 1)?))).collect()
}
