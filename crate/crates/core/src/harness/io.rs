//! CSV snapshots and diagnostic series.
//!
//! Floats are written with 17 significant digits so that a write/read round
//! trip reproduces every value bit for bit.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::euler::SurfaceState;
use crate::spectral::{ComplexField, RealField, SpectralGrid, C64};

use super::DiagnosticsRecord;

pub const SERIES_HEADER: [&str; 7] = ["t", "l2_rel_err", "H_full", "H_reduced", "I", "M", "max_eta"];
pub const SURFACE_HEADER: [&str; 3] = ["x", "eta", "xi"];
pub const ENVELOPE_HEADER: [&str; 4] = ["x", "re_u", "im_u", "abs_u"];
pub const SIDEBAND_HEADER: [&str; 4] = ["t", "carrier", "lower", "upper"];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::config(format!("{}: malformed CSV: {other:?}", path.display())),
    }
}

/// Write rows of floats under `header`.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Usage(format!(
                "{}: row has {} columns, header has {}",
                path.display(),
                row.len(),
                header.len()
            )));
        }
        w.write_record(row.iter().map(|v| fmt_f64(*v)))
            .map_err(|e| csv_err(path, e))?;
    }
    let mut inner = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    inner.flush().map_err(|e| Error::io(path, e))
}

/// Read a float table, insisting on the exact header.
pub fn read_table(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let got = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(Error::config(format!(
            "{}: expected header '{}', found '{}'",
            path.display(),
            header.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let row = rec
            .iter()
            .zip(header)
            .map(|(s, col)| {
                s.trim().parse::<f64>().map_err(|_| {
                    Error::config(format!(
                        "{}: row {}: column {col}: cannot parse '{s}'",
                        path.display(),
                        line + 2
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_series(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    write_table(
        path,
        &SERIES_HEADER,
        records
            .iter()
            .map(|r| vec![r.t, r.l2_rel_err, r.h_full, r.h_reduced, r.i, r.m, r.max_eta]),
    )
}

/// Series rows; sideband amplitudes live in their own file and come back empty.
pub fn read_series(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    Ok(read_table(path, &SERIES_HEADER)?
        .into_iter()
        .map(|r| DiagnosticsRecord {
            t: r[0],
            l2_rel_err: r[1],
            h_full: r[2],
            h_reduced: r[3],
            i: r[4],
            m: r[5],
            max_eta: r[6],
            sideband: None,
        })
        .collect())
}

pub fn write_sidebands(path: &Path, records: &[DiagnosticsRecord]) -> Result<()> {
    write_table(
        path,
        &SIDEBAND_HEADER,
        records
            .iter()
            .filter_map(|r| r.sideband.map(|s| vec![r.t, s.carrier, s.lower, s.upper])),
    )
}

pub fn read_sidebands(path: &Path) -> Result<Vec<(f64, super::Sideband)>> {
    Ok(read_table(path, &SIDEBAND_HEADER)?
        .into_iter()
        .map(|r| {
            (
                r[0],
                super::Sideband {
                    carrier: r[1],
                    lower: r[2],
                    upper: r[3],
                },
            )
        })
        .collect())
}

pub fn write_surface(path: &Path, s: &SurfaceState) -> Result<()> {
    let nodes = s.grid().nodes();
    write_table(
        path,
        &SURFACE_HEADER,
        (0..nodes.len()).map(|j| vec![nodes[j], s.eta.values()[j], s.xi.values()[j]]),
    )
}

fn grid_for(path: &Path, n: usize) -> Result<Arc<SpectralGrid>> {
    SpectralGrid::shared(n).map_err(|e| Error::config(format!("{}: {e}", path.display())))
}

/// Load a surface snapshot; the node count fixes the grid.
pub fn read_surface(path: &Path, time: f64) -> Result<SurfaceState> {
    let rows = read_table(path, &SURFACE_HEADER)?;
    let grid = grid_for(path, rows.len())?;
    Ok(SurfaceState {
        eta: RealField::new(grid.clone(), rows.iter().map(|r| r[1]).collect())?,
        xi: RealField::new(grid, rows.iter().map(|r| r[2]).collect())?,
        time,
    })
}

pub fn write_envelope(path: &Path, u: &ComplexField) -> Result<()> {
    let nodes = u.grid().nodes();
    write_table(
        path,
        &ENVELOPE_HEADER,
        nodes
            .iter()
            .zip(u.values())
            .map(|(x, v)| vec![*x, v.re, v.im, v.norm()]),
    )
}

pub fn read_envelope(path: &Path) -> Result<ComplexField> {
    let rows = read_table(path, &ENVELOPE_HEADER)?;
    let grid = grid_for(path, rows.len())?;
    ComplexField::new(grid, rows.iter().map(|r| C64::new(r[1], r[2])).collect())
}
