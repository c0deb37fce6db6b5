//! CSV serialization of sweep tables.
//!
//! Layout: `#`-prefixed metadata lines (`# key: value`), one header row with
//! unit-annotated columns, then one row per grid point. Floats are written
//! with 17 significant digits so that a round trip is exact.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::{RowStatus, SweepAxis, SweepRow, SweepTable};

pub const VALUE_COLUMNS: [&str; 4] = ["gamma_field_per_s", "n_th", "gamma_total_per_s", "tau_s"];
pub const SCREENING_COLUMN: &str = "S";
pub const REGIME_COLUMN: &str = "regime";
pub const STATUS_COLUMN: &str = "status";

/// Header for a table on `axis`.
pub fn header(axis: SweepAxis) -> Vec<&'static str> {
    let mut h = vec![axis.column()];
    h.extend(VALUE_COLUMNS);
    if axis == SweepAxis::ThicknessD {
        h.push(SCREENING_COLUMN);
    }
    h.push(REGIME_COLUMN);
    h.push(STATUS_COLUMN);
    h
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn status_text(s: &RowStatus) -> String {
    match s {
        RowStatus::Ok => "ok".into(),
        RowStatus::Error(msg) => format!("error: {msg}"),
    }
}

fn parse_status(s: &str) -> RowStatus {
    match s.strip_prefix("error: ") {
        Some(msg) => RowStatus::Error(msg.to_string()),
        None if s == "ok" => RowStatus::Ok,
        None => RowStatus::Error(s.to_string()),
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

/// Write `table` as CSV.
pub fn write_csv<W: Write>(table: &SweepTable, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Csv(e.to_string());
    writeln!(out, "# spinflip-core {}", crate::VERSION).map_err(io)?;
    for (k, v) in &table.metadata {
        // keep every metadata entry on one comment line
        let v = v.replace(['\n', '\r'], " ");
        writeln!(out, "# {k}: {v}").map_err(io)?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header(table.axis)).map_err(csv_err)?;
    for row in &table.rows {
        let mut rec = vec![
            format_float(row.x),
            format_float(row.gamma_field),
            format_float(row.n_th),
            format_float(row.gamma_total),
            format_float(row.tau),
        ];
        if table.has_screening() {
            rec.push(format_float(row.screening.unwrap_or(f64::NAN)));
        }
        rec.push(row.regime.clone());
        rec.push(status_text(&row.status));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

pub fn write_csv_file(table: &SweepTable, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(table, std::io::BufWriter::new(file))
}

pub fn to_csv_string(table: &SweepTable) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Csv(e.to_string()))
}

/// Parse a table written by [`write_csv`], checking the header against the
/// expected schema.
pub fn read_csv<R: Read>(input: R) -> Result<SweepTable> {
    let mut metadata = Vec::new();
    let mut body = String::new();
    for line in BufReader::new(input).lines() {
        let line = line.map_err(|e| Error::Csv(e.to_string()))?;
        match line.strip_prefix('#') {
            Some(meta) => {
                let meta = meta.trim_start();
                if let Some((k, v)) = meta.split_once(": ") {
                    metadata.push((k.to_string(), v.to_string()));
                }
            }
            None => {
                body.push_str(&line);
                body.push('\n');
            }
        }
    }

    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes());
    let hdr: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let axis = hdr
        .first()
        .and_then(|c| SweepAxis::from_column(c))
        .ok_or_else(|| Error::Csv(format!("unknown axis column {:?}", hdr.first())))?;
    let expected = header(axis);
    if hdr != expected {
        return Err(Error::Csv(format!(
            "header {hdr:?} does not match schema {expected:?}"
        )));
    }

    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::Csv(format!("bad number {s:?}: {e}")))
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let mut i = 0;
        let mut next = || {
            i += 1;
            rec.get(i - 1).unwrap_or_default()
        };
        let x = num(next())?;
        let gamma_field = num(next())?;
        let n_th = num(next())?;
        let gamma_total = num(next())?;
        let tau = num(next())?;
        let screening = if axis == SweepAxis::ThicknessD {
            Some(num(next())?)
        } else {
            None
        };
        let regime = next().to_string();
        let status = parse_status(next());
        rows.push(SweepRow {
            x,
            gamma_field,
            n_th,
            gamma_total,
            tau,
            screening,
            regime,
            status,
        });
    }
    // the version line is regenerated on write
    metadata.retain(|(k, _)| !k.starts_with("spinflip-core"));
    Ok(SweepTable {
        axis,
        rows,
        metadata,
    })
}

pub fn read_csv_file(path: &Path) -> Result<SweepTable> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file)
}
