//! Run time series as CSV, schema v1.
//!
//! Numbers are written in plain decimal with 9 significant digits; undefined
//! values are empty fields.

use std::io::{Read, Write};

use thiserror::Error;

use crate::trajectory::RunRecord;

pub const SCHEMA_VERSION: u32 = 1;

pub const COLUMNS: [&str; 19] = [
    "run_id",
    "m",
    "t",
    "q",
    "q_tilde",
    "q_star",
    "ybar",
    "y_tilde",
    "ybar_star",
    "xbar",
    "x_tilde",
    "xbar_star",
    "lambda",
    "mu",
    "lyapunov",
    "max_deg",
    "var_y",
    "cov_xy",
    "sample_size",
];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("header does not match schema v{SCHEMA_VERSION}: {0}")]
    Header(String),
    #[error("row {row}, column {column}: {message}")]
    Field {
        row: usize,
        column: &'static str,
        message: String,
    },
    #[error(transparent)]
    Csv(#[from] ::csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One CSV line: a record tagged with its run.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub run_id: u64,
    pub record: RunRecord,
}

/// Plain decimal with 9 significant digits, no exponent.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        // Not expected in records; keep the file parseable.
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig9).unwrap_or_default()
}

fn fields(row: &CsvRow) -> [String; 19] {
    let r = &row.record;
    [
        row.run_id.to_string(),
        r.m.to_string(),
        format_sig9(r.t),
        r.q.to_string(),
        format_sig9(r.q_tilde),
        opt(r.q_star),
        opt(r.ybar),
        format_sig9(r.y_tilde),
        opt(r.ybar_star),
        opt(r.xbar),
        format_sig9(r.x_tilde),
        opt(r.xbar_star),
        opt(r.lambda),
        opt(r.mu),
        opt(r.lyapunov),
        r.max_deg.to_string(),
        opt(r.var_y),
        opt(r.cov_xy),
        r.sample_size.to_string(),
    ]
}

pub fn write_rows<W: Write>(out: W, rows: &[CsvRow]) -> Result<(), CsvError> {
    let mut w = ::csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(fields(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_string(rows: &[CsvRow]) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Tags every record with `run_id`.
pub fn rows_for_run(run_id: u64, records: &[RunRecord]) -> Vec<CsvRow> {
    records
        .iter()
        .map(|r| CsvRow {
            run_id,
            record: r.clone(),
        })
        .collect()
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<CsvRow>, CsvError> {
    let mut rdr = ::csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(CsvError::Header(header.iter().collect::<Vec<_>>().join(",")));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let get = |c: usize| rec.get(c).unwrap_or("");
        let int = |c: usize| -> Result<u64, CsvError> {
            get(c).parse().map_err(|e: std::num::ParseIntError| CsvError::Field {
                row,
                column: COLUMNS[c],
                message: e.to_string(),
            })
        };
        let opt = |c: usize| -> Result<Option<f64>, CsvError> {
            let s = get(c);
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|e: std::num::ParseFloatError| CsvError::Field {
                row,
                column: COLUMNS[c],
                message: e.to_string(),
            })
        };
        let num = |c: usize| -> Result<f64, CsvError> {
            opt(c)?.ok_or(CsvError::Field {
                row,
                column: COLUMNS[c],
                message: "missing value".into(),
            })
        };
        out.push(CsvRow {
            run_id: int(0)?,
            record: RunRecord {
                m: int(1)?,
                t: num(2)?,
                q: int(3)?,
                q_tilde: num(4)?,
                q_star: opt(5)?,
                ybar: opt(6)?,
                y_tilde: num(7)?,
                ybar_star: opt(8)?,
                xbar: opt(9)?,
                x_tilde: num(10)?,
                xbar_star: opt(11)?,
                lambda: opt(12)?,
                mu: opt(13)?,
                lyapunov: opt(14)?,
                max_deg: int(15)?,
                var_y: opt(16)?,
                cov_xy: opt(17)?,
                sample_size: int(18)?,
            },
        });
    }
    Ok(out)
}

pub fn from_str(text: &str) -> Result<Vec<CsvRow>, CsvError> {
    read_rows(text.as_bytes())
}

/// Rounds every float of a record to what the CSV keeps.
pub fn quantize(record: &RunRecord) -> RunRecord {
    let row = CsvRow {
        run_id: 0,
        record: record.clone(),
    };
    from_str(&to_string(&[row])).expect("own output parses").remove(0).record
}
