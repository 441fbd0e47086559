//! Per-`m` quantiles across the runs of an ensemble.

use std::collections::BTreeMap;
use std::io::Write;

use super::csv::{format_sig9, CsvError, CsvRow, COLUMNS};
use crate::trajectory::RunRecord;

/// Columns summarised in the aggregate (everything but `run_id` and `m`).
pub const VALUE_COLUMNS: [&str; 17] = [
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

fn values(r: &RunRecord) -> [Option<f64>; 17] {
    [
        Some(r.t),
        Some(r.q as f64),
        Some(r.q_tilde),
        r.q_star,
        r.ybar,
        Some(r.y_tilde),
        r.ybar_star,
        r.xbar,
        Some(r.x_tilde),
        r.xbar_star,
        r.lambda,
        r.mu,
        r.lyapunov,
        Some(r.max_deg as f64),
        r.var_y,
        r.cov_xy,
        Some(r.sample_size as f64),
    ]
}

/// Median, 10th and 90th percentile of the defined values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantiles {
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
}

/// Linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub m: u64,
    pub runs: usize,
    pub columns: Vec<Option<Quantiles>>,
}

/// Groups rows by `m` across runs. The result does not depend on the order
/// of the input rows.
pub fn aggregate(rows: &[CsvRow]) -> Vec<AggregateRow> {
    let mut by_m: BTreeMap<u64, Vec<&CsvRow>> = BTreeMap::new();
    for r in rows {
        by_m.entry(r.record.m).or_default().push(r);
    }
    by_m.into_iter()
        .map(|(m, group)| {
            let mut cols: Vec<Vec<f64>> = vec![Vec::new(); VALUE_COLUMNS.len()];
            for r in &group {
                for (c, v) in values(&r.record).into_iter().enumerate() {
                    if let Some(v) = v {
                        cols[c].push(v);
                    }
                }
            }
            let columns = cols
                .into_iter()
                .map(|mut v| {
                    if v.is_empty() {
                        return None;
                    }
                    v.sort_by(f64::total_cmp);
                    Some(Quantiles {
                        median: quantile(&v, 0.5),
                        p10: quantile(&v, 0.1),
                        p90: quantile(&v, 0.9),
                    })
                })
                .collect();
            AggregateRow {
                m,
                runs: group.len(),
                columns,
            }
        })
        .collect()
}

pub fn header() -> Vec<String> {
    let mut h = vec!["m".to_string(), "runs".to_string()];
    for c in VALUE_COLUMNS {
        for s in ["median", "p10", "p90"] {
            h.push(format!("{c}_{s}"));
        }
    }
    h
}

pub fn write_aggregate<W: Write>(out: W, rows: &[AggregateRow]) -> Result<(), CsvError> {
    let mut w = ::csv::Writer::from_writer(out);
    w.write_record(header())?;
    for r in rows {
        let mut rec = vec![r.m.to_string(), r.runs.to_string()];
        for q in &r.columns {
            match q {
                Some(q) => rec.extend([q.median, q.p10, q.p90].map(format_sig9)),
                None => rec.extend(std::iter::repeat_n(String::new(), 3)),
            }
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn aggregate_to_string(rows: &[CsvRow]) -> String {
    let mut buf = Vec::new();
    write_aggregate(&mut buf, &aggregate(rows)).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

const _: () = assert!(COLUMNS.len() == VALUE_COLUMNS.len() + 2);
