//! CSV persistence of experiment records.

use std::io::{Read, Write};

use anyhow::{Context, Result};
use bai_core::harness::ExperimentRecord;

pub const HEADER: [&str; 12] = [
    "algorithm",
    "instance",
    "family",
    "param",
    "metric_grid_value",
    "replications",
    "error_rate",
    "error_ci_halfwidth",
    "mean_tau",
    "std_tau",
    "exhausted_count",
    "seed",
];

/// Significant digits written for floating-point columns.
pub const SIG_DIGITS: usize = 12;

/// Formats like C's `%.{digits}g`: shortest of fixed and scientific
/// notation, trailing zeros removed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sig(x: f64) -> String {
    fmt_sig(x, SIG_DIGITS)
}

/// The record as it reads back from CSV: floats rounded to
/// [`SIG_DIGITS`] significant digits.
pub fn canonical(r: &ExperimentRecord) -> ExperimentRecord {
    let round = |x: f64| sig(x).parse::<f64>().expect("formatted float parses");
    ExperimentRecord {
        metric_grid_value: round(r.metric_grid_value),
        error_rate: round(r.error_rate),
        error_ci_halfwidth: round(r.error_ci_halfwidth),
        mean_tau: round(r.mean_tau),
        std_tau: round(r.std_tau),
        ..r.clone()
    }
}

pub fn write_records<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            r.algorithm.clone(),
            r.instance.clone(),
            r.family.clone(),
            r.param.clone(),
            sig(r.metric_grid_value),
            r.replications.to_string(),
            sig(r.error_rate),
            sig(r.error_ci_halfwidth),
            sig(r.mean_tau),
            sig(r.std_tau),
            r.exhausted_count.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn records_to_string(records: &[ExperimentRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_records(&mut buf, records)?;
    Ok(String::from_utf8(buf)?)
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != HEADER {
        anyhow::bail!("unexpected CSV header: {}", header.join(","));
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, row)| row.with_context(|| format!("CSV row {}", i + 1)))
        .collect()
}
