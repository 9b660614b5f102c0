//! Per-iteration trace records and their CSV / JSON persistence.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "t,gamma,epsilon,ne_gap,mce_gap,sne_gap,lyapunov_w,lyapunov_v";

/// Prefix of the trailing CSV comment line that marks an aborted run.
pub const ABORT_MARKER: &str = "# aborted: ";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceRecord {
    pub t: u64,
    /// Step size applied when leaving iteration `t`.
    pub gamma: f64,
    /// Best-response tolerance applied when leaving iteration `t`.
    pub epsilon: f64,
    /// Nash gap of `q(t)`.
    pub ne_gap: f64,
    /// Mean-centric gap of `q(t)`.
    pub mce_gap: f64,
    /// Symmetric-Nash gap of `qbar(t)`.
    pub sne_gap: f64,
    /// `U(qbar(t))`.
    pub lyapunov_w: f64,
    /// `(1/n) sum_i U(q_i(t), qbar_{-i}(t))`.
    pub lyapunov_v: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    /// Set when the run stopped early; the records up to that point are kept.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormat {
    #[default]
    Csv,
    Json,
}

impl TraceFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => TraceFormat::Json,
            _ => TraceFormat::Csv,
        }
    }
}

// 17 significant digits round-trip every f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(trace: &Trace, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &trace.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t,
            fmt_f64(r.gamma),
            fmt_f64(r.epsilon),
            fmt_f64(r.ne_gap),
            fmt_f64(r.mce_gap),
            fmt_f64(r.sne_gap),
            fmt_f64(r.lyapunov_w),
            fmt_f64(r.lyapunov_v)
        )?;
    }
    if let Some(e) = &trace.error {
        writeln!(out, "{ABORT_MARKER}{}", e.replace('\n', " "))?;
    }
    Ok(())
}

pub fn write_json<W: Write>(trace: &Trace, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, &trace.records)?;
    writeln!(out)
}

pub fn to_csv_string(trace: &Trace) -> String {
    let mut buf = Vec::new();
    write_csv(trace, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// Writes the trace to `path`, replacing any existing file.
pub fn emit_trace(trace: &Trace, path: impl AsRef<Path>, format: TraceFormat) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    match format {
        TraceFormat::Csv => write_csv(trace, &mut out),
        TraceFormat::Json => write_json(trace, &mut out),
    }
    .and_then(|_| out.flush())
    .map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Trace> {
    let mut error = None;
    let body: String = text
        .lines()
        .filter(|line| match line.strip_prefix(ABORT_MARKER) {
            Some(msg) => {
                error = Some(msg.to_string());
                false
            }
            None => true,
        })
        .flat_map(|l| [l, "\n"])
        .collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::invalid(format!(
            "unexpected trace header {:?}",
            header.join(",")
        )));
    }
    let records = reader
        .deserialize()
        .collect::<std::result::Result<Vec<TraceRecord>, _>>()?;
    Ok(Trace { records, error })
}

pub fn parse_json(text: &str) -> Result<Trace> {
    Ok(Trace {
        records: crate::json::from_str(text)?,
        error: None,
    })
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<Trace> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match TraceFormat::from_path(path) {
        TraceFormat::Csv => parse_csv(&text),
        TraceFormat::Json => parse_json(&text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(t: u64, x: f64) -> TraceRecord {
        TraceRecord {
            t,
            gamma: 1.0 / (t as f64 + 1.0),
            epsilon: 0.0,
            ne_gap: x,
            mce_gap: x / 3.0,
            sne_gap: x.sqrt(),
            lyapunov_w: 0.1 + x,
            lyapunov_v: 0.1 + x,
        }
    }

    #[test]
    fn empty_trace_is_header_only() {
        assert_eq!(to_csv_string(&Trace::default()), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn abort_marker_roundtrip() {
        let trace = Trace {
            records: vec![record(1, 0.5)],
            error: Some("internal consistency violation: boom".into()),
        };
        let back = parse_csv(&to_csv_string(&trace)).unwrap();
        assert_eq!(back, trace);
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(parse_csv("t,gamma\n1,0.5\n").is_err());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(TraceFormat::from_path(Path::new("a/b.JSON")), TraceFormat::Json);
        assert_eq!(TraceFormat::from_path(Path::new("a/b.csv")), TraceFormat::Csv);
    }

    proptest! {
        #[test]
        fn csv_and_json_roundtrip_bit_exact(
            xs in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO | prop::num::f64::SUBNORMAL, 0..20)
        ) {
            let trace = Trace {
                records: xs.iter().enumerate().map(|(k, &x)| TraceRecord {
                    t: k as u64 + 1,
                    gamma: x,
                    epsilon: x.abs(),
                    ne_gap: -x,
                    mce_gap: x * 0.5,
                    sne_gap: x,
                    lyapunov_w: x,
                    lyapunov_v: x,
                }).collect(),
                error: None,
            };
            let back = parse_csv(&to_csv_string(&trace)).unwrap();
            for (a, b) in trace.records.iter().zip(&back.records) {
                prop_assert_eq!(a.gamma.to_bits(), b.gamma.to_bits());
                prop_assert_eq!(a.ne_gap.to_bits(), b.ne_gap.to_bits());
            }
            prop_assert_eq!(back.records.len(), trace.records.len());
            let mut buf = Vec::new();
            write_json(&trace, &mut buf).unwrap();
            let back = parse_json(std::str::from_utf8(&buf).unwrap()).unwrap();
            prop_assert_eq!(back, trace);
        }
    }
}
