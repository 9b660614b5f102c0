use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub ne: f64,
    pub mce: f64,
    pub sne: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            ne: 0.05,
            mce: 0.05,
            sne: 0.05,
        }
    }
}

/// Final value, running minimum and first threshold crossing of one gap column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub last: f64,
    pub min: f64,
    pub threshold: f64,
    /// Whether the running minimum reached the threshold.
    pub converged: bool,
    /// First recorded `t` whose gap is at or below the threshold.
    pub first_crossing: Option<u64>,
}

impl GapSummary {
    fn from_column(rows: impl Iterator<Item = (u64, f64)>, threshold: f64) -> Self {
        let mut last = f64::NAN;
        let mut min = f64::INFINITY;
        let mut first_crossing = None;
        for (t, g) in rows {
            last = g;
            min = min.min(g);
            if g <= threshold && first_crossing.is_none() {
                first_crossing = Some(t);
            }
        }
        Self {
            last,
            min,
            threshold,
            converged: first_crossing.is_some(),
            first_crossing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub final_t: u64,
    pub ne: GapSummary,
    pub mce: GapSummary,
    pub sne: GapSummary,
    pub aborted: Option<String>,
}

impl ConvergenceReport {
    /// Both ECFP targets: mean-centric gap of `q` and symmetric gap of `qbar`.
    pub fn ecfp_converged(&self) -> bool {
        self.mce.converged && self.sne.converged
    }
}

pub fn summarize(trace: &Trace, thresholds: &Thresholds) -> Result<ConvergenceReport> {
    let last = trace
        .records
        .last()
        .ok_or_else(|| Error::invalid("cannot summarize an empty trace"))?;
    let col = |f: fn(&crate::trace::TraceRecord) -> f64, th| {
        GapSummary::from_column(trace.records.iter().map(|r| (r.t, f(r))), th)
    };
    Ok(ConvergenceReport {
        final_t: last.t,
        ne: col(|r| r.ne_gap, thresholds.ne),
        mce: col(|r| r.mce_gap, thresholds.mce),
        sne: col(|r| r.sne_gap, thresholds.sne),
        aborted: trace.error.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::TraceRecord;

    fn rec(t: u64, g: f64) -> TraceRecord {
        TraceRecord {
            t,
            gamma: 0.1,
            epsilon: 0.0,
            ne_gap: g,
            mce_gap: g / 2.0,
            sne_gap: g * 2.0,
            lyapunov_w: 0.5,
            lyapunov_v: 0.5,
        }
    }

    #[test]
    fn empty_trace_rejected() {
        assert!(summarize(&Trace::default(), &Thresholds::default()).is_err());
    }

    #[test]
    fn single_record_report() {
        let trace = Trace {
            records: vec![rec(1, 0.3)],
            error: None,
        };
        let r = summarize(&trace, &Thresholds::default()).unwrap();
        assert_eq!(r.final_t, 1);
        assert_eq!((r.ne.last, r.ne.min), (0.3, 0.3));
        assert_eq!((r.mce.last, r.mce.min), (0.15, 0.15));
        assert_eq!((r.sne.last, r.sne.min), (0.6, 0.6));
        assert!(!r.ne.converged);
    }

    #[test]
    fn running_minimum_and_crossings() {
        let trace = Trace {
            records: vec![rec(1, 0.4), rec(2, 0.04), rec(3, 0.2), rec(4, 0.01)],
            error: None,
        };
        let r = summarize(&trace, &Thresholds::default()).unwrap();
        assert_eq!(r.ne.min, 0.01);
        assert_eq!(r.ne.last, 0.01);
        assert_eq!(r.ne.first_crossing, Some(2));
        assert_eq!(r.sne.first_crossing, Some(4));
        assert!(r.ecfp_converged());
    }

    #[test]
    fn loose_thresholds_always_converge() {
        let trace = Trace {
            records: vec![rec(1, 0.9)],
            error: None,
        };
        let th = Thresholds {
            ne: 10.0,
            mce: 10.0,
            sne: 10.0,
        };
        let r = summarize(&trace, &th).unwrap();
        assert!(r.ne.converged && r.ecfp_converged());
    }
}
