//! Curve and verdict CSV files.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::stats::{AggregateCurve, Verdict, VerdictLabel};

pub const CURVE_HEADER: &str = "strategy,iteration,mean_best_accuracy,ci_low,ci_high";
pub const VERDICT_HEADER: &str = "config,strategy,baseline,mean_delta,p_value,label";
pub const FINALS_HEADER: &str = "strategy,run,final_best_accuracy";

/// One row of a curve file. Iterations are 1-based.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct CurveRow {
    pub strategy: String,
    pub iteration: usize,
    pub mean_best_accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct VerdictRow {
    pub config: String,
    pub strategy: String,
    pub baseline: String,
    pub mean_delta: f64,
    pub p_value: f64,
    pub label: String,
}

impl VerdictRow {
    pub fn new(config: &str, strategy: &str, baseline: &str, v: &Verdict) -> Self {
        VerdictRow {
            config: config.to_string(),
            strategy: strategy.to_string(),
            baseline: baseline.to_string(),
            mean_delta: v.mean_delta,
            p_value: v.p_value,
            label: v.label.name().to_string(),
        }
    }

    pub fn verdict(&self) -> Result<Verdict> {
        Ok(Verdict {
            label: self.label.parse::<VerdictLabel>()?,
            p_value: self.p_value,
            mean_delta: self.mean_delta,
        })
    }
}

pub fn format_curves<'a>(curves: impl IntoIterator<Item = (&'a str, &'a AggregateCurve)>) -> String {
    let mut out = String::from(CURVE_HEADER);
    out.push('\n');
    for (name, c) in curves {
        for t in 0..c.len() {
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{:.6}\n",
                name,
                t + 1,
                c.mean[t],
                c.ci_low[t],
                c.ci_high[t]
            ));
        }
    }
    out
}

pub fn format_verdicts(rows: &[VerdictRow]) -> String {
    let mut out = String::from(VERDICT_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6e},{}\n",
            r.config, r.strategy, r.baseline, r.mean_delta, r.p_value, r.label
        ));
    }
    out
}

pub fn format_finals<'a>(finals: impl IntoIterator<Item = (&'a str, &'a [f64])>) -> String {
    let mut out = String::from(FINALS_HEADER);
    out.push('\n');
    for (name, values) in finals {
        for (r, v) in values.iter().enumerate() {
            out.push_str(&format!("{name},{r},{v:.6}\n"));
        }
    }
    out
}

fn parse_rows<T: for<'de> Deserialize<'de>>(text: &str, header: &str, origin: &Path) -> Result<Vec<T>> {
    let bad = |message: String| Error::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let first = text.lines().next().unwrap_or_default();
    if first != header {
        return Err(bad(format!("expected header `{header}`, found `{first}`")));
    }
    let fields = header.split(',').count();
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != fields {
            return Err(bad(format!(
                "row {} has {} fields, expected {fields}",
                line + 2,
                record.len()
            )));
        }
        rows.push(record.deserialize(None).map_err(|e| bad(e.to_string()))?);
    }
    Ok(rows)
}

pub fn parse_curves(text: &str, origin: &Path) -> Result<Vec<CurveRow>> {
    parse_rows(text, CURVE_HEADER, origin)
}

pub fn parse_verdicts(text: &str, origin: &Path) -> Result<Vec<VerdictRow>> {
    parse_rows(text, VERDICT_HEADER, origin)
}

pub fn read_curves(path: &Path) -> Result<Vec<CurveRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_curves(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_rows_parse_back() {
        let c = AggregateCurve {
            mean: vec![0.5, 0.625],
            ci_low: vec![0.4, 0.6],
            ci_high: vec![0.6, 0.65],
            repeats: 3,
        };
        let text = format_curves([("standard", &c), ("hybrid2", &c)]);
        assert!(text.starts_with(
            "strategy,iteration,mean_best_accuracy,ci_low,ci_high\nstandard,1,0.500000,0.400000,0.600000\n"
        ));
        let rows = parse_curves(&text, Path::new("x")).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[3].strategy, "hybrid2");
        assert_eq!(rows[3].iteration, 2);
        assert_eq!(rows[3].mean_best_accuracy, 0.625);
    }

    #[test]
    fn rejects_wrong_header_and_ragged_rows() {
        assert!(parse_curves("a,b\n", Path::new("x")).is_err());
        let text = format!("{CURVE_HEADER}\nstandard,1,0.5,0.4\n");
        assert!(matches!(parse_curves(&text, Path::new("x")), Err(Error::Parse { .. })));
    }

    #[test]
    fn verdict_rows_parse_back() {
        let v = Verdict {
            label: VerdictLabel::WorseSignificant,
            p_value: 1.25e-7,
            mean_delta: -0.0125,
        };
        let row = VerdictRow::new("v6-n200-ts200-cr0.5", "hybridn", "standard", &v);
        let text = format_verdicts(std::slice::from_ref(&row));
        let back = parse_verdicts(&text, Path::new("x")).unwrap();
        assert_eq!(back, vec![row]);
        assert_eq!(back[0].verdict().unwrap(), v);
    }
}
