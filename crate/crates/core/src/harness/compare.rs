//! Offline comparison of two curve files at their final iteration.
//!
//! Curve files carry the mean and CI bounds but not the raw samples, so the
//! standard deviation is recovered from the CI half-width and the repeat
//! count: `sd = half_width / t(0.975, R-1) * sqrt(R)`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::config::ConfigFile;
use crate::harness::csvio::{read_curves, CurveRow};
use crate::stats::{compare_summaries, t_critical, Summary, Verdict, CONFIDENCE};

/// Last-iteration row of `strategy`, or of the only strategy in the file.
pub fn final_row(rows: &[CurveRow], strategy: Option<&str>, origin: &Path) -> Result<CurveRow> {
    let bad = |message: String| Error::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let name = match strategy {
        Some(s) => s.to_string(),
        None => {
            let mut names: Vec<&str> = rows.iter().map(|r| r.strategy.as_str()).collect();
            names.dedup();
            match names.as_slice() {
                [one] => one.to_string(),
                [] => return Err(bad("no data rows".into())),
                _ => {
                    return Err(bad(format!(
                        "several strategies present ({}); pick one",
                        names.join(", ")
                    )))
                }
            }
        }
    };
    rows.iter()
        .filter(|r| r.strategy == name)
        .max_by_key(|r| r.iteration)
        .cloned()
        .ok_or_else(|| bad(format!("strategy `{name}` not found")))
}

/// Repeat count from `experiment.toml` next to a curve file.
pub fn sibling_repeats(curve_path: &Path) -> Option<usize> {
    let meta = curve_path.parent()?.join("experiment.toml");
    ConfigFile::load(&meta).ok().map(|c| c.repeats)
}

pub fn summary_from_row(row: &CurveRow, repeats: usize) -> Result<Summary> {
    if repeats < 2 {
        return Err(Error::config("repeats must be >= 2"));
    }
    let half = (row.ci_high - row.ci_low) / 2.0;
    let sd = half / t_critical(CONFIDENCE, (repeats - 1) as f64) * (repeats as f64).sqrt();
    Ok(Summary {
        mean: row.mean_best_accuracy,
        sd: sd.max(0.0),
        n: repeats,
    })
}

pub struct CurveSide<'a> {
    pub path: &'a Path,
    pub strategy: Option<&'a str>,
    /// Overrides the sibling `experiment.toml`.
    pub repeats: Option<usize>,
}

impl CurveSide<'_> {
    fn summary(&self) -> Result<(String, Summary)> {
        let rows = read_curves(self.path)?;
        let row = final_row(&rows, self.strategy, self.path)?;
        let repeats = self.repeats.or_else(|| sibling_repeats(self.path)).ok_or_else(|| {
            Error::config(format!(
                "repeat count unknown for {}; pass --repeats",
                self.path.display()
            ))
        })?;
        Ok((row.strategy.clone(), summary_from_row(&row, repeats)?))
    }
}

/// Verdict of `a` against `b` at the final iteration, with both strategy names.
pub fn compare_curve_files(a: &CurveSide, b: &CurveSide, epsilon: f64) -> Result<(String, String, Verdict)> {
    let (name_a, sa) = a.summary()?;
    let (name_b, sb) = b.summary()?;
    Ok((name_a, name_b, compare_summaries(&sa, &sb, epsilon)?))
}
