//! The eight-configuration comparison grid and its summary table.

use std::fmt::Write as _;
use std::path::Path;

use crate::engine::EaConfig;
use crate::error::{Error, Result};
use crate::harness::csvio::format_verdicts;
use crate::harness::{ensure_dir, run_experiment, write_atomic, write_outputs, ExperimentResult, ExperimentSpec};
use crate::matching::Strategy;
use crate::stats::Verdict;

/// `(V, N, TS, CR)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub v: usize,
    pub n: usize,
    pub ts: usize,
    pub cr: f64,
}

impl GridPoint {
    pub const fn new(v: usize, n: usize, ts: usize, cr: f64) -> Self {
        GridPoint { v, n, ts, cr }
    }

    /// `(8, 200, 200, 0.5)`
    pub fn label(&self) -> String {
        format!("({}, {}, {}, {})", self.v, self.n, self.ts, self.cr)
    }

    pub fn config(&self) -> EaConfig {
        EaConfig::new(self.v, self.n, self.ts, self.cr)
    }
}

pub const GRID: [GridPoint; 8] = [
    GridPoint::new(6, 200, 200, 0.5),
    GridPoint::new(7, 200, 200, 0.5),
    GridPoint::new(8, 200, 200, 0.5),
    GridPoint::new(8, 200, 200, 0.25),
    GridPoint::new(8, 200, 200, 0.75),
    GridPoint::new(8, 100, 200, 0.5),
    GridPoint::new(8, 400, 200, 0.5),
    GridPoint::new(8, 200, 400, 0.5),
];

pub const STRATEGIES: [Strategy; 3] = [Strategy::Standard, Strategy::Hybrid2, Strategy::HybridN];

pub const FULL_REPEATS: usize = 400;
pub const DESK_REPEATS: usize = 100;

/// Hybrid-2 and Hybrid-N verdicts for one grid point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table1Row {
    pub point: GridPoint,
    pub hybrid2: Verdict,
    pub hybridn: Verdict,
}

/// Renders one line per grid point in [`GRID`] order. Every point must be
/// present in `rows`.
pub fn emit_table1(rows: &[Table1Row]) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{:<22}{:<24}Hybrid-N", "Experiment", "Hybrid-2").unwrap();
    writeln!(out, "{:<22}(compared to standard)", "(V, N, TS, CR)").unwrap();
    for point in GRID {
        let row = rows
            .iter()
            .find(|r| r.point == point)
            .ok_or_else(|| Error::config(format!("missing configuration {}", point.label())))?;
        writeln!(
            out,
            "{:<22}{:<24}{}",
            point.label(),
            row.hybrid2.label.phrase(),
            row.hybridn.label.phrase()
        )
        .unwrap();
    }
    Ok(out)
}

/// Settings shared by every grid point of a table run.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSettings {
    pub repeats: usize,
    pub iterations: usize,
    pub mutation_rate: f64,
    pub master_seed: u64,
    pub workers: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            repeats: FULL_REPEATS,
            iterations: crate::engine::DEFAULT_ITERATIONS,
            mutation_rate: crate::engine::DEFAULT_MUTATION_RATE,
            master_seed: 0,
            workers: 1,
        }
    }
}

pub fn grid_spec(point: GridPoint, settings: &GridSettings) -> ExperimentSpec {
    let mut base = point.config();
    base.iterations = settings.iterations;
    base.mutation_rate = settings.mutation_rate;
    ExperimentSpec::new(base, STRATEGIES.to_vec(), settings.repeats, settings.master_seed)
}

/// Runs the full grid, writing each point under `out/<label>/`, plus a
/// combined `verdicts.csv` and `table1.txt` in `out`.
pub fn run_table1(settings: &GridSettings, out: &Path, mut progress: impl FnMut(&ExperimentResult)) -> Result<String> {
    ensure_dir(out)?;
    let mut rows = Vec::new();
    let mut verdict_rows = Vec::new();
    for point in GRID {
        let spec = grid_spec(point, settings);
        let result = run_experiment(&spec, settings.workers)?;
        write_outputs(&result, &out.join(spec.label()))?;
        progress(&result);
        let get = |s| {
            result
                .verdict(s)
                .copied()
                .ok_or_else(|| Error::config(format!("no verdict for {s}")))
        };
        rows.push(Table1Row {
            point,
            hybrid2: get(Strategy::Hybrid2)?,
            hybridn: get(Strategy::HybridN)?,
        });
        verdict_rows.extend(result.verdict_rows());
    }
    let table = emit_table1(&rows)?;
    write_atomic(out, "verdicts.csv", &format_verdicts(&verdict_rows))?;
    write_atomic(out, "table1.txt", &table)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::VerdictLabel;

    fn verdict(label: VerdictLabel) -> Verdict {
        Verdict {
            label,
            p_value: 0.5,
            mean_delta: 0.0,
        }
    }

    #[test]
    fn renders_all_rows_in_grid_order() {
        let mut rows: Vec<Table1Row> = GRID
            .iter()
            .map(|&point| Table1Row {
                point,
                hybrid2: verdict(VerdictLabel::BetterSignificant),
                hybridn: verdict(if point.v == 6 {
                    VerdictLabel::WorseSignificant
                } else {
                    VerdictLabel::SimilarInconclusive
                }),
            })
            .collect();
        rows.reverse();
        let text = emit_table1(&rows).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 10);
        for (line, point) in lines[2..].iter().zip(GRID) {
            assert!(line.starts_with(&point.label()), "{line}");
            assert!(line.contains("better, significant"));
        }
        assert!(lines[2].ends_with("worse, significant"));
        assert!(lines[3].ends_with("similar, inconclusive"));
    }

    #[test]
    fn missing_row_is_an_error() {
        let rows: Vec<Table1Row> = GRID[..7]
            .iter()
            .map(|&point| Table1Row {
                point,
                hybrid2: verdict(VerdictLabel::Better),
                hybridn: verdict(VerdictLabel::Worse),
            })
            .collect();
        assert!(emit_table1(&rows).is_err());
    }

    #[test]
    fn grid_labels() {
        assert_eq!(GRID[3].label(), "(8, 200, 200, 0.25)");
        let spec = grid_spec(GRID[0], &GridSettings::default());
        assert_eq!(spec.label(), "v6-n200-ts200-cr0.5");
        assert_eq!(spec.repeats, 400);
    }
}
