//! Curve aggregation with Student-t confidence intervals and Welch's t-test
//! verdicts against the baseline.

use std::fmt;
use std::str::FromStr;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::engine::RunTrace;
use crate::error::{Error, Result};

pub const CONFIDENCE: f64 = 0.95;
pub const SIGNIFICANCE: f64 = 0.05;
/// Mean differences below this are reported as `similar-inconclusive`.
pub const DEFAULT_EPSILON: f64 = 0.002;

/// Mean best-so-far accuracy per iteration with 95% CI bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateCurve {
    pub mean: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub repeats: usize,
}

impl AggregateCurve {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

/// Mean, sample standard deviation and count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Summary {
        let n = xs.len();
        // shifted by the first value so constant samples average exactly
        let shift = xs[0];
        let mean = shift + xs.iter().map(|x| x - shift).sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Summary {
            mean,
            sd: var.sqrt(),
            n,
        }
    }

    pub fn std_error(&self) -> f64 {
        self.sd / (self.n as f64).sqrt()
    }
}

/// Two-sided Student-t critical value for the given confidence and degrees of freedom.
pub fn t_critical(confidence: f64, df: f64) -> f64 {
    let t = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    t.inverse_cdf(0.5 + confidence / 2.0)
}

/// Half-width of the 95% CI of a mean.
pub fn ci_half_width(s: &Summary) -> f64 {
    t_critical(CONFIDENCE, (s.n - 1) as f64) * s.std_error()
}

pub fn aggregate(traces: &[RunTrace]) -> Result<AggregateCurve> {
    if traces.len() < 2 {
        return Err(Error::config(format!("need at least 2 traces, got {}", traces.len())));
    }
    let len = traces[0].best_so_far.len();
    if traces.iter().any(|t| t.best_so_far.len() != len) {
        return Err(Error::config("traces have different lengths"));
    }
    let tcrit = t_critical(CONFIDENCE, (traces.len() - 1) as f64);
    let mut curve = AggregateCurve {
        mean: Vec::with_capacity(len),
        ci_low: Vec::with_capacity(len),
        ci_high: Vec::with_capacity(len),
        repeats: traces.len(),
    };
    let mut column = Vec::with_capacity(traces.len());
    for t in 0..len {
        column.clear();
        column.extend(traces.iter().map(|tr| tr.best_so_far[t]));
        let s = Summary::of(&column);
        let hw = tcrit * s.std_error();
        curve.mean.push(s.mean);
        curve.ci_low.push(s.mean - hw);
        curve.ci_high.push(s.mean + hw);
    }
    Ok(curve)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WelchTest {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
}

/// Welch's unequal-variance t-test of `a - b`.
///
/// With zero pooled standard error, p is 1 for equal means and 0 otherwise.
pub fn welch(a: &Summary, b: &Summary) -> WelchTest {
    let va = a.sd * a.sd / a.n as f64;
    let vb = b.sd * b.sd / b.n as f64;
    let se2 = va + vb;
    let diff = a.mean - b.mean;
    if se2 == 0.0 {
        let p = if diff == 0.0 { 1.0 } else { 0.0 };
        let t = if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        return WelchTest {
            t,
            df: (a.n + b.n - 2) as f64,
            p,
        };
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    WelchTest { t, df, p }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictLabel {
    BetterSignificant,
    Better,
    SimilarInconclusive,
    Worse,
    WorseSignificant,
}

impl VerdictLabel {
    const ALL: [VerdictLabel; 5] = [
        VerdictLabel::BetterSignificant,
        VerdictLabel::Better,
        VerdictLabel::SimilarInconclusive,
        VerdictLabel::Worse,
        VerdictLabel::WorseSignificant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VerdictLabel::BetterSignificant => "better-significant",
            VerdictLabel::Better => "better",
            VerdictLabel::SimilarInconclusive => "similar-inconclusive",
            VerdictLabel::Worse => "worse",
            VerdictLabel::WorseSignificant => "worse-significant",
        }
    }

    /// Wording used in the summary table.
    pub fn phrase(self) -> &'static str {
        match self {
            VerdictLabel::BetterSignificant => "better, significant",
            VerdictLabel::Better => "better",
            VerdictLabel::SimilarInconclusive => "similar, inconclusive",
            VerdictLabel::Worse => "worse",
            VerdictLabel::WorseSignificant => "worse, significant",
        }
    }

    pub fn is_significant(self) -> bool {
        matches!(self, VerdictLabel::BetterSignificant | VerdictLabel::WorseSignificant)
    }

    pub fn mirrored(self) -> VerdictLabel {
        match self {
            VerdictLabel::BetterSignificant => VerdictLabel::WorseSignificant,
            VerdictLabel::Better => VerdictLabel::Worse,
            VerdictLabel::SimilarInconclusive => VerdictLabel::SimilarInconclusive,
            VerdictLabel::Worse => VerdictLabel::Better,
            VerdictLabel::WorseSignificant => VerdictLabel::BetterSignificant,
        }
    }
}

impl fmt::Display for VerdictLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VerdictLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VerdictLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::config(format!("unknown verdict label `{s}`")))
    }
}

/// Outcome of a method compared to the baseline at the final iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub label: VerdictLabel,
    pub p_value: f64,
    /// Method mean minus baseline mean.
    pub mean_delta: f64,
}

impl Verdict {
    pub fn classify(p_value: f64, mean_delta: f64, epsilon: f64) -> Verdict {
        let label = if p_value < SIGNIFICANCE {
            if mean_delta > 0.0 {
                VerdictLabel::BetterSignificant
            } else {
                VerdictLabel::WorseSignificant
            }
        } else if mean_delta.abs() < epsilon {
            VerdictLabel::SimilarInconclusive
        } else if mean_delta > 0.0 {
            VerdictLabel::Better
        } else {
            VerdictLabel::Worse
        };
        Verdict {
            label,
            p_value,
            mean_delta,
        }
    }
}

/// Verdict from summary statistics of the two final-value samples.
pub fn compare_summaries(method: &Summary, baseline: &Summary, epsilon: f64) -> Result<Verdict> {
    if method.n < 2 || baseline.n < 2 {
        return Err(Error::config("comparison needs at least 2 samples per side"));
    }
    let test = welch(method, baseline);
    Ok(Verdict::classify(test.p, method.mean - baseline.mean, epsilon))
}

/// Welch's two-sided test on final best-so-far values.
pub fn compare(method: &[f64], baseline: &[f64], epsilon: f64) -> Result<Verdict> {
    if method.len() < 2 || baseline.len() < 2 {
        return Err(Error::config("comparison needs at least 2 samples per side"));
    }
    compare_summaries(&Summary::of(method), &Summary::of(baseline), epsilon)
}
