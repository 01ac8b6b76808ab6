//! Browser bindings. Each export takes a JSON parameter object and returns a
//! JSON string; errors surface as JS exceptions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use cofit::matching::{score_pairs, Scorer};
use cofit::{
    crossover_quota, evaluate, generate_problem, plan, random_tree, run_experiment, side_accuracy, DecisionTree,
    EaConfig, ExperimentSpec, Side, Strategy,
};

// keep a single call well under a few seconds in the browser
const MAX_REPEATS: usize = 30;
const MAX_WORK: usize = 2_000_000;
const MAX_PREVIEW_N: usize = 40;

#[derive(Deserialize)]
pub struct CurveParams {
    pub v: usize,
    pub n: usize,
    pub ts: usize,
    pub cr: f64,
    pub iterations: usize,
    pub repeats: usize,
    pub seed: u64,
    pub strategies: Vec<String>,
}

#[derive(Serialize)]
pub struct Curve {
    pub strategy: String,
    pub mean: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
}

#[derive(Serialize)]
pub struct VerdictView {
    pub strategy: String,
    pub label: String,
    pub mean_delta: f64,
    pub p_value: f64,
}

#[derive(Serialize)]
pub struct CurveReport {
    pub label: String,
    pub curves: Vec<Curve>,
    pub verdicts: Vec<VerdictView>,
}

fn parse_strategies(names: &[String]) -> Result<Vec<Strategy>, String> {
    names
        .iter()
        .map(|s| s.parse().map_err(|e: cofit::Error| e.to_string()))
        .collect()
}

/// Mean best-so-far curves with 95% bands for each requested strategy.
pub fn curves(p: &CurveParams) -> Result<CurveReport, String> {
    if p.repeats > MAX_REPEATS {
        return Err(format!("at most {MAX_REPEATS} repeats in the browser"));
    }
    let work = p.repeats * p.strategies.len() * p.iterations * p.n;
    if work > MAX_WORK {
        return Err(format!(
            "repeats x strategies x iterations x n = {work} exceeds the browser limit of {MAX_WORK}"
        ));
    }
    let mut base = EaConfig::new(p.v, p.n, p.ts, p.cr);
    base.iterations = p.iterations;
    let spec = ExperimentSpec::new(base, parse_strategies(&p.strategies)?, p.repeats, p.seed);
    let result = run_experiment(&spec, 1).map_err(|e| e.to_string())?;
    Ok(CurveReport {
        label: spec.label(),
        curves: result
            .outcomes
            .iter()
            .map(|o| Curve {
                strategy: o.strategy.name().to_string(),
                mean: o.curve.mean.clone(),
                ci_low: o.curve.ci_low.clone(),
                ci_high: o.curve.ci_high.clone(),
            })
            .collect(),
        verdicts: result
            .verdicts
            .iter()
            .map(|(s, v)| VerdictView {
                strategy: s.name().to_string(),
                label: v.label.phrase().to_string(),
                mean_delta: v.mean_delta,
                p_value: v.p_value,
            })
            .collect(),
    })
}

#[derive(Deserialize)]
pub struct PlanParams {
    pub v: usize,
    pub n: usize,
    pub ts: usize,
    pub cr: f64,
    pub strategy: String,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct Member {
    pub tree: String,
    pub fitness: f64,
}

#[derive(Serialize)]
pub struct PairView {
    pub i: usize,
    pub j: usize,
    /// Pair score under the strategy's scorer; absent for fitness-based pairing.
    pub co_fitness: Option<f64>,
}

#[derive(Serialize)]
pub struct PlanReport {
    pub quota: usize,
    pub population: Vec<Member>,
    pub pairs: Vec<PairView>,
    pub recombined: Vec<usize>,
}

/// One generation's mating plan over a fresh random population.
pub fn plan_preview(p: &PlanParams) -> Result<PlanReport, String> {
    if p.n > MAX_PREVIEW_N {
        return Err(format!("preview population is limited to {MAX_PREVIEW_N}"));
    }
    let strategy: Strategy = p.strategy.parse().map_err(|e: cofit::Error| e.to_string())?;
    let config = EaConfig::new(p.v, p.n, p.ts, p.cr);
    config.validate().map_err(|e| e.to_string())?;
    let (data, _) = generate_problem(p.v, p.ts, p.seed).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let population = (0..p.n)
        .map(|_| random_tree(p.v, p.v, &mut rng).map(|t| evaluate(t, &data)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let quota = crossover_quota(p.n, p.cr).map_err(|e| e.to_string())?;
    let matching = plan(strategy, &population, &data, quota, &mut rng);

    let scorer = match strategy {
        Strategy::Novel2 | Strategy::Hybrid2 => Some(Scorer::Novel2),
        Strategy::NovelN | Strategy::HybridN => Some(Scorer::NovelN),
        Strategy::Standard | Strategy::StandardRoulette => None,
    };
    let scores = scorer.map(|s| score_pairs(&population, s, &data)).unwrap_or_default();
    let score_of = |i: usize, j: usize| {
        let (a, b) = (i.min(j), i.max(j));
        scores.iter().find(|s| s.i == a && s.j == b).map(|s| s.co_fitness)
    };

    Ok(PlanReport {
        quota,
        pairs: matching
            .pairs
            .iter()
            .map(|&(i, j)| PairView {
                i,
                j,
                co_fitness: score_of(i, j),
            })
            .collect(),
        recombined: matching.recombined.into_iter().collect(),
        population: population
            .iter()
            .map(|ind| Member {
                tree: ind.tree.to_string(),
                fitness: ind.fitness,
            })
            .collect(),
    })
}

#[derive(Deserialize)]
pub struct TreeParams {
    pub v: usize,
    pub ts: usize,
    pub seed: u64,
    /// S-expression to score; a random tree is drawn when absent or empty.
    #[serde(default)]
    pub tree: Option<String>,
}

#[derive(Serialize)]
pub struct TreeReport {
    pub target: String,
    pub tree: String,
    pub accuracy: f64,
    pub left_accuracy: f64,
    pub right_accuracy: f64,
}

/// Scores a given or random tree against a fresh problem instance.
pub fn inspect_tree(p: &TreeParams) -> Result<TreeReport, String> {
    let (data, target) = generate_problem(p.v, p.ts, p.seed).map_err(|e| e.to_string())?;
    let tree: DecisionTree = match p.tree.as_deref().map(str::trim) {
        Some(text) if !text.is_empty() => {
            let t: DecisionTree = text.parse().map_err(|e: cofit::Error| e.to_string())?;
            if !t.is_valid(p.v, usize::MAX) {
                return Err(format!("tree must split at the root and use only x0..x{}", p.v - 1));
            }
            t
        }
        _ => random_tree(p.v, p.v, &mut ChaCha8Rng::seed_from_u64(p.seed ^ 1)).map_err(|e| e.to_string())?,
    };
    let ind = evaluate(tree, &data);
    Ok(TreeReport {
        target: target.tree.to_string(),
        tree: ind.tree.to_string(),
        accuracy: ind.fitness,
        left_accuracy: side_accuracy(&ind, Side::Left, &data),
        right_accuracy: side_accuracy(&ind, Side::Right, &data),
    })
}

fn call<P: for<'de> Deserialize<'de>, R: Serialize>(
    params: &str,
    f: impl FnOnce(&P) -> Result<R, String>,
) -> Result<String, JsError> {
    let p: P = serde_json::from_str(params).map_err(|e| JsError::new(&e.to_string()))?;
    let r = f(&p).map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&r).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = runCurves)]
pub fn run_curves_js(params: &str) -> Result<String, JsError> {
    call(params, curves)
}

#[wasm_bindgen(js_name = planPreview)]
pub fn plan_preview_js(params: &str) -> Result<String, JsError> {
    call(params, plan_preview)
}

#[wasm_bindgen(js_name = inspectTree)]
pub fn inspect_tree_js(params: &str) -> Result<String, JsError> {
    call(params, inspect_tree)
}
