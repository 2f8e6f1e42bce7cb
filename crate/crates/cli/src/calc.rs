use std::path::PathBuf;

use serde_json::{json, Value};

use raz_core::params::{
    corollary1_eval, monotone_correct, optimize_max_m, optimize_min_k2, theorem1_eval,
    ExtractorClaim, Model, Optimum, Outcome, SourcePair,
};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    MaxM,
    MinK2,
    AnalyticTheorem1,
    AnalyticCorollary1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SearchModel {
    Weak,
    Strong,
    QuantumMarkov,
}

impl From<SearchModel> for Model {
    fn from(m: SearchModel) -> Self {
        match m {
            SearchModel::Weak => Model::Weak,
            SearchModel::Strong => Model::Strong,
            SearchModel::QuantumMarkov => Model::QuantumMarkov,
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct ParamsArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub k1: Option<usize>,
    /// Defaults to n1 / 2.
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub k2: Option<usize>,
    /// Output length; used by min-k2.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Target error as a base-2 exponent, e.g. -16.
    #[arg(long, allow_hyphen_values = true)]
    pub log2_eps: Option<f64>,
    #[arg(long, value_enum, default_value = "weak")]
    pub model: SearchModel,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Emit a CSV curve of this many grid points instead of a single JSON
    /// document (max-m sweeps alpha2, min-k2 sweeps alpha1).
    #[arg(long)]
    pub curve: Option<usize>,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn need<T: Copy>(v: Option<T>, flag: &str, mode: Mode) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::usage(format!("--{flag} is required for mode {mode:?}")))
}

fn claim_value(c: &ExtractorClaim) -> Value {
    serde_json::to_value(c).expect("claims serialize")
}

fn document(mode: &str, claims: &[&ExtractorClaim], extra: Value) -> Value {
    let notes: Vec<&String> = claims.iter().flat_map(|c| &c.notes).collect();
    let mut doc = json!({
        "feasible": true,
        "mode": mode,
        "claims": claims.iter().map(|c| claim_value(c)).collect::<Vec<_>>(),
        "notes": notes,
    });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    doc
}

fn infeasible(mode: &str, reason: &str) -> Value {
    json!({
        "feasible": false,
        "mode": mode,
        "reason": reason,
        "claims": [],
        "notes": [],
    })
}

fn optimum_doc(mode: &str, outcome: Outcome<Optimum>) -> Value {
    match outcome {
        Outcome::Feasible(o) => document(
            mode,
            &[&o.claim],
            json!({"p": o.params.p, "l": o.params.l}),
        ),
        Outcome::Infeasible(r) => infeasible(mode, &r),
    }
}

fn source(a: &ParamsArgs, k1: usize, k2: usize) -> Result<SourcePair, Failure> {
    Ok(SourcePair::new(a.n1, k1, a.n2.unwrap_or(a.n1 / 2), k2)?)
}

/// The JSON document for a single (non-curve) request.
pub fn params_document(a: &ParamsArgs) -> Result<Value, Failure> {
    let k1 = need(a.k1, "k1", a.mode)?;
    let n2 = a.n2.unwrap_or(a.n1 / 2);
    Ok(match a.mode {
        Mode::MaxM => {
            let src = source(a, k1, need(a.k2, "k2", a.mode)?)?;
            let eps = need(a.log2_eps, "log2-eps", a.mode)?;
            optimum_doc("max-m", optimize_max_m(&src, eps, a.model.into())?)
        }
        Mode::MinK2 => {
            let eps = need(a.log2_eps, "log2-eps", a.mode)?;
            optimum_doc(
                "min-k2",
                optimize_min_k2(a.n1, k1, n2, eps, a.m, a.model.into())?,
            )
        }
        Mode::AnalyticTheorem1 => {
            let src = source(a, k1, need(a.k2, "k2", a.mode)?)?;
            match theorem1_eval(&src, need(a.lambda, "lambda", a.mode)?)? {
                Outcome::Feasible(t) => document(
                    "analytic-theorem1",
                    &[&t.weak, &t.strong],
                    json!({"delta": t.delta, "lambda": t.lambda, "m": t.weak.m}),
                ),
                Outcome::Infeasible(r) => infeasible("analytic-theorem1", &r),
            }
        }
        Mode::AnalyticCorollary1 => {
            let src = source(a, k1, need(a.k2, "k2", a.mode)?)?;
            match corollary1_eval(&src, need(a.lambda, "lambda", a.mode)?)? {
                Outcome::Feasible(c) => document(
                    "analytic-corollary1",
                    &[&c.claim],
                    json!({"delta": c.delta, "lambda": c.lambda, "m": c.claim.m}),
                ),
                Outcome::Infeasible(r) => infeasible("analytic-corollary1", &r),
            }
        }
    })
}

/// Grid point `i` of `points` on `(lo, 1]`.
fn grid(lo: f64, i: usize, points: usize) -> f64 {
    lo + (1.0 - lo) * i as f64 / points as f64
}

/// CSV for a curve request.
pub fn params_curve(a: &ParamsArgs, points: usize) -> Result<String, Failure> {
    if points == 0 {
        return Err(Failure::usage("--curve needs at least one point"));
    }
    let n2 = a.n2.unwrap_or(a.n1 / 2);
    let eps = need(a.log2_eps, "log2-eps", a.mode)?;
    let model: Model = a.model.into();
    match a.mode {
        Mode::MaxM => {
            let k1 = need(a.k1, "k1", a.mode)?;
            let mut raw = Vec::new();
            for i in 1..=points {
                let alpha2 = grid(0.0, i, points);
                let k2 = (alpha2 * n2 as f64).round() as usize;
                let m = optimize_max_m(&source(a, k1, k2)?, eps, model)?
                    .feasible()
                    .map_or(0, |o| o.claim.m);
                raw.push((alpha2, k2, m));
            }
            let pts: Vec<(f64, usize)> = raw.iter().map(|&(a2, _, m)| (a2, m)).collect();
            let corrected = monotone_correct(&pts)?;
            let mut csv = String::from("alpha2,k2,m,m_corrected\n");
            for ((a2, k2, m), (_, mc)) in raw.iter().zip(corrected) {
                csv.push_str(&format!("{a2:.6},{k2},{m},{mc}\n"));
            }
            Ok(csv)
        }
        Mode::MinK2 => {
            let mut csv = String::from("alpha1,k1,k2_min,alpha2_min\n");
            for i in 1..=points {
                let alpha1 = grid(0.5, i, points);
                let k1 = (alpha1 * a.n1 as f64).round() as usize;
                match optimize_min_k2(a.n1, k1, n2, eps, a.m, model)?.feasible() {
                    Some(o) => csv.push_str(&format!(
                        "{alpha1:.6},{k1},{},{:.6}\n",
                        o.claim.k2,
                        o.claim.k2 as f64 / n2 as f64
                    )),
                    None => csv.push_str(&format!("{alpha1:.6},{k1},,\n")),
                }
            }
            Ok(csv)
        }
        _ => Err(Failure::usage("--curve applies to max-m and min-k2 only")),
    }
}

pub fn run_params(a: &ParamsArgs) -> Result<i32, Failure> {
    let text = match a.curve {
        Some(points) => params_curve(a, points)?,
        None => {
            let mut s = serde_json::to_string_pretty(&params_document(a)?).expect("json");
            s.push('\n');
            s
        }
    };
    match &a.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(0)
}
