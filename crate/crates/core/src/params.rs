//! Error and entropy arithmetic for the extractor, plus a search over the free
//! parameters `(p, l)` that maximizes output length or minimizes the entropy
//! of the second source.
//!
//! Every error term is carried as a base-2 exponent: `log2_eps = -16.0` means
//! `eps = 2^-16`. Exponents of several thousand are routine here.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::generator::max_l;

/// `log2(2^a + 2^b)` without overflow or underflow.
pub fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / LN_2
}

fn log2_3() -> f64 {
    3f64.log2()
}

/// Lengths and min-entropies of the two sources, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourcePair {
    pub n1: usize,
    pub k1: usize,
    pub n2: usize,
    pub k2: usize,
}

impl SourcePair {
    pub fn new(n1: usize, k1: usize, n2: usize, k2: usize) -> Result<Self> {
        if n1 < 2 || n1 % 2 != 0 {
            return Err(invalid(format!("n1 must be even and positive, got {n1}")));
        }
        if n2 == 0 || n2 > n1 / 2 {
            return Err(invalid(format!(
                "n2 <= n1/2 violated: n2 = {n2}, n1/2 = {}",
                n1 / 2
            )));
        }
        if k1 > n1 {
            return Err(invalid(format!("k1 = {k1} exceeds n1 = {n1}")));
        }
        if k2 > n2 {
            return Err(invalid(format!("k2 = {k2} exceeds n2 = {n2}")));
        }
        Ok(SourcePair { n1, k1, n2, k2 })
    }

    fn with_entropies(self, k1: usize, k2: usize) -> Self {
        SourcePair { k1, k2, ..self }
    }
}

/// The even moment `p` and `l = log2(p')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeParams {
    pub p: u64,
    pub l: u32,
}

impl FreeParams {
    /// `p * m <= 2^l`.
    pub fn fits_output(&self, m: usize) -> bool {
        if self.l >= 127 {
            return true;
        }
        (self.p as u128)
            .checked_mul(m as u128)
            .is_some_and(|pm| pm <= 1u128 << self.l)
    }

    fn check(&self, src: &SourcePair) -> Result<()> {
        if self.p < 2 || self.p % 2 != 0 {
            return Err(invalid(format!("p must be even and at least 2, got {}", self.p)));
        }
        let cap = max_l(src.n1, src.n2);
        if self.l == 0 || self.l > cap {
            return Err(invalid(format!(
                "l must satisfy 1 <= l <= n2 + log2(n1/2) = {cap}, got {}",
                self.l
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Weak,
    Strong,
    QuantumMarkov,
    CqXor,
}

impl std::str::FromStr for Model {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Model::Weak),
            "strong" => Ok(Model::Strong),
            "quantum-markov" => Ok(Model::QuantumMarkov),
            "cq-xor" => Ok(Model::CqXor),
            other => Err(invalid(format!("unknown model {other:?}"))),
        }
    }
}

/// An `(n1, k1_adj, n2, k2_adj, m, eps)` extractor statement.
///
/// `k1`, `k2` are the entropies the error was computed from; `k1_adj`,
/// `k2_adj` are what the sources must actually have for the claim to hold
/// (equal to `k1`, `k2` for weak claims).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractorClaim {
    pub n1: usize,
    pub k1: usize,
    pub n2: usize,
    pub k2: usize,
    pub m: usize,
    pub log2_eps: f64,
    pub model: Model,
    pub k1_adj: f64,
    pub k2_adj: f64,
    pub p: Option<u64>,
    pub l: Option<u32>,
    /// Strong in either input.
    #[serde(skip)]
    pub strong: bool,
    #[serde(skip)]
    pub notes: Vec<String>,
}

impl ExtractorClaim {
    fn base(src: &SourcePair, m: usize, log2_eps: f64, model: Model) -> Self {
        ExtractorClaim {
            n1: src.n1,
            k1: src.k1,
            n2: src.n2,
            k2: src.k2,
            m,
            log2_eps,
            model,
            k1_adj: src.k1 as f64,
            k2_adj: src.k2 as f64,
            p: None,
            l: None,
            strong: false,
            notes: Vec::new(),
        }
    }

    fn at(mut self, fp: FreeParams) -> Self {
        self.p = Some(fp.p);
        self.l = Some(fp.l);
        self
    }

    /// Both adjusted entropies are available in `available`.
    pub fn entropy_met(&self, available: &SourcePair) -> bool {
        self.k1_adj <= available.k1 as f64 && self.k2_adj <= available.k2 as f64
    }
}

/// A search or analytic evaluation either succeeds or explains why not.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<T> {
    Feasible(T),
    Infeasible(String),
}

impl<T> Outcome<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Feasible(_))
    }

    pub fn feasible(self) -> Option<T> {
        match self {
            Outcome::Feasible(t) => Some(t),
            Outcome::Infeasible(_) => None,
        }
    }
}

pub(crate) const K2_NOTE: &str = "the printed k2_adj formula starts from k1; k2_adj_symmetric starts from k2";

// ---------------------------------------------------------------------------
// gamma

/// `log2 gamma` for real-valued entropies and a given `log2` of the bias term.
fn log2_gamma_raw(n1: usize, k1: f64, k2: f64, p: u64, log2_bias: f64) -> f64 {
    let p = p as f64;
    (n1 as f64 - k1) / p + log2_add(log2_bias / p, p.log2() - k2 / 2.0)
}

fn log2_two_zeta(n1: usize, l: u32) -> f64 {
    l as f64 + 1.0 - (n1 / 2) as f64
}

/// `log2 gamma` with `gamma = 2^{(n1-k1)/p} * ((2 zeta)^{1/p} + p 2^{-k2/2})`
/// and `zeta = 2^{l - n1/2}`.
pub fn gamma_bound(src: &SourcePair, fp: FreeParams) -> Result<f64> {
    fp.check(src)?;
    Ok(log2_gamma_raw(
        src.n1,
        src.k1 as f64,
        src.k2 as f64,
        fp.p,
        log2_two_zeta(src.n1, fp.l),
    ))
}

/// As [`gamma_bound`] with `zeta^{1/p}` in place of `(2 zeta)^{1/p}`, the
/// form used by the quantum statements.
pub fn gamma_bound_zeta(src: &SourcePair, fp: FreeParams) -> Result<f64> {
    fp.check(src)?;
    Ok(log2_gamma_raw(
        src.n1,
        src.k1 as f64,
        src.k2 as f64,
        fp.p,
        log2_two_zeta(src.n1, fp.l) - 1.0,
    ))
}

fn check_output(src: &SourcePair, m: usize) -> Result<()> {
    if m == 0 || m > src.n1 / 2 {
        return Err(invalid(format!(
            "m must satisfy 1 <= m <= n1/2 = {}, got {m}",
            src.n1 / 2
        )));
    }
    Ok(())
}

fn check_moment(fp: FreeParams, m: usize) -> Result<()> {
    if !fp.fits_output(m) {
        return Err(invalid(format!(
            "p <= 2^l / m violated: p = {}, l = {}, m = {m}",
            fp.p, fp.l
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Classical claims

/// Weak and strong claims for a known `log2 gamma`.
///
/// Weak: `eps = 2^{m/2} gamma`. Strong: `eps' = gamma 2^{m/2+1}` with
/// `k1' = k1 + m/2 + 2 + log2(1/gamma)`; `k2'` is the printed formula, which
/// also starts from `k1` (see the claim notes).
pub fn lemma5_from_gamma(
    src: &SourcePair,
    log2_gamma: f64,
    m: usize,
) -> Result<(ExtractorClaim, ExtractorClaim)> {
    check_output(src, m)?;
    let half_m = m as f64 / 2.0;
    let weak = ExtractorClaim::base(src, m, half_m + log2_gamma, Model::Weak);
    let shift = half_m + 2.0 - log2_gamma;
    let mut strong = ExtractorClaim::base(src, m, log2_gamma + half_m + 1.0, Model::Strong);
    strong.k1_adj = src.k1 as f64 + shift;
    strong.k2_adj = src.k1 as f64 + shift;
    strong.strong = true;
    strong.notes.push(format!(
        "{K2_NOTE}: k2_adj_symmetric = {}",
        src.k2 as f64 + shift
    ));
    Ok((weak, strong))
}

/// [`lemma5_from_gamma`] at the `gamma` given by [`gamma_bound`].
pub fn lemma5_claims(
    src: &SourcePair,
    fp: FreeParams,
    m: usize,
) -> Result<(ExtractorClaim, ExtractorClaim)> {
    check_output(src, m)?;
    check_moment(fp, m)?;
    let g = gamma_bound(src, fp)?;
    let (weak, strong) = lemma5_from_gamma(src, g, m)?;
    Ok((weak.at(fp), strong.at(fp)))
}

/// Markov-model conversion of a classical claim: both entropies grow by
/// `log2(1/eps)` and `eps' = sqrt(3 eps 2^{m-2})`. Strongness carries over.
pub fn markov_convert(claim: &ExtractorClaim) -> Result<ExtractorClaim> {
    if !matches!(claim.model, Model::Weak | Model::Strong) {
        return Err(invalid(format!(
            "markov conversion takes a classical claim, got {:?}",
            claim.model
        )));
    }
    let mut out = claim.clone();
    let gain = -claim.log2_eps;
    out.model = Model::QuantumMarkov;
    out.log2_eps = (log2_3() + claim.log2_eps + claim.m as f64 - 2.0) / 2.0;
    out.k1_adj += gain;
    out.k2_adj += gain;
    Ok(out)
}

/// Quantum claims from the `zeta^{1/p}` form of gamma:
/// the direct Markov bound `eps = 2^{3m/4} sqrt(3 gamma / 2)` and the
/// cq-XOR route `eps = 2^m sqrt(3 sqrt(2) gamma)`, both with
/// `k' = k + 1 + 2 log2(1/gamma)`.
pub fn quantum_claims(
    src: &SourcePair,
    fp: FreeParams,
    m: usize,
) -> Result<(ExtractorClaim, ExtractorClaim)> {
    check_output(src, m)?;
    check_moment(fp, m)?;
    let g = gamma_bound_zeta(src, fp)?;
    let (a, b) = quantum_from_gamma(src, g, m)?;
    Ok((a.at(fp), b.at(fp)))
}

/// [`quantum_claims`] for a known `log2 gamma`.
pub fn quantum_from_gamma(
    src: &SourcePair,
    log2_gamma: f64,
    m: usize,
) -> Result<(ExtractorClaim, ExtractorClaim)> {
    check_output(src, m)?;
    let m_f = m as f64;
    let shift = 1.0 - 2.0 * log2_gamma;
    let adjust = |mut c: ExtractorClaim| {
        c.k1_adj = src.k1 as f64 + shift;
        c.k2_adj = src.k2 as f64 + shift;
        c.strong = true;
        c
    };
    let markov = adjust(ExtractorClaim::base(
        src,
        m,
        0.75 * m_f + (log2_3() + log2_gamma - 1.0) / 2.0,
        Model::QuantumMarkov,
    ));
    let cq = adjust(ExtractorClaim::base(
        src,
        m,
        m_f + (log2_3() + 0.5 + log2_gamma) / 2.0,
        Model::CqXor,
    ));
    Ok((markov, cq))
}

// ---------------------------------------------------------------------------
// Closed forms

/// Output of [`theorem1_eval`].
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Eval {
    pub delta: f64,
    pub lambda: f64,
    /// `(delta k2 / 16 - 1) / lambda`, before flooring.
    pub m_bound: f64,
    pub weak: ExtractorClaim,
    pub strong: ExtractorClaim,
}

/// Output of [`corollary1_eval`].
#[derive(Debug, Clone, PartialEq)]
pub struct Corollary1Eval {
    pub delta: f64,
    pub lambda: f64,
    pub m_bound: f64,
    pub claim: ExtractorClaim,
}

/// Largest `delta < 1/2` with `k1 >= (1/2 + delta) n1 + 2 log2(n1) + 1`.
pub fn max_delta(n1: usize, k1: usize) -> f64 {
    let n = n1 as f64;
    let d = (k1 as f64 - 2.0 * n.log2() - 1.0) / n - 0.5;
    // the interval is open at 1/2
    d.min(0.5 - f64::EPSILON)
}

/// `k2 >= max(3.2 log2(8 n1 / k2), 40)`.
pub fn k2_floor_met(n1: usize, k2: usize) -> bool {
    if k2 == 0 {
        return false;
    }
    let k = k2 as f64;
    k >= 40.0 && k >= 3.2 * (8.0 * n1 as f64 / k).log2()
}

struct AnalyticShape {
    delta: f64,
    m_bound: f64,
    m: usize,
}

fn analytic_shape(src: &SourcePair, lambda: f64, lambda_floor: f64) -> Result<Outcome<AnalyticShape>> {
    if !lambda.is_finite() || lambda <= lambda_floor {
        return Err(invalid(format!("lambda must exceed {lambda_floor}, got {lambda}")));
    }
    let delta = max_delta(src.n1, src.k1);
    if delta <= 0.0 {
        return Ok(Outcome::Infeasible(format!(
            "k1 = {} leaves no delta > 0 (max delta = {delta:.6})",
            src.k1
        )));
    }
    if !k2_floor_met(src.n1, src.k2) {
        return Ok(Outcome::Infeasible(format!(
            "k2 = {} is below max(3.2 log2(8 n1 / k2), 40)",
            src.k2
        )));
    }
    let slack = delta * src.k2 as f64 / 16.0 - 1.0;
    if lambda >= slack {
        return Ok(Outcome::Infeasible(format!(
            "lambda = {lambda} is not below delta k2 / 16 - 1 = {slack:.6}"
        )));
    }
    let m_bound = slack / lambda;
    let m = m_bound.floor() as usize;
    if m == 0 {
        return Ok(Outcome::Infeasible("no positive output length".into()));
    }
    Ok(Outcome::Feasible(AnalyticShape { delta, m_bound, m }))
}

/// Closed-form parameters for `0.25 < lambda < delta k2 / 16 - 1`, using the
/// largest admissible `delta` and output length.
pub fn theorem1_eval(src: &SourcePair, lambda: f64) -> Result<Outcome<Theorem1Eval>> {
    let shape = match analytic_shape(src, lambda, 0.25)? {
        Outcome::Feasible(s) => s,
        Outcome::Infeasible(r) => return Ok(Outcome::Infeasible(r)),
    };
    let m = shape.m;
    let exponent = (1.0 - 4.0 * lambda) * m as f64 / 2.0;
    let weak = ExtractorClaim::base(src, m, exponent - 1.0, Model::Weak);
    let mut strong = ExtractorClaim::base(src, m, exponent, Model::Strong);
    let shift = 3.0 * (m as f64 + 1.0);
    strong.k1_adj += shift;
    strong.k2_adj += shift;
    strong.strong = true;
    Ok(Outcome::Feasible(Theorem1Eval {
        delta: shape.delta,
        lambda,
        m_bound: shape.m_bound,
        weak,
        strong,
    }))
}

/// The Markov-model analogue for `0.75 < lambda < delta k2 / 16 - 1`:
/// `eps <= sqrt(3) 2^{(3/4 - lambda) m - 1}`,
/// `k1' = k1 + (2 lambda + 5/2) m + 3`; `k2'` as printed (from `k1`).
pub fn corollary1_eval(src: &SourcePair, lambda: f64) -> Result<Outcome<Corollary1Eval>> {
    let shape = match analytic_shape(src, lambda, 0.75)? {
        Outcome::Feasible(s) => s,
        Outcome::Infeasible(r) => return Ok(Outcome::Infeasible(r)),
    };
    let m = shape.m;
    let m_f = m as f64;
    let log2_eps = log2_3() / 2.0 + (0.75 - lambda) * m_f - 1.0;
    let shift = (2.0 * lambda + 2.5) * m_f + 3.0;
    let mut claim = ExtractorClaim::base(src, m, log2_eps, Model::QuantumMarkov);
    claim.k1_adj = src.k1 as f64 + shift;
    claim.k2_adj = src.k1 as f64 + shift;
    claim.strong = true;
    claim
        .notes
        .push(format!("{K2_NOTE}: k2_adj_symmetric = {}", src.k2 as f64 + shift));
    Ok(Outcome::Feasible(Corollary1Eval {
        delta: shape.delta,
        lambda,
        m_bound: shape.m_bound,
        claim,
    }))
}

// ---------------------------------------------------------------------------
// Numerical optimization

/// Result of a successful search.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub params: FreeParams,
    pub claim: ExtractorClaim,
}

/// Every `p` worth trying is at most this.
///
/// Write `gamma = 2^{(a-b)/p} + p 2^{a/p - k2/2}` with `a = n1 - k1`. If
/// `a >= b` then `gamma >= 1` and nothing is feasible; otherwise the first
/// term grows with `p`, and the second grows once `p > a ln 2`. Since
/// `a <= n1`, no `p` past `n1 ln 2` beats the best `p` below it.
pub fn moment_cap(n1: usize) -> u64 {
    let c = (n1 as f64 * LN_2).ceil() as u64 + 2;
    c + c % 2
}

/// Upper end of the useful `l` range for output length `m`.
///
/// Once `2^l / m >= moment_cap`, raising `l` no longer widens the `p` range
/// and only increases `zeta`, so larger `l` is never better.
fn l_cap(src: &SourcePair, m: usize) -> u32 {
    let wide = (moment_cap(src.n1) as f64 * m as f64).log2().ceil() as u32;
    wide.min(max_l(src.n1, src.n2))
}

fn p_max(l: u32, m: usize, cap: u64) -> u64 {
    let by_l = if l >= 64 {
        u64::MAX
    } else {
        (1u64 << l) / m as u64
    };
    let p = by_l.min(cap);
    p - p % 2
}

/// Smallest integer `d` in `0..=max_d` with `d >= needed(d)`; `needed` must be
/// non-increasing so the predicate is monotone.
fn least_shift(max_d: usize, needed: impl Fn(usize) -> f64) -> Option<usize> {
    let ok = |d: usize| d as f64 >= needed(d);
    if !ok(max_d) {
        return None;
    }
    let (mut lo, mut hi) = (0usize, max_d);
    if ok(lo) {
        return Some(lo);
    }
    // invariant: !ok(lo), ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// The claim at `(p, l)` for `model`, if it meets `target` with the entropy
/// available in `src`.
///
/// For strong and quantum models the error is computed from entropies
/// `k_i - d`, with the least integer `d` that covers the entropy adjustment.
fn evaluate(
    src: &SourcePair,
    model: Model,
    m: usize,
    fp: FreeParams,
    target: f64,
) -> Option<ExtractorClaim> {
    let bias = log2_two_zeta(src.n1, fp.l);
    let gamma_at = |d: usize| {
        log2_gamma_raw(
            src.n1,
            (src.k1 - d) as f64,
            (src.k2 - d) as f64,
            fp.p,
            bias,
        )
    };
    let half_m = m as f64 / 2.0;
    match model {
        Model::Weak => {
            let g = gamma_at(0);
            (half_m + g <= target).then(|| {
                let (weak, _) = lemma5_from_gamma(src, g, m).expect("validated shape");
                weak.at(fp)
            })
        }
        Model::Strong | Model::QuantumMarkov => {
            let (eps, needed): (fn(f64, f64) -> f64, fn(f64, f64) -> f64) = match model {
                Model::Strong => (|g, h| g + h + 1.0, |g, h| h + 2.0 - g),
                _ => (
                    |g, h| 1.5 * h + (log2_3() + g - 1.0) / 2.0,
                    |g, _| 1.0 - 2.0 * g,
                ),
            };
            // shifting only raises gamma, so d = 0 is the best case
            if eps(gamma_at(0), half_m) > target {
                return None;
            }
            let d = least_shift(src.k1.min(src.k2), |d| needed(gamma_at(d), half_m))?;
            let g = gamma_at(d);
            if eps(g, half_m) > target {
                return None;
            }
            let base = src.with_entropies(src.k1 - d, src.k2 - d);
            let mut claim = ExtractorClaim::base(&base, m, eps(g, half_m), model);
            let shift = needed(g, half_m);
            claim.k1_adj = base.k1 as f64 + shift;
            claim.k2_adj = base.k2 as f64 + shift;
            claim.strong = true;
            claim.notes.push(match model {
                Model::Strong => {
                    "strong search reads k2_adj as k2 + m/2 + 2 + log2(1/gamma)".to_string()
                }
                _ => "quantum search uses eps = 2^{3m/4} sqrt(3 gamma / 2) with the (2 zeta)^{1/p} gamma"
                    .to_string(),
            });
            Some(claim.at(fp))
        }
        Model::CqXor => None,
    }
}

/// The even `p <= 2^l / m` minimizing `gamma` for a fixed `l`, with its
/// `log2 gamma`; `None` when no even `p` fits.
pub fn best_moment(src: &SourcePair, l: u32, m: usize) -> Option<(FreeParams, f64)> {
    let top = p_max(l, m, moment_cap(src.n1));
    let mut best: Option<(FreeParams, f64)> = None;
    let mut p = 2;
    while p <= top {
        let fp = FreeParams { p, l };
        let g = gamma_bound(src, fp).ok()?;
        if best.is_none_or(|(_, b)| g < b) {
            best = Some((fp, g));
        }
        p += 2;
    }
    best
}

fn search_at(src: &SourcePair, model: Model, m: usize, target: f64) -> Option<Optimum> {
    let cap = moment_cap(src.n1);
    for l in 1..=l_cap(src, m) {
        let top = p_max(l, m, cap);
        let mut p = 2;
        while p <= top {
            let fp = FreeParams { p, l };
            if let Some(claim) = evaluate(src, model, m, fp, target) {
                debug_assert!(fp.fits_output(m) && fp.check(src).is_ok());
                return Some(Optimum { params: fp, claim });
            }
            p += 2;
        }
    }
    None
}

fn check_search(model: Model, target: f64) -> Result<()> {
    if model == Model::CqXor {
        return Err(invalid("the search supports weak, strong and quantum-markov models"));
    }
    if !(target < 0.0) || !target.is_finite() {
        return Err(invalid(format!("log2 error target must be negative, got {target}")));
    }
    Ok(())
}

/// Feasibility of a given `m`, with the first `(l, p)` in ascending order.
pub fn feasible_at(
    src: &SourcePair,
    log2_eps_target: f64,
    model: Model,
    m: usize,
) -> Result<Outcome<Optimum>> {
    check_search(model, log2_eps_target)?;
    check_output(src, m)?;
    Ok(match search_at(src, model, m, log2_eps_target) {
        Some(o) => Outcome::Feasible(o),
        None => Outcome::Infeasible(format!("no (p, l) meets the target at m = {m}")),
    })
}

/// Largest `m` for which some `(p, l)` meets the error target. Ties between
/// parameter choices go to the smallest `l`, then the smallest `p`.
pub fn optimize_max_m(
    src: &SourcePair,
    log2_eps_target: f64,
    model: Model,
) -> Result<Outcome<Optimum>> {
    check_search(model, log2_eps_target)?;
    let at = |m| search_at(src, model, m, log2_eps_target);
    let Some(mut best) = at(1) else {
        return Ok(Outcome::Infeasible(
            "no (p, l) meets the target even at m = 1".into(),
        ));
    };
    // feasibility is monotone in m: a witness for m also works for m - 1
    let (mut lo, mut hi) = (1usize, src.n1 / 2 + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match at(mid) {
            Some(o) => {
                lo = mid;
                best = o;
            }
            None => hi = mid,
        }
    }
    Ok(Outcome::Feasible(best))
}

/// Smallest `k2` for which `m` output bits meet the error target.
pub fn optimize_min_k2(
    n1: usize,
    k1: usize,
    n2: usize,
    log2_eps_target: f64,
    m: usize,
    model: Model,
) -> Result<Outcome<Optimum>> {
    check_search(model, log2_eps_target)?;
    let src = SourcePair::new(n1, k1, n2, n2)?;
    check_output(&src, m)?;
    let at = |k2| search_at(&src.with_entropies(k1, k2), model, m, log2_eps_target);
    let Some(mut best) = at(n2) else {
        return Ok(Outcome::Infeasible(format!(
            "not feasible even at k2 = n2 = {n2}"
        )));
    };
    // gamma falls as k2 grows, so feasibility is monotone in k2
    let (mut lo, mut hi) = (0usize, n2);
    if let Some(o) = at(0) {
        return Ok(Outcome::Feasible(o));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match at(mid) {
            Some(o) => {
                hi = mid;
                best = o;
            }
            None => lo = mid,
        }
    }
    Ok(Outcome::Feasible(best))
}

/// Replaces each `m` by the largest `m` seen at any smaller or equal `alpha2`.
pub fn monotone_correct(curve: &[(f64, usize)]) -> Result<Vec<(f64, usize)>> {
    if curve.windows(2).any(|w| !(w[0].0 < w[1].0)) {
        return Err(invalid("curve must be strictly ascending in alpha2"));
    }
    let mut best = 0;
    Ok(curve
        .iter()
        .map(|&(a, m)| {
            best = best.max(m);
            (a, best)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn src(n1: usize, k1: usize, n2: usize, k2: usize) -> SourcePair {
        SourcePair::new(n1, k1, n2, k2).unwrap()
    }

    #[test]
    fn log_add_is_stable() {
        assert!(close(log2_add(0.0, 0.0), 1.0, 1e-15));
        assert_eq!(log2_add(-5000.0, -4000.0), -4000.0);
        assert!(close(log2_add(3.0, f64::NEG_INFINITY), 3.0, 0.0));
        assert!(close(log2_add(-1.0, -2.0), (0.75f64).log2(), 1e-14));
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_bound(&src(100, 80, 50, 20), FreeParams { p: 2, l: 4 }).unwrap();
        let expect = 10.0 + ((-22.5f64).exp2() + (-9f64).exp2()).log2();
        assert!(close(g, expect, 1e-12), "{g}");
        assert!((g - 1.0001).abs() < 1e-4);

        let g = gamma_bound(&src(10_000, 8000, 5000, 2000), FreeParams { p: 8, l: 14 }).unwrap();
        assert!(close(g, -373.125, 1e-9), "{g}");

        let g = gamma_bound(&src(100, 100, 50, 20), FreeParams { p: 4, l: 6 }).unwrap();
        let expect = ((-43f64 / 4.0).exp2() + 4.0 * (-10f64).exp2()).log2();
        assert!(close(g, expect, 1e-12));
    }

    #[test]
    fn gamma_rejects_bad_params() {
        let s = src(100, 80, 50, 20);
        assert!(gamma_bound(&s, FreeParams { p: 3, l: 4 }).is_err());
        assert!(gamma_bound(&s, FreeParams { p: 2, l: 0 }).is_err());
        assert!(gamma_bound(&s, FreeParams { p: 2, l: 56 }).is_err());
        assert!(gamma_bound(&s, FreeParams { p: 2, l: 55 }).is_ok());
    }

    #[test]
    fn moment_bound_claims() {
        let s = src(100, 80, 50, 20);
        let (weak, strong) = lemma5_from_gamma(&s, -20.0, 10).unwrap();
        assert_eq!(weak.log2_eps, -15.0);
        assert_eq!(strong.log2_eps, -14.0);
        assert_eq!(strong.k1_adj, 80.0 + 27.0);
        assert_eq!(strong.k2_adj, 80.0 + 27.0);
        assert!(lemma5_from_gamma(&s, -20.0, 0).is_err());
        let (weak, _) = lemma5_from_gamma(&s, -373.1, 50).unwrap();
        assert!(close(weak.log2_eps, -348.1, 1e-12));
        assert!(lemma5_claims(&s, FreeParams { p: 4, l: 3 }, 4).is_err());
        assert!(lemma5_claims(&s, FreeParams { p: 4, l: 4 }, 4).is_ok());
    }

    #[test]
    fn markov_examples() {
        let s = src(100, 80, 50, 20);
        let mut c = ExtractorClaim::base(&s, 8, -40.0, Model::Weak);
        let q = markov_convert(&c).unwrap();
        let expect = (3f64.sqrt() * (-17f64).exp2()).log2();
        assert!(close(q.log2_eps, expect, 1e-12));
        assert!(close(q.log2_eps.exp2(), 1.3207e-5, 1e-4));
        assert_eq!(q.k1_adj, 120.0);
        assert_eq!(q.k2_adj, 60.0);
        c.m = 2;
        let q = markov_convert(&c).unwrap();
        assert!(close(q.log2_eps, (3.0 * (-40f64).exp2()).sqrt().log2(), 1e-12));
        assert!(markov_convert(&q).is_err());
    }

    #[test]
    fn quantum_examples() {
        let s = src(100, 80, 50, 20);
        let (cor, cq) = quantum_from_gamma(&s, -20.0, 4).unwrap();
        assert!(close(cor.log2_eps.exp2(), 9.57e-3, 1e-3));
        assert_eq!(cor.k1_adj, 121.0);
        assert_eq!(cor.k2_adj, 61.0);
        let cq_expect = 16.0 * (3.0 * 2f64.sqrt() * (-20f64).exp2()).sqrt();
        assert!(close(cq.log2_eps, cq_expect.log2(), 1e-12));
        assert!(cor.log2_eps < cq.log2_eps);
        assert!(quantum_from_gamma(&s, -20.0, 0).is_err());
    }

    #[test]
    fn closed_form_at_lambda_one() {
        let t = theorem1_eval(&src(10_000, 8000, 5000, 1000), 1.0)
            .unwrap()
            .feasible()
            .unwrap();
        assert!((t.delta - 0.29724).abs() < 1e-5, "{}", t.delta);
        assert_eq!(t.weak.m, 17);
        assert_eq!(t.weak.log2_eps, -26.5);
        assert_eq!(t.strong.log2_eps, -25.5);
        assert_eq!(t.strong.k1_adj, 8054.0);
        assert_eq!(t.strong.k2_adj, 1054.0);
    }

    #[test]
    fn closed_form_lambda_range() {
        let s = src(10_000, 8000, 5000, 39);
        assert!(!theorem1_eval(&s, 1.0).unwrap().is_feasible());
        assert!(theorem1_eval(&src(10_000, 8000, 5000, 1000), 0.25).is_err());
        // lambda at or beyond delta k2 / 16 - 1
        assert!(!theorem1_eval(&src(10_000, 8000, 5000, 1000), 17.6).unwrap().is_feasible());
        // k1 too small for any delta > 0
        assert!(!theorem1_eval(&src(10_000, 5000, 5000, 1000), 1.0).unwrap().is_feasible());
    }

    #[test]
    fn markov_closed_form() {
        let c = corollary1_eval(&src(10_000, 8000, 5000, 1280), 1.0)
            .unwrap()
            .feasible()
            .unwrap();
        assert_eq!(c.claim.m, 22);
        assert!(close(c.claim.log2_eps.exp2(), 0.0191, 2e-3));
        assert_eq!(c.claim.k1_adj, 8102.0);
        assert!(corollary1_eval(&src(10_000, 8000, 5000, 1280), 0.75).is_err());
        assert!(!corollary1_eval(&src(10_000, 8000, 5000, 39), 1.0).unwrap().is_feasible());
    }

    #[test]
    fn monotone_correction() {
        let c = monotone_correct(&[(0.2, 4), (0.3, 3), (0.4, 5)]).unwrap();
        assert_eq!(c, vec![(0.2, 4), (0.3, 4), (0.4, 5)]);
        assert_eq!(monotone_correct(&[(0.5, 2)]).unwrap(), vec![(0.5, 2)]);
        assert!(monotone_correct(&[(0.5, 2), (0.5, 3)]).is_err());
    }

    #[test]
    fn least_shift_finds_fixed_point() {
        assert_eq!(least_shift(100, |d| 50.0 - d as f64 / 2.0), Some(34));
        assert_eq!(least_shift(100, |_| 0.0), Some(0));
        assert_eq!(least_shift(10, |_| 11.0), None);
    }

    #[test]
    fn zero_second_entropy_is_infeasible() {
        let s = src(10_000, 8000, 5000, 0);
        assert!(!optimize_max_m(&s, -16.0, Model::Weak).unwrap().is_feasible());
    }
}
