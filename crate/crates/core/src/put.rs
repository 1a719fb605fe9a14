//! Closed-form privacy-utility trade-offs.
//!
//! Quantum side: utilities of the depolarised-SIC mechanism. Classical side:
//! the symmetric-testing upper bound and the exact asymmetric-testing optimum,
//! both maximised over the block size `k ∈ 0..=v` by enumeration. Values are
//! in nats throughout.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergences::TestingMechanism;
use crate::error::{Error, Result};
use crate::mechanisms::{ceil_sqrt, mu_feasible_interval, proposed_mechanism, MAX_PROPOSED_V};

/// Whether a value came from a closed-form expression or from evaluating
/// divergences on the constructed mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Closed,
    Numeric,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Closed => "closed",
            Provenance::Numeric => "numeric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Valued {
    pub value: f64,
    pub provenance: Provenance,
}

/// A maximum over the block size together with its (smallest) maximiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub value: f64,
    pub k_opt: usize,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive and finite, got {eps}")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("eta must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

fn check_v(v: usize) -> Result<()> {
    if v < 2 {
        return Err(Error::Domain(format!("v must be at least 2, got {v}")));
    }
    Ok(())
}

/// `(1+δ) log(1+δ)`, accurate when `δ` is small.
fn xlogx_shifted(delta: f64) -> f64 {
    (1.0 + delta) * delta.ln_1p()
}

/// `((d−2)μ + 2√(μ(d − (d−1)μ)))/d − 1` written in `ν = 1 − μ`.
///
/// With `a = (d−2)ν − (d−1)ν²` and `r = √(1+a)` this equals
/// `(−(d−2)ν a/(r+1) − 2(d−1)ν²) / (d (r+1))`, which has no cancellation
/// as `ν → 0`.
fn mixing_term_minus_one(d: usize, nu: f64) -> f64 {
    let df = d as f64;
    let a = (df - 2.0) * nu - (df - 1.0) * nu * nu;
    let r1 = (1.0 + a).max(0.0).sqrt() + 1.0;
    (-(df - 2.0) * nu * a / r1 - 2.0 * (df - 1.0) * nu * nu) / (df * r1)
}

fn check_g_domain(c: f64, d: usize, mu: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Domain(format!("overlap c must lie in [0, 1], got {c}")));
    }
    if d < 2 {
        return Err(Error::Domain(format!("d must be at least 2, got {d}")));
    }
    let upper = d as f64 / (d as f64 - 1.0);
    if !(-1e-12..=upper + 1e-12).contains(&mu) {
        return Err(Error::Domain(format!("mu must lie in [0, {upper}], got {mu}")));
    }
    Ok(())
}

/// Minimum over `s` of `Tr(Q_h^s Q_{h'}^{1−s})` for two depolarised pure
/// states with squared overlap `c`:
/// `c + (1−c)/d ((d−2)μ + 2√(μ(d−(d−1)μ)))`.
pub fn g_functional(c: f64, d: usize, mu: f64) -> Result<f64> {
    check_g_domain(c, d, mu)?;
    Ok(1.0 + (1.0 - c) * mixing_term_minus_one(d, 1.0 - mu))
}

/// `−log G(c, d, μ)` evaluated without cancellation near `G = 1`.
pub fn neg_log_g(c: f64, d: usize, mu: f64) -> Result<f64> {
    check_g_domain(c, d, mu)?;
    Ok(neg_log_g_nu(c, d, 1.0 - mu))
}

fn neg_log_g_nu(c: f64, d: usize, nu: f64) -> f64 {
    -((1.0 - c) * mixing_term_minus_one(d, nu)).ln_1p()
}

/// Effective depolarising parameter of the ensemble states: `1 − η + μη`.
pub fn mu_eta(mu: f64, eta: f64) -> f64 {
    1.0 - eta + mu * eta
}

/// Lower endpoint of the feasible depolarising range for SIC states in dimension `d`.
pub fn mu_star(d: usize, eps: f64) -> Result<f64> {
    Ok(mu_feasible_interval(1.0 / (d as f64 + 1.0), d, eps)?.mu_min)
}

/// `1 − μ*`, computed directly so that it keeps full relative precision at small `ε`.
fn nu_star(d: usize, eps: f64) -> Result<f64> {
    let g = mu_feasible_interval(1.0 / (d as f64 + 1.0), d, eps)?.g_minus;
    Ok(1.0 / (d as f64 * -g + 1.0))
}

fn check_quantum_v(v: usize) -> Result<()> {
    if !(2..=MAX_PROPOSED_V).contains(&v) {
        return Err(Error::Capability(format!("quantum utilities need 2 <= v <= {MAX_PROPOSED_V}, got {v}")));
    }
    Ok(())
}

/// Symmetric-testing utility of the proposed mechanism.
///
/// Closed form when `η = 1` or `v` is a perfect square; otherwise the
/// Chernoff information is evaluated on the constructed mechanism.
pub fn s_quantum_closed(v: usize, eps: f64, eta: f64) -> Result<Valued> {
    check_quantum_v(v)?;
    check_eps(eps)?;
    check_eta(eta)?;
    let d = ceil_sqrt(v);
    if eta == 1.0 || d * d == v {
        // 1 − μ_η = η(1 − μ*)
        let nu = eta * nu_star(d, eps)?;
        let value = neg_log_g_nu(1.0 / (d as f64 + 1.0), d, nu);
        return Ok(Valued { value, provenance: Provenance::Closed });
    }
    let value = proposed_mechanism(v, eps)?.utility_s(eta)?.value.as_f64();
    Ok(Valued { value, provenance: Provenance::Numeric })
}

/// Asymmetric-testing utility of the proposed mechanism for `v = d²`:
/// `log d + L(1 − μ_η + μ_η/d) + (d−1) L(μ_η/d)`.
pub fn a_quantum_closed(d: usize, eps: f64, eta: f64) -> Result<f64> {
    if !(2..=3).contains(&d) {
        return Err(Error::Capability(format!("closed form needs v = d^2 with d in {{2, 3}}, got d = {d}")));
    }
    check_eps(eps)?;
    check_eta(eta)?;
    let df = d as f64;
    let nu = eta * nu_star(d, eps)?;
    // eigenvalues (1 + δ)/d with δ = (d−1)ν once and δ = −ν with multiplicity d−1;
    // log d + Σ λ log λ = (1/d) Σ (1+δ) log(1+δ) since Σ λ = 1
    Ok(((xlogx_shifted((df - 1.0) * nu) + (df - 1.0) * xlogx_shifted(-nu)) / df).max(0.0))
}

/// Asymmetric-testing utility for any supported `v`; non-square `v` needs
/// `numeric_fallback`, otherwise `None`.
pub fn a_quantum(v: usize, eps: f64, eta: f64, numeric_fallback: bool) -> Result<Option<Valued>> {
    check_quantum_v(v)?;
    let d = ceil_sqrt(v);
    if d * d == v {
        let value = a_quantum_closed(d, eps, eta)?;
        return Ok(Some(Valued { value, provenance: Provenance::Closed }));
    }
    if !numeric_fallback {
        return Ok(None);
    }
    check_eps(eps)?;
    check_eta(eta)?;
    let value = proposed_mechanism(v, eps)?.utility_a(eta)?.value.as_f64();
    Ok(Some(Valued { value, provenance: Provenance::Numeric }))
}

/// `f(v, k, ε) = (k e^ε + v − k)/v`.
pub fn block_mean(v: usize, k: usize, eps: f64) -> f64 {
    1.0 + block_mean_minus_one(v, k, eps)
}

fn block_mean_minus_one(v: usize, k: usize, eps: f64) -> f64 {
    k as f64 * eps.exp_m1() / v as f64
}

/// `F(v, k, ε) = k L(Δ₁) + (v−k) L(Δ₂) − v L(f)` with
/// `Δ₁ = η e^ε + (1−η) f` and `Δ₂ = η + (1−η) f`.
pub fn block_divergence(v: usize, k: usize, eps: f64, eta: f64) -> f64 {
    let fm1 = block_mean_minus_one(v, k, eps);
    let d1 = eta * eps.exp_m1() + (1.0 - eta) * fm1;
    let d2 = (1.0 - eta) * fm1;
    k as f64 * xlogx_shifted(d1) + (v - k) as f64 * xlogx_shifted(d2) - v as f64 * xlogx_shifted(fm1)
}

fn check_k(v: usize, k: usize) -> Result<()> {
    if k > v {
        return Err(Error::Domain(format!("k = {k} exceeds v = {v}")));
    }
    Ok(())
}

/// Checked form of [`block_mean`].
pub fn f_aux(v: usize, k: usize, eps: f64) -> Result<f64> {
    check_k(v, k)?;
    Ok(block_mean(v, k, eps))
}

/// Checked form of [`block_divergence`].
pub fn big_f_aux(v: usize, k: usize, eps: f64, eta: f64) -> Result<f64> {
    check_k(v, k)?;
    Ok(block_divergence(v, k, eps, eta))
}

/// Upper bound on the classical symmetric-testing trade-off (exact at `η = 1`):
/// `−log(1 − (v+η²−1)(e^{ε/2}−1)² / (v²(v−1)) · max_k k(v−k)/f(v,k,ε))`.
pub fn s_classical_upper(v: usize, eps: f64, eta: f64) -> Result<Optimum> {
    check_v(v)?;
    check_eps(eps)?;
    check_eta(eta)?;
    let (mut best, mut k_opt) = (f64::NEG_INFINITY, 0);
    for k in 0..=v {
        let val = (k * (v - k)) as f64 / block_mean(v, k, eps);
        if val > best {
            best = val;
            k_opt = k;
        }
    }
    let vf = v as f64;
    let pref = (vf + eta * eta - 1.0) * (eps / 2.0).exp_m1().powi(2) / (vf * vf * (vf - 1.0));
    Ok(Optimum { value: -(-pref * best).ln_1p(), k_opt })
}

/// Exact classical asymmetric-testing trade-off: `max_k F(v,k,ε) / (v f(v,k,ε))`.
pub fn a_classical(v: usize, eps: f64, eta: f64) -> Result<Optimum> {
    check_v(v)?;
    check_eps(eps)?;
    check_eta(eta)?;
    let (mut best, mut k_opt) = (f64::NEG_INFINITY, 0);
    for k in 0..=v {
        let val = block_divergence(v, k, eps, eta) / (v as f64 * block_mean(v, k, eps));
        if val > best {
            best = val;
            k_opt = k;
        }
    }
    Ok(Optimum { value: best.max(0.0), k_opt })
}

/// Small-ε coefficient of the proposed mechanism's symmetric utility at `η = 1`: `1/(4⌈√v⌉)`.
pub fn s_quantum_taylor(v: usize) -> f64 {
    1.0 / (4.0 * ceil_sqrt(v) as f64)
}

/// Small-ε coefficient of the classical symmetric trade-off at `η = 1`.
pub fn s_classical_taylor(v: usize) -> f64 {
    let vf = v as f64;
    if v % 2 == 0 {
        vf / (16.0 * (vf - 1.0))
    } else {
        (vf + 1.0) / (16.0 * vf)
    }
}

/// Small-ε coefficient of the proposed mechanism's asymmetric utility at `η = 1`, `v = d²`.
pub fn a_quantum_taylor(d: usize) -> f64 {
    let df = d as f64;
    (df * df - 1.0) / (2.0 * df.powi(3))
}

/// Small-ε coefficient of the classical asymmetric trade-off at `η = 1`.
pub fn a_classical_taylor(v: usize) -> f64 {
    let vf = v as f64;
    if v % 2 == 0 {
        0.125
    } else {
        (vf * vf - 1.0) / (8.0 * vf * vf)
    }
}

/// Analytic lower bounds on the quantum/classical utility ratios as `ε → 0` at `η = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioLimits {
    pub s: f64,
    /// Only defined when `v` is a perfect square.
    pub a: Option<f64>,
}

pub fn corollary_ratio_limits(v: usize) -> Result<RatioLimits> {
    check_v(v)?;
    let vf = v as f64;
    let d = ceil_sqrt(v);
    let df = d as f64;
    let s = if v % 2 == 0 { 4.0 * (vf - 1.0) / (vf * df) } else { 4.0 * vf / ((vf + 1.0) * df) };
    let a = (d * d == v).then(|| {
        if v % 2 == 0 {
            4.0 * (df * df - 1.0) / df.powi(3)
        } else {
            4.0 * df / (df * df + 1.0)
        }
    });
    Ok(RatioLimits { s, a })
}

/// One point of a trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PutCurvePoint {
    pub v: usize,
    pub eta: f64,
    pub eps: f64,
    pub s_quantum: f64,
    pub s_provenance: Provenance,
    pub s_classical_upper: f64,
    pub ratio_s: Option<f64>,
    pub a_quantum: Option<f64>,
    pub a_provenance: Option<Provenance>,
    pub a_classical: f64,
    pub ratio_a: Option<f64>,
    pub k_opt_s: usize,
    pub k_opt_a: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Evaluate the asymmetric quantum utility numerically when no closed form exists.
    pub numeric_fallback: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { numeric_fallback: true }
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

pub fn curve_point(v: usize, eta: f64, eps: f64, opts: SweepOptions) -> Result<PutCurvePoint> {
    let sq = s_quantum_closed(v, eps, eta)?;
    let sc = s_classical_upper(v, eps, eta)?;
    let aq = a_quantum(v, eps, eta, opts.numeric_fallback)?;
    let ac = a_classical(v, eps, eta)?;
    Ok(PutCurvePoint {
        v,
        eta,
        eps,
        s_quantum: sq.value,
        s_provenance: sq.provenance,
        s_classical_upper: sc.value,
        ratio_s: ratio(sq.value, sc.value),
        a_quantum: aq.map(|a| a.value),
        a_provenance: aq.map(|a| a.provenance),
        a_classical: ac.value,
        ratio_a: aq.and_then(|a| ratio(a.value, ac.value)),
        k_opt_s: sc.k_opt,
        k_opt_a: ac.k_opt,
    })
}

/// Evaluates [`curve_point`] on each grid value; output order follows the grid.
pub fn curve_sweep(v: usize, eta: f64, eps_grid: &[f64], opts: SweepOptions) -> Result<Vec<PutCurvePoint>> {
    if eps_grid.is_empty() {
        return Err(Error::Validation("eps grid is empty".into()));
    }
    if eps_grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Domain("eps grid values must be positive and finite".into()));
    }
    if eps_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation("eps grid must be strictly increasing".into()));
    }
    check_quantum_v(v)?;
    check_eta(eta)?;
    eps_grid.par_iter().map(|&eps| curve_point(v, eta, eps, opts)).collect()
}

/// `steps` values from `min` to `max` inclusive, evenly spaced or log-spaced.
pub fn eps_grid(min: f64, max: f64, steps: usize, log: bool) -> Result<Vec<f64>> {
    if !(min > 0.0 && min.is_finite() && max.is_finite() && max >= min) {
        return Err(Error::Domain(format!("need 0 < eps-min <= eps-max, got [{min}, {max}]")));
    }
    if steps == 0 {
        return Err(Error::Domain("need at least one grid step".into()));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    if max == min {
        return Err(Error::Domain("eps-min equals eps-max but more than one step requested".into()));
    }
    let n = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let t = i as f64 / n;
            if i == steps - 1 {
                max
            } else if log {
                (min.ln() + t * (max.ln() - min.ln())).exp()
            } else {
                min + t * (max - min)
            }
        })
        .collect())
}
