//! Chernoff information and relative entropy, classical and quantum, and the
//! two testing utilities built from them.
//!
//! All quantities are in nats. Disjoint supports give [`Exponent::Infinite`]
//! rather than an overflowed float.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::hermitian::EigenSystem;
use crate::mechanisms::{CQMechanism, StochasticMatrix};
use crate::search::minimize_unit_interval;
use crate::states::{check_probability_vector, ensemble_state, DensityOperator, Hypothesis};
use crate::tolerance::Tolerances;

/// A non-negative error exponent, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    /// Clamps tiny negative rounding residue to zero.
    fn finite(x: f64) -> Self {
        Exponent::Finite(x.max(0.0))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Exponent::Finite(_))
    }

    /// The value as a float, with `Infinite` mapped to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match *self {
            Exponent::Finite(x) => x,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// Panics on the infinite sentinel.
    pub fn unwrap_finite(&self) -> f64 {
        match *self {
            Exponent::Finite(x) => x,
            Exponent::Infinite => panic!("exponent is infinite"),
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => a.partial_cmp(b),
            (Exponent::Finite(_), Exponent::Infinite) => Some(Ordering::Less),
            (Exponent::Infinite, Exponent::Finite(_)) => Some(Ordering::Greater),
            (Exponent::Infinite, Exponent::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(x) => write!(f, "{x}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chernoff {
    pub value: Exponent,
    /// Minimiser of the overlap functional over `s ∈ [0, 1]`.
    pub s_opt: f64,
}

/// Which hypotheses attain a utility's minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Minimizer {
    Pair(usize, usize),
    Hypothesis(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityReport {
    pub value: Exponent,
    pub minimizer: Minimizer,
    /// Only set for the symmetric (Chernoff) utility.
    pub s_opt: Option<f64>,
}

fn exponent_from_overlap(phi_min: f64) -> Exponent {
    if phi_min <= Tolerances::current().disjoint {
        Exponent::Infinite
    } else {
        Exponent::finite(-phi_min.ln())
    }
}

/// `Tr(ρ^s σ^{1−s})` from precomputed spectra.
fn trace_overlap(rho: &EigenSystem, sigma: &EigenSystem, s: f64) -> Result<f64> {
    rho.power(s)?.trace_product(&sigma.power(1.0 - s)?)
}

fn chernoff_from_spectra(rho: &EigenSystem, sigma: &EigenSystem) -> Result<Chernoff> {
    rho.check_psd()?;
    sigma.check_psd()?;
    let tol = Tolerances::current().search;
    let m = minimize_unit_interval(|s| trace_overlap(rho, sigma, s).unwrap_or(f64::NAN), tol);
    if m.value.is_nan() {
        return Err(Error::Numerical("overlap functional evaluated to NaN".into()));
    }
    Ok(Chernoff { value: exponent_from_overlap(m.value), s_opt: m.arg })
}

/// `−log min_{s∈[0,1]} Tr(ρ^s σ^{1−s})`.
pub fn quantum_chernoff(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Chernoff> {
    check_same_dim(rho, sigma)?;
    chernoff_from_spectra(&rho.matrix().eig(), &sigma.matrix().eig())
}

/// `−log min_{s∈[0,1]} Σ_y p_y^s r_y^{1−s}`, summing only over the common support.
pub fn classical_chernoff(p: &[f64], r: &[f64]) -> Result<Chernoff> {
    check_pair(p, r)?;
    let common: Vec<(f64, f64)> = p.iter().zip(r).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (*a, *b)).collect();
    if common.is_empty() {
        return Ok(Chernoff { value: Exponent::Infinite, s_opt: 0.5 });
    }
    let f = |s: f64| common.iter().map(|&(a, b)| a.powf(s) * b.powf(1.0 - s)).sum::<f64>();
    let m = minimize_unit_interval(f, Tolerances::current().search);
    Ok(Chernoff { value: exponent_from_overlap(m.value), s_opt: m.arg })
}

/// `Tr ρ (log ρ − log σ)`; infinite when `ρ` has weight outside the support of `σ`.
pub fn quantum_relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Exponent> {
    check_same_dim(rho, sigma)?;
    let er = rho.matrix().eig();
    let es = sigma.matrix().eig();
    er.check_psd()?;
    es.check_psd()?;
    let leak_tol = Tolerances::current().eig_clamp;
    let sigma_vals = es.clamped_eigenvalues();
    let vecs = es.eigenvectors();
    let rho_m = rho.matrix().as_matrix();
    let mut cross = 0.0;
    for (j, &lam) in sigma_vals.iter().enumerate() {
        let vj = vecs.column(j);
        // ⟨v_j|ρ|v_j⟩
        let weight = (vj.adjoint() * rho_m * vj)[(0, 0)].re;
        if lam == 0.0 {
            if weight > leak_tol {
                return Ok(Exponent::Infinite);
            }
            continue;
        }
        cross += weight * lam.ln();
    }
    let neg_entropy: f64 = er.clamped_eigenvalues().iter().map(|&l| xlogx(l)).sum();
    Ok(Exponent::finite(neg_entropy - cross))
}

/// `Σ_y p_y log(p_y / r_y)` with `0 log 0 = 0`.
pub fn classical_relative_entropy(p: &[f64], r: &[f64]) -> Result<Exponent> {
    check_pair(p, r)?;
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(r) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Ok(Exponent::Infinite);
        }
        acc += a * (a / b).ln();
    }
    Ok(Exponent::finite(acc))
}

/// `x log x` with the continuous extension `0 log 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn check_same_dim(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Validation(format!("dimension mismatch: {} vs {}", rho.dim(), sigma.dim())));
    }
    Ok(())
}

fn check_pair(p: &[f64], r: &[f64]) -> Result<()> {
    if p.len() != r.len() {
        return Err(Error::Validation(format!("length mismatch: {} vs {}", p.len(), r.len())));
    }
    check_probability_vector(p)?;
    check_probability_vector(r)
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("eta must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

/// A privacy mechanism whose testing utilities can be evaluated.
pub trait TestingMechanism {
    /// Input alphabet size `v`.
    fn alphabet(&self) -> usize;

    /// Minimum pairwise Chernoff information between the images of the
    /// smoothed point masses `P^{h,η}`.
    fn utility_s(&self, eta: f64) -> Result<UtilityReport>;

    /// Minimum over `h` of the relative entropy from the image of `P^{h,η}`
    /// to the image of the uniform distribution.
    fn utility_a(&self, eta: f64) -> Result<UtilityReport>;
}

pub fn utility_s<M: TestingMechanism + ?Sized>(mech: &M, eta: f64) -> Result<UtilityReport> {
    mech.utility_s(eta)
}

pub fn utility_a<M: TestingMechanism + ?Sized>(mech: &M, eta: f64) -> Result<UtilityReport> {
    mech.utility_a(eta)
}

fn min_report(acc: Option<UtilityReport>, next: UtilityReport) -> Option<UtilityReport> {
    match acc {
        Some(a) if a.value <= next.value => Some(a),
        _ => Some(next),
    }
}

impl TestingMechanism for CQMechanism {
    fn alphabet(&self) -> usize {
        self.v()
    }

    fn utility_s(&self, eta: f64) -> Result<UtilityReport> {
        check_eta(eta)?;
        let v = self.v();
        let spectra = (0..v)
            .map(|h| Ok(ensemble_state(self, &Hypothesis::smoothed(v, h, eta)?)?.matrix().eig()))
            .collect::<Result<Vec<_>>>()?;
        let mut best = None;
        for h in 0..v {
            for hp in h + 1..v {
                let c = chernoff_from_spectra(&spectra[h], &spectra[hp])?;
                best = min_report(
                    best,
                    UtilityReport { value: c.value, minimizer: Minimizer::Pair(h, hp), s_opt: Some(c.s_opt) },
                );
            }
        }
        Ok(best.expect("v >= 2"))
    }

    fn utility_a(&self, eta: f64) -> Result<UtilityReport> {
        check_eta(eta)?;
        let v = self.v();
        let null = ensemble_state(self, &Hypothesis::uniform(v)?)?;
        let mut best = None;
        for h in 0..v {
            let rho = ensemble_state(self, &Hypothesis::smoothed(v, h, eta)?)?;
            let d = quantum_relative_entropy(&rho, &null)?;
            best = min_report(best, UtilityReport { value: d, minimizer: Minimizer::Hypothesis(h), s_opt: None });
        }
        Ok(best.expect("v >= 2"))
    }
}

impl TestingMechanism for StochasticMatrix {
    fn alphabet(&self) -> usize {
        self.rows()
    }

    fn utility_s(&self, eta: f64) -> Result<UtilityReport> {
        check_eta(eta)?;
        let v = self.rows();
        if v < 2 {
            return Err(Error::Validation("testing needs at least two inputs".into()));
        }
        let images = (0..v)
            .map(|h| self.pushforward(&Hypothesis::smoothed(v, h, eta)?.probabilities()))
            .collect::<Result<Vec<_>>>()?;
        let mut best = None;
        for h in 0..v {
            for hp in h + 1..v {
                let c = classical_chernoff(&images[h], &images[hp])?;
                best = min_report(
                    best,
                    UtilityReport { value: c.value, minimizer: Minimizer::Pair(h, hp), s_opt: Some(c.s_opt) },
                );
            }
        }
        Ok(best.expect("v >= 2"))
    }

    fn utility_a(&self, eta: f64) -> Result<UtilityReport> {
        check_eta(eta)?;
        let v = self.rows();
        if v < 2 {
            return Err(Error::Validation("testing needs at least two inputs".into()));
        }
        let null = self.pushforward(&Hypothesis::uniform(v)?.probabilities())?;
        let mut best = None;
        for h in 0..v {
            let img = self.pushforward(&Hypothesis::smoothed(v, h, eta)?.probabilities())?;
            let d = classical_relative_entropy(&img, &null)?;
            best = min_report(best, UtilityReport { value: d, minimizer: Minimizer::Hypothesis(h), s_opt: None });
        }
        Ok(best.expect("v >= 2"))
    }
}
