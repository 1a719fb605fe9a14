//! Pure states, density operators, SIC families and hypothesis ensembles.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::mechanisms::CQMechanism;
use crate::tolerance::Tolerances;

/// A unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Validation("pure state needs at least one amplitude".into()));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let tol = Tolerances::current().norm;
        if (norm2 - 1.0).abs() > tol {
            return Err(Error::Validation(format!("squared norm {norm2} differs from 1 by more than {tol:e}")));
        }
        Ok(PureState { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Validation("cannot normalise a zero or non-finite vector".into()));
        }
        PureState::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Standard basis vector `|i⟩` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(Error::Validation(format!("basis index {i} out of range for dimension {d}")));
        }
        let mut a = vec![Complex64::new(0.0, 0.0); d];
        a[i] = Complex64::new(1.0, 0.0);
        PureState::new(a)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn projector(&self) -> HermitianMatrix {
        HermitianMatrix::outer(&self.amplitudes).expect("outer product of a finite vector is Hermitian")
    }
}

/// A unit-trace positive semidefinite Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: HermitianMatrix,
}

impl DensityOperator {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        let tol = Tolerances::current();
        let tr = matrix.trace();
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::Validation(format!("trace {tr} differs from 1 by more than {:e}", tol.trace)));
        }
        let min = matrix.min_eigenvalue();
        if min < -tol.psd {
            return Err(Error::NotPsd(min));
        }
        Ok(DensityOperator { matrix })
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        DensityOperator::new(HermitianMatrix::identity(d)?.scale(1.0 / d as f64))
    }

    pub fn pure(psi: &PureState) -> Self {
        DensityOperator { matrix: psi.projector() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    /// Convex combination `Σ w_i ρ_i`. Weights must form a probability vector.
    pub fn mixture(weights: &[f64], states: &[&DensityOperator]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::Validation("mixture needs one weight per state".into()));
        }
        check_probability_vector(weights)?;
        let mut acc = states[0].matrix.scale(weights[0]);
        for (w, s) in weights.iter().zip(states).skip(1) {
            acc = acc.add(&s.matrix.scale(*w))?;
        }
        DensityOperator::new(acc)
    }
}

pub(crate) fn check_probability_vector(p: &[f64]) -> Result<()> {
    let tol = Tolerances::current().stochastic;
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::Validation("probability vector has negative or non-finite entries".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::Validation(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// A complete set of `d²` SIC states in dimension `d`.
#[derive(Debug, Clone)]
pub struct SicFamily {
    dim: usize,
    states: Vec<PureState>,
}

impl SicFamily {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    /// Frobenius distance between `Σ|ψ⟩⟨ψ|` and `d·I`.
    pub fn resolution_residual(&self) -> f64 {
        let d = self.dim;
        let mut acc = HermitianMatrix::diagonal(&vec![0.0; d]).expect("zero matrix");
        for s in &self.states {
            acc = acc.add(&s.projector()).expect("same dimension");
        }
        let target = HermitianMatrix::identity(d).expect("identity").scale(d as f64);
        acc.distance(&target).expect("same dimension")
    }

    /// Largest deviation of a pairwise squared overlap from `1/(d+1)`.
    pub fn overlap_residual(&self) -> f64 {
        let target = 1.0 / (self.dim as f64 + 1.0);
        let mut worst = 0.0f64;
        for (i, a) in self.states.iter().enumerate() {
            for b in &self.states[i + 1..] {
                worst = worst.max((a.overlap(b) - target).abs());
            }
        }
        worst
    }
}

/// Weyl–Heisenberg orbit `X^a Z^b |fiducial⟩`, ordered lexicographically in `(a, b)`.
///
/// Supported dimensions are 2 and 3.
pub fn sic_states(d: usize) -> Result<SicFamily> {
    let fiducial: Vec<Complex64> = match d {
        2 => {
            let cos2 = (1.0 + 1.0 / 3f64.sqrt()) / 2.0;
            let (c, s) = (cos2.sqrt(), (1.0 - cos2).sqrt());
            vec![Complex64::new(c, 0.0), Complex64::from_polar(s, FRAC_PI_4)]
        }
        3 => {
            let h = 1.0 / 2f64.sqrt();
            vec![Complex64::new(0.0, 0.0), Complex64::new(h, 0.0), Complex64::new(-h, 0.0)]
        }
        _ => {
            return Err(Error::Capability(format!("SIC states are only available for d in {{2, 3}}, got {d}")));
        }
    };
    let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64);
    let mut states = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            // (X^a Z^b f)_j = ω^{b(j-a)} f_{j-a}
            let amps = (0..d)
                .map(|j| {
                    let src = (j + d - a) % d;
                    omega((b * src) % d) * fiducial[src]
                })
                .collect();
            states.push(PureState::normalized(amps)?);
        }
    }
    Ok(SicFamily { dim: d, states })
}

/// `(μ/d) I + (1 − μ)|ψ⟩⟨ψ|` for `μ ∈ [0, d/(d−1)]`.
pub fn depolarized_pure(psi: &PureState, mu: f64) -> Result<DensityOperator> {
    let d = psi.dim();
    if d < 2 {
        return Err(Error::Domain("depolarising needs dimension at least 2".into()));
    }
    let upper = d as f64 / (d as f64 - 1.0);
    if !(mu.is_finite() && (-1e-12..=upper + 1e-12).contains(&mu)) {
        return Err(Error::Domain(format!("depolarising parameter {mu} outside [0, {upper}]")));
    }
    let mu = mu.clamp(0.0, upper);
    let noise = HermitianMatrix::identity(d)?.scale(mu / d as f64);
    DensityOperator::new(noise.add(&psi.projector().scale(1.0 - mu))?)
}

/// Smoothed point mass `η δ_h + (1 − η)/v`, or the uniform distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypothesis {
    v: usize,
    center: Option<usize>,
    eta: f64,
}

impl Hypothesis {
    /// `h` is zero-based.
    pub fn smoothed(v: usize, h: usize, eta: f64) -> Result<Self> {
        if v < 2 {
            return Err(Error::Domain(format!("alphabet size must be at least 2, got {v}")));
        }
        if h >= v {
            return Err(Error::Domain(format!("hypothesis index {h} out of range for v = {v}")));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::Domain(format!("eta must lie in (0, 1], got {eta}")));
        }
        Ok(Hypothesis { v, center: Some(h), eta })
    }

    pub fn uniform(v: usize) -> Result<Self> {
        if v < 2 {
            return Err(Error::Domain(format!("alphabet size must be at least 2, got {v}")));
        }
        Ok(Hypothesis { v, center: None, eta: 0.0 })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn center(&self) -> Option<usize> {
        self.center
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn probability(&self, x: usize) -> f64 {
        let base = (1.0 - self.eta) / self.v as f64;
        match self.center {
            Some(h) if h == x => self.eta + base,
            Some(_) => base,
            None => 1.0 / self.v as f64,
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.v).map(|x| self.probability(x)).collect()
    }
}

/// `Σ_x P_x Q_x` for the hypothesis distribution `P`.
pub fn ensemble_state(mech: &CQMechanism, hyp: &Hypothesis) -> Result<DensityOperator> {
    if mech.v() != hyp.v() {
        return Err(Error::Validation(format!(
            "mechanism alphabet {} does not match hypothesis alphabet {}",
            mech.v(),
            hyp.v()
        )));
    }
    ensemble_from_distribution(mech, &hyp.probabilities())
}

/// `Σ_x p_x Q_x` for an arbitrary input distribution `p`.
pub fn ensemble_from_distribution(mech: &CQMechanism, p: &[f64]) -> Result<DensityOperator> {
    if p.len() != mech.v() {
        return Err(Error::Validation(format!(
            "distribution length {} does not match mechanism alphabet {}",
            p.len(),
            mech.v()
        )));
    }
    let outputs: Vec<&DensityOperator> = mech.outputs().iter().collect();
    DensityOperator::mixture(p, &outputs)
}
