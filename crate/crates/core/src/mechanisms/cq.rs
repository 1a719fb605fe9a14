use crate::error::{Error, Result};
use crate::states::{depolarized_pure, sic_states, DensityOperator};

/// Largest alphabet the proposed mechanism supports (SIC families exist for d ≤ 3).
pub const MAX_PROPOSED_V: usize = 9;

/// A classical-quantum channel: one density operator per input symbol.
#[derive(Debug, Clone)]
pub struct CQMechanism {
    outputs: Vec<DensityOperator>,
}

impl CQMechanism {
    pub fn new(outputs: Vec<DensityOperator>) -> Result<Self> {
        if outputs.len() < 2 {
            return Err(Error::Validation("a mechanism needs at least two inputs".into()));
        }
        let d = outputs[0].dim();
        if outputs.iter().any(|o| o.dim() != d) {
            return Err(Error::Validation("all output states must share one dimension".into()));
        }
        Ok(CQMechanism { outputs })
    }

    pub fn v(&self) -> usize {
        self.outputs.len()
    }

    pub fn dim(&self) -> usize {
        self.outputs[0].dim()
    }

    pub fn outputs(&self) -> &[DensityOperator] {
        &self.outputs
    }

    pub fn output(&self, x: usize) -> &DensityOperator {
        &self.outputs[x]
    }
}

/// Feasible depolarising range for a mechanism whose pure states have
/// minimum pairwise squared overlap `c_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QldpBounds {
    pub c_star: f64,
    pub g_minus: f64,
    pub g_plus: f64,
    pub mu_min: f64,
    pub mu_max: f64,
}

/// The mechanism `(μ/d)I + (1−μ)|ψ_x⟩⟨ψ_x|` is ε-QLDP exactly when
/// `μ ∈ [mu_min, mu_max]`.
pub fn mu_feasible_interval(c_star: f64, d: usize, eps: f64) -> Result<QldpBounds> {
    if !(0.0..=1.0).contains(&c_star) {
        return Err(Error::Domain(format!("c_star must lie in [0, 1], got {c_star}")));
    }
    if d < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {d}")));
    }
    if !(eps > 0.0) || eps.is_nan() {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let sh = (eps / 2.0).sinh();
    let t = (1.0 - c_star) / (sh * sh);
    let root = (1.0 + t).sqrt();
    // (1 - √(1+t))/2 rewritten to avoid cancellation for small t
    let g_minus = -t / (2.0 * (1.0 + root));
    let g_plus = (1.0 + root) / 2.0;
    let df = d as f64;
    let mu_min = df * -g_minus / (df * -g_minus + 1.0);
    let mu_max = df * g_plus / (df * g_plus - 1.0);
    Ok(QldpBounds { c_star, g_minus, g_plus, mu_min, mu_max })
}

/// `⌈√v⌉` computed exactly on integers.
pub fn ceil_sqrt(v: usize) -> usize {
    let mut d = 0;
    while d * d < v {
        d += 1;
    }
    d
}

/// The first `v` SIC states in dimension `⌈√v⌉`, each depolarised with the
/// smallest feasible parameter for privacy level `eps`.
pub fn proposed_mechanism(v: usize, eps: f64) -> Result<CQMechanism> {
    check_proposed_v(v)?;
    let d = ceil_sqrt(v);
    let bounds = mu_feasible_interval(1.0 / (d as f64 + 1.0), d, eps)?;
    proposed_mechanism_with_mu(v, bounds.mu_min)
}

/// Same SIC subset as [`proposed_mechanism`] with an explicit depolarising parameter.
pub fn proposed_mechanism_with_mu(v: usize, mu: f64) -> Result<CQMechanism> {
    check_proposed_v(v)?;
    let fam = sic_states(ceil_sqrt(v))?;
    let outputs = fam.states()[..v]
        .iter()
        .map(|psi| depolarized_pure(psi, mu))
        .collect::<Result<Vec<_>>>()?;
    CQMechanism::new(outputs)
}

fn check_proposed_v(v: usize) -> Result<()> {
    if !(2..=MAX_PROPOSED_V).contains(&v) {
        return Err(Error::Capability(format!(
            "the proposed mechanism supports 2 <= v <= {MAX_PROPOSED_V}, got {v}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QldpVerdict {
    pub passed: bool,
    /// Ordered pair `(x, x')` attaining the margin.
    pub worst_pair: (usize, usize),
    /// `min over x ≠ x'` of `λ_min(e^ε Q_{x'} − Q_x)`.
    pub margin: f64,
}

/// Checks the operator inequality `Q_x ≤ e^ε Q_{x'}` for every ordered pair.
pub fn verify_qldp(mech: &CQMechanism, eps: f64, tol: f64) -> QldpVerdict {
    let scale = eps.exp();
    let mut worst = (0, 1);
    let mut margin = f64::INFINITY;
    for (x, qx) in mech.outputs().iter().enumerate() {
        for (xp, qxp) in mech.outputs().iter().enumerate() {
            if x == xp {
                continue;
            }
            let gap = qxp.matrix().scale(scale).sub(qx.matrix()).expect("common dimension");
            let m = gap.min_eigenvalue();
            if m < margin {
                margin = m;
                worst = (x, xp);
            }
        }
    }
    QldpVerdict { passed: margin >= -tol, worst_pair: worst, margin }
}
