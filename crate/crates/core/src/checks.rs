//! Named invariant suites, shared by the command-line `verify` command and
//! the acceptance tests.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::divergences::TestingMechanism;
use crate::error::{Error, Result};
use crate::mechanisms::{
    block_design_mechanism, ceil_sqrt, complete_design, decompose_extremal, proposed_mechanism, verify_qldp,
};
use crate::oracle::{chernoff_grid_oracle, extremal_vertex_oracle, random_ldp_sampler, random_stochastic, Objective};
use crate::put::{
    a_classical, a_classical_taylor, a_quantum_closed, a_quantum_taylor, mu_eta, mu_star, neg_log_g,
    s_classical_taylor, s_classical_upper, s_quantum_closed, s_quantum_taylor,
};
use crate::states::{depolarized_pure, sic_states};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Sic,
    Qldp,
    Converse,
    Achievability,
    Taylor,
    Decompose,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["sic", "qldp", "converse", "achievability", "taylor", "decompose", "all"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sic" => Suite::Sic,
            "qldp" => Suite::Qldp,
            "converse" => Suite::Converse,
            "achievability" => Suite::Achievability,
            "taylor" => Suite::Taylor,
            "decompose" => Suite::Decompose,
            "all" => Suite::All,
            _ => return Err(Error::Validation(format!("unknown suite {s:?}"))),
        })
    }
}

/// Outcome of one named check. `margin` is the slack left before the check
/// would fail; negative when it failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
}

impl Check {
    /// Passes when `error <= bound`.
    pub fn within(name: impl Into<String>, error: f64, bound: f64) -> Self {
        let margin = if error.is_nan() { f64::NEG_INFINITY } else { bound - error };
        Check { name: name.into(), passed: margin >= 0.0, margin }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} (margin {:.3e})", self.name, self.margin)
    }
}

pub fn run(suite: Suite, seed: u64) -> Result<Vec<Check>> {
    match suite {
        Suite::Sic => sic(),
        Suite::Qldp => qldp(),
        Suite::Converse => converse(seed),
        Suite::Achievability => achievability(),
        Suite::Taylor => taylor(),
        Suite::Decompose => decompose(seed),
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::Sic, Suite::Qldp, Suite::Converse, Suite::Achievability, Suite::Taylor, Suite::Decompose] {
                all.extend(run(s, seed)?);
            }
            Ok(all)
        }
    }
}

/// Resolution of identity and equal overlaps for `d ∈ {2, 3}`.
pub fn sic() -> Result<Vec<Check>> {
    [2, 3]
        .iter()
        .map(|&d| {
            let fam = sic_states(d)?;
            let err = fam.resolution_residual().max(fam.overlap_residual());
            Ok(Check::within(format!("sic d={d}"), err, 1e-9))
        })
        .collect()
}

/// The proposed mechanism is private at `ε` and not at `0.9ε`.
pub fn qldp() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for v in 2..=9 {
        for eps in [0.1, 0.5, 1.0, 2.0] {
            let mech = proposed_mechanism(v, eps)?;
            let at = verify_qldp(&mech, eps, 1e-12);
            let below = verify_qldp(&mech, 0.9 * eps, 1e-12);
            let margin = (at.margin + 1e-12).min(-below.margin);
            out.push(Check { name: format!("qldp v={v} eps={eps}"), passed: at.passed && !below.passed, margin });
        }
    }
    Ok(out)
}

const CONVERSE_SHAPES: [(usize, usize); 20] = [
    (2, 2), (2, 3), (2, 5), (2, 8),
    (3, 2), (3, 3), (3, 4), (3, 7),
    (4, 2), (4, 4), (4, 6), (4, 8),
    (5, 3), (5, 5), (5, 6), (5, 8),
    (6, 2), (6, 4), (6, 6), (6, 8),
];

/// Random private mechanisms never beat the classical trade-offs, and the
/// closed forms agree with the vertex oracle.
pub fn converse(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, &(v, b)) in CONVERSE_SHAPES.iter().enumerate() {
        let eps = [0.5, 1.0, 2.0][i % 3];
        let corpus = random_ldp_sampler(v, b, eps, 15, seed.wrapping_add(i as u64))?;
        let mut excess = f64::NEG_INFINITY;
        for q in &corpus {
            for eta in [1.0, 0.6] {
                excess = excess.max(q.utility_s(eta)?.value.as_f64() - s_classical_upper(v, eps, eta)?.value);
                excess = excess.max(q.utility_a(eta)?.value.as_f64() - a_classical(v, eps, eta)?.value);
            }
        }
        out.push(Check::within(format!("converse v={v} b={b} eps={eps}"), excess, 1e-8));
    }
    for v in 2..=6 {
        let mut err = 0.0f64;
        for eps in [0.25, 1.0, 2.0] {
            err = err.max((extremal_vertex_oracle(v, eps, 1.0, Objective::S)? - s_classical_upper(v, eps, 1.0)?.value).abs());
            for eta in [0.5, 1.0] {
                err = err.max((extremal_vertex_oracle(v, eps, eta, Objective::A)? - a_classical(v, eps, eta)?.value).abs());
            }
        }
        out.push(Check::within(format!("vertex oracle v={v}"), err, 1e-10));
    }
    Ok(out)
}

/// Complete-design mechanisms attain the classical trade-offs, and the
/// quantum closed forms match direct evaluation on the proposed mechanism.
pub fn achievability() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for v in 2..=6 {
        let mut err = 0.0f64;
        for eps in [0.25, 1.0, 2.0] {
            let designs = (1..v)
                .map(|k| block_design_mechanism(&complete_design(v, k)?, eps))
                .collect::<Result<Vec<_>>>()?;
            let best_s = designs.iter().map(|q| q.utility_s(1.0).map(|r| r.value.as_f64())).try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))?;
            err = err.max((best_s - s_classical_upper(v, eps, 1.0)?.value).abs());
            for eta in [0.3, 0.7, 1.0] {
                let best_a = designs.iter().map(|q| q.utility_a(eta).map(|r| r.value.as_f64())).try_fold(0.0f64, |m, x| x.map(|x| m.max(x)))?;
                err = err.max((best_a - a_classical(v, eps, eta)?.value).abs());
            }
        }
        out.push(Check::within(format!("block design v={v}"), err, 1e-8));
    }
    for v in [4, 9] {
        let d = ceil_sqrt(v);
        let mut err = 0.0f64;
        for eps in [0.25, 1.0, 2.0] {
            let mech = proposed_mechanism(v, eps)?;
            for eta in [0.5, 0.9, 1.0] {
                err = err.max((mech.utility_s(eta)?.value.as_f64() - s_quantum_closed(v, eps, eta)?.value).abs());
                err = err.max((mech.utility_a(eta)?.value.as_f64() - a_quantum_closed(d, eps, eta)?).abs());
            }
        }
        out.push(Check::within(format!("quantum closed forms v={v}"), err, 1e-8));
    }
    let mut err = 0.0f64;
    for d in [2, 3] {
        let fam = sic_states(d)?;
        for eps in [0.25, 1.0] {
            let mu = mu_star(d, eps)?;
            let a = depolarized_pure(&fam.states()[0], mu)?;
            let b = depolarized_pure(&fam.states()[1], mu)?;
            let grid = chernoff_grid_oracle(&a, &b, 2001)?.as_f64();
            err = err.max((grid - neg_log_g(1.0 / (d as f64 + 1.0), d, mu_eta(mu, 1.0))?).abs());
        }
    }
    out.push(Check::within("chernoff grid oracle", err, 1e-6));
    Ok(out)
}

fn taylor_check(name: String, value: f64, eps: f64, coeff: f64) -> Check {
    Check::within(name, (value / (eps * eps) / coeff - 1.0).abs(), 0.01)
}

/// `value/ε² → coefficient` at `ε = 10⁻³`.
pub fn taylor() -> Result<Vec<Check>> {
    let eps = 1e-3;
    let mut out = Vec::new();
    for v in 2..=9 {
        out.push(taylor_check(format!("taylor s quantum v={v}"), s_quantum_closed(v, eps, 1.0)?.value, eps, s_quantum_taylor(v)));
        out.push(taylor_check(format!("taylor s classical v={v}"), s_classical_upper(v, eps, 1.0)?.value, eps, s_classical_taylor(v)));
        out.push(taylor_check(format!("taylor a classical v={v}"), a_classical(v, eps, 1.0)?.value, eps, a_classical_taylor(v)));
    }
    for d in [2, 3] {
        out.push(taylor_check(format!("taylor a quantum d={d}"), a_quantum_closed(d, eps, 1.0)?, eps, a_quantum_taylor(d)));
    }
    Ok(out)
}

/// Extremal factorisation reproduces random private mechanisms and
/// post-processing never increases utility.
pub fn decompose(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for v in 2..=4 {
        for b in 2..=6 {
            let eps = 1.0;
            let corpus = random_ldp_sampler(v, b, eps, 100, seed ^ ((v * 16 + b) as u64))?;
            let mut worst = 0.0f64;
            for q in &corpus {
                worst = worst.max(decompose_extremal(q, eps)?.residual(q));
            }
            out.push(Check::within(format!("decompose v={v} b={b}"), worst, 1e-9));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut excess = f64::NEG_INFINITY;
    for (i, q) in random_ldp_sampler(4, 5, 1.0, 40, seed)?.iter().enumerate() {
        let phi = random_stochastic(5, 2 + i % 5, &mut rng)?;
        let pq = q.then(&phi)?;
        for eta in [1.0, 0.5] {
            excess = excess.max(pq.utility_s(eta)?.value.as_f64() - q.utility_s(eta)?.value.as_f64());
            excess = excess.max(pq.utility_a(eta)?.value.as_f64() - q.utility_a(eta)?.value.as_f64());
        }
    }
    out.push(Check::within("post-processing", excess, 1e-9));
    Ok(out)
}
