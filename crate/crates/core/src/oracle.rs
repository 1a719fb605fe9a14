//! Brute-force reference implementations used to cross-check the primary
//! code paths. Nothing outside tests and the verification suites calls these.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::divergences::Exponent;
use crate::error::{Error, Result};
use crate::mechanisms::{verify_ldp, StochasticMatrix};
use crate::states::DensityOperator;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED;
pub const MIN_GRID: usize = 1000;
pub const MAX_SAMPLER_V: usize = 6;
pub const MAX_SAMPLER_B: usize = 8;
pub const MAX_VERTEX_V: usize = 6;

/// `−log min_s Tr(ρ^s σ^{1−s})` over a uniform grid of `grid_size` points.
///
/// The trace is expanded in both eigenbases as
/// `Σ_{ij} a_i^s b_j^{1−s} |⟨u_i|v_j⟩|²`, so no matrix power is formed.
pub fn chernoff_grid_oracle(rho: &DensityOperator, sigma: &DensityOperator, grid_size: usize) -> Result<Exponent> {
    if grid_size < MIN_GRID {
        return Err(Error::Domain(format!("grid needs at least {MIN_GRID} points, got {grid_size}")));
    }
    if rho.dim() != sigma.dim() {
        return Err(Error::Validation("dimension mismatch".into()));
    }
    let er = rho.matrix().eig();
    let es = sigma.matrix().eig();
    let a: Vec<f64> = er.eigenvalues().iter().map(|x| x.max(0.0)).collect();
    let b: Vec<f64> = es.eigenvalues().iter().map(|x| x.max(0.0)).collect();
    let overlaps = er.eigenvectors().adjoint() * es.eigenvectors();
    let mut terms = Vec::new();
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            let w = overlaps[(i, j)].norm_sqr();
            if w > 0.0 {
                terms.push((ai, bj, w));
            }
        }
    }
    let pow = |x: f64, e: f64| if x == 0.0 { if e == 0.0 { 1.0 } else { 0.0 } } else { x.powf(e) };
    let mut best = f64::INFINITY;
    for n in 0..grid_size {
        let s = n as f64 / (grid_size - 1) as f64;
        let val: f64 = terms.iter().map(|&(ai, bj, w)| pow(ai, s) * pow(bj, 1.0 - s) * w).sum();
        best = best.min(val);
    }
    Ok(if best <= 1e-15 { Exponent::Infinite } else { Exponent::Finite((-best.ln()).max(0.0)) })
}

/// One random ε-LDP mechanism with `v` rows and `b` columns.
///
/// Column scales `m` are drawn with `Σm ∈ [e^{−ε}, 1]`; each row draws
/// ratios `t ∈ [1, e^ε]^b` and is pulled toward the all-1 or all-`e^ε`
/// vector until `Σ m_y t_y = 1`. Entries are `m_y t_{xy}`, so every column
/// ratio stays within `e^ε`.
fn sample_ldp(v: usize, b: usize, eps: f64, rng: &mut ChaCha8Rng) -> Option<StochasticMatrix> {
    let e = eps.exp();
    let total = rng.gen_range(e.recip()..=1.0);
    let raw: Vec<f64> = (0..b).map(|_| rng.gen_range(0.05..1.0)).collect();
    let norm: f64 = raw.iter().sum();
    let m: Vec<f64> = raw.iter().map(|r| total * r / norm).collect();
    let mut data = Vec::with_capacity(v * b);
    for _ in 0..v {
        let mut t: Vec<f64> = (0..b).map(|_| rng.gen_range(1.0..=e)).collect();
        let s: f64 = m.iter().zip(&t).map(|(a, b)| a * b).sum();
        let (target, lam) = if s < 1.0 { (e, (1.0 - s) / (e * total - s)) } else { (1.0, (s - 1.0) / (s - total)) };
        if !lam.is_finite() {
            return None;
        }
        for ty in t.iter_mut() {
            *ty = (1.0 - lam) * *ty + lam * target;
        }
        let row: Vec<f64> = m.iter().zip(&t).map(|(a, b)| a * b).collect();
        let rs: f64 = row.iter().sum();
        data.extend(row.iter().map(|x| x / rs));
    }
    let q = StochasticMatrix::from_flat(v, b, data).ok()?;
    verify_ldp(&q, eps, 1e-12).passed.then_some(q)
}

/// A seeded corpus of `count` random ε-LDP mechanisms of shape `v × b`.
pub fn random_ldp_sampler(v: usize, b: usize, eps: f64, count: usize, seed: u64) -> Result<Vec<StochasticMatrix>> {
    if !(2..=MAX_SAMPLER_V).contains(&v) || !(1..=MAX_SAMPLER_B).contains(&b) {
        return Err(Error::Capability(format!(
            "sampler supports 2 <= v <= {MAX_SAMPLER_V} and 1 <= b <= {MAX_SAMPLER_B}, got v = {v}, b = {b}"
        )));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("eps must be positive and finite, got {eps}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        if attempts >= 10 * count.max(1) {
            return Err(Error::Numerical(format!("sampler produced {} of {count} mechanisms", out.len())));
        }
        attempts += 1;
        if let Some(q) = sample_ldp(v, b, eps, &mut rng) {
            out.push(q);
        }
    }
    Ok(out)
}

/// A seeded random row-stochastic matrix, used as a post-processing channel.
pub fn random_stochastic(rows: usize, cols: usize, rng: &mut impl Rng) -> Result<StochasticMatrix> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let raw: Vec<f64> = (0..cols).map(|_| -rng.gen_range(f64::EPSILON..1.0).ln()).collect();
        let s: f64 = raw.iter().sum();
        data.extend(raw.iter().map(|r| r / s));
    }
    StochasticMatrix::from_flat(rows, cols, data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    S,
    A,
}

/// Best utility of a mechanism concentrated on a single hypercube vertex.
///
/// For every vertex `c ∈ {1, e^ε}^v` the hypothesis-averaged per-unit-mass
/// quantity is evaluated directly from the column entries: the Bhattacharyya
/// cross-term `Σ_{h≠h'} √(p_h p_{h'})` for `S`, the relative entropy sum for `A`.
pub fn extremal_vertex_oracle(v: usize, eps: f64, eta: f64, objective: Objective) -> Result<f64> {
    if !(2..=MAX_VERTEX_V).contains(&v) {
        return Err(Error::Capability(format!("vertex oracle supports 2 <= v <= {MAX_VERTEX_V}, got {v}")));
    }
    if !(eps > 0.0 && eps.is_finite()) || !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("need eps > 0 and eta in (0, 1], got eps = {eps}, eta = {eta}")));
    }
    let e = eps.exp();
    let vf = v as f64;
    let mut best_s = f64::INFINITY;
    let mut best_a = f64::NEG_INFINITY;
    for z in 0u32..(1 << v) {
        let c: Vec<f64> = (0..v).map(|x| if z >> x & 1 == 1 { e } else { 1.0 }).collect();
        let f = c.iter().sum::<f64>() / vf;
        let p: Vec<f64> = c.iter().map(|cx| eta * cx + (1.0 - eta) * f).collect();
        match objective {
            Objective::S => {
                let mut cross = 0.0;
                for h in 0..v {
                    for hp in 0..v {
                        if h != hp {
                            cross += (p[h] * p[hp]).sqrt();
                        }
                    }
                }
                best_s = best_s.min(cross / (vf * (vf - 1.0) * f));
            }
            Objective::A => {
                let sum: f64 = p.iter().map(|px| px * (px / f).ln()).sum();
                best_a = best_a.max(sum / (vf * f));
            }
        }
    }
    Ok(match objective {
        Objective::S => -best_s.ln(),
        Objective::A => best_a,
    })
}
