//! Scalar minimisation of convex functions on `[0, 1]`.
//!
//! A coarse grid locates the basin, then golden-section search refines it.

/// Number of points in the seeding grid.
pub const SEED_GRID: usize = 64;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub arg: f64,
    pub value: f64,
}

/// Minimises `f` on `[0, 1]` assuming convexity, to bracket width `tol`.
pub fn minimize_unit_interval(f: impl Fn(f64) -> f64, tol: f64) -> Minimum {
    let n = SEED_GRID;
    let step = 1.0 / (n - 1) as f64;
    let mut best = Minimum { arg: 0.0, value: f(0.0) };
    let mut best_i = 0;
    for i in 1..n {
        let s = if i == n - 1 { 1.0 } else { i as f64 * step };
        let val = f(s);
        if val < best.value {
            best = Minimum { arg: s, value: val };
            best_i = i;
        }
    }
    let lo = best_i.saturating_sub(1) as f64 * step;
    let hi = ((best_i + 1).min(n - 1) as f64 * step).min(1.0);
    let refined = golden_section(&f, lo, hi, tol);
    if refined.value < best.value {
        refined
    } else {
        best
    }
}

/// Golden-section search on `[lo, hi]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Minimum {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        Minimum { arg: c, value: fc }
    } else {
        Minimum { arg: d, value: fd }
    }
}
