use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mechanisms::{verify_ldp, StochasticMatrix};

/// Largest alphabet for which the `2^v`-column extremal basis is built.
pub const MAX_EXTREMAL_V: usize = 12;

/// Tolerance on `S θ = 1` when validating an [`ExtremalMechanism`].
const BALANCE_TOL: f64 = 1e-10;

fn check_v(v: usize) -> Result<()> {
    if v < 2 {
        return Err(Error::Domain(format!("v must be at least 2, got {v}")));
    }
    if v > MAX_EXTREMAL_V {
        return Err(Error::Capability(format!(
            "extremal basis has 2^v columns; v = {v} exceeds the limit {MAX_EXTREMAL_V}"
        )));
    }
    Ok(())
}

/// Row `x` of column `y` is `e^ε` when bit `x` of `y` is set, else 1.
///
/// Columns are indexed from zero, so column `y` encodes the binary
/// representation of `y` with row 0 as the least significant bit.
pub fn extremal_matrix(v: usize, eps: f64) -> Result<DMatrix<f64>> {
    check_v(v)?;
    let e = eps.exp();
    Ok(DMatrix::from_fn(v, 1 << v, |x, y| if (y >> x) & 1 == 1 { e } else { 1.0 }))
}

/// Non-negative weights `θ` on the `2^v` hypercube vertices with `S θ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalMechanism {
    v: usize,
    eps: f64,
    theta: Vec<f64>,
}

impl ExtremalMechanism {
    pub fn new(v: usize, eps: f64, theta: Vec<f64>) -> Result<Self> {
        check_v(v)?;
        if theta.len() != 1 << v {
            return Err(Error::Validation(format!("expected {} weights, got {}", 1usize << v, theta.len())));
        }
        if theta.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
            return Err(Error::Validation("weights must be finite and non-negative".into()));
        }
        let m = ExtremalMechanism { v, eps, theta };
        let worst = m.row_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
        if worst > BALANCE_TOL {
            return Err(Error::Validation(format!("S theta deviates from the ones vector by {worst:e}")));
        }
        Ok(m)
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// `S θ`.
    pub fn row_sums(&self) -> Vec<f64> {
        let e = self.eps.exp();
        (0..self.v)
            .map(|x| {
                self.theta
                    .iter()
                    .enumerate()
                    .map(|(y, &t)| if (y >> x) & 1 == 1 { e * t } else { t })
                    .sum()
            })
            .collect()
    }

    /// The mechanism `S diag(θ)` as a `v × 2^v` stochastic matrix.
    pub fn to_matrix(&self) -> Result<StochasticMatrix> {
        let e = self.eps.exp();
        let cols = 1 << self.v;
        let mut data = vec![0.0; self.v * cols];
        for x in 0..self.v {
            for (y, &t) in self.theta.iter().enumerate() {
                data[x * cols + y] = if (y >> x) & 1 == 1 { e * t } else { t };
            }
        }
        for row in data.chunks_mut(cols) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|q| *q /= s);
        }
        StochasticMatrix::from_flat(self.v, cols, data)
    }

    /// Weight on vertices where `h` is raised and `h'` is not, minus the
    /// weight on vertices where the roles are swapped. Zero for every valid θ.
    pub fn pair_balance(&self, h: usize, hp: usize) -> f64 {
        let mut diff = 0.0;
        for (y, &t) in self.theta.iter().enumerate() {
            match ((y >> h) & 1, (y >> hp) & 1) {
                (1, 0) => diff += t,
                (0, 1) => diff -= t,
                _ => {}
            }
        }
        diff
    }
}

/// `q = S diag(ζ) ζ̄`: an extremal mechanism followed by post-processing.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub extremal: ExtremalMechanism,
    /// `2^v × b` row-stochastic matrix.
    pub post_processing: StochasticMatrix,
}

impl Decomposition {
    /// Entries of `S diag(ζ) ζ̄`, computed without renormalisation.
    pub fn reconstruct(&self) -> Vec<Vec<f64>> {
        let v = self.extremal.v();
        let e = self.extremal.eps().exp();
        let b = self.post_processing.cols();
        let mut out = vec![vec![0.0; b]; v];
        for (x, row) in out.iter_mut().enumerate() {
            for (z, &t) in self.extremal.theta().iter().enumerate() {
                let s = if (z >> x) & 1 == 1 { e * t } else { t };
                if s == 0.0 {
                    continue;
                }
                for (o, &p) in row.iter_mut().zip(self.post_processing.row(z)) {
                    *o += s * p;
                }
            }
        }
        out
    }

    /// Largest elementwise difference between the reconstruction and `q`.
    pub fn residual(&self, q: &StochasticMatrix) -> f64 {
        let rec = self.reconstruct();
        let mut worst = 0.0f64;
        for (x, row) in rec.iter().enumerate() {
            for (y, &r) in row.iter().enumerate() {
                worst = worst.max((r - q.get(x, y)).abs());
            }
        }
        worst
    }
}

/// Factors an ε-LDP mechanism through the extremal basis.
///
/// Each column is divided by its minimum, giving a point of `[1, e^ε]^v`,
/// which is written as a product-measure mixture of hypercube vertices: vertex
/// `z` gets `Π_x t_x^{bit_x(z)} (1 − t_x)^{1 − bit_x(z)}` with
/// `t_x = (q̄_x − 1)/(e^ε − 1)`.
pub fn decompose_extremal(q: &StochasticMatrix, eps: f64) -> Result<Decomposition> {
    let v = q.rows();
    check_v(v)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("eps must be positive and finite, got {eps}")));
    }
    let verdict = verify_ldp(q, eps, 1e-12);
    if !verdict.passed {
        let (x, xp, y) = verdict.worst;
        return Err(Error::Precondition(format!(
            "mechanism is not {eps}-LDP: column {y}, rows ({x}, {xp}), margin {:e}",
            verdict.margin
        )));
    }
    let e = eps.exp();
    let b = q.cols();
    let n = 1usize << v;
    // weights[z][y] = θ_y · w^y_z
    let mut weights = vec![vec![0.0; b]; n];
    for y in 0..b {
        let col = q.column(y);
        let theta = col.iter().copied().fold(f64::INFINITY, f64::min);
        if theta <= 0.0 {
            // ε-LDP forces a column with a zero entry to be identically zero
            continue;
        }
        let t: Vec<f64> = col.iter().map(|&c| ((c / theta - 1.0) / (e - 1.0)).clamp(0.0, 1.0)).collect();
        for (z, wz) in weights.iter_mut().enumerate() {
            let mut w = theta;
            for (x, &tx) in t.iter().enumerate() {
                w *= if (z >> x) & 1 == 1 { tx } else { 1.0 - tx };
                if w == 0.0 {
                    break;
                }
            }
            wz[y] = w;
        }
    }
    let zeta: Vec<f64> = weights.iter().map(|w| w.iter().sum()).collect();
    let mut post = Vec::with_capacity(n * b);
    for (z, w) in weights.iter().enumerate() {
        if zeta[z] > 0.0 {
            post.extend(w.iter().map(|&wy| wy / zeta[z]));
        } else {
            // unused vertex; any distribution will do
            post.extend(std::iter::repeat(1.0 / b as f64).take(b));
        }
    }
    let extremal = ExtremalMechanism::new(v, eps, zeta)?;
    let post_processing = StochasticMatrix::from_flat(n, b, post)?;
    Ok(Decomposition { extremal, post_processing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::randomized_response;

    #[test]
    fn binary_basis_columns() {
        let e = 2f64.exp();
        let s = extremal_matrix(2, 2.0).unwrap();
        let cols: Vec<(f64, f64)> = (0..4).map(|y| (s[(0, y)], s[(1, y)])).collect();
        assert_eq!(cols, vec![(1.0, 1.0), (e, 1.0), (1.0, e), (e, e)]);
    }

    #[test]
    fn first_and_last_columns() {
        let s = extremal_matrix(5, 0.3).unwrap();
        assert!((0..5).all(|x| s[(x, 0)] == 1.0));
        assert!((0..5).all(|x| s[(x, 31)] == 0.3f64.exp()));
        assert!(matches!(extremal_matrix(13, 1.0), Err(Error::Capability(_))));
        assert!(matches!(extremal_matrix(1, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn randomized_response_round_trip() {
        let eps = 4f64.ln();
        let q = randomized_response(2, eps).unwrap();
        let dec = decompose_extremal(&q, eps).unwrap();
        assert!(dec.residual(&q) < 1e-9);
        for s in dec.extremal.row_sums() {
            assert!((s - 1.0).abs() < 1e-10);
        }
        assert!(dec.extremal.pair_balance(0, 1).abs() < 1e-12);
    }

    #[test]
    fn extremal_input_is_a_fixed_point() {
        let eps: f64 = 0.7;
        let e = eps.exp();
        // θ supported on vertices 01 and 10 of the 2-cube: each row sums to (e + 1) θ
        let t = 1.0 / (e + 1.0);
        let ext = ExtremalMechanism::new(2, eps, vec![0.0, t, t, 0.0]).unwrap();
        let q = ext.to_matrix().unwrap();
        let dec = decompose_extremal(&q, eps).unwrap();
        assert!(dec.residual(&q) < 1e-12);
        for (a, b) in dec.extremal.theta().iter().zip(ext.theta()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((dec.post_processing.get(1, 1) - 1.0).abs() < 1e-12);
        assert!((dec.post_processing.get(2, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_private_input() {
        let q = StochasticMatrix::identity(3).unwrap();
        assert!(matches!(decompose_extremal(&q, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn invalid_theta_rejected() {
        assert!(ExtremalMechanism::new(2, 1.0, vec![0.25; 4]).is_err());
        assert!(ExtremalMechanism::new(2, 1.0, vec![1.0; 3]).is_err());
    }
}
