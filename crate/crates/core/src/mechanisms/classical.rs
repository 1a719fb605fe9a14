use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// A `v × b` row-stochastic matrix; row `x` is the output distribution on input `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Validation("stochastic matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::Validation("rows must be non-empty and of equal length".into()));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_flat(r, c, data)
    }

    /// Row-major constructor.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Validation(format!(
                "expected {rows}x{cols} = {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::Validation("entries must be finite and non-negative".into()));
        }
        let tol = Tolerances::current().stochastic;
        for (i, row) in data.chunks(cols).enumerate() {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::Validation(format!("row {i} sums to {s}, not 1")));
            }
        }
        Ok(StochasticMatrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::from_flat(n, n, data)
    }

    pub fn uniform(rows: usize, cols: usize) -> Result<Self> {
        Self::from_flat(rows, cols, vec![1.0 / cols as f64; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.cols..(x + 1) * self.cols]
    }

    pub fn column(&self, y: usize) -> Vec<f64> {
        (0..self.rows).map(|x| self.get(x, y)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// Output distribution `qᵀ p` for input distribution `p`.
    pub fn pushforward(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.rows {
            return Err(Error::Validation(format!(
                "input distribution has length {}, mechanism has {} rows",
                p.len(),
                self.rows
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (x, &px) in p.iter().enumerate() {
            for (o, &q) in out.iter_mut().zip(self.row(x)) {
                *o += px * q;
            }
        }
        Ok(out)
    }

    /// Post-processing: the matrix product `self · phi`.
    pub fn then(&self, phi: &StochasticMatrix) -> Result<Self> {
        if phi.rows != self.cols {
            return Err(Error::Validation(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, phi.rows, phi.cols
            )));
        }
        let mut data = vec![0.0; self.rows * phi.cols];
        for x in 0..self.rows {
            for (y, &q) in self.row(x).iter().enumerate() {
                if q == 0.0 {
                    continue;
                }
                for (z, &f) in phi.row(y).iter().enumerate() {
                    data[x * phi.cols + z] += q * f;
                }
            }
        }
        // renormalise away accumulated rounding
        for row in data.chunks_mut(phi.cols) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        Self::from_flat(self.rows, phi.cols, data)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdpVerdict {
    pub passed: bool,
    /// `(x, x', y)` attaining the margin.
    pub worst: (usize, usize, usize),
    /// `min over y, x ≠ x'` of `e^ε q_{x'y} − q_{xy}`.
    pub margin: f64,
}

/// Checks `q_{xy} ≤ e^ε q_{x'y} + tol` for every column and ordered pair of rows.
pub fn verify_ldp(q: &StochasticMatrix, eps: f64, tol: f64) -> LdpVerdict {
    let scale = eps.exp();
    let mut margin = f64::INFINITY;
    let mut worst = (0, 0, 0);
    for y in 0..q.cols() {
        let col = q.column(y);
        // the binding pair in a column is (argmax, argmin)
        let (xmax, &hi) = col.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
        let (xmin, &lo) = col.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty");
        let m = scale * lo - hi;
        if m < margin {
            margin = m;
            worst = (xmax, xmin, y);
        }
    }
    LdpVerdict { passed: margin >= -tol, worst, margin }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_passes_everywhere() {
        let u = StochasticMatrix::uniform(4, 3).unwrap();
        for eps in [1e-6, 0.1, 3.0] {
            assert!(verify_ldp(&u, eps, 0.0).passed);
        }
    }

    #[test]
    fn identity_always_fails() {
        let id = StochasticMatrix::identity(3).unwrap();
        for eps in [0.1, 5.0, 50.0] {
            let v = verify_ldp(&id, eps, 1e-12);
            assert!(!v.passed);
            assert_eq!(v.margin, -1.0);
        }
    }

    #[test]
    fn validation() {
        assert!(StochasticMatrix::new(vec![vec![0.5, 0.4]]).is_err());
        assert!(StochasticMatrix::new(vec![vec![1.5, -0.5]]).is_err());
        assert!(StochasticMatrix::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
        assert!(StochasticMatrix::new(vec![]).is_err());
    }

    #[test]
    fn pushforward_and_composition() {
        let q = StochasticMatrix::new(vec![vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap();
        let out = q.pushforward(&[0.5, 0.5]).unwrap();
        assert!((out[0] - 0.5).abs() < 1e-15);
        let merge = StochasticMatrix::new(vec![vec![1.0], vec![1.0]]).unwrap();
        let c = q.then(&merge).unwrap();
        assert_eq!(c.to_rows(), vec![vec![1.0], vec![1.0]]);
        assert!(q.then(&StochasticMatrix::identity(3).unwrap()).is_err());
    }
}
