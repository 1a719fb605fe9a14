use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::mechanisms::StochasticMatrix;

/// A balanced incomplete block design on vertices `0..v`.
///
/// Construction through [`BlockDesign::new`] verifies k-uniformity,
/// r-regularity and λ-pairwise balance by exact counting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDesign {
    v: usize,
    k: usize,
    r: usize,
    lambda: usize,
    blocks: Vec<Vec<usize>>,
}

impl BlockDesign {
    pub fn new(v: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if v < 2 {
            return Err(Error::Domain(format!("a design needs at least 2 vertices, got {v}")));
        }
        if blocks.is_empty() {
            return Err(Error::Validation("a design needs at least one block".into()));
        }
        let mut normalized = Vec::with_capacity(blocks.len());
        let mut seen = BTreeSet::new();
        for block in blocks {
            let set: BTreeSet<usize> = block.iter().copied().collect();
            if set.len() != block.len() {
                return Err(Error::Validation(format!("block {block:?} repeats a vertex")));
            }
            if set.iter().any(|&p| p >= v) {
                return Err(Error::Validation(format!("block {block:?} has a vertex outside 0..{v}")));
            }
            let sorted: Vec<usize> = set.into_iter().collect();
            if !seen.insert(sorted.clone()) {
                return Err(Error::Validation(format!("block {sorted:?} appears twice")));
            }
            normalized.push(sorted);
        }

        let k = normalized[0].len();
        if normalized.iter().any(|b| b.len() != k) {
            return Err(Error::Validation("blocks are not all the same size".into()));
        }
        let mut degree = vec![0usize; v];
        let mut pairs = vec![0usize; v * v];
        for b in &normalized {
            for (i, &p) in b.iter().enumerate() {
                degree[p] += 1;
                for &q in &b[i + 1..] {
                    pairs[p * v + q] += 1;
                }
            }
        }
        let r = degree[0];
        if degree.iter().any(|&d| d != r) {
            return Err(Error::Validation(format!("design is not regular: degrees {degree:?}")));
        }
        let lambda = pairs[1];
        for p in 0..v {
            for q in p + 1..v {
                if pairs[p * v + q] != lambda {
                    return Err(Error::Validation(format!(
                        "pair ({p}, {q}) lies in {} blocks, expected {lambda}",
                        pairs[p * v + q]
                    )));
                }
            }
        }
        let b = normalized.len();
        if ![0, 1, v].contains(&k) && (r * (k - 1) != lambda * (v - 1) || b * k != v * r) {
            return Err(Error::Validation(format!(
                "parameters (v={v}, k={k}, r={r}, b={b}, lambda={lambda}) violate r(k-1) = lambda(v-1), bk = vr"
            )));
        }
        Ok(BlockDesign { v, k, r, lambda, blocks: normalized })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of blocks through each vertex.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// Number of blocks.
    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// All `k`-subsets of `0..v` in lexicographic order.
pub fn complete_design(v: usize, k: usize) -> Result<BlockDesign> {
    if v < 2 {
        return Err(Error::Domain(format!("v must be at least 2, got {v}")));
    }
    if k > v {
        return Err(Error::Domain(format!("block size {k} exceeds v = {v}")));
    }
    let mut blocks = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, v: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for p in start..v {
            if v - p < k - current.len() {
                break;
            }
            current.push(p);
            rec(p + 1, v, k, current, out);
            current.pop();
        }
    }
    rec(0, v, k, &mut current, &mut blocks);
    BlockDesign::new(v, blocks)
}

/// Two-valued mechanism: `e^ε/(re^ε + b − r)` on incident (vertex, block)
/// pairs and `1/(re^ε + b − r)` elsewhere.
pub fn block_design_mechanism(design: &BlockDesign, eps: f64) -> Result<StochasticMatrix> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Domain(format!("eps must be positive and finite, got {eps}")));
    }
    let (v, b, r) = (design.v(), design.b(), design.r() as f64);
    let e = eps.exp();
    let norm = r * e + (b as f64 - r);
    let mut data = vec![1.0 / norm; v * b];
    for (y, block) in design.blocks().iter().enumerate() {
        for &x in block {
            data[x * b + y] = e / norm;
        }
    }
    // rows sum to one up to rounding; snap them exactly
    for row in data.chunks_mut(b) {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|q| *q /= s);
    }
    StochasticMatrix::from_flat(v, b, data)
}

/// `v`-ary randomized response: the block-design mechanism with singleton blocks.
pub fn randomized_response(v: usize, eps: f64) -> Result<StochasticMatrix> {
    block_design_mechanism(&complete_design(v, 1)?, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::verify_ldp;

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn complete_design_counts() {
        let d = complete_design(4, 2).unwrap();
        assert_eq!((d.b(), d.r(), d.lambda()), (6, 3, 1));
        assert_eq!(d.blocks()[0], vec![0, 1]);
        assert_eq!(d.blocks()[5], vec![2, 3]);

        let d = complete_design(4, 0).unwrap();
        assert_eq!((d.b(), d.r()), (1, 0));
        assert!(d.blocks()[0].is_empty());

        let d = complete_design(3, 3).unwrap();
        assert_eq!((d.b(), d.r(), d.lambda()), (1, 1, 1));
        assert_eq!(d.blocks()[0], vec![0, 1, 2]);

        let d = complete_design(5, 1).unwrap();
        assert_eq!((d.b(), d.r(), d.lambda()), (5, 1, 0));
    }

    #[test]
    fn complete_designs_match_binomials() {
        for v in 2..=7 {
            for k in 0..=v {
                let d = complete_design(v, k).unwrap();
                assert_eq!(d.b(), binom(v, k));
                assert_eq!(d.r(), if k == 0 { 0 } else { binom(v - 1, k - 1) });
                if k >= 2 {
                    assert_eq!(d.lambda(), binom(v - 2, k - 2));
                }
            }
        }
        assert!(matches!(complete_design(3, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn fano_plane_is_accepted() {
        let fano = vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ];
        let d = BlockDesign::new(7, fano).unwrap();
        assert_eq!((d.k(), d.r(), d.lambda(), d.b()), (3, 3, 1, 7));
    }

    #[test]
    fn unbalanced_designs_are_rejected() {
        assert!(BlockDesign::new(4, vec![vec![0, 1], vec![2, 3]]).is_err());
        assert!(BlockDesign::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(BlockDesign::new(3, vec![vec![0, 0]]).is_err());
        assert!(BlockDesign::new(3, vec![vec![0, 5]]).is_err());
        assert!(BlockDesign::new(3, vec![vec![0], vec![0], vec![1], vec![2]]).is_err());
    }

    #[test]
    fn binary_randomized_response() {
        let q = block_design_mechanism(&complete_design(2, 1).unwrap(), 4f64.ln()).unwrap();
        let expected = [[0.8, 0.2], [0.2, 0.8]];
        for x in 0..2 {
            for y in 0..2 {
                assert!((q.get(x, y) - expected[x][y]).abs() < 1e-15);
            }
        }
        assert_eq!(randomized_response(2, 4f64.ln()).unwrap(), q);
    }

    #[test]
    fn full_block_is_single_column() {
        let q = block_design_mechanism(&complete_design(4, 4).unwrap(), 1.0).unwrap();
        assert_eq!(q.cols(), 1);
        assert!(q.to_rows().iter().all(|r| (r[0] - 1.0).abs() < 1e-15));
    }

    #[test]
    fn two_values_with_ratio_exp_eps() {
        let eps = 0.9;
        let q = block_design_mechanism(&complete_design(5, 2).unwrap(), eps).unwrap();
        let mut vals: Vec<f64> = q.to_rows().into_iter().flatten().collect();
        vals.sort_by(f64::total_cmp);
        let (lo, hi) = (vals[0], vals[vals.len() - 1]);
        assert!(vals.iter().all(|&x| (x - lo).abs() < 1e-15 || (x - hi).abs() < 1e-15));
        assert!((hi / lo - eps.exp()).abs() < 1e-12);
        assert!(verify_ldp(&q, eps, 1e-12).passed);
        assert!(!verify_ldp(&q, eps * 0.99, 1e-12).passed);
    }
}
