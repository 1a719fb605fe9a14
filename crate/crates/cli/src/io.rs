//! File formats: mechanism JSON and trade-off curve CSV.

use std::fmt::Write as _;

use num_complex::Complex64;
use putlab::hermitian::HermitianMatrix;
use putlab::mechanisms::{CQMechanism, Decomposition, StochasticMatrix};
use putlab::put::PutCurvePoint;
use putlab::states::DensityOperator;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// On-disk mechanism. Complex entries are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MechanismFile {
    Cq {
        v: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<f64>,
        dim: usize,
        outputs: Vec<Vec<Vec<[f64; 2]>>>,
    },
    Classical {
        v: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eps: Option<f64>,
        cols: usize,
        matrix: Vec<Vec<f64>>,
    },
}

pub enum Mechanism {
    Cq(CQMechanism),
    Classical(StochasticMatrix),
}

impl MechanismFile {
    pub fn from_cq(mech: &CQMechanism, eps: Option<f64>) -> Self {
        let d = mech.dim();
        let outputs = mech
            .outputs()
            .iter()
            .map(|q| (0..d).map(|i| (0..d).map(|j| { let z = q.matrix().get(i, j); [z.re, z.im] }).collect()).collect())
            .collect();
        MechanismFile::Cq { v: mech.v(), eps, dim: d, outputs }
    }

    pub fn from_classical(q: &StochasticMatrix, eps: Option<f64>) -> Self {
        MechanismFile::Classical { v: q.rows(), eps, cols: q.cols(), matrix: q.to_rows() }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))
    }

    pub fn eps(&self) -> Option<f64> {
        match self {
            MechanismFile::Cq { eps, .. } | MechanismFile::Classical { eps, .. } => *eps,
        }
    }

    /// Checks the declared shape and builds the validated mechanism.
    pub fn into_mechanism(self) -> Result<Mechanism, CliError> {
        let bad = |m: String| CliError::Malformed(m);
        match self {
            MechanismFile::Cq { v, dim, outputs, .. } => {
                if outputs.len() != v {
                    return Err(bad(format!("declared v = {v} but found {} outputs", outputs.len())));
                }
                let mut states = Vec::with_capacity(v);
                for (x, rows) in outputs.into_iter().enumerate() {
                    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                        return Err(bad(format!("output {x} is not {dim}x{dim}")));
                    }
                    let rows: Vec<Vec<Complex64>> =
                        rows.into_iter().map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()).collect();
                    let m = HermitianMatrix::from_rows(&rows).map_err(|e| bad(format!("output {x}: {e}")))?;
                    states.push(DensityOperator::new(m).map_err(|e| bad(format!("output {x}: {e}")))?);
                }
                Ok(Mechanism::Cq(CQMechanism::new(states).map_err(|e| bad(e.to_string()))?))
            }
            MechanismFile::Classical { v, cols, matrix, .. } => {
                if matrix.len() != v || matrix.iter().any(|r| r.len() != cols) {
                    return Err(bad(format!("matrix is not {v}x{cols}")));
                }
                Ok(Mechanism::Classical(StochasticMatrix::new(matrix).map_err(|e| bad(e.to_string()))?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub v: usize,
    pub eps: f64,
    /// Weights on the `2^v` hypercube vertices; bit `x` of the index marks row `x` as raised.
    pub theta: Vec<f64>,
    pub post_processing: Vec<Vec<f64>>,
    pub residual: f64,
}

impl DecompositionFile {
    pub fn new(dec: &Decomposition, q: &StochasticMatrix) -> Self {
        DecompositionFile {
            v: dec.extremal.v(),
            eps: dec.extremal.eps(),
            theta: dec.extremal.theta().to_vec(),
            post_processing: dec.post_processing.to_rows(),
            residual: dec.residual(q),
        }
    }
}

pub const CURVE_COLUMNS: [&str; 12] = [
    "v",
    "eta",
    "eps",
    "s_quantum",
    "s_classical_upper",
    "ratio_s",
    "a_quantum",
    "a_classical",
    "ratio_a",
    "k_opt_s",
    "k_opt_a",
    "quantum_provenance",
];

/// One curve row with the column set above; `None` becomes an empty cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub v: usize,
    pub eta: f64,
    pub eps: f64,
    pub s_quantum: f64,
    pub s_classical_upper: f64,
    pub ratio_s: Option<f64>,
    pub a_quantum: Option<f64>,
    pub a_classical: f64,
    pub ratio_a: Option<f64>,
    pub k_opt_s: usize,
    pub k_opt_a: usize,
    pub quantum_provenance: String,
}

impl From<&PutCurvePoint> for CurveRow {
    fn from(p: &PutCurvePoint) -> Self {
        let a = p.a_provenance.map_or("none", |a| a.as_str());
        CurveRow {
            v: p.v,
            eta: p.eta,
            eps: p.eps,
            s_quantum: p.s_quantum,
            s_classical_upper: p.s_classical_upper,
            ratio_s: p.ratio_s,
            a_quantum: p.a_quantum,
            a_classical: p.a_classical,
            ratio_a: p.ratio_a,
            k_opt_s: p.k_opt_s,
            k_opt_a: p.k_opt_a,
            quantum_provenance: format!("s={};a={a}", p.s_provenance.as_str()),
        }
    }
}

/// Decimal rendering with 12 significant digits, switching to exponent form
/// outside `[1e-5, 1e15)`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub fn write_csv<W: std::io::Write>(out: W, rows: &[CurveRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.v.to_string(),
            fmt_sig(r.eta),
            fmt_sig(r.eps),
            fmt_sig(r.s_quantum),
            fmt_sig(r.s_classical_upper),
            opt(r.ratio_s),
            opt(r.a_quantum),
            fmt_sig(r.a_classical),
            opt(r.ratio_a),
            r.k_opt_s.to_string(),
            r.k_opt_a.to_string(),
            r.quantum_provenance.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<CurveRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CURVE_COLUMNS {
        return Err(CliError::Malformed(format!("unexpected header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

/// A plain-text table for `limits`.
pub fn limits_table(rows: &[(usize, f64, f64, Option<(f64, f64)>)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:>3}  {:>10}  {:>10}  {:>9}  {:>10}  {:>10}  {:>9}", "v", "s_limit", "s_numeric", "s_gap", "a_limit", "a_numeric", "a_gap");
    for &(v, lim, num, a) in rows {
        let gap = (num / lim - 1.0).abs();
        let a_cols = match a {
            Some((al, an)) => format!("{al:>10.6}  {an:>10.6}  {:>9.2e}", (an / al - 1.0).abs()),
            None => format!("{:>10}  {:>10}  {:>9}", "-", "-", "-"),
        };
        let marker = if lim <= 1.0 { "  no advantage" } else { "" };
        let _ = writeln!(s, "{v:>3}  {lim:>10.6}  {num:>10.6}  {gap:>9.2e}  {a_cols}{marker}");
    }
    s
}
