//! Central tolerance record.
//!
//! Every numerical threshold used for validation lives here so callers can
//! tighten or loosen them uniformly. The active record is process-wide; the
//! CLI installs one parsed from `PUTLAB_TOLERANCE` at startup.

use std::sync::RwLock;

use crate::error::{Error, Result};

/// Environment variable read by [`Tolerances::from_env`].
pub const ENV_VAR: &str = "PUTLAB_TOLERANCE";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum `|m[i][j] - conj(m[j][i])|` for a matrix to count as Hermitian.
    pub hermitian: f64,
    /// Eigenvalues below `eig_clamp * max|λ|` are treated as exactly zero.
    pub eig_clamp: f64,
    /// Most negative eigenvalue still accepted as positive semidefinite.
    pub psd: f64,
    /// Maximum deviation of a density operator's trace from one.
    pub trace: f64,
    /// Maximum deviation of a pure state's squared norm from one.
    pub norm: f64,
    /// Maximum deviation of a probability vector or stochastic row sum from one.
    pub stochastic: f64,
    /// Width of the final bracket in the golden-section search over `s`.
    pub search: f64,
    /// An overlap functional at or below this value means disjoint supports.
    pub disjoint: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        eig_clamp: 1e-12,
        psd: 1e-9,
        trace: 1e-10,
        norm: 1e-12,
        stochastic: 1e-12,
        search: 1e-10,
        disjoint: 1e-15,
    };

    /// Returns the currently installed record.
    pub fn current() -> Tolerances {
        *ACTIVE.read().unwrap_or_else(|e| e.into_inner())
    }

    /// Replaces the process-wide record.
    pub fn install(tol: Tolerances) {
        *ACTIVE.write().unwrap_or_else(|e| e.into_inner()) = tol;
    }

    /// Parses overrides of the form `psd=1e-8,trace=1e-9` on top of the
    /// defaults. A bare number scales every field by that factor.
    pub fn parse_overrides(overrides: &str) -> Result<Tolerances> {
        let mut tol = Tolerances::DEFAULT;
        let overrides = overrides.trim();
        if overrides.is_empty() {
            return Ok(tol);
        }
        if let Ok(scale) = overrides.parse::<f64>() {
            if !(scale.is_finite() && scale > 0.0) {
                return Err(Error::Domain(format!("tolerance scale must be positive, got {overrides}")));
            }
            for field in tol.fields_mut() {
                *field.1 *= scale;
            }
            return Ok(tol);
        }
        for item in overrides.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Validation(format!("expected key=value, got `{item}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Validation(format!("bad tolerance value in `{item}`")))?;
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Domain(format!("tolerance `{key}` must be non-negative")));
            }
            let slot = tol
                .fields_mut()
                .into_iter()
                .find(|(name, _)| *name == key.trim())
                .ok_or_else(|| Error::Validation(format!("unknown tolerance `{}`", key.trim())))?;
            *slot.1 = value;
        }
        Ok(tol)
    }

    /// Reads [`ENV_VAR`]; absent means defaults.
    pub fn from_env() -> Result<Tolerances> {
        match std::env::var(ENV_VAR) {
            Ok(s) => Tolerances::parse_overrides(&s),
            Err(_) => Ok(Tolerances::DEFAULT),
        }
    }

    fn fields_mut(&mut self) -> [(&'static str, &mut f64); 8] {
        [
            ("hermitian", &mut self.hermitian),
            ("eig_clamp", &mut self.eig_clamp),
            ("psd", &mut self.psd),
            ("trace", &mut self.trace),
            ("norm", &mut self.norm),
            ("stochastic", &mut self.stochastic),
            ("search", &mut self.search),
            ("disjoint", &mut self.disjoint),
        ]
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::DEFAULT
    }
}

static ACTIVE: RwLock<Tolerances> = RwLock::new(Tolerances::DEFAULT);
