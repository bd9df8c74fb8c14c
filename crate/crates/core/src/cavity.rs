//! Discrete Klein-Gordon mode basis of a Dirichlet cavity and
//! single-excitation field states.
//!
//! Natural units (`c = hbar = 1`) throughout. Modes are 1-indexed and the
//! infinite mode sum is truncated at an explicit `n_modes`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dirichlet cavity: length, field mass, and mode truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityConfig {
    pub length: f64,
    pub mass: f64,
    pub n_modes: usize,
}

impl CavityConfig {
    pub fn new(length: f64, mass: f64, n_modes: usize) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::Domain(format!("cavity length must be positive, got {length}")));
        }
        if !(mass >= 0.0) {
            return Err(Error::Domain(format!("field mass must be non-negative, got {mass}")));
        }
        if n_modes == 0 {
            return Err(Error::Domain("mode truncation must be at least 1".into()));
        }
        Ok(Self { length, mass, n_modes })
    }

    /// Massless cavity, the default used in the numerical protocol.
    pub fn massless(length: f64, n_modes: usize) -> Result<Self> {
        Self::new(length, 0.0, n_modes)
    }

    fn check_mode(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.n_modes {
            return Err(Error::Domain(format!(
                "mode index {n} outside 1..={} (modes are 1-indexed, truncated)",
                self.n_modes
            )));
        }
        Ok(())
    }

    /// Frequency of an arbitrary (possibly beyond-truncation) mode index.
    /// Used internally for tail estimates.
    pub(crate) fn frequency_unchecked(&self, n: usize) -> f64 {
        let k = n as f64 * std::f64::consts::PI / self.length;
        (k * k + self.mass * self.mass).sqrt()
    }

    pub(crate) fn mode_function_unchecked(&self, n: usize, x: f64) -> f64 {
        let k = n as f64 * std::f64::consts::PI / self.length;
        (k * x).sin() / (self.frequency_unchecked(n) * self.length).sqrt()
    }
}

/// Dispersion relation `omega_n = sqrt((n pi / L)^2 + m^2)`.
pub fn mode_frequency(cfg: &CavityConfig, n: usize) -> Result<f64> {
    cfg.check_mode(n)?;
    Ok(cfg.frequency_unchecked(n))
}

/// Spatial mode profile `u_n(x) = sin(n pi x / L) / sqrt(omega_n L)`,
/// vanishing at both cavity walls.
pub fn mode_function(cfg: &CavityConfig, n: usize, x: f64) -> Result<f64> {
    cfg.check_mode(n)?;
    if !(0.0..=cfg.length).contains(&x) {
        return Err(Error::Domain(format!(
            "position {x} outside Dirichlet cavity [0, {}]",
            cfg.length
        )));
    }
    Ok(cfg.mode_function_unchecked(n, x))
}

/// Complex amplitude vector over the cavity modes: the coefficient of
/// `a_k^dag |0>` per mode. Stored unnormalized by default; the protocol's
/// first-order states only become unit vectors after an explicit
/// normalization step.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcitationState {
    amplitudes: Vec<Complex64>,
    normalized: bool,
}

impl SingleExcitationState {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes, normalized: false }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Divides by the current norm. Fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Degenerate("cannot normalize the zero vector".into()));
        }
        for c in &mut self.amplitudes {
            *c /= n;
        }
        self.normalized = true;
        Ok(())
    }
}

/// `sum_k conj(a_k) b_k`; conjugate-symmetric in its arguments.
pub fn inner_product(a: &SingleExcitationState, b: &SingleExcitationState) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::Usage(format!(
            "inner product of vectors with lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}
