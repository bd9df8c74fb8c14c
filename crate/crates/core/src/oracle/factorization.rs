//! Free-evolution factorization of the two order branches.
//!
//! Each branch unitary, written in the interaction picture, factors exactly
//! into Schroedinger-picture window unitaries glued by free evolution:
//!
//! `U_direct = e^{+i H0 t_end} U^B_S exp(-i H0 (dtau - T)) U^A_S`
//!
//! with the boundary free-evolution phases absorbed into the closing
//! factor. The direct side is integrated numerically; the factored side is
//! assembled from exact eigendecompositions of the time-independent window
//! Hamiltonians, so agreement is a strong end-to-end consistency check.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::InteractionRegions;

use super::{evolve_exact_with_tol, EvolutionSpec, Picture, TruncatedSystem, Window};

/// Outcome of the branch-factorization comparison.
#[derive(Debug, Clone, Copy)]
pub struct FactorizationReport {
    /// Largest deviation between a directly integrated branch unitary and
    /// its factored form, measured in the Frobenius norm (an upper bound on
    /// the operator norm).
    pub max_deviation: f64,
    /// Whether the free-evolution factors of the two branches are bitwise
    /// identical in the cavity frame.
    pub free_parts_equal: bool,
}

/// Unitary of the window sequence, column by column.
fn evolve_unitary(
    sys: &TruncatedSystem,
    spec: &EvolutionSpec,
    tol: f64,
) -> Result<Array2<Complex64>> {
    let dim = sys.dim();
    let mut u = Array2::zeros((dim, dim));
    for j in 0..dim {
        let mut e = vec![Complex64::ZERO; dim];
        e[j] = Complex64::ONE;
        let col = evolve_exact_with_tol(sys, spec, &e, tol)?;
        for (i, v) in col.into_iter().enumerate() {
            u[[i, j]] = v;
        }
    }
    Ok(u)
}

/// `exp(-i H t)` of a Hermitian matrix via eigendecomposition.
fn expm_herm(h: &Array2<Complex64>, t: f64) -> Result<Array2<Complex64>> {
    let (vals, vecs): (Array1<f64>, Array2<Complex64>) = h
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Domain(format!("eigendecomposition failed: {e}")))?;
    let dim = h.nrows();
    let mut scaled = vecs.clone();
    // columns scaled by the eigenphases, then contracted against V^dag
    for (j, &w) in vals.iter().enumerate() {
        let ph = Complex64::from_polar(1.0, -w * t);
        for i in 0..dim {
            scaled[[i, j]] *= ph;
        }
    }
    let vdag = vecs.t().mapv(|z| z.conj());
    Ok(scaled.dot(&vdag))
}

fn scale_rows(m: &mut Array2<Complex64>, phases: &[Complex64]) {
    for (i, mut row) in m.rows_mut().into_iter().enumerate() {
        for v in row.iter_mut() {
            *v *= phases[i];
        }
    }
}

fn frobenius_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Compares, for both interaction orders, the directly integrated
/// interaction-picture branch unitary with its factored form. The windows
/// must be sequential in the cavity frame (`delta_tau >= duration`).
pub fn picture_factorization_check(
    sys: &TruncatedSystem,
    r: &InteractionRegions,
) -> Result<FactorizationReport> {
    if r.delta_tau < r.duration {
        return Err(Error::Usage(format!(
            "factorization needs sequential windows, got offset {} < duration {}",
            r.delta_tau, r.duration
        )));
    }
    let gap = r.delta_tau - r.duration;
    let t_end = r.delta_tau + r.duration;

    let mut max_deviation: f64 = 0.0;
    let mut free_parts: Vec<Vec<Complex64>> = Vec::new();
    for (early, late) in [(1usize, 0usize), (0, 1)] {
        let spec = if early == 1 {
            EvolutionSpec::right_first(r)
        } else {
            EvolutionSpec::left_first(r)
        };
        let direct = evolve_unitary(sys, &spec, 1e-11)?;

        let window = |d: usize| Window { detector: d, start: 0.0, end: r.duration };
        let h_a = sys.dense_h(&[window(early)], 0.0, Picture::Schroedinger);
        let h_b = sys.dense_h(&[window(late)], 0.0, Picture::Schroedinger);
        let u_a = expm_herm(&h_a, r.duration)?;
        let u_b = expm_herm(&h_b, r.duration)?;
        let v = sys.free_phases(gap);

        let mut inner = u_a.clone();
        scale_rows(&mut inner, &v);
        let mut factored = u_b.dot(&inner);
        let closing: Vec<Complex64> = sys.free_phases(t_end).iter().map(|z| z.conj()).collect();
        scale_rows(&mut factored, &closing);

        max_deviation = max_deviation.max(frobenius_diff(&direct, &factored));
        free_parts.push(v);
    }

    Ok(FactorizationReport {
        max_deviation,
        free_parts_equal: free_parts[0] == free_parts[1],
    })
}

/// Single-operation variant of the switch: the same one-window interaction
/// applied either early or late. Returns the fidelity `|<a|b>|` of the two
/// control-branch states from `|gg>|0>`; free evolution between the slots
/// makes it generically below one even though only one event exists.
pub fn single_operation_fidelity(sys: &TruncatedSystem, r: &InteractionRegions) -> Result<f64> {
    let early = EvolutionSpec::new(
        vec![Window { detector: 0, start: 0.0, end: r.duration }],
        Picture::Dirac,
    )?;
    let late = EvolutionSpec::new(
        vec![Window {
            detector: 0,
            start: r.delta_tau,
            end: r.delta_tau + r.duration,
        }],
        Picture::Dirac,
    )?;
    let psi0 = sys.ground_state();
    let a = evolve_exact_with_tol(sys, &early, &psi0, 1e-12)?;
    let b = evolve_exact_with_tol(sys, &late, &psi0, 1e-12)?;
    let ip: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
    let na = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(ip.norm() / (na * nb))
}
