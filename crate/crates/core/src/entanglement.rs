//! Post-selected two-cavity state in the Gram-Schmidt basis of the two
//! order branches, its concurrence, and the maximal CHSH value.
//!
//! Each wing's field state lives in the span of the two branch vectors at
//! first order, so the joint state reduces exactly to two qubits: writing
//! `|Phi_L> = s |Phi_R> + sqrt(1 - |s|^2) |perp>` per wing, the
//! post-selected state is `|Phi_R>|Phi_R> +/- |Phi_L>|Phi_L>` normalized.

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::perturbation::{overlap, ProtocolParams};

/// Post-selection outcome branch of the joint control measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Normalized 4-amplitude pure state over the ordered product basis
/// `{R, perp} (x) {R, perp}`. The two-wing symmetry forces equal middle
/// amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTwoQubit {
    amplitudes: [Complex64; 4],
    sign: Sign,
}

impl EffectiveTwoQubit {
    /// Builds directly from amplitudes; normalizes. Intended for tests and
    /// property sweeps over the symmetric family.
    pub fn from_amplitudes(amplitudes: [Complex64; 4], sign: Sign) -> Result<Self> {
        let n2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if n2 == 0.0 {
            return Err(Error::Degenerate("zero-norm two-qubit state".into()));
        }
        let n = n2.sqrt();
        let mut a = amplitudes;
        for c in &mut a {
            *c /= n;
        }
        Ok(Self { amplitudes: a, sign })
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }
}

/// Post-selected two-cavity state for branch overlap `s`.
///
/// For the minus outcome with `|s| = 1` the two branches cancel: that
/// outcome has probability zero and the state is undefined.
pub fn post_selected_state(s: Complex64, sign: Sign) -> Result<EffectiveTwoQubit> {
    let abs = s.norm();
    if abs > 1.0 + 1e-9 {
        return Err(Error::Domain(format!("branch overlap magnitude {abs} exceeds 1")));
    }
    let t = (1.0 - (abs * abs).min(1.0)).sqrt();
    let f = sign.factor();
    // |R>|R> +/- (s|R> + t|perp>)^(x2)
    let amplitudes = [
        Complex64::ONE + f * s * s,
        f * s * t,
        f * s * t,
        Complex64::from(f * t * t),
    ];
    if amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() < 1e-18 {
        return Err(Error::Degenerate(
            "post-selection branch has probability zero (identical branches, minus outcome)".into(),
        ));
    }
    EffectiveTwoQubit::from_amplitudes(amplitudes, sign)
}

/// Pure-state concurrence `2 |a d - b c|`: zero for product states, one for
/// maximally entangled ones.
pub fn concurrence(q: &EffectiveTwoQubit) -> f64 {
    let [a, b, c, d] = q.amplitudes;
    (2.0 * (a * d - b * c).norm()).min(1.0)
}

fn pauli() -> [[[Complex64; 2]; 2]; 3] {
    let o = Complex64::ZERO;
    let l = Complex64::ONE;
    let i = Complex64::i();
    [
        [[o, l], [l, o]],
        [[o, -i], [i, o]],
        [[l, o], [o, -l]],
    ]
}

/// Correlation matrix `T_ij = <sigma_i (x) sigma_j>` of the pure state.
pub fn correlation_matrix(q: &EffectiveTwoQubit) -> Array2<f64> {
    let p = pauli();
    let amp = |i: usize, j: usize| q.amplitudes[2 * i + j];
    let mut t = Array2::zeros((3, 3));
    for (i, si) in p.iter().enumerate() {
        for (j, sj) in p.iter().enumerate() {
            let mut val = Complex64::ZERO;
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        for d in 0..2 {
                            val += amp(a, b).conj() * si[a][c] * sj[b][d] * amp(c, d);
                        }
                    }
                }
            }
            t[[i, j]] = val.re;
        }
    }
    t
}

/// Maximal CHSH value by the Horodecki criterion: `2 sqrt(m1 + m2)` with
/// `m1 >= m2` the two largest eigenvalues of `T^t T`. For pure states this
/// equals `2 sqrt(1 + C^2)`.
pub fn chsh_max(q: &EffectiveTwoQubit) -> f64 {
    let t = correlation_matrix(q);
    let m = t.t().dot(&t);
    let (eigs, _) = m.eigh(UPLO::Lower).expect("3x3 symmetric eigenproblem");
    // eigenvalues come back ascending
    let s = eigs[2] + eigs[1];
    (2.0 * s.sqrt()).min(2.0 * 2f64.sqrt())
}

/// Independent check of [`chsh_max`]: maximizes
/// `2 sqrt(|T c|^2 + |T c'|^2)` over orthonormal measurement-plane frames
/// `(c, c')` by a coarse Euler-angle grid followed by simplex refinement.
pub fn chsh_grid_search(q: &EffectiveTwoQubit, grid: usize) -> f64 {
    let t = correlation_matrix(q);
    let value = |angles: &[f64]| -> f64 {
        let (a, b, g) = (angles[0], angles[1], angles[2]);
        let (ca, sa) = (a.cos(), a.sin());
        let (cb, sb) = (b.cos(), b.sin());
        let (cg, sg) = (g.cos(), g.sin());
        // rows of a Z-Y-Z rotation applied to e1, e2
        let c = [ca * cb * cg - sa * sg, sa * cb * cg + ca * sg, -sb * cg];
        let cp = [-ca * cb * sg - sa * cg, -sa * cb * sg + ca * cg, sb * sg];
        let tv = |v: &[f64; 3]| -> f64 {
            (0..3)
                .map(|i| {
                    let r = t[[i, 0]] * v[0] + t[[i, 1]] * v[1] + t[[i, 2]] * v[2];
                    r * r
                })
                .sum()
        };
        2.0 * (tv(&c) + tv(&cp)).sqrt()
    };

    let mut best = (vec![0.0; 3], f64::NEG_INFINITY);
    let step = std::f64::consts::PI / grid as f64;
    for i in 0..grid {
        for j in 0..grid {
            for k in 0..grid {
                let angles = vec![i as f64 * step, j as f64 * step, k as f64 * step];
                let v = value(&angles);
                if v > best.1 {
                    best = (angles, v);
                }
            }
        }
    }
    let refined = crate::optimize::nelder_mead(
        |x| -value(x),
        &best.0,
        &[step, step, step],
        500,
        1e-12,
    );
    (-refined.fmin).max(best.1)
}

/// Entanglement and Bell-violation summary of one protocol point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellReport {
    pub concurrence: f64,
    pub chsh_max: f64,
    pub violates: bool,
}

/// Tolerance above the classical bound before claiming a violation.
pub const CHSH_VIOLATION_TOLERANCE: f64 = 1e-9;

/// Full chain: branch overlap, post-selected state, concurrence, maximal
/// CHSH. For the minus outcome the branch overlap must stay clear of 1.
pub fn protocol_bell_report(p: &ProtocolParams, sign: Sign) -> Result<BellReport> {
    let s = overlap(p)?.overlap;
    if sign == Sign::Minus && s.norm() >= 1.0 - 1e-9 {
        return Err(Error::Degenerate(
            "minus outcome has vanishing probability at unit branch overlap".into(),
        ));
    }
    let q = post_selected_state(s, sign)?;
    let c = concurrence(&q);
    let chsh = chsh_max(&q);
    Ok(BellReport {
        concurrence: c,
        chsh_max: chsh,
        violates: chsh > 2.0 + CHSH_VIOLATION_TOLERANCE,
    })
}
