//! Brute-force validation backend: exact time-ordered evolution of two
//! two-level detectors coupled to a truncated Fock field, Dyson-order
//! bookkeeping, and the free-evolution factorization of the two order
//! branches.
//!
//! Everything here is deliberately independent of the closed-form
//! first-order machinery in [`crate::perturbation`]: states live on the full
//! truncated Hilbert space, the Hamiltonian keeps all counter-rotating
//! terms, and time integration is plain Runge-Kutta with adaptive step
//! halving. Runs are `O(dim^2)` per step, so keep the mode count and
//! excitation cap small.

mod basis;
pub mod checks;

use ndarray::Array2;
use num_complex::Complex64;

use crate::cavity::CavityConfig;
use crate::error::{Error, Result};
use crate::kinematics::InteractionRegions;
use crate::perturbation::ProtocolParams;

use basis::{build_mode_ops, FockBasis, ModeOps};

/// One detector of the truncated system: energy gap and fixed position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    pub energy_gap: f64,
    pub position: f64,
}

/// Joint system of two detectors and the truncated field.
///
/// The state vector is indexed `(d1 * 2 + d2) * n_fock + f` where `d1, d2`
/// are the detector levels (0 = ground) and `f` runs over Fock states with
/// total occupation at most `max_excitations`.
#[derive(Debug, Clone)]
pub struct TruncatedSystem {
    pub cavity: CavityConfig,
    pub detectors: [DetectorSpec; 2],
    pub coupling: f64,
    pub max_excitations: usize,
    fock: FockBasis,
    ops: [Vec<ModeOps>; 2],
    /// free energies per full-space index
    energies: Vec<f64>,
}

impl TruncatedSystem {
    pub fn new(
        cavity: CavityConfig,
        detectors: [DetectorSpec; 2],
        coupling: f64,
        max_excitations: usize,
    ) -> Result<Self> {
        if max_excitations == 0 {
            return Err(Error::Domain("excitation cap must be at least 1".into()));
        }
        if !(coupling >= 0.0) {
            return Err(Error::Domain(format!(
                "coupling must be non-negative, got {coupling}"
            )));
        }
        for (i, d) in detectors.iter().enumerate() {
            if !(d.energy_gap > 0.0) {
                return Err(Error::Domain(format!(
                    "detector {i} energy gap must be positive, got {}",
                    d.energy_gap
                )));
            }
            if !(0.0..=cavity.length).contains(&d.position) {
                return Err(Error::Domain(format!(
                    "detector {i} position {} outside the cavity [0, {}]",
                    d.position, cavity.length
                )));
            }
        }

        let fock = FockBasis::new(cavity.n_modes, max_excitations);
        let ops = [0, 1].map(|d| {
            (1..=cavity.n_modes)
                .map(|n| {
                    build_mode_ops(
                        &fock,
                        d,
                        cavity.mode_function_unchecked(n, detectors[d].position),
                        cavity.frequency_unchecked(n),
                        n,
                    )
                })
                .collect::<Vec<_>>()
        });

        let n_fock = fock.len();
        let mut energies = vec![0.0; 4 * n_fock];
        for det in 0..4 {
            let e_det = (det / 2) as f64 * detectors[0].energy_gap
                + (det % 2) as f64 * detectors[1].energy_gap;
            for f in 0..n_fock {
                let e_field: f64 = fock
                    .occupation(f)
                    .iter()
                    .enumerate()
                    .map(|(m, &occ)| occ as f64 * cavity.frequency_unchecked(m + 1))
                    .sum();
                energies[det * n_fock + f] = e_det + e_field;
            }
        }

        Ok(Self { cavity, detectors, coupling, max_excitations, fock, ops, energies })
    }

    /// Builds the oracle system matching one wing of the protocol: both
    /// detectors share the protocol's energy gap, positions are `x1`, `x2`.
    pub fn from_protocol(p: &ProtocolParams, max_excitations: usize) -> Result<Self> {
        Self::new(
            p.cavity,
            [
                DetectorSpec { energy_gap: p.energy_gap, position: p.regions.x1 },
                DetectorSpec { energy_gap: p.energy_gap, position: p.regions.x2 },
            ],
            p.coupling,
            max_excitations,
        )
    }

    pub fn dim(&self) -> usize {
        4 * self.fock.len()
    }

    pub fn n_fock(&self) -> usize {
        self.fock.len()
    }

    /// `|gg>|0>`, the protocol's initial state.
    pub fn ground_state(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::ZERO; self.dim()];
        v[0] = Complex64::ONE;
        v
    }

    /// Field-sector slice of a full state for fixed detector levels
    /// (0 = ground).
    pub fn detector_sector<'a>(
        &self,
        psi: &'a [Complex64],
        d1: usize,
        d2: usize,
    ) -> &'a [Complex64] {
        let n = self.fock.len();
        let s = (d1 * 2 + d2) * n;
        &psi[s..s + n]
    }

    /// Single-photon amplitudes per mode of a field-sector slice.
    pub fn single_photon_amplitudes(&self, sector: &[Complex64]) -> Vec<Complex64> {
        (1..=self.cavity.n_modes)
            .map(|n| sector[self.fock.single_photon_index(n)])
            .collect()
    }

    /// The field vector the protocol conditions on: sum of the one-photon
    /// amplitudes of the `|ge>` and `|eg>` detector sectors, the
    /// brute-force counterpart of the closed-form branch amplitudes.
    pub fn conditioned_phi(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let ge = self.single_photon_amplitudes(self.detector_sector(psi, 0, 1));
        let eg = self.single_photon_amplitudes(self.detector_sector(psi, 1, 0));
        ge.iter().zip(&eg).map(|(a, b)| a + b).collect()
    }

    /// Applies the (picture-dependent) Hamiltonian of the active windows at
    /// time `t` to `psi`, accumulating into `out` (which is zeroed here).
    fn apply_h(
        &self,
        active: &[Window],
        t: f64,
        picture: Picture,
        psi: &[Complex64],
        out: &mut [Complex64],
    ) {
        out.fill(Complex64::ZERO);
        if picture == Picture::Schroedinger {
            for (o, (&e, &p)) in out.iter_mut().zip(self.energies.iter().zip(psi)) {
                *o += e * p;
            }
        }
        for w in active {
            let gap = self.detectors[w.detector].energy_gap;
            for m in &self.ops[w.detector] {
                let lu = self.coupling * m.mode_value;
                let (c_rr, c_rl) = match picture {
                    Picture::Dirac => (
                        lu * Complex64::from_polar(1.0, (gap + m.frequency) * t),
                        lu * Complex64::from_polar(1.0, (gap - m.frequency) * t),
                    ),
                    Picture::Schroedinger => (lu.into(), lu.into()),
                };
                m.raise_raise.apply_add(psi, out, c_rr);
                m.raise_raise.apply_add_dagger(psi, out, c_rr);
                m.raise_lower.apply_add(psi, out, c_rl);
                m.raise_lower.apply_add_dagger(psi, out, c_rl);
            }
        }
    }

    /// Dense Hamiltonian of the active windows at time `t`.
    fn dense_h(&self, active: &[Window], t: f64, picture: Picture) -> Array2<Complex64> {
        let dim = self.dim();
        let mut h = Array2::zeros((dim, dim));
        if picture == Picture::Schroedinger {
            for (i, &e) in self.energies.iter().enumerate() {
                h[[i, i]] += Complex64::from(e);
            }
        }
        for w in active {
            let gap = self.detectors[w.detector].energy_gap;
            for m in &self.ops[w.detector] {
                let lu = self.coupling * m.mode_value;
                let (c_rr, c_rl) = match picture {
                    Picture::Dirac => (
                        lu * Complex64::from_polar(1.0, (gap + m.frequency) * t),
                        lu * Complex64::from_polar(1.0, (gap - m.frequency) * t),
                    ),
                    Picture::Schroedinger => (lu.into(), lu.into()),
                };
                m.raise_raise.add_to_matrix(&mut h, c_rr);
                m.raise_lower.add_to_matrix(&mut h, c_rl);
            }
        }
        h
    }

    /// Diagonal free-evolution phases `e^{-i H_0 t}` as a vector.
    fn free_phases(&self, t: f64) -> Vec<Complex64> {
        self.energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * t))
            .collect()
    }
}

/// Which picture the time-dependent Hamiltonian is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    /// Interaction picture: free phases absorbed into the coupling
    /// operators; the Hamiltonian vanishes outside the windows.
    Dirac,
    /// Plain Schroedinger picture: free part always on, couplings without
    /// explicit phases.
    Schroedinger,
}

/// One sharp interaction window of one detector, in cavity-frame time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub detector: usize,
    pub start: f64,
    pub end: f64,
}

/// Ordered window sequence plus the picture it is integrated in.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSpec {
    windows: Vec<Window>,
    pub picture: Picture,
}

impl EvolutionSpec {
    /// Windows must be sorted by start time, have non-negative length
    /// (zero-length windows are allowed and contribute nothing), stay within
    /// a detector index of 0 or 1, and not overlap within one detector.
    pub fn new(windows: Vec<Window>, picture: Picture) -> Result<Self> {
        for w in &windows {
            if w.detector > 1 {
                return Err(Error::Usage(format!(
                    "detector index {} out of range (0 or 1)",
                    w.detector
                )));
            }
            if !(w.end >= w.start) || !w.start.is_finite() || !w.end.is_finite() {
                return Err(Error::Usage(format!(
                    "malformed window ({}, {})",
                    w.start, w.end
                )));
            }
            if w.start < 0.0 {
                return Err(Error::Usage(format!(
                    "window start {} before t = 0",
                    w.start
                )));
            }
        }
        for pair in windows.windows(2) {
            if pair[1].start < pair[0].start {
                return Err(Error::Usage("windows must be sorted by start time".into()));
            }
        }
        for d in 0..2 {
            let mut last_end = f64::NEG_INFINITY;
            for w in windows.iter().filter(|w| w.detector == d) {
                if w.start < last_end {
                    return Err(Error::Usage(format!(
                        "windows of detector {d} overlap"
                    )));
                }
                last_end = w.end;
            }
        }
        Ok(Self { windows, picture })
    }

    /// Detector at `x2` first, then the detector at `x1`.
    pub fn right_first(r: &InteractionRegions) -> Self {
        Self::two_window(r, 1, 0)
    }

    /// Detector at `x1` first, then the detector at `x2`.
    pub fn left_first(r: &InteractionRegions) -> Self {
        Self::two_window(r, 0, 1)
    }

    fn two_window(r: &InteractionRegions, early: usize, late: usize) -> Self {
        let mut windows = vec![
            Window { detector: early, start: 0.0, end: r.duration },
            Window {
                detector: late,
                start: r.delta_tau,
                end: r.delta_tau + r.duration,
            },
        ];
        windows.sort_by(|a, b| a.start.total_cmp(&b.start));
        // regions guarantee non-overlap (or exact coincidence at dtau = 0)
        Self { windows, picture: Picture::Dirac }
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    /// Piecewise-constant window structure: breakpoints and the windows
    /// active between consecutive ones.
    fn segments(&self) -> Vec<(f64, f64, Vec<Window>)> {
        let mut cuts: Vec<f64> = vec![0.0];
        for w in &self.windows {
            cuts.push(w.start);
            cuts.push(w.end);
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .filter(|c| c[1] > c[0])
            .map(|c| {
                let mid = 0.5 * (c[0] + c[1]);
                let active = self
                    .windows
                    .iter()
                    .filter(|w| w.start <= mid && mid < w.end)
                    .copied()
                    .collect();
                (c[0], c[1], active)
            })
            .collect()
    }
}

/// Fourth-order Runge-Kutta sweep over the window segments at a fixed step
/// density. Empty Dirac segments are skipped exactly; empty Schroedinger
/// segments apply the exact free phases.
fn sweep(
    sys: &TruncatedSystem,
    spec: &EvolutionSpec,
    initial: &[Complex64],
    steps_per_unit: f64,
) -> Vec<Complex64> {
    let dim = sys.dim();
    let mut psi = initial.to_vec();
    let mut k1 = vec![Complex64::ZERO; dim];
    let mut k2 = vec![Complex64::ZERO; dim];
    let mut k3 = vec![Complex64::ZERO; dim];
    let mut k4 = vec![Complex64::ZERO; dim];
    let mut tmp = vec![Complex64::ZERO; dim];

    for (a, b, active) in spec.segments() {
        if active.is_empty() {
            match spec.picture {
                Picture::Dirac => {}
                Picture::Schroedinger => {
                    for (p, f) in psi.iter_mut().zip(sys.free_phases(b - a)) {
                        *p *= f;
                    }
                }
            }
            continue;
        }
        let n = ((b - a) * steps_per_unit).ceil().max(8.0) as usize;
        let h = (b - a) / n as f64;
        let mi = -Complex64::i();
        for i in 0..n {
            let t = a + i as f64 * h;
            sys.apply_h(&active, t, spec.picture, &psi, &mut k1);
            for ((t_, &p), &k) in tmp.iter_mut().zip(&psi).zip(&k1) {
                *t_ = p + mi * k * (h / 2.0);
            }
            sys.apply_h(&active, t + h / 2.0, spec.picture, &tmp, &mut k2);
            for ((t_, &p), &k) in tmp.iter_mut().zip(&psi).zip(&k2) {
                *t_ = p + mi * k * (h / 2.0);
            }
            sys.apply_h(&active, t + h / 2.0, spec.picture, &tmp, &mut k3);
            for ((t_, &p), &k) in tmp.iter_mut().zip(&psi).zip(&k3) {
                *t_ = p + mi * k * h;
            }
            sys.apply_h(&active, t + h, spec.picture, &tmp, &mut k4);
            for i in 0..dim {
                psi[i] += mi * (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    psi
}

const BASE_STEPS_PER_UNIT: f64 = 64.0;
const MAX_REFINEMENTS: usize = 12;

fn refine<G>(mut run: G, tol: f64, context: &str) -> Result<Vec<Complex64>>
where
    G: FnMut(f64) -> Vec<Complex64>,
{
    let mut spu = BASE_STEPS_PER_UNIT;
    let mut prev = run(spu);
    let mut achieved = f64::INFINITY;
    for _ in 0..MAX_REFINEMENTS {
        spu *= 2.0;
        let cur = run(spu);
        achieved = prev
            .iter()
            .zip(&cur)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if achieved < tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Convergence {
        context: context.into(),
        achieved,
        requested: tol,
    })
}

/// Default step-halving tolerance of the evolution routines.
pub const DEFAULT_EVOLVE_TOL: f64 = 1e-10;

/// Exact (to quadrature tolerance) time-ordered evolution of `initial`
/// through the window sequence. The step density is doubled until two
/// consecutive sweeps agree within `tol` in the 2-norm.
pub fn evolve_exact_with_tol(
    sys: &TruncatedSystem,
    spec: &EvolutionSpec,
    initial: &[Complex64],
    tol: f64,
) -> Result<Vec<Complex64>> {
    if initial.len() != sys.dim() {
        return Err(Error::Usage(format!(
            "state length {} does not match system dimension {}",
            initial.len(),
            sys.dim()
        )));
    }
    refine(|spu| sweep(sys, spec, initial, spu), tol, "time-ordered evolution")
}

pub fn evolve_exact(
    sys: &TruncatedSystem,
    spec: &EvolutionSpec,
    initial: &[Complex64],
) -> Result<Vec<Complex64>> {
    evolve_exact_with_tol(sys, spec, initial, DEFAULT_EVOLVE_TOL)
}

/// One sweep of the joint Dyson system: `psi1' = -i H psi0`,
/// `psi2' = -i H psi1` with `psi0` frozen (interaction picture only).
fn dyson_sweep(
    sys: &TruncatedSystem,
    spec: &EvolutionSpec,
    psi0: &[Complex64],
    steps_per_unit: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let dim = sys.dim();
    let mut y1 = vec![Complex64::ZERO; dim];
    let mut y2 = vec![Complex64::ZERO; dim];
    let mi = -Complex64::i();

    let mut h0 = vec![Complex64::ZERO; dim];
    let mut scratch = vec![Complex64::ZERO; dim];

    // derivative of (y1, y2) at time t given the frozen psi0
    let stage =
        |active: &[Window], t: f64, y1: &[Complex64], d1: &mut Vec<Complex64>, d2: &mut Vec<Complex64>, h0: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>| {
            sys.apply_h(active, t, Picture::Dirac, psi0, h0);
            sys.apply_h(active, t, Picture::Dirac, y1, scratch);
            d1.clear();
            d1.extend(h0.iter().map(|&v| mi * v));
            d2.clear();
            d2.extend(scratch.iter().map(|&v| mi * v));
        };

    for (a, b, active) in spec.segments() {
        if active.is_empty() {
            continue;
        }
        let n = ((b - a) * steps_per_unit).ceil().max(8.0) as usize;
        let h = (b - a) / n as f64;
        let mut k1a = Vec::new();
        let mut k1b = Vec::new();
        let mut k2a = Vec::new();
        let mut k2b = Vec::new();
        let mut k3a = Vec::new();
        let mut k3b = Vec::new();
        let mut k4a = Vec::new();
        let mut k4b = Vec::new();
        let mut t1 = vec![Complex64::ZERO; dim];
        for i in 0..n {
            let t = a + i as f64 * h;
            stage(&active, t, &y1, &mut k1a, &mut k1b, &mut h0, &mut scratch);
            for j in 0..dim {
                t1[j] = y1[j] + k1a[j] * (h / 2.0);
            }
            stage(&active, t + h / 2.0, &t1, &mut k2a, &mut k2b, &mut h0, &mut scratch);
            for j in 0..dim {
                t1[j] = y1[j] + k2a[j] * (h / 2.0);
            }
            stage(&active, t + h / 2.0, &t1, &mut k3a, &mut k3b, &mut h0, &mut scratch);
            for j in 0..dim {
                t1[j] = y1[j] + k3a[j] * h;
            }
            stage(&active, t + h, &t1, &mut k4a, &mut k4b, &mut h0, &mut scratch);
            for j in 0..dim {
                y1[j] += (h / 6.0) * (k1a[j] + 2.0 * k2a[j] + 2.0 * k3a[j] + k4a[j]);
                y2[j] += (h / 6.0) * (k1b[j] + 2.0 * k2b[j] + 2.0 * k3b[j] + k4b[j]);
            }
        }
    }
    (y1, y2)
}

/// The order-`lambda^order` Dyson contribution to the evolved state, for
/// `order` 1 or 2. Defined in the interaction picture; passing a
/// Schroedinger-picture spec is a usage error.
pub fn dyson_term(
    sys: &TruncatedSystem,
    spec: &EvolutionSpec,
    order: usize,
    initial: &[Complex64],
) -> Result<Vec<Complex64>> {
    dyson_term_with_tol(sys, spec, order, initial, DEFAULT_EVOLVE_TOL)
}

/// [`dyson_term`] with an explicit step-halving tolerance; the tight
/// lambda-scaling checks need quadrature error well below `lambda^2`.
pub fn dyson_term_with_tol(
    sys: &TruncatedSystem,
    spec: &EvolutionSpec,
    order: usize,
    initial: &[Complex64],
    tol: f64,
) -> Result<Vec<Complex64>> {
    if !(order == 1 || order == 2) {
        return Err(Error::Usage(format!("Dyson order must be 1 or 2, got {order}")));
    }
    if spec.picture != Picture::Dirac {
        return Err(Error::Usage(
            "Dyson-order bookkeeping is defined in the interaction picture".into(),
        ));
    }
    if initial.len() != sys.dim() {
        return Err(Error::Usage(format!(
            "state length {} does not match system dimension {}",
            initial.len(),
            sys.dim()
        )));
    }
    refine(
        |spu| {
            let (y1, y2) = dyson_sweep(sys, spec, initial, spu);
            if order == 1 {
                y1
            } else {
                y2
            }
        },
        tol,
        "Dyson-term quadrature",
    )
}

mod factorization;

pub use factorization::{
    picture_factorization_check, single_operation_fidelity, FactorizationReport,
};
