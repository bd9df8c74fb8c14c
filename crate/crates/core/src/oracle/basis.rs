//! Truncated joint basis for the brute-force evolution: two two-level
//! detectors tensored with Fock states of the retained cavity modes,
//! truncated at a total excitation number.

use std::collections::HashMap;

use ndarray::Array2;
use num_complex::Complex64;

/// Fock states over `n_modes` modes with total occupation `<= max_total`,
/// enumerated by total excitation, then lexicographically. The vacuum is
/// index 0.
#[derive(Debug, Clone)]
pub struct FockBasis {
    occupations: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    n_modes: usize,
    max_total: usize,
}

impl FockBasis {
    pub fn new(n_modes: usize, max_total: usize) -> Self {
        let mut occupations = Vec::new();
        let mut current = vec![vec![0u8; n_modes]];
        occupations.extend(current.iter().cloned());
        for _ in 0..max_total {
            let mut next: Vec<Vec<u8>> = Vec::new();
            for occ in &current {
                for m in 0..n_modes {
                    let mut raised = occ.clone();
                    raised[m] += 1;
                    next.push(raised);
                }
            }
            next.sort();
            next.dedup();
            occupations.extend(next.iter().cloned());
            current = next;
        }
        let index = occupations
            .iter()
            .enumerate()
            .map(|(i, occ)| (occ.clone(), i))
            .collect();
        Self { occupations, index, n_modes, max_total }
    }

    pub fn len(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupation(&self, i: usize) -> &[u8] {
        &self.occupations[i]
    }

    /// Index of the one-photon state of mode `n` (1-indexed mode).
    pub fn single_photon_index(&self, n: usize) -> usize {
        let mut occ = vec![0u8; self.n_modes];
        occ[n - 1] = 1;
        self.index[&occ]
    }

    /// Triplets of `a_n^dag` (1-indexed mode) on this truncated space;
    /// raising out of the truncation drops the state.
    fn raising_triplets(&self, n: usize) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (col, occ) in self.occupations.iter().enumerate() {
            let total: usize = occ.iter().map(|&x| x as usize).sum();
            if total >= self.max_total {
                continue;
            }
            let mut raised = occ.clone();
            raised[n - 1] += 1;
            let row = self.index[&raised];
            out.push((row, col, (occ[n - 1] as f64 + 1.0).sqrt()));
        }
        out
    }

    /// Triplets of `a_n` (1-indexed mode).
    fn lowering_triplets(&self, n: usize) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (col, occ) in self.occupations.iter().enumerate() {
            if occ[n - 1] == 0 {
                continue;
            }
            let mut lowered = occ.clone();
            lowered[n - 1] -= 1;
            let row = self.index[&lowered];
            out.push((row, col, (occ[n - 1] as f64).sqrt()));
        }
        out
    }
}

/// Real sparse operator in triplet form on the full detector (x) Fock space.
#[derive(Debug, Clone)]
pub struct SparseOp {
    entries: Vec<(u32, u32, f64)>,
}

impl SparseOp {
    /// Accumulates `coef * M |psi>` into `out`.
    pub fn apply_add(&self, psi: &[Complex64], out: &mut [Complex64], coef: Complex64) {
        for &(r, c, v) in &self.entries {
            out[r as usize] += coef * v * psi[c as usize];
        }
    }

    /// Accumulates `conj(coef) * M^dag |psi>` into `out`.
    pub fn apply_add_dagger(&self, psi: &[Complex64], out: &mut [Complex64], coef: Complex64) {
        let cc = coef.conj();
        for &(r, c, v) in &self.entries {
            out[c as usize] += cc * v * psi[r as usize];
        }
    }

    /// Accumulates `coef * M + conj(coef) * M^dag` into a dense matrix.
    pub fn add_to_matrix(&self, m: &mut Array2<Complex64>, coef: Complex64) {
        let cc = coef.conj();
        for &(r, c, v) in &self.entries {
            m[[r as usize, c as usize]] += coef * v;
            m[[c as usize, r as usize]] += cc * v;
        }
    }
}

/// Detector-level raising on detector `d` (0 or 1) combined with a field
/// operator: builds `sigma^+_d (x) F` on the full space from the field
/// triplets. Detector basis index is `d1 * 2 + d2` with 0 = ground.
pub fn detector_raise_times_field(
    d: usize,
    field: &[(usize, usize, f64)],
    n_fock: usize,
) -> SparseOp {
    let mut entries = Vec::with_capacity(2 * field.len());
    // detector sectors: (d1, d2) in {0,1}^2
    for d1 in 0..2usize {
        for d2 in 0..2usize {
            let (from, to) = if d == 0 {
                if d1 != 0 {
                    continue;
                }
                (d2, 2 + d2)
            } else {
                if d2 != 0 {
                    continue;
                }
                (2 * d1, 2 * d1 + 1)
            };
            for &(r, c, v) in field {
                entries.push((
                    (to * n_fock + r) as u32,
                    (from * n_fock + c) as u32,
                    v,
                ));
            }
        }
    }
    SparseOp { entries }
}

/// Coupling operators of one detector to one mode.
#[derive(Debug, Clone)]
pub struct ModeOps {
    /// `sigma^+_d a_n^dag`
    pub raise_raise: SparseOp,
    /// `sigma^+_d a_n`
    pub raise_lower: SparseOp,
    /// spatial mode profile at the detector position
    pub mode_value: f64,
    /// mode frequency
    pub frequency: f64,
}

pub fn build_mode_ops(
    basis: &FockBasis,
    d: usize,
    mode_value: f64,
    frequency: f64,
    n: usize,
) -> ModeOps {
    ModeOps {
        raise_raise: detector_raise_times_field(d, &basis.raising_triplets(n), basis.len()),
        raise_lower: detector_raise_times_field(d, &basis.lowering_triplets(n), basis.len()),
        mode_value,
        frequency,
    }
}
