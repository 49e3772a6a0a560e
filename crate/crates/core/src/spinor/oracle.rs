//! Brute-force particle-partition measure on the full `4^N` product space.
//!
//! Each particle carries an orbital (`+`, `−`) and a spin (`↑`, `↓`); its
//! local index is `2·orbital + spin`. The bosonic states with given
//! `S_z, I_z` are spanned by symmetrized occupation-number vectors. Inside
//! that block `S² + κI²` is diagonalized and the eigenvector for
//! `S(S+1)(1 + κ)` is taken as the state, whose single-particle marginals
//! give ε.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::SpinHalfState;
use crate::hilbert::{Partition, SpaceLayout};
use crate::measure::{pure_state_measure, LogBase};
use crate::{Error, Result, C64};

/// Largest particle number the oracle accepts.
pub const MAX_PARTICLES: usize = 8;

const KAPPA: f64 = std::f64::consts::SQRT_2;
const EIGEN_TOL: f64 = 1e-8;

/// Symmetrized basis vector: the product-space indices it covers and their
/// common amplitude.
struct SymmetricVector {
    support: Vec<usize>,
    amplitude: f64,
}

fn local_spin(k: usize) -> usize {
    k & 1
}

fn local_orbital(k: usize) -> usize {
    k >> 1
}

pub fn brute_force_particle_measure(state: &SpinHalfState) -> Result<f64> {
    let n = state.n();
    if n > MAX_PARTICLES {
        return Err(Error::invalid(format!(
            "oracle supports at most {MAX_PARTICLES} particles, got {n}"
        )));
    }
    let layout = SpaceLayout::uniform(4, n)?;
    let dim = layout.total_dim();

    // group product states of the requested (S_z, I_z) by occupation numbers
    let mut groups: BTreeMap<[usize; 4], Vec<usize>> = BTreeMap::new();
    for idx in 0..dim {
        let digits = layout.digits(idx);
        let mut occ = [0usize; 4];
        for &k in &digits {
            occ[k] += 1;
        }
        let up = digits.iter().filter(|&&k| local_spin(k) == 0).count() as i64;
        let plus = digits.iter().filter(|&&k| local_orbital(k) == 0).count() as i64;
        let (twice_sz, twice_iz) = (2 * up - n as i64, 2 * plus - n as i64);
        if twice_sz == state.twice_sz() && twice_iz == state.twice_iz() {
            groups.entry(occ).or_default().push(idx);
        }
    }
    let basis: Vec<SymmetricVector> = groups
        .into_values()
        .map(|support| SymmetricVector {
            amplitude: 1.0 / (support.len() as f64).sqrt(),
            support,
        })
        .collect();
    if basis.is_empty() {
        return Err(Error::Oracle("no symmetric states with these projections".into()));
    }

    // On symmetric vectors every pair swap has the same matrix elements, so
    // Σ_{i<j} P_ij = C(N,2) P_01.
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    let constant = n as f64 * (4.0 - n as f64) / 4.0;
    let strides = layout.strides();
    let swap_01 = |idx: usize, part: fn(usize) -> usize, mask: usize| -> usize {
        if n < 2 {
            return idx;
        }
        let d0 = idx / strides[0] % 4;
        let d1 = idx / strides[1] % 4;
        let (p0, p1) = (part(d0), part(d1));
        if p0 == p1 {
            return idx;
        }
        let e0 = (d0 & !mask) | (d1 & mask);
        let e1 = (d1 & !mask) | (d0 & mask);
        idx - d0 * strides[0] - d1 * strides[1] + e0 * strides[0] + e1 * strides[1]
    };

    let size = basis.len();
    let mut position = vec![usize::MAX; dim];
    for (b, v) in basis.iter().enumerate() {
        for &i in &v.support {
            position[i] = b;
        }
    }
    let mut h = DMatrix::<f64>::zeros(size, size);
    for (col, v) in basis.iter().enumerate() {
        for (part, mask, weight) in [
            (local_spin as fn(usize) -> usize, 1usize, 1.0),
            (local_orbital as fn(usize) -> usize, 2usize, KAPPA),
        ] {
            let mut image = vec![0.0; size];
            for &i in &v.support {
                let j = swap_01(i, part, mask);
                image[position[j]] += v.amplitude * basis[position[j]].amplitude;
            }
            for (row, x) in image.into_iter().enumerate() {
                h[(row, col)] += weight * pairs * x;
            }
            h[(col, col)] += weight * constant;
        }
    }

    let s = state.s();
    let target = s * (s + 1.0) * (1.0 + KAPPA);
    let eig = SymmetricEigen::new(h);
    let hits: Vec<usize> = (0..size)
        .filter(|&k| (eig.eigenvalues[k] - target).abs() <= EIGEN_TOL * (1.0 + target))
        .collect();
    let k = match hits.as_slice() {
        [] => return Err(Error::Oracle("no joint eigenstate with these quantum numbers".into())),
        [k] => *k,
        _ => {
            return Err(Error::Oracle(format!(
                "joint eigenspace has dimension {}",
                hits.len()
            )))
        }
    };

    let mut psi = DVector::<C64>::zeros(dim);
    for (b, v) in basis.iter().enumerate() {
        let c = eig.eigenvectors[(b, k)] * v.amplitude;
        for &i in &v.support {
            psi[i] = C64::new(c, 0.0);
        }
    }
    let norm = psi.norm();
    psi /= C64::new(norm, 0.0);
    let report = pure_state_measure(&psi, &layout, &Partition::singletons(n), LogBase::Natural)?;
    Ok(report.epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor::particle_measure;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_particle_triplet() {
        let st = SpinHalfState::new(2, 2, 0, 0).unwrap();
        assert_abs_diff_eq!(
            brute_force_particle_measure(&st).unwrap(),
            2.0 * std::f64::consts::LN_2,
            epsilon = 1e-10
        );
    }

    #[test]
    fn fully_polarized_is_product() {
        let st = SpinHalfState::new(4, 4, 4, 4).unwrap();
        assert_abs_diff_eq!(brute_force_particle_measure(&st).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn matches_closed_form_small() {
        for n in 1..=4 {
            for st in SpinHalfState::all(n) {
                let bf = brute_force_particle_measure(&st).unwrap();
                assert_abs_diff_eq!(bf, particle_measure(&st).unwrap(), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn rejects_large_n() {
        let st = SpinHalfState::new(9, 1, 1, 1).unwrap();
        assert!(brute_force_particle_measure(&st).is_err());
    }
}
