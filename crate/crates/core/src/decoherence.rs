//! Bipartite dephasing in the eigenbasis of the full Hamiltonian.
//!
//! States live on `H_A ⊗ H_B` with basis `|nα⟩` (A index first) and
//! `H|nα⟩ = E_{nα}|nα⟩`. Matrix elements are written
//! `ρ_{mn}^{αβ} = ⟨mα|ρ|nβ⟩`, the marginals are `ρ_{mn} = Σ_α ρ_{mn}^{αα}` and
//! `ρ^{αβ} = Σ_n ρ_{nn}^{αβ}`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::hilbert::{hs_norm, partial_trace, DenseOperator, DensityOperator, SpaceLayout};
use crate::measure::LogBase;
use crate::{Error, Result, C64};

#[derive(Debug, Clone)]
pub struct BipartiteSpec {
    dim_a: usize,
    dim_b: usize,
    energies: DMatrix<f64>,
    rho0: DensityOperator,
}

impl BipartiteSpec {
    /// `energies[(n, α)] = E_{nα}`; `rho0` must live on `[d_A, d_B]`.
    pub fn new(energies: DMatrix<f64>, rho0: DensityOperator) -> Result<Self> {
        let (dim_a, dim_b) = energies.shape();
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::invalid("energy array must be non-empty"));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::invalid("energies must be finite"));
        }
        if rho0.layout().dims() != [dim_a, dim_b] {
            return Err(Error::invalid(format!(
                "rho0 layout {} does not match energies of shape {dim_a}x{dim_b}",
                rho0.layout()
            )));
        }
        Ok(BipartiteSpec {
            dim_a,
            dim_b,
            energies,
            rho0,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn energies(&self) -> &DMatrix<f64> {
        &self.energies
    }

    pub fn rho0(&self) -> &DensityOperator {
        &self.rho0
    }

    fn energy(&self, flat: usize) -> f64 {
        self.energies[(flat / self.dim_b, flat % self.dim_b)]
    }

    fn layout(&self) -> &SpaceLayout {
        self.rho0.layout()
    }
}

/// Lorentzian widths `Γ_{mn}` for factor A and `Γ^{αβ}` for factor B.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzSpec {
    gamma_a: DMatrix<f64>,
    gamma_b: DMatrix<f64>,
}

impl LorentzSpec {
    pub fn new(gamma_a: DMatrix<f64>, gamma_b: DMatrix<f64>) -> Result<Self> {
        for (name, g) in [("A", &gamma_a), ("B", &gamma_b)] {
            if !g.is_square() {
                return Err(Error::invalid(format!("Γ_{name} must be square")));
            }
            if g.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::invalid(format!("Γ_{name} entries must be nonnegative")));
            }
            let n = g.nrows();
            for i in 0..n {
                if g[(i, i)] != 0.0 {
                    return Err(Error::invalid(format!("Γ_{name} must have a zero diagonal")));
                }
                for j in 0..i {
                    if g[(i, j)] != g[(j, i)] {
                        return Err(Error::invalid(format!("Γ_{name} must be symmetric")));
                    }
                }
            }
        }
        Ok(LorentzSpec { gamma_a, gamma_b })
    }

    /// Every off-diagonal width equal to `gamma`.
    pub fn uniform(dim_a: usize, dim_b: usize, gamma: f64) -> Result<Self> {
        let off = |d: usize| DMatrix::from_fn(d, d, |i, j| if i == j { 0.0 } else { gamma });
        Self::new(off(dim_a), off(dim_b))
    }

    pub fn gamma_a(&self) -> &DMatrix<f64> {
        &self.gamma_a
    }

    pub fn gamma_b(&self) -> &DMatrix<f64> {
        &self.gamma_b
    }

    fn check_dims(&self, spec: &BipartiteSpec) -> Result<()> {
        if self.gamma_a.nrows() != spec.dim_a || self.gamma_b.nrows() != spec.dim_b {
            return Err(Error::invalid(format!(
                "Γ shapes {}/{} do not match dims {}/{}",
                self.gamma_a.nrows(),
                self.gamma_b.nrows(),
                spec.dim_a,
                spec.dim_b
            )));
        }
        Ok(())
    }
}

/// `D_{mn}(t) = exp(−Γ_{mn} t)`.
pub fn decoherence_factor_lorentz(gamma: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("time must be nonnegative, got {t}")));
    }
    Ok(gamma.map(|g| if g == 0.0 { 1.0 } else { (-g * t).exp() }))
}

/// Exact unitary evolution: `ρ_{mn}^{αβ}(t) = ρ_{mn}^{αβ}(0) e^{−i(E_{mα} − E_{nβ})t}`.
pub fn evolve(spec: &BipartiteSpec, t: f64) -> DensityOperator {
    let m0 = spec.rho0.matrix();
    let d = m0.nrows();
    let e: Vec<f64> = (0..d).map(|k| spec.energy(k)).collect();
    // ω = 0 elements stay bit-identical
    let m = DMatrix::from_fn(d, d, |r, c| {
        let omega = e[r] - e[c];
        if omega == 0.0 {
            m0[(r, c)]
        } else {
            m0[(r, c)] * C64::from_polar(1.0, -omega * t)
        }
    });
    let op = DenseOperator::new(spec.layout().clone(), m).expect("same shape as rho0");
    DensityOperator::trusted(op)
}

/// `ρ(0) ∘ (D_A ⊗ D_B)`: the initial state with Lorentz-damped coherences.
///
/// This is a phenomenological model of large-system dephasing. Its marginals
/// carry the damped off-diagonal sums while the diagonal is untouched.
pub fn lorentz_evolve(spec: &BipartiteSpec, l: &LorentzSpec, t: f64) -> Result<DenseOperator> {
    l.check_dims(spec)?;
    let da = decoherence_factor_lorentz(&l.gamma_a, t)?;
    let db = decoherence_factor_lorentz(&l.gamma_b, t)?;
    let m0 = spec.rho0.matrix();
    let b = spec.dim_b;
    let m = DMatrix::from_fn(m0.nrows(), m0.ncols(), |r, c| {
        m0[(r, c)] * da[(r / b, c / b)] * db[(r % b, c % b)]
    });
    DenseOperator::new(spec.layout().clone(), m)
}

/// Marginal matrices `ρ_{mn}(0)` and `ρ^{αβ}(0)` summed from matrix elements.
fn marginal_elements(spec: &BipartiteSpec) -> (DMatrix<C64>, DMatrix<C64>) {
    let (a, b) = (spec.dim_a, spec.dim_b);
    let m = spec.rho0.matrix();
    let rho_a = DMatrix::from_fn(a, a, |i, j| (0..b).map(|al| m[(i * b + al, j * b + al)]).sum());
    let rho_b = DMatrix::from_fn(b, b, |al, be| (0..a).map(|n| m[(n * b + al, n * b + be)]).sum());
    (rho_a, rho_b)
}

/// `||ρ_A(t)||²` and `||ρ_B(t)||²` as diagonal parts plus damped
/// off-diagonal parts.
pub fn marginal_norms_lorentz(spec: &BipartiteSpec, l: &LorentzSpec, t: f64) -> Result<(f64, f64)> {
    l.check_dims(spec)?;
    let da = decoherence_factor_lorentz(&l.gamma_a, t)?;
    let db = decoherence_factor_lorentz(&l.gamma_b, t)?;
    let (rho_a, rho_b) = marginal_elements(spec);
    let split = |rho: &DMatrix<C64>, damp: &DMatrix<f64>| {
        let mut sum = 0.0;
        for j in 0..rho.ncols() {
            for i in 0..rho.nrows() {
                let w = if i == j { 1.0 } else { damp[(i, j)] };
                sum += rho[(i, j)].norm_sqr() * w * w;
            }
        }
        sum
    };
    Ok((split(&rho_a, &da), split(&rho_b, &db)))
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvolutionMode {
    Exact,
    Lorentz(LorentzSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub epsilon: f64,
}

/// ε(ρ(t)) at each time. In both modes the numerator is `||ρ(0)||`, which
/// unitary evolution conserves.
pub fn measure_trajectory(
    spec: &BipartiteSpec,
    times: &[f64],
    mode: &EvolutionMode,
    base: LogBase,
) -> Result<Vec<TrajectoryPoint>> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("times must be finite"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("times must be sorted ascending"));
    }
    if let EvolutionMode::Lorentz(l) = mode {
        l.check_dims(spec)?;
        if times.first().is_some_and(|&t| t < 0.0) {
            return Err(Error::invalid("Lorentz damping needs nonnegative times"));
        }
    }
    let ln_num = hs_norm(&spec.rho0).ln();
    times
        .par_iter()
        .map(|&t| {
            let rho_t: DenseOperator = match mode {
                EvolutionMode::Exact => evolve(spec, t).into_operator(),
                EvolutionMode::Lorentz(l) => lorentz_evolve(spec, l, t)?,
            };
            let na = hs_norm(&partial_trace(&rho_t, &[0])?);
            let nb = hs_norm(&partial_trace(&rho_t, &[1])?);
            Ok(TrajectoryPoint {
                t,
                epsilon: base.from_nats(ln_num - na.ln() - nb.ln()),
            })
        })
        .collect()
}

/// Initial and fully dephased values of ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitMeasures {
    pub eps0: f64,
    pub eps_inf: f64,
}

/// ε at `t = 0` and in the `t → ∞` limit where the marginal coherences
/// vanish, both from matrix elements of `ρ(0)`.
pub fn limit_measures(spec: &BipartiteSpec, base: LogBase) -> LimitMeasures {
    let (rho_a, rho_b) = marginal_elements(spec);
    let full = spec.rho0.matrix().norm_squared();
    let all = |m: &DMatrix<C64>| m.norm_squared();
    let diag = |m: &DMatrix<C64>| (0..m.nrows()).map(|k| m[(k, k)].norm_sqr()).sum::<f64>();
    let eps = |a: f64, b: f64| base.from_nats(0.5 * (full.ln() - a.ln() - b.ln()));
    LimitMeasures {
        eps0: eps(all(&rho_a), all(&rho_b)),
        eps_inf: eps(diag(&rho_a), diag(&rho_b)),
    }
}
