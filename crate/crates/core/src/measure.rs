//! The entanglement-production measure and the quantities built on it.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::hilbert::{
    self, hermitian_eigen, hs_norm, partial_trace, spectral_function, split_indices,
    tensor_product, DenseOperator, DensityOperator, Partition, SpaceLayout,
};
use crate::{tol, Error, Result, C64};

/// Logarithm base for every reported ε and entropy. Natural by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "e")]
    Natural,
    #[serde(rename = "2")]
    Base2,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        self.from_nats(x.ln())
    }

    /// Converts a value measured in nats to this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            LogBase::Base2 => nats / std::f64::consts::LN_2,
        }
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "natural" => Ok(LogBase::Natural),
            "2" | "base2" => Ok(LogBase::Base2),
            _ => Err(Error::invalid(format!("unknown log base {s:?}, expected e or 2"))),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Natural => "e",
            LogBase::Base2 => "2",
        })
    }
}

/// ε together with the norms it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub epsilon: f64,
    /// `||A||`
    pub norm_numerator: f64,
    /// `||A_⊗||`
    pub norm_denominator: f64,
    /// `||A_i||`, one per partition block.
    pub per_block_norms: Vec<f64>,
    pub log_base: LogBase,
}

impl MeasureReport {
    /// Builds a report from logarithms so that ε never passes through a
    /// ratio of possibly tiny or huge norms.
    fn from_logs(
        ln_numerator: f64,
        ln_blocks: &[f64],
        ln_abs_trace: f64,
        base: LogBase,
    ) -> MeasureReport {
        let n = ln_blocks.len() as f64;
        let ln_denominator = ln_blocks.iter().sum::<f64>() - (n - 1.0) * ln_abs_trace;
        MeasureReport {
            epsilon: base.from_nats(ln_numerator - ln_denominator),
            norm_numerator: ln_numerator.exp(),
            norm_denominator: ln_denominator.exp(),
            per_block_norms: ln_blocks.iter().map(|x| x.exp()).collect(),
            log_base: base,
        }
    }
}

fn checked_trace(a: &DenseOperator) -> Result<C64> {
    let tr = a.trace();
    if tr.norm() <= tol::TRACE_ZERO {
        return Err(Error::ZeroTrace(tr.norm()));
    }
    Ok(tr)
}

/// Block marginals `A_i = Tr_{others} A`, each on its block's factors in
/// ascending order.
pub fn block_marginals(a: &DenseOperator, p: &Partition) -> Result<Vec<DenseOperator>> {
    p.check_layout(a.layout())?;
    p.blocks().iter().map(|b| partial_trace(a, b)).collect()
}

/// `A_⊗ = (A_1 ⊗ … ⊗ A_N) / (Tr A)^(N−1)` on the layout of `a`.
pub fn nonentangling_counterpart(a: &DenseOperator, p: &Partition) -> Result<DenseOperator> {
    let tr = checked_trace(a)?;
    let marginals = block_marginals(a, p)?;
    let mut iter = marginals.iter();
    let first = iter.next().expect("partition has at least one block").clone();
    let product = iter.fold(first, |acc, m| tensor_product(&acc, m));

    // factor k of `product` is original factor flat[k]; invert that map
    let flat: Vec<usize> = p.blocks().iter().flatten().copied().collect();
    let mut order = vec![0; flat.len()];
    for (k, &f) in flat.iter().enumerate() {
        order[f] = k;
    }
    let restored = product.permute_factors(&order)?;
    let exponent = (p.block_count() - 1) as i32;
    Ok(restored.scaled(C64::new(1.0, 0.0) / tr.powi(exponent)))
}

/// `ε(A) = log ||A|| / ||A_⊗||` for any trace-class operator.
///
/// Hermiticity is not required. The result is never clamped, so round-off
/// can leave tiny negative values visible.
pub fn entanglement_production(
    a: &DenseOperator,
    p: &Partition,
    base: LogBase,
) -> Result<MeasureReport> {
    let tr = checked_trace(a)?;
    let marginals = block_marginals(a, p)?;
    let ln_blocks: Vec<f64> = marginals.iter().map(|m| hs_norm(m).ln()).collect();
    Ok(MeasureReport::from_logs(
        hs_norm(a).ln(),
        &ln_blocks,
        tr.norm().ln(),
        base,
    ))
}

/// ε of `|ψ⟩⟨ψ|` from Gram matrices of the reshaped amplitude vector; the
/// `d×d` projector is never formed.
pub fn pure_state_measure(
    psi: &DVector<C64>,
    layout: &SpaceLayout,
    p: &Partition,
    base: LogBase,
) -> Result<MeasureReport> {
    if psi.len() != layout.total_dim() {
        return Err(Error::invalid(format!(
            "vector has {} entries, layout {layout} needs {}",
            psi.len(),
            layout.total_dim()
        )));
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > tol::NORMALIZATION {
        return Err(Error::invalid(format!("state vector norm {norm} is not 1")));
    }
    p.check_layout(layout)?;
    let ln_blocks = p
        .blocks()
        .iter()
        .map(|block| Ok(0.5 * marginal_purity(psi, layout, block)?.ln()))
        .collect::<Result<Vec<_>>>()?;
    // ||ρ|| = Tr ρ = ||ψ||²
    let ln_norm = 2.0 * norm.ln();
    Ok(MeasureReport::from_logs(ln_norm, &ln_blocks, ln_norm, base))
}

/// `Tr ρ_block²` for `ρ = |ψ⟩⟨ψ|`, via the smaller of the two Gram matrices.
fn marginal_purity(psi: &DVector<C64>, layout: &SpaceLayout, block: &[usize]) -> Result<f64> {
    let split = split_indices(layout, block)?;
    let mut m = DMatrix::<C64>::zeros(split.kept_dim, split.traced_dim);
    for (i, amp) in psi.iter().enumerate() {
        m[(split.kept[i], split.traced[i])] = *amp;
    }
    let gram = if split.kept_dim <= split.traced_dim {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    };
    Ok(gram.norm_squared())
}

/// Quadratic Rényi entropies behind ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenyiDecomposition {
    /// `H₂(ρ)`
    pub h2_total: f64,
    /// `H₂(ρ_⊗) = Σ H₂(ρ_i)`
    pub h2_product: f64,
    /// `½ [H₂(ρ_⊗) − H₂(ρ)]`
    pub epsilon: f64,
}

pub fn renyi_decomposition(
    rho: &DensityOperator,
    p: &Partition,
    base: LogBase,
) -> Result<RenyiDecomposition> {
    let h2_total = hilbert::renyi2(rho, base);
    let h2_product = block_marginals(rho, p)?
        .into_iter()
        .map(|m| hilbert::renyi2(&DensityOperator::trusted(m), base))
        .sum::<f64>();
    Ok(RenyiDecomposition {
        h2_total,
        h2_product,
        epsilon: 0.5 * (h2_product - h2_total),
    })
}

fn check_inverse_temperature(beta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!(
            "inverse temperature must be finite and nonnegative, got {beta}"
        )));
    }
    Ok(())
}

/// `e^{−β(H − λ_min)}`: the Gibbs operator up to a positive scale, with
/// every weight in `(0, 1]`.
fn shifted_boltzmann(h: &DenseOperator, beta: f64) -> Result<(DenseOperator, Vec<f64>)> {
    check_inverse_temperature(beta)?;
    let (values, vectors) = hermitian_eigen(h)?;
    let lo = values[0];
    let weights: Vec<f64> = values.iter().map(|&e| (-beta * (e - lo)).exp()).collect();
    let matrix = spectral_function(&values, &vectors, |e| (-beta * (e - lo)).exp());
    Ok((DenseOperator::new(h.layout().clone(), matrix)?, weights))
}

/// `e^{−βH}/Z`.
pub fn gibbs_state(h: &DenseOperator, beta: f64) -> Result<DensityOperator> {
    let (g, weights) = shifted_boltzmann(h, beta)?;
    let z: f64 = weights.iter().sum();
    Ok(DensityOperator::trusted(g.scaled(C64::new(1.0 / z, 0.0))))
}

/// ε of the Gibbs state `e^{−βH}/Z` as `½ log (f₁/f₂ · Z^{2N−2})`, where
/// `f₁ = Tr e^{−2βH}` and `f₂ = Π_i Tr_i (Tr_{others} e^{−βH})²`.
///
/// ε is invariant under `H → H + c`, so the spectrum is shifted to start at
/// zero and no exponential can overflow.
pub fn gibbs_measure(
    h: &DenseOperator,
    beta: f64,
    p: &Partition,
    base: LogBase,
) -> Result<MeasureReport> {
    p.check_layout(h.layout())?;
    let (g, weights) = shifted_boltzmann(h, beta)?;
    let ln_z = weights.iter().sum::<f64>().ln();
    let ln_f1_half = 0.5 * weights.iter().map(|w| w * w).sum::<f64>().ln();
    let ln_blocks: Vec<f64> = block_marginals(&g, p)?
        .iter()
        .map(|m| hs_norm(m).ln() - ln_z)
        .collect();
    // norms reported for the normalized state, for which Tr ρ = 1
    Ok(MeasureReport::from_logs(ln_f1_half - ln_z, &ln_blocks, 0.0, base))
}

fn check_projector(p: &DenseOperator, layout: &SpaceLayout) -> Result<()> {
    if p.layout() != layout {
        return Err(Error::invalid(format!(
            "projector layout {} does not match state layout {layout}",
            p.layout()
        )));
    }
    let dev = p.hermiticity_deviation();
    if dev > tol::HERMITIAN {
        return Err(Error::NotHermitian(dev));
    }
    let square = p.matrix() * p.matrix();
    let idem = (square - p.matrix()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if idem > tol::HERMITIAN {
        return Err(Error::invalid(format!(
            "projector is not idempotent (deviation {idem:.3e})"
        )));
    }
    Ok(())
}

/// `P ρ P / Tr(ρP)`.
pub fn measurement_reduce(rho: &DensityOperator, projector: &DenseOperator) -> Result<DensityOperator> {
    check_projector(projector, rho.layout())?;
    reduce_unchecked(rho, projector)
}

fn reduce_unchecked(rho: &DensityOperator, projector: &DenseOperator) -> Result<DensityOperator> {
    let p = projector.matrix();
    let prob = (rho.matrix() * p).trace().re;
    if prob <= tol::OUTCOME {
        return Err(Error::ImpossibleOutcome(prob));
    }
    let reduced = p * rho.matrix() * p / C64::new(prob, 0.0);
    Ok(DensityOperator::trusted(DenseOperator::new(
        rho.layout().clone(),
        reduced,
    )?))
}

/// One measurement outcome: its probability and, when possible, the ε of
/// the reduced state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub probability: f64,
    pub report: Option<MeasureReport>,
}

/// Probabilities and post-measurement ε for a complete set of orthogonal
/// projectors. Outcomes are evaluated in parallel and returned in input
/// order.
pub fn post_measurement_measures(
    rho: &DensityOperator,
    projectors: &[DenseOperator],
    p: &Partition,
    base: LogBase,
) -> Result<Vec<Outcome>> {
    if projectors.is_empty() {
        return Err(Error::invalid("at least one projector is required"));
    }
    p.check_layout(rho.layout())?;
    for proj in projectors {
        check_projector(proj, rho.layout())?;
    }
    let d = rho.dim();
    let mut sum = DMatrix::<C64>::zeros(d, d);
    for proj in projectors {
        sum += proj.matrix();
    }
    let completeness = (sum - DMatrix::<C64>::identity(d, d))
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    if completeness > tol::HERMITIAN {
        return Err(Error::invalid(format!(
            "projectors do not resolve the identity (deviation {completeness:.3e})"
        )));
    }
    for (i, a) in projectors.iter().enumerate() {
        for b in &projectors[i + 1..] {
            let overlap = (a.matrix() * b.matrix()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
            if overlap > tol::HERMITIAN {
                return Err(Error::invalid(format!(
                    "projectors are not orthogonal (overlap {overlap:.3e})"
                )));
            }
        }
    }
    projectors
        .par_iter()
        .map(|proj| {
            let probability = (rho.matrix() * proj.matrix()).trace().re;
            if probability <= tol::OUTCOME {
                return Ok(Outcome {
                    probability,
                    report: None,
                });
            }
            let reduced = reduce_unchecked(rho, proj)?;
            let report = entanglement_production(&reduced, p, base)?;
            Ok(Outcome {
                probability,
                report: Some(report),
            })
        })
        .collect()
}

/// `C_AB = Tr ρ (A ⊗ B) − Tr(ρ_A A) Tr(ρ_B B)` where `a` acts on the leading
/// factors of `rho` and `b` on the rest.
pub fn correlation(rho: &DensityOperator, a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    let joint = a.layout().concat(b.layout());
    if &joint != rho.layout() {
        return Err(Error::invalid(format!(
            "observables on {} ⊗ {} do not match state layout {}",
            a.layout(),
            b.layout(),
            rho.layout()
        )));
    }
    for op in [a, b] {
        let dev = op.hermiticity_deviation();
        if dev > tol::HERMITIAN {
            return Err(Error::NotHermitian(dev));
        }
    }
    let na = a.layout().factor_count();
    let n = rho.layout().factor_count();
    let rho_a = partial_trace(rho, &(0..na).collect::<Vec<_>>())?;
    let rho_b = partial_trace(rho, &(na..n).collect::<Vec<_>>())?;
    let ab = tensor_product(a, b);
    let joint_mean = (rho.matrix() * ab.matrix()).trace().re;
    let mean_a = (rho_a.matrix() * a.matrix()).trace().re;
    let mean_b = (rho_b.matrix() * b.matrix()).trace().re;
    Ok(joint_mean - mean_a * mean_b)
}
