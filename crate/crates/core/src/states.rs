//! Named entangled and separable states with their closed-form ε.
//!
//! Single-party basis labels `|1⟩, |2⟩, …` map to computational indices
//! `0, 1, …`.

use nalgebra::DVector;

use crate::hilbert::{DenseOperator, DensityOperator, Partition, SpaceLayout};
use crate::measure::LogBase;
use crate::{tol, Error, Result, C64};

/// Largest total dimension a state may be built at.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
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

#[derive(Debug, Clone, PartialEq)]
pub enum NamedState {
    /// `(|12⟩ ± |21⟩)/√2`
    Epr { sign: Sign },
    /// `(|11⟩ ± |22⟩)/√2`
    Bell { sign: Sign },
    /// `(|11…1⟩ ± |22…2⟩)/√2` on `parties` qubits.
    Ghz { parties: usize, sign: Sign },
    /// `c₁|11…1⟩ + c₂|22…2⟩`
    Multicat { parties: usize, c1: C64, c2: C64 },
    /// `Σ_n c_n |nn…n⟩` with one mode per coefficient.
    Multimode { parties: usize, coeffs: Vec<C64> },
    /// `Σ_k p_k ⊗_i |k⟩⟨k|`, party dimension = number of weights.
    Separable { parties: usize, weights: Vec<f64> },
}

/// A constructed state together with its natural partition (one block per
/// party) and, for pure states, the amplitude vector.
#[derive(Debug, Clone)]
pub struct BuiltState {
    pub rho: DensityOperator,
    pub partition: Partition,
    pub vector: Option<DVector<C64>>,
}

impl NamedState {
    pub fn parties(&self) -> usize {
        match self {
            NamedState::Epr { .. } | NamedState::Bell { .. } => 2,
            NamedState::Ghz { parties, .. }
            | NamedState::Multicat { parties, .. }
            | NamedState::Multimode { parties, .. }
            | NamedState::Separable { parties, .. } => *parties,
        }
    }

    /// Dimension of one party's space.
    pub fn party_dim(&self) -> usize {
        match self {
            NamedState::Multimode { coeffs, .. } => coeffs.len(),
            NamedState::Separable { weights, .. } => weights.len(),
            _ => 2,
        }
    }

    pub fn layout(&self) -> Result<SpaceLayout> {
        SpaceLayout::uniform(self.party_dim(), self.parties())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.parties();
        if n < 2 {
            return Err(Error::invalid(format!("need at least 2 parties, got {n}")));
        }
        let d = self.party_dim();
        if d == 0 {
            return Err(Error::invalid("at least one coefficient or weight is required"));
        }
        let total = (d as f64).powi(n as i32);
        if total > MAX_DENSE_DIM as f64 {
            return Err(Error::invalid(format!(
                "total dimension {d}^{n} exceeds {MAX_DENSE_DIM}"
            )));
        }
        match self {
            NamedState::Multicat { c1, c2, .. } => check_norm(&[*c1, *c2]),
            NamedState::Multimode { coeffs, .. } => check_norm(coeffs),
            NamedState::Separable { weights, .. } => {
                if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
                    return Err(Error::invalid(format!("weight {w} outside [0, 1]")));
                }
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > tol::NORMALIZATION {
                    return Err(Error::invalid(format!("weights sum to {sum}, not 1")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Amplitudes of the pure kinds; `None` for the separable mixture.
    pub fn vector(&self) -> Result<Option<DVector<C64>>> {
        self.validate()?;
        let layout = self.layout()?;
        let d = layout.total_dim();
        let n = self.parties();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // index of |kk…k⟩
        let diagonal = |k: usize| layout.index_of(&vec![k; n]);
        let mut v = DVector::<C64>::zeros(d);
        match self {
            NamedState::Epr { sign } => {
                v[layout.index_of(&[0, 1])] = C64::new(s, 0.0);
                v[layout.index_of(&[1, 0])] = C64::new(s * sign.factor(), 0.0);
            }
            NamedState::Bell { sign } | NamedState::Ghz { sign, .. } => {
                v[diagonal(0)] = C64::new(s, 0.0);
                v[diagonal(1)] = C64::new(s * sign.factor(), 0.0);
            }
            NamedState::Multicat { c1, c2, .. } => {
                v[diagonal(0)] = *c1;
                v[diagonal(1)] = *c2;
            }
            NamedState::Multimode { coeffs, .. } => {
                for (k, c) in coeffs.iter().enumerate() {
                    v[diagonal(k)] = *c;
                }
            }
            NamedState::Separable { .. } => return Ok(None),
        }
        Ok(Some(v))
    }

    pub fn build(&self) -> Result<BuiltState> {
        let layout = self.layout()?;
        let partition = Partition::singletons(self.parties());
        let vector = self.vector()?;
        let rho = match (&vector, self) {
            (Some(v), _) => DensityOperator::pure(layout, v)?,
            (None, NamedState::Separable { weights, .. }) => {
                let n = self.parties();
                let mut diag = vec![0.0; layout.total_dim()];
                for (k, &p) in weights.iter().enumerate() {
                    diag[layout.index_of(&vec![k; n])] = p;
                }
                DensityOperator::new(DenseOperator::from_diagonal(layout, &diag)?)?
            }
            (None, _) => unreachable!("only the separable kind has no vector"),
        };
        Ok(BuiltState {
            rho,
            partition,
            vector,
        })
    }

    /// Analytic ε for the one-block-per-party partition.
    pub fn closed_form_measure(&self, base: LogBase) -> Result<f64> {
        self.validate()?;
        let n = self.parties() as f64;
        let nats = match self {
            NamedState::Epr { .. } | NamedState::Bell { .. } => std::f64::consts::LN_2,
            NamedState::Ghz { .. } => 0.5 * n * std::f64::consts::LN_2,
            NamedState::Multicat { c1, c2, .. } => {
                -0.5 * n * (c1.norm_sqr().powi(2) + c2.norm_sqr().powi(2)).ln()
            }
            NamedState::Multimode { coeffs, .. } => {
                -0.5 * n * coeffs.iter().map(|c| c.norm_sqr().powi(2)).sum::<f64>().ln()
            }
            NamedState::Separable { weights, .. } => {
                -0.5 * (n - 1.0) * weights.iter().map(|p| p * p).sum::<f64>().ln()
            }
        };
        Ok(base.from_nats(nats))
    }
}

fn check_norm(coeffs: &[C64]) -> Result<()> {
    let sum: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (sum - 1.0).abs() > tol::NORMALIZATION {
        return Err(Error::invalid(format!(
            "coefficients have squared norm {sum}, not 1"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{entanglement_production, pure_state_measure};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn numeric(spec: &NamedState) -> f64 {
        let b = spec.build().unwrap();
        entanglement_production(&b.rho, &b.partition, LogBase::Natural)
            .unwrap()
            .epsilon
    }

    #[test]
    fn bell_matrix_corners() {
        let b = NamedState::Bell { sign: Sign::Plus }.build().unwrap();
        let m = b.rho.matrix();
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_abs_diff_eq!(m[(i, j)].re, 0.5, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(m.norm_squared(), 1.0, epsilon = 1e-15);
        let minus = NamedState::Bell { sign: Sign::Minus }.build().unwrap();
        assert_abs_diff_eq!(minus.rho.matrix()[(0, 3)].re, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn epr_uses_antidiagonal() {
        let b = NamedState::Epr { sign: Sign::Minus }.build().unwrap();
        let m = b.rho.matrix();
        assert_abs_diff_eq!(m[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 2)].re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 0)].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn multicat_degenerate_is_product() {
        let spec = NamedState::Multicat {
            parties: 3,
            c1: C64::new(1.0, 0.0),
            c2: C64::new(0.0, 0.0),
        };
        let b = spec.build().unwrap();
        assert_abs_diff_eq!(b.rho.matrix()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.closed_form_measure(LogBase::Natural).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(numeric(&spec), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn separable_single_term_is_pure_product() {
        let spec = NamedState::Separable {
            parties: 2,
            weights: vec![1.0, 0.0],
        };
        let b = spec.build().unwrap();
        assert_abs_diff_eq!(crate::hilbert::purity(&b.rho), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(numeric(&spec), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn closed_forms() {
        let ghz5 = NamedState::Ghz { parties: 5, sign: Sign::Plus };
        assert_abs_diff_eq!(ghz5.closed_form_measure(LogBase::Natural).unwrap(), 2.5 * LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(ghz5.closed_form_measure(LogBase::Base2).unwrap(), 2.5, epsilon = 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mc = NamedState::Multicat { parties: 4, c1: C64::new(h, 0.0), c2: C64::new(0.0, h) };
        assert_abs_diff_eq!(mc.closed_form_measure(LogBase::Natural).unwrap(), 2.0 * LN_2, epsilon = 1e-15);
        let mm = NamedState::Multimode { parties: 2, coeffs: vec![C64::new(0.5, 0.0); 4] };
        assert_abs_diff_eq!(mm.closed_form_measure(LogBase::Natural).unwrap(), 4f64.ln(), epsilon = 1e-15);
        let sep = NamedState::Separable { parties: 2, weights: vec![0.5, 0.5] };
        assert_abs_diff_eq!(sep.closed_form_measure(LogBase::Natural).unwrap(), 0.5 * LN_2, epsilon = 1e-15);
    }

    #[test]
    fn closed_forms_match_pipeline() {
        let phase = C64::from_polar(1.0, 0.7);
        let specs = vec![
            NamedState::Epr { sign: Sign::Plus },
            NamedState::Bell { sign: Sign::Minus },
            NamedState::Ghz { parties: 4, sign: Sign::Minus },
            NamedState::Multicat { parties: 3, c1: phase * 0.6, c2: C64::new(0.0, 0.8) },
            NamedState::Multimode {
                parties: 3,
                coeffs: vec![phase * 0.5, C64::new(0.5, 0.5), C64::new(0.0, -0.5)],
            },
            NamedState::Separable { parties: 3, weights: vec![0.2, 0.3, 0.5] },
        ];
        for spec in specs {
            let cf = spec.closed_form_measure(LogBase::Natural).unwrap();
            assert_abs_diff_eq!(cf, numeric(&spec), epsilon = 1e-12);
            let b = spec.build().unwrap();
            if let Some(v) = &b.vector {
                let pure = pure_state_measure(v, b.rho.layout(), &b.partition, LogBase::Natural).unwrap();
                assert_abs_diff_eq!(cf, pure.epsilon, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(NamedState::Ghz { parties: 1, sign: Sign::Plus }.build().is_err());
        assert!(NamedState::Multicat { parties: 2, c1: C64::new(1.0, 0.0), c2: C64::new(0.1, 0.0) }.build().is_err());
        assert!(NamedState::Multimode { parties: 2, coeffs: vec![] }.build().is_err());
        assert!(NamedState::Separable { parties: 2, weights: vec![0.6, 0.6] }.build().is_err());
        assert!(NamedState::Separable { parties: 2, weights: vec![1.5, -0.5] }.build().is_err());
        assert!(NamedState::Ghz { parties: 13, sign: Sign::Plus }.build().is_err());
    }
}
