//! Two Ising-coupled qubits in a longitudinal field, in equilibrium with a
//! bath at inverse temperature β.
//!
//! `H = −B(S₁ᶻ + S₂ᶻ) − 2J S₁ᶻS₂ᶻ`, diagonal in the product σz basis:
//! `diag(−B−J/2, J/2, J/2, B−J/2)`. In units of `|J|` the state depends on
//! `T = 1/(β|J|)`, `h = B/|J|` and the sign of `J`.
//!
//! All closed forms are evaluated from nonnegative exponentials combined in
//! log space, so no temperature or field overflows. The hyperbolic forms as
//! usually written live in [`naive`] for comparison.

use rayon::prelude::*;
use serde::Serialize;

use crate::hilbert::{DenseOperator, SpaceLayout};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// `J > 0`
    Ferro,
    /// `J < 0`
    Antiferro,
}

impl Coupling {
    pub fn sign(self) -> f64 {
        match self {
            Coupling::Ferro => 1.0,
            Coupling::Antiferro => -1.0,
        }
    }
}

impl std::str::FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ferro" => Ok(Coupling::Ferro),
            "antiferro" => Ok(Coupling::Antiferro),
            _ => Err(Error::invalid(format!("unknown coupling {s:?}"))),
        }
    }
}

/// Dimensionless register parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegisterParams {
    pub temperature: f64,
    pub field: f64,
    pub coupling: Coupling,
}

impl RegisterParams {
    pub fn new(temperature: f64, field: f64, coupling: Coupling) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::invalid(format!("temperature must be positive, got {temperature}")));
        }
        if !(field >= 0.0 && field.is_finite()) {
            return Err(Error::invalid(format!("field must be nonnegative, got {field}")));
        }
        Ok(RegisterParams {
            temperature,
            field,
            coupling,
        })
    }

    /// Raw parameters in units where `|J| = 1`.
    pub fn to_raw(&self) -> RawParams {
        RawParams {
            beta: 1.0 / self.temperature,
            field_b: self.field,
            coupling_j: self.coupling.sign(),
        }
    }
}

/// Inverse temperature, field and coupling in absolute units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawParams {
    pub beta: f64,
    pub field_b: f64,
    pub coupling_j: f64,
}

impl RawParams {
    pub fn new(beta: f64, field_b: f64, coupling_j: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be positive, got {beta}")));
        }
        if !field_b.is_finite() || !coupling_j.is_finite() {
            return Err(Error::invalid("field and coupling must be finite"));
        }
        Ok(RawParams {
            beta,
            field_b,
            coupling_j,
        })
    }

    /// `(T, h)` for `J ≠ 0`. ε is even in `B`, so `h = |B|/|J|`.
    pub fn to_dimensionless(&self) -> Result<RegisterParams> {
        if self.coupling_j == 0.0 {
            return Err(Error::invalid("dimensionless parameters need J ≠ 0"));
        }
        let coupling = if self.coupling_j > 0.0 {
            Coupling::Ferro
        } else {
            Coupling::Antiferro
        };
        let j = self.coupling_j.abs();
        RegisterParams::new(1.0 / (self.beta * j), self.field_b.abs() / j, coupling)
    }

    fn bb(&self) -> f64 {
        self.beta * self.field_b
    }

    fn bj(&self) -> f64 {
        self.beta * self.coupling_j
    }
}

pub fn hamiltonian(raw: &RawParams) -> DenseOperator {
    let (b, j) = (raw.field_b, raw.coupling_j);
    DenseOperator::from_diagonal(
        SpaceLayout::qubits(2).expect("two qubits"),
        &[-b - j / 2.0, j / 2.0, j / 2.0, b - j / 2.0],
    )
    .expect("4 entries for 2 qubits")
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

const LN2: f64 = std::f64::consts::LN_2;

/// `ln Z`.
pub fn ln_partition_fn(raw: &RawParams) -> f64 {
    let (bb, bj) = (raw.bb(), raw.bj());
    log_sum_exp(&[bb + bj / 2.0, -bb + bj / 2.0, LN2 - bj / 2.0])
}

/// `ln f₁ = ln Tr e^{−2βH}`.
pub fn ln_f1(raw: &RawParams) -> f64 {
    let (bb, bj) = (raw.bb(), raw.bj());
    log_sum_exp(&[2.0 * bb + bj, -2.0 * bb + bj, LN2 - bj])
}

/// `ln (f₁ + 4 cosh βB) = ½ ln f₂`.
fn ln_g(raw: &RawParams) -> f64 {
    let (bb, bj) = (raw.bb(), raw.bj());
    log_sum_exp(&[
        2.0 * bb + bj,
        -2.0 * bb + bj,
        LN2 - bj,
        LN2 + bb,
        LN2 - bb,
    ])
}

/// `ln f₂`, where `f₂ = (f₁ + 4 cosh βB)²` is the product of the squared
/// marginal norms of `e^{−βH}`.
pub fn ln_f2(raw: &RawParams) -> f64 {
    2.0 * ln_g(raw)
}

pub fn partition_fn(raw: &RawParams) -> f64 {
    ln_partition_fn(raw).exp()
}

pub fn f1(raw: &RawParams) -> f64 {
    ln_f1(raw).exp()
}

pub fn f2(raw: &RawParams) -> f64 {
    ln_f2(raw).exp()
}

/// `ln |eˣ − 1|`
fn ln_abs_expm1(x: f64) -> f64 {
    if x.abs() < 1.0 {
        x.exp_m1().abs().ln()
    } else if x > 0.0 {
        x + (-(-x).exp_m1()).ln()
    } else {
        (-x.exp_m1()).ln()
    }
}

/// `ln |F|` and the sign of `F = 2cosh a − 2eᶜ`.
fn ln_abs_f(a: f64, c: f64) -> (f64, f64) {
    let m = a.max(c);
    let f = if m <= 1.0 {
        let s = (a / 2.0).sinh();
        4.0 * s * s - 2.0 * c.exp_m1()
    } else {
        (a - m).exp() + (-a - m).exp() - 2.0 * (c - m).exp()
    };
    let shift = if m <= 1.0 { 0.0 } else { m };
    (shift + f.abs().ln(), f.signum())
}

/// ε in nats from raw parameters.
///
/// Uses `f₁Z² − f₂ = 2(e^{2βJ} − 1)(e^{2βB} + e^{−2βB} − 2e^{−2βJ})`, so
/// `ε = ½ ln(1 + r)` with `r` small whenever ε is, and exactly 0 at `J = 0`.
pub fn measure_raw(raw: &RawParams) -> f64 {
    let (bb, bj) = (raw.bb(), raw.bj());
    if bj == 0.0 {
        return 0.0;
    }
    let (ln_f, sign_f) = ln_abs_f(2.0 * bb.abs(), -2.0 * bj);
    let ln_r = LN2 + ln_abs_expm1(2.0 * bj) + ln_f - 2.0 * ln_g(raw);
    let r = bj.signum() * sign_f * ln_r.exp();
    0.5 * r.ln_1p()
}

/// ε(T, h) in nats.
pub fn measure_closed_form(p: &RegisterParams) -> f64 {
    measure_raw(&p.to_raw())
}

/// The closed forms exactly as the hyperbolic expressions read. They
/// overflow once `β|B|` or `β|J|` passes ~350 and lose accuracy earlier.
pub mod naive {
    use super::RawParams;

    pub fn partition_fn(raw: &RawParams) -> f64 {
        let (bb, bj) = (raw.beta * raw.field_b, raw.beta * raw.coupling_j);
        2.0 * (bb.cosh() + 1.0) * (bj / 2.0).cosh() + 2.0 * (bb.cosh() - 1.0) * (bj / 2.0).sinh()
    }

    pub fn f1(raw: &RawParams) -> f64 {
        let (bb, bj) = (raw.beta * raw.field_b, raw.beta * raw.coupling_j);
        2.0 * ((2.0 * bb).cosh() + 1.0) * bj.cosh() + 2.0 * ((2.0 * bb).cosh() - 1.0) * bj.sinh()
    }

    pub fn f2(raw: &RawParams) -> f64 {
        let bb = raw.beta * raw.field_b;
        (f1(raw) + 4.0 * bb.cosh()).powi(2)
    }

    pub fn measure(raw: &RawParams) -> f64 {
        let z = partition_fn(raw);
        0.5 * (f1(raw) / f2(raw) * z * z).ln()
    }
}

/// Asymptotic regimes of ε(T, h), each tied to one coupling sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// `T → 0`, `h > 0`
    FerroLowTemperature,
    /// `h → 0`
    FerroSmallField,
    /// `T → ∞`
    FerroHighTemperature,
    /// `h → ∞`
    FerroLargeField,
    /// `T → 0`, `0 ≤ h < 1`
    AntiferroLowTemperature,
    /// `T → 0`, `h = 1`
    AntiferroCriticalField,
    /// `h → 0`
    AntiferroSmallField,
    /// `T → ∞`
    AntiferroHighTemperature,
    /// `h → ∞`
    AntiferroLargeField,
}

/// Tolerance on `|h − 1|` for the critical-field expansion.
const CRITICAL_FIELD_TOL: f64 = 1e-12;

impl Regime {
    pub const FERRO: [Regime; 4] = [
        Regime::FerroLowTemperature,
        Regime::FerroSmallField,
        Regime::FerroHighTemperature,
        Regime::FerroLargeField,
    ];

    pub const ANTIFERRO: [Regime; 5] = [
        Regime::AntiferroLowTemperature,
        Regime::AntiferroCriticalField,
        Regime::AntiferroSmallField,
        Regime::AntiferroHighTemperature,
        Regime::AntiferroLargeField,
    ];

    pub fn for_coupling(coupling: Coupling) -> &'static [Regime] {
        match coupling {
            Coupling::Ferro => &Self::FERRO,
            Coupling::Antiferro => &Self::ANTIFERRO,
        }
    }

    pub fn coupling(self) -> Coupling {
        if Self::FERRO.contains(&self) {
            Coupling::Ferro
        } else {
            Coupling::Antiferro
        }
    }

    /// Short column name used in sweep tables.
    pub fn name(self) -> &'static str {
        match self {
            Regime::FerroLowTemperature | Regime::AntiferroLowTemperature => "low_t",
            Regime::FerroSmallField | Regime::AntiferroSmallField => "small_h",
            Regime::FerroHighTemperature | Regime::AntiferroHighTemperature => "high_t",
            Regime::FerroLargeField | Regime::AntiferroLargeField => "large_h",
            Regime::AntiferroCriticalField => "critical_h",
        }
    }

    /// Point where the expansion is expected to be within 1e-6 of the
    /// closed form, and the same point one decade further into the regime.
    pub fn deep_end(self) -> [RegisterParams; 2] {
        let c = self.coupling();
        let at = |temperature, field| RegisterParams {
            temperature,
            field,
            coupling: c,
        };
        match self {
            Regime::FerroLowTemperature => [at(0.2, 1.0), at(0.02, 1.0)],
            Regime::AntiferroLowTemperature => [at(0.05, 0.5), at(0.005, 0.5)],
            Regime::AntiferroCriticalField => [at(0.5, 1.0), at(0.05, 1.0)],
            Regime::FerroSmallField | Regime::AntiferroSmallField => [at(1.0, 0.01), at(1.0, 0.001)],
            Regime::FerroHighTemperature | Regime::AntiferroHighTemperature => {
                [at(100.0, 1.0), at(1000.0, 1.0)]
            }
            Regime::FerroLargeField | Regime::AntiferroLargeField => [at(1.0, 10.0), at(1.0, 100.0)],
        }
    }

    /// Whether the expansion is defined at `p`.
    pub fn applies(self, p: &RegisterParams) -> bool {
        if p.coupling != self.coupling() {
            return false;
        }
        match self {
            Regime::FerroLowTemperature => p.field > 0.0,
            Regime::AntiferroLowTemperature => p.field < 1.0,
            Regime::AntiferroCriticalField => (p.field - 1.0).abs() <= CRITICAL_FIELD_TOL,
            _ => true,
        }
    }
}

/// Leading terms of ε(T, h) in the given regime, in nats.
pub fn asymptotic_measure(regime: Regime, p: &RegisterParams) -> Result<f64> {
    if !regime.applies(p) {
        return Err(Error::invalid(format!(
            "regime {regime:?} does not apply to {:?} coupling at h = {}",
            p.coupling, p.field
        )));
    }
    let x = 1.0 / p.temperature;
    let h = p.field;
    let t2 = p.temperature * p.temperature;
    let u = (-x).exp();
    let half_ln2 = 0.5 * LN2;
    // ½ ln(2cosh x / (1 + cosh x)) = ½ ln(2(1+u²)/(1+u)²)
    let zero_field = 0.5 * (LN2 + (u * u).ln_1p() - 2.0 * u.ln_1p());
    let value = match regime {
        Regime::FerroLowTemperature => {
            let e = (-2.0 * h * x).exp();
            e - e * e + e * e * e / 3.0
        }
        Regime::FerroSmallField => {
            let a2 = (1.0 - u) * (u * u + 2.0 * u - 1.0)
                / (2.0 * t2 * (1.0 + u).powi(2) * (1.0 + u * u));
            zero_field + a2 * h * h
        }
        Regime::AntiferroSmallField => {
            let c2 = u * (1.0 - u) * (u * u - 2.0 * u - 1.0)
                / (2.0 * t2 * (1.0 + u).powi(2) * (1.0 + u * u));
            zero_field + c2 * h * h
        }
        Regime::FerroHighTemperature => {
            let g = x.exp_m1();
            g * g / 8.0 + (h * h - 1.0) / 8.0 * g * g * g
        }
        Regime::AntiferroHighTemperature => {
            let g = x.exp_m1();
            g * g / 8.0 - (h * h + 1.0) / 8.0 * g * g * g
        }
        Regime::FerroLargeField => {
            // b₂ = 1 − e^{−2x}, b₃ = −4e^{−x} b₂, exponents merged
            (-2.0 * h * x).exp() - (-(2.0 + 2.0 * h) * x).exp()
                - 4.0 * ((-(1.0 + 3.0 * h) * x).exp() - (-(3.0 + 3.0 * h) * x).exp())
        }
        Regime::AntiferroLargeField => {
            // b₂ = 1 − e^{2x}, b₃ = −4eˣ b₂, exponents merged
            (-2.0 * h * x).exp() - ((2.0 - 2.0 * h) * x).exp()
                - 4.0 * (((1.0 - 3.0 * h) * x).exp() - ((3.0 - 3.0 * h) * x).exp())
        }
        Regime::AntiferroLowTemperature => half_ln2 - 0.5 * (-(1.0 - h) * x).exp(),
        Regime::AntiferroCriticalField => {
            0.5 * (27.0f64 / 25.0).ln() - (-2.0 * x).exp() / 15.0 - 2.0 * (-4.0 * x).exp() / 225.0
        }
    };
    Ok(value)
}

/// Evenly spaced closed range `start..=end` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl GridRange {
    pub fn new(start: f64, end: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::invalid("range needs at least one step"));
        }
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::invalid("range bounds must be finite"));
        }
        if end < start {
            return Err(Error::invalid(format!("range end {end} is below start {start}")));
        }
        Ok(GridRange { start, end, steps })
    }

    /// Grid points; a single step yields just `start`.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let span = self.end - self.start;
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k == self.steps - 1 {
                    self.end
                } else {
                    self.start + span * (k as f64) / n
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub temperature: f64,
    pub field: f64,
    pub epsilon: f64,
}

/// ε over a `T × h` grid, `T` outer and `h` inner.
pub fn sweep(t: &GridRange, h: &GridRange, coupling: Coupling) -> Result<Vec<SweepRow>> {
    if t.start <= 0.0 {
        return Err(Error::invalid("temperature range must be positive"));
    }
    if h.start < 0.0 {
        return Err(Error::invalid("field range must be nonnegative"));
    }
    let hs = h.values();
    let rows: Vec<Vec<SweepRow>> = t
        .values()
        .into_par_iter()
        .map(|temperature| {
            hs.iter()
                .map(|&field| {
                    let p = RegisterParams {
                        temperature,
                        field,
                        coupling,
                    };
                    SweepRow {
                        temperature,
                        field,
                        epsilon: measure_closed_form(&p),
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{hermitian_exp, Partition};
    use crate::measure::{gibbs_measure, LogBase};
    use approx::assert_abs_diff_eq;

    fn raw(beta: f64, b: f64, j: f64) -> RawParams {
        RawParams::new(beta, b, j).unwrap()
    }

    #[test]
    fn hamiltonian_cases() {
        let diag = |r: &RawParams| -> Vec<f64> {
            let h = hamiltonian(r);
            (0..4).map(|i| h.matrix()[(i, i)].re).collect()
        };
        assert_eq!(diag(&raw(1.0, 0.0, 0.0)), vec![0.0; 4]);
        assert_eq!(diag(&raw(1.0, 1.0, 0.0)), vec![-1.0, 0.0, 0.0, 1.0]);
        assert_eq!(diag(&raw(1.0, 0.0, 1.0)), vec![-0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn closed_forms_match_traces() {
        for &(beta, b, j) in &[(1.0, 1.0, 1.0), (0.3, -2.0, 0.7), (2.5, 0.4, -1.3), (1e-6, 3.0, 2.0)] {
            let r = raw(beta, b, j);
            let h = hamiltonian(&r);
            let z = hermitian_exp(&h, -beta).unwrap().trace().re;
            let f = hermitian_exp(&h, -2.0 * beta).unwrap().trace().re;
            assert_abs_diff_eq!(partition_fn(&r) / z, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(f1(&r) / f, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn limits_of_z_f1_f2() {
        let hot = raw(1e-300, 1.0, 1.0);
        assert_abs_diff_eq!(partition_fn(&hot), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f1(&hot), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f2(&hot), 64.0, epsilon = 1e-10);

        let r = raw(0.8, 0.0, 1.7);
        assert_abs_diff_eq!(partition_fn(&r), 4.0 * (0.8f64 * 1.7 / 2.0).cosh(), epsilon = 1e-12);
        assert_abs_diff_eq!(f1(&r), 4.0 * (0.8f64 * 1.7).cosh(), epsilon = 1e-12);
        assert_abs_diff_eq!(f2(&r), 16.0 * (1.0 + (0.8f64 * 1.7).cosh()).powi(2), epsilon = 1e-10);

        let r = raw(0.8, 1.3, 0.0);
        let c = (0.8f64 * 1.3).cosh();
        assert_abs_diff_eq!(f1(&r), 4.0 * c * c, epsilon = 1e-12);
        assert_abs_diff_eq!(f2(&r), 16.0 * c * c * (1.0 + c).powi(2), epsilon = 1e-9);
    }

    #[test]
    fn stable_matches_naive() {
        for &beta in &[0.01, 0.5, 1.0, 3.0, 20.0] {
            for &b in &[0.0, 0.3, 1.0, 2.0, 5.0] {
                for &j in &[1.0f64, -1.0, 0.25, -3.0] {
                    if beta * f64::max(b, j.abs()) > 3.0 {
                        continue;
                    }
                    let r = raw(beta, b, j);
                    assert_abs_diff_eq!(measure_raw(&r), naive::measure(&r), epsilon = 1e-12);
                    assert_abs_diff_eq!(ln_partition_fn(&r), naive::partition_fn(&r).ln(), epsilon = 1e-12);
                    assert_abs_diff_eq!(ln_f2(&r), naive::f2(&r).ln(), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn high_precision_reference() {
        // 400-digit evaluations of the hyperbolic form
        let cases = [
            (3.0, 2.0, -3.0, 0.322_014_238_108_180_13),
            (50.0, 1.0, -1.0, 0.038_480_520_568_064_162),
            (50.0, 0.5, -1.0, 0.346_573_590_273_028_68),
            (50.0, 2.0, -1.0, -3.720_075_976_020_836e-44),
            (50.0, 1.0, 1.0, 3.720_075_976_020_836e-44),
            (1e-6, 1.0, 1.0, 1.250_001_249_999_010_4e-13),
            (1e-3, 1.0, -1.0, 1.248_749_013_228_151_5e-7),
            (0.5, 3.0, -1.0, -0.015_190_530_617_850_759),
        ];
        for (beta, b, j, want) in cases {
            let got = measure_raw(&raw(beta, b, j));
            assert!((got - want).abs() <= 1e-14 * want.abs().max(1e-300), "β={beta} B={b} J={j}: {got} vs {want}");
        }
    }

    #[test]
    fn matches_gibbs_pipeline() {
        for &(t, h) in &[(1.0, 0.0), (0.3, 0.5), (2.0, 1.0), (0.1, 0.9)] {
            for coupling in [Coupling::Ferro, Coupling::Antiferro] {
                let p = RegisterParams::new(t, h, coupling).unwrap();
                let r = p.to_raw();
                let numeric = gibbs_measure(&hamiltonian(&r), r.beta, &Partition::singletons(2), LogBase::Natural)
                    .unwrap()
                    .epsilon;
                assert_abs_diff_eq!(measure_closed_form(&p), numeric, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn uncoupled_is_exactly_zero() {
        for &b in &[0.1, 1.0, -4.0] {
            assert_eq!(measure_raw(&raw(2.0, b, 0.0)), 0.0);
        }
    }

    #[test]
    fn zero_field_values() {
        let p = RegisterParams::new(1.0, 0.0, Coupling::Ferro).unwrap();
        let ch = 1f64.cosh();
        assert_abs_diff_eq!(measure_closed_form(&p), 0.5 * (2.0 * ch / (1.0 + ch)).ln(), epsilon = 1e-15);
        for coupling in [Coupling::Ferro, Coupling::Antiferro] {
            let cold = RegisterParams::new(1e-3, 0.0, coupling).unwrap();
            assert_abs_diff_eq!(measure_closed_form(&cold), 0.5 * LN2, epsilon = 1e-12);
        }
    }

    #[test]
    fn extreme_parameters_are_finite() {
        for &t in &[1e-4, 0.02, 1e6] {
            for &h in &[0.0, 0.5, 1.0, 2.0, 1e3] {
                for coupling in [Coupling::Ferro, Coupling::Antiferro] {
                    let e = measure_closed_form(&RegisterParams::new(t, h, coupling).unwrap());
                    assert!(e.is_finite(), "T={t} h={h} {coupling:?}");
                }
            }
        }
    }

    #[test]
    fn even_in_field() {
        for &b in &[0.2, 1.0, 3.7] {
            for &j in &[1.0, -1.0] {
                assert_abs_diff_eq!(measure_raw(&raw(1.3, b, j)), measure_raw(&raw(1.3, -b, j)), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn regime_mismatch() {
        let ferro = RegisterParams::new(1.0, 0.5, Coupling::Ferro).unwrap();
        assert!(asymptotic_measure(Regime::AntiferroHighTemperature, &ferro).is_err());
        let af = RegisterParams::new(1.0, 1.5, Coupling::Antiferro).unwrap();
        assert!(asymptotic_measure(Regime::AntiferroLowTemperature, &af).is_err());
        assert!(asymptotic_measure(Regime::AntiferroCriticalField, &af).is_err());
        assert!(asymptotic_measure(Regime::AntiferroLargeField, &af).is_ok());
    }

    #[test]
    fn low_temperature_limits() {
        let af = |h| RegisterParams::new(0.02, h, Coupling::Antiferro).unwrap();
        assert_abs_diff_eq!(measure_closed_form(&af(0.5)), 0.5 * LN2, epsilon = 1e-6);
        assert_abs_diff_eq!(measure_closed_form(&af(1.0)), 0.5 * (27.0f64 / 25.0).ln(), epsilon = 1e-6);
        assert_abs_diff_eq!(measure_closed_form(&af(2.0)), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn ranges() {
        assert_eq!(GridRange::new(0.0, 1.0, 3).unwrap().values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(GridRange::new(2.0, 2.0, 1).unwrap().values(), vec![2.0]);
        assert!(GridRange::new(1.0, 0.0, 3).is_err());
        assert!(GridRange::new(0.0, 1.0, 0).is_err());
        let t = GridRange::new(0.0, 1.0, 2).unwrap();
        assert!(sweep(&t, &t, Coupling::Ferro).is_err());
    }

    #[test]
    fn sweep_order() {
        let t = GridRange::new(0.5, 1.0, 2).unwrap();
        let h = GridRange::new(0.0, 2.0, 3).unwrap();
        let rows = sweep(&t, &h, Coupling::Ferro).unwrap();
        let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.temperature, r.field)).collect();
        assert_eq!(
            keys,
            vec![(0.5, 0.0), (0.5, 1.0), (0.5, 2.0), (1.0, 0.0), (1.0, 1.0), (1.0, 2.0)]
        );
    }
}
