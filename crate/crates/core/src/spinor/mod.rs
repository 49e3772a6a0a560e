//! Multiparticle spinor systems: symmetric-group representation dimensions
//! and the two measures of the spatial ⊗ spin decomposition.
//!
//! For a Young diagram `λ` of `N` boxes the spin-spatial measure is `ln f_λ`,
//! with `f_λ` the dimension of the irreducible representation. For spin-half
//! bosons on two orbitals the particle-partition measure has the closed form
//!
//! ```text
//! ε = −(N/2) ln(¼ + [S_z² + I_z² + (N+2)² S_z² I_z² / (4S²(S+1)²)] / N²)
//! ```

pub mod oracle;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Above this many boxes `ln f_λ` is computed from log-gamma.
pub const EXACT_LOG_LIMIT: usize = 170;

/// Row lengths `λ₁ ≥ … ≥ λ_k > 0` padded to `multiplicity` rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct YoungDiagram {
    rows: Vec<usize>,
    multiplicity: usize,
}

impl YoungDiagram {
    /// Trailing zero rows are dropped; `multiplicity` must be at least the
    /// number of nonzero rows.
    pub fn new(mut rows: Vec<usize>, multiplicity: usize) -> Result<Self> {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        if rows.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid(format!("rows {rows:?} are not non-increasing")));
        }
        if rows.contains(&0) {
            return Err(Error::invalid("zero rows may only trail"));
        }
        if multiplicity < rows.len() {
            return Err(Error::invalid(format!(
                "{} rows exceed multiplicity {multiplicity}",
                rows.len()
            )));
        }
        Ok(YoungDiagram { rows, multiplicity })
    }

    /// Diagram with as many rows as it has nonzero entries.
    pub fn from_rows(rows: Vec<usize>) -> Result<Self> {
        let m = rows.iter().filter(|&&r| r > 0).count().max(1);
        Self::new(rows, m)
    }

    /// `[N/2 + S, N/2 − S]` for `N` spin-half particles of total spin `S`.
    pub fn spin_half(n: usize, twice_s: usize) -> Result<Self> {
        if twice_s > n || (n - twice_s) % 2 != 0 {
            return Err(Error::invalid(format!(
                "spin {}/2 is not allowed for {n} particles",
                twice_s
            )));
        }
        Self::new(vec![(n + twice_s) / 2, (n - twice_s) / 2], 2)
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    pub fn n_total(&self) -> usize {
        self.rows.iter().sum()
    }

    /// `λ_m` for `m = 1..=M`, including zero rows.
    fn padded(&self) -> Vec<usize> {
        let mut r = self.rows.clone();
        r.resize(self.multiplicity, 0);
        r
    }

    /// Shifted row lengths `λ_m + M − m` that appear in the formula.
    fn shifted(&self) -> Vec<usize> {
        let m = self.multiplicity;
        self.padded()
            .iter()
            .enumerate()
            .map(|(k, &l)| l + m - 1 - k)
            .collect()
    }
}

fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `f_λ = N! Π_{m<m'} (λ_m − m − λ_{m'} + m') / Π_m (λ_m + M − m)!`, exactly.
pub fn rep_dimension(d: &YoungDiagram) -> BigUint {
    let l = d.shifted();
    let mut num = factorial(d.n_total());
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            num *= l[i] - l[j];
        }
    }
    let den = l.iter().fold(BigUint::one(), |acc, &x| acc * factorial(x));
    num / den
}

/// `ln f_λ`; exact below [`EXACT_LOG_LIMIT`] boxes, log-gamma above.
pub fn ln_rep_dimension(d: &YoungDiagram) -> f64 {
    let n = d.n_total();
    if n <= EXACT_LOG_LIMIT {
        return rep_dimension(d).to_f64().expect("f_λ ≤ 170! fits in f64").ln();
    }
    let l = d.shifted();
    let mut acc = ln_gamma(n as f64 + 1.0);
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            acc += ((l[i] - l[j]) as f64).ln();
        }
        acc -= ln_gamma(l[i] as f64 + 1.0);
    }
    acc
}

/// `ε̄ = ln f_λ` for spatial ⊗ spin partitioning.
pub fn spin_spatial_measure(d: &YoungDiagram) -> f64 {
    ln_rep_dimension(d)
}

fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Leading large-`N` form `N ln N − Σ λ_m ln λ_m`.
pub fn spin_spatial_asymptotic(d: &YoungDiagram) -> f64 {
    let n = d.n_total() as f64;
    x_ln_x(n) - d.rows.iter().map(|&l| x_ln_x(l as f64)).sum::<f64>()
}

/// Spin-half form `−N[(½ − S/N) ln(½ − S/N) + (½ + S/N) ln(½ + S/N)]`.
pub fn spin_spatial_asymptotic_spin_half(n: usize, twice_s: usize) -> f64 {
    let nf = n as f64;
    let s = twice_s as f64 / 2.0;
    -nf * (x_ln_x(0.5 - s / nf) + x_ln_x(0.5 + s / nf))
}

/// Spin-half bosons on two orbitals with total spin `S`, spin projection
/// `S_z` and orbital (isotopic) projection `I_z`, all stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinHalfState {
    n: usize,
    twice_s: usize,
    twice_sz: i64,
    twice_iz: i64,
}

impl SpinHalfState {
    pub fn new(n: usize, twice_s: usize, twice_sz: i64, twice_iz: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one particle"));
        }
        if twice_s > n || (n - twice_s) % 2 != 0 {
            return Err(Error::invalid(format!(
                "S = {} is not allowed for N = {n}",
                half(twice_s as i64)
            )));
        }
        for (name, p) in [("S_z", twice_sz), ("I_z", twice_iz)] {
            if p.unsigned_abs() as usize > twice_s || (twice_s as i64 - p) % 2 != 0 {
                return Err(Error::invalid(format!(
                    "{name} = {} is not allowed for S = {}",
                    half(p),
                    half(twice_s as i64)
                )));
            }
        }
        Ok(SpinHalfState {
            n,
            twice_s,
            twice_sz,
            twice_iz,
        })
    }

    /// From ordinary (half-)integer values.
    pub fn from_values(n: usize, s: f64, sz: f64, iz: f64) -> Result<Self> {
        let twice = |x: f64, name: &str| -> Result<i64> {
            let t = 2.0 * x;
            if !t.is_finite() || t.fract() != 0.0 {
                return Err(Error::invalid(format!("{name} = {x} is not a half-integer")));
            }
            Ok(t as i64)
        };
        let ts = twice(s, "S")?;
        if ts < 0 {
            return Err(Error::invalid("S must be nonnegative"));
        }
        Self::new(n, ts as usize, twice(sz, "S_z")?, twice(iz, "I_z")?)
    }

    /// Every valid `(S, S_z, I_z)` for `N` particles, `S` ascending, then
    /// `S_z` and `I_z` ascending.
    pub fn all(n: usize) -> Vec<SpinHalfState> {
        let mut out = Vec::new();
        for ts in (n % 2..=n).step_by(2) {
            for tsz in (-(ts as i64)..=ts as i64).step_by(2) {
                for tiz in (-(ts as i64)..=ts as i64).step_by(2) {
                    out.push(SpinHalfState {
                        n,
                        twice_s: ts,
                        twice_sz: tsz,
                        twice_iz: tiz,
                    });
                }
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn twice_s(&self) -> usize {
        self.twice_s
    }

    pub fn twice_sz(&self) -> i64 {
        self.twice_sz
    }

    pub fn twice_iz(&self) -> i64 {
        self.twice_iz
    }

    pub fn s(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    pub fn sz(&self) -> f64 {
        self.twice_sz as f64 / 2.0
    }

    pub fn iz(&self) -> f64 {
        self.twice_iz as f64 / 2.0
    }

    pub fn diagram(&self) -> YoungDiagram {
        YoungDiagram::spin_half(self.n, self.twice_s).expect("validated at construction")
    }
}

fn half(twice: i64) -> String {
    if twice % 2 == 0 {
        format!("{}", twice / 2)
    } else {
        format!("{twice}/2")
    }
}

/// `f = N!(2S+1) / ((N/2+S+1)!(N/2−S)!)`.
pub fn rep_dimension_spin_half(n: usize, twice_s: usize) -> Result<BigUint> {
    if twice_s > n || (n - twice_s) % 2 != 0 {
        return Err(Error::invalid(format!("2S = {twice_s} is not allowed for N = {n}")));
    }
    let upper = (n + twice_s) / 2 + 1;
    let lower = (n - twice_s) / 2;
    Ok(factorial(n) * (twice_s + 1) / (factorial(upper) * factorial(lower)))
}

/// Particle-partition measure, in nats.
///
/// Evaluated as `N ln 2 − (N/2) ln(1 + x)` with `x` a ratio of exact
/// integers, so `S_z = I_z = 0` gives `N ln 2` exactly.
pub fn particle_measure(state: &SpinHalfState) -> Result<f64> {
    let n = state.n as u128;
    let a = state.twice_sz.unsigned_abs() as u128;
    let b = state.twice_iz.unsigned_abs() as u128;
    let c = state.twice_s as u128;
    let nf = state.n as f64;
    let ln2 = std::f64::consts::LN_2;
    if c == 0 {
        return Ok(nf * ln2);
    }
    let overflow = || Error::invalid(format!("N = {} is too large", state.n));
    let mul = |x: u128, y: u128| x.checked_mul(y).ok_or_else(overflow);
    let cc = mul(mul(c, c)?, mul(c + 2, c + 2)?)?;
    // x = 4[(a² + b²) c²(c+2)² + (N+2)² a² b²] / (4 N² c²(c+2)²)
    let top = mul(a * a + b * b, cc)?
        .checked_add(mul(mul((n + 2) * (n + 2), a * a)?, b * b)?)
        .ok_or_else(overflow)?;
    let bottom = mul(n * n, cc)?;
    let x = top as f64 / bottom as f64;
    Ok(nf * ln2 - 0.5 * nf * x.ln_1p())
}
