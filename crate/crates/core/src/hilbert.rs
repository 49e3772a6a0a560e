//! Dense operator algebra on tensor-product Hilbert spaces.
//!
//! Basis states of `H_1 ⊗ … ⊗ H_N` are addressed by mixed-radix multi-indices
//! in row-major order: the digit of the **last** factor varies fastest, so
//! `|i_1 … i_N⟩` sits at `Σ_k i_k · Π_{j>k} d_j`. This matches the Kronecker
//! product convention, hence `diag(1,0) ⊗ diag(0,1) = diag(0,1,0,0)`.

use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::measure::LogBase;
use crate::{tol, Error, Invariant, Result, C64};

/// Ordered list of tensor-factor dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceLayout {
    dims: Vec<usize>,
    total: usize,
}

impl SpaceLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::invalid("layout needs at least one factor"));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::invalid(format!("factor {pos} has dimension 0")));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::invalid("total dimension overflows"))?;
        Ok(SpaceLayout { dims, total })
    }

    /// `n` factors of dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::uniform(2, n)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factor_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn concat(&self, other: &SpaceLayout) -> SpaceLayout {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SpaceLayout {
            dims,
            total: self.total * other.total,
        }
    }

    /// Layout made of the listed factors, in the listed order.
    pub fn select(&self, factors: &[usize]) -> SpaceLayout {
        let dims: Vec<usize> = factors.iter().map(|&f| self.dims[f]).collect();
        let total = dims.iter().product();
        SpaceLayout { dims, total }
    }

    /// Stride of each factor in the flat index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    /// Per-factor digits of a flat index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }
}

impl fmt::Display for SpaceLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join("⊗"))
    }
}

/// Disjoint blocks of factor indices covering `0..factor_count`.
///
/// Each block is one subsystem of the nonentangling counterpart. A single
/// block holding every factor is legal and always yields ε = 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    factor_count: usize,
}

impl Partition {
    pub fn new(blocks: Vec<Vec<usize>>, factor_count: usize) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::invalid("partition needs at least one block"));
        }
        let mut seen = vec![false; factor_count];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::invalid(format!("partition block {b} is empty")));
            }
            for &f in block {
                if f >= factor_count {
                    return Err(Error::invalid(format!(
                        "factor index {f} out of range for {factor_count} factors"
                    )));
                }
                if seen[f] {
                    return Err(Error::invalid(format!("factor {f} appears twice")));
                }
                seen[f] = true;
            }
        }
        if let Some(f) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("factor {f} is not covered")));
        }
        Ok(Partition {
            blocks,
            factor_count,
        })
    }

    /// Every factor in its own block.
    pub fn singletons(factor_count: usize) -> Self {
        Partition {
            blocks: (0..factor_count).map(|f| vec![f]).collect(),
            factor_count,
        }
    }

    pub fn single_block(factor_count: usize) -> Self {
        Partition {
            blocks: vec![(0..factor_count).collect()],
            factor_count,
        }
    }

    /// Two blocks: factors `0..split` and `split..factor_count`.
    pub fn split_at(split: usize, factor_count: usize) -> Result<Self> {
        Self::new(
            vec![(0..split).collect(), (split..factor_count).collect()],
            factor_count,
        )
    }

    /// Parses the canonical `"0,1|2,3"` syntax. Whitespace is rejected.
    pub fn parse(text: &str, factor_count: usize) -> Result<Self> {
        if text.chars().any(char::is_whitespace) {
            return Err(Error::invalid("partition string must not contain whitespace"));
        }
        let blocks = text
            .split('|')
            .map(|block| {
                block
                    .split(',')
                    .map(|f| {
                        f.parse::<usize>()
                            .map_err(|_| Error::invalid(format!("bad factor index {f:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks, factor_count)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn factor_count(&self) -> usize {
        self.factor_count
    }

    /// Blocks of `self` followed by the blocks of `other` shifted past
    /// `self`'s factors; the partition of a tensor product `A ⊗ B`.
    pub fn concat(&self, other: &Partition) -> Partition {
        let shift = self.factor_count;
        let mut blocks = self.blocks.clone();
        blocks.extend(
            other
                .blocks
                .iter()
                .map(|b| b.iter().map(|f| f + shift).collect()),
        );
        Partition {
            blocks,
            factor_count: shift + other.factor_count,
        }
    }

    pub fn check_layout(&self, layout: &SpaceLayout) -> Result<()> {
        if self.factor_count != layout.factor_count() {
            return Err(Error::invalid(format!(
                "partition covers {} factors but layout {layout} has {}",
                self.factor_count,
                layout.factor_count()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&blocks.join("|"))
    }
}

/// Square complex matrix bound to a [`SpaceLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    layout: SpaceLayout,
    matrix: DMatrix<C64>,
}

impl DenseOperator {
    pub fn new(layout: SpaceLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::invalid(format!(
                "matrix is {}x{} but layout {layout} needs {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DenseOperator { layout, matrix })
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let d = layout.total_dim();
        DenseOperator {
            layout,
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let d = layout.total_dim();
        DenseOperator {
            layout,
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn from_diagonal(layout: SpaceLayout, diag: &[f64]) -> Result<Self> {
        if diag.len() != layout.total_dim() {
            return Err(Error::invalid(format!(
                "diagonal has {} entries, layout {layout} needs {}",
                diag.len(),
                layout.total_dim()
            )));
        }
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Ok(DenseOperator {
            layout,
            matrix: DMatrix::from_diagonal(&v),
        })
    }

    /// `|ψ⟩⟨ψ|` without any normalization.
    pub fn outer(layout: SpaceLayout, psi: &DVector<C64>) -> Result<Self> {
        if psi.len() != layout.total_dim() {
            return Err(Error::invalid(format!(
                "vector has {} entries, layout {layout} needs {}",
                psi.len(),
                layout.total_dim()
            )));
        }
        let matrix = psi * psi.adjoint();
        Ok(DenseOperator { layout, matrix })
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            layout: self.layout.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scaled(&self, c: C64) -> DenseOperator {
        DenseOperator {
            layout: self.layout.clone(),
            matrix: &self.matrix * c,
        }
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.same_layout(other)?;
        Ok(DenseOperator {
            layout: self.layout.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.same_layout(other)?;
        Ok(DenseOperator {
            layout: self.layout.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.same_layout(other)?;
        Ok(DenseOperator {
            layout: self.layout.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    fn same_layout(&self, other: &DenseOperator) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::invalid(format!(
                "layout mismatch: {} vs {}",
                self.layout, other.layout
            )));
        }
        Ok(())
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max |a_ij − conj(a_ji)|` relative to the largest entry modulus.
    pub fn hermiticity_deviation(&self) -> f64 {
        let scale = self.max_abs_entry();
        if scale == 0.0 {
            return 0.0;
        }
        let d = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                dev = dev.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        dev / scale
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_deviation() <= tol::HERMITIAN
    }

    /// Same operator with its factors reordered: factor `k` of the result is
    /// factor `order[k]` of `self`.
    pub fn permute_factors(&self, order: &[usize]) -> Result<DenseOperator> {
        let n = self.layout.factor_count();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::invalid("factor order must list every factor once"));
        }
        for &f in order {
            if f >= n || std::mem::replace(&mut seen[f], true) {
                return Err(Error::invalid("factor order must list every factor once"));
            }
        }
        let target = self.layout.select(order);
        let strides = self.layout.strides();
        let d = self.dim();
        // map[new index] = old index
        let map: Vec<usize> = (0..d)
            .map(|new| {
                target
                    .digits(new)
                    .iter()
                    .zip(order)
                    .map(|(&digit, &f)| digit * strides[f])
                    .sum()
            })
            .collect();
        let matrix = DMatrix::from_fn(d, d, |r, c| self.matrix[(map[r], map[c])]);
        Ok(DenseOperator {
            layout: target,
            matrix,
        })
    }
}

/// Trace-one, Hermitian, positive semidefinite operator.
///
/// Validation happens once, at construction; operations accepting a
/// `DensityOperator` trust it.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(DenseOperator);

/// Outcome of checking the three density-operator invariants.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ValidationReport {
    pub hermitian: bool,
    pub trace: bool,
    pub psd: bool,
    pub hermitian_deviation: f64,
    pub trace_value: f64,
    pub min_eigenvalue: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.hermitian && self.trace && self.psd
    }

    /// First violated invariant, if any.
    pub fn violation(&self) -> Option<Invariant> {
        if !self.hermitian {
            Some(Invariant::Hermitian)
        } else if !self.trace {
            Some(Invariant::Trace)
        } else if !self.psd {
            Some(Invariant::Psd)
        } else {
            None
        }
    }
}

impl DensityOperator {
    pub fn new(op: DenseOperator) -> Result<Self> {
        let report = Self::validate(&op);
        match report.violation() {
            None => Ok(DensityOperator(op)),
            Some(invariant) => {
                let detail = match invariant {
                    Invariant::Hermitian => {
                        format!("relative deviation {:.3e}", report.hermitian_deviation)
                    }
                    Invariant::Trace => format!("trace {:.12}", report.trace_value),
                    Invariant::Psd => format!("min eigenvalue {:.3e}", report.min_eigenvalue),
                };
                Err(Error::NotDensity { invariant, detail })
            }
        }
    }

    /// Checks Hermiticity, unit trace and positivity without consuming `op`.
    pub fn validate(op: &DenseOperator) -> ValidationReport {
        let hermitian_deviation = op.hermiticity_deviation();
        let tr = op.trace();
        let hermitian_part = (op.matrix() + op.matrix().adjoint()) * C64::new(0.5, 0.0);
        let min_eigenvalue = hermitian_part
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |m, &x| m.min(x));
        ValidationReport {
            hermitian: hermitian_deviation <= tol::HERMITIAN,
            trace: (tr.re - 1.0).abs() <= tol::TRACE && tr.im.abs() <= tol::TRACE,
            psd: min_eigenvalue >= -tol::PSD,
            hermitian_deviation,
            trace_value: tr.re,
            min_eigenvalue,
        }
    }

    /// `|ψ⟩⟨ψ|` for a unit vector; valid by construction.
    pub fn pure(layout: SpaceLayout, psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > tol::NORMALIZATION {
            return Err(Error::invalid(format!("state vector norm {norm} is not 1")));
        }
        Ok(DensityOperator(DenseOperator::outer(layout, psi)?))
    }

    /// `I/d`.
    pub fn maximally_mixed(layout: SpaceLayout) -> Self {
        let d = layout.total_dim() as f64;
        DensityOperator(DenseOperator::identity(layout).scaled(C64::new(1.0 / d, 0.0)))
    }

    /// Wraps an operator already known to satisfy the invariants.
    pub(crate) fn trusted(op: DenseOperator) -> Self {
        DensityOperator(op)
    }

    pub fn as_operator(&self) -> &DenseOperator {
        &self.0
    }

    pub fn into_operator(self) -> DenseOperator {
        self.0
    }
}

impl Deref for DensityOperator {
    type Target = DenseOperator;

    fn deref(&self) -> &DenseOperator {
        &self.0
    }
}

impl From<DensityOperator> for DenseOperator {
    fn from(rho: DensityOperator) -> Self {
        rho.0
    }
}

/// Kronecker product; the layout is the concatenation of the factor lists.
pub fn tensor_product(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    DenseOperator {
        layout: a.layout.concat(&b.layout),
        matrix: a.matrix.kronecker(&b.matrix),
    }
}

/// For every flat index, its multi-index restricted to `keep` (in the order
/// listed) and its multi-index over the remaining factors (ascending).
pub(crate) struct IndexSplit {
    pub kept: Vec<usize>,
    pub traced: Vec<usize>,
    pub kept_dim: usize,
    pub traced_dim: usize,
}

pub(crate) fn split_indices(layout: &SpaceLayout, keep: &[usize]) -> Result<IndexSplit> {
    let n = layout.factor_count();
    if keep.is_empty() {
        return Err(Error::invalid("keep set must not be empty"));
    }
    let mut kept_mask = vec![false; n];
    for &f in keep {
        if f >= n {
            return Err(Error::invalid(format!("factor {f} out of range for layout {layout}")));
        }
        if std::mem::replace(&mut kept_mask[f], true) {
            return Err(Error::invalid(format!("factor {f} listed twice in keep set")));
        }
    }
    let traced_factors: Vec<usize> = (0..n).filter(|&f| !kept_mask[f]).collect();
    let kept_layout = layout.select(keep);
    let traced_dims: Vec<usize> = traced_factors.iter().map(|&f| layout.dims()[f]).collect();
    let kept_dim = kept_layout.total_dim();
    let traced_dim: usize = traced_dims.iter().product();

    let d = layout.total_dim();
    let mut kept = Vec::with_capacity(d);
    let mut traced = Vec::with_capacity(d);
    for i in 0..d {
        let digits = layout.digits(i);
        kept.push(keep.iter().fold(0, |acc, &f| acc * layout.dims()[f] + digits[f]));
        traced.push(
            traced_factors
                .iter()
                .fold(0, |acc, &f| acc * layout.dims()[f] + digits[f]),
        );
    }
    Ok(IndexSplit {
        kept,
        traced,
        kept_dim,
        traced_dim,
    })
}

/// Contracts every factor not in `keep`. The result lives on the kept
/// factors, in the order `keep` lists them.
pub fn partial_trace(a: &DenseOperator, keep: &[usize]) -> Result<DenseOperator> {
    let split = split_indices(&a.layout, keep)?;
    let mut groups: Vec<Vec<(usize, usize)>> =
        vec![Vec::with_capacity(split.kept_dim); split.traced_dim];
    for i in 0..a.dim() {
        groups[split.traced[i]].push((split.kept[i], i));
    }
    let mut out = DMatrix::<C64>::zeros(split.kept_dim, split.kept_dim);
    for group in &groups {
        for &(k2, i2) in group {
            for &(k1, i1) in group {
                out[(k1, k2)] += a.matrix[(i1, i2)];
            }
        }
    }
    Ok(DenseOperator {
        layout: a.layout.select(keep),
        matrix: out,
    })
}

/// Hilbert–Schmidt (Frobenius) norm `√Tr(A⁺A)`.
pub fn hs_norm(a: &DenseOperator) -> f64 {
    a.matrix.norm()
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityOperator) -> f64 {
    a_squared_trace(rho)
}

/// `Tr A⁺A` summed entrywise; equals `Tr A²` for Hermitian `A`.
fn a_squared_trace(a: &DenseOperator) -> f64 {
    a.matrix.norm_squared()
}

/// `1 − Tr ρ²`.
pub fn linear_entropy(rho: &DensityOperator) -> f64 {
    1.0 - purity(rho)
}

/// Quadratic Rényi entropy `−log Tr ρ²`.
pub fn renyi2(rho: &DensityOperator, base: LogBase) -> f64 {
    -base.log(purity(rho))
}

/// Inverse participation ratio of `ρ` written in the eigenbasis of a
/// Hamiltonian with the given energies.
///
/// Energies closer than `1e-8 ·` (spectral range) are chained into
/// degenerate groups; every `ρ_mn ρ_nm` with `m, n` in one group survives.
pub fn ipr(rho: &DensityOperator, energies: &[f64]) -> Result<f64> {
    let d = rho.dim();
    if energies.len() != d {
        return Err(Error::invalid(format!(
            "{} energies given for dimension {d}",
            energies.len()
        )));
    }
    let group = degenerate_groups(energies);
    let m = rho.matrix();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if group[i] == group[j] {
                sum += (m[(i, j)] * m[(j, i)]).re;
            }
        }
    }
    Ok(sum)
}

/// Group label per energy; neighbours in sorted order closer than the
/// degeneracy tolerance share a label.
fn degenerate_groups(energies: &[f64]) -> Vec<usize> {
    let (lo, hi) = energies
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let tau = tol::DEGENERACY_REL * (hi - lo);
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let mut group = vec![0; energies.len()];
    let mut label = 0;
    for w in 1..order.len() {
        if energies[order[w]] - energies[order[w - 1]] > tau {
            label += 1;
        }
        group[order[w]] = label;
    }
    group
}

/// `Σ_{m≠n} |ρ_mn|²` in the operator's basis.
pub fn coherence2(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    let mut sum = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                sum += m[(i, j)].norm_sqr();
            }
        }
    }
    sum
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
pub fn hermitian_eigen(h: &DenseOperator) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let dev = h.hermiticity_deviation();
    if dev > tol::HERMITIAN {
        return Err(Error::NotHermitian(dev));
    }
    let sym = (h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(h.dim(), h.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// `exp(scale · H)` for Hermitian `H`, through its eigendecomposition.
pub fn hermitian_exp(h: &DenseOperator, scale: f64) -> Result<DenseOperator> {
    let (values, vectors) = hermitian_eigen(h)?;
    Ok(DenseOperator {
        layout: h.layout.clone(),
        matrix: spectral_function(&values, &vectors, |x| (scale * x).exp()),
    })
}

/// `V f(Λ) V⁺`.
pub(crate) fn spectral_function(
    values: &[f64],
    vectors: &DMatrix<C64>,
    f: impl Fn(f64) -> f64,
) -> DMatrix<C64> {
    let mut scaled = vectors.clone();
    for (c, &x) in values.iter().enumerate() {
        let mut col = scaled.column_mut(c);
        col *= C64::new(f(x), 0.0);
    }
    scaled * vectors.adjoint()
}
