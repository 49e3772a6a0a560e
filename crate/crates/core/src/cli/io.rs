//! JSON file formats read and written by the command-line tool.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::decoherence::{BipartiteSpec, LorentzSpec};
use crate::hilbert::{DenseOperator, DensityOperator, Partition, SpaceLayout};
use crate::{Error, Result, C64};

/// Operator on `⊗ C^{dims[i]}` as real and imaginary row-major matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
}

impl StateFile {
    pub fn from_operator(op: &DenseOperator, partition: Option<&Partition>) -> StateFile {
        let m = op.matrix();
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect())
                .collect()
        };
        StateFile {
            dims: op.layout().dims().to_vec(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
            partition: partition.map(|p| p.blocks().to_vec()),
        }
    }

    pub fn operator(&self) -> Result<DenseOperator> {
        let layout = SpaceLayout::new(self.dims.clone())?;
        let matrix = complex_matrix(&self.re, &self.im, layout.total_dim(), "re/im")?;
        DenseOperator::new(layout, matrix)
    }

    /// The stored partition, checked against `dims`.
    pub fn partition(&self) -> Result<Option<Partition>> {
        self.partition
            .as_ref()
            .map(|blocks| Partition::new(blocks.clone(), self.dims.len()))
            .transpose()
    }
}

/// Input of the `decohere` command.
///
/// `energies[a][b]` is the product-basis eigenvalue `E_{ab}`. Lorentz mode
/// needs either full `gamma_a`/`gamma_b` matrices or a uniform `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceFile {
    pub dims: [usize; 2],
    pub energies: Vec<Vec<f64>>,
    pub rho0: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_b: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl DecoherenceFile {
    pub fn spec(&self) -> Result<BipartiteSpec> {
        let [da, db] = self.dims;
        let layout = SpaceLayout::new(vec![da, db])?;
        let energies = real_matrix(&self.energies, da, db, "energies")?;
        let rho = complex_matrix(&self.rho0.re, &self.rho0.im, da * db, "rho0")?;
        let rho0 = DensityOperator::new(DenseOperator::new(layout, rho)?)?;
        BipartiteSpec::new(energies, rho0)
    }

    pub fn lorentz(&self) -> Result<LorentzSpec> {
        let [da, db] = self.dims;
        match (&self.gamma_a, &self.gamma_b, self.gamma) {
            (Some(a), Some(b), None) => LorentzSpec::new(
                real_matrix(a, da, da, "gamma_a")?,
                real_matrix(b, db, db, "gamma_b")?,
            ),
            (None, None, Some(g)) => LorentzSpec::uniform(da, db, g),
            (None, None, None) => Err(Error::Invalid(
                "lorentz mode needs gamma or gamma_a and gamma_b".into(),
            )),
            _ => Err(Error::Invalid(
                "give either gamma or both gamma_a and gamma_b".into(),
            )),
        }
    }
}

fn real_matrix(rows: &[Vec<f64>], nr: usize, nc: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != nr || rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Invalid(format!("{what} must be {nr}×{nc}")));
    }
    Ok(DMatrix::from_fn(nr, nc, |r, c| rows[r][c]))
}

fn complex_matrix(re: &[Vec<f64>], im: &[Vec<f64>], d: usize, what: &str) -> Result<DMatrix<C64>> {
    let re = real_matrix(re, d, d, what)?;
    let im = real_matrix(im, d, d, what)?;
    Ok(DMatrix::from_fn(d, d, |r, c| C64::new(re[(r, c)], im[(r, c)])))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Invalid(format!("malformed {}: {e}", path.display())))
}
