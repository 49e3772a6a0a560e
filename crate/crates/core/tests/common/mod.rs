//! Reference implementations written with explicit index loops, independent
//! of the library's partial trace and tensor product.

#![allow(dead_code)]

use nalgebra::DMatrix;
use entprod::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

fn index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Reduced matrix on the factors in `keep` (in the order given).
pub fn reduce(m: &DMatrix<C64>, dims: &[usize], keep: &[usize]) -> DMatrix<C64> {
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let mut out = DMatrix::<C64>::zeros(dk, dk);
    let d = m.nrows();
    for r in 0..d {
        let dr = digits(r, dims);
        for c in 0..d {
            let dc = digits(c, dims);
            let traced_equal = (0..dims.len())
                .filter(|k| !keep.contains(k))
                .all(|k| dr[k] == dc[k]);
            if !traced_equal {
                continue;
            }
            let rr: Vec<usize> = keep.iter().map(|&k| dr[k]).collect();
            let cc: Vec<usize> = keep.iter().map(|&k| dc[k]).collect();
            out[(index(&rr, &kept_dims), index(&cc, &kept_dims))] += m[(r, c)];
        }
    }
    out
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    DMatrix::from_fn(ra * rb, ca * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

pub fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `ln(||A|| |Tr A|^{n−1} / Π ||A_i||)` straight from the definition.
pub fn epsilon(m: &DMatrix<C64>, dims: &[usize], blocks: &[Vec<usize>]) -> f64 {
    let tr = m.trace().norm();
    let n = blocks.len() as f64;
    let ln_blocks: f64 = blocks.iter().map(|b| frobenius(&reduce(m, dims, b)).ln()).sum();
    frobenius(m).ln() + (n - 1.0) * tr.ln() - ln_blocks
}

/// `−ln Tr ρ²` for Hermitian `ρ`.
pub fn renyi2(m: &DMatrix<C64>) -> f64 {
    -(m.iter().map(|z| z.norm_sqr()).sum::<f64>()).ln()
}
