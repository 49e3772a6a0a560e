//! Random operators for property tests and examples.
//!
//! Every function takes the generator explicitly so callers control seeding.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{tensor_product, DenseOperator, DensityOperator, Partition, SpaceLayout};
use crate::{Result, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Complex Ginibre matrix with i.i.d. standard normal entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed `d×d` unitary.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<C64> {
    let qr = ginibre(rng, d, d).qr();
    let r = qr.r();
    let mut q = qr.q();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { C64::new(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Unit vector drawn uniformly from the sphere.
pub fn pure_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DVector<C64> {
    let v = DVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, layout: SpaceLayout) -> DenseOperator {
    let d = layout.total_dim();
    let g = ginibre(rng, d, d);
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    DenseOperator::new(layout, h).expect("dimension matches layout")
}

/// `G G⁺ / Tr(G G⁺)` with `G` of shape `d × rank`.
pub fn density<R: Rng + ?Sized>(rng: &mut R, layout: SpaceLayout, rank: usize) -> DensityOperator {
    let d = layout.total_dim();
    let g = ginibre(rng, d, rank.max(1));
    let m = &g * g.adjoint();
    let tr = m.trace();
    let op = DenseOperator::new(layout, m / tr).expect("dimension matches layout");
    DensityOperator::trusted(op)
}

/// `⊗_blocks U_b`, each `U_b` Haar on its block, laid out in the original
/// factor order.
pub fn local_unitary<R: Rng + ?Sized>(
    rng: &mut R,
    layout: &SpaceLayout,
    partition: &Partition,
) -> Result<DenseOperator> {
    partition.check_layout(layout)?;
    let mut product: Option<DenseOperator> = None;
    for block in partition.blocks() {
        let sub = layout.select(block);
        let u = DenseOperator::new(sub.clone(), unitary(rng, sub.total_dim()))?;
        product = Some(match product {
            None => u,
            Some(acc) => tensor_product(&acc, &u),
        });
    }
    let product = product.expect("partition has at least one block");
    let flat: Vec<usize> = partition.blocks().iter().flatten().copied().collect();
    let mut order = vec![0; flat.len()];
    for (k, &f) in flat.iter().enumerate() {
        order[f] = k;
    }
    product.permute_factors(&order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = unitary(&mut rng, 5);
        let err = (&u * u.adjoint() - DMatrix::<C64>::identity(5, 5)).norm();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn density_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let layout = SpaceLayout::new(vec![2, 3]).unwrap();
        let rho = density(&mut rng, layout, 3);
        assert!(DensityOperator::validate(&rho).is_valid());
    }

    #[test]
    fn local_unitary_respects_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let layout = SpaceLayout::new(vec![2, 3, 2]).unwrap();
        let p = Partition::new(vec![vec![0, 2], vec![1]], 3).unwrap();
        let u = local_unitary(&mut rng, &layout, &p).unwrap();
        let err = (u.matrix() * u.matrix().adjoint() - DMatrix::<C64>::identity(12, 12)).norm();
        assert!(err < 1e-12);
        assert_eq!(u.layout(), &layout);
    }
}
