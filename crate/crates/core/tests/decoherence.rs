mod common;

use entprod::decoherence::{
    decoherence_factor_lorentz, evolve, limit_measures, lorentz_evolve, marginal_norms_lorentz,
    measure_trajectory, BipartiteSpec, EvolutionMode, LorentzSpec,
};
use entprod::hilbert::{hs_norm, partial_trace, purity};
use entprod::{random, DensityOperator, LogBase, SpaceLayout, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const NAT: LogBase = LogBase::Natural;

fn random_spec(rng: &mut ChaCha8Rng, da: usize, db: usize) -> BipartiteSpec {
    let layout = SpaceLayout::new(vec![da, db]).unwrap();
    let rank = rng.random_range(1..=da * db);
    let rho = random::density(rng, layout, rank);
    let e = DMatrix::from_fn(da, db, |_, _| rng.random_range(-5.0..5.0));
    BipartiteSpec::new(e, rho).unwrap()
}

/// ε(ρ(0)) from the marginal sums `Σ_α ρ_{mα,nα}` and `Σ_n ρ_{nα,nβ}`.
fn initial_measure(spec: &BipartiteSpec) -> f64 {
    let (da, db) = (spec.dim_a(), spec.dim_b());
    let m = spec.rho0().matrix();
    let mut a = 0.0;
    for r in 0..da {
        for c in 0..da {
            let s: C64 = (0..db).map(|k| m[(r * db + k, c * db + k)]).sum();
            a += s.norm_sqr();
        }
    }
    let mut b = 0.0;
    for r in 0..db {
        for c in 0..db {
            let s: C64 = (0..da).map(|k| m[(k * db + r, k * db + c)]).sum();
            b += s.norm_sqr();
        }
    }
    0.5 * (m.norm_squared().ln() - a.ln() - b.ln())
}

#[test]
fn final_measure_dominates_initial() {
    let mut rng = common::rng(61);
    for _ in 0..1000 {
        let (da, db) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let spec = random_spec(&mut rng, da, db);
        let l = limit_measures(&spec, NAT);
        assert!(l.eps_inf >= l.eps0 - 1e-12, "{l:?}");
        assert!((l.eps0 - initial_measure(&spec)).abs() <= 1e-12);
    }
}

#[test]
fn purity_and_diagonal_are_conserved() {
    let mut rng = common::rng(62);
    for _ in 0..200 {
        let (da, db) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let spec = random_spec(&mut rng, da, db);
        let p0 = purity(spec.rho0());
        for _ in 0..5 {
            let t = rng.random_range(0.0..100.0);
            let rho = evolve(&spec, t);
            assert!((purity(&rho) - p0).abs() <= 1e-12);
            assert!((hs_norm(&rho) - hs_norm(spec.rho0())).abs() <= 1e-12);
            for k in 0..rho.dim() {
                assert_eq!(rho.matrix()[(k, k)], spec.rho0().matrix()[(k, k)]);
            }
        }
    }
}

#[test]
fn trajectory_starts_at_initial_measure() {
    let mut rng = common::rng(63);
    for _ in 0..50 {
        let spec = random_spec(&mut rng, 3, 2);
        let traj = measure_trajectory(&spec, &[0.0, 1.0], &EvolutionMode::Exact, NAT).unwrap();
        assert!((traj[0].epsilon - initial_measure(&spec)).abs() <= 1e-12);
    }
}

#[test]
fn diagonal_state_gives_flat_trajectory() {
    let layout = SpaceLayout::new(vec![2, 3]).unwrap();
    let diag = [0.3, 0.1, 0.05, 0.25, 0.2, 0.1];
    let rho = DensityOperator::new(entprod::DenseOperator::from_diagonal(layout, &diag).unwrap()).unwrap();
    let e = DMatrix::from_row_slice(2, 3, &[0.0, 1.3, 2.9, 0.4, 5.5, 7.1]);
    let spec = BipartiteSpec::new(e, rho).unwrap();
    let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.37).collect();
    let traj = measure_trajectory(&spec, &times, &EvolutionMode::Exact, NAT).unwrap();
    for p in &traj {
        assert_eq!(p.epsilon, traj[0].epsilon);
    }
    let l = limit_measures(&spec, NAT);
    assert!((l.eps0 - l.eps_inf).abs() <= 1e-15);
}

#[test]
fn lorentz_trajectory_reaches_final_measure() {
    let mut rng = common::rng(64);
    for _ in 0..50 {
        let (da, db) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let spec = random_spec(&mut rng, da, db);
        let l = LorentzSpec::uniform(da, db, rng.random_range(0.5..2.0)).unwrap();
        let times: Vec<f64> = (0..=40).map(|k| k as f64).collect();
        let traj = measure_trajectory(&spec, &times, &EvolutionMode::Lorentz(l), NAT).unwrap();
        let limits = limit_measures(&spec, NAT);
        assert!((traj[0].epsilon - limits.eps0).abs() <= 1e-12);
        assert!((traj.last().unwrap().epsilon - limits.eps_inf).abs() <= 1e-6);
    }
}

#[test]
fn lorentz_marginal_norms_match_partial_traces() {
    let mut rng = common::rng(65);
    for _ in 0..100 {
        let (da, db) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let spec = random_spec(&mut rng, da, db);
        let width = |d: usize, rng: &mut ChaCha8Rng| {
            let mut g = DMatrix::from_fn(d, d, |_, _| rng.random_range(0.0..3.0));
            for r in 0..d {
                g[(r, r)] = 0.0;
                for c in 0..r {
                    g[(r, c)] = g[(c, r)];
                }
            }
            g
        };
        let l = LorentzSpec::new(width(da, &mut rng), width(db, &mut rng)).unwrap();
        let t = rng.random_range(0.0..3.0);
        let rho_t = lorentz_evolve(&spec, &l, t).unwrap();
        let (na, nb) = marginal_norms_lorentz(&spec, &l, t).unwrap();
        let direct_a = hs_norm(&partial_trace(&rho_t, &[0]).unwrap()).powi(2);
        let direct_b = hs_norm(&partial_trace(&rho_t, &[1]).unwrap()).powi(2);
        assert!((na - direct_a).abs() <= 1e-10);
        assert!((nb - direct_b).abs() <= 1e-10);
    }
}

#[test]
fn lorentz_factors() {
    let g = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]);
    let d = decoherence_factor_lorentz(&g, 2.0).unwrap();
    assert!((d[(0, 1)] - (-1.0f64).exp()).abs() <= 1e-15);
    assert_eq!(d[(0, 0)], 1.0);
    assert_eq!(decoherence_factor_lorentz(&g, 0.0).unwrap(), DMatrix::from_element(2, 2, 1.0));
    assert!(decoherence_factor_lorentz(&g, 1e4).unwrap()[(1, 0)] == 0.0);
    assert!(decoherence_factor_lorentz(&g, -1.0).is_err());
}

#[test]
fn long_time_average_approaches_dephased_value() {
    let (da, db) = (2, 16);
    let layout = SpaceLayout::new(vec![da, db]).unwrap();
    let plus = DMatrix::from_element(2, 2, C64::new(0.5, 0.0));
    let mixed = DMatrix::<C64>::identity(db, db) / C64::new(db as f64, 0.0);
    let rho0 = DensityOperator::new(entprod::DenseOperator::new(layout, common::kron(&plus, &mixed)).unwrap()).unwrap();
    let mut rng = common::rng(66);
    let energies = DMatrix::from_fn(da, db, |_, _| rng.random_range(0.0..10.0));
    let mut flat: Vec<f64> = energies.iter().copied().collect();
    flat.sort_by(f64::total_cmp);
    let min_gap = flat.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let spec = BipartiteSpec::new(energies, rho0).unwrap();
    let times: Vec<f64> = (0..400)
        .map(|k| (1e3 + 9e3 * k as f64 / 399.0) / min_gap)
        .collect();
    let traj = measure_trajectory(&spec, &times, &EvolutionMode::Exact, NAT).unwrap();
    let average = traj.iter().map(|p| p.epsilon).sum::<f64>() / traj.len() as f64;
    let eps_inf = limit_measures(&spec, NAT).eps_inf;
    assert!((eps_inf - 0.5 * std::f64::consts::LN_2).abs() <= 1e-12);
    assert!((average - eps_inf).abs() <= 5e-2, "{average} vs {eps_inf}");
}

#[test]
fn malformed_specs_are_rejected() {
    let rho = DensityOperator::maximally_mixed(SpaceLayout::new(vec![2, 2]).unwrap());
    assert!(BipartiteSpec::new(DMatrix::zeros(2, 3), rho.clone()).is_err());
    assert!(LorentzSpec::new(DMatrix::from_element(2, 2, 1.0), DMatrix::zeros(2, 2)).is_err());
    let spec = BipartiteSpec::new(DMatrix::zeros(2, 2), rho).unwrap();
    assert!(measure_trajectory(&spec, &[1.0, 0.5], &EvolutionMode::Exact, NAT).is_err());
}
