use std::f64::consts::TAU;
use std::sync::Arc;

use nnls::fock::{FockState, SectorBasis};
use nnls::lattice::MomentumGrid;
use nnls::qoperators::{build_hamiltonian, build_momentum, build_number, max_abs, Coupling};
use nnls::spectra::*;

fn basis(l: f64, m: u32, n: usize, k: Option<i64>) -> Arc<SectorBasis> {
    Arc::new(SectorBasis::enumerate(MomentumGrid::new(l, m).unwrap(), n, k).unwrap())
}

fn coupling(c: f64) -> Coupling { Coupling::new(c).unwrap() }

/// Exact eigenvalue closest to `w` at coupling `c`.
fn level_near(b: &Arc<SectorBasis>, c: f64, w: f64) -> f64 {
    let spec = diagonalize(&build_hamiltonian(b, coupling(c))).unwrap();
    *spec
        .eigenvalues()
        .iter()
        .min_by(|a, b| (*a - w).abs().total_cmp(&(*b - w).abs()))
        .unwrap()
}

#[test]
fn series_energies_match_exact_level() {
    // |0,1⟩ is alone at energy 1 in the K=1 block
    let b = basis(TAU, 3, 2, Some(1));
    let reference = FockState::from_modes([0, 1]);
    let unit = ls_series(&b, &reference, coupling(1.0), 2).unwrap();
    assert_eq!(unit.on_shell_mask().iter().filter(|&&x| x).count(), 1);
    let e1 = unit.first_order_energy() - unit.reference_energy();
    let e2 = unit.energy_through(2) - unit.first_order_energy();

    let h = 1e-4;
    let (up, down) = (level_near(&b, h, 1.0), level_near(&b, -h, 1.0));
    let slope = (up - down) / (2.0 * h);
    assert!((slope - e1).abs() < 1e-6 * e1.abs());
    let h = 1e-2;
    let curv = (level_near(&b, h, 1.0) + level_near(&b, -h, 1.0) - 2.0) / (2.0 * h * h);
    assert!((curv - e2).abs() < 1e-3 * e2.abs(), "{curv} vs {e2}");
    assert!(e2 < 0.0, "second order shift of the lowest block state is negative");
}

#[test]
fn series_scales_with_coupling_power() {
    let b = basis(3.0, 3, 2, Some(0));
    let reference = FockState::from_modes([0, 0]);
    let a = ls_series(&b, &reference, coupling(0.5), 4).unwrap();
    let c = ls_series(&b, &reference, coupling(1.0), 4).unwrap();
    for l in 0..=4 {
        let ratio = c.term_norms()[l] / a.term_norms()[l];
        assert!((ratio - 2f64.powi(l as i32)).abs() < 1e-10 * ratio);
    }
}

#[test]
fn second_order_energy_error_is_cubic() {
    let b = basis(TAU, 3, 2, Some(0));
    let reference = FockState::from_modes([0, 0]);
    let err = |cpl: f64| {
        let series = ls_series(&b, &reference, coupling(cpl), 2).unwrap();
        (series.energy_through(2) - level_near(&b, cpl, 0.0)).abs()
    };
    let ratio = err(0.04) / err(0.02);
    assert!((ratio - 8.0).abs() < 0.5, "{ratio}");
}

#[test]
fn reference_outside_sector_is_rejected() {
    let b = basis(TAU, 2, 2, Some(0));
    assert!(ls_series(&b, &FockState::from_modes([0, 1]), coupling(1.0), 2).is_err());
}

#[test]
fn repulsive_sweep_is_variational() {
    let rows = convergence_sweep(5.0, 2, coupling(1.0), Some(0), &[2, 4, 8, 16], 3).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].dim > w[0].dim);
        for (hi, lo) in w[0].eigenvalues.iter().zip(&w[1].eigenvalues) {
            assert!(lo <= &(hi + 1e-12));
        }
    }
    assert!(convergence_sweep(5.0, 2, coupling(1.0), None, &[4, 2], 1).is_err());
}

#[test]
fn charges_commute_with_hamiltonian() {
    for n in [2, 3] {
        let b = basis(2.0, 4, n, None);
        let h = build_hamiltonian(&b, coupling(-1.3));
        assert!(max_abs(&h.commutator(&build_number(&b)).unwrap()) < 1e-12);
        assert!(max_abs(&h.commutator(&build_momentum(&b)).unwrap()) < 1e-12);
    }
}
