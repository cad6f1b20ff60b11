use std::collections::HashMap;
use std::sync::Arc;

use nnls::fock::{FockState, SectorBasis};
use nnls::lattice::{MomentumGrid, SpectralTransform};
use nnls::qoperators::build_number;
use nnls::C64;
use proptest::prelude::*;

proptest! {
    #[test]
    fn parseval(len in 0.5f64..30.0, m in 1u32..20, seed in any::<u64>()) {
        let mg = MomentumGrid::new(len, m).unwrap();
        let pg = mg.position_grid();
        let tr = SpectralTransform::new(pg);
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let samples: Vec<C64> = (0..pg.len()).map(|_| C64::new(next(), next())).collect();
        let modes = tr.to_modes(&samples);
        let lhs: f64 = samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * pg.spacing();
        let rhs: f64 = modes.iter().map(|v| v.norm_sqr()).sum::<f64>() / len;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300));
    }

    #[test]
    fn momenta_closed_under_negation(len in 0.1f64..100.0, m in 1u32..50) {
        let g = MomentumGrid::new(len, m).unwrap();
        let mut p: Vec<f64> = g.modes().map(|n| g.momentum(n)).collect();
        let mut q: Vec<f64> = p.iter().map(|x| -x).collect();
        p.sort_by(f64::total_cmp);
        q.sort_by(f64::total_cmp);
        prop_assert_eq!(p, q);
        prop_assert_eq!(g.mode_count(), 2 * m as usize + 1);
    }
}

fn basis(m: u32, n: usize) -> Arc<SectorBasis> {
    Arc::new(SectorBasis::enumerate(MomentumGrid::new(1.7, m).unwrap(), n, None).unwrap())
}

/// Matrix of b†ₖ from the n-particle sector into the (n+1)-particle sector.
fn creation_matrix(from: &SectorBasis, to: &SectorBasis, k: i32) -> nnls::CMatrix {
    let mut m = nnls::CMatrix::zeros(to.dim(), from.dim());
    for (c, s) in from.states().iter().enumerate() {
        let (t, a) = s.apply_creation(k);
        m[(to.index_of(&t).unwrap(), c)] = C64::new(a, 0.0);
    }
    m
}

#[test]
fn number_raises_with_creation() {
    for n in 0..3 {
        let (lo, hi) = (basis(2, n), basis(2, n + 1));
        let (nlo, nhi) = (build_number(&lo), build_number(&hi));
        for k in -2..=2 {
            let c = creation_matrix(&lo, &hi, k);
            let comm = nhi.matrix() * &c - &c * nlo.matrix();
            assert!((comm - &c).norm() < 1e-14);
        }
    }
}

#[test]
fn number_is_diagonal_with_eigenvalue_n() {
    for n in 0..4 {
        let b = basis(2, n);
        let nm = build_number(&b);
        let want = nnls::CMatrix::identity(b.dim(), b.dim()) * C64::new(n as f64, 0.0);
        assert_eq!(nm.matrix(), &want);
    }
}

#[test]
fn continuum_commutator_on_single_particle_states() {
    // [a(pₙ), a⁺(pₘ)] |q⟩ = L [n = m] |q⟩ with a = √L b
    let grid = MomentumGrid::new(2.3, 2).unwrap();
    let s = grid.continuum_scale();
    for q in grid.modes() {
        let ket = FockState::from_modes([q]);
        for n in grid.modes() {
            for m in grid.modes() {
                let mut acc: HashMap<FockState, f64> = HashMap::new();
                let (t, a1) = ket.apply_creation(m);
                if let Some((t2, a2)) = t.apply_annihilation(n) {
                    *acc.entry(t2).or_default() += s * s * a1 * a2;
                }
                if let Some((t, a1)) = ket.apply_annihilation(n) {
                    let (t2, a2) = t.apply_creation(m);
                    *acc.entry(t2).or_default() -= s * s * a1 * a2;
                }
                let want = if n == m { grid.momentum_delta() } else { 0.0 };
                let got = acc.get(&ket).copied().unwrap_or(0.0);
                assert!((got - want).abs() < 1e-12);
                for (state, v) in &acc {
                    if *state != ket {
                        assert!(v.abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn enumeration_is_deterministic_and_filters_partition() {
    let g = MomentumGrid::new(1.0, 3).unwrap();
    let a = SectorBasis::enumerate(g, 3, None).unwrap();
    let b = SectorBasis::enumerate(g, 3, None).unwrap();
    assert_eq!(a.states(), b.states());
    let total: usize = SectorBasis::momentum_blocks(&g, 3)
        .into_iter()
        .map(|k| SectorBasis::enumerate(g, 3, Some(k)).unwrap().dim())
        .sum();
    assert_eq!(total, a.dim());
    for w in a.states().windows(2) {
        assert!(w[0] < w[1]);
    }
}
