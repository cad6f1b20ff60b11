//! Exact diagonalization of sector Hamiltonians, the Lippmann–Schwinger
//! series with a reduced resolvent, and cutoff sweeps.

use std::sync::Arc;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::Serialize;

use crate::fock::{FockState, SectorBasis};
use crate::lattice::MomentumGrid;
use crate::qoperators::{build_h0, build_hamiltonian, build_v_momentum, Coupling, SectorOperator};
use crate::{CMatrix, CVector, NnlsError, NnlsResult, C64};

/// Residual bound for every reported eigenpair.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

/// Largest sector handled by the dense solver.
pub const DENSE_LIMIT: usize = 4000;

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    basis: Arc<SectorBasis>,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    residuals: Vec<f64>,
}

impl SpectrumResult {
    pub fn basis(&self) -> &Arc<SectorBasis> { &self.basis }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] { &self.eigenvalues }

    /// Column `i` belongs to `eigenvalues()[i]`.
    pub fn eigenvectors(&self) -> &CMatrix { &self.eigenvectors }

    pub fn residuals(&self) -> &[f64] { &self.residuals }

    pub fn ground_energy(&self) -> Option<f64> { self.eigenvalues.first().copied() }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Dense Hermitian eigendecomposition with a per-pair residual check.
pub fn diagonalize(h: &SectorOperator) -> NnlsResult<SpectrumResult> {
    let d = h.dim();
    if d > DENSE_LIMIT {
        return Err(NnlsError::invalid(format!(
            "sector dimension {d} exceeds the dense limit {DENSE_LIMIT}"
        )));
    }
    if d == 0 {
        return Ok(SpectrumResult {
            basis: h.basis().clone(),
            eigenvalues: vec![],
            eigenvectors: CMatrix::zeros(0, 0),
            residuals: vec![],
        });
    }
    let eig = SymmetricEigen::new(h.matrix().clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    let residuals: Vec<f64> = (0..d)
        .map(|i| {
            let v = eigenvectors.column(i);
            let hv = h.matrix() * v;
            (hv - v * C64::new(eigenvalues[i], 0.0)).norm() / v.norm()
        })
        .collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if !(worst < EIGEN_RESIDUAL_TOL) {
        return Err(NnlsError::EigenResidual { residual: worst, tol: EIGEN_RESIDUAL_TOL });
    }
    Ok(SpectrumResult { basis: h.basis().clone(), eigenvalues, eigenvectors, residuals })
}

/// Eigenvalues from a general (non-Hermitian) Schur decomposition, as a check
/// that the spectrum is real without assuming it. Returns `max |Im λ|`.
pub fn max_imaginary_eigenvalue(m: &CMatrix) -> NnlsResult<f64> {
    let ev = m.eigenvalues().ok_or(NnlsError::NonConvergence {
        iterations: 0,
        residual: f64::NAN,
    })?;
    Ok(ev.iter().fold(0.0, |acc, v| acc.max(v.im.abs())))
}

/// `|E − w| ≤ 1e−9 max(1, |w|)`
pub fn is_on_shell(energy: f64, reference: f64) -> bool {
    (energy - reference).abs() <= 1e-9 * reference.abs().max(1.0)
}

/// Terms `[R₀ V]ˡ |ref⟩` of the Lippmann–Schwinger series, where `R₀` is the
/// free resolvent at the reference energy with the on-shell subspace
/// projected out.
#[derive(Clone, Debug, Serialize)]
pub struct PerturbationSeries {
    #[serde(skip)]
    basis: Arc<SectorBasis>,
    #[serde(skip)]
    v: CMatrix,
    reference: FockState,
    reference_index: usize,
    reference_energy: f64,
    #[serde(skip)]
    terms: Vec<CVector>,
    #[serde(skip)]
    on_shell: Vec<bool>,
    /// `‖P_on V term(ℓ−1)‖` for `ℓ = 1..=order`; what the reduced resolvent
    /// discarded at each order.
    on_shell_norms: Vec<f64>,
    term_norms: Vec<f64>,
}

impl PerturbationSeries {
    pub fn reference(&self) -> &FockState { &self.reference }

    pub fn reference_energy(&self) -> f64 { self.reference_energy }

    pub fn order(&self) -> usize { self.terms.len() - 1 }

    pub fn terms(&self) -> &[CVector] { &self.terms }

    pub fn on_shell_norms(&self) -> &[f64] { &self.on_shell_norms }

    pub fn term_norms(&self) -> &[f64] { &self.term_norms }

    pub fn basis(&self) -> &Arc<SectorBasis> { &self.basis }

    /// Mask of basis states degenerate with the reference.
    pub fn on_shell_mask(&self) -> &[bool] { &self.on_shell }

    /// `Σ_{ℓ ≤ order} term(ℓ)`
    pub fn partial_sum(&self, order: usize) -> CVector {
        let mut acc = CVector::zeros(self.basis.dim());
        for t in self.terms.iter().take(order + 1) {
            acc += t;
        }
        acc
    }

    /// `w + Σ_{ℓ < order} ⟨ref|V|term(ℓ)⟩`.
    ///
    /// Occupation states are orthonormal under the parity pairing, so the
    /// reference bra is the plain coordinate functional. This is the
    /// Brillouin–Wigner energy at the unperturbed energy; it agrees with
    /// Rayleigh–Schrödinger through second order.
    pub fn energy_through(&self, order: usize) -> f64 {
        let r = self.reference_index;
        let shift: C64 = self
            .terms
            .iter()
            .take(order)
            .map(|t| (self.v.row(r) * t)[(0, 0)])
            .sum();
        self.reference_energy + shift.re
    }

    /// First-order energy `w + ⟨ref|V|ref⟩`.
    pub fn first_order_energy(&self) -> f64 { self.energy_through(1) }
}

/// Builds the series up to `order` on `basis`, which must contain the
/// reference state.
pub fn ls_series(
    basis: &Arc<SectorBasis>,
    reference: &FockState,
    coupling: Coupling,
    order: usize,
) -> NnlsResult<PerturbationSeries> {
    let reference_index = basis.index_of(reference).ok_or_else(|| {
        NnlsError::invalid(format!("reference state {reference} is not in the sector"))
    })?;
    let h0 = build_h0(basis);
    let v = build_v_momentum(basis, coupling).into_matrix();
    let w = reference.kinetic_energy(basis.grid());
    let d = basis.dim();
    let energies: Vec<f64> = (0..d).map(|i| h0.matrix()[(i, i)].re).collect();
    let on_shell: Vec<bool> = energies.iter().map(|&e| is_on_shell(e, w)).collect();

    let mut first = CVector::zeros(d);
    first[reference_index] = C64::new(1.0, 0.0);
    let mut terms = vec![first];
    let mut on_shell_norms = Vec::with_capacity(order);
    for _ in 0..order {
        let mut next = &v * terms.last().expect("non-empty");
        let mut discarded = 0.0;
        for i in 0..d {
            if on_shell[i] {
                discarded += next[i].norm_sqr();
                next[i] = C64::new(0.0, 0.0);
            } else {
                next[i] /= w - energies[i];
            }
        }
        on_shell_norms.push(discarded.sqrt());
        terms.push(next);
    }
    let term_norms = terms.iter().map(|t| t.norm()).collect();
    Ok(PerturbationSeries {
        basis: basis.clone(),
        v,
        reference: reference.clone(),
        reference_index,
        reference_energy: w,
        terms,
        on_shell,
        on_shell_norms,
        term_norms,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub mode_cutoff: u32,
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
}

/// Lowest `levels` eigenvalues of the `n`-particle sector (optionally one
/// momentum block) for each cutoff in ascending order. Cutoffs run in
/// parallel.
pub fn convergence_sweep(
    box_length: f64,
    particle_number: usize,
    coupling: Coupling,
    momentum_block: Option<i64>,
    cutoffs: &[u32],
    levels: usize,
) -> NnlsResult<Vec<SweepRow>> {
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NnlsError::invalid("cutoffs must be strictly ascending"));
    }
    cutoffs
        .par_iter()
        .map(|&m| {
            let grid = MomentumGrid::new(box_length, m)?;
            let basis = Arc::new(SectorBasis::enumerate(grid, particle_number, momentum_block)?);
            let spec = diagonalize(&build_hamiltonian(&basis, coupling))?;
            Ok(SweepRow {
                mode_cutoff: m,
                dim: basis.dim(),
                eigenvalues: spec.eigenvalues().iter().take(levels).copied().collect(),
            })
        })
        .collect()
}
