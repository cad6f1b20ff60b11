//! Sector matrices of the conserved charges, the Hamiltonian `H = H₀ + V`
//! and the parity operator.
//!
//! Every matrix is expressed in the unit-normalized occupation basis of a
//! [`SectorBasis`]. With `a(pₙ) = √L bₙ` the continuum Hamiltonian becomes
//!
//! ```text
//! H₀ = Σₙ pₙ² b†ₙ bₙ
//! V  = (c/L) Σ_{n₁+n₂=n₃+n₄} b†ₙ₁ b†ₙ₂ bₙ₃ bₙ₄
//! ```
//!
//! Quadruples leaving the retained mode window are dropped.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fock::{FockState, SectorBasis};
use crate::lattice::MomentumGrid;
use crate::{CMatrix, NnlsError, NnlsResult, C64};

/// Coupling constant `c` of the contact interaction; either sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling(f64);

impl Coupling {
    pub fn new(c: f64) -> NnlsResult<Self> {
        if !c.is_finite() {
            return Err(NnlsError::invalid(format!("coupling must be finite, got {c}")));
        }
        Ok(Self(c))
    }

    pub fn value(self) -> f64 { self.0 }
}

/// How a matrix was assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    MomentumSpace,
    PositionSpace,
    Composed,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MomentumSpace => "momentum_space",
            Self::PositionSpace => "position_space",
            Self::Composed => "composed",
        })
    }
}

/// Matrix of an operator restricted to one sector basis.
#[derive(Clone, Debug)]
pub struct SectorOperator {
    basis: Arc<SectorBasis>,
    matrix: CMatrix,
    provenance: Provenance,
}

impl SectorOperator {
    pub fn new(basis: Arc<SectorBasis>, matrix: CMatrix, provenance: Provenance) -> NnlsResult<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(NnlsError::DimensionMismatch(format!(
                "matrix is {}x{}, basis has dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { basis, matrix, provenance })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> { &self.basis }

    pub fn matrix(&self) -> &CMatrix { &self.matrix }

    pub fn into_matrix(self) -> CMatrix { self.matrix }

    pub fn provenance(&self) -> Provenance { self.provenance }

    pub fn dim(&self) -> usize { self.basis.dim() }

    fn check_same_basis(&self, other: &Self) -> NnlsResult<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis.states() == other.basis.states() {
            Ok(())
        } else {
            Err(NnlsError::DimensionMismatch(
                "operators live on different sector bases".into(),
            ))
        }
    }

    pub fn add(&self, other: &Self) -> NnlsResult<Self> {
        self.check_same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            matrix: &self.matrix + &other.matrix,
            provenance: Provenance::Composed,
        })
    }

    /// `self · other`
    pub fn compose(&self, other: &Self) -> NnlsResult<Self> {
        self.check_same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            matrix: &self.matrix * &other.matrix,
            provenance: Provenance::Composed,
        })
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> NnlsResult<CMatrix> {
        self.check_same_basis(other)?;
        Ok(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    /// Conjugate transpose in the occupation basis.
    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
            provenance: Provenance::Composed,
        }
    }

    /// Largest deviation from conjugate-transpose symmetry.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Non-zero entries as `(row, col, value)`.
    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let d = self.dim();
        let mut out = Vec::new();
        for r in 0..d {
            for c in 0..d {
                let v = self.matrix[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    out.push((r, c, v));
                }
            }
        }
        out
    }

    /// Matrix element `⟨bra| O |ket⟩` between basis states.
    pub fn element(&self, bra: &FockState, ket: &FockState) -> Option<C64> {
        let r = self.basis.index_of(bra)?;
        let c = self.basis.index_of(ket)?;
        Some(self.matrix[(r, c)])
    }
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

/// `‖a − b‖_F / max(‖b‖_F, tiny)`
pub fn relative_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn diagonal_operator(
    basis: &Arc<SectorBasis>,
    f: impl Fn(&FockState) -> f64,
) -> SectorOperator {
    let diag: Vec<C64> = basis.states().iter().map(|s| C64::new(f(s), 0.0)).collect();
    SectorOperator {
        basis: basis.clone(),
        matrix: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
        provenance: Provenance::MomentumSpace,
    }
}

/// `H₀ = Σ pₙ² b†ₙ bₙ`
pub fn build_h0(basis: &Arc<SectorBasis>) -> SectorOperator {
    let grid = *basis.grid();
    diagonal_operator(basis, |s| s.kinetic_energy(&grid))
}

/// `N = Σ b†ₙ bₙ`
pub fn build_number(basis: &Arc<SectorBasis>) -> SectorOperator {
    diagonal_operator(basis, |s| s.particle_number() as f64)
}

/// Field momentum `P = Σ pₙ b†ₙ bₙ`.
pub fn build_momentum(basis: &Arc<SectorBasis>) -> SectorOperator {
    let grid = *basis.grid();
    diagonal_operator(basis, |s| s.momentum(&grid))
}

/// Ordered mode pairs `(n₁, n₂)` grouped by `n₁ + n₂`, for one grid.
#[derive(Clone, Debug)]
pub struct PairChannels {
    by_total: HashMap<i32, Vec<(i32, i32)>>,
}

impl PairChannels {
    pub fn new(grid: &MomentumGrid) -> Self {
        let mut by_total: HashMap<i32, Vec<(i32, i32)>> = HashMap::new();
        for n1 in grid.modes() {
            for n2 in grid.modes() {
                by_total.entry(n1 + n2).or_default().push((n1, n2));
            }
        }
        Self { by_total }
    }

    pub fn pairs_with_total(&self, total: i32) -> &[(i32, i32)] {
        self.by_total.get(&total).map_or(&[], Vec::as_slice)
    }
}

fn distinct_modes(s: &FockState) -> Vec<i32> {
    s.occupations().into_iter().map(|(m, _)| m).collect()
}

/// `Σ_{n₁+n₂=n₃+n₄} b†ₙ₁ b†ₙ₂ bₙ₃ bₙ₄ |s⟩` as sparse `(target, amplitude)`.
fn apply_pair_hopping(s: &FockState, channels: &PairChannels) -> Vec<(FockState, f64)> {
    let mut out = Vec::new();
    for n4 in distinct_modes(s) {
        let (s4, a4) = s.apply_annihilation(n4).expect("occupied");
        for n3 in distinct_modes(&s4) {
            let (s3, a3) = s4.apply_annihilation(n3).expect("occupied");
            for &(n1, n2) in channels.pairs_with_total(n3 + n4) {
                let (s2, a2) = s3.apply_creation(n2);
                let (s1, a1) = s2.apply_creation(n1);
                out.push((s1, a1 * a2 * a3 * a4));
            }
        }
    }
    out
}

/// Contact interaction assembled from the momentum-conserving quadruple sum.
pub fn build_v_momentum(basis: &Arc<SectorBasis>, coupling: Coupling) -> SectorOperator {
    let channels = PairChannels::new(basis.grid());
    build_v_momentum_with(basis, coupling, &channels)
}

/// Same as [`build_v_momentum`] with a precomputed pair table, for reuse
/// across couplings and sectors on one grid.
pub fn build_v_momentum_with(
    basis: &Arc<SectorBasis>,
    coupling: Coupling,
    channels: &PairChannels,
) -> SectorOperator {
    let d = basis.dim();
    let scale = coupling.value() / basis.grid().box_length();
    let columns: Vec<Vec<(usize, f64)>> = basis
        .states()
        .par_iter()
        .map(|s| {
            let mut col: HashMap<usize, f64> = HashMap::new();
            for (t, amp) in apply_pair_hopping(s, channels) {
                // targets outside a momentum-filtered basis cannot occur
                let r = basis.index_of(&t).expect("pair hopping conserves momentum");
                *col.entry(r).or_default() += amp;
            }
            let mut col: Vec<(usize, f64)> = col.into_iter().collect();
            col.sort_unstable_by_key(|e| e.0);
            col
        })
        .collect();
    let mut matrix = CMatrix::zeros(d, d);
    for (c, col) in columns.into_iter().enumerate() {
        for (r, v) in col {
            matrix[(r, c)] = C64::new(scale * v, 0.0);
        }
    }
    SectorOperator { basis: basis.clone(), matrix, provenance: Provenance::MomentumSpace }
}

/// Contact interaction assembled in position space,
///
/// ```text
/// V = c ∫dx dy ψᵖ(x)ψᵖ(y) δ(x−y) ψ(y)ψ(x) → c Δx Σⱼ (ψⱼψⱼ)† (ψⱼψⱼ)
/// ψⱼ = L^{-1/2} Σₙ e^{i pₙ xⱼ} bₙ
/// ```
///
/// on a quadrature grid of `4M + 1` sites, where the quartic integrand is
/// integrated exactly. `ψᵖ(x)` is the ordinary conjugate of `ψ(x)` in the
/// occupation basis.
pub fn build_v_position(basis: &Arc<SectorBasis>, coupling: Coupling) -> SectorOperator {
    let grid = *basis.grid();
    let d = basis.dim();
    let n = basis.particle_number();
    if n < 2 || coupling.value() == 0.0 {
        return SectorOperator {
            basis: basis.clone(),
            matrix: CMatrix::zeros(d, d),
            provenance: Provenance::PositionSpace,
        };
    }
    let quad = grid.quartic_quadrature_grid();
    // pair removal ψⱼψⱼ leaves an unrestricted (n−2)-particle state
    let reduced = SectorBasis::enumerate(grid, n - 2, None).expect("valid sector");
    let dr = reduced.dim();
    let inv_len = 1.0 / grid.box_length();

    // b_{n3} b_{n4} |s⟩ for every basis column, grouped by n3 + n4
    let removals: Vec<Vec<(i32, usize, f64)>> = basis
        .states()
        .iter()
        .map(|s| {
            let mut out = Vec::new();
            for n4 in distinct_modes(s) {
                let (s4, a4) = s.apply_annihilation(n4).expect("occupied");
                for n3 in distinct_modes(&s4) {
                    let (s3, a3) = s4.apply_annihilation(n3).expect("occupied");
                    let r = reduced.index_of(&s3).expect("reduced sector is complete");
                    out.push((n3 + n4, r, a3 * a4));
                }
            }
            out
        })
        .collect();

    let partial: Vec<CMatrix> = (0..quad.len())
        .into_par_iter()
        .map(|j| {
            let x = quad.x(j);
            let mut pair = CMatrix::zeros(dr, d);
            for (c, terms) in removals.iter().enumerate() {
                for &(total, r, amp) in terms {
                    let phase = C64::from_polar(inv_len * amp, grid.momentum(total) * x);
                    pair[(r, c)] += phase;
                }
            }
            pair.adjoint() * pair
        })
        .collect();
    let mut matrix = CMatrix::zeros(d, d);
    for p in partial {
        matrix += p;
    }
    matrix *= C64::new(coupling.value() * quad.spacing(), 0.0);
    SectorOperator { basis: basis.clone(), matrix, provenance: Provenance::PositionSpace }
}

/// `H = H₀ + V` with `V` from the momentum-space construction.
pub fn build_hamiltonian(basis: &Arc<SectorBasis>, coupling: Coupling) -> SectorOperator {
    build_h0(basis)
        .add(&build_v_momentum(basis, coupling))
        .expect("same basis")
}

/// Parity permutation `|n₁,…,nₖ⟩ → |−n₁,…,−nₖ⟩`, with `𝒫|vac⟩ = |vac⟩`.
///
/// Parity maps total-momentum block `K` onto `−K`, so a filtered basis is
/// only closed under it for `K = 0`.
pub fn build_parity(basis: &Arc<SectorBasis>) -> NnlsResult<SectorOperator> {
    if let Some(k) = basis.momentum_filter() {
        if k != 0 {
            return Err(NnlsError::invalid(format!(
                "parity maps momentum block {k} to {}; use block 0 or an unfiltered basis",
                -k
            )));
        }
    }
    let d = basis.dim();
    let mut matrix = CMatrix::zeros(d, d);
    for (c, s) in basis.states().iter().enumerate() {
        let r = basis.index_of(&s.reflected()).expect("mode set is symmetric");
        matrix[(r, c)] = C64::new(1.0, 0.0);
    }
    Ok(SectorOperator { basis: basis.clone(), matrix, provenance: Provenance::MomentumSpace })
}
