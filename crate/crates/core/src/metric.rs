//! Dirac and parity pairings on Fock states.
//!
//! Continuum Fock states are `|k₁…kₙ⟩ = a⁺(k₁)⋯a⁺(kₙ)|vac⟩` with
//! `a = √L b`. Under the naive adjoint `a⁺ʰ(p) = a(−p)` the bra of `|p⟩`
//! annihilates `−p`, which makes every state of nonzero momentum null.
//! Inserting parity flips the ket once more and restores the usual bosonic
//! Gram matrix. Both pairings are evaluated from the commutation algebra by
//! [`wick_vev`].

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::fock::{FockState, SectorBasis};
use crate::qoperators::{Provenance, SectorOperator};
use crate::{CMatrix, NnlsError, NnlsResult, C64};

/// One factor of an operator string acting on unit-normalized modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create(i32),
    Annihilate(i32),
}

/// `⟨vac| O₁ O₂ ⋯ Oₖ |vac⟩` for a string of ladder operators.
///
/// The leftmost annihilator is commuted to the right; each creator it
/// passes with the same mode contributes `[bₙ, b†ₙ] = 1` times the
/// expectation of the remaining string. A creator in leftmost position
/// gives zero. For `bₘ₁⋯bₘₖ b†ₙ₁⋯b†ₙₖ` this is the permanent of
/// `[mᵢ = nⱼ]`.
pub fn wick_vev(ops: &[Ladder]) -> C64 {
    let creators = ops.iter().filter(|o| matches!(o, Ladder::Create(_))).count();
    if 2 * creators != ops.len() {
        return C64::new(0.0, 0.0);
    }
    C64::new(contract(ops) as f64, 0.0)
}

fn contract(ops: &[Ladder]) -> u64 {
    let Some((first, rest)) = ops.split_first() else {
        return 1;
    };
    let Ladder::Annihilate(m) = *first else {
        return 0;
    };
    let mut total = 0;
    for (k, op) in rest.iter().enumerate() {
        if *op == Ladder::Create(m) {
            let mut remaining = Vec::with_capacity(rest.len() - 1);
            remaining.extend_from_slice(&rest[..k]);
            remaining.extend_from_slice(&rest[k + 1..]);
            total += contract(&remaining);
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingKind {
    Dirac,
    Parity,
}

impl std::str::FromStr for PairingKind {
    type Err = NnlsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dirac" => Ok(Self::Dirac),
            "parity" => Ok(Self::Parity),
            other => Err(NnlsError::invalid(format!("unknown pairing kind `{other}`"))),
        }
    }
}

/// Pairing of the continuum Fock states `a⁺(k₁)⋯a⁺(kₙ)|vac⟩` of one sector.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    basis: Arc<SectorBasis>,
    kind: PairingKind,
    matrix: CMatrix,
}

impl GramMatrix {
    pub fn basis(&self) -> &Arc<SectorBasis> { &self.basis }

    pub fn kind(&self) -> PairingKind { self.kind }

    pub fn matrix(&self) -> &CMatrix { &self.matrix }

    /// The same pairing expressed on unit-normalized occupation states.
    pub fn in_occupation_basis(&self) -> CMatrix {
        let len = self.basis.grid().box_length();
        let n = self.basis.particle_number() as i32;
        let scale: Vec<f64> = self
            .basis
            .states()
            .iter()
            .map(|s| 1.0 / (len.powi(n) * s.occupation_factorial()).sqrt())
            .collect();
        let d = self.basis.dim();
        CMatrix::from_fn(d, d, |r, c| self.matrix[(r, c)] * scale[r] * scale[c])
    }
}

fn bra_string(bra: &FockState) -> impl Iterator<Item = Ladder> + '_ {
    // ⟨vac| a⁺ʰ(pₙ)⋯a⁺ʰ(p₁) with a⁺ʰ(p) = a(−p)
    bra.modes().iter().rev().map(|&p| Ladder::Annihilate(-p))
}

/// Pairing `⟨bra|ket⟩` (Dirac) or `⟨bra|𝒫|ket⟩` (parity) between two
/// continuum Fock states on a ring of length `box_length`.
pub fn pairing(bra: &FockState, ket: &FockState, kind: PairingKind, box_length: f64) -> C64 {
    if bra.particle_number() != ket.particle_number() {
        return C64::new(0.0, 0.0);
    }
    let sign = match kind {
        PairingKind::Dirac => 1,
        PairingKind::Parity => -1,
    };
    let ops: Vec<Ladder> = bra_string(bra)
        .chain(ket.modes().iter().map(|&q| Ladder::Create(sign * q)))
        .collect();
    wick_vev(&ops) * box_length.powi(ket.particle_number() as i32)
}

pub fn gram(basis: &Arc<SectorBasis>, kind: PairingKind) -> GramMatrix {
    let d = basis.dim();
    let len = basis.grid().box_length();
    let states = basis.states();
    let matrix =
        DMatrix::from_fn(d, d, |r, c| pairing(&states[r], &states[c], kind, len));
    GramMatrix { basis: basis.clone(), kind, matrix }
}

/// Eigenvalues of the single-particle Dirac Gram matrix, ascending.
pub fn dirac_gram_spectrum(basis: &Arc<SectorBasis>) -> NnlsResult<Vec<f64>> {
    if basis.particle_number() != 1 || basis.momentum_filter().is_some() {
        return Err(NnlsError::invalid(
            "Dirac Gram spectrum is defined on the full single-particle sector",
        ));
    }
    let g = gram(basis, PairingKind::Dirac);
    let real = g.matrix().map(|v| v.re);
    let mut ev: Vec<f64> = SymmetricEigen::new(real).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Parity adjoint `𝒫 O† 𝒫`.
pub fn p_adjoint(op: &SectorOperator, parity: &SectorOperator) -> NnlsResult<SectorOperator> {
    if op.dim() != parity.dim() {
        return Err(NnlsError::DimensionMismatch(format!(
            "operator dimension {} vs parity dimension {}",
            op.dim(),
            parity.dim()
        )));
    }
    let m = parity.matrix() * op.matrix().adjoint() * parity.matrix();
    SectorOperator::new(op.basis().clone(), m, Provenance::Composed)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use super::*;
    use crate::lattice::MomentumGrid;
    use crate::qoperators::{build_hamiltonian, build_number, build_parity, max_abs, Coupling};

    use Ladder::{Annihilate as A, Create as C};

    fn basis(l: f64, m: u32, n: usize) -> Arc<SectorBasis> {
        Arc::new(SectorBasis::enumerate(MomentumGrid::new(l, m).unwrap(), n, None).unwrap())
    }

    #[test]
    fn vev_examples() {
        assert_eq!(wick_vev(&[A(1), C(1)]).re, 1.0);
        assert_eq!(wick_vev(&[A(1), C(2)]).re, 0.0);
        assert_eq!(wick_vev(&[A(3), A(3), C(3), C(3)]).re, 2.0);
        assert_eq!(wick_vev(&[C(3)]).re, 0.0);
        assert_eq!(wick_vev(&[C(3), A(3)]).re, 0.0);
        assert_eq!(wick_vev(&[]).re, 1.0);
        // b b† b b† = (1 + b† b) b b† ... on vacuum: 1
        assert_eq!(wick_vev(&[A(0), C(0), A(0), C(0)]).re, 1.0);
        assert_eq!(wick_vev(&[A(1), A(1), A(1), C(1), C(1), C(1)]).re, 6.0);
    }

    #[test]
    fn single_particle_pairings() {
        let l = 2.5;
        let p = FockState::from_modes([2]);
        let mp = FockState::from_modes([-2]);
        assert_eq!(pairing(&p, &p, PairingKind::Dirac, l).re, 0.0);
        assert_eq!(pairing(&p, &mp, PairingKind::Dirac, l).re, l);
        assert_eq!(pairing(&p, &p, PairingKind::Parity, l).re, l);
        assert_eq!(pairing(&p, &mp, PairingKind::Parity, l).re, 0.0);
        let z = FockState::from_modes([0]);
        assert_eq!(pairing(&z, &z, PairingKind::Dirac, l).re, l);
    }

    #[test]
    fn gram_spectrum_small() {
        let ev = dirac_gram_spectrum(&basis(TAU, 1, 1)).unwrap();
        let want = [-TAU, TAU, TAU];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let ev = dirac_gram_spectrum(&basis(1.0, 2, 1)).unwrap();
        let want = [-1.0, -1.0, 1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let g = gram(&basis(1.7, 3, 1), PairingKind::Dirac);
        assert!((g.matrix().trace().re - 1.7).abs() < 1e-15);
        assert!(dirac_gram_spectrum(&basis(1.0, 2, 2)).is_err());
    }

    #[test]
    fn parity_gram_multiplicities() {
        let b = basis(1.3, 2, 3);
        let g = gram(&b, PairingKind::Parity);
        let l3 = 1.3f64.powi(3);
        for (i, s) in b.states().iter().enumerate() {
            let want = l3 * s.occupation_factorial();
            assert!((g.matrix()[(i, i)].re - want).abs() < 1e-12);
        }
        let off = g.matrix() - CMatrix::from_diagonal(&g.matrix().diagonal());
        assert_eq!(max_abs(&off), 0.0);
        let occ = g.in_occupation_basis();
        assert!(max_abs(&(occ - CMatrix::identity(b.dim(), b.dim()))) < 1e-14);
    }

    #[test]
    fn dirac_is_parity_composed_with_reflection() {
        let b = basis(0.9, 2, 2);
        let gd = gram(&b, PairingKind::Dirac);
        let gp = gram(&b, PairingKind::Parity);
        let par = build_parity(&b).unwrap();
        assert_eq!(max_abs(&(gd.matrix() - par.matrix() * gp.matrix())), 0.0);
        for (i, s) in b.states().iter().enumerate() {
            if s.total_momentum_index() != 0 {
                assert_eq!(gd.matrix()[(i, i)], C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn parity_adjoint() {
        let b = basis(TAU, 3, 2);
        let par = build_parity(&b).unwrap();
        for &cv in &[1.0, -1.0] {
            let h = build_hamiltonian(&b, Coupling::new(cv).unwrap());
            let hp = p_adjoint(&h, &par).unwrap();
            assert!(max_abs(&(hp.matrix() - h.matrix())) < 1e-12);
        }
        let n = build_number(&b);
        assert!(max_abs(&(p_adjoint(&n, &par).unwrap().matrix() - n.matrix())) < 1e-12);
        let other = basis(TAU, 2, 2);
        assert!(p_adjoint(&build_number(&other), &par).is_err());
    }

    #[test]
    fn parity_adjoint_is_involution() {
        let b = basis(1.0, 1, 2);
        let par = build_parity(&b).unwrap();
        let d = b.dim();
        let m = CMatrix::from_fn(d, d, |r, c| C64::new(r as f64 + 0.3 * c as f64, (r * c) as f64 - 1.0));
        let op = SectorOperator::new(b.clone(), m.clone(), Provenance::Composed).unwrap();
        let twice = p_adjoint(&p_adjoint(&op, &par).unwrap(), &par).unwrap();
        assert!(max_abs(&(twice.matrix() - m)) < 1e-14);
    }
}
