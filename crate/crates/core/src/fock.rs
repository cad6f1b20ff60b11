//! Bosonic occupation states on the truncated mode set and fixed-`n`
//! sector bases.
//!
//! Ladder operators act on unit-normalized modes `bₙ`, `[bₙ, b†ₘ] = [n = m]`.
//! Continuum operators are `a(pₙ) = √L bₙ` (see [`crate::lattice`]).

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::lattice::MomentumGrid;
use crate::{NnlsError, NnlsResult};

/// Occupation configuration stored canonically as the sorted multiset of
/// occupied mode labels (`[-1, 2, 2]` is one particle in `n=-1` and two in
/// `n=2`). The empty multiset is the vacuum.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct FockState {
    modes: Vec<i32>,
}

impl FockState {
    pub fn vacuum() -> Self { Self::default() }

    /// Builds the state `b†ₙ₁ ⋯ b†ₙₖ |vac⟩` (up to normalization) from any
    /// ordering of mode labels.
    pub fn from_modes<I: IntoIterator<Item = i32>>(modes: I) -> Self {
        let mut modes: Vec<i32> = modes.into_iter().collect();
        modes.sort_unstable();
        Self { modes }
    }

    /// Sorted occupied mode labels, repeated by multiplicity.
    pub fn modes(&self) -> &[i32] { &self.modes }

    pub fn is_vacuum(&self) -> bool { self.modes.is_empty() }

    pub fn particle_number(&self) -> usize { self.modes.len() }

    pub fn count(&self, n: i32) -> u32 {
        let lo = self.modes.partition_point(|&m| m < n);
        let hi = self.modes.partition_point(|&m| m <= n);
        (hi - lo) as u32
    }

    /// `(mode, count)` pairs for occupied modes, ascending in mode.
    pub fn occupations(&self) -> Vec<(i32, u32)> {
        self.modes
            .iter()
            .chunk_by(|&&m| m)
            .into_iter()
            .map(|(m, g)| (m, g.count() as u32))
            .collect()
    }

    pub fn total_momentum_index(&self) -> i64 {
        self.modes.iter().map(|&m| m as i64).sum()
    }

    /// `Σ pₙ count(n)`
    pub fn momentum(&self, grid: &MomentumGrid) -> f64 {
        self.modes.iter().map(|&m| grid.momentum(m)).sum()
    }

    /// Free energy `Σ pₙ² count(n)`.
    pub fn kinetic_energy(&self, grid: &MomentumGrid) -> f64 {
        self.modes.iter().map(|&m| grid.momentum(m).powi(2)).sum()
    }

    /// `Π count(n)!`, the squared norm of `b†ₙ₁ ⋯ b†ₙₖ |vac⟩`.
    pub fn occupation_factorial(&self) -> f64 {
        self.occupations()
            .into_iter()
            .map(|(_, c)| (1..=c).map(f64::from).product::<f64>())
            .product()
    }

    /// State with every mode label negated.
    pub fn reflected(&self) -> Self {
        Self::from_modes(self.modes.iter().map(|&m| -m))
    }

    /// `b†ₙ |self⟩ = √(count(n)+1) |self + n⟩`
    pub fn apply_creation(&self, n: i32) -> (FockState, f64) {
        let amp = f64::from(self.count(n) + 1).sqrt();
        let pos = self.modes.partition_point(|&m| m <= n);
        let mut modes = self.modes.clone();
        modes.insert(pos, n);
        (FockState { modes }, amp)
    }

    /// `bₙ |self⟩ = √count(n) |self − n⟩`, or `None` for the zero vector.
    pub fn apply_annihilation(&self, n: i32) -> Option<(FockState, f64)> {
        let pos = self.modes.iter().position(|&m| m == n)?;
        let amp = f64::from(self.count(n)).sqrt();
        let mut modes = self.modes.clone();
        modes.remove(pos);
        Some((FockState { modes }, amp))
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩", self.modes.iter().join(","))
    }
}

/// Indexed basis of all `n`-particle occupation states on a grid, optionally
/// restricted to one total-momentum index.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    grid: MomentumGrid,
    particle_number: usize,
    momentum_filter: Option<i64>,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

impl SectorBasis {
    /// Enumerates states in lexicographic order of their sorted mode lists.
    pub fn enumerate(
        grid: MomentumGrid,
        particle_number: usize,
        momentum_filter: Option<i64>,
    ) -> NnlsResult<Self> {
        if particle_number > 64 {
            return Err(NnlsError::invalid(format!(
                "particle number {particle_number} is far beyond desk scale"
            )));
        }
        let states: Vec<FockState> = grid
            .modes()
            .combinations_with_replacement(particle_number)
            .map(|modes| FockState { modes })
            .filter(|s| momentum_filter.is_none_or(|p| s.total_momentum_index() == p))
            .collect();
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Self { grid, particle_number, momentum_filter, states, index })
    }

    pub fn grid(&self) -> &MomentumGrid { &self.grid }

    pub fn particle_number(&self) -> usize { self.particle_number }

    pub fn momentum_filter(&self) -> Option<i64> { self.momentum_filter }

    pub fn dim(&self) -> usize { self.states.len() }

    pub fn states(&self) -> &[FockState] { &self.states }

    pub fn state(&self, i: usize) -> &FockState { &self.states[i] }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Total-momentum indices that occur in the unfiltered sector.
    pub fn momentum_blocks(grid: &MomentumGrid, particle_number: usize) -> Vec<i64> {
        let span = particle_number as i64 * grid.mode_cutoff() as i64;
        (-span..=span).collect()
    }
}

/// Stars-and-bars count `C(modes + n − 1, n)`.
pub fn sector_dimension(mode_count: usize, particle_number: usize) -> usize {
    if particle_number == 0 {
        return 1;
    }
    let mut acc: u128 = 1;
    for i in 0..particle_number as u128 {
        acc = acc * (mode_count as u128 + i) / (i + 1);
    }
    acc as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(m: u32) -> MomentumGrid { MomentumGrid::new(1.0, m).unwrap() }

    #[test]
    fn two_particles_three_modes() {
        let b = SectorBasis::enumerate(grid(1), 2, None).unwrap();
        assert_eq!(b.dim(), 6);
        let got: Vec<Vec<i32>> = b.states().iter().map(|s| s.modes().to_vec()).collect();
        assert_eq!(
            got,
            vec![vec![-1, -1], vec![-1, 0], vec![-1, 1], vec![0, 0], vec![0, 1], vec![1, 1]]
        );
    }

    #[test]
    fn zero_particles_is_vacuum() {
        let b = SectorBasis::enumerate(grid(3), 0, None).unwrap();
        assert_eq!(b.dim(), 1);
        assert!(b.state(0).is_vacuum());
    }

    #[test]
    fn zero_momentum_block() {
        let b = SectorBasis::enumerate(grid(1), 2, Some(0)).unwrap();
        let got: Vec<Vec<i32>> = b.states().iter().map(|s| s.modes().to_vec()).collect();
        assert_eq!(got, vec![vec![-1, 1], vec![0, 0]]);
    }

    #[test]
    fn dimension_formula() {
        for m in 1..5 {
            for n in 0..5 {
                let b = SectorBasis::enumerate(grid(m), n, None).unwrap();
                assert_eq!(b.dim(), sector_dimension(2 * m as usize + 1, n));
                for (i, s) in b.states().iter().enumerate() {
                    assert_eq!(b.index_of(s), Some(i));
                }
            }
        }
        assert_eq!(sector_dimension(3, 2), 6);
    }

    #[test]
    fn creation_amplitudes() {
        let (one, a1) = FockState::vacuum().apply_creation(3);
        assert_eq!(one.count(3), 1);
        assert_eq!(a1, 1.0);
        let (two, a2) = one.apply_creation(3);
        assert_eq!(two.count(3), 2);
        assert_eq!(a2, 2f64.sqrt());
        assert_eq!(two.particle_number(), 2);
    }

    #[test]
    fn annihilation_amplitudes() {
        assert!(FockState::vacuum().apply_annihilation(0).is_none());
        let s = FockState::from_modes([1, 1, -2]);
        let (t, a) = s.apply_annihilation(1).unwrap();
        assert_eq!(t, FockState::from_modes([-2, 1]));
        assert_eq!(a, 2f64.sqrt());
        assert!(s.apply_annihilation(0).is_none());
    }

    #[test]
    fn ladder_commutator_on_vacuum() {
        // ⟨m| b†ₙ |vac⟩ = [n = m] and b b† − b† b = 1 on single occupation
        let vac = FockState::vacuum();
        for n in -2..=2 {
            let (s, a) = vac.apply_creation(n);
            for m in -2..=2 {
                let overlap = if s == FockState::from_modes([m]) { a } else { 0.0 };
                assert_eq!(overlap, if n == m { 1.0 } else { 0.0 });
            }
        }
        let s = FockState::from_modes([0, 2]);
        let (c, ac) = s.apply_creation(2);
        let (back, aa) = c.apply_annihilation(2).unwrap();
        let (d, ad) = s.apply_annihilation(2).unwrap();
        let (back2, ac2) = d.apply_creation(2);
        assert_eq!(back, s);
        assert_eq!(back2, s);
        assert!((ac * aa - ad * ac2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn occupations_and_charges() {
        let s = FockState::from_modes([2, -1, 2]);
        assert_eq!(s.occupations(), vec![(-1, 1), (2, 2)]);
        assert_eq!(s.total_momentum_index(), 3);
        assert_eq!(s.occupation_factorial(), 2.0);
        assert_eq!(s.reflected(), FockState::from_modes([-2, 1, -2]));
        assert_eq!(s.to_string(), "|-1,2,2⟩");
    }
}
