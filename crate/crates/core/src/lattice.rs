//! Periodic-box discretization.
//!
//! All continuum conventions live here and nowhere else:
//!
//! ```text
//! ∫ dp/2π      →  (1/L) Σₙ
//! 2π δ(p − q)  →  L [n = m]
//! ∫ dx         →  Δx Σⱼ
//! δ(x − y)     →  [j = l] / Δx
//! a(pₙ)        =  √L bₙ
//! ```
//!
//! Fourier pair on a position grid with `K` sites:
//!
//! ```text
//! ψ̃ₙ = Δx Σⱼ ψⱼ e^{−i pₙ xⱼ},     ψⱼ = (1/L) Σₙ ψ̃ₙ e^{i pₙ xⱼ}
//! ```

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{NnlsError, NnlsResult, C64};

/// Momentum modes `n ∈ {−M, …, M}` of a ring of length `L`, with
/// `pₙ = 2πn/L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    box_length: f64,
    mode_cutoff: u32,
}

impl MomentumGrid {
    pub fn new(box_length: f64, mode_cutoff: u32) -> NnlsResult<Self> {
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(NnlsError::invalid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        if mode_cutoff == 0 {
            return Err(NnlsError::invalid("mode cutoff must be at least 1"));
        }
        Ok(Self { box_length, mode_cutoff })
    }

    pub fn box_length(&self) -> f64 { self.box_length }

    pub fn mode_cutoff(&self) -> u32 { self.mode_cutoff }

    /// `2M + 1`
    pub fn mode_count(&self) -> usize { 2 * self.mode_cutoff as usize + 1 }

    /// Mode labels in ascending order, `−M..=M`.
    pub fn modes(&self) -> impl DoubleEndedIterator<Item = i32> + Clone {
        let m = self.mode_cutoff as i32;
        -m..=m
    }

    pub fn contains(&self, n: i32) -> bool {
        n.unsigned_abs() <= self.mode_cutoff
    }

    pub fn momentum(&self, n: i32) -> f64 {
        TAU * n as f64 / self.box_length
    }

    pub fn max_momentum(&self) -> f64 {
        self.momentum(self.mode_cutoff as i32)
    }

    /// Position of mode `n` in [`Self::modes`].
    pub fn slot(&self, n: i32) -> Option<usize> {
        self.contains(n).then(|| (n + self.mode_cutoff as i32) as usize)
    }

    /// Weight replacing `∫ dp/2π` by a mode sum.
    pub fn momentum_measure(&self) -> f64 { 1.0 / self.box_length }

    /// Value of `2πδ(p − q)` on the diagonal.
    pub fn momentum_delta(&self) -> f64 { self.box_length }

    /// Factor converting unit-normalized `bₙ` into continuum `a(pₙ)`.
    pub fn continuum_scale(&self) -> f64 { self.box_length.sqrt() }

    /// Position grid with as many sites as modes.
    pub fn position_grid(&self) -> PositionGrid {
        PositionGrid::new(self.box_length, self.mode_count())
            .expect("mode count is odd and positive")
    }

    /// Position grid with `4M + 1` sites: fine enough that a product of four
    /// band-limited fields is integrated without aliasing.
    pub fn quartic_quadrature_grid(&self) -> PositionGrid {
        PositionGrid::new(self.box_length, 4 * self.mode_cutoff as usize + 1)
            .expect("site count is odd and positive")
    }
}

impl fmt::Display for MomentumGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={}, M={}", self.box_length, self.mode_cutoff)
    }
}

/// Uniform grid of an odd number of sites `xⱼ = (j − J)Δx`, `j = 0..2J`,
/// so that `x = 0` is a site and reflection is an exact index involution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositionGrid {
    box_length: f64,
    sites: usize,
}

impl PositionGrid {
    pub fn new(box_length: f64, sites: usize) -> NnlsResult<Self> {
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(NnlsError::invalid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        if sites % 2 == 0 {
            return Err(NnlsError::invalid(format!(
                "position grid needs an odd number of sites, got {sites}"
            )));
        }
        Ok(Self { box_length, sites })
    }

    pub fn box_length(&self) -> f64 { self.box_length }

    pub fn len(&self) -> usize { self.sites }

    pub fn is_empty(&self) -> bool { self.sites == 0 }

    pub fn spacing(&self) -> f64 { self.box_length / self.sites as f64 }

    fn half(&self) -> usize { self.sites / 2 }

    pub fn origin_index(&self) -> usize { self.half() }

    pub fn x(&self, j: usize) -> f64 {
        (j as f64 - self.half() as f64) * self.spacing()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.sites).map(|j| self.x(j)).collect()
    }

    /// Index of `−xⱼ`.
    pub fn reflect_index(&self, j: usize) -> NnlsResult<usize> {
        if j >= self.sites {
            return Err(NnlsError::IndexOutOfRange { index: j, len: self.sites });
        }
        Ok(self.sites - 1 - j)
    }

    /// Momentum grid carrying the same number of modes.
    pub fn momentum_grid(&self) -> MomentumGrid {
        MomentumGrid { box_length: self.box_length, mode_cutoff: self.half() as u32 }
    }

    /// Value of `δ(x − y)` on the diagonal.
    pub fn position_delta(&self) -> f64 { 1.0 / self.spacing() }

    /// `Δx Σⱼ fⱼ`; exact for band-limited periodic integrands.
    pub fn integrate(&self, values: &[C64]) -> C64 {
        values.iter().sum::<C64>() * self.spacing()
    }
}

/// FFT-backed Fourier pair between samples on a [`PositionGrid`] and mode
/// amplitudes ordered `n = −J..=J`.
#[derive(Clone)]
pub struct SpectralTransform {
    grid: PositionGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // e^{i 2π n J / K} for n = −J..=J: shift from FFT index origin to x = 0.
    shift: Vec<C64>,
}

impl fmt::Debug for SpectralTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralTransform").field("grid", &self.grid).finish()
    }
}

impl SpectralTransform {
    pub fn new(grid: PositionGrid) -> Self {
        let k = grid.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(k);
        let inverse = planner.plan_fft_inverse(k);
        let half = (k / 2) as i64;
        let shift = (-half..=half)
            .map(|n| C64::from_polar(1.0, TAU * (n * half) as f64 / k as f64))
            .collect();
        Self { grid, forward, inverse, shift }
    }

    pub fn grid(&self) -> &PositionGrid { &self.grid }

    fn fft_slot(&self, mode_pos: usize) -> usize {
        let k = self.grid.len();
        let half = k / 2;
        // mode n = mode_pos − half lives at FFT index n mod K
        (mode_pos + k - half) % k
    }

    /// Samples to mode amplitudes `ψ̃ₙ`.
    pub fn to_modes(&self, samples: &[C64]) -> Vec<C64> {
        let mut buf = samples.to_vec();
        self.forward.process(&mut buf);
        let dx = self.grid.spacing();
        (0..buf.len())
            .map(|pos| buf[self.fft_slot(pos)] * self.shift[pos] * dx)
            .collect()
    }

    /// Mode amplitudes back to samples.
    pub fn to_samples(&self, modes: &[C64]) -> Vec<C64> {
        let k = self.grid.len();
        let mut buf = vec![C64::new(0.0, 0.0); k];
        for (pos, &amp) in modes.iter().enumerate() {
            buf[self.fft_slot(pos)] = amp * self.shift[pos].conj();
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.grid.box_length();
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }

    /// Spectral derivative `∂ₓψ` on the grid.
    pub fn derivative(&self, samples: &[C64]) -> Vec<C64> {
        let mg = self.grid.momentum_grid();
        let modes: Vec<C64> = self
            .to_modes(samples)
            .into_iter()
            .zip(mg.modes())
            .map(|(a, n)| a * C64::new(0.0, mg.momentum(n)))
            .collect();
        self.to_samples(&modes)
    }

    /// Multiplies every mode `n` by `phase(pₙ)` in place.
    pub fn apply_multiplier(&self, samples: &mut [C64], multiplier: &[C64]) {
        let mut modes = self.to_modes(samples);
        modes.iter_mut().zip(multiplier).for_each(|(a, m)| *a *= m);
        samples.copy_from_slice(&self.to_samples(&modes));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_modes_and_momenta() {
        let g = MomentumGrid::new(TAU, 2).unwrap();
        assert_eq!(g.modes().collect::<Vec<_>>(), vec![-2, -1, 0, 1, 2]);
        let p: Vec<f64> = g.modes().map(|n| g.momentum(n)).collect();
        for (got, want) in p.iter().zip([-2.0, -1.0, 0.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        for n in g.modes() {
            assert_eq!(g.momentum(-n), -g.momentum(n));
        }
        assert_eq!(g.momentum(0), 0.0);
        assert_eq!(g.mode_count(), 5);
    }

    #[test]
    fn spacing_is_length_over_mode_count() {
        let g = MomentumGrid::new(10.0, 8).unwrap();
        assert_eq!(g.position_grid().spacing(), 10.0 / 17.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MomentumGrid::new(0.0, 2).is_err());
        assert!(MomentumGrid::new(-1.0, 2).is_err());
        assert!(MomentumGrid::new(f64::NAN, 2).is_err());
        assert!(MomentumGrid::new(1.0, 0).is_err());
        assert!(PositionGrid::new(1.0, 4).is_err());
    }

    #[test]
    fn reflection() {
        let pg = MomentumGrid::new(3.0, 4).unwrap().position_grid();
        let o = pg.origin_index();
        assert_eq!(pg.x(o), 0.0);
        assert_eq!(pg.reflect_index(o).unwrap(), o);
        assert_eq!(pg.reflect_index(o + 1).unwrap(), o - 1);
        assert!((pg.x(o + 1) + pg.x(o - 1)).abs() < 1e-15);
        for j in 0..pg.len() {
            let r = pg.reflect_index(j).unwrap();
            assert_eq!(pg.reflect_index(r).unwrap(), j);
            assert!((pg.x(r) + pg.x(j)).abs() < 1e-14);
        }
        assert!(matches!(
            pg.reflect_index(pg.len()),
            Err(NnlsError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn transform_matches_direct_sum() {
        let mg = MomentumGrid::new(2.7, 5).unwrap();
        let pg = mg.position_grid();
        let tr = SpectralTransform::new(pg);
        let samples: Vec<C64> = (0..pg.len())
            .map(|j| C64::new((j as f64 * 0.37).sin(), (j as f64 * 1.3).cos() - 0.2))
            .collect();
        let modes = tr.to_modes(&samples);
        for (pos, n) in mg.modes().enumerate() {
            let direct: C64 = (0..pg.len())
                .map(|j| samples[j] * C64::from_polar(pg.spacing(), -mg.momentum(n) * pg.x(j)))
                .sum();
            assert!((direct - modes[pos]).norm() < 1e-12);
        }
        let back = tr.to_samples(&modes);
        for (a, b) in back.iter().zip(&samples) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_plane_wave() {
        let mg = MomentumGrid::new(TAU, 6).unwrap();
        let pg = mg.position_grid();
        let tr = SpectralTransform::new(pg);
        let f: Vec<C64> = pg.positions().iter().map(|&x| C64::from_polar(1.0, 3.0 * x)).collect();
        let df = tr.derivative(&f);
        for (d, v) in df.iter().zip(&f) {
            assert!((d - C64::new(0.0, 3.0) * v).norm() < 1e-12);
        }
    }
}
