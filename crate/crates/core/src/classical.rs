//! Classical nonlocal field `(i∂ₜ + ∂ₓ²)ψ = 2c ψ*(−x,t) ψ²` on the periodic
//! position grid.
//!
//! Strang splitting: half a step of exact free propagation in Fourier space,
//! one RK4 step of `ψₜ = −2ic ψ*(−x) ψ²`, then the second half step.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::lattice::{PositionGrid, SpectralTransform};
use crate::qoperators::Coupling;
use crate::{NnlsError, NnlsResult, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalField {
    grid: PositionGrid,
    values: Vec<C64>,
    time: f64,
}

impl ClassicalField {
    pub fn new(grid: PositionGrid, values: Vec<C64>, time: f64) -> NnlsResult<Self> {
        if values.len() != grid.len() {
            return Err(NnlsError::DimensionMismatch(format!(
                "{} samples for {} sites",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(NnlsError::invalid("field samples must be finite"));
        }
        Ok(Self { grid, values, time })
    }

    pub fn from_fn(grid: PositionGrid, f: impl Fn(f64) -> C64) -> NnlsResult<Self> {
        let values = grid.positions().into_iter().map(f).collect();
        Self::new(grid, values, 0.0)
    }

    /// `A exp(−(x − x₀)²/(2σ²)) e^{ik x}`
    pub fn gaussian(grid: PositionGrid, amplitude: f64, center: f64, width: f64, wavenumber: f64) -> NnlsResult<Self> {
        if !(width > 0.0) {
            return Err(NnlsError::invalid("Gaussian width must be positive"));
        }
        Self::from_fn(grid, |x| {
            C64::from_polar(amplitude * (-(x - center).powi(2) / (2.0 * width * width)).exp(), wavenumber * x)
        })
    }

    /// `A e^{i pₙ x}` for the grid momentum `pₙ = 2πn/L`.
    pub fn plane_wave(grid: PositionGrid, amplitude: f64, mode: i32) -> NnlsResult<Self> {
        let k = TAU * mode as f64 / grid.box_length();
        Self::from_fn(grid, |x| C64::from_polar(amplitude, k * x))
    }

    pub fn grid(&self) -> &PositionGrid { &self.grid }

    pub fn values(&self) -> &[C64] { &self.values }

    pub fn time(&self) -> f64 { self.time }

    /// `ψ*(−xⱼ)` for every site.
    pub fn reflected_conjugate(&self) -> Vec<C64> {
        self.values.iter().rev().map(|v| v.conj()).collect()
    }

    /// Periodic shift by `sites` grid points: `ψ'(x) = ψ(x − sites·Δx)`.
    pub fn shifted(&self, sites: i64) -> Self {
        let k = self.values.len() as i64;
        let s = sites.rem_euclid(k) as usize;
        let mut values = self.values.clone();
        values.rotate_right(s);
        Self { grid: self.grid, values, time: self.time }
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Complex charges `N`, `P`, `H` at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChargeTriple {
    pub time: f64,
    pub n: [f64; 2],
    pub p: [f64; 2],
    pub h: [f64; 2],
}

impl ChargeTriple {
    fn pack(z: C64) -> [f64; 2] { [z.re, z.im] }

    pub fn number(&self) -> C64 { C64::new(self.n[0], self.n[1]) }

    pub fn momentum(&self) -> C64 { C64::new(self.p[0], self.p[1]) }

    pub fn energy(&self) -> C64 { C64::new(self.h[0], self.h[1]) }

    /// Largest relative change of any charge, with denominators floored
    /// at `1e−12`.
    pub fn relative_drift(&self, reference: &Self) -> [f64; 3] {
        let rel = |a: C64, b: C64| (a - b).norm() / b.norm().max(1e-12);
        [
            rel(self.number(), reference.number()),
            rel(self.momentum(), reference.momentum()),
            rel(self.energy(), reference.energy()),
        ]
    }
}

/// Split-step propagator for one grid and time step.
#[derive(Debug, Clone)]
pub struct SplitStep {
    transform: SpectralTransform,
    half_step: Vec<C64>,
    coupling: f64,
    dt: f64,
}

impl SplitStep {
    pub fn new(grid: PositionGrid, coupling: Coupling, dt: f64) -> NnlsResult<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(NnlsError::invalid(format!("time step must be positive, got {dt}")));
        }
        let mg = grid.momentum_grid();
        let half_step = mg
            .modes()
            .map(|n| C64::from_polar(1.0, -mg.momentum(n).powi(2) * dt / 2.0))
            .collect();
        Ok(Self { transform: SpectralTransform::new(grid), half_step, coupling: coupling.value(), dt })
    }

    /// `dt · p_max²`; values ≥ 1 resolve the fastest modes poorly.
    pub fn cfl_number(&self) -> f64 {
        self.dt * self.transform.grid().momentum_grid().max_momentum().powi(2)
    }

    fn nonlinear_rhs(&self, psi: &[C64]) -> Vec<C64> {
        let k = -2.0 * C64::new(0.0, self.coupling);
        let n = psi.len();
        (0..n).map(|j| k * psi[n - 1 - j].conj() * psi[j] * psi[j]).collect()
    }

    fn nonlinear_step(&self, psi: &mut [C64]) {
        if self.coupling == 0.0 {
            return;
        }
        let h = self.dt;
        let axpy = |a: &[C64], s: f64, b: &[C64]| -> Vec<C64> {
            a.iter().zip(b).map(|(x, y)| x + y * s).collect()
        };
        let k1 = self.nonlinear_rhs(psi);
        let k2 = self.nonlinear_rhs(&axpy(psi, h / 2.0, &k1));
        let k3 = self.nonlinear_rhs(&axpy(psi, h / 2.0, &k2));
        let k4 = self.nonlinear_rhs(&axpy(psi, h, &k3));
        for j in 0..psi.len() {
            psi[j] += (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (h / 6.0);
        }
    }

    pub fn step(&self, psi: &mut [C64]) {
        self.transform.apply_multiplier(psi, &self.half_step);
        self.nonlinear_step(psi);
        self.transform.apply_multiplier(psi, &self.half_step);
    }

    /// Advances `steps` steps, calling `observe` after every `every` steps
    /// (and never when `every == 0`).
    pub fn run(
        &self,
        field: &ClassicalField,
        steps: usize,
        every: usize,
        mut observe: impl FnMut(&ClassicalField),
    ) -> NnlsResult<ClassicalField> {
        let mut psi = field.values.clone();
        for s in 1..=steps {
            self.step(&mut psi);
            if psi.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                return Err(NnlsError::NonFinite { step: s });
            }
            if every > 0 && s % every == 0 {
                observe(&ClassicalField { grid: field.grid, values: psi.clone(), time: field.time + s as f64 * self.dt });
            }
        }
        Ok(ClassicalField { grid: field.grid, values: psi, time: field.time + steps as f64 * self.dt })
    }

    pub fn transform(&self) -> &SpectralTransform { &self.transform }
}

pub fn evolve(field: &ClassicalField, coupling: Coupling, dt: f64, steps: usize) -> NnlsResult<ClassicalField> {
    SplitStep::new(field.grid, coupling, dt)?.run(field, steps, 0, |_| {})
}

/// Charges with `π(x) = iψ*(−x)` substituted:
///
/// ```text
/// N = ∫ ψ(x) ψ*(−x) dx
/// P = i ∫ ψ*(−x) ψ'(x) dx
/// H = ∫ [ −(ψ*)'(−x) ψ'(x) + c (ψ*(−x) ψ(x))² ] dx
/// ```
///
/// with spectral derivatives and periodic trapezoidal quadrature.
pub fn charges(field: &ClassicalField, coupling: Coupling) -> ChargeTriple {
    charges_with(&SpectralTransform::new(field.grid), field, coupling)
}

pub fn charges_with(transform: &SpectralTransform, field: &ClassicalField, coupling: Coupling) -> ChargeTriple {
    let grid = &field.grid;
    let psi = &field.values;
    let refl = field.reflected_conjugate();
    let dpsi = transform.derivative(psi);
    // (ψ*)'(−x) = conj(ψ'(−x))
    let drefl: Vec<C64> = dpsi.iter().rev().map(|v| v.conj()).collect();
    let c = coupling.value();
    let n_density: Vec<C64> = psi.iter().zip(&refl).map(|(a, b)| a * b).collect();
    let p_density: Vec<C64> = refl.iter().zip(&dpsi).map(|(r, d)| C64::new(0.0, 1.0) * r * d).collect();
    let h_density: Vec<C64> = (0..psi.len())
        .map(|j| -drefl[j] * dpsi[j] + c * n_density[j] * n_density[j])
        .collect();
    ChargeTriple {
        time: field.time,
        n: ChargeTriple::pack(grid.integrate(&n_density)),
        p: ChargeTriple::pack(grid.integrate(&p_density)),
        h: ChargeTriple::pack(grid.integrate(&h_density)),
    }
}

/// Evolves while recording charges every `every` steps (plus `t = 0`).
pub fn evolve_with_charges(
    field: &ClassicalField,
    coupling: Coupling,
    dt: f64,
    steps: usize,
    every: usize,
) -> NnlsResult<(ClassicalField, Vec<ChargeTriple>)> {
    let stepper = SplitStep::new(field.grid, coupling, dt)?;
    let mut record = vec![charges_with(stepper.transform(), field, coupling)];
    let last = stepper.run(field, steps, every, |f| {
        record.push(charges_with(stepper.transform(), f, coupling));
    })?;
    if every == 0 || steps % every != 0 {
        record.push(charges_with(stepper.transform(), &last, coupling));
    }
    Ok((last, record))
}

/// Max deviation between `evolve(shift(ψ))` and `shift(evolve(ψ))` for a
/// shift `a` that must be a whole number of grid spacings.
///
/// The nonlocal term pins `x = 0`, so the two only agree for `c = 0`.
/// Translation invariance for `c ≠ 0` shows up as conservation of `P`.
pub fn translation_covariance_test(
    field: &ClassicalField,
    shift: f64,
    coupling: Coupling,
    dt: f64,
    steps: usize,
) -> NnlsResult<f64> {
    let sites = shift / field.grid.spacing();
    let whole = sites.round();
    if (sites - whole).abs() > 1e-9 * whole.abs().max(1.0) {
        return Err(NnlsError::invalid(format!(
            "shift {shift} is not a whole number of grid spacings ({})",
            field.grid.spacing()
        )));
    }
    let sites = whole as i64;
    if sites == 0 {
        return Ok(0.0);
    }
    let stepper = SplitStep::new(field.grid, coupling, dt)?;
    let a = stepper.run(&field.shifted(sites), steps, 0, |_| {})?;
    let b = stepper.run(field, steps, 0, |_| {})?.shifted(sites);
    Ok(a.max_deviation(&b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::MomentumGrid;

    fn grid(l: f64, m: u32) -> PositionGrid { MomentumGrid::new(l, m).unwrap().position_grid() }

    fn c(v: f64) -> Coupling { Coupling::new(v).unwrap() }

    #[test]
    fn free_plane_wave() {
        let g = grid(TAU, 16);
        let f0 = ClassicalField::plane_wave(g, 0.7, 3).unwrap();
        let f1 = evolve(&f0, c(0.0), 1e-2, 100).unwrap();
        assert!((f1.time() - 1.0).abs() < 1e-12);
        let exact = ClassicalField::from_fn(g, |x| C64::from_polar(0.7, 3.0 * x - 9.0 * 1.0)).unwrap();
        assert!(f1.max_deviation(&exact) < 1e-10);
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = grid(10.0, 8);
        let f0 = ClassicalField::from_fn(g, |_| C64::new(0.0, 0.0)).unwrap();
        let f1 = evolve(&f0, c(2.0), 1e-3, 50).unwrap();
        assert!(f1.values().iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn constant_and_plane_wave_charges() {
        let g = grid(5.0, 8);
        let a = C64::new(0.6, 0.8) * 1.5;
        let f = ClassicalField::from_fn(g, |_| a).unwrap();
        let q = charges(&f, c(1.0));
        assert!((q.number() - a.norm_sqr() * 5.0).norm() < 1e-12);
        assert!(q.momentum().norm() < 1e-12);
        let pw = ClassicalField::plane_wave(g, 1.2, 2).unwrap();
        assert!(charges(&pw, c(1.0)).number().norm() < 1e-12);
    }

    #[test]
    fn shifts() {
        let g = grid(4.0, 5);
        let f = ClassicalField::gaussian(g, 1.0, 0.3, 0.5, 1.0).unwrap();
        assert_eq!(f.shifted(3).shifted(-3), f);
        assert_eq!(translation_covariance_test(&f, 0.0, c(1.0), 1e-3, 10).unwrap(), 0.0);
        assert!(translation_covariance_test(&f, 0.5 * g.spacing(), c(0.0), 1e-3, 10).is_err());
        let dev = translation_covariance_test(&f, 2.0 * g.spacing(), c(0.0), 1e-3, 100).unwrap();
        assert!(dev < 1e-10);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = grid(4.0, 5);
        assert!(ClassicalField::new(g, vec![C64::new(0.0, 0.0); 3], 0.0).is_err());
        let f = ClassicalField::gaussian(g, 1.0, 0.0, 0.5, 0.0).unwrap();
        assert!(evolve(&f, c(1.0), 0.0, 1).is_err());
        assert!(evolve(&f, c(1.0), -1.0, 1).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        let g = grid(4.0, 5);
        let f = ClassicalField::from_fn(g, |_| C64::new(1e150, 0.0)).unwrap();
        assert!(matches!(evolve(&f, c(1.0), 1.0, 10), Err(NnlsError::NonFinite { .. })));
    }
}
