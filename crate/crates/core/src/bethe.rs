//! Coordinate Bethe ansatz for `H = −Σ∂ᵢ² + 2c Σ_{i<j} δ(xᵢ − xⱼ)`.
//!
//! The bosonic eigenfunction with rapidities `k₁…k_N` is the exchange
//! symmetrization of the Gaudin product
//!
//! ```text
//! f(x) = Πᵢ e^{i kᵢ xᵢ} Π_{i<j} (1 − i c ε(xᵢ − xⱼ) / (kᵢ − kⱼ))
//! ```
//!
//! with `ε(0) = 0`. It is scaled so that the plane wave `e^{i Σ kᵢ xᵢ}` has
//! coefficient one in the sector `x₁ < … < x_N`. Across a coincidence plane
//! the relative derivative jumps by `[(∂ᵢ − ∂ⱼ)Ψ] = 2c Ψ`.

use std::f64::consts::TAU;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::{NnlsError, NnlsResult, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Two-body scattering factor `(k₂ − k₁ − ic) / (k₂ − k₁ + ic)`.
pub fn s_matrix_phase(k1: f64, k2: f64, c: f64) -> NnlsResult<C64> {
    let dk = k2 - k1;
    if dk == 0.0 && c == 0.0 {
        return Err(NnlsError::Domain("S-matrix phase undefined at k₂ − k₁ = c = 0".into()));
    }
    Ok(C64::new(dk, -c) / C64::new(dk, c))
}

fn signum0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Rapidities and coupling of a Bethe eigenstate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetheState {
    #[serde(serialize_with = "serialize_complex_list")]
    rapidities: Vec<C64>,
    coupling: f64,
}

fn serialize_complex_list<S: serde::Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

impl BetheState {
    /// Real, pairwise distinct rapidities; stored in ascending order.
    pub fn new(mut rapidities: Vec<f64>, coupling: f64) -> NnlsResult<Self> {
        if rapidities.is_empty() {
            return Err(NnlsError::invalid("at least one rapidity is required"));
        }
        if !coupling.is_finite() || rapidities.iter().any(|k| !k.is_finite()) {
            return Err(NnlsError::invalid("rapidities and coupling must be finite"));
        }
        rapidities.sort_by(f64::total_cmp);
        if rapidities.windows(2).any(|w| (w[1] - w[0]).abs() <= 1e-12) {
            return Err(NnlsError::invalid("rapidities must be pairwise distinct"));
        }
        Ok(Self { rapidities: rapidities.into_iter().map(|k| C64::new(k, 0.0)).collect(), coupling })
    }

    /// Two-particle bound state for `c < 0`: `k = K/2 ± i c/2`, relative
    /// wavefunction `e^{−|c||x₁−x₂|/2}` and energy `K²/2 − c²/2`.
    pub fn bound_pair(total_momentum: f64, coupling: f64) -> NnlsResult<Self> {
        if !(coupling < 0.0) || !coupling.is_finite() || !total_momentum.is_finite() {
            return Err(NnlsError::invalid("bound pair needs a finite attractive coupling c < 0"));
        }
        let half = total_momentum / 2.0;
        Ok(Self {
            rapidities: vec![C64::new(half, coupling / 2.0), C64::new(half, -coupling / 2.0)],
            coupling,
        })
    }

    pub fn rapidities(&self) -> &[C64] { &self.rapidities }

    pub fn coupling(&self) -> f64 { self.coupling }

    pub fn particle_number(&self) -> usize { self.rapidities.len() }

    /// `Σ kᵢ²`
    pub fn energy(&self) -> C64 { self.rapidities.iter().map(|k| k * k).sum() }

    /// `Σ kᵢ`
    pub fn momentum(&self) -> C64 { self.rapidities.iter().sum() }

    fn gaudin_factor(&self, i: usize, j: usize, eps: f64) -> C64 {
        if eps == 0.0 {
            return C64::new(1.0, 0.0);
        }
        1.0 - I * self.coupling * eps / (self.rapidities[i] - self.rapidities[j])
    }

    fn normalization(&self) -> C64 {
        let n = self.particle_number();
        let lead: C64 = (0..n)
            .tuple_combinations()
            .map(|(i, j)| self.gaudin_factor(i, j, -1.0))
            .product();
        if lead.norm() > 1e-300 {
            lead.inv()
        } else {
            C64::new(1.0, 0.0)
        }
    }

    /// Coefficient of `exp(i Σₐ k_{assignment[a]} yₐ)` in the sector
    /// `y₁ < … < y_N`, where `yₐ` is the `a`-th smallest position.
    pub fn sector_amplitude(&self, assignment: &[usize]) -> NnlsResult<C64> {
        let n = self.particle_number();
        let mut pos = vec![usize::MAX; n];
        for (a, &i) in assignment.iter().enumerate() {
            if i >= n || pos[i] != usize::MAX {
                return Err(NnlsError::invalid("assignment must be a permutation of 0..N"));
            }
            pos[i] = a;
        }
        if assignment.len() != n {
            return Err(NnlsError::invalid("assignment must be a permutation of 0..N"));
        }
        let amp: C64 = (0..n)
            .tuple_combinations()
            .map(|(i, j)| self.gaudin_factor(i, j, signum0(pos[i] as f64 - pos[j] as f64)))
            .product();
        Ok(amp * self.normalization())
    }

    /// Symmetrized sum with caller-chosen signs. `sign(p, q)` stands for
    /// `ε(x_p − x_q)` and must be antisymmetric. Returns the value and the
    /// gradient with respect to every position.
    fn evaluate_with(&self, x: &[f64], sign: impl Fn(usize, usize) -> f64) -> (C64, Vec<C64>) {
        let n = self.particle_number();
        let mut value = C64::new(0.0, 0.0);
        let mut grad = vec![C64::new(0.0, 0.0); n];
        for perm in (0..n).permutations(n) {
            // particle i sits at position perm[i]
            let phase: C64 = (0..n).map(|i| I * self.rapidities[i] * x[perm[i]]).sum();
            let amp: C64 = (0..n)
                .tuple_combinations()
                .map(|(i, j)| self.gaudin_factor(i, j, sign(perm[i], perm[j])))
                .product();
            let term = amp * phase.exp();
            value += term;
            for i in 0..n {
                grad[perm[i]] += term * I * self.rapidities[i];
            }
        }
        let norm = self.normalization();
        grad.iter_mut().for_each(|g| *g *= norm);
        (value * norm, grad)
    }
}

/// Wavefunction value at one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WavefunctionSample {
    pub positions: Vec<f64>,
    pub value: [f64; 2],
}

impl WavefunctionSample {
    pub fn complex(&self) -> C64 { C64::new(self.value[0], self.value[1]) }
}

fn check_positions(state: &BetheState, x: &[f64]) -> NnlsResult<()> {
    if x.len() != state.particle_number() {
        return Err(NnlsError::DimensionMismatch(format!(
            "{} positions for {} particles",
            x.len(),
            state.particle_number()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(NnlsError::invalid("positions must be finite"));
    }
    Ok(())
}

fn psi(state: &BetheState, x: &[f64]) -> C64 {
    state.evaluate_with(x, |p, q| signum0(x[p] - x[q])).0
}

pub fn eval_wavefunction(state: &BetheState, positions: &[f64]) -> NnlsResult<WavefunctionSample> {
    check_positions(state, positions)?;
    let v = psi(state, positions);
    Ok(WavefunctionSample { positions: positions.to_vec(), value: [v.re, v.im] })
}

/// Relative-derivative jump across `xᵢ = xⱼ` and the contact value there.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CuspData {
    pub jump: [f64; 2],
    pub value: [f64; 2],
    pub residual: f64,
}

/// Places particles `i` and `j` at the midpoint of their entries in `point`
/// and compares `[(∂ᵢ − ∂ⱼ)Ψ]` (side `xᵢ > xⱼ` minus side `xᵢ < xⱼ`) with
/// `2cΨ`, using one-sided analytic derivatives of the sector expansions.
pub fn cusp_data(state: &BetheState, pair: (usize, usize), point: &[f64]) -> NnlsResult<CuspData> {
    check_positions(state, point)?;
    let (i, j) = pair;
    let n = state.particle_number();
    if n < 2 || i >= n || j >= n || i == j {
        return Err(NnlsError::invalid(format!("bad coincidence pair ({i}, {j}) for N = {n}")));
    }
    let mut x = point.to_vec();
    let mid = 0.5 * (x[i] + x[j]);
    x[i] = mid;
    x[j] = mid;
    let side = |s: f64| {
        let x = &x;
        move |p: usize, q: usize| {
            if (p, q) == (i, j) {
                s
            } else if (p, q) == (j, i) {
                -s
            } else {
                signum0(x[p] - x[q])
            }
        }
    };
    let (_, gp) = state.evaluate_with(&x, side(1.0));
    let (_, gm) = state.evaluate_with(&x, side(-1.0));
    let (value, _) = state.evaluate_with(&x, side(0.0));
    let jump = (gp[i] - gp[j]) - (gm[i] - gm[j]);
    let target = 2.0 * state.coupling() * value;
    let residual = (jump - target).norm() / (target.norm() + 1e-300);
    Ok(CuspData { jump: [jump.re, jump.im], value: [value.re, value.im], residual })
}

pub fn check_cusp(state: &BetheState, pair: (usize, usize), point: &[f64]) -> NnlsResult<f64> {
    cusp_data(state, pair, point).map(|d| d.residual)
}

/// Outcome of the finite-difference eigenvalue check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FdReport {
    pub particles: usize,
    pub grid_points: usize,
    pub spacing: f64,
    pub box_length: f64,
    pub energy: f64,
    /// `⟨Ψ, H_h Ψ⟩ / ⟨Ψ, Ψ⟩` over interior points.
    pub rayleigh_energy: f64,
    /// `‖H_h Ψ − EΨ‖ / ‖EΨ‖` over interior points.
    pub residual: f64,
}

/// Smallest grids accepted by [`verify_eigenstate_fd`].
pub const FD_MIN_POINTS_2: usize = 200;
pub const FD_MIN_POINTS_3: usize = 24;

/// Samples `Ψ` on an `m^N` grid covering `[−B/2, B/2]^N` and applies the
/// discrete Hamiltonian: second differences for `−Σ∂²` and `1/h` on grid
/// points where two coordinates coincide for each `2cδ`.
pub fn verify_eigenstate_fd(state: &BetheState, box_length: f64, points: usize) -> NnlsResult<FdReport> {
    let n = state.particle_number();
    let min = match n {
        2 => FD_MIN_POINTS_2,
        3 => FD_MIN_POINTS_3,
        _ => return Err(NnlsError::invalid(format!("finite-difference check supports N = 2, 3 (got {n})"))),
    };
    if points < min {
        return Err(NnlsError::invalid(format!(
            "insufficient grid: {points} points per dimension, need at least {min} for N = {n}"
        )));
    }
    if !(box_length.is_finite() && box_length > 0.0) {
        return Err(NnlsError::invalid("box length must be positive"));
    }
    let h = box_length / (points - 1) as f64;
    let coord = |a: usize| -0.5 * box_length + a as f64 * h;
    let strides: Vec<usize> = (0..n).map(|d| points.pow((n - 1 - d) as u32)).collect();
    let total = points.pow(n as u32);

    let samples: Vec<C64> = (0..total)
        .map(|flat| {
            let x: Vec<f64> = strides.iter().map(|s| coord((flat / s) % points)).collect();
            psi(state, &x)
        })
        .collect();

    let energy = state.energy();
    let c = state.coupling();
    let (mut num, mut den, mut hpsi_psi, mut psi_psi) = (0.0, 0.0, C64::new(0.0, 0.0), 0.0);
    let mut idx = vec![0usize; n];
    for flat in 0..total {
        for d in 0..n {
            idx[d] = (flat / strides[d]) % points;
        }
        if idx.iter().any(|&a| a == 0 || a == points - 1) {
            continue;
        }
        let v = samples[flat];
        let mut lap = C64::new(0.0, 0.0);
        for s in &strides {
            lap += samples[flat + s] + samples[flat - s] - 2.0 * v;
        }
        let mut hv = -lap / (h * h);
        let contacts = (0..n).tuple_combinations().filter(|&(p, q)| idx[p] == idx[q]).count();
        hv += 2.0 * c * contacts as f64 / h * v;
        num += (hv - energy * v).norm_sqr();
        den += (energy * v).norm_sqr();
        hpsi_psi += v.conj() * hv;
        psi_psi += v.norm_sqr();
    }
    if psi_psi == 0.0 {
        return Err(NnlsError::invalid("wavefunction vanishes on the interior grid"));
    }
    let den = if den > 0.0 { den } else { psi_psi };
    Ok(FdReport {
        particles: n,
        grid_points: points,
        spacing: h,
        box_length,
        energy: energy.re,
        rayleigh_energy: hpsi_psi.re / psi_psi,
        residual: (num / den).sqrt(),
    })
}

/// Converged solution of the ring quantization conditions.
#[derive(Clone, Debug, Serialize)]
pub struct RingSolution {
    pub state: BetheState,
    pub quantum_numbers: Vec<i64>,
    pub box_length: f64,
    pub energy: f64,
    pub momentum: f64,
    pub residual: f64,
    pub iterations: usize,
}

pub const RING_TOL: f64 = 1e-12;
const RING_MAX_ITER: usize = 100;

/// Solves `kⱼ L = 2π Iⱼ + Σ_{l≠j} Δ(kⱼ − k_l)` on a ring of length `L` for
/// `c > 0`, where `e^{iΔ(kⱼ−k_l)} = s_matrix_phase(k_l, kⱼ)⁻¹` and `Δ` is the
/// branch `2 arctan(c / (kⱼ − k_l))` that vanishes as `c → 0⁺`. With the
/// `kⱼ` ordered like the sorted `Iⱼ` this is equivalent to the smooth form
///
/// ```text
/// kⱼ L + Σ_{l≠j} 2 arctan((kⱼ − k_l)/c) = 2π (Iⱼ + j − (N−1)/2)
/// ```
///
/// which is what Newton iterates on, starting from the free solution
/// `kⱼ = 2πIⱼ/L` with backtracking. Repeated quantum numbers are allowed.
pub fn solve_ring_bethe(box_length: f64, coupling: f64, quantum_numbers: &[i64]) -> NnlsResult<RingSolution> {
    if !(coupling > 0.0 && coupling.is_finite()) {
        return Err(NnlsError::invalid("ring Bethe solver needs c > 0"));
    }
    if !(box_length > 0.0 && box_length.is_finite()) {
        return Err(NnlsError::invalid("box length must be positive"));
    }
    if quantum_numbers.is_empty() {
        return Err(NnlsError::invalid("at least one quantum number is required"));
    }
    let mut qn = quantum_numbers.to_vec();
    qn.sort_unstable();
    let n = qn.len();
    let targets: Vec<f64> = qn
        .iter()
        .enumerate()
        .map(|(j, &q)| TAU * (q as f64 + j as f64 - 0.5 * (n as f64 - 1.0)))
        .collect();
    let residual_vec = |k: &DVector<f64>| {
        DVector::from_fn(n, |j, _| {
            let scatter: f64 = (0..n)
                .filter(|&l| l != j)
                .map(|l| 2.0 * ((k[j] - k[l]) / coupling).atan())
                .sum();
            k[j] * box_length + scatter - targets[j]
        })
    };
    let mut k = DVector::from_fn(n, |j, _| TAU * qn[j] as f64 / box_length);
    let mut f = residual_vec(&k);
    let mut iterations = 0;
    while f.amax() >= RING_TOL {
        if iterations == RING_MAX_ITER {
            return Err(NnlsError::NonConvergence { iterations, residual: f.amax() });
        }
        iterations += 1;
        let jac = DMatrix::from_fn(n, n, |j, l| {
            if j == l {
                box_length
                    + (0..n)
                        .filter(|&m| m != j)
                        .map(|m| 2.0 * coupling / (coupling.powi(2) + (k[j] - k[m]).powi(2)))
                        .sum::<f64>()
            } else {
                -2.0 * coupling / (coupling.powi(2) + (k[j] - k[l]).powi(2))
            }
        });
        let step = jac.lu().solve(&f).ok_or(NnlsError::NonConvergence { iterations, residual: f.amax() })?;
        let mut damping = 1.0;
        loop {
            let trial = &k - &step * damping;
            let ft = residual_vec(&trial);
            if ft.norm() < f.norm() || damping < 1e-6 {
                k = trial;
                f = ft;
                break;
            }
            damping *= 0.5;
        }
    }
    let rapidities: Vec<f64> = k.iter().copied().collect();
    let state = BetheState::new(rapidities, coupling)?;
    Ok(RingSolution {
        energy: state.energy().re,
        momentum: state.momentum().re,
        state,
        quantum_numbers: qn,
        box_length,
        residual: f.amax(),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s_matrix_examples() {
        assert_eq!(s_matrix_phase(0.3, 1.7, 0.0).unwrap(), C64::new(1.0, 0.0));
        let s = s_matrix_phase(0.0, 1.0, 1.0).unwrap();
        assert!((s - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(s_matrix_phase(1.0, 1.0, 0.0).is_err());
        assert!((s_matrix_phase(1.0, 1.0, 2.0).unwrap() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn state_validation() {
        assert!(BetheState::new(vec![1.0, 1.0], 1.0).is_err());
        assert!(BetheState::new(vec![], 1.0).is_err());
        let s = BetheState::new(vec![2.0, -1.0], 1.5).unwrap();
        assert_eq!(s.rapidities()[0].re, -1.0);
        assert_eq!(s.energy().re, 5.0);
        assert_eq!(s.momentum().re, 1.0);
        assert!(BetheState::bound_pair(0.0, 1.0).is_err());
        let b = BetheState::bound_pair(0.0, -2.0).unwrap();
        assert!((b.energy() - C64::new(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn free_wavefunction_is_symmetric_plane_wave_sum() {
        let s = BetheState::new(vec![-0.7, 1.1], 0.0).unwrap();
        let (x1, x2) = (0.4, -1.3);
        let v = eval_wavefunction(&s, &[x1, x2]).unwrap().complex();
        let want = (I * (-0.7 * x1 + 1.1 * x2)).exp() + (I * (-0.7 * x2 + 1.1 * x1)).exp();
        assert!((v - want).norm() < 1e-14);
        assert_eq!(check_cusp(&s, (0, 1), &[0.2, 0.2]).unwrap(), 0.0);
    }

    #[test]
    fn bound_pair_profile() {
        let b = BetheState::bound_pair(0.0, -2.0).unwrap();
        for &(x1, x2) in &[(0.0, 0.0), (0.3, -0.4), (-2.0, 1.0), (5.0, 5.5)] {
            let v = eval_wavefunction(&b, &[x1, x2]).unwrap().complex();
            let want = (-(x1 - x2 as f64).abs()).exp();
            assert!((v - want).norm() < 1e-13, "{x1} {x2}: {v}");
        }
        assert!(check_cusp(&b, (0, 1), &[0.1, 0.1]).unwrap() < 1e-12);
    }

    #[test]
    fn leading_coefficient_is_one() {
        let s = BetheState::new(vec![-1.0, 0.5, 2.0], 0.8).unwrap();
        let lead: C64 = (0..3)
            .tuple_combinations()
            .map(|(a, b): (usize, usize)| s.gaudin_factor(a, b, -1.0))
            .product();
        assert!((lead * s.normalization() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn fd_rejects_small_grids() {
        let s = BetheState::new(vec![-1.0, 2.0], 1.5).unwrap();
        assert!(verify_eigenstate_fd(&s, 30.0, 100).is_err());
        let s1 = BetheState::new(vec![0.5], 1.0).unwrap();
        assert!(verify_eigenstate_fd(&s1, 30.0, 400).is_err());
    }

    #[test]
    fn ring_free_limit() {
        let l = 7.0;
        let sol = solve_ring_bethe(l, 1e-9, &[-1, 0, 2]).unwrap();
        for (k, i) in sol.state.rapidities().iter().zip([-1.0, 0.0, 2.0]) {
            assert!((k.re - TAU * i / l).abs() < 1e-7);
        }
        assert!(solve_ring_bethe(l, -1.0, &[0, 1]).is_err());
    }

    #[test]
    fn ring_solution_satisfies_multiplicative_form() {
        let (l, c) = (5.0, 1.3);
        let sol = solve_ring_bethe(l, c, &[-1, 0, 0, 2]).unwrap();
        assert!(sol.residual < RING_TOL);
        let ks: Vec<f64> = sol.state.rapidities().iter().map(|k| k.re).collect();
        for j in 0..ks.len() {
            let lhs = C64::from_polar(1.0, ks[j] * l);
            let rhs: C64 = (0..ks.len())
                .filter(|&m| m != j)
                .map(|m| s_matrix_phase(ks[j], ks[m], c).unwrap())
                .product();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }
}
