use std::f64::consts::TAU;
use std::path::Path;
use std::sync::Arc;

use nnls::bethe::*;
use nnls::classical::{evolve_with_charges, ClassicalField, SplitStep};
use nnls::export::{real, write_dense_csv, write_spectrum_rows, write_trajectory, SPECTRUM_HEADER};
use nnls::fock::{FockState, SectorBasis};
use nnls::lattice::MomentumGrid;
use nnls::metric::{gram, p_adjoint, PairingKind};
use nnls::qoperators::*;
use nnls::spectra::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{write_json, write_with};
use crate::*;

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T { flag.or(file).unwrap_or(default) }

fn coupling(c: f64) -> Result<Coupling, CliError> { Ok(Coupling::new(c)?) }

fn sector(l: f64, m: u32, n: usize, block: Option<i64>) -> Result<Arc<SectorBasis>, CliError> {
    Ok(Arc::new(SectorBasis::enumerate(MomentumGrid::new(l, m)?, n, block)?))
}

/// Grid and sector after layering flags over the config file.
struct Sector {
    length: f64,
    modes: u32,
    particles: usize,
}

fn resolve_sector(flags: &SectorFlags, cfg: &RunConfig, defaults: (f64, u32, usize)) -> Sector {
    Sector {
        length: pick(flags.length, cfg.grid.length, defaults.0),
        modes: pick(flags.modes, cfg.grid.modes, defaults.1),
        particles: pick(flags.particles, cfg.sector.particles, defaults.2),
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Spectrum(a) => spectrum(a),
        Command::Gram(a) => gram_cmd(a),
        Command::Hermiticity(a) => hermiticity(a),
        Command::LsSeries(a) => ls_series_cmd(a),
        Command::BetheVerify(a) => bethe_verify(a),
        Command::RingBethe(a) => ring_bethe(a),
        Command::BoundState(a) => bound_state(a),
        Command::Evolve(a) => evolve(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn load(common: &Common) -> Result<(RunConfig, Option<std::path::PathBuf>), CliError> {
    let cfg = RunConfig::load(common.config.as_deref())?;
    let out = common.out.clone().or_else(|| cfg.output.out.clone());
    Ok((cfg, out))
}

fn spectrum(a: SpectrumArgs) -> Result<(), CliError> {
    let (cfg, out) = load(&a.common)?;
    let s = resolve_sector(&a.sector, &cfg, (TAU, 8, 2));
    let c = pick(a.coupling, cfg.coupling, 1.0);
    let block = a.momentum_block.or(cfg.sector.momentum_block);
    let basis = sector(s.length, s.modes, s.particles, block)?;
    let spec = diagonalize(&build_hamiltonian(&basis, coupling(c)?))?;
    write_with(out.as_deref(), |w| {
        writeln!(w, "{SPECTRUM_HEADER}")?;
        write_spectrum_rows(w, &spec)
    })
}

fn gram_cmd(a: GramArgs) -> Result<(), CliError> {
    let (cfg, out) = load(&a.common)?;
    let s = resolve_sector(&a.sector, &cfg, (1.0, 4, 1));
    let kind: PairingKind = pick(a.kind, cfg.pairing.clone(), "dirac".into())
        .parse()
        .map_err(|e: nnls::NnlsError| CliError::Core(e))?;
    let basis = sector(s.length, s.modes, s.particles, cfg.sector.momentum_block)?;
    let g = gram(&basis, kind);
    write_with(out.as_deref(), |w| write_dense_csv(w, g.matrix()))?;
    if let Some(path) = a.basis_out.or(cfg.output.basis_out) {
        write_basis(&path, &basis)?;
    }
    Ok(())
}

fn write_basis(path: &Path, basis: &SectorBasis) -> Result<(), CliError> {
    write_with(Some(path), |w| {
        writeln!(w, "index,modes")?;
        for (i, s) in basis.states().iter().enumerate() {
            let modes: Vec<String> = s.modes().iter().map(|m| m.to_string()).collect();
            writeln!(w, "{i},{}", modes.join(" "))?;
        }
        Ok(())
    })
}

fn hermiticity(a: HermiticityArgs) -> Result<(), CliError> {
    let (cfg, out) = load(&a.common)?;
    let s = resolve_sector(&a.sector, &cfg, (TAU, 6, 2));
    let c = pick(a.coupling, cfg.coupling, 1.0);
    let basis = sector(s.length, s.modes, s.particles, None)?;
    let h = build_hamiltonian(&basis, coupling(c)?);
    let n = build_number(&basis);
    let p = build_momentum(&basis);
    let par = build_parity(&basis)?;
    let vm = build_v_momentum(&basis, coupling(c)?);
    let vp = build_v_position(&basis, coupling(c)?);
    let report = json!({
        "parameters": {"length": s.length, "modes": s.modes, "particles": s.particles, "coupling": c},
        "dim": basis.dim(),
        "p_adjoint_defect_h": max_abs(&(p_adjoint(&h, &par)?.matrix() - h.matrix())),
        "p_adjoint_defect_n": max_abs(&(p_adjoint(&n, &par)?.matrix() - n.matrix())),
        "hermiticity_defect_h": h.hermiticity_defect(),
        "max_imag_eigenvalue": max_imaginary_eigenvalue(h.matrix())?,
        "commutator_h_n": max_abs(&h.commutator(&n)?),
        "commutator_h_p": max_abs(&h.commutator(&p)?),
        "locality_gap": relative_frobenius(vp.matrix(), vm.matrix()),
    });
    write_json(out.as_deref(), &report)
}

fn ls_series_cmd(a: LsSeriesArgs) -> Result<(), CliError> {
    let (cfg, out) = load(&a.common)?;
    let s = resolve_sector(&a.sector, &cfg, (TAU, 6, 2));
    let c = pick(a.coupling, cfg.coupling, 0.1);
    let order = pick(a.order, cfg.series.order, 4);
    let reference = FockState::from_modes(pick(a.reference, cfg.series.reference.clone(), vec![0; s.particles]));
    if reference.particle_number() != s.particles {
        return Err(CliError::Usage(format!(
            "reference {reference} has {} particles, sector has {}",
            reference.particle_number(),
            s.particles
        )));
    }
    let basis = sector(s.length, s.modes, s.particles, Some(reference.total_momentum_index()))?;
    let series = ls_series(&basis, &reference, coupling(c)?, order)?;
    let w = series.reference_energy();
    let exact = if basis.dim() <= DENSE_LIMIT {
        let spec = diagonalize(&build_hamiltonian(&basis, coupling(c)?))?;
        spec.eigenvalues().iter().copied().min_by(|x, y| (x - w).abs().total_cmp(&(y - w).abs()))
    } else {
        None
    };
    let energies: Vec<f64> = (1..=order).map(|o| series.energy_through(o)).collect();
    let report = json!({
        "parameters": {"length": s.length, "modes": s.modes, "particles": s.particles, "coupling": c, "order": order},
        "momentum_block": reference.total_momentum_index(),
        "dim": basis.dim(),
        "reference": reference.modes(),
        "reference_energy": w,
        "on_shell_states": series.on_shell_mask().iter().filter(|&&x| x).count(),
        "term_norms": series.term_norms(),
        "on_shell_norms": series.on_shell_norms(),
        "energy_through_order": energies,
        "exact_level_nearest_reference": exact,
    });
    write_json(out.as_deref(), &report)
}

fn bethe_verify(a: BetheVerifyArgs) -> Result<(), CliError> {
    let (cfg, out) = load(&a.common)?;
    let ks = pick(a.rapidities, cfg.rapidities.clone(), vec![-1.0, 2.0]);
    let c = pick(a.coupling, cfg.coupling, 1.5);
    let points = pick(a.grid, cfg.fd.grid, 400);
    let box_length = pick(a.box_length, cfg.fd.box_length, 30.0);
    let seed = pick(a.seed, cfg.seed, 0);
    let samples = pick(a.samples, cfg.samples, 8);
    let state = BetheState::new(ks, c)?;
    let n = state.particle_number();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cusps = Vec::new();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-0.25 * box_length..0.25 * box_length)).collect();
        for i in 0..n {
            for j in i + 1..n {
                let d = cusp_data(&state, (i, j), &x)?;
                worst = worst.max(d.residual);
                cusps.push(json!({"pair": [i, j], "point": x, "jump": d.jump, "value": d.value, "residual": d.residual}));
            }
        }
    }
    let fd = if matches!(n, 2 | 3) { Some(verify_eigenstate_fd(&state, box_length, points)?) } else { None };
    let report = json!({
        "state": state,
        "energy": state.energy().re,
        "momentum": state.momentum().re,
        "seed": seed,
        "cusp": {"max_residual": worst, "samples": cusps},
        "finite_difference": fd,
    });
    write_json(out.as_deref(), &report)
}

fn ring_bethe(a: RingBetheArgs) -> Result<(), CliError> {
    let (cfg, out) = load(&a.common)?;
    let l = pick(a.length, cfg.grid.length, TAU);
    let c = pick(a.coupling, cfg.coupling, 1.0);
    let qn = pick(a.quantum_numbers, cfg.quantum_numbers.clone(), vec![0, 1]);
    let sol = solve_ring_bethe(l, c, &qn)?;
    write_json(out.as_deref(), &sol)
}

fn bound_state(a: BoundStateArgs) -> Result<(), CliError> {
    let (cfg, out) = load(&a.common)?;
    let l = pick(a.length, cfg.grid.length, 20.0);
    let c = pick(a.coupling, cfg.coupling, -2.0);
    let p = pick(a.total_momentum, cfg.total_momentum, 0.0);
    let cutoffs = pick(a.cutoffs, cfg.sweep.cutoffs.clone(), vec![8, 16, 24, 32]);
    let points = pick(a.grid, cfg.fd.grid, 401);
    let box_length = pick(a.box_length, cfg.fd.box_length, 30.0);
    let state = BetheState::bound_pair(p, c)?;
    let k = p * l / TAU;
    if (k - k.round()).abs() > 1e-9 {
        return Err(CliError::Usage(format!("total momentum {p} is not a multiple of 2π/L on a box of length {l}")));
    }
    let rows = convergence_sweep(l, 2, coupling(c)?, Some(k.round() as i64), &cutoffs, 1)?;
    let ed: Vec<_> = rows
        .iter()
        .map(|r| json!({"mode_cutoff": r.mode_cutoff, "dim": r.dim, "ground_energy": r.eigenvalues.first()}))
        .collect();
    let fd = verify_eigenstate_fd(&state, box_length, points)?;
    let report = json!({
        "parameters": {"length": l, "coupling": c, "total_momentum": p},
        "analytic_energy": state.energy().re,
        "cusp_residual": check_cusp(&state, (0, 1), &[0.0, 0.0])?,
        "diagonalization": ed,
        "finite_difference": fd,
    });
    write_json(out.as_deref(), &report)
}

fn evolve(a: EvolveArgs) -> Result<(), CliError> {
    let (cfg, out) = load(&a.common)?;
    let l = pick(a.length, cfg.grid.length, 20.0);
    let m = pick(a.modes, cfg.grid.modes, 256);
    let c = pick(a.coupling, cfg.coupling, 1.0);
    let dt = pick(a.dt, cfg.integrator.dt, 1e-4);
    let steps = pick(a.steps, cfg.integrator.steps, 10_000);
    let every = pick(a.every, cfg.integrator.every, 100);
    let init = &cfg.initial;
    let kind = pick(a.initial, init.kind.clone(), "gaussian".into());
    let amplitude = pick(a.amplitude, init.amplitude, 1.0);
    let grid = MomentumGrid::new(l, m)?.position_grid();
    let field = match kind.as_str() {
        "gaussian" => ClassicalField::gaussian(
            grid,
            amplitude,
            pick(a.center, init.center, 0.5),
            pick(a.width, init.width, 1.0),
            pick(a.wavenumber, init.wavenumber, 0.3),
        )?,
        "plane-wave" | "plane_wave" => ClassicalField::plane_wave(grid, amplitude, pick(a.mode, init.mode, 1))?,
        other => return Err(CliError::Usage(format!("unknown initial condition '{other}' (gaussian, plane-wave)"))),
    };
    let cfl = SplitStep::new(grid, coupling(c)?, dt)?.cfl_number();
    if cfl >= 1.0 {
        eprintln!("warning: dt·p_max² = {cfl:.3} ≥ 1; the fastest modes are poorly resolved");
    }
    let (last, rows) = evolve_with_charges(&field, coupling(c)?, dt, steps, every)?;
    write_with(out.as_deref(), |w| write_trajectory(w, &rows))?;
    if let Some(path) = a.snapshot.or(cfg.output.snapshot) {
        write_with(Some(&path), |w| {
            writeln!(w, "x,re,im")?;
            for (j, v) in last.values().iter().enumerate() {
                writeln!(w, "{},{},{}", real(grid.x(j)), real(v.re), real(v.im))?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let (cfg, out) = load(&a.common)?;
    let l = pick(a.length, cfg.grid.length, TAU);
    let n = pick(a.particles, cfg.sector.particles, 2);
    let c = pick(a.coupling, cfg.coupling, 1.0);
    let block = a.momentum_block.or(cfg.sector.momentum_block);
    let cutoffs = pick(a.cutoffs, cfg.sweep.cutoffs.clone(), vec![4, 8, 16, 32]);
    let levels = pick(a.levels, cfg.sweep.levels, 4);
    let rows = convergence_sweep(l, n, coupling(c)?, block, &cutoffs, levels)?;
    write_with(out.as_deref(), |w| {
        writeln!(w, "mode_cutoff,dim,level,eigenvalue")?;
        for r in &rows {
            for (i, e) in r.eigenvalues.iter().enumerate() {
                writeln!(w, "{},{},{i},{}", r.mode_cutoff, r.dim, real(*e))?;
            }
        }
        Ok(())
    })
}
