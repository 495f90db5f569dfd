//! One function per command; each returns a table whose leading columns are
//! the swept coordinates.

use crate::error::CliError;
use crate::output::{Cell, Table};
use crate::runspec::{Command, RunSpec};
use crate::sweep::{grid, Axis, Point, Scale, Var};
use nhqa_core::lz::{adiabatic_projection, lz_context, prob_flip, prob_ground};
use nhqa_core::tdse::{self, Initial};
use nhqa_core::{bloch, model, observables, oracle, Amplitudes, ChainParams, Engine, ModeContext, NhqaError};
use rayon::prelude::*;
use std::f64::consts::PI;

pub struct Report {
    pub table: Table,
    /// Human-readable lines for stderr.
    pub summary: Vec<String>,
}

pub fn run(job: &RunSpec) -> Result<Report, CliError> {
    match job.command {
        Command::GapSurface => gap_surface(job),
        Command::ModeProb => trajectories(job, &[1, 16, 64, 256], true),
        Command::PgsTrajectory => trajectories(job, &[1, 2, 4, 8, 16, 32, 64, 128, 256, 512], false),
        Command::KinksVsDelta => kinks_vs_delta(job),
        Command::KinksSurface => kinks_surface(job),
        Command::MagnetizationVsTau => magnetization_vs_tau(job),
        Command::PgsVsDelta => pgs_vs_delta(job),
        Command::PgsSurface => pgs_surface(job),
        Command::AnnealTime => anneal_time(job),
        Command::OracleCheck => oracle_check(job),
        Command::BlochCheck => bloch_check(job),
    }
}

fn axes(job: &RunSpec, defaults: &[Axis], forbidden: &[Var]) -> Result<Vec<Axis>, CliError> {
    let axes = if job.sweeps.is_empty() { defaults.to_vec() } else { job.sweeps.clone() };
    if let Some(a) = axes.iter().find(|a| forbidden.contains(&a.var)) {
        return Err(CliError::Usage(format!("{} cannot sweep {}", job.command.name(), a.var.name())));
    }
    Ok(axes)
}

/// Grid points with chain parameters checked; g = δ = 0 is allowed since the
/// observables treat it as a static Hamiltonian.
fn points(job: &RunSpec, axes: &[Axis]) -> Result<Vec<Point>, CliError> {
    let pts = grid(&job.params, axes)?;
    for p in &pts {
        let mut q = p.params;
        if q.g == 0.0 && q.delta == 0.0 {
            q.g = 1.0;
        }
        q.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(pts)
}

fn header(axes: &[Axis], rest: &[&str]) -> Table {
    let names: Vec<&str> = axes.iter().map(|a| a.var.name()).chain(rest.iter().copied()).collect();
    Table::new(&names)
}

fn lead(axes: &[Axis], p: &Point) -> Vec<Cell> {
    axes.iter()
        .zip(&p.coords)
        .map(|(a, &x)| if a.var == Var::N { Cell::I(x as i64) } else { Cell::F(x) })
        .collect()
}

fn collect_rows<F>(pts: &[Point], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(&Point) -> Result<Vec<Vec<Cell>>, CliError> + Sync + Send,
{
    let nested: Vec<Vec<Vec<Cell>>> = pts.par_iter().map(f).collect::<Result<_, _>>()?;
    Ok(nested.into_iter().flatten().collect())
}

fn finish(mut table: Table, rows: Vec<Vec<Cell>>, summary: Vec<String>) -> Result<Report, CliError> {
    for r in rows {
        table.push(r);
    }
    Ok(Report { table, summary })
}

fn gap_surface(job: &RunSpec) -> Result<Report, CliError> {
    let defaults = [Axis::new(Var::G, 0.0, 2.0, 81, Scale::Lin), Axis::new(Var::Theta, 0.0, PI, 81, Scale::Lin)];
    let axes = axes(job, &defaults, &[])?;
    if !axes.iter().any(|a| a.var == Var::Theta) {
        return Err(CliError::Usage("gap-surface needs a theta sweep".into()));
    }
    let pts = grid(&job.params, &axes)?;
    let table = header(&axes, &["gap"]);
    let rows = pts
        .iter()
        .map(|p| {
            let q = p.params;
            let mut row = lead(&axes, p);
            row.push(Cell::F(model::gap_abs(q.g, q.delta, p.theta.unwrap_or(0.0), q.j)));
            row
        })
        .collect();
    let (tc, gc) = model::critical_point(job.params.delta.min(1.0))?;
    finish(table, rows, vec![format!("critical point at δ={}: θ_c = {tc:.6}, g_c = {gc:.6}", job.params.delta)])
}

/// States along [0, τ] for one mode.
fn mode_samples(p: usize, params: &ChainParams, job: &RunSpec) -> Result<Vec<(f64, Amplitudes)>, CliError> {
    let mode = ModeContext::new(p, params)?;
    let cfg = nhqa_core::IntegratorConfig { dense_output_samples: job.samples, ..job.integrator };
    let from_tdse = |init| -> Result<Vec<(f64, Amplitudes)>, CliError> {
        Ok(tdse::integrate_mode(&mode, params, &cfg, init, false)?.into_iter().map(|s| (s.t, s.fwd)).collect())
    };
    let from_lz = |ground: bool| -> Result<Vec<(f64, Amplitudes)>, CliError> {
        let ctx = lz_context(&mode, params)?;
        tdse::sample_times(params, job.samples)
            .into_iter()
            .map(|t| {
                let a = if ground { ctx.ground_amplitudes(t)? } else { ctx.exact_amplitudes(t)? };
                Ok((t, a.0))
            })
            .collect()
    };
    match job.engine {
        Engine::Tdse => from_tdse(Initial::Diabatic),
        Engine::TdseGround => from_tdse(Initial::Ground),
        Engine::LzExact => from_lz(false),
        Engine::LzGround => from_lz(true),
        Engine::Asympt => Err(CliError::Usage("trajectories need tdse, tdse-ground, lz-exact or lz-ground".into())),
    }
}

fn trajectories(job: &RunSpec, default_modes: &[usize], with_flip: bool) -> Result<Report, CliError> {
    let axes = axes(job, &[], &[Var::Theta])?;
    let pts = points(job, &axes)?;
    let mut jobs = Vec::new();
    for pt in &pts {
        let modes: Vec<usize> = match &job.modes {
            Some(m) => m.clone(),
            None => default_modes.iter().copied().filter(|&p| p <= pt.params.modes()).collect(),
        };
        for p in modes {
            if p == 0 || p > pt.params.modes() {
                return Err(CliError::Usage(format!("mode p={p} outside 1..={}", pt.params.modes())));
            }
            jobs.push((pt, p));
        }
    }
    let cols: &[&str] = if with_flip { &["p", "phi", "t", "p_flip", "p_gs"] } else { &["p", "phi", "t", "p_gs"] };
    let table = header(&axes, cols);
    let rows: Vec<Vec<Vec<Cell>>> = jobs
        .par_iter()
        .map(|(pt, p)| -> Result<Vec<Vec<Cell>>, CliError> {
            let params = &pt.params;
            let phi = model::mode_angle(*p, params.n)?;
            mode_samples(*p, params, job)?
                .into_iter()
                .map(|(t, a)| {
                    let pgs = adiabatic_projection(phi, t, params, &a).ok().and_then(|(al, be)| prob_ground(al, be).ok());
                    let mut row = lead(&axes, pt);
                    row.extend([Cell::from(*p), Cell::F(phi), Cell::F(t)]);
                    if with_flip {
                        row.push(Cell::F(prob_flip(a.u, a.v)?));
                    }
                    row.push(Cell::from(pgs));
                    Ok(row)
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<Cell>> = rows.into_iter().flatten().collect();
    let summary = vec![format!("{} trajectories, {} samples each, engine {}", jobs.len(), job.samples, job.engine)];
    finish(table, rows, summary)
}

/// 2Σ_{p ≤ count}(1 − P^gs_p)/N.
fn partial_density(per: &[f64], count: usize, n: usize) -> f64 {
    observables::kink_count(&per[..count.min(per.len())]) / n as f64
}

fn asympt_density(params: &ChainParams) -> Option<f64> {
    observables::kink_density_asympt(params).ok().map(|k| k.n)
}

fn kinks_vs_delta(job: &RunSpec) -> Result<Report, CliError> {
    let axes = axes(job, &[Axis::new(Var::Delta, 0.0, 1.0, 21, Scale::Lin)], &[Var::Theta])?;
    let pts = points(job, &axes)?;
    let table = header(&axes, &["n_exact", "n_asympt", "n_first_1", "n_first_8", "n_first_16", "n_first_32"]);
    let rows = collect_rows(&pts, |pt| {
        let per = observables::per_mode_pgs(&pt.params, job.engine, &job.integrator)?;
        let n = pt.params.n;
        let mut row = lead(&axes, pt);
        row.push(Cell::F(observables::kink_count(&per) / n as f64));
        row.push(Cell::from(asympt_density(&pt.params)));
        for k in [1, 8, 16, 32] {
            row.push(Cell::F(partial_density(&per, k, n)));
        }
        Ok(vec![row])
    })?;
    finish(table, rows, vec![format!("{} points, engine {}", pts.len(), job.engine)])
}

fn kinks_surface(job: &RunSpec) -> Result<Report, CliError> {
    let defaults = [Axis::new(Var::Delta, 0.0, 1.0, 11, Scale::Lin), Axis::new(Var::Tau, 100.0, 10000.0, 11, Scale::Log)];
    let axes = axes(job, &defaults, &[Var::Theta])?;
    let pts = points(job, &axes)?;
    let table = header(&axes, &["n_exact", "n_asympt"]);
    let rows = collect_rows(&pts, |pt| {
        let n = observables::kink_density_exact(&pt.params, job.engine, &job.integrator)?;
        let mut row = lead(&axes, pt);
        row.extend([Cell::F(n), Cell::from(asympt_density(&pt.params))]);
        Ok(vec![row])
    })?;
    finish(table, rows, vec![format!("{} points, engine {}", pts.len(), job.engine)])
}

fn magnetization_vs_tau(job: &RunSpec) -> Result<Report, CliError> {
    let axes = axes(job, &[Axis::new(Var::Tau, 100.0, 100000.0, 31, Scale::Log)], &[Var::Theta])?;
    let pts = points(job, &axes)?;
    let table = header(&axes, &["n_exact", "m_z", "residual_energy"]);
    let rows = collect_rows(&pts, |pt| {
        let r = observables::anneal(&pt.params, job.engine, &job.integrator)?;
        let mut row = lead(&axes, pt);
        row.extend([Cell::F(r.kink_density), Cell::from(r.magnetization), Cell::F(r.residual_energy)]);
        Ok(vec![row])
    })?;
    finish(table, rows, vec![format!("{} points, engine {}", pts.len(), job.engine)])
}

fn pgs_vs_delta(job: &RunSpec) -> Result<Report, CliError> {
    let axes = axes(job, &[Axis::new(Var::Delta, 0.0, 1.0, 21, Scale::Lin)], &[Var::Theta])?;
    let pts = points(job, &axes)?;
    let table = header(&axes, &["ln_pgs", "pgs", "pgs_first_mode", "ln_pgs_first_n64"]);
    let rows = collect_rows(&pts, |pt| {
        let per = observables::per_mode_pgs(&pt.params, job.engine, &job.integrator)?;
        let total = observables::pgs_total(&per)?;
        let head = observables::pgs_total(&per[..(pt.params.n / 64).max(1).min(per.len())])?;
        let mut row = lead(&axes, pt);
        row.extend([
            Cell::F(total.ln_value),
            Cell::F(total.value),
            Cell::F(observables::pgs_first_mode(&pt.params)),
            Cell::F(head.ln_value),
        ]);
        Ok(vec![row])
    })?;
    finish(table, rows, vec![format!("{} points, engine {}", pts.len(), job.engine)])
}

fn pgs_surface(job: &RunSpec) -> Result<Report, CliError> {
    let defaults = [Axis::new(Var::Delta, 0.0, 1.0, 21, Scale::Lin), Axis::new(Var::Tau, 100.0, 1e6, 41, Scale::Log)];
    let axes = axes(job, &defaults, &[Var::Theta])?;
    let pts = points(job, &axes)?;
    let table = header(&axes, &["delta_star", "tau_star", "p_tau"]);
    let rows = collect_rows(&pts, |pt| {
        let q = &pt.params;
        let tau0 = q.tau0();
        let mut row = lead(&axes, pt);
        row.extend([Cell::F(q.delta * tau0 / (q.g * q.g)), Cell::F(q.tau / tau0), Cell::F(observables::pgs_first_mode(q))]);
        Ok(vec![row])
    })?;
    finish(table, rows, vec![format!("{} points", pts.len())])
}

fn anneal_time(job: &RunSpec) -> Result<Report, CliError> {
    let axes = axes(job, &[Axis::new(Var::N, 64.0, 4096.0, 7, Scale::Log)], &[Var::Theta, Var::Tau])?;
    let pts = points(job, &axes)?;
    let table = header(&axes, &["tau_exact", "tau_t1", "rel_diff", "tau_hermitian", "speedup"]);
    let rows = collect_rows(&pts, |pt| {
        let r = observables::anneal_time(&pt.params, job.target)?;
        let herm = observables::anneal_time(&ChainParams { delta: 0.0, ..pt.params }, job.target)?.tau;
        let rel = r.estimate.map(|e| (r.tau - e).abs() / r.tau);
        let mut row = lead(&axes, pt);
        row.extend([Cell::F(r.tau), Cell::from(r.estimate), Cell::from(rel), Cell::F(herm), Cell::F(herm / r.tau)]);
        Ok(vec![row])
    })?;
    finish(table, rows, vec![format!("{} points, target P = {}", pts.len(), job.target)])
}

fn oracle_check(job: &RunSpec) -> Result<Report, CliError> {
    let axes = axes(job, &[Axis::new(Var::N, 4.0, 8.0, 3, Scale::Lin)], &[Var::Theta])?;
    let pts = points(job, &axes)?;
    if let Some(p) = pts.iter().find(|p| p.params.n > oracle::MAX_SPINS) {
        return Err(CliError::Usage(format!("oracle-check needs N <= {}, got {}", oracle::MAX_SPINS, p.params.n)));
    }
    let table = header(&axes, &["dense_pgs", "mode_pgs", "abs_diff", "max_odd_fraction"]);
    let rows = collect_rows(&pts, |pt| {
        let dense = oracle::evolve_dense(&pt.params, &job.integrator, 10)?;
        let modes = oracle::mode_product_pgs(&pt.params, &job.integrator)?;
        let mut row = lead(&axes, pt);
        row.extend([
            Cell::F(dense.final_pgs()),
            Cell::F(modes),
            Cell::F((dense.final_pgs() - modes).abs()),
            Cell::F(dense.max_odd_fraction()),
        ]);
        Ok(vec![row])
    })?;
    let worst = rows
        .iter()
        .filter_map(|r| match r[axes.len() + 2] {
            Cell::F(x) => Some(x),
            _ => None,
        })
        .fold(0.0, f64::max);
    finish(table, rows, vec![format!("max |dense - mode product| = {}", crate::output::format_float(worst))])
}

fn bloch_check(job: &RunSpec) -> Result<Report, CliError> {
    if !job.sweeps.is_empty() {
        return Err(CliError::Usage("bloch-check runs a fixed suite and takes no sweep".into()));
    }
    let suite = bloch::reference_suite();
    let table = Table::new(&["case", "max_vec_dev", "max_ln_norm_dev", "max_purity_defect", "worst"]);
    let results: Vec<Vec<Cell>> = suite
        .par_iter()
        .map(|case| -> Result<Vec<Cell>, NhqaError> {
            let eq = case.compare(50, &job.integrator)?;
            Ok(vec![
                Cell::S(case.name.to_string()),
                Cell::F(eq.max_vec_dev),
                Cell::F(eq.max_ln_norm_dev),
                Cell::F(eq.max_purity_defect),
                Cell::F(eq.worst()),
            ])
        })
        .collect::<Result<_, _>>()?;
    let worst = results
        .iter()
        .filter_map(|r| match r[4] {
            Cell::F(x) => Some(x),
            _ => None,
        })
        .fold(0.0, f64::max);
    finish(table, results, vec![format!("{} cases, max deviation {}", suite.len(), crate::output::format_float(worst))])
}
