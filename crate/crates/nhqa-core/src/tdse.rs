//! Numerical integration of the rotating-frame mode equations
//! i u̇ = J(−(g̃ − cos φ)u + sin φ v), i v̇ = J(sin φ u + (g̃ − cos φ)v)
//! and of their adjoint (J → −J).

use crate::error::{NhqaError, Result};
use crate::lz::{adiabatic_projection, prob_flip, prob_ground, Amplitudes, ModeState};
use crate::model::{self, ChainParams, ModeContext};
use num_complex::Complex64;
use ode_solvers::{Dopri5, OutputType, System, Vector4};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Defaults to τ/1000 when `None`.
    pub max_step: Option<f64>,
    pub dense_output_samples: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { rel_tol: 1e-10, abs_tol: 1e-10, max_step: None, dense_output_samples: 201 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(x > 0.0 && x <= 1e-3) {
                return Err(NhqaError::Param(format!("{name} must lie in (0, 1e-3], got {x}")));
            }
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(NhqaError::Param(format!("max_step must be > 0, got {h}")));
            }
        }
        if self.dense_output_samples < 2 {
            return Err(NhqaError::Param("dense_output_samples must be >= 2".into()));
        }
        Ok(())
    }

    fn h_max(&self, tau: f64) -> f64 {
        self.max_step.unwrap_or(tau / 1000.0)
    }

    /// Same configuration with both tolerances multiplied by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        IntegratorConfig { rel_tol: self.rel_tol * f, abs_tol: self.abs_tol * f, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    /// (u, v) = (1, 0)
    Diabatic,
    /// Ground eigenvector of the mode Hamiltonian at t = 0.
    Ground,
    Custom(Complex64, Complex64),
}

impl Initial {
    /// Forward and adjoint initial vectors with ũu + ṽv = 1.
    pub fn vectors(&self, phi: f64, params: &ChainParams) -> Result<((Complex64, Complex64), (Complex64, Complex64))> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match *self {
            Initial::Diabatic => Ok(((one, zero), (one, zero))),
            Initial::Ground => {
                let s = model::spectrum_continued(phi, 0.0, params)?;
                let (c, sn) = model::half_angle(s.cos_theta, s.sin_theta);
                // u₋ = (−sin θ/2, cos θ/2) in (v, u); its left vector is the transpose
                Ok(((c, -sn), (c, -sn)))
            }
            Initial::Custom(u, v) => {
                let n = u * u + v * v;
                if n.norm() == 0.0 {
                    return Err(NhqaError::Param("custom initial vector has u² + v² = 0".into()));
                }
                Ok(((u, v), (u / n, v / n)))
            }
        }
    }
}

struct ModeOde {
    j: f64,
    cos: f64,
    sin: f64,
    gamma: Complex64,
    tau: f64,
}

impl System<f64, Vector4<f64>> for ModeOde {
    fn system(&self, t: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
        let g = if t < self.tau { self.gamma * (self.tau - t) } else { Complex64::new(0.0, 0.0) };
        let a = g - self.cos;
        let u = Complex64::new(y[0], y[1]);
        let v = Complex64::new(y[2], y[3]);
        let mi = Complex64::new(0.0, -self.j);
        let du = mi * (-a * u + self.sin * v);
        let dv = mi * (self.sin * u + a * v);
        dy[0] = du.re;
        dy[1] = du.im;
        dy[2] = dv.re;
        dy[3] = dv.im;
    }
}

fn ode(phi: f64, params: &ChainParams, adjoint: bool) -> ModeOde {
    let j = if adjoint { -params.j } else { params.j };
    ModeOde { j, cos: phi.cos(), sin: phi.sin(), gamma: params.gamma(), tau: params.tau }
}

fn step(sys: ModeOde, t0: f64, t1: f64, a: Amplitudes, config: &IntegratorConfig, h_max: f64) -> Result<Amplitudes> {
    if t0 == t1 {
        return Ok(a);
    }
    let y0 = Vector4::new(a.u.re, a.u.im, a.v.re, a.v.im);
    let mut solver = Dopri5::from_param(
        sys,
        t0,
        t1,
        0.0,
        y0,
        config.rel_tol,
        config.abs_tol,
        0.9,
        0.04,
        0.2,
        10.0,
        h_max,
        0.0,
        10_000_000,
        1000,
        OutputType::Sparse,
    );
    solver
        .integrate()
        .map_err(|e| NhqaError::Integrator { t: t0, reason: e.to_string() })?;
    let y = solver
        .results()
        .get()
        .1
        .last()
        .ok_or_else(|| NhqaError::Integrator { t: t0, reason: "no output".into() })?;
    if !y.iter().all(|x| x.is_finite()) {
        return Err(NhqaError::Integrator { t: t1, reason: "non-finite state".into() });
    }
    Ok(Amplitudes { u: Complex64::new(y[0], y[1]), v: Complex64::new(y[2], y[3]), ln_scale: a.ln_scale }.renormalized())
}

/// Evolves `init` from t0 to t1 (either direction), renormalising between
/// segments of at most τ/50.
pub fn evolve(
    phi: f64,
    params: &ChainParams,
    config: &IntegratorConfig,
    adjoint: bool,
    t0: f64,
    t1: f64,
    init: Amplitudes,
) -> Result<Amplitudes> {
    config.validate()?;
    let h_max = config.h_max(params.tau);
    let seg = params.tau / 50.0;
    let n = ((t1 - t0).abs() / seg).ceil().max(1.0) as usize;
    let mut a = init.renormalized();
    for k in 0..n {
        let ta = t0 + (t1 - t0) * k as f64 / n as f64;
        let tb = if k + 1 == n { t1 } else { t0 + (t1 - t0) * (k + 1) as f64 / n as f64 };
        a = step(ode(phi, params, adjoint), ta, tb, a, config, h_max)?;
    }
    Ok(a)
}

/// Evenly spaced sample times on [0, τ].
pub fn sample_times(params: &ChainParams, samples: usize) -> Vec<f64> {
    let n = samples.max(2);
    (0..n).map(|k| if k + 1 == n { params.tau } else { params.tau * k as f64 / (n - 1) as f64 }).collect()
}

/// Integrates one mode on [0, τ] and returns its state at the dense-output
/// sample times. The adiabatic decomposition is `None` at samples where the
/// eigenbasis is singular.
pub fn integrate_mode(
    mode: &ModeContext,
    params: &ChainParams,
    config: &IntegratorConfig,
    initial: Initial,
    with_adjoint: bool,
) -> Result<Vec<ModeState>> {
    integrate_mode_at(mode, params, config, initial, with_adjoint, &sample_times(params, config.dense_output_samples))
}

/// As [`integrate_mode`] at explicit, nondecreasing sample times in [0, τ].
pub fn integrate_mode_at(
    mode: &ModeContext,
    params: &ChainParams,
    config: &IntegratorConfig,
    initial: Initial,
    with_adjoint: bool,
    times: &[f64],
) -> Result<Vec<ModeState>> {
    params.validate()?;
    config.validate()?;
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|&t| !(0.0..=params.tau).contains(&t)) {
        return Err(NhqaError::Param("sample times must be sorted and lie in [0, τ]".into()));
    }
    let phi = mode.phi;
    let (f0, a0) = initial.vectors(phi, params)?;
    let mut fwd = Amplitudes::new(f0.0, f0.1);
    let mut adj = Amplitudes::new(a0.0, a0.1);
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &ts in times {
        fwd = evolve(phi, params, config, false, t, ts, fwd)?;
        if with_adjoint {
            adj = evolve(phi, params, config, true, t, ts, adj)?;
        }
        t = ts;
        out.push(ModeState {
            t,
            fwd,
            adjoint: with_adjoint.then_some(adj),
            adiabatic: adiabatic_projection(phi, t, params, &fwd).ok(),
            rel_err: config.rel_tol,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgsSample {
    pub t: f64,
    /// `None` at an exceptional point.
    pub p_gs: Option<f64>,
    pub p_flip: f64,
}

/// P^gs_k(t) along the schedule from bi-orthogonal projection on the
/// instantaneous eigenvectors; the endpoint uses the g̃ = 0 basis.
pub fn pgs_trajectory(
    mode: &ModeContext,
    params: &ChainParams,
    config: &IntegratorConfig,
    initial: Initial,
) -> Result<Vec<PgsSample>> {
    integrate_mode(mode, params, config, initial, false)?
        .iter()
        .map(|s| {
            Ok(PgsSample {
                t: s.t,
                p_gs: s.adiabatic.and_then(|(a, b)| prob_ground(a, b).ok()),
                p_flip: prob_flip(s.fwd.u, s.fwd.v)?,
            })
        })
        .collect()
}

/// Final (α, β) amplitudes of one mode at τ.
pub fn final_state(mode: &ModeContext, params: &ChainParams, config: &IntegratorConfig, initial: Initial) -> Result<Amplitudes> {
    let (f0, _) = initial.vectors(mode.phi, params)?;
    evolve(mode.phi, params, config, false, 0.0, params.tau, Amplitudes::new(f0.0, f0.1))
}

/// P^gs_k(τ) with an error estimate |P(tol) − P(10·tol)|.
pub fn final_pgs_with_error(
    mode: &ModeContext,
    params: &ChainParams,
    config: &IntegratorConfig,
    initial: Initial,
) -> Result<(f64, f64)> {
    let pgs = |c: &IntegratorConfig| -> Result<f64> {
        let a = final_state(mode, params, c, initial)?;
        let (al, be) = adiabatic_projection(mode.phi, params.tau, params, &a)?;
        prob_ground(al, be)
    };
    let p = pgs(config)?;
    let loose = config.scaled(10.0);
    let q = if loose.rel_tol <= 1e-3 && loose.abs_tol <= 1e-3 { pgs(&loose)? } else { p };
    Ok((p, (p - q).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz::{biorthogonal_product, lz_context, prob_longwave_asympt};
    use crate::model::mode_angle;
    use std::f64::consts::PI;

    fn baseline(delta: f64) -> ChainParams {
        ChainParams { delta, ..Default::default() }
    }

    fn pgs_end(p: usize, params: &ChainParams) -> f64 {
        let m = ModeContext::new(p, params).unwrap();
        final_pgs_with_error(&m, params, &IntegratorConfig::default(), Initial::Diabatic).unwrap().0
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        assert!(IntegratorConfig { rel_tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(IntegratorConfig { abs_tol: 1e-2, ..Default::default() }.validate().is_err());
        assert!(IntegratorConfig { dense_output_samples: 1, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn landau_zener_at_p64() {
        // the diabatic flip probability also carries the g̃ = 0 basis rotation;
        // the infinite-sweep formula is compared with the adiabatic one
        let params = baseline(0.0);
        let m = ModeContext::new(64, &params).unwrap();
        let (p, _) = final_pgs_with_error(&m, &params, &IntegratorConfig::default(), Initial::Diabatic).unwrap();
        let lz = prob_longwave_asympt(m.phi, &params).p;
        assert!((p - lz).abs() < 2e-3, "{p} vs {lz}");
    }

    #[test]
    fn hermitian_norm_is_conserved() {
        let params = baseline(0.0);
        for p in [1, 64, 300, 512] {
            let m = ModeContext::new(p, &params).unwrap();
            let cfg = IntegratorConfig { rel_tol: 1e-13, abs_tol: 1e-13, ..Default::default() };
            let traj = integrate_mode(&m, &params, &cfg, Initial::Diabatic, false).unwrap();
            for s in traj {
                let (u, v) = s.fwd.plain();
                assert!((u.norm_sqr() + v.norm_sqr() - 1.0).abs() < 1e-9, "p={p} t={} drift {:e}", s.t, u.norm_sqr() + v.norm_sqr() - 1.0);
            }
        }
    }

    #[test]
    fn agrees_with_exact_solution() {
        for delta in [0.0, 0.5] {
            let params = baseline(delta);
            for p in [1, 16, 64, 256, 512] {
                let m = ModeContext::new(p, &params).unwrap();
                let x = lz_context(&m, &params).unwrap();
                let cfg = IntegratorConfig { dense_output_samples: 50, ..Default::default() };
                let traj = integrate_mode(&m, &params, &cfg, Initial::Diabatic, false).unwrap();
                for s in traj {
                    let (e, est) = x.exact_amplitudes(s.t).unwrap();
                    let shift = e.ln_scale - s.fwd.ln_scale;
                    let n = s.fwd.u.norm().max(s.fwd.v.norm());
                    let du = (e.u * shift.exp() - s.fwd.u).norm() / n;
                    let dv = (e.v * shift.exp() - s.fwd.v).norm() / n;
                    assert!(du < 1e-6 && dv < 1e-6, "delta={delta} p={p} t={}: {du:e} {dv:e} (est {est:e})", s.t);
                }
            }
        }
    }

    #[test]
    fn adjoint_keeps_biorthogonal_product() {
        let params = ChainParams { j: 0.5, g: 2.0, delta: 0.5, tau: 20.0, n: 16 };
        for p in [1, 3, 8] {
            let m = ModeContext::new(p, &params).unwrap();
            for init in [Initial::Diabatic, Initial::Ground] {
                let traj = integrate_mode(&m, &params, &IntegratorConfig::default(), init, true).unwrap();
                for s in traj {
                    let prod = biorthogonal_product(&s.fwd, &s.adjoint.unwrap());
                    assert!((prod - 1.0).norm() < 1e-8, "p={p} t={}: {prod}", s.t);
                }
            }
        }
    }

    #[test]
    fn pgs_ordering_at_finite_dissipation() {
        // top to bottom p = 1, 16, 256, 64
        let params = baseline(0.5);
        let v: Vec<f64> = [1, 16, 256, 64].iter().map(|&p| pgs_end(p, &params)).collect();
        assert!(v[0] >= v[1] && v[1] >= v[2] && v[2] >= v[3], "{v:?}");
    }

    #[test]
    fn tolerance_halving_within_error_estimate() {
        for delta in [0.0, 0.5] {
            let params = baseline(delta);
            for p in [1, 16, 64] {
                let m = ModeContext::new(p, &params).unwrap();
                let cfg = IntegratorConfig { rel_tol: 1e-8, abs_tol: 1e-8, ..Default::default() };
                let (a, err) = final_pgs_with_error(&m, &params, &cfg, Initial::Diabatic).unwrap();
                let (b, _) = final_pgs_with_error(&m, &params, &cfg.scaled(0.5), Initial::Diabatic).unwrap();
                assert!((a - b).abs() <= err.max(1e-12), "delta={delta} p={p}: {a} {b} err {err:e}");
            }
        }
    }

    #[test]
    fn time_reversal_recovers_initial_state() {
        let params = baseline(0.0);
        let cfg = IntegratorConfig::default();
        for p in [1, 64, 512] {
            let phi = mode_angle(p, params.n).unwrap();
            let init = Amplitudes::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
            let end = evolve(phi, &params, &cfg, false, 0.0, params.tau, init).unwrap();
            let back = evolve(phi, &params, &cfg, false, params.tau, 0.0, end).unwrap();
            let (u, v) = back.plain();
            assert!((u - 1.0).norm() < 1e-6 && v.norm() < 1e-6, "p={p}: {u} {v}");
        }
    }

    #[test]
    fn trajectory_examples() {
        let params = baseline(0.0);
        let m = ModeContext::new(1, &params).unwrap();
        let tr = pgs_trajectory(&m, &params, &IntegratorConfig::default(), Initial::Ground).unwrap();
        assert!((tr[0].p_gs.unwrap() - 1.0).abs() < 1e-12);
        let end = tr.last().unwrap().p_gs.unwrap();
        let lz = prob_longwave_asympt(m.phi, &params).p;
        assert!((end - 1.5e-3).abs() < 1e-4 && (end - lz).abs() < 1e-4, "{end} {lz}");

        let params = baseline(0.5);
        let m = ModeContext::new(16, &params).unwrap();
        let tr = pgs_trajectory(&m, &params, &IntegratorConfig::default(), Initial::Diabatic).unwrap();
        let min = tr.iter().filter_map(|s| s.p_gs).fold(1.0, f64::min);
        assert!(min < 0.9, "no dip: {min}");
        assert!(tr.iter().all(|s| s.p_gs.map_or(true, |p| (0.0..=1.0).contains(&p))));
        assert_eq!(tr.first().unwrap().t, 0.0);
        assert_eq!(tr.last().unwrap().t, params.tau);
        let _ = PI;
    }
}
