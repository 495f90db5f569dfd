//! Generalized Bloch equations for H̃ = (λ̃₀/2)·1 + ½Ω̃·σ with λ̃₀ = λ₀ − iΓ and
//! Ω̃ = Ω + iΛ, checked against direct two-level Schrödinger evolution.
//!
//! Component 0 of a two-level state is the upper level (σᶻ = +1).

use crate::error::{NhqaError, Result};
use crate::model::{self, ChainParams, Mat2};
use crate::tdse::IntegratorConfig;
use num_complex::Complex64;
use ode_solvers::{Dopri5, OutputType, System, Vector4};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochParams {
    pub lambda0: f64,
    /// Γ = (Γ₀ + Γ₁)/2.
    pub gamma: f64,
    /// Re Ω̃.
    pub omega: [f64; 3],
    /// Im Ω̃.
    pub lambda: [f64; 3],
    /// (Γ₀, Γ₁) when built from separate level widths.
    pub level_widths: Option<(f64, f64)>,
}

impl BlochParams {
    pub fn from_level_widths(lambda0: f64, gamma0: f64, gamma1: f64, omega: [f64; 3], lambda: [f64; 3]) -> Self {
        BlochParams { lambda0, gamma: 0.5 * (gamma0 + gamma1), omega, lambda, level_widths: Some((gamma0, gamma1)) }
    }

    pub fn lambda_tilde(&self) -> Complex64 {
        Complex64::new(self.lambda0, -self.gamma)
    }

    pub fn omega_tilde(&self) -> [Complex64; 3] {
        [0, 1, 2].map(|i| Complex64::new(self.omega[i], self.lambda[i]))
    }

    /// Γ < 0 means gain rather than decay.
    pub fn has_gain(&self) -> bool {
        self.gamma < 0.0
    }

    /// (λ̃₀/2)·1 + ½Ω̃·σ.
    pub fn matrix(&self) -> Mat2 {
        let [x, y, z] = self.omega_tilde();
        let l = self.lambda_tilde() * 0.5;
        let i = Complex64::new(0.0, 1.0);
        [[l + z * 0.5, (x - i * y) * 0.5], [(x + i * y) * 0.5, l - z * 0.5]]
    }
}

/// λ̃₀ = tr H, Ω̃_a = tr(Hσ_a).
pub fn from_mode_hamiltonian(h: &Mat2) -> BlochParams {
    let i = Complex64::new(0.0, 1.0);
    let l = h[0][0] + h[1][1];
    let x = h[0][1] + h[1][0];
    let y = i * (h[0][1] - h[1][0]);
    let z = h[0][0] - h[1][1];
    BlochParams { lambda0: l.re, gamma: -l.im, omega: [x.re, y.re, z.re], lambda: [x.im, y.im, z.im], level_widths: None }
}

/// Bloch parameters of the mode Hamiltonian at time t, in the (v, u) ordering.
pub fn mode_bloch_params(phi: f64, t: f64, params: &ChainParams) -> BlochParams {
    from_mode_hamiltonian(&model::mode_hamiltonian(phi, model::schedule(t, params), params.j))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub n_vec: [f64; 3],
    pub n: f64,
}

impl BlochState {
    /// n = ⟨u|σ|u⟩, n = ⟨u|u⟩.
    pub fn from_amplitudes(a: Complex64, b: Complex64) -> Self {
        let ab = a.conj() * b;
        BlochState { n_vec: [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()], n: a.norm_sqr() + b.norm_sqr() }
    }

    pub fn rho11(&self) -> f64 {
        0.5 * (self.n + self.n_vec[2])
    }

    pub fn rho00(&self) -> f64 {
        0.5 * (self.n - self.n_vec[2])
    }

    /// |n² − |n_vec|²| / n².
    pub fn purity_defect(&self) -> f64 {
        let v2: f64 = self.n_vec.iter().map(|x| x * x).sum();
        (self.n * self.n - v2).abs() / (self.n * self.n)
    }

    fn scaled(&self, f: f64) -> Self {
        BlochState { n_vec: self.n_vec.map(|x| x * f), n: self.n * f }
    }
}

/// (ṅx, ṅy, ṅz, ṅ).
pub fn bloch_rhs(s: &BlochState, p: &BlochParams) -> [f64; 4] {
    let [nx, ny, nz] = s.n_vec;
    let [ox, oy, oz] = p.omega;
    let [lx, ly, lz] = p.lambda;
    let g = p.gamma;
    [
        -g * nx + lx * s.n + oy * nz - oz * ny,
        -g * ny + ly * s.n - ox * nz + oz * nx,
        -g * nz + lz * s.n + ox * ny - oy * nx,
        -g * s.n + lx * nx + ly * ny + lz * nz,
    ]
}

/// (ṅx, ṅy, ρ̇₁₁, ρ̇₀₀) of the population form.
pub fn population_rhs(y: [f64; 4], p: &BlochParams) -> [f64; 4] {
    let [nx, ny, r11, r00] = y;
    let [ox, oy, oz] = p.omega;
    let [lx, ly, lz] = p.lambda;
    let g = p.gamma;
    let lam = 0.5 * (lx * nx + ly * ny);
    let rot = 0.5 * (ox * ny - oy * nx);
    [
        -g * nx + lx * (r11 + r00) + oy * (r11 - r00) - oz * ny,
        -g * ny + ly * (r11 + r00) - ox * (r11 - r00) + oz * nx,
        -(g - lz) * r11 + lam + rot,
        -(g + lz) * r00 + lam - rot,
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochSample {
    pub t: f64,
    /// State divided by e^{ln_scale}.
    pub state: BlochState,
    pub ln_scale: f64,
}

impl BlochSample {
    /// ρ₁₁/n, the intrinsic upper-level population.
    pub fn upper_fraction(&self) -> f64 {
        self.state.rho11() / self.state.n
    }
}

struct PopulationOde<F> {
    h: F,
}

impl<F: Fn(f64) -> BlochParams> System<f64, Vector4<f64>> for PopulationOde<F> {
    fn system(&self, t: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
        let d = population_rhs([y[0], y[1], y[2], y[3]], &(self.h)(t));
        dy.copy_from_slice(&d);
    }
}

struct SchrodingerOde<F> {
    h: F,
}

impl<F: Fn(f64) -> Mat2> System<f64, Vector4<f64>> for SchrodingerOde<F> {
    fn system(&self, t: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
        let m = (self.h)(t);
        let a = Complex64::new(y[0], y[1]);
        let b = Complex64::new(y[2], y[3]);
        let mi = Complex64::new(0.0, -1.0);
        let da = mi * (m[0][0] * a + m[0][1] * b);
        let db = mi * (m[1][0] * a + m[1][1] * b);
        dy[0] = da.re;
        dy[1] = da.im;
        dy[2] = db.re;
        dy[3] = db.im;
    }
}

fn integrate<S: System<f64, Vector4<f64>>>(sys: S, t0: f64, t1: f64, y0: Vector4<f64>, config: &IntegratorConfig, h_max: f64) -> Result<Vector4<f64>> {
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
    let y = *solver
        .results()
        .get()
        .1
        .last()
        .ok_or_else(|| NhqaError::Integrator { t: t0, reason: "no output".into() })?;
    if !y.iter().all(|x| x.is_finite()) {
        return Err(NhqaError::Integrator { t: t1, reason: "non-finite state".into() });
    }
    Ok(y)
}

fn grid(t0: f64, t1: f64, segments: usize) -> Result<Vec<f64>> {
    if segments == 0 || !(t1 > t0) {
        return Err(NhqaError::Param(format!("need t1 > t0 and segments >= 1, got [{t0}, {t1}], {segments}")));
    }
    Ok((0..=segments).map(|k| t0 + (t1 - t0) * k as f64 / segments as f64).collect())
}

/// Integrates the (nx, ny, ρ₁₁, ρ₀₀) equations, rescaling at each of `segments` sample times.
pub fn evolve_bloch<F>(h: F, initial: BlochState, t0: f64, t1: f64, segments: usize, config: &IntegratorConfig) -> Result<Vec<BlochSample>>
where
    F: Fn(f64) -> BlochParams + Copy,
{
    config.validate()?;
    let ts = grid(t0, t1, segments)?;
    let h_max = config.max_step.unwrap_or((t1 - t0) / 1000.0);
    if !(initial.n > 0.0) {
        return Err(NhqaError::ZeroNorm);
    }
    let mut ln_scale = initial.n.ln();
    let mut state = initial.scaled(1.0 / initial.n);
    let mut out = vec![BlochSample { t: t0, state, ln_scale }];
    for w in ts.windows(2) {
        let y0 = Vector4::new(state.n_vec[0], state.n_vec[1], state.rho11(), state.rho00());
        let y = integrate(PopulationOde { h }, w[0], w[1], y0, config, h_max)?;
        let s = BlochState { n_vec: [y[0], y[1], y[2] - y[3]], n: y[2] + y[3] };
        if !(s.n > 0.0) {
            return Err(NhqaError::ZeroNorm);
        }
        ln_scale += s.n.ln();
        state = s.scaled(1.0 / s.n);
        out.push(BlochSample { t: w[1], state, ln_scale });
    }
    Ok(out)
}

/// Direct two-level evolution, reported through the same Bloch observables.
pub fn evolve_schrodinger<F>(h: F, psi0: (Complex64, Complex64), t0: f64, t1: f64, segments: usize, config: &IntegratorConfig) -> Result<Vec<BlochSample>>
where
    F: Fn(f64) -> Mat2 + Copy,
{
    config.validate()?;
    let ts = grid(t0, t1, segments)?;
    let h_max = config.max_step.unwrap_or((t1 - t0) / 1000.0);
    let (mut a, mut b) = psi0;
    let nrm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if nrm == 0.0 {
        return Err(NhqaError::ZeroNorm);
    }
    let mut ln_scale = 2.0 * nrm.ln();
    a /= nrm;
    b /= nrm;
    let mut out = vec![BlochSample { t: t0, state: BlochState::from_amplitudes(a, b), ln_scale }];
    for w in ts.windows(2) {
        let y = integrate(SchrodingerOde { h }, w[0], w[1], Vector4::new(a.re, a.im, b.re, b.im), config, h_max)?;
        a = Complex64::new(y[0], y[1]);
        b = Complex64::new(y[2], y[3]);
        let nrm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if nrm == 0.0 {
            return Err(NhqaError::ZeroNorm);
        }
        ln_scale += 2.0 * nrm.ln();
        a /= nrm;
        b /= nrm;
        out.push(BlochSample { t: w[1], state: BlochState::from_amplitudes(a, b), ln_scale });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    /// max |n_vec/n| difference over the samples.
    pub max_vec_dev: f64,
    /// max |ln n| difference.
    pub max_ln_norm_dev: f64,
    /// max purity defect of the Bloch trajectory.
    pub max_purity_defect: f64,
}

impl Equivalence {
    pub fn worst(&self) -> f64 {
        self.max_vec_dev.max(self.max_ln_norm_dev).max(self.max_purity_defect)
    }
}

/// Runs both formulations for H(t) from ψ(t0) and compares them at every sample.
pub fn compare<F>(h: F, psi0: (Complex64, Complex64), t0: f64, t1: f64, segments: usize, config: &IntegratorConfig) -> Result<Equivalence>
where
    F: Fn(f64) -> Mat2 + Copy,
{
    let gbe = evolve_bloch(move |t| from_mode_hamiltonian(&h(t)), BlochState::from_amplitudes(psi0.0, psi0.1), t0, t1, segments, config)?;
    let sch = evolve_schrodinger(h, psi0, t0, t1, segments, config)?;
    let mut eq = Equivalence { max_vec_dev: 0.0, max_ln_norm_dev: 0.0, max_purity_defect: 0.0 };
    for (x, y) in gbe.iter().zip(&sch) {
        for k in 0..3 {
            eq.max_vec_dev = eq.max_vec_dev.max((x.state.n_vec[k] / x.state.n - y.state.n_vec[k] / y.state.n).abs());
        }
        let lx = x.ln_scale + x.state.n.ln();
        let ly = y.ln_scale + y.state.n.ln();
        eq.max_ln_norm_dev = eq.max_ln_norm_dev.max((lx - ly).abs() / lx.abs().max(1.0));
        eq.max_purity_defect = eq.max_purity_defect.max(x.state.purity_defect());
    }
    Ok(eq)
}

/// A named time-dependent two-level Hamiltonian on [0, t1] with its initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteCase {
    pub name: &'static str,
    pub kind: CaseKind,
    pub t1: f64,
    pub psi0: (Complex64, Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseKind {
    /// Mode Hamiltonian of mode p.
    Mode { p: usize, params: ChainParams },
    /// λ̃₀ + ½Ω̃(t)·σ with Ω̃(t) = a + b·cos(wt) + c·t, componentwise complex.
    Driven { lambda0: Complex64, a: [Complex64; 3], b: [Complex64; 3], c: [Complex64; 3], w: f64 },
}

impl SuiteCase {
    pub fn hamiltonian(&self, t: f64) -> Result<Mat2> {
        match self.kind {
            CaseKind::Mode { p, params } => {
                let phi = model::mode_angle(p, params.n)?;
                Ok(model::mode_hamiltonian(phi, model::schedule(t, &params), params.j))
            }
            CaseKind::Driven { lambda0, a, b, c, w } => {
                let om = [0, 1, 2].map(|k| a[k] + b[k] * (w * t).cos() + c[k] * t);
                let i = Complex64::new(0.0, 1.0);
                let l = lambda0 * 0.5;
                Ok([[l + om[2] * 0.5, (om[0] - i * om[1]) * 0.5], [(om[0] + i * om[1]) * 0.5, l - om[2] * 0.5]])
            }
        }
    }

    pub fn compare(&self, segments: usize, config: &IntegratorConfig) -> Result<Equivalence> {
        self.hamiltonian(0.0)?;
        let h = |t| self.hamiltonian(t).expect("validated");
        compare(h, self.psi0, 0.0, self.t1, segments, config)
    }
}

/// Mode Hamiltonians at chain parameters plus driven non-Hermitian two-level systems.
pub fn reference_suite() -> Vec<SuiteCase> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let chain = |delta: f64, tau: f64| ChainParams { delta, tau, ..Default::default() };
    let mode = |name, p, params: ChainParams| SuiteCase { name, kind: CaseKind::Mode { p, params }, t1: params.tau, psi0: (z, one) };
    let driven = |name, lambda0, a, b, cc, w, t1, psi0| SuiteCase { name, kind: CaseKind::Driven { lambda0, a, b, c: cc, w }, t1, psi0 };
    vec![
        mode("mode p=64 hermitian", 64, chain(0.0, 1000.0)),
        mode("mode p=64 dissipative", 64, chain(0.5, 1000.0)),
        mode("mode p=128 weak decay", 128, chain(0.25, 1000.0)),
        mode("mode p=256 dissipative", 256, chain(0.25, 1000.0)),
        mode("mode p=512 short sweep", 512, chain(1.0, 50.0)),
        driven("static precession", z, [z, z, c(2.0, 0.0)], [z; 3], [z; 3], 0.0, 10.0, (one, one)),
        driven("pure decay", c(0.0, -0.6), [z; 3], [z; 3], [z; 3], 0.0, 10.0, (one, c(0.3, 0.2))),
        driven("z gain", c(0.0, -0.2), [z, z, c(0.0, 0.4)], [z; 3], [z; 3], 0.0, 10.0, (c(0.6, 0.0), c(0.0, 0.8))),
        driven("rabi with loss", c(0.3, -0.1), [c(1.0, 0.2), z, c(0.5, -0.1)], [c(0.3, 0.0), c(0.2, 0.1), z], [z; 3], 1.7, 20.0, (one, z)),
        driven("linear sweep", z, [c(0.4, 0.05), z, c(-5.0, 0.5)], [z; 3], [z, z, c(0.5, -0.05)], 0.0, 20.0, (z, one)),
        driven("full complex drive", c(-0.2, -0.3), [c(0.7, 0.1), c(-0.4, 0.2), c(0.2, -0.3)], [c(0.1, 0.05), c(0.3, -0.1), c(0.2, 0.1)], [c(0.01, 0.0), z, c(-0.02, 0.01)], 0.9, 15.0, (c(0.2, 0.5), c(-0.7, 0.1))),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> IntegratorConfig {
        IntegratorConfig { rel_tol: 1e-13, abs_tol: 1e-13, ..Default::default() }
    }

    fn p(omega: [f64; 3], lambda: [f64; 3], gamma: f64) -> BlochParams {
        BlochParams { lambda0: 0.0, gamma, omega, lambda, level_widths: None }
    }

    #[test]
    fn pure_precession_keeps_nz_and_n() {
        let s = BlochState { n_vec: [0.3, -0.4, 0.5], n: 0.5f64.sqrt() };
        let d = bloch_rhs(&s, &p([0.0, 0.0, 1.3], [0.0; 3], 0.0));
        assert_eq!((d[2], d[3]), (0.0, 0.0));
    }

    #[test]
    fn decay_only() {
        let s0 = BlochState { n_vec: [0.6, 0.0, 0.8], n: 1.0 };
        let traj = evolve_bloch(|_| p([0.0; 3], [0.0; 3], 0.4), s0, 0.0, 5.0, 5, &tight()).unwrap();
        for s in &traj {
            let n = (s.ln_scale + s.state.n.ln()).exp();
            assert!((n - (-0.4 * s.t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn decoupled_upper_level() {
        let (g, lz) = (0.5, 0.2);
        let s0 = BlochState { n_vec: [0.0, 0.0, 1.0], n: 1.0 };
        let traj = evolve_bloch(|_| p([0.0; 3], [0.0, 0.0, lz], g), s0, 0.0, 4.0, 4, &tight()).unwrap();
        for s in &traj {
            let r11 = s.state.rho11() * s.ln_scale.exp();
            assert!((r11 - (-(g - lz) * s.t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn hermitian_trace_is_conserved() {
        let s0 = BlochState::from_amplitudes(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let traj = evolve_bloch(|t| p([1.0, 0.3 * t, -0.5], [0.0; 3], 0.0), s0, 0.0, 10.0, 10, &tight()).unwrap();
        for s in &traj {
            assert!((s.ln_scale + s.state.n.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn decomposition_round_trip() {
        let id = [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
        let b = from_mode_hamiltonian(&id);
        assert_eq!(b.lambda_tilde(), Complex64::new(2.0, 0.0));
        assert_eq!((b.omega, b.lambda), ([0.0; 3], [0.0; 3]));
        let h = [[Complex64::new(0.3, -1.1), Complex64::new(2.0, 0.5)], [Complex64::new(-0.7, 0.2), Complex64::new(1.4, 0.9)]];
        let r = from_mode_hamiltonian(&h).matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r[i][j] - h[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn mode_hamiltonian_components() {
        let params = ChainParams { delta: 0.5, ..Default::default() };
        let phi = model::mode_angle(64, params.n).unwrap();
        let b = mode_bloch_params(phi, 0.0, &params);
        let j = params.j;
        assert!((b.omega[0] - 2.0 * j * phi.sin()).abs() < 1e-14);
        assert!((b.omega[2] - 2.0 * j * (params.g - phi.cos())).abs() < 1e-12);
        assert!((b.lambda[2] - 2.0 * j * params.delta).abs() < 1e-14);
        assert_eq!((b.omega[1], b.lambda[0], b.lambda[1]), (0.0, 0.0, 0.0));
        assert!((b.gamma - 2.0 * j * params.delta).abs() < 1e-14);
        assert!((b.lambda0 + 2.0 * j * phi.cos()).abs() < 1e-14);
    }

    #[test]
    fn rhs_matches_finite_differences_of_schrodinger() {
        let case = reference_suite().into_iter().find(|c| c.name == "full complex drive").unwrap();
        let h = |t: f64| case.hamiltonian(t).unwrap();
        let dt = 1e-4;
        for &t in &[0.5, 3.0, 7.5] {
            let tr = evolve_schrodinger(h, case.psi0, 0.0, t + dt, 1, &tight()).unwrap();
            let a = evolve_schrodinger(h, case.psi0, 0.0, t - dt, 1, &tight()).unwrap();
            let mid = evolve_schrodinger(h, case.psi0, 0.0, t, 1, &tight()).unwrap();
            let full = |s: &BlochSample| s.state.scaled(s.ln_scale.exp());
            let (sp, sm, s0) = (full(&tr[1]), full(&a[1]), full(&mid[1]));
            let d = bloch_rhs(&s0, &from_mode_hamiltonian(&h(t)));
            let fd = [0, 1, 2].map(|k| (sp.n_vec[k] - sm.n_vec[k]) / (2.0 * dt));
            for k in 0..3 {
                assert!((d[k] - fd[k]).abs() < 1e-6, "t={t} k={k}: {} {}", d[k], fd[k]);
            }
            assert!((d[3] - (sp.n - sm.n) / (2.0 * dt)).abs() < 1e-6);
        }
    }

    #[test]
    fn population_form_is_consistent() {
        let s = BlochState { n_vec: [0.1, 0.2, -0.3], n: 0.9 };
        let bp = p([0.4, -0.2, 0.9], [0.05, 0.1, -0.2], 0.3);
        let full = bloch_rhs(&s, &bp);
        let pop = population_rhs([s.n_vec[0], s.n_vec[1], s.rho11(), s.rho00()], &bp);
        assert!((pop[0] - full[0]).abs() < 1e-15);
        assert!((pop[1] - full[1]).abs() < 1e-15);
        assert!((pop[2] - pop[3] - full[2]).abs() < 1e-15);
        assert!((pop[2] + pop[3] - full[3]).abs() < 1e-15);
    }

    #[test]
    fn mode_upper_population_is_flip_probability() {
        use crate::model::ModeContext;
        use crate::tdse::{pgs_trajectory, Initial};
        for delta in [0.0, 0.5] {
            let params = ChainParams { delta, ..Default::default() };
            let mode = ModeContext::new(64, &params).unwrap();
            let cfg = IntegratorConfig { dense_output_samples: 11, ..tight() };
            let tdse = pgs_trajectory(&mode, &params, &cfg, Initial::Diabatic).unwrap();
            let gbe = evolve_bloch(
                |t| mode_bloch_params(mode.phi, t, &params),
                BlochState::from_amplitudes(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
                0.0,
                params.tau,
                10,
                &tight(),
            )
            .unwrap();
            for (s, q) in gbe.iter().zip(&tdse) {
                assert!((s.t - q.t).abs() < 1e-9);
                assert!((s.upper_fraction() - q.p_flip).abs() < 1e-8, "δ={delta} t={}: {} {}", s.t, s.upper_fraction(), q.p_flip);
            }
        }
    }

    #[test]
    fn encircling_mode_leaves_the_pure_manifold() {
        // p = 1 at δ = 0.5 winds around the exceptional point; mixed-state
        // errors of the linear GBE grow with the square of the pure-state gain
        let case = SuiteCase { name: "p=1", kind: CaseKind::Mode { p: 1, params: ChainParams { delta: 0.5, ..Default::default() } }, t1: 1000.0, psi0: (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)) };
        let eq = case.compare(50, &tight()).unwrap();
        assert!(eq.max_purity_defect > 1e-8 && eq.max_purity_defect < 1e-3, "{eq:?}");
        assert!(eq.max_ln_norm_dev < 1e-8);
    }

    #[test]
    fn suite_equivalence() {
        let suite = reference_suite();
        assert!(suite.len() >= 10);
        for case in &suite {
            let eq = case.compare(50, &tight()).unwrap();
            assert!(eq.worst() < 1e-8, "{}: {eq:?}", case.name);
        }
    }
}
