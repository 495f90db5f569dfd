//! Brute-force evolution of the full 2^N spin chain for small N.
//!
//! States live in the σᶻ product basis: bit n of an index is 1 when spin n
//! points down. With σ±_n = (σᶻ_n ± iσʸ_n)/2 the decay term is
//! i2δσ⁻_nσ⁺_n = iδ(1 + σˣ_n), so the Hamiltonian reads
//! −(J/2)Σ(g̃ σˣ_n + σᶻ_nσᶻ_{n+1} + i Im g̃).

use crate::error::{NhqaError, Result};
use crate::model::{self, ChainParams};
use crate::observables::{self, Engine};
use crate::tdse::IntegratorConfig;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use ode_solvers::{Dopri5, OutputType, System};

pub const MAX_SPINS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub amplitudes: DVector<Complex64>,
    pub n: usize,
    pub parity: Parity,
}

impl DenseState {
    pub fn new(amplitudes: DVector<Complex64>, n: usize) -> Result<Self> {
        if amplitudes.len() != 1 << n {
            return Err(NhqaError::Param(format!("state length {} is not 2^{n}", amplitudes.len())));
        }
        let parity = classify(&amplitudes);
        Ok(DenseState { amplitudes, n, parity })
    }
}

fn classify(psi: &DVector<Complex64>) -> Parity {
    let norm = psi.norm();
    if norm == 0.0 {
        return Parity::Mixed;
    }
    let odd = odd_fraction(psi);
    if odd < 1e-12 {
        Parity::Even
    } else if odd > 1.0 - 1e-12 {
        Parity::Odd
    } else {
        Parity::Mixed
    }
}

/// ‖P⁻ψ‖/‖ψ‖ for the spin-flip parity Πσˣ, which equals the fermion parity.
pub fn odd_fraction(psi: &DVector<Complex64>) -> f64 {
    let mask = psi.len() - 1;
    let odd: f64 = (0..psi.len()).map(|i| ((psi[i] - psi[i ^ mask]) * 0.5).norm_sqr()).sum();
    (odd / psi.norm_squared()).sqrt()
}

fn check(params: &ChainParams) -> Result<()> {
    if params.n > MAX_SPINS {
        return Err(NhqaError::Param(format!("dense oracle refuses N = {} > {MAX_SPINS}", params.n)));
    }
    // g = δ = 0 is allowed here: the static Ising chain
    ChainParams { g: 1.0, ..*params }.validate()?;
    params.validate().or_else(|e| if params.g == 0.0 && params.delta == 0.0 { Ok(()) } else { Err(e) })
}

fn zz_energy(i: usize, n: usize) -> f64 {
    (0..n)
        .map(|k| {
            let a = (i >> k) & 1;
            let b = (i >> ((k + 1) % n)) & 1;
            if a == b {
                1.0
            } else {
                -1.0
            }
        })
        .sum()
}

/// Dense H(g̃) in the σᶻ product basis, periodic boundary.
pub fn build_hamiltonian(gt: Complex64, params: &ChainParams) -> Result<DMatrix<Complex64>> {
    check(params)?;
    let n = params.n;
    let dim = 1usize << n;
    let hj = -0.5 * params.j;
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = Complex64::new(hj * zz_energy(i, n), hj * gt.im * n as f64);
        for k in 0..n {
            h[(i ^ (1 << k), i)] += gt * hj;
        }
    }
    Ok(h)
}

/// Πσˣ as a dense matrix.
pub fn parity_operator(n: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    DMatrix::from_fn(dim, dim, |r, c| if r == c ^ (dim - 1) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

struct Operator {
    n: usize,
    j: f64,
    diag: Vec<f64>,
}

impl Operator {
    fn new(params: &ChainParams) -> Self {
        let dim = 1usize << params.n;
        Operator { n: params.n, j: params.j, diag: (0..dim).map(|i| zz_energy(i, params.n)).collect() }
    }

    /// out = H(g̃)ψ
    fn apply(&self, gt: Complex64, psi: &[Complex64], out: &mut [Complex64]) {
        let hj = -0.5 * self.j;
        let shift = Complex64::new(0.0, gt.im * self.n as f64);
        let off = gt * hj;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = (shift + self.diag[i]) * hj * psi[i];
            for k in 0..self.n {
                acc += off * psi[i ^ (1 << k)];
            }
            *o = acc;
        }
    }
}

struct DenseOde<'a> {
    op: &'a Operator,
    params: ChainParams,
}

impl System<f64, ode_solvers::DVector<f64>> for DenseOde<'_> {
    fn system(&self, t: f64, y: &ode_solvers::DVector<f64>, dy: &mut ode_solvers::DVector<f64>) {
        let dim = y.len() / 2;
        let psi: Vec<Complex64> = (0..dim).map(|i| Complex64::new(y[2 * i], y[2 * i + 1])).collect();
        let mut hpsi = vec![Complex64::new(0.0, 0.0); dim];
        self.op.apply(model::schedule(t, &self.params), &psi, &mut hpsi);
        for (i, h) in hpsi.iter().enumerate() {
            // ψ̇ = −iHψ
            dy[2 * i] = h.im;
            dy[2 * i + 1] = -h.re;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: Complex64,
    pub vector: DVector<Complex64>,
    /// Distance in Re E to the next eigenvalue; below 1e-8 the choice is ambiguous.
    pub separation: f64,
}

/// Eigenvector of `h` whose eigenvalue has the smallest real part, unit norm.
pub fn ground_state(h: &DMatrix<Complex64>) -> Result<GroundState> {
    let ev = h
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| NhqaError::Domain("Schur decomposition did not yield eigenvalues".into()))?;
    let mut vals: Vec<Complex64> = ev.iter().copied().collect();
    vals.sort_by(|a, b| a.re.total_cmp(&b.re));
    let energy = vals[0];
    let separation = vals.get(1).map_or(f64::INFINITY, |v| v.re - energy.re);
    let dim = h.nrows();
    let scale = h.norm().max(1.0);
    let shift = energy + Complex64::new(1e-10 * scale, 1e-10 * scale);
    let lu = (h - DMatrix::from_diagonal_element(dim, dim, shift)).lu();
    let mut v = DVector::from_fn(dim, |i, _| Complex64::new(1.0 + 1e-3 * i as f64, 0.0));
    v /= Complex64::new(v.norm(), 0.0);
    for _ in 0..4 {
        v = lu
            .solve(&v)
            .ok_or_else(|| NhqaError::Singular("inverse iteration hit an exactly singular shift".into()))?;
        v /= Complex64::new(v.norm(), 0.0);
    }
    // a non-degenerate eigenvector is a parity eigenstate; drop the round-off
    // admixture of the other sector, which the decay can amplify
    let mask = dim - 1;
    if dim > 1 && h.nrows() == dim && commutes_with_flip(h) {
        let sign = if odd_fraction(&v) < 0.5 { 1.0 } else { -1.0 };
        v = DVector::from_fn(dim, |i, _| (v[i] + v[i ^ mask] * sign) * 0.5);
        v /= Complex64::new(v.norm(), 0.0);
    }
    let resid = (h * &v - &v * energy).norm();
    if resid > 1e-8 * scale {
        return Err(NhqaError::Domain(format!("ground eigenvector residual {resid:.3e}")));
    }
    Ok(GroundState { energy, vector: v, separation })
}

fn commutes_with_flip(h: &DMatrix<Complex64>) -> bool {
    let dim = h.nrows();
    if !dim.is_power_of_two() {
        return false;
    }
    let mask = dim - 1;
    let scale = h.norm().max(1.0);
    (0..dim).all(|r| (0..dim).all(|c| (h[(r, c)] - h[(r ^ mask, c ^ mask)]).norm() <= 1e-14 * scale))
}

/// |⟨↑…↑|ψ⟩|² + |⟨↓…↓|ψ⟩|² over ⟨ψ|ψ⟩.
pub fn ferromagnetic_probability(psi: &DVector<Complex64>) -> f64 {
    let last = psi.len() - 1;
    (psi[0].norm_sqr() + psi[last].norm_sqr()) / psi.norm_squared()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSample {
    pub t: f64,
    pub p_gs: f64,
    /// ln⟨ψ|ψ⟩ relative to t = 0.
    pub ln_norm: f64,
    pub odd_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTrajectory {
    pub samples: Vec<DenseSample>,
    pub initial_energy: Complex64,
    /// True when the initial eigenvalue is closer than 1e-8 to the next one.
    pub degenerate_start: bool,
    pub final_state: DenseState,
}

impl DenseTrajectory {
    pub fn final_pgs(&self) -> f64 {
        self.samples.last().map_or(f64::NAN, |s| s.p_gs)
    }

    pub fn max_odd_fraction(&self) -> f64 {
        self.samples.iter().map(|s| s.odd_fraction).fold(0.0, f64::max)
    }
}

/// Evolution from the smallest-Re eigenvector of H(0), `segments` samples on (0, τ].
pub fn evolve_dense(params: &ChainParams, config: &IntegratorConfig, segments: usize) -> Result<DenseTrajectory> {
    let h0 = build_hamiltonian(model::schedule(0.0, params), params)?;
    let gs = ground_state(&h0)?;
    let mut traj = evolve_dense_from(params, config, gs.vector, segments)?;
    traj.initial_energy = gs.energy;
    traj.degenerate_start = gs.separation < 1e-8;
    Ok(traj)
}

pub fn evolve_dense_from(
    params: &ChainParams,
    config: &IntegratorConfig,
    psi0: DVector<Complex64>,
    segments: usize,
) -> Result<DenseTrajectory> {
    check(params)?;
    config.validate()?;
    if segments == 0 {
        return Err(NhqaError::Param("segments must be >= 1".into()));
    }
    let dim = 1usize << params.n;
    if psi0.len() != dim {
        return Err(NhqaError::Param(format!("initial state length {} is not 2^{}", psi0.len(), params.n)));
    }
    let op = Operator::new(params);
    let n0 = psi0.norm();
    if n0 == 0.0 {
        return Err(NhqaError::ZeroNorm);
    }
    let mut psi = psi0 / Complex64::new(n0, 0.0);
    let mut ln_scale = 0.0;
    let h_max = config.max_step.unwrap_or(params.tau / 1000.0);
    let mut samples = vec![DenseSample { t: 0.0, p_gs: ferromagnetic_probability(&psi), ln_norm: 0.0, odd_fraction: odd_fraction(&psi) }];
    for s in 0..segments {
        let t0 = params.tau * s as f64 / segments as f64;
        let t1 = params.tau * (s + 1) as f64 / segments as f64;
        let y0 = ode_solvers::DVector::from_fn(2 * dim, |k, _| if k % 2 == 0 { psi[k / 2].re } else { psi[k / 2].im });
        let sys = DenseOde { op: &op, params: *params };
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
            100_000_000,
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
        psi = DVector::from_fn(dim, |i, _| Complex64::new(y[2 * i], y[2 * i + 1]));
        let nrm = psi.norm();
        if nrm == 0.0 {
            return Err(NhqaError::ZeroNorm);
        }
        ln_scale += 2.0 * nrm.ln();
        psi /= Complex64::new(nrm, 0.0);
        samples.push(DenseSample { t: t1, p_gs: ferromagnetic_probability(&psi), ln_norm: ln_scale, odd_fraction: odd_fraction(&psi) });
    }
    Ok(DenseTrajectory {
        samples,
        initial_energy: Complex64::new(f64::NAN, f64::NAN),
        degenerate_start: false,
        final_state: DenseState::new(psi, params.n)?,
    })
}

/// Π_{k>0} P^gs_k(τ) for modes started on their t = 0 ground eigenvectors.
pub fn mode_product_pgs(params: &ChainParams, config: &IntegratorConfig) -> Result<f64> {
    let per = observables::per_mode_pgs(params, Engine::TdseGround, config)?;
    Ok(per.iter().product())
}

/// H restricted to the Πσˣ = +1 sector, basis (|i⟩ + |ī⟩)/√2 over i with the top bit clear.
pub fn even_sector_hamiltonian(gt: Complex64, params: &ChainParams) -> Result<DMatrix<Complex64>> {
    let h = build_hamiltonian(gt, params)?;
    let dim = h.nrows();
    let half = dim / 2;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let v = DMatrix::from_fn(dim, half, |row, col| {
        if row == col || row == col ^ (dim - 1) {
            Complex64::new(r, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(v.adjoint() * h * v)
}

/// Even-sector energies assembled from mode pairs: Σ_p(−ε₀) + Σ_p e_p with
/// e_p ∈ {−ε_k, 0, 0, +ε_k} and an even number of singly occupied pairs.
pub fn mode_pair_spectrum(gt: Complex64, params: &ChainParams) -> Result<Vec<Complex64>> {
    check(params)?;
    let modes = params.modes();
    let mut base = Complex64::new(0.0, 0.0);
    let mut eps = Vec::with_capacity(modes);
    for p in 1..=modes {
        let phi = model::mode_angle(p, params.n)?;
        let s = model::spectrum(phi, gt, params.j)?;
        base -= s.eps0;
        eps.push(s.eps_k);
    }
    // (energy, number of singly occupied pairs)
    let mut levels = vec![(base, 0usize)];
    for e in eps {
        let mut next = Vec::with_capacity(levels.len() * 4);
        for &(x, odd) in &levels {
            next.push((x - e, odd));
            next.push((x + e, odd));
            next.push((x, odd + 1));
            next.push((x, odd + 1));
        }
        levels = next;
    }
    Ok(levels.into_iter().filter(|(_, odd)| odd % 2 == 0).map(|(x, _)| x).collect())
}

/// Largest distance in a greedy nearest-neighbour matching of two multisets.
pub fn spectrum_mismatch(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}
