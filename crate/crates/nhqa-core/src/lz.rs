//! Exact per-mode Landau–Zener solution in parabolic cylinder functions and
//! the closed-form transition probabilities derived from it.
//!
//! With z(t) = e^{iπ/4}√(2J/γ)(γ(τ−t) − cos φ) and κ the square root of iν
//! fixed by the equations of motion, the rotating-frame amplitudes obey
//! u' = −(z/2)u + κv, v' = κu + (z/2)v. Four solutions span it:
//!
//! Y₁ = (D_{−iν}(z), −κD_{−iν−1}(z))     Y₂ = (iκD_{iν−1}(iz), D_{iν}(iz))
//! Y₃ = (iκD_{iν−1}(−iz), −D_{iν}(−iz))  Y₄ = (D_{−iν}(−z), κD_{−iν−1}(−z))
//!
//! Any pair with a nonzero Wronskian solves the initial-value problem; the pair
//! is picked per evaluation point to minimise cancellation.

use crate::error::{NhqaError, Result};
use crate::gamma::{ln_gamma, rgamma};
use crate::model::{self, ChainParams, ModeContext};
use crate::scaled::Scaled;
use crate::weber::pcf;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
// relative accuracy of the closed-form Wronskians
const W_ERR: f64 = 1e-14;
const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// State e^{ln_scale}·(u, v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub u: Complex64,
    pub v: Complex64,
    pub ln_scale: f64,
}

impl Amplitudes {
    pub fn new(u: Complex64, v: Complex64) -> Self {
        Amplitudes { u, v, ln_scale: 0.0 }.renormalized()
    }

    fn from_scaled(u: Scaled, v: Scaled) -> Self {
        let shift = u.ln_abs().max(v.ln_abs());
        if !shift.is_finite() {
            return Amplitudes { u: Complex64::new(0.0, 0.0), v: Complex64::new(0.0, 0.0), ln_scale: 0.0 };
        }
        Amplitudes { u: u.to_c64_shifted(shift), v: v.to_c64_shifted(shift), ln_scale: shift }
    }

    /// Same state with max(|u|, |v|) = 1.
    pub fn renormalized(self) -> Self {
        let m = self.u.norm().max(self.v.norm());
        if m == 0.0 || !m.is_finite() {
            return self;
        }
        Amplitudes { u: self.u / m, v: self.v / m, ln_scale: self.ln_scale + m.ln() }
    }

    pub fn ln_norm(&self) -> f64 {
        0.5 * (self.u.norm_sqr() + self.v.norm_sqr()).ln() + self.ln_scale
    }

    /// Unscaled amplitudes; may overflow.
    pub fn plain(&self) -> (Complex64, Complex64) {
        let f = self.ln_scale.exp();
        (self.u * f, self.v * f)
    }
}

/// ũu + ṽv of a forward and an adjoint state.
pub fn biorthogonal_product(fwd: &Amplitudes, adj: &Amplitudes) -> Complex64 {
    let p = adj.u * fwd.u + adj.v * fwd.v;
    p * (fwd.ln_scale + adj.ln_scale).exp()
}

#[derive(Debug, Clone, Copy)]
pub struct ModeState {
    pub t: f64,
    pub fwd: Amplitudes,
    pub adjoint: Option<Amplitudes>,
    /// (α, β) on the instantaneous right eigenvectors (u₋, u₊).
    pub adiabatic: Option<(Complex64, Complex64)>,
    pub rel_err: f64,
}

#[derive(Debug, Clone, Copy)]
struct Basis {
    /// y[k] = (U_k, V_k)
    y: [[Option<Scaled>; 2]; 4],
    err: [f64; 4],
}

impl Basis {
    fn ln_norm(&self, k: usize) -> Option<f64> {
        let [u, v] = self.y[k];
        Some(u?.ln_abs().max(v?.ln_abs()))
    }
}

fn basis_at(nu: Complex64, kappa: Complex64, z: Complex64) -> Basis {
    let i = Complex64::i();
    let a = -i * nu;
    let ev = |order: Complex64, arg: Complex64| pcf(order, arg).ok();
    let pairs = [
        (ev(a, z), ev(a - 1.0, z)),
        (ev(i * nu, i * z), ev(i * nu - 1.0, i * z)),
        (ev(i * nu, -i * z), ev(i * nu - 1.0, -i * z)),
        (ev(a, -z), ev(a - 1.0, -z)),
    ];
    let mut y = [[None; 2]; 4];
    let mut err = [f64::INFINITY; 4];
    for (k, (d, dm)) in pairs.iter().enumerate() {
        if let (Some(d), Some(dm)) = (d, dm) {
            let (dv, dmv) = (d.value, dm.value);
            y[k] = match k {
                0 => [Some(dv), Some(-(dmv * kappa))],
                1 => [Some(dmv * (i * kappa)), Some(dv)],
                2 => [Some(dmv * (i * kappa)), Some(-dv)],
                _ => [Some(dv), Some(dmv * kappa)],
            };
            err[k] = d.rel_err_est.max(dm.rel_err_est).max(f64::EPSILON);
        }
    }
    Basis { y, err }
}

fn ln_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn sinh_scaled(w: Complex64) -> Scaled {
    if w.norm() < 1.0 {
        Scaled::from_c64(w.sinh())
    } else {
        (Scaled::exp(w) - Scaled::exp(-w)) * Complex64::new(0.5, 0.0)
    }
}

/// Closed-form Wronskians W_ij = U_iV_j − V_iU_j (0-based indices).
fn wronskians(nu: Complex64, kappa: Complex64) -> [[Scaled; 4]; 4] {
    let i = Complex64::i();
    let w12 = Scaled::exp(-PI * nu / 2.0);
    let w13 = -Scaled::exp(PI * nu / 2.0);
    let w14 = rgamma(1.0 + i * nu) * (kappa * SQRT_2PI);
    let w23 = sinh_scaled(PI * nu) * Complex64::new(2.0, 0.0) / w14;
    let z = Scaled::ZERO;
    [
        [z, w12, w13, w14],
        [-w12, z, w23, w13],
        [-w13, -w23, z, w12],
        [-w14, -w13, -w12, z],
    ]
}

#[derive(Debug, Clone, Copy)]
struct Coeffs {
    a: Scaled,
    b: Scaled,
    /// ln of the absolute errors of a and b
    ln_ea: f64,
    ln_eb: f64,
}

fn solve_pair(b0: &Basis, w: &[[Scaled; 4]; 4], i: usize, j: usize, init: (Complex64, Complex64)) -> Option<Coeffs> {
    let [ui, vi] = b0.y[i];
    let [uj, vj] = b0.y[j];
    let (ui, vi, uj, vj) = (ui?, vi?, uj?, vj?);
    let wij = w[i][j];
    if wij.is_zero() {
        return None;
    }
    let (u0, v0) = init;
    let lnw = wij.ln_abs();
    let t1 = vj * u0;
    let t2 = uj * v0;
    let a = (t1 - t2) / wij;
    let s1 = ui * v0;
    let s2 = vi * u0;
    let b = (s1 - s2) / wij;
    let ln_ea = ln_add(ln_add(t1.ln_abs(), t2.ln_abs()) + b0.err[j].ln() - lnw, a.ln_abs() + W_ERR.ln());
    let ln_eb = ln_add(ln_add(s1.ln_abs(), s2.ln_abs()) + b0.err[i].ln() - lnw, b.ln_abs() + W_ERR.ln());
    Some(Coeffs { a, b, ln_ea, ln_eb })
}

#[derive(Debug, Clone)]
pub struct LZContext {
    pub mode: ModeContext,
    pub params: ChainParams,
    /// e^{iπ/4}√(2J/γ)
    pub lambda: Complex64,
    /// Square root of iν consistent with the equations of motion.
    pub kappa: Complex64,
    pub z0: Complex64,
    pub z_tau: Complex64,
    /// Y₁ coefficient from (1, 0): e^{πν/2}D_{iν}(iz₀).
    pub b_k: Scaled,
    /// Y₂ coefficient from (1, 0): κe^{πν/2}D_{−iν−1}(z₀).
    pub a_k: Scaled,
    /// Adjoint constant e^{πν/2}D_{−iν}(z₀).
    pub btilde_k: Scaled,
    /// Its large-|z₀| form e^{πν/2}z₀^{−iν}e^{−z₀²/4}.
    pub btilde_asympt: Scaled,
    /// |A_k/B_k|, small when the B-only solution is adequate.
    pub a_over_b: f64,
    w: [[Scaled; 4]; 4],
    from_u: [Option<Coeffs>; 6],
    from_v: [Option<Coeffs>; 6],
}

/// z_k(t).
pub fn z_of_t(lambda: Complex64, params: &ChainParams, phi: f64, t: f64) -> Complex64 {
    lambda * (model::schedule(t, params) - phi.cos())
}

/// Constants of the exact solution for one mode.
pub fn lz_context(mode: &ModeContext, params: &ChainParams) -> Result<LZContext> {
    params.validate()?;
    let gamma = params.gamma();
    let i = Complex64::i();
    let lambda = Complex64::from_polar(1.0, FRAC_PI_4) * (2.0 * params.j / gamma).sqrt();
    let nu = mode.nu;
    let kappa = -params.j * mode.phi.sin() / (i * lambda * gamma);
    let z0 = z_of_t(lambda, params, mode.phi, 0.0);
    let z_tau = z_of_t(lambda, params, mode.phi, params.tau);
    let b0 = basis_at(nu, kappa, z0);
    let w = wronskians(nu, kappa);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut from_u = [None; 6];
    let mut from_v = [None; 6];
    for (n, &(p, q)) in PAIRS.iter().enumerate() {
        from_u[n] = solve_pair(&b0, &w, p, q, (one, zero));
        from_v[n] = solve_pair(&b0, &w, p, q, (zero, one));
    }
    let e = Scaled::exp(PI * nu / 2.0);
    let b_k = e * pcf(i * nu, i * z0)?.value;
    let a_k = e * pcf(-i * nu - 1.0, z0)?.value * kappa;
    let btilde_k = e * pcf(-i * nu, z0)?.value;
    let btilde_asympt = Scaled::exp(PI * nu / 2.0 - i * nu * z0.ln() - z0 * z0 / 4.0);
    let a_over_b = (a_k.ln_abs() - b_k.ln_abs()).exp();
    Ok(LZContext {
        mode: *mode,
        params: *params,
        lambda,
        kappa,
        z0,
        z_tau,
        b_k,
        a_k,
        btilde_k,
        btilde_asympt,
        a_over_b,
        w,
        from_u,
        from_v,
    })
}

impl LZContext {
    pub fn z(&self, t: f64) -> Complex64 {
        z_of_t(self.lambda, &self.params, self.mode.phi, t)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.params.tau).contains(&t) {
            return Err(NhqaError::Domain(format!("t = {t} outside [0, τ = {}]", self.params.tau)));
        }
        Ok(())
    }

    fn combine(&self, coeffs: &[Option<Coeffs>; 6], init: Option<(Complex64, Complex64)>, t: f64) -> Result<(Amplitudes, f64)> {
        self.check_time(t)?;
        let z = self.z(t);
        let bt = basis_at(self.mode.nu, self.kappa, z);
        let b0 = if init.is_some() { Some(basis_at(self.mode.nu, self.kappa, self.z0)) } else { None };
        let mut best: Option<(Amplitudes, f64)> = None;
        for (n, &(i, j)) in PAIRS.iter().enumerate() {
            let c = match (init, &b0) {
                (Some(x), Some(b0)) => solve_pair(b0, &self.w, i, j, x),
                _ => coeffs[n],
            };
            let (Some(c), Some(ni), Some(nj)) = (c, bt.ln_norm(i), bt.ln_norm(j)) else { continue };
            let [ui, vi] = bt.y[i];
            let [uj, vj] = bt.y[j];
            let (ui, vi, uj, vj) = (ui.unwrap(), vi.unwrap(), uj.unwrap(), vj.unwrap());
            let u = c.a * ui + c.b * uj;
            let v = c.a * vi + c.b * vj;
            let amp = Amplitudes::from_scaled(u, v);
            let ln_res = amp.ln_norm();
            if !ln_res.is_finite() {
                continue;
            }
            let ei = ln_add(c.a.ln_abs() + bt.err[i].ln(), c.ln_ea) + ni;
            let ej = ln_add(c.b.ln_abs() + bt.err[j].ln(), c.ln_eb) + nj;
            let rel = (ln_add(ei, ej) - ln_res).exp();
            if best.as_ref().map_or(true, |b| rel < b.1) {
                best = Some((amp, rel));
            }
        }
        best.ok_or_else(|| NhqaError::Weber(format!("no usable solution pair at z = {z}")))
    }

    /// Exact amplitudes from (u, v)(0) = (1, 0), with a relative error estimate.
    pub fn exact_amplitudes(&self, t: f64) -> Result<(Amplitudes, f64)> {
        self.combine(&self.from_u, None, t)
    }

    /// Exact amplitudes from an arbitrary initial vector at t = 0.
    pub fn propagate(&self, init: (Complex64, Complex64), t: f64) -> Result<(Amplitudes, f64)> {
        self.combine(&self.from_u, Some(init), t)
    }

    /// Adjoint amplitudes (ũ, ṽ) from (1, 0). The adjoint equations are the
    /// forward ones with J → −J, so (ũ, ṽ) = (v₂, −u₂) with (u₂, v₂) the
    /// forward solution from (0, 1).
    pub fn adjoint_amplitudes(&self, t: f64) -> Result<(Amplitudes, f64)> {
        let (f, e) = self.combine(&self.from_v, None, t)?;
        Ok((Amplitudes { u: f.v, v: -f.u, ln_scale: f.ln_scale }, e))
    }

    /// B-only solution (u, v) = B_k·Y₁(z(t)), dropping the A_k term.
    pub fn ground_amplitudes(&self, t: f64) -> Result<(Amplitudes, f64)> {
        self.check_time(t)?;
        let z = self.z(t);
        let nu = self.mode.nu;
        let a = Complex64::new(0.0, -1.0) * nu;
        let d = pcf(a, z)?;
        let dm = pcf(a - 1.0, z)?;
        let u = self.b_k * d.value;
        let v = -(self.b_k * dm.value * self.kappa);
        Ok((Amplitudes::from_scaled(u, v), d.rel_err_est.max(dm.rel_err_est)))
    }

    /// Full state at t: exact forward and adjoint solution plus adiabatic
    /// decomposition (absent at an exceptional point).
    pub fn mode_state(&self, t: f64) -> Result<ModeState> {
        let (fwd, e1) = self.exact_amplitudes(t)?;
        let (adj, e2) = self.adjoint_amplitudes(t)?;
        let adiabatic = adiabatic_projection(self.mode.phi, t, &self.params, &fwd).ok();
        Ok(ModeState { t, fwd, adjoint: Some(adj), adiabatic, rel_err: e1.max(e2) })
    }
}

/// P = |v|²/(|u|² + |v|²).
pub fn prob_flip(u: Complex64, v: Complex64) -> Result<f64> {
    let m = u.norm().max(v.norm());
    if m == 0.0 || !m.is_finite() {
        return Err(NhqaError::ZeroNorm);
    }
    let (u, v) = (u / m, v / m);
    Ok(v.norm_sqr() / (u.norm_sqr() + v.norm_sqr()))
}

/// Intrinsic ground-state probability |α|²/(|α|² + |β|²).
pub fn prob_ground(alpha: Complex64, beta: Complex64) -> Result<f64> {
    prob_flip(beta, alpha)
}

/// (α, β) of the state on the instantaneous eigenvectors, projected with the
/// left eigenvectors. At t ≥ τ the g̃ = 0 basis with θ = π − φ is used.
pub fn adiabatic_projection(
    phi: f64,
    t: f64,
    params: &ChainParams,
    amps: &Amplitudes,
) -> Result<(Complex64, Complex64)> {
    let (um, up) = if t >= params.tau {
        model::final_basis(phi)
    } else {
        let s = model::spectrum_continued(phi, t, params)?;
        model::adiabatic_basis(s.cos_theta, s.sin_theta, t)?
    };
    // (v, u) ordering; left vectors are plain transposes and u₋ᵀu₋ = u₊ᵀu₊ = 1
    let psi = [amps.v, amps.u];
    let alpha = um[0] * psi[0] + um[1] * psi[1];
    let beta = up[0] * psi[0] + up[1] * psi[1];
    Ok((alpha, beta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged {
    pub p: f64,
    /// False outside the window where the asymptotic form is expected to hold.
    pub valid: bool,
}

/// Long-wavelength transition probability at τ,
/// (1 − e^{−2πRe ν})/(1 − e^{−2πRe ν} + e^{−2πRe ν − Re z²(τ)}) with
/// Re ν ≈ (Jτ/2g)sin²φ and Re z²(τ) ≈ (2δJτ/g²)cos²φ; for δ = 0 the
/// Landau–Zener value 1 − exp(−(πJτ/g)sin²φ).
pub fn prob_longwave_asympt(phi: f64, params: &ChainParams) -> Flagged {
    let (j, g, d, tau) = (params.j, params.g, params.delta, params.tau);
    let s2 = phi.sin().powi(2);
    let c2 = phi.cos().powi(2);
    let z_tau = (2.0 * j * tau / g).sqrt() * phi.cos().abs();
    let valid = phi <= PI / 8.0 && z_tau >= 5.0;
    if d == 0.0 {
        return Flagged { p: -(-(PI * j * tau / g) * s2).exp_m1(), valid };
    }
    let re_nu = j * tau / (2.0 * g) * s2;
    let re_z2 = 2.0 * d * j * tau / (g * g) * c2;
    let x = 2.0 * PI * re_nu;
    let num = -(-x).exp_m1();
    let p = num / (num + (-x - re_z2).exp());
    Flagged { p, valid: valid && d < g }
}

/// Transition probability of the φ = π/2 mode from the B-only solution at
/// z(τ) = 0: 1/(1 + |ν/2|·|Γ(iν/2)|²/|Γ((1+iν)/2)|²) with ν = J/(2γ).
/// The |ν/2| factor is what makes the δ = 0 case reduce to
/// tanh(πν/2)/(1 + tanh(πν/2)) with ν = Jτ/(2g), which is used there.
pub fn prob_pi_half(params: &ChainParams) -> Result<f64> {
    params.validate()?;
    if params.delta == 0.0 {
        let nu = params.j * params.tau / (2.0 * params.g);
        let th = (PI * nu / 2.0).tanh();
        return Ok(th / (1.0 + th));
    }
    let nu = params.j / (2.0 * params.gamma());
    let i = Complex64::i();
    let r = (nu.norm() / 2.0).ln() + 2.0 * (ln_gamma(i * nu / 2.0).re - ln_gamma((1.0 + i * nu) / 2.0).re);
    // 1/(1 + e^r) without overflow
    Ok(if r > 0.0 { (-r).exp() / (1.0 + (-r).exp()) } else { 1.0 / (1.0 + r.exp()) })
}
