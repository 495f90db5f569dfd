//! Chain parameters, the linear schedule, the per-mode 2×2 Hamiltonian and its
//! complex spectrum.
//!
//! Mode vectors are written in the basis (|k₁⟩, |k₀⟩), i.e. (v, u).

use crate::error::{NhqaError, Result};
use crate::quad;
use num_complex::Complex64;
use std::f64::consts::PI;

pub type Mat2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub j: f64,
    pub g: f64,
    pub delta: f64,
    pub tau: f64,
    pub n: usize,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams { j: 0.5, g: 10.0, delta: 0.0, tau: 1000.0, n: 1024 }
    }
}

impl ChainParams {
    pub fn new(j: f64, g: f64, delta: f64, tau: f64, n: usize) -> Result<Self> {
        let p = ChainParams { j, g, delta, tau, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.j, self.g, self.delta, self.tau].iter().all(|x| x.is_finite());
        if !finite {
            return Err(NhqaError::Param("non-finite chain parameter".into()));
        }
        if self.j <= 0.0 {
            return Err(NhqaError::Param(format!("J must be > 0, got {}", self.j)));
        }
        if self.g < 0.0 {
            return Err(NhqaError::Param(format!("g must be >= 0, got {}", self.g)));
        }
        if self.delta < 0.0 {
            return Err(NhqaError::Param(format!("delta must be >= 0, got {}", self.delta)));
        }
        if self.tau <= 0.0 {
            return Err(NhqaError::Param(format!("tau must be > 0, got {}", self.tau)));
        }
        if self.n < 2 || self.n % 2 != 0 {
            return Err(NhqaError::Param(format!("N must be even and >= 2, got {}", self.n)));
        }
        if self.g == 0.0 && self.delta == 0.0 {
            return Err(NhqaError::Param("gamma = (g + i delta)/tau must be nonzero".into()));
        }
        Ok(())
    }

    /// Sweep rate γ = (g + iδ)/τ.
    pub fn gamma(&self) -> Complex64 {
        Complex64::new(self.g, self.delta) / self.tau
    }

    pub fn modes(&self) -> usize {
        self.n / 2
    }

    /// Characteristic Hermitian annealing time 2gN²/(π²J).
    pub fn tau0(&self) -> f64 {
        2.0 * self.g * (self.n as f64).powi(2) / (PI * PI * self.j)
    }
}

/// φ_k = 2π(p − ½)/N.
pub fn mode_angle(p: usize, n: usize) -> Result<f64> {
    if n < 2 || n % 2 != 0 {
        return Err(NhqaError::Param(format!("N must be even and >= 2, got {n}")));
    }
    if p < 1 || p > n / 2 {
        return Err(NhqaError::Param(format!("mode counter p = {p} outside 1..={}", n / 2)));
    }
    Ok(2.0 * PI * (p as f64 - 0.5) / n as f64)
}

/// g̃(t) = γ(τ − t) on the ramp, zero afterwards.
pub fn schedule(t: f64, params: &ChainParams) -> Complex64 {
    if t >= params.tau {
        Complex64::new(0.0, 0.0)
    } else {
        params.gamma() * (params.tau - t)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ModeContext {
    pub p: usize,
    pub phi: f64,
    pub nu: Complex64,
    pub gamma: Complex64,
}

impl ModeContext {
    pub fn new(p: usize, params: &ChainParams) -> Result<Self> {
        params.validate()?;
        let phi = mode_angle(p, params.n)?;
        Ok(Self::from_angle(p, phi, params))
    }

    /// Context for an arbitrary angle (thermodynamic-limit sweeps); `p` is informational.
    pub fn from_angle(p: usize, phi: f64, params: &ChainParams) -> Self {
        let gamma = params.gamma();
        let s = phi.sin();
        ModeContext { p, phi, nu: params.j * s * s / (2.0 * gamma), gamma }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Spectrum {
    pub eps0: Complex64,
    pub eps_k: Complex64,
    pub cos_theta: Complex64,
    pub sin_theta: Complex64,
    pub theta: Complex64,
}

impl Spectrum {
    /// Eigenvalues (ε₋, ε₊) = (−ε₀ − ε_k, −ε₀ + ε_k).
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        (-self.eps0 - self.eps_k, -self.eps0 + self.eps_k)
    }
}

fn radicand(phi: f64, gt: Complex64) -> Complex64 {
    gt * gt - 2.0 * gt * phi.cos() + 1.0
}

fn spectrum_with_root(phi: f64, gt: Complex64, j: f64, root: Complex64) -> Result<Spectrum> {
    if root.norm() == 0.0 {
        return Err(NhqaError::Singular(format!("gap closes at phi = {phi}, g~ = {gt}")));
    }
    let cos_theta = (gt - phi.cos()) / root;
    let sin_theta = phi.sin() / root;
    let theta = complex_atan2(sin_theta, cos_theta);
    Ok(Spectrum {
        eps0: Complex64::new(j * phi.cos(), j * gt.im),
        eps_k: root * j,
        cos_theta,
        sin_theta,
        theta,
    })
}

// θ with cos θ = c, sin θ = s (c² + s² = 1): θ = −i ln(c + i s).
fn complex_atan2(s: Complex64, c: Complex64) -> Complex64 {
    -Complex64::i() * (c + Complex64::i() * s).ln()
}

/// Spectrum at field g̃ on the principal branch of the square root.
/// ε₀ = J cos φ + iJ·Im g̃.
pub fn spectrum(phi: f64, gt: Complex64, j: f64) -> Result<Spectrum> {
    spectrum_with_root(phi, gt, j, radicand(phi, gt).sqrt())
}

/// Sign that continues √(g̃² − 2g̃ cos φ + 1) along the linear schedule from
/// the principal branch at t = 0.
///
/// The radicand factors as (g̃ − e^{iφ})(g̃ − e^{−iφ}). The second factor keeps
/// Im > 0 on the whole ramp, the first crosses the negative real axis at most
/// once, at Im g̃ = sin φ; that crossing flips the continued root.
pub fn branch_sign(phi: f64, t: f64, params: &ChainParams) -> f64 {
    let ep = Complex64::from_polar(1.0, phi);
    let em = ep.conj();
    let g0 = schedule(0.0, params);
    let w0 = radicand(phi, g0);
    let prod0 = (g0 - ep).sqrt() * (g0 - em).sqrt();
    let s0 = if (w0.sqrt() - prod0).norm() <= (w0.sqrt() + prod0).norm() { 1.0 } else { -1.0 };
    let mut s = s0;
    if params.delta > 0.0 {
        // fraction x = 1 - t/τ where Im g̃ = sin φ
        let xc = phi.sin() / params.delta;
        let x_now = (1.0 - t / params.tau).max(0.0);
        if xc < 1.0 && x_now < xc && params.g * xc - phi.cos() < 0.0 {
            s = -s;
        }
    }
    s
}

/// Spectrum on the branch continued along the schedule (see [`branch_sign`]).
pub fn spectrum_continued(phi: f64, t: f64, params: &ChainParams) -> Result<Spectrum> {
    let gt = schedule(t, params);
    let ep = Complex64::from_polar(1.0, phi);
    let root = (gt - ep).sqrt() * (gt - ep.conj()).sqrt() * branch_sign(phi, t, params);
    spectrum_with_root(phi, gt, params.j, root)
}

/// |Δε| = 2J|√(g̃² − 2g̃ cos θ + 1)| with g̃ = g + iδ.
pub fn gap_abs(g: f64, delta: f64, theta: f64, j: f64) -> f64 {
    2.0 * j * radicand(theta, Complex64::new(g, delta)).norm().sqrt()
}

/// (θ_c, g_c) = (arccos √(1−δ²), √(1−δ²)).
pub fn critical_point(delta: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(NhqaError::Param(format!("critical point needs 0 <= delta <= 1, got {delta}")));
    }
    let gc = (1.0 - delta * delta).sqrt();
    Ok((gc.acos(), gc))
}

/// Full mode Hamiltonian −ε₀·1 + J[[g̃ − cos φ, sin φ], [sin φ, −(g̃ − cos φ)]].
pub fn mode_hamiltonian(phi: f64, gt: Complex64, j: f64) -> Mat2 {
    let eps0 = Complex64::new(j * phi.cos(), j * gt.im);
    let a = (gt - phi.cos()) * j;
    let s = Complex64::new(j * phi.sin(), 0.0);
    [[a - eps0, s], [s, -a - eps0]]
}

/// Half-angle pair (cos θ/2, sin θ/2) consistent with sin θ = 2 sin(θ/2) cos(θ/2).
pub fn half_angle(cos_theta: Complex64, sin_theta: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let c2 = ((one + cos_theta) / 2.0).sqrt();
    let s2 = ((one - cos_theta) / 2.0).sqrt();
    if c2.norm() >= s2.norm() {
        (c2, sin_theta / (2.0 * c2))
    } else {
        (sin_theta / (2.0 * s2), s2)
    }
}

/// Right eigenvectors (u₋, u₊) in the (v, u) basis; left eigenvectors are
/// their plain transposes. Errors when the normalised basis is degenerate.
pub fn adiabatic_basis(
    cos_theta: Complex64,
    sin_theta: Complex64,
    t: f64,
) -> Result<([Complex64; 2], [Complex64; 2])> {
    let (c, s) = half_angle(cos_theta, sin_theta);
    let n2 = c.norm_sqr() + s.norm_sqr();
    // |det| of the column-normalised eigenvector matrix
    let det = 1.0 / n2;
    if !(det > 1e-12) {
        return Err(NhqaError::ExceptionalPoint { t, det });
    }
    Ok(([-s, c], [c, s]))
}

/// Endpoint (g̃ = 0) basis, θ = π − φ.
pub fn final_basis(phi: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let c = Complex64::new((phi / 2.0).sin(), 0.0);
    let s = Complex64::new((phi / 2.0).cos(), 0.0);
    ([-s, c], [c, s])
}

/// ε_gs = −iJ·Im g̃ − (J/π)∫₀^π √(g̃² − 2g̃ cos ϑ + 1) dϑ.
pub fn ground_energy_per_spin(gt: Complex64, j: f64) -> Result<Complex64> {
    let r = quad_relaxed(|th| radicand(th, gt).sqrt(), 0.0, PI)?;
    Ok(Complex64::new(0.0, -j * gt.im) - r * (j / PI))
}

/// Same quantity through −iJ·Im g̃ − (2J(g̃+1)/π) E(2√g̃/(g̃+1)).
pub fn ground_energy_elliptic(gt: Complex64, j: f64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let k2 = 4.0 * gt / ((gt + one) * (gt + one));
    let g1 = (gt + one) * (gt + one);
    // root taken on the whole product: the principal E(k) alone sits on the
    // wrong sheet once |g̃| > 1 and Re k² > 1
    let e = quad_relaxed(|th| (g1 * (one - k2 * th.sin().powi(2))).sqrt(), 0.0, PI / 2.0)?;
    Ok(Complex64::new(0.0, -j * gt.im) - e * (2.0 * j / PI))
}

fn quad_relaxed<F: Fn(f64) -> Complex64 + Copy>(f: F, a: f64, b: f64) -> Result<Complex64> {
    match quad::integrate(f, a, b, 1e-10) {
        Ok(r) => Ok(r.value),
        // square-root cusp at the critical point
        Err(_) => quad::integrate(f, a, b, 1e-8).map(|r| r.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mode_angles() {
        assert!((mode_angle(1, 1024).unwrap() - PI / 1024.0).abs() < 1e-15);
        assert!((mode_angle(256, 1024).unwrap() - 1.567_728_365_219_125_2).abs() < 1e-12);
        assert!((mode_angle(512, 1024).unwrap() - PI * 1023.0 / 1024.0).abs() < 1e-14);
        assert!(mode_angle(0, 1024).is_err());
        assert!(mode_angle(513, 1024).is_err());
        assert!(mode_angle(1, 1023).is_err());
    }

    #[test]
    fn schedule_endpoints() {
        let p = ChainParams { delta: 0.5, ..Default::default() };
        assert_eq!(schedule(0.0, &p), c(10.0, 0.5));
        assert_eq!(schedule(p.tau, &p), c(0.0, 0.0));
        assert!((schedule(p.tau / 2.0, &p) - c(5.0, 0.25)).norm() < 1e-14);
        assert_eq!(schedule(2.0 * p.tau, &p), c(0.0, 0.0));
    }

    #[test]
    fn params_validation() {
        assert!(ChainParams::new(0.5, 10.0, 0.0, 1000.0, 1024).is_ok());
        assert!(ChainParams::new(-0.5, 10.0, 0.0, 1000.0, 1024).is_err());
        assert!(ChainParams::new(0.5, 10.0, 0.0, 1000.0, 7).is_err());
        assert!(ChainParams::new(0.5, 0.0, 0.0, 1000.0, 8).is_err());
        assert!(ChainParams::new(0.5, 10.0, -0.1, 1000.0, 8).is_err());
        assert!((ChainParams::default().tau0() - 4.249_7e6).abs() < 1e2);
    }

    #[test]
    fn spectrum_values() {
        let s = spectrum(PI / 2.0, c(10.0, 0.0), 0.5).unwrap();
        assert!((s.eps_k - c(0.5 * 101f64.sqrt(), 0.0)).norm() < 1e-14);
        let s = spectrum(0.3, c(1e8, 0.0), 0.5).unwrap();
        assert!((s.cos_theta - 1.0).norm() < 1e-7);
        let (tc, gc) = critical_point(0.25).unwrap();
        assert!(spectrum(tc, c(gc, 0.25), 0.5).is_err());
    }

    #[test]
    fn gap_and_critical_point() {
        assert!(gap_abs(1.0, 0.0, 0.0, 0.5).abs() < 1e-15);
        let (tc, gc) = critical_point(0.25).unwrap();
        assert!((tc - 0.252_680_255_142_078_7).abs() < 1e-12);
        assert!((gc - 0.968_245_836_551_854_2).abs() < 1e-12);
        assert!(gap_abs(gc, 0.25, tc, 0.5) < 1e-7);
        assert!((gap_abs(10.0, 0.0, PI / 2.0, 0.5) - 101f64.sqrt()).abs() < 1e-13);
        assert_eq!(critical_point(0.0).unwrap(), (0.0, 1.0));
        let (t1, g1) = critical_point(1.0).unwrap();
        assert!((t1 - PI / 2.0).abs() < 1e-15 && g1 == 0.0);
        assert!(critical_point(1.2).is_err());
    }

    #[test]
    fn hermitian_gap_has_single_zero_at_one() {
        let mut zeros = 0;
        let n = 20001;
        for i in 0..n {
            let g = 2.0 * i as f64 / (n - 1) as f64;
            if gap_abs(g, 0.0, 0.0, 0.5) < 1e-12 {
                zeros += 1;
                assert!((g - 1.0).abs() < 1e-12);
            }
        }
        assert_eq!(zeros, 1);
    }

    #[test]
    fn eigenvalues_of_mode_hamiltonian() {
        for &(phi, gt) in &[(0.4, c(3.0, 0.2)), (2.1, c(0.3, 0.7)), (1.0, c(-0.5, 0.1))] {
            let h = mode_hamiltonian(phi, gt, 0.5);
            let s = spectrum(phi, gt, 0.5).unwrap();
            let (em, ep) = s.eigenvalues();
            let tr = h[0][0] + h[1][1];
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            assert!(((em + ep) - tr).norm() < 1e-12 * tr.norm().max(1.0));
            assert!((em * ep - det).norm() < 1e-12 * det.norm().max(1.0));
            let (um, up) = adiabatic_basis(s.cos_theta, s.sin_theta, 0.0).unwrap();
            for (v, e) in [(um, em), (up, ep)] {
                let hv = [h[0][0] * v[0] + h[0][1] * v[1], h[1][0] * v[0] + h[1][1] * v[1]];
                assert!((hv[0] - e * v[0]).norm() < 1e-12 && (hv[1] - e * v[1]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn final_basis_matches_continued_basis_for_hermitian_ramp() {
        let p = ChainParams::default();
        let phi = 0.7;
        let s = spectrum_continued(phi, p.tau, &p).unwrap();
        let (um, _) = adiabatic_basis(s.cos_theta, s.sin_theta, p.tau).unwrap();
        let (fm, _) = final_basis(phi);
        let dot = um[0] * fm[0] + um[1] * fm[1];
        assert!((dot.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn continued_branch_is_continuous() {
        for &(delta, phi) in &[(0.5, 0.02), (0.5, 0.3), (1.0, 0.05), (0.25, 0.252), (0.0, 0.01)] {
            let p = ChainParams { delta, ..Default::default() };
            let steps = 20000;
            let h = p.tau / steps as f64;
            let mut prev = spectrum_continued(phi, 0.0, &p).unwrap().eps_k;
            assert!((prev - spectrum(phi, schedule(0.0, &p), p.j).unwrap().eps_k).norm() < 1e-12);
            for i in 1..=steps {
                let e = spectrum_continued(phi, i as f64 * h, &p).unwrap().eps_k;
                assert!((e - prev).norm() <= 2.0 * p.j * p.g.hypot(p.delta) / p.tau * h * 1.01 + 1e-3 * h.sqrt(),
                    "jump at delta={delta} phi={phi} step {i}: {prev} -> {e}");
                prev = e;
            }
        }
    }

    #[test]
    fn continued_branch_ends_on_excited_state_below_the_ep_angle() {
        // modes with tan φ < δ/g encircle the exceptional point
        let p = ChainParams { delta: 0.5, ..Default::default() };
        let end = |phi: f64| spectrum_continued(phi, p.tau, &p).unwrap().eps_k;
        assert!((end(0.01) + 0.5).norm() < 1e-12);
        assert!((end(0.2) - 0.5).norm() < 1e-12);
    }

    #[test]
    fn ground_energy_examples() {
        let e = ground_energy_per_spin(c(0.0, 0.0), 0.5).unwrap();
        assert!((e - c(-0.5, 0.0)).norm() < 1e-12);
        let e = ground_energy_per_spin(c(1.0, 0.0), 0.5).unwrap();
        assert!((e.re + 2.0 / PI).abs() < 1e-9);
        let e = ground_energy_per_spin(c(0.0, 0.3), 0.5).unwrap();
        assert!((e.im + 0.5 * 0.3).abs() < 1e-12);
        // mpmath quadrature, g̃ = 3, J = 0.5
        let e = ground_energy_per_spin(c(3.0, 0.0), 0.5).unwrap();
        assert!((e.re - (-1.541_964_425_190_040_0)).abs() < 1e-9, "{e}");
    }

    #[test]
    fn quadrature_matches_elliptic_form_on_grid() {
        for i in 0..=20 {
            for k in 0..=10 {
                let gt = c(10.0 * i as f64 / 20.0, k as f64 / 10.0);
                let a = ground_energy_per_spin(gt, 0.5).unwrap();
                let b = ground_energy_elliptic(gt, 0.5).unwrap();
                assert!((a - b).norm() <= 1e-8 * a.norm(), "g~={gt}: {a} vs {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn trig_identity(re in -5.0f64..5.0, im in -2.0f64..2.0, phi in 0.01f64..3.13) {
            let gt = c(re, im);
            prop_assume!(radicand(phi, gt).norm() > 1e-6);
            let s = spectrum(phi, gt, 0.5).unwrap();
            let r = s.cos_theta * s.cos_theta + s.sin_theta * s.sin_theta - 1.0;
            prop_assert!(r.norm() < 1e-12 * (1.0 + s.cos_theta.norm_sqr()));
            let (ch, sh) = half_angle(s.cos_theta, s.sin_theta);
            prop_assert!((ch * ch - sh * sh - s.cos_theta).norm() < 1e-10 * (1.0 + s.cos_theta.norm()));
        }
    }
}
