//! Parabolic cylinder (Weber) functions D_a(z) for complex order and argument.
//!
//! Evaluation strategy:
//! * large |z|: the asymptotic expansion in |arg z| ≤ π/2, and the exact
//!   connection formula beyond, with a guard against the Stokes-switched term;
//! * elsewhere: Taylor continuation of the Weber equation along a few candidate
//!   paths (from the origin, radially inward from a large-|z| anchor, or along
//!   an arc from the positive real axis), keeping the path whose propagated
//!   error estimate is smallest.
//!
//! Values are returned as [`Scaled`] so that exp(±z²/4) never overflows.

mod asympt;
mod taylor;

use crate::error::{NhqaError, Result};
use crate::gamma::rgamma;
use crate::scaled::Scaled;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

const SQRT_PI: f64 = 1.772_453_850_905_516;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
// candidate search stops once an estimate is this small
const GOOD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    OdeContinuation,
    AsymptLargeArg,
    AsymptLargeOrder,
}

/// Which representation produced the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// |arg z| ≤ π/2, direct expansion.
    Principal,
    /// arg z > 0 outside the principal sector, connection through D(-z), D(-iz).
    UpperConnection,
    /// arg z < 0 outside the principal sector, connection through D(-z), D(iz).
    LowerConnection,
    /// Finite-|z| region covered by continuation.
    Interior,
}

#[derive(Debug, Clone, Copy)]
pub struct WeberEval {
    pub value: Scaled,
    /// d/dz D_a(z).
    pub deriv: Scaled,
    pub rel_err_est: f64,
    /// rel_err_est · |value|; may be 0 or inf when |value| is outside f64 range.
    pub abs_err_est: f64,
    pub method: Method,
    pub sector: Sector,
}

impl WeberEval {
    fn new(value: Scaled, deriv: Scaled, rel: f64, method: Method, sector: Sector) -> Self {
        WeberEval {
            value,
            deriv,
            rel_err_est: rel,
            abs_err_est: rel * value.abs(),
            method,
            sector,
        }
    }

    pub fn c64(&self) -> Complex64 {
        self.value.to_c64()
    }
}

fn origin_values(a: Complex64) -> (Scaled, Scaled) {
    let two = Complex64::new(2.0, 0.0);
    let d0 = Scaled::exp(a / 2.0 * two.ln()) * rgamma((1.0 - a) / 2.0) * Complex64::new(SQRT_PI, 0.0);
    let dp0 = -(Scaled::exp((a + 1.0) / 2.0 * two.ln())
        * rgamma(-a / 2.0)
        * Complex64::new(SQRT_PI, 0.0));
    (d0, dp0)
}

// Anchor on the ray of angle `theta` with a usable large-argument value.
fn anchor(a: Complex64, r_min: f64, theta: f64) -> Option<(f64, asympt::Local)> {
    let mut r = r_min.max(8.0);
    for _ in 0..14 {
        let w = Complex64::from_polar(r, theta);
        if let Some((loc, _)) = asympt::large_arg(a, w) {
            if loc.series_err < 1e-14 {
                return Some((r, loc));
            }
        }
        r *= 1.3;
    }
    None
}

fn arc_points(a: Complex64, r: f64, from: f64, to: f64) -> Vec<Complex64> {
    let h = taylor::step_len(a, Complex64::new(r, 0.0));
    let n = ((r * (to - from).abs() / h).ceil() as usize).max(1);
    (0..=n)
        .map(|k| Complex64::from_polar(r, from + (to - from) * k as f64 / n as f64))
        .collect()
}

/// D_a(z).
pub fn pcf(a: Complex64, z: Complex64) -> Result<WeberEval> {
    pcf_inner(a, z, true)
}

// Exact connection at finite z, with both pieces from continuation:
// D_a(z) = e^{±iπa} D_a(-z) + √(2π)/Γ(-a) e^{±iπ(a+1)/2} D_{-a-1}(∓iz).
fn via_connection(a: Complex64, z: Complex64, sg: f64) -> Option<WeberEval> {
    let i = Complex64::i();
    let f = pcf_inner(a, -z, false).ok()?;
    let c1 = Scaled::exp(sg * i * PI * a);
    let p1 = c1 * f.value;
    let mut d = p1;
    let mut dp = -(c1 * f.deriv);
    let mut pieces = vec![(p1.ln_abs(), f.rel_err_est)];
    let rg = rgamma(-a);
    if !rg.is_zero() {
        let g = pcf_inner(-a - 1.0, -sg * i * z, false).ok()?;
        let c2 = rg * Scaled::exp(sg * i * PI * (a + 1.0) / 2.0) * Complex64::new(SQRT_2PI, 0.0);
        let p2 = c2 * g.value;
        pieces.push((p2.ln_abs(), g.rel_err_est));
        d = d + p2;
        dp = dp + (c2 * g.deriv) * (-sg * i);
    }
    if d.is_zero() {
        return None;
    }
    let ld = d.ln_abs();
    let rel: f64 = pieces.iter().map(|(l, e)| (l - ld).exp() * (e + 4.0 * f64::EPSILON)).sum();
    let sector = if sg > 0.0 { Sector::UpperConnection } else { Sector::LowerConnection };
    Some(WeberEval::new(d, dp, rel, Method::OdeContinuation, sector))
}

fn pcf_inner(a: Complex64, z: Complex64, allow_connection: bool) -> Result<WeberEval> {
    if !(a.re.is_finite() && a.im.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(NhqaError::Weber(format!("non-finite input a={a}, z={z}")));
    }
    let (d0, dp0) = origin_values(a);
    let zn = z.norm();
    if zn == 0.0 {
        return Ok(WeberEval::new(d0, dp0, 4.0 * f64::EPSILON, Method::Series, Sector::Interior));
    }
    let direct = if zn >= 4.0 { asympt::large_arg(a, z) } else { None };
    if let Some((loc, sector)) = direct {
        if loc.series_err <= 1e-14 {
            return Ok(WeberEval::new(loc.d, loc.dp, loc.rel_err, Method::AsymptLargeArg, sector));
        }
    }

    let mut best: Option<WeberEval> = None;
    // input rounding alone costs ε(|a ln z| + |z|²/2) in relative terms
    let floor = 8.0 * f64::EPSILON * (a.norm() * (1.0 + zn.ln().abs()) + zn * zn / 2.0);
    let good = GOOD.max(floor);
    let done = |b: &Option<WeberEval>| b.as_ref().map_or(false, |b| b.rel_err_est <= good);
    let consider = |p: taylor::PathResult, best: &mut Option<WeberEval>| {
        if p.rel_err.is_finite() && best.as_ref().map_or(true, |b| p.rel_err < b.rel_err_est) {
            let m = if p.steps <= 1 { Method::Series } else { Method::OdeContinuation };
            *best = Some(WeberEval::new(p.d, p.dp, p.rel_err, m, Sector::Interior));
        }
    };
    let origin = Complex64::new(0.0, 0.0);
    let theta = z.arg();

    if zn <= 30.0 {
        consider(taylor::continue_path(a, &[origin, z], d0, dp0, 4.0 * f64::EPSILON), &mut best);
    }
    if !done(&best) {
        if let Some((r, loc)) = anchor(a, zn, theta) {
            let start = Complex64::from_polar(r, theta);
            consider(taylor::continue_path(a, &[start, z], loc.d, loc.dp, loc.rel_err), &mut best);
        }
    }
    // radially in along another ray, then along an arc at |z| or at the anchor radius
    let mut rays = vec![0.0];
    if theta.abs() > FRAC_PI_4 {
        rays.push(FRAC_PI_2 * theta.signum());
    }
    if theta.abs() > 3.0 * FRAC_PI_4 {
        rays.push(PI * theta.signum());
    }
    let anchors: Vec<(f64, f64, asympt::Local)> = if done(&best) {
        Vec::new()
    } else {
        rays.iter().filter_map(|&s| anchor(a, zn, s).map(|(r, l)| (s, r, l))).collect()
    };
    for (s, r, loc) in &anchors {
        if done(&best) {
            break;
        }
        let mut pts = vec![Complex64::from_polar(*r, *s)];
        pts.extend(arc_points(a, zn, *s, theta));
        consider(taylor::continue_path(a, &pts, loc.d, loc.dp, loc.rel_err), &mut best);
    }
    for (s, r, loc) in &anchors {
        if done(&best) {
            break;
        }
        let mut pts = arc_points(a, *r, *s, theta);
        pts.push(z);
        consider(taylor::continue_path(a, &pts, loc.d, loc.dp, loc.rel_err), &mut best);
    }
    if best.is_none() && zn > 30.0 {
        consider(taylor::continue_path(a, &[origin, z], d0, dp0, 4.0 * f64::EPSILON), &mut best);
    }
    // a looser large-argument value still beats a worse continuation
    if let Some((loc, sector)) = direct {
        if best.as_ref().map_or(true, |b| loc.rel_err < b.rel_err_est) {
            best = Some(WeberEval::new(loc.d, loc.dp, loc.rel_err, Method::AsymptLargeArg, sector));
        }
    }
    if allow_connection && !done(&best) {
        for sg in [1.0, -1.0] {
            if let Some(c) = via_connection(a, z, sg) {
                if best.as_ref().map_or(true, |b| c.rel_err_est < b.rel_err_est) {
                    best = Some(c);
                }
            }
        }
    }
    best.ok_or_else(|| NhqaError::Weber(format!("no evaluation path for a={a}, z={z}")))
}

/// (D_{-iν}(z), D_{-iν-1}(z)), each evaluated independently.
pub fn pcf_pair(nu: Complex64, z: Complex64) -> Result<(WeberEval, WeberEval)> {
    let a = Complex64::new(0.0, -1.0) * nu;
    Ok((pcf(a, z)?, pcf(a - 1.0, z)?))
}

/// Relative residual of D_{1-iν}(z) - z D_{-iν}(z) - iν D_{-iν-1}(z) = 0,
/// normalised by the largest term.
pub fn recurrence_residual(nu: Complex64, z: Complex64) -> Result<f64> {
    let a = Complex64::new(0.0, -1.0) * nu;
    let up = pcf(a + 1.0, z)?.value;
    let (d, dm) = pcf_pair(nu, z)?;
    let t1 = up;
    let t2 = -(d.value * z);
    let t3 = -(dm.value * (Complex64::i() * nu));
    let shift = t1.ln_abs().max(t2.ln_abs()).max(t3.ln_abs());
    let s = t1.to_c64_shifted(shift) + t2.to_c64_shifted(shift) + t3.to_c64_shifted(shift);
    Ok(s.norm())
}

/// Relative residual of
/// D_{-iν}(z) D_{iν}(iz) - ν D_{-iν-1}(z) D_{iν-1}(iz) = e^{-πν/2},
/// normalised by the largest of the three terms.
pub fn identity_residual(nu: Complex64, z: Complex64) -> Result<f64> {
    let i = Complex64::i();
    let (d, dm) = pcf_pair(nu, z)?;
    let e = pcf(i * nu, i * z)?.value;
    let em = pcf(i * nu - 1.0, i * z)?.value;
    let p1 = d.value * e;
    let p2 = -(dm.value * em * nu);
    let rhs = Scaled::exp(-PI * nu / 2.0);
    let shift = p1.ln_abs().max(p2.ln_abs()).max(rhs.ln_abs());
    let r = p1.to_c64_shifted(shift) + p2.to_c64_shifted(shift) - rhs.to_c64_shifted(shift);
    Ok(r.norm())
}

/// Wronskian residuals (computed − closed form), normalised by
/// max(|closed form|, |largest product|):
/// W{D_{-iν}(z), D_{-iν}(-z)} = √(2π)/Γ(iν) and
/// W{D_{-iν}(z), D_{iν-1}(iz)} = -i e^{-πν/2}.
pub fn wronskian_check(nu: Complex64, z: Complex64) -> Result<(Complex64, Complex64)> {
    let i = Complex64::i();
    let a = -i * nu;
    let f = pcf(a, z)?;
    let g = pcf(a, -z)?;
    // d/dz D(-z) = -D'(-z)
    let p1 = f.value * (-g.deriv);
    let p2 = -(g.value * f.deriv);
    let c1 = rgamma(i * nu) * Complex64::new(SQRT_2PI, 0.0);
    let shift = p1.ln_abs().max(p2.ln_abs()).max(c1.ln_abs());
    let r1 = p1.to_c64_shifted(shift) + p2.to_c64_shifted(shift) - c1.to_c64_shifted(shift);

    let h = pcf(i * nu - 1.0, i * z)?;
    // d/dz D(iz) = i D'(iz)
    let q1 = f.value * h.deriv * i;
    let q2 = -(h.value * f.deriv);
    let c2 = Scaled::exp(-PI * nu / 2.0) * (-i);
    let shift = q1.ln_abs().max(q2.ln_abs()).max(c2.ln_abs());
    let r2 = q1.to_c64_shifted(shift) + q2.to_c64_shifted(shift) - c2.to_c64_shifted(shift);
    Ok((r1, r2))
}

/// Fitted constant of the large-order deviation: |rel dev| ≲ C/|ν|.
pub const LARGE_ORDER_C: f64 = 0.2;

/// Leading large-order approximation of (D_{-iν}(z), D_{-iν-1}(z)).
pub fn pcf_large_order_pair(nu: Complex64, z: Complex64) -> Result<(WeberEval, WeberEval)> {
    if nu.norm() < 25.0 {
        return Err(NhqaError::Domain(format!("|ν| = {} < 25; use pcf", nu.norm())));
    }
    if z.arg().abs() >= FRAC_PI_2 {
        return Err(NhqaError::Domain("|arg z| ≥ π/2; use pcf".into()));
    }
    let i = Complex64::i();
    let rot = Complex64::from_polar(1.0, -FRAC_PI_4);
    let r = (4.0 * nu - i * z * z).sqrt();
    let eta = -nu / 2.0 + nu * ((z * rot + r) / 2.0).ln() + z * rot / 4.0 * r;
    let ct = z / (z * z + 4.0 * i * nu).sqrt();
    let c2 = ((1.0 + ct) / 2.0).sqrt();
    let s2 = ((1.0 - ct) / 2.0).sqrt();
    let e = Scaled::exp(PI * nu / 4.0 - i * eta);
    let rel = LARGE_ORDER_C / nu.norm();
    let d = e * c2;
    let dm = e * (s2 / (i * nu).sqrt());
    let zero = Scaled::ZERO;
    Ok((
        WeberEval::new(d, zero, rel, Method::AsymptLargeOrder, Sector::Principal),
        WeberEval::new(dm, zero, rel, Method::AsymptLargeOrder, Sector::Principal),
    ))
}

/// Leading large-order approximation of D_{-iν}(z).
pub fn pcf_large_order(nu: Complex64, z: Complex64) -> Result<WeberEval> {
    Ok(pcf_large_order_pair(nu, z)?.0)
}

#[cfg(test)]
mod tests;
