//! Large-argument expansion of D_a(w) and its connection to the other sectors.

use super::Sector;
use crate::gamma::rgamma;
use crate::scaled::Scaled;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

const EPS: f64 = f64::EPSILON;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
// ln(1e-17)
const STOKES_MARGIN: f64 = -39.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Local {
    pub d: Scaled,
    pub dp: Scaled,
    pub rel_err: f64,
    /// Truncation and cancellation part only, without the exponent rounding.
    pub series_err: f64,
}

/// Direct expansion D_a(w) ~ w^a e^{-w²/4} Σ_s (-1)^s (-a)_{2s} / (s! (2w²)^s).
/// `None` when |arg w| > π/2, when the Stokes-switched term could matter, or
/// when the series does not reach round-off.
pub(crate) fn direct(a: Complex64, w: Complex64) -> Option<Local> {
    let arg = w.arg();
    if arg.abs() > FRAC_PI_2 + 1e-12 || w.norm() < 1.0 {
        return None;
    }
    let lnw = w.ln();
    let w2 = w * w;
    let rg = rgamma(-a);
    if !rg.is_zero() {
        let ln_t = SQRT_2PI.ln() + rg.ln_abs() + ((-2.0 * a - 1.0) * lnw).re + w2.re / 2.0;
        let sigma = w.norm() * (FRAC_PI_2 - arg.abs()).max(0.0);
        if ln_t - sigma * sigma > STOKES_MARGIN {
            return None;
        }
    }

    let one = Complex64::new(1.0, 0.0);
    let mut s_sum = one;
    let mut ds_sum = Complex64::new(0.0, 0.0);
    let mut t = one;
    let mut max_t: f64 = 1.0;
    let mut converged = false;
    let mut last = 1.0;
    let winv = w.inv();
    for s in 1..400 {
        let sf = s as f64;
        t *= -(a - (2.0 * sf - 2.0)) * (a - (2.0 * sf - 1.0)) / (2.0 * sf * w2);
        if !t.re.is_finite() || !t.im.is_finite() {
            return None;
        }
        s_sum += t;
        ds_sum += t * (-2.0 * sf) * winv;
        let at = t.norm();
        max_t = max_t.max(at);
        last = at;
        let scale = s_sum.norm().max(ds_sum.norm() * w.norm());
        if at * (1.0 + 2.0 * sf) < 1e-17 * scale {
            converged = true;
            break;
        }
    }
    if !converged || s_sum.norm() == 0.0 {
        return None;
    }
    let p = a * lnw - w2 / 4.0;
    let pre = Scaled::exp(p);
    let d = pre * s_sum;
    let dp = pre * ((a * winv - w / 2.0) * s_sum + ds_sum);
    let series_err = 8.0 * EPS * max_t / s_sum.norm() + last / s_sum.norm();
    let rel_err = series_err + 4.0 * EPS * p.norm();
    Some(Local { d, dp, rel_err, series_err })
}

/// D_a(w) for large |w| in any sector: the direct expansion in the principal
/// sector, otherwise the exact connection to D_a(-w) and D_{-a-1}(∓iw).
pub(crate) fn large_arg(a: Complex64, w: Complex64) -> Option<(Local, Sector)> {
    if let Some(v) = direct(a, w) {
        return Some((v, Sector::Principal));
    }
    let i = Complex64::i();
    let upper = w.arg() >= 0.0;
    let (sg, sector) = if upper { (1.0, Sector::UpperConnection) } else { (-1.0, Sector::LowerConnection) };
    // D_a(w) = e^{±iπa} D_a(-w) + √(2π)/Γ(-a) e^{±iπ(a+1)/2} D_{-a-1}(∓iw)
    let first = direct(a, -w)?;
    let c1 = Scaled::exp(sg * i * PI * a);
    let rg = rgamma(-a);
    let p1 = c1 * first.d;
    let mut pieces = vec![(p1.ln_abs(), first.rel_err, first.series_err)];
    let mut d = p1;
    let mut dp = -(c1 * first.dp);
    if !rg.is_zero() {
        let v = -sg * i * w;
        let second = direct(-a - 1.0, v)?;
        let c2 = rg * Scaled::exp(sg * i * PI * (a + 1.0) / 2.0) * Complex64::new(SQRT_2PI, 0.0);
        let t = c2 * second.d;
        pieces.push((t.ln_abs(), second.rel_err, second.series_err));
        d = d + t;
        dp = dp + (c2 * second.dp) * (-sg * i);
    }
    if d.is_zero() {
        return None;
    }
    let ld = d.ln_abs();
    let rel_err = pieces.iter().map(|(l, e, _)| (l - ld).exp() * (e + 4.0 * EPS)).sum();
    let series_err = pieces.iter().map(|(l, _, e)| (l - ld).exp() * (e + 4.0 * EPS)).sum();
    Some((Local { d, dp, rel_err, series_err }, sector))
}
