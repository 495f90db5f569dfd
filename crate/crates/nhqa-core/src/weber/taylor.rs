//! Taylor continuation of y'' = (z²/4 - a - 1/2) y along a polyline, with a
//! forward-error estimate from the backward products of the step transfer
//! matrices.

use crate::scaled::Scaled;
use num_complex::Complex64;

const EPS: f64 = f64::EPSILON;

type M2 = [[Complex64; 2]; 2];

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn mat_mul(x: &M2, y: &M2) -> M2 {
    let mut r = [[czero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    r
}

fn mat_norm(x: &M2) -> f64 {
    (x[0][0].norm() + x[0][1].norm()).max(x[1][0].norm() + x[1][1].norm())
}

fn vnorm(v: &[Complex64; 2]) -> f64 {
    v[0].norm().max(v[1].norm())
}

/// Local exponential rate scale, used for step control and derivative weighting.
pub(crate) fn rate(a: Complex64, c: Complex64) -> f64 {
    c.norm() / 2.0 + (a + 0.5).norm().sqrt() + 1.0
}

pub(crate) fn step_len(a: Complex64, c: Complex64) -> f64 {
    2.5 / rate(a, c)
}

struct Step {
    t: M2,
    abs_norm: f64,
}

/// Transfer matrix over one step in weighted variables (f, f'/rate).
fn step(a: Complex64, c: Complex64, h: Complex64) -> Step {
    let lc = rate(a, c);
    let ln = rate(a, c + h);
    let q0 = c * c / 4.0 - a - 0.5;
    let q1 = c / 2.0;
    let q2 = Complex64::new(0.25, 0.0);
    let h2 = h * h;
    let mut t = [[czero(); 2]; 2];
    let mut abs = [[0.0f64; 2]; 2];
    for col in 0..2 {
        let mut d: Vec<Complex64> = Vec::with_capacity(64);
        if col == 0 {
            d.push(Complex64::new(1.0, 0.0));
            d.push(czero());
        } else {
            d.push(czero());
            d.push(h * lc);
        }
        let mut f = d[0] + d[1];
        let mut fp = d[1];
        let mut af = d[0].norm() + d[1].norm();
        let mut afp = d[1].norm();
        let mut n = 0usize;
        loop {
            let dm1 = if n >= 1 { d[n - 1] } else { czero() };
            let dm2 = if n >= 2 { d[n - 2] } else { czero() };
            let next = h2 * (q0 * d[n] + q1 * h * dm1 + q2 * h2 * dm2)
                / (((n + 2) * (n + 1)) as f64);
            d.push(next);
            let k = n + 2;
            f += next;
            fp += next * (k as f64);
            af += next.norm();
            afp += next.norm() * k as f64;
            n += 1;
            if k >= 6 {
                let tail = d[k].norm() + d[k - 1].norm() + d[k - 2].norm();
                if tail * (k as f64) <= 1e-18 * af.max(afp).max(1e-300) {
                    break;
                }
            }
            if k > 400 {
                break;
            }
        }
        let hn = h.norm();
        t[0][col] = f;
        t[1][col] = fp / h / ln;
        abs[0][col] = af;
        abs[1][col] = afp / hn / ln;
    }
    let abs_norm = (abs[0][0] + abs[0][1]).max(abs[1][0] + abs[1][1]);
    Step { t, abs_norm }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PathResult {
    pub d: Scaled,
    pub dp: Scaled,
    pub rel_err: f64,
    pub steps: usize,
}

/// Expand a polyline into steps no longer than the local step length.
fn discretize(a: Complex64, pts: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let (mut c, end) = (w[0], w[1]);
        loop {
            let rem = end - c;
            let hmax = step_len(a, c).min(step_len(a, end));
            if rem.norm() <= hmax {
                if rem.norm() > 0.0 {
                    out.push(end);
                }
                break;
            }
            // split the remainder evenly to avoid a tiny final step
            let k = (rem.norm() / hmax).ceil();
            c += rem / k;
            out.push(c);
        }
    }
    out
}

/// Continue (D, D') given at `pts[0]` through `pts` and return the values at
/// the final point. `e0` is the relative error of the starting data.
pub(crate) fn continue_path(
    a: Complex64,
    pts: &[Complex64],
    d0: Scaled,
    dp0: Scaled,
    e0: f64,
) -> PathResult {
    let nodes = discretize(a, pts);
    let l0 = rate(a, nodes[0]);
    // common exponent for the state
    let base = if d0.is_zero() { dp0.e } else if dp0.is_zero() { d0.e } else { d0.e.max(dp0.e) };
    let mut y = [
        d0.to_c64_shifted(base),
        dp0.to_c64_shifted(base) / l0,
    ];
    let mut log_y = base;
    let mut steps: Vec<(M2, f64, f64)> = Vec::with_capacity(nodes.len());
    let mut ln_y_norms: Vec<f64> = Vec::with_capacity(nodes.len());
    ln_y_norms.push(vnorm(&y).ln() + log_y);
    for w in nodes.windows(2) {
        let s = step(a, w[0], w[1] - w[0]);
        let ny = [
            s.t[0][0] * y[0] + s.t[0][1] * y[1],
            s.t[1][0] * y[0] + s.t[1][1] * y[1],
        ];
        let tn = mat_norm(&s.t);
        let ynorm_before = ln_y_norms.last().copied().unwrap_or(0.0);
        let mut tm = s.t;
        for r in tm.iter_mut() {
            for x in r.iter_mut() {
                *x /= tn;
            }
        }
        steps.push((tm, tn.ln(), (4.0 * EPS * s.abs_norm).ln() + ynorm_before));
        let nn = vnorm(&ny);
        y = [ny[0] / nn, ny[1] / nn];
        log_y += nn.ln();
        ln_y_norms.push(log_y);
    }
    // backward accumulation of Q_j = T_{N-1} ... T_j
    let mut q: M2 = [[Complex64::new(1.0, 0.0), czero()], [czero(), Complex64::new(1.0, 0.0)]];
    let mut ln_q = 0.0;
    let mut terms: Vec<f64> = Vec::with_capacity(steps.len() + 1);
    for (tm, ln_tn, ln_local) in steps.iter().rev() {
        terms.push(ln_q + mat_norm(&q).ln() + ln_local);
        q = mat_mul(&q, tm);
        ln_q += ln_tn;
        let qn = mat_norm(&q);
        for r in q.iter_mut() {
            for x in r.iter_mut() {
                *x /= qn;
            }
        }
        ln_q += qn.ln();
    }
    terms.push(ln_q + mat_norm(&q).ln() + e0.max(EPS).ln() + ln_y_norms[0]);
    let mx = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_err = mx + terms.iter().map(|t| (t - mx).exp()).sum::<f64>().ln();

    let lend = rate(a, *nodes.last().unwrap());
    let d = Scaled::new(y[0], log_y);
    let dp = Scaled::new(y[1] * lend, log_y);
    let rel_err = if d.is_zero() { f64::INFINITY } else { (ln_err - d.ln_abs()).exp() };
    PathResult { d, dp, rel_err, steps: nodes.len() - 1 }
}
