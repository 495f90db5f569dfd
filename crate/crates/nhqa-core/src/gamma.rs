//! Complex log-gamma in a form that never overflows.

use crate::scaled::Scaled;
use num_complex::Complex64;
use std::f64::consts::PI;

const LN_2PI_HALF: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k-1)), k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// ln sin(pi z), any branch, stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let w = Complex64::new(z.re - n, z.im);
    let i = Complex64::i();
    // sin(pi z) = (-1)^n sin(pi w)
    let sign = Complex64::new(0.0, PI * n);
    let base = if w.im > 1.0 {
        // sin(pi w) = -e^{-i pi w}(1 - e^{2 i pi w}) / (2i)
        -i * PI * w + (Complex64::new(1.0, 0.0) - (2.0 * i * PI * w).exp()).ln()
            + Complex64::new(0.0, 0.5).ln()
    } else if w.im < -1.0 {
        // sin(pi w) = e^{i pi w}(1 - e^{-2 i pi w}) / (2i)
        i * PI * w + (Complex64::new(1.0, 0.0) - (-2.0 * i * PI * w).exp()).ln()
            + Complex64::new(0.0, -0.5).ln()
    } else {
        (PI * w).sin().ln()
    };
    base + sign
}

fn stirling(z: Complex64) -> Complex64 {
    let mut s = (z - 0.5) * z.ln() - z + LN_2PI_HALF;
    let zi = z.inv();
    let z2 = zi * zi;
    let mut p = zi;
    for c in STIRLING {
        s += p * c;
        p *= z2;
    }
    s
}

/// ln Γ(z) modulo 2πi. Poles return +inf real part.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        let one = Complex64::new(1.0, 0.0);
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(one - z);
    }
    if z.norm() < 15.0 {
        return lanczos(z);
    }
    stirling(z)
}

// g = 7, n = 9
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos(z: Complex64) -> Complex64 {
    let x = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += *c / (x + k as f64);
    }
    let t = x + 7.5;
    LN_2PI_HALF + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn gamma(z: Complex64) -> Scaled {
    Scaled::exp(ln_gamma(z))
}

/// 1/Γ(z), exactly zero at the poles.
pub fn rgamma(z: Complex64) -> Scaled {
    if is_pole(z) {
        Scaled::ZERO
    } else {
        Scaled::exp(-ln_gamma(z))
    }
}
