//! Complex numbers with a detached real exponent, `m * exp(e)`.
//!
//! Weber functions at |z| ~ 100 carry factors like exp(±z²/4) that leave the
//! f64 range long before the physically meaningful ratios do.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub m: Complex64,
    pub e: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { m: Complex64 { re: 0.0, im: 0.0 }, e: 0.0 };
    pub const ONE: Scaled = Scaled { m: Complex64 { re: 1.0, im: 0.0 }, e: 0.0 };

    pub fn new(m: Complex64, e: f64) -> Self {
        Scaled { m, e }.normalized()
    }

    pub fn from_c64(z: Complex64) -> Self {
        Scaled { m: z, e: 0.0 }.normalized()
    }

    /// exp(w) for complex w, without overflow.
    pub fn exp(w: Complex64) -> Self {
        Scaled { m: Complex64::from_polar(1.0, w.im), e: w.re }
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.m.re.is_finite() && self.m.im.is_finite() && self.e.is_finite()
    }

    fn normalized(self) -> Self {
        let a = self.m.norm();
        if a == 0.0 || !a.is_finite() {
            return if a == 0.0 { Scaled::ZERO } else { self };
        }
        let l = a.ln();
        Scaled { m: self.m / a, e: self.e + l }
    }

    /// ln|x|; -inf for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.m.norm().ln() + self.e
        }
    }

    pub fn abs(&self) -> f64 {
        self.ln_abs().exp()
    }

    /// Plain complex value; may overflow to inf or underflow to 0.
    pub fn to_c64(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.m * self.e.exp()
    }

    /// Value multiplied by exp(-shift).
    pub fn to_c64_shifted(&self, shift: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.m * (self.e - shift).exp()
    }

    pub fn conj(&self) -> Self {
        Scaled { m: self.m.conj(), e: self.e }
    }

    pub fn scale_c(&self, c: Complex64) -> Self {
        Scaled { m: self.m * c, e: self.e }.normalized()
    }

    pub fn recip(&self) -> Self {
        Scaled { m: self.m.inv(), e: -self.e }.normalized()
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, o: Scaled) -> Scaled {
        Scaled { m: self.m * o.m, e: self.e + o.e }.normalized()
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, o: Scaled) -> Scaled {
        Scaled { m: self.m / o.m, e: self.e - o.e }.normalized()
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, o: Scaled) -> Scaled {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = small.e - big.e;
        let m = if d < -800.0 { big.m } else { big.m + small.m * d.exp() };
        Scaled { m, e: big.e }.normalized()
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled { m: -self.m, e: self.e }
    }
}

impl Sub for Scaled {
    type Output = Scaled;
    fn sub(self, o: Scaled) -> Scaled {
        self + (-o)
    }
}

impl Mul<Complex64> for Scaled {
    type Output = Scaled;
    fn mul(self, c: Complex64) -> Scaled {
        self.scale_c(c)
    }
}
