use super::*;
use std::f64::consts::PI;

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// (a, z, ln|D_a(z)|, arg D_a(z)) from mpmath.pcfd at 300 digits
const REF: &[(Complex64, Complex64, f64, f64)] = &[
    (c(0.0, 0.0), c(2.0, 0.0), -1.0, 0.0),
    (c(0.0, -0.7), c(0.9192388155425119, 0.9192388155425119), 0.45361937557904114, -0.7392043685478918),
    (c(0.0, -1.0), c(0.5, 0.0), 0.21779203973499614, 0.015799968017173774),
    (c(-1.0, -1.0), c(0.5, 0.0), -0.05372460126626015, -0.3455337015690382),
    (c(0.0, -25.0), c(3.0, 1.0), 12.08712830184068, 2.0027871298658284),
    (c(0.0, -25.0), c(-7.0, 2.0), 51.03395669918137, -0.37089395559074545),
    (c(0.0, -25.0), c(0.0, 12.0), 73.16478006654289, 0.43849611284654294),
    (c(-1.0, -25.0), c(-16.022872310938673, -11.96944288207913), 49.762064568769134, 2.138992722739075),
    (c(-0.62422, -12.4845), c(22.945265618534652, 19.326530617130732), -31.62729192304646, -0.8178330398381897),
    (c(-1.62422, -12.4845), c(22.945265618534652, 19.326530617130732), -35.042179084237794, -1.518403120222819),
    (c(0.62422, 12.4845), c(-19.326530617130732, 22.945265618534652), 12.003348139440606, 1.796790145024494),
    (c(-0.37578, 12.4845), c(19.326530617130732, -22.945265618534652), 47.81001922573876, 0.7038938340765842),
    (c(0.0, -5.0), c(72.45616499893843, 68.92099936627883), -121.14611932140775, -0.3454540556462783),
    (c(-1.0, 5.0), c(-68.92099936627883, 72.45616499893843), 108.68597469815322, -1.9858899929621505),
    (c(0.0, 5.0), c(68.92099936627883, -72.45616499893843), 128.99960220124925, 0.3454291283245353),
    (c(-1.0, -5.0), c(-72.45616499893843, -68.92099936627883), 128.1948832450322, 2.812715860889197),
    (c(0.0, -50.0), c(-3.3291746923771393, 7.274379414605454), 90.70790416333752, -1.5637258524650037),
    (c(-1.0, 50.0), c(3.2612197902900624, -8.388351773705036), 66.10417751368688, 1.52677871337014),
    (c(2.5, -3.0), c(6.0, -6.0), 2.9020238105760376, -2.9080826458821707),
    (c(0.3, 0.1), c(1.0, -1.7320508075688772), 0.8012421180064168, 0.6464365911353799),
    (c(0.0, -12.0), c(37.29659809623987, -46.999614577649005), 193.67894740104123, -2.029806212151253),
    (c(-1.0, 12.0), c(-43.69311743173157, 10.766219814629208), 462.96953205387376, 1.592263451619334),
];

fn ln_dev(v: &Scaled, lnabs: f64, arg: f64) -> f64 {
    let dl = v.ln_abs() - lnabs;
    let mut da = v.m.arg() - arg;
    while da > PI {
        da -= 2.0 * PI;
    }
    while da < -PI {
        da += 2.0 * PI;
    }
    (dl * dl + da * da).sqrt()
}

#[test]
fn matches_high_precision_reference() {
    for &(a, z, l, ph) in REF {
        let r = pcf(a, z).unwrap();
        let dev = ln_dev(&r.value, l, ph);
        assert!(dev < 1e-10, "a={a} z={z}: dev {dev:e} est {:e} {:?}", r.rel_err_est, r.method);
        assert!(r.rel_err_est < 1e-9, "a={a} z={z}: est {:e}", r.rel_err_est);
    }
}

#[test]
fn error_estimate_bounds_actual_error() {
    for &(a, z, l, ph) in REF {
        let r = pcf(a, z).unwrap();
        let dev = ln_dev(&r.value, l, ph);
        assert!(dev <= 10.0 * r.rel_err_est + 1e-13, "a={a} z={z}: dev {dev:e} est {:e}", r.rel_err_est);
    }
}

#[test]
fn order_zero_is_gaussian() {
    for &z in &[c(2.0, 0.0), c(0.3, -4.0), c(-9.0, 7.0), c(25.0, 25.0), c(-3.0, -60.0), c(0.0, 0.0)] {
        let r = pcf(c(0.0, 0.0), z).unwrap();
        let want = Scaled::exp(-z * z / 4.0);
        let d = (r.value / want).to_c64() - 1.0;
        assert!(d.norm() < 1e-12, "z={z}: {d}");
    }
    let r = pcf(c(0.0, 0.0), c(2.0, 0.0)).unwrap();
    assert!((r.c64() - c((-1.0f64).exp(), 0.0)).norm() < 1e-15);
}

#[test]
fn origin_value() {
    let r = pcf(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    assert!((r.c64() - 1.0).norm() < 1e-15);
    assert_eq!(r.method, Method::Series);
}

#[test]
fn pair_at_zero_order_and_recurrence() {
    let z = c(1.1, -0.4);
    let (d, dm) = pcf_pair(c(0.0, 0.0), z).unwrap();
    assert!(((d.value / Scaled::exp(-z * z / 4.0)).to_c64() - 1.0).norm() < 1e-13);
    // D_{-1}(z) = e^{z²/4} √(π/2) erfc(z/√2); compare against the continuation oracle only
    assert!(dm.rel_err_est < 1e-12);
    assert!(recurrence_residual(c(0.0, 0.0), z).unwrap() < 1e-13);
}

#[test]
fn wronskians_small_order() {
    let (r1, r2) = wronskian_check(c(1.0, 0.0), c(0.5, 0.0)).unwrap();
    assert!(r1.norm() < 1e-9 && r2.norm() < 1e-9, "{r1} {r2}");
    let (r1, r2) = wronskian_check(c(0.3, 0.1), Complex64::from_polar(2.0, -PI / 3.0)).unwrap();
    assert!(r1.norm() < 1e-9 && r2.norm() < 1e-9, "{r1} {r2}");
    let (r1, _) = wronskian_check(c(1e-12, 0.0), c(0.7, 0.2)).unwrap();
    assert!(r1.norm() < 1e-9);
}

#[test]
fn identities_across_sectors() {
    for &nu in &[c(0.5, 0.0), c(3.0, -0.2), c(12.4845, -0.62422), c(25.0, 0.0)] {
        for k in 0..8 {
            let z = Complex64::from_polar(6.5, -PI + 2.0 * PI * (k as f64 + 0.3) / 8.0);
            assert!(identity_residual(nu, z).unwrap() < 1e-10, "nu={nu} z={z}");
            assert!(recurrence_residual(nu, z).unwrap() < 1e-9, "nu={nu} z={z}");
        }
    }
}

#[test]
fn continuation_agrees_with_adaptive_ode() {
    use ode_solvers::{Dopri5, OutputType, System, Vector4};
    // straight segment 0 -> z1, parametrised by s in [0,1]
    struct Weber {
        a: Complex64,
        z1: Complex64,
    }
    impl System<f64, Vector4<f64>> for Weber {
        fn system(&self, s: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
            let z = self.z1 * s;
            let f = c(y[0], y[1]);
            let g = c(y[2], y[3]);
            let q = z * z / 4.0 - self.a - 0.5;
            let df = g * self.z1;
            let dg = q * f * self.z1;
            dy[0] = df.re;
            dy[1] = df.im;
            dy[2] = dg.re;
            dy[3] = dg.im;
        }
    }
    let a = c(0.0, -0.7);
    let z1 = Complex64::from_polar(1.3, PI / 4.0);
    let (d0, dp0) = origin_values(a);
    let (d0, dp0) = (d0.to_c64(), dp0.to_c64());
    let y0 = Vector4::new(d0.re, d0.im, dp0.re, dp0.im);
    let mut st = Dopri5::from_param(
        Weber { a, z1 }, 0.0, 1.0, 1.0, y0, 1e-13, 1e-13, 0.9, 0.04, 0.2, 10.0, 0.01, 0.0, 1_000_000,
        1000, OutputType::Sparse,
    );
    st.integrate().unwrap();
    let y = st.results().get().1.last().unwrap();
    let oracle = c(y[0], y[1]);
    let r = pcf(a, z1).unwrap().c64();
    assert!((r - oracle).norm() / oracle.norm() < 1e-10);
}

#[test]
fn large_order_deviation_scales_inversely() {
    let z = c(1.0, 0.0);
    let dev = |nu: f64| {
        let n = c(nu, 0.0);
        let lo = pcf_large_order(n, z).unwrap().value;
        let ex = pcf(c(0.0, -nu), z).unwrap().value;
        ((lo / ex).to_c64() - 1.0).norm()
    };
    let d100 = dev(100.0);
    let d400 = dev(400.0);
    assert!(d100 < 0.1 && d100 > 1e-5, "{d100}");
    assert!(d400 < 0.55 * d100, "{d100} {d400}");
    assert!(d100 < LARGE_ORDER_C / 100.0);
    assert!(pcf_large_order(c(10.0, 0.0), z).is_err());
    assert!(pcf_large_order(c(100.0, 0.0), c(-1.0, 0.1)).is_err());
}

#[test]
fn large_order_pair_ratio() {
    for &(nu, x) in &[(30.0, 0.7), (100.0, 2.0), (250.0, 5.0)] {
        let n = c(nu, 0.0);
        let z = c(x, 0.0);
        let (p, q) = pcf_large_order_pair(n, z).unwrap();
        let ct = z / (z * z + 4.0 * Complex64::i() * n).sqrt();
        let half = ct.acos() / 2.0;
        let want = (half.cos() / half.sin() * (Complex64::i() * n).sqrt()).norm();
        let got = (p.value / q.value).abs();
        assert!((got / want - 1.0).abs() < 1e-12);
    }
}

#[test]
fn identities_on_order_argument_grid() {
    let mut bad = Vec::new();
    for i in 0..20 {
        let nu = Complex64::from_polar(0.5 + 49.5 * i as f64 / 19.0, -0.3 + 0.6 * ((i * 7 % 20) as f64) / 19.0);
        for j in 0..20 {
            let r = 0.5 + 9.5 * ((j * 3 % 20) as f64) / 19.0;
            let z = Complex64::from_polar(r, -PI + 2.0 * PI * (j as f64 + 0.5) / 20.0);
            let id = identity_residual(nu, z).unwrap();
            let rec = recurrence_residual(nu, z).unwrap();
            if id > 1e-10 || rec > 1e-9 {
                bad.push((nu, z, id, rec));
            }
        }
    }
    assert!(bad.is_empty(), "{bad:?}");
}
