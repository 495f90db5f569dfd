//! Chain-level observables built from per-mode ground-state probabilities.

use crate::error::{NhqaError, Result};
use crate::lz::{adiabatic_projection, lz_context, prob_ground, prob_longwave_asympt};
use crate::model::{ChainParams, ModeContext};
use crate::tdse::{self, Initial, IntegratorConfig};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// ζ(1/2 − k), k = 0, 1, ... (mpmath, 17 digits).
const ZETA_HALF_MINUS_K: [f64; 24] = [
    -1.460_354_508_809_586_8,
    -0.207_886_224_977_354_57,
    -0.025_485_201_889_833_036,
    0.008_516_928_777_850_330_5,
    0.004_441_011_335_479_432,
    -0.003_091_669_247_215_833_8,
    -0.002_671_458_019_899_224_6,
    0.002_746_767_939_536_868_8,
    0.003_269_039_572_600_22,
    -0.004_416_032_873_004_889_8,
    -0.006_672_172_296_466_640_8,
    0.011_146_122_473_942_814,
    0.020_396_978_715_942_792,
    -0.040_574_967_481_194_578,
    -0.087_175_255_906_217_251,
    0.201_174_049_384_226_88,
    0.496_271_219_912_057_61,
    -1.303_229_250_705_114,
    -3.629_759_299_774_574_1,
    10.687_327_069_021_994,
    33.168_325_785_694_608,
    -108.217_475_058_776_06,
    -370.301_878_375_478_6,
    1326.045_811_749_015_6,
];

const LN_FLOOR: f64 = -745.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Numerical integration from (u, v) = (1, 0).
    Tdse,
    /// Numerical integration from the ground eigenvector at t = 0.
    TdseGround,
    /// Full parabolic-cylinder solution from (1, 0).
    LzExact,
    /// B-only parabolic-cylinder solution.
    LzGround,
    /// Long-wavelength closed form for φ ≤ π/2, 1 beyond.
    Asympt,
}

impl Engine {
    pub const ALL: [Engine; 5] = [Engine::Tdse, Engine::TdseGround, Engine::LzExact, Engine::LzGround, Engine::Asympt];

    pub fn name(&self) -> &'static str {
        match self {
            Engine::Tdse => "tdse",
            Engine::TdseGround => "tdse-ground",
            Engine::LzExact => "lz-exact",
            Engine::LzGround => "lz-ground",
            Engine::Asympt => "asympt",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = NhqaError;
    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s)
            .ok_or_else(|| NhqaError::Param(format!("unknown engine '{s}'")))
    }
}

/// P^gs_k(τ) of one mode.
pub fn mode_pgs(p: usize, params: &ChainParams, engine: Engine, config: &IntegratorConfig) -> Result<f64> {
    if params.g == 0.0 && params.delta == 0.0 {
        // the initial ground state of a static Hamiltonian
        return Ok(1.0);
    }
    let mode = ModeContext::new(p, params)?;
    let at_end = |a| -> Result<f64> {
        let (al, be) = adiabatic_projection(mode.phi, params.tau, params, &a)?;
        prob_ground(al, be)
    };
    match engine {
        Engine::Tdse => at_end(tdse::final_state(&mode, params, config, Initial::Diabatic)?),
        Engine::TdseGround => at_end(tdse::final_state(&mode, params, config, Initial::Ground)?),
        Engine::LzExact => at_end(lz_context(&mode, params)?.exact_amplitudes(params.tau)?.0),
        Engine::LzGround => at_end(lz_context(&mode, params)?.ground_amplitudes(params.tau)?.0),
        Engine::Asympt => Ok(if mode.phi <= PI / 2.0 { prob_longwave_asympt(mode.phi, params).p } else { 1.0 }),
    }
}

/// P^gs_k(τ) for p = 1..=count, in ascending p; failures are aggregated.
pub fn per_mode_pgs_first(params: &ChainParams, engine: Engine, config: &IntegratorConfig, count: usize) -> Result<Vec<f64>> {
    if !(params.g == 0.0 && params.delta == 0.0) {
        params.validate()?;
    }
    let count = count.min(params.modes());
    let res: Vec<Result<f64>> = (1..=count).into_par_iter().map(|p| mode_pgs(p, params, engine, config)).collect();
    let failed: Vec<String> = res
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().err().map(|e| format!("p={}: {e}", i + 1)))
        .collect();
    if !failed.is_empty() {
        return Err(NhqaError::Modes { count: failed.len(), detail: failed.join("; ") });
    }
    Ok(res.into_iter().map(|r| r.unwrap()).collect())
}

pub fn per_mode_pgs(params: &ChainParams, engine: Engine, config: &IntegratorConfig) -> Result<Vec<f64>> {
    per_mode_pgs_first(params, engine, config, params.modes())
}

/// Kink count 2Σ_{k>0}(1 − P^gs_k): each k > 0 stands for the pair ±k.
pub fn kink_count(per_mode_pgs: &[f64]) -> f64 {
    2.0 * per_mode_pgs.iter().map(|p| 1.0 - p).sum::<f64>()
}

pub fn kink_density_exact(params: &ChainParams, engine: Engine, config: &IntegratorConfig) -> Result<f64> {
    Ok(kink_count(&per_mode_pgs(params, engine, config)?) / params.n as f64)
}

/// n₀ = (1/2π)√(g/(Jτ)).
pub fn kink_density_hermitian(params: &ChainParams) -> f64 {
    (params.g / (params.j * params.tau)).sqrt() / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkAsympt {
    pub n: f64,
    /// √(2Jτ/g) ≫ 1, taken as ≥ 5.
    pub valid: bool,
}

/// n = n₀ e^{−r} Φ(1 − e^{−r}, 1/2, 1) with r = 2δτJ/g².
pub fn kink_density_asympt(params: &ChainParams) -> Result<KinkAsympt> {
    params.validate()?;
    let r = 2.0 * params.delta * params.tau * params.j / (params.g * params.g);
    let phi = lerch_phi_half(-(-r).exp_m1())?;
    let valid = (2.0 * params.j * params.tau / params.g).sqrt() >= 5.0;
    Ok(KinkAsympt { n: kink_density_hermitian(params) * (-r).exp() * phi, valid })
}

/// Φ(x, 1/2, 1) = Σ_{n≥0} xⁿ/√(n+1) for 0 ≤ x < 1.
pub fn lerch_phi_half(x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(NhqaError::Domain(format!("Lerch Φ(x, 1/2, 1) needs 0 <= x < 1, got {x}")));
    }
    if x > 0.99 {
        Ok(lerch_phi_half_log_series(x))
    } else {
        Ok(lerch_phi_half_direct(x))
    }
}

/// Direct power series, summed until the tail bound x^n/((1−x)√(n+1)) < 1e-13.
pub fn lerch_phi_half_direct(x: f64) -> f64 {
    let mut s = 0.0;
    let mut xn = 1.0;
    let mut n = 0u64;
    loop {
        let t = xn / ((n + 1) as f64).sqrt();
        s += t;
        if t / (1.0 - x) < 1e-13 || xn == 0.0 {
            return s;
        }
        xn *= x;
        n += 1;
    }
}

/// Expansion in μ = ln x: Φ = (1/x)[√π(−μ)^{−1/2} + Σ_k ζ(1/2 − k)μ^k/k!],
/// convergent for |μ| < 2π.
pub fn lerch_phi_half_log_series(x: f64) -> f64 {
    let mu = x.ln();
    let mut s = PI.sqrt() / (-mu).sqrt();
    let mut term = 1.0;
    for (k, z) in ZETA_HALF_MINUS_K.iter().enumerate() {
        if k > 0 {
            term *= mu / k as f64;
        }
        s += z * term;
    }
    s / x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgsTotal {
    pub value: f64,
    pub ln_value: f64,
    /// First mode (1-based p) whose probability is exactly zero.
    pub killing_mode: Option<usize>,
}

/// Π_k P^gs_k summed in log space, floored at e^{−745}.
pub fn pgs_total(per_mode_pgs: &[f64]) -> Result<PgsTotal> {
    let mut ln = 0.0;
    for (i, &p) in per_mode_pgs.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(NhqaError::Domain(format!("P^gs of mode p={} is {p}, outside [0, 1]", i + 1)));
        }
        if p == 0.0 {
            return Ok(PgsTotal { value: 0.0, ln_value: f64::NEG_INFINITY, killing_mode: Some(i + 1) });
        }
        ln += p.ln();
    }
    let ln = ln.max(LN_FLOOR);
    Ok(PgsTotal { value: ln.exp(), ln_value: ln, killing_mode: None })
}

/// First-mode estimate with Re ν = τ/τ₀ and Re z²(τ) = 2δJτ/g².
pub fn pgs_first_mode(params: &ChainParams) -> f64 {
    let x = 2.0 * PI * params.tau / params.tau0();
    let num = -(-x).exp_m1();
    if params.delta == 0.0 {
        return num;
    }
    let r = 2.0 * params.delta * params.j * params.tau / (params.g * params.g);
    num / (num + (-x - r).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealTime {
    pub tau: f64,
    /// (g²/2Jδ) ln(N/π), δ > 0 only.
    pub estimate: Option<f64>,
}

/// (g²/2Jδ) ln(N/π).
pub fn anneal_time_estimate(params: &ChainParams) -> Option<f64> {
    (params.delta > 0.0)
        .then(|| params.g * params.g / (2.0 * params.j * params.delta) * (params.n as f64 / PI).ln())
}

/// τ with pgs_first_mode(τ) = target; `params.tau` is ignored.
pub fn anneal_time(params: &ChainParams, target: f64) -> Result<AnnealTime> {
    if !(target > 0.0 && target < 1.0) {
        return Err(NhqaError::Param(format!("target probability must lie in (0, 1), got {target}")));
    }
    let p = ChainParams { tau: 1.0, ..*params };
    p.validate()?;
    let estimate = anneal_time_estimate(&p);
    if p.delta == 0.0 {
        return Ok(AnnealTime { tau: -p.tau0() / (2.0 * PI) * (-target).ln_1p(), estimate });
    }
    let f = |tau: f64| pgs_first_mode(&ChainParams { tau, ..p }) - target;
    let (lo_lim, hi_lim) = (1.0, 1e12);
    let mut lo = (p.g / p.j).clamp(lo_lim, hi_lim);
    if f(lo) > 0.0 {
        lo = lo_lim;
        if f(lo) > 0.0 {
            return Err(NhqaError::NoBracket { lo: lo_lim, hi: hi_lim });
        }
    }
    let mut hi = lo;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 10.0;
        if hi > hi_lim {
            return Err(NhqaError::NoBracket { lo: lo_lim, hi: hi_lim });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= 1e-9 && (hi - lo) <= 1e-12 * hi {
            return Ok(AnnealTime { tau: mid, estimate });
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    if f(mid).abs() > 1e-9 {
        return Err(NhqaError::Param(format!("anneal time bisection stalled at τ = {mid}")));
    }
    Ok(AnnealTime { tau: mid, estimate })
}

/// m_z = √(1 − 2n).
pub fn magnetization(n: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&n) {
        return Err(NhqaError::Domain(format!("magnetization needs 0 <= n <= 1/2, got {n}")));
    }
    Ok((1.0 - 2.0 * n).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealResult {
    pub per_mode_pgs: Vec<f64>,
    pub kink_count: f64,
    pub kink_density: f64,
    pub residual_energy: f64,
    /// `None` when the kink density exceeds 1/2.
    pub magnetization: Option<f64>,
    pub pgs_total: f64,
    pub tau0: f64,
}

pub fn anneal(params: &ChainParams, engine: Engine, config: &IntegratorConfig) -> Result<AnnealResult> {
    let per_mode_pgs = per_mode_pgs(params, engine, config)?;
    let kink_count = kink_count(&per_mode_pgs);
    let kink_density = kink_count / params.n as f64;
    let pgs_total = pgs_total(&per_mode_pgs)?.value;
    Ok(AnnealResult {
        kink_count,
        kink_density,
        residual_energy: params.j * kink_count,
        magnetization: magnetization(kink_density).ok(),
        pgs_total,
        tau0: params.tau0(),
        per_mode_pgs,
    })
}
