//! Gamma, Mittag-Leffler and M-Wright functions.
//!
//! Everything here is a pure function of its arguments. The M-Wright density
//! is evaluated from its power series near the origin and from the mixture
//! representation of the mixing variable (see [`crate::grey_sampler`]) away
//! from it; the power series is numerically useless for large arguments.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_405_6;

/// Lanczos approximation, g = 607/128, 15 terms.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_091_82,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

/// Largest argument accepted by [`gamma`].
pub const GAMMA_MAX_ARG: f64 = 170.0;

/// Below this argument the M-Wright density is summed from its power series.
const M_WRIGHT_SERIES_CUTOFF: f64 = 1.0;

/// Series evaluation of E_β is abandoned once a single term exceeds this.
const ML_SERIES_MAX_TERM: f64 = 1e3;

/// Tail level at which M-Wright integrals over `[0, ∞)` are truncated.
pub const M_WRIGHT_TAIL_EPS: f64 = 1e-14;

/// The two ggBm parameters and the derived Hurst index `H = α/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct GreyParams {
    alpha: f64,
    beta: f64,
    hurst: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for GreyParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        GreyParams::new(raw.alpha, raw.beta)
    }
}

impl From<GreyParams> for RawParams {
    fn from(p: GreyParams) -> Self {
        RawParams {
            alpha: p.alpha,
            beta: p.beta,
        }
    }
}

impl GreyParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::domain("GreyParams", format!("alpha = {alpha} not in (0, 2)")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::domain("GreyParams", format!("beta = {beta} not in (0, 1]")));
        }
        Ok(Self {
            alpha,
            beta,
            hurst: alpha / 2.0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// SDE driving needs `1 < α < 2`, i.e. a Young-integrable driver.
    pub fn require_sde_range(&self) -> Result<()> {
        if self.alpha > 1.0 {
            Ok(())
        } else {
            Err(Error::domain(
                "GreyParams",
                format!("SDE solving needs 1 < alpha < 2, got {}", self.alpha),
            ))
        }
    }
}

fn lanczos_sum(z: f64) -> f64 {
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    sum
}

/// Γ(x) for `0 < x ≤ 170`.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain("gamma", format!("x = {x} must be > 0")));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Overflow("gamma"));
    }
    Ok(gamma_positive(x))
}

fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        return gamma_positive(x + 1.0) / x;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power so t^(z + 1/2) cannot overflow before e^-t is applied
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * lanczos_sum(z) * (half * (half * (-t).exp()))
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return ln_gamma(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// sin(πx) with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// 1/Γ(x) for any real `x`; exactly zero at the poles `0, -1, -2, ...`.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x > 0.0 {
        if x > GAMMA_MAX_ARG {
            return (-ln_gamma(x)).exp();
        }
        return 1.0 / gamma_positive(x);
    }
    if x == x.floor() {
        return 0.0;
    }
    // reflection: 1/Γ(x) = sin(πx) Γ(1 - x) / π
    let s = sin_pi(x);
    let y = 1.0 - x;
    if y > GAMMA_MAX_ARG {
        s.signum() * (s.abs().ln() + ln_gamma(y) - PI.ln()).exp()
    } else {
        s * gamma_positive(y) / PI
    }
}

fn check_ml_args(beta: f64, x: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain("mittag_leffler", format!("beta = {beta} not in (0, 1]")));
    }
    if x.is_nan() || x > 0.0 {
        return Err(Error::domain("mittag_leffler", format!("x = {x} must be <= 0")));
    }
    Ok(())
}

/// Mittag-Leffler function E_β(x) = Σ xⁿ/Γ(βn + 1) on the half-line `x ≤ 0`.
pub fn mittag_leffler(beta: f64, x: f64) -> Result<f64> {
    check_ml_args(beta, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if beta == 1.0 {
        return Ok(x.exp());
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x >= -5.0 {
        if let Some(v) = ml_series(beta, x) {
            return Ok(v);
        }
    }
    Ok(ml_integral(beta, -x))
}

/// Neumaier-compensated partial sums of the defining series. Returns `None`
/// when the terms grow large enough that cancellation would eat the accuracy.
pub(crate) fn ml_series(beta: f64, x: f64) -> Option<f64> {
    let ln_abs = x.abs().ln();
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut peak = f64::NEG_INFINITY;
    for n in 1..5000usize {
        let nf = n as f64;
        let ln_term = nf * ln_abs - ln_gamma(beta * nf + 1.0);
        if ln_term > ML_SERIES_MAX_TERM.ln() {
            return None;
        }
        let term = if n % 2 == 0 { ln_term.exp() } else { -ln_term.exp() };
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if ln_term < peak && ln_term < -40.0 {
            break;
        }
        peak = peak.max(ln_term);
    }
    Some(sum + comp)
}

/// E_β(-s) = sin(βπ)/(βπ) ∫₀^∞ exp(-(s v)^{1/β}) / (v² + 2v cos βπ + 1) dv,
/// for `0 < β < 1`, `s > 0`. The integrand is positive so there is no
/// cancellation for large `s`.
pub(crate) fn ml_integral(beta: f64, s: f64) -> f64 {
    let c = (beta * PI).cos();
    let inv_beta = 1.0 / beta;
    let tol = Tolerance {
        abs: 1e-15,
        rel: 1e-13,
        max_intervals: 4000,
    };
    let inner = quad::integrate(
        |v| (-(s * v).powf(inv_beta)).exp() / (v * v + 2.0 * v * c + 1.0),
        0.0,
        1.0,
        tol,
    );
    // v = 1/w on [1, ∞)
    let outer = quad::integrate(
        |w| {
            if w == 0.0 {
                return 0.0;
            }
            (-(s / w).powf(inv_beta)).exp() / (1.0 + 2.0 * w * c + w * w)
        },
        0.0,
        1.0,
        tol,
    );
    sin_pi(beta) / (beta * PI) * (inner.value + outer.value)
}

fn check_mw_args(func: &'static str, beta: f64, tau: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::domain(func, format!("beta = {beta} not in (0, 1)")));
    }
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::domain(func, format!("tau = {tau} must be >= 0")));
    }
    Ok(())
}

/// ln A(u) for the Kanter function
/// A(u) = sin(βu)^{β/(1-β)} sin((1-β)u) / sin(u)^{1/(1-β)},  u ∈ (0, π).
pub(crate) fn kanter_ln_a(beta: f64, u: f64) -> f64 {
    let k = 1.0 / (1.0 - beta);
    beta * k * (beta * u).sin().ln() + ((1.0 - beta) * u).sin().ln() - k * u.sin().ln()
}

fn mw_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-300,
        rel: 1e-13,
        max_intervals: 4000,
    }
}

/// M-Wright probability density M_β(τ), `0 < β < 1`, `τ ≥ 0`.
pub fn m_wright_pdf(beta: f64, tau: f64) -> Result<f64> {
    check_mw_args("m_wright_pdf", beta, tau)?;
    if tau.is_infinite() {
        return Ok(0.0);
    }
    if tau <= M_WRIGHT_SERIES_CUTOFF {
        Ok(mw_series(beta, tau))
    } else {
        Ok(mw_integral(beta, tau))
    }
}

/// Σ (-τ)ⁿ / (n! Γ(1 - β - βn)).
pub(crate) fn mw_series(beta: f64, tau: f64) -> f64 {
    let mut sum = reciprocal_gamma(1.0 - beta);
    if tau == 0.0 {
        return sum;
    }
    let ln_tau = tau.ln();
    let mut comp = 0.0;
    let mut ln_fact = 0.0;
    for n in 1..2000usize {
        let nf = n as f64;
        ln_fact += nf.ln();
        // 1/Γ(x) = sin(πx) Γ(1-x) / π, kept in logs so huge Γ(1-x) meets tiny τⁿ/n!
        let x = 1.0 - beta - beta * nf;
        let sin = (PI * x).sin();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = if sin == 0.0 {
            0.0
        } else {
            sign * sin.signum() * (nf * ln_tau - ln_fact + ln_gamma(1.0 - x) - PI.ln() + sin.abs().ln()).exp()
        };
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        // |1/Γ(1-β-βn)| ≤ Γ(β(n+1))/π bounds every later term
        let bound = (nf * ln_tau - ln_fact + ln_gamma(beta * (nf + 1.0)) - PI.ln()).exp();
        if n > 2 && bound < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum + comp
}

/// M_β(y) = y^{β/(1-β)} / (π(1-β)) ∫₀^π A(u) exp(-A(u) y^{1/(1-β)}) du.
pub(crate) fn mw_integral(beta: f64, y: f64) -> f64 {
    let k = 1.0 / (1.0 - beta);
    let w = y.powf(k);
    let r = quad::integrate(
        |u| {
            let ln_a = kanter_ln_a(beta, u);
            let a = ln_a.exp();
            if !a.is_finite() {
                return 0.0;
            }
            (ln_a - a * w).exp()
        },
        0.0,
        PI,
        mw_tolerance(),
    );
    k / PI * y.powf(beta * k) * r.value
}

/// Large-argument asymptotic form of M_β(y):
/// (2π(1-β))^{-1/2} (βy)^{(β-1/2)/(1-β)} exp(-((1-β)/β) (βy)^{1/(1-β)}).
pub fn m_wright_tail(beta: f64, y: f64) -> Result<f64> {
    Ok(ln_m_wright_tail(beta, y)?.exp())
}

pub fn ln_m_wright_tail(beta: f64, y: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::domain("m_wright_tail", format!("beta = {beta} not in (0, 1)")));
    }
    if y.is_nan() || y <= 0.0 {
        return Err(Error::domain("m_wright_tail", format!("y = {y} must be > 0")));
    }
    let k = 1.0 / (1.0 - beta);
    let x = beta * y;
    Ok(-0.5 * (LN_2 + PI.ln() + (1.0 - beta).ln()) + (beta - 0.5) * k * x.ln()
        - (1.0 - beta) / beta * x.powf(k))
}

/// Point beyond which the M-Wright tail asymptotic stays below `eps`.
pub fn m_wright_truncation(beta: f64, eps: f64) -> Result<f64> {
    let target = eps.ln();
    let below = |y: f64| -> Result<bool> { Ok(ln_m_wright_tail(beta, y)? < target) };
    let mut hi = 1.0;
    while !below(hi)? {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    // the asymptotic can dip under eps near the origin for β > 1/2
    if lo < 1.0 {
        lo = 0.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= 0.0 || !below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// P(Y_β ≤ τ) for the M-Wright law.
///
/// Returns exactly 1 beyond [`m_wright_truncation`] at level
/// [`M_WRIGHT_TAIL_EPS`]. Inside, the value is the quadrature of the
/// conditional exponential law of `Y^{1/(1-β)}` given the Kanter angle.
pub fn m_wright_cdf(beta: f64, tau: f64) -> Result<f64> {
    check_mw_args("m_wright_cdf", beta, tau)?;
    Ok(MWrightCdf::new(beta, 1e-13)?.eval(tau))
}

/// M-Wright distribution function with its truncation point computed once,
/// for evaluation at many points.
#[derive(Debug, Clone, Copy)]
pub struct MWrightCdf {
    beta: f64,
    truncation: f64,
    rel_tol: f64,
}

impl MWrightCdf {
    pub fn new(beta: f64, rel_tol: f64) -> Result<Self> {
        check_mw_args("m_wright_cdf", beta, 0.0)?;
        Ok(Self {
            beta,
            truncation: m_wright_truncation(beta, M_WRIGHT_TAIL_EPS)?,
            rel_tol,
        })
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// P(Y_β ≤ τ); 0 for τ ≤ 0.
    pub fn eval(&self, tau: f64) -> f64 {
        if !(tau > 0.0) {
            return 0.0;
        }
        if tau >= self.truncation {
            return 1.0;
        }
        let beta = self.beta;
        let w = tau.powf(1.0 / (1.0 - beta));
        let r = quad::integrate(
            |u| {
                let a = kanter_ln_a(beta, u).exp();
                if !a.is_finite() {
                    return 1.0;
                }
                -(-a * w).exp_m1()
            },
            0.0,
            PI,
            Tolerance {
                abs: 1e-15,
                rel: self.rel_tol,
                max_intervals: 4000,
            },
        );
        (r.value / PI).clamp(0.0, 1.0)
    }
}

/// P(Y_β > τ), accurate in relative terms far into the tail.
pub fn m_wright_sf(beta: f64, tau: f64) -> Result<f64> {
    check_mw_args("m_wright_sf", beta, tau)?;
    if tau == 0.0 {
        return Ok(1.0);
    }
    let w = tau.powf(1.0 / (1.0 - beta));
    let r = quad::integrate(
        |u| {
            let ln_a = kanter_ln_a(beta, u);
            let a = ln_a.exp();
            if !a.is_finite() {
                return 0.0;
            }
            (-a * w).exp()
        },
        0.0,
        PI,
        mw_tolerance(),
    );
    Ok((r.value / PI).clamp(0.0, 1.0))
}

/// ln M_β(y) that stays finite where the density underflows.
pub fn ln_m_wright_pdf(beta: f64, y: f64) -> Result<f64> {
    let v = m_wright_pdf(beta, y)?;
    if v > 1e-290 {
        Ok(v.ln())
    } else {
        ln_m_wright_tail(beta, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_trivial_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert!((gamma(0.5).unwrap() - PI.sqrt()).abs() < 1e-15);
        assert!((gamma(5.0).unwrap() - 24.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_errors() {
        assert!(matches!(gamma(0.0), Err(Error::Domain { .. })));
        assert!(matches!(gamma(-1.5), Err(Error::Domain { .. })));
        assert!(matches!(gamma(170.5), Err(Error::Overflow(_))));
        assert!(gamma(170.0).unwrap().is_finite());
    }

    #[test]
    fn gamma_factorials_to_170() {
        let mut fact = 1.0f64;
        for n in 1..170u32 {
            let g = gamma(n as f64 + 1.0).unwrap();
            fact *= n as f64;
            assert!((g / fact - 1.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[1e-3, 0.1, 0.7, 1.3, 4.5, 33.3, 120.0] {
            assert!((ln_gamma(x) - gamma(x).unwrap().ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn reciprocal_gamma_poles_and_reflection() {
        for n in 0..30 {
            assert_eq!(reciprocal_gamma(-(n as f64)), 0.0);
        }
        // Γ(-1/2) = -2√π
        let expected = -1.0 / (2.0 * PI.sqrt());
        assert!((reciprocal_gamma(-0.5) - expected).abs() < 1e-15);
        // reflection against gamma(1.5): Γ(-0.5)Γ(1.5) = π / sin(-π/2)
        let via = -gamma(1.5).unwrap() / PI;
        assert!((reciprocal_gamma(-0.5) - via).abs() < 1e-15);
        assert!((reciprocal_gamma(3.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn m_wright_near_one_is_finite() {
        // reference values from a 60-digit evaluation of the series
        let cases = [
            (0.97, 0.9, 0.856_839_936_011_327_2),
            (0.97, 1.0, 2.126_993_756_794_023_6),
            (0.97, 1.1, 5.273_943_803_768_032),
            (0.99, 0.5, 0.038_655_328_742_356_89),
            (0.99, 1.0, 4.436_535_429_106_355),
        ];
        for (beta, tau, want) in cases {
            let got = m_wright_pdf(beta, tau).unwrap();
            assert!((got - want).abs() < 1e-10 * want, "beta {beta} tau {tau}: {got}");
        }
    }

    #[test]
    fn reciprocal_gamma_large_negative_is_finite() {
        // |1/Γ(-170.5)| = Γ(171.5)/π, just below the f64 limit
        let v = reciprocal_gamma(-170.5);
        let expected = (ln_gamma(171.5) - PI.ln()).exp();
        assert!((v.abs() / expected - 1.0).abs() < 1e-12);
        assert!(reciprocal_gamma(-180.5).is_infinite());
    }

    #[test]
    fn mittag_leffler_trivial() {
        assert_eq!(mittag_leffler(0.7, 0.0).unwrap(), 1.0);
        assert!((mittag_leffler(1.0, -1.0).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-15);
    }

    #[test]
    fn mittag_leffler_domain() {
        assert!(mittag_leffler(0.5, 0.1).is_err());
        assert!(mittag_leffler(0.0, -1.0).is_err());
        assert!(mittag_leffler(1.2, -1.0).is_err());
    }

    #[test]
    fn series_and_integral_agree_on_overlap() {
        for &beta in &[0.3, 0.5, 0.7, 0.9, 0.99] {
            for &x in &[-0.1, -0.5, -1.0, -2.0, -3.0, -4.0, -5.0] {
                if let Some(series) = ml_series(beta, x) {
                    let integral = ml_integral(beta, -x);
                    assert!(
                        (series - integral).abs() < 1e-11,
                        "beta {beta} x {x}: {series} vs {integral}"
                    );
                }
            }
        }
    }

    #[test]
    fn half_order_closed_form() {
        // E_{1/2}(-s) = exp(s²) erfc(s)
        for &s in &[0.25f64, 1.0, 3.0, 8.0, 20.0] {
            let closed = (s * s).exp() * statrs::function::erf::erfc(s);
            let v = mittag_leffler(0.5, -s).unwrap();
            assert!((v - closed).abs() < 1e-10 * closed.max(1e-3), "{s}: {v} vs {closed}");
        }
    }

    #[test]
    fn m_wright_origin() {
        assert!((m_wright_pdf(0.5, 0.0).unwrap() - 0.564_189_583_547_756_3).abs() < 1e-15);
        let b = 0.3;
        assert!((m_wright_pdf(b, 0.0).unwrap() - 1.0 / gamma(1.0 - b).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn m_wright_series_integral_crossover() {
        for &beta in &[0.2, 0.5, 0.7, 0.9] {
            for &y in &[0.6, 0.8, 1.0, 1.2] {
                let s = mw_series(beta, y);
                let i = mw_integral(beta, y);
                assert!((s - i).abs() < 1e-12, "beta {beta} y {y}: {s} vs {i}");
            }
        }
    }

    #[test]
    fn m_wright_domain() {
        assert!(m_wright_pdf(1.0, 1.0).is_err());
        assert!(m_wright_pdf(0.5, -1.0).is_err());
        assert!(m_wright_tail(1.0, 1.0).is_err());
        assert!(m_wright_tail(0.5, 0.0).is_err());
    }

    #[test]
    fn m_wright_tail_half_is_exact() {
        for &y in &[0.5f64, 2.0, 10.0] {
            let closed = (-y * y / 4.0).exp() / PI.sqrt();
            assert!((m_wright_tail(0.5, y).unwrap() / closed - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn m_wright_tail_decreasing_beyond_mode() {
        assert!(ln_m_wright_tail(0.9, 5.0).unwrap() > ln_m_wright_tail(0.9, 5.5).unwrap());
    }

    #[test]
    fn cdf_endpoints() {
        assert_eq!(m_wright_cdf(0.5, 0.0).unwrap(), 0.0);
        assert!((m_wright_cdf(0.5, 60.0).unwrap() - 1.0).abs() < 1e-10);
        let c = m_wright_cdf(0.7, 1.0).unwrap();
        let s = m_wright_sf(0.7, 1.0).unwrap();
        assert!((c + s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_point_matches_level() {
        let y = m_wright_truncation(0.5, 1e-14).unwrap();
        assert!((ln_m_wright_tail(0.5, y).unwrap() - 1e-14f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn params_validation() {
        assert!(GreyParams::new(1.5, 0.7).is_ok());
        assert!(GreyParams::new(2.0, 0.7).is_err());
        assert!(GreyParams::new(1.5, 0.0).is_err());
        assert!(GreyParams::new(1.5, 1.01).is_err());
        let p = GreyParams::new(1.3, 1.0).unwrap();
        assert_eq!(p.hurst(), 0.65);
        assert!(GreyParams::new(0.8, 0.5).unwrap().require_sde_range().is_err());
    }
}
