//! Densities of X_t(Y_β): kernel estimates from samples, the variance
//! mixture for constant coefficients, Gaussian tail bounds and the
//! F-integral controlling the mixture upper bound.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, FixedRule, Tolerance};
use crate::report::{RunReport, ToleranceRule};
use crate::sde::fields::{cholesky, gram, VectorFieldSet};
use crate::specfun::{ln_gamma, ln_m_wright_pdf, m_wright_pdf, m_wright_truncation, GreyParams, M_WRIGHT_TAIL_EPS};
use crate::stats::{mean_se, normal_cdf, MeanSe};

/// Relative stability required between successive truncations of the
/// mixture-bound integral.
pub const FINITENESS_TOL: f64 = 1e-6;
/// Relative cut-off of the F-integrand below its peak.
pub const F_INTEGRAND_CUTOFF: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    Kde,
    MixtureQuadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    /// Evaluation points, each of length `dim`.
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub method: DensityMethod,
    /// Per-coordinate kernel bandwidths (KDE only).
    pub bandwidth: Option<Vec<f64>>,
    pub sample_count: Option<usize>,
    pub quadrature_nodes: Option<usize>,
}

impl DensityEstimate {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    /// Largest density value.
    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// CSV with header `z,p` (one dimension) or `z1,z2,p`.
    pub fn to_csv(&self) -> String {
        let dim = self.dim();
        let mut out = String::new();
        if dim == 1 {
            out.push_str("z,p\n");
        } else {
            let names: Vec<String> = (1..=dim).map(|i| format!("z{i}")).collect();
            let _ = writeln!(out, "{},p", names.join(","));
        }
        for (z, p) in self.points.iter().zip(&self.values) {
            for c in z {
                let _ = write!(out, "{c:.16e},");
            }
            let _ = writeln!(out, "{p:.16e}");
        }
        out
    }

    /// Trapezoid integral over a one-dimensional sorted grid.
    pub fn integral_1d(&self) -> f64 {
        self.points
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(z, p)| 0.5 * (z[1][0] - z[0][0]) * (p[0] + p[1]))
            .sum()
    }
}

/// `m` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..m)
            .map(|i| if i + 1 == m { b } else { a + (b - a) * i as f64 / (m - 1) as f64 })
            .collect(),
    }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Silverman's rule per coordinate: 0.9 min(σ, IQR/1.34) N^{-1/5} in one
/// dimension, (4/((d+2)N))^{1/(d+4)} min(σ, IQR/1.34) otherwise.
pub fn silverman_bandwidth(samples: &[Vec<f64>]) -> Vec<f64> {
    let n = samples.len();
    let dim = samples[0].len();
    let factor = if dim == 1 {
        0.9 * (n as f64).powf(-0.2)
    } else {
        (4.0 / ((dim as f64 + 2.0) * n as f64)).powf(1.0 / (dim as f64 + 4.0))
    };
    (0..dim)
        .map(|j| {
            let mut col: Vec<f64> = samples.iter().map(|s| s[j]).collect();
            let sd = mean_se(&col).se * (n as f64).sqrt();
            col.sort_by(f64::total_cmp);
            let iqr = quantile(&col, 0.75) - quantile(&col, 0.25);
            let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
            factor * spread
        })
        .collect()
}

/// Gaussian product-kernel density estimate on `grid`.
pub fn kde_estimate(samples: &[Vec<f64>], grid: &[Vec<f64>], bandwidth: Option<f64>) -> Result<DensityEstimate> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("kde_estimate needs at least one sample".into()));
    }
    let dim = samples[0].len();
    if dim == 0 || samples.iter().any(|s| s.len() != dim) || grid.iter().any(|z| z.len() != dim) {
        return Err(Error::InvalidInput("samples and grid points must share one dimension".into()));
    }
    if samples.len() < 100 {
        log::warn!("kde_estimate with only {} samples", samples.len());
    }
    let h = match bandwidth {
        Some(b) => vec![b; dim],
        None => silverman_bandwidth(samples),
    };
    if h.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
        return Err(Error::InvalidInput(
            "degenerate bandwidth; supply one explicitly".into(),
        ));
    }
    let norm: f64 = h.iter().map(|b| b * (2.0 * PI).sqrt()).product::<f64>() * samples.len() as f64;
    let values: Vec<f64> = if dim == 1 {
        let mut sorted: Vec<f64> = samples.iter().map(|s| s[0]).collect();
        sorted.sort_by(f64::total_cmp);
        let reach = 9.0 * h[0];
        grid.par_iter()
            .map(|z| {
                let lo = sorted.partition_point(|&x| x < z[0] - reach);
                let hi = sorted.partition_point(|&x| x <= z[0] + reach);
                sorted[lo..hi]
                    .iter()
                    .map(|x| {
                        let u = (z[0] - x) / h[0];
                        (-0.5 * u * u).exp()
                    })
                    .sum::<f64>()
                    / norm
            })
            .collect()
    } else {
        grid.par_iter()
            .map(|z| {
                samples
                    .iter()
                    .map(|s| {
                        let q: f64 = s.iter().zip(z).zip(&h).map(|((x, c), b)| ((c - x) / b).powi(2)).sum();
                        (-0.5 * q).exp()
                    })
                    .sum::<f64>()
                    / norm
            })
            .collect()
    };
    Ok(DensityEstimate {
        points: grid.to_vec(),
        values,
        method: DensityMethod::Kde,
        bandwidth: Some(h),
        sample_count: Some(samples.len()),
        quadrature_nodes: None,
    })
}

/// One-dimensional convenience wrapper around [`kde_estimate`].
pub fn kde_estimate_1d(samples: &[f64], grid: &[f64], bandwidth: Option<f64>) -> Result<DensityEstimate> {
    let s: Vec<Vec<f64>> = samples.iter().map(|&x| vec![x]).collect();
    let g: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x]).collect();
    kde_estimate(&s, &g, bandwidth)
}

/// Law of X_t(Y_β) = x0 + b t + √Y_β σ B_H(t) for constant coefficients:
/// a variance mixture of N(x0 + bt, y t^{2H} σσᵀ) over y ~ M_β.
#[derive(Debug)]
pub struct ConstantFieldLaw {
    params: GreyParams,
    mean: Vec<f64>,
    chol: Vec<f64>,
    ln_det: f64,
    scale: f64,
    y_max: f64,
    rule: OnceLock<Vec<(f64, f64)>>,
}

impl ConstantFieldLaw {
    pub fn new(params: GreyParams, sigma: &[Vec<f64>], b: &[f64], x0: &[f64], t: f64) -> Result<Self> {
        let n = sigma.len();
        if n == 0 || sigma.iter().any(|r| r.is_empty() || r.len() != sigma[0].len()) {
            return Err(Error::InvalidInput("sigma must be a non-empty rectangular matrix".into()));
        }
        for v in [b, x0] {
            if v.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: v.len() });
            }
        }
        if !(t > 0.0) {
            return Err(Error::InvalidInput(format!("t = {t} must be > 0")));
        }
        let chol = cholesky(&gram(sigma), n).ok_or(Error::SingularDiffusion)?;
        let ln_det = 2.0 * (0..n).map(|i| chol[i * n + i].ln()).sum::<f64>();
        let y_max = if params.beta() < 1.0 {
            m_wright_truncation(params.beta(), M_WRIGHT_TAIL_EPS)?
        } else {
            1.0
        };
        Ok(Self {
            mean: (0..n).map(|i| x0[i] + b[i] * t).collect(),
            chol,
            ln_det,
            scale: t.powf(2.0 * params.hurst()),
            y_max,
            params,
            rule: OnceLock::new(),
        })
    }

    pub fn from_fields(params: GreyParams, fields: &VectorFieldSet, x0: &[f64], t: f64) -> Result<Self> {
        match fields.field() {
            crate::sde::BuiltinField::Constant { sigma, drift } => Self::new(params, sigma, drift, x0, t),
            _ => Err(Error::InvalidInput("mixture density needs constant fields".into())),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// (z − m)ᵀ (σσᵀ)^{-1} (z − m).
    fn quadratic_form(&self, z: &[f64]) -> f64 {
        let n = self.dim();
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut s = z[i] - self.mean[i];
            for k in 0..i {
                s -= self.chol[i * n + k] * w[k];
            }
            w[i] = s / self.chol[i * n + i];
        }
        w.iter().map(|v| v * v).sum()
    }

    /// Gaussian density at quadratic form `q` with variance factor `y`.
    fn ln_gaussian(&self, q: f64, y: f64) -> f64 {
        let n = self.dim() as f64;
        -0.5 * n * (2.0 * PI * y * self.scale).ln() - 0.5 * self.ln_det - q / (2.0 * y * self.scale)
    }

    /// Density by adaptive quadrature over y = v², v ∈ [0, √y_max].
    /// Infinite at the mean in two or more dimensions.
    pub fn density(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                got: z.len(),
            });
        }
        let q = self.quadratic_form(z);
        let beta = self.params.beta();
        if beta == 1.0 {
            return Ok(self.ln_gaussian(q, 1.0).exp());
        }
        if q == 0.0 && self.dim() >= 2 {
            return Ok(f64::INFINITY);
        }
        let r = quad::integrate(
            |v| {
                if v == 0.0 {
                    return 0.0;
                }
                let y = v * v;
                let m = m_wright_pdf(beta, y).unwrap_or(f64::NAN);
                2.0 * v * self.ln_gaussian(q, y).exp() * m
            },
            0.0,
            self.y_max.sqrt(),
            Tolerance::new(1e-300, 1e-11),
        );
        Ok(r.value)
    }

    /// Nodes (y_i, w_i M_β(y_i)) of a fixed rule in v = √y, geometrically
    /// refined towards 0.
    fn rule(&self) -> &[(f64, f64)] {
        self.rule.get_or_init(|| {
            let beta = self.params.beta();
            if beta == 1.0 {
                return vec![(1.0, 1.0)];
            }
            let top = self.y_max.sqrt();
            let mut breaks: Vec<f64> = vec![0.0];
            breaks.extend((1..=40).rev().map(|k| top / 128.0 * f64::powi(2.0, -k)));
            breaks.extend((1..=128).map(|i| top * i as f64 / 128.0));
            FixedRule::from_breakpoints(&breaks)
                .nodes
                .into_iter()
                .map(|(v, w)| {
                    let y = v * v;
                    (y, w * 2.0 * v * m_wright_pdf(beta, y).unwrap_or(0.0))
                })
                .collect()
        })
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.rule().len()
    }

    /// Density by the precomputed fixed rule.
    pub fn density_fixed(&self, z: &[f64]) -> f64 {
        let q = self.quadratic_form(z);
        self.rule()
            .iter()
            .map(|&(y, w)| w * self.ln_gaussian(q, y).exp())
            .sum()
    }

    /// Distribution function in one dimension: ∫ Φ((z − m)/(s √y)) M_β(y) dy.
    pub fn cdf(&self, z: f64) -> Result<f64> {
        if self.dim() != 1 {
            return Err(Error::InvalidInput("cdf is defined for one-dimensional laws".into()));
        }
        let sd = self.chol[0] * self.scale.sqrt();
        let x = z - self.mean[0];
        let value: f64 = self
            .rule()
            .iter()
            .map(|&(y, w)| w * normal_cdf(x / (sd * y.sqrt())))
            .sum();
        Ok(value.clamp(0.0, 1.0))
    }

    /// Mixture density on a list of points, evaluated in parallel.
    pub fn estimate(&self, grid: &[Vec<f64>]) -> Result<DensityEstimate> {
        let values: Vec<f64> = grid
            .par_iter()
            .map(|z| self.density(z))
            .collect::<Result<_>>()?;
        Ok(DensityEstimate {
            points: grid.to_vec(),
            values,
            method: DensityMethod::MixtureQuadrature,
            bandwidth: None,
            sample_count: None,
            quadrature_nodes: Some(self.quadrature_nodes()),
        })
    }
}

/// Density of X_t(Y_β) at `z` for constant coefficients σ, b.
pub fn mixture_density_constant_fields(
    params: &GreyParams,
    sigma: &[Vec<f64>],
    b: &[f64],
    x0: &[f64],
    t: f64,
    z: &[f64],
) -> Result<f64> {
    ConstantFieldLaw::new(*params, sigma, b, x0, t)?.density(z)
}

/// Single-time density of B_{α,β}(t) straight from the joint-density
/// formula in the variable τ: (2π t^α)^{-1/2} ∫ τ^{-1/2} e^{-x²/(2τt^α)} M_β(τ) dτ.
pub fn ggbm_density(params: &GreyParams, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("t = {t} must be > 0")));
    }
    let beta = params.beta();
    let var = t.powf(params.alpha());
    if beta == 1.0 {
        return Ok((-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt());
    }
    let f = |tau: f64| {
        if tau == 0.0 {
            return 0.0;
        }
        (-x * x / (2.0 * tau * var)).exp() / tau.sqrt() * m_wright_pdf(beta, tau).unwrap_or(f64::NAN)
    };
    let tol = Tolerance {
        abs: 1e-300,
        rel: 1e-11,
        max_intervals: 4000,
    };
    let upper = 2.0 * m_wright_truncation(beta, M_WRIGHT_TAIL_EPS)?;
    let total = quad::integrate(f, 0.0, 1.0, tol).value + quad::integrate(f, 1.0, upper, tol).value;
    Ok(total / (2.0 * PI * var).sqrt())
}

/// Draws X_t(y) − x0 = b t + √y t^H σ Z for constant fields.
pub fn sample_constant_field_increment<R: Rng + ?Sized>(
    fields: &VectorFieldSet,
    hurst: f64,
    t: f64,
    y: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let crate::sde::BuiltinField::Constant { sigma, drift } = fields.field() else {
        return Err(Error::InvalidInput("needs constant fields".into()));
    };
    let scale = y.sqrt() * t.powf(hurst);
    let z: Vec<f64> = (0..fields.driver_dim()).map(|_| rng.sample(StandardNormal)).collect();
    Ok(sigma
        .iter()
        .zip(drift)
        .map(|(row, b)| b * t + scale * row.iter().zip(&z).map(|(s, g)| s * g).sum::<f64>())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundParams {
    pub c2: f64,
    pub c3: f64,
    /// sup_{|λ| ≤ 1} |Σ λ_j V_j|².
    pub m_sup: f64,
    /// Drift growth rate, the Lipschitz constant of V0.
    pub theta: f64,
}

/// c3(y) = 1/(2 d M² e^{2θt} t^{2H} y²) for constant fields, with the given
/// location constant c2(y).
pub fn tail_bound_params(params: &GreyParams, fields: &VectorFieldSet, t: f64, y: f64, c2: f64) -> Result<TailBoundParams> {
    let m_sup = fields
        .diffusion_sup_sq()
        .ok_or_else(|| Error::InvalidInput("tail bound needs constant fields".into()))?;
    if !(m_sup > 0.0) {
        return Err(Error::SingularDiffusion);
    }
    let theta = fields.drift_lipschitz();
    let d = fields.driver_dim() as f64;
    let c3 = 1.0 / (2.0 * d * m_sup * m_sup * (2.0 * theta * t).exp() * t.powf(2.0 * params.hurst()) * y * y);
    Ok(TailBoundParams { c2, c3, m_sup, theta })
}

/// exp(−c3 (|z| − c2)²) beyond c2, 1 below.
pub fn tail_bound(tp: &TailBoundParams, z: f64) -> f64 {
    let r = z.abs();
    if r <= tp.c2 {
        1.0
    } else {
        (-tp.c3 * (r - tp.c2).powi(2)).exp()
    }
}

/// √d · E max_i |X^i| from samples of X.
pub fn estimate_c2(samples: &[Vec<f64>]) -> MeanSe {
    let d = samples.first().map_or(1, Vec::len) as f64;
    let maxima: Vec<f64> = samples
        .iter()
        .map(|s| d.sqrt() * s.iter().map(|v| v.abs()).fold(0.0, f64::max))
        .collect();
    mean_se(&maxima)
}

fn euclid(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Largest excess of the empirical survival P[|X| > z] over the tail bound
/// across `radii`; passes when ≤ 0.
pub fn tail_dominance_report(check_id: &str, samples: &[Vec<f64>], tp: &TailBoundParams, radii: &[f64]) -> RunReport {
    let mut norms: Vec<f64> = samples.iter().map(|s| euclid(s)).collect();
    norms.sort_by(f64::total_cmp);
    let n = norms.len() as f64;
    let worst = radii
        .iter()
        .map(|&z| {
            let above = norms.len() - norms.partition_point(|&v| v <= z);
            above as f64 / n - tail_bound(tp, z)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    RunReport::new(check_id, worst, 0.0, None, ToleranceRule::AtMost)
}

/// ∫ exp(−c3(y)(|z| − c2(y))₊²) M_β(y) dy with c2(y) = √y c2(1) and
/// c3(y) = c3(1)/y², the Gaussian-mixture envelope without c1.
pub fn mixture_envelope(beta: f64, unit: &TailBoundParams, z: f64) -> Result<f64> {
    if beta == 1.0 {
        return Ok(tail_bound(unit, z));
    }
    let top = m_wright_truncation(beta, M_WRIGHT_TAIL_EPS)?.sqrt();
    let r = quad::integrate(
        |v| {
            let y = v * v;
            let tp = TailBoundParams {
                c2: v * unit.c2,
                c3: unit.c3 / (y * y),
                ..*unit
            };
            2.0 * v * tail_bound(&tp, z) * m_wright_pdf(beta, y).unwrap_or(f64::NAN)
        },
        0.0,
        top,
        Tolerance::new(1e-300, 1e-10),
    );
    Ok(r.value)
}

/// c1 = safety · max_z p(z) / envelope(z) over pilot points.
pub fn calibrate_envelope_constant(
    law: &ConstantFieldLaw,
    unit: &TailBoundParams,
    pilot: &[f64],
    safety: f64,
) -> Result<f64> {
    let beta = law.params.beta();
    let mut worst: f64 = 0.0;
    for &z in pilot {
        let p = law.density(&[z])?;
        worst = worst.max(p / mixture_envelope(beta, unit, z)?);
    }
    Ok(safety * worst)
}

/// Largest log-ratio ln(p(z) / (c1 · envelope(z))) over `zs`; passes when ≤ 0.
pub fn mixture_bound_report(law: &ConstantFieldLaw, unit: &TailBoundParams, c1: f64, zs: &[f64]) -> Result<RunReport> {
    let beta = law.params.beta();
    let mut worst = f64::NEG_INFINITY;
    for &z in zs {
        let p = law.density(&[z])?;
        let bound = c1 * mixture_envelope(beta, unit, z)?;
        worst = worst.max(p.ln() - bound.ln());
    }
    Ok(RunReport::new("density.mixture_bound", worst, 0.0, None, ToleranceRule::AtMost))
}

fn check_f_args(delta: f64, tau: f64) -> Result<()> {
    if !(delta > 0.5 && delta < 1.0) {
        return Err(Error::domain("f_integral", format!("delta = {delta} not in (1/2, 1)")));
    }
    if !(tau > 0.0) {
        return Err(Error::domain("f_integral", format!("tau = {tau} must be > 0")));
    }
    Ok(())
}

/// ln F where F = ∫₀^∞ u^{1/δ−1} exp(−τu²) exp(C t y^{1/(2δ)} u^{1/δ}) du.
pub fn ln_f_integral(t: f64, delta: f64, c: f64, y: f64, tau: f64) -> Result<f64> {
    check_f_args(delta, tau)?;
    let p = 1.0 / delta;
    let k = c * t * y.max(0.0).powf(0.5 * p);
    let ln_g = |u: f64| (p - 1.0) * u.ln() - tau * u * u + k * u.powf(p);
    let slope = |u: f64| (p - 1.0) / u - 2.0 * tau * u + k * p * u.powf(p - 1.0);
    // the log-integrand rises from −∞ at 0 and eventually falls
    let mut hi = 1.0;
    let mut doublings = 0;
    while slope(hi) > 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 || !hi.is_finite() {
            return Err(Error::Divergence("F integrand still increasing at the truncation probe".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let peak = 0.5 * (lo + hi);
    let ln_peak = ln_g(peak);
    let cut = F_INTEGRAND_CUTOFF.ln();
    let below = |u: f64| ln_g(u) - ln_peak <= cut;
    let mut right = 2.0 * peak;
    let mut steps = 0;
    while !below(right) {
        if slope(right) > 0.0 || steps > 1100 {
            return Err(Error::Divergence("F integrand still increasing at the truncation probe".into()));
        }
        right *= 2.0;
        steps += 1;
    }
    // tighten both cut points so the peak dominates each quadrature interval
    let mut inside = peak;
    for _ in 0..200 {
        let mid = 0.5 * (inside + right);
        if below(mid) {
            right = mid;
        } else {
            inside = mid;
        }
    }
    let mut left = 0.0;
    let mut inside = peak;
    for _ in 0..200 {
        let mid = 0.5 * (left + inside);
        if below(mid) {
            left = mid;
        } else {
            inside = mid;
        }
    }
    let h = |u: f64| if u == 0.0 { 0.0 } else { (ln_g(u) - ln_peak).exp() };
    // rounding in ln_g − ln_peak caps the attainable relative accuracy
    let tol = Tolerance {
        max_intervals: 200,
        ..Tolerance::new(1e-300, 1e-12)
    };
    let left_part = quad::integrate(h, left, peak, tol).value;
    let right_part = quad::integrate(h, peak, right, tol).value;
    Ok(ln_peak + (left_part + right_part).ln())
}

pub fn f_integral(t: f64, delta: f64, c: f64, y: f64, tau: f64) -> Result<f64> {
    Ok(ln_f_integral(t, delta, c, y, tau)?.exp())
}

/// τ^{−1/(2δ)} Γ(1/(2δ)) / 2, the value of F when C y = 0.
pub fn f_integral_free(delta: f64, tau: f64) -> f64 {
    let a = 0.5 / delta;
    (ln_gamma(a) - a * tau.ln()).exp() / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitenessReport {
    pub truncations: Vec<f64>,
    /// ln ∫₀^{Y_k} F^p M_β dy for each truncation Y_k.
    pub ln_values: Vec<f64>,
    pub report: RunReport,
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// ln ∫_a^b exp(h(y)) dy for a log-integrand h, scaled by its maximum on a
/// probe grid.
fn ln_integrate<F: Fn(f64) -> f64>(h: F, a: f64, b: f64) -> f64 {
    let invalid = std::cell::Cell::new(false);
    let h = |y: f64| {
        let v = h(y);
        if v.is_nan() || v == f64::INFINITY {
            invalid.set(true);
        }
        v
    };
    let probe = linspace(a, b, 65);
    let values: Vec<f64> = probe.iter().map(|&y| h(y)).collect();
    let (peak, shift) = probe
        .iter()
        .zip(&values)
        .filter(|(_, v)| v.is_finite())
        .fold((a, f64::NEG_INFINITY), |best, (&y, &v)| if v > best.1 { (y, v) } else { best });
    if shift == f64::NEG_INFINITY {
        return if invalid.get() { f64::NAN } else { f64::NEG_INFINITY };
    }
    // geometric refinement toward the probe maximum resolves peaks much
    // narrower than the probe spacing
    let cell = (b - a) / 64.0;
    let mut points = probe.clone();
    for k in 1..=48 {
        let d = cell * 0.5f64.powi(k);
        points.extend([peak - d, peak + d].into_iter().filter(|y| *y > a && *y < b));
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let scaled = |y: f64| {
        let v = h(y);
        if v.is_finite() {
            (v - shift).exp()
        } else {
            0.0
        }
    };
    let total = quad::FixedRule::from_breakpoints(&points).apply(scaled);
    if invalid.get() {
        return f64::NAN;
    }
    shift + total.ln()
}

/// Number of truncation doublings attempted by [`mixture_bound_finiteness`].
pub const FINITENESS_DOUBLINGS: usize = 8;

/// Truncations Y_k = y* 2^k of ∫₀^∞ F(t, δ, C, y, τ)^p M_β(y) dy; passes when
/// two successive values agree to [`FINITENESS_TOL`] relative.
pub fn mixture_bound_finiteness(beta: f64, p: f64, t: f64, delta: f64, c: f64, tau: f64) -> Result<FinitenessReport> {
    if !(beta > 0.0 && beta < 1.0) || !(p > 0.0) {
        return Err(Error::domain("mixture_bound_finiteness", "need 0 < beta < 1 and p > 0"));
    }
    check_f_args(delta, tau)?;
    let h = |y: f64| -> f64 {
        if y <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match (ln_f_integral(t, delta, c, y, tau), ln_m_wright_pdf(beta, y)) {
            (Ok(lf), Ok(lm)) => p * lf + lm,
            _ => f64::NAN,
        }
    };
    let start = m_wright_truncation(beta, M_WRIGHT_TAIL_EPS)?;
    let mut truncations = vec![start];
    let mut ln_values = vec![ln_integrate(&h, 0.0, start)];
    let mut change = f64::INFINITY;
    for _ in 0..FINITENESS_DOUBLINGS {
        let a = *truncations.last().unwrap();
        let b = 2.0 * a;
        let piece = ln_integrate(&h, a, b);
        if piece.is_nan() {
            return Err(Error::Divergence(format!("integrand not evaluable on [{a}, {b}]")));
        }
        let prev = *ln_values.last().unwrap();
        let next = log_sum_exp(prev, piece);
        truncations.push(b);
        ln_values.push(next);
        change = -(prev - next).exp_m1();
        if change < FINITENESS_TOL {
            break;
        }
    }
    let report = RunReport::new(
        format!("finiteness.p{p}.beta{beta}.delta{delta}"),
        change,
        FINITENESS_TOL,
        None,
        ToleranceRule::AtMost,
    );
    Ok(FinitenessReport {
        truncations,
        ln_values,
        report,
    })
}
