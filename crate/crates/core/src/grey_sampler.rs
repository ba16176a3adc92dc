//! Exact sampling of the mixing variable Y_β and of ggBm via B = √Y · B_H.
//!
//! Y_β = S^{-β} where S is one-sided β-stable with Laplace transform
//! e^{-λ^β}. With Kanter's representation S^{β/(1-β)} = A(U)/E this gives
//! Y_β = (E / A(U))^{1-β}, U uniform on (0, π), E standard exponential.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::fbm::{FbmGenerator, FbmMethod, SamplePath, TimeGrid};
use crate::rng::RngStream;
use crate::specfun::{kanter_ln_a, ln_gamma, GreyParams};

/// Lane used for mixing draws; the driver path uses [`DRIVER_LANE`].
pub const MIXING_LANE: u32 = 0;
pub const DRIVER_LANE: u32 = 1;

/// One realization of Y_β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingDraw {
    pub y: f64,
}

/// Draws Y_β from a live generator.
pub fn sample_y_with<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    if beta == 1.0 {
        return 1.0;
    }
    let u = std::f64::consts::PI * open_unit(rng);
    let e = -open_unit(rng).ln();
    ((1.0 - beta) * (e.ln() - kanter_ln_a(beta, u))).exp()
}

/// Uniform on the open interval (0, 1).
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

pub fn sample_y(params: &GreyParams, stream: &RngStream) -> MixingDraw {
    MixingDraw {
        y: sample_y_with(params.beta(), &mut stream.lane(MIXING_LANE).rng()),
    }
}

/// E Y_β^n = n! / Γ(βn + 1).
pub fn y_moment(beta: f64, n: u32) -> f64 {
    let nf = f64::from(n);
    (ln_gamma(nf + 1.0) - ln_gamma(beta * nf + 1.0)).exp()
}

/// √Y t^{α/2} Z with Z standard normal in R^d.
pub fn sample_marginal_with<R: Rng + ?Sized>(params: &GreyParams, t: f64, dim: usize, rng: &mut R) -> Vec<f64> {
    let y = sample_y_with(params.beta(), rng);
    let scale = y.sqrt() * t.powf(params.hurst());
    (0..dim)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

pub fn sample_ggbm_marginal(params: &GreyParams, t: f64, dim: usize, stream: &RngStream) -> Vec<f64> {
    sample_marginal_with(params, t, dim, &mut stream.rng())
}

/// Reusable ggBm path sampler: one fBm generator, many paths.
#[derive(Debug, Clone)]
pub struct GgbmPathSampler {
    params: GreyParams,
    generator: FbmGenerator,
}

impl GgbmPathSampler {
    pub fn new(params: GreyParams, grid: TimeGrid, method: FbmMethod) -> Result<Self> {
        Ok(Self {
            params,
            generator: FbmGenerator::new(method, params.hurst(), grid)?,
        })
    }

    pub fn params(&self) -> &GreyParams {
        &self.params
    }

    pub fn generator(&self) -> &FbmGenerator {
        &self.generator
    }

    /// Path `√y · B_H` from separate generators for `y` and the driver.
    pub fn sample_with<R1, R2>(&self, dim: usize, mixing: &mut R1, driver: &mut R2) -> (f64, SamplePath)
    where
        R1: Rng + ?Sized,
        R2: Rng + ?Sized,
    {
        let y = sample_y_with(self.params.beta(), mixing);
        let path = self.generator.sample(dim, driver);
        (y, path.scaled(y.sqrt()))
    }

    pub fn sample(&self, dim: usize, stream: &RngStream) -> (f64, SamplePath) {
        self.sample_with(
            dim,
            &mut stream.lane(MIXING_LANE).rng(),
            &mut stream.lane(DRIVER_LANE).rng(),
        )
    }
}

pub fn sample_ggbm_path(
    params: &GreyParams,
    grid: TimeGrid,
    dim: usize,
    stream: &RngStream,
    method: FbmMethod,
) -> Result<SamplePath> {
    Ok(GgbmPathSampler::new(*params, grid, method)?.sample(dim, stream).1)
}
