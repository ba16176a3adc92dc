//! Fractional Brownian motion on a uniform grid.
//!
//! Two exact generators are provided: a Cholesky factorization of the path
//! covariance (cost guard `n ≤ 4096`) and circulant embedding of fractional
//! Gaussian noise through the FFT. Discrete Hölder norms of the generated
//! paths feed the Fernique-type checks.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{RunReport, ToleranceRule};
use crate::rng::{MonteCarlo, RngStream};

/// Largest step count the Cholesky generator accepts.
pub const CHOLESKY_MAX_STEPS: usize = 4096;
/// Embedding eigenvalues above `-EIGEN_CLIP` are clipped to zero.
pub const EIGEN_CLIP: f64 = 1e-9;
/// Above this many steps the Hölder seminorm only scans dyadic lags.
pub const HOELDER_ALL_PAIRS_MAX: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidInput(format!("grid horizon {horizon} must be > 0")));
        }
        if steps == 0 {
            return Err(Error::InvalidInput("grid needs at least one step".into()));
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn t(&self, k: usize) -> f64 {
        if k == self.steps {
            self.horizon
        } else {
            k as f64 * self.horizon / self.steps as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.t(k)).collect()
    }

    /// Grid point index closest to `t`.
    pub fn index_of(&self, t: f64) -> usize {
        ((t / self.dt()).round().max(0.0) as usize).min(self.steps)
    }

    /// The grid with every `factor`-th point.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.steps % factor != 0 {
            return Err(Error::InvalidInput(format!(
                "cannot coarsen {} steps by {factor}",
                self.steps
            )));
        }
        TimeGrid::new(self.horizon, self.steps / factor)
    }
}

/// Path values on a grid, row-major `(steps + 1) × dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: TimeGrid,
    dim: usize,
    values: Vec<f64>,
}

impl SamplePath {
    pub fn new(grid: TimeGrid, dim: usize, values: Vec<f64>) -> Result<Self> {
        let expected = (grid.steps() + 1) * dim;
        if dim == 0 || values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: pos / dim });
        }
        Ok(Self { grid, dim, values })
    }

    pub(crate) fn from_raw(grid: TimeGrid, dim: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), (grid.steps() + 1) * dim);
        Self { grid, dim, values }
    }

    pub fn from_scalar(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, 1, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.grid.steps() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn terminal(&self) -> &[f64] {
        self.row(self.grid.steps())
    }

    pub fn component(&self, j: usize) -> Vec<f64> {
        self.values.iter().skip(j).step_by(self.dim).copied().collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            dim: self.dim,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Keeps every `factor`-th grid point.
    pub fn subsample(&self, factor: usize) -> Result<Self> {
        let grid = self.grid.coarsen(factor)?;
        let values = (0..=grid.steps())
            .flat_map(|k| self.row(k * factor).iter().copied())
            .collect();
        Ok(Self::from_raw(grid, self.dim, values))
    }

    /// Largest Euclidean distance between corresponding rows.
    pub fn max_distance(&self, other: &SamplePath) -> f64 {
        (0..self.len())
            .map(|k| euclid_diff(self.row(k), other.row(k)))
            .fold(0.0, f64::max)
    }

    /// sup_k |x_k| in the Euclidean norm.
    pub fn sup_norm(&self) -> f64 {
        (0..self.len())
            .map(|k| self.row(k).iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

fn euclid_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        return (a[0] - b[0]).abs();
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// E[B_H(t) B_H(s)] = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
pub fn fbm_covariance(hurst: f64, t: f64, s: f64) -> f64 {
    let h2 = 2.0 * hurst;
    0.5 * (t.powf(h2) + s.powf(h2) - (t - s).abs().powf(h2))
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
fn fgn_autocovariance(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("fbm", format!("Hurst index {hurst} not in (0, 1)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FbmMethod {
    Cholesky,
    Circulant,
}

impl fmt::Display for FbmMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FbmMethod::Cholesky => "cholesky",
            FbmMethod::Circulant => "circulant",
        })
    }
}

impl FromStr for FbmMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cholesky" => Ok(FbmMethod::Cholesky),
            "circulant" => Ok(FbmMethod::Circulant),
            _ => Err(Error::InvalidInput(format!("unknown fbm method '{s}'"))),
        }
    }
}

/// Lower Cholesky factor of the covariance of `(B_H(t_1), …, B_H(t_n))`.
#[derive(Debug, Clone)]
pub struct CholeskyFbm {
    hurst: f64,
    grid: TimeGrid,
    // packed lower triangle, row i holds i + 1 entries
    lower: Vec<f64>,
}

impl CholeskyFbm {
    pub fn new(hurst: f64, grid: TimeGrid) -> Result<Self> {
        check_hurst(hurst)?;
        let n = grid.steps();
        if n > CHOLESKY_MAX_STEPS {
            return Err(Error::InvalidInput(format!(
                "Cholesky generator limited to {CHOLESKY_MAX_STEPS} steps, got {n}"
            )));
        }
        let row_start = |i: usize| i * (i + 1) / 2;
        let mut lower = vec![0.0; row_start(n)];
        for i in 0..n {
            let ti = grid.t(i + 1);
            for j in 0..=i {
                let tj = grid.t(j + 1);
                let (ri, rj) = (row_start(i), row_start(j));
                let mut sum = fbm_covariance(hurst, ti, tj);
                for k in 0..j {
                    sum -= lower[ri + k] * lower[rj + k];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: sum });
                    }
                    lower[ri + i] = sum.sqrt();
                } else {
                    lower[ri + j] = sum / lower[rj + j];
                }
            }
        }
        Ok(Self { hurst, grid, lower })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// Fills `out` (length `steps + 1`) with one coordinate.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let n = self.grid.steps();
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        out[0] = 0.0;
        let mut start = 0;
        for i in 0..n {
            let row = &self.lower[start..start + i + 1];
            out[i + 1] = row.iter().zip(&z).map(|(l, z)| l * z).sum();
            start += i + 1;
        }
    }
}

/// Circulant embedding of fractional Gaussian noise.
#[derive(Clone)]
pub struct CirculantFbm {
    hurst: f64,
    grid: TimeGrid,
    // sqrt(λ_j / m) for the 2n-point embedding
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    min_eigenvalue: f64,
}

impl fmt::Debug for CirculantFbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CirculantFbm")
            .field("hurst", &self.hurst)
            .field("grid", &self.grid)
            .field("min_eigenvalue", &self.min_eigenvalue)
            .finish()
    }
}

impl CirculantFbm {
    pub fn new(hurst: f64, grid: TimeGrid) -> Result<Self> {
        check_hurst(hurst)?;
        let n = grid.steps();
        let m = 2 * n;
        let mut row: Vec<Complex<f64>> = (0..m)
            .map(|k| {
                let lag = if k <= n { k } else { m - k };
                Complex::new(fgn_autocovariance(hurst, lag), 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut row);
        let min_eigenvalue = row.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -EIGEN_CLIP {
            return Err(Error::NegativeEmbedding { min_eigenvalue });
        }
        let scale = row
            .iter()
            .map(|c| (c.re.max(0.0) / m as f64).sqrt())
            .collect();
        Ok(Self {
            hurst,
            grid,
            scale,
            fft,
            min_eigenvalue,
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Two independent coordinates from one transform (real and imaginary
    /// parts). Each output has length `steps + 1`.
    pub fn sample_pair_into<R: Rng + ?Sized>(&self, rng: &mut R, a: &mut [f64], b: &mut [f64]) {
        let n = self.grid.steps();
        let mut buf: Vec<Complex<f64>> = self
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        let step = self.grid.dt().powf(self.hurst);
        a[0] = 0.0;
        b[0] = 0.0;
        for k in 0..n {
            a[k + 1] = a[k] + step * buf[k].re;
            b[k + 1] = b[k] + step * buf[k].im;
        }
    }
}

/// Emitted when circulant embedding had to fall back to Cholesky.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FallbackEvent {
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct FbmGenerator {
    kind: GeneratorKind,
    fallback: Option<FallbackEvent>,
}

#[derive(Debug, Clone)]
enum GeneratorKind {
    Cholesky(CholeskyFbm),
    Circulant(CirculantFbm),
}

impl FbmGenerator {
    pub fn new(method: FbmMethod, hurst: f64, grid: TimeGrid) -> Result<Self> {
        match method {
            FbmMethod::Cholesky => Ok(Self {
                kind: GeneratorKind::Cholesky(CholeskyFbm::new(hurst, grid)?),
                fallback: None,
            }),
            FbmMethod::Circulant => match CirculantFbm::new(hurst, grid) {
                Ok(c) => Ok(Self {
                    kind: GeneratorKind::Circulant(c),
                    fallback: None,
                }),
                Err(Error::NegativeEmbedding { min_eigenvalue }) => {
                    log::warn!(
                        "circulant embedding eigenvalue {min_eigenvalue:e} < -{EIGEN_CLIP:e}; \
                         falling back to Cholesky"
                    );
                    Ok(Self {
                        kind: GeneratorKind::Cholesky(CholeskyFbm::new(hurst, grid)?),
                        fallback: Some(FallbackEvent { min_eigenvalue }),
                    })
                }
                Err(e) => Err(e),
            },
        }
    }

    pub fn method(&self) -> FbmMethod {
        match self.kind {
            GeneratorKind::Cholesky(_) => FbmMethod::Cholesky,
            GeneratorKind::Circulant(_) => FbmMethod::Circulant,
        }
    }

    /// Set when a circulant request was served by the Cholesky generator.
    pub fn fallback(&self) -> Option<FallbackEvent> {
        self.fallback
    }

    pub fn hurst(&self) -> f64 {
        match &self.kind {
            GeneratorKind::Cholesky(c) => c.hurst,
            GeneratorKind::Circulant(c) => c.hurst,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        match &self.kind {
            GeneratorKind::Cholesky(c) => &c.grid,
            GeneratorKind::Circulant(c) => &c.grid,
        }
    }

    /// One `dim`-dimensional path with independent coordinates.
    pub fn sample<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> SamplePath {
        let grid = *self.grid();
        let len = grid.steps() + 1;
        let mut cols = vec![vec![0.0; len]; dim];
        match &self.kind {
            GeneratorKind::Cholesky(c) => {
                for col in cols.iter_mut() {
                    c.sample_into(rng, col);
                }
            }
            GeneratorKind::Circulant(c) => {
                let mut spare = vec![0.0; len];
                for pair in cols.chunks_mut(2) {
                    match pair {
                        [a, b] => c.sample_pair_into(rng, a, b),
                        [a] => c.sample_pair_into(rng, a, &mut spare),
                        _ => unreachable!(),
                    }
                }
            }
        }
        let mut values = vec![0.0; len * dim];
        for (j, col) in cols.iter().enumerate() {
            for (k, v) in col.iter().enumerate() {
                values[k * dim + j] = *v;
            }
        }
        SamplePath::from_raw(grid, dim, values)
    }
}

pub fn generate_fbm_cholesky(
    hurst: f64,
    grid: TimeGrid,
    dim: usize,
    stream: &RngStream,
) -> Result<SamplePath> {
    let generator = FbmGenerator::new(FbmMethod::Cholesky, hurst, grid)?;
    Ok(generator.sample(dim, &mut stream.rng()))
}

pub fn generate_fbm_circulant(
    hurst: f64,
    grid: TimeGrid,
    dim: usize,
    stream: &RngStream,
) -> Result<SamplePath> {
    let generator = FbmGenerator::new(FbmMethod::Circulant, hurst, grid)?;
    Ok(generator.sample(dim, &mut stream.rng()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoelderNorm {
    pub delta: f64,
    pub sup_norm: f64,
    pub hoelder_seminorm: f64,
}

impl HoelderNorm {
    pub fn total(&self) -> f64 {
        self.sup_norm + self.hoelder_seminorm
    }
}

/// Discrete Hölder norm; vector increments are measured in the Euclidean
/// norm. A lower bound of the continuum norm.
pub fn hoelder_norm(path: &SamplePath, delta: f64) -> Result<HoelderNorm> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("hoelder_norm", format!("delta = {delta} not in (0, 1)")));
    }
    let n = path.grid().steps();
    let dt = path.grid().dt();
    let lags: Vec<usize> = if n <= HOELDER_ALL_PAIRS_MAX {
        (1..=n).collect()
    } else {
        let mut v: Vec<usize> = std::iter::successors(Some(1usize), |l| l.checked_mul(2))
            .take_while(|&l| l <= n)
            .collect();
        if *v.last().unwrap() != n {
            v.push(n);
        }
        v
    };
    let mut seminorm: f64 = 0.0;
    for lag in lags {
        let weight = (lag as f64 * dt).powf(-delta);
        let mut best: f64 = 0.0;
        for i in 0..=n - lag {
            best = best.max(euclid_diff(path.row(i + lag), path.row(i)));
        }
        seminorm = seminorm.max(best * weight);
    }
    Ok(HoelderNorm {
        delta,
        sup_norm: path.sup_norm(),
        hoelder_seminorm: seminorm,
    })
}

/// Right-hand side 32^k (2T)^{2k(H-δ)} (2k)! of the Hölder moment bound.
pub fn hoelder_moment_bound(hurst: f64, delta: f64, horizon: f64, k: u32) -> f64 {
    let kf = f64::from(k);
    let fact: f64 = (1..=2 * k).map(f64::from).product();
    32f64.powi(k as i32) * (2.0 * horizon).powf(2.0 * kf * (hurst - delta)) * fact
}

/// The admissible τ = 1/(256 (2T)^{2(H-δ)}) (half the critical value) and its
/// constant M = (1 - 128 τ (2T)^{2(H-δ)})^{-1/2}.
pub fn fernique_constants(hurst: f64, delta: f64, horizon: f64) -> (f64, f64) {
    let scale = (2.0 * horizon).powf(2.0 * (hurst - delta));
    let tau = 0.5 / (128.0 * scale);
    let m = (1.0 - 128.0 * tau * scale).powf(-0.5);
    (tau, m)
}

fn check_fernique_args(hurst: f64, delta: f64) -> Result<()> {
    if 0.5 < delta && delta < hurst && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(
            "hoelder_norm_moments",
            format!("need 1/2 < delta < H < 1, got delta = {delta}, H = {hurst}"),
        ))
    }
}

/// Discrete Hölder seminorms of `count` independent fBm paths.
pub fn hoelder_seminorm_samples(
    hurst: f64,
    delta: f64,
    grid: TimeGrid,
    dim: usize,
    count: usize,
    mc: &MonteCarlo,
) -> Result<Vec<f64>> {
    check_fernique_args(hurst, delta)?;
    let generator = FbmGenerator::new(FbmMethod::Circulant, hurst, grid)?;
    let norms = mc.shards(count, |rng, n| {
        (0..n)
            .map(|_| {
                let path = generator.sample(dim, rng);
                hoelder_norm(&path, delta).map(|h| h.hoelder_seminorm)
            })
            .collect()
    });
    norms.into_iter().collect()
}

/// Monte Carlo check of E‖B_H‖_δ^{2k} ≤ 32^k (2T)^{2k(H-δ)} (2k)!.
pub fn hoelder_norm_moments(
    hurst: f64,
    delta: f64,
    grid: TimeGrid,
    k: u32,
    count: usize,
    mc: &MonteCarlo,
) -> Result<RunReport> {
    let started = Instant::now();
    let norms = hoelder_seminorm_samples(hurst, delta, grid, 1, count, mc)?;
    Ok(hoelder_moment_report(&norms, hurst, delta, grid.horizon(), k)
        .with_run(mc.seed, mc.streams)
        .with_runtime(started))
}

pub fn hoelder_moment_report(norms: &[f64], hurst: f64, delta: f64, horizon: f64, k: u32) -> RunReport {
    let powered: Vec<f64> = norms.iter().map(|v| v.powi(2 * k as i32)).collect();
    let est = crate::stats::mean_se(&powered);
    RunReport::new(
        format!("fernique.moment.k{k}"),
        est.mean,
        hoelder_moment_bound(hurst, delta, horizon, k),
        Some(est.se),
        ToleranceRule::AtMost,
    )
}

/// Largest excess of the empirical survival of the seminorm over
/// M e^{-τ r²} across `radii`; passes when it is ≤ 0.
pub fn fernique_tail_report(norms: &[f64], hurst: f64, delta: f64, horizon: f64, radii: &[f64]) -> RunReport {
    let (tau, m) = fernique_constants(hurst, delta, horizon);
    let n = norms.len() as f64;
    let worst = radii
        .iter()
        .map(|&r| {
            let survival = norms.iter().filter(|&&v| v > r).count() as f64 / n;
            survival - m * (-tau * r * r).exp()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    RunReport::new("fernique.tail", worst, 0.0, None, ToleranceRule::AtMost)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_examples() {
        assert!((fbm_covariance(0.7, 1.0, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(fbm_covariance(0.7, 1.3, 0.0), 0.0);
        assert!((fbm_covariance(0.75, 1.0, 2.0) - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(fbm_covariance(0.6, 0.3, 0.8), fbm_covariance(0.6, 0.8, 0.3));
    }

    #[test]
    fn grid_points() {
        let g = TimeGrid::new(2.0, 4).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(TimeGrid::new(0.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        assert_eq!(g.coarsen(2).unwrap().steps(), 2);
        assert!(g.coarsen(3).is_err());
    }

    #[test]
    fn cholesky_guard_and_domain() {
        let g = TimeGrid::new(1.0, CHOLESKY_MAX_STEPS + 1).unwrap();
        assert!(CholeskyFbm::new(0.7, g).is_err());
        let g = TimeGrid::new(1.0, 8).unwrap();
        assert!(CholeskyFbm::new(1.0, g).is_err());
        assert!(CirculantFbm::new(0.0, g).is_err());
    }

    #[test]
    fn paths_start_at_zero_and_repeat() {
        let g = TimeGrid::new(1.0, 64).unwrap();
        let s = RngStream::new(11, 2);
        for method in [FbmMethod::Cholesky, FbmMethod::Circulant] {
            let gen = FbmGenerator::new(method, 0.75, g).unwrap();
            let a = gen.sample(3, &mut s.rng());
            let b = gen.sample(3, &mut s.rng());
            assert_eq!(a, b);
            assert_eq!(a.row(0), &[0.0, 0.0, 0.0]);
            assert_eq!(a.len(), 65);
        }
    }

    #[test]
    fn circulant_eigenvalues_nonnegative_for_long_memory() {
        for &h in &[0.55, 0.75, 0.95] {
            let c = CirculantFbm::new(h, TimeGrid::new(1.0, 1000).unwrap()).unwrap();
            assert!(c.min_eigenvalue() > -EIGEN_CLIP);
        }
        let gen = FbmGenerator::new(FbmMethod::Circulant, 0.3, TimeGrid::new(1.0, 100).unwrap()).unwrap();
        assert!(gen.fallback().is_none());
    }

    #[test]
    fn hoelder_constant_and_linear() {
        let g = TimeGrid::new(1.0, 50).unwrap();
        let c = SamplePath::from_scalar(g, vec![-2.5; 51]).unwrap();
        let h = hoelder_norm(&c, 0.6).unwrap();
        assert_eq!(h.sup_norm, 2.5);
        assert_eq!(h.hoelder_seminorm, 0.0);
        let lin = SamplePath::from_scalar(g, g.points()).unwrap();
        let h = hoelder_norm(&lin, 0.6).unwrap();
        assert!((h.hoelder_seminorm - 1.0).abs() < 1e-14);
        assert!((h.total() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hoelder_dyadic_above_threshold_is_lower_bound() {
        let g = TimeGrid::new(1.0, 4096).unwrap();
        let path = FbmGenerator::new(FbmMethod::Circulant, 0.75, g)
            .unwrap()
            .sample(1, &mut RngStream::new(5, 0).rng());
        let dyadic = hoelder_norm(&path, 0.6).unwrap().hoelder_seminorm;
        // brute force over all pairs
        let v = path.values();
        let mut full: f64 = 0.0;
        for lag in 1..=4096usize {
            let w = (lag as f64 / 4096.0).powf(-0.6);
            for i in 0..=4096 - lag {
                full = full.max((v[i + lag] - v[i]).abs() * w);
            }
        }
        assert!(dyadic <= full + 1e-12);
        assert!(dyadic > 0.5 * full);
    }

    #[test]
    fn moment_bound_values() {
        let b1 = hoelder_moment_bound(0.75, 0.6, 1.0, 1);
        assert!((b1 - 32.0 * 2f64.powf(0.3) * 2.0).abs() < 1e-12);
        assert!((b1 - 78.8).abs() < 0.1);
        let b2 = hoelder_moment_bound(0.75, 0.6, 1.0, 2);
        assert!((b2 - 1024.0 * 2f64.powf(0.6) * 24.0).abs() < 1e-9);
        // δ → H
        assert!((hoelder_moment_bound(0.75, 0.75, 1.0, 2) - 1024.0 * 24.0).abs() < 1e-9);
    }

    #[test]
    fn fernique_args_checked() {
        let g = TimeGrid::new(1.0, 16).unwrap();
        let mc = MonteCarlo::new(1, 1);
        assert!(hoelder_norm_moments(0.75, 0.8, g, 1, 10, &mc).is_err());
        assert!(hoelder_norm_moments(0.75, 0.4, g, 1, 10, &mc).is_err());
    }

    #[test]
    fn subsample_keeps_points() {
        let g = TimeGrid::new(1.0, 8).unwrap();
        let p = SamplePath::from_scalar(g, (0..9).map(|k| k as f64).collect()).unwrap();
        let q = p.subsample(4).unwrap();
        assert_eq!(q.values(), &[0.0, 4.0, 8.0]);
    }

    #[test]
    fn sample_path_rejects_nonfinite() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        assert!(SamplePath::from_scalar(g, vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(SamplePath::from_scalar(g, vec![0.0, 1.0]).is_err());
    }
}
