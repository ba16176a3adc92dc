//! Explicit left-point Euler scheme and the ggBm substitution pipeline.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::fields::VectorFieldSet;
use crate::error::{Error, Result};
use crate::fbm::{FbmGenerator, FbmMethod, SamplePath, TimeGrid};
use crate::grey_sampler::{sample_y_with, DRIVER_LANE, MIXING_LANE};
use crate::rng::RngStream;
use crate::specfun::GreyParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    #[default]
    Euler,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub grid: TimeGrid,
    pub x0: Vec<f64>,
    /// Coefficient factor √y applied to the diffusion; `None` means the
    /// driver already carries the mixing (factor 1).
    pub y: Option<f64>,
    pub method: SolveMethod,
}

impl SolveConfig {
    pub fn new(grid: TimeGrid, x0: Vec<f64>, y: Option<f64>) -> Result<Self> {
        if let Some(y) = y {
            if !(y > 0.0 && y.is_finite()) {
                return Err(Error::InvalidInput(format!("mixing value y = {y} must be > 0")));
            }
        }
        Ok(Self {
            grid,
            x0,
            y,
            method: SolveMethod::Euler,
        })
    }
}

/// X_{k+1} = X_k + V0(X_k) Δt + √y Σ_j V_j(X_k) ΔB^j_k.
pub fn euler_solve(fields: &VectorFieldSet, cfg: &SolveConfig, driver: &SamplePath) -> Result<SamplePath> {
    let n = fields.state_dim();
    let d = fields.driver_dim();
    if cfg.x0.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: cfg.x0.len(),
        });
    }
    if driver.dim() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            got: driver.dim(),
        });
    }
    if *driver.grid() != cfg.grid {
        return Err(Error::InvalidInput("driver grid differs from the solve grid".into()));
    }
    let scale = match cfg.y {
        Some(y) if !(y > 0.0) => {
            return Err(Error::InvalidInput(format!("mixing value y = {y} must be > 0")));
        }
        Some(y) => y.sqrt(),
        None => 1.0,
    };
    let steps = cfg.grid.steps();
    let dt = cfg.grid.dt();
    let mut values = vec![0.0; (steps + 1) * n];
    values[..n].copy_from_slice(&cfg.x0);
    let mut drift = vec![0.0; n];
    let mut diff = vec![0.0; n * d];
    let mut db = vec![0.0; d];
    for k in 0..steps {
        let (done, rest) = values.split_at_mut((k + 1) * n);
        let x = &done[k * n..];
        let next = &mut rest[..n];
        fields.drift(x, &mut drift);
        fields.diffusion(x, &mut diff);
        let (b0, b1) = (driver.row(k), driver.row(k + 1));
        for j in 0..d {
            db[j] = b1[j] - b0[j];
        }
        for i in 0..n {
            let noise: f64 = diff[i * d..(i + 1) * d].iter().zip(&db).map(|(v, b)| v * b).sum();
            next[i] = x[i] + drift[i] * dt + scale * noise;
            if !next[i].is_finite() {
                return Err(Error::NonFinite { step: k + 1 });
            }
        }
    }
    Ok(SamplePath::from_raw(cfg.grid, n, values))
}

/// One realization of the grey SDE together with its mixing value.
#[derive(Debug, Clone, PartialEq)]
pub struct GreySolution {
    pub y: f64,
    pub path: SamplePath,
}

/// Reusable solver: one fBm generator for many realizations.
#[derive(Debug, Clone)]
pub struct GreySdeSolver {
    fields: VectorFieldSet,
    x0: Vec<f64>,
    params: GreyParams,
    generator: FbmGenerator,
}

impl GreySdeSolver {
    pub fn new(
        fields: VectorFieldSet,
        x0: Vec<f64>,
        params: GreyParams,
        grid: TimeGrid,
        method: FbmMethod,
    ) -> Result<Self> {
        params.require_sde_range()?;
        if x0.len() != fields.state_dim() {
            return Err(Error::LengthMismatch {
                expected: fields.state_dim(),
                got: x0.len(),
            });
        }
        Ok(Self {
            generator: FbmGenerator::new(method, params.hurst(), grid)?,
            fields,
            x0,
            params,
        })
    }

    pub fn fields(&self) -> &VectorFieldSet {
        &self.fields
    }

    pub fn grid(&self) -> &TimeGrid {
        self.generator.grid()
    }

    pub fn generator(&self) -> &FbmGenerator {
        &self.generator
    }

    /// Draws the unscaled fBm driver.
    pub fn driver<R: Rng + ?Sized>(&self, rng: &mut R) -> SamplePath {
        self.generator.sample(self.fields.driver_dim(), rng)
    }

    pub fn solve_with<R1, R2>(&self, mixing: &mut R1, driver: &mut R2) -> Result<GreySolution>
    where
        R1: Rng + ?Sized,
        R2: Rng + ?Sized,
    {
        let y = sample_y_with(self.params.beta(), mixing);
        let b = self.driver(driver);
        let cfg = SolveConfig::new(*self.grid(), self.x0.clone(), Some(y))?;
        Ok(GreySolution {
            y,
            path: euler_solve(&self.fields, &cfg, &b)?,
        })
    }

    pub fn solve(&self, stream: &RngStream) -> Result<GreySolution> {
        self.solve_with(
            &mut stream.lane(MIXING_LANE).rng(),
            &mut stream.lane(DRIVER_LANE).rng(),
        )
    }
}

/// Samples Y_β and B_H from `stream` and solves with y = Y_β.
pub fn solve_grey_sde(
    fields: &VectorFieldSet,
    x0: &[f64],
    params: &GreyParams,
    grid: TimeGrid,
    stream: &RngStream,
    method: FbmMethod,
) -> Result<GreySolution> {
    GreySdeSolver::new(fields.clone(), x0.to_vec(), *params, grid, method)?.solve(stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sde::fields::BuiltinField;

    fn constant(sigma: f64, b: f64) -> VectorFieldSet {
        VectorFieldSet::new(BuiltinField::constant_scalar(sigma, b)).unwrap()
    }

    #[test]
    fn zero_fields_give_constant_path() {
        let g = TimeGrid::new(1.0, 16).unwrap();
        let driver = SamplePath::from_scalar(g, g.points().iter().map(|t| t.sin()).collect()).unwrap();
        let cfg = SolveConfig::new(g, vec![2.5], Some(3.0)).unwrap();
        let x = euler_solve(&constant(0.0, 0.0), &cfg, &driver).unwrap();
        assert!(x.values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn affine_case_is_exact() {
        let g = TimeGrid::new(1.0, 64).unwrap();
        let driver = SamplePath::from_scalar(g, g.points()).unwrap();
        let (x0, b, sigma, y) = (0.3, 0.7, 1.3, 2.0);
        let cfg = SolveConfig::new(g, vec![x0], Some(y)).unwrap();
        let x = euler_solve(&constant(sigma, b), &cfg, &driver).unwrap();
        for k in 0..=64 {
            let t = g.t(k);
            assert!((x.row(k)[0] - (x0 + b * t + y.sqrt() * sigma * t)).abs() < 1e-13);
        }
    }

    #[test]
    fn shape_errors() {
        let g = TimeGrid::new(1.0, 8).unwrap();
        let driver = SamplePath::from_scalar(g, vec![0.0; 9]).unwrap();
        let f = constant(1.0, 0.0);
        assert!(euler_solve(&f, &SolveConfig::new(g, vec![0.0, 0.0], None).unwrap(), &driver).is_err());
        let other = SolveConfig::new(TimeGrid::new(2.0, 8).unwrap(), vec![0.0], None).unwrap();
        assert!(euler_solve(&f, &other, &driver).is_err());
        assert!(SolveConfig::new(g, vec![0.0], Some(0.0)).is_err());
    }

    #[test]
    fn overflow_reports_step() {
        let g = TimeGrid::new(1.0, 4).unwrap();
        let driver = SamplePath::from_scalar(g, vec![0.0, 1e308, -1e308, 0.0, 0.0]).unwrap();
        let cfg = SolveConfig::new(g, vec![0.0], None).unwrap();
        let r = euler_solve(&constant(10.0, 0.0), &cfg, &driver);
        assert!(matches!(r, Err(Error::NonFinite { step: 1 })));
    }

    #[test]
    fn grey_solve_records_y_and_requires_range() {
        let g = TimeGrid::new(1.0, 32).unwrap();
        let f = constant(1.0, 0.0);
        let p = GreyParams::new(1.5, 0.6).unwrap();
        let s = RngStream::new(5, 2);
        let a = solve_grey_sde(&f, &[0.0], &p, g, &s, FbmMethod::Circulant).unwrap();
        let b = solve_grey_sde(&f, &[0.0], &p, g, &s, FbmMethod::Circulant).unwrap();
        assert_eq!(a, b);
        assert!(a.y > 0.0);
        let low = GreyParams::new(0.8, 0.6).unwrap();
        assert!(solve_grey_sde(&f, &[0.0], &low, g, &s, FbmMethod::Circulant).is_err());
    }
}
