//! Pathwise and Monte Carlo checks of the solution map y ↦ X(y).

use serde::{Deserialize, Serialize};

use super::fields::VectorFieldSet;
use super::solver::{euler_solve, SolveConfig};
use crate::error::{Error, Result};
use crate::fbm::{hoelder_norm, FbmGenerator, FbmMethod, HoelderNorm, SamplePath, TimeGrid};
use crate::grey_sampler::{sample_y, DRIVER_LANE};
use crate::report::{RunReport, ToleranceRule};
use crate::rng::{MonteCarlo, RngStream};
use crate::specfun::GreyParams;

/// Relative tolerance for the substitution identity.
pub const SUBSTITUTION_TOL: f64 = 1e-12;
/// Allowed spread of the Lipschitz and fourth-moment ratio sequences.
pub const RATIO_SPREAD_MAX: f64 = 10.0;
/// Number of dyadic refinements of |y - ỹ| used by the regularity checks.
pub const DYADIC_LEVELS: usize = 5;

fn solve_at(fields: &VectorFieldSet, x0: &[f64], driver: &SamplePath, y: f64) -> Result<SamplePath> {
    euler_solve(fields, &SolveConfig::new(*driver.grid(), x0.to_vec(), Some(y))?, driver)
}

fn difference(a: &SamplePath, b: &SamplePath) -> SamplePath {
    let values = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
    SamplePath::from_raw(*a.grid(), a.dim(), values)
}

/// Relative pathwise discrepancy between the driver-scaled and the
/// coefficient-scaled solutions for one draw of (Y_β, B_H).
pub fn substitution_discrepancy(
    fields: &VectorFieldSet,
    x0: &[f64],
    params: &GreyParams,
    grid: TimeGrid,
    stream: &RngStream,
) -> Result<f64> {
    params.require_sde_range()?;
    let y = sample_y(params, stream).y;
    let generator = FbmGenerator::new(FbmMethod::Circulant, params.hurst(), grid)?;
    let b = generator.sample(fields.driver_dim(), &mut stream.lane(DRIVER_LANE).rng());
    let driver_scaled = euler_solve(fields, &SolveConfig::new(grid, x0.to_vec(), None)?, &b.scaled(y.sqrt()))?;
    let coeff_scaled = solve_at(fields, x0, &b, y)?;
    let gap = driver_scaled.max_distance(&coeff_scaled);
    if gap == 0.0 {
        return Ok(0.0);
    }
    Ok(gap / coeff_scaled.sup_norm().max(f64::MIN_POSITIVE))
}

pub fn substitution_identity_check(
    fields: &VectorFieldSet,
    x0: &[f64],
    params: &GreyParams,
    grid: TimeGrid,
    stream: &RngStream,
) -> Result<RunReport> {
    let gap = substitution_discrepancy(fields, x0, params, grid, stream)?;
    Ok(RunReport::new(
        format!("substitution.{}", fields.field().name()),
        gap,
        0.0,
        None,
        ToleranceRule::Abs(SUBSTITUTION_TOL),
    )
    .with_run(stream.seed, 1))
}

/// ỹ_j = y + (ỹ − y) / 2^j for j = 0..=levels.
pub fn dyadic_sequence(y: f64, y_tilde: f64, levels: usize) -> Vec<f64> {
    (0..=levels)
        .map(|j| y + (y_tilde - y) / f64::powi(2.0, j as i32))
        .collect()
}

/// max/min of a ratio sequence; 1 when every entry vanishes.
fn spread(ratios: &[f64]) -> f64 {
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        1.0
    } else if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// (ỹ, ‖X(y) − X(ỹ)‖_δ, ratio to |√y − √ỹ|)
    pub sequence: Vec<(f64, f64, f64)>,
    pub driver_norm: HoelderNorm,
    pub report: RunReport,
}

/// Ratios ‖X(y) − X(ỹ_j)‖_δ / |√y − √ỹ_j| along a dyadic sequence ỹ_j → y
/// for one fixed driver.
pub fn y_lipschitz_pathwise(
    fields: &VectorFieldSet,
    x0: &[f64],
    driver: &SamplePath,
    y: f64,
    y_tilde: f64,
    delta: f64,
) -> Result<LipschitzReport> {
    if !(y > 0.0 && y_tilde > 0.0) {
        return Err(Error::InvalidInput("y and y_tilde must be > 0".into()));
    }
    let base = solve_at(fields, x0, driver, y)?;
    let mut sequence = Vec::new();
    if y != y_tilde {
        for yt in dyadic_sequence(y, y_tilde, DYADIC_LEVELS) {
            let other = solve_at(fields, x0, driver, yt)?;
            let norm = hoelder_norm(&difference(&base, &other), delta)?.total();
            sequence.push((yt, norm, norm / (y.sqrt() - yt.sqrt()).abs()));
        }
    } else {
        sequence.push((y, 0.0, 0.0));
    }
    let ratios: Vec<f64> = sequence.iter().map(|s| s.2).collect();
    let report = RunReport::new(
        format!("regularity.lipschitz.{}", fields.field().name()),
        spread(&ratios),
        RATIO_SPREAD_MAX,
        None,
        ToleranceRule::AtMost,
    );
    Ok(LipschitzReport {
        sequence,
        driver_norm: hoelder_norm(driver, delta)?,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub gaps: Vec<f64>,
    /// MC estimates of E sup_s |X_s(y) − X_s(ỹ)|⁴, one per gap.
    pub fourth_moments: Vec<f64>,
    pub standard_errors: Vec<f64>,
    /// fourth moment / |y − ỹ|².
    pub ratios: Vec<f64>,
    pub report: RunReport,
}

/// Monte Carlo estimate of E sup|X(y) − X(ỹ_j)|⁴ / |y − ỹ_j|² over `count`
/// common drivers along ỹ_j = y + (ỹ − y)/2^{j−1}, j = 1..=5.
#[allow(clippy::too_many_arguments)]
pub fn y_regularity_stat(
    fields: &VectorFieldSet,
    x0: &[f64],
    params: &GreyParams,
    grid: TimeGrid,
    y: f64,
    y_tilde: f64,
    count: usize,
    mc: &MonteCarlo,
) -> Result<RegularityReport> {
    params.require_sde_range()?;
    if !(y > 0.0 && y_tilde > 0.0) {
        return Err(Error::InvalidInput("y and y_tilde must be > 0".into()));
    }
    let targets: Vec<f64> = dyadic_sequence(y, y_tilde, DYADIC_LEVELS - 1);
    let generator = FbmGenerator::new(FbmMethod::Circulant, params.hurst(), grid)?;
    let d = fields.driver_dim();
    let rows: Vec<Result<Vec<f64>>> = mc.stream_shards(count, |stream, n| {
        let mut rng = stream.lane(DRIVER_LANE).rng();
        (0..n)
            .map(|_| {
                let b = generator.sample(d, &mut rng);
                let base = solve_at(fields, x0, &b, y)?;
                targets
                    .iter()
                    .map(|&yt| Ok(solve_at(fields, x0, &b, yt)?.max_distance(&base).powi(4)))
                    .collect()
            })
            .collect()
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    let gaps: Vec<f64> = targets.iter().map(|yt| (yt - y).abs()).collect();
    let mut fourth_moments = Vec::new();
    let mut standard_errors = Vec::new();
    for j in 0..targets.len() {
        let column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let m = crate::stats::mean_se(&column);
        fourth_moments.push(m.mean);
        standard_errors.push(m.se);
    }
    let ratios: Vec<f64> = fourth_moments
        .iter()
        .zip(&gaps)
        .map(|(m, g)| if *g == 0.0 { 0.0 } else { m / (g * g) })
        .collect();
    let statistic = if ratios[0] > 0.0 {
        ratios.iter().copied().fold(0.0, f64::max) / ratios[0]
    } else if ratios.iter().all(|&r| r == 0.0) {
        0.0
    } else {
        f64::INFINITY
    };
    let report = RunReport::new(
        format!("regularity.fourth_moment.{}", fields.field().name()),
        statistic,
        RATIO_SPREAD_MAX,
        None,
        ToleranceRule::AtMost,
    )
    .with_run(mc.seed, mc.streams);
    Ok(RegularityReport {
        gaps,
        fourth_moments,
        standard_errors,
        ratios,
        report,
    })
}

fn apriori_scale(y: f64, driver: &SamplePath, delta: f64) -> Result<f64> {
    let norm = hoelder_norm(driver, delta)?.total();
    Ok(y.powf(1.0 / (2.0 * delta)) * driver.grid().horizon() * norm.powf(1.0 / delta))
}

fn euclid(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn sup_euclid(path: &SamplePath) -> f64 {
    (0..path.len()).map(|k| euclid(path.row(k))).fold(0.0, f64::max)
}

/// (sup_t |X_t(y)| − |x0|) / (y^{1/(2δ)} T ‖B_H‖_δ^{1/δ}): the smallest C
/// for which the a-priori bound holds on this driver.
pub fn apriori_ratio(fields: &VectorFieldSet, x0: &[f64], y: f64, driver: &SamplePath, delta: f64) -> Result<f64> {
    let x = solve_at(fields, x0, driver, y)?;
    let excess = (sup_euclid(&x) - euclid(x0)).max(0.0);
    let scale = apriori_scale(y, driver, delta)?;
    Ok(if excess == 0.0 { 0.0 } else { excess / scale })
}

/// Calibrates C as `safety` times the largest ratio over pilot pairs (y, B_H).
pub fn calibrate_apriori_constant(
    fields: &VectorFieldSet,
    x0: &[f64],
    pilot: &[(f64, SamplePath)],
    delta: f64,
    safety: f64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (y, driver) in pilot {
        worst = worst.max(apriori_ratio(fields, x0, *y, driver, delta)?);
    }
    Ok(safety * worst)
}

/// sup_t |X_t(y)| against |x0| + y^{1/(2δ)} C T ‖B_H‖_δ^{1/δ}.
pub fn apriori_bound_check(
    fields: &VectorFieldSet,
    x0: &[f64],
    y: f64,
    driver: &SamplePath,
    delta: f64,
    constant: f64,
) -> Result<RunReport> {
    let x = solve_at(fields, x0, driver, y)?;
    let bound = euclid(x0) + constant * apriori_scale(y, driver, delta)?;
    Ok(RunReport::new(
        format!("apriori.{}", fields.field().name()),
        sup_euclid(&x),
        bound,
        None,
        ToleranceRule::AtMost,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sde::fields::{builtin_corpus, BuiltinField};

    fn geometric() -> VectorFieldSet {
        VectorFieldSet::new(BuiltinField::Geometric { a: 0.5, radius: 50.0 }).unwrap()
    }

    fn driver(seed: u64, n: usize) -> SamplePath {
        FbmGenerator::new(FbmMethod::Circulant, 0.75, TimeGrid::new(1.0, n).unwrap())
            .unwrap()
            .sample(1, &mut RngStream::new(seed, 0).rng())
    }

    #[test]
    fn substitution_holds_on_corpus() {
        let p = GreyParams::new(1.5, 0.6).unwrap();
        let g = TimeGrid::new(1.0, 128).unwrap();
        for f in builtin_corpus() {
            let x0 = vec![0.5; f.state_dim()];
            for seed in 0..5 {
                let r = substitution_identity_check(&f, &x0, &p, g, &RngStream::new(seed, 0)).unwrap();
                assert!(r.pass, "{r}");
            }
        }
    }

    #[test]
    fn lipschitz_trivial_cases() {
        let b = driver(1, 128);
        let same = y_lipschitz_pathwise(&geometric(), &[1.0], &b, 1.0, 1.0, 0.6).unwrap();
        assert_eq!(same.sequence[0].1, 0.0);
        assert!(same.report.pass);
        let still = geometric().without_diffusion().unwrap();
        let r = y_lipschitz_pathwise(&still, &[1.0], &b, 1.0, 1.5, 0.6).unwrap();
        assert!(r.sequence.iter().all(|s| s.1 == 0.0));
        assert!(r.report.pass);
    }

    #[test]
    fn lipschitz_ratio_bounded_for_geometric() {
        let b = driver(2, 256);
        let r = y_lipschitz_pathwise(&geometric(), &[1.0], &b, 1.0, 1.5, 0.6).unwrap();
        assert_eq!(r.sequence.len(), DYADIC_LEVELS + 1);
        assert!(r.report.pass, "{}", r.report);
    }

    #[test]
    fn regularity_ratio_decreases_for_constant_field() {
        let f = VectorFieldSet::new(BuiltinField::constant_scalar(1.0, 0.0)).unwrap();
        let p = GreyParams::new(1.5, 0.7).unwrap();
        let g = TimeGrid::new(1.0, 64).unwrap();
        let r = y_regularity_stat(&f, &[0.0], &p, g, 1.0, 1.5, 64, &MonteCarlo::new(3, 4)).unwrap();
        assert_eq!(r.gaps.len(), DYADIC_LEVELS);
        assert!((r.gaps[0] - 0.5).abs() < 1e-15);
        assert!(r.ratios.windows(2).all(|w| w[1] < w[0]));
        assert!(r.report.pass);
    }

    #[test]
    fn apriori_zero_fields() {
        let f = VectorFieldSet::new(BuiltinField::constant_scalar(0.0, 0.0)).unwrap();
        let b = driver(4, 64);
        assert_eq!(apriori_ratio(&f, &[2.0], 1.0, &b, 0.6).unwrap(), 0.0);
        assert!(apriori_bound_check(&f, &[2.0], 1.0, &b, 0.6, 0.0).unwrap().pass);
    }

    #[test]
    fn apriori_calibrated_constant_holds_on_pilot() {
        let f = VectorFieldSet::new(BuiltinField::constant_scalar(1.0, 0.0)).unwrap();
        let pilot: Vec<(f64, SamplePath)> = (0..8).map(|s| (1.0 + s as f64, driver(s, 64))).collect();
        let c = calibrate_apriori_constant(&f, &[0.0], &pilot, 0.6, 2.0).unwrap();
        assert!(c > 0.0);
        for (y, b) in &pilot {
            assert!(apriori_bound_check(&f, &[0.0], *y, b, 0.6, c).unwrap().pass);
        }
    }
}
