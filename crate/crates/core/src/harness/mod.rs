//! Configuration, verification suites, persistence and the command line.

pub mod checks;
pub mod cli;
pub mod config;
pub mod io;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use crate::error::Result;
use crate::fbm::TimeGrid;
use crate::report::RunReport;
use crate::rng::MonteCarlo;

pub use config::{ExperimentConfig, Suite};

/// Runs the suites selected in `config` and returns one report per check.
/// A suite that errors or panics yields a single failed report named after
/// the suite.
pub fn verify_suite(config: &ExperimentConfig) -> Vec<RunReport> {
    let mc = MonteCarlo::new(config.run.seed, config.run.streams);
    let mut out = Vec::new();
    for suite in Suite::expand(&config.checks.suites) {
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| run_suite(suite, config, &mc)));
        let reports = match result {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => vec![RunReport::failed(format!("{suite}.error"), &e.to_string())],
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| (*s).to_string()))
                    .unwrap_or_else(|| "panic".into());
                vec![RunReport::failed(format!("{suite}.panic"), &msg)]
            }
        };
        let count = reports.len().max(1) as u32;
        for r in reports {
            let mut r = r.with_run(mc.seed, mc.streams);
            r.runtime_ms = (started.elapsed() / count).as_millis() as u64;
            log::info!("{r}");
            out.push(r);
        }
    }
    out
}

fn run_suite(suite: Suite, config: &ExperimentConfig, mc: &MonteCarlo) -> Result<Vec<RunReport>> {
    let p = &config.params;
    let samples = config.run.samples;
    let paths = config.run.paths;
    let grid = config.time_grid()?;
    let h = p.hurst();
    Ok(match suite {
        Suite::Specfun => {
            let mut r = checks::laplace_pair_reports(&[0.3, 0.5, 0.7, 0.9], &[0.25, 1.0, 4.0])?;
            r.push(checks::m_wright_half_report()?);
            r
        }
        Suite::Moments => {
            let mut r = checks::y_sampler_reports(p.beta(), samples, mc)?;
            r.extend(checks::ggbm_moment_reports(p, 1.0, samples, mc));
            r
        }
        Suite::Cf => checks::cf_reports(p, 1.0, 0.5, &[0.5, 1.0, 2.0], samples, mc)?,
        Suite::Covariance => {
            let pairs = [(1, 1), (2, 4), (1, 3), (4, 4), (3, 2)];
            checks::covariance_reports(p, TimeGrid::new(1.0, 4)?, &pairs, samples, mc)?
        }
        Suite::Fbm => checks::fbm_reports(&[h], &[0.25, 0.5, 1.0], grid.steps().max(4), paths, mc)?,
        Suite::Fernique => {
            let delta = if config.run.delta < h { config.run.delta } else { h / 2.0 };
            checks::fernique_reports(h, delta, grid, paths, mc)?
        }
        Suite::Young => checks::young_reports(h.max(0.6), paths.min(200), mc)?,
        Suite::Euler => {
            p.require_sde_range()?;
            checks::euler_reports(h, 0.5, 1.0, 8..=13, paths.min(200), mc)?
        }
        Suite::Substitution => {
            p.require_sde_range()?;
            vec![checks::substitution_report(p, grid, mc.seed, 100)?]
        }
        Suite::Regularity => {
            p.require_sde_range()?;
            checks::regularity_reports(p, grid, config.run.delta, paths.min(500), mc)?
        }
        Suite::Density => {
            let mut r = checks::density_reports(p, samples, mc)?;
            if p.require_sde_range().is_ok() {
                r.push(checks::end_to_end_report(p, grid.steps(), samples.min(10_000), mc)?);
            }
            r
        }
        Suite::Tail => checks::tail_reports(p, &[0.5, 1.0, 2.0], samples, mc)?,
        Suite::Finiteness => checks::finiteness_reports(&[1.0, 2.0], &[0.5, 0.9], &[0.55, 0.6]),
        Suite::All => unreachable!("expanded above"),
    })
}
