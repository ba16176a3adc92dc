//! Simulation and verification toolkit for generalized grey Brownian motion
//! (ggBm) and differential equations driven by it.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Gamma, Mittag-Leffler and M-Wright functions
//! * [`grey_sampler`]: the mixing variable Y_β and ggBm marginals/paths
//! * [`fbm`]: fractional Brownian motion generators and Hölder norms
//! * [`young`]: Riemann–Stieltjes (Young) sums and p-variation
//! * [`sde`]: Euler scheme, substitution pipeline and regularity checks
//! * [`density`]: KDE, mixture densities, tail bounds, F-integral
//! * [`harness`]: configuration, verification suites and CSV/JSON output

pub mod density;
pub mod error;
pub mod fbm;
pub mod grey_sampler;
pub mod harness;
pub mod quad;
pub mod report;
pub mod rng;
pub mod sde;
pub mod specfun;
pub mod stats;
pub mod young;

pub use error::{Error, Result};
pub use fbm::{FbmMethod, SamplePath, TimeGrid};
pub use report::{RunReport, ToleranceRule};
pub use rng::{MonteCarlo, RngStream};
pub use specfun::GreyParams;
