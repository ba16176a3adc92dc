//! Pathwise Young integration by left-point Riemann–Stieltjes sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::{SamplePath, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    /// Step of the grid the value was computed on.
    pub mesh: f64,
    /// Values on the grid with step `2 · mesh` and with step `mesh`, when the
    /// step count is even.
    pub richardson_pair: Option<(f64, f64)>,
}

impl IntegralResult {
    /// |value(2h) − value(h)|, the refinement residual.
    pub fn refinement_delta(&self) -> Option<f64> {
        self.richardson_pair.map(|(coarse, fine)| (fine - coarse).abs())
    }
}

fn left_sum(f: &[f64], g: &[f64], stride: usize) -> f64 {
    let n = g.len() - 1;
    let mut sum = 0.0;
    let mut k = 0;
    while k + stride <= n {
        sum += f[k] * (g[k + stride] - g[k]);
        k += stride;
    }
    sum
}

/// Σ f(t_k) (g(t_{k+1}) − g(t_k)) over the grid.
pub fn young_integral(grid: &TimeGrid, f: &[f64], g: &[f64]) -> Result<IntegralResult> {
    let expected = grid.steps() + 1;
    for len in [f.len(), g.len()] {
        if len != expected {
            return Err(Error::LengthMismatch { expected, got: len });
        }
    }
    let value = left_sum(f, g, 1);
    let richardson_pair = (grid.steps() % 2 == 0).then(|| (left_sum(f, g, 2), value));
    Ok(IntegralResult {
        value,
        mesh: grid.dt(),
        richardson_pair,
    })
}

/// Σ_j ∫ f_j dg_j for equally-dimensioned paths on a common grid.
pub fn young_integral_paths(f: &SamplePath, g: &SamplePath) -> Result<IntegralResult> {
    if f.grid() != g.grid() || f.dim() != g.dim() {
        return Err(Error::InvalidInput("paths live on different grids".into()));
    }
    let mut total = IntegralResult {
        value: 0.0,
        mesh: g.grid().dt(),
        richardson_pair: (g.grid().steps() % 2 == 0).then_some((0.0, 0.0)),
    };
    for j in 0..g.dim() {
        let r = young_integral(g.grid(), &f.component(j), &g.component(j))?;
        total.value += r.value;
        if let (Some((c, v)), Some((rc, rv))) = (total.richardson_pair.as_mut(), r.richardson_pair) {
            *c += rc;
            *v += rv;
        }
    }
    Ok(total)
}

/// Largest Σ|Δx|^p over the mesh partition and its dyadic coarsenings
/// (every 2^j-th point, endpoint always kept).
pub fn p_variation(path: &SamplePath, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::domain("p_variation", format!("p = {p} must be >= 1")));
    }
    let n = path.grid().steps();
    let dist = |a: usize, b: usize| -> f64 {
        path.row(a)
            .iter()
            .zip(path.row(b))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let mut best: f64 = 0.0;
    let mut stride = 1;
    while stride <= n {
        let mut sum = 0.0;
        let mut k = 0;
        while k < n {
            let next = (k + stride).min(n);
            sum += dist(next, k).powf(p);
            k = next;
        }
        best = best.max(sum);
        stride *= 2;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{FbmGenerator, FbmMethod};
    use crate::rng::RngStream;

    fn grid(n: usize) -> TimeGrid {
        TimeGrid::new(1.0, n).unwrap()
    }

    #[test]
    fn unit_integrand_telescopes() {
        let g = grid(10);
        let gv: Vec<f64> = g.points().iter().map(|t| (3.0 * t).sin()).collect();
        let r = young_integral(&g, &vec![1.0; 11], &gv).unwrap();
        assert!((r.value - (gv[10] - gv[0])).abs() < 1e-15);
    }

    #[test]
    fn smooth_case() {
        let g = grid(1 << 12);
        let t = g.points();
        let t2: Vec<f64> = t.iter().map(|x| x * x).collect();
        let r = young_integral(&g, &t, &t2).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-3);
        let (coarse, fine) = r.richardson_pair.unwrap();
        assert!((fine - 2.0 / 3.0).abs() < (coarse - 2.0 / 3.0).abs());
    }

    #[test]
    fn length_mismatch() {
        let g = grid(4);
        assert!(matches!(
            young_integral(&g, &[0.0; 5], &[0.0; 4]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn odd_steps_have_no_pair() {
        let g = grid(3);
        assert!(young_integral(&g, &[1.0; 4], &[0.0, 1.0, 2.0, 3.0])
            .unwrap()
            .richardson_pair
            .is_none());
    }

    #[test]
    fn additivity_over_adjacent_intervals() {
        let g = grid(256);
        let b = FbmGenerator::new(FbmMethod::Circulant, 0.75, g)
            .unwrap()
            .sample(1, &mut RngStream::new(1, 0).rng());
        let v = b.values();
        let f: Vec<f64> = v.iter().map(|x| x.cos()).collect();
        let whole = young_integral(&g, &f, v).unwrap().value;
        let m = 100;
        let left = young_integral(&TimeGrid::new(m as f64 / 256.0, m).unwrap(), &f[..=m], &v[..=m])
            .unwrap()
            .value;
        let right = young_integral(&TimeGrid::new(1.0 - m as f64 / 256.0, 256 - m).unwrap(), &f[m..], &v[m..])
            .unwrap()
            .value;
        assert!((whole - left - right).abs() < 1e-14);
    }

    #[test]
    fn p_variation_trivial() {
        let g = grid(64);
        let lin = SamplePath::from_scalar(g, g.points()).unwrap();
        assert!((p_variation(&lin, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let c = SamplePath::from_scalar(g, vec![2.0; 65]).unwrap();
        assert_eq!(p_variation(&c, 2.0).unwrap(), 0.0);
        assert!(p_variation(&c, 0.5).is_err());
    }
}
