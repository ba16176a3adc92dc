//! Built-in vector field corpus.
//!
//! Every field is bounded with bounded derivatives of all orders (saturating
//! `tanh` forms or a smooth cutoff), so the smoothness hypotheses hold by
//! construction. Non-degeneracy and bracket flags are assigned by hand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hypothesis flags carried by a field set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    /// V0 ∈ C_b^1, V ∈ C_b^2.
    pub h1: bool,
    /// all fields C_b^∞.
    pub h2: bool,
    /// V_1(x), …, V_d(x) span R^n at every x.
    pub h4: bool,
    /// brackets [V_i, V_j] = Σ ω^k_{ij} V_k with antisymmetric ω.
    pub h5: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BuiltinField {
    /// V0 = b, V = σ.
    Constant { sigma: Vec<Vec<f64>>, drift: Vec<f64> },
    /// V0_i = -κ R tanh(x_i/R), V_ij = σ_ij (1 + c tanh(x_i/R)).
    LinearBounded {
        sigma: Vec<Vec<f64>>,
        reversion: f64,
        modulation: f64,
        radius: f64,
    },
    /// V0_i = b sin(ω x_i), V_ij = σ_ij (1 + c sin(ω x_i)).
    Sine {
        sigma: Vec<Vec<f64>>,
        drift_amplitude: f64,
        frequency: f64,
        modulation: f64,
    },
    /// Scalar V(x) = a x χ(|x|/R) with χ = 1 on [0, 1], 0 beyond 2, smooth
    /// in between; V0 = 0.
    Geometric { a: f64, radius: f64 },
}

impl BuiltinField {
    pub fn constant_scalar(sigma: f64, drift: f64) -> Self {
        BuiltinField::Constant {
            sigma: vec![vec![sigma]],
            drift: vec![drift],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinField::Constant { .. } => "constant",
            BuiltinField::LinearBounded { .. } => "linear_bounded",
            BuiltinField::Sine { .. } => "sine",
            BuiltinField::Geometric { .. } => "geometric",
        }
    }
}

/// A validated field together with its dimensions and hypothesis flags.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldSet {
    field: BuiltinField,
    n: usize,
    d: usize,
    flags: HypothesisFlags,
}

fn matrix_dims(sigma: &[Vec<f64>]) -> Result<(usize, usize)> {
    let n = sigma.len();
    let d = sigma.first().map_or(0, Vec::len);
    if n == 0 || d == 0 || sigma.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidInput("sigma must be a non-empty rectangular matrix".into()));
    }
    if sigma.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("sigma has non-finite entries".into()));
    }
    Ok((n, d))
}

/// σσᵀ (n × n, row-major).
pub(crate) fn gram(sigma: &[Vec<f64>]) -> Vec<f64> {
    let n = sigma.len();
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = sigma[i].iter().zip(&sigma[j]).map(|(a, b)| a * b).sum();
        }
    }
    g
}

/// Cholesky factor of a symmetric matrix, `None` if not positive definite.
pub(crate) fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 1e-12 * scale {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn full_row_rank(sigma: &[Vec<f64>]) -> bool {
    cholesky(&gram(sigma), sigma.len()).is_some()
}

/// Largest eigenvalue of a symmetric matrix by power iteration.
pub(crate) fn symmetric_top_eigenvalue(a: &[f64], n: usize) -> f64 {
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * v[j]).sum())
            .collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        v = w.into_iter().map(|x| x / norm).collect();
        if (next - lambda).abs() <= 1e-15 * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// C^∞ cutoff: 1 on [0, 1], 0 on [2, ∞).
fn cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        return 1.0;
    }
    if r >= 2.0 {
        return 0.0;
    }
    let a = bump(2.0 - r);
    a / (a + bump(r - 1.0))
}

impl VectorFieldSet {
    pub fn new(field: BuiltinField) -> Result<Self> {
        let (n, d, flags) = match &field {
            BuiltinField::Constant { sigma, drift } => {
                let (n, d) = matrix_dims(sigma)?;
                if drift.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        got: drift.len(),
                    });
                }
                let flags = HypothesisFlags {
                    h1: true,
                    h2: true,
                    h4: full_row_rank(sigma),
                    h5: true,
                };
                (n, d, flags)
            }
            BuiltinField::LinearBounded {
                sigma,
                modulation,
                radius,
                ..
            } => {
                let (n, d) = matrix_dims(sigma)?;
                if !(*radius > 0.0) {
                    return Err(Error::InvalidInput("radius must be > 0".into()));
                }
                let flags = HypothesisFlags {
                    h1: true,
                    h2: true,
                    h4: modulation.abs() < 1.0 && full_row_rank(sigma),
                    h5: d == 1,
                };
                (n, d, flags)
            }
            BuiltinField::Sine {
                sigma, modulation, ..
            } => {
                let (n, d) = matrix_dims(sigma)?;
                let flags = HypothesisFlags {
                    h1: true,
                    h2: true,
                    h4: modulation.abs() < 1.0 && full_row_rank(sigma),
                    h5: d == 1,
                };
                (n, d, flags)
            }
            BuiltinField::Geometric { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidInput("radius must be > 0".into()));
                }
                let flags = HypothesisFlags {
                    h1: true,
                    h2: true,
                    h4: false,
                    h5: true,
                };
                (1, 1, flags)
            }
        };
        Ok(Self { field, n, d, flags })
    }

    pub fn field(&self) -> &BuiltinField {
        &self.field
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn driver_dim(&self) -> usize {
        self.d
    }

    pub fn flags(&self) -> HypothesisFlags {
        self.flags
    }

    pub fn drift(&self, x: &[f64], out: &mut [f64]) {
        match &self.field {
            BuiltinField::Constant { drift, .. } => out.copy_from_slice(drift),
            BuiltinField::LinearBounded {
                reversion, radius, ..
            } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = -reversion * radius * (xi / radius).tanh();
                }
            }
            BuiltinField::Sine {
                drift_amplitude,
                frequency,
                ..
            } => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = drift_amplitude * (frequency * xi).sin();
                }
            }
            BuiltinField::Geometric { .. } => out[0] = 0.0,
        }
    }

    /// Row-major `n × d` matrix whose columns are V_1..V_d at `x`.
    pub fn diffusion(&self, x: &[f64], out: &mut [f64]) {
        let d = self.d;
        match &self.field {
            BuiltinField::Constant { sigma, .. } => {
                for (i, row) in sigma.iter().enumerate() {
                    out[i * d..(i + 1) * d].copy_from_slice(row);
                }
            }
            BuiltinField::LinearBounded {
                sigma,
                modulation,
                radius,
                ..
            } => {
                for (i, row) in sigma.iter().enumerate() {
                    let m = 1.0 + modulation * (x[i] / radius).tanh();
                    for (j, s) in row.iter().enumerate() {
                        out[i * d + j] = s * m;
                    }
                }
            }
            BuiltinField::Sine {
                sigma,
                frequency,
                modulation,
                ..
            } => {
                for (i, row) in sigma.iter().enumerate() {
                    let m = 1.0 + modulation * (frequency * x[i]).sin();
                    for (j, s) in row.iter().enumerate() {
                        out[i * d + j] = s * m;
                    }
                }
            }
            BuiltinField::Geometric { a, radius } => {
                out[0] = a * x[0] * cutoff(x[0].abs() / radius);
            }
        }
    }

    /// Lipschitz constant of V0, used as the drift growth rate θ.
    pub fn drift_lipschitz(&self) -> f64 {
        match &self.field {
            BuiltinField::Constant { .. } | BuiltinField::Geometric { .. } => 0.0,
            BuiltinField::LinearBounded { reversion, .. } => reversion.abs(),
            BuiltinField::Sine {
                drift_amplitude,
                frequency,
                ..
            } => (drift_amplitude * frequency).abs(),
        }
    }

    /// sup_x sup_{|λ| ≤ 1} |Σ λ_j V_j(x)|², available for constant fields
    /// as the squared spectral norm of σ.
    pub fn diffusion_sup_sq(&self) -> Option<f64> {
        match &self.field {
            BuiltinField::Constant { sigma, .. } => {
                Some(symmetric_top_eigenvalue(&gram(sigma), self.n))
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.field, BuiltinField::Constant { .. })
    }

    /// Closed-form solution for fields that have one, given the scaled
    /// driver value `w = √y B_H(t)`, time `t` and start `x0`; `None` when
    /// the state leaves the region where the formula is exact.
    pub fn closed_form(&self, x0: &[f64], t: f64, w: &[f64]) -> Option<Vec<f64>> {
        match &self.field {
            BuiltinField::Constant { sigma, drift } => Some(
                (0..self.n)
                    .map(|i| {
                        x0[i] + drift[i] * t + sigma[i].iter().zip(w).map(|(s, b)| s * b).sum::<f64>()
                    })
                    .collect(),
            ),
            BuiltinField::Geometric { a, radius } => {
                let x = x0[0] * (a * w[0]).exp();
                (x.abs() <= *radius).then(|| vec![x])
            }
            _ => None,
        }
    }

    /// Same field with the diffusion switched off.
    pub fn without_diffusion(&self) -> Result<Self> {
        let zero = |s: &Vec<Vec<f64>>| s.iter().map(|r| vec![0.0; r.len()]).collect::<Vec<_>>();
        let field = match &self.field {
            BuiltinField::Constant { sigma, drift } => BuiltinField::Constant {
                sigma: zero(sigma),
                drift: drift.clone(),
            },
            BuiltinField::LinearBounded {
                sigma,
                reversion,
                modulation,
                radius,
            } => BuiltinField::LinearBounded {
                sigma: zero(sigma),
                reversion: *reversion,
                modulation: *modulation,
                radius: *radius,
            },
            BuiltinField::Sine {
                sigma,
                drift_amplitude,
                frequency,
                modulation,
            } => BuiltinField::Sine {
                sigma: zero(sigma),
                drift_amplitude: *drift_amplitude,
                frequency: *frequency,
                modulation: *modulation,
            },
            BuiltinField::Geometric { radius, .. } => BuiltinField::Geometric {
                a: 0.0,
                radius: *radius,
            },
        };
        VectorFieldSet::new(field)
    }
}

/// The corpus used by the substitution checks: every built-in at a
/// representative parameter point.
pub fn builtin_corpus() -> Vec<VectorFieldSet> {
    let fields = vec![
        BuiltinField::constant_scalar(1.0, 0.3),
        BuiltinField::Constant {
            sigma: vec![vec![1.0, 0.2], vec![-0.3, 0.8]],
            drift: vec![0.1, -0.2],
        },
        BuiltinField::LinearBounded {
            sigma: vec![vec![0.7]],
            reversion: 0.5,
            modulation: 0.3,
            radius: 10.0,
        },
        BuiltinField::LinearBounded {
            sigma: vec![vec![0.6, 0.1], vec![0.2, 0.5]],
            reversion: 0.8,
            modulation: 0.4,
            radius: 5.0,
        },
        BuiltinField::Sine {
            sigma: vec![vec![0.5, 0.2], vec![0.0, 0.7]],
            drift_amplitude: 0.4,
            frequency: 1.5,
            modulation: 0.5,
        },
        BuiltinField::Geometric {
            a: 0.5,
            radius: 50.0,
        },
    ];
    fields
        .into_iter()
        .map(|f| VectorFieldSet::new(f).expect("corpus fields are valid"))
        .collect()
}
