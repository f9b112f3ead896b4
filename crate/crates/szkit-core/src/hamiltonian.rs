//! Structured time-dependent Hamiltonians on the model phase spaces.
//!
//! Every term carries an analytic value, gradient and Hessian, and a time
//! profile that is a finite trigonometric polynomial (or a boundary-flat
//! reparameterization of one), so flows, variational equations and
//! extremum polishing never fall back to numerical differentiation of H.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::geometry::{ManifoldModel, Point, Tangent};

/// a0 + sum_m cos_m cos(2 pi m t) + sin_m sin(2 pi m t) on [0, 1].
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct TrigPoly {
    pub a0: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn constant(a0: f64) -> Self {
        TrigPoly {
            a0,
            cos: vec![],
            sin: vec![],
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.a0;
        for (m, c) in self.cos.iter().enumerate() {
            v += c * (2.0 * std::f64::consts::PI * (m + 1) as f64 * t).cos();
        }
        for (m, s) in self.sin.iter().enumerate() {
            v += s * (2.0 * std::f64::consts::PI * (m + 1) as f64 * t).sin();
        }
        v
    }

    pub fn is_constant(&self) -> bool {
        self.cos.iter().all(|&c| c == 0.0) && self.sin.iter().all(|&s| s == 0.0)
    }
}

/// Quintic smoothstep used for boundary-flat reparameterizations: zeta = 0
/// on [0, m], 1 on [1 - m, 1], with zeta' >= 0.  Returns (zeta, zeta').
pub fn smoothstep(t: f64, margin: f64) -> (f64, f64) {
    let u = ((t - margin) / (1.0 - 2.0 * margin)).clamp(0.0, 1.0);
    let s = ((6.0 * u - 15.0) * u + 10.0) * u * u * u;
    let ds = 30.0 * u * u * (u - 1.0) * (u - 1.0) / (1.0 - 2.0 * margin);
    (s, ds)
}

/// Time profile of a term; the boundary-flat variant evaluates
/// zeta'(t) a(zeta(t)).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Profile {
    Plain(TrigPoly),
    BoundaryFlat { margin: f64, inner: TrigPoly },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Plain(p) => p.eval(t),
            Profile::BoundaryFlat { margin, inner } => {
                let (z, dz) = smoothstep(t, *margin);
                dz * inner.eval(z)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Profile::Plain(p) if p.is_constant())
    }
}

/// Spatial part of a Hamiltonian term.  Flat-model terms use 2n-coordinate
/// vectors; sphere terms act through the ambient R^3.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpatialTerm {
    /// Spatially constant value (time profiles still apply).
    Constant { c: f64 },
    /// (1/2) x^T S x on R^{2n}.
    Quadratic { s: Vec<Vec<f64>> },
    /// amplitude * exp(-|x - center|^2 / (2 sigma^2)) on R^{2n}.
    GaussianBump {
        center: Vec<f64>,
        amplitude: f64,
        sigma: f64,
    },
    /// cos_amp cos(2 pi k.x) + sin_amp sin(2 pi k.x) on the torus.
    Trig {
        k: Vec<i64>,
        cos_amp: f64,
        sin_amp: f64,
    },
    /// c . x on the sphere (ambient-linear).
    AmbientLinear { c: [f64; 3] },
    /// x^T C x on the sphere (ambient-quadratic, C symmetric).
    AmbientQuadratic { c: [[f64; 3]; 3] },
}

impl SpatialTerm {
    pub fn value(&self, x: &Point) -> f64 {
        match self {
            SpatialTerm::Constant { c } => *c,
            SpatialTerm::Quadratic { s } => {
                let mut acc = 0.0;
                for (i, row) in s.iter().enumerate() {
                    for (j, sij) in row.iter().enumerate() {
                        acc += 0.5 * sij * x[i] * x[j];
                    }
                }
                acc
            }
            SpatialTerm::GaussianBump {
                center,
                amplitude,
                sigma,
            } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                amplitude * (-d2 / (2.0 * sigma * sigma)).exp()
            }
            SpatialTerm::Trig { k, cos_amp, sin_amp } => {
                let phi = 2.0
                    * std::f64::consts::PI
                    * k.iter().zip(x).map(|(ki, xi)| *ki as f64 * xi).sum::<f64>();
                cos_amp * phi.cos() + sin_amp * phi.sin()
            }
            SpatialTerm::AmbientLinear { c } => c[0] * x[0] + c[1] * x[1] + c[2] * x[2],
            SpatialTerm::AmbientQuadratic { c } => {
                let mut acc = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        acc += c[i][j] * x[i] * x[j];
                    }
                }
                acc
            }
        }
    }

    /// Gradient in the coordinate (flat) or ambient (sphere) sense.
    pub fn gradient(&self, x: &Point) -> Vec<f64> {
        match self {
            SpatialTerm::Constant { .. } => vec![0.0; x.len()],
            SpatialTerm::Quadratic { s } => s
                .iter()
                .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect(),
            SpatialTerm::GaussianBump {
                center,
                amplitude,
                sigma,
            } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                let val = amplitude * (-d2 / (2.0 * sigma * sigma)).exp();
                x.iter()
                    .zip(center)
                    .map(|(a, b)| -val * (a - b) / (sigma * sigma))
                    .collect()
            }
            SpatialTerm::Trig { k, cos_amp, sin_amp } => {
                let two_pi = 2.0 * std::f64::consts::PI;
                let phi =
                    two_pi * k.iter().zip(x).map(|(ki, xi)| *ki as f64 * xi).sum::<f64>();
                let d = two_pi * (-cos_amp * phi.sin() + sin_amp * phi.cos());
                k.iter().map(|ki| d * *ki as f64).collect()
            }
            SpatialTerm::AmbientLinear { c } => c.to_vec(),
            SpatialTerm::AmbientQuadratic { c } => (0..3)
                .map(|i| (0..3).map(|j| (c[i][j] + c[j][i]) * x[j]).sum())
                .collect(),
        }
    }

    pub fn hessian(&self, x: &Point, dim: usize) -> DMatrix<f64> {
        match self {
            SpatialTerm::Constant { .. } => DMatrix::zeros(dim, dim),
            SpatialTerm::Quadratic { s } => DMatrix::from_fn(dim, dim, |i, j| s[i][j]),
            SpatialTerm::GaussianBump {
                center,
                amplitude,
                sigma,
            } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                let s2 = sigma * sigma;
                let val = amplitude * (-d2 / (2.0 * s2)).exp();
                DMatrix::from_fn(dim, dim, |i, j| {
                    let di = x[i] - center[i];
                    let dj = x[j] - center[j];
                    val / s2 * (di * dj / s2 - if i == j { 1.0 } else { 0.0 })
                })
            }
            SpatialTerm::Trig { k, cos_amp, sin_amp } => {
                let two_pi = 2.0 * std::f64::consts::PI;
                let phi =
                    two_pi * k.iter().zip(x).map(|(ki, xi)| *ki as f64 * xi).sum::<f64>();
                let d2 = -two_pi * two_pi * (cos_amp * phi.cos() + sin_amp * phi.sin());
                DMatrix::from_fn(dim, dim, |i, j| d2 * k[i] as f64 * k[j] as f64)
            }
            SpatialTerm::AmbientLinear { .. } => DMatrix::zeros(dim, dim),
            SpatialTerm::AmbientQuadratic { c } => {
                DMatrix::from_fn(dim, dim, |i, j| c[i][j] + c[j][i])
            }
        }
    }

    /// Mean over the model (Liouville-normalized); None when the model is
    /// non-compact.
    fn mean(&self, model: &ManifoldModel) -> Option<f64> {
        match (self, model) {
            (
                SpatialTerm::Constant { c },
                ManifoldModel::FlatTorus2n { .. } | ManifoldModel::RoundSphere,
            ) => Some(*c),
            (SpatialTerm::Trig { k, cos_amp, .. }, ManifoldModel::FlatTorus2n { .. }) => {
                if k.iter().all(|&ki| ki == 0) {
                    Some(*cos_amp)
                } else {
                    Some(0.0)
                }
            }
            (SpatialTerm::AmbientLinear { .. }, ManifoldModel::RoundSphere) => Some(0.0),
            (SpatialTerm::AmbientQuadratic { c }, ManifoldModel::RoundSphere) => {
                Some((c[0][0] + c[1][1] + c[2][2]) / 3.0)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Term {
    pub spatial: SpatialTerm,
    pub profile: Profile,
}

/// A structured Hamiltonian H(t, x) = sum_i a_i(t) f_i(x) on a model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hamiltonian {
    pub model: ManifoldModel,
    pub terms: Vec<Term>,
    pub normalized: bool,
}

impl Hamiltonian {
    pub fn autonomous(model: ManifoldModel, terms: Vec<SpatialTerm>) -> Self {
        Hamiltonian {
            model,
            terms: terms
                .into_iter()
                .map(|spatial| Term {
                    spatial,
                    profile: Profile::Plain(TrigPoly::constant(1.0)),
                })
                .collect(),
            normalized: false,
        }
    }

    pub fn value(&self, t: f64, x: &Point) -> f64 {
        self.terms
            .iter()
            .map(|term| term.profile.eval(t) * term.spatial.value(x))
            .sum()
    }

    /// Coordinate gradient (flat) or ambient gradient (sphere).
    pub fn gradient(&self, t: f64, x: &Point) -> Vec<f64> {
        let dim = self.model.embedding_dim();
        let mut g = vec![0.0; dim];
        for term in &self.terms {
            let a = term.profile.eval(t);
            if a == 0.0 {
                continue;
            }
            for (gi, di) in g.iter_mut().zip(term.spatial.gradient(x)) {
                *gi += a * di;
            }
        }
        g
    }

    /// Riemannian gradient: the ambient gradient projected onto the tangent
    /// space (identity on flat models).
    pub fn riemannian_gradient(&self, t: f64, x: &Point) -> Tangent {
        let g = self.gradient(t, x);
        self.model.tangent_project(x, &g)
    }

    pub fn hessian(&self, t: f64, x: &Point) -> DMatrix<f64> {
        let dim = self.model.embedding_dim();
        let mut h = DMatrix::zeros(dim, dim);
        for term in &self.terms {
            let a = term.profile.eval(t);
            if a == 0.0 {
                continue;
            }
            h += term.spatial.hessian(x, dim) * a;
        }
        h
    }

    /// Hamiltonian vector field X_H = -J grad H.
    pub fn vector_field(&self, t: f64, x: &Point) -> Tangent {
        match self.model {
            ManifoldModel::RoundSphere => {
                // -x cross ambient-grad is tangent and equals -J grad on S^2
                let g = self.gradient(t, x);
                vec![
                    -(x[1] * g[2] - x[2] * g[1]),
                    -(x[2] * g[0] - x[0] * g[2]),
                    -(x[0] * g[1] - x[1] * g[0]),
                ]
            }
            _ => {
                let g = self.gradient(t, x);
                let n = self.model.half_dim();
                let mut v = vec![0.0; 2 * n];
                for j in 0..n {
                    v[j] = g[n + j];
                    v[n + j] = -g[j];
                }
                v
            }
        }
    }

    /// Jacobian of the vector field applied to v (variational right-hand
    /// side); ambient on the sphere.
    pub fn vector_field_jacobian_apply(&self, t: f64, x: &Point, v: &[f64]) -> Vec<f64> {
        match self.model {
            ManifoldModel::RoundSphere => {
                let g = self.gradient(t, x);
                let h = self.hessian(t, x);
                let hv = &h * DVector::from_row_slice(v);
                let cross = |a: &[f64], b: &[f64]| {
                    vec![
                        a[1] * b[2] - a[2] * b[1],
                        a[2] * b[0] - a[0] * b[2],
                        a[0] * b[1] - a[1] * b[0],
                    ]
                };
                let t1 = cross(v, &g);
                let hv_s: Vec<f64> = hv.iter().copied().collect();
                let t2 = cross(x, &hv_s);
                (0..3).map(|i| -t1[i] - t2[i]).collect()
            }
            _ => {
                let h = self.hessian(t, x);
                let hv = &h * DVector::from_row_slice(v);
                let n = self.model.half_dim();
                let mut out = vec![0.0; 2 * n];
                for j in 0..n {
                    out[j] = hv[n + j];
                    out[n + j] = -hv[j];
                }
                out
            }
        }
    }

    pub fn is_autonomous(&self) -> bool {
        self.terms.iter().all(|term| term.profile.is_constant())
    }

    /// Mean of H_t over the model for normalization checks; None on
    /// non-compact models.
    pub fn mean_value(&self, t: f64) -> Option<f64> {
        let mut acc = 0.0;
        for term in &self.terms {
            acc += term.profile.eval(t) * term.spatial.mean(&self.model)?;
        }
        Some(acc)
    }

    /// Largest |mean of H_t| over sampled times.
    pub fn normalization_defect(&self) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..=16 {
            let t = k as f64 / 16.0;
            worst = worst.max(self.mean_value(t)?.abs());
        }
        Some(worst)
    }

    /// Boundary-flat reparameterization: H'(t, x) = zeta'(t) H(zeta(t), x).
    /// Shares the time-one map with H and vanishes near t = 0, 1.
    pub fn reparam_boundary_flat(&self, margin: f64) -> crate::Result<Hamiltonian> {
        if !(margin > 0.0 && margin < 0.25) {
            return Err(crate::Error::InvalidMargin(margin));
        }
        let terms = self
            .terms
            .iter()
            .map(|term| {
                let inner = match &term.profile {
                    Profile::Plain(p) => p.clone(),
                    Profile::BoundaryFlat { .. } => {
                        return Err(crate::Error::InvalidMargin(margin));
                    }
                };
                Ok(Term {
                    spatial: term.spatial.clone(),
                    profile: Profile::BoundaryFlat { margin, inner },
                })
            })
            .collect::<crate::Result<Vec<_>>>()?;
        Ok(Hamiltonian {
            model: self.model,
            terms,
            normalized: self.normalized,
        })
    }
}
