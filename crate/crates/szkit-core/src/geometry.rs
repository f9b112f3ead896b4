//! Model phase spaces with metric, symplectic and complex structure:
//! flat R^{2n}, the flat torus T^{2n} with unit lattice, and the round unit
//! two-sphere.  Provides exponential/logarithm maps, Riemannian centers of
//! mass of small loops, canonical small bounding discs and their
//! symplectic/Riemannian areas.
//!
//! On every model the compatible triple satisfies g = omega(., J.) with J
//! acting as the complex structure; on the sphere omega(u, v) = x.(u x v)
//! and J v = x x v at the point x.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::omega0;

pub type Point = Vec<f64>;
pub type Tangent = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldModel {
    /// R^{2n} with the flat structures.
    EuclideanR2n { n: usize },
    /// T^{2n} = R^{2n} / Z^{2n}.
    FlatTorus2n { n: usize },
    /// Unit sphere in R^3, area form of total area 4 pi.
    RoundSphere,
}

impl ManifoldModel {
    /// Half-dimension n of the symplectic model.
    pub fn half_dim(&self) -> usize {
        match self {
            ManifoldModel::EuclideanR2n { n } | ManifoldModel::FlatTorus2n { n } => *n,
            ManifoldModel::RoundSphere => 1,
        }
    }

    /// Dimension of the coordinate representation of points.
    pub fn embedding_dim(&self) -> usize {
        match self {
            ManifoldModel::EuclideanR2n { n } | ManifoldModel::FlatTorus2n { n } => 2 * n,
            ManifoldModel::RoundSphere => 3,
        }
    }

    /// Injectivity radius of the metric.
    pub fn injectivity_radius(&self) -> f64 {
        match self {
            ManifoldModel::EuclideanR2n { .. } => f64::INFINITY,
            ManifoldModel::FlatTorus2n { .. } => 0.5,
            ManifoldModel::RoundSphere => std::f64::consts::PI,
        }
    }

    /// Generator of the period group Gamma_omega = { omega(A) }; None when
    /// pi_2 is trivial.
    pub fn period_generator(&self) -> Option<f64> {
        match self {
            ManifoldModel::RoundSphere => Some(4.0 * std::f64::consts::PI),
            _ => None,
        }
    }

    /// First Chern number of the positive spherical generator.
    pub fn c1_generator(&self) -> i64 {
        match self {
            ManifoldModel::RoundSphere => 2,
            _ => 0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ManifoldModel::EuclideanR2n { .. } => "r2n",
            ManifoldModel::FlatTorus2n { .. } => "torus2n",
            ManifoldModel::RoundSphere => "sphere",
        }
    }

    /// Wrap coordinates into the fundamental domain (torus only).
    pub fn wrap(&self, x: &mut Point) {
        if let ManifoldModel::FlatTorus2n { .. } = self {
            for c in x.iter_mut() {
                *c -= c.floor();
            }
        }
        if let ManifoldModel::RoundSphere = self {
            let n = norm(x);
            for c in x.iter_mut() {
                *c /= n;
            }
        }
    }

    /// Geodesic exponential map.
    pub fn exp_map(&self, x: &Point, v: &Tangent) -> Point {
        match self {
            ManifoldModel::EuclideanR2n { .. } => x.iter().zip(v).map(|(a, b)| a + b).collect(),
            ManifoldModel::FlatTorus2n { .. } => {
                let mut y: Point = x.iter().zip(v).map(|(a, b)| a + b).collect();
                self.wrap(&mut y);
                y
            }
            ManifoldModel::RoundSphere => {
                let r = norm(v);
                if r < 1e-300 {
                    return x.clone();
                }
                let mut y: Point = x
                    .iter()
                    .zip(v)
                    .map(|(a, b)| r.cos() * a + r.sin() * b / r)
                    .collect();
                self.wrap(&mut y);
                y
            }
        }
    }

    /// Geodesic logarithm; requires dist(x, y) < injectivity radius.
    pub fn log_map(&self, x: &Point, y: &Point) -> Result<Tangent> {
        match self {
            ManifoldModel::EuclideanR2n { .. } => {
                Ok(y.iter().zip(x).map(|(b, a)| b - a).collect())
            }
            ManifoldModel::FlatTorus2n { .. } => {
                let mut v = Vec::with_capacity(x.len());
                for (b, a) in y.iter().zip(x) {
                    let mut d = b - a;
                    d -= d.round();
                    // a tie at exactly half a lattice step has no unique
                    // shortest representative
                    if (d.abs() - 0.5).abs() < 1e-12 {
                        return Err(Error::OutsideInjectivity {
                            dist: 0.5,
                            inj: 0.5,
                        });
                    }
                    v.push(d);
                }
                Ok(v)
            }
            ManifoldModel::RoundSphere => {
                let c = dot(x, y).clamp(-1.0, 1.0);
                let theta = c.acos();
                if theta >= std::f64::consts::PI - 1e-12 {
                    return Err(Error::OutsideInjectivity {
                        dist: theta,
                        inj: std::f64::consts::PI,
                    });
                }
                if theta < 1e-14 {
                    return Ok(vec![0.0; 3]);
                }
                let mut dir: Tangent = y.iter().zip(x).map(|(b, a)| b - c * a).collect();
                let dn = norm(&dir);
                for d in dir.iter_mut() {
                    *d *= theta / dn;
                }
                Ok(dir)
            }
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        match self {
            ManifoldModel::EuclideanR2n { .. } => {
                norm(&x.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>())
            }
            ManifoldModel::FlatTorus2n { .. } => {
                let mut acc = 0.0;
                for (a, b) in x.iter().zip(y) {
                    let mut d = a - b;
                    d -= d.round();
                    acc += d * d;
                }
                acc.sqrt()
            }
            ManifoldModel::RoundSphere => dot(x, y).clamp(-1.0, 1.0).acos(),
        }
    }

    /// Project an ambient vector onto the tangent space at x.
    pub fn tangent_project(&self, x: &Point, v: &[f64]) -> Tangent {
        match self {
            ManifoldModel::RoundSphere => {
                let c = dot(x, v);
                v.iter().zip(x).map(|(a, b)| a - c * b).collect()
            }
            _ => v.to_vec(),
        }
    }

    /// Symplectic form on tangent vectors at x.
    pub fn omega(&self, x: &Point, u: &[f64], v: &[f64]) -> f64 {
        match self {
            ManifoldModel::RoundSphere => {
                x[0] * (u[1] * v[2] - u[2] * v[1]) + x[1] * (u[2] * v[0] - u[0] * v[2])
                    + x[2] * (u[0] * v[1] - u[1] * v[0])
            }
            _ => omega0(u, v),
        }
    }

    /// Compatible metric (Euclidean on every model, ambient-restricted on
    /// the sphere).
    pub fn metric(&self, _x: &Point, u: &[f64], v: &[f64]) -> f64 {
        dot(u, v)
    }

    /// Complex structure J at x.
    pub fn complex_structure(&self, x: &Point, v: &[f64]) -> Tangent {
        match self {
            ManifoldModel::RoundSphere => vec![
                x[1] * v[2] - x[2] * v[1],
                x[2] * v[0] - x[0] * v[2],
                x[0] * v[1] - x[1] * v[0],
            ],
            _ => crate::linalg::apply_j0(v),
        }
    }

    /// Parallel transport of w along the geodesic from x with initial
    /// velocity v, to the endpoint exp_x(v).
    pub fn parallel_transport(&self, x: &Point, v: &Tangent, w: &Tangent) -> Tangent {
        match self {
            ManifoldModel::RoundSphere => {
                let r = norm(v);
                if r < 1e-300 {
                    return w.clone();
                }
                let vhat: Vec<f64> = v.iter().map(|a| a / r).collect();
                let a = dot(w, &vhat);
                // component along the geodesic rotates with it, the normal
                // component is untouched
                let along: Vec<f64> = x
                    .iter()
                    .zip(&vhat)
                    .map(|(xi, vi)| -r.sin() * xi + r.cos() * vi)
                    .collect();
                (0..3)
                    .map(|i| w[i] - a * vhat[i] + a * along[i])
                    .collect()
            }
            _ => w.clone(),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A closed sampled curve z(t_k), t_k = k / K uniform on [0, 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Loop {
    pub model: ManifoldModel,
    pub samples: Vec<Point>,
    /// Optional velocity samples (used for C^1 distances).
    pub derivatives: Option<Vec<Tangent>>,
}

impl Loop {
    pub fn new(model: ManifoldModel, samples: Vec<Point>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidMatrix("a loop needs at least 3 samples".into()));
        }
        let inj = model.injectivity_radius();
        for k in 0..samples.len() {
            let next = &samples[(k + 1) % samples.len()];
            let d = model.distance(&samples[k], next);
            if d >= inj / 4.0 {
                return Err(Error::ResolutionTooCoarse(format!(
                    "consecutive loop samples are {d:.4} apart (limit inj/4)"
                )));
            }
        }
        Ok(Loop {
            model,
            samples,
            derivatives: None,
        })
    }

    pub fn constant(model: ManifoldModel, p: Point, k: usize) -> Self {
        Loop {
            model,
            samples: vec![p; k],
            derivatives: None,
        }
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.samples.len() {
            for j in (i + 1)..self.samples.len() {
                d = d.max(self.model.distance(&self.samples[i], &self.samples[j]));
            }
        }
        d
    }
}

/// Karcher center of mass of a small loop together with the tangent lift.
#[derive(Debug, Clone)]
pub struct CenterOfMass {
    pub point: Point,
    pub lift: Vec<Tangent>,
}

impl CenterOfMass {
    pub fn max_lift_norm(&self) -> f64 {
        self.lift.iter().map(|v| norm(v)).fold(0.0, f64::max)
    }
}

/// Karcher fixed point: x <- exp_x(mean_k log_x z_k), iterated until the
/// step norm drops below `tol.karcher_step`.
pub fn center_of_mass(z: &Loop, tol: &crate::Tolerances) -> Result<CenterOfMass> {
    let model = &z.model;
    let inj = model.injectivity_radius();
    let diam = z.diameter();
    if diam >= inj {
        return Err(Error::DiameterExceedsInjectivity { diam, bound: inj });
    }
    let mut x = z.samples[0].clone();
    let k = z.samples.len() as f64;
    let mut converged = false;
    for _ in 0..tol.karcher_max_iter {
        let mut mean = vec![0.0; model.embedding_dim()];
        for p in &z.samples {
            let v = model.log_map(&x, p)?;
            for (m, vi) in mean.iter_mut().zip(&v) {
                *m += vi / k;
            }
        }
        let step = norm(&mean);
        x = model.exp_map(&x, &mean);
        if step < tol.karcher_step {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(
            "Karcher iteration did not settle".into(),
        ));
    }
    let lift = z
        .samples
        .iter()
        .map(|p| model.log_map(&x, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(CenterOfMass { point: x, lift })
}

/// The canonical small bounding disc w(r, t) = exp_x(r xi(t)) on a polar
/// grid; row i holds the circle at radius r_i = i / radial.
#[derive(Debug, Clone)]
pub struct SmallDisc {
    pub model: ManifoldModel,
    pub center: Point,
    pub grid: Vec<Vec<Point>>,
}

/// Build the canonical disc of a loop whose center-of-mass lift stays
/// within half the injectivity radius (a strongly convex ball).
pub fn canonical_disc(z: &Loop, radial: usize, tol: &crate::Tolerances) -> Result<SmallDisc> {
    if radial < 2 {
        return Err(Error::ResolutionTooCoarse(
            "need at least 2 radial samples".into(),
        ));
    }
    let com = center_of_mass(z, tol)?;
    let max_xi = com.max_lift_norm();
    let bound = z.model.injectivity_radius() / 2.0;
    if max_xi >= bound {
        return Err(Error::DiameterExceedsInjectivity {
            diam: max_xi,
            bound,
        });
    }
    let mut grid = Vec::with_capacity(radial + 1);
    for i in 0..=radial {
        let r = i as f64 / radial as f64;
        let row: Vec<Point> = com
            .lift
            .iter()
            .map(|xi| {
                let scaled: Vec<f64> = xi.iter().map(|c| c * r).collect();
                z.model.exp_map(&com.point, &scaled)
            })
            .collect();
        grid.push(row);
    }
    Ok(SmallDisc {
        model: z.model,
        center: com.point,
        grid,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiscAreas {
    pub symplectic: f64,
    pub riemannian: f64,
    /// Richardson-style estimate from comparing with the half-resolution
    /// quadrature.
    pub error_estimate: f64,
}

/// Fourth-order periodic finite difference in the circle direction.
fn d_t(row: &[Point], k: usize, dt: f64, dim: usize) -> Vec<f64> {
    let kk = row.len();
    let at = |off: i64| -> &Point { &row[((k as i64 + off).rem_euclid(kk as i64)) as usize] };
    let (m2, m1, p1, p2) = (at(-2), at(-1), at(1), at(2));
    (0..dim)
        .map(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * dt))
        .collect()
}

/// Fourth-order finite difference in the radial direction (one-sided at the
/// boundary rows).
fn d_r(grid: &[Vec<Point>], i: usize, k: usize, dr: f64, dim: usize) -> Vec<f64> {
    let rows = grid.len();
    let g = |j: usize| -> &Point { &grid[j][k] };
    if i >= 2 && i + 2 < rows {
        let (m2, m1, p1, p2) = (g(i - 2), g(i - 1), g(i + 1), g(i + 2));
        (0..dim)
            .map(|d| (m2[d] - 8.0 * m1[d] + 8.0 * p1[d] - p2[d]) / (12.0 * dr))
            .collect()
    } else if i < 2 {
        let (f0, f1, f2, f3, f4) = (g(i), g(i + 1), g(i + 2), g(i + 3), g(i + 4));
        (0..dim)
            .map(|d| {
                (-25.0 * f0[d] + 48.0 * f1[d] - 36.0 * f2[d] + 16.0 * f3[d] - 3.0 * f4[d])
                    / (12.0 * dr)
            })
            .collect()
    } else {
        let (f0, f1, f2, f3, f4) = (g(i), g(i - 1), g(i - 2), g(i - 3), g(i - 4));
        (0..dim)
            .map(|d| {
                (25.0 * f0[d] - 48.0 * f1[d] + 36.0 * f2[d] - 16.0 * f3[d] + 3.0 * f4[d])
                    / (12.0 * dr)
            })
            .collect()
    }
}

fn quadrature(model: &ManifoldModel, grid: &[Vec<Point>]) -> (f64, f64) {
    let rows = grid.len();
    let cols = grid[0].len();
    let dim = model.embedding_dim();
    let dr = 1.0 / (rows - 1) as f64;
    let dt = 1.0 / cols as f64;
    let mut sym = 0.0;
    let mut riem = 0.0;
    for i in 0..rows {
        let w_r = if i == 0 || i == rows - 1 { 0.5 } else { 1.0 };
        for k in 0..cols {
            let x = &grid[i][k];
            let dtv = model.tangent_project(x, &d_t(&grid[i], k, dt, dim));
            let drv = model.tangent_project(x, &d_r(grid, i, k, dr, dim));
            let om = model.omega(x, &drv, &dtv);
            let g_rr = model.metric(x, &drv, &drv);
            let g_tt = model.metric(x, &dtv, &dtv);
            let g_rt = model.metric(x, &drv, &dtv);
            let area = (g_rr * g_tt - g_rt * g_rt).max(0.0).sqrt();
            sym += w_r * om * dr * dt;
            riem += w_r * area * dr * dt;
        }
    }
    (sym, riem)
}

/// Symplectic and Riemannian areas of a disc by tensor-product quadrature
/// over the polar grid.
pub fn disc_areas(disc: &SmallDisc) -> Result<DiscAreas> {
    let rows = disc.grid.len();
    let cols = disc.grid[0].len();
    if rows < 6 || cols < 5 {
        return Err(Error::ResolutionTooCoarse(format!(
            "grid {rows} x {cols} too small for the stencils"
        )));
    }
    // on the torus, lift the grid to the covering representatives nearest
    // the disc center so the difference stencils never cross the seam
    let lifted: Vec<Vec<Point>>;
    let grid: &[Vec<Point>] = if let ManifoldModel::FlatTorus2n { .. } = disc.model {
        lifted = disc
            .grid
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| {
                        p.iter()
                            .zip(&disc.center)
                            .map(|(a, c)| {
                                let d = a - c;
                                c + (d - d.round())
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        &lifted
    } else {
        &disc.grid
    };
    let disc = SmallDisc {
        model: disc.model,
        center: disc.center.clone(),
        grid: grid.to_vec(),
    };
    let disc = &disc;
    let (sym, riem) = quadrature(&disc.model, &disc.grid);
    // half-resolution comparison for the error estimate
    let error_estimate = if rows >= 13 && cols >= 10 && (rows - 1).is_multiple_of(2) && cols.is_multiple_of(2) {
        let coarse: Vec<Vec<Point>> = disc
            .grid
            .iter()
            .step_by(2)
            .map(|row| row.iter().step_by(2).cloned().collect())
            .collect();
        let (s2, r2) = quadrature(&disc.model, &coarse);
        ((sym - s2).abs() + (riem - r2).abs()).max(1e-12)
    } else {
        let dr = 1.0 / (rows - 1) as f64;
        let dt = 1.0 / cols as f64;
        (dr * dr + dt * dt) * (sym.abs() + riem + 1.0)
    };
    Ok(DiscAreas {
        symplectic: sym,
        riemannian: riem,
        error_estimate,
    })
}

/// Circle loop in the q1-p1 plane of a flat model.
pub fn planar_circle(model: ManifoldModel, center: &Point, radius: f64, k: usize) -> Loop {
    let n2 = model.embedding_dim();
    let n = model.half_dim();
    let samples: Vec<Point> = (0..k)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            let mut p = center.clone();
            p[0] += radius * t.cos();
            p[n] += radius * t.sin();
            debug_assert_eq!(p.len(), n2);
            p
        })
        .collect();
    Loop {
        model,
        samples,
        derivatives: None,
    }
}

/// Circle at colatitude theta0 around the north pole of the sphere,
/// positively oriented seen from outside.
pub fn sphere_small_circle(theta0: f64, k: usize) -> Loop {
    let samples: Vec<Point> = (0..k)
        .map(|j| {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            vec![
                theta0.sin() * phi.cos(),
                theta0.sin() * phi.sin(),
                theta0.cos(),
            ]
        })
        .collect();
    Loop {
        model: ManifoldModel::RoundSphere,
        samples,
        derivatives: None,
    }
}
