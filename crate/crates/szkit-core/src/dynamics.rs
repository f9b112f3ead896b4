//! Hamiltonian flow integration, variational equations and monodromies,
//! periodic-orbit search by Newton shooting, twist classification of fixed
//! critical points, quasi-autonomy tests, comparison Hamiltonians and
//! undertwistedness certificates.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geometry::{canonical_disc, disc_areas, ManifoldModel, Loop, Point, Tangent};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{symplectic_residual, SymplecticPath};

/// One RK4 step of x' = X_H(t, x) in the covering coordinates (no torus
/// wrap; sphere points renormalized).
fn rk4_step(h: &Hamiltonian, t: f64, x: &Point, dt: f64) -> Point {
    let f = |tt: f64, xx: &Point| h.vector_field(tt, xx);
    let k1 = f(t, x);
    let x2: Point = x.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
    let k2 = f(t + 0.5 * dt, &x2);
    let x3: Point = x.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect();
    let k3 = f(t + 0.5 * dt, &x3);
    let x4: Point = x.iter().zip(&k3).map(|(a, b)| a + dt * b).collect();
    let k4 = f(t + dt, &x4);
    let mut out: Point = (0..x.len())
        .map(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    if let ManifoldModel::RoundSphere = h.model {
        h.model.wrap(&mut out);
    }
    out
}

/// Flow phi_H from t0 to t1 in the covering space; the result is not
/// wrapped so torus displacements stay visible.
pub fn flow_to(h: &Hamiltonian, p: &Point, t0: f64, t1: f64, step: f64) -> Result<Point> {
    if !(step > 0.0 && step <= 1e-2 + 1e-12) {
        return Err(Error::IntegrationFailure(format!(
            "step {step} outside (0, 1e-2]"
        )));
    }
    let span = t1 - t0;
    let n_steps = (span.abs() / step).ceil().max(1.0) as usize;
    let dt = span / n_steps as f64;
    let mut x = p.clone();
    let mut t = t0;
    for _ in 0..n_steps {
        x = rk4_step(h, t, &x, dt);
        t += dt;
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::IntegrationFailure("state became non-finite".into()));
        }
    }
    Ok(x)
}

/// Flow trajectory with `n_out` stored nodes (cover coordinates).
pub fn flow_trajectory(
    h: &Hamiltonian,
    p: &Point,
    t0: f64,
    t1: f64,
    n_out: usize,
    step: f64,
) -> Result<Vec<(f64, Point)>> {
    let mut out = Vec::with_capacity(n_out + 1);
    let mut x = p.clone();
    out.push((t0, x.clone()));
    for k in 1..=n_out {
        let ta = t0 + (t1 - t0) * (k - 1) as f64 / n_out as f64;
        let tb = t0 + (t1 - t0) * k as f64 / n_out as f64;
        x = flow_to(h, &x, ta, tb, step)?;
        out.push((tb, x.clone()));
    }
    Ok(out)
}

fn frame_at_sphere_point(x: &Point) -> (Tangent, Tangent) {
    // pick the coordinate axis least aligned with x, project, normalize
    let mut axis = [0.0f64; 3];
    let amin = (0..3).min_by(|&i, &j| x[i].abs().partial_cmp(&x[j].abs()).unwrap()).unwrap();
    axis[amin] = 1.0;
    let dot: f64 = axis.iter().zip(x).map(|(a, b)| a * b).sum();
    let mut e1: Vec<f64> = (0..3).map(|i| axis[i] - dot * x[i]).collect();
    let n = (e1.iter().map(|c| c * c).sum::<f64>()).sqrt();
    for c in e1.iter_mut() {
        *c /= n;
    }
    // e2 = J e1 = x cross e1
    let e2 = vec![
        x[1] * e1[2] - x[2] * e1[1],
        x[2] * e1[0] - x[0] * e1[2],
        x[0] * e1[1] - x[1] * e1[0],
    ];
    (e1, e2)
}

/// Joint integration of the orbit and the variational equation
/// M' = DX_H(t, z(t)) M in ambient coordinates.
fn integrate_variational(
    h: &Hamiltonian,
    p: &Point,
    t_span: f64,
    n_samples: usize,
    step: f64,
) -> Result<Vec<(f64, Point, DMatrix<f64>)>> {
    let dim = h.model.embedding_dim();
    let mut x = p.clone();
    let mut m = DMatrix::<f64>::identity(dim, dim);
    let mut out = Vec::with_capacity(n_samples + 1);
    out.push((0.0, x.clone(), m.clone()));
    let sub_steps = ((t_span / n_samples as f64) / step).ceil().max(1.0) as usize;
    for k in 1..=n_samples {
        let ta = t_span * (k - 1) as f64 / n_samples as f64;
        let tb = t_span * k as f64 / n_samples as f64;
        let dt = (tb - ta) / sub_steps as f64;
        let mut t = ta;
        for _ in 0..sub_steps {
            // RK4 on the pair (x, M)
            let fx = |tt: f64, xx: &Point| h.vector_field(tt, xx);
            let fm = |tt: f64, xx: &Point, mm: &DMatrix<f64>| -> DMatrix<f64> {
                let mut dm = DMatrix::<f64>::zeros(dim, dim);
                for c in 0..dim {
                    let col: Vec<f64> = mm.column(c).iter().copied().collect();
                    let jcol = h.vector_field_jacobian_apply(tt, xx, &col);
                    for r in 0..dim {
                        dm[(r, c)] = jcol[r];
                    }
                }
                dm
            };
            let k1x = fx(t, &x);
            let k1m = fm(t, &x, &m);
            let x2: Point = x.iter().zip(&k1x).map(|(a, b)| a + 0.5 * dt * b).collect();
            let m2 = &m + &k1m * (0.5 * dt);
            let k2x = fx(t + 0.5 * dt, &x2);
            let k2m = fm(t + 0.5 * dt, &x2, &m2);
            let x3: Point = x.iter().zip(&k2x).map(|(a, b)| a + 0.5 * dt * b).collect();
            let m3 = &m + &k2m * (0.5 * dt);
            let k3x = fx(t + 0.5 * dt, &x3);
            let k3m = fm(t + 0.5 * dt, &x3, &m3);
            let x4: Point = x.iter().zip(&k3x).map(|(a, b)| a + dt * b).collect();
            let m4 = &m + &k3m * dt;
            let k4x = fx(t + dt, &x4);
            let k4m = fm(t + dt, &x4, &m4);
            x = (0..dim)
                .map(|i| x[i] + dt / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]))
                .collect();
            m = &m + (&k1m + &k2m * 2.0 + &k3m * 2.0 + &k4m) * (dt / 6.0);
            t += dt;
        }
        if let ManifoldModel::RoundSphere = h.model {
            h.model.wrap(&mut x);
        }
        if x.iter().any(|c| !c.is_finite()) || m.iter().any(|c| !c.is_finite()) {
            return Err(Error::IntegrationFailure("variational state non-finite".into()));
        }
        out.push((tb, x.clone(), m.clone()));
    }
    Ok(out)
}

/// Endpoint and ambient differential of phi_H^{t} started at p.
pub fn variational_for_hofer(
    h: &Hamiltonian,
    p: &Point,
    t_span: f64,
    step: f64,
) -> Result<(Point, DMatrix<f64>)> {
    let data = integrate_variational(h, p, t_span, 1, step)?;
    let last = data.into_iter().last().expect("non-empty");
    Ok((last.1, last.2))
}

/// Linearized flow d phi_H^t along the orbit through p over [0, t_span],
/// expressed as a symplectic path in the canonical frame: the global flat
/// frame on R^{2n} and the torus, the radially parallel-transported frame
/// of the canonical-disc trivialization on the sphere.
pub fn linearized_flow(
    h: &Hamiltonian,
    p: &Point,
    t_span: f64,
    n_samples: usize,
    tol: &Tolerances,
) -> Result<SymplecticPath> {
    let data = integrate_variational(h, p, t_span, n_samples, tol.flow_step)?;
    match h.model {
        ManifoldModel::RoundSphere => {
            // center the frame on the orbit's center of mass (the orbit
            // point itself when the orbit is a fixed point)
            let pts: Vec<Point> = data.iter().map(|(_, x, _)| x.clone()).collect();
            let mut center = vec![0.0; 3];
            for q in &pts {
                for (c, qi) in center.iter_mut().zip(q) {
                    *c += qi / pts.len() as f64;
                }
            }
            h.model.wrap(&mut center);
            let (e1, e2) = frame_at_sphere_point(&center);
            let frame_at = |x: &Point| -> Result<(Tangent, Tangent)> {
                let xi = h.model.log_map(&center, x)?;
                Ok((
                    h.model.parallel_transport(&center, &xi, &e1),
                    h.model.parallel_transport(&center, &xi, &e2),
                ))
            };
            let (f0a, f0b) = frame_at(&data[0].1)?;
            let mut samples = Vec::with_capacity(data.len());
            for (t, x, m) in &data {
                let (fa, fb) = frame_at(x)?;
                let mcols = |v: &Tangent| -> Vec<f64> {
                    let mv = m * DVector::from_row_slice(v);
                    mv.iter().copied().collect()
                };
                let m_f0a = mcols(&f0a);
                let m_f0b = mcols(&f0b);
                let dot = |a: &Vec<f64>, b: &Vec<f64>| -> f64 {
                    a.iter().zip(b).map(|(u, v)| u * v).sum()
                };
                let alpha = DMatrix::<f64>::from_row_slice(
                    2,
                    2,
                    &[
                        dot(&fa, &m_f0a),
                        dot(&fa, &m_f0b),
                        dot(&fb, &m_f0a),
                        dot(&fb, &m_f0b),
                    ],
                );
                samples.push((t / t_span.max(1e-300), alpha));
            }
            let path = SymplecticPath::from_samples(samples, tol)?;
            check_path_symplectic(&path)?;
            Ok(path)
        }
        _ => {
            let samples: Vec<(f64, DMatrix<f64>)> = data
                .iter()
                .map(|(t, _, m)| (t / t_span.max(1e-300), m.clone()))
                .collect();
            let path = SymplecticPath::from_samples(samples, tol)?;
            check_path_symplectic(&path)?;
            Ok(path)
        }
    }
}

fn check_path_symplectic(path: &SymplecticPath) -> Result<()> {
    let worst = path
        .samples()
        .iter()
        .map(|(_, m)| symplectic_residual(m))
        .fold(0.0f64, f64::max);
    if worst > 1e-8 {
        return Err(Error::IntegrationFailure(format!(
            "monodromy symplectic residual {worst:.3e} exceeds 1e-8"
        )));
    }
    Ok(())
}

/// A found periodic orbit with its monodromy in the canonical frame.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub period: f64,
    pub initial: Point,
    pub samples: Vec<Point>,
    pub monodromy: DMatrix<f64>,
    pub residual: f64,
    pub diameter: f64,
    /// Torus winding vector (contractibility witness); zero means
    /// contractible.
    pub winding: Option<Vec<i64>>,
}

impl PeriodicOrbit {
    pub fn is_constant(&self, tol: f64) -> bool {
        self.diameter < tol
    }

    pub fn velocity_samples(&self, h: &Hamiltonian) -> Vec<Tangent> {
        let k = self.samples.len();
        (0..k)
            .map(|i| {
                let t = self.period * i as f64 / k as f64;
                h.vector_field(t, &self.samples[i])
            })
            .collect()
    }
}

/// Search configuration: period window and seeding grid.
#[derive(Debug, Clone)]
pub struct OrbitSearch {
    pub t_min: f64,
    pub t_max: f64,
    pub t_count: usize,
    /// Seeds per axis (flat models) or total Fibonacci points (sphere).
    pub grid: usize,
    pub orbit_samples: usize,
    pub max_newton: usize,
}

impl Default for OrbitSearch {
    fn default() -> Self {
        OrbitSearch {
            t_min: 1.0,
            t_max: 1.0,
            t_count: 1,
            grid: 16,
            orbit_samples: 64,
            max_newton: 25,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitSearchStats {
    pub seeds: usize,
    pub converged: usize,
    pub dropped: usize,
    pub kept: usize,
}

fn seed_points(model: &ManifoldModel, grid: usize) -> Vec<Point> {
    match model {
        ManifoldModel::FlatTorus2n { n } => {
            let d = 2 * n;
            let mut seeds = vec![vec![]];
            for _ in 0..d {
                let mut next = Vec::new();
                for s in &seeds {
                    for g in 0..grid {
                        let mut t = s.clone();
                        t.push((g as f64 + 0.5) / grid as f64);
                        next.push(t);
                    }
                }
                seeds = next;
            }
            seeds
        }
        ManifoldModel::EuclideanR2n { n } => {
            let d = 2 * n;
            let mut seeds = vec![vec![]];
            for _ in 0..d {
                let mut next = Vec::new();
                for s in &seeds {
                    for g in 0..grid {
                        let mut t = s.clone();
                        t.push(-1.5 + 3.0 * (g as f64 + 0.5) / grid as f64);
                        next.push(t);
                    }
                }
                seeds = next;
            }
            seeds
        }
        ManifoldModel::RoundSphere => {
            let total = grid * grid;
            let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
            (0..total)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / total as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * (i as f64 / golden).fract();
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
    }
}

/// Wrapped residual phi^T(p) - p: the shortest representative on the torus,
/// the log on the sphere, the plain difference on R^{2n}.
fn periodicity_residual(model: &ManifoldModel, start: &Point, end_cover: &Point) -> (Vec<f64>, Option<Vec<i64>>) {
    match model {
        ManifoldModel::FlatTorus2n { .. } => {
            let mut res = Vec::with_capacity(start.len());
            let mut wind = Vec::with_capacity(start.len());
            for (e, s) in end_cover.iter().zip(start) {
                let d = e - s;
                let w = d.round();
                res.push(d - w);
                wind.push(w as i64);
            }
            (res, Some(wind))
        }
        ManifoldModel::RoundSphere => {
            let v = model
                .log_map(start, end_cover)
                .unwrap_or_else(|_| vec![2.0, 2.0, 2.0]);
            (v, None)
        }
        _ => (
            end_cover.iter().zip(start).map(|(e, s)| e - s).collect(),
            None,
        ),
    }
}

/// Newton shooting for T-periodic points over a seeding grid and a sampled
/// period window; deduplicated by orbit Hausdorff distance.
pub fn find_periodic_orbits(
    h: &Hamiltonian,
    search: &OrbitSearch,
    tol: &Tolerances,
) -> Result<(Vec<PeriodicOrbit>, OrbitSearchStats)> {
    let model = h.model;
    let seeds = seed_points(&model, search.grid);
    let mut found: Vec<PeriodicOrbit> = Vec::new();
    let mut stats = OrbitSearchStats {
        seeds: 0,
        converged: 0,
        dropped: 0,
        kept: 0,
    };
    for ti in 0..search.t_count {
        let period = if search.t_count == 1 {
            0.5 * (search.t_min + search.t_max)
        } else {
            search.t_min
                + (search.t_max - search.t_min) * ti as f64 / (search.t_count - 1) as f64
        };
        for seed in &seeds {
            stats.seeds += 1;
            match newton_orbit(h, seed, period, search.max_newton, tol) {
                Some(orbit) => {
                    stats.converged += 1;
                    let dup = found.iter().any(|o| {
                        orbit_hausdorff(&model, &o.samples, &orbit.samples) < tol.orbit_dedup
                    });
                    if !dup {
                        found.push(orbit);
                    }
                }
                None => {
                    stats.dropped += 1;
                }
            }
        }
    }
    // deterministic order: by initial point, lexicographic
    found.sort_by(|a, b| {
        a.initial
            .iter()
            .zip(&b.initial)
            .find_map(|(x, y)| {
                let c = x.partial_cmp(y).unwrap();
                if c == std::cmp::Ordering::Equal {
                    None
                } else {
                    Some(c)
                }
            })
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    stats.kept = found.len();
    Ok((found, stats))
}

fn newton_orbit(
    h: &Hamiltonian,
    seed: &Point,
    period: f64,
    max_newton: usize,
    tol: &Tolerances,
) -> Option<PeriodicOrbit> {
    let model = h.model;
    let mut p = seed.clone();
    let lambda = 1e-8;
    for _ in 0..max_newton {
        let end = flow_to(h, &p, 0.0, period, tol.flow_step).ok()?;
        let (res, winding) = periodicity_residual(&model, &p, &end);
        let rnorm = res.iter().map(|c| c * c).sum::<f64>().sqrt();
        if rnorm < tol.orbit_residual {
            return finalize_orbit(h, &p, period, rnorm, winding, tol);
        }
        // Jacobian of the wrapped residual is the monodromy minus identity
        let data = integrate_variational(h, &p, period, 1, tol.flow_step).ok()?;
        let m = &data.last()?.2;
        match model {
            ManifoldModel::RoundSphere => {
                let (e1, e2) = frame_at_sphere_point(&p);
                let mv = |v: &Tangent| -> Vec<f64> {
                    (m * DVector::from_row_slice(v)).iter().copied().collect()
                };
                let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                // residual and monodromy in the 2-frame at p
                let end_frame = frame_at_sphere_point(&data.last()?.1);
                let j = DMatrix::<f64>::from_row_slice(
                    2,
                    2,
                    &[
                        dot(&end_frame.0, &mv(&e1)),
                        dot(&end_frame.0, &mv(&e2)),
                        dot(&end_frame.1, &mv(&e1)),
                        dot(&end_frame.1, &mv(&e2)),
                    ],
                ) - DMatrix::<f64>::identity(2, 2);
                let r2 = DVector::from_row_slice(&[dot(&res, &e1), dot(&res, &e2)]);
                let jt = j.transpose();
                let lhs = &jt * &j + DMatrix::<f64>::identity(2, 2) * lambda;
                let rhs = -(&jt * r2);
                let delta = lhs.lu().solve(&rhs)?;
                let step_ambient: Vec<f64> = (0..3)
                    .map(|i| delta[0] * e1[i] + delta[1] * e2[i])
                    .collect();
                p = model.exp_map(&p, &step_ambient);
            }
            _ => {
                let dim = model.embedding_dim();
                let j = m - DMatrix::<f64>::identity(dim, dim);
                let jt = j.transpose();
                let lhs = &jt * &j + DMatrix::<f64>::identity(dim, dim) * lambda;
                let rhs = -(&jt * DVector::from_row_slice(&res));
                let delta = lhs.lu().solve(&rhs)?;
                for (pi, di) in p.iter_mut().zip(delta.iter()) {
                    *pi += di;
                }
                model.wrap(&mut p);
            }
        }
        if p.iter().any(|c| !c.is_finite()) {
            return None;
        }
    }
    // final residual check after the last update
    let end = flow_to(h, &p, 0.0, period, tol.flow_step).ok()?;
    let (res, wind) = periodicity_residual(&model, &p, &end);
    let rnorm = res.iter().map(|c| c * c).sum::<f64>().sqrt();
    if rnorm < tol.orbit_residual {
        finalize_orbit(h, &p, period, rnorm, wind, tol)
    } else {
        None
    }
}

fn finalize_orbit(
    h: &Hamiltonian,
    p: &Point,
    period: f64,
    residual: f64,
    winding: Option<Vec<i64>>,
    tol: &Tolerances,
) -> Option<PeriodicOrbit> {
    let model = h.model;
    let n_samples = 64;
    let traj = flow_trajectory(h, p, 0.0, period, n_samples, tol.flow_step).ok()?;
    let mut samples: Vec<Point> = traj.iter().take(n_samples).map(|(_, x)| x.clone()).collect();
    for s in samples.iter_mut() {
        model.wrap(s);
    }
    let mut diameter = 0.0f64;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            diameter = diameter.max(model.distance(&samples[i], &samples[j]));
        }
    }
    let data = integrate_variational(h, p, period, 1, tol.flow_step).ok()?;
    let ambient_monodromy = data.last()?.2.clone();
    let monodromy = match model {
        ManifoldModel::RoundSphere => {
            let (e1, e2) = frame_at_sphere_point(p);
            let mv = |v: &Tangent| -> Vec<f64> {
                (&ambient_monodromy * DVector::from_row_slice(v))
                    .iter()
                    .copied()
                    .collect()
            };
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            DMatrix::<f64>::from_row_slice(
                2,
                2,
                &[
                    dot(&e1, &mv(&e1)),
                    dot(&e1, &mv(&e2)),
                    dot(&e2, &mv(&e1)),
                    dot(&e2, &mv(&e2)),
                ],
            )
        }
        _ => ambient_monodromy,
    };
    let mut initial = p.clone();
    model.wrap(&mut initial);
    Some(PeriodicOrbit {
        period,
        initial,
        samples,
        monodromy,
        residual,
        diameter,
        winding,
    })
}

fn orbit_hausdorff(model: &ManifoldModel, a: &[Point], b: &[Point]) -> f64 {
    let one_sided = |u: &[Point], v: &[Point]| -> f64 {
        u.iter()
            .map(|p| {
                v.iter()
                    .map(|q| model.distance(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TwistClass {
    UnderTwisted,
    GenericallyUnderTwisted,
    OverTwisted,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwistReport {
    pub classification: TwistClass,
    /// (closing time, linear period) pairs for closed linearized
    /// trajectories with period at most T.
    pub witnesses: Vec<(f64, f64)>,
    /// Sampled t -> det(d phi^t - I).
    pub det_track: Vec<(f64, f64)>,
}

impl TwistReport {
    pub fn is_under_twisted(&self) -> bool {
        self.classification != TwistClass::OverTwisted
    }
}

/// Twist classification of a fixed critical point over the window [0, T].
pub fn classify_twist(
    h: &Hamiltonian,
    p: &Point,
    t_span: f64,
    tol: &Tolerances,
) -> Result<TwistReport> {
    // p must be a zero of the field for every t
    for k in 0..=32 {
        let t = t_span * k as f64 / 32.0;
        let v = h.vector_field(t, p);
        if v.iter().map(|c| c * c).sum::<f64>().sqrt() > 1e-9 {
            return Err(Error::NotACriticalPoint);
        }
    }
    let path = linearized_flow(h, p, t_span, 512, tol)?;
    let dim = 2 * path.n;
    let det_track: Vec<(f64, f64)> = path
        .samples()
        .iter()
        .map(|(t, m)| {
            (
                t * t_span,
                (m - DMatrix::<f64>::identity(dim, dim)).determinant(),
            )
        })
        .collect();

    let mut witnesses: Vec<(f64, f64)> = Vec::new();
    let mut over = false;
    let mut det_zero = false;

    if h.is_autonomous() {
        // eigenvalues of the linearization decide everything
        let a = frame_linearization(h, p, tol)?;
        let eig = a.complex_eigenvalues();
        let scale = eig.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for lambda in eig.iter() {
            if lambda.re.abs() < 1e-9 * scale && lambda.im.abs() > 1e-9 * scale {
                let theta = lambda.im.abs();
                let period = 2.0 * std::f64::consts::PI / theta;
                if period <= t_span + 1e-12 {
                    over = true;
                    witnesses.push((period, period));
                }
            }
            if lambda.norm() < 1e-9 * scale {
                det_zero = true; // fixed direction for all t
            }
        }
        witnesses.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        witnesses.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9);
    }
    // numeric zero tracking (also covers the time-dependent case)
    for w in det_track.windows(2) {
        let (t0, d0) = w[0];
        let (t1, d1) = w[1];
        if t0 > 1e-12 && (d0 == 0.0 || d0.signum() != d1.signum() || d1.abs() < 1e-12) {
            det_zero = true;
            if !h.is_autonomous() {
                over = true;
                witnesses.push((0.5 * (t0 + t1), 0.5 * (t0 + t1)));
            }
        }
    }
    // endpoint zero (period exactly T) counts as over-twisted
    if let Some(&(t_end, d_end)) = det_track.last() {
        if d_end.abs() < 1e-9 {
            det_zero = true;
            if !over {
                over = true;
                witnesses.push((t_end, t_end));
            }
        }
    }
    let classification = if over {
        TwistClass::OverTwisted
    } else if !det_zero {
        TwistClass::GenericallyUnderTwisted
    } else {
        TwistClass::UnderTwisted
    };
    Ok(TwistReport {
        classification,
        witnesses,
        det_track,
    })
}

/// Linearization matrix of the field at a fixed point, in the canonical
/// 2n-frame (-J0 Hess on flat models, the 2x2 frame block on the sphere).
fn frame_linearization(h: &Hamiltonian, p: &Point, _tol: &Tolerances) -> Result<DMatrix<f64>> {
    match h.model {
        ManifoldModel::RoundSphere => {
            let (e1, e2) = frame_at_sphere_point(p);
            let j1 = h.vector_field_jacobian_apply(0.0, p, &e1);
            let j2 = h.vector_field_jacobian_apply(0.0, p, &e2);
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            Ok(DMatrix::<f64>::from_row_slice(
                2,
                2,
                &[dot(&e1, &j1), dot(&e1, &j2), dot(&e2, &j1), dot(&e2, &j2)],
            ))
        }
        _ => {
            let dim = h.model.embedding_dim();
            let hess = h.hessian(0.0, p);
            let j0 = crate::linalg::standard_j0(dim / 2);
            Ok(-(&j0) * hess)
        }
    }
}

/// Grid test for quasi-autonomy: a common spatial minimizer and maximizer
/// across all sampled times.  Returns the witnesses when they exist.
pub fn is_quasi_autonomous(
    h: &Hamiltonian,
    grid: usize,
) -> Result<(bool, Option<Point>, Option<Point>)> {
    let pts = match h.model {
        ManifoldModel::EuclideanR2n { .. } => {
            let all_bumps = h.terms.iter().all(|t| {
                matches!(
                    t.spatial,
                    crate::hamiltonian::SpatialTerm::GaussianBump { .. }
                )
            });
            if !all_bumps {
                return Err(Error::Unbounded);
            }
            seed_points(&h.model, grid)
        }
        _ => seed_points(&h.model, grid),
    };
    let t_samples = 33;
    let mut x_min: Option<Point> = None;
    let mut x_max: Option<Point> = None;
    let step = grid_spacing(&h.model, grid);
    for k in 0..=t_samples {
        let t = k as f64 / t_samples as f64;
        let (mut best_min, mut best_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut arg_min, mut arg_max) = (None, None);
        for p in &pts {
            let v = h.value(t, p);
            if v < best_min {
                best_min = v;
                arg_min = Some(p.clone());
            }
            if v > best_max {
                best_max = v;
                arg_max = Some(p.clone());
            }
        }
        let arg_min = arg_min.unwrap();
        let arg_max = arg_max.unwrap();
        match (&x_min, &x_max) {
            (None, None) => {
                x_min = Some(arg_min);
                x_max = Some(arg_max);
            }
            (Some(m), Some(mx)) => {
                if h.model.distance(m, &arg_min) > 2.0 * step
                    || h.model.distance(mx, &arg_max) > 2.0 * step
                {
                    return Ok((false, None, None));
                }
            }
            _ => unreachable!(),
        }
    }
    Ok((true, x_min, x_max))
}

fn grid_spacing(model: &ManifoldModel, grid: usize) -> f64 {
    match model {
        ManifoldModel::FlatTorus2n { .. } => 1.0 / grid as f64,
        ManifoldModel::EuclideanR2n { .. } => 3.0 / grid as f64,
        ManifoldModel::RoundSphere => 2.0 / grid as f64,
    }
}

/// Largest epsilon on the grid for which G(t, x) = H(t, x^-) + eps f(x)
/// stays at most H with equality only at x^-; returns the comparison
/// Hamiltonian alongside.
pub fn comparison_hamiltonian(
    h: &Hamiltonian,
    f: &Hamiltonian,
    x_minus: &Point,
    eps_grid: &[f64],
    grid: usize,
) -> Result<(f64, Hamiltonian)> {
    if f.value(0.0, x_minus).abs() > 1e-9 {
        return Err(Error::PreconditionUnverified(
            "f(x^-) must vanish".into(),
        ));
    }
    let pts = seed_points(&h.model, grid);
    let spacing = grid_spacing(&h.model, grid);
    let t_samples = 17;
    let mut best: Option<f64> = None;
    let mut sorted: Vec<f64> = eps_grid.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    'eps: for &eps in &sorted {
        if eps <= 0.0 {
            continue;
        }
        for k in 0..=t_samples {
            let t = k as f64 / t_samples as f64;
            let base = h.value(t, x_minus);
            for p in &pts {
                let g = base + eps * f.value(0.0, p);
                let hv = h.value(t, p);
                if g > hv + 1e-10 {
                    continue 'eps;
                }
                // equality away from x^- disqualifies (flat minimum region)
                if (g - hv).abs() <= 1e-10 && h.model.distance(p, x_minus) > 2.0 * spacing {
                    continue 'eps;
                }
            }
        }
        best = Some(eps);
        break;
    }
    let eps = best.ok_or(Error::NoAdmissibleEpsilon)?;
    // G^H = H(t, x^-) + eps f: the first part is a constant-in-x term whose
    // profile collects the H profiles weighted by the term values at x^-
    let mut profile = crate::hamiltonian::TrigPoly::default();
    for term in &h.terms {
        let w = term.spatial.value(x_minus);
        match &term.profile {
            crate::hamiltonian::Profile::Plain(p) => {
                profile.a0 += w * p.a0;
                if profile.cos.len() < p.cos.len() {
                    profile.cos.resize(p.cos.len(), 0.0);
                }
                if profile.sin.len() < p.sin.len() {
                    profile.sin.resize(p.sin.len(), 0.0);
                }
                for (acc, c) in profile.cos.iter_mut().zip(&p.cos) {
                    *acc += w * c;
                }
                for (acc, s) in profile.sin.iter_mut().zip(&p.sin) {
                    *acc += w * s;
                }
            }
            _ => {
                return Err(Error::PreconditionUnverified(
                    "comparison Hamiltonian needs plain trig time profiles".into(),
                ))
            }
        }
    }
    let mut terms = vec![crate::hamiltonian::Term {
        spatial: crate::hamiltonian::SpatialTerm::Constant { c: 1.0 },
        profile: crate::hamiltonian::Profile::Plain(profile),
    }];
    for term in &f.terms {
        let mut scaled = term.clone();
        if let crate::hamiltonian::Profile::Plain(p) = &mut scaled.profile {
            p.a0 *= eps;
            for c in p.cos.iter_mut() {
                *c *= eps;
            }
            for s in p.sin.iter_mut() {
                *s *= eps;
            }
        }
        terms.push(scaled);
    }
    Ok((
        eps,
        Hamiltonian {
            model: h.model,
            terms,
            normalized: false,
        },
    ))
}

/// Certificate that an orbit is epsilon-positively undertwisted with its
/// canonical small bounding disc.
#[derive(Debug, Clone, Serialize)]
pub struct UndertwistCertificate {
    pub index: i64,
    pub symplectic_area: f64,
    pub capping: String,
    pub certified: bool,
}

/// Build the canonical disc of the orbit, compute the Conley-Zehnder index
/// of the linearized flow in the disc trivialization and the disc's
/// symplectic area, and certify index in [-n, n] and area >= -eps.
pub fn undertwist_certificate(
    h: &Hamiltonian,
    orbit: &PeriodicOrbit,
    eps: f64,
    tol: &Tolerances,
) -> Result<UndertwistCertificate> {
    let model = h.model;
    let inj = model.injectivity_radius();
    if orbit.diameter >= inj / 2.0 {
        return Err(Error::DiameterExceedsInjectivity {
            diam: orbit.diameter,
            bound: inj / 2.0,
        });
    }
    let z = Loop::new(model, orbit.samples.clone())?;
    let disc = canonical_disc(&z, 32.max(orbit.samples.len() / 2), tol)?;
    let areas = disc_areas(&disc)?;
    let path = linearized_flow(h, &orbit.initial, orbit.period, tol.path_samples, tol)?;
    let det1 = crate::cz::endpoint_det(&path);
    if det1.abs() <= tol.endpoint_det {
        return Err(Error::DegeneratePath(det1.abs()));
    }
    let index = crate::cz::cz_index(&path, tol)?.index;
    let n = model.half_dim() as i64;
    let certified =
        (-n..=n).contains(&index) && areas.symplectic >= -eps - areas.error_estimate;
    Ok(UndertwistCertificate {
        index,
        symplectic_area: areas.symplectic,
        capping: "canonical-disc".into(),
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{SpatialTerm, TrigPoly};
    use crate::linalg::{matrix_exponential, standard_j0};
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn oscillator(a: f64) -> Hamiltonian {
        Hamiltonian::autonomous(
            ManifoldModel::EuclideanR2n { n: 1 },
            vec![SpatialTerm::Quadratic {
                s: vec![vec![a, 0.0], vec![0.0, a]],
            }],
        )
    }

    fn height(c: f64) -> Hamiltonian {
        Hamiltonian::autonomous(
            ManifoldModel::RoundSphere,
            vec![SpatialTerm::AmbientLinear { c: [0.0, 0.0, c] }],
        )
    }

    #[test]
    fn oscillator_flow_closes_after_full_period() {
        let h = oscillator(1.0);
        let t = tol();
        let end = flow_to(&h, &vec![1.0, 0.0], 0.0, 2.0 * PI, t.flow_step).unwrap();
        assert!((end[0] - 1.0).abs() < 1e-6 && end[1].abs() < 1e-6);
    }

    #[test]
    fn energy_is_conserved_along_autonomous_flows() {
        let h = Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![SpatialTerm::Trig {
                k: vec![1, 1],
                cos_amp: 0.3,
                sin_amp: 0.2,
            }],
        );
        let t = tol();
        let p = vec![0.12, 0.77];
        let e0 = h.value(0.0, &p);
        let traj = flow_trajectory(&h, &p, 0.0, 1.0, 100, t.flow_step).unwrap();
        for (_, x) in traj {
            assert!((h.value(0.0, &x) - e0).abs() < 1e-6);
        }
    }

    #[test]
    fn torus_linear_hamiltonian_winds() {
        // H = alpha p gives q' = alpha, a straight winding line
        let h = Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![SpatialTerm::Trig {
                k: vec![0, 0],
                cos_amp: 0.0,
                sin_amp: 0.0,
            }],
        );
        // use a quadratic-like linear term through a trig of zero frequency:
        // instead check the explicit solution with a direct field
        let _ = h;
        let hlin = Hamiltonian {
            model: ManifoldModel::FlatTorus2n { n: 1 },
            terms: vec![crate::hamiltonian::Term {
                spatial: SpatialTerm::Trig {
                    k: vec![0, 1],
                    cos_amp: 0.0,
                    sin_amp: 1.0 / (2.0 * PI),
                },
                profile: crate::hamiltonian::Profile::Plain(TrigPoly::constant(1.0)),
            }],
        normalized: false,
        };
        // near p = 0, H ~ p so X = (1, 0): the orbit winds in q
        let t = tol();
        let end = flow_to(&hlin, &vec![0.0, 0.0], 0.0, 1.0, t.flow_step).unwrap();
        assert!((end[0] - 1.0).abs() < 1e-8);
        assert!(end[1].abs() < 1e-8);
    }

    #[test]
    fn linearized_flow_matches_matrix_exponential() {
        // quadratic H = (1/2) x^T S x linearizes to exp(-J0 S t)
        let s = vec![vec![0.8, 0.2], vec![0.2, -0.5]];
        let h = Hamiltonian::autonomous(
            ManifoldModel::EuclideanR2n { n: 1 },
            vec![SpatialTerm::Quadratic { s: s.clone() }],
        );
        let t = tol();
        let path = linearized_flow(&h, &vec![0.0, 0.0], 1.0, 64, &t).unwrap();
        let smat = DMatrix::<f64>::from_fn(2, 2, |i, j| s[i][j]);
        let a = -standard_j0(1) * smat;
        for &u in &[0.25, 0.5, 1.0] {
            let expected = matrix_exponential(&a, u).unwrap();
            assert!((path.evaluate(u) - expected).amax() < 1e-9);
        }
    }

    #[test]
    fn sphere_fixed_point_linearization_rotates() {
        // height flow at the north pole rotates the tangent plane at rate c
        let c = 1.3;
        let h = height(c);
        let t = tol();
        let path = linearized_flow(&h, &vec![0.0, 0.0, 1.0], 1.0, 64, &t).unwrap();
        let m = path.evaluate(1.0);
        // rotation by angle c in the oriented tangent frame
        let expect = matrix_exponential(&standard_j0(1), c).unwrap();
        assert!((m - expect).amax() < 1e-8, "monodromy mismatch");
    }

    #[test]
    fn oscillator_orbit_search_finds_circles_and_origin() {
        // at a = 2 pi every point is 1-periodic
        let h = oscillator(2.0 * PI);
        let t = tol();
        let search = OrbitSearch {
            grid: 4,
            orbit_samples: 64,
            ..Default::default()
        };
        let (orbits, stats) = find_periodic_orbits(&h, &search, &t).unwrap();
        assert!(stats.converged == stats.seeds);
        assert!(!orbits.is_empty());
        // circles of several radii plus (after dedup) distinct orbits only
        for o in &orbits {
            assert!(o.residual < 1e-8);
        }
    }

    #[test]
    fn slow_morse_hamiltonian_has_only_constant_orbits() {
        let h = Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![SpatialTerm::Trig {
                k: vec![1, 0],
                cos_amp: 0.01,
                sin_amp: 0.0,
            },
            SpatialTerm::Trig {
                k: vec![0, 1],
                cos_amp: 0.01,
                sin_amp: 0.0,
            }],
        );
        let t = tol();
        let search = OrbitSearch {
            t_min: 0.9,
            t_max: 1.1,
            t_count: 3,
            grid: 6,
            orbit_samples: 32,
            max_newton: 30,
        };
        let (orbits, _) = find_periodic_orbits(&h, &search, &t).unwrap();
        assert!(!orbits.is_empty());
        for o in &orbits {
            assert!(o.diameter < 1e-6, "unexpected nonconstant orbit");
            if let Some(w) = &o.winding {
                assert!(w.iter().all(|&c| c == 0));
            }
        }
    }


    #[test]
    fn constant_hamiltonian_linearizes_to_identity() {
        let h = Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![SpatialTerm::Constant { c: 2.5 }],
        );
        let t = tol();
        let path = linearized_flow(&h, &vec![0.3, 0.4], 1.0, 32, &t).unwrap();
        for (_, m) in path.samples() {
            assert!((m - DMatrix::<f64>::identity(2, 2)).amax() < 1e-12);
        }
    }

    #[test]
    fn zero_hamiltonian_orbits_dedup_to_one_constant() {
        let h = Hamiltonian::autonomous(ManifoldModel::FlatTorus2n { n: 1 }, vec![]);
        let t = tol();
        let search = OrbitSearch {
            grid: 4,
            ..Default::default()
        };
        let (orbits, stats) = find_periodic_orbits(&h, &search, &t).unwrap();
        // every seed is a fixed point; the Hausdorff dedup keeps them as
        // distinct constant orbits at distinct points
        assert_eq!(stats.converged, stats.seeds);
        assert_eq!(orbits.len(), 16);
        for o in &orbits {
            assert_eq!(o.diameter, 0.0);
            assert_eq!(o.residual, 0.0);
        }
    }

    #[test]
    fn twist_classification_flips_at_two_pi() {
        let t = tol();
        let origin = vec![0.0, 0.0];
        let under = classify_twist(&oscillator(PI), &origin, 1.0, &t).unwrap();
        assert!(under.is_under_twisted());
        assert_eq!(under.classification, TwistClass::GenericallyUnderTwisted);

        let over = classify_twist(&oscillator(4.0 * PI), &origin, 1.0, &t).unwrap();
        assert_eq!(over.classification, TwistClass::OverTwisted);

        // the boundary case: linear period exactly 1
        let boundary = classify_twist(&oscillator(2.0 * PI), &origin, 1.0, &t).unwrap();
        assert_eq!(boundary.classification, TwistClass::OverTwisted);
        let last = boundary.det_track.last().unwrap();
        assert!(last.1.abs() < 1e-6, "det track should vanish at t = 1");
    }

    #[test]
    fn non_critical_point_is_rejected() {
        let t = tol();
        assert!(matches!(
            classify_twist(&oscillator(1.0), &vec![0.5, 0.0], 1.0, &t),
            Err(Error::NotACriticalPoint)
        ));
    }

    #[test]
    fn quasi_autonomy_detection() {
        // autonomous is always quasi-autonomous
        let h = Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![SpatialTerm::Trig {
                k: vec![1, 0],
                cos_amp: 0.2,
                sin_amp: 0.0,
            }],
        );
        let (ok, xm, xp) = is_quasi_autonomous(&h, 32).unwrap();
        assert!(ok);
        assert!(xm.is_some() && xp.is_some());

        // positive time profile keeps the extrema in place
        let scaled = Hamiltonian {
            model: h.model,
            terms: vec![crate::hamiltonian::Term {
                spatial: SpatialTerm::Trig {
                    k: vec![1, 0],
                    cos_amp: 0.2,
                    sin_amp: 0.0,
                },
                profile: crate::hamiltonian::Profile::Plain(TrigPoly {
                    a0: 1.0,
                    cos: vec![0.5],
                    sin: vec![],
                }),
            }],
            normalized: false,
        };
        assert!(is_quasi_autonomous(&scaled, 32).unwrap().0);

        // a sign-changing profile on an asymmetric landscape flips the argmin
        let flipping = Hamiltonian {
            model: h.model,
            terms: vec![crate::hamiltonian::Term {
                spatial: SpatialTerm::Trig {
                    k: vec![1, 0],
                    cos_amp: 0.2,
                    sin_amp: 0.1,
                },
                profile: crate::hamiltonian::Profile::Plain(TrigPoly {
                    a0: 0.0,
                    cos: vec![],
                    sin: vec![1.0],
                }),
            }],
            normalized: false,
        };
        assert!(!is_quasi_autonomous(&flipping, 32).unwrap().0);
    }

    #[test]
    fn comparison_hamiltonian_bounds_from_below() {
        // H autonomous equal to f itself: every eps <= 1 works
        let f = Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![
                SpatialTerm::Trig {
                    k: vec![1, 0],
                    cos_amp: -0.1,
                    sin_amp: 0.0,
                },
                SpatialTerm::Constant { c: 0.1 },
            ],
        );
        // f has minimum 0 at q = 0 (cos term negated): f = 0.1 (1 - cos 2 pi q)
        let x_minus = vec![0.0, 0.0];
        assert!(f.value(0.0, &x_minus).abs() < 1e-12);
        // eps = 1 would make the equality locus all of M, so the largest
        // admissible grid value below 1 is returned
        let (eps, g) = comparison_hamiltonian(&f, &f, &x_minus, &[0.25, 0.5, 0.9], 64).unwrap();
        assert!((eps - 0.9).abs() < 1e-12);
        // G = f(t, x^-) + eps f = eps f here, bounded by f
        for k in 0..32 {
            let p = vec![k as f64 / 32.0, 0.3];
            assert!(g.value(0.3, &p) <= f.value(0.3, &p) + 1e-9);
        }
    }

    #[test]
    fn undertwist_certificate_at_a_minimum() {
        // slow torus Morse minimum: constant orbit has index n = 1, area 0
        let h = Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![
                SpatialTerm::Trig {
                    k: vec![1, 0],
                    cos_amp: 0.05,
                    sin_amp: 0.0,
                },
                SpatialTerm::Trig {
                    k: vec![0, 1],
                    cos_amp: 0.05,
                    sin_amp: 0.0,
                },
            ],
        );
        let t = tol();
        // minimum at (1/2, 1/2)
        let p = vec![0.5, 0.5];
        let orbit = PeriodicOrbit {
            period: 1.0,
            initial: p.clone(),
            samples: vec![p.clone(); 64],
            monodromy: DMatrix::<f64>::identity(2, 2),
            residual: 0.0,
            diameter: 0.0,
            winding: Some(vec![0, 0]),
        };
        let cert = undertwist_certificate(&h, &orbit, 0.0, &t).unwrap();
        assert_eq!(cert.index, 1);
        assert!(cert.symplectic_area.abs() < 1e-10);
        assert!(cert.certified);

        // at the maximum the index is -n
        let top = vec![0.0, 0.0];
        let orbit_top = PeriodicOrbit {
            period: 1.0,
            initial: top.clone(),
            samples: vec![top.clone(); 64],
            monodromy: DMatrix::<f64>::identity(2, 2),
            residual: 0.0,
            diameter: 0.0,
            winding: Some(vec![0, 0]),
        };
        let cert_top = undertwist_certificate(&h, &orbit_top, 0.0, &t).unwrap();
        assert_eq!(cert_top.index, -1);
        assert!(cert_top.certified);
    }

    #[test]
    fn fast_oscillator_orbit_is_not_certified() {
        // a = 2.5 pi: the constant orbit at the origin has index shifted out
        // of [-n, n]
        let h = oscillator(2.5 * PI);
        let t = tol();
        let origin = vec![0.0, 0.0];
        let orbit = PeriodicOrbit {
            period: 1.0,
            initial: origin.clone(),
            samples: vec![origin.clone(); 64],
            monodromy: DMatrix::<f64>::identity(2, 2),
            residual: 0.0,
            diameter: 0.0,
            winding: None,
        };
        let cert = undertwist_certificate(&h, &orbit, 0.0, &t).unwrap();
        // S = -2.5 pi I has both eigenvalues below -2 pi: the crossing
        // algorithm handles it and lands outside the window
        assert_eq!(cert.index, 3);
        assert!(!cert.certified);
    }
}
