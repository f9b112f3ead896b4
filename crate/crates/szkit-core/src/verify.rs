//! End-to-end verification experiments tying the modules together, with
//! structured JSON-ready reports.
//!
//! Each experiment runs deterministic checks (seeded where random inputs
//! are involved) and emits one pass/fail line per check; a failing line
//! names the identity it probes.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::action::{action_value, CappedLoop, Capping};
use crate::chern::{
    recapping_index, sphere_transition_loop, sphere_transition_loop_reversed, CappingClass,
};
use crate::cz::{cz_exp_formula, cz_index, loop_shift};
use crate::dynamics::{find_periodic_orbits, linearized_flow, OrbitSearch};
use crate::error::{Error, Result};
use crate::geometry::{canonical_disc, center_of_mass, disc_areas, Loop, ManifoldModel, Point};
use crate::hamiltonian::{Hamiltonian, Profile, SpatialTerm, Term, TrigPoly};
use crate::linalg::{SymmetricMatrix, SymplecticPath};
use crate::sampling;
use crate::Tolerances;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: serde_json::Value,
    pub expected: String,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub experiment: String,
    pub inputs: serde_json::Value,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl VerificationReport {
    fn new(experiment: &str, inputs: serde_json::Value) -> Self {
        VerificationReport {
            schema_version: 1,
            experiment: experiment.into(),
            inputs,
            passed: true,
            checks: Vec::new(),
            runtime_ms: None,
        }
    }

    fn push(
        &mut self,
        name: String,
        passed: bool,
        measured: serde_json::Value,
        expected: String,
        tolerance: f64,
    ) {
        self.passed &= passed;
        self.checks.push(Check {
            name,
            passed,
            measured,
            expected,
            tolerance,
        });
    }

    pub fn print_lines(&self) {
        for c in &self.checks {
            println!(
                "[{}] {} :: {} (expected {}, measured {})",
                if c.passed { "pass" } else { "FAIL" },
                self.experiment,
                c.name,
                c.expected,
                c.measured
            );
        }
        println!(
            "[{}] {} overall",
            if self.passed { "pass" } else { "FAIL" },
            self.experiment
        );
    }
}

/// Oracle agreement: the crossing-form index of exp(J0 S t) equals
/// mu^-(S) - n for random nondegenerate S with spectrum inside
/// (-2 pi, 2 pi), margin 0.1 from 0 and from the boundary.
pub fn verify_cz_oracle(count: usize, seed: u64, tol: &Tolerances) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("cz-oracle", json!({"count": count, "seed": seed}));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    for i in 0..count {
        let n = 1 + i % 3;
        let s = sampling::random_symmetric(2 * n, 0.1, 2.0 * std::f64::consts::PI - 0.1, &mut rng);
        let expected = cz_exp_formula(&s, tol)?.index;
        let path = SymplecticPath::from_exp(&s, 256)?;
        let got = cz_index(&path, tol)?.index;
        if got != expected {
            mismatches += 1;
            report.push(
                format!("case {i} (n = {n})"),
                false,
                json!({"crossing_form": got, "closed_formula": expected}),
                "crossing-form index equals the closed-formula index".into(),
                0.0,
            );
        }
    }
    report.push(
        format!("{count} random exp-paths"),
        mismatches == 0,
        json!({"mismatches": mismatches}),
        "exact integer agreement of both index routes".into(),
        0.0,
    );
    Ok(report)
}

/// Loop-shift law: multiplying a path by a loop of winding k shifts the
/// index by exactly 2k.
pub fn verify_loop_shift(count: usize, seed: u64, tol: &Tolerances) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("loop-shift", json!({"count": count, "seed": seed}));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0usize;
    let mut mismatches = 0usize;
    let mut rejected = 0usize;
    while done < count {
        let n = 1 + done % 3;
        let k_total: i64 = (rng.gen_range(0..5) as i64) - 2;
        let mut windings = vec![0i64; n];
        windings[rng.gen_range(0..n)] = k_total;
        let s = sampling::random_symmetric(2 * n, 0.1, 2.0 * std::f64::consts::PI - 0.1, &mut rng);
        let attempt = (|| -> Result<(i64, i64)> {
            let base = SymplecticPath::from_exp(&s, 512)?;
            let mu0 = cz_index(&base, tol)?.index;
            let loop_samples = sampling::random_real_unitary_loop(n, &windings, 512, &mut rng);
            let loop_path = SymplecticPath::from_samples(loop_samples, tol)?;
            let shifted = loop_shift(&loop_path, &base, tol)?;
            let mu1 = cz_index(&shifted, tol)?.index;
            Ok((mu0, mu1))
        })();
        match attempt {
            Ok((mu0, mu1)) => {
                done += 1;
                if mu1 - mu0 != 2 * k_total {
                    mismatches += 1;
                    report.push(
                        format!("pair {done} (n = {n}, winding {k_total})"),
                        false,
                        json!({"shift": mu1 - mu0}),
                        format!("index shift 2k = {}", 2 * k_total),
                        0.0,
                    );
                }
            }
            Err(Error::ResolutionTooCoarse(_)) | Err(Error::DegeneratePath(_)) => {
                // an unresolvable draw (degenerate crossing or endpoint);
                // redraw deterministically
                rejected += 1;
                if rejected > count {
                    return Err(Error::ResolutionTooCoarse(
                        "too many degenerate draws in the loop-shift experiment".into(),
                    ));
                }
            }
            Err(e) => return Err(e),
        }
    }
    report.push(
        format!("{count} random (loop, path) pairs"),
        mismatches == 0,
        json!({"mismatches": mismatches, "redrawn": rejected}),
        "index shift equals twice the loop winding, exactly".into(),
        0.0,
    );
    Ok(report)
}

/// Transition-loop winding of the tangent bundle of the sphere: exactly 2
/// along the boundary orientation of the north cap, -2 reversed.
pub fn verify_transition_s2(samples: usize, tol: &Tolerances) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("transition-s2", json!({"samples": samples}));
    let fwd = sphere_transition_loop(samples, tol)?;
    let w = fwd.winding(tol)?;
    report.push(
        "equator transition winding".into(),
        w == 2,
        json!(w),
        "2".into(),
        0.0,
    );
    let rev = sphere_transition_loop_reversed(samples, tol)?;
    let wr = rev.winding(tol)?;
    report.push(
        "reversed orientation".into(),
        wr == -2,
        json!(wr),
        "-2".into(),
        0.0,
    );
    Ok(report)
}

/// Recapping a pole orbit on the sphere by k spheres shifts its index by
/// exactly 4k, through the index arithmetic and through the loop-shift
/// route, and the two routes agree.
pub fn verify_theorem_c(
    samples: usize,
    ks: &[i64],
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("theorem-c", json!({"samples": samples, "ks": ks}));
    let h = Hamiltonian::autonomous(
        ManifoldModel::RoundSphere,
        vec![SpatialTerm::AmbientLinear { c: [0.0, 0.0, 1.0] }],
    );
    let trans = sphere_transition_loop(samples.max(256), tol)?;
    let trans_rev = sphere_transition_loop_reversed(samples.max(256), tol)?;

    for (pole_name, pole, expect_mu0) in [
        ("north pole (max)", vec![0.0, 0.0, 1.0], -1i64),
        ("south pole (min)", vec![0.0, 0.0, -1.0], 1i64),
    ] {
        let path = linearized_flow(&h, &pole, 1.0, tol.path_samples, tol)?;
        let mu0 = cz_index(&path, tol)?.index;
        report.push(
            format!("{pole_name}: base index"),
            mu0 == expect_mu0,
            json!(mu0),
            format!("{expect_mu0}"),
            0.0,
        );
        for &k in ks {
            // arithmetic route
            let arithmetic = recapping_index(mu0, &CappingClass::sphere(k));
            // loop-shift route, the transition loop matched to the pole
            let recap_loop = if pole[2] > 0.0 {
                trans.pointwise_power(k, tol)?
            } else {
                trans_rev.pointwise_power(-k, tol)?
            };
            let shifted = loop_shift(&recap_loop, &path, tol)?;
            let geometric = cz_index(&shifted, tol)?.index;
            let ok = arithmetic == mu0 + 4 * k && geometric == arithmetic;
            report.push(
                format!("{pole_name}: recap k = {k}"),
                ok,
                json!({"arithmetic": arithmetic, "loop_shift": geometric}),
                format!("both routes give {}", mu0 + 4 * k),
                0.0,
            );
        }
    }
    Ok(report)
}

/// Critical points of an autonomous Hamiltonian on a compact model by grid
/// seeding and Newton on the gradient.
pub fn find_critical_points(h: &Hamiltonian, grid: usize) -> Result<Vec<Point>> {
    let model = h.model;
    let mut pts: Vec<Point> = Vec::new();
    let seeds: Vec<Point> = match model {
        ManifoldModel::FlatTorus2n { n } => {
            let d = 2 * n;
            let mut s = vec![vec![]];
            for _ in 0..d {
                let mut next = Vec::new();
                for base in &s {
                    for g in 0..grid {
                        let mut t = base.clone();
                        t.push(g as f64 / grid as f64);
                        next.push(t);
                    }
                }
                s = next;
            }
            s
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
        ManifoldModel::EuclideanR2n { .. } => {
            return Err(Error::Unbounded);
        }
    };
    for seed in seeds {
        let mut x = seed;
        let mut ok = false;
        for _ in 0..60 {
            let g = h.riemannian_gradient(0.0, &x);
            let gn: f64 = g.iter().map(|c| c * c).sum::<f64>().sqrt();
            if gn < 1e-11 {
                ok = true;
                break;
            }
            let delta: Vec<f64> = match model {
                ManifoldModel::RoundSphere => {
                    // Newton with the intrinsic Hessian: the ambient block
                    // restricted to the frame minus the shape term
                    let q = riemannian_hessian_frame(h, &x);
                    let (e1, e2) = sphere_frame(&x);
                    let dot =
                        |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
                    let rhs = DVector::from_row_slice(&[-dot(&g, &e1), -dot(&g, &e2)]);
                    match (q + DMatrix::<f64>::identity(2, 2) * 1e-12).lu().solve(&rhs) {
                        Some(d) => (0..3).map(|i| d[0] * e1[i] + d[1] * e2[i]).collect(),
                        None => break,
                    }
                }
                _ => {
                    let hess = h.hessian(0.0, &x);
                    let dim = x.len();
                    let g_v = DVector::from_row_slice(&g);
                    match (hess + DMatrix::<f64>::identity(dim, dim) * 1e-12)
                        .lu()
                        .solve(&(-&g_v))
                    {
                        Some(d) => d.iter().copied().collect(),
                        None => break,
                    }
                }
            };
            let dn: f64 = delta.iter().map(|c| c * c).sum::<f64>().sqrt();
            let capped: Vec<f64> = if dn > 0.3 {
                delta.iter().map(|c| c * 0.3 / dn).collect()
            } else {
                delta
            };
            x = model.exp_map(&x, &capped);
        }
        if ok {
            model.wrap(&mut x);
            let dup = pts.iter().any(|p| model.distance(p, &x) < 1e-6);
            if !dup {
                pts.push(x);
            }
        }
    }
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .find_map(|(x, y)| {
                let c = x.partial_cmp(y).unwrap();
                (c != std::cmp::Ordering::Equal).then_some(c)
            })
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(pts)
}

/// Intrinsic Hessian of an autonomous Hamiltonian at a sphere point,
/// expressed in the tangent frame: P Hess P - (x . grad) I.
fn riemannian_hessian_frame(h: &Hamiltonian, x: &Point) -> DMatrix<f64> {
    let hess = h.hessian(0.0, x);
    let grad = h.gradient(0.0, x);
    let normal: f64 = x.iter().zip(&grad).map(|(a, b)| a * b).sum();
    let (e1, e2) = sphere_frame(x);
    let hv = |v: &Vec<f64>| -> Vec<f64> {
        (&hess * DVector::from_row_slice(v)).iter().copied().collect()
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    DMatrix::<f64>::from_row_slice(
        2,
        2,
        &[
            dot(&e1, &hv(&e1)) - normal,
            dot(&e1, &hv(&e2)),
            dot(&e2, &hv(&e1)),
            dot(&e2, &hv(&e2)) - normal,
        ],
    )
}

fn sphere_frame(x: &Point) -> (Vec<f64>, Vec<f64>) {
    let mut axis = [0.0f64; 3];
    let amin = (0..3)
        .min_by(|&i, &j| x[i].abs().partial_cmp(&x[j].abs()).unwrap())
        .unwrap();
    axis[amin] = 1.0;
    let d: f64 = axis.iter().zip(x).map(|(a, b)| a * b).sum();
    let mut e1: Vec<f64> = (0..3).map(|i| axis[i] - d * x[i]).collect();
    let n = e1.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in e1.iter_mut() {
        *c /= n;
    }
    let e2 = vec![
        x[1] * e1[2] - x[2] * e1[1],
        x[2] * e1[0] - x[0] * e1[2],
        x[0] * e1[1] - x[1] * e1[0],
    ];
    (e1, e2)
}

/// Minimum positive gap between distinct critical values of an autonomous
/// Morse Hamiltonian; NoGap when only one value exists.
pub fn energy_gap_ode(h: &Hamiltonian, grid: usize, tol: &Tolerances) -> Result<f64> {
    let pts = find_critical_points(h, grid)?;
    if pts.is_empty() {
        return Err(Error::NoConvergence("no critical points found".into()));
    }
    for p in &pts {
        let eig = match h.model {
            ManifoldModel::RoundSphere => {
                crate::linalg::jacobi_eigenvalues(&riemannian_hessian_frame(h, p))
            }
            _ => crate::linalg::jacobi_eigenvalues(&h.hessian(0.0, p)),
        };
        for &e in &eig {
            if e.abs() < tol.eig_degenerate.max(1e-9) {
                return Err(Error::DegenerateHessian(e));
            }
        }
    }
    let mut values: Vec<f64> = pts.iter().map(|p| h.value(0.0, p)).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if values.len() < 2 {
        return Err(Error::NoGap);
    }
    let mut gap = f64::INFINITY;
    for w in values.windows(2) {
        gap = gap.min(w[1] - w[0]);
    }
    Ok(gap)
}

/// Result of one continuation-trajectory energy identity run.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyIdentityCase {
    pub action_start: f64,
    pub action_end: f64,
    pub dissipation: f64,
    pub coupling: f64,
    pub residual: f64,
}

/// Integrate u' = grad H^{rho(tau)}(u) for the linear homotopy
/// H^s = (1-s)H + sK over [-window, window], rho a smoothstep supported in
/// [-ramp, ramp], and evaluate the action identity
/// A_K(x+) - A_H(x-) = -int |u'|^2 - int rho' (K - H)(u).
pub fn energy_identity_case(
    h: &Hamiltonian,
    k_ham: &Hamiltonian,
    start: &Point,
    window: f64,
    ramp: f64,
    step: f64,
) -> Result<EnergyIdentityCase> {
    let model = h.model;
    let rho = |tau: f64| -> (f64, f64) {
        let u = ((tau + ramp) / (2.0 * ramp)).clamp(0.0, 1.0);
        let s = ((6.0 * u - 15.0) * u + 10.0) * u * u * u;
        let ds = 30.0 * u * u * (u - 1.0) * (u - 1.0) / (2.0 * ramp);
        (s, ds)
    };
    let field = |tau: f64, x: &Point| -> Vec<f64> {
        let (r, _) = rho(tau);
        let gh = h.riemannian_gradient(0.0, x);
        let gk = k_ham.riemannian_gradient(0.0, x);
        (0..x.len()).map(|i| (1.0 - r) * gh[i] + r * gk[i]).collect()
    };
    let mut n_steps = (2.0 * window / step).ceil() as usize;
    if n_steps % 2 == 1 {
        n_steps += 1; // even step count -> odd node count for Simpson
    }
    let dt = 2.0 * window / n_steps as f64;
    let mut u = start.clone();
    let mut tau = -window;
    let mut speed2 = Vec::with_capacity(n_steps + 1);
    let mut coupling_density = Vec::with_capacity(n_steps + 1);
    let record = |u: &Point, tau: f64, s2: &mut Vec<f64>, cd: &mut Vec<f64>| {
        let v = field(tau, u);
        s2.push(v.iter().map(|c| c * c).sum::<f64>());
        let (_, dr) = rho(tau);
        cd.push(dr * (k_ham.value(0.0, u) - h.value(0.0, u)));
    };
    record(&u, tau, &mut speed2, &mut coupling_density);
    for _ in 0..n_steps {
        let k1 = field(tau, &u);
        let u2: Point = u.iter().zip(&k1).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k2 = field(tau + 0.5 * dt, &u2);
        let u3: Point = u.iter().zip(&k2).map(|(a, b)| a + 0.5 * dt * b).collect();
        let k3 = field(tau + 0.5 * dt, &u3);
        let u4: Point = u.iter().zip(&k3).map(|(a, b)| a + dt * b).collect();
        let k4 = field(tau + dt, &u4);
        u = (0..u.len())
            .map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        if let ManifoldModel::RoundSphere = model {
            model.wrap(&mut u);
        }
        tau += dt;
        record(&u, tau, &mut speed2, &mut coupling_density);
    }
    // the endpoint must have settled at a critical point of K
    let g_end = k_ham.riemannian_gradient(0.0, &u);
    let gn: f64 = g_end.iter().map(|c| c * c).sum::<f64>().sqrt();
    if gn > 1e-6 {
        return Err(Error::NoConvergence(format!(
            "trajectory did not reach a critical point (|grad K| = {gn:.3e})"
        )));
    }
    let simpson = |vals: &[f64]| -> f64 {
        let m = vals.len();
        debug_assert!(m % 2 == 1);
        let mut acc = vals[0] + vals[m - 1];
        for (i, v) in vals.iter().enumerate().skip(1).take(m - 2) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * dt / 3.0
    };
    let dissipation = simpson(&speed2);
    let coupling = simpson(&coupling_density);
    let action_start = -h.value(0.0, start);
    let action_end = -k_ham.value(0.0, &u);
    let residual = (action_end - action_start + dissipation + coupling).abs();
    Ok(EnergyIdentityCase {
        action_start,
        action_end,
        dissipation,
        coupling,
        residual,
    })
}

fn random_torus_morse<R: Rng>(rng: &mut R, scale: f64) -> Hamiltonian {
    // generic two-mode Morse packages on T^2
    Hamiltonian::autonomous(
        ManifoldModel::FlatTorus2n { n: 1 },
        vec![
            SpatialTerm::Trig {
                k: vec![1, 0],
                cos_amp: scale * rng.gen_range(0.6..1.0),
                sin_amp: 0.1 * scale * rng.gen_range(-1.0..1.0),
            },
            SpatialTerm::Trig {
                k: vec![0, 1],
                cos_amp: scale * rng.gen_range(0.6..1.0),
                sin_amp: 0.1 * scale * rng.gen_range(-1.0..1.0),
            },
            SpatialTerm::Trig {
                k: vec![1, 1],
                cos_amp: 0.15 * scale * rng.gen_range(-1.0..1.0),
                sin_amp: 0.0,
            },
        ],
    )
}

/// Continuation-trajectory action identity on random torus Morse pairs,
/// plus the pure-gradient special case where the critical value gap equals
/// the trajectory energy.
pub fn verify_energy_identity(
    cases: usize,
    seed: u64,
    window: f64,
    step: f64,
    _tol: &Tolerances,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(
        "energy-identity",
        json!({"cases": cases, "seed": seed, "window": window, "step": step}),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // pure gradient case: H = K, coupling vanishes, the identity reduces to
    // H(end) - H(start) = int |u'|^2
    let h0 = random_torus_morse(&mut rng, 0.6);
    let crits = find_critical_points(&h0, 24)?;
    let start_cp = &crits[0];
    let start: Point = vec![start_cp[0] + 1e-5, start_cp[1] + 7e-6];
    let case = energy_identity_case(&h0, &h0, &start, window, 5.0, step)?;
    let value_gap = -case.action_end - (-case.action_start);
    let gap_residual = (case.dissipation - value_gap).abs();
    report.push(
        "pure gradient trajectory: value gap = energy".into(),
        gap_residual < 1e-6,
        json!({"gap_residual": gap_residual, "energy": case.dissipation}),
        "H(end) - H(start) = int |u'|^2 to 1e-6".into(),
        1e-6,
    );
    report.push(
        "pure gradient trajectory: full identity".into(),
        case.residual < 1e-6,
        json!(case.residual),
        "residual < 1e-6".into(),
        1e-6,
    );

    for i in 0..cases {
        let scale_h = rng.gen_range(0.4..0.8);
        let scale_k = rng.gen_range(0.4..0.8);
        let h = random_torus_morse(&mut rng, scale_h);
        let k = random_torus_morse(&mut rng, scale_k);
        let crits = find_critical_points(&h, 24)?;
        let start = &crits[i % crits.len()];
        match energy_identity_case(&h, &k, start, window, 5.0, step) {
            Ok(case) => {
                report.push(
                    format!("random pair {i}"),
                    case.residual < 1e-5,
                    json!({
                        "residual": case.residual,
                        "action_drop": case.action_end - case.action_start
                    }),
                    "action identity residual < 1e-5".into(),
                    1e-5,
                );
            }
            Err(Error::NoConvergence(msg)) => {
                report.push(
                    format!("random pair {i}"),
                    false,
                    json!(msg),
                    "trajectory converges to a critical point".into(),
                    0.0,
                );
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Analytic bound on sup_t || Hess H_t || from the term structure.
pub fn hessian_norm_bound(h: &Hamiltonian) -> f64 {
    let mut total = 0.0;
    for term in &h.terms {
        let profile_bound = match &term.profile {
            Profile::Plain(p) => {
                p.a0.abs()
                    + p.cos.iter().map(|c| c.abs()).sum::<f64>()
                    + p.sin.iter().map(|s| s.abs()).sum::<f64>()
            }
            Profile::BoundaryFlat { margin, inner } => {
                // sup of the quintic smoothstep derivative is 15/8
                let sup_ds = 1.875 / (1.0 - 2.0 * margin);
                sup_ds
                    * (inner.a0.abs()
                        + inner.cos.iter().map(|c| c.abs()).sum::<f64>()
                        + inner.sin.iter().map(|s| s.abs()).sum::<f64>())
            }
        };
        let spatial_bound = match &term.spatial {
            SpatialTerm::Constant { .. } => 0.0,
            SpatialTerm::Quadratic { s } => s
                .iter()
                .map(|row| row.iter().map(|c| c.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            SpatialTerm::GaussianBump {
                amplitude, sigma, ..
            } => amplitude.abs() / (sigma * sigma),
            SpatialTerm::Trig { k, cos_amp, sin_amp } => {
                let k2: f64 = k.iter().map(|&ki| (ki * ki) as f64).sum();
                let tp = 2.0 * std::f64::consts::PI;
                tp * tp * k2 * (cos_amp.abs() + sin_amp.abs())
            }
            SpatialTerm::AmbientLinear { .. } => 0.0,
            SpatialTerm::AmbientQuadratic { c } => {
                2.0 * c
                    .iter()
                    .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
                    .fold(0.0, f64::max)
            }
        };
        total += profile_bound * spatial_bound;
    }
    total
}

/// The small-orbit experiment: a slow autonomous torus Morse Hamiltonian
/// perturbed by delta sin(2 pi t) f; every near-1-periodic orbit must stay
/// small, close to its center of mass in C^1, with near-nonnegative
/// canonical-disc area, and nonconstant orbits must avoid a fixed ball
/// around the minimum.
pub fn verify_prop64(
    g_amp: f64,
    deltas: &[f64],
    delta2: f64,
    eps: f64,
    grid: usize,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(
        "prop64",
        json!({
            "g_amp": g_amp,
            "deltas": deltas,
            "delta2": delta2,
            "eps": eps,
            "grid": grid
        }),
    );
    let model = ManifoldModel::FlatTorus2n { n: 1 };
    let g = Hamiltonian::autonomous(
        model,
        vec![
            SpatialTerm::Trig {
                k: vec![1, 0],
                cos_amp: g_amp,
                sin_amp: 0.0,
            },
            SpatialTerm::Trig {
                k: vec![0, 1],
                cos_amp: g_amp,
                sin_amp: 0.0,
            },
        ],
    );
    let x_minus = vec![0.5, 0.5];
    let inj = model.injectivity_radius();

    // precondition certificate: no nonconstant contractible orbit of period
    // up to 1 + delta2 for G, from the Lipschitz period bound
    let lip = hessian_norm_bound(&g);
    let cert = lip * (1.0 + delta2) < 2.0 * std::f64::consts::PI;
    report.push(
        "no-short-orbit certificate for G".into(),
        cert,
        json!({"hessian_bound": lip, "window": 1.0 + delta2}),
        "sup||Hess G|| (1 + delta2) < 2 pi".into(),
        0.0,
    );
    if !cert {
        return Err(Error::PreconditionUnverified(
            "Lipschitz period bound failed for G".into(),
        ));
    }

    let mut max_diams: Vec<f64> = Vec::new();
    for &delta in deltas {
        // H = G + delta sin(2 pi t) f with f = 0.2 [h(q - 1/2) + h(p - 1/2)],
        // h(u) = sin(2 pi u) - sin(4 pi u)/2: f is critical with value 0 at
        // the minimum of G, so the minimum stays an exact constant orbit,
        // while f has nonzero gradient at the other three critical points
        let amp = 0.2;
        let f_spatials = vec![
            SpatialTerm::Trig {
                k: vec![1, 0],
                cos_amp: 0.0,
                sin_amp: -amp,
            },
            SpatialTerm::Trig {
                k: vec![2, 0],
                cos_amp: 0.0,
                sin_amp: -0.5 * amp,
            },
            SpatialTerm::Trig {
                k: vec![0, 1],
                cos_amp: 0.0,
                sin_amp: -amp,
            },
            SpatialTerm::Trig {
                k: vec![0, 2],
                cos_amp: 0.0,
                sin_amp: -0.5 * amp,
            },
        ];
        let mut terms = g.terms.clone();
        for spatial in f_spatials {
            terms.push(Term {
                spatial,
                profile: Profile::Plain(TrigPoly {
                    a0: 0.0,
                    cos: vec![],
                    sin: vec![delta],
                }),
            });
        }
        let h = Hamiltonian {
            model,
            terms,
            normalized: false,
        };
        // sanity: the minimum of G stays an exact critical point for all t
        let worst_grad = (0..9)
            .map(|i| {
                let t = i as f64 / 8.0;
                let gr = h.riemannian_gradient(t, &x_minus);
                gr.iter().map(|c| c * c).sum::<f64>().sqrt()
            })
            .fold(0.0f64, f64::max);
        report.push(
            format!("delta = {delta}: minimum stays fixed"),
            worst_grad < 1e-12,
            json!(worst_grad),
            "grad H(t, x^-) = 0 for all t".into(),
            1e-12,
        );

        let search = OrbitSearch {
            t_min: 1.0 - delta2,
            t_max: 1.0 + delta2,
            t_count: 3,
            grid,
            orbit_samples: 64,
            max_newton: 15,
        };
        let (orbits, stats) = find_periodic_orbits(&h, &search, tol)?;
        report.push(
            format!("delta = {delta}: orbits found"),
            !orbits.is_empty(),
            json!({"orbits": orbits.len(), "stats": stats}),
            "nonempty orbit set near the critical points".into(),
            0.0,
        );
        let mut max_diam = 0.0f64;
        let mut all_ok = true;
        let mut localization_ok = true;
        let mut area_c_ratio = 0.0f64;
        for orbit in &orbits {
            max_diam = max_diam.max(orbit.diameter);
            // (i) small diameter
            let small = orbit.diameter <= 0.5 * inj;
            // (ii) C^1 closeness to the center of mass
            let z = Loop::new(model, orbit.samples.clone())?;
            let com = center_of_mass(&z, tol)?;
            let d_c0 = orbit
                .samples
                .iter()
                .map(|p| model.distance(p, &com.point))
                .fold(0.0f64, f64::max);
            let d_c1 = d_c0
                + orbit
                    .velocity_samples(&h)
                    .iter()
                    .map(|v| v.iter().map(|c| c * c).sum::<f64>().sqrt())
                    .fold(0.0f64, f64::max);
            let close = d_c1 <= eps;
            // (iii) canonical-disc area bounded below
            let disc = canonical_disc(&z, 32, tol)?;
            let areas = disc_areas(&disc)?;
            let area_ok = areas.symplectic >= -eps;
            if com.max_lift_norm() > 1e-12 {
                area_c_ratio = area_c_ratio.max(
                    areas.riemannian / (2.0 * std::f64::consts::PI * com.max_lift_norm()),
                );
            }
            all_ok &= small && close && area_ok;
            // localization: nonconstant orbits avoid the minimum's ball
            if orbit.diameter > 1e-7 {
                let dist_min = orbit
                    .samples
                    .iter()
                    .map(|p| model.distance(p, &x_minus))
                    .fold(f64::INFINITY, f64::min);
                localization_ok &= dist_min > inj / 8.0;
            }
        }
        report.push(
            format!("delta = {delta}: small-orbit conclusions"),
            all_ok,
            json!({"max_diameter": max_diam, "empirical_area_constant": area_c_ratio}),
            "diam <= inj/2, d_C1(z, x_z) <= eps, disc area >= -eps".into(),
            eps,
        );
        report.push(
            format!("delta = {delta}: orbit localization"),
            localization_ok,
            json!(localization_ok),
            "nonconstant orbits avoid the inj/8 ball at the minimum".into(),
            0.0,
        );
        max_diams.push(max_diam);
    }
    let monotone = max_diams.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    report.push(
        "max diameter is non-increasing along the delta sweep".into(),
        monotone,
        json!(max_diams),
        "monotone non-increasing".into(),
        0.0,
    );
    Ok(report)
}

/// Action spectrum coset structure on the sphere, and spectrum invariance
/// under boundary-flat reparameterization.
pub fn verify_spectrum(tol: &Tolerances) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("spectrum", json!({}));
    let c = 1.0;
    let h = Hamiltonian::autonomous(
        ManifoldModel::RoundSphere,
        vec![SpatialTerm::AmbientLinear { c: [0.0, 0.0, c] }],
    );
    let search = OrbitSearch {
        t_min: 1.0,
        t_max: 1.0,
        t_count: 1,
        grid: 8,
        orbit_samples: 64,
        max_newton: 30,
    };
    let (orbits, _) = find_periodic_orbits(&h, &search, tol)?;
    report.push(
        "height flow has exactly the two pole orbits".into(),
        orbits.len() == 2,
        json!(orbits.len()),
        "2".into(),
        0.0,
    );
    let spectrum = crate::action::action_spectrum(&h, &orbits, (-1, 1), 16, tol)?;
    report.push(
        "same-orbit actions differ by exact multiples of 4 pi".into(),
        spectrum.coset_defect < 1e-9,
        json!(spectrum.coset_defect),
        "coset defect < 1e-9".into(),
        1e-9,
    );
    // expected spectrum: -H at the poles shifted by -4 pi k
    let mut found_all = true;
    for base in [-c, c] {
        for k in -1..=1 {
            let target = base - 4.0 * std::f64::consts::PI * k as f64;
            let hit = spectrum.entries.iter().any(|e| (e.action - target).abs() < 1e-8);
            found_all &= hit;
        }
    }
    report.push(
        "spectrum matches the pole actions with recapping shifts".into(),
        found_all,
        json!(spectrum.entries.len()),
        "{ -H(pole) - 4 pi k }".into(),
        1e-8,
    );

    // invariance under boundary-flat reparameterization on a torus Morse
    // Hamiltonian: constant orbits keep their actions
    let g = Hamiltonian::autonomous(
        ManifoldModel::FlatTorus2n { n: 1 },
        vec![
            SpatialTerm::Trig {
                k: vec![1, 0],
                cos_amp: 0.01,
                sin_amp: 0.0,
            },
            SpatialTerm::Trig {
                k: vec![0, 1],
                cos_amp: 0.01,
                sin_amp: 0.0,
            },
        ],
    );
    let gz = g.reparam_boundary_flat(0.1)?;
    let crits = find_critical_points(&g, 16)?;
    let mut worst = 0.0f64;
    for p in &crits {
        let z = Loop::constant(g.model, p.clone(), 64);
        let a0 = action_value(
            &g,
            &CappedLoop::new(z.clone(), Capping::CanonicalDisc)?,
            16,
            tol,
        )?;
        let a1 = action_value(&gz, &CappedLoop::new(z, Capping::CanonicalDisc)?, 16, tol)?;
        worst = worst.max((a0 - a1).abs());
    }
    report.push(
        "spectrum preserved under boundary-flat reparameterization".into(),
        worst < 1e-6,
        json!(worst),
        "action drift < 1e-6".into(),
        1e-6,
    );
    Ok(report)
}

/// Hofer norm closed forms and the inverse-Hamiltonian energy swap.
pub fn verify_hofer(cases: usize, seed: u64, _tol: &Tolerances) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("hofer", json!({"cases": cases, "seed": seed}));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_closed_form = 0.0f64;
    for _ in 0..cases {
        // H = a(t) f(x) with random trig data
        let amp = rng.gen_range(0.2..0.7);
        let k = vec![1 + rng.gen_range(0..2) as i64, rng.gen_range(0..2) as i64];
        let c_amp = amp * rng.gen_range(0.5..1.0);
        let s_amp = amp * rng.gen_range(-0.5..0.5);
        let a0 = rng.gen_range(-0.3..0.3);
        let a_cos = rng.gen_range(-0.8..0.8);
        let a_sin = rng.gen_range(-0.8..0.8);
        let h = Hamiltonian {
            model: ManifoldModel::FlatTorus2n { n: 1 },
            terms: vec![Term {
                spatial: SpatialTerm::Trig {
                    k: k.clone(),
                    cos_amp: c_amp,
                    sin_amp: s_amp,
                },
                profile: Profile::Plain(TrigPoly {
                    a0,
                    cos: vec![a_cos],
                    sin: vec![a_sin],
                }),
            }],
            normalized: false,
        };
        let d = crate::hofer::hofer_norms(&h, 64, 32)?;
        // closed form: osc(f) int |a| with osc(f) = 2 sqrt(c^2 + s^2)
        let osc = 2.0 * (c_amp * c_amp + s_amp * s_amp).sqrt();
        let expect = osc * integrate_abs_trig(a0, a_cos, a_sin);
        worst_closed_form = worst_closed_form.max((d.norm - expect).abs());
    }
    report.push(
        format!("{cases} random trig instances: ||a(t) f|| = osc(f) int |a|"),
        worst_closed_form < 1e-8,
        json!(worst_closed_form),
        "agreement to 1e-8".into(),
        1e-8,
    );

    // E+(H) = E-(bar H) with the flow-backed inverse
    let h = Hamiltonian {
        model: ManifoldModel::FlatTorus2n { n: 1 },
        terms: vec![
            Term {
                spatial: SpatialTerm::Trig {
                    k: vec![1, 0],
                    cos_amp: 0.3,
                    sin_amp: 0.0,
                },
                profile: Profile::Plain(TrigPoly {
                    a0: 1.0,
                    cos: vec![0.4],
                    sin: vec![],
                }),
            },
            Term {
                spatial: SpatialTerm::Trig {
                    k: vec![0, 1],
                    cos_amp: 0.0,
                    sin_amp: 0.2,
                },
                profile: Profile::Plain(TrigPoly {
                    a0: 0.5,
                    cos: vec![],
                    sin: vec![0.3],
                }),
            },
        ],
        normalized: false,
    };
    let direct = crate::hofer::hofer_norms(&h, 513, 32)?;
    let inv = crate::hofer::InverseHam::new(&h, 1e-3);
    let inv_norms = crate::hofer::hofer_norms_inverse(&inv, 513, 32);
    let swap_defect = (direct.e_plus - inv_norms.e_minus).abs();
    report.push(
        "E+(H) = E-(bar H) through the flow".into(),
        swap_defect < 1e-6,
        json!({"e_plus": direct.e_plus, "e_minus_bar": inv_norms.e_minus}),
        "agreement to 1e-6".into(),
        1e-6,
    );
    Ok(report)
}

/// int_0^1 |a0 + c cos(2 pi t) + s sin(2 pi t)| dt by root splitting and
/// per-piece Gauss-Legendre.
fn integrate_abs_trig(a0: f64, c: f64, s: f64) -> f64 {
    let f = |t: f64| {
        a0 + c * (2.0 * std::f64::consts::PI * t).cos()
            + s * (2.0 * std::f64::consts::PI * t).sin()
    };
    let n = 4096;
    let mut roots = vec![0.0];
    let mut prev = f(0.0);
    for i in 1..=n {
        let t = i as f64 / n as f64;
        let cur = f(t);
        if prev.signum() != cur.signum() && prev != 0.0 {
            let mut a = (i - 1) as f64 / n as f64;
            let mut b = t;
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if f(a).signum() == f(m).signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = cur;
    }
    roots.push(1.0);
    let (nodes, weights) = gauss_legendre_16();
    let mut acc = 0.0;
    for w in roots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, wt) in nodes.iter().zip(&weights) {
            acc += wt * half * f(mid + half * x).abs();
        }
    }
    acc
}

fn gauss_legendre_16() -> ([f64; 16], [f64; 16]) {
    (
        [
            -0.989_400_934_991_649_9,
            -0.944_575_023_073_232_6,
            -0.865_631_202_387_831_7,
            -0.755_404_408_355_003_1,
            -0.617_876_244_402_643_7,
            -0.458_016_777_657_227_4,
            -0.281_603_550_779_258_9,
            -0.095_012_509_837_637_44,
            0.095_012_509_837_637_44,
            0.281_603_550_779_258_9,
            0.458_016_777_657_227_4,
            0.617_876_244_402_643_7,
            0.755_404_408_355_003_1,
            0.865_631_202_387_831_7,
            0.944_575_023_073_232_6,
            0.989_400_934_991_649_9,
        ],
        [
            0.027_152_459_411_754_095,
            0.062_253_523_938_647_89,
            0.095_158_511_682_492_78,
            0.124_628_971_255_533_87,
            0.149_595_988_816_576_73,
            0.169_156_519_395_002_54,
            0.182_603_415_044_923_59,
            0.189_450_610_455_068_5,
            0.189_450_610_455_068_5,
            0.182_603_415_044_923_59,
            0.169_156_519_395_002_54,
            0.149_595_988_816_576_73,
            0.124_628_971_255_533_87,
            0.095_158_511_682_492_78,
            0.062_253_523_938_647_89,
            0.027_152_459_411_754_095,
        ],
    )
}

/// Canonical-disc area identities: the flat-circle closed form and the
/// two-form inequality across a family of discs.
pub fn verify_disc_areas(tol: &Tolerances) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("disc-areas", json!({}));
    let model = ManifoldModel::EuclideanR2n { n: 1 };
    let r = 1.0;
    let z = crate::geometry::planar_circle(model, &vec![0.0, 0.0], r, 200);
    let disc = canonical_disc(&z, 200, tol)?;
    let areas = disc_areas(&disc)?;
    let expect = std::f64::consts::PI * r * r;
    report.push(
        "planar unit circle areas".into(),
        (areas.symplectic - expect).abs() < 1e-6 && (areas.riemannian - expect).abs() < 1e-6,
        json!({"symplectic": areas.symplectic, "riemannian": areas.riemannian}),
        format!("(pi r^2, pi r^2) with pi r^2 = {expect:.9}"),
        1e-6,
    );
    let mut all_ok = true;
    for &theta in &[0.1, 0.25, 0.5, 0.8] {
        let z = crate::geometry::sphere_small_circle(theta, 96);
        let disc = canonical_disc(&z, 48, tol)?;
        let a = disc_areas(&disc)?;
        all_ok &= a.symplectic.abs() <= a.riemannian + 10.0 * a.error_estimate;
    }
    report.push(
        "every constructed disc obeys |int omega| <= Area".into(),
        all_ok,
        json!(all_ok),
        "|symplectic| <= riemannian + 10 x error estimate".into(),
        0.0,
    );
    Ok(report)
}

/// Twist classification across the oscillator frequency 2 pi, consistent
/// with the applicability boundary of the closed index formula.
pub fn verify_twist_boundary(tol: &Tolerances) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("twist-boundary", json!({}));
    let origin = vec![0.0, 0.0];
    let mk = |a: f64| {
        Hamiltonian::autonomous(
            ManifoldModel::EuclideanR2n { n: 1 },
            vec![SpatialTerm::Quadratic {
                s: vec![vec![a, 0.0], vec![0.0, a]],
            }],
        )
    };
    let below = crate::dynamics::classify_twist(
        &mk(2.0 * std::f64::consts::PI - 0.01),
        &origin,
        1.0,
        tol,
    )?;
    report.push(
        "a = 2 pi - 0.01 is under-twisted".into(),
        below.is_under_twisted(),
        json!(below.classification),
        "UnderTwisted / GenericallyUnderTwisted".into(),
        0.0,
    );
    let above = crate::dynamics::classify_twist(
        &mk(2.0 * std::f64::consts::PI + 0.01),
        &origin,
        1.0,
        tol,
    )?;
    report.push(
        "a = 2 pi + 0.01 is over-twisted".into(),
        above.classification == crate::dynamics::TwistClass::OverTwisted,
        json!(above.classification),
        "OverTwisted".into(),
        0.0,
    );
    let s_ok = SymmetricMatrix::from_diagonal(&[
        -(2.0 * std::f64::consts::PI - 0.01),
        -(2.0 * std::f64::consts::PI - 0.01),
    ]);
    let formula_ok = cz_exp_formula(&s_ok, tol).is_ok();
    let s_bad = SymmetricMatrix::from_diagonal(&[
        -(2.0 * std::f64::consts::PI + 0.01),
        -(2.0 * std::f64::consts::PI + 0.01),
    ]);
    let formula_bad = cz_exp_formula(&s_bad, tol).is_err();
    report.push(
        "closed formula applicability flips at the same frequency".into(),
        formula_ok && formula_bad,
        json!({"inside": formula_ok, "outside": formula_bad}),
        "|lambda| < 2 pi exactly delimits the formula".into(),
        0.0,
    );
    Ok(report)
}

/// Energy gap of a separable torus Morse Hamiltonian, its scaling law, and
/// the trajectory-energy lower bound.
pub fn verify_energy_gap(tol: &Tolerances) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("energy-gap", json!({}));
    let eps = 0.01;
    let double_cos = |amp: f64| {
        Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![
                SpatialTerm::Trig {
                    k: vec![1, 0],
                    cos_amp: amp,
                    sin_amp: 0.0,
                },
                SpatialTerm::Trig {
                    k: vec![0, 1],
                    cos_amp: amp,
                    sin_amp: 0.0,
                },
            ],
        )
    };
    let g = double_cos(eps);
    let gap = energy_gap_ode(&g, 16, tol)?;
    report.push(
        "separable double-cosine gap".into(),
        (gap - 2.0 * eps).abs() < 1e-9,
        json!(gap),
        format!("2 eps = {}", 2.0 * eps),
        1e-9,
    );
    let c = 3.5;
    let gap_scaled = energy_gap_ode(&double_cos(c * eps), 16, tol)?;
    report.push(
        "gap scales linearly".into(),
        (gap_scaled - c * gap).abs() < 1e-9,
        json!(gap_scaled),
        format!("{}", c * gap),
        1e-9,
    );
    let crits = find_critical_points(&g, 16)?;
    let mut min_energy = f64::INFINITY;
    for p in &crits {
        let start = vec![p[0] + 1e-5, p[1] + 7e-6];
        if let Ok(case) = energy_identity_case(&g, &g, &start, 40.0, 5.0, 1e-3) {
            if case.dissipation > 1e-8 {
                min_energy = min_energy.min(case.dissipation);
            }
        }
    }
    report.push(
        "nontrivial trajectory energies are at least the gap".into(),
        min_energy >= gap - 1e-6,
        json!({"min_energy": min_energy, "gap": gap}),
        "min energy >= e_H".into(),
        1e-6,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn critical_points_of_double_cosine() {
        let g = Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![
                SpatialTerm::Trig {
                    k: vec![1, 0],
                    cos_amp: 0.01,
                    sin_amp: 0.0,
                },
                SpatialTerm::Trig {
                    k: vec![0, 1],
                    cos_amp: 0.01,
                    sin_amp: 0.0,
                },
            ],
        );
        let pts = find_critical_points(&g, 16).unwrap();
        assert_eq!(pts.len(), 4);
    }

    #[test]
    fn single_valued_landscapes_report_no_gap() {
        // constants are degenerate: the op refuses them
        let g = Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![SpatialTerm::Constant { c: 0.3 }],
        );
        assert!(energy_gap_ode(&g, 8, &tol()).is_err());
        // a height function on the sphere has two values and a clean gap
        let h = Hamiltonian::autonomous(
            ManifoldModel::RoundSphere,
            vec![SpatialTerm::AmbientLinear { c: [0.0, 0.0, 0.7] }],
        );
        let gap = energy_gap_ode(&h, 12, &tol()).unwrap();
        assert!((gap - 1.4).abs() < 1e-8);
    }

    #[test]
    fn abs_trig_integral_matches_known_values() {
        let v = integrate_abs_trig(0.0, 0.0, 1.0);
        assert!((v - 2.0 / std::f64::consts::PI).abs() < 1e-12);
        let v = integrate_abs_trig(0.7, 0.0, 0.0);
        assert!((v - 0.7).abs() < 1e-14);
    }

    #[test]
    fn transition_experiment_passes() {
        let r = verify_transition_s2(64, &tol()).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn twist_boundary_experiment_passes() {
        let r = verify_twist_boundary(&tol()).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn energy_identity_single_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_torus_morse(&mut rng, 0.6);
        let k = random_torus_morse(&mut rng, 0.5);
        let crits = find_critical_points(&h, 24).unwrap();
        let case = energy_identity_case(&h, &k, &crits[0], 40.0, 5.0, 1e-3).unwrap();
        assert!(case.residual < 1e-5, "residual {}", case.residual);
    }

    #[test]
    fn theorem_c_small_run() {
        let r = verify_theorem_c(128, &[-1, 0, 1], &tol()).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
    }
}
