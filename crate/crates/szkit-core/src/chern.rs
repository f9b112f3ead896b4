//! Windings of unitary loops, trivialization transition loops, first Chern
//! numbers and the recapping index arithmetic.
//!
//! The Chern normalization is calibrated on the tangent bundle of the round
//! two-sphere: the transition loop between the two stereographic cap
//! trivializations, taken along the equator with the boundary orientation
//! of the north cap, winds exactly twice.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{unitary_part, SymplecticPath, UnitaryLoop};

/// Winding number of det o loop : S^1 -> S^1 by continuous argument
/// accumulation.
pub fn wind(ul: &UnitaryLoop, tol: &Tolerances) -> Result<i64> {
    let dets: Vec<Complex64> = ul
        .samples()
        .iter()
        .map(|(_, u)| u.determinant())
        .collect();
    let mut total = 0.0f64;
    for w in dets.windows(2) {
        let step = (w[1] / w[0]).arg();
        if step.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(Error::ResolutionTooCoarse(format!(
                "determinant argument jumps by {step:.3} between samples"
            )));
        }
        total += step;
    }
    let turns = total / (2.0 * std::f64::consts::PI);
    let rounded = turns.round();
    if (turns - rounded).abs() >= tol.wind_round {
        return Err(Error::ResolutionTooCoarse(format!(
            "winding {turns:.4} is {:.3} turns away from an integer",
            (turns - rounded).abs()
        )));
    }
    Ok(rounded as i64)
}

/// Winding of a closed loop in Sp(2n, R): retract pointwise to the unitary
/// part, then wind the determinant.
pub fn wind_sp(samples: &[(f64, DMatrix<f64>)], tol: &Tolerances) -> Result<i64> {
    if samples.len() < 3 {
        return Err(Error::ResolutionTooCoarse(
            "need at least three samples of the loop".into(),
        ));
    }
    let mut unitary = Vec::with_capacity(samples.len());
    for (t, m) in samples {
        unitary.push((*t, unitary_part(m)?));
    }
    let ul = UnitaryLoop::new(unitary, 1e-6)?;
    wind(&ul, tol)
}

/// A transition loop between two disc trivializations, marked so that the
/// frames agree at t = 0 (the loop starts at the identity).
#[derive(Debug, Clone)]
pub struct TransitionLoop {
    pub n: usize,
    pub samples: Vec<(f64, DMatrix<f64>)>,
    pub source: String,
    pub target: String,
}

impl TransitionLoop {
    /// View the loop as a symplectic path starting at the identity, ready
    /// for `cz::loop_shift`.
    pub fn as_path(&self, tol: &Tolerances) -> Result<SymplecticPath> {
        SymplecticPath::from_samples(self.samples.clone(), tol)
    }

    /// Pointwise k-th power: the homotopy representative of recapping k
    /// times (inverse loop for negative k).
    pub fn pointwise_power(&self, k: i64, tol: &Tolerances) -> Result<SymplecticPath> {
        let dim = 2 * self.n;
        let samples: Vec<(f64, DMatrix<f64>)> = self
            .samples
            .iter()
            .map(|(t, m)| {
                let base = if k >= 0 {
                    m.clone()
                } else {
                    m.clone().try_inverse().expect("symplectic matrices invert")
                };
                let mut acc = DMatrix::<f64>::identity(dim, dim);
                for _ in 0..k.unsigned_abs() {
                    acc = &acc * &base;
                }
                (*t, acc)
            })
            .collect();
        SymplecticPath::from_samples(samples, tol)
    }

    pub fn winding(&self, tol: &Tolerances) -> Result<i64> {
        wind_sp(&self.samples, tol)
    }
}

/// Capping data of a loop on a model manifold: the class is k times the
/// positive spherical generator A (k = 0 on aspherical models).
#[derive(Debug, Clone, Serialize)]
pub struct CappingClass {
    pub manifold: String,
    pub k: i64,
    pub omega_a: f64,
    pub c1_a: i64,
}

impl CappingClass {
    pub fn trivial(manifold: &str) -> Self {
        CappingClass {
            manifold: manifold.to_string(),
            k: 0,
            omega_a: 0.0,
            c1_a: 0,
        }
    }

    /// k-fold recapping on the unit sphere: omega(A) = 4 pi, c1(A) = 2.
    pub fn sphere(k: i64) -> Self {
        CappingClass {
            manifold: "sphere".into(),
            k,
            omega_a: 4.0 * std::f64::consts::PI,
            c1_a: 2,
        }
    }
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn gram_schmidt(a: [f64; 3], b: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let e1 = normalize3(a);
    let proj = dot3(&b, &e1);
    let e2 = normalize3([b[0] - proj * e1[0], b[1] - proj * e1[1], b[2] - proj * e1[2]]);
    (e1, e2)
}

/// Orthonormal coordinate frame of the north-cap trivialization at a point
/// of S^2 away from the south pole: stereographic chart from the south
/// pole, w = (x + iy)/(1 + z), Gram-Schmidt against the round metric.
pub fn north_frame(x: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let u = x[0] / (1.0 + x[2]);
    let v = x[1] / (1.0 + x[2]);
    let rho = 1.0 + u * u + v * v;
    let r2 = rho * rho;
    let du = [
        (2.0 * rho - 4.0 * u * u) / r2,
        -4.0 * u * v / r2,
        -4.0 * u / r2,
    ];
    let dv = [
        -4.0 * u * v / r2,
        (2.0 * rho - 4.0 * v * v) / r2,
        -4.0 * v / r2,
    ];
    gram_schmidt(du, dv)
}

/// Orthonormal frame of the south-cap trivialization away from the north
/// pole: the chart w' = (x - iy)/(1 - z).
pub fn south_frame(x: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let u = x[0] / (1.0 - x[2]);
    let v = -x[1] / (1.0 - x[2]);
    let rho = 1.0 + u * u + v * v;
    let r2 = rho * rho;
    let du = [
        (2.0 * rho - 4.0 * u * u) / r2,
        4.0 * u * v / r2,
        4.0 * u / r2,
    ];
    let dv = [
        -4.0 * u * v / r2,
        -(2.0 * rho - 4.0 * v * v) / r2,
        4.0 * v / r2,
    ];
    gram_schmidt(du, dv)
}

/// The transition loop of T S^2 along the equator (boundary orientation of
/// the north cap), mapping north-frame components to south-frame
/// components, marked at t = 0.  Its winding is the first Chern number of
/// T S^2, namely 2.
pub fn sphere_transition_loop(samples: usize, tol: &Tolerances) -> Result<TransitionLoop> {
    sphere_transition_loop_oriented(samples, false, tol)
}

/// Same loop with the equator traversed backwards; winds -2.
pub fn sphere_transition_loop_reversed(
    samples: usize,
    tol: &Tolerances,
) -> Result<TransitionLoop> {
    sphere_transition_loop_oriented(samples, true, tol)
}

fn sphere_transition_loop_oriented(
    samples: usize,
    reversed: bool,
    tol: &Tolerances,
) -> Result<TransitionLoop> {
    if samples < 16 {
        return Err(Error::ResolutionTooCoarse(format!(
            "{samples} samples cannot resolve the transition loop; need at least 16"
        )));
    }
    let mut raw: Vec<(f64, DMatrix<f64>)> = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        let t = k as f64 / samples as f64;
        let theta = 2.0 * std::f64::consts::PI * if reversed { -t } else { t };
        let x = [theta.cos(), theta.sin(), 0.0];
        let (n1, n2) = north_frame(&x);
        let (s1, s2) = south_frame(&x);
        // column j holds the south-frame components of the j-th north vector
        let m = DMatrix::<f64>::from_row_slice(
            2,
            2,
            &[
                dot3(&n1, &s1),
                dot3(&n2, &s1),
                dot3(&n1, &s2),
                dot3(&n2, &s2),
            ],
        );
        raw.push((t, m));
    }
    // marking: re-base so the two trivializations agree at t = 0
    let base_inv = raw[0]
        .1
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidMatrix("degenerate frame change".into()))?;
    let samples_marked: Vec<(f64, DMatrix<f64>)> = raw
        .into_iter()
        .map(|(t, m)| (t, m * &base_inv))
        .collect();
    for (_, m) in &samples_marked {
        if (m.determinant() - 1.0).abs() > tol.symplectic.max(1e-8) {
            return Err(Error::InvalidMatrix(
                "transition sample is not symplectic".into(),
            ));
        }
    }
    Ok(TransitionLoop {
        n: 1,
        samples: samples_marked,
        source: "s2-north-cap".into(),
        target: "s2-south-cap".into(),
    })
}

/// Index under recapping: mu + 2 c1 of the difference class k A.
pub fn recapping_index(mu: i64, cap_change: &CappingClass) -> i64 {
    mu + 2 * cap_change.k * cap_change.c1_a
}

/// Integers c compatible with mu([z,w]) = mu([z,w_z]) + 2c when the capped
/// index is `mu_capped` and mu([z,w_z]) ranges over the undertwisted window
/// [-n, n].  Returns the inclusive interval.
pub fn cz_constraint_window(mu_capped: i64, n: i64) -> Result<(i64, i64)> {
    let lo = mu_capped - n; // lower bound for 2c
    let hi = mu_capped + n;
    let c_lo = lo.div_euclid(2) + if lo.rem_euclid(2) == 0 { 0 } else { 1 };
    let c_hi = hi.div_euclid(2);
    if c_lo > c_hi {
        return Err(Error::EmptyWindow(c_lo, c_hi));
    }
    Ok((c_lo, c_hi))
}

/// True iff no spherical class has omega > 0 together with -n <= c1 < 0.
pub fn very_strongly_semipositive(classes: &[(f64, i64)], n: i64) -> bool {
    !classes
        .iter()
        .any(|&(omega, c1)| omega > 0.0 && -n <= c1 && c1 < 0)
}
