//! Conley-Zehnder indices of nondegenerate symplectic paths.
//!
//! Two routes are provided and cross-validated: the closed formula
//! mu = mu^-(S) - n for paths exp(J0 S t) with spectrum inside (-2pi, 2pi),
//! and a crossing-form algorithm for general sampled paths.  The crossing
//! form at time t is Q(v) = omega0(v, Psi'(t) v) on ker(Psi(t) - I); the
//! index is minus the half-signature at t = 0 minus the full signatures at
//! interior crossings, which is exactly the normalization that reproduces
//! the closed formula on its domain.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigenvalues, omega0, SymmetricMatrix, SymplecticPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CzMethod {
    ExpFormula,
    CrossingForm,
}

/// One crossing of the path with the walls det(Psi(t) - I) = 0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Crossing {
    pub t: f64,
    pub kernel_dim: usize,
    pub signature: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CzResult {
    pub index: i64,
    pub method: CzMethod,
    pub crossings: Vec<Crossing>,
}

/// det(Psi(1) - I) with sign; the path is nondegenerate iff this is
/// bounded away from zero.
pub fn endpoint_det(path: &SymplecticPath) -> f64 {
    let dim = 2 * path.n;
    (path.endpoint() - DMatrix::<f64>::identity(dim, dim)).determinant()
}

/// True iff |det(Psi(1) - I)| > tol.
pub fn nondegeneracy_check(path: &SymplecticPath, tol: f64) -> bool {
    endpoint_det(path).abs() > tol
}

/// Closed-form index of Psi(t) = exp(J0 S t): mu^-(S) - n, valid when every
/// eigenvalue of S has modulus below 2 pi.
pub fn cz_exp_formula(s: &SymmetricMatrix, tol: &Tolerances) -> Result<CzResult> {
    let dim = s.dim();
    if !dim.is_multiple_of(2) {
        return Err(Error::InvalidMatrix("S must be 2n x 2n".into()));
    }
    let n = (dim / 2) as i64;
    let eig = s.eigenvalues();
    let scale = eig.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    for &lambda in &eig {
        if lambda.abs() <= tol.eig_degenerate * scale.max(1.0) {
            return Err(Error::DegenerateHessian(lambda));
        }
    }
    for &lambda in &eig {
        if lambda.abs() >= 2.0 * std::f64::consts::PI {
            return Err(Error::FormulaInapplicable(lambda));
        }
    }
    let mu_minus = eig.iter().filter(|&&e| e < 0.0).count() as i64;
    let signature: i64 = eig.iter().map(|&e| if e > 0.0 { 1i64 } else { -1 }).sum();
    Ok(CzResult {
        index: mu_minus - n,
        method: CzMethod::ExpFormula,
        crossings: vec![Crossing {
            t: 0.0,
            kernel_dim: dim,
            signature,
        }],
    })
}

/// Smallest singular value of Psi(t) - I; vanishes exactly at crossings.
fn kernel_indicator(path: &SymplecticPath, t: f64) -> f64 {
    let dim = 2 * path.n;
    let m = path.evaluate(t) - DMatrix::<f64>::identity(dim, dim);
    m.svd(false, false).singular_values.min()
}

/// Derivative of the path by central differences (one-sided second order at
/// the ends), step tied to the sample grid.
fn path_derivative(path: &SymplecticPath, t: f64, h: f64) -> DMatrix<f64> {
    if t - h < 0.0 {
        let f0 = path.evaluate(t);
        let f1 = path.evaluate(t + h);
        let f2 = path.evaluate(t + 2.0 * h);
        (f0 * (-3.0) + f1 * 4.0 - f2) / (2.0 * h)
    } else if t + h > 1.0 {
        let f0 = path.evaluate(t);
        let f1 = path.evaluate(t - h);
        let f2 = path.evaluate(t - 2.0 * h);
        (f0 * 3.0 - f1 * 4.0 + f2) / (2.0 * h)
    } else {
        (path.evaluate(t + h) - path.evaluate(t - h)) / (2.0 * h)
    }
}

/// Crossing form on a kernel basis: Q_ij = omega0(v_i, Psi'(t) v_j).
fn crossing_form(
    kernel: &[Vec<f64>],
    deriv: &DMatrix<f64>,
) -> DMatrix<f64> {
    let k = kernel.len();
    let mut q = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let dv: Vec<f64> = {
                let vj = nalgebra::DVector::from_row_slice(&kernel[j]);
                (deriv * vj).iter().copied().collect()
            };
            q[(i, j)] = omega0(&kernel[i], &dv);
        }
    }
    (&q + q.transpose()) * 0.5
}

/// Signature of a small symmetric matrix, refusing near-zero eigenvalues.
fn signature(q: &DMatrix<f64>, context: &str) -> Result<i64> {
    let eig = jacobi_eigenvalues(q);
    let scale = eig.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if scale == 0.0 {
        return Err(Error::ResolutionTooCoarse(format!(
            "vanishing crossing form at {context}"
        )));
    }
    let mut sig = 0i64;
    for &e in &eig {
        if e.abs() < 1e-4 * scale {
            return Err(Error::ResolutionTooCoarse(format!(
                "degenerate crossing form at {context} (eigenvalue {e:.3e})"
            )));
        }
        sig += if e > 0.0 { 1 } else { -1 };
    }
    Ok(sig)
}

/// Golden-section refinement of a V-shaped local minimum of the kernel
/// indicator.
fn refine_minimum(path: &SymplecticPath, mut a: f64, mut b: f64, target: f64) -> f64 {
    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = kernel_indicator(path, c);
    let mut fd = kernel_indicator(path, d);
    while b - a > target {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = kernel_indicator(path, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = kernel_indicator(path, d);
        }
    }
    0.5 * (a + b)
}

/// Conley-Zehnder index of a nondegenerate sampled path by crossing-form
/// summation.
pub fn cz_index(path: &SymplecticPath, tol: &Tolerances) -> Result<CzResult> {
    let dim = 2 * path.n;
    let det1 = endpoint_det(path);
    if det1.abs() <= tol.endpoint_det {
        return Err(Error::DegeneratePath(det1.abs()));
    }

    let grid_h = 1.0 / (path.sample_count() as f64 - 1.0);
    let scan_n = (4 * (path.sample_count() - 1)).max(1024);
    let scan_h = 1.0 / scan_n as f64;

    // locate interior crossings as refined local minima of sigma_min(Psi - I)
    let g: Vec<f64> = (0..=scan_n)
        .map(|k| kernel_indicator(path, k as f64 * scan_h))
        .collect();
    let mut crossing_times: Vec<f64> = Vec::new();
    for i in 1..scan_n {
        if g[i] <= g[i - 1] && g[i] <= g[i + 1] && g[i] < 0.2 {
            let a = (i as f64 - 1.0) * scan_h;
            let b = (i as f64 + 1.0) * scan_h;
            let t_star = refine_minimum(path, a.max(0.0), b.min(1.0), tol.crossing_refine);
            let m = path.evaluate(t_star) - DMatrix::<f64>::identity(dim, dim);
            let sv = m.svd(false, false).singular_values;
            let smin = sv.min();
            let smax = sv.max();
            if smin < tol.kernel_rel * smax.max(1.0) {
                crossing_times.push(t_star);
            }
        }
    }
    crossing_times.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // merge duplicate hits of the same crossing; refuse genuinely close pairs
    let mut merged: Vec<f64> = Vec::new();
    for t in crossing_times {
        match merged.last() {
            Some(&prev) if t - prev < 100.0 * tol.crossing_refine => {}
            Some(&prev) if t - prev < tol.crossing_separation => {
                return Err(Error::ResolutionTooCoarse(format!(
                    "crossings at t = {prev:.8} and t = {t:.8} are closer than {:.1e}",
                    tol.crossing_separation
                )));
            }
            _ => merged.push(t),
        }
    }
    // the t = 0 crossing is structural; drop rediscoveries of it
    merged.retain(|&t| t > tol.crossing_separation);

    let mut crossings = Vec::new();

    // t = 0: kernel is the whole space, half signature
    let deriv0 = path_derivative(path, 0.0, grid_h);
    let basis: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            e
        })
        .collect();
    let q0 = crossing_form(&basis, &deriv0);
    let sig0 = signature(&q0, "t = 0")?;
    crossings.push(Crossing {
        t: 0.0,
        kernel_dim: dim,
        signature: sig0,
    });

    let mut total = sig0 as f64 * 0.5;
    for &t_star in &merged {
        let m = path.evaluate(t_star) - DMatrix::<f64>::identity(dim, dim);
        let svd = m.svd(false, true);
        let sv = &svd.singular_values;
        let smax = sv.max();
        let thresh = tol.kernel_rel * smax.max(1.0);
        let v_t = svd.v_t.as_ref().expect("requested");
        let mut kernel: Vec<Vec<f64>> = Vec::new();
        for (i, &s) in sv.iter().enumerate() {
            if s < thresh {
                kernel.push(v_t.row(i).iter().copied().collect());
            }
        }
        if kernel.is_empty() {
            continue;
        }
        let deriv = path_derivative(path, t_star, grid_h);
        let q = crossing_form(&kernel, &deriv);
        let sig = signature(&q, &format!("t = {t_star:.6}"))?;
        crossings.push(Crossing {
            t: t_star,
            kernel_dim: kernel.len(),
            signature: sig,
        });
        total += sig as f64;
    }

    let index_f = -total;
    let index = index_f.round() as i64;
    if (index_f - index as f64).abs() > 1e-9 {
        return Err(Error::ResolutionTooCoarse(format!(
            "crossing sum {index_f} is not an integer"
        )));
    }

    // parity guard: (-1)^mu = sign det(Psi(1) - I) * (-1)^n; a violation
    // means a missed odd crossing, so refuse rather than return garbage
    let parity_lhs = if index % 2 == 0 { 1.0 } else { -1.0 };
    let parity_rhs = det1.signum() * if path.n.is_multiple_of(2) { 1.0 } else { -1.0 };
    if (parity_lhs - parity_rhs).abs() > 0.5 {
        return Err(Error::ResolutionTooCoarse(
            "index parity disagrees with endpoint determinant; refine sampling".into(),
        ));
    }

    Ok(CzResult {
        index,
        method: CzMethod::CrossingForm,
        crossings,
    })
}

/// Pointwise product L(t) Psi(t) of a closed loop with a path.
pub fn loop_shift(
    loop_path: &SymplecticPath,
    path: &SymplecticPath,
    tol: &Tolerances,
) -> Result<SymplecticPath> {
    if loop_path.n != path.n {
        return Err(Error::DimensionMismatch(format!(
            "loop has n = {}, path has n = {}",
            loop_path.n, path.n
        )));
    }
    let dim = 2 * loop_path.n;
    let id = DMatrix::<f64>::identity(dim, dim);
    let closure_gap = (loop_path.endpoint() - &id).amax();
    let start_gap = (&loop_path.samples()[0].1 - &id).amax();
    if closure_gap > 1e-8 || start_gap > 1e-8 {
        return Err(Error::NotALoop(closure_gap.max(start_gap)));
    }
    let n_samples = (loop_path.sample_count().max(path.sample_count()) - 1).max(64);
    let l = loop_path.clone();
    let p = path.clone();
    SymplecticPath::from_fn(
        path.n,
        move |t| l.evaluate(t) * p.evaluate(t),
        n_samples,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_exponential, standard_j0};
    use crate::sampling;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn nondegeneracy_examples() {
        let t = tol();
        let s = SymmetricMatrix::from_diagonal(&[1.0, 1.0]);
        let path = SymplecticPath::from_exp(&s, 256).unwrap();
        // det(R(theta) - I) = 2 - 2 cos theta
        assert!(nondegeneracy_check(&path, 1e-10));
        assert!((endpoint_det(&path) - (2.0 - 2.0 * 1f64.cos())).abs() < 1e-10);

        let full_turn = SymmetricMatrix::from_diagonal(&[2.0 * PI, 2.0 * PI]);
        let path = SymplecticPath::from_exp(&full_turn, 256).unwrap();
        assert!(!nondegeneracy_check(&path, 1e-10));

        let constant = SymplecticPath::from_fn(
            1,
            |_| DMatrix::<f64>::identity(2, 2),
            64,
            &t,
        )
        .unwrap();
        assert!(!nondegeneracy_check(&constant, 1e-10));
    }

    #[test]
    fn exp_formula_hessian_substitution() {
        // S = -I2 is the Hessian substitution at a minimum; the index is n
        let t = tol();
        let s = SymmetricMatrix::from_diagonal(&[-1.0, -1.0]);
        assert_eq!(cz_exp_formula(&s, &t).unwrap().index, 1);

        let s = SymmetricMatrix::from_diagonal(&[1.0; 4]);
        assert_eq!(cz_exp_formula(&s, &t).unwrap().index, -2);

        let s = SymmetricMatrix::from_diagonal(&[2.0 * PI, 1.0]);
        assert!(matches!(
            cz_exp_formula(&s, &t),
            Err(Error::FormulaInapplicable(_))
        ));
    }

    #[test]
    fn crossing_form_matches_exp_formula_simple() {
        let t = tol();
        for diag in [
            vec![-1.0, -1.0],
            vec![-5.0, -5.0],
            vec![5.0, 5.0],
            vec![3.0, -2.0],
            vec![1.0, 1.0, 1.0, 1.0],
            vec![-4.0, 2.5, -0.7, 5.5],
        ] {
            let s = SymmetricMatrix::from_diagonal(&diag);
            let path = SymplecticPath::from_exp(&s, 256).unwrap();
            let by_crossing = cz_index(&path, &t).unwrap();
            let by_formula = cz_exp_formula(&s, &t).unwrap();
            assert_eq!(by_crossing.index, by_formula.index, "diag {diag:?}");
        }
    }

    #[test]
    fn crossing_form_handles_interior_crossings() {
        // exp(J0 (1.5 + 2 pi m) t) factors as a winding -m loop times the
        // base exp(1.5 J0 t) of index -1, so the index is -1 - 2m; the m
        // interior crossings must all be found
        let t = tol();
        for m in 1..=2i64 {
            let omega = 1.5 + 2.0 * PI * m as f64;
            let j0 = standard_j0(1);
            let path = SymplecticPath::from_fn(
                1,
                move |s| matrix_exponential(&j0, omega * s).unwrap(),
                512,
                &t,
            )
            .unwrap();
            let r = cz_index(&path, &t).unwrap();
            assert_eq!(r.index, -1 - 2 * m, "m = {m}");
            assert_eq!(r.crossings.len(), 1 + m as usize);
        }
    }

    #[test]
    fn loop_shift_adds_twice_the_winding() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for &k in &[-2i64, -1, 1, 2] {
            let s = sampling::random_symmetric(2, 0.15, 2.0 * PI - 0.2, &mut rng);
            let base = SymplecticPath::from_exp(&s, 512).unwrap();
            let mu0 = cz_index(&base, &t).unwrap().index;
            let loop_samples = sampling::random_real_unitary_loop(1, &[k], 512, &mut rng);
            let loop_path = SymplecticPath::from_samples(loop_samples, &t).unwrap();
            let shifted = loop_shift(&loop_path, &base, &t).unwrap();
            let mu1 = cz_index(&shifted, &t).unwrap().index;
            assert_eq!(mu1 - mu0, 2 * k, "winding {k}");
        }
    }

    #[test]
    fn loop_shift_identity_cases() {
        let t = tol();
        let s = SymmetricMatrix::from_diagonal(&[-1.0, 2.0]);
        let base = SymplecticPath::from_exp(&s, 256).unwrap();
        let trivial = SymplecticPath::from_fn(
            1,
            |_| DMatrix::<f64>::identity(2, 2),
            256,
            &t,
        )
        .unwrap();
        let shifted = loop_shift(&trivial, &base, &t).unwrap();
        for &u in &[0.25, 0.5, 0.75] {
            assert!((shifted.evaluate(u) - base.evaluate(u)).amax() < 1e-12);
        }
        // rotation family product adds angles
        let j0 = standard_j0(1);
        let a = SymplecticPath::from_fn(
            1,
            {
                let j0 = j0.clone();
                move |u| matrix_exponential(&j0, 0.8 * u).unwrap()
            },
            256,
            &t,
        )
        .unwrap();
        let b = SymplecticPath::from_fn(
            1,
            {
                let j0 = j0.clone();
                move |u| {
                    matrix_exponential(&j0, 2.0 * PI * u).unwrap()
                }
            },
            256,
            &t,
        )
        .unwrap();
        let prod = loop_shift(&b, &a, &t).unwrap();
        let expect = matrix_exponential(&j0, 2.0 * PI * 0.5 + 0.4).unwrap();
        assert!((prod.evaluate(0.5) - expect).amax() < 1e-10);
    }

    #[test]
    fn mismatched_dimension_is_rejected() {
        let t = tol();
        let s1 = SymmetricMatrix::from_diagonal(&[-1.0, -1.0]);
        let s2 = SymmetricMatrix::from_diagonal(&[-1.0, -1.0, 1.0, 1.0]);
        let p1 = SymplecticPath::from_exp(&s1, 64).unwrap();
        let p2 = SymplecticPath::from_exp(&s2, 64).unwrap();
        assert!(matches!(
            loop_shift(&p2, &p1, &t),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn refining_the_grid_is_stable() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let s = sampling::random_symmetric(4, 0.15, 2.0 * PI - 0.2, &mut rng);
            let coarse = SymplecticPath::from_exp(&s, 128).unwrap();
            let fine = SymplecticPath::from_exp(&s, 256).unwrap();
            assert_eq!(
                cz_index(&coarse, &t).unwrap().index,
                cz_index(&fine, &t).unwrap().index
            );
        }
    }

    #[test]
    fn parity_matches_endpoint_determinant() {
        let t = tol();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let n = 1 + (rng.next_u32() % 3) as usize;
            let s = sampling::random_symmetric(2 * n, 0.15, 2.0 * PI - 0.2, &mut rng);
            let path = SymplecticPath::from_exp(&s, 256).unwrap();
            let r = cz_index(&path, &t).unwrap();
            let lhs = if r.index % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = endpoint_det(&path).signum() * if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(lhs, rhs);
        }
    }
}
