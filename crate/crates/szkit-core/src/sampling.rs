//! Seeded random generators for matrices, paths and loops.
//!
//! The verification experiments and the property tests draw their inputs
//! here so every run is reproducible from a single seed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::config::Tolerances;
use crate::linalg::{matrix_exponential, standard_j0, SymmetricMatrix, UnitaryLoop};

pub fn random_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Random orthogonal matrix via Gram-Schmidt of a Gaussian-ish matrix.
pub fn random_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    loop {
        let m = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        let qr = m.qr();
        let q = qr.q();
        if q.determinant().abs() > 0.5 {
            return q;
        }
    }
}

/// Random symmetric matrix with eigenvalue magnitudes in [min_abs, max_abs],
/// signs independently random.
pub fn random_symmetric<R: Rng>(
    dim: usize,
    min_abs: f64,
    max_abs: f64,
    rng: &mut R,
) -> SymmetricMatrix {
    let q = random_orthogonal(dim, rng);
    let eig: Vec<f64> = (0..dim)
        .map(|_| {
            let mag = rng.gen_range(min_abs..max_abs);
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let d = DMatrix::from_diagonal(&DVector::from_row_slice(&eig));
    let m = &q * d * q.transpose();
    SymmetricMatrix::new(m, &Tolerances::default()).expect("constructed symmetric")
}

/// Random complex unitary via Gram-Schmidt over C.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let mut cols: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = DVector::from_fn(n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        for c in &cols {
            let proj = c.dotc(&v);
            v -= c * proj;
        }
        let norm = v.norm();
        if norm > 1e-3 {
            v /= Complex64::new(norm, 0.0);
            cols.push(v);
        }
    }
    DMatrix::from_columns(&cols)
}

/// Real 2n x 2n form [[A, B], [-B, A]] of a complex matrix A + iB under the
/// crate's z = q - i p identification; inverse of `linalg::complex_form`.
pub fn realify(c: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = c.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let a = c[(i, j)].re;
            let b = c[(i, j)].im;
            m[(i, j)] = a;
            m[(n + i, n + j)] = a;
            m[(i, n + j)] = b;
            m[(n + i, j)] = -b;
        }
    }
    m
}

/// Random element of U(n) embedded in Sp(2n, R).
pub fn random_symplectic_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    realify(&random_unitary(n, rng))
}

/// Random symmetric positive definite symplectic matrix: exp(X) with X
/// symmetric and anti-commuting with J0.
pub fn random_positive_symmetric_symplectic<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let sym = |rng: &mut R| {
        let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-0.5..0.5));
        (&m + m.transpose()) * 0.5
    };
    let x1 = sym(rng);
    let x2 = sym(rng);
    let mut x = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            x[(i, j)] = x1[(i, j)];
            x[(n + i, n + j)] = -x1[(i, j)];
            x[(i, n + j)] = x2[(i, j)];
            x[(n + i, j)] = x2[(i, j)];
        }
    }
    matrix_exponential(&x, 1.0).expect("finite")
}

/// Random symplectic matrix exp(J0 S) with ||S|| of order `scale`.
pub fn random_symplectic<R: Rng>(n: usize, scale: f64, rng: &mut R) -> DMatrix<f64> {
    let s = random_symmetric(2 * n, 0.01 * scale, scale, rng);
    let a = standard_j0(n) * s.matrix();
    matrix_exponential(&a, 1.0).expect("finite")
}

/// Closed unitary loop with per-eigenvalue windings `k_j`, conjugated by a
/// random constant unitary frame; det winding equals sum(k_j).
pub fn random_unitary_loop<R: Rng>(
    n: usize,
    windings: &[i64],
    n_samples: usize,
    rng: &mut R,
) -> UnitaryLoop {
    assert_eq!(windings.len(), n);
    let w = random_unitary(n, rng);
    let wad = w.adjoint();
    let mut samples = Vec::with_capacity(n_samples + 1);
    for s in 0..=n_samples {
        let t = s as f64 / n_samples as f64;
        let d = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * windings[i] as f64 * t)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        samples.push((t, &w * d * &wad));
    }
    UnitaryLoop::new(samples, 1e-9).expect("unitary loop by construction")
}

/// The same loop realified into Sp(2n, R); its winding under the crate's
/// conventions is sum(k_j).
pub fn random_real_unitary_loop<R: Rng>(
    n: usize,
    windings: &[i64],
    n_samples: usize,
    rng: &mut R,
) -> Vec<(f64, DMatrix<f64>)> {
    let ul = random_unitary_loop(n, windings, n_samples, rng);
    ul.samples()
        .iter()
        .map(|(t, u)| (*t, realify(u)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_form;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn realify_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(3, &mut rng);
        let r = realify(&u);
        let back = complex_form(&r).unwrap();
        let err = (&back - &u).iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn symplectic_orthogonal_is_both() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_symplectic_orthogonal(2, &mut rng);
        assert!(crate::linalg::symplectic_residual(&m) < 1e-12);
        let defect = (m.transpose() * &m - DMatrix::<f64>::identity(4, 4)).amax();
        assert!(defect < 1e-12);
    }

    #[test]
    fn positive_symmetric_symplectic_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_positive_symmetric_symplectic(2, &mut rng);
        assert!(crate::linalg::symplectic_residual(&p) < 1e-10);
        assert!((&p - p.transpose()).amax() < 1e-12);
        let eig = crate::linalg::jacobi_eigenvalues(&p);
        assert!(eig.iter().all(|&e| e > 0.0));
    }
}
