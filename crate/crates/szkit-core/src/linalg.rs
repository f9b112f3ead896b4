//! Fixed-convention linear symplectic algebra on R^{2n}.
//!
//! Coordinates are blocked as (q_1..q_n, p_1..p_n) and the conventions used
//! by the whole crate are fixed here once:
//!
//! * symplectic form  omega0(u, v) = sum_j (u_q)_j (v_p)_j - (u_p)_j (v_q)_j,
//! * complex structure J0 (a, b) = (-b, a), so J0^2 = -I and
//!   omega0(v, J0 v) = |v|^2 (the compatible metric is Euclidean),
//! * Hamiltonian vector field X_H = -J0 grad H = (dH/dp, -dH/dq), so the
//!   linearized flow at a critical point of an autonomous G is
//!   exp(t J0 S) with S = -d^2 G.
//!
//! A real matrix commuting with J0 has the block form [[A, B], [-B, A]] and
//! is identified with the complex matrix A + iB; equivalently the complex
//! coordinates of the crate are z_j = q_j - i p_j.  All determinant windings
//! and unitary retractions downstream use this identification.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// The standard complex structure J0 acting as (a, b) -> (-b, a).
pub fn standard_j0(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = -1.0;
        j[(n + k, k)] = 1.0;
    }
    j
}

/// omega0(u, v) = <u_q, v_p> - <u_p, v_q>.
pub fn omega0(u: &[f64], v: &[f64]) -> f64 {
    let d = u.len();
    debug_assert!(d.is_multiple_of(2) && v.len() == d);
    let n = d / 2;
    let mut acc = 0.0;
    for j in 0..n {
        acc += u[j] * v[n + j] - u[n + j] * v[j];
    }
    acc
}

/// J0 applied to a coordinate vector.
pub fn apply_j0(v: &[f64]) -> Vec<f64> {
    let n = v.len() / 2;
    let mut out = vec![0.0; v.len()];
    for j in 0..n {
        out[j] = -v[n + j];
        out[n + j] = v[j];
    }
    out
}

/// Max-norm of M^T J0 M - J0; zero for exactly symplectic matrices.
pub fn symplectic_residual(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    let j = standard_j0(n);
    let r = m.transpose() * &j * m - &j;
    r.amax()
}

/// True iff `m` is square, even-dimensional and symplectic to `tol`.
pub fn is_symplectic(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidMatrix("matrix is not square".into()));
    }
    if !m.nrows().is_multiple_of(2) {
        return Err(Error::InvalidMatrix(
            "odd dimension admits no symplectic structure".into(),
        ));
    }
    Ok(symplectic_residual(m) <= tol)
}

/// exp(t A) by scaling and squaring with a truncated series.
///
/// The scaled norm is kept below 1/4 so the series truncation error is far
/// below 1e-12 relative; squaring then restores the scale.
pub fn matrix_exponential(a: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidMatrix("matrix is not square".into()));
    }
    if !t.is_finite() || a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidMatrix("non-finite entries".into()));
    }
    let m = a * t;
    let norm = m.norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = &m / 2f64.powi(squarings as i32);
    let dim = a.nrows();
    let mut sum = DMatrix::<f64>::identity(dim, dim);
    let mut term = DMatrix::<f64>::identity(dim, dim);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.norm() < 1e-20 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.
///
/// Dimensions in this crate never exceed 8, where Jacobi is both simple and
/// accurate to machine precision.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _ in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= 1e-15 * (1.0 + a.norm()) {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                let tt = sgn / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (tt * tt + 1.0).sqrt();
                let s = tt * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// A validated symmetric matrix (Hessians, the S of the index formula).
#[derive(Debug, Clone)]
pub struct SymmetricMatrix {
    mat: DMatrix<f64>,
}

impl SymmetricMatrix {
    pub fn new(mat: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidMatrix("matrix is not square".into()));
        }
        let defect = (&mat - mat.transpose()).amax();
        if defect > tol.symmetric.max(1e-12 * mat.amax()) {
            return Err(Error::InvalidMatrix(format!(
                "symmetry defect {defect:.3e} exceeds tolerance"
            )));
        }
        // store the symmetrized representative
        let sym = (&mat + mat.transpose()) * 0.5;
        Ok(SymmetricMatrix { mat: sym })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymmetricMatrix {
            mat: DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(diag)),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi_eigenvalues(&self.mat)
    }
}

/// mu^-(S): number of negative eigenvalues counted with multiplicity.
pub fn negative_index(s: &SymmetricMatrix, tol: &Tolerances) -> Result<usize> {
    let eig = s.eigenvalues();
    let scale = eig.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    for &e in &eig {
        if e.abs() <= tol.eig_degenerate * scale.max(1.0) {
            return Err(Error::DegenerateHessian(e));
        }
    }
    Ok(eig.iter().filter(|&&e| e < 0.0).count())
}

/// A validated symplectic matrix.
#[derive(Debug, Clone)]
pub struct SymplecticMatrix {
    pub n: usize,
    mat: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(mat: DMatrix<f64>, tol: f64) -> Result<Self> {
        if !is_symplectic(&mat, tol)? {
            return Err(Error::InvalidMatrix(format!(
                "symplectic residual {:.3e} exceeds tolerance {:.1e}",
                symplectic_residual(&mat),
                tol
            )));
        }
        let n = mat.nrows() / 2;
        Ok(SymplecticMatrix { n, mat })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }
}

/// Orthogonal-polar factor of an invertible matrix via the Newton iteration
/// U <- (U + U^{-T}) / 2.
///
/// For a symplectic M the factor is symplectic and orthogonal, hence
/// commutes with J0; it is the retraction image used for windings.
pub fn polar_orthogonal_factor(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidMatrix("matrix is not square".into()));
    }
    let mut u = m.clone();
    for _ in 0..100 {
        let inv_t = u
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidMatrix("singular matrix has no polar factor".into()))?
            .transpose();
        let next = (&u + &inv_t) * 0.5;
        let delta = (&next - &u).amax();
        u = next;
        if delta < 1e-15 * (1.0 + u.amax()) {
            break;
        }
    }
    Ok(u)
}

/// Complex form A + iB of a real matrix [[A, B], [-B, A]] commuting with J0
/// (the crate's z_j = q_j - i p_j identification).
pub fn complex_form(u: &DMatrix<f64>) -> Result<DMatrix<Complex64>> {
    let d = u.nrows();
    if !d.is_multiple_of(2) || u.ncols() != d {
        return Err(Error::InvalidMatrix("expected a square 2n x 2n matrix".into()));
    }
    let n = d / 2;
    let j0 = standard_j0(n);
    let comm = (&j0 * u - u * &j0).amax();
    if comm > 1e-7 * (1.0 + u.amax()) {
        return Err(Error::InvalidMatrix(format!(
            "matrix does not commute with J0 (defect {comm:.3e})"
        )));
    }
    let mut c = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let a = 0.5 * (u[(i, j)] + u[(n + i, n + j)]);
            let b = 0.5 * (u[(i, n + j)] - u[(n + i, j)]);
            c[(i, j)] = Complex64::new(a, b);
        }
    }
    Ok(c)
}

/// Unitary factor of the polar decomposition M = U P, returned in complex
/// form (n x n unitary).
pub fn unitary_part(m: &DMatrix<f64>) -> Result<DMatrix<Complex64>> {
    let u = polar_orthogonal_factor(m)?;
    complex_form(&u)
}

/// How a symplectic path evaluates between (and beyond) its stored samples.
#[derive(Clone)]
pub enum PathEval {
    /// Psi(t) = exp(J0 S t).
    ExpJ0S { s: DMatrix<f64> },
    /// Arbitrary closed form.
    Closure(std::sync::Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>),
}

impl std::fmt::Debug for PathEval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathEval::ExpJ0S { .. } => write!(f, "PathEval::ExpJ0S"),
            PathEval::Closure(_) => write!(f, "PathEval::Closure"),
        }
    }
}

/// A sampled path t -> Psi(t) in Sp(2n, R) with Psi(0) = I.
///
/// Paths built from a closed form carry an evaluator so downstream crossing
/// searches can refine in t; purely sampled paths are interpolated in the
/// Lie algebra between neighbouring samples.
#[derive(Debug, Clone)]
pub struct SymplecticPath {
    pub n: usize,
    samples: Vec<(f64, DMatrix<f64>)>,
    eval: Option<PathEval>,
    pub generator: Option<String>,
}

impl SymplecticPath {
    /// Path exp(J0 S t) sampled uniformly on [0, 1].
    pub fn from_exp(s: &SymmetricMatrix, n_samples: usize) -> Result<Self> {
        let dim = s.dim();
        if !dim.is_multiple_of(2) {
            return Err(Error::InvalidMatrix("S must be 2n x 2n".into()));
        }
        let n = dim / 2;
        let a = standard_j0(n) * s.matrix();
        let mut samples = Vec::with_capacity(n_samples + 1);
        for k in 0..=n_samples {
            let t = k as f64 / n_samples as f64;
            samples.push((t, matrix_exponential(&a, t)?));
        }
        Ok(SymplecticPath {
            n,
            samples,
            eval: Some(PathEval::ExpJ0S { s: s.matrix().clone() }),
            generator: Some("exp(J0 S t)".into()),
        })
    }

    /// Path from an arbitrary matrix-valued function of t (must satisfy
    /// f(0) = I and stay symplectic; validated on the samples).
    pub fn from_fn<F>(n: usize, f: F, n_samples: usize, tol: &Tolerances) -> Result<Self>
    where
        F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        let mut samples = Vec::with_capacity(n_samples + 1);
        for k in 0..=n_samples {
            let t = k as f64 / n_samples as f64;
            samples.push((t, f(t)));
        }
        let path = SymplecticPath {
            n,
            samples,
            eval: Some(PathEval::Closure(std::sync::Arc::new(f))),
            generator: None,
        };
        path.validate(tol)?;
        Ok(path)
    }

    /// Path from explicit samples; t_0 = 0, Psi_0 = I, last t = 1.
    pub fn from_samples(samples: Vec<(f64, DMatrix<f64>)>, tol: &Tolerances) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidMatrix("a path needs at least two samples".into()));
        }
        let dim = samples[0].1.nrows();
        if !dim.is_multiple_of(2) {
            return Err(Error::InvalidMatrix("odd-dimensional samples".into()));
        }
        let path = SymplecticPath {
            n: dim / 2,
            samples,
            eval: None,
            generator: None,
        };
        path.validate(tol)?;
        Ok(path)
    }

    fn validate(&self, tol: &Tolerances) -> Result<()> {
        let (t0, m0) = &self.samples[0];
        if t0.abs() > 1e-12 {
            return Err(Error::InvalidMatrix("first sample must sit at t = 0".into()));
        }
        let dim = 2 * self.n;
        if (m0 - DMatrix::<f64>::identity(dim, dim)).amax() > 1e-9 {
            return Err(Error::InvalidMatrix("path must start at the identity".into()));
        }
        let mut max_step = 0.0f64;
        for w in self.samples.windows(2) {
            let dt = w[1].0 - w[0].0;
            if dt <= 0.0 {
                return Err(Error::InvalidMatrix("sample times must increase".into()));
            }
            max_step = max_step.max(dt);
        }
        if max_step > 1.0 / 16.0 + 1e-12 {
            return Err(Error::ResolutionTooCoarse(format!(
                "sample spacing {max_step:.4} exceeds the allowed 1/16"
            )));
        }
        // spot-check symplecticity on a handful of samples
        let stride = (self.samples.len() / 8).max(1);
        for (_, m) in self.samples.iter().step_by(stride) {
            let r = symplectic_residual(m);
            if r > tol.symplectic.max(1e-6) {
                return Err(Error::InvalidMatrix(format!(
                    "path sample has symplectic residual {r:.3e}"
                )));
            }
        }
        Ok(())
    }

    pub fn samples(&self) -> &[(f64, DMatrix<f64>)] {
        &self.samples
    }

    pub fn endpoint(&self) -> &DMatrix<f64> {
        &self.samples.last().unwrap().1
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    /// Evaluate the path at arbitrary t in [0, 1].
    pub fn evaluate(&self, t: f64) -> DMatrix<f64> {
        match &self.eval {
            Some(PathEval::ExpJ0S { s }) => {
                let a = standard_j0(self.n) * s;
                matrix_exponential(&a, t).expect("finite by construction")
            }
            Some(PathEval::Closure(f)) => f(t),
            None => self.interpolate(t),
        }
    }

    /// Lie-algebra interpolation between the bracketing samples.
    fn interpolate(&self, t: f64) -> DMatrix<f64> {
        let samples = &self.samples;
        if t <= samples[0].0 {
            return samples[0].1.clone();
        }
        if t >= samples[samples.len() - 1].0 {
            return samples[samples.len() - 1].1.clone();
        }
        let idx = match samples.binary_search_by(|(tk, _)| tk.partial_cmp(&t).unwrap()) {
            Ok(i) => return samples[i].1.clone(),
            Err(i) => i - 1,
        };
        let (ta, ma) = &samples[idx];
        let (tb, mb) = &samples[idx + 1];
        let theta = (t - ta) / (tb - ta);
        let step = ma.clone().try_inverse().expect("symplectic samples invert") * mb;
        let log = sp_log_near_identity(&step, self.n);
        ma * matrix_exponential(&log, theta).expect("finite")
    }

    /// Resample the path onto `n_samples + 1` uniform points, keeping the
    /// evaluator when present.
    pub fn resampled(&self, n_samples: usize) -> SymplecticPath {
        let mut samples = Vec::with_capacity(n_samples + 1);
        for k in 0..=n_samples {
            let t = k as f64 / n_samples as f64;
            samples.push((t, self.evaluate(t)));
        }
        SymplecticPath {
            n: self.n,
            samples,
            eval: self.eval.clone(),
            generator: self.generator.clone(),
        }
    }
}

/// Principal logarithm of a near-identity symplectic matrix, projected onto
/// the Lie algebra sp(2n) = { J0 S : S symmetric }.
fn sp_log_near_identity(m: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let dim = 2 * n;
    let x = m - DMatrix::<f64>::identity(dim, dim);
    let mut log = DMatrix::<f64>::zeros(dim, dim);
    let mut pow = DMatrix::<f64>::identity(dim, dim);
    for k in 1..=20 {
        pow = &pow * &x;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        log += &pow * (sign / k as f64);
        if pow.amax() < 1e-18 {
            break;
        }
    }
    // project: L = J0 sym(-J0 L)
    let j0 = standard_j0(n);
    let s = -(&j0) * &log;
    let s_sym = (&s + s.transpose()) * 0.5;
    j0 * s_sym
}

/// A closed loop of unitary matrices, stored in complex form.
#[derive(Debug, Clone)]
pub struct UnitaryLoop {
    pub n: usize,
    samples: Vec<(f64, DMatrix<Complex64>)>,
}

impl UnitaryLoop {
    pub fn new(samples: Vec<(f64, DMatrix<Complex64>)>, tol: f64) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidMatrix("a loop needs at least three samples".into()));
        }
        let n = samples[0].1.nrows();
        for (_, u) in &samples {
            let defect = (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n))
                .iter()
                .map(|c| c.norm())
                .fold(0.0f64, f64::max);
            if defect > tol.max(1e-7) {
                return Err(Error::InvalidMatrix(format!(
                    "loop sample is not unitary (defect {defect:.3e})"
                )));
            }
        }
        let gap = (&samples[0].1 - &samples[samples.len() - 1].1)
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if gap > tol.max(1e-7) {
            return Err(Error::NotALoop(gap));
        }
        Ok(UnitaryLoop { n, samples })
    }

    pub fn samples(&self) -> &[(f64, DMatrix<Complex64>)] {
        &self.samples
    }
}
