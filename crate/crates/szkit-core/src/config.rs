//! Centralized numerical tolerances and grid defaults.
//!
//! Every module takes its thresholds from one [`Tolerances`] record so an
//! experiment can switch the whole stack between profiles at once.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tolerances {
    /// Symmetry defect allowed in a `SymmetricMatrix`.
    pub symmetric: f64,
    /// Allowed residual of M^T J0 M - J0 for a symplectic matrix.
    pub symplectic: f64,
    /// Eigenvalues below this magnitude count as zero (degenerate Hessian).
    pub eig_degenerate: f64,
    /// Endpoint nondegeneracy threshold for |det(Psi(1) - I)|.
    pub endpoint_det: f64,
    /// Singular values below `kernel_rel * max(1, ||Psi(t)-I||)` span the
    /// crossing kernel.
    pub kernel_rel: f64,
    /// Crossings closer than this in t are refused as unresolved.
    pub crossing_separation: f64,
    /// Bisection/refinement target for crossing times.
    pub crossing_refine: f64,
    /// Residual (fraction of a turn) allowed when rounding a winding number.
    pub wind_round: f64,
    /// Newton residual bound for an accepted periodic orbit.
    pub orbit_residual: f64,
    /// Hausdorff distance below which two orbits are considered the same.
    pub orbit_dedup: f64,
    /// Convergence threshold for the Karcher center-of-mass iteration.
    pub karcher_step: f64,
    /// Max Karcher iterations before giving up.
    pub karcher_max_iter: usize,
    /// Default ODE step for flows.
    pub flow_step: f64,
    /// Default sample count for symplectic paths.
    pub path_samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symmetric: 1e-12,
            symplectic: 1e-9,
            eig_degenerate: 1e-10,
            endpoint_det: 1e-10,
            kernel_rel: 1e-8,
            crossing_separation: 1e-6,
            crossing_refine: 1e-10,
            wind_round: 0.05,
            orbit_residual: 1e-8,
            orbit_dedup: 1e-4,
            karcher_step: 1e-10,
            karcher_max_iter: 10_000,
            flow_step: 1e-3,
            path_samples: 256,
        }
    }
}

impl Tolerances {
    /// Tighter profile used by the verification experiments when asked for.
    pub fn strict() -> Self {
        Tolerances {
            symplectic: 1e-10,
            endpoint_det: 1e-11,
            orbit_residual: 1e-10,
            flow_step: 5e-4,
            path_samples: 512,
            ..Tolerances::default()
        }
    }
}
