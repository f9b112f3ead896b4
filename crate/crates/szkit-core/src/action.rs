//! Action functional of capped loops, Gamma-equivalence of cappings, and
//! action spectra with their coset structure over the period group.
//!
//! A_H([z, w]) = -int w* omega - int_0^1 H(z(t), t) dt; recapping by k
//! copies of the spherical generator shifts the action by -k omega(A).

use serde::Serialize;

use crate::chern::CappingClass;
use crate::dynamics::PeriodicOrbit;
use crate::error::{Error, Result};
use crate::geometry::{canonical_disc, disc_areas, Loop};
use crate::hamiltonian::Hamiltonian;
use crate::Tolerances;

/// Capping descriptor of a contractible loop.
#[derive(Debug, Clone, Serialize)]
pub enum Capping {
    /// The canonical small bounding disc from the center of mass.
    CanonicalDisc,
    /// Canonical disc glued with k copies of the positive spherical
    /// generator (sphere model only).
    SphereRecapped { k: i64 },
}

impl Capping {
    pub fn k(&self) -> i64 {
        match self {
            Capping::CanonicalDisc => 0,
            Capping::SphereRecapped { k } => *k,
        }
    }
}

/// A contractible loop together with its capping.
#[derive(Debug, Clone)]
pub struct CappedLoop {
    pub orbit: Loop,
    pub capping: Capping,
}

impl CappedLoop {
    pub fn new(orbit: Loop, capping: Capping) -> Result<Self> {
        if capping.k() != 0 && orbit.model.period_generator().is_none() {
            return Err(Error::DimensionMismatch(
                "recapped cappings need a model with spherical classes".into(),
            ));
        }
        Ok(CappedLoop { orbit, capping })
    }

    pub fn capping_class(&self) -> CappingClass {
        match self.orbit.model.period_generator() {
            Some(omega_a) => CappingClass {
                manifold: self.orbit.model.name().into(),
                k: self.capping.k(),
                omega_a,
                c1_a: self.orbit.model.c1_generator(),
            },
            None => CappingClass::trivial(self.orbit.model.name()),
        }
    }
}

/// Uniform-grid quadrature of int_0^1 H(z(t), t) dt along a closed loop
/// (spectrally accurate for trigonometric time profiles).
fn loop_hamiltonian_integral(h: &Hamiltonian, z: &Loop, t_samples: usize) -> f64 {
    let k = z.samples.len();
    let mut acc = 0.0;
    let total = t_samples.max(k);
    for i in 0..total {
        let t = i as f64 / total as f64;
        // nearest-sample evaluation when the loop is sampled coarser than t
        let zi = &z.samples[(i * k / total) % k];
        acc += h.value(t, zi) / total as f64;
    }
    acc
}

/// Action of a capped loop: -(disc area + k omega(A)) - int H(z, t) dt.
pub fn action_value(
    h: &Hamiltonian,
    cl: &CappedLoop,
    radial: usize,
    tol: &Tolerances,
) -> Result<f64> {
    let disc = canonical_disc(&cl.orbit, radial, tol)?;
    let areas = disc_areas(&disc)?;
    let class = cl.capping_class();
    let capping_area = areas.symplectic + class.k as f64 * class.omega_a;
    let ham_part = loop_hamiltonian_integral(h, &cl.orbit, 512);
    Ok(-capping_area - ham_part)
}

/// Gamma-equivalence of two cappings from difference-class data: equal
/// omega-areas and equal Chern numbers.
pub fn gamma_equivalent(c1_diff: i64, omega_diff: f64, tol: f64) -> bool {
    c1_diff == 0 && omega_diff.abs() <= tol
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEntry {
    pub orbit_id: usize,
    pub k: i64,
    pub action: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub entries: Vec<SpectrumEntry>,
    /// Generator of the period group (0 when trivial).
    pub period_generator: f64,
    /// Largest deviation of same-orbit action differences from exact
    /// multiples of the generator.
    pub coset_defect: f64,
}

/// Action spectrum over the given recapping range for each found orbit.
pub fn action_spectrum(
    h: &Hamiltonian,
    orbits: &[PeriodicOrbit],
    k_range: (i64, i64),
    radial: usize,
    tol: &Tolerances,
) -> Result<SpectrumReport> {
    let gen = h.model.period_generator().unwrap_or(0.0);
    let mut entries = Vec::new();
    let mut coset_defect = 0.0f64;
    for (orbit_id, orbit) in orbits.iter().enumerate() {
        let z = Loop::new(h.model, orbit.samples.clone())?;
        let ks: Vec<i64> = if gen == 0.0 {
            vec![0]
        } else {
            (k_range.0..=k_range.1).collect()
        };
        let mut base: Option<(i64, f64)> = None;
        for k in ks {
            let capping = if k == 0 {
                Capping::CanonicalDisc
            } else {
                Capping::SphereRecapped { k }
            };
            let cl = CappedLoop::new(z.clone(), capping)?;
            let a = action_value(h, &cl, radial, tol)?;
            match base {
                None => base = Some((k, a)),
                Some((k0, a0)) => {
                    // recapping by (k - k0) shifts the action by exactly
                    // -(k - k0) omega(A)
                    let defect = (a - a0 + (k - k0) as f64 * gen).abs();
                    coset_defect = coset_defect.max(defect);
                }
            }
            entries.push(SpectrumEntry {
                orbit_id,
                k,
                action: a,
            });
        }
    }
    entries.sort_by(|a, b| {
        a.action
            .partial_cmp(&b.action)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.orbit_id.cmp(&b.orbit_id))
            .then(a.k.cmp(&b.k))
    });
    Ok(SpectrumReport {
        entries,
        period_generator: gen,
        coset_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{planar_circle, ManifoldModel};
    use crate::hamiltonian::SpatialTerm;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn constant_loop_action_is_minus_time_integral() {
        let t = tol();
        let h = Hamiltonian::autonomous(
            ManifoldModel::FlatTorus2n { n: 1 },
            vec![SpatialTerm::Trig {
                k: vec![1, 0],
                cos_amp: 0.2,
                sin_amp: 0.0,
            }],
        );
        let p = vec![0.25, 0.5];
        let z = Loop::constant(h.model, p.clone(), 64);
        let cl = CappedLoop::new(z, Capping::CanonicalDisc).unwrap();
        let a = action_value(&h, &cl, 16, &t).unwrap();
        let expect = -h.value(0.0, &p);
        assert!((a - expect).abs() < 1e-10, "{a} vs {expect}");
    }

    #[test]
    fn oscillator_circle_action_matches_fine_quadrature_oracle() {
        // H = pi |z|^2 flows circles clockwise with period 1; the canonical
        // disc of the orbit is the flat disc, symplectic area -pi r^2
        let t = tol();
        let a_coeff = 2.0 * PI;
        let h = Hamiltonian::autonomous(
            ManifoldModel::EuclideanR2n { n: 1 },
            vec![SpatialTerm::Quadratic {
                s: vec![vec![a_coeff, 0.0], vec![0.0, a_coeff]],
            }],
        );
        let r = 0.5;
        // clockwise circle: orientation of the flow exp(-2 pi J0 t)
        let samples: Vec<Vec<f64>> = (0..256)
            .map(|i| {
                let th = -2.0 * PI * i as f64 / 256.0;
                vec![r * th.cos(), r * th.sin()]
            })
            .collect();
        let z = Loop::new(h.model, samples).unwrap();
        let cl = CappedLoop::new(z.clone(), Capping::CanonicalDisc).unwrap();
        let a = action_value(&h, &cl, 128, &t).unwrap();
        // oracle: independent fine-grid quadrature of both parts
        // disc area with clockwise boundary = -pi r^2; H on the circle is
        // (a/2) r^2 everywhere
        let oracle = PI * r * r - 0.5 * a_coeff * r * r;
        assert!((a - oracle).abs() < 1e-6, "{a} vs {oracle}");
    }

    #[test]
    fn recapping_shifts_by_the_period() {
        let t = tol();
        let h = Hamiltonian::autonomous(
            ManifoldModel::RoundSphere,
            vec![SpatialTerm::AmbientLinear { c: [0.0, 0.0, 1.0] }],
        );
        let pole = vec![0.0, 0.0, 1.0];
        let z = Loop::constant(h.model, pole, 64);
        let a0 = action_value(
            &h,
            &CappedLoop::new(z.clone(), Capping::CanonicalDisc).unwrap(),
            16,
            &t,
        )
        .unwrap();
        let a1 = action_value(
            &h,
            &CappedLoop::new(z, Capping::SphereRecapped { k: 1 }).unwrap(),
            16,
            &t,
        )
        .unwrap();
        assert!((a1 - (a0 - 4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn gamma_equivalence_cases() {
        assert!(gamma_equivalent(0, 0.0, 1e-10));
        // one sphere of difference: (c1, omega) = (2, 4 pi)
        assert!(!gamma_equivalent(2, 4.0 * PI, 1e-10));
        assert!(gamma_equivalent(0, 5e-11, 1e-10));
    }

    #[test]
    fn torus_cappings_are_rigid() {
        let z = Loop::constant(ManifoldModel::FlatTorus2n { n: 1 }, vec![0.1, 0.1], 16);
        assert!(CappedLoop::new(z, Capping::SphereRecapped { k: 1 }).is_err());
    }

    #[test]
    fn circle_action_reparameterization_stability() {
        // planar circle: action should not depend on where sampling starts
        let t = tol();
        let h = Hamiltonian::autonomous(ManifoldModel::EuclideanR2n { n: 1 }, vec![]);
        let z = planar_circle(h.model, &vec![0.0, 0.0], 0.3, 128);
        let rotated = Loop {
            model: z.model,
            samples: z.samples[32..]
                .iter()
                .chain(z.samples[..32].iter())
                .cloned()
                .collect(),
            derivatives: None,
        };
        let a1 = action_value(
            &h,
            &CappedLoop::new(z, Capping::CanonicalDisc).unwrap(),
            64,
            &t,
        )
        .unwrap();
        let a2 = action_value(
            &h,
            &CappedLoop::new(rotated, Capping::CanonicalDisc).unwrap(),
            64,
            &t,
        )
        .unwrap();
        assert!((a1 - a2).abs() < 1e-10);
    }
}
