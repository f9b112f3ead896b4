//! Cross-module integration: twist classification, index routes and
//! certificates agreeing on the same dynamical data.

use nalgebra::DMatrix;
use szkit_core::cz::{cz_exp_formula, cz_index};
use szkit_core::dynamics::{
    classify_twist, find_periodic_orbits, linearized_flow, undertwist_certificate, OrbitSearch,
    TwistClass,
};
use szkit_core::geometry::ManifoldModel;
use szkit_core::hamiltonian::{Hamiltonian, Profile, SpatialTerm, Term, TrigPoly};
use szkit_core::linalg::{symplectic_residual, SymmetricMatrix};
use szkit_core::Tolerances;

fn double_cosine(amp: f64) -> Hamiltonian {
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
}

/// At a nondegenerate minimum with small Hessian the twist report is
/// generically under-twisted and all three index routes give n.
#[test]
fn minimum_consistency_across_modules() {
    let tol = Tolerances::default();
    let h = double_cosine(0.01);
    let x_min = vec![0.5, 0.5];
    let twist = classify_twist(&h, &x_min, 1.0, &tol).unwrap();
    assert_eq!(twist.classification, TwistClass::GenericallyUnderTwisted);

    // closed formula on S = -Hess at the minimum
    let hess = h.hessian(0.0, &x_min);
    let s = SymmetricMatrix::new(-hess, &tol).unwrap();
    let by_formula = cz_exp_formula(&s, &tol).unwrap().index;
    assert_eq!(by_formula, 1);

    // crossing form on the actual linearized flow
    let path = linearized_flow(&h, &x_min, 1.0, 256, &tol).unwrap();
    let by_crossing = cz_index(&path, &tol).unwrap().index;
    assert_eq!(by_crossing, by_formula);
}

/// Every linearized flow stays symplectic along the whole path.
#[test]
fn monodromies_are_symplectic() {
    let tol = Tolerances::default();
    let hams = vec![
        double_cosine(0.05),
        Hamiltonian {
            model: ManifoldModel::FlatTorus2n { n: 1 },
            terms: vec![Term {
                spatial: SpatialTerm::Trig {
                    k: vec![1, 1],
                    cos_amp: 0.3,
                    sin_amp: -0.2,
                },
                profile: Profile::Plain(TrigPoly {
                    a0: 0.5,
                    cos: vec![0.3],
                    sin: vec![-0.2],
                }),
            }],
            normalized: false,
        },
        Hamiltonian::autonomous(
            ManifoldModel::RoundSphere,
            vec![SpatialTerm::AmbientLinear { c: [0.1, -0.2, 0.9] }],
        ),
    ];
    let starts: Vec<Vec<f64>> = vec![vec![0.3, 0.8], vec![0.1, 0.45], vec![0.0, 0.0, 1.0]];
    for (h, p) in hams.iter().zip(&starts) {
        let path = linearized_flow(h, p, 1.0, 128, &tol).unwrap();
        for (_, m) in path.samples() {
            assert!(symplectic_residual(m) < 1e-8);
        }
    }
}

/// Orbits found by the search at a slow Morse Hamiltonian are certified
/// undertwisted with their canonical discs: index n at the minimum, -n at
/// the maximum, area zero for constants.
#[test]
fn search_and_certify_constant_orbits() {
    let tol = Tolerances::default();
    let h = double_cosine(0.01);
    let search = OrbitSearch {
        t_min: 1.0,
        t_max: 1.0,
        t_count: 1,
        grid: 8,
        orbit_samples: 64,
        max_newton: 25,
    };
    let (orbits, _) = find_periodic_orbits(&h, &search, &tol).unwrap();
    assert_eq!(orbits.len(), 4, "four critical points expected");
    let mut indices: Vec<i64> = Vec::new();
    for orbit in &orbits {
        assert!(orbit.diameter < 1e-7);
        assert!(symplectic_residual(&orbit.monodromy) < 1e-8);
        let cert = undertwist_certificate(&h, orbit, 0.0, &tol).unwrap();
        assert!(cert.certified, "constant orbit must certify");
        assert!(cert.symplectic_area.abs() < 1e-10);
        indices.push(cert.index);
    }
    indices.sort_unstable();
    // minimum gives +1, maximum -1, the two saddles 0
    assert_eq!(indices, vec![-1, 0, 0, 1]);
}

/// The monodromy of a quadratic flow equals the closed-form exponential in
/// any frame the certificate machinery uses.
#[test]
fn quadratic_monodromy_matches_exponential() {
    let tol = Tolerances::default();
    let s = vec![vec![1.2, -0.4], vec![-0.4, 0.7]];
    let h = Hamiltonian::autonomous(
        ManifoldModel::EuclideanR2n { n: 1 },
        vec![SpatialTerm::Quadratic { s: s.clone() }],
    );
    let path = linearized_flow(&h, &vec![0.0, 0.0], 1.0, 128, &tol).unwrap();
    let smat = DMatrix::<f64>::from_fn(2, 2, |i, j| s[i][j]);
    let a = -szkit_core::linalg::standard_j0(1) * smat;
    let expect = szkit_core::linalg::matrix_exponential(&a, 1.0).unwrap();
    assert!((path.endpoint() - expect).amax() < 1e-9);
}
