//! JSON schemas for matrices, paths, loops and Hamiltonians.
//!
//! Matrices serialize as row-major arrays of arrays of doubles, with the
//! coordinate blocks ordered (q_1..q_n, p_1..p_n).  Complex entries are
//! [re, im] pairs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Loop, ManifoldModel};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{SymplecticPath, UnitaryLoop};
use crate::Tolerances;

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::InvalidMatrix("ragged or empty matrix".into()));
    }
    let m = rows[0].len();
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

/// One sample of a real symplectic path.
#[derive(Debug, Serialize, Deserialize)]
pub struct PathSampleDto {
    pub t: f64,
    pub m: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SymplecticPathDto {
    pub n: usize,
    pub samples: Vec<PathSampleDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

pub fn path_from_dto(dto: &SymplecticPathDto, tol: &Tolerances) -> Result<SymplecticPath> {
    let samples = dto
        .samples
        .iter()
        .map(|s| Ok((s.t, matrix_from_rows(&s.m)?)))
        .collect::<Result<Vec<_>>>()?;
    SymplecticPath::from_samples(samples, tol)
}

pub fn path_to_dto(path: &SymplecticPath) -> SymplecticPathDto {
    SymplecticPathDto {
        n: path.n,
        samples: path
            .samples()
            .iter()
            .map(|(t, m)| PathSampleDto {
                t: *t,
                m: matrix_to_rows(m),
            })
            .collect(),
        generator: path.generator.clone(),
    }
}

/// A loop given either by complex unitary samples (`u`, entries [re, im])
/// or by real symplectic samples (`m`).
#[derive(Debug, Serialize, Deserialize)]
pub struct LoopSampleDto {
    pub t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LoopDto {
    pub n: usize,
    pub samples: Vec<LoopSampleDto>,
}

pub enum ParsedLoop {
    Unitary(UnitaryLoop),
    Symplectic(Vec<(f64, DMatrix<f64>)>),
}

pub fn loop_from_dto(dto: &LoopDto) -> Result<ParsedLoop> {
    if dto.samples.is_empty() {
        return Err(Error::InvalidMatrix("empty loop".into()));
    }
    if dto.samples[0].u.is_some() {
        let samples = dto
            .samples
            .iter()
            .map(|s| {
                let rows = s
                    .u
                    .as_ref()
                    .ok_or_else(|| Error::InvalidMatrix("mixed loop sample kinds".into()))?;
                let n = rows.len();
                let mut m = DMatrix::<Complex64>::zeros(n, n);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::InvalidMatrix("ragged complex matrix".into()));
                    }
                    for (j, c) in row.iter().enumerate() {
                        m[(i, j)] = Complex64::new(c[0], c[1]);
                    }
                }
                Ok((s.t, m))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ParsedLoop::Unitary(UnitaryLoop::new(samples, 1e-6)?))
    } else {
        let samples = dto
            .samples
            .iter()
            .map(|s| {
                let rows = s
                    .m
                    .as_ref()
                    .ok_or_else(|| Error::InvalidMatrix("sample lacks both u and m".into()))?;
                Ok((s.t, matrix_from_rows(rows)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ParsedLoop::Symplectic(samples))
    }
}

/// Geometric loop on a model manifold.
#[derive(Debug, Serialize, Deserialize)]
pub struct ManifoldLoopDto {
    pub manifold: ManifoldModel,
    pub samples: Vec<Vec<f64>>,
}

pub fn manifold_loop_from_dto(dto: &ManifoldLoopDto) -> Result<Loop> {
    Loop::new(dto.manifold, dto.samples.clone())
}

/// Parse a Hamiltonian from its JSON value (the documented schema).
pub fn hamiltonian_from_json(text: &str) -> Result<Hamiltonian> {
    let h: Hamiltonian = serde_json::from_str(text)?;
    if h.normalized {
        if let Some(defect) = h.normalization_defect() {
            if defect > 1e-8 {
                return Err(Error::InvalidMatrix(format!(
                    "normalized flag set but mean defect is {defect:.3e}"
                )));
            }
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;

    #[test]
    fn path_round_trip() {
        let tol = Tolerances::default();
        let s = SymmetricMatrix::from_diagonal(&[1.0, -2.0]);
        let path = SymplecticPath::from_exp(&s, 64).unwrap();
        let dto = path_to_dto(&path);
        let text = serde_json::to_string(&dto).unwrap();
        let back: SymplecticPathDto = serde_json::from_str(&text).unwrap();
        let path2 = path_from_dto(&back, &tol).unwrap();
        assert_eq!(path.sample_count(), path2.sample_count());
        assert!((path.endpoint() - path2.endpoint()).amax() < 1e-15);
    }

    #[test]
    fn hamiltonian_schema_parses() {
        let text = r#"{
            "model": {"flat_torus2n": {"n": 1}},
            "terms": [
                {
                    "spatial": {"kind": "trig", "k": [1, 0], "cos_amp": 0.01, "sin_amp": 0.0},
                    "profile": {"Plain": {"a0": 1.0}}
                }
            ],
            "normalized": true
        }"#;
        let h = hamiltonian_from_json(text).unwrap();
        assert_eq!(h.model.half_dim(), 1);
        assert!((h.value(0.0, &vec![0.0, 0.0]) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn bad_normalization_flag_is_rejected() {
        let text = r#"{
            "model": {"flat_torus2n": {"n": 1}},
            "terms": [
                {
                    "spatial": {"kind": "trig", "k": [0, 0], "cos_amp": 0.5, "sin_amp": 0.0},
                    "profile": {"Plain": {"a0": 1.0}}
                }
            ],
            "normalized": true
        }"#;
        assert!(hamiltonian_from_json(text).is_err());
    }
}
