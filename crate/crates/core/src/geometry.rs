//! Geometric objects produced by a first-order system on the 1-jet space.
//!
//! For `x' = X(x)` with the Euclidean pair of metrics, the least-squares
//! Lagrangian `sum_i (v_i - X_i(x))^2` canonically produces
//!
//! * the non-linear connection `N = -1/2 (J - J^T)` (temporal part `M = 0`),
//! * torsion matrices `R_k = dN/dx_k`,
//! * the electromagnetic components `F = -N`,
//! * the Yang–Mills energy `sum_{i<j} F_ij^2 = 1/2 tr(F F^T)`,
//!
//! while every Cartan connection coefficient and curvature component
//! vanishes. All derivatives here are symbolic; finite differences are only
//! provided as an oracle ([`numeric_jacobian`]).

use nalgebra::DMatrix;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::EvalError;
use crate::field::VectorField;

pub type Matrix = DMatrix<f64>;

/// `J_ij = dX_i/dx_j` at `x`.
pub fn jacobian(field: &VectorField, x: &[f64]) -> Result<Matrix, EvalError> {
    field.check_ready(x)?;
    let n = field.dim();
    let mut j = Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let e = field.partial_ref(r + 1, c + 1);
            j[(r, c)] = field.eval_expr(e, r + 1, x)?;
        }
    }
    Ok(j)
}

/// `N = -1/2 (J - J^T)`.
pub fn connection_from_jacobian(j: &Matrix) -> Matrix {
    let n = j.nrows();
    Matrix::from_fn(n, n, |r, c| -0.5 * (j[(r, c)] - j[(c, r)]))
}

/// `F = -N`.
pub fn em_from_connection(n: &Matrix) -> Matrix {
    -n
}

/// `sum_{i<j} F_ij^2`.
pub fn eym_from_em(f: &Matrix) -> f64 {
    let n = f.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += f[(i, j)] * f[(i, j)];
        }
    }
    sum
}

/// `1/2 tr(F F^T)`; equals [`eym_from_em`] for antisymmetric `F`.
pub fn half_trace_norm(f: &Matrix) -> f64 {
    0.5 * (f * f.transpose()).trace()
}

pub fn nonlinear_connection(field: &VectorField, x: &[f64]) -> Result<Matrix, EvalError> {
    Ok(connection_from_jacobian(&jacobian(field, x)?))
}

pub fn em_matrix(field: &VectorField, x: &[f64]) -> Result<Matrix, EvalError> {
    Ok(em_from_connection(&nonlinear_connection(field, x)?))
}

pub fn yang_mills_energy(field: &VectorField, x: &[f64]) -> Result<f64, EvalError> {
    Ok(eym_from_em(&em_matrix(field, x)?))
}

/// Second partials `d^2 X_i / dx_k dx_j` evaluated at a point.
#[derive(Debug, Clone)]
pub struct Hessians {
    n: usize,
    values: Vec<f64>,
}

impl Hessians {
    pub fn at(field: &VectorField, x: &[f64]) -> Result<Self, EvalError> {
        field.check_ready(x)?;
        let n = field.dim();
        let mut values = vec![0.0; n * n * n];
        for i in 1..=n {
            for j in 1..=n {
                for (k, e) in field.second_nonzero(i, j) {
                    values[((i - 1) * n + (j - 1)) * n + (k - 1)] = field.eval_expr(e, i, x)?;
                }
            }
        }
        Ok(Hessians { n, values })
    }

    /// `d/dx_k (dX_i/dx_j)`, 0-based indices.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.n + j) * self.n + k]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `R_k(i, j) = -1/2 (d^2 X_i/dx_k dx_j - d^2 X_j/dx_k dx_i)`.
    pub fn torsion(&self) -> Vec<Matrix> {
        let n = self.n;
        (0..n)
            .map(|k| Matrix::from_fn(n, n, |i, j| -0.5 * (self.get(i, j, k) - self.get(j, i, k))))
            .collect()
    }

    /// `dF_ij/dx_k`, 0-based.
    pub fn em_derivative(&self, i: usize, j: usize, k: usize) -> f64 {
        0.5 * (self.get(i, j, k) - self.get(j, i, k))
    }

    pub fn maxwell(&self) -> MaxwellCheck {
        let n = self.n;
        let mut worst = MaxwellCheck {
            residual: 0.0,
            worst_triple: None,
        };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let cyclic =
                        self.em_derivative(i, j, k) + self.em_derivative(j, k, i) + self.em_derivative(k, i, j);
                    let r = cyclic.abs();
                    if worst.worst_triple.is_none() || r > worst.residual || r.is_nan() {
                        worst = MaxwellCheck {
                            residual: r,
                            worst_triple: Some([i + 1, j + 1, k + 1]),
                        };
                    }
                }
            }
        }
        worst
    }
}

/// Largest cyclic-sum violation of the generalized Maxwell equations and the
/// (1-based) triple where it occurs; `worst_triple` is `None` when `n < 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxwellCheck {
    pub residual: f64,
    pub worst_triple: Option<[usize; 3]>,
}

/// `R_k` for `k = 1..n`, stored at position `k - 1`.
pub fn torsion(field: &VectorField, x: &[f64]) -> Result<Vec<Matrix>, EvalError> {
    Ok(Hessians::at(field, x)?.torsion())
}

/// `max_{i<j<k} |dF_ij/dx_k + dF_jk/dx_i + dF_ki/dx_j|`; zero for `n < 3`.
pub fn maxwell_residual(field: &VectorField, x: &[f64]) -> Result<f64, EvalError> {
    Ok(maxwell_check(field, x)?.residual)
}

pub fn maxwell_check(field: &VectorField, x: &[f64]) -> Result<MaxwellCheck, EvalError> {
    Ok(Hessians::at(field, x)?.maxwell())
}

/// Central differences `(X_i(x + h e_j) - X_i(x - h e_j)) / 2h`.
pub fn numeric_jacobian(field: &VectorField, x: &[f64], h: f64) -> Result<Matrix, EvalError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(EvalError::InvalidArgument(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    field.check_ready(x)?;
    let n = field.dim();
    let mut jac = Matrix::zeros(n, n);
    let mut probe = x.to_vec();
    for c in 0..n {
        probe[c] = x[c] + h;
        let plus = field.eval(&probe)?;
        probe[c] = x[c] - h;
        let minus = field.eval(&probe)?;
        probe[c] = x[c];
        for r in 0..n {
            jac[(r, c)] = (plus[r] - minus[r]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// A block of connection or curvature components that vanishes identically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroBlock {
    pub label: &'static str,
    /// Index pattern of the components, e.g. `L^i_jk`.
    pub components: &'static str,
    pub shape: Vec<usize>,
}

impl ZeroBlock {
    pub fn get(&self, index: &[usize]) -> f64 {
        assert_eq!(index.len(), self.shape.len(), "index rank");
        assert!(index.iter().zip(&self.shape).all(|(i, s)| i < s), "index out of range");
        0.0
    }

    pub fn max_abs(&self) -> f64 {
        0.0
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The canonical generalized Cartan connection and its curvature: every
/// adapted component is zero for any field and point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatCertificate {
    pub cartan_connection: Vec<ZeroBlock>,
    pub curvature: Vec<ZeroBlock>,
}

pub fn flat_certificate(field: &VectorField, _x: &[f64]) -> FlatCertificate {
    let n = field.dim();
    FlatCertificate {
        cartan_connection: vec![
            ZeroBlock {
                label: "temporal coefficient",
                components: "chi^1_11",
                shape: vec![1],
            },
            ZeroBlock {
                label: "mixed coefficients",
                components: "G^k_i1",
                shape: vec![n, n],
            },
            ZeroBlock {
                label: "horizontal coefficients",
                components: "L^i_jk",
                shape: vec![n, n, n],
            },
            ZeroBlock {
                label: "vertical coefficients",
                components: "C^i(1)_j(k)",
                shape: vec![n, n, n],
            },
        ],
        curvature: vec![
            ZeroBlock {
                label: "horizontal curvature",
                components: "R^i_jkl",
                shape: vec![n, n, n, n],
            },
            ZeroBlock {
                label: "mixed curvature",
                components: "P^i_jk(l)",
                shape: vec![n, n, n, n],
            },
            ZeroBlock {
                label: "vertical curvature",
                components: "S^i_j(k)(l)",
                shape: vec![n, n, n, n],
            },
        ],
    }
}

/// Every object of the jet geometry at one point.
#[derive(Debug, Clone)]
pub struct GeometryReport {
    pub point: Vec<f64>,
    pub jacobian: Matrix,
    /// Temporal component `M^(i)_(1)1` of the non-linear connection; always
    /// zero, kept so the report carries the whole connection.
    pub temporal_connection: Vec<f64>,
    pub connection: Matrix,
    /// `torsion[k]` is `R_{k+1}`.
    pub torsion: Vec<Matrix>,
    pub em: Matrix,
    pub eym: f64,
    pub maxwell_residual: f64,
    pub maxwell_worst_triple: Option<[usize; 3]>,
}

impl GeometryReport {
    pub fn compute(field: &VectorField, x: &[f64]) -> Result<Self, EvalError> {
        let jacobian = jacobian(field, x)?;
        let hessians = Hessians::at(field, x)?;
        let connection = connection_from_jacobian(&jacobian);
        let em = em_from_connection(&connection);
        let eym = eym_from_em(&em);
        let maxwell = hessians.maxwell();
        Ok(GeometryReport {
            point: x.to_vec(),
            temporal_connection: vec![0.0; field.dim()],
            torsion: hessians.torsion(),
            jacobian,
            connection,
            em,
            eym,
            maxwell_residual: maxwell.residual,
            maxwell_worst_triple: maxwell.worst_triple,
        })
    }
}

/// Row-major copy with `-0.0` normalized to `0.0`.
pub fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().map(|v| v + 0.0).collect()).collect()
}

/// JSON layout: `point`, `jacobian`, `connection`, `torsion`, `em`, `eym`,
/// `maxwell_residual`; matrices as row-major nested arrays, torsion indexed
/// by `k`.
impl Serialize for GeometryReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("GeometryReport", 7)?;
        s.serialize_field("point", &self.point)?;
        s.serialize_field("jacobian", &rows(&self.jacobian))?;
        s.serialize_field("connection", &rows(&self.connection))?;
        let torsion: Vec<_> = self.torsion.iter().map(rows).collect();
        s.serialize_field("torsion", &torsion)?;
        s.serialize_field("em", &rows(&self.em))?;
        s.serialize_field("eym", &self.eym)?;
        s.serialize_field("maxwell_residual", &self.maxwell_residual)?;
        s.end()
    }
}
