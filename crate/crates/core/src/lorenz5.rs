//! The five-component Lorenz model coupling slow Rossby waves
//! `(x1, x2, x3)` with fast gravity waves `(x4, x5)` through `eps`:
//!
//! ```text
//! x1' = -x2 x3 + eps x2 x5
//! x2' =  x1 x3 - eps x1 x5
//! x3' = -x1 x2
//! x4' = -x5
//! x5' =  x4 + eps x1 x2
//! ```
//!
//! Closed forms of its jet geometry serve as oracles for the generic
//! pipeline in [`crate::geometry`]. The Yang–Mills energy depends on
//! `(x1, x3, x5)` only, and its level sets `{EYM = C}` are classified here.

use nalgebra::Matrix3;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::field::{parse_field, Params, VectorField};
use crate::geometry::Matrix;

/// Field-file source of the model, parameterized by `eps`.
pub const SOURCE: &str = "\
# Lorenz five-component atmospheric model
X1 = -x2*x3 + eps*x2*x5
X2 = x1*x3 - eps*x1*x5
X3 = -x1*x2
X4 = -x5
X5 = x4 + eps*x1*x2
";

/// Absolute tolerance on `C - 1` for the line case of the level-set
/// classification.
pub const LEVEL_TOLERANCE: f64 = 1e-12;

pub fn lorenz_field(eps: f64) -> VectorField {
    let mut params = Params::new();
    params.insert("eps".into(), eps);
    parse_field(SOURCE, &params).expect("built-in Lorenz source parses")
}

/// The model right-hand side written out directly.
pub fn rhs(x: &[f64; 5], eps: f64) -> [f64; 5] {
    let [x1, x2, x3, x4, x5] = *x;
    [
        -x2 * x3 + eps * x2 * x5,
        x1 * x3 - eps * x1 * x5,
        -x1 * x2,
        -x5,
        x4 + eps * x1 * x2,
    ]
}

/// Jacobian of the model.
pub fn closed_jacobian(x: &[f64; 5], eps: f64) -> Matrix {
    let [x1, x2, x3, _, x5] = *x;
    Matrix::from_row_slice(
        5,
        5,
        &[
            0.0,
            -x3 + eps * x5,
            -x2,
            0.0,
            eps * x2, //
            x3 - eps * x5,
            0.0,
            x1,
            0.0,
            -eps * x1, //
            -x2,
            -x1,
            0.0,
            0.0,
            0.0, //
            0.0,
            0.0,
            0.0,
            0.0,
            -1.0, //
            eps * x2,
            eps * x1,
            0.0,
            1.0,
            0.0,
        ],
    )
}

/// The non-linear connection matrix of the model.
pub fn closed_connection(x: &[f64; 5], eps: f64) -> Matrix {
    let [x1, _, x3, _, x5] = *x;
    let a = x3 - eps * x5;
    Matrix::from_row_slice(
        5,
        5,
        &[
            0.0,
            a,
            0.0,
            0.0,
            0.0, //
            -a,
            0.0,
            -x1,
            0.0,
            eps * x1, //
            0.0,
            x1,
            0.0,
            0.0,
            0.0, //
            0.0,
            0.0,
            0.0,
            0.0,
            1.0, //
            0.0,
            -eps * x1,
            0.0,
            -1.0,
            0.0,
        ],
    )
}

/// Electromagnetic components, the negated connection.
pub fn closed_em(x: &[f64; 5], eps: f64) -> Matrix {
    -closed_connection(x, eps)
}

/// Torsion matrices (`result[k-1]` holds `R_k`, entry `(i, j)` is
/// `R^(i)_jk`). They are constant in `x`; the only non-zero entries are
///
/// ```text
/// R^(3)_21 = -R^(2)_31 = 1      R^(5)_21 = -R^(2)_51 = -eps
/// R^(2)_13 = -R^(1)_23 = -1     R^(2)_15 = -R^(1)_25 =  eps
/// ```
pub fn closed_torsion(eps: f64) -> Vec<Matrix> {
    let mut r = vec![Matrix::zeros(5, 5); 5];
    // (upper i, lower j, lower k, value), 1-based
    let entries = [
        (3, 2, 1, 1.0),
        (2, 3, 1, -1.0),
        (5, 2, 1, -eps),
        (2, 5, 1, eps),
        (2, 1, 3, -1.0),
        (1, 2, 3, 1.0),
        (2, 1, 5, eps),
        (1, 2, 5, -eps),
    ];
    for (i, j, k, v) in entries {
        r[k - 1][(i - 1, j - 1)] = v;
    }
    r
}

/// `(eps x5 - x3)^2 + x1^2 + (eps x1)^2 + 1`.
pub fn closed_eym(x: &[f64; 5], eps: f64) -> f64 {
    let [x1, _, x3, _, x5] = *x;
    (eps * x5 - x3).powi(2) + x1 * x1 + (eps * x1).powi(2) + 1.0
}

/// `(1 + eps^2) x1^2 + x3^2 + eps^2 x5^2 - 2 eps x3 x5 + 1`, the expanded
/// form of [`closed_eym`].
pub fn closed_eym_expanded(x: &[f64; 5], eps: f64) -> f64 {
    let [x1, _, x3, _, x5] = *x;
    (1.0 + eps * eps) * x1 * x1 + x3 * x3 + eps * eps * x5 * x5 - 2.0 * eps * x3 * x5 + 1.0
}

/// Rotation taking canonical axes `(X1, X3, X5)` to `(x1, x3, x5)`:
///
/// ```text
///                      | 0  sqrt(1+eps^2)   0  |
/// 1/sqrt(1+eps^2)  *   | eps      0         1  |
///                      | 1        0       -eps |
/// ```
///
/// The first canonical axis is the cylinder axis `x1 = 0, x3 = eps x5`.
pub fn rotation_matrix(eps: f64) -> Matrix3<f64> {
    let s = (1.0 + eps * eps).sqrt();
    Matrix3::new(0.0, 1.0, 0.0, eps / s, 0.0, 1.0 / s, 1.0 / s, 0.0, -eps / s)
}

/// The straight line `x1 = 0, x3 = eps x5` in `(x1, x3, x5)`-space.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    /// Unit direction in `(x1, x3, x5)` coordinates.
    pub direction: [f64; 3],
    pub eps: f64,
}

impl Line {
    fn new(eps: f64) -> Self {
        let s = (1.0 + eps * eps).sqrt();
        Line {
            direction: [0.0, eps / s, 1.0 / s],
            eps,
        }
    }

    pub fn constraints(&self) -> String {
        format!("x1 = 0, x3 = {}*x5", self.eps)
    }

    /// Whether `(x1, x3, x5)` satisfies both constraints within `tol`.
    pub fn contains(&self, p: [f64; 3], tol: f64) -> bool {
        p[0].abs() <= tol && (p[1] - self.eps * p[2]).abs() <= tol
    }
}

/// Shape of `{x : EYM(x) = C}` in `(x1, x3, x5)`-space. `x2` and `x4` are
/// free, so the hypersurface in R^5 is this set times a plane.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSetClass {
    Empty,
    Line(Line),
    Cylinder {
        radius: f64,
        axis: Line,
        rotation: Matrix3<f64>,
    },
}

impl LevelSetClass {
    pub fn case(&self) -> &'static str {
        match self {
            LevelSetClass::Empty => "empty",
            LevelSetClass::Line(_) => "line",
            LevelSetClass::Cylinder { .. } => "cylinder",
        }
    }
}

/// `C < 1`: empty; `|C - 1| <= 1e-12`: the line; `C > 1`: a slant circular
/// cylinder of radius `sqrt((C - 1)/(1 + eps^2))` around that line. A NaN
/// level is classified as empty.
pub fn classify_level_set(c: f64, eps: f64) -> LevelSetClass {
    if (c - 1.0).abs() <= LEVEL_TOLERANCE {
        LevelSetClass::Line(Line::new(eps))
    } else if c > 1.0 {
        LevelSetClass::Cylinder {
            radius: ((c - 1.0) / (1.0 + eps * eps)).sqrt(),
            axis: Line::new(eps),
            rotation: rotation_matrix(eps),
        }
    } else {
        LevelSetClass::Empty
    }
}

/// Point of the cylinder at axial coordinate `along` and angle `theta`,
/// returned as `(x1, x3, x5)`.
pub fn cylinder_point(radius: f64, eps: f64, along: f64, theta: f64) -> [f64; 3] {
    let canonical = nalgebra::Vector3::new(along, radius * theta.cos(), radius * theta.sin());
    let p = rotation_matrix(eps) * canonical;
    [p[0], p[1], p[2]]
}

/// JSON layout: `case`, then `radius`, `rotation` (row-major) for cylinders,
/// `constraints` for lines and cylinders, and always `free_coordinates` and
/// `tolerance`.
impl Serialize for LevelSetClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(None)?;
        m.serialize_entry("case", self.case())?;
        match self {
            LevelSetClass::Empty => {}
            LevelSetClass::Line(line) => {
                m.serialize_entry("constraints", &line.constraints())?;
                m.serialize_entry("direction", &line.direction)?;
            }
            LevelSetClass::Cylinder { radius, axis, rotation } => {
                m.serialize_entry("radius", radius)?;
                let rows: Vec<[f64; 3]> = (0..3)
                    .map(|r| [rotation[(r, 0)], rotation[(r, 1)], rotation[(r, 2)]])
                    .collect();
                m.serialize_entry("rotation", &rows)?;
                m.serialize_entry("constraints", &axis.constraints())?;
                m.serialize_entry("direction", &axis.direction)?;
            }
        }
        m.serialize_entry("free_coordinates", &["x2", "x4"])?;
        m.serialize_entry("tolerance", &LEVEL_TOLERANCE)?;
        m.end()
    }
}
