//! Least-squares Lagrangian, its action, the Euler–Lagrange dynamics and
//! fixed-step RK4 integrators for both the first-order and the E–L flows.

use nalgebra::DVector;

use crate::error::{DynamicsError, EvalError};
use crate::field::VectorField;
use crate::geometry::{jacobian, yang_mills_energy};

/// A point `(t, x, v)` of the 1-jet space: time, position, velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct JetState {
    pub t: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

/// Samples of a curve on a uniform time grid. Second-order runs also carry
/// the velocity at each sample.
///
/// The grid is `t0 + k*dt`; when an integration interval is not a whole
/// number of steps the final sample sits closer than `dt` to its predecessor.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub xs: Vec<Vec<f64>>,
    pub vs: Option<Vec<Vec<f64>>>,
}

impl Trajectory {
    /// Position-only trajectory on the grid `t0 + k*dt`.
    pub fn uniform(t0: f64, dt: f64, xs: Vec<Vec<f64>>) -> Self {
        let times = (0..xs.len()).map(|k| t0 + k as f64 * dt).collect();
        Trajectory { times, xs, vs: None }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.xs.first().map_or(0, Vec::len)
    }

    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    /// Nominal step, `t1 - t0`.
    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn jet_state(&self, index: usize) -> JetState {
        JetState {
            t: self.times[index],
            x: self.xs[index].clone(),
            v: self.vs.as_ref().map(|vs| vs[index].clone()).unwrap_or_default(),
        }
    }

    fn check_uniform(&self) -> Result<f64, DynamicsError> {
        if self.len() < 2 {
            return Err(DynamicsError::DegenerateTrajectory(self.len()));
        }
        let dt = self.dt();
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DynamicsError::NonUniform { index: 1 });
        }
        for k in 1..self.len() {
            let step = self.times[k] - self.times[k - 1];
            if (step - dt).abs() > 1e-6 * dt {
                return Err(DynamicsError::NonUniform { index: k });
            }
        }
        Ok(dt)
    }
}

/// `JLS(x, v) = sum_i (v_i - X_i(x))^2`.
pub fn jls(field: &VectorField, x: &[f64], v: &[f64]) -> Result<f64, EvalError> {
    check_len(field, v)?;
    let xv = field.eval(x)?;
    Ok(v.iter().zip(&xv).map(|(vi, xi)| (vi - xi) * (vi - xi)).sum())
}

fn check_len(field: &VectorField, v: &[f64]) -> Result<(), EvalError> {
    if v.len() != field.dim() {
        return Err(EvalError::DimensionMismatch {
            expected: field.dim(),
            got: v.len(),
        });
    }
    Ok(())
}

/// Velocities of a uniformly sampled path: fourth-order central differences
/// where the five-point stencil fits, second-order central next to the ends,
/// one-sided second-order at the ends (first-order for two samples).
pub fn finite_difference_velocities(xs: &[Vec<f64>], dt: f64) -> Vec<Vec<f64>> {
    let n = xs.len();
    let dim = xs.first().map_or(0, Vec::len);
    let combine = |terms: &[(usize, f64)], denom: f64| -> Vec<f64> {
        (0..dim)
            .map(|d| terms.iter().map(|(k, w)| w * xs[*k][d]).sum::<f64>() / denom)
            .collect()
    };
    match n {
        0 | 1 => vec![vec![0.0; dim]; n],
        2 => {
            let v = combine(&[(0, -1.0), (1, 1.0)], dt);
            vec![v.clone(), v]
        }
        _ => (0..n)
            .map(|i| {
                if i == 0 {
                    combine(&[(0, -3.0), (1, 4.0), (2, -1.0)], 2.0 * dt)
                } else if i == n - 1 {
                    combine(&[(i, 3.0), (i - 1, -4.0), (i - 2, 1.0)], 2.0 * dt)
                } else if i >= 2 && i + 2 < n {
                    combine(&[(i - 2, 1.0), (i - 1, -8.0), (i + 1, 8.0), (i + 2, -1.0)], 12.0 * dt)
                } else {
                    combine(&[(i - 1, -1.0), (i + 1, 1.0)], 2.0 * dt)
                }
            })
            .collect(),
    }
}

/// Quadrature weights on `n` equally spaced samples: composite Simpson, with
/// a trapezoid on the last interval when `n` is even.
pub fn simpson_weights(n: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    if n == 2 {
        return vec![0.5 * dt, 0.5 * dt];
    }
    let simpson_len = if n % 2 == 1 { n } else { n - 1 };
    for (i, wi) in w.iter_mut().enumerate().take(simpson_len) {
        let c = if i == 0 || i == simpson_len - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        *wi = c * dt / 3.0;
    }
    if simpson_len < n {
        w[n - 2] += 0.5 * dt;
        w[n - 1] += 0.5 * dt;
    }
    w
}

/// The least-squares energy action `integral of JLS dt` along a trajectory.
///
/// Velocities always come from finite differences of the stored positions,
/// so position-only trajectories from outside are accepted.
pub fn action(field: &VectorField, traj: &Trajectory) -> Result<f64, DynamicsError> {
    let dt = traj.check_uniform()?;
    let vs = finite_difference_velocities(&traj.xs, dt);
    let weights = simpson_weights(traj.len(), dt);
    let mut total = 0.0;
    for ((x, v), w) in traj.xs.iter().zip(&vs).zip(&weights) {
        total += w * jls(field, x, v)?;
    }
    Ok(total)
}

/// Per-sample `(EYM, JLS)`; JLS uses the stored velocities when present and
/// finite-difference velocities otherwise.
pub fn observables(field: &VectorField, traj: &Trajectory) -> Result<Vec<(f64, f64)>, DynamicsError> {
    let vs = match &traj.vs {
        Some(vs) => vs.clone(),
        None => finite_difference_velocities(&traj.xs, traj.check_uniform()?),
    };
    traj.xs
        .iter()
        .zip(&vs)
        .map(|(x, v)| Ok((yang_mills_energy(field, x)?, jls(field, x, v)?)))
        .collect()
}

/// `dL/dx_i - d/dt(dL/dv_i)` for `L = JLS`, evaluated on the jet data
/// `(x, v, a)`: `-2 (a - J v) - 2 J^T (v - X(x))`.
pub fn el_residual(field: &VectorField, x: &[f64], v: &[f64], a: &[f64]) -> Result<Vec<f64>, EvalError> {
    check_len(field, v)?;
    check_len(field, a)?;
    let j = jacobian(field, x)?;
    let xv = DVector::from_vec(field.eval(x)?);
    let v = DVector::from_column_slice(v);
    let a = DVector::from_column_slice(a);
    let r = -2.0 * (&a - &j * &v) - 2.0 * j.transpose() * (&v - xv);
    Ok(r.iter().copied().collect())
}

/// The E–L equations solved for the acceleration: `a = J v - J^T (v - X(x))`.
pub fn el_acceleration(field: &VectorField, x: &[f64], v: &[f64]) -> Result<Vec<f64>, EvalError> {
    check_len(field, v)?;
    let j = jacobian(field, x)?;
    let xv = DVector::from_vec(field.eval(x)?);
    let v = DVector::from_column_slice(v);
    let a = &j * &v - j.transpose() * (&v - xv);
    Ok(a.iter().copied().collect())
}

/// Step sizes covering `[t0, t1]` with steps of `dt`, the last one shortened
/// if needed so the grid lands on `t1`.
fn time_grid(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>, DynamicsError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DynamicsError::InvalidGrid(format!("dt must be positive, got {dt}")));
    }
    if !(t1 > t0 && t0.is_finite() && t1.is_finite()) {
        return Err(DynamicsError::InvalidGrid(format!("need t0 < t1, got [{t0}, {t1}]")));
    }
    let span = t1 - t0;
    let ratio = span / dt;
    let whole = ratio.round();
    let steps = if (whole * dt - span).abs() <= 1e-9 * span {
        whole as usize
    } else {
        ratio.ceil() as usize
    };
    let mut times: Vec<f64> = (0..steps).map(|k| t0 + k as f64 * dt).collect();
    times.push(t1);
    Ok(times)
}

fn rk4<F>(rhs: F, y0: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>, DynamicsError>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, EvalError>,
{
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(DynamicsError::BlowUp { last_valid_t: f64::NAN });
    }
    let dim = y0.len();
    let mut out = Vec::with_capacity(times.len());
    out.push(y0.to_vec());
    let mut stage = vec![0.0; dim];
    for w in times.windows(2) {
        let h = w[1] - w[0];
        let y = out.last().expect("initial state pushed");
        let k1 = rhs(y)?;
        for d in 0..dim {
            stage[d] = y[d] + 0.5 * h * k1[d];
        }
        let k2 = rhs(&stage)?;
        for d in 0..dim {
            stage[d] = y[d] + 0.5 * h * k2[d];
        }
        let k3 = rhs(&stage)?;
        for d in 0..dim {
            stage[d] = y[d] + h * k3[d];
        }
        let k4 = rhs(&stage)?;
        let next: Vec<f64> = (0..dim)
            .map(|d| y[d] + h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]))
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(DynamicsError::BlowUp { last_valid_t: w[0] });
        }
        out.push(next);
    }
    Ok(out)
}

/// Classical RK4 solution of `x' = X(x)` on `[t0, t1]`.
pub fn integrate_field(
    field: &VectorField,
    x0: &[f64],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    field.check_ready(x0)?;
    let times = time_grid(t0, t1, dt)?;
    let xs = rk4(|x| field.eval(x), x0, &times)?;
    Ok(Trajectory { times, xs, vs: None })
}

/// RK4 solution of the Euler–Lagrange flow `(x, v)' = (v, a(x, v))`.
pub fn integrate_el(
    field: &VectorField,
    x0: &[f64],
    v0: &[f64],
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    field.check_ready(x0)?;
    check_len(field, v0)?;
    let n = field.dim();
    let times = time_grid(t0, t1, dt)?;
    let y0: Vec<f64> = x0.iter().chain(v0).copied().collect();
    let ys = rk4(
        |y| {
            let (x, v) = y.split_at(n);
            let a = el_acceleration(field, x, v)?;
            Ok(v.iter().copied().chain(a).collect())
        },
        &y0,
        &times,
    )?;
    let (xs, vs) = ys
        .into_iter()
        .map(|mut y| {
            let v = y.split_off(n);
            (y, v)
        })
        .unzip();
    Ok(Trajectory {
        times,
        xs,
        vs: Some(vs),
    })
}
