//! Self-check suites: exact identities of the jet geometry, finite-difference
//! and closed-form oracles, first integrals and the E–L inclusion. Each
//! suite reports its largest residual against a fixed tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{el_acceleration, el_residual, integrate_field};
use crate::error::EvalError;
use crate::field::VectorField;
use crate::geometry::{half_trace_norm, numeric_jacobian, GeometryReport, Matrix};
use crate::lorenz5;

pub const IDENTITY_TOL: f64 = 1e-12;
pub const FD_REL_TOL: f64 = 1e-6;
pub const FD_STEP: f64 = 1e-6;
pub const FIRST_INTEGRAL_TOL: f64 = 1e-8;

/// Sample sizes and the sampling box `[-half_width, half_width]^n`.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub geometry_points: usize,
    pub derivative_points: usize,
    pub half_width: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            geometry_points: 1000,
            derivative_points: 100,
            half_width: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub eps: Option<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub detail: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

/// Tracks the largest residual seen and where it occurred.
struct Worst {
    value: f64,
    detail: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: 0.0,
            detail: None,
        }
    }

    fn update(&mut self, value: f64, detail: impl FnOnce() -> Option<String>) {
        if value > self.value || (value.is_nan() && !self.value.is_nan()) {
            self.value = value;
            self.detail = detail();
        }
    }

    fn fail(&mut self, err: &EvalError) {
        if self.value != f64::INFINITY {
            self.value = f64::INFINITY;
            self.detail = Some(format!("evaluation failed: {err}"));
        }
    }

    fn report(self, name: &'static str, eps: Option<f64>, tolerance: f64) -> SuiteReport {
        SuiteReport {
            name,
            eps,
            max_residual: self.value,
            tolerance,
            detail: self.detail,
        }
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, count: usize, half_width: f64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(-half_width..=half_width)).collect())
        .collect()
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Suites that apply to any field: antisymmetry, Yang–Mills trace identity,
/// Maxwell identity, derivative oracle, E–L inclusion and E–L consistency.
pub fn generic_suites(field: &VectorField, eps: Option<f64>, cfg: &VerifyConfig) -> Vec<SuiteReport> {
    let n = field.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points = random_points(&mut rng, n, cfg.geometry_points, cfg.half_width);

    let mut antisym = Worst::new();
    let mut ym = Worst::new();
    let mut maxwell = Worst::new();
    for x in &points {
        match GeometryReport::compute(field, x) {
            Ok(r) => {
                let mut a = max_abs(&(&r.connection + r.connection.transpose()));
                a = a.max(max_abs(&(&r.em + &r.connection)));
                for rk in &r.torsion {
                    a = a.max(max_abs(&(rk + rk.transpose())));
                }
                antisym.update(a, || None);
                ym.update((r.eym - half_trace_norm(&r.em)).abs(), || None);
                maxwell.update(r.maxwell_residual, || {
                    r.maxwell_worst_triple
                        .map(|[i, j, k]| format!("worst triple ({i},{j},{k}) at x = {x:?}"))
                });
            }
            Err(e) => {
                antisym.fail(&e);
                ym.fail(&e);
                maxwell.fail(&e);
            }
        }
    }

    let mut fd = Worst::new();
    let mut inclusion = Worst::new();
    let mut consistency = Worst::new();
    let probe = random_points(&mut rng, n, cfg.derivative_points, cfg.half_width);
    let velocities = random_points(&mut rng, n, cfg.derivative_points, cfg.half_width);
    for (x, v) in probe.iter().zip(&velocities) {
        let checked = (|| -> Result<(), EvalError> {
            let sym = GeometryReport::compute(field, x)?.jacobian;
            let num = numeric_jacobian(field, x, FD_STEP)?;
            let rel = max_abs(&(&num - &sym)) / max_abs(&sym).max(1.0);
            fd.update(rel, || Some(format!("at x = {x:?}")));

            let xv = field.eval(x)?;
            let a: Vec<f64> = (&sym * nalgebra::DVector::from_vec(xv.clone()))
                .iter()
                .copied()
                .collect();
            let r = el_residual(field, x, &xv, &a)?;
            inclusion.update(r.iter().fold(0.0, |m, v| m.max(v.abs())), || None);

            let acc = el_acceleration(field, x, v)?;
            let r = el_residual(field, x, v, &acc)?;
            consistency.update(r.iter().fold(0.0, |m, v| m.max(v.abs())), || None);
            Ok(())
        })();
        if let Err(e) = checked {
            fd.fail(&e);
            inclusion.fail(&e);
            consistency.fail(&e);
        }
    }

    vec![
        antisym.report("antisymmetry", eps, IDENTITY_TOL),
        ym.report("yang_mills_identity", eps, IDENTITY_TOL),
        maxwell.report("maxwell_identity", eps, IDENTITY_TOL),
        fd.report("derivative_oracle", eps, FD_REL_TOL),
        inclusion.report("el_inclusion", eps, IDENTITY_TOL),
        consistency.report("el_consistency", eps, IDENTITY_TOL),
    ]
}

/// Generic pipeline against the closed forms of the Lorenz model.
pub fn lorenz_oracle_suite(eps: f64, cfg: &VerifyConfig) -> SuiteReport {
    let field = lorenz5::lorenz_field(eps);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let torsion = lorenz5::closed_torsion(eps);
    let mut worst = Worst::new();
    for p in random_points(&mut rng, 5, cfg.geometry_points, cfg.half_width) {
        let x: [f64; 5] = p.clone().try_into().expect("five coordinates");
        match GeometryReport::compute(&field, &p) {
            Ok(r) => {
                let mut d = max_abs(&(&r.connection - lorenz5::closed_connection(&x, eps)));
                d = d.max(max_abs(&(&r.em - lorenz5::closed_em(&x, eps))));
                for (rk, ck) in r.torsion.iter().zip(&torsion) {
                    d = d.max(max_abs(&(rk - ck)));
                }
                d = d.max((r.eym - lorenz5::closed_eym(&x, eps)).abs());
                worst.update(d, || Some(format!("at x = {p:?}")));
            }
            Err(e) => worst.fail(&e),
        }
    }
    worst.report("lorenz_oracle_equivalence", Some(eps), IDENTITY_TOL)
}

/// Drift of `x1^2 + x2^2` and `x2^2 + x3^2 + x4^2 + x5^2` along an RK4 run
/// (`x0 = (1, 1, 1, 0.1, 0.1)`, `t` in `[0, 10]`, `dt = 1e-3`).
pub fn lorenz_first_integrals_suite(eps: f64) -> SuiteReport {
    let field = lorenz5::lorenz_field(eps);
    let mut worst = Worst::new();
    match integrate_field(&field, &[1.0, 1.0, 1.0, 0.1, 0.1], 0.0, 10.0, 1e-3) {
        Ok(traj) => {
            let (a0, b0) = lorenz_invariants(&traj.xs[0]);
            for (t, x) in traj.times.iter().zip(&traj.xs) {
                let (a, b) = lorenz_invariants(x);
                worst.update((a - a0).abs().max((b - b0).abs()), || Some(format!("at t = {t}")));
            }
        }
        Err(e) => {
            worst.value = f64::INFINITY;
            worst.detail = Some(e.to_string());
        }
    }
    worst.report("first_integrals", Some(eps), FIRST_INTEGRAL_TOL)
}

/// The two quadratic first integrals of the Lorenz model.
pub fn lorenz_invariants(x: &[f64]) -> (f64, f64) {
    (
        x[0] * x[0] + x[1] * x[1],
        x[1] * x[1] + x[2] * x[2] + x[3] * x[3] + x[4] * x[4],
    )
}

/// Every suite for the Lorenz model at each `eps`.
pub fn verify_lorenz(epsilons: &[f64], cfg: &VerifyConfig) -> Vec<SuiteReport> {
    let mut out = Vec::new();
    for &eps in epsilons {
        out.push(lorenz_oracle_suite(eps, cfg));
        out.extend(generic_suites(&lorenz5::lorenz_field(eps), Some(eps), cfg));
        out.push(lorenz_first_integrals_suite(eps));
    }
    out
}
