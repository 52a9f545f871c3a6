//! Test-only oracles: dense polynomial fields with hand-rolled derivatives,
//! and an expander turning polynomial `Expr` trees into coefficient maps.

#![allow(dead_code)]

use std::collections::BTreeMap;

use jetgeo_core::{parse_field, Expr, Matrix, Params, VectorField};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `sum c * prod x_i^e_i`, one list of monomials per component.
#[derive(Debug, Clone)]
pub struct PolyField {
    pub n: usize,
    pub components: Vec<Vec<(f64, Vec<u32>)>>,
}

impl PolyField {
    pub fn random(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> Self {
        let components = (0..n)
            .map(|_| {
                let terms = rng.gen_range(1..=6);
                (0..terms)
                    .map(|_| {
                        let coef = (rng.gen_range(-2.0..2.0_f64) * 1000.0).round() / 1000.0;
                        let degree = rng.gen_range(0..=max_degree);
                        let mut exps = vec![0u32; n];
                        for _ in 0..degree {
                            exps[rng.gen_range(0..n)] += 1;
                        }
                        (coef, exps)
                    })
                    .collect()
            })
            .collect();
        PolyField { n, components }
    }

    pub fn source(&self) -> String {
        let mut out = String::new();
        for (i, terms) in self.components.iter().enumerate() {
            out.push_str(&format!("X{} = ", i + 1));
            for (k, (c, exps)) in terms.iter().enumerate() {
                let sign = if *c < 0.0 { "-" } else { "+" };
                if k == 0 {
                    if *c < 0.0 {
                        out.push('-');
                    }
                } else {
                    out.push_str(&format!(" {sign} "));
                }
                out.push_str(&format!("{:?}", c.abs()));
                for (v, e) in exps.iter().enumerate() {
                    if *e > 0 {
                        out.push_str(&format!("*x{}^{}", v + 1, e));
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn field(&self) -> VectorField {
        parse_field(&self.source(), &Params::new()).expect("generated source parses")
    }

    fn monomial(exps: &[u32], x: &[f64]) -> f64 {
        exps.iter().zip(x).map(|(e, v)| v.powi(*e as i32)).product()
    }

    fn derive(exps: &[u32], var: usize) -> Option<(f64, Vec<u32>)> {
        if exps[var] == 0 {
            return None;
        }
        let mut d = exps.to_vec();
        d[var] -= 1;
        Some((exps[var] as f64, d))
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|terms| terms.iter().map(|(c, e)| c * Self::monomial(e, x)).sum())
            .collect()
    }

    /// `dX_i/dx_j`, 0-based.
    pub fn d1(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        self.components[i]
            .iter()
            .filter_map(|(c, e)| Self::derive(e, j).map(|(m, d)| c * m * Self::monomial(&d, x)))
            .sum()
    }

    /// `d^2 X_i / dx_j dx_k`, 0-based.
    pub fn d2(&self, i: usize, j: usize, k: usize, x: &[f64]) -> f64 {
        self.components[i]
            .iter()
            .filter_map(|(c, e)| {
                let (m1, d) = Self::derive(e, j)?;
                let (m2, dd) = Self::derive(&d, k)?;
                Some(c * m1 * m2 * Self::monomial(&dd, x))
            })
            .sum()
    }

    pub fn jacobian(&self, x: &[f64]) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| self.d1(i, j, x))
    }

    /// `F_ij = (J_ij - J_ji) / 2`.
    pub fn em(&self, x: &[f64]) -> Matrix {
        let j = self.jacobian(x);
        Matrix::from_fn(self.n, self.n, |a, b| 0.5 * (j[(a, b)] - j[(b, a)]))
    }

    /// `dF_ij/dx_k`.
    pub fn em_derivative(&self, i: usize, j: usize, k: usize, x: &[f64]) -> f64 {
        0.5 * (self.d2(i, j, k, x) - self.d2(j, i, k, x))
    }
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize, half_width: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-half_width..=half_width)).collect()
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Coefficients keyed by exponent vector (length `n`).
pub type Poly = BTreeMap<Vec<u32>, f64>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(0.0) += ca * cb;
        }
    }
    out
}

fn poly_add(a: &Poly, b: &Poly, sign: f64) -> Poly {
    let mut out = a.clone();
    for (e, c) in b {
        *out.entry(e.clone()).or_insert(0.0) += sign * c;
    }
    out
}

/// Expands a polynomial expression; `None` for anything that is not a
/// polynomial (calls, negative powers, division by non-constants).
pub fn expand(e: &Expr, n: usize, params: &Params) -> Option<Poly> {
    let constant = |c: f64| Poly::from([(vec![0; n], c)]);
    Some(match e {
        Expr::Const(c) => constant(*c),
        Expr::Param(p) => constant(*params.get(p)?),
        Expr::Var(i) => {
            let mut exps = vec![0; n];
            exps[*i - 1] = 1;
            Poly::from([(exps, 1.0)])
        }
        Expr::Neg(a) => expand(a, n, params)?.into_iter().map(|(k, c)| (k, -c)).collect(),
        Expr::Add(a, b) => poly_add(&expand(a, n, params)?, &expand(b, n, params)?, 1.0),
        Expr::Sub(a, b) => poly_add(&expand(a, n, params)?, &expand(b, n, params)?, -1.0),
        Expr::Mul(a, b) => poly_mul(&expand(a, n, params)?, &expand(b, n, params)?),
        Expr::Div(a, b) => {
            let d = expand(b, n, params)?;
            let c = match d.iter().filter(|(_, c)| **c != 0.0).collect::<Vec<_>>()[..] {
                [(k, c)] if k.iter().all(|e| *e == 0) => *c,
                _ => return None,
            };
            expand(a, n, params)?.into_iter().map(|(k, v)| (k, v / c)).collect()
        }
        Expr::Pow(base, k) if *k >= 0 => {
            let b = expand(base, n, params)?;
            (0..*k).fold(constant(1.0), |acc, _| poly_mul(&acc, &b))
        }
        Expr::Pow(..) | Expr::Call(..) => return None,
    })
}

/// Coefficient-wise comparison with relative tolerance; zero coefficients on
/// either side are ignored.
pub fn poly_eq(a: &Poly, b: &Poly, tol: f64) -> bool {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter().all(|k| {
        let x = a.get(k).copied().unwrap_or(0.0);
        let y = b.get(k).copied().unwrap_or(0.0);
        (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
    })
}
