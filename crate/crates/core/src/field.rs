//! Autonomous vector fields `x' = X(x)` and their symbolic derivatives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{EvalError, ParseError};
use crate::expr::Expr;
use crate::parse::component_lines;

/// Parameter bindings, e.g. `eps -> 0.1`.
pub type Params = BTreeMap<String, f64>;

/// The components `X1..Xn` of a first-order autonomous system together with
/// parameter bindings.
///
/// Component and variable indices in this API are 1-based, matching the
/// `X<i>` / `x<i>` names of the field-file grammar. First and second
/// partial derivatives are derived symbolically once, on first use, and
/// shared between clones.
#[derive(Debug, Clone)]
pub struct VectorField {
    components: Vec<Expr>,
    params: Params,
    derivatives: OnceLock<Arc<Derivatives>>,
}

#[derive(Debug)]
struct Derivatives {
    dim: usize,
    /// `first[(i-1)*n + (j-1)] = dX_i/dx_j`
    first: Vec<Expr>,
    /// `second[(i-1)*n + (j-1)]` lists the non-zero `(k, d/dx_k dX_i/dx_j)`.
    second: Vec<Vec<(usize, Expr)>>,
}

impl Derivatives {
    fn build(components: &[Expr]) -> Self {
        let n = components.len();
        let mut first = Vec::with_capacity(n * n);
        let mut second = Vec::with_capacity(n * n);
        for comp in components {
            let vars = comp.variables();
            for j in 1..=n {
                let d = if vars.contains(&j) {
                    comp.derivative(j)
                } else {
                    Expr::zero()
                };
                let dd: Vec<(usize, Expr)> = d
                    .variables()
                    .into_iter()
                    .map(|k| (k, d.derivative(k)))
                    .filter(|(_, e)| !e.is_zero())
                    .collect();
                first.push(d);
                second.push(dd);
            }
        }
        Derivatives { dim: n, first, second }
    }
}

impl VectorField {
    /// Builds a field from component expressions; every referenced variable
    /// index must be at most the number of components.
    pub fn new(components: Vec<Expr>, params: Params) -> Result<Self, EvalError> {
        let n = components.len();
        if n == 0 {
            return Err(EvalError::InvalidArgument(
                "a field needs at least one component".into(),
            ));
        }
        for comp in &components {
            if let Some(&index) = comp.variables().iter().next_back() {
                if index > n {
                    return Err(EvalError::IndexOutOfRange { index, dim: n });
                }
            }
        }
        Ok(VectorField {
            components,
            params,
            derivatives: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Binds (or rebinds) a parameter.
    pub fn with_param(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    pub fn referenced_params(&self) -> BTreeSet<String> {
        self.components.iter().flat_map(Expr::parameters).collect()
    }

    /// Referenced parameters that still lack a value.
    pub fn unbound_params(&self) -> Vec<String> {
        self.referenced_params()
            .into_iter()
            .filter(|p| !self.params.contains_key(p))
            .collect()
    }

    pub(crate) fn check_ready(&self, x: &[f64]) -> Result<(), EvalError> {
        if x.len() != self.dim() {
            return Err(EvalError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if let Some(p) = self.unbound_params().into_iter().next() {
            return Err(EvalError::UnboundParameter(p));
        }
        Ok(())
    }

    /// `(X1(x), ..., Xn(x))`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.check_ready(x)?;
        self.components
            .iter()
            .enumerate()
            .map(|(i, c)| self.eval_expr(c, i + 1, x))
            .collect()
    }

    pub(crate) fn eval_expr(&self, e: &Expr, component: usize, x: &[f64]) -> Result<f64, EvalError> {
        e.eval(x, &self.params)
            .map_err(|source| EvalError::Component { component, source })
    }

    fn derivatives(&self) -> &Derivatives {
        self.derivatives
            .get_or_init(|| Arc::new(Derivatives::build(&self.components)))
    }

    fn check_index(&self, index: usize) -> Result<(), EvalError> {
        if index == 0 || index > self.dim() {
            Err(EvalError::IndexOutOfRange { index, dim: self.dim() })
        } else {
            Ok(())
        }
    }

    /// Symbolic `dX_i/dx_j`.
    pub fn partial(&self, i: usize, j: usize) -> Result<Expr, EvalError> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(self.partial_ref(i, j).clone())
    }

    pub(crate) fn partial_ref(&self, i: usize, j: usize) -> &Expr {
        let d = self.derivatives();
        &d.first[(i - 1) * d.dim + (j - 1)]
    }

    /// Symbolic `d/dx_k (dX_i/dx_j)`.
    pub fn second_partial(&self, i: usize, j: usize, k: usize) -> Result<Expr, EvalError> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.check_index(k)?;
        Ok(self
            .second_nonzero(i, j)
            .iter()
            .find(|(kk, _)| *kk == k)
            .map(|(_, e)| e.clone())
            .unwrap_or_else(Expr::zero))
    }

    /// Non-zero second partials `(k, d/dx_k dX_i/dx_j)` for fixed `(i, j)`.
    pub(crate) fn second_nonzero(&self, i: usize, j: usize) -> &[(usize, Expr)] {
        let d = self.derivatives();
        &d.second[(i - 1) * d.dim + (j - 1)]
    }
}

/// Parses a field file: one `X<i> = <expression>` per line, `#` comments,
/// blank lines ignored. Parameters missing from `params` stay unbound until
/// supplied with [`VectorField::with_param`].
pub fn parse_field(text: &str, params: &Params) -> Result<VectorField, ParseError> {
    let lines = component_lines(text)?;
    if lines.is_empty() {
        return Err(ParseError::Empty);
    }
    let n = lines.len();
    let mut slots: Vec<Option<Expr>> = vec![None; n];
    let mut origin = vec![0usize; n];
    let mut seen = BTreeSet::new();
    for cl in &lines {
        if !seen.insert(cl.label) {
            return Err(ParseError::DuplicateComponent {
                line: cl.line,
                component: cl.label,
            });
        }
    }
    if let Some(gap) = (1..=n).find(|i| !seen.contains(i)) {
        return Err(ParseError::MissingComponent { component: gap });
    }
    for cl in lines {
        origin[cl.label - 1] = cl.line;
        slots[cl.label - 1] = Some(cl.expr);
    }
    let components: Vec<Expr> = slots.into_iter().flatten().collect();
    for (idx, comp) in components.iter().enumerate() {
        if let Some(&index) = comp.variables().iter().next_back() {
            if index > n {
                return Err(ParseError::VariableOutOfRange {
                    line: origin[idx],
                    component: idx + 1,
                    index,
                    dim: n,
                });
            }
        }
    }
    Ok(VectorField {
        components,
        params: params.clone(),
        derivatives: OnceLock::new(),
    })
}

/// `(X1(x), ..., Xn(x))`.
pub fn eval_field(field: &VectorField, x: &[f64]) -> Result<Vec<f64>, EvalError> {
    field.eval(x)
}

/// Symbolic `dX_i/dx_j` (1-based).
pub fn partial(field: &VectorField, i: usize, j: usize) -> Result<Expr, EvalError> {
    field.partial(i, j)
}

/// Symbolic `d^2 X_i / dx_k dx_j` (1-based).
pub fn second_partial(field: &VectorField, i: usize, j: usize, k: usize) -> Result<Expr, EvalError> {
    field.second_partial(i, j, k)
}

/// Prints the components in field-file form.
impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            writeln!(f, "X{} = {}", i + 1, c)?;
        }
        Ok(())
    }
}
