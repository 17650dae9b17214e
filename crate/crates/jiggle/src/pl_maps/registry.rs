use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A named smooth map `R^N → R^n` with value and derivative evaluators.
///
/// | name        | params                         | value                         |
/// |-------------|--------------------------------|-------------------------------|
/// | `identity`  | none                           | `x`                           |
/// | `constant`  | `c_1 … c_n`                    | `c`                           |
/// | `quadratic` | `a, b`                         | `a‖x‖² + b`                   |
/// | `sin_field` | `a, w, n`                      | `a sin(w Σx_j + k)`, `k < n`  |
/// | `linear`    | `n`, then `M` row-major, `c`   | `Mx + c`                      |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SmoothSpec", into = "SmoothSpec")]
pub struct SmoothFn {
    name: String,
    params: Vec<f64>,
    kind: Kind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothSpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Identity,
    Constant(DVector<f64>),
    Quadratic { a: f64, b: f64 },
    SinField { a: f64, w: f64, n: usize },
    Linear { m: DMatrix<f64>, c: DVector<f64> },
}

impl TryFrom<SmoothSpec> for SmoothFn {
    type Error = Error;

    fn try_from(s: SmoothSpec) -> Result<Self> {
        SmoothFn::new(&s.name, s.params)
    }
}

impl From<SmoothFn> for SmoothSpec {
    fn from(f: SmoothFn) -> Self {
        SmoothSpec { name: f.name, params: f.params }
    }
}

fn as_count(x: f64, what: &str) -> Result<usize> {
    if x >= 1.0 && x.fract() == 0.0 && x < 1e6 {
        Ok(x as usize)
    } else {
        Err(Error::Invalid(format!("{what} must be a positive integer")))
    }
}

impl SmoothFn {
    pub fn new(name: &str, params: Vec<f64>) -> Result<Self> {
        let bad = |msg: &str| Error::Invalid(format!("{name}: {msg}"));
        let kind = match name {
            "identity" => {
                if !params.is_empty() {
                    return Err(bad("takes no parameters"));
                }
                Kind::Identity
            }
            "constant" => {
                if params.is_empty() {
                    return Err(bad("needs at least one value"));
                }
                Kind::Constant(DVector::from_vec(params.clone()))
            }
            "quadratic" => match params.as_slice() {
                [a, b] => Kind::Quadratic { a: *a, b: *b },
                _ => return Err(bad("expects [a, b]")),
            },
            "sin_field" => match params.as_slice() {
                [a, w, n] => Kind::SinField { a: *a, w: *w, n: as_count(*n, "n")? },
                _ => return Err(bad("expects [amplitude, frequency, n]")),
            },
            "linear" => {
                let n = as_count(*params.first().ok_or_else(|| bad("expects [n, M…, c…]"))?, "n")?;
                let rest = params.len() - 1;
                if rest < 2 * n || !(rest - n).is_multiple_of(n) {
                    return Err(bad("expects [n, M row-major (n×N), c (n)]"));
                }
                let big_n = (rest - n) / n;
                let m = DMatrix::from_row_slice(n, big_n, &params[1..1 + n * big_n]);
                let c = DVector::from_column_slice(&params[1 + n * big_n..]);
                Kind::Linear { m, c }
            }
            other => return Err(Error::Invalid(format!("unknown function `{other}`"))),
        };
        if params.iter().any(|p| !p.is_finite()) {
            return Err(bad("non-finite parameter"));
        }
        Ok(Self { name: name.to_string(), params, kind })
    }

    pub fn identity() -> Self {
        Self::new("identity", vec![]).expect("valid")
    }

    pub fn constant(c: &[f64]) -> Self {
        Self::new("constant", c.to_vec()).expect("valid")
    }

    pub fn quadratic(a: f64, b: f64) -> Self {
        Self::new("quadratic", vec![a, b]).expect("valid")
    }

    pub fn sin_field(a: f64, w: f64, n: usize) -> Self {
        Self::new("sin_field", vec![a, w, n as f64]).expect("valid")
    }

    pub fn linear(m: &DMatrix<f64>, c: &DVector<f64>) -> Self {
        let mut p = vec![m.nrows() as f64];
        for i in 0..m.nrows() {
            p.extend(m.row(i).iter());
        }
        p.extend(c.iter());
        Self::new("linear", p).expect("valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Target dimension for a domain of dimension `ambient`.
    pub fn target_dim(&self, ambient: usize) -> usize {
        match &self.kind {
            Kind::Identity => ambient,
            Kind::Constant(c) => c.len(),
            Kind::Quadratic { .. } => 1,
            Kind::SinField { n, .. } => *n,
            Kind::Linear { m, .. } => m.nrows(),
        }
    }

    /// Whether the function accepts points of dimension `ambient`.
    pub fn accepts(&self, ambient: usize) -> bool {
        match &self.kind {
            Kind::Linear { m, .. } => m.ncols() == ambient,
            _ => true,
        }
    }

    pub fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.kind {
            Kind::Identity => x.clone(),
            Kind::Constant(c) => c.clone(),
            Kind::Quadratic { a, b } => DVector::from_element(1, a * x.norm_squared() + b),
            Kind::SinField { a, w, n } => {
                let s = x.sum();
                DVector::from_fn(*n, |k, _| a * (w * s + k as f64).sin())
            }
            Kind::Linear { m, c } => m * x + c,
        }
    }

    /// Derivative as an `n × N` matrix.
    pub fn derivative(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let big_n = x.len();
        match &self.kind {
            Kind::Identity => DMatrix::identity(big_n, big_n),
            Kind::Constant(c) => DMatrix::zeros(c.len(), big_n),
            Kind::Quadratic { a, .. } => DMatrix::from_row_slice(1, big_n, (x * (2.0 * a)).as_slice()),
            Kind::SinField { a, w, n } => {
                let s = x.sum();
                DMatrix::from_fn(*n, big_n, |k, _| a * w * (w * s + k as f64).cos())
            }
            Kind::Linear { m, .. } => m.clone(),
        }
    }
}
