use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A field of `r`-planes on the target `R^n`, evaluated as orthonormal
/// `n × r` frames.
///
/// Registry fields:
/// - `rotating_line` (`n = 2`, params `[w]`): the line at angle `w·y_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionSpec", into = "DistributionSpec")]
pub struct Distribution {
    spec: DistributionSpec,
    kind: Kind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// Spanned by the given vectors, orthonormalized.
    Constant { frame: Vec<Vec<f64>> },
    Registry {
        name: String,
        #[serde(default)]
        params: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Constant(DMatrix<f64>),
    RotatingLine { w: f64 },
}

impl TryFrom<DistributionSpec> for Distribution {
    type Error = Error;

    fn try_from(spec: DistributionSpec) -> Result<Self> {
        let kind = match &spec {
            DistributionSpec::Constant { frame } => {
                let n = frame.first().map(|v| v.len()).unwrap_or(0);
                if n == 0 || frame.iter().any(|v| v.len() != n) {
                    return Err(Error::Invalid("distribution frame vectors must share one nonzero length".into()));
                }
                let raw = DMatrix::from_fn(n, frame.len(), |i, j| frame[j][i]);
                Kind::Constant(orthonormalize(&raw)?)
            }
            DistributionSpec::Registry { name, params } => match (name.as_str(), params.as_slice()) {
                ("rotating_line", [w]) if w.is_finite() => Kind::RotatingLine { w: *w },
                ("rotating_line", _) => return Err(Error::Invalid("rotating_line expects [w]".into())),
                (other, _) => return Err(Error::Invalid(format!("unknown distribution `{other}`"))),
            },
        };
        Ok(Self { spec, kind })
    }
}

impl From<Distribution> for DistributionSpec {
    fn from(d: Distribution) -> Self {
        d.spec
    }
}

fn orthonormalize(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut q = DMatrix::zeros(m.nrows(), m.ncols());
    for j in 0..m.ncols() {
        let mut v: DVector<f64> = m.column(j).into_owned();
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i).into_owned();
                v -= &qi * qi.dot(&v);
            }
        }
        let norm = v.norm();
        if norm <= 1e-12 * m.column(j).norm().max(1.0) {
            return Err(Error::Invalid("distribution frame is rank deficient".into()));
        }
        q.set_column(j, &(v / norm));
    }
    Ok(q)
}

impl Distribution {
    pub fn constant(frame: Vec<Vec<f64>>) -> Result<Self> {
        DistributionSpec::Constant { frame }.try_into()
    }

    /// The line field spanned by the first coordinate axis of `R^n`.
    pub fn horizontal(n: usize) -> Self {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        Self::constant(vec![e]).expect("valid frame")
    }

    pub fn registry(name: &str, params: Vec<f64>) -> Result<Self> {
        DistributionSpec::Registry { name: name.to_string(), params }.try_into()
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        match &self.kind {
            Kind::Constant(q) => q.ncols(),
            Kind::RotatingLine { .. } => 1,
        }
    }

    /// Target dimension `n`.
    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::Constant(q) => q.nrows(),
            Kind::RotatingLine { .. } => 2,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, Kind::Constant(_))
    }

    /// Lipschitz constant of the frame field.
    pub fn lipschitz(&self) -> f64 {
        match &self.kind {
            Kind::Constant(_) => 0.0,
            Kind::RotatingLine { w } => w.abs(),
        }
    }

    /// Orthonormal frame of the plane at `y`.
    pub fn frame_at(&self, y: &DVector<f64>) -> DMatrix<f64> {
        match &self.kind {
            Kind::Constant(q) => q.clone(),
            Kind::RotatingLine { w } => {
                let a = w * y[0];
                DMatrix::from_column_slice(2, 1, &[a.cos(), a.sin()])
            }
        }
    }

    /// Orthonormal frame of the orthogonal complement of the plane at `y`.
    pub fn complement_at(&self, y: &DVector<f64>) -> DMatrix<f64> {
        complement(&self.frame_at(y))
    }
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns of `q`.
pub(crate) fn complement(q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = q.nrows();
    let r = q.ncols();
    let mut out = DMatrix::zeros(n, n - r);
    let mut basis = q.clone();
    let mut k = 0;
    for e in 0..n {
        if k == n - r {
            break;
        }
        let mut v = DVector::zeros(n);
        v[e] = 1.0;
        for _ in 0..2 {
            for i in 0..basis.ncols() {
                let b = basis.column(i).into_owned();
                v -= &b * b.dot(&v);
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            let v = v / norm;
            out.set_column(k, &v);
            let last = basis.ncols();
            basis = basis.insert_column(last, 0.0);
            basis.set_column(last, &v);
            k += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_constant_and_registry() {
        let d: Distribution = serde_json::from_str(r#"{"kind":"constant","frame":[[2,0]]}"#).unwrap();
        assert_eq!(d.frame_at(&DVector::zeros(2)), DMatrix::from_column_slice(2, 1, &[1.0, 0.0]));
        let r: Distribution = serde_json::from_str(r#"{"kind":"registry","name":"rotating_line","params":[1]}"#).unwrap();
        assert_eq!(r.rank(), 1);
        assert!(serde_json::from_str::<Distribution>(r#"{"kind":"constant","frame":[[1,0],[2,0]]}"#).is_err());
        assert!(serde_json::from_str::<Distribution>(r#"{"kind":"registry","name":"x"}"#).is_err());
    }

    proptest! {
        #[test]
        fn frames_are_orthonormal(a in proptest::collection::vec(-3.0f64..3.0, 6), y in -5.0f64..5.0) {
            let frame = vec![a[0..3].to_vec(), a[3..6].to_vec()];
            if let Ok(d) = Distribution::constant(frame) {
                let q = d.frame_at(&DVector::zeros(3));
                prop_assert!((q.transpose() * &q - DMatrix::identity(2, 2)).amax() < 1e-9);
                let c = d.complement_at(&DVector::zeros(3));
                prop_assert!((q.transpose() * &c).amax() < 1e-9);
            }
            let r = Distribution::registry("rotating_line", vec![0.7]).unwrap();
            let q = r.frame_at(&DVector::from_vec(vec![y, 0.0]));
            prop_assert!((q.norm() - 1.0).abs() < 1e-9);
        }
    }
}
