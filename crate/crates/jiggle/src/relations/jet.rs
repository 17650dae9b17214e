use nalgebra::{DMatrix, DVector};

use crate::complex::shape::tangent_frame;
use crate::pl_maps::AffinePiece;
use crate::{Error, Result};

/// A first order jet of a map `R^m → R^n`: base point, value and slope.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    pub base: DVector<f64>,
    pub value: DVector<f64>,
    /// `n × m`.
    pub slope: DMatrix<f64>,
}

impl Jet1 {
    pub fn new(base: DVector<f64>, value: DVector<f64>, slope: DMatrix<f64>) -> Result<Self> {
        if slope.nrows() != value.len() || slope.ncols() != base.len() {
            return Err(Error::Invalid(format!(
                "slope is {}×{} for base dim {} and value dim {}",
                slope.nrows(),
                slope.ncols(),
                base.len(),
                value.len()
            )));
        }
        Ok(Self { base, value, slope })
    }

    pub fn domain_dim(&self) -> usize {
        self.base.len()
    }

    pub fn target_dim(&self) -> usize {
        self.value.len()
    }

    pub fn with_slope(&self, slope: DMatrix<f64>) -> Self {
        Self { base: self.base.clone(), value: self.value.clone(), slope }
    }

    /// Value at `x` of the affine map with this jet at its base.
    pub fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.value + &self.slope * (x - &self.base)
    }
}

/// Affine coordinates on the span of a simplex: the identity when the
/// simplex is full dimensional, otherwise `x ↦ Qᵀ (x − origin)` with `Q`
/// an orthonormal basis of the simplex directions.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    origin: DVector<f64>,
    /// `N × m`, or `None` for the identity.
    frame: Option<DMatrix<f64>>,
}

impl Chart {
    pub fn identity() -> Self {
        Self { origin: DVector::zeros(0), frame: None }
    }

    pub fn for_simplex(points: &[DVector<f64>]) -> Self {
        let n = points[0].len();
        if points.len() == n + 1 {
            return Self::identity();
        }
        Self { origin: points[0].clone(), frame: Some(tangent_frame(points)) }
    }

    pub fn is_identity(&self) -> bool {
        self.frame.is_none()
    }

    pub fn to_chart(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.frame {
            None => x.clone(),
            Some(q) => q.transpose() * (x - &self.origin),
        }
    }

    pub fn from_chart(&self, u: &DVector<f64>) -> DVector<f64> {
        match &self.frame {
            None => u.clone(),
            Some(q) => &self.origin + q * u,
        }
    }

    /// Chart slope of an ambient slope.
    pub fn pull_slope(&self, ambient: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.frame {
            None => ambient.clone(),
            Some(q) => ambient * q,
        }
    }

    /// Ambient slope, zero on the normal space, of a chart slope.
    pub fn push_slope(&self, chart: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.frame {
            None => chart.clone(),
            Some(q) => chart * q.transpose(),
        }
    }
}

/// The jet at `x` of an affine piece, in the chart.
pub fn jet_of_affine(piece: &AffinePiece, chart: &Chart, x: &DVector<f64>) -> Jet1 {
    Jet1 {
        base: chart.to_chart(x),
        value: piece.value_at(x),
        slope: chart.pull_slope(piece.slope()),
    }
}

/// The affine map on a simplex whose jet at `π(σ)` is `σ`.
pub fn linear_extension(sigma: &Jet1, chart: &Chart, points: &[DVector<f64>]) -> Result<AffinePiece> {
    let origin = chart.from_chart(&sigma.base);
    if origin.len() != points[0].len() {
        return Err(Error::Invalid("jet base does not match the simplex".into()));
    }
    AffinePiece::from_affine(points, &origin, &sigma.value, &chart.push_slope(&sigma.slope))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn extension_of_slope_two() {
        let j = Jet1::new(v(&[0.0]), v(&[0.0]), DMatrix::from_element(1, 1, 2.0)).unwrap();
        let a = linear_extension(&j, &Chart::identity(), &[v(&[0.0]), v(&[1.0])]).unwrap();
        assert_eq!(a.vertex_values(), &[v(&[0.0]), v(&[2.0])]);
        let back = jet_of_affine(&a, &Chart::identity(), &v(&[0.0]));
        assert_eq!(back, j);
    }

    #[test]
    fn embedded_edge_chart_round_trip() {
        let pts = [v(&[1.0, 1.0]), v(&[2.0, 2.0])];
        let chart = Chart::for_simplex(&pts);
        let j = Jet1::new(chart.to_chart(&pts[0]), v(&[3.0]), DMatrix::from_element(1, 1, 0.5)).unwrap();
        let a = linear_extension(&j, &chart, &pts).unwrap();
        let back = jet_of_affine(&a, &chart, &pts[0]);
        assert!((back.slope[(0, 0)] - 0.5).abs() < 1e-14);
        assert_eq!(back.value, j.value);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(Jet1::new(v(&[0.0]), v(&[0.0, 1.0]), DMatrix::zeros(1, 1)).is_err());
    }
}
