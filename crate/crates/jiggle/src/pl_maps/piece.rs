use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::registry::SmoothFn;
use crate::complex::shape::{simplex_frame, SimplexFrame};
use crate::{Error, Result};

/// An affine map on a simplex, stored by its vertex values.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePiece {
    points: Vec<DVector<f64>>,
    values: Vec<DVector<f64>>,
    /// Ambient slope `n × N`, zero on the normal space of the simplex.
    slope: DMatrix<f64>,
}

impl AffinePiece {
    pub fn from_vertex_values(points: &[DVector<f64>], values: Vec<DVector<f64>>) -> Result<Self> {
        if points.len() != values.len() || values.is_empty() {
            return Err(Error::Invalid("one value per vertex is required".into()));
        }
        let n = values[0].len();
        if values.iter().any(|v| v.len() != n) {
            return Err(Error::Invalid("values have different dimensions".into()));
        }
        let slope = if points.len() == 1 {
            DMatrix::zeros(n, points[0].len())
        } else {
            let frame = simplex_frame(points)?;
            let mut d = DMatrix::zeros(n, points.len() - 1);
            for j in 1..points.len() {
                d.set_column(j - 1, &(&values[j] - &values[0]));
            }
            d * &frame.inverse
        };
        Ok(Self { points: points.to_vec(), values, slope })
    }

    /// Restriction of an affine map `x ↦ value0 + slope (x − origin)`.
    pub fn from_affine(points: &[DVector<f64>], origin: &DVector<f64>, value0: &DVector<f64>, slope: &DMatrix<f64>) -> Result<Self> {
        let values = points.iter().map(|x| value0 + slope * (x - origin)).collect();
        Self::from_vertex_values(points, values)
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn vertex_values(&self) -> &[DVector<f64>] {
        &self.values
    }

    pub fn slope(&self) -> &DMatrix<f64> {
        &self.slope
    }

    pub fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.values[0] + &self.slope * (x - &self.points[0])
    }

    /// Value at a point of the simplex; exact at the vertices.
    pub fn value_at(&self, x: &DVector<f64>) -> DVector<f64> {
        match self.points.iter().position(|p| p == x) {
            Some(i) => self.values[i].clone(),
            None => self.value(x),
        }
    }
}

/// `t · first + (1 − t) · second`, with `t = Σ_{i ∈ W} λ_i` the affine
/// function that is 1 on the vertices in `W` and 0 on the others.
#[derive(Clone, Debug)]
pub struct BlendPiece {
    points: Vec<DVector<f64>>,
    frame: SimplexFrame,
    weights: Vec<f64>,
    pub first: Piece,
    pub second: Piece,
}

impl BlendPiece {
    pub fn new(points: &[DVector<f64>], weights: Vec<f64>, first: Piece, second: Piece) -> Result<Self> {
        if weights.len() != points.len() || weights.iter().any(|w| *w != 0.0 && *w != 1.0) {
            return Err(Error::Invalid("blend weights must be 0 or 1 per vertex".into()));
        }
        Ok(Self { points: points.to_vec(), frame: simplex_frame(points)?, weights, first, second })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn t(&self, x: &DVector<f64>) -> f64 {
        let l = self.frame.barycentric(x);
        l.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    fn grad_t(&self) -> DVector<f64> {
        let w0 = self.weights[0];
        let rel = DVector::from_iterator(self.weights.len() - 1, self.weights[1..].iter().map(|w| w - w0));
        self.frame.inverse.transpose() * rel
    }
}

/// The restriction of a map to one top simplex.
#[derive(Clone, Debug)]
pub enum Piece {
    Affine(Arc<AffinePiece>),
    Smooth(Arc<SmoothFn>),
    Blend(Arc<BlendPiece>),
}

impl Piece {
    pub fn affine(p: AffinePiece) -> Self {
        Piece::Affine(Arc::new(p))
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, Piece::Affine(_))
    }

    pub fn as_affine(&self) -> Option<&AffinePiece> {
        match self {
            Piece::Affine(a) => Some(a),
            _ => None,
        }
    }

    pub fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Piece::Affine(a) => a.value(x),
            Piece::Smooth(f) => f.value(x),
            Piece::Blend(b) => {
                let t = b.t(x);
                b.first.value(x) * t + b.second.value(x) * (1.0 - t)
            }
        }
    }

    /// Ambient derivative `n × N`.
    pub fn derivative(&self, x: &DVector<f64>) -> DMatrix<f64> {
        match self {
            Piece::Affine(a) => a.slope.clone(),
            Piece::Smooth(f) => f.derivative(x),
            Piece::Blend(b) => {
                let t = b.t(x);
                let (f, g) = (b.first.value(x), b.second.value(x));
                b.first.derivative(x) * t + b.second.derivative(x) * (1.0 - t) + (f - g) * b.grad_t().transpose()
            }
        }
    }

    /// Value at `x`, exact at the vertices of the simplex the piece was
    /// built on: affine pieces return their stored vertex values and blends
    /// select their branch there.
    pub fn value_exact(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            Piece::Affine(a) => a.value_at(x),
            Piece::Smooth(f) => f.value(x),
            Piece::Blend(b) => match b.points.iter().position(|p| p == x) {
                Some(i) if b.weights[i] == 1.0 => b.first.value_exact(x),
                Some(_) => b.second.value_exact(x),
                None => self.value(x),
            },
        }
    }

    /// Same piece object, for sharing checks.
    pub fn ptr_eq(&self, other: &Piece) -> bool {
        match (self, other) {
            (Piece::Affine(a), Piece::Affine(b)) => Arc::ptr_eq(a, b),
            (Piece::Smooth(a), Piece::Smooth(b)) => Arc::ptr_eq(a, b),
            (Piece::Blend(a), Piece::Blend(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn affine_slope_from_values() {
        let pts = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let a = AffinePiece::from_vertex_values(&pts, vec![v(&[1.0]), v(&[3.0]), v(&[0.0])]).unwrap();
        assert_relative_eq!(a.slope().clone(), DMatrix::from_row_slice(1, 2, &[2.0, -1.0]), epsilon = 1e-14);
        assert_relative_eq!(a.value(&v(&[0.5, 0.5])), v(&[1.5]), epsilon = 1e-14);
    }

    #[test]
    fn affine_on_embedded_edge_ignores_normal_direction() {
        let pts = vec![v(&[0.0, 0.0]), v(&[1.0, 1.0])];
        let a = AffinePiece::from_vertex_values(&pts, vec![v(&[0.0]), v(&[2.0])]).unwrap();
        let normal = v(&[1.0, -1.0]);
        assert_relative_eq!((a.slope() * normal)[0], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn blend_derivative_matches_finite_differences() {
        let pts = vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let f = Piece::Smooth(Arc::new(SmoothFn::quadratic(1.0, 0.0)));
        let g = Piece::affine(AffinePiece::from_vertex_values(&pts, vec![v(&[0.0]), v(&[1.0]), v(&[1.0])]).unwrap());
        let b = Piece::Blend(Arc::new(BlendPiece::new(&pts, vec![0.0, 1.0, 0.0], f, g).unwrap()));
        let x = v(&[0.2, 0.3]);
        let d = b.derivative(&x);
        let h = 1e-6;
        for j in 0..2 {
            let mut xp = x.clone();
            xp[j] += h;
            let mut xm = x.clone();
            xm[j] -= h;
            let fd = (b.value(&xp) - b.value(&xm))[0] / (2.0 * h);
            assert_relative_eq!(d[(0, j)], fd, epsilon = 1e-7);
        }
        assert_eq!(b.value_exact(&pts[1]), v(&[1.0]));
    }
}
