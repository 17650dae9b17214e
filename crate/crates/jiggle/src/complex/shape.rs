//! Shape functionals of embedded simplices.
//!
//! For a simplex with vertices `v_0, …, v_m` the edge matrix is
//! `E = [v_1 − v_0 | … | v_m − v_0]`. The frame `T = E` maps barycentric
//! coordinates `(λ_1, …, λ_m)` to `x − v_0`, and `T⁺` inverts it on the span.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Relative threshold on `sqrt(det EᵀE) / rmax^m` below which a simplex is
/// treated as degenerate.
pub const TAU_INDEP: f64 = 1e-9;

pub fn edge_matrix(points: &[DVector<f64>]) -> DMatrix<f64> {
    let n = points[0].len();
    let m = points.len() - 1;
    let mut e = DMatrix::zeros(n, m);
    for j in 0..m {
        e.set_column(j, &(&points[j + 1] - &points[0]));
    }
    e
}

/// Largest pairwise vertex distance; zero for a point.
pub fn rmax(points: &[DVector<f64>]) -> f64 {
    let mut r = 0.0_f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            r = r.max((&points[i] - &points[j]).norm());
        }
    }
    r
}

/// `m`-dimensional volume of the simplex.
pub fn volume(points: &[DVector<f64>]) -> f64 {
    let m = points.len() - 1;
    if m == 0 {
        return 1.0;
    }
    let e = edge_matrix(points);
    let g = e.transpose() * &e;
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    g.determinant().max(0.0).sqrt() / fact
}

/// True when the vertices fail the affine independence test.
pub fn is_degenerate(points: &[DVector<f64>]) -> bool {
    let m = points.len() - 1;
    if m == 0 {
        return false;
    }
    if m > points[0].len() {
        return true;
    }
    let r = rmax(points);
    if r == 0.0 {
        return true;
    }
    let e = edge_matrix(points) / r;
    let g = e.transpose() * &e;
    g.determinant().max(0.0).sqrt() < TAU_INDEP
}

fn ensure_proper(points: &[DVector<f64>]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::Invalid("shape functional of a point".into()));
    }
    if is_degenerate(points) {
        return Err(Error::Degenerate((0..points.len()).collect()));
    }
    Ok(())
}

/// Orthonormal basis (columns) of the linear span of the edge vectors.
pub fn tangent_frame(points: &[DVector<f64>]) -> DMatrix<f64> {
    let e = edge_matrix(points);
    let m = e.ncols();
    let q = e.qr().q();
    q.columns(0, m).into_owned()
}

/// Distance from `p` to the affine span of `face`.
fn distance_to_span(p: &DVector<f64>, face: &[&DVector<f64>]) -> f64 {
    let b = p - face[0];
    if face.len() == 1 {
        return b.norm();
    }
    let pts: Vec<DVector<f64>> = face.iter().map(|v| (*v).clone()).collect();
    let q = tangent_frame(&pts);
    (&b - &q * (q.transpose() * &b)).norm()
}

/// Smallest distance from a vertex to the affine span of its opposite face.
pub fn rmin(points: &[DVector<f64>]) -> Result<f64> {
    ensure_proper(points)?;
    let mut r = f64::INFINITY;
    for i in 0..points.len() {
        let face: Vec<&DVector<f64>> = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p)
            .collect();
        r = r.min(distance_to_span(&points[i], &face));
    }
    Ok(r)
}

/// Largest row norm of `E⁺`.
pub fn lambda(points: &[DVector<f64>]) -> Result<f64> {
    ensure_proper(points)?;
    let pinv = pseudo_inverse(&edge_matrix(points));
    Ok((0..pinv.nrows())
        .map(|i| pinv.row(i).norm())
        .fold(0.0, f64::max))
}

/// Moore-Penrose inverse of a matrix with full column rank.
pub fn pseudo_inverse(e: &DMatrix<f64>) -> DMatrix<f64> {
    let g = e.transpose() * e;
    match g.clone().cholesky() {
        Some(c) => c.inverse() * e.transpose(),
        None => e
            .clone()
            .pseudo_inverse(1e-300)
            .expect("svd pseudo inverse"),
    }
}

/// Largest singular value.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.nrows() == 1 || m.ncols() == 1 {
        return m.norm();
    }
    m.singular_values().max()
}

/// The affine frame of a simplex and its inverse on the span.
#[derive(Clone, Debug)]
pub struct SimplexFrame {
    pub origin: DVector<f64>,
    pub forward: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
}

impl SimplexFrame {
    /// Point with barycentric coordinates `(1 − Σλ, λ_1, …, λ_m)`.
    pub fn apply(&self, lambda: &DVector<f64>) -> DVector<f64> {
        &self.origin + &self.forward * lambda
    }

    /// Coordinates `(λ_1, …, λ_m)` of the projection of `x` onto the span.
    pub fn apply_inverse(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.inverse * (x - &self.origin)
    }

    /// Full barycentric coordinates `(λ_0, …, λ_m)` of the projection of `x`.
    pub fn barycentric(&self, x: &DVector<f64>) -> DVector<f64> {
        let l = self.apply_inverse(x);
        let mut out = DVector::zeros(l.len() + 1);
        out[0] = 1.0 - l.sum();
        out.rows_mut(1, l.len()).copy_from(&l);
        out
    }

    pub fn dim(&self) -> usize {
        self.forward.ncols()
    }
}

pub fn simplex_frame(points: &[DVector<f64>]) -> Result<SimplexFrame> {
    ensure_proper(points)?;
    let e = edge_matrix(points);
    let inverse = pseudo_inverse(&e);
    Ok(SimplexFrame {
        origin: points[0].clone(),
        forward: e,
        inverse,
    })
}

/// Barycentric coordinates of `x` together with its distance to the span.
pub fn locate(points: &[DVector<f64>], x: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let f = simplex_frame(points)?;
    let l = f.barycentric(x);
    let proj = f.apply(&l.rows(1, l.len() - 1).into_owned());
    Ok((l, (x - proj).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pts(v: &[&[f64]]) -> Vec<DVector<f64>> {
        v.iter().map(|p| DVector::from_column_slice(p)).collect()
    }

    #[test]
    fn standard_triangle() {
        let p = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_relative_eq!(rmax(&p), 2f64.sqrt());
        assert_relative_eq!(rmin(&p).unwrap(), 1.0 / 2f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(lambda(&p).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(volume(&p), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn thin_triangle_lambda() {
        // rows of E⁺ for E = [[1,1],[0,0.1]] are (1,-10) and (0,10)
        let p = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 0.1]]);
        assert_relative_eq!(lambda(&p).unwrap(), 101f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn degenerate_detection() {
        let p = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]]);
        assert!(is_degenerate(&p));
        assert!(matches!(rmin(&p), Err(Error::Degenerate(_))));
        let q = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 1e-12]]);
        assert!(is_degenerate(&q));
    }

    #[test]
    fn point_is_invalid() {
        let p = pts(&[&[0.0]]);
        assert!(rmin(&p).is_err());
        assert_eq!(rmax(&p), 0.0);
    }

    #[test]
    fn frame_round_trip() {
        let p = pts(&[&[1.0, 0.0, 0.0], &[1.0, 2.0, 0.0], &[0.0, 1.0, 3.0]]);
        let f = simplex_frame(&p).unwrap();
        let l = DVector::from_vec(vec![0.25, 0.5]);
        let x = f.apply(&l);
        assert_relative_eq!(f.apply_inverse(&x), l, epsilon = 1e-12);
        let (b, d) = locate(&p, &x).unwrap();
        assert_relative_eq!(b.sum(), 1.0, epsilon = 1e-12);
        assert!(d < 1e-12);
    }
}
