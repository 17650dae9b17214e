use nalgebra::DVector;

use crate::complex::{Coloring, VertexId};
use crate::pl_maps::{AffinePiece, PiecewiseMap};
use crate::relations::{jet_of_affine, linear_extension, Chart, RelationOracle};
use crate::{Error, Result};

/// New values at the non-anchor vertices of one simplex, or `None` when the
/// jet at the anchor is already deep enough in the relation.
pub(crate) fn perturbed_values(
    points: &[DVector<f64>],
    vertices: &[VertexId],
    piece: &AffinePiece,
    chart: &Chart,
    rel: &dyn RelationOracle,
    eps: f64,
) -> Result<Option<Vec<(VertexId, DVector<f64>)>>> {
    let jet = jet_of_affine(piece, chart, &points[0]);
    let sigma = rel.fiber_perturb(&jet, eps)?;
    if sigma == jet {
        return Ok(None);
    }
    let ext = linear_extension(&sigma, chart, points)?;
    Ok(Some(
        vertices
            .iter()
            .zip(ext.vertex_values())
            .skip(1)
            .map(|(&v, y)| (v, y.clone()))
            .collect(),
    ))
}

fn require_pl(s: &PiecewiseMap) -> Result<()> {
    if !s.is_pl() {
        return Err(Error::Invalid("slope perturbation needs a piecewise linear map".into()));
    }
    Ok(())
}

fn perturb_into(
    s: &PiecewiseMap,
    t: usize,
    rel: &dyn RelationOracle,
    eps: f64,
    values: &mut [DVector<f64>],
) -> Result<()> {
    let k = s.complex();
    let simplex = &k.top()[t];
    let points = k.points(simplex);
    let piece = s.piece(t).as_affine().expect("piecewise linear");
    if let Some(updates) = perturbed_values(&points, simplex.vertices(), piece, &Chart::for_simplex(&points), rel, eps)? {
        for (v, y) in updates {
            values[v] = y;
        }
    }
    Ok(())
}

/// Moves the slope of the PL map `s` on top simplex `t` into the relation.
///
/// The jet at the minimal vertex is fiber perturbed by less than `eps`, its
/// linear extension replaces the values at the other vertices of the
/// simplex, and the neighbours in its star follow as joins, which for a PL
/// map means they interpolate the updated vertex values.
pub fn slope_perturb_simplex(s: &PiecewiseMap, t: usize, rel: &dyn RelationOracle, eps: f64) -> Result<PiecewiseMap> {
    require_pl(s)?;
    if t >= s.complex().top().len() {
        return Err(Error::Invalid(format!("no top simplex {t}")));
    }
    let mut values = s.vertex_values().to_vec();
    perturb_into(s, t, rel, eps, &mut values)?;
    PiecewiseMap::from_vertex_values(s.complex_arc().clone(), values)
}

/// [`slope_perturb_simplex`] on every simplex of one color class. The stars
/// of a class are disjoint, so the order does not matter.
pub fn slope_perturb_color(
    s: &PiecewiseMap,
    coloring: &Coloring,
    color: usize,
    rel: &dyn RelationOracle,
    eps: f64,
) -> Result<PiecewiseMap> {
    require_pl(s)?;
    if coloring.colors.len() != s.complex().top().len() {
        return Err(Error::Invalid("coloring does not match the complex".into()));
    }
    let mut values = s.vertex_values().to_vec();
    for t in coloring.class(color) {
        perturb_into(s, t, rel, eps, &mut values)?;
    }
    PiecewiseMap::from_vertex_values(s.complex_arc().clone(), values)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::complex::{greedy_color, interval};
    use crate::relations::{maxrank_relation, RelationOracle};

    fn zero_map(n: usize) -> PiecewiseMap {
        let k = Arc::new(interval(0.0, 1.0, n));
        let vals = vec![DVector::zeros(1); k.num_vertices()];
        PiecewiseMap::from_vertex_values(k, vals).unwrap()
    }

    #[test]
    fn single_edge_gets_slope() {
        let s = zero_map(1);
        let rel = maxrank_relation(1, 1);
        let out = slope_perturb_simplex(&s, 0, &rel, 0.1).unwrap();
        assert_eq!(out.vertex_value(0)[0], 0.0);
        let slope = out.piece(0).as_affine().unwrap().slope()[(0, 0)];
        assert!(slope.abs() < 0.1 && slope.abs() >= 0.1 / 16.0);
    }

    #[test]
    fn color_class_keeps_other_vertices() {
        let s = zero_map(6);
        let col = greedy_color(s.complex()).unwrap();
        let rel = maxrank_relation(1, 1);
        let out = slope_perturb_color(&s, &col, 0, &rel, 0.1).unwrap();
        for t in col.class(0) {
            let a = out.piece(t).as_affine().unwrap();
            assert!(rel.margin(&jet_of_affine(a, &Chart::identity(), &a.points()[0])) > 0.0);
        }
        let moved = (0..7).filter(|&v| out.vertex_value(v)[0] != 0.0).count();
        assert_eq!(moved, col.class(0).len());
    }
}
