use std::collections::BTreeMap;

use nalgebra::DVector;

use super::crystalline::kuhn_children;
use super::key::BaryKey;
use crate::complex::shape::{locate, volume};
use crate::complex::{Simplex, SimplicialComplex};
use crate::{Error, Result};

/// Pieces of a face under a subdivision pattern.
///
/// A face for which `subdivided` holds is replaced by its level one
/// crystalline children. Otherwise, if some proper face is subdivided, the
/// face is coned from its barycenter over the pieces of its facets;
/// otherwise it is kept whole.
pub(crate) fn face_pieces(face: &[BaryKey], subdivided: &dyn Fn(&[BaryKey]) -> bool) -> Vec<Vec<BaryKey>> {
    if face.len() == 1 {
        return vec![face.to_vec()];
    }
    if subdivided(face) {
        return kuhn_children(face, 1);
    }
    let facets: Vec<Vec<Vec<BaryKey>>> = facets_of(face)
        .iter()
        .map(|f| face_pieces(f, subdivided))
        .collect();
    if facets.iter().all(|p| p.len() == 1) {
        return vec![face.to_vec()];
    }
    cone_over(face, facets)
}

/// Barycentric cone off of a cell: the join of its barycenter with the
/// pieces of its facets. The cell itself is always coned.
pub(crate) fn cone_cell(cell: &[BaryKey], subdivided: &dyn Fn(&[BaryKey]) -> bool) -> Vec<Vec<BaryKey>> {
    let facets = facets_of(cell)
        .iter()
        .map(|f| face_pieces(f, subdivided))
        .collect();
    cone_over(cell, facets)
}

fn facets_of(face: &[BaryKey]) -> Vec<Vec<BaryKey>> {
    (0..face.len())
        .map(|i| {
            let mut f = face.to_vec();
            f.remove(i);
            f
        })
        .collect()
}

fn cone_over(face: &[BaryKey], facet_pieces: Vec<Vec<Vec<BaryKey>>>) -> Vec<Vec<BaryKey>> {
    let b = BaryKey::barycenter(face);
    facet_pieces
        .into_iter()
        .flatten()
        .map(|mut p| {
            p.push(b.clone());
            p
        })
        .collect()
}

/// Cones a subdivision `boundary` of `∂Δ` from the barycenter of `Δ`.
///
/// The result keeps the vertex ids of `boundary` and appends the barycenter
/// as the last vertex. `boundary` must be a pure complex of dimension
/// `m − 1` whose top simplices tile the facets of `Δ`.
pub fn cone_off(delta: &[DVector<f64>], boundary: &SimplicialComplex) -> Result<SimplicialComplex> {
    let m = delta.len() - 1;
    if m == 0 {
        return Err(Error::Invalid("cannot cone off a point".into()));
    }
    if boundary.ambient_dim() != delta[0].len() {
        return Err(Error::Invalid("ambient dimensions differ".into()));
    }
    if boundary.dim() != Some(m - 1) || !boundary.is_pure() {
        return Err(Error::Invalid(format!(
            "boundary must be a pure complex of dimension {}",
            m - 1
        )));
    }
    let scale = delta
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0_f64, |a, x| a.max(x.abs()));
    let mut per_facet: BTreeMap<usize, f64> = BTreeMap::new();
    for s in boundary.top() {
        let mut facet = None;
        let pts = boundary.points(s);
        let bary: Vec<DVector<f64>> = pts
            .iter()
            .map(|x| {
                let (l, d) = locate(delta, x)?;
                if d > 1e-9 * scale || l.iter().any(|&v| v < -1e-9) {
                    return Err(Error::Invalid(format!(
                        "boundary simplex {:?} leaves the simplex",
                        s.vertices()
                    )));
                }
                Ok(l)
            })
            .collect::<Result<_>>()?;
        for i in 0..=m {
            if bary.iter().all(|l| l[i].abs() <= 1e-9) {
                facet = Some(i);
                break;
            }
        }
        let Some(i) = facet else {
            return Err(Error::Invalid(format!(
                "boundary simplex {:?} is not contained in a facet",
                s.vertices()
            )));
        };
        *per_facet.entry(i).or_default() += volume(&pts);
    }
    for i in 0..=m {
        let facet: Vec<DVector<f64>> = delta
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        let want = volume(&facet);
        let got = per_facet.get(&i).copied().unwrap_or(0.0);
        if (got - want).abs() > 1e-9 * want.max(1e-300) {
            return Err(Error::Invalid(format!(
                "boundary covers facet {i} with volume {got}, expected {want}"
            )));
        }
    }
    let mut coords = boundary.coords().to_vec();
    let b = delta.iter().fold(DVector::zeros(delta[0].len()), |a, p| a + p) / (m + 1) as f64;
    coords.push(b.as_slice().to_vec());
    let apex = coords.len() - 1;
    let tops = boundary
        .top()
        .iter()
        .map(|s| {
            let mut v = s.vertices().to_vec();
            v.push(apex);
            Simplex::from_sorted(v)
        })
        .collect();
    SimplicialComplex::new(boundary.ambient_dim(), coords, tops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::standard_simplex;

    fn keys(n: usize) -> Vec<BaryKey> {
        (0..n).map(BaryKey::vertex).collect()
    }

    #[test]
    fn edge_cone_is_bisection() {
        let p = cone_cell(&keys(2), &|_| false);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn triangle_cone_with_one_subdivided_edge() {
        let k = keys(3);
        let e01 = vec![k[0].clone(), k[1].clone()];
        let p = cone_cell(&k, &|f| f == e01.as_slice());
        // two halves of edge 01 plus the two whole edges
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn tetrahedron_cone_recurses_into_faces() {
        let k = keys(4);
        let e01 = vec![k[0].clone(), k[1].clone()];
        let p = cone_cell(&k, &|f| f == e01.as_slice());
        // facets 012 and 013 are coned into 4 each, the other two stay whole
        assert_eq!(p.len(), 10);
    }

    #[test]
    fn cone_off_geometric() {
        let delta = standard_simplex(2);
        let pts = delta.points(&delta.top()[0]);
        let boundary = SimplicialComplex::from_lists(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.0]],
            &[vec![0, 3], vec![3, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let c = cone_off(&pts, &boundary).unwrap();
        assert_eq!(c.top().len(), 4);
        assert_eq!(c.num_vertices(), 5);
        let total: f64 = c.top().iter().map(|s| volume(&c.points(s))).sum();
        assert!((total - 0.5).abs() < 1e-14);
    }

    #[test]
    fn cone_off_rejects_partial_boundary() {
        let delta = standard_simplex(2);
        let pts = delta.points(&delta.top()[0]);
        let boundary = SimplicialComplex::from_lists(
            2,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            &[vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        assert!(cone_off(&pts, &boundary).is_err());
    }

    #[test]
    fn cone_off_interval() {
        let pts = vec![DVector::from_vec(vec![0.0]), DVector::from_vec(vec![2.0])];
        let ends = SimplicialComplex::from_lists(1, vec![vec![0.0], vec![2.0]], &[vec![0], vec![1]]).unwrap();
        let c = cone_off(&pts, &ends).unwrap();
        assert_eq!(c.top().len(), 2);
        assert_eq!(c.vertex(2), &[1.0]);
    }
}
