use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::map::PiecewiseMap;
use super::piece::Piece;
use crate::complex::shape::{op_norm, simplex_frame, tangent_frame, SimplexFrame};
use crate::complex::{Simplex, SimplicialComplex};
use crate::{Error, Result};

/// Default number of sample points per edge for smooth pieces.
pub const SAMPLES_PER_EDGE: usize = 5;

/// Barycentric coordinates of the grid with `k` steps per edge on an
/// `m`-simplex.
pub(crate) fn barycentric_grid(m: usize, k: usize) -> Vec<Vec<f64>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for i in 0..=left {
            cur.push(i);
            rec(left - i, parts - 1, cur, out);
            cur.pop();
        }
    }
    let k = k.max(1);
    let mut ints = Vec::new();
    rec(k, m + 1, &mut Vec::new(), &mut ints);
    ints.into_iter()
        .map(|c| c.into_iter().map(|i| i as f64 / k as f64).collect())
        .collect()
}

pub(crate) fn combine(points: &[DVector<f64>], lambda: &[f64]) -> DVector<f64> {
    let mut x = DVector::zeros(points[0].len());
    for (p, l) in points.iter().zip(lambda) {
        x += p * *l;
    }
    x
}

/// For each top simplex of `fine`, the index of a top simplex of `coarse`
/// containing it, or `None` if `fine` does not subdivide `coarse`.
fn containing_tops(fine: &SimplicialComplex, coarse: &SimplicialComplex) -> Option<Vec<usize>> {
    if fine.ambient_dim() != coarse.ambient_dim() || fine.dim() != coarse.dim() {
        return None;
    }
    let frames: Vec<SimplexFrame> = coarse
        .top()
        .iter()
        .map(|s| simplex_frame(&coarse.points(s)))
        .collect::<Result<_>>()
        .ok()?;
    let tol = 1e-9;
    let scale = coarse.scale().max(1.0);
    let inside = |tau: usize, pts: &[DVector<f64>]| {
        pts.iter().all(|x| {
            let f = &frames[tau];
            let l = f.barycentric(x);
            let back = f.apply(&l.rows(1, l.len() - 1).into_owned());
            l.iter().all(|&v| v >= -tol) && (back - x).norm() <= tol * scale
        })
    };
    let all: Vec<usize> = (0..coarse.top().len()).collect();
    let by_parent: Option<HashMap<&Simplex, Vec<usize>>> = match (fine.lineage(), coarse.lineage()) {
        (Some(_), Some(cl)) => {
            let mut m: HashMap<&Simplex, Vec<usize>> = HashMap::new();
            for (t, l) in cl.iter().enumerate() {
                m.entry(&l.parent).or_default().push(t);
            }
            Some(m)
        }
        _ => None,
    };
    let mut out = Vec::with_capacity(fine.top().len());
    for (t, s) in fine.top().iter().enumerate() {
        let pts = fine.points(s);
        let mut candidates: Vec<usize> = match (&by_parent, fine.lineage()) {
            (Some(m), Some(fl)) => m.get(&fl[t].parent).cloned().unwrap_or_default(),
            (None, Some(fl)) => coarse.top_index(&fl[t].parent).into_iter().collect(),
            _ => Vec::new(),
        };
        candidates.retain(|&c| inside(c, &pts));
        let found = match candidates.first() {
            Some(&c) => Some(c),
            None => all.iter().copied().find(|&c| inside(c, &pts)),
        };
        out.push(found?);
    }
    Some(out)
}

/// Common refinement of two complexes: the finer complex and, for each of
/// its top simplices, the hosting top simplex in each of the two.
fn common_cells<'a>(
    a: &'a SimplicialComplex,
    b: &'a SimplicialComplex,
) -> Result<(&'a SimplicialComplex, Vec<(usize, usize, usize)>)> {
    if std::ptr::eq(a, b) || a == b {
        return Ok((a, (0..a.top().len()).map(|t| (t, t, t)).collect()));
    }
    let (na, nb) = (a.top().len(), b.top().len());
    if na >= nb {
        if let Some(m) = containing_tops(a, b) {
            return Ok((a, m.into_iter().enumerate().map(|(t, c)| (t, t, c)).collect()));
        }
    }
    if let Some(m) = containing_tops(b, a) {
        return Ok((b, m.into_iter().enumerate().map(|(t, c)| (t, c, t)).collect()));
    }
    if na < nb {
        if let Some(m) = containing_tops(a, b) {
            return Ok((a, m.into_iter().enumerate().map(|(t, c)| (t, t, c)).collect()));
        }
    }
    Err(Error::Incomparable("neither complex subdivides the other".into()))
}

/// `(d_C⁰, d_C¹)` between two maps; see [`c0_c1_distance_sampled`].
pub fn c0_c1_distance(f: &PiecewiseMap, g: &PiecewiseMap) -> Result<(f64, f64)> {
    c0_c1_distance_sampled(f, g, SAMPLES_PER_EDGE)
}

/// `(d_C⁰, d_C¹)` between two maps on the same complex or on complexes one
/// of which subdivides the other.
///
/// Slopes are compared along the simplex: the C¹ term on a common simplex
/// `σ` is `‖(Df − Dg) Q‖` with `Q` an orthonormal basis of the directions
/// of `σ`. For two affine pieces both terms are exact (values at vertices);
/// otherwise they are maxima over a barycentric grid with
/// `samples_per_edge` points per edge.
pub fn c0_c1_distance_sampled(f: &PiecewiseMap, g: &PiecewiseMap, samples_per_edge: usize) -> Result<(f64, f64)> {
    if f.target_dim() != g.target_dim() {
        return Err(Error::Invalid("maps have different target dimensions".into()));
    }
    let (fine, cells) = common_cells(f.complex(), g.complex())?;
    let f_is_fine = std::ptr::eq(fine, f.complex());
    let mut c0 = 0.0f64;
    let mut c1 = 0.0f64;
    for (t, tf, tg) in cells {
        let s = &fine.top()[t];
        let pts = fine.points(s);
        let q = tangent_frame(&pts);
        let (pf, pg) = (f.piece(tf), g.piece(tg));
        let (a, b) = cell_distance(pf, pg, &pts, &q, samples_per_edge, |i| {
            let v = s.vertices()[i];
            if f_is_fine {
                (Some(f.vertex_value(v)), None)
            } else {
                (None, Some(g.vertex_value(v)))
            }
        });
        c0 = c0.max(a);
        c1 = c1.max(b);
    }
    Ok((c0, c1))
}

/// `(d_C⁰, d_C¹)` between two pieces over one simplex.
pub(crate) fn piece_distance(pf: &Piece, pg: &Piece, pts: &[DVector<f64>], q: &DMatrix<f64>, samples_per_edge: usize) -> (f64, f64) {
    cell_distance(pf, pg, pts, q, samples_per_edge, |_| (None, None))
}

fn cell_distance<'a>(
    pf: &Piece,
    pg: &Piece,
    pts: &[DVector<f64>],
    q: &DMatrix<f64>,
    samples_per_edge: usize,
    table: impl Fn(usize) -> (Option<&'a DVector<f64>>, Option<&'a DVector<f64>>),
) -> (f64, f64) {
    let m = pts.len() - 1;
    match (pf, pg) {
        (Piece::Affine(a), Piece::Affine(b)) => {
            let mut c0 = 0.0f64;
            for (i, x) in pts.iter().enumerate() {
                let (tf, tg) = table(i);
                let fv = tf.cloned().unwrap_or_else(|| a.value_at(x));
                let gv = tg.cloned().unwrap_or_else(|| b.value_at(x));
                c0 = c0.max((fv - gv).norm());
            }
            let c1 = if m == 0 { 0.0 } else { op_norm(&((a.slope() - b.slope()) * q)) };
            (c0, c1)
        }
        _ => {
            let mut c0 = 0.0f64;
            let mut c1 = 0.0f64;
            for l in barycentric_grid(m, samples_per_edge.saturating_sub(1)) {
                let x = combine(pts, &l);
                c0 = c0.max((pf.value(&x) - pg.value(&x)).norm());
                if m > 0 {
                    c1 = c1.max(op_norm(&((pf.derivative(&x) - pg.derivative(&x)) * q)));
                }
            }
            (c0, c1)
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::complex::{interval, square_grid};
    use crate::pl_maps::SmoothFn;
    use crate::subdivision::crystalline_subdivide;

    fn line(k: &Arc<SimplicialComplex>, a: f64, b: f64) -> PiecewiseMap {
        let vals = (0..k.num_vertices())
            .map(|v| DVector::from_element(1, a * k.vertex(v)[0] + b))
            .collect();
        PiecewiseMap::from_vertex_values(k.clone(), vals).unwrap()
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(barycentric_grid(1, 4).len(), 5);
        assert_eq!(barycentric_grid(2, 4).len(), 15);
    }

    #[test]
    fn identical_and_shifted() {
        let k = Arc::new(interval(0.0, 1.0, 1));
        let f = line(&k, 1.0, 0.0);
        assert_eq!(c0_c1_distance(&f, &f).unwrap(), (0.0, 0.0));
        let g = line(&k, 1.0, 0.3);
        let (c0, c1) = c0_c1_distance(&f, &g).unwrap();
        assert!((c0 - 0.3).abs() < 1e-15 && c1 < 1e-15);
    }

    #[test]
    fn parabola_against_chord() {
        let k = Arc::new(interval(0.0, 1.0, 1));
        let s = PiecewiseMap::from_smooth(k.clone(), SmoothFn::quadratic(1.0, 0.0)).unwrap();
        let chord = line(&k, 1.0, 0.0);
        let (c0, c1) = c0_c1_distance(&s, &chord).unwrap();
        assert!((c0 - 0.25).abs() < 1e-15);
        assert!((c1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn across_refinement() {
        let k = Arc::new(square_grid(1, 1.0));
        let fine = Arc::new(crystalline_subdivide(&k, 2).unwrap());
        let vals = |k: &SimplicialComplex| -> Vec<DVector<f64>> {
            (0..k.num_vertices())
                .map(|v| DVector::from_element(1, k.vertex(v)[0] + 2.0 * k.vertex(v)[1]))
                .collect()
        };
        let f = PiecewiseMap::from_vertex_values(k.clone(), vals(&k)).unwrap();
        let g = PiecewiseMap::from_vertex_values(fine.clone(), vals(&fine)).unwrap();
        let (c0, c1) = c0_c1_distance(&f, &g).unwrap();
        assert!(c0 < 1e-14 && c1 < 1e-14);
        let (c0, c1) = c0_c1_distance(&g, &f).unwrap();
        assert!(c0 < 1e-14 && c1 < 1e-14);
    }

    #[test]
    fn incomparable_rejected() {
        let a = Arc::new(interval(0.0, 1.0, 3));
        let b = Arc::new(interval(0.0, 1.0, 2));
        assert!(matches!(
            c0_c1_distance(&line(&a, 1.0, 0.0), &line(&b, 1.0, 0.0)),
            Err(Error::Incomparable(_))
        ));
    }
}
