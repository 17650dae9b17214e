use std::collections::BTreeSet;

use nalgebra::DVector;
use serde::Serialize;

use super::shape::{is_degenerate, locate};
use super::{Simplex, SimplicialComplex};

const TOL: f64 = 1e-9;

/// Problems found by [`validate_complex`]; an empty report means the
/// simplices form a geometric simplicial complex.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    /// Faces missing from the simplex set.
    pub missing_faces: Vec<Simplex>,
    /// Pairs of maximal simplices meeting outside their common face.
    pub bad_intersections: Vec<(Simplex, Simplex)>,
    pub degenerate: Vec<Simplex>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.missing_faces.is_empty() && self.bad_intersections.is_empty() && self.degenerate.is_empty()
    }
}

pub fn validate_complex(k: &SimplicialComplex) -> ValidationReport {
    let list: Vec<Simplex> = k.simplices().iter().cloned().collect();
    validate_simplices(k.coords(), &list)
}

/// Validates a raw simplex list without taking its closure.
pub fn validate_simplices(coords: &[Vec<f64>], simplices: &[Simplex]) -> ValidationReport {
    let set: BTreeSet<&Simplex> = simplices.iter().collect();
    let mut report = ValidationReport::default();
    for s in simplices {
        for f in s.facets() {
            if !set.contains(&f) {
                report.missing_faces.push(f);
            }
        }
    }
    report.missing_faces.sort();
    report.missing_faces.dedup();

    let pts = |s: &Simplex| -> Vec<DVector<f64>> {
        s.vertices()
            .iter()
            .map(|&v| DVector::from_column_slice(&coords[v]))
            .collect()
    };
    for s in simplices {
        if s.dim() > 0 && is_degenerate(&pts(s)) {
            report.degenerate.push(s.clone());
        }
    }

    let mut covered: BTreeSet<Simplex> = BTreeSet::new();
    for s in simplices {
        if s.dim() > 0 {
            covered.extend(s.facets());
        }
    }
    let maximal: Vec<&Simplex> = simplices.iter().filter(|s| !covered.contains(*s)).collect();
    let boxes: Vec<(Vec<f64>, Vec<f64>)> = maximal.iter().map(|s| bbox(&pts(s))).collect();
    let mut order: Vec<usize> = (0..maximal.len()).collect();
    order.sort_by(|&a, &b| boxes[a].0[0].total_cmp(&boxes[b].0[0]));
    for (oi, &i) in order.iter().enumerate() {
        for &j in &order[oi + 1..] {
            if boxes[j].0[0] > boxes[i].1[0] + TOL {
                break;
            }
            if !boxes_meet(&boxes[i], &boxes[j]) {
                continue;
            }
            if report.degenerate.contains(maximal[i]) || report.degenerate.contains(maximal[j]) {
                continue;
            }
            let (a, b) = (maximal[i], maximal[j]);
            if meets_improperly(a, &pts(a), b, &pts(b)) {
                let pair = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
                report.bad_intersections.push(pair);
            }
        }
    }
    report.bad_intersections.sort();
    report
}

fn bbox(p: &[DVector<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = p[0].len();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for x in p {
        for i in 0..n {
            lo[i] = lo[i].min(x[i]);
            hi[i] = hi[i].max(x[i]);
        }
    }
    (lo, hi)
}

fn boxes_meet(a: &(Vec<f64>, Vec<f64>), b: &(Vec<f64>, Vec<f64>)) -> bool {
    (0..a.0.len()).all(|i| a.0[i] <= b.1[i] + TOL && b.0[i] <= a.1[i] + TOL)
}

fn in_simplex(x: &DVector<f64>, pts: &[DVector<f64>], scale: f64) -> bool {
    if pts.len() == 1 {
        return (x - &pts[0]).norm() <= TOL * scale;
    }
    match locate(pts, x) {
        Ok((l, d)) => d <= TOL * scale && l.iter().all(|&v| v >= -TOL),
        Err(_) => false,
    }
}

/// Sample points of a simplex on a barycentric grid, each with the set of
/// local vertices carrying positive weight.
fn samples(pts: &[DVector<f64>], k: usize) -> Vec<(DVector<f64>, u32)> {
    let m = pts.len() - 1;
    let mut out = Vec::new();
    let mut idx = vec![0usize; m + 1];
    fn rec(
        pos: usize,
        left: usize,
        idx: &mut Vec<usize>,
        pts: &[DVector<f64>],
        k: usize,
        out: &mut Vec<(DVector<f64>, u32)>,
    ) {
        if pos + 1 == idx.len() {
            idx[pos] = left;
            let mut x = DVector::zeros(pts[0].len());
            let mut mask = 0u32;
            for (i, &c) in idx.iter().enumerate() {
                if c > 0 {
                    mask |= 1 << i;
                    x += &pts[i] * (c as f64 / k as f64);
                }
            }
            out.push((x, mask));
            return;
        }
        for c in 0..=left {
            idx[pos] = c;
            rec(pos + 1, left - c, idx, pts, k, out);
        }
    }
    rec(0, k, &mut idx, pts, k, &mut out);
    out
}

fn meets_improperly(a: &Simplex, pa: &[DVector<f64>], b: &Simplex, pb: &[DVector<f64>]) -> bool {
    let scale = pa
        .iter()
        .chain(pb)
        .flat_map(|p| p.iter())
        .fold(1.0_f64, |m, x| m.max(x.abs()));
    let shared_mask = |s: &Simplex, other: &Simplex| -> u32 {
        s.vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| other.contains_vertex(**v))
            .fold(0, |m, (i, _)| m | (1 << i))
    };
    for (s, ps, t, pt) in [(a, pa, b, pb), (b, pb, a, pa)] {
        let shared = shared_mask(s, t);
        for (x, mask) in samples(ps, 4) {
            if mask & !shared != 0 && in_simplex(&x, pt, scale) {
                return true;
            }
        }
    }
    let n = pa[0].len();
    if pa.len() == n + 1 && pb.len() == n + 1 && (2..=3).contains(&n) {
        return interiors_overlap(pa, pb, scale);
    }
    false
}

/// Separating axis test for two full-dimensional simplices in `R^2` or `R^3`.
fn interiors_overlap(pa: &[DVector<f64>], pb: &[DVector<f64>], scale: f64) -> bool {
    let n = pa[0].len();
    let mut axes: Vec<DVector<f64>> = Vec::new();
    let edges = |p: &[DVector<f64>]| -> Vec<DVector<f64>> {
        let mut e = Vec::new();
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                e.push(&p[j] - &p[i]);
            }
        }
        e
    };
    let (ea, eb) = (edges(pa), edges(pb));
    if n == 2 {
        for e in ea.iter().chain(&eb) {
            axes.push(DVector::from_vec(vec![-e[1], e[0]]));
        }
    } else {
        let cross = |u: &DVector<f64>, v: &DVector<f64>| {
            DVector::from_vec(vec![
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ])
        };
        for e in [&ea, &eb] {
            for i in 0..e.len() {
                for j in i + 1..e.len() {
                    axes.push(cross(&e[i], &e[j]));
                }
            }
        }
        for u in &ea {
            for v in &eb {
                axes.push(cross(u, v));
            }
        }
    }
    for ax in axes {
        let norm = ax.norm();
        if norm <= TOL * scale * scale {
            continue;
        }
        let ax = ax / norm;
        let proj = |p: &[DVector<f64>]| {
            p.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                let d = ax.dot(x);
                (lo.min(d), hi.max(d))
            })
        };
        let (a, b) = (proj(pa), proj(pb));
        if a.1 <= b.0 + TOL * scale || b.1 <= a.0 + TOL * scale {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{kuhn_cube, square_grid};

    #[test]
    fn grids_are_valid() {
        assert!(validate_complex(&square_grid(3, 1.0)).is_valid());
        assert!(validate_complex(&kuhn_cube()).is_valid());
    }

    #[test]
    fn overlapping_triangles_reported() {
        let coords = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.2, 0.2],
            vec![1.2, 0.2],
            vec![0.2, 1.2],
        ];
        let k = SimplicialComplex::from_lists(2, coords, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let r = validate_complex(&k);
        assert_eq!(r.bad_intersections.len(), 1);
    }

    #[test]
    fn t_junction_reported() {
        let coords = vec![
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, -1.0],
        ];
        let k = SimplicialComplex::from_lists(2, coords, &[vec![0, 1, 2], vec![0, 3, 4]]).unwrap();
        assert!(!validate_complex(&k).is_valid());
    }

    #[test]
    fn crossing_triangles_without_vertex_containment() {
        // star of David: no vertex of one lies in the other
        let s3 = 3f64.sqrt() / 2.0;
        let coords = vec![
            vec![0.0, 1.0],
            vec![-s3, -0.5],
            vec![s3, -0.5],
            vec![0.0, -1.0],
            vec![s3, 0.5],
            vec![-s3, 0.5],
        ];
        let k = SimplicialComplex::from_lists(2, coords, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert!(!validate_complex(&k).is_valid());
    }

    #[test]
    fn missing_faces_and_degenerate() {
        let coords = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        let raw = vec![Simplex::new(vec![0, 1, 2]).unwrap()];
        let r = validate_simplices(&coords, &raw);
        assert_eq!(r.missing_faces.len(), 3);
        assert_eq!(r.degenerate.len(), 1);
    }
}
