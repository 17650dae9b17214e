use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::cone::cone_cell;
use super::crystalline::{assemble, check_subdividable, kuhn_children, parent_lineage};
use super::key::BaryKey;
use crate::complex::shape::rmax;
use crate::complex::{crystalline_color_bound, Region, SimplicialComplex};
use crate::{Error, Result};

/// How a top simplex of a generalized subdivision was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellKind {
    /// A simplex of the crystalline subdivision at this level.
    Crystalline { level: u32 },
    /// A piece of the cone off of a level `level` simplex.
    Coned { level: u32 },
}

impl CellKind {
    pub fn level(&self) -> u32 {
        match *self {
            CellKind::Crystalline { level } | CellKind::Coned { level } => level,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GeneralizedSubdivision {
    pub complex: SimplicialComplex,
    /// Aligned with the top simplices of `complex`.
    pub kinds: Vec<CellKind>,
    /// Smallest admissible starting level for the given `A` and `δ`.
    pub required_level: u32,
    /// Upper bound on the number of colors needed by the result.
    pub color_bound: usize,
}

#[derive(Clone)]
struct Cell {
    keys: Vec<BaryKey>,
    root: usize,
    kind: CellKind,
}

/// Largest `rmax` of the level `ℓ` children of each top simplex.
fn child_rmax(k: &SimplicialComplex, t: usize, level: u32) -> f64 {
    if level == 0 {
        return rmax(&k.points(&k.top()[t]));
    }
    // children at level ℓ ≥ 1 are the level one children scaled by 2^{1-ℓ}
    let keys: Vec<BaryKey> = k.top()[t].vertices().iter().map(|&v| BaryKey::vertex(v)).collect();
    let r1 = kuhn_children(&keys, 1)
        .iter()
        .map(|c| {
            let pts: Vec<_> = c
                .iter()
                .map(|key| nalgebra::DVector::from_vec(key.point(k.coords())))
                .collect();
            rmax(&pts)
        })
        .fold(0.0, f64::max);
    r1 * 0.5_f64.powi(level as i32 - 1)
}

/// Distance from a region to a simplex, estimated on a barycentric grid and
/// lowered by the grid spacing so that the estimate never exceeds the truth.
fn simplex_distance(k: &SimplicialComplex, t: usize, a: &Region) -> f64 {
    let s = &k.top()[t];
    let pts = k.points(s);
    let steps = 8usize;
    let mut best = f64::INFINITY;
    let m = s.dim();
    let mut idx = vec![0usize; m + 1];
    fn rec(pos: usize, left: usize, idx: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if pos + 1 == idx.len() {
            idx[pos] = left;
            f(idx);
            return;
        }
        for c in 0..=left {
            idx[pos] = c;
            rec(pos + 1, left - c, idx, f);
        }
    }
    rec(0, steps, &mut idx, &mut |w| {
        let mut x = nalgebra::DVector::zeros(pts[0].len());
        for (i, &c) in w.iter().enumerate() {
            x += &pts[i] * (c as f64 / steps as f64);
        }
        if let Some(d) = a.distance(x.as_slice()) {
            best = best.min(d);
        }
    });
    (best - rmax(&pts) / steps as f64).max(0.0)
}

/// Smallest `ℓ` such that every level `ℓ` child of a top simplex meeting
/// `B(A, δ)` has `rmax ≤ δ/4`.
pub fn required_level(k: &SimplicialComplex, a: &Region, delta: f64) -> Result<u32> {
    let s = delta / 4.0;
    let near: Vec<usize> = (0..k.top().len())
        .filter(|&t| simplex_distance(k, t, a) <= delta)
        .collect();
    for level in 0..=40u32 {
        if near.iter().all(|&t| child_rmax(k, t, level) <= s) {
            return Ok(level);
        }
    }
    Err(Error::LevelLimit(40))
}

/// Generalized subdivision of `K` around a set `A`.
///
/// Starting from `K_{ℓ0}`, step `i` keeps the level `ℓ0 + i` simplices inside
/// `B(A, s(1 + 1/2 + … + 2^{-i}))`, `s = δ/4`, together with everything
/// frozen earlier; cones off the simplices adjacent to them; and replaces all
/// other simplices by their level one children. After `ℓ1 − ℓ0` steps the
/// result agrees with `K_{ℓ1}` outside `B(A, δ)`.
pub fn generalized_subdivide(
    k: &SimplicialComplex,
    a: &Region,
    delta: f64,
    l0: u32,
    l1: u32,
) -> Result<GeneralizedSubdivision> {
    check_subdividable(k)?;
    if l1 < l0 {
        return Err(Error::Invalid(format!("l1 = {l1} is below l0 = {l0}")));
    }
    if !(delta > 0.0) {
        return Err(Error::Invalid("delta must be positive".into()));
    }
    if !a.has_distance() || !a.check_dim(k.ambient_dim()) {
        return Err(Error::Invalid("A must be a box or a ball of the ambient dimension".into()));
    }
    let required = required_level(k, a, delta)?;
    if l0 < required {
        return Err(Error::LevelTooLow { given: l0, required });
    }
    let m = k.dim().unwrap_or(0);
    let s = delta / 4.0;

    let mut cells: Vec<Cell> = Vec::new();
    for (t, simplex) in k.top().iter().enumerate() {
        let keys: Vec<BaryKey> = simplex.vertices().iter().map(|&v| BaryKey::vertex(v)).collect();
        for mut c in kuhn_children(&keys, l0) {
            c.sort_by(|x, y| x.order_cmp(y));
            cells.push(Cell { keys: c, root: t, kind: CellKind::Crystalline { level: l0 } });
        }
    }

    let mut point_cache: HashMap<BaryKey, Vec<f64>> = HashMap::new();
    let mut radius = 0.0;
    for i in 0..(l1 - l0) {
        radius += s * 0.5_f64.powi(i as i32);
        let ball = a.grown(radius);
        let current = l0 + i;
        let mut inside = |key: &BaryKey| -> bool {
            let p = point_cache
                .entry(key.clone())
                .or_insert_with(|| key.point(k.coords()));
            ball.contains(p)
        };
        let in_q: Vec<bool> = cells
            .iter()
            .map(|c| match c.kind {
                CellKind::Crystalline { level } if level == current => c.keys.iter().all(&mut inside),
                _ => true,
            })
            .collect();
        let q_vertices: HashSet<&BaryKey> = cells
            .iter()
            .zip(&in_q)
            .filter(|(_, &q)| q)
            .flat_map(|(c, _)| c.keys.iter())
            .collect();
        let is_ring: Vec<bool> = cells
            .iter()
            .zip(&in_q)
            .map(|(c, &q)| !q && c.keys.iter().any(|v| q_vertices.contains(v)))
            .collect();
        let mut outer_by_vertex: HashMap<&BaryKey, Vec<usize>> = HashMap::new();
        for (ci, c) in cells.iter().enumerate() {
            if !in_q[ci] && !is_ring[ci] {
                for v in &c.keys {
                    outer_by_vertex.entry(v).or_default().push(ci);
                }
            }
        }
        let in_outer = |face: &[BaryKey]| -> bool {
            outer_by_vertex.get(&face[0]).is_some_and(|list| {
                list.iter()
                    .any(|&ci| face.iter().all(|v| cells[ci].keys.contains(v)))
            })
        };
        let mut next = Vec::with_capacity(cells.len() * 2);
        for (ci, c) in cells.iter().enumerate() {
            if in_q[ci] {
                next.push(c.clone());
            } else if is_ring[ci] {
                for mut p in cone_cell(&c.keys, &in_outer) {
                    p.sort_by(|x, y| x.order_cmp(y));
                    next.push(Cell { keys: p, root: c.root, kind: CellKind::Coned { level: current } });
                }
            } else {
                for mut p in kuhn_children(&c.keys, 1) {
                    p.sort_by(|x, y| x.order_cmp(y));
                    next.push(Cell {
                        keys: p,
                        root: c.root,
                        kind: CellKind::Crystalline { level: current + 1 },
                    });
                }
            }
        }
        cells = next;
    }

    let key_lists: Vec<Vec<BaryKey>> = cells.iter().map(|c| c.keys.clone()).collect();
    let assembled = assemble(k, &key_lists, |ci| parent_lineage(k, cells[ci].root, cells[ci].kind.level()));
    let kinds: Vec<CellKind> = assembled.order.iter().map(|&ci| cells[ci].kind).collect();
    let complex = assembled.complex;

    let outer = a.grown(delta);
    let tol = 1e-12 * k.scale();
    for (t, kind) in kinds.iter().enumerate() {
        let fine = matches!(kind, CellKind::Crystalline { level } if *level == l1);
        if fine {
            continue;
        }
        for &v in complex.top()[t].vertices() {
            let x = complex.vertex(v);
            let d = outer.distance(x).unwrap_or(0.0);
            if d > tol {
                return Err(Error::Verification(format!(
                    "simplex {:?} differs from K_{l1} outside B(A, delta)",
                    complex.top()[t].vertices()
                )));
            }
        }
    }

    let near = (0..k.top().len())
        .filter(|&t| simplex_distance(k, t, a) <= delta)
        .count();
    let color_bound = crystalline_color_bound(m, near.max(1)) * max_cone_pieces(m);
    Ok(GeneralizedSubdivision {
        complex,
        kinds,
        required_level: required,
        color_bound,
    })
}

/// Number of pieces of the cone off of an `m`-simplex whose proper faces
/// are all subdivided, the largest over all patterns.
pub fn max_cone_pieces(m: usize) -> usize {
    if m == 0 {
        return 1;
    }
    let keys: Vec<BaryKey> = (0..=m).map(BaryKey::vertex).collect();
    cone_cell(&keys, &|f: &[BaryKey]| f.len() < keys.len()).len()
}
