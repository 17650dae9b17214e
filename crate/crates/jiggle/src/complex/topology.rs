use std::collections::BTreeSet;

use super::{Region, Simplex, SimplicialComplex, VertexId};
use crate::{Error, Result};

/// A set of simplices of a complex, usually closed under faces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subcomplex {
    simplices: BTreeSet<Simplex>,
    /// Set when membership was decided by sampling a predicate region.
    pub sampled: bool,
}

impl Subcomplex {
    pub fn new(simplices: BTreeSet<Simplex>) -> Self {
        Self { simplices, sampled: false }
    }

    /// Face closure of a set of simplices.
    pub fn closure<'a>(simplices: impl IntoIterator<Item = &'a Simplex>) -> Self {
        let mut set = BTreeSet::new();
        for s in simplices {
            for f in s.faces() {
                set.insert(f);
            }
        }
        Self::new(set)
    }

    pub fn simplices(&self) -> &BTreeSet<Simplex> {
        &self.simplices
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.simplices
            .iter()
            .flat_map(|s| s.vertices().iter().copied())
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        self.simplices
            .iter()
            .all(|s| s.facets().iter().all(|f| self.simplices.contains(f)))
    }

    /// Simplices that are not a proper face of another member.
    pub fn maximal(&self) -> Vec<Simplex> {
        let mut covered = BTreeSet::new();
        for s in &self.simplices {
            for f in s.proper_faces() {
                covered.insert(f);
            }
        }
        self.simplices
            .iter()
            .filter(|s| !covered.contains(*s))
            .cloned()
            .collect()
    }

    pub fn union(&self, other: &Subcomplex) -> Subcomplex {
        Subcomplex {
            simplices: self.simplices.union(&other.simplices).cloned().collect(),
            sampled: self.sampled || other.sampled,
        }
    }
}

impl FromIterator<Simplex> for Subcomplex {
    fn from_iter<T: IntoIterator<Item = Simplex>>(iter: T) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

fn check_members(k: &SimplicialComplex, q: &Subcomplex) -> Result<()> {
    match q.iter().find(|s| !k.contains(s)) {
        Some(s) => Err(Error::NotSubcomplex(s.vertices().to_vec())),
        None => Ok(()),
    }
}

/// Closure of the simplices of `k` that share a vertex with a simplex of `q`.
///
/// `q` need not be closed; only its vertex set matters.
pub fn star(k: &SimplicialComplex, q: &Subcomplex) -> Result<Subcomplex> {
    check_members(k, q)?;
    let verts = q.vertices();
    let touching = k
        .maximal()
        .iter()
        .filter(|s| s.vertices().iter().any(|v| verts.contains(v)));
    Ok(Subcomplex::closure(touching))
}

/// `Cl(star(k, q) \ q)`.
pub fn ring(k: &SimplicialComplex, q: &Subcomplex) -> Result<Subcomplex> {
    let st = star(k, q)?;
    let rest: Vec<&Simplex> = st.iter().filter(|s| !q.contains(s)).collect();
    Ok(Subcomplex::closure(rest))
}

/// Largest subcomplex of `k` whose simplices lie in the closed region `u`.
///
/// Regions are convex, so a simplex lies in `u` exactly when its vertices do.
pub fn max_subcomplex_in(k: &SimplicialComplex, u: &Region) -> Subcomplex {
    let inside: Vec<bool> = k.coords().iter().map(|c| u.contains(c)).collect();
    k.simplices()
        .iter()
        .filter(|s| s.vertices().iter().all(|&v| inside[v]))
        .cloned()
        .collect()
}

/// Largest subcomplex whose simplices satisfy a point predicate, tested at
/// the vertices and the barycenter. The result is flagged as sampled.
pub fn max_subcomplex_in_predicate(
    k: &SimplicialComplex,
    pred: &dyn Fn(&[f64]) -> bool,
) -> Subcomplex {
    let inside: Vec<bool> = k.coords().iter().map(|c| pred(c)).collect();
    let n = k.ambient_dim();
    let mut out: Subcomplex = k
        .simplices()
        .iter()
        .filter(|s| {
            if !s.vertices().iter().all(|&v| inside[v]) {
                return false;
            }
            let mut b = vec![0.0; n];
            for &v in s.vertices() {
                for (bi, ci) in b.iter_mut().zip(k.vertex(v)) {
                    *bi += ci / s.len() as f64;
                }
            }
            pred(&b)
        })
        .cloned()
        .collect();
    // a face whose coface passed can still have failed its own barycenter test
    let mut closed = out.clone();
    for s in out.iter() {
        for f in s.faces() {
            closed.simplices.insert(f);
        }
    }
    out = closed;
    out.sampled = true;
    out
}

/// Criterion form: the vertices of each simplex of `k` that lie in `k'`
/// span a simplex of `k'`.
pub fn is_nice(k: &SimplicialComplex, kp: &Subcomplex) -> Result<bool> {
    check_members(k, kp)?;
    let verts = kp.vertices();
    for s in k.simplices() {
        let inside: Vec<VertexId> = s
            .vertices()
            .iter()
            .copied()
            .filter(|v| verts.contains(v))
            .collect();
        if !inside.is_empty() && !kp.contains(&Simplex::from_sorted(inside)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Definitional form: the faces of each simplex of `k` that belong to `k'`
/// have a unique maximal element.
pub fn is_nice_definitional(k: &SimplicialComplex, kp: &Subcomplex) -> Result<bool> {
    check_members(k, kp)?;
    for s in k.simplices() {
        let faces: Vec<Simplex> = s.faces().into_iter().filter(|f| kp.contains(f)).collect();
        let maximal = faces
            .iter()
            .filter(|f| !faces.iter().any(|g| g != *f && f.is_face_of(g)))
            .count();
        if maximal > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{interval, square_grid, standard_simplex};

    fn sub(lists: &[&[usize]]) -> Subcomplex {
        lists
            .iter()
            .map(|v| Simplex::new(v.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn ring_of_isolated_triangle_is_its_boundary() {
        let k = standard_simplex(2);
        let q = sub(&[&[0, 1, 2]]);
        let r = ring(&k, &q).unwrap();
        assert_eq!(r.len(), 6);
        assert!(!r.contains(&Simplex::new(vec![0, 1, 2]).unwrap()));
    }

    #[test]
    fn star_of_vertex_in_path() {
        let k = interval(0.0, 4.0, 4);
        let q = sub(&[&[2]]);
        let st = star(&k, &q).unwrap();
        assert_eq!(st.maximal().len(), 2);
        let r = ring(&k, &q).unwrap();
        assert!(r.contains(&Simplex::new(vec![1, 2]).unwrap()));
        assert!(r.contains(&Simplex::vertex(1)));
    }

    #[test]
    fn star_rejects_foreign_simplex() {
        let k = interval(0.0, 1.0, 1);
        assert!(matches!(star(&k, &sub(&[&[0, 5]])), Err(Error::NotSubcomplex(_))));
    }

    #[test]
    fn ball_region_selects_single_vertex() {
        let k = square_grid(3, 1.0);
        let u = Region::Ball { center: vec![1.0, 1.0], radius: 0.3 };
        let s = max_subcomplex_in(&k, &u);
        assert_eq!(s.len(), 1);
        assert!(is_nice(&k, &s).unwrap());
    }

    #[test]
    fn half_space_on_interval() {
        // x ≤ 0.5 on [0,1] split at 0.5 gives the closed left edge
        let k = interval(0.0, 1.0, 2);
        let u = Region::HalfSpaces { normals: vec![vec![1.0]], offsets: vec![0.5] };
        let s = max_subcomplex_in(&k, &u);
        assert_eq!(s.len(), 3);
        assert!(is_nice(&k, &s).unwrap());
    }

    #[test]
    fn two_disjoint_vertices_of_a_triangle_are_not_nice() {
        let k = standard_simplex(2);
        let q = sub(&[&[0], &[1]]);
        assert!(!is_nice(&k, &q).unwrap());
        assert!(!is_nice_definitional(&k, &q).unwrap());
    }

    #[test]
    fn predicate_subcomplex_is_flagged() {
        let k = interval(0.0, 1.0, 4);
        let s = max_subcomplex_in_predicate(&k, &|x| x[0] <= 0.5);
        assert!(s.sampled);
        assert!(s.is_closed());
    }
}
