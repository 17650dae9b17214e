use serde::{Deserialize, Serialize};

use super::VertexId;
use crate::{Error, Result};

/// A simplex as a strictly increasing list of vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<VertexId>", into = "Vec<VertexId>")]
pub struct Simplex(Vec<VertexId>);

impl TryFrom<Vec<VertexId>> for Simplex {
    type Error = Error;

    fn try_from(v: Vec<VertexId>) -> Result<Self> {
        Simplex::new(v)
    }
}

impl From<Simplex> for Vec<VertexId> {
    fn from(s: Simplex) -> Self {
        s.0
    }
}

impl Simplex {
    /// Sorts the ids; fails on an empty list or a repeated id.
    pub fn new(mut vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Invalid("empty simplex".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("repeated vertex in simplex {vertices:?}")));
        }
        Ok(Self(vertices))
    }

    pub(crate) fn from_sorted(vertices: Vec<VertexId>) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Self(vertices)
    }

    pub fn vertex(v: VertexId) -> Self {
        Self(vec![v])
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// All non-empty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u32..(1u32 << n))
            .map(|mask| self.sub_face(mask))
            .collect()
    }

    /// Non-empty faces other than the simplex itself.
    pub fn proper_faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        (1u32..((1u32 << n) - 1))
            .map(|mask| self.sub_face(mask))
            .collect()
    }

    /// Face selected by a bit mask over local vertex positions.
    pub fn sub_face(&self, mask: u32) -> Simplex {
        Simplex(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &v)| v)
                .collect(),
        )
    }

    /// Codimension one faces; the `i`-th facet omits the `i`-th vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.0.len() < 2 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|i| {
                let mut v = self.0.clone();
                v.remove(i);
                Simplex(v)
            })
            .collect()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.contains_vertex(*v))
    }

    pub fn shares_vertex(&self, other: &Simplex) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Common vertices, `None` when disjoint.
    pub fn intersection(&self, other: &Simplex) -> Option<Simplex> {
        let v: Vec<_> = self
            .0
            .iter()
            .copied()
            .filter(|v| other.contains_vertex(*v))
            .collect();
        (!v.is_empty()).then_some(Simplex(v))
    }

    /// Join of two vertex-disjoint simplices.
    pub fn join(&self, other: &Simplex) -> Option<Simplex> {
        if self.shares_vertex(other) {
            return None;
        }
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Some(Simplex(v))
    }

    /// Vertices not in `face`, `None` if nothing remains.
    pub fn opposite(&self, face: &Simplex) -> Option<Simplex> {
        let v: Vec<_> = self
            .0
            .iter()
            .copied()
            .filter(|v| !face.contains_vertex(*v))
            .collect();
        (!v.is_empty()).then_some(Simplex(v))
    }

    /// Local positions of the vertices of `face` inside this simplex.
    pub fn local_indices(&self, face: &Simplex) -> Option<Vec<usize>> {
        face.0
            .iter()
            .map(|v| self.0.binary_search(v).ok())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn faces_of_triangle() {
        let s = Simplex::new(vec![2, 0, 1]).unwrap();
        assert_eq!(s.vertices(), &[0, 1, 2]);
        assert_eq!(s.faces().len(), 7);
        assert_eq!(s.proper_faces().len(), 6);
        assert_eq!(s.facets().len(), 3);
    }

    #[test]
    fn set_operations() {
        let a = Simplex::new(vec![0, 1, 2]).unwrap();
        let b = Simplex::new(vec![2, 3]).unwrap();
        assert!(a.shares_vertex(&b));
        assert_eq!(a.intersection(&b).unwrap().vertices(), &[2]);
        assert!(a.join(&b).is_none());
        let c = Simplex::new(vec![4]).unwrap();
        assert_eq!(a.join(&c).unwrap().vertices(), &[0, 1, 2, 4]);
        assert_eq!(a.opposite(&b).unwrap().vertices(), &[0, 1]);
        assert_eq!(a.local_indices(&Simplex::vertex(2)), Some(vec![2]));
    }

    #[test]
    fn serde_round_trip_sorts() {
        let s: Simplex = serde_json::from_str("[3,1,2]").unwrap();
        assert_eq!(s.vertices(), &[1, 2, 3]);
        assert!(serde_json::from_str::<Simplex>("[1,1]").is_err());
    }
}
