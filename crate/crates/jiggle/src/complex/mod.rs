//! Embedded ordered simplicial complexes.
//!
//! Vertices are identified by `usize` ids and the vertex order used by every
//! ordered construction is the order of the ids. A [`Simplex`] is a strictly
//! increasing list of ids, so its first vertex is its minimal vertex.

mod coloring;
mod io;
mod region;
pub mod shape;
mod simplex;
mod topology;
mod validate;

pub use coloring::{crystalline_color_bound, greedy_color, interaction_graph, Coloring};
pub use io::ComplexJson;
pub use region::Region;
pub use simplex::Simplex;
pub use topology::{
    is_nice, is_nice_definitional, max_subcomplex_in, max_subcomplex_in_predicate, ring, star,
    Subcomplex,
};
pub use validate::{validate_complex, validate_simplices, ValidationReport};

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::subdivision::BaryKey;
use crate::{Error, Result};

pub type VertexId = usize;

/// Where a top simplex came from: its ancestor simplex in the root complex
/// and the number of crystalline halvings separating the two.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lineage {
    pub parent: Simplex,
    pub level: u32,
}

/// A finite simplicial complex embedded in `R^N`.
///
/// The simplex set is always closed under taking faces. Top simplices are the
/// simplices of maximal dimension, kept in lexicographic order.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    ambient_dim: usize,
    coords: Vec<Vec<f64>>,
    simplices: BTreeSet<Simplex>,
    top: Vec<Simplex>,
    maximal: Vec<Simplex>,
    lineage: Option<Vec<Lineage>>,
    keys: Option<Vec<BaryKey>>,
}

impl SimplicialComplex {
    /// Builds a complex from vertex coordinates and a list of simplices. The
    /// face closure of the list is taken.
    pub fn new(ambient_dim: usize, coords: Vec<Vec<f64>>, simplices: Vec<Simplex>) -> Result<Self> {
        Self::check_inputs(ambient_dim, &coords, &simplices)?;
        let mut set = BTreeSet::new();
        for s in &simplices {
            for f in s.faces() {
                set.insert(f);
            }
        }
        Ok(Self::from_closed_set(ambient_dim, coords, set))
    }

    /// Builds a complex from simplices given as raw vertex lists.
    pub fn from_lists(
        ambient_dim: usize,
        coords: Vec<Vec<f64>>,
        simplices: &[Vec<VertexId>],
    ) -> Result<Self> {
        let s = simplices
            .iter()
            .map(|v| Simplex::new(v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ambient_dim, coords, s)
    }

    fn check_inputs(ambient_dim: usize, coords: &[Vec<f64>], simplices: &[Simplex]) -> Result<()> {
        if ambient_dim == 0 {
            return Err(Error::Invalid("ambient dimension must be positive".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if c.len() != ambient_dim {
                return Err(Error::Invalid(format!(
                    "vertex {i} has {} coordinates, expected {ambient_dim}",
                    c.len()
                )));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invalid(format!("vertex {i} has a non-finite coordinate")));
            }
        }
        for s in simplices {
            if let Some(&v) = s.vertices().last() {
                if v >= coords.len() {
                    return Err(Error::Invalid(format!(
                        "simplex {:?} references unknown vertex {v}",
                        s.vertices()
                    )));
                }
            }
            if s.dim() > ambient_dim {
                return Err(Error::Degenerate(s.vertices().to_vec()));
            }
        }
        Ok(())
    }

    pub(crate) fn from_closed_set(
        ambient_dim: usize,
        coords: Vec<Vec<f64>>,
        simplices: BTreeSet<Simplex>,
    ) -> Self {
        let dim = simplices.iter().map(Simplex::dim).max();
        let top: Vec<Simplex> = match dim {
            Some(d) => simplices.iter().filter(|s| s.dim() == d).cloned().collect(),
            None => Vec::new(),
        };
        let maximal = maximal_simplices(&simplices);
        Self {
            ambient_dim,
            coords,
            simplices,
            top,
            maximal,
            lineage: None,
            keys: None,
        }
    }

    /// Builds a pure complex directly from its top simplices, which must be
    /// sorted and of equal dimension.
    pub(crate) fn from_top_sorted(
        ambient_dim: usize,
        coords: Vec<Vec<f64>>,
        top: Vec<Simplex>,
    ) -> Self {
        let mut set = BTreeSet::new();
        for s in &top {
            for f in s.faces() {
                set.insert(f);
            }
        }
        Self {
            ambient_dim,
            coords,
            simplices: set,
            maximal: top.clone(),
            top,
            lineage: None,
            keys: None,
        }
    }

    pub(crate) fn set_lineage(&mut self, lineage: Vec<Lineage>) {
        debug_assert_eq!(lineage.len(), self.top.len());
        self.lineage = Some(lineage);
    }

    pub(crate) fn set_keys(&mut self, keys: Vec<BaryKey>) {
        debug_assert_eq!(keys.len(), self.coords.len());
        self.keys = Some(keys);
    }

    /// The same combinatorics and lineage at new vertex positions. Vertex
    /// keys are dropped since they describe the old positions.
    pub(crate) fn with_coords(&self, coords: Vec<Vec<f64>>) -> Self {
        let mut out = self.clone();
        out.coords = coords;
        out.keys = None;
        out
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Dimension of the top simplices, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.top.first().map(Simplex::dim)
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn vertex(&self, v: VertexId) -> &[f64] {
        &self.coords[v]
    }

    pub fn point(&self, v: VertexId) -> DVector<f64> {
        DVector::from_column_slice(&self.coords[v])
    }

    pub fn points(&self, s: &Simplex) -> Vec<DVector<f64>> {
        s.vertices().iter().map(|&v| self.point(v)).collect()
    }

    pub fn simplices(&self) -> &BTreeSet<Simplex> {
        &self.simplices
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn top(&self) -> &[Simplex] {
        &self.top
    }

    /// Simplices that are not a proper face of another simplex.
    pub fn maximal(&self) -> &[Simplex] {
        &self.maximal
    }

    pub fn is_pure(&self) -> bool {
        self.maximal.len() == self.top.len()
    }

    pub fn lineage(&self) -> Option<&[Lineage]> {
        self.lineage.as_deref()
    }

    /// Exact barycentric keys of the vertices relative to the root complex,
    /// present on complexes produced by a subdivision.
    pub fn keys(&self) -> Option<&[BaryKey]> {
        self.keys.as_deref()
    }

    /// Level of each top simplex, zero when no lineage is recorded.
    pub fn level_of(&self, top_index: usize) -> u32 {
        self.lineage
            .as_ref()
            .map(|l| l[top_index].level)
            .unwrap_or(0)
    }

    /// Index of a top simplex in [`Self::top`].
    pub fn top_index(&self, s: &Simplex) -> Option<usize> {
        self.top.binary_search(s).ok()
    }

    /// For each vertex, the indices of the top simplices containing it.
    pub fn vertex_to_top(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.coords.len()];
        for (i, s) in self.top.iter().enumerate() {
            for &v in s.vertices() {
                out[v].push(i);
            }
        }
        out
    }

    /// Vertices that belong to at least one simplex.
    pub fn used_vertices(&self) -> BTreeSet<VertexId> {
        self.simplices
            .iter()
            .filter(|s| s.dim() == 0)
            .map(|s| s.vertices()[0])
            .collect()
    }

    /// Largest coordinate magnitude, used to scale absolute tolerances.
    pub fn scale(&self) -> f64 {
        self.coords
            .iter()
            .flat_map(|c| c.iter())
            .fold(1.0_f64, |m, x| m.max(x.abs()))
    }

    /// Counts of simplices per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for s in &self.simplices {
            *counts.entry(s.dim()).or_default() += 1;
        }
        let d = counts.keys().max().copied().map(|d| d + 1).unwrap_or(0);
        (0..d).map(|i| counts.get(&i).copied().unwrap_or(0)).collect()
    }
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.coords == other.coords
            && self.simplices == other.simplices
    }
}

fn maximal_simplices(set: &BTreeSet<Simplex>) -> Vec<Simplex> {
    let mut covered: BTreeSet<&Simplex> = BTreeSet::new();
    for s in set {
        if s.dim() == 0 {
            continue;
        }
        for f in s.facets() {
            if let Some(r) = set.get(&f) {
                covered.insert(r);
            }
        }
    }
    set.iter().filter(|s| !covered.contains(s)).cloned().collect()
}

/// Standard simplex `⟨0, e_1, …, e_m⟩` in `R^m`.
pub fn standard_simplex(m: usize) -> SimplicialComplex {
    let mut coords = vec![vec![0.0; m]];
    for i in 0..m {
        let mut p = vec![0.0; m];
        p[i] = 1.0;
        coords.push(p);
    }
    let s = Simplex::new((0..=m).collect()).expect("distinct vertices");
    SimplicialComplex::new(m, coords, vec![s]).expect("valid simplex")
}

/// Square grid on `[0, n] × [0, n]` scaled by `h`, each unit square split
/// along the diagonal from its lower left to its upper right corner.
pub fn square_grid(n: usize, h: f64) -> SimplicialComplex {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut coords = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            coords.push(vec![i as f64 * h, j as f64 * h]);
        }
    }
    let mut tops = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            tops.push(Simplex::new(vec![a, b, d]).expect("distinct"));
            tops.push(Simplex::new(vec![a, c, d]).expect("distinct"));
        }
    }
    SimplicialComplex::new(2, coords, tops).expect("valid grid")
}

/// Unit cube `[0,1]^3` split into the six Kuhn tetrahedra along the main
/// diagonal.
pub fn kuhn_cube() -> SimplicialComplex {
    let mut coords = Vec::with_capacity(8);
    for k in 0..8usize {
        coords.push(vec![(k & 1) as f64, ((k >> 1) & 1) as f64, ((k >> 2) & 1) as f64]);
    }
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let tops = perms
        .iter()
        .map(|p| {
            let mut v = vec![0usize];
            let mut cur = 0usize;
            for &axis in p {
                cur |= 1 << axis;
                v.push(cur);
            }
            Simplex::new(v).expect("distinct")
        })
        .collect();
    SimplicialComplex::new(3, coords, tops).expect("valid cube")
}

/// Uniform subdivision of `[a, b]` into `n` edges.
pub fn interval(a: f64, b: f64, n: usize) -> SimplicialComplex {
    let coords = (0..=n)
        .map(|i| vec![a + (b - a) * i as f64 / n as f64])
        .collect();
    let tops = (0..n)
        .map(|i| Simplex::new(vec![i, i + 1]).expect("distinct"))
        .collect();
    SimplicialComplex::new(1, coords, tops).expect("valid interval")
}
