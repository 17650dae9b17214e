use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};

use super::cone::cone_cell;
use super::crystalline::{check_subdividable, kuhn_children};
use super::key::{gcd, BaryKey};
use crate::complex::shape::tangent_frame;
use crate::complex::{Simplex, SimplicialComplex};
use crate::Result;

/// Exact shape of a simplex inside a root simplex: its vertices as
/// barycentric difference vectors from the lexicographically smallest
/// vertex, scaled by `2^level` and sorted.
pub type ShapeKey = Vec<Vec<(i128, i128)>>;

#[derive(Clone, Debug)]
pub struct ModelSimplex {
    /// Index of the root simplex in the root complex's top list.
    pub root: usize,
    /// Whether the shape comes from a cone off.
    pub coned: bool,
    /// Vertex positions normalized to level zero, first vertex at the origin.
    pub vertices: Vec<DVector<f64>>,
}

/// Shapes, up to translation and scaling by powers of two, of the simplices
/// that crystalline and generalized subdivisions of a complex can produce
/// inside each root simplex.
#[derive(Clone, Debug)]
pub struct ModelCatalog {
    /// Level whose children are taken as the crystalline models.
    pub level: u32,
    roots: Vec<Simplex>,
    models: Vec<ModelSimplex>,
    index: HashMap<(usize, ShapeKey), usize>,
}

/// Level at which every crystalline shape of an `m`-simplex has appeared:
/// `max(1, ⌈log₂ m⌉)`.
pub fn catalog_level(m: usize) -> u32 {
    let mut l = 0;
    while (1usize << l) < m {
        l += 1;
    }
    l.max(1)
}

fn as_vector(root: &Simplex, key: &BaryKey) -> Option<(Vec<i128>, i128)> {
    if key.support().any(|v| !root.contains_vertex(v)) {
        return None;
    }
    let nums = root
        .vertices()
        .iter()
        .map(|&u| {
            key.terms()
                .iter()
                .find(|t| t.0 == u)
                .map(|t| t.1)
                .unwrap_or(0)
        })
        .collect();
    Some((nums, key.den()))
}

fn lex_cmp(a: &(Vec<i128>, i128), b: &(Vec<i128>, i128)) -> std::cmp::Ordering {
    for (x, y) in a.0.iter().zip(&b.0) {
        let o = (x * b.1).cmp(&(y * a.1));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Exact shape key of a simplex given by root keys, or `None` if a vertex
/// leaves the root simplex.
pub fn shape_key(root: &Simplex, keys: &[BaryKey], level: u32) -> Option<ShapeKey> {
    let vecs: Vec<(Vec<i128>, i128)> = keys
        .iter()
        .map(|k| as_vector(root, k))
        .collect::<Option<_>>()?;
    let min = vecs.iter().min_by(|a, b| lex_cmp(a, b))?.clone();
    let scale: i128 = 1 << level;
    let mut out: ShapeKey = vecs
        .iter()
        .map(|(nums, den)| {
            nums.iter()
                .zip(&min.0)
                .map(|(a, b)| {
                    let num = (a * min.1 - b * den) * scale;
                    let d = den * min.1;
                    let g = gcd(num, d).max(1);
                    (num / g, d / g)
                })
                .collect()
        })
        .collect();
    out.sort();
    Some(out)
}

/// Downward closed sets of faces of an `m`-simplex, as local vertex masks
/// of faces of dimension `1 … m−1`. All sets for `m ≤ 3`, those generated
/// by facets for larger `m`.
fn face_patterns(m: usize) -> Vec<BTreeSet<u32>> {
    let full: u32 = (1 << (m + 1)) - 1;
    let generators: Vec<u32> = (1..full)
        .filter(|mask| {
            let c = mask.count_ones() as usize;
            if m <= 3 {
                c >= 2
            } else {
                c == m
            }
        })
        .collect();
    let mut out: BTreeSet<BTreeSet<u32>> = BTreeSet::new();
    for choice in 0u64..(1u64 << generators.len()) {
        let mut set = BTreeSet::new();
        for (i, &g) in generators.iter().enumerate() {
            if choice & (1 << i) != 0 {
                let mut sub = g;
                loop {
                    if sub.count_ones() >= 2 {
                        set.insert(sub);
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & g;
                }
            }
        }
        out.insert(set);
    }
    out.into_iter().collect()
}

impl ModelCatalog {
    pub fn build(k: &SimplicialComplex) -> Result<Self> {
        check_subdividable(k)?;
        let m = k.dim().unwrap_or(0);
        let level = catalog_level(m);
        let patterns = face_patterns(m);
        let mut cat = ModelCatalog {
            level,
            roots: k.top().to_vec(),
            models: Vec::new(),
            index: HashMap::new(),
        };
        for (r, root) in k.top().iter().enumerate() {
            let keys: Vec<BaryKey> = root.vertices().iter().map(|&v| BaryKey::vertex(v)).collect();
            let mut representatives = Vec::new();
            for mut child in kuhn_children(&keys, level) {
                child.sort_by(|a, b| a.order_cmp(b));
                if cat.insert(k, r, &child, level, false) {
                    representatives.push(child);
                }
            }
            for child in &representatives {
                for pattern in &patterns {
                    let sub = |face: &[BaryKey]| -> bool {
                        let mask = face
                            .iter()
                            .map(|f| child.iter().position(|c| c == f).expect("face of cell"))
                            .fold(0u32, |m, i| m | (1 << i));
                        pattern.contains(&mask)
                    };
                    for piece in cone_cell(child, &sub) {
                        cat.insert(k, r, &piece, level, true);
                    }
                }
            }
        }
        Ok(cat)
    }

    fn insert(&mut self, k: &SimplicialComplex, r: usize, keys: &[BaryKey], level: u32, coned: bool) -> bool {
        let root = &self.roots[r];
        let shape = shape_key(root, keys, level).expect("child inside its root");
        if self.index.contains_key(&(r, shape.clone())) {
            return false;
        }
        let mut pts: Vec<DVector<f64>> = keys
            .iter()
            .map(|key| DVector::from_vec(key.point(k.coords())))
            .collect();
        let scale = (1u64 << level) as f64;
        let origin = pts[0].clone();
        for p in &mut pts {
            *p = (&*p - &origin) * scale;
        }
        self.index.insert((r, shape), self.models.len());
        self.models.push(ModelSimplex { root: r, coned, vertices: pts });
        true
    }

    pub fn models(&self) -> &[ModelSimplex] {
        &self.models
    }

    pub fn models_for_root(&self, r: usize) -> impl Iterator<Item = &ModelSimplex> {
        self.models.iter().filter(move |m| m.root == r)
    }

    pub fn roots(&self) -> &[Simplex] {
        &self.roots
    }

    /// Model index of a top simplex of a subdivision of the root complex,
    /// using its lineage for the root and level.
    pub fn match_simplex(&self, complex: &SimplicialComplex, top_index: usize) -> Option<usize> {
        let lineage = &complex.lineage()?[top_index];
        let keys = complex.keys()?;
        let r = self.roots.binary_search(&lineage.parent).ok()?;
        let ks: Vec<BaryKey> = complex.top()[top_index]
            .vertices()
            .iter()
            .map(|&v| keys[v].clone())
            .collect();
        let shape = shape_key(&self.roots[r], &ks, lineage.level)?;
        self.index.get(&(r, shape)).copied()
    }

    /// Distinct direction spaces of the faces of dimension `1 … m−1` of the
    /// models of a root simplex, as orthonormal column bases.
    pub fn face_directions(&self, r: usize) -> Vec<DMatrix<f64>> {
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut out = Vec::new();
        for model in self.models_for_root(r) {
            let n = model.vertices.len();
            for mask in 1u32..((1 << n) - 1) {
                if mask.count_ones() < 2 {
                    continue;
                }
                let pts: Vec<DVector<f64>> = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| model.vertices[i].clone())
                    .collect();
                let q = tangent_frame(&pts);
                let p = &q * q.transpose();
                let key: Vec<i64> = p.iter().map(|x| (x * 1e8).round() as i64).collect();
                if seen.insert(key) {
                    out.push(q);
                }
            }
        }
        out
    }
}

/// Model catalog of a complex; see [`ModelCatalog`].
pub fn model_simplices(k: &SimplicialComplex) -> Result<ModelCatalog> {
    ModelCatalog::build(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::standard_simplex;
    use crate::subdivision::crystalline_subdivide;

    #[test]
    fn catalog_levels() {
        assert_eq!(catalog_level(1), 1);
        assert_eq!(catalog_level(2), 1);
        assert_eq!(catalog_level(3), 2);
        assert_eq!(catalog_level(4), 2);
        assert_eq!(catalog_level(5), 3);
    }

    #[test]
    fn pattern_counts() {
        // edge: no proper faces of positive dimension
        assert_eq!(face_patterns(1).len(), 1);
        // triangle: any subset of the three edges
        assert_eq!(face_patterns(2).len(), 8);
    }

    #[test]
    fn interval_models() {
        let cat = model_simplices(&crate::complex::interval(0.0, 1.0, 1)).unwrap();
        // the half edge as a child, and the cone piece of a half edge
        assert_eq!(cat.models().len(), 2);
        assert_eq!(cat.models().iter().filter(|m| m.coned).count(), 1);
    }

    #[test]
    fn crystalline_children_match() {
        for m in 1..=3 {
            let k = standard_simplex(m);
            let cat = model_simplices(&k).unwrap();
            for l in 1..=3 {
                let kl = crystalline_subdivide(&k, l).unwrap();
                for t in 0..kl.top().len() {
                    assert!(cat.match_simplex(&kl, t).is_some(), "m={m} l={l} t={t}");
                }
            }
        }
    }
}
