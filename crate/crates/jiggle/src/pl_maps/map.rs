use std::sync::Arc;

use nalgebra::DVector;

use super::piece::{AffinePiece, Piece};
use super::registry::SmoothFn;
use crate::complex::shape::locate;
use crate::complex::{SimplicialComplex, VertexId};
use crate::subdivision::BaryKey;
use crate::{Error, Result};

/// Tolerance for continuity across shared faces and for point location.
pub const TAU_GEOM: f64 = 1e-9;

/// A continuous map `|K| → R^n` given by one piece per top simplex of `K`,
/// together with its value at every vertex.
///
/// The vertex table is the canonical value at each vertex; pieces agree with
/// it up to [`TAU_GEOM`].
#[derive(Clone, Debug)]
pub struct PiecewiseMap {
    complex: Arc<SimplicialComplex>,
    target_dim: usize,
    pieces: Vec<Piece>,
    values: Vec<DVector<f64>>,
}

impl PiecewiseMap {
    /// The PL map with the given vertex values.
    pub fn from_vertex_values(complex: Arc<SimplicialComplex>, values: Vec<DVector<f64>>) -> Result<Self> {
        if values.len() != complex.num_vertices() {
            return Err(Error::Invalid(format!(
                "{} values for {} vertices",
                values.len(),
                complex.num_vertices()
            )));
        }
        let n = values.first().map(|v| v.len()).unwrap_or(0);
        if values.iter().any(|v| v.len() != n || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::Invalid("vertex values must be finite and of equal length".into()));
        }
        let pieces = complex
            .top()
            .iter()
            .map(|s| {
                let vals = s.vertices().iter().map(|&v| values[v].clone()).collect();
                AffinePiece::from_vertex_values(&complex.points(s), vals).map(Piece::affine)
            })
            .collect::<Result<_>>()?;
        Ok(Self { complex, target_dim: n, pieces, values })
    }

    /// A smooth map restricted to `|K|`.
    pub fn from_smooth(complex: Arc<SimplicialComplex>, f: SmoothFn) -> Result<Self> {
        if !f.accepts(complex.ambient_dim()) {
            return Err(Error::Invalid(format!("{} does not accept dimension {}", f.name(), complex.ambient_dim())));
        }
        let n = f.target_dim(complex.ambient_dim());
        let values = (0..complex.num_vertices()).map(|v| f.value(&complex.point(v))).collect();
        let f = Arc::new(f);
        let pieces = vec![Piece::Smooth(f); complex.top().len()];
        Ok(Self { complex, target_dim: n, pieces, values })
    }

    /// A map from arbitrary pieces. Vertex values are read from the lowest
    /// index top simplex containing each vertex.
    pub fn from_pieces(complex: Arc<SimplicialComplex>, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.len() != complex.top().len() {
            return Err(Error::Invalid("one piece per top simplex is required".into()));
        }
        let mut values: Vec<Option<DVector<f64>>> = vec![None; complex.num_vertices()];
        for (s, p) in complex.top().iter().zip(&pieces) {
            for &v in s.vertices() {
                if values[v].is_none() {
                    values[v] = Some(p.value_exact(&complex.point(v)));
                }
            }
        }
        let n = values.iter().flatten().next().map(|v| v.len()).unwrap_or(0);
        let values = values
            .into_iter()
            .map(|v| v.unwrap_or_else(|| DVector::from_element(n, f64::NAN)))
            .collect();
        Self::from_parts(complex, pieces, values)
    }

    pub(crate) fn from_parts(complex: Arc<SimplicialComplex>, pieces: Vec<Piece>, values: Vec<DVector<f64>>) -> Result<Self> {
        let n = values.first().map(|v| v.len()).unwrap_or(0);
        let map = Self { complex, target_dim: n, pieces, values };
        for (t, s) in map.complex.top().iter().enumerate() {
            let x = map.complex.point(s.vertices()[0]);
            if map.pieces[t].value(&x).len() != n {
                return Err(Error::Invalid("pieces disagree on the target dimension".into()));
            }
        }
        Ok(map)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, t: usize) -> &Piece {
        &self.pieces[t]
    }

    pub fn vertex_values(&self) -> &[DVector<f64>] {
        &self.values
    }

    pub fn vertex_value(&self, v: VertexId) -> &DVector<f64> {
        &self.values[v]
    }

    /// Whether every piece is affine.
    pub fn is_pl(&self) -> bool {
        self.pieces.iter().all(Piece::is_affine)
    }

    /// The top simplex containing `x`, with its barycentric coordinates.
    pub fn locate(&self, x: &DVector<f64>) -> Option<(usize, DVector<f64>)> {
        let scale = self.complex.scale().max(1.0);
        let mut best: Option<(usize, DVector<f64>, f64)> = None;
        for (t, s) in self.complex.top().iter().enumerate() {
            let Ok((l, dist)) = locate(&self.complex.points(s), x) else { continue };
            let slack = l.iter().fold(0.0f64, |a, &b| a.max(-b)).max(dist / scale);
            if best.as_ref().is_none_or(|b| slack < b.2) {
                best = Some((t, l, slack));
            }
        }
        best.filter(|b| b.2 <= 1e-9).map(|b| (b.0, b.1))
    }

    /// Value at a point of `|K|`.
    pub fn eval(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let (t, _) = self
            .locate(x)
            .ok_or_else(|| Error::Invalid("point outside the domain".into()))?;
        Ok(self.pieces[t].value(x))
    }

    /// Lowest index top simplex containing all vertices of `support`.
    pub(crate) fn host(&self, vertex_to_top: &[Vec<usize>], support: &[VertexId]) -> Option<usize> {
        vertex_to_top[support[0]]
            .iter()
            .copied()
            .find(|&t| support.iter().all(|&v| self.complex.top()[t].contains_vertex(v)))
    }

    /// Canonical value at the point with barycentric key `key` over the
    /// vertices of this map's complex. Affine hosts interpolate the vertex
    /// table, so values of a PL map at subdivision vertices are exact
    /// convex combinations.
    pub(crate) fn value_at_key(&self, vertex_to_top: &[Vec<usize>], key: &BaryKey) -> DVector<f64> {
        if let Some(v) = key.is_vertex() {
            return self.values[v].clone();
        }
        let support: Vec<VertexId> = key.support().collect();
        let t = self.host(vertex_to_top, &support).expect("key inside a top simplex");
        match &self.pieces[t] {
            Piece::Affine(_) => {
                let den = key.den() as f64;
                let mut out = DVector::zeros(self.target_dim);
                for &(v, num) in key.terms() {
                    out += &self.values[v] * (num as f64 / den);
                }
                out
            }
            p => p.value(&DVector::from_vec(key.point(self.complex.coords()))),
        }
    }

    /// Largest disagreement between pieces and the vertex table at vertices
    /// and between neighbouring pieces at face barycenters.
    pub fn continuity_defect(&self) -> f64 {
        let k = &*self.complex;
        let v2t = k.vertex_to_top();
        let mut worst = 0.0f64;
        for (t, s) in k.top().iter().enumerate() {
            for &v in s.vertices() {
                let d = (self.pieces[t].value_exact(&k.point(v)) - &self.values[v]).norm();
                worst = worst.max(d);
            }
            if s.dim() == 0 {
                continue;
            }
            for face in s.proper_faces() {
                if face.dim() == 0 {
                    continue;
                }
                let host = self.host(&v2t, face.vertices()).expect("face of a top");
                if host == t {
                    continue;
                }
                let x = barycenter(&k.points(&face));
                let d = (self.pieces[t].value(&x) - self.pieces[host].value(&x)).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn check_continuity(&self) -> Result<()> {
        let d = self.continuity_defect();
        let scale = self.values.iter().map(|v| v.amax()).fold(1.0, f64::max);
        if d <= TAU_GEOM * scale {
            Ok(())
        } else {
            Err(Error::Invalid(format!("map is discontinuous across faces (defect {d:e})")))
        }
    }
}

pub(crate) fn barycenter(points: &[DVector<f64>]) -> DVector<f64> {
    let mut c = DVector::zeros(points[0].len());
    for p in points {
        c += p;
    }
    c / points.len() as f64
}
