use nalgebra::DMatrix;
use serde::Serialize;

use super::builtin::VeryGenPos;
use super::distribution::Distribution;
use super::jet::{Chart, Jet1};
use super::oracle::floor;
use crate::complex::shape::tangent_frame;
use crate::complex::Simplex;
use crate::pl_maps::{barycentric_grid, barycenter, combine, Piece, PiecewiseMap};

#[derive(Clone, Debug, Serialize)]
pub struct FaceMargin {
    pub simplex: Simplex,
    pub face: Simplex,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneralPositionReport {
    /// One entry per top simplex and face of dimension `1 … m−1`.
    pub faces: Vec<FaceMargin>,
    /// Per top simplex: smallest transversality margin of the map to `ξ`.
    pub transversality: Vec<f64>,
    pub min_margin: f64,
    /// Whether `ξ` or the map varies over a simplex, so that margins are
    /// minima over sample points rather than exact.
    pub sampled: bool,
    pub in_general_position: bool,
}

/// Checks that every face of every top simplex of the domain is transverse
/// to the foliation by the pulled back planes `(f ∘ T)^* ξ_x`, at the
/// barycenter when `ξ` is constant and `f` affine on the simplex, and on a
/// barycentric grid with `samples_per_edge` points per edge otherwise.
pub fn verify_general_position(f: &PiecewiseMap, xi: &Distribution, samples_per_edge: usize) -> GeneralPositionReport {
    let k = f.complex();
    let mut faces_out = Vec::new();
    let mut transversality = Vec::new();
    let mut sampled = false;
    for (t, s) in k.top().iter().enumerate() {
        let pts = k.points(s);
        let m = pts.len() - 1;
        let chart = Chart::for_simplex(&pts);
        let ambient_q = if chart.is_identity() { None } else { Some(tangent_frame(&pts)) };
        let proper: Vec<Simplex> = s.proper_faces().into_iter().filter(|f| f.dim() >= 1).collect();
        let dirs: Vec<DMatrix<f64>> = proper
            .iter()
            .map(|face| {
                let q = tangent_frame(&k.points(face));
                match &ambient_q {
                    None => q,
                    Some(a) => a.transpose() * q,
                }
            })
            .collect();
        let Ok(rel) = VeryGenPos::new(xi.clone(), m, dirs) else { continue };
        let piece = f.piece(t);
        let constant = xi.is_constant() && matches!(piece, Piece::Affine(_));
        let xs = if constant {
            vec![barycenter(&pts)]
        } else {
            sampled = true;
            barycentric_grid(m, samples_per_edge.saturating_sub(1))
                .iter()
                .map(|l| combine(&pts, l))
                .collect()
        };
        let mut tau = f64::INFINITY;
        let mut margins = vec![f64::INFINITY; proper.len()];
        for x in &xs {
            let jet = Jet1 {
                base: chart.to_chart(x),
                value: piece.value(x),
                slope: chart.pull_slope(&piece.derivative(x)),
            };
            if jet.value.len() != xi.dim() {
                tau = 0.0;
                continue;
            }
            let (t_x, fm) = rel.face_margins(&jet);
            tau = tau.min(t_x);
            for (a, b) in margins.iter_mut().zip(fm) {
                *a = a.min(b.min(t_x));
            }
        }
        transversality.push(floor(tau.min(1.0)));
        for (face, m) in proper.into_iter().zip(margins) {
            faces_out.push(FaceMargin { simplex: s.clone(), face, margin: floor(m) });
        }
    }
    let min_margin = faces_out
        .iter()
        .map(|f| f.margin)
        .chain(transversality.iter().copied())
        .fold(f64::INFINITY, f64::min);
    GeneralPositionReport {
        in_general_position: min_margin > 0.0,
        faces: faces_out,
        transversality,
        min_margin,
        sampled,
    }
}
