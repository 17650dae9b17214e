use std::sync::Arc;

use nalgebra::DVector;

use super::config::{JigglingConfig, JigglingReport};
use super::jiggle_linear;
use crate::complex::shape::edge_matrix;
use crate::complex::SimplicialComplex;
use crate::pl_maps::{PiecewiseMap, SAMPLES_PER_EDGE};
use crate::relations::{
    verify_general_position, verygenpos_relation, AllOf, Distribution, GeneralPositionReport, RelationOracle,
    RelationSet,
};
use crate::{Error, Result};

/// A triangulation moved into general position.
#[derive(Clone, Debug)]
pub struct TriangulationResult {
    /// The subdivided complex at its new vertex positions.
    pub complex: SimplicialComplex,
    /// The jiggled identity, on the subdivision at its original positions.
    pub map: PiecewiseMap,
    pub report: JigglingReport,
    /// One report per distribution.
    pub general_position: Vec<GeneralPositionReport>,
    /// Runs discarded because a simplex flipped orientation.
    pub flips: u32,
}

/// Jiggles the vertices of a top dimensional triangulation (`m = N`) until
/// every face of every simplex is transverse to `xi`.
pub fn jiggle_triangulation(k: &SimplicialComplex, xi: &Distribution, cfg: &JigglingConfig) -> Result<TriangulationResult> {
    jiggle_triangulation_multi(k, std::slice::from_ref(xi), cfg)
}

/// [`jiggle_triangulation`] for several distributions at once.
///
/// A run whose output flips the orientation of some simplex is discarded
/// and repeated with `epsilon` shrunk by `eps_shrink`.
pub fn jiggle_triangulation_multi(
    k: &SimplicialComplex,
    xis: &[Distribution],
    cfg: &JigglingConfig,
) -> Result<TriangulationResult> {
    cfg.validate()?;
    if xis.is_empty() {
        return Err(Error::Invalid("at least one distribution is needed".into()));
    }
    let per_xi = xis
        .iter()
        .map(|xi| verygenpos_relation(k, xi))
        .collect::<Result<Vec<_>>>()?;
    let roots = k.top().len();
    let rels = RelationSet::PerRoot(
        (0..roots)
            .map(|r| -> Arc<dyn RelationOracle> {
                if per_xi.len() == 1 {
                    Arc::new(per_xi[0][r].clone())
                } else {
                    Arc::new(AllOf {
                        parts: per_xi
                            .iter()
                            .map(|v| Arc::new(v[r].clone()) as Arc<dyn RelationOracle>)
                            .collect(),
                    })
                }
            })
            .collect(),
    );
    let coords = (0..k.num_vertices()).map(|v| DVector::from_column_slice(k.vertex(v))).collect();
    let s = PiecewiseMap::from_vertex_values(Arc::new(k.clone()), coords)?;
    let mut run_cfg = cfg.clone();
    for flips in 0..=cfg.max_retries {
        let (map, report) = jiggle_linear(&s, &rels, &run_cfg)?;
        let moved: Vec<Vec<f64>> = map.vertex_values().iter().map(|y| y.iter().copied().collect()).collect();
        let complex = map.complex().with_coords(moved);
        if orientation_preserved(map.complex(), &complex) {
            let id = PiecewiseMap::from_vertex_values(Arc::new(complex.clone()), map.vertex_values().to_vec())?;
            let general_position: Vec<GeneralPositionReport> = xis
                .iter()
                .map(|xi| verify_general_position(&id, xi, SAMPLES_PER_EDGE))
                .collect();
            if let Some(g) = general_position.iter().find(|g| !g.in_general_position) {
                return Err(Error::Verification(format!(
                    "output not in general position (min margin {:e})",
                    g.min_margin
                )));
            }
            return Ok(TriangulationResult { complex, map, report, general_position, flips });
        }
        run_cfg.epsilon *= cfg.eps_shrink;
    }
    Err(Error::Verification(format!(
        "a simplex flipped orientation in all {} runs",
        cfg.max_retries + 1
    )))
}

fn orientation_preserved(before: &SimplicialComplex, after: &SimplicialComplex) -> bool {
    before.top().iter().all(|s| {
        let a = edge_matrix(&before.points(s)).determinant();
        let b = edge_matrix(&after.points(s)).determinant();
        a * b > 0.0 && b.abs() > 1e-12 * a.abs()
    })
}
