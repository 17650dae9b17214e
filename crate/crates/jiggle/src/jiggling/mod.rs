//! Jiggling: turning a piecewise map into a PL solution of a relation.
//!
//! The input is linearized on a crystalline subdivision `K_ℓ` fine enough
//! to be `ε/2`-close in C¹. The top simplices of `K_ℓ` are colored so that
//! same-colored simplices have disjoint stars, and color by color each
//! simplex gets its slope fiber perturbed into the relation at its minimal
//! vertex. Its star follows as a join. A color is accepted only when
//!
//! - every simplex of the color is certified (positive margin),
//! - every simplex certified earlier keeps a positive margin and was moved
//!   by less than a quarter of its certified margin, with the moves it
//!   accumulates staying below that margin,
//! - the C¹ change stays within `ε / (2C)` for `C` colors;
//!
//! otherwise the perturbation size is shrunk and the color retried.

mod bundle;
mod config;
mod engine;
mod perturb;
mod triangulation;

pub use bundle::{jiggle_bundle, BundleChart};
pub use config::{JigglingConfig, JigglingReport};
pub use engine::{frozen_hash, MAX_TOP_SIMPLICES};
pub use perturb::{slope_perturb_color, slope_perturb_simplex};
pub use triangulation::{jiggle_triangulation, jiggle_triangulation_multi, TriangulationResult};

use crate::complex::{Region, Subcomplex};
use crate::pl_maps::{barycenter, PiecewiseMap};
use crate::relations::{certify_jets, Certification, Chart, Jet1, RelationSet};
use crate::{Error, Result};
use engine::{run, Zones};

/// Jiggles `s` into a PL solution of `rels` within `cfg.epsilon` in C¹.
///
/// `rels` is indexed by the top simplices of `s.complex()`. Returns the
/// PL map on the chosen subdivision and a report of the run.
pub fn jiggle_linear(s: &PiecewiseMap, rels: &RelationSet, cfg: &JigglingConfig) -> Result<(PiecewiseMap, JigglingReport)> {
    run(s, rels, &Zones::default(), cfg)
}

/// Relative jiggling.
///
/// `s` is a solution on the closed region `u1`, and `k1` (a subcomplex
/// inside `u1`) and `k2` (inside `u2`) must keep their values. The result
/// equals `s` on `|k1 ∪ k2|`, is PL outside `u1 ∪ u2` and is a solution
/// away from `u2`: every top simplex of the output with a vertex outside
/// `u2` is certified. Simplices deep inside `u1 ∪ u2` keep the input
/// piece; a ring of simplices around them blends the input with the PL
/// map. When `k1 ∪ k2` is the whole complex, `s` is returned unchanged.
pub fn jiggle_relative(
    s: &PiecewiseMap,
    rels: &RelationSet,
    k1: &Subcomplex,
    k2: &Subcomplex,
    u1: &Region,
    u2: &Region,
    cfg: &JigglingConfig,
) -> Result<(PiecewiseMap, JigglingReport)> {
    cfg.validate()?;
    let k = s.complex();
    for q in [k1, k2] {
        if let Some(bad) = q.iter().find(|x| !k.contains(x)) {
            return Err(Error::NotSubcomplex(bad.vertices().to_vec()));
        }
    }
    let n = k.ambient_dim();
    if !u1.check_dim(n) || !u2.check_dim(n) {
        return Err(Error::Invalid(format!("regions must live in R^{n}")));
    }
    for (q, u, name) in [(k1, u1, "K′"), (k2, u2, "K″")] {
        if let Some(v) = q.vertices().into_iter().find(|&v| !u.contains(k.vertex(v))) {
            return Err(Error::Invalid(format!("{name} vertex {v} lies outside its region")));
        }
    }
    let frozen = k1.union(k2);
    if k.top().iter().all(|t| frozen.contains(t)) {
        rels.check_roots(k.top().len())?;
        let margins = certify_map(s, rels, cfg.certification, cfg.l_xi)?;
        let mut report = JigglingReport::unchanged(rels.name(), cfg, margins);
        report.fixed_hash = Some(frozen_hash(s, &frozen));
        return Ok((s.clone(), report));
    }
    let in1 = |x: &[f64]| u1.contains(x);
    let in2 = |x: &[f64]| u2.contains(x);
    let zones = Zones {
        solution: Some(&in1),
        given_up: Some(&in2),
        frozen: Some(&frozen),
    };
    run(s, rels, &zones, cfg)
}

/// Certified margin of `s` on each top simplex of its complex, from the
/// jets at the vertices and the barycenter. `rels` is indexed by the top
/// simplices of `s.complex()`.
pub fn certify_map(s: &PiecewiseMap, rels: &RelationSet, certification: Certification, l_xi: f64) -> Result<Vec<f64>> {
    let k = s.complex();
    rels.check_roots(k.top().len())?;
    Ok(k.top()
        .iter()
        .enumerate()
        .map(|(t, simplex)| {
            let pts = k.points(simplex);
            let chart = Chart::for_simplex(&pts);
            let piece = s.piece(t);
            let jets: Vec<Jet1> = pts
                .iter()
                .cloned()
                .chain(std::iter::once(barycenter(&pts)))
                .map(|x| Jet1 {
                    base: chart.to_chart(&x),
                    value: piece.value_exact(&x),
                    slope: chart.pull_slope(&piece.derivative(&x)),
                })
                .collect();
            certify_jets(rels.for_root(t), &jets, certification, l_xi)
        })
        .collect())
}

#[cfg(test)]
mod tests;
