use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::config::{JigglingConfig, JigglingReport};
use super::engine::{run, Zones, MAX_TOP_SIMPLICES};
use crate::complex::shape::op_norm;
use crate::complex::Region;
use crate::pl_maps::{barycenter, c0_c1_distance, AffinePiece, PiecewiseMap};
use crate::relations::{certify_jets, jet_of_affine, Chart, RelationSet};
use crate::subdivision::refine;
use crate::{Error, Result};

/// A local trivialization: the part of the domain it covers and the affine
/// fiber coordinates `y ↦ matrix · y + offset` in which the relation is
/// read there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleChart {
    pub domain: Region,
    /// Rows of an invertible `n × n` matrix.
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub offset: Vec<f64>,
}

struct Affine {
    a: DMatrix<f64>,
    a_inv: DMatrix<f64>,
    c: DVector<f64>,
}

impl BundleChart {
    /// The chart with identity fiber coordinates.
    pub fn identity(domain: Region, n: usize) -> Self {
        let matrix = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self { domain, matrix, offset: vec![0.0; n] }
    }

    fn affine(&self, n: usize) -> Result<Affine> {
        if self.matrix.len() != n || self.matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!("chart matrix must be {n}×{n}")));
        }
        let a = DMatrix::from_fn(n, n, |i, j| self.matrix[i][j]);
        let c = match self.offset.len() {
            0 => DVector::zeros(n),
            l if l == n => DVector::from_column_slice(&self.offset),
            _ => return Err(Error::Invalid(format!("chart offset must have length {n}"))),
        };
        let a_inv = a
            .clone()
            .try_inverse()
            .filter(|m| m.iter().all(|x| x.is_finite()))
            .ok_or_else(|| Error::Invalid("chart matrix is singular".into()))?;
        Ok(Affine { a, a_inv, c })
    }
}

/// Jiggles a section given in global fiber coordinates chart by chart.
///
/// The section is linearized once on a subdivision shared by all charts.
/// Chart `i` then jiggles the simplices of its domain not handled by an
/// earlier chart, reading the relation in its own fiber coordinates and
/// treating the part handled earlier as a certified solution and the part
/// outside its domain as given up. Each chart spends at most
/// `ε / (2 · charts · ‖A_i⁻¹‖)` in its coordinates. Every top simplex is
/// finally certified in each chart whose domain contains one of its
/// vertices.
pub fn jiggle_bundle(
    s: &PiecewiseMap,
    rels: &RelationSet,
    charts: &[BundleChart],
    cfg: &JigglingConfig,
) -> Result<(PiecewiseMap, JigglingReport)> {
    cfg.validate()?;
    rels.check_roots(s.complex().top().len())?;
    if charts.is_empty() {
        return Err(Error::Invalid("at least one chart is needed".into()));
    }
    let n = s.target_dim();
    let affines = charts.iter().map(|c| c.affine(n)).collect::<Result<Vec<_>>>()?;
    let m = s.complex().dim().unwrap_or(0) as u32;

    let mut chosen = None;
    for level in cfg.level_init.unwrap_or(0)..=cfg.l_max {
        if s.complex().top().len() as f64 * 2f64.powi((level * m) as i32) > MAX_TOP_SIMPLICES as f64 {
            break;
        }
        let r = refine(s.complex(), level)?;
        let v2t = s.complex().vertex_to_top();
        let values = r.local_keys.iter().map(|k| s.value_at_key(&v2t, k)).collect();
        let lin = PiecewiseMap::from_vertex_values(Arc::new(r.complex), values)?;
        let (_, c1) = c0_c1_distance(s, &lin)?;
        if c1 < cfg.epsilon / 2.0 {
            chosen = Some((level, lin, r.parents, c1));
            break;
        }
    }
    let (level, lin, parents, lin_c1) = chosen.ok_or(Error::LevelLimit(cfg.l_max))?;
    let kl = lin.complex_arc().clone();
    if let Some(v) = (0..kl.num_vertices()).find(|&v| !charts.iter().any(|c| c.domain.contains(kl.vertex(v)))) {
        return Err(Error::NotCovered(kl.vertex(v).to_vec()));
    }
    let rels_l = match rels {
        RelationSet::Uniform(o) => RelationSet::Uniform(o.clone()),
        RelationSet::PerRoot(v) => RelationSet::PerRoot(parents.iter().map(|&p| v[p].clone()).collect()),
    };

    let mut values = lin.vertex_values().to_vec();
    let mut colors = 0;
    let mut retries = Vec::new();
    let mut eps_per_color = Vec::new();
    let mut perturbed = 0;
    let mut max_budget_ratio = 0.0f64;
    for (i, (chart, aff)) in charts.iter().zip(&affines).enumerate() {
        let local: Vec<DVector<f64>> = values.iter().map(|y| &aff.a * y + &aff.c).collect();
        let s_i = PiecewiseMap::from_vertex_values(kl.clone(), local)?;
        let earlier = &charts[..i];
        let in1 = |x: &[f64]| chart.domain.contains(x) && earlier.iter().any(|e| e.domain.contains(x));
        let in2 = |x: &[f64]| !chart.domain.contains(x);
        let zones = Zones { solution: Some(&in1), given_up: Some(&in2), frozen: None };
        let mut sub = cfg.clone();
        sub.level_init = Some(0);
        sub.l_max = 0;
        sub.epsilon = cfg.epsilon / (2.0 * charts.len() as f64 * op_norm(&aff.a_inv));
        let (out, rep) = run(&s_i, &rels_l, &zones, &sub)?;
        debug_assert_eq!(out.complex().num_vertices(), kl.num_vertices());
        values = out.vertex_values().iter().map(|y| &aff.a_inv * (y - &aff.c)).collect();
        colors += rep.colors;
        retries.extend(rep.retries);
        eps_per_color.extend(rep.eps_per_color);
        perturbed += rep.perturbed;
        max_budget_ratio = max_budget_ratio.max(rep.max_budget_ratio);
    }

    let map = PiecewiseMap::from_vertex_values(kl.clone(), values)?;
    let mut margins = Vec::with_capacity(kl.top().len());
    for (t, simplex) in kl.top().iter().enumerate() {
        let pts = kl.points(simplex);
        let chart = Chart::for_simplex(&pts);
        let mut best = f64::INFINITY;
        for (c, aff) in charts.iter().zip(&affines) {
            if !simplex.vertices().iter().any(|&v| c.domain.contains(kl.vertex(v))) {
                continue;
            }
            let local = AffinePiece::from_vertex_values(
                &pts,
                simplex.vertices().iter().map(|&v| &aff.a * map.vertex_value(v) + &aff.c).collect(),
            )?;
            let jets: Vec<_> = pts
                .iter()
                .cloned()
                .chain(std::iter::once(barycenter(&pts)))
                .map(|x| jet_of_affine(&local, &chart, &x))
                .collect();
            best = best.min(certify_jets(rels_l.for_root(t), &jets, cfg.certification, cfg.l_xi));
        }
        margins.push(best);
    }
    if let Some(t) = margins.iter().position(|&m| m <= 0.0) {
        return Err(Error::Verification(format!("simplex {t} is not certified in every chart meeting it")));
    }
    let (d_c0, d_c1) = c0_c1_distance(s, &map)?;
    if !(d_c1 < cfg.epsilon) {
        return Err(Error::Verification(format!("C¹ distance {d_c1:e} is not below epsilon {:e}", cfg.epsilon)));
    }
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let report = JigglingReport {
        relation: rels.name().to_string(),
        epsilon: cfg.epsilon,
        certification: cfg.certification,
        seed: cfg.seed,
        level,
        colors,
        margins,
        exempt: Vec::new(),
        min_margin,
        d_c0,
        d_c1,
        linearization_c1: lin_c1,
        retries,
        eps_per_color,
        perturbed,
        max_budget_ratio,
        fixed_hash: None,
    };
    Ok((map, report))
}
