use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use sha2::{Digest, Sha256};

use super::config::{JigglingConfig, JigglingReport};
use super::perturb::perturbed_values;
use crate::complex::shape::tangent_frame;
use crate::complex::{greedy_color, Simplex, SimplicialComplex, Subcomplex, VertexId};
use crate::pl_maps::{
    barycenter, c0_c1_distance, interpolate, piece_distance, AffinePiece, Piece, PiecewiseMap, Weighting,
    SAMPLES_PER_EDGE,
};
use crate::relations::{certify_jets, jet_of_affine, Chart, Jet1, RelationSet};
use crate::subdivision::refine;
use crate::{Error, Result};

/// Size limit on the subdivisions tried by the level search.
pub const MAX_TOP_SIMPLICES: usize = 1 << 20;

pub(crate) type Pred<'a> = &'a dyn Fn(&[f64]) -> bool;

/// Where a run must produce a solution and what it must leave alone.
#[derive(Default)]
pub(crate) struct Zones<'a> {
    /// `U′`: the input is already a solution here.
    pub solution: Option<Pred<'a>>,
    /// `U″`: no requirement here; the input is kept.
    pub given_up: Option<Pred<'a>>,
    /// Subcomplex of the input complex whose values must not change.
    pub frozen: Option<&'a Subcomplex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    /// Every vertex deep inside `U′` or `U″`: the input piece is kept.
    Kept,
    /// Inside `U′` or `U″` but touching the free part: blends the input
    /// (on deep vertices) with the PL map (on the others).
    Transition,
    /// PL and jiggled.
    Free,
}

struct Layout {
    complex: Arc<SimplicialComplex>,
    parents: Vec<usize>,
    points: Vec<Vec<DVector<f64>>>,
    charts: Vec<Chart>,
    frames: Vec<DMatrix<f64>>,
    v2t: Vec<Vec<usize>>,
    class: Vec<Class>,
    deep: Vec<bool>,
    required: Vec<bool>,
    frozen: Vec<VertexId>,
    inherited: Vec<Piece>,
    values: Vec<DVector<f64>>,
}

impl Layout {
    fn build(s: &PiecewiseMap, zones: &Zones, level: u32) -> Result<Self> {
        let r = refine(s.complex(), level)?;
        let k = Arc::new(r.complex);
        let v2t_s = s.complex().vertex_to_top();
        let values: Vec<DVector<f64>> = r.local_keys.iter().map(|key| s.value_at_key(&v2t_s, key)).collect();
        let flag = |p: Option<Pred>| -> Vec<bool> { k.coords().iter().map(|x| p.is_some_and(|f| f(x))).collect() };
        let in1 = flag(zones.solution);
        let in2 = flag(zones.given_up);
        if let Some(v) = (0..in1.len()).find(|&v| in1[v] && in2[v]) {
            return Err(Error::Invalid(format!("U′ and U″ overlap at {:?}", k.vertex(v))));
        }
        let tops = k.top();
        let all_in = |s: &Simplex, f: &[bool]| s.vertices().iter().all(|&v| f[v]);
        let top_in: Vec<bool> = tops.iter().map(|s| all_in(s, &in1) || all_in(s, &in2)).collect();
        let v2t = k.vertex_to_top();
        let deep: Vec<bool> = v2t.iter().map(|ts| !ts.is_empty() && ts.iter().all(|&t| top_in[t])).collect();
        let class: Vec<Class> = tops
            .iter()
            .enumerate()
            .map(|(t, s)| match (top_in[t], all_in(s, &deep)) {
                (false, _) => Class::Free,
                (true, true) => Class::Kept,
                (true, false) => Class::Transition,
            })
            .collect();
        let required = tops.iter().map(|s| !all_in(s, &in2)).collect();
        let mut frozen = Vec::new();
        if let Some(sub) = zones.frozen {
            for (v, key) in r.local_keys.iter().enumerate() {
                if sub.contains(&Simplex::from_sorted(key.support().collect())) {
                    if !deep[v] {
                        return Err(Error::CoverTooCoarse(level));
                    }
                    frozen.push(v);
                }
            }
        }
        let points: Vec<Vec<DVector<f64>>> = tops.iter().map(|s| k.points(s)).collect();
        let inherited = tops
            .iter()
            .enumerate()
            .map(|(t, simplex)| match s.piece(r.parents[t]) {
                Piece::Affine(_) => Ok(Piece::affine(AffinePiece::from_vertex_values(
                    &points[t],
                    simplex.vertices().iter().map(|&v| values[v].clone()).collect(),
                )?)),
                p => Ok(p.clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            charts: points.iter().map(|p| Chart::for_simplex(p)).collect(),
            frames: points.iter().map(|p| tangent_frame(p)).collect(),
            points,
            parents: r.parents,
            v2t,
            class,
            deep,
            required,
            frozen,
            inherited,
            values,
            complex: k,
        })
    }

    fn piece(&self, t: usize, table: &[DVector<f64>]) -> Result<Piece> {
        let simplex = &self.complex.top()[t];
        let lin = || -> Result<Piece> {
            Ok(Piece::affine(AffinePiece::from_vertex_values(
                &self.points[t],
                simplex.vertices().iter().map(|&v| table[v].clone()).collect(),
            )?))
        };
        match self.class[t] {
            Class::Free => lin(),
            Class::Kept => Ok(self.inherited[t].clone()),
            Class::Transition => {
                let (a, b): (Vec<usize>, Vec<usize>) = (0..simplex.len()).partition(|&i| self.deep[simplex.vertices()[i]]);
                if a.is_empty() {
                    lin()
                } else {
                    interpolate(&self.points[t], &a, &b, lin()?, self.inherited[t].clone(), Weighting::Literal)
                }
            }
        }
    }

    /// Certified margin of `piece` on top simplex `t` and the value
    /// Lipschitz constant of the relation there.
    fn margin(&self, rels: &RelationSet, t: usize, piece: &Piece, cfg: &JigglingConfig) -> (f64, f64) {
        let rel = rels.for_root(self.parents[t]);
        let chart = &self.charts[t];
        let pts = &self.points[t];
        let samples = pts.iter().cloned().chain(std::iter::once(barycenter(pts)));
        let jets: Vec<Jet1> = samples
            .map(|x| match piece {
                Piece::Affine(a) => jet_of_affine(a, chart, &x),
                p => Jet1 {
                    base: chart.to_chart(&x),
                    value: p.value_exact(&x),
                    slope: chart.pull_slope(&p.derivative(&x)),
                },
            })
            .collect();
        let lip = jets.iter().map(|j| rel.value_lipschitz(j)).fold(0.0, f64::max);
        (certify_jets(rel, &jets, cfg.certification, cfg.l_xi), lip)
    }

    fn hash_frozen(&self, table: &[DVector<f64>]) -> String {
        let mut h = Sha256::new();
        for &v in &self.frozen {
            h.update((v as u64).to_le_bytes());
            for y in table[v].iter() {
                h.update(y.to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

struct Start {
    level: u32,
    layout: Layout,
    pieces: Vec<Piece>,
    margins: Vec<f64>,
    lin_c1: f64,
}

/// The smallest level at which the starting map is within `ε/2` of `s` and
/// the kept part is certified.
fn choose_level(s: &PiecewiseMap, rels: &RelationSet, zones: &Zones, cfg: &JigglingConfig) -> Result<Start> {
    let mut entry_failed = false;
    let m = s.complex().dim().unwrap_or(0) as u32;
    for level in cfg.level_init.unwrap_or(0)..=cfg.l_max {
        let count = (s.complex().top().len() as f64) * 2f64.powi((level * m) as i32);
        if count > MAX_TOP_SIMPLICES as f64 {
            return Err(Error::LevelLimit(level.saturating_sub(1)));
        }
        let layout = match Layout::build(s, zones, level) {
            Ok(l) => l,
            Err(Error::CoverTooCoarse(_)) => continue,
            Err(e) => return Err(e),
        };
        let n_top = layout.complex.top().len();
        let pieces = (0..n_top).map(|t| layout.piece(t, &layout.values)).collect::<Result<Vec<_>>>()?;
        let start = PiecewiseMap::from_parts(layout.complex.clone(), pieces.clone(), layout.values.clone())?;
        let (_, lin_c1) = c0_c1_distance(s, &start)?;
        if !(lin_c1 < cfg.epsilon / 2.0) {
            continue;
        }
        let mut margins = vec![0.0; n_top];
        let mut ok = true;
        for t in 0..n_top {
            if layout.class[t] != Class::Free && layout.required[t] {
                margins[t] = layout.margin(rels, t, &pieces[t], cfg).0;
                if margins[t] <= 0.0 {
                    ok = false;
                    break;
                }
            }
        }
        entry_failed = !ok;
        if ok {
            return Ok(Start { level, layout, pieces, margins, lin_c1 });
        }
    }
    if entry_failed {
        return Err(Error::Verification("the input is not a certified solution on U′".into()));
    }
    Err(Error::LevelLimit(cfg.l_max))
}

/// The jiggling engine shared by the linear and relative drivers.
pub(crate) fn run(
    s: &PiecewiseMap,
    rels: &RelationSet,
    zones: &Zones,
    cfg: &JigglingConfig,
) -> Result<(PiecewiseMap, JigglingReport)> {
    cfg.validate()?;
    rels.check_roots(s.complex().top().len())?;
    let Start { level, layout, mut pieces, mut margins, lin_c1 } = choose_level(s, rels, zones, cfg)?;
    let tops = layout.complex.top();
    let n_top = tops.len();
    let coloring = greedy_color(&layout.complex)?;
    let nc = coloring.num_colors;
    let eps0 = cfg.epsilon / (4.0 * (nc as f64 + 1.0));
    let color_budget = cfg.epsilon / (2.0 * nc.max(1) as f64);

    let mut table = layout.values.clone();
    let mut certified: Vec<Option<f64>> = (0..n_top)
        .map(|t| (layout.class[t] != Class::Free && layout.required[t]).then_some(margins[t]))
        .collect();
    let mut spent = vec![0.0f64; n_top];
    let mut retries = Vec::with_capacity(nc);
    let mut eps_used = Vec::with_capacity(nc);
    let mut perturbed = 0usize;

    for color in 0..nc {
        let class: Vec<usize> = coloring
            .class(color)
            .into_iter()
            .filter(|&t| layout.class[t] == Class::Free)
            .collect();
        if class.is_empty() {
            retries.push(0);
            eps_used.push(0.0);
            continue;
        }
        let mut in_class = vec![false; n_top];
        class.iter().for_each(|&t| in_class[t] = true);
        let mut affected: Vec<usize> = class
            .iter()
            .flat_map(|&t| tops[t].vertices().iter().flat_map(|&v| layout.v2t[v].iter().copied()))
            .collect();
        affected.sort_unstable();
        affected.dedup();

        let mut eps_c = eps0;
        let mut attempt = 0u32;
        loop {
            let mut next = table.clone();
            let mut changed = 0usize;
            for &t in &class {
                let piece = pieces[t].as_affine().expect("free pieces are affine");
                let rel = rels.for_root(layout.parents[t]);
                let updates = perturbed_values(&layout.points[t], tops[t].vertices(), piece, &layout.charts[t], rel, eps_c)?;
                if let Some(updates) = updates {
                    changed += 1;
                    for (v, y) in updates {
                        next[v] = y;
                    }
                }
            }
            let mut failure: Option<String> = None;
            let mut new_state = Vec::with_capacity(affected.len());
            let mut worst_c1 = 0.0f64;
            for &t in &affected {
                let p = layout.piece(t, &next)?;
                let (c0, c1) = piece_distance(&pieces[t], &p, &layout.points[t], &layout.frames[t], SAMPLES_PER_EDGE);
                let (m, lip) = layout.margin(rels, t, &p, cfg);
                worst_c1 = worst_c1.max(c1);
                let disp = c1 + lip * c0;
                if failure.is_none() {
                    if in_class[t] && layout.required[t] && m <= 0.0 {
                        failure = Some(format!("simplex {t} not certified after perturbation"));
                    } else if let Some(mu) = certified[t] {
                        if m <= 0.0 {
                            failure = Some(format!("certified simplex {t} lost its margin"));
                        } else if disp >= mu / 4.0 || spent[t] + disp >= mu {
                            failure = Some(format!("certified simplex {t} displaced by {disp:e}, margin {mu:e}"));
                        }
                    }
                }
                new_state.push((t, p, m, disp));
            }
            if failure.is_none() && worst_c1 >= color_budget {
                failure = Some(format!("C¹ change {worst_c1:e} exceeds the per-color budget {color_budget:e}"));
            }
            match failure {
                None => {
                    for (t, p, m, disp) in new_state {
                        pieces[t] = p;
                        margins[t] = m;
                        if in_class[t] && layout.required[t] {
                            certified[t] = Some(m);
                        } else if certified[t].is_some() {
                            spent[t] += disp;
                        }
                    }
                    table = next;
                    perturbed += changed;
                    retries.push(attempt);
                    eps_used.push(eps_c);
                    break;
                }
                Some(detail) => {
                    attempt += 1;
                    if attempt > cfg.max_retries {
                        return Err(Error::RetriesExhausted { color, detail });
                    }
                    eps_c *= cfg.eps_shrink;
                }
            }
        }
    }

    for &v in &layout.frozen {
        debug_assert_eq!(table[v], layout.values[v]);
    }
    let map = PiecewiseMap::from_parts(layout.complex.clone(), pieces, table)?;
    let mut min_margin = f64::INFINITY;
    let mut exempt = Vec::new();
    for t in 0..n_top {
        margins[t] = layout.margin(rels, t, map.piece(t), cfg).0;
        if layout.required[t] {
            min_margin = min_margin.min(margins[t]);
        } else {
            exempt.push(t);
        }
    }
    if let Some(t) = (0..n_top).find(|&t| layout.required[t] && margins[t] <= 0.0) {
        return Err(Error::Verification(format!("simplex {t} of the output has zero margin")));
    }
    let (d_c0, d_c1) = c0_c1_distance(s, &map)?;
    if !(d_c1 < cfg.epsilon) {
        return Err(Error::Verification(format!("C¹ distance {d_c1:e} is not below epsilon {:e}", cfg.epsilon)));
    }
    let max_budget_ratio = (0..n_top)
        .filter_map(|t| certified[t].map(|mu| spent[t] / mu))
        .fold(0.0, f64::max);
    let fixed_hash = zones.frozen.map(|_| layout.hash_frozen(map.vertex_values()));
    let report = JigglingReport {
        relation: rels.name().to_string(),
        epsilon: cfg.epsilon,
        certification: cfg.certification,
        seed: cfg.seed,
        level,
        colors: nc,
        margins,
        exempt,
        min_margin,
        d_c0,
        d_c1,
        linearization_c1: lin_c1,
        retries,
        eps_per_color: eps_used,
        perturbed,
        max_budget_ratio,
        fixed_hash,
    };
    Ok((map, report))
}

/// SHA-256 of the values of `s` at the vertices of its complex lying in
/// `sub`, a subcomplex of the root complex `s` was subdivided from. Same
/// format as [`JigglingReport::fixed_hash`] for runs on a root complex.
pub fn frozen_hash(s: &PiecewiseMap, sub: &Subcomplex) -> String {
    let k = s.complex();
    let mut h = Sha256::new();
    for v in 0..k.num_vertices() {
        let support: Vec<VertexId> = match k.keys() {
            Some(keys) => keys[v].support().collect(),
            None => vec![v],
        };
        if sub.contains(&Simplex::from_sorted(support)) {
            h.update((v as u64).to_le_bytes());
            for y in s.vertex_value(v).iter() {
                h.update(y.to_le_bytes());
            }
        }
    }
    hex::encode(h.finalize())
}
