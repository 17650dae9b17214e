use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::files::{json_arg, read_complex, read_map, write_atomic, write_json};
use super::{
    certification, CliError, ColorArgs, JiggleArgs, LinearizeArgs, MetricsArgs, RelationArgs, SubdivideArgs,
    TriangulationArgs, VerifyArgs,
};
use crate::complex::shape::{lambda, rmax, rmin};
use crate::complex::{greedy_color, kuhn_cube, square_grid, Region, Simplex, SimplicialComplex, Subcomplex};
use crate::jiggling::{
    certify_map, jiggle_bundle, jiggle_linear, jiggle_relative, jiggle_triangulation_multi, BundleChart,
    JigglingConfig, JigglingReport, TriangulationResult,
};
use crate::pl_maps::{c0_c1_distance, PiecewiseMap};
use crate::relations::{
    contact3d_relation, verify_general_position, AllOf, Certification, Distribution, RelationConfig, RelationKind,
    RelationOracle, RelationSet,
};
use crate::pl_maps::SAMPLES_PER_EDGE;
use crate::subdivision::{crystalline_subdivide, generalized_subdivide};

pub struct Globals {
    pub seed: u64,
    pub lmax: u32,
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn write_off(path: &Path, k: &SimplicialComplex) -> Result<(), CliError> {
    write_atomic(path, &k.to_off()?)
}

fn write_map(path: &Path, f: &PiecewiseMap) -> Result<(), CliError> {
    write_json(path, &f.to_map_json())
}

pub fn subdivide(_g: &Globals, a: SubdivideArgs) -> Result<(), CliError> {
    let k = read_complex(&a.input)?;
    let out = match a.cone_off {
        Some(region) => {
            let region: Region = json_arg(&region)?;
            // clap enforces that these are present with --cone-off
            let (l0, l1, delta) = (a.l0.unwrap_or(0), a.l1.unwrap_or(0), a.delta.unwrap_or(0.0));
            let g = generalized_subdivide(&k, &region, delta, l0, l1)?;
            println!(
                "generalized subdivision {l0} -> {l1}: {} top simplices, required level {}, color bound {}",
                g.complex.top().len(),
                g.required_level,
                g.color_bound
            );
            g.complex
        }
        None => {
            let s = crystalline_subdivide(&k, a.level)?;
            println!("level {}: {} top simplices, {} vertices", a.level, s.top().len(), s.num_vertices());
            s
        }
    };
    write_atomic(&a.out, &out.to_json())?;
    if let Some(p) = a.emit_off {
        write_off(&p, &out)?;
    }
    Ok(())
}

pub fn color(a: ColorArgs) -> Result<(), CliError> {
    let k = crystalline_subdivide(&read_complex(&a.input)?, a.level)?;
    let c = greedy_color(&k)?;
    println!("{} top simplices, {} colors", k.top().len(), c.num_colors);
    if let Some(p) = a.out {
        write_json(&p, &c)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct LevelMetrics {
    level: u32,
    top_simplices: usize,
    rmax: f64,
    rmin: f64,
    lambda: f64,
    rmax_lambda: f64,
}

pub fn metrics(a: MetricsArgs) -> Result<(), CliError> {
    let k = read_complex(&a.input)?;
    let mut rows = Vec::new();
    println!("{:>5} {:>9} {:>12} {:>12} {:>12} {:>12}", "level", "tops", "rmax", "rmin", "lambda", "rmax*lambda");
    for level in 0..=a.max_level {
        let kl = crystalline_subdivide(&k, level)?;
        let (mut hi, mut lo, mut lam) = (0.0f64, f64::INFINITY, 0.0f64);
        for s in kl.top() {
            let p = kl.points(s);
            hi = hi.max(rmax(&p));
            lo = lo.min(rmin(&p)?);
            lam = lam.max(lambda(&p)?);
        }
        let row = LevelMetrics { level, top_simplices: kl.top().len(), rmax: hi, rmin: lo, lambda: lam, rmax_lambda: hi * lam };
        println!(
            "{:>5} {:>9} {:>12.6e} {:>12.6e} {:>12.6e} {:>12.6}",
            row.level, row.top_simplices, row.rmax, row.rmin, row.lambda, row.rmax_lambda
        );
        rows.push(row);
    }
    if let Some(p) = a.out {
        write_json(&p, &rows)?;
    }
    Ok(())
}

pub fn linearize(a: LinearizeArgs) -> Result<(), CliError> {
    let s = read_map(&a.map)?;
    let lin = crate::pl_maps::linearize(&s, a.level)?;
    let (c0, c1) = c0_c1_distance(&s, &lin)?;
    println!("level {}: d_C0 = {c0:e}, d_C1 = {c1:e}", a.level);
    write_map(&a.out, &lin)
}

/// A relation with everything needed to build it on a given complex.
struct RelationChoice {
    kind: RelationKind,
    xis: Vec<Distribution>,
    certification: Certification,
    l_xi: f64,
}

impl RelationChoice {
    fn parse(r: &RelationArgs) -> Result<Self, CliError> {
        let name = r.relation.trim();
        let (base, from_json) = match serde_json::from_value::<RelationKind>(json!(name)) {
            Ok(kind) => (RelationConfig::new(kind, None), false),
            Err(_) => (json_arg::<RelationConfig>(name)?, true),
        };
        let mut xis: Vec<Distribution> = r.xi.iter().map(|x| json_arg(x)).collect::<Result<_, _>>()?;
        if let Some(x) = &base.xi {
            if !xis.is_empty() {
                return Err(usage("the distribution is given both in the relation block and by --xi"));
            }
            xis.push(x.clone());
        }
        let certification = match (&r.mode, from_json) {
            (None, true) => base.certification,
            (m, _) => certification(m.as_deref())?,
        };
        let cfg = RelationConfig { xi: xis.first().cloned(), ..base.clone() };
        let l_xi = match r.l_xi {
            Some(l) => l,
            None => xis.iter().map(Distribution::lipschitz).fold(cfg.lipschitz(), f64::max),
        };
        if xis.len() > 1 && base.relation != RelationKind::Verygenpos {
            return Err(usage("several distributions are only meaningful for verygenpos"));
        }
        Ok(Self { kind: base.relation, xis, certification, l_xi })
    }

    fn build(&self, k: &SimplicialComplex, n: usize) -> Result<RelationSet, CliError> {
        if self.xis.len() <= 1 {
            let rc = RelationConfig { relation: self.kind, xi: self.xis.first().cloned(), certification: self.certification, l_xi: None };
            return Ok(rc.build(k, n)?);
        }
        let sets: Vec<RelationSet> = self
            .xis
            .iter()
            .map(|x| RelationConfig::new(self.kind, Some(x.clone())).build(k, n))
            .collect::<crate::Result<_>>()?;
        Ok(RelationSet::PerRoot(
            (0..k.top().len())
                .map(|t| -> Arc<dyn RelationOracle> {
                    Arc::new(AllOf { parts: sets.iter().map(|s| root_arc(s, t)).collect() })
                })
                .collect(),
        ))
    }
}

fn root_arc(s: &RelationSet, t: usize) -> Arc<dyn RelationOracle> {
    match s {
        RelationSet::Uniform(o) => o.clone(),
        RelationSet::PerRoot(v) => v[t].clone(),
    }
}

/// The `--relative` file.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelativeSpec {
    #[serde(default)]
    k1: Vec<Vec<usize>>,
    #[serde(default)]
    k2: Vec<Vec<usize>>,
    #[serde(default = "empty_region")]
    u1: Region,
    #[serde(default = "empty_region")]
    u2: Region,
}

fn empty_region() -> Region {
    Region::Empty
}

fn subcomplex(lists: &[Vec<usize>]) -> Result<Subcomplex, CliError> {
    let simplices = lists.iter().map(|l| Simplex::new(l.clone())).collect::<crate::Result<Vec<_>>>()?;
    Ok(Subcomplex::closure(simplices.iter()))
}

fn write_report<T: Serialize>(path: Option<&PathBuf>, value: &T) -> Result<(), CliError> {
    match path {
        Some(p) => write_json(p, value),
        None => Ok(()),
    }
}

fn print_summary(r: &JigglingReport) {
    println!(
        "relation {}: level {}, {} colors, {} perturbed, min margin {:e}, d_C0 {:e}, d_C1 {:e} (epsilon {})",
        r.relation, r.level, r.colors, r.perturbed, r.min_margin, r.d_c0, r.d_c1, r.epsilon
    );
}

pub fn jiggle(g: &Globals, a: JiggleArgs) -> Result<(), CliError> {
    let s = read_map(&a.map)?;
    let rel = RelationChoice::parse(&a.relation)?;
    let rels = rel.build(s.complex(), s.target_dim())?;
    let cfg = JigglingConfig {
        epsilon: a.epsilon,
        level_init: a.level_init,
        eps_shrink: a.eps_shrink,
        max_retries: a.max_retries,
        certification: rel.certification,
        l_xi: rel.l_xi,
        l_max: g.lmax,
        seed: g.seed,
    };
    let (out, report) = if let Some(r) = &a.relative {
        let spec: RelativeSpec = json_arg(r)?;
        let (k1, k2) = (subcomplex(&spec.k1)?, subcomplex(&spec.k2)?);
        jiggle_relative(&s, &rels, &k1, &k2, &spec.u1, &spec.u2, &cfg)?
    } else if let Some(c) = &a.charts {
        let charts: Vec<BundleChart> = json_arg(c)?;
        jiggle_bundle(&s, &rels, &charts, &cfg)?
    } else {
        jiggle_linear(&s, &rels, &cfg)?
    };
    print_summary(&report);
    write_map(&a.out, &out)?;
    write_report(a.report.as_ref(), &report)
}

#[derive(Serialize)]
struct TriangulationReport<'a> {
    jiggling: &'a JigglingReport,
    flips: u32,
    general_position: &'a [crate::relations::GeneralPositionReport],
    max_displacement: f64,
}

fn max_displacement(res: &TriangulationResult) -> f64 {
    let before = res.map.complex();
    (0..before.num_vertices())
        .map(|v| (before.point(v) - res.complex.point(v)).norm())
        .fold(0.0, f64::max)
}

pub fn jiggle_triangulation(g: &Globals, a: TriangulationArgs) -> Result<(), CliError> {
    let k = read_complex(&a.input)?;
    let xis: Vec<Distribution> = a.xi.iter().map(|x| json_arg(x)).collect::<Result<_, _>>()?;
    let mut cfg = JigglingConfig::new(a.epsilon);
    cfg.level_init = Some(a.level);
    cfg.max_retries = a.max_retries;
    cfg.certification = certification(a.mode.as_deref())?;
    cfg.l_xi = xis.iter().map(Distribution::lipschitz).fold(0.0, f64::max);
    cfg.l_max = g.lmax.max(a.level);
    cfg.seed = g.seed;
    let res = jiggle_triangulation_multi(&k, &xis, &cfg)?;
    print_summary(&res.report);
    let disp = max_displacement(&res);
    println!("{} top simplices, max vertex displacement {disp:e}, {} orientation retries", res.complex.top().len(), res.flips);
    write_atomic(&a.out, &res.complex.to_json())?;
    if let Some(p) = &a.emit_off {
        write_off(p, &res.complex)?;
    }
    let rep = TriangulationReport {
        jiggling: &res.report,
        flips: res.flips,
        general_position: &res.general_position,
        max_displacement: disp,
    };
    write_report(a.report.as_ref(), &rep)
}

#[derive(Serialize)]
struct VerifyReport {
    relation: String,
    certification: Certification,
    top_simplices: usize,
    min_margin: f64,
    /// Top simplices whose margin is not positive.
    failing: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    ok: bool,
}

pub fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let f = match (&a.map, &a.complex) {
        (Some(m), _) => read_map(m)?,
        (None, Some(c)) => identity_map(read_complex(c)?)?,
        (None, None) => return Err(usage("one of --map and --complex is required")),
    };
    let rel = RelationChoice::parse(&a.relation)?;
    let k = f.complex();
    let margins: Vec<f64> = if rel.kind == RelationKind::Verygenpos {
        if rel.xis.is_empty() {
            return Err(usage("verygenpos needs a distribution"));
        }
        let reports: Vec<_> = rel.xis.iter().map(|xi| verify_general_position(&f, xi, SAMPLES_PER_EDGE)).collect();
        (0..k.top().len())
            .map(|t| reports.iter().map(|r| r.transversality[t]).fold(f64::INFINITY, f64::min))
            .zip(face_minima(&reports, k))
            .map(|(a, b)| a.min(b))
            .collect()
    } else {
        let rels = rel.build(k, f.target_dim())?;
        certify_map(&f, &rels, rel.certification, rel.l_xi)?
    };
    let failing: Vec<Vec<usize>> = k
        .top()
        .iter()
        .zip(&margins)
        .filter(|(_, m)| !(**m > 0.0))
        .map(|(s, _)| s.vertices().to_vec())
        .collect();
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let (d_c0, d_c1) = match &a.against {
        Some(p) => {
            let (c0, c1) = c0_c1_distance(&read_map(p)?, &f)?;
            (Some(c0), Some(c1))
        }
        None => (None, None),
    };
    let close = match (d_c1, a.epsilon) {
        (Some(d), Some(e)) => d < e,
        _ => true,
    };
    let rep = VerifyReport {
        relation: format!("{:?}", rel.kind).to_lowercase(),
        certification: rel.certification,
        top_simplices: k.top().len(),
        min_margin,
        ok: failing.is_empty() && close,
        failing,
        d_c0,
        d_c1,
        epsilon: a.epsilon,
    };
    println!(
        "{}: {} of {} top simplices fail, min margin {:e}",
        rep.relation,
        rep.failing.len(),
        rep.top_simplices,
        rep.min_margin
    );
    if let (Some(d), Some(e)) = (rep.d_c1, rep.epsilon) {
        println!("d_C1 = {d:e} against epsilon {e}");
    }
    write_report(a.report.as_ref(), &rep)?;
    if rep.ok {
        println!("OK");
        Ok(())
    } else if !close {
        Err(CliError::Verification("the map is not within epsilon of the reference".into()))
    } else {
        Err(CliError::Verification(format!("{} top simplices fail the relation", rep.failing.len())))
    }
}

/// Smallest face margin per top simplex over all reports.
fn face_minima(reports: &[crate::relations::GeneralPositionReport], k: &SimplicialComplex) -> Vec<f64> {
    let mut out = vec![f64::INFINITY; k.top().len()];
    for r in reports {
        for fm in &r.faces {
            if let Some(t) = k.top_index(&fm.simplex) {
                out[t] = out[t].min(fm.margin);
            }
        }
    }
    out
}

fn identity_map(k: SimplicialComplex) -> Result<PiecewiseMap, CliError> {
    let values = (0..k.num_vertices()).map(|v| k.point(v)).collect();
    Ok(PiecewiseMap::from_vertex_values(Arc::new(k), values)?)
}

fn out_file(dir: &Option<PathBuf>, name: &str) -> Result<Option<PathBuf>, CliError> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d).map_err(|e| usage(format!("creating {}: {e}", d.display())))?;
            Ok(Some(d.join(name)))
        }
        None => Ok(None),
    }
}

/// Smallest angle between an edge of `k` and the horizontal axis.
pub fn min_edge_angle(k: &SimplicialComplex) -> f64 {
    k.simplices()
        .iter()
        .filter(|s| s.dim() == 1)
        .map(|s| {
            let d = k.point(s.vertices()[1]) - k.point(s.vertices()[0]);
            (d[1].abs() / d.norm()).asin()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn demo_thurston(g: &Globals, n: usize, epsilon: f64, min_angle: f64, out_dir: Option<PathBuf>) -> Result<(), CliError> {
    if n == 0 {
        return Err(usage("n must be positive"));
    }
    let k = square_grid(n, 1.0 / n as f64);
    let xi = Distribution::horizontal(2);
    let mut cfg = JigglingConfig::new(epsilon);
    cfg.l_max = g.lmax;
    cfg.seed = g.seed;
    let res = jiggle_triangulation_multi(&k, std::slice::from_ref(&xi), &cfg)?;
    let before = min_edge_angle(&k);
    let after = min_edge_angle(&res.complex);
    let disp = max_displacement(&res);
    println!("grid {n}x{n}: {} triangles", res.complex.top().len());
    println!("min edge angle to horizontal: before {before:e}, after {after:e}");
    println!("max vertex displacement {disp:e} (epsilon {epsilon}), orientation retries {}", res.flips);
    if let Some(p) = out_file(&out_dir, "thurston2d.json")? {
        write_atomic(&p, &res.complex.to_json())?;
        write_off(&p.with_extension("off"), &res.complex)?;
    }
    if after > min_angle && disp < epsilon {
        println!("PASS: every edge is transverse to the horizontal foliation");
        Ok(())
    } else {
        Err(CliError::Verification(format!("an edge is within {after:e} rad of horizontal (required > {min_angle:e})")))
    }
}

pub fn demo_contact(g: &Globals, epsilon: f64, out_dir: Option<PathBuf>) -> Result<(), CliError> {
    let k = Arc::new(kuhn_cube());
    let values = vec![DVector::from_vec(vec![0.0, 0.0, 1.0]); k.num_vertices()];
    let s = PiecewiseMap::from_vertex_values(k, values)?;
    let rels = RelationSet::uniform(contact3d_relation());
    let mut cfg = JigglingConfig::new(epsilon);
    cfg.l_max = g.lmax;
    cfg.seed = g.seed;
    let (out, report) = jiggle_linear(&s, &rels, &cfg)?;
    print_summary(&report);
    if let Some(p) = out_file(&out_dir, "contact3d.json")? {
        write_map(&p, &out)?;
        write_json(&p.with_file_name("contact3d_report.json"), &report)?;
    }
    if report.min_margin > 0.0 && report.d_c1 < epsilon {
        println!("PASS: the form is contact on every simplex");
        Ok(())
    } else {
        Err(CliError::Verification("the jiggled form is not certified contact".into()))
    }
}
