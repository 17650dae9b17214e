use std::sync::Arc;

use nalgebra::DVector;

use super::*;
use crate::complex::{interval, kuhn_cube, square_grid, SimplicialComplex};
use crate::pl_maps::{c0_c1_distance, SmoothFn};
use crate::relations::{contact3d_relation, maxrank_relation, Distribution};
use crate::subdivision::crystalline_subdivide;

fn constant_map(k: SimplicialComplex, value: &[f64]) -> PiecewiseMap {
    let n = k.num_vertices();
    PiecewiseMap::from_vertex_values(Arc::new(k), vec![DVector::from_column_slice(value); n]).unwrap()
}

#[test]
fn zero_map_on_an_edge() {
    let s = constant_map(interval(0.0, 1.0, 1), &[0.0]);
    let rels = RelationSet::uniform(maxrank_relation(1, 1));
    let (out, rep) = jiggle_linear(&s, &rels, &JigglingConfig::new(0.1)).unwrap();
    assert_eq!(rep.level, 0);
    let slope = out.piece(0).as_affine().unwrap().slope()[(0, 0)];
    assert!(slope != 0.0 && slope.abs() < 0.1, "slope {slope}");
    assert!(rep.min_margin > 0.0 && rep.d_c1 < 0.1);
}

#[test]
fn zero_map_on_a_path() {
    let s = constant_map(interval(0.0, 1.0, 6), &[0.0]);
    let rels = RelationSet::uniform(maxrank_relation(1, 1));
    let (out, rep) = jiggle_linear(&s, &rels, &JigglingConfig::new(0.05)).unwrap();
    assert_eq!(rep.colors, 4);
    assert!(rep.margins.iter().all(|&m| m > 0.0));
    assert!(rep.max_budget_ratio < 1.0);
    assert_eq!(c0_c1_distance(&s, &out).unwrap().1, rep.d_c1);
}

#[test]
fn parabola_with_critical_point() {
    let k = Arc::new(interval(-1.0, 1.0, 2));
    let s = PiecewiseMap::from_smooth(k, SmoothFn::quadratic(1.0, 0.0)).unwrap();
    let rels = RelationSet::uniform(maxrank_relation(1, 1));
    let (_, rep) = jiggle_linear(&s, &rels, &JigglingConfig::new(0.5)).unwrap();
    assert!(rep.level >= 2, "level {}", rep.level);
    assert!(rep.linearization_c1 < 0.25 && rep.d_c1 < 0.5 && rep.min_margin > 0.0);
}

#[test]
fn solution_is_kept() {
    let k = Arc::new(square_grid(2, 0.5));
    let vals = (0..k.num_vertices()).map(|v| DVector::from_column_slice(k.vertex(v))).collect();
    let s = PiecewiseMap::from_vertex_values(k, vals).unwrap();
    let rels = RelationSet::uniform(maxrank_relation(2, 2));
    let (out, rep) = jiggle_linear(&s, &rels, &JigglingConfig::new(0.1)).unwrap();
    assert_eq!(rep.perturbed, 0);
    assert!(rep.retries.iter().all(|&r| r == 0));
    assert_eq!(out.vertex_values(), s.vertex_values());
}

#[test]
fn contact_from_a_constant_form() {
    let s = constant_map(kuhn_cube(), &[0.0, 0.0, 1.0]);
    let rels = RelationSet::uniform(contact3d_relation());
    let (_, rep) = jiggle_linear(&s, &rels, &JigglingConfig::new(0.1)).unwrap();
    assert!(rep.min_margin > 0.0 && rep.d_c1 < 0.1);
    eprintln!("contact: colors {} eps {:?}", rep.colors, rep.eps_per_color);
}

#[test]
fn thurston_grid() {
    let k = crystalline_subdivide(&square_grid(2, 0.5), 1).unwrap();
    let xi = Distribution::horizontal(2);
    let res = jiggle_triangulation(&k, &xi, &JigglingConfig::new(0.05)).unwrap();
    assert!(res.general_position[0].in_general_position);
    assert!(res.report.d_c1 < 0.05);
    eprintln!("thurston: colors {} perturbed {} min {}", res.report.colors, res.report.perturbed, res.report.min_margin);
}

fn parabola_on_0_2() -> PiecewiseMap {
    let k = Arc::new(interval(0.0, 2.0, 4));
    PiecewiseMap::from_smooth(k, SmoothFn::quadratic(1.0, 0.0)).unwrap()
}

#[test]
fn relative_keeps_the_frozen_part() {
    let s = parabola_on_0_2();
    let rels = RelationSet::uniform(maxrank_relation(1, 1));
    let k1 = Subcomplex::closure([&crate::complex::Simplex::new(vec![3, 4]).unwrap()]);
    let u1 = Region::Box { lo: vec![1.2], hi: vec![2.0] };
    let cfg = JigglingConfig::new(0.5);
    let (out, rep) = jiggle_relative(&s, &rels, &k1, &Subcomplex::default(), &u1, &Region::Empty, &cfg).unwrap();
    for i in 0..=20 {
        let x = DVector::from_element(1, 1.5 + 0.025 * i as f64);
        assert_eq!(out.eval(&x).unwrap(), s.eval(&x).unwrap());
    }
    let lin = crate::pl_maps::linearize(&s, rep.level).unwrap();
    assert_eq!(rep.fixed_hash.as_deref(), Some(frozen_hash(&lin, &k1).as_str()));
    assert_eq!(frozen_hash(&out, &k1), frozen_hash(&lin, &k1));
    assert!(rep.min_margin > 0.0 && rep.d_c1 < 0.5);
}

#[test]
fn relative_degenerate_cases() {
    let s = constant_map(interval(0.0, 1.0, 3), &[0.0]);
    let rels = RelationSet::uniform(maxrank_relation(1, 1));
    let cfg = JigglingConfig::new(0.1);
    let empty = Subcomplex::default();
    let (a, ra) = jiggle_relative(&s, &rels, &empty, &empty, &Region::Empty, &Region::Empty, &cfg).unwrap();
    let (b, rb) = jiggle_linear(&s, &rels, &cfg).unwrap();
    assert_eq!(a.vertex_values(), b.vertex_values());
    assert_eq!(ra.margins, rb.margins);
    let whole = Subcomplex::closure(s.complex().top());
    let (c, _) = jiggle_relative(&s, &rels, &empty, &whole, &Region::Empty, &Region::All, &cfg).unwrap();
    assert_eq!(c.vertex_values(), s.vertex_values());
}

#[test]
fn bundle_with_two_charts() {
    let s = constant_map(interval(0.0, 1.0, 4), &[0.0]);
    let rels = RelationSet::uniform(maxrank_relation(1, 1));
    let charts = vec![
        BundleChart::identity(Region::Box { lo: vec![0.0], hi: vec![0.6] }, 1),
        BundleChart { domain: Region::Box { lo: vec![0.4], hi: vec![1.0] }, matrix: vec![vec![2.0]], offset: vec![1.0] },
    ];
    let (out, rep) = jiggle_bundle(&s, &rels, &charts, &JigglingConfig::new(0.1)).unwrap();
    assert!(rep.min_margin > 0.0 && rep.d_c1 < 0.1);
    assert_eq!(out.complex().top().len(), 4);
}
