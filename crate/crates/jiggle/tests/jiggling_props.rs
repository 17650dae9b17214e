use std::sync::Arc;

use nalgebra::DVector;
use proptest::prelude::*;

use jiggle::complex::shape::edge_matrix;
use jiggle::complex::{greedy_color, interval, square_grid, SimplicialComplex};
use jiggle::jiggling::{
    certify_map, frozen_hash, jiggle_linear, jiggle_relative, jiggle_triangulation, slope_perturb_color,
    slope_perturb_simplex, JigglingConfig,
};
use jiggle::pl_maps::{c0_c1_distance, linearize, PiecewiseMap};
use jiggle::relations::{maxrank_relation, transversality_relation, Certification, Distribution, RelationSet};
use jiggle::subdivision::crystalline_subdivide;

mod common;

/// A PL map with small random values, often far from a solution.
fn pl_map(k: SimplicialComplex, n: usize, values: &[f64]) -> PiecewiseMap {
    let vals = (0..k.num_vertices())
        .map(|v| DVector::from_fn(n, |i, _| values[(v * n + i) % values.len()]))
        .collect();
    PiecewiseMap::from_vertex_values(Arc::new(k), vals).unwrap()
}

#[derive(Debug, Clone)]
enum Scenario {
    Path(usize),
    Grid(usize),
    Curve(usize),
}

impl Scenario {
    fn build(&self, values: &[f64]) -> (PiecewiseMap, RelationSet) {
        match *self {
            Scenario::Path(n) => (pl_map(interval(0.0, 1.0, n), 1, values), RelationSet::uniform(maxrank_relation(1, 1))),
            Scenario::Grid(n) => (pl_map(square_grid(n, 1.0 / n as f64), 1, values), RelationSet::uniform(maxrank_relation(2, 1))),
            Scenario::Curve(n) => {
                let xi = Distribution::constant(vec![vec![1.0, 0.0]]).unwrap();
                (pl_map(interval(0.0, 1.0, n), 2, values), RelationSet::uniform(transversality_relation(xi, 1)))
            }
        }
    }
}

fn scenario() -> impl Strategy<Value = (Scenario, Vec<f64>)> {
    (
        prop_oneof![(1usize..6).prop_map(Scenario::Path), (1usize..3).prop_map(Scenario::Grid), (1usize..5).prop_map(Scenario::Curve)],
        prop::collection::vec(prop_oneof![Just(0.0), -0.2f64..0.2], 1..7),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn main_postcondition((sc, values) in scenario(), eps in prop_oneof![Just(0.2), Just(0.05)]) {
        let (s, rels) = sc.build(&values);
        let cfg = JigglingConfig::new(eps);
        let (out, rep) = jiggle_linear(&s, &rels, &cfg).unwrap();
        prop_assert!(out.is_pl());
        prop_assert_eq!(out.complex().top().len(), s.complex().top().len() << (rep.level as usize * s.complex().dim().unwrap()));
        let margins = certify_map(&out, &rels, Certification::Sampled, 0.0).unwrap();
        prop_assert!(margins.iter().all(|&m| m > 0.0), "{margins:?}");
        let (_, d1) = c0_c1_distance(&s, &out).unwrap();
        prop_assert!(d1 < eps);
        prop_assert!(rep.max_budget_ratio < 1.0);
        prop_assert!(out.continuity_defect() <= 1e-12);

        // a certified solution is kept
        let (again, rep2) = jiggle_linear(&out, &rels, &cfg).unwrap();
        prop_assert_eq!(rep2.perturbed, 0);
        let relin = linearize(&out, rep2.level).unwrap();
        prop_assert_eq!(again.vertex_values(), relin.vertex_values());
    }

    #[test]
    fn color_classes_commute((sc, values) in scenario(), seed in any::<u64>()) {
        let (s, rels) = sc.build(&values);
        let k = crystalline_subdivide(s.complex(), 1).unwrap();
        let s = linearize(&s, 1).unwrap();
        let c = greedy_color(&k).unwrap();
        let rel = rels.for_root(0);
        for color in 0..c.num_colors {
            let mut class = c.class(color);
            let direct = slope_perturb_color(&s, &c, color, rel, 0.05).unwrap();
            let mut rng = seed ^ color as u64;
            for i in (1..class.len()).rev() {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                class.swap(i, (rng >> 33) as usize % (i + 1));
            }
            let mut seq = s.clone();
            for t in class {
                seq = slope_perturb_simplex(&seq, t, rel, 0.05).unwrap();
            }
            prop_assert_eq!(seq.vertex_values(), direct.vertex_values());
        }
    }
}

/// The frozen vertex data is bit-identical and every simplex outside `u2`
/// is certified.
#[test]
fn relative_identity() {
    let rels = RelationSet::uniform(maxrank_relation(1, 1));
    for (i, c) in common::relative_cases().iter().enumerate() {
        let cfg = JigglingConfig::new(0.2);
        let (out, rep) = jiggle_relative(&c.map, &rels, &c.k1, &c.k2, &c.u1, &c.u2, &cfg).unwrap();
        let frozen = c.k1.union(&c.k2);
        let before = frozen_hash(&linearize(&c.map, rep.level).unwrap(), &frozen);
        assert_eq!(rep.fixed_hash.as_deref(), Some(before.as_str()), "case {i}");
        assert_eq!(frozen_hash(&out, &frozen), before, "case {i}");
        let (x0, h) = c.edge;
        for j in 0..=10 {
            let x = DVector::from_element(1, x0 + h * j as f64 / 10.0);
            assert_eq!(out.eval(&x).unwrap(), c.map.eval(&x).unwrap(), "case {i}");
        }
        for (t, m) in rep.margins.iter().enumerate() {
            assert!(rep.exempt.contains(&t) || *m > 0.0, "case {i}: top {t} margin {m}");
        }
    }
}

#[test]
fn triangulation_keeps_orientations_and_combinatorics() {
    for n in 1..=3 {
        let k = square_grid(n, 1.0 / n as f64);
        let res = jiggle_triangulation(&k, &Distribution::horizontal(2), &JigglingConfig::new(0.05)).unwrap();
        let kl = crystalline_subdivide(&k, res.report.level).unwrap();
        assert_eq!(res.complex.top(), kl.top());
        for (s, t) in kl.top().iter().zip(res.complex.top()) {
            let before = edge_matrix(&kl.points(s)).determinant();
            let after = edge_matrix(&res.complex.points(t)).determinant();
            assert!(before * after > 0.0);
        }
        assert!(res.general_position.iter().all(|g| g.in_general_position));
        for v in 0..kl.num_vertices() {
            assert!((res.complex.point(v) - kl.point(v)).norm() < 0.05);
        }
    }
}
