use std::collections::BTreeSet;

use nalgebra::DVector;
use proptest::prelude::*;

use jiggle::complex::shape::{rmax, volume};
use jiggle::complex::{square_grid, standard_simplex, validate_complex, Region, SimplicialComplex};
use jiggle::subdivision::{crystalline_subdivide, generalized_subdivide, model_simplices, required_level, CellKind};

mod common;
use common::{partition_error, total_volume, Chart};

fn simplex_complex(ps: &[Vec<f64>]) -> SimplicialComplex {
    let m = ps.len() - 1;
    SimplicialComplex::from_lists(m, ps.to_vec(), &[(0..=m).collect()]).unwrap()
}

fn simplex_points(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, m), m + 1).prop_filter("non-degenerate", |ps| {
        let p: Vec<DVector<f64>> = ps.iter().map(|v| DVector::from_vec(v.clone())).collect();
        volume(&p) > 1e-3 * rmax(&p).powi(ps.len() as i32 - 1)
    })
}

/// Count, volume sum, containment and point location for `K_ℓ` of one
/// simplex; pairwise validity on the small cases.
fn check_count_law(ps: &[Vec<f64>], level: u32) {
    let k = simplex_complex(ps);
    let m = ps.len() - 1;
    let s = crystalline_subdivide(&k, level).unwrap();
    assert_eq!(s.top().len(), 1 << (level as usize * m));
    let root = k.points(&k.top()[0]);
    assert!(partition_error(&root, &s, 200, level as u64) <= 1e-9);
    let chart = Chart::new(&root);
    for v in 0..s.num_vertices() {
        assert!(chart.contains(&s.point(v), 1e-9));
    }
    if s.top().len() <= 64 {
        assert!(validate_complex(&s).is_valid());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn count_law_on_random_simplices(ps in (1usize..=4).prop_flat_map(simplex_points), level in 0u32..=2) {
        check_count_law(&ps, level);
    }

    #[test]
    fn subdivisions_compose(ps in (1usize..=3).prop_flat_map(simplex_points), a in 0u32..=2, b in 0u32..=1) {
        let k = simplex_complex(&ps);
        let once = crystalline_subdivide(&k, a + b).unwrap();
        let twice = crystalline_subdivide(&crystalline_subdivide(&k, a).unwrap(), b).unwrap();
        prop_assert_eq!(once.top().len(), twice.top().len());
        prop_assert_eq!(once.num_vertices(), twice.num_vertices());
    }
}

/// Grid subdivisions glue along shared edges: no vertex is duplicated and
/// every interior edge has two triangles.
#[test]
fn boundary_compatibility() {
    for n in 1..=3usize {
        for level in 0..=3u32 {
            let s = crystalline_subdivide(&square_grid(n, 1.0), level).unwrap();
            let side = n << level;
            assert_eq!(s.num_vertices(), (side + 1) * (side + 1));
            let mut seen = BTreeSet::new();
            for v in 0..s.num_vertices() {
                let p = s.vertex(v);
                assert!(seen.insert(((p[0] * side as f64).round() as i64, (p[1] * side as f64).round() as i64)));
            }
            assert!(validate_complex(&s).is_valid());
            let f = s.f_vector();
            // Euler characteristic of a disk
            assert_eq!(f[0] as i64 - f[1] as i64 + f[2] as i64, 1);
        }
    }
}

fn point_key(p: &[f64]) -> Vec<i64> {
    p.iter().map(|x| (x * 1e9).round() as i64).collect()
}

fn top_keys(k: &SimplicialComplex) -> BTreeSet<BTreeSet<Vec<i64>>> {
    k.top()
        .iter()
        .map(|s| s.vertices().iter().map(|&v| point_key(k.vertex(v))).collect())
        .collect()
}

#[test]
fn generalized_subdivision_postconditions() {
    let k = square_grid(2, 0.5);
    let a = Region::Ball { center: vec![0.5, 0.5], radius: 0.1 };
    let delta = 0.4;
    let l0 = required_level(&k, &a, delta).unwrap();
    for l1 in l0..=l0 + 1 {
        let g = generalized_subdivide(&k, &a, delta, l0, l1).unwrap();
        assert!(validate_complex(&g.complex).is_valid());
        assert!((total_volume(&g.complex) - 1.0).abs() < 1e-9);
        assert_eq!(g.kinds.len(), g.complex.top().len());
        let fine = top_keys(&crystalline_subdivide(&k, l1).unwrap());
        let far = Region::Neighborhood { base: Box::new(a.clone()), radius: delta };
        for (t, s) in g.complex.top().iter().enumerate() {
            let pts = g.complex.points(s);
            if pts.iter().all(|p| !far.contains_point(p)) {
                let key: BTreeSet<Vec<i64>> = pts.iter().map(|p| point_key(p.as_slice())).collect();
                assert!(fine.contains(&key), "top {t} outside B(A, δ) is not in K_l1");
                assert_eq!(g.kinds[t], CellKind::Crystalline { level: l1 });
            }
        }
    }
    assert!(generalized_subdivide(&k, &a, delta, l0.saturating_sub(1), l0).is_err() || l0 == 0);
}

#[test]
fn every_subdivision_simplex_has_a_model() {
    for m in 1..=3 {
        let k = standard_simplex(m);
        let cat = model_simplices(&k).unwrap();
        for level in 0..=3 {
            let s = crystalline_subdivide(&k, level).unwrap();
            for t in 0..s.top().len() {
                assert!(cat.match_simplex(&s, t).is_some(), "m {m} level {level} top {t}");
            }
        }
    }
    let k = square_grid(1, 1.0);
    let cat = model_simplices(&k).unwrap();
    let a = Region::Ball { center: vec![0.3, 0.6], radius: 0.05 };
    let l0 = required_level(&k, &a, 0.4).unwrap();
    for l1 in l0..=3.max(l0) {
        let g = generalized_subdivide(&k, &a, 0.4, l0, l1).unwrap();
        for t in 0..g.complex.top().len() {
            assert!(cat.match_simplex(&g.complex, t).is_some(), "generalized top {t} at l1 {l1}");
        }
    }
}
