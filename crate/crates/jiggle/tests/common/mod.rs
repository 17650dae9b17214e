//! Oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};

use jiggle::complex::shape::volume;
use jiggle::complex::SimplicialComplex;

pub fn total_volume(k: &SimplicialComplex) -> f64 {
    k.top().iter().map(|s| volume(&k.points(s))).sum()
}

/// Barycentric chart of a full-dimensional simplex: `x ↦ λ(x)`.
pub struct Chart {
    origin: DVector<f64>,
    inv: DMatrix<f64>,
}

impl Chart {
    pub fn new(ps: &[DVector<f64>]) -> Self {
        let m = ps.len() - 1;
        let t = DMatrix::from_fn(m, m, |i, j| ps[j + 1][i] - ps[0][i]);
        Chart { origin: ps[0].clone(), inv: t.try_inverse().expect("degenerate simplex") }
    }

    pub fn coords(&self, x: &DVector<f64>) -> Vec<f64> {
        let l = &self.inv * (x - &self.origin);
        let mut out = vec![1.0 - l.sum()];
        out.extend(l.iter());
        out
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.coords(x).iter().all(|&c| c >= -tol)
    }
}

/// Interior-disjointness and covering oracle for a subdivision `s` of a
/// single simplex `root`: the volumes add up to the root's volume and
/// random points of the root lie in exactly one top simplex. Returns the
/// relative volume error.
pub fn partition_error(root: &[DVector<f64>], s: &SimplicialComplex, samples: usize, seed: u64) -> f64 {
    let parent = volume(root);
    let err = (total_volume(s) - parent).abs() / parent;
    let charts: Vec<Chart> = s.top().iter().map(|t| Chart::new(&s.points(t))).collect();
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut w: Vec<f64> = (0..root.len()).map(|_| -rng.gen::<f64>().ln()).collect();
        let sum: f64 = w.iter().sum();
        w.iter_mut().for_each(|c| *c /= sum);
        let x = root.iter().zip(&w).fold(DVector::zeros(root[0].len()), |acc, (p, c)| acc + p * *c);
        let hits = charts.iter().filter(|c| c.contains(&x, 1e-12)).count();
        assert_eq!(hits, 1, "sample {x:?} lies in {hits} top simplices");
    }
    err
}

/// A relative jiggling problem on a path: `k1` an edge inside `u1`, and in
/// even cases the last vertex frozen inside a small `u2`.
pub struct RelativeCase {
    pub map: jiggle::pl_maps::PiecewiseMap,
    pub k1: jiggle::complex::Subcomplex,
    pub k2: jiggle::complex::Subcomplex,
    pub u1: jiggle::complex::Region,
    pub u2: jiggle::complex::Region,
    /// Left end and length of the frozen edge.
    pub edge: (f64, f64),
}

/// Ten randomized relative problems for `maxrank(1, 1)`, from a fixed seed.
pub fn relative_cases() -> Vec<RelativeCase> {
    use jiggle::complex::{interval, Region, Simplex, Subcomplex};
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x2545f4914f6cdd1d);
    (0..10)
        .map(|case| {
            let n = rng.gen_range(4..9);
            let h = 1.0 / n as f64;
            let a = rng.gen_range(0..n - 2);
            // random data, monotone around the frozen edge so that the
            // input solves the relation on U′
            let vals: Vec<DVector<f64>> = (0..=n)
                .map(|v| {
                    let y = if v + 1 >= a && v <= a + 2 { 0.5 * v as f64 * h } else { rng.gen_range(-0.2..0.2) };
                    DVector::from_element(1, y)
                })
                .collect();
            let map = jiggle::pl_maps::PiecewiseMap::from_vertex_values(std::sync::Arc::new(interval(0.0, 1.0, n)), vals)
                .unwrap();
            let k1 = Subcomplex::closure([&Simplex::new(vec![a, a + 1]).unwrap()]);
            let u1 = Region::Box { lo: vec![(a as f64 - 0.3) * h], hi: vec![(a as f64 + 1.3) * h] };
            let (k2, u2) = if case % 2 == 0 {
                (Subcomplex::closure([&Simplex::vertex(n)]), Region::Box { lo: vec![1.0 - 0.3 * h], hi: vec![1.0] })
            } else {
                (Subcomplex::default(), Region::Empty)
            };
            RelativeCase { map, k1, k2, u1, u2, edge: (a as f64 * h, h) }
        })
        .collect()
}
