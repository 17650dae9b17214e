use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// A closed convex region of `R^N`.
///
/// Membership tests are closed: boundary points belong to the region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    All,
    Empty,
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    /// Intersection of the half spaces `normals[i] · x ≤ offsets[i]`.
    HalfSpaces { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    /// Closed `radius` neighbourhood of a region with a distance function.
    Neighborhood { base: Box<Region>, radius: f64 },
}

impl Region {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::All => true,
            Region::Empty => false,
            Region::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *a <= *v && *v <= *b),
            Region::Ball { center, radius } => sq_dist(x, center) <= radius * radius,
            Region::HalfSpaces { normals, offsets } => normals
                .iter()
                .zip(offsets)
                .all(|(a, b)| dot(a, x) <= *b),
            Region::Neighborhood { base, radius } => match base.distance(x) {
                Some(d) => d <= *radius,
                None => base.contains(x),
            },
        }
    }

    pub fn contains_point(&self, x: &DVector<f64>) -> bool {
        self.contains(x.as_slice())
    }

    /// Euclidean distance to the region when it has a closed form.
    pub fn distance(&self, x: &[f64]) -> Option<f64> {
        match self {
            Region::All => Some(0.0),
            Region::Empty => Some(f64::INFINITY),
            Region::Box { lo, hi } => Some(
                x.iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(v, (a, b))| {
                        let d = if v < a {
                            a - v
                        } else if v > b {
                            v - b
                        } else {
                            0.0
                        };
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt(),
            ),
            Region::Ball { center, radius } => Some((sq_dist(x, center).sqrt() - radius).max(0.0)),
            Region::HalfSpaces { .. } => None,
            Region::Neighborhood { base, radius } => {
                base.distance(x).map(|d| (d - radius).max(0.0))
            }
        }
    }

    /// Closed `r` neighbourhood, kept in closed form where possible.
    pub fn grown(&self, r: f64) -> Region {
        match self {
            Region::Ball { center, radius } => Region::Ball {
                center: center.clone(),
                radius: radius + r,
            },
            Region::Neighborhood { base, radius } => Region::Neighborhood {
                base: base.clone(),
                radius: radius + r,
            },
            Region::All | Region::Empty => self.clone(),
            _ => Region::Neighborhood {
                base: Box::new(self.clone()),
                radius: r,
            },
        }
    }

    /// Whether `grown` and `distance` are available.
    pub fn has_distance(&self) -> bool {
        match self {
            Region::HalfSpaces { .. } => false,
            Region::Neighborhood { base, .. } => base.has_distance(),
            _ => true,
        }
    }

    pub fn check_dim(&self, n: usize) -> bool {
        match self {
            Region::All | Region::Empty => true,
            Region::Box { lo, hi } => lo.len() == n && hi.len() == n,
            Region::Ball { center, radius } => center.len() == n && *radius >= 0.0,
            Region::HalfSpaces { normals, offsets } => {
                normals.len() == offsets.len() && normals.iter().all(|a| a.len() == n)
            }
            Region::Neighborhood { base, radius } => base.check_dim(n) && *radius >= 0.0,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
