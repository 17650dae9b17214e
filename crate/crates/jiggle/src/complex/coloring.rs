use std::collections::BTreeSet;

use serde::Serialize;

use super::SimplicialComplex;
use crate::{Error, Result};

/// A coloring of the top simplices, aligned with [`SimplicialComplex::top`].
///
/// Two top simplices interact when the vertex sets of their closed stars
/// meet; interacting simplices receive different colors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub num_colors: usize,
}

impl Coloring {
    /// Indices of the top simplices with color `c`.
    pub fn class(&self, c: usize) -> Vec<usize> {
        self.colors
            .iter()
            .enumerate()
            .filter(|(_, &k)| k == c)
            .map(|(i, _)| i)
            .collect()
    }

    /// Largest color index, the `C` of a coloring by `[C] = {0, …, C}`.
    pub fn max_color(&self) -> usize {
        self.num_colors.saturating_sub(1)
    }

    pub fn is_valid_for(&self, k: &SimplicialComplex) -> bool {
        if self.colors.len() != k.top().len() {
            return false;
        }
        let graph = interaction_graph(k);
        graph.iter().enumerate().all(|(i, nb)| {
            self.colors[i] < self.num_colors && nb.iter().all(|&j| self.colors[i] != self.colors[j])
        })
    }
}

/// Vertex sets of the closed stars of the top simplices.
fn star_vertex_sets(k: &SimplicialComplex) -> Vec<BTreeSet<usize>> {
    let mut incident = vec![Vec::new(); k.num_vertices()];
    for (i, s) in k.maximal().iter().enumerate() {
        for &v in s.vertices() {
            incident[v].push(i);
        }
    }
    k.top()
        .iter()
        .map(|s| {
            let mut set = BTreeSet::new();
            for &v in s.vertices() {
                for &m in &incident[v] {
                    set.extend(k.maximal()[m].vertices().iter().copied());
                }
            }
            set
        })
        .collect()
}

/// Adjacency lists of the interaction relation on top simplices.
pub fn interaction_graph(k: &SimplicialComplex) -> Vec<Vec<usize>> {
    let stars = star_vertex_sets(k);
    let mut by_vertex = vec![Vec::new(); k.num_vertices()];
    for (i, set) in stars.iter().enumerate() {
        for &v in set {
            by_vertex[v].push(i);
        }
    }
    stars
        .iter()
        .enumerate()
        .map(|(i, set)| {
            let mut nb = BTreeSet::new();
            for &v in set {
                nb.extend(by_vertex[v].iter().copied().filter(|&j| j != i));
            }
            nb.into_iter().collect()
        })
        .collect()
}

/// Greedy coloring: top simplices in lexicographic order, smallest free color.
pub fn greedy_color(k: &SimplicialComplex) -> Result<Coloring> {
    if !k.is_pure() {
        return Err(Error::NotPure);
    }
    let graph = interaction_graph(k);
    let mut colors = vec![usize::MAX; graph.len()];
    let mut num_colors = 0;
    for i in 0..graph.len() {
        let used: BTreeSet<usize> = graph[i]
            .iter()
            .map(|&j| colors[j])
            .filter(|&c| c != usize::MAX)
            .collect();
        let c = (0..).find(|c| !used.contains(c)).expect("unbounded range");
        colors[i] = c;
        num_colors = num_colors.max(c + 1);
    }
    Ok(Coloring { colors, num_colors })
}

/// Upper bound `(3^m − 1) · m! · A` on the colors needed by a crystalline
/// subdivision of a complex with `a` top simplices of dimension `m`.
pub fn crystalline_color_bound(m: usize, a: usize) -> usize {
    let fact: usize = (1..=m).product();
    (3usize.pow(m as u32) - 1) * fact * a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{interval, square_grid};

    #[test]
    fn path_of_six_edges_needs_four_colors() {
        // N(e_i) = {i-1, …, i+2}, so e_i and e_j interact iff |i - j| ≤ 3
        let k = interval(0.0, 6.0, 6);
        let c = greedy_color(&k).unwrap();
        assert_eq!(c.colors, vec![0, 1, 2, 3, 0, 1]);
        assert_eq!(c.num_colors, 4);
        assert!(c.is_valid_for(&k));
    }

    #[test]
    fn grid_coloring_is_valid_and_bounded() {
        let k = square_grid(4, 0.25);
        let c = greedy_color(&k).unwrap();
        assert!(c.is_valid_for(&k));
        assert!(c.num_colors <= crystalline_color_bound(2, 32));
    }

    #[test]
    fn bound_formula() {
        assert_eq!(crystalline_color_bound(1, 1), 2);
        assert_eq!(crystalline_color_bound(2, 1), 16);
        assert_eq!(crystalline_color_bound(3, 2), 2 * 26 * 6);
    }
}
