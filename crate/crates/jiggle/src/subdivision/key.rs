use std::cmp::Ordering;

use crate::complex::VertexId;

pub(crate) fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: i128, b: i128) -> i128 {
    a / gcd(a, b) * b
}

/// Exact barycentric coordinates of a point relative to the vertices of a
/// reference complex: `Σ (num_v / den) · v` with non-negative numerators
/// summing to `den`.
///
/// Keys are kept reduced, so equal points have equal keys.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaryKey {
    terms: Vec<(VertexId, i128)>,
    den: i128,
}

impl BaryKey {
    pub fn vertex(v: VertexId) -> Self {
        Self { terms: vec![(v, 1)], den: 1 }
    }

    fn normalized(mut terms: Vec<(VertexId, i128)>, den: i128) -> Self {
        terms.retain(|t| t.1 != 0);
        terms.sort_unstable_by_key(|t| t.0);
        let g = terms.iter().fold(den, |g, t| gcd(g, t.1));
        for t in &mut terms {
            t.1 /= g;
        }
        Self { terms, den: den / g }
    }

    /// `Σ (w_i / den) · key_i` for non-negative integer weights summing to `den`.
    pub fn combine(parts: &[(&BaryKey, i128)], den: i128) -> Self {
        debug_assert_eq!(parts.iter().map(|p| p.1).sum::<i128>(), den);
        let l = parts
            .iter()
            .filter(|p| p.1 != 0)
            .fold(1, |l, p| lcm(l, p.0.den));
        let mut acc: Vec<(VertexId, i128)> = Vec::new();
        for (k, w) in parts {
            if *w == 0 {
                continue;
            }
            let f = w * (l / k.den);
            for &(v, n) in &k.terms {
                acc.push((v, n * f));
            }
        }
        acc.sort_unstable_by_key(|t| t.0);
        let mut merged: Vec<(VertexId, i128)> = Vec::with_capacity(acc.len());
        for (v, n) in acc {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += n,
                _ => merged.push((v, n)),
            }
        }
        Self::normalized(merged, den * l)
    }

    /// Barycenter of a list of keys.
    pub fn barycenter(keys: &[BaryKey]) -> Self {
        let parts: Vec<(&BaryKey, i128)> = keys.iter().map(|k| (k, 1)).collect();
        Self::combine(&parts, keys.len() as i128)
    }

    pub fn terms(&self) -> &[(VertexId, i128)] {
        &self.terms
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    /// Vertices carrying positive weight.
    pub fn support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.terms.iter().map(|t| t.0)
    }

    pub fn is_vertex(&self) -> Option<VertexId> {
        (self.terms.len() == 1).then(|| self.terms[0].0)
    }

    /// Coefficient of `v` as a reduced fraction.
    pub fn coeff(&self, v: VertexId) -> (i128, i128) {
        match self.terms.binary_search_by_key(&v, |t| t.0) {
            Ok(i) => {
                let g = gcd(self.terms[i].1, self.den);
                (self.terms[i].1 / g, self.den / g)
            }
            Err(_) => (0, 1),
        }
    }

    pub fn point(&self, coords: &[Vec<f64>]) -> Vec<f64> {
        let n = coords[self.terms[0].0].len();
        let mut x = vec![0.0; n];
        for &(v, num) in &self.terms {
            for (xi, ci) in x.iter_mut().zip(&coords[v]) {
                *xi += num as f64 * ci;
            }
        }
        let d = self.den as f64;
        x.iter_mut().for_each(|xi| *xi /= d);
        x
    }

    /// Rewrites a key over the vertices of a complex whose own vertices have
    /// the keys `parent` over a root complex.
    pub fn compose(&self, parent: &[BaryKey]) -> BaryKey {
        let parts: Vec<(&BaryKey, i128)> = self.terms.iter().map(|&(v, n)| (&parent[v], n)).collect();
        Self::combine(&parts, self.den)
    }

    /// Weighted vertex rank `Σ λ_v · v` as an unreduced fraction.
    fn rank(&self) -> (i128, i128) {
        (
            self.terms.iter().map(|&(v, n)| v as i128 * n).sum(),
            self.den,
        )
    }

    /// Order of the vertices of a crystalline subdivision: increasing
    /// weighted rank, ties broken lexicographically.
    pub fn order_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.rank();
        let (c, d) = other.rank();
        (a * d).cmp(&(c * b)).then_with(|| self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_and_reduction() {
        let (a, b) = (BaryKey::vertex(0), BaryKey::vertex(3));
        let m = BaryKey::combine(&[(&a, 1), (&b, 1)], 2);
        assert_eq!(m.terms(), &[(0, 1), (3, 1)]);
        assert_eq!(m.den(), 2);
        let q = BaryKey::combine(&[(&a, 2), (&m, 2)], 4);
        assert_eq!(q.coeff(0), (3, 4));
        assert_eq!(q.coeff(3), (1, 4));
        let same = BaryKey::combine(&[(&a, 2), (&a, 0), (&a, 0), (&a, 0)], 2);
        assert_eq!(same, a);
    }

    #[test]
    fn point_and_compose() {
        let coords = vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 4.0]];
        let k = BaryKey::combine(&[(&BaryKey::vertex(1), 1), (&BaryKey::vertex(2), 3)], 4);
        assert_eq!(k.point(&coords), vec![1.0, 3.0]);
        let parent = vec![BaryKey::vertex(0), BaryKey::barycenter(&[BaryKey::vertex(0), BaryKey::vertex(2)])];
        let child = BaryKey::combine(&[(&BaryKey::vertex(0), 1), (&BaryKey::vertex(1), 1)], 2);
        let c = child.compose(&parent);
        assert_eq!(c.coeff(0), (3, 4));
        assert_eq!(c.coeff(2), (1, 4));
    }

    #[test]
    fn rank_order() {
        let a = BaryKey::vertex(1);
        let b = BaryKey::combine(&[(&BaryKey::vertex(0), 1), (&BaryKey::vertex(2), 1)], 2);
        // equal rank, so the lexicographic tie break decides
        assert_eq!(a.order_cmp(&b), Ordering::Greater);
        assert_eq!(BaryKey::vertex(0).order_cmp(&b), Ordering::Less);
        assert_eq!(BaryKey::vertex(2).order_cmp(&b), Ordering::Greater);
    }
}
