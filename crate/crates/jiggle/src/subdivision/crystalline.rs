use std::collections::HashMap;

use super::key::BaryKey;
use crate::complex::shape::is_degenerate;
use crate::complex::{Lineage, Simplex, SimplicialComplex};
use crate::{Error, Result};

/// Children of an ordered simplex at a given level, as lists of keys in
/// path order.
///
/// The simplex with ordered vertices `u_0 < … < u_m` is identified with the
/// region `0 ≤ x_1 ≤ … ≤ x_m ≤ 1` of the unit cube through
/// `x_i = λ_0 + … + λ_{i-1}`. The cube is cut into `2^{ℓm}` subcubes, each
/// cut into Kuhn simplices; those inside the region are the children.
pub(crate) fn kuhn_children(keys: &[BaryKey], level: u32) -> Vec<Vec<BaryKey>> {
    let m = keys.len() - 1;
    if m == 0 || level == 0 {
        return vec![keys.to_vec()];
    }
    let n: i64 = 1 << level;
    let mut cache: HashMap<Vec<i64>, BaryKey> = HashMap::new();
    let mut key_of = |x: &[i64]| -> BaryKey {
        if let Some(k) = cache.get(x) {
            return k.clone();
        }
        let mut parts = Vec::with_capacity(m + 1);
        parts.push((&keys[0], x[0] as i128));
        for j in 1..m {
            parts.push((&keys[j], (x[j] - x[j - 1]) as i128));
        }
        parts.push((&keys[m], (n - x[m - 1]) as i128));
        let k = BaryKey::combine(&parts, n as i128);
        cache.insert(x.to_vec(), k.clone());
        k
    };
    let perms = permutations(m);
    let mut out = Vec::new();
    let mut c = vec![0i64; m];
    loop {
        for p in &perms {
            let mut path = Vec::with_capacity(m + 1);
            let mut x = c.clone();
            path.push(x.clone());
            for &axis in p {
                x[axis] += 1;
                path.push(x.clone());
            }
            let inside = path
                .iter()
                .all(|x| x.windows(2).all(|w| w[0] <= w[1]));
            if inside {
                out.push(path.iter().map(|x| key_of(x)).collect());
            }
        }
        // next non-decreasing offset vector
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] + 1 < n {
                let v = c[i] + 1;
                for cj in c.iter_mut().skip(i) {
                    *cj = v;
                }
                break;
            }
        }
    }
}

pub(crate) fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Assembly of cells given by keys into a complex: vertices are numbered in
/// increasing weighted rank, simplices sorted, keys composed with those of
/// the source complex.
pub(crate) struct Assembled {
    pub complex: SimplicialComplex,
    /// Keys relative to the vertices of the source complex.
    pub local_keys: Vec<BaryKey>,
    /// Top simplex order: `order[i]` is the input cell of top simplex `i`.
    pub order: Vec<usize>,
}

pub(crate) fn assemble(
    source: &SimplicialComplex,
    cells: &[Vec<BaryKey>],
    lineage: impl Fn(usize) -> Lineage,
) -> Assembled {
    let mut ids: HashMap<&BaryKey, usize> = HashMap::new();
    let mut uniq: Vec<&BaryKey> = Vec::new();
    for c in cells {
        for k in c {
            ids.entry(k).or_insert_with(|| {
                uniq.push(k);
                uniq.len() - 1
            });
        }
    }
    let mut sorted: Vec<usize> = (0..uniq.len()).collect();
    sorted.sort_by(|&a, &b| uniq[a].order_cmp(uniq[b]));
    let mut new_id = vec![0usize; uniq.len()];
    for (pos, &i) in sorted.iter().enumerate() {
        new_id[i] = pos;
    }
    let local_keys: Vec<BaryKey> = sorted.iter().map(|&i| uniq[i].clone()).collect();
    let coords: Vec<Vec<f64>> = local_keys.iter().map(|k| k.point(source.coords())).collect();
    let mut tops: Vec<(Simplex, usize)> = cells
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let mut v: Vec<usize> = c.iter().map(|k| new_id[ids[k]]).collect();
            v.sort_unstable();
            (Simplex::from_sorted(v), ci)
        })
        .collect();
    tops.sort();
    let order: Vec<usize> = tops.iter().map(|t| t.1).collect();
    let mut complex = SimplicialComplex::from_top_sorted(
        source.ambient_dim(),
        coords,
        tops.into_iter().map(|t| t.0).collect(),
    );
    complex.set_lineage(order.iter().map(|&c| lineage(c)).collect());
    let root_keys = match source.keys() {
        Some(parent) => local_keys.iter().map(|k| k.compose(parent)).collect(),
        None => local_keys.clone(),
    };
    complex.set_keys(root_keys);
    Assembled { complex, local_keys, order }
}

/// A crystalline subdivision together with the parent of each top simplex.
pub(crate) struct Refinement {
    pub complex: SimplicialComplex,
    /// Index in the source complex's top list of each new top simplex.
    pub parents: Vec<usize>,
    /// Keys relative to the vertices of the source complex.
    pub local_keys: Vec<BaryKey>,
}

pub(crate) fn check_subdividable(k: &SimplicialComplex) -> Result<()> {
    if k.top().is_empty() {
        return Err(Error::Invalid("empty complex".into()));
    }
    if !k.is_pure() {
        return Err(Error::NotPure);
    }
    for s in k.top() {
        if s.dim() > 0 && is_degenerate(&k.points(s)) {
            return Err(Error::Degenerate(s.vertices().to_vec()));
        }
    }
    Ok(())
}

pub(crate) fn parent_lineage(k: &SimplicialComplex, t: usize, extra: u32) -> Lineage {
    match k.lineage() {
        Some(l) => Lineage {
            parent: l[t].parent.clone(),
            level: l[t].level + extra,
        },
        None => Lineage {
            parent: k.top()[t].clone(),
            level: extra,
        },
    }
}

pub(crate) fn refine(k: &SimplicialComplex, level: u32) -> Result<Refinement> {
    check_subdividable(k)?;
    let mut cells = Vec::new();
    let mut cell_parent = Vec::new();
    for (t, s) in k.top().iter().enumerate() {
        let keys: Vec<BaryKey> = s.vertices().iter().map(|&v| BaryKey::vertex(v)).collect();
        for c in kuhn_children(&keys, level) {
            cells.push(c);
            cell_parent.push(t);
        }
    }
    let a = assemble(k, &cells, |c| parent_lineage(k, cell_parent[c], level));
    let parents = a.order.iter().map(|&c| cell_parent[c]).collect();
    Ok(Refinement {
        complex: a.complex,
        parents,
        local_keys: a.local_keys,
    })
}

/// The level `ℓ` crystalline subdivision `K_ℓ` of a pure ordered complex.
///
/// Every top simplex is replaced by its `2^{ℓm}` Kuhn children. Vertices of
/// `K_ℓ` are numbered by increasing weighted rank `Σ λ_v · v`, which keeps
/// the order consistent along every Kuhn path, so `(K_ℓ)_1 = K_{ℓ+1}`.
/// Each top simplex records its ancestor in the root complex and its level;
/// each vertex records its exact barycentric key over the root vertices.
pub fn crystalline_subdivide(k: &SimplicialComplex, level: u32) -> Result<SimplicialComplex> {
    Ok(refine(k, level)?.complex)
}
