use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::map::PiecewiseMap;
use super::piece::{AffinePiece, BlendPiece, Piece};
use crate::complex::{Region, Simplex, SimplicialComplex, Subcomplex};
use crate::subdivision::refine;
use crate::{Error, Result};

/// The PL map on `K_ℓ` agreeing with `s` on every vertex of `K_ℓ`.
pub fn linearize(s: &PiecewiseMap, level: u32) -> Result<PiecewiseMap> {
    let r = refine(s.complex(), level)?;
    let v2t = s.complex().vertex_to_top();
    let values = r.local_keys.iter().map(|k| s.value_at_key(&v2t, k)).collect();
    PiecewiseMap::from_vertex_values(Arc::new(r.complex), values)
}

/// Which input the join parameter `t` weights in [`interpolate`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// `t · s_A + (1 − t) · s_B` with `t = 0` on `A`: restricts to `s_B` on
    /// `A` and to `s_A` on `B`.
    #[default]
    Literal,
    /// `t · s_B + (1 − t) · s_A`: restricts to `s_A` on `A`.
    Swapped,
}

fn check_partition(m: usize, a: &[usize], b: &[usize]) -> Result<()> {
    let mut seen = vec![false; m + 1];
    for &i in a.iter().chain(b) {
        if i > m || seen[i] {
            return Err(Error::Invalid("A and B must be opposite faces of the simplex".into()));
        }
        seen[i] = true;
    }
    if a.is_empty() || b.is_empty() || seen.iter().any(|s| !s) {
        return Err(Error::Invalid("A and B must be opposite faces of the simplex".into()));
    }
    Ok(())
}

fn same_piece(p: &Piece, q: &Piece) -> bool {
    if p.ptr_eq(q) {
        return true;
    }
    match (p, q) {
        (Piece::Affine(a), Piece::Affine(b)) => a == b,
        (Piece::Smooth(f), Piece::Smooth(g)) => f == g,
        _ => false,
    }
}

/// Interpolation between two maps on a simplex `Δ = A * B`, with `t` the
/// affine function that is 0 on the vertices `a` of `A` and 1 on the
/// vertices `b` of `B` (local indices into `delta`).
pub fn interpolate(
    delta: &[DVector<f64>],
    a: &[usize],
    b: &[usize],
    s_a: Piece,
    s_b: Piece,
    weighting: Weighting,
) -> Result<Piece> {
    check_partition(delta.len() - 1, a, b)?;
    if same_piece(&s_a, &s_b) {
        return Ok(s_a);
    }
    let mut weights = vec![0.0; delta.len()];
    for &i in b {
        weights[i] = 1.0;
    }
    let (first, second) = match weighting {
        Weighting::Literal => (s_a, s_b),
        Weighting::Swapped => (s_b, s_a),
    };
    Ok(Piece::Blend(Arc::new(BlendPiece::new(delta, weights, first, second)?)))
}

/// The affine map on `Δ = A * B` restricting to `s_a` on `A` and `s_b` on
/// `B`, built from vertex values.
pub fn join_map(
    delta: &[DVector<f64>],
    a: &[usize],
    b: &[usize],
    s_a: &AffinePiece,
    s_b: &AffinePiece,
) -> Result<AffinePiece> {
    check_partition(delta.len() - 1, a, b)?;
    let mut values = vec![DVector::zeros(0); delta.len()];
    for &i in a {
        values[i] = s_a.value_at(&delta[i]);
    }
    for &i in b {
        values[i] = s_b.value_at(&delta[i]);
    }
    AffinePiece::from_vertex_values(delta, values)
}

fn affine_from_table(k: &SimplicialComplex, t: usize, values: &[DVector<f64>]) -> Result<Piece> {
    let s = &k.top()[t];
    let vals = s.vertices().iter().map(|&v| values[v].clone()).collect();
    Ok(Piece::affine(AffinePiece::from_vertex_values(&k.points(s), vals)?))
}

/// Linearization of `s` over a subcomplex `K'` of its complex.
///
/// Works on `K_ℓ`. For each region `U_i` in input order whose maximal
/// subcomplex `K^i ⊂ K_ℓ` meets `K'`, the simplices of `K^i` become affine
/// and each simplex `A * B` of the ring of `K^i`, `A` its face in `K^i`,
/// becomes the interpolation between the previous map and the affine one
/// that equals the affine map on `A` and the previous map on `B`. The
/// result is PL near `|K'|` and equals `s` away from the regions and their
/// rings.
pub fn linearize_relative(
    s: &PiecewiseMap,
    kprime: &Subcomplex,
    regions: &[Region],
    level: u32,
) -> Result<PiecewiseMap> {
    let k0 = s.complex();
    for sx in kprime.iter() {
        if !k0.contains(sx) {
            return Err(Error::NotSubcomplex(sx.vertices().to_vec()));
        }
    }
    if let Some(r) = regions.iter().find(|r| !r.check_dim(k0.ambient_dim())) {
        return Err(Error::Invalid(format!("region {r:?} has the wrong dimension")));
    }
    if kprime.is_empty() {
        return Ok(s.clone());
    }
    let r = refine(k0, level)?;
    let k = Arc::new(r.complex);
    let v2t = k0.vertex_to_top();
    let values: Vec<DVector<f64>> = r.local_keys.iter().map(|key| s.value_at_key(&v2t, key)).collect();
    let in_kp: Vec<bool> = r
        .local_keys
        .iter()
        .map(|key| kprime.contains(&Simplex::from_sorted(key.support().collect())))
        .collect();
    let inside: Vec<Vec<bool>> = regions
        .iter()
        .map(|u| k.coords().iter().map(|c| u.contains(c)).collect())
        .collect();
    for v in (0..k.num_vertices()).filter(|&v| in_kp[v]) {
        if !inside.iter().any(|ins| ins[v]) {
            return Err(Error::NotCovered(k.vertex(v).to_vec()));
        }
    }
    for s in k.top() {
        let touches = s.vertices().iter().any(|&v| in_kp[v]);
        let covered = || inside.iter().any(|ins| s.vertices().iter().all(|&v| ins[v]));
        if touches && !covered() {
            return Err(Error::CoverTooCoarse(level));
        }
    }

    let mut pieces: Vec<Piece> = Vec::with_capacity(k.top().len());
    for (t, &p) in r.parents.iter().enumerate() {
        pieces.push(match s.piece(p) {
            Piece::Affine(_) => affine_from_table(&k, t, &values)?,
            other => other.clone(),
        });
    }
    for ins in &inside {
        let meets = (0..k.num_vertices()).any(|v| ins[v] && in_kp[v]);
        if !meets {
            continue;
        }
        for (t, sx) in k.top().iter().enumerate() {
            if pieces[t].is_affine() {
                continue;
            }
            let (a, b): (Vec<usize>, Vec<usize>) = (0..sx.len()).partition(|&i| ins[sx.vertices()[i]]);
            if a.is_empty() {
                continue;
            }
            let lin = affine_from_table(&k, t, &values)?;
            pieces[t] = if b.is_empty() {
                lin
            } else {
                let prev = pieces[t].clone();
                interpolate(&k.points(sx), &a, &b, prev, lin, Weighting::Literal)?
            };
        }
    }
    PiecewiseMap::from_parts(k, pieces, values)
}
