use super::crystalline_subdivide;
use crate::complex::{is_nice, max_subcomplex_in, Region, SimplicialComplex, Subcomplex};
use crate::{Error, Result};

/// A subdivision level with one nice subcomplex per cover member.
#[derive(Clone, Debug)]
pub struct NiceCover {
    pub level: u32,
    pub complex: SimplicialComplex,
    /// `subcomplexes[i]` is the largest subcomplex inside the `i`-th region.
    pub subcomplexes: Vec<Subcomplex>,
}

/// Smallest `ℓ ≤ l_max` at which every top simplex of `K_ℓ` lies in some
/// region of the cover, together with the maximal subcomplexes in each.
pub fn nice_cover(k: &SimplicialComplex, cover: &[Region], l_max: u32) -> Result<NiceCover> {
    for r in cover {
        if !r.check_dim(k.ambient_dim()) {
            return Err(Error::Invalid("cover region has the wrong dimension".into()));
        }
    }
    for level in 0..=l_max {
        let kl = crystalline_subdivide(k, level)?;
        let subs: Vec<Subcomplex> = cover.iter().map(|u| max_subcomplex_in(&kl, u)).collect();
        let covered = kl
            .top()
            .iter()
            .all(|s| subs.iter().any(|q| q.contains(s)));
        if covered {
            for q in &subs {
                debug_assert!(is_nice(&kl, q)?);
            }
            return Ok(NiceCover { level, complex: kl, subcomplexes: subs });
        }
    }
    Err(Error::InsufficientMargin(l_max))
}
