use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::jet::Jet1;
use crate::complex::shape::op_norm;
use crate::{Error, Result};

/// Margins at or below this are reported as zero.
pub const MARGIN_FLOOR: f64 = 1e-12;
/// Fraction of the perturbation size a swept candidate's margin must reach.
pub const THETA: f64 = 1.0 / 16.0;
/// Steps `k` of the sweep; candidates have size `ε (1 − 2^{-k})`.
pub const SWEEP_STEPS: u32 = 20;

pub(crate) fn floor(m: f64) -> f64 {
    if m > MARGIN_FLOOR {
        m
    } else {
        0.0
    }
}

/// An open, fiberwise dense first order relation, queried jet by jet.
pub trait RelationOracle: Send + Sync {
    fn name(&self) -> &str;

    /// A lower bound on the radius of a ball around `j` inside the relation,
    /// zero when `j` is not certified inside.
    fn margin(&self, j: &Jet1) -> f64;

    fn contains(&self, j: &Jet1) -> bool {
        self.margin(j) > 0.0
    }

    /// Rejects jets outside the relation's domain.
    fn check_domain(&self, _j: &Jet1) -> Result<()> {
        Ok(())
    }

    /// Slope increments tried by [`RelationOracle::fiber_perturb`], in order.
    fn directions(&self, j: &Jet1) -> Vec<DMatrix<f64>> {
        elementary_directions(j.target_dim(), j.domain_dim())
    }

    /// A jet with the same base and value, slope within `eps` and positive
    /// margin. See [`sweep`].
    fn fiber_perturb(&self, j: &Jet1, eps: f64) -> Result<Jet1> {
        sweep(self, j, eps)
    }

    /// How fast the margin can drop per unit change of the value near `j`.
    fn value_lipschitz(&self, _j: &Jet1) -> f64 {
        0.0
    }

    /// Whether the margin is tested for openness by random probes.
    fn probe_openness(&self) -> bool {
        true
    }
}

/// `±E_ij` for all entries of an `n × m` matrix.
pub fn elementary_directions(n: usize, m: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(2 * n * m);
    for i in 0..n {
        for j in 0..m {
            for s in [1.0, -1.0] {
                let mut d = DMatrix::zeros(n, m);
                d[(i, j)] = s;
                out.push(d);
            }
        }
    }
    out
}

/// Deterministic dense directions used after the structured ones.
pub fn generic_directions(n: usize, m: usize, count: usize) -> Vec<DMatrix<f64>> {
    let golden = 0.618_033_988_749_895_f64;
    (0..count)
        .map(|c| {
            let d = DMatrix::from_fn(n, m, |i, j| {
                let t = ((c * n * m + i * m + j + 1) as f64 * golden).fract();
                2.0 * t - 1.0
            });
            let norm = op_norm(&d);
            d / norm
        })
        .collect()
}

/// The deterministic fiber perturbation search.
///
/// Returns `j` itself when its margin is already at least `θ ε`. Otherwise
/// tries `slope + ε (1 − 2^{-k}) D` for `k = 1 … 20` and each direction `D`
/// of the relation (scaled to operator norm 1), and accepts the first
/// candidate with margin at least `θ ε`. If none reaches it, the candidate
/// with the largest positive margin is returned; if none is positive the
/// sweep fails.
pub fn sweep<R: RelationOracle + ?Sized>(rel: &R, j: &Jet1, eps: f64) -> Result<Jet1> {
    rel.check_domain(j)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Invalid(format!("perturbation size must be positive, got {eps}")));
    }
    let target = THETA * eps;
    if rel.margin(j) >= target {
        return Ok(j.clone());
    }
    let dirs: Vec<DMatrix<f64>> = rel
        .directions(j)
        .into_iter()
        .filter_map(|d| {
            let n = op_norm(&d);
            (n > 0.0).then(|| d / n)
        })
        .collect();
    let mut best: Option<(f64, Jet1)> = None;
    for k in 1..=SWEEP_STEPS {
        let size = eps * (1.0 - 0.5f64.powi(k as i32));
        for d in &dirs {
            let cand = j.with_slope(&j.slope + d * size);
            let m = rel.margin(&cand);
            if m >= target {
                return Ok(cand);
            }
            if m > 0.0 && best.as_ref().is_none_or(|b| m > b.0) {
                best = Some((m, cand));
            }
        }
    }
    best.map(|b| b.1).ok_or_else(|| Error::SweepExhausted {
        relation: rel.name().to_string(),
        eps,
    })
}

/// How a margin over a simplex is derived from jets at sample points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Minimum over the samples.
    #[default]
    Sampled,
    /// Minimum over the samples minus `L · diam` of the sampled values.
    Lipschitz,
}

/// Margin of an affine piece from its jets at sample points.
pub fn certify_jets(rel: &dyn RelationOracle, jets: &[Jet1], mode: Certification, l_xi: f64) -> f64 {
    let min = jets.iter().map(|j| rel.margin(j)).fold(f64::INFINITY, f64::min);
    match mode {
        Certification::Sampled => floor(min),
        Certification::Lipschitz => {
            let mut diam = 0.0f64;
            for a in jets {
                for b in jets {
                    diam = diam.max((&a.value - &b.value).norm());
                }
            }
            let lip = jets.iter().map(|j| rel.value_lipschitz(j)).fold(l_xi, f64::max);
            floor(min - lip * diam)
        }
    }
}
