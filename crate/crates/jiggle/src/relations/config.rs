use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::builtin::{contact3d_relation, maxrank_relation, transversality_relation, verygenpos_relation};
use super::distribution::Distribution;
use super::oracle::{Certification, RelationOracle};
use crate::complex::SimplicialComplex;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Transverse,
    Maxrank,
    Contact3d,
    Verygenpos,
}

/// Relation selection as read from a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationConfig {
    pub relation: RelationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Distribution>,
    #[serde(default)]
    pub certification: Certification,
    /// Lipschitz constant of the `ξ` frame field; defaults to the field's
    /// own constant.
    #[serde(rename = "L_xi", default, skip_serializing_if = "Option::is_none")]
    pub l_xi: Option<f64>,
}

/// The relation to impose on each top simplex of a complex.
#[derive(Clone)]
pub enum RelationSet {
    Uniform(Arc<dyn RelationOracle>),
    /// Indexed by the top simplices of the complex being jiggled.
    PerRoot(Vec<Arc<dyn RelationOracle>>),
}

impl std::fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RelationSet::Uniform(r) => write!(f, "Uniform({})", r.name()),
            RelationSet::PerRoot(v) => write!(f, "PerRoot({} × {})", v.len(), v.first().map_or("-", |r| r.name())),
        }
    }
}

impl RelationSet {
    pub fn uniform(r: impl RelationOracle + 'static) -> Self {
        RelationSet::Uniform(Arc::new(r))
    }

    pub fn for_root(&self, r: usize) -> &dyn RelationOracle {
        match self {
            RelationSet::Uniform(o) => o.as_ref(),
            RelationSet::PerRoot(v) => v[r].as_ref(),
        }
    }

    pub fn name(&self) -> &str {
        self.for_root(0).name()
    }

    pub(crate) fn check_roots(&self, count: usize) -> Result<()> {
        match self {
            RelationSet::PerRoot(v) if v.len() != count => Err(Error::Invalid(format!(
                "{} relations for {count} top simplices",
                v.len()
            ))),
            _ => Ok(()),
        }
    }
}

impl RelationConfig {
    pub fn new(relation: RelationKind, xi: Option<Distribution>) -> Self {
        Self { relation, xi, certification: Certification::Sampled, l_xi: None }
    }

    pub fn lipschitz(&self) -> f64 {
        self.l_xi
            .unwrap_or_else(|| self.xi.as_ref().map_or(0.0, Distribution::lipschitz))
    }

    fn xi(&self, n: usize) -> Result<&Distribution> {
        let xi = self
            .xi
            .as_ref()
            .ok_or_else(|| Error::Invalid("this relation needs a distribution `xi`".into()))?;
        if xi.dim() != n {
            return Err(Error::Invalid(format!("xi lives in R^{}, the target is R^{n}", xi.dim())));
        }
        Ok(xi)
    }

    /// Builds the relation for maps from `k` to `R^n`.
    pub fn build(&self, k: &SimplicialComplex, n: usize) -> Result<RelationSet> {
        let m = k.dim().ok_or_else(|| Error::Invalid("empty complex".into()))?;
        if let Some(l) = self.l_xi {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::Invalid("L_xi must be a nonnegative number".into()));
            }
        }
        Ok(match self.relation {
            RelationKind::Maxrank => RelationSet::uniform(maxrank_relation(m, n)),
            RelationKind::Transverse => RelationSet::uniform(transversality_relation(self.xi(n)?.clone(), m)),
            RelationKind::Contact3d => {
                if m != 3 || n != 3 {
                    return Err(Error::Invalid("contact3d needs maps from a 3-complex to R^3".into()));
                }
                RelationSet::uniform(contact3d_relation())
            }
            RelationKind::Verygenpos => RelationSet::PerRoot(
                verygenpos_relation(k, self.xi(n)?)?
                    .into_iter()
                    .map(|r| Arc::new(r) as Arc<dyn RelationOracle>)
                    .collect(),
            ),
        })
    }
}
