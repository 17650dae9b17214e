use serde::{Deserialize, Serialize};

use crate::relations::Certification;
use crate::{Error, Result};

/// Parameters of a jiggling run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JigglingConfig {
    /// C¹ budget: the output is within `epsilon` of the input.
    pub epsilon: f64,
    /// First subdivision level tried; `None` starts at 0.
    #[serde(default)]
    pub level_init: Option<u32>,
    /// Factor applied to a color's perturbation size after a failed attempt.
    #[serde(default = "default_shrink")]
    pub eps_shrink: f64,
    /// Failed attempts allowed per color.
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default)]
    pub certification: Certification,
    /// Lipschitz constant of the relation in the value variable, used by
    /// [`Certification::Lipschitz`].
    #[serde(rename = "L_xi", default)]
    pub l_xi: f64,
    /// Highest subdivision level tried.
    #[serde(default = "default_lmax")]
    pub l_max: u32,
    /// Recorded in reports; every step of the run is deterministic.
    #[serde(default)]
    pub seed: u64,
}

fn default_shrink() -> f64 {
    0.5
}

fn default_retries() -> u32 {
    30
}

fn default_lmax() -> u32 {
    12
}

impl JigglingConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            level_init: None,
            eps_shrink: default_shrink(),
            max_retries: default_retries(),
            certification: Certification::Sampled,
            l_xi: 0.0,
            l_max: default_lmax(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.eps_shrink > 0.0 && self.eps_shrink < 1.0) {
            return Err(Error::Invalid("eps_shrink must lie in (0, 1)".into()));
        }
        if !(self.l_xi >= 0.0 && self.l_xi.is_finite()) {
            return Err(Error::Invalid("L_xi must be a nonnegative number".into()));
        }
        if let Some(l) = self.level_init {
            if l > self.l_max {
                return Err(Error::Invalid(format!("level_init {l} exceeds l_max {}", self.l_max)));
            }
        }
        Ok(())
    }
}

/// What a jiggling run did and what it certified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JigglingReport {
    pub relation: String,
    pub epsilon: f64,
    pub certification: Certification,
    pub seed: u64,
    /// Subdivision level of the output complex over the input complex.
    pub level: u32,
    pub colors: usize,
    /// Certified margin of each top simplex of the output complex.
    pub margins: Vec<f64>,
    /// Top simplices exempt from certification (inside the given-up region).
    pub exempt: Vec<usize>,
    /// Smallest margin over the non-exempt simplices.
    pub min_margin: f64,
    pub d_c0: f64,
    pub d_c1: f64,
    /// C¹ distance between the input and its starting linearization.
    pub linearization_c1: f64,
    /// Failed attempts per color.
    pub retries: Vec<u32>,
    /// Accepted perturbation size per color, 0 for colors with nothing to do.
    pub eps_per_color: Vec<f64>,
    /// Top simplices whose slope the fiber perturbation changed.
    pub perturbed: usize,
    /// Largest ratio of accumulated displacement to certified margin over
    /// the certified simplices; stays below 1.
    pub max_budget_ratio: f64,
    /// SHA-256 of the frozen vertex data, for relative runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_hash: Option<String>,
}

impl JigglingReport {
    /// Report for a run that returned its input unchanged.
    pub(crate) fn unchanged(relation: &str, cfg: &JigglingConfig, margins: Vec<f64>) -> Self {
        let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            relation: relation.to_string(),
            epsilon: cfg.epsilon,
            certification: cfg.certification,
            seed: cfg.seed,
            level: 0,
            colors: 0,
            margins,
            exempt: Vec::new(),
            min_margin,
            d_c0: 0.0,
            d_c1: 0.0,
            linearization_c1: 0.0,
            retries: Vec::new(),
            eps_per_color: Vec::new(),
            perturbed: 0,
            max_budget_ratio: 0.0,
            fixed_hash: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_unknown_fields() {
        let c: JigglingConfig = serde_json::from_str(r#"{"epsilon":0.1}"#).unwrap();
        assert_eq!(c, JigglingConfig::new(0.1));
        assert!(serde_json::from_str::<JigglingConfig>(r#"{"epsilon":0.1,"eps":1}"#).is_err());
        let c: JigglingConfig =
            serde_json::from_str(r#"{"epsilon":0.1,"certification":"lipschitz","L_xi":2,"l_max":5}"#).unwrap();
        assert_eq!(c.certification, Certification::Lipschitz);
        assert_eq!((c.l_xi, c.l_max), (2.0, 5));
    }

    #[test]
    fn validation() {
        assert!(JigglingConfig::new(0.0).validate().is_err());
        let mut c = JigglingConfig::new(0.1);
        c.eps_shrink = 1.0;
        assert!(c.validate().is_err());
        c.eps_shrink = 0.5;
        c.level_init = Some(13);
        assert!(c.validate().is_err());
    }
}
