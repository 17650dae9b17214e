use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::map::PiecewiseMap;
use super::piece::Piece;
use super::registry::SmoothFn;
use crate::complex::{ComplexJson, SimplicialComplex};
use crate::{Error, Result};

/// A complex given inline or as a path to a complex JSON file.
#[derive(Clone, Debug, PartialEq)]
pub enum ComplexSource {
    Inline(ComplexJson),
    Path(PathBuf),
}

impl Serialize for ComplexSource {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ComplexSource::Inline(c) => c.serialize(s),
            ComplexSource::Path(p) => p.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ComplexSource {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(p) => Ok(ComplexSource::Path(p.into())),
            other => serde_json::from_value(other).map(ComplexSource::Inline).map_err(serde::de::Error::custom),
        }
    }
}

/// The JSON form of a map: a complex and either per-vertex values or a
/// registry smooth map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    pub complex: ComplexSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smooth: Option<SmoothFn>,
}

impl MapJson {
    /// Builds the map; a complex path is resolved against `base`.
    pub fn resolve(self, base: Option<&Path>) -> Result<PiecewiseMap> {
        let complex: SimplicialComplex = match self.complex {
            ComplexSource::Inline(c) => c.try_into()?,
            ComplexSource::Path(p) => {
                let p = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p,
                };
                SimplicialComplex::from_json(&std::fs::read_to_string(&p)?)?
            }
        };
        let complex = Arc::new(complex);
        match (self.values, self.smooth) {
            (Some(v), None) => {
                PiecewiseMap::from_vertex_values(complex, v.into_iter().map(DVector::from_vec).collect())
            }
            (None, Some(f)) => PiecewiseMap::from_smooth(complex, f),
            _ => Err(Error::Invalid("a map needs exactly one of `values` and `smooth`".into())),
        }
    }
}

impl PiecewiseMap {
    /// Reads a map file; complex paths are relative to the file.
    pub fn read_json(path: &Path) -> Result<Self> {
        let j: MapJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        j.resolve(path.parent())
    }

    /// A registry smooth map when every piece is the same one, otherwise
    /// the vertex table, which describes the map exactly when it is PL.
    pub fn to_map_json(&self) -> MapJson {
        let complex = ComplexSource::Inline(ComplexJson::from(self.complex()));
        let smooth = match self.pieces().first() {
            Some(Piece::Smooth(f)) if self.pieces().iter().all(|p| matches!(p, Piece::Smooth(g) if g == f)) => {
                Some((**f).clone())
            }
            _ => None,
        };
        match smooth {
            Some(f) => MapJson { complex, values: None, smooth: Some(f) },
            None => MapJson {
                complex,
                values: Some(self.vertex_values().iter().map(|y| y.iter().copied().collect()).collect()),
                smooth: None,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_map_json()).expect("map serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::interval;

    #[test]
    fn round_trips() {
        let k = Arc::new(interval(0.0, 1.0, 2));
        let f = PiecewiseMap::from_smooth(k.clone(), SmoothFn::quadratic(1.0, 0.0)).unwrap();
        let j = f.to_json();
        assert!(j.contains("quadratic"));
        let back = serde_json::from_str::<MapJson>(&j).unwrap().resolve(None).unwrap();
        assert_eq!(back.to_json(), j);
        let g = PiecewiseMap::from_vertex_values(k, vec![DVector::from_element(1, 0.5); 3]).unwrap();
        let back = serde_json::from_str::<MapJson>(&g.to_json()).unwrap().resolve(None).unwrap();
        assert_eq!(back.vertex_values(), g.vertex_values());
    }

    #[test]
    fn complex_by_path() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("k.json"), interval(0.0, 1.0, 1).to_json()).unwrap();
        let map = dir.path().join("m.json");
        std::fs::write(&map, r#"{"complex":"k.json","values":[[0],[1]]}"#).unwrap();
        let f = PiecewiseMap::read_json(&map).unwrap();
        assert_eq!(f.vertex_value(1)[0], 1.0);
        let bad: std::result::Result<MapJson, _> = serde_json::from_str(r#"{"complex":"k.json","valuez":[]}"#);
        assert!(bad.is_err());
    }
}
