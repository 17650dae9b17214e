use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Simplex, SimplicialComplex};
use crate::{Error, Result};

/// The JSON form of a complex. Vertex order is index order; `simplices`
/// may list any generating set, the face closure is taken on import.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub ambient_dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
}

impl TryFrom<ComplexJson> for SimplicialComplex {
    type Error = Error;

    fn try_from(j: ComplexJson) -> Result<Self> {
        SimplicialComplex::from_lists(j.ambient_dim, j.vertices, &j.simplices)
    }
}

impl From<SimplicialComplex> for ComplexJson {
    fn from(k: SimplicialComplex) -> Self {
        ComplexJson::from(&k)
    }
}

impl From<&SimplicialComplex> for ComplexJson {
    /// Exports the maximal simplices.
    fn from(k: &SimplicialComplex) -> Self {
        ComplexJson {
            ambient_dim: k.ambient_dim(),
            vertices: k.coords().to_vec(),
            simplices: k.maximal().iter().map(|s| s.vertices().to_vec()).collect(),
        }
    }
}

impl SimplicialComplex {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ComplexJson>(text)?.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ComplexJson::from(self)).expect("complex serializes")
    }

    /// OFF export of `|K|` for `N ≤ 3`: the triangles of the complex, or
    /// its edges when it has no triangles. Missing coordinates are 0.
    pub fn to_off(&self) -> Result<String> {
        if self.ambient_dim() > 3 {
            return Err(Error::Invalid(format!(
                "OFF export needs ambient dimension at most 3, got {}",
                self.ambient_dim()
            )));
        }
        let want = if self.dim().unwrap_or(0) >= 2 { 2 } else { 1 };
        let faces: Vec<&Simplex> = self.simplices().iter().filter(|s| s.dim() == want).collect();
        let mut out = String::from("OFF\n");
        writeln!(out, "{} {} 0", self.num_vertices(), faces.len()).unwrap();
        for c in self.coords() {
            let mut p = [0.0; 3];
            p[..c.len()].copy_from_slice(c);
            writeln!(out, "{} {} {}", p[0], p[1], p[2]).unwrap();
        }
        for f in faces {
            write!(out, "{}", f.len()).unwrap();
            for v in f.vertices() {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{kuhn_cube, square_grid};

    #[test]
    fn json_round_trip() {
        let k = square_grid(2, 0.5);
        let text = k.to_json();
        let back = SimplicialComplex::from_json(&text).unwrap();
        assert_eq!(back, k);
        assert_eq!(back.to_json(), text);
        assert!(SimplicialComplex::from_json(r#"{"ambient_dim":1,"vertices":[[0]],"simplices":[[0]],"x":1}"#).is_err());
        assert!(SimplicialComplex::from_json(r#"{"ambient_dim":1,"vertices":[[0]],"simplices":[[0,1]]}"#).is_err());
    }

    #[test]
    fn off_export() {
        let off = square_grid(1, 1.0).to_off().unwrap();
        let lines: Vec<&str> = off.lines().collect();
        assert_eq!(lines[1], "4 2 0");
        assert_eq!(lines[2], "0 0 0");
        assert_eq!(lines.len(), 2 + 4 + 2);
        let cube = kuhn_cube().to_off().unwrap();
        assert!(cube.lines().nth(1).unwrap().starts_with("8 "));
    }
}
