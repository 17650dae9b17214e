use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::CliError;
use crate::complex::SimplicialComplex;
use crate::pl_maps::PiecewiseMap;

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| usage(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(|e| usage(format!("writing {}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(usage)?;
    text.push('\n');
    write_atomic(path, &text)
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("reading {}: {e}", path.display())))
}

pub fn read_complex(path: &Path) -> Result<SimplicialComplex, CliError> {
    SimplicialComplex::from_json(&read_text(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn read_map(path: &Path) -> Result<PiecewiseMap, CliError> {
    PiecewiseMap::read_json(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Parses an argument that is either inline JSON or a path to a JSON file.
pub fn json_arg<T: DeserializeOwned>(arg: &str) -> Result<T, CliError> {
    let t = arg.trim_start();
    let (text, origin) = if t.starts_with('{') || t.starts_with('[') {
        (arg.to_string(), "inline JSON".to_string())
    } else {
        (read_text(Path::new(arg))?, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|e| usage(format!("{origin}: {e}")))
}
