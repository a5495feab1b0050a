pub mod bootstrap;
pub mod counterexample;
pub mod eval;
pub mod lambda;
pub mod region;
pub mod verify;

use crate::CliError;
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// Load the optional JSON config document backing a run.
pub fn load_config<T: DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::input(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::input(format!("config {}: {e}", p.display())))
        }
    }
}

/// Create the output directory and echo the effective parameters into it.
pub fn prepare_out_dir<T: Serialize>(out: &Path, effective: &T) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    let doc = serde_json::to_string_pretty(effective)?;
    fs::write(out.join("config.json"), doc + "\n")?;
    Ok(())
}

/// Parse a measure document: either `{label, density}` or a bare density.
pub fn load_measure(path: &Path) -> Result<hup_core::ParabolaMeasure, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(m) = serde_json::from_str::<hup_core::ParabolaMeasure>(&text) {
        return Ok(m);
    }
    let density: hup_core::Density = serde_json::from_str(&text).map_err(|e| {
        CliError::input(format!(
            "{}: not a measure or density document: {e}",
            path.display()
        ))
    })?;
    Ok(hup_core::ParabolaMeasure::new(
        density,
        path.display().to_string(),
    ))
}
