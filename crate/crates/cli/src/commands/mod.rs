pub mod extremes;
pub mod greens;
pub mod sample;
pub mod verify;

use serde::de::DeserializeOwned;
use std::path::Path;
use zagff::{Error, Result};

/// Loads an optional JSON config file; CLI flags override its fields.
pub fn load_config_file<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text).map_err(|e| Error::Format {
                what: "config file",
                detail: format!("{}: {e}", p.display()),
            })
        }
    }
}
