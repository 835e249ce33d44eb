//! Versioned TOML documents for trained models and parameter sets.
//!
//! ```toml
//! format = "ocsvm"
//! version = 1
//! [model]
//! ...
//! ```

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::compose::HybridModel;
use crate::envelope::{HullModel, OcsvmModel};
use crate::error::{Error, Result};
use crate::netdyn::{MlpModel, NarxModel};
use crate::plant::{EquivCircuitParams, PlantConfig};

pub const VERSION: u32 = 1;

/// A type stored as a tagged document.
pub trait Persist: Serialize + DeserializeOwned {
    const FORMAT: &'static str;
}

impl Persist for MlpModel {
    const FORMAT: &'static str = "mlp";
}
impl Persist for NarxModel {
    const FORMAT: &'static str = "narx";
}
impl Persist for OcsvmModel {
    const FORMAT: &'static str = "ocsvm";
}
impl Persist for HullModel {
    const FORMAT: &'static str = "hull";
}
impl Persist for HybridModel {
    const FORMAT: &'static str = "hybrid";
}
impl Persist for EquivCircuitParams {
    const FORMAT: &'static str = "equivalent_circuit";
}
impl Persist for PlantConfig {
    const FORMAT: &'static str = "plant";
}

#[derive(Serialize)]
struct DocOut<'a, T> {
    format: &'a str,
    version: u32,
    model: &'a T,
}

#[derive(Deserialize)]
struct DocIn<T> {
    format: String,
    version: u32,
    model: T,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

pub fn to_toml_string<T: Persist>(model: &T) -> Result<String> {
    toml::to_string(&DocOut {
        format: T::FORMAT,
        version: VERSION,
        model,
    })
    .map_err(|e| Error::Format(e.to_string()))
}

pub fn from_toml_str<T: Persist>(text: &str) -> Result<T> {
    let head: Header = toml::from_str::<toml::Table>(text)
        .and_then(|t| t.try_into())
        .map_err(|e| Error::Format(e.to_string()))?;
    if head.format != T::FORMAT {
        return Err(Error::Format(format!(
            "expected a `{}` document, found `{}`",
            T::FORMAT,
            head.format
        )));
    }
    if head.version != VERSION {
        return Err(Error::Format(format!(
            "unsupported `{}` version {} (this build reads {VERSION})",
            head.format, head.version
        )));
    }
    let doc: DocIn<T> = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    debug_assert_eq!((doc.format.as_str(), doc.version), (T::FORMAT, VERSION));
    Ok(doc.model)
}

pub fn save<T: Persist>(model: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_toml_string(model)?).map_err(|e| Error::io(path, e))
}

pub fn load<T: Persist>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_toml_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #[test]
        fn mlp_round_trip_is_exact(seed in any::<u64>(), h in 1usize..6, scale in -1e6f64..1e6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m = MlpModel::random(3, h, &mut rng);
            let p: Vec<f64> = m.params().iter().map(|v| v * scale).collect();
            m.set_params(&p);
            let back: MlpModel = from_toml_str(&to_toml_string(&m).unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }
    }

    #[test]
    fn wrong_format_rejected() {
        let m = MlpModel::zeros(2, 2);
        let text = to_toml_string(&m).unwrap();
        assert!(matches!(from_toml_str::<OcsvmModel>(&text), Err(Error::Format(_))));
        let bumped = text.replace("version = 1", "version = 9");
        assert!(matches!(from_toml_str::<MlpModel>(&bumped), Err(Error::Format(_))));
    }

    #[test]
    fn equivalent_circuit_round_trip() {
        let p = EquivCircuitParams::desk_default();
        let back: EquivCircuitParams = from_toml_str(&to_toml_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
