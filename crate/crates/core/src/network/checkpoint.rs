use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Mlp;
use crate::activations::BaseActivation;
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "learnact-checkpoint-v1";

/// A saved model: layer specs, every parameter array, the library order and
/// the seed it was trained from.
///
/// Floats are written in shortest round-trip form, so save → load → forward
/// reproduces the original outputs bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub format: String,
    pub seed: u64,
    pub library: Vec<BaseActivation>,
    /// How input vectors are laid out, e.g. `timestep-major` for forecast models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_layout: Option<String>,
    pub network: Mlp,
}

impl Checkpoint {
    pub fn new(network: Mlp, seed: u64, library: Vec<BaseActivation>) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.to_string(),
            seed,
            library,
            input_layout: None,
            network,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ckpt: Checkpoint = serde_json::from_str(text)?;
        if ckpt.format != CHECKPOINT_FORMAT {
            return Err(Error::Schema(format!(
                "unsupported checkpoint format '{}'",
                ckpt.format
            )));
        }
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activations::{ActivationKind, ActivationLibrary};
    use crate::network::Architecture;
    use crate::numcore::{Matrix, Rng};
    use BaseActivation::*;

    #[test]
    fn save_load_forward_is_bit_identical() {
        let lib = ActivationLibrary::new(vec![Relu, Gelu, Sine, Cosine]).unwrap();
        let arch = Architecture {
            input_dim: 3,
            hidden: vec![
                (6, ActivationKind::Lla { constrained: true }),
                (5, ActivationKind::Qla { constrained: false }),
            ],
            output_dim: 2,
        };
        let net = Mlp::init(&arch, Some(&lib), 36).unwrap();
        let ckpt = Checkpoint::new(net.clone(), 36, lib.members().to_vec());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("checkpoint.json");
        ckpt.save(&path).unwrap();
        let loaded = Checkpoint::load(&path).unwrap();
        assert_eq!(loaded, ckpt);

        let mut rng = Rng::new(1);
        let x = Matrix::from_vec(16, 3, (0..48).map(|_| rng.normal(0.0, 3.0)).collect()).unwrap();
        let a = net.predict(&x).unwrap();
        let b = loaded.network.predict(&x).unwrap();
        assert!(a.as_slice().iter().zip(b.as_slice()).all(|(p, q)| p.to_bits() == q.to_bits()));
    }

    #[test]
    fn inconsistent_checkpoint_is_rejected() {
        let text = r#"{"format":"learnact-checkpoint-v1","seed":1,"library":[],
            "network":[{"weight":{"rows":1,"cols":2,"data":[1.0,2.0]},"bias":[0.0,1.0],"activation":null}]}"#;
        assert!(Checkpoint::from_json(text).is_err());
        let wrong = r#"{"format":"other","seed":1,"library":[],
            "network":[{"weight":{"rows":1,"cols":2,"data":[1.0,2.0]},"bias":[0.0],"activation":null}]}"#;
        assert!(matches!(Checkpoint::from_json(wrong), Err(Error::Schema(_))));
    }
}
