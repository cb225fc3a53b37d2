//! JSON-facing configuration for groups: a tagged `kind` plus the
//! constructor parameters. The CLI and file formats speak this type; it
//! lowers to a [`GroupSpec`] with the caller's seed.

use serde::{Deserialize, Serialize};

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::group::{GroupSpec, DEFAULT_GROUP_CAP};
use crate::groups::{
    atom_swap_group, block_rotation_group, generate_cyclic, haar_orthogonal_sampler,
    permutation_group, sign_change_group_capped, witness_to_group, BlockRotationMode,
    PermutationMode,
};
use crate::transform::Transform;

fn default_cap() -> usize {
    DEFAULT_GROUP_CAP
}

/// Serializable description of a group construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupConfig {
    SignChange {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        subset: Option<Vec<usize>>,
        #[serde(default = "default_cap")]
        cap: usize,
    },
    Permutation {
        n: usize,
        mode: PermutationMode,
    },
    Cyclic {
        transform: Transform,
        #[serde(default = "default_cap")]
        cap: usize,
    },
    AtomSwap {
        atoms: Vec<f64>,
        l: usize,
        l_prime: usize,
    },
    Haar {
        n: usize,
        draws: usize,
    },
    BlockRotation {
        n: usize,
        #[serde(default)]
        mode: BlockRotationMode,
        #[serde(default = "default_cap")]
        cap: usize,
    },
    Witness {
        x: Vec<f64>,
        y: Vec<f64>,
    },
    Explicit {
        transforms: Vec<Transform>,
    },
}

impl GroupConfig {
    /// Lower to a concrete group spec; `seed` feeds any sampled variant.
    pub fn build(&self, seed: u64) -> Result<GroupSpec> {
        match self {
            GroupConfig::SignChange { n, subset, cap } => {
                sign_change_group_capped(*n, subset.as_deref(), *cap)
            }
            GroupConfig::Permutation { n, mode } => permutation_group(*n, *mode, seed),
            GroupConfig::Cyclic { transform, cap } => generate_cyclic(transform, *cap),
            GroupConfig::AtomSwap { atoms, l, l_prime } => {
                atom_swap_group(&Alphabet::new(atoms.clone())?, *l, *l_prime)
            }
            GroupConfig::Haar { n, draws } => haar_orthogonal_sampler(*n, *draws, seed),
            GroupConfig::BlockRotation { n, mode, cap } => block_rotation_group(*n, *mode, *cap),
            GroupConfig::Witness { x, y } => witness_to_group(x, y),
            GroupConfig::Explicit { transforms } => GroupSpec::explicit(transforms.clone()),
        }
    }

    /// Shorthand names accepted on the command line; `n` is taken from the
    /// sample when the name carries no parameters.
    pub fn from_shorthand(name: &str, n: usize) -> Result<GroupConfig> {
        match name {
            "sign_change" => Ok(GroupConfig::SignChange {
                n,
                subset: None,
                cap: DEFAULT_GROUP_CAP,
            }),
            "permutation" => Ok(GroupConfig::Permutation {
                n,
                mode: PermutationMode::Full,
            }),
            "block_rotation" => Ok(GroupConfig::BlockRotation {
                n,
                mode: BlockRotationMode::CyclicPerBlock,
                cap: DEFAULT_GROUP_CAP,
            }),
            other => Err(Error::InvalidParameter {
                reason: format!(
                    "unknown group shorthand `{other}`; pass a JSON group spec instead"
                ),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_for_each_kind() {
        let configs = vec![
            r#"{"kind":"sign_change","n":3}"#.to_string(),
            r#"{"kind":"permutation","n":3,"mode":"full"}"#.to_string(),
            r#"{"kind":"permutation","n":20,"mode":{"sampled":{"draws":100}}}"#.to_string(),
            r#"{"kind":"atom_swap","atoms":[-1.0,0.0,1.0],"l":0,"l_prime":2}"#.to_string(),
            r#"{"kind":"haar","n":3,"draws":16}"#.to_string(),
            r#"{"kind":"block_rotation","n":3}"#.to_string(),
            r#"{"kind":"witness","x":[1.0,1.0],"y":[-1.0,-1.0]}"#.to_string(),
            r#"{"kind":"cyclic","transform":{"type":"signed_permutation","perm":[0],"signs":[-1]},"cap":100}"#.to_string(),
        ];
        for text in configs {
            let config: GroupConfig = serde_json::from_str(&text).expect(&text);
            let spec = config.build(7).expect(&text);
            assert!(spec.realize().unwrap().len() >= 1);
            let emitted = serde_json::to_string(&config).unwrap();
            let config2: GroupConfig = serde_json::from_str(&emitted).unwrap();
            let s1 = serde_json::to_string(&config2).unwrap();
            assert_eq!(emitted, s1);
        }
    }

    #[test]
    fn shorthand_uses_sample_length() {
        let spec = GroupConfig::from_shorthand("sign_change", 4)
            .unwrap()
            .build(0)
            .unwrap();
        assert_eq!(spec.realize().unwrap().len(), 16);
        assert!(GroupConfig::from_shorthand("mystery", 4).is_err());
    }
}
