//! VarMap helpers: seeded initialization and snapshot/restore.
//!
//! candle initializes fresh variables from an unseeded source, so anything
//! that wants reproducible weights overwrites them through [`seed_vars`]
//! right after construction. Snapshots copy storage because optimizers and
//! `Var::set` write in place.

use crate::error::NeuralError;
use candle_core::Tensor;
use candle_nn::VarMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub(crate) fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Overwrite every variable with N(0, scale²) noise derived from the seed
/// and the variable's position in name order. Keeps the variable's dtype.
pub(crate) fn seed_vars(varmap: &VarMap, seed: u64, scale: f64) -> Result<(), NeuralError> {
    let data = varmap.data().lock().unwrap();
    let mut names: Vec<&String> = data.keys().collect();
    names.sort();
    for (i, name) in names.iter().enumerate() {
        let var = &data[*name];
        let dims = var.dims().to_vec();
        let count: usize = dims.iter().product();
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, i as u64));
        let values: Vec<f64> = (0..count)
            .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let tensor =
            Tensor::from_vec(values, dims, var.device())?.to_dtype(var.dtype())?;
        var.set(&tensor)?;
    }
    Ok(())
}

/// Deep copies of all variables, in stable name order.
pub(crate) fn snapshot_vars(varmap: &VarMap) -> Result<Vec<(String, Tensor)>, NeuralError> {
    let data = varmap.data().lock().unwrap();
    let mut names: Vec<&String> = data.keys().collect();
    names.sort();
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        out.push(((*name).clone(), data[name].as_tensor().copy()?));
    }
    Ok(out)
}

pub(crate) fn restore_vars(
    varmap: &VarMap,
    snapshot: &[(String, Tensor)],
) -> Result<(), NeuralError> {
    let data = varmap.data().lock().unwrap();
    for (name, tensor) in snapshot {
        match data.get(name) {
            Some(var) => var.set(tensor)?,
            None => {
                return Err(NeuralError::Train(format!(
                    "snapshot variable `{name}` is gone"
                )))
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use candle_core::{DType, Device};
    use candle_nn::VarBuilder;

    fn small_map() -> VarMap {
        let varmap = VarMap::new();
        let vb = VarBuilder::from_varmap(&varmap, DType::F32, &Device::Cpu);
        let _ = candle_nn::linear(3, 2, vb.pp("probe")).unwrap();
        varmap
    }

    #[test]
    fn seeding_is_reproducible_and_seed_sensitive() {
        let a = small_map();
        let b = small_map();
        seed_vars(&a, 9, 0.3).unwrap();
        seed_vars(&b, 9, 0.3).unwrap();
        let left = snapshot_vars(&a).unwrap();
        let right = snapshot_vars(&b).unwrap();
        for ((_, l), (_, r)) in left.iter().zip(&right) {
            assert_eq!(
                l.flatten_all().unwrap().to_vec1::<f32>().unwrap(),
                r.flatten_all().unwrap().to_vec1::<f32>().unwrap()
            );
        }
        seed_vars(&b, 10, 0.3).unwrap();
        let changed = snapshot_vars(&b).unwrap();
        assert_ne!(
            left[0].1.flatten_all().unwrap().to_vec1::<f32>().unwrap(),
            changed[0].1.flatten_all().unwrap().to_vec1::<f32>().unwrap()
        );
    }

    #[test]
    fn snapshots_survive_later_writes() {
        let map = small_map();
        seed_vars(&map, 1, 0.3).unwrap();
        let before = snapshot_vars(&map).unwrap();
        let frozen: Vec<Vec<f32>> = before
            .iter()
            .map(|(_, t)| t.flatten_all().unwrap().to_vec1::<f32>().unwrap())
            .collect();
        seed_vars(&map, 2, 0.3).unwrap();
        for ((_, t), original) in before.iter().zip(&frozen) {
            assert_eq!(
                &t.flatten_all().unwrap().to_vec1::<f32>().unwrap(),
                original
            );
        }
        restore_vars(&map, &before).unwrap();
        let restored = snapshot_vars(&map).unwrap();
        for ((_, t), original) in restored.iter().zip(&frozen) {
            assert_eq!(
                &t.flatten_all().unwrap().to_vec1::<f32>().unwrap(),
                original
            );
        }
    }
}
