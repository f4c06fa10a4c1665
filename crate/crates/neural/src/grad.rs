//! Finite-difference verification of head gradients.
//!
//! Both heads are rebuilt in f64 at toy sizes, every parameter is perturbed
//! by ±h with central differences, and the worst relative deviation from
//! the autograd gradient is reported. With h = 1e-5 the truncation error is
//! around 1e-10, far below the tolerances callers assert.

use crate::error::NeuralError;
use crate::head::{gru_head, pooled_head};
use crate::vars::seed_vars;
use candle_core::{DType, Device, Tensor};
use candle_nn::{VarBuilder, VarMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const H: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub max_rel_error: f64,
    pub n_params: usize,
}

fn gaussian_tensor(
    rng: &mut ChaCha8Rng,
    scale: f64,
    dims: &[usize],
    device: &Device,
) -> Result<Tensor, NeuralError> {
    let count: usize = dims.iter().product();
    let values: Vec<f64> = (0..count)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(Tensor::from_vec(values, dims, device)?)
}

/// Compare autograd gradients of `loss_fn` against central differences for
/// every parameter in `varmap`.
fn check<F>(varmap: &VarMap, loss_fn: F) -> Result<GradCheck, NeuralError>
where
    F: Fn() -> candle_core::Result<Tensor>,
{
    let loss = loss_fn()?;
    let grads = loss.backward()?;

    let data = varmap.data().lock().unwrap();
    let mut names: Vec<&String> = data.keys().collect();
    names.sort();

    let mut max_rel_error = 0.0f64;
    let mut n_params = 0;
    for name in names {
        let var = &data[name];
        let dims = var.dims().to_vec();
        let device = var.device().clone();
        let base = var.as_tensor().flatten_all()?.to_vec1::<f64>()?;
        let analytic = match grads.get(var) {
            Some(g) => g.flatten_all()?.to_vec1::<f64>()?,
            None => vec![0.0; base.len()],
        };
        for j in 0..base.len() {
            let mut nudged = base.clone();
            nudged[j] = base[j] + H;
            var.set(&Tensor::from_vec(nudged.clone(), dims.clone(), &device)?)?;
            let plus = loss_fn()?.to_scalar::<f64>()?;
            nudged[j] = base[j] - H;
            var.set(&Tensor::from_vec(nudged, dims.clone(), &device)?)?;
            let minus = loss_fn()?.to_scalar::<f64>()?;
            var.set(&Tensor::from_vec(base.clone(), dims.clone(), &device)?)?;

            let numeric = (plus - minus) / (2.0 * H);
            let rel = (analytic[j] - numeric).abs()
                / analytic[j].abs().max(numeric.abs()).max(1e-6);
            max_rel_error = max_rel_error.max(rel);
            n_params += 1;
        }
    }
    Ok(GradCheck {
        max_rel_error,
        n_params,
    })
}

/// Gradient check for the bidirectional GRU head at toy size
/// (input 4, hidden 3, 2 layers, a ragged batch of 2).
pub fn gru_head_gradient_check(seed: u64) -> Result<GradCheck, NeuralError> {
    let device = Device::Cpu;
    let varmap = VarMap::new();
    let vb = VarBuilder::from_varmap(&varmap, DType::F64, &device);
    let head = gru_head(vb, 4, 3, 2, 0.0)?;
    seed_vars(&varmap, seed, 0.4)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = gaussian_tensor(&mut rng, 0.8, &[2, 3, 4], &device)?;
    let targets = gaussian_tensor(&mut rng, 1.0, &[2], &device)?;
    let lengths = [3usize, 2];

    check(&varmap, || {
        let pred = head.forward(&x, &lengths, false)?;
        candle_nn::loss::mse(&pred, &targets)
    })
}

/// Gradient check for the pooled CLS head at toy size (hidden 5, batch 3).
pub fn pooled_head_gradient_check(seed: u64) -> Result<GradCheck, NeuralError> {
    let device = Device::Cpu;
    let varmap = VarMap::new();
    let vb = VarBuilder::from_varmap(&varmap, DType::F64, &device);
    let head = pooled_head(vb, 5, 0.0)?;
    seed_vars(&varmap, seed, 0.4)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cls = gaussian_tensor(&mut rng, 0.8, &[3, 5], &device)?;
    let targets = gaussian_tensor(&mut rng, 1.0, &[3], &device)?;

    check(&varmap, || {
        let pred = head.forward(&cls, false)?;
        candle_nn::loss::mse(&pred, &targets)
    })
}
