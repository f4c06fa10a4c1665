//! Regression heads over encoder states.
//!
//! Frozen mode runs a bidirectional GRU across all token states and maps
//! the concatenated final states to a score; fine-tuning maps the pooled
//! `[CLS]` state through a tanh dense layer. Both end in a single linear
//! output and apply dropout only while training.

use candle_core::{Module, Result, Tensor, D};
use candle_nn::rnn::{gru, GRUConfig, GRU, RNN};
use candle_nn::{linear, Dropout, Linear, VarBuilder};

pub struct GruHead {
    layers: Vec<(GRU, GRU)>,
    dropout: Dropout,
    output: Linear,
}

/// Bidirectional multi-layer GRU head. Weight names live under
/// `gru.l{n}.fwd` / `gru.l{n}.bwd` plus `output`.
pub fn gru_head(
    vb: VarBuilder,
    input: usize,
    hidden: usize,
    n_layers: usize,
    dropout: f32,
) -> Result<GruHead> {
    let mut layers = Vec::with_capacity(n_layers);
    for l in 0..n_layers {
        let in_dim = if l == 0 { input } else { 2 * hidden };
        let fwd = gru(in_dim, hidden, GRUConfig::default(), vb.pp(format!("gru.l{l}.fwd")))?;
        let bwd = gru(in_dim, hidden, GRUConfig::default(), vb.pp(format!("gru.l{l}.bwd")))?;
        layers.push((fwd, bwd));
    }
    let output = linear(2 * hidden, 1, vb.pp("output"))?;
    Ok(GruHead {
        layers,
        dropout: Dropout::new(dropout),
        output,
    })
}

impl GruHead {
    /// `states` is `(batch, seq, features)`; `lengths[i]` is the number of
    /// valid steps of row `i`. Padding beyond a row's length never reaches
    /// its final states. Returns `(batch,)` scores.
    pub fn forward(&self, states: &Tensor, lengths: &[usize], train: bool) -> Result<Tensor> {
        let (batch, seq, _) = states.dims3()?;
        if lengths.len() != batch {
            candle_core::bail!("{} lengths for a batch of {batch}", lengths.len());
        }
        if lengths.iter().any(|&l| l == 0 || l > seq) {
            candle_core::bail!("lengths must be in 1..={seq}");
        }
        let mut x = states.clone();
        let mut final_state = None;
        for (i, (fwd, bwd)) in self.layers.iter().enumerate() {
            let fwd_seq = stack_states(&fwd.seq(&x)?)?;
            let reversed = reverse_valid(&x, lengths)?;
            let bwd_seq_rev = stack_states(&bwd.seq(&reversed)?)?;

            let fwd_last = select_last_valid(&fwd_seq, lengths)?;
            let bwd_last = select_last_valid(&bwd_seq_rev, lengths)?;
            final_state = Some(Tensor::cat(&[&fwd_last, &bwd_last], D::Minus1)?);

            if i + 1 < self.layers.len() {
                let bwd_seq = reverse_valid(&bwd_seq_rev, lengths)?;
                x = Tensor::cat(&[&fwd_seq, &bwd_seq], D::Minus1)?;
                x = self.dropout.forward(&x, train)?;
            }
        }
        let features = final_state.expect("at least one GRU layer");
        let features = self.dropout.forward(&features, train)?;
        self.output.forward(&features)?.squeeze(D::Minus1)
    }
}

pub struct PooledHead {
    dense: Linear,
    dropout: Dropout,
    output: Linear,
}

/// Dense + tanh + dropout + linear over the `[CLS]` state. Weight names
/// live under `dense` and `output`.
pub fn pooled_head(vb: VarBuilder, hidden: usize, dropout: f32) -> Result<PooledHead> {
    Ok(PooledHead {
        dense: linear(hidden, hidden, vb.pp("dense"))?,
        dropout: Dropout::new(dropout),
        output: linear(hidden, 1, vb.pp("output"))?,
    })
}

impl PooledHead {
    /// `cls` is `(batch, hidden)`; returns `(batch,)` scores.
    pub fn forward(&self, cls: &Tensor, train: bool) -> Result<Tensor> {
        let pooled = self.dense.forward(cls)?.tanh()?;
        let pooled = self.dropout.forward(&pooled, train)?;
        self.output.forward(&pooled)?.squeeze(D::Minus1)
    }

    /// The tanh-pooled representation before dropout and the output layer.
    pub fn pooled(&self, cls: &Tensor) -> Result<Tensor> {
        self.dense.forward(cls)?.tanh()
    }
}

fn stack_states(states: &[candle_nn::rnn::GRUState]) -> Result<Tensor> {
    let hs: Vec<Tensor> = states.iter().map(|s| s.h().clone()).collect();
    Tensor::stack(&hs, 1)
}

/// Per-row reversal of the first `lengths[i]` steps; the padding tail stays
/// in place, so a backward GRU sees the valid tokens first.
pub(crate) fn reverse_valid(x: &Tensor, lengths: &[usize]) -> Result<Tensor> {
    let (batch, seq, _) = x.dims3()?;
    let device = x.device();
    let mut rows = Vec::with_capacity(batch);
    for (i, &len) in lengths.iter().enumerate() {
        let mut order: Vec<u32> = (0..len as u32).rev().collect();
        order.extend(len as u32..seq as u32);
        let order = Tensor::new(order.as_slice(), device)?;
        rows.push(x.narrow(0, i, 1)?.squeeze(0)?.index_select(&order, 0)?);
    }
    Tensor::stack(&rows, 0)
}

/// Row `i` of the result is `states[i, lengths[i] - 1, :]`.
pub(crate) fn select_last_valid(states: &Tensor, lengths: &[usize]) -> Result<Tensor> {
    let (batch, _, _) = states.dims3()?;
    let mut rows = Vec::with_capacity(batch);
    for (i, &len) in lengths.iter().enumerate() {
        rows.push(states.narrow(0, i, 1)?.squeeze(0)?.narrow(0, len - 1, 1)?.squeeze(0)?);
    }
    Tensor::stack(&rows, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use candle_core::{DType, Device};
    use candle_nn::{VarBuilder, VarMap};

    fn tensor3(values: &[f32], dims: (usize, usize, usize)) -> Tensor {
        Tensor::from_vec(values.to_vec(), dims, &Device::Cpu).unwrap()
    }

    #[test]
    fn reverse_valid_reverses_only_the_valid_prefix() {
        let x = tensor3(&[1., 2., 3., 4., 5., 6.], (1, 3, 2));
        let reversed = reverse_valid(&x, &[2]).unwrap();
        let got = reversed.flatten_all().unwrap().to_vec1::<f32>().unwrap();
        assert_eq!(got, vec![3., 4., 1., 2., 5., 6.]);
    }

    #[test]
    fn select_last_valid_picks_per_row_positions() {
        let x = tensor3(&[1., 2., 3., 4., 10., 20., 30., 40.], (2, 2, 2));
        let last = select_last_valid(&x, &[2, 1]).unwrap();
        let got = last.flatten_all().unwrap().to_vec1::<f32>().unwrap();
        assert_eq!(got, vec![3., 4., 10., 20.]);
    }

    #[test]
    fn gru_head_output_shape() {
        let varmap = VarMap::new();
        let vb = VarBuilder::from_varmap(&varmap, DType::F32, &Device::Cpu);
        let head = gru_head(vb, 8, 4, 2, 0.5).unwrap();
        let x = Tensor::randn(0f32, 1f32, (3, 5, 8), &Device::Cpu).unwrap();
        let out = head.forward(&x, &[5, 3, 1], false).unwrap();
        assert_eq!(out.dims(), &[3]);
    }

    #[test]
    fn gru_head_ignores_padding_past_each_length() {
        let varmap = VarMap::new();
        let vb = VarBuilder::from_varmap(&varmap, DType::F32, &Device::Cpu);
        let head = gru_head(vb, 4, 3, 2, 0.0).unwrap();
        let row: Vec<f32> = (0..12).map(|v| v as f32 / 10.0).collect();

        let mut short = row.clone();
        short.extend([0.0; 4]);
        let narrow = tensor3(&short, (1, 4, 4));
        let mut long = row;
        long.extend([9.0; 12]);
        let wide = tensor3(&long, (1, 6, 4));

        let a = head.forward(&narrow, &[3], false).unwrap();
        let b = head.forward(&wide, &[3], false).unwrap();
        let a = a.to_vec1::<f32>().unwrap();
        let b = b.to_vec1::<f32>().unwrap();
        assert!((a[0] - b[0]).abs() < 1e-6, "{a:?} vs {b:?}");
    }

    #[test]
    fn gru_head_rejects_bad_lengths() {
        let varmap = VarMap::new();
        let vb = VarBuilder::from_varmap(&varmap, DType::F32, &Device::Cpu);
        let head = gru_head(vb, 4, 3, 1, 0.0).unwrap();
        let x = Tensor::zeros((2, 3, 4), DType::F32, &Device::Cpu).unwrap();
        assert!(head.forward(&x, &[3], false).is_err());
        assert!(head.forward(&x, &[3, 4], false).is_err());
        assert!(head.forward(&x, &[3, 0], false).is_err());
    }

    #[test]
    fn pooled_head_shape_and_range() {
        let varmap = VarMap::new();
        let vb = VarBuilder::from_varmap(&varmap, DType::F32, &Device::Cpu);
        let head = pooled_head(vb, 6, 0.1).unwrap();
        let cls = Tensor::randn(0f32, 1f32, (4, 6), &Device::Cpu).unwrap();
        let out = head.forward(&cls, false).unwrap();
        assert_eq!(out.dims(), &[4]);
        let pooled = head.pooled(&cls).unwrap();
        assert_eq!(pooled.dims(), &[4, 6]);
        for v in pooled.flatten_all().unwrap().to_vec1::<f32>().unwrap() {
            assert!(v > -1.0 && v < 1.0);
        }
    }

    #[test]
    fn dropout_is_inert_at_eval_time() {
        let varmap = VarMap::new();
        let vb = VarBuilder::from_varmap(&varmap, DType::F32, &Device::Cpu);
        let head = gru_head(vb, 4, 3, 2, 0.9).unwrap();
        let x = Tensor::randn(0f32, 1f32, (2, 4, 4), &Device::Cpu).unwrap();
        let a = head.forward(&x, &[4, 2], false).unwrap().to_vec1::<f32>().unwrap();
        let b = head.forward(&x, &[4, 2], false).unwrap().to_vec1::<f32>().unwrap();
        assert_eq!(a, b);
    }
}
