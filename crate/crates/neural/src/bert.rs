//! Trainable BERT forward pass.
//!
//! `candle_transformers::models::bert::BertModel` routes layer norms through a
//! fused kernel registered without a backward op, so gradients silently stop
//! at every norm and fine-tuning leaves the encoder untouched. This module
//! mirrors that model with the same weight names and the same math, but builds
//! the norms from differentiable primitives. Constructed over the same
//! `VarMap`, both models share storage: train through [`TrainableBert`],
//! predict through the fused model.

use candle_core::{DType, Result, Tensor, D};
use candle_nn::{embedding, linear, Embedding, Init, Linear, Module, VarBuilder};
use candle_transformers::models::bert::{Config, HiddenAct};

/// Layer norm over the last dimension, composed from primitives that all
/// carry backward ops.
struct LayerNorm {
    weight: Tensor,
    bias: Tensor,
    eps: f64,
}

impl LayerNorm {
    fn load(size: usize, eps: f64, vb: VarBuilder) -> Result<Self> {
        let weight = vb.get_with_hints(size, "weight", Init::Const(1.0))?;
        let bias = vb.get_with_hints(size, "bias", Init::Const(0.0))?;
        Ok(Self { weight, bias, eps })
    }

    fn forward(&self, x: &Tensor) -> Result<Tensor> {
        let size = x.dim(D::Minus1)? as f64;
        let mean = (x.sum_keepdim(D::Minus1)? / size)?;
        let centered = x.broadcast_sub(&mean)?;
        let variance = (centered.sqr()?.sum_keepdim(D::Minus1)? / size)?;
        let normed = centered.broadcast_div(&(variance + self.eps)?.sqrt()?)?;
        normed
            .broadcast_mul(&self.weight)?
            .broadcast_add(&self.bias)
    }
}

struct Layer {
    query: Linear,
    key: Linear,
    value: Linear,
    attention_output: Linear,
    attention_norm: LayerNorm,
    intermediate: Linear,
    output: Linear,
    output_norm: LayerNorm,
    n_heads: usize,
    head_dim: usize,
    act: HiddenAct,
}

impl Layer {
    fn load(vb: VarBuilder, config: &Config) -> Result<Self> {
        let hidden = config.hidden_size;
        let attn = vb.pp("attention");
        Ok(Self {
            query: linear(hidden, hidden, attn.pp("self.query"))?,
            key: linear(hidden, hidden, attn.pp("self.key"))?,
            value: linear(hidden, hidden, attn.pp("self.value"))?,
            attention_output: linear(hidden, hidden, attn.pp("output.dense"))?,
            attention_norm: LayerNorm::load(
                hidden,
                config.layer_norm_eps,
                attn.pp("output.LayerNorm"),
            )?,
            intermediate: linear(hidden, config.intermediate_size, vb.pp("intermediate.dense"))?,
            output: linear(config.intermediate_size, hidden, vb.pp("output.dense"))?,
            output_norm: LayerNorm::load(hidden, config.layer_norm_eps, vb.pp("output.LayerNorm"))?,
            n_heads: config.num_attention_heads,
            head_dim: hidden / config.num_attention_heads,
            act: config.hidden_act,
        })
    }

    /// `(batch, seq, hidden)` to `(batch, heads, seq, head_dim)`.
    fn split_heads(&self, xs: &Tensor) -> Result<Tensor> {
        let (batch, seq, _) = xs.dims3()?;
        xs.reshape((batch, seq, self.n_heads, self.head_dim))?
            .transpose(1, 2)?
            .contiguous()
    }

    fn forward(&self, hidden: &Tensor, mask: &Tensor) -> Result<Tensor> {
        let query = self.split_heads(&self.query.forward(hidden)?)?;
        let key = self.split_heads(&self.key.forward(hidden)?)?;
        let value = self.split_heads(&self.value.forward(hidden)?)?;

        let scores = (query.matmul(&key.t()?)? / (self.head_dim as f64).sqrt())?;
        let scores = scores.broadcast_add(mask)?;
        let probs = candle_nn::ops::softmax(&scores, D::Minus1)?;
        let context = probs
            .matmul(&value)?
            .transpose(1, 2)?
            .contiguous()?
            .flatten_from(D::Minus2)?;

        let attended = self.attention_output.forward(&context)?;
        let attended = self.attention_norm.forward(&(attended + hidden)?)?;

        let inner = self.intermediate.forward(&attended)?;
        let inner = match self.act {
            HiddenAct::Gelu => inner.gelu_erf()?,
            HiddenAct::GeluApproximate => inner.gelu()?,
            HiddenAct::Relu => inner.relu()?,
        };
        let out = self.output.forward(&inner)?;
        self.output_norm.forward(&(out + attended)?)
    }
}

pub(crate) struct TrainableBert {
    word_embeddings: Embedding,
    position_embeddings: Embedding,
    token_type_embeddings: Embedding,
    embeddings_norm: LayerNorm,
    layers: Vec<Layer>,
}

impl TrainableBert {
    /// Requests exactly the weight names `BertModel::load` does, so loading
    /// both from one `VarMap` shares every tensor. Apply any checkpoint
    /// prefix to `vb` before calling.
    pub(crate) fn load(vb: VarBuilder, config: &Config) -> Result<Self> {
        let emb = vb.pp("embeddings");
        let word_embeddings =
            embedding(config.vocab_size, config.hidden_size, emb.pp("word_embeddings"))?;
        let position_embeddings = embedding(
            config.max_position_embeddings,
            config.hidden_size,
            emb.pp("position_embeddings"),
        )?;
        let token_type_embeddings = embedding(
            config.type_vocab_size,
            config.hidden_size,
            emb.pp("token_type_embeddings"),
        )?;
        let embeddings_norm =
            LayerNorm::load(config.hidden_size, config.layer_norm_eps, emb.pp("LayerNorm"))?;
        let layers = (0..config.num_hidden_layers)
            .map(|i| Layer::load(vb.pp(format!("encoder.layer.{i}")), config))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            word_embeddings,
            position_embeddings,
            token_type_embeddings,
            embeddings_norm,
            layers,
        })
    }

    /// Hidden states `(batch, seq, hidden)`, differentiable end to end.
    pub(crate) fn forward(
        &self,
        input_ids: &Tensor,
        token_type_ids: &Tensor,
        attention_mask: &Tensor,
    ) -> Result<Tensor> {
        let (_, seq) = input_ids.dims2()?;
        let embeddings = (self.word_embeddings.forward(input_ids)?
            + self.token_type_embeddings.forward(token_type_ids)?)?;
        let positions = self.position_embeddings.embeddings().narrow(0, 0, seq)?;
        let embeddings = embeddings.broadcast_add(&positions)?;
        let mut hidden = self.embeddings_norm.forward(&embeddings)?;

        // 0 where attended, f32::MIN where padded, shaped for score addition.
        let mask = attention_mask
            .unsqueeze(1)?
            .unsqueeze(1)?
            .to_dtype(DType::F32)?;
        let mask = (mask.ones_like()? - &mask)?
            .broadcast_mul(&Tensor::try_from(f32::MIN)?.to_device(mask.device())?)?;

        for layer in &self.layers {
            hidden = layer.forward(&hidden, &mask)?;
        }
        Ok(hidden)
    }
}
