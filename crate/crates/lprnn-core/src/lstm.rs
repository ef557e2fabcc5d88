//! Quantization-aware LSTM language model: forward pass, tape recording and
//! backpropagation through time with straight-through estimators at every
//! quantizer site.
//!
//! The forward path quantizes weight matrices once per unrolled sequence
//! (they do not change within it), quantizes embedding lookups and the
//! hidden state on the symmetric activation grid, and leaves gate values and
//! the cell state at full precision. Master weights stay full-precision; the
//! quantized view is recomputed every forward pass.
//!
//! Gate blocks along the 4H axis are ordered [input | forget | cell | output].

use crate::error::{Error, Result};
use crate::quant::{
    quantize_activations, quantize_weights, ste_backward, ActRange, QuantSpec, SteKind,
    FULL_PRECISION,
};
use crate::tensor::{add, add_bias, matmul, mul, sigmoid, tanh, SeededRng, Tensor};

/// Combined input/recurrent LSTM weights and bias.
#[derive(Clone, Debug)]
pub struct LstmParams {
    /// (E + H) x 4H; rows 0..E are the input block, rows E.. the recurrent.
    pub weights: Tensor,
    /// Length 4H.
    pub bias: Vec<f32>,
    pub input_dim: usize,
    pub hidden: usize,
}

/// Single-recurrent-layer language model with quantization settings.
#[derive(Clone, Debug)]
pub struct LmModel {
    /// V x E token embeddings.
    pub embedding: Tensor,
    pub lstm: LstmParams,
    /// H x V output projection.
    pub projection: Tensor,
    /// Length V.
    pub projection_bias: Vec<f32>,
    pub quant: QuantSpec,
    /// Quantize the embedding and projection matrices with the weight
    /// quantizer (the recurrent weights always follow `quant`).
    pub quantize_embed_proj: bool,
    /// Weight tensors are already in their quantized (or deliberately raw)
    /// form and must not be re-quantized on forward. Set by checkpoint
    /// loading; re-quantizing an already-quantized tensor would move its
    /// levels because of the tanh rescale.
    pub frozen: bool,
}

impl LmModel {
    /// Fresh model with uniform [-1/sqrt(fan_in), 1/sqrt(fan_in)] weights,
    /// zero biases except the forget gate at 1.0.
    pub fn init(
        vocab: usize,
        embed: usize,
        hidden: usize,
        quant: QuantSpec,
        quantize_embed_proj: bool,
        rng: &mut SeededRng,
    ) -> LmModel {
        let emb_bound = 1.0 / (embed as f32).sqrt();
        let w_bound = 1.0 / ((embed + hidden) as f32).sqrt();
        let p_bound = 1.0 / (hidden as f32).sqrt();
        let embedding = rng.uniform_tensor(vocab, embed, emb_bound);
        let weights = rng.uniform_tensor(embed + hidden, 4 * hidden, w_bound);
        let mut bias = vec![0.0f32; 4 * hidden];
        bias[hidden..2 * hidden].fill(1.0);
        let projection = rng.uniform_tensor(hidden, vocab, p_bound);
        LmModel {
            embedding,
            lstm: LstmParams { weights, bias, input_dim: embed, hidden },
            projection,
            projection_bias: vec![0.0f32; vocab],
            quant,
            quantize_embed_proj,
            frozen: false,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.embedding.rows()
    }

    pub fn embed_dim(&self) -> usize {
        self.lstm.input_dim
    }

    pub fn hidden(&self) -> usize {
        self.lstm.hidden
    }
}

/// Weight tensors as seen by the forward pass, plus the quantizer
/// normalizers the backward pass needs.
#[derive(Clone, Debug)]
pub struct EffectiveWeights {
    pub weights: Tensor,
    pub max_w: f32,
    pub embedding: Tensor,
    pub max_e: f32,
    pub projection: Tensor,
    pub max_p: f32,
}

pub fn effective_weights(model: &LmModel) -> Result<EffectiveWeights> {
    if model.frozen {
        return Ok(EffectiveWeights {
            weights: model.lstm.weights.clone(),
            max_w: 1.0,
            embedding: model.embedding.clone(),
            max_e: 1.0,
            projection: model.projection.clone(),
            max_p: 1.0,
        });
    }
    let kw = model.quant.weight_bits();
    let (weights, max_w) = quantize_weights(&model.lstm.weights, kw)?;
    let (embedding, max_e) = if model.quantize_embed_proj {
        quantize_weights(&model.embedding, kw)?
    } else {
        (model.embedding.clone(), 1.0)
    };
    let (projection, max_p) = if model.quantize_embed_proj {
        quantize_weights(&model.projection, kw)?
    } else {
        (model.projection.clone(), 1.0)
    };
    Ok(EffectiveWeights { weights, max_w, embedding, max_e, projection, max_p })
}

/// Everything one timestep must remember for its backward replay.
#[derive(Clone, Debug)]
pub struct StepTape {
    pub concat: Tensor,
    pub gate_i: Tensor,
    pub gate_f: Tensor,
    pub gate_g: Tensor,
    pub gate_o: Tensor,
    pub c_prev: Tensor,
    pub c: Tensor,
    pub tanh_c: Tensor,
    pub h_raw: Tensor,
    pub h: Tensor,
}

/// Per-sequence record sufficient for exact backward replay.
#[derive(Clone, Debug)]
pub struct ForwardTape {
    pub inputs: Vec<Vec<u32>>,
    pub steps: Vec<StepTape>,
    /// Embedding lookups before activation quantization, one per timestep.
    pub x_pre: Vec<Tensor>,
    pub logits: Vec<Tensor>,
    pub effective: EffectiveWeights,
    pub h_final: Tensor,
    pub c_final: Tensor,
}

fn step_with(
    x: &Tensor,
    h_prev: &Tensor,
    c_prev: &Tensor,
    wq: &Tensor,
    bias: &[f32],
    hidden: usize,
    act_bits: u8,
) -> Result<(Tensor, Tensor, StepTape)> {
    let concat = x.hconcat(h_prev)?;
    if concat.cols() != wq.rows() {
        return Err(Error::ShapeMismatch { left: concat.shape(), right: wq.shape() });
    }
    let gates = add_bias(&matmul(&concat, wq)?, bias)?;
    let gate_i = sigmoid(&gates.slice_cols(0, hidden));
    let gate_f = sigmoid(&gates.slice_cols(hidden, 2 * hidden));
    let gate_g = tanh(&gates.slice_cols(2 * hidden, 3 * hidden));
    let gate_o = sigmoid(&gates.slice_cols(3 * hidden, 4 * hidden));
    let c = add(&mul(&gate_f, c_prev)?, &mul(&gate_i, &gate_g)?)?;
    let tanh_c = tanh(&c);
    let h_raw = mul(&gate_o, &tanh_c)?;
    let h = quantize_activations(&h_raw, act_bits, ActRange::Symmetric)?;
    let tape = StepTape {
        concat,
        gate_i,
        gate_f,
        gate_g,
        gate_o,
        c_prev: c_prev.clone(),
        c: c.clone(),
        tanh_c,
        h_raw,
        h: h.clone(),
    };
    Ok((h, c, tape))
}

/// One LSTM step on already-embedded inputs. Weights are quantized here;
/// gate values and the cell state stay full precision, the outgoing hidden
/// state is quantized on the symmetric activation grid.
pub fn lstm_step(
    x: &Tensor,
    h_prev: &Tensor,
    c_prev: &Tensor,
    params: &LstmParams,
    quant: QuantSpec,
) -> Result<(Tensor, Tensor, StepTape)> {
    if h_prev.shape() != c_prev.shape() || h_prev.cols() != params.hidden {
        return Err(Error::ShapeMismatch { left: h_prev.shape(), right: c_prev.shape() });
    }
    let (wq, _) = quantize_weights(&params.weights, quant.weight_bits())?;
    step_with(x, h_prev, c_prev, &wq, &params.bias, params.hidden, quant.activation_bits())
}

/// Unrolls the model over `inputs[batch][t]`, carrying `state` (zeros when
/// absent), and records the tape.
pub fn forward_sequence(
    model: &LmModel,
    inputs: &[Vec<u32>],
    state: Option<(&Tensor, &Tensor)>,
) -> Result<(Vec<Tensor>, ForwardTape)> {
    let batch = inputs.len();
    if batch == 0 || inputs[0].is_empty() {
        return Err(Error::EmptyInput("token batch"));
    }
    let t_len = inputs[0].len();
    if inputs.iter().any(|lane| lane.len() != t_len) {
        return Err(Error::EmptyInput("ragged token batch"));
    }
    let vocab = model.vocab_size();
    for (b, lane) in inputs.iter().enumerate() {
        for (t, &token) in lane.iter().enumerate() {
            if token as usize >= vocab {
                return Err(Error::TokenOutOfRange { position: b * t_len + t, token, vocab });
            }
        }
    }

    let hidden = model.hidden();
    let embed = model.embed_dim();
    let ka = model.quant.activation_bits();
    let eff = effective_weights(model)?;
    let (mut h, mut c) = match state {
        Some((h0, c0)) => {
            if h0.shape() != (batch, hidden) || c0.shape() != (batch, hidden) {
                return Err(Error::ShapeMismatch { left: h0.shape(), right: (batch, hidden) });
            }
            (h0.clone(), c0.clone())
        }
        None => (Tensor::zeros(batch, hidden), Tensor::zeros(batch, hidden)),
    };

    let mut steps = Vec::with_capacity(t_len);
    let mut x_pres = Vec::with_capacity(t_len);
    let mut logits = Vec::with_capacity(t_len);
    for t in 0..t_len {
        let x_pre =
            Tensor::from_fn(batch, embed, |b, e| eff.embedding.get(inputs[b][t] as usize, e));
        let x = quantize_activations(&x_pre, ka, ActRange::Symmetric)?;
        let (h_next, c_next, step) =
            step_with(&x, &h, &c, &eff.weights, &model.lstm.bias, hidden, ka)?;
        h = h_next;
        c = c_next;
        logits.push(add_bias(&matmul(&h, &eff.projection)?, &model.projection_bias)?);
        steps.push(step);
        x_pres.push(x_pre);
    }
    let tape = ForwardTape {
        inputs: inputs.to_vec(),
        steps,
        x_pre: x_pres,
        logits: logits.clone(),
        effective: eff,
        h_final: h,
        c_final: c,
    };
    Ok((logits, tape))
}

/// Gradients for every parameter tensor of the model.
#[derive(Clone, Debug)]
pub struct Gradients {
    pub embedding: Tensor,
    pub weights: Tensor,
    pub bias: Vec<f32>,
    pub projection: Tensor,
    pub projection_bias: Vec<f32>,
}

fn add_into(acc: &mut Tensor, t: &Tensor) {
    debug_assert_eq!(acc.shape(), t.shape());
    for (a, b) in acc.data_mut().iter_mut().zip(t.data()) {
        *a += b;
    }
}

fn col_sums_into(acc: &mut [f32], t: &Tensor) {
    debug_assert_eq!(acc.len(), t.cols());
    for r in 0..t.rows() {
        for (a, v) in acc.iter_mut().zip(t.row(r)) {
            *a += v;
        }
    }
}

fn one_minus_square(t: &Tensor) -> Tensor {
    t.map(|x| 1.0 - x * x)
}

fn sigmoid_derivative(s: &Tensor) -> Tensor {
    s.map(|x| x * (1.0 - x))
}

/// Stacks per-step logits into one (T*batch) x V tensor, t-major, with the
/// flattened targets in the same order.
fn stack_logits(tape: &ForwardTape, targets: &[Vec<u32>]) -> Result<(Tensor, Vec<usize>)> {
    let t_len = tape.steps.len();
    let batch = tape.inputs.len();
    if targets.len() != batch || targets.iter().any(|lane| lane.len() != t_len) {
        return Err(Error::EmptyInput("targets do not match the tape shape"));
    }
    let vocab = tape.logits[0].cols();
    let mut flat = Tensor::zeros(t_len * batch, vocab);
    let mut flat_targets = Vec::with_capacity(t_len * batch);
    for t in 0..t_len {
        for b in 0..batch {
            let row = t * batch + b;
            for v in 0..vocab {
                flat.set(row, v, tape.logits[t].get(b, v));
            }
            flat_targets.push(targets[b][t] as usize);
        }
    }
    Ok((flat, flat_targets))
}

/// Exact reverse-mode gradients of the mean NLL through the unrolled
/// computation, with the straight-through estimator applied at every
/// quantizer site. Returns the loss alongside.
pub fn backward(
    tape: &ForwardTape,
    model: &LmModel,
    targets: &[Vec<u32>],
) -> Result<(f64, Gradients)> {
    let batch = tape.inputs.len();
    let t_len = tape.steps.len();
    let hidden = model.hidden();
    let embed = model.embed_dim();
    let vocab = model.vocab_size();
    let kw = model.quant.weight_bits();
    let ka = model.quant.activation_bits();

    let (flat_logits, flat_targets) = stack_logits(tape, targets)?;
    let (loss, dflat) = crate::tensor::softmax_xent(&flat_logits, &flat_targets)?;

    let wq_t = tape.effective.weights.transpose();
    let pq_t = tape.effective.projection.transpose();

    let mut d_wq = Tensor::zeros(embed + hidden, 4 * hidden);
    let mut d_bias = vec![0.0f32; 4 * hidden];
    let mut d_pq = Tensor::zeros(hidden, vocab);
    let mut d_pbias = vec![0.0f32; vocab];
    let mut d_eq = Tensor::zeros(vocab, embed);

    let mut dh_carry = Tensor::zeros(batch, hidden);
    let mut dc_carry = Tensor::zeros(batch, hidden);

    for t in (0..t_len).rev() {
        let step = &tape.steps[t];
        let dlogits = Tensor::from_fn(batch, vocab, |b, v| dflat.get(t * batch + b, v));

        add_into(&mut d_pq, &matmul(&step.h.transpose(), &dlogits)?);
        col_sums_into(&mut d_pbias, &dlogits);
        let dh = add(&matmul(&dlogits, &pq_t)?, &dh_carry)?;

        // Hidden-state quantizer.
        let dh_raw = ste_backward(&dh, &step.h_raw, SteKind::ActivationSymmetric, 0.0, ka)?;

        let d_o = mul(&dh_raw, &step.tanh_c)?;
        let dc = add(&dc_carry, &mul(&mul(&dh_raw, &step.gate_o)?, &one_minus_square(&step.tanh_c))?)?;
        let d_f = mul(&dc, &step.c_prev)?;
        let d_i = mul(&dc, &step.gate_g)?;
        let d_g = mul(&dc, &step.gate_i)?;
        dc_carry = mul(&dc, &step.gate_f)?;

        let da_i = mul(&d_i, &sigmoid_derivative(&step.gate_i))?;
        let da_f = mul(&d_f, &sigmoid_derivative(&step.gate_f))?;
        let da_g = mul(&d_g, &one_minus_square(&step.gate_g))?;
        let da_o = mul(&d_o, &sigmoid_derivative(&step.gate_o))?;
        let da = da_i.hconcat(&da_f)?.hconcat(&da_g)?.hconcat(&da_o)?;

        add_into(&mut d_wq, &matmul(&step.concat.transpose(), &da)?);
        col_sums_into(&mut d_bias, &da);
        let dconcat = matmul(&da, &wq_t)?;
        let dx = dconcat.slice_cols(0, embed);
        dh_carry = dconcat.slice_cols(embed, embed + hidden);

        // Embedding-lookup quantizer, then scatter into embedding rows.
        let dx_pre = ste_backward(&dx, &tape.x_pre[t], SteKind::ActivationSymmetric, 0.0, ka)?;
        for b in 0..batch {
            let token = tape.inputs[b][t] as usize;
            for e in 0..embed {
                let v = d_eq.get(token, e) + dx_pre.get(b, e);
                d_eq.set(token, e, v);
            }
        }
    }

    // Weight-quantizer straight-through chains. Frozen models treat the
    // stored tensors as leaves.
    let (weights, embedding, projection) = if model.frozen {
        (d_wq, d_eq, d_pq)
    } else {
        let weights =
            ste_backward(&d_wq, &model.lstm.weights, SteKind::Weight, tape.effective.max_w, kw)?;
        let (embedding, projection) = if model.quantize_embed_proj {
            (
                ste_backward(&d_eq, &model.embedding, SteKind::Weight, tape.effective.max_e, kw)?,
                ste_backward(&d_pq, &model.projection, SteKind::Weight, tape.effective.max_p, kw)?,
            )
        } else {
            (d_eq, d_pq)
        };
        (weights, embedding, projection)
    };

    Ok((
        loss,
        Gradients { embedding, weights, bias: d_bias, projection, projection_bias: d_pbias },
    ))
}

/// True when the spec is the 32/32 identity sentinel on both paths.
pub fn is_full_precision(quant: QuantSpec) -> bool {
    quant.weight_bits() == FULL_PRECISION && quant.activation_bits() == FULL_PRECISION
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_model(vocab: usize, embed: usize, hidden: usize, quant: QuantSpec) -> LmModel {
        LmModel {
            embedding: Tensor::zeros(vocab, embed),
            lstm: LstmParams {
                weights: Tensor::zeros(embed + hidden, 4 * hidden),
                bias: vec![0.0; 4 * hidden],
                input_dim: embed,
                hidden,
            },
            projection: Tensor::zeros(hidden, vocab),
            projection_bias: vec![0.0; vocab],
            quant,
            quantize_embed_proj: true,
            frozen: false,
        }
    }

    fn small_random_model(quant: QuantSpec, seed: u64) -> LmModel {
        let mut rng = SeededRng::new(seed);
        LmModel::init(11, 6, 5, quant, true, &mut rng)
    }

    #[test]
    fn zero_params_full_precision_step_gives_zero_state() {
        let params = LstmParams {
            weights: Tensor::zeros(7, 12),
            bias: vec![0.0; 12],
            input_dim: 4,
            hidden: 3,
        };
        let x = Tensor::from_vec(2, 4, vec![0.3, -0.1, 0.9, 0.5, 0.0, 1.0, -1.0, 0.2]).unwrap();
        let h0 = Tensor::zeros(2, 3);
        let c0 = Tensor::zeros(2, 3);
        let (h, c, _) = lstm_step(&x, &h0, &c0, &params, QuantSpec::full_precision()).unwrap();
        assert_eq!(h, Tensor::zeros(2, 3));
        assert_eq!(c, Tensor::zeros(2, 3));
    }

    #[test]
    fn full_precision_step_matches_plain_lstm_arithmetic() {
        let mut rng = SeededRng::new(5);
        let (e, h_dim, batch) = (4usize, 3usize, 2usize);
        let params = LstmParams {
            weights: rng.uniform_tensor(e + h_dim, 4 * h_dim, 0.4),
            bias: (0..4 * h_dim).map(|i| i as f32 * 0.01).collect(),
            input_dim: e,
            hidden: h_dim,
        };
        let x = rng.uniform_tensor(batch, e, 1.0);
        let h0 = rng.uniform_tensor(batch, h_dim, 0.5);
        let c0 = rng.uniform_tensor(batch, h_dim, 0.5);
        let (h, c, _) = lstm_step(&x, &h0, &c0, &params, QuantSpec::full_precision()).unwrap();

        // Same arithmetic spelled out without any quantizer calls.
        let concat = x.hconcat(&h0).unwrap();
        let gates = add_bias(&matmul(&concat, &params.weights).unwrap(), &params.bias).unwrap();
        let i = sigmoid(&gates.slice_cols(0, h_dim));
        let f = sigmoid(&gates.slice_cols(h_dim, 2 * h_dim));
        let g = tanh(&gates.slice_cols(2 * h_dim, 3 * h_dim));
        let o = sigmoid(&gates.slice_cols(3 * h_dim, 4 * h_dim));
        let c_ref = add(&mul(&f, &c0).unwrap(), &mul(&i, &g).unwrap()).unwrap();
        let h_ref = mul(&o, &tanh(&c_ref)).unwrap();
        for (a, b) in h.data().iter().zip(h_ref.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in c.data().iter().zip(c_ref.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn one_bit_hidden_state_lands_on_symmetric_grid() {
        let model = small_random_model(QuantSpec::new(32, 1).unwrap(), 77);
        let inputs = vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8]];
        let (_, tape) = forward_sequence(&model, &inputs, None).unwrap();
        for step in &tape.steps {
            for &v in step.h.data() {
                assert!(v == 1.0 || v == -1.0, "got {v}");
            }
        }
    }

    #[test]
    fn quantized_hidden_state_stays_on_k_grid() {
        for bits in [2u8, 4] {
            let model = small_random_model(QuantSpec::new(32, bits).unwrap(), 78);
            let inputs = vec![vec![0, 9, 4, 2]];
            let (_, tape) = forward_sequence(&model, &inputs, None).unwrap();
            let n = ((1u32 << bits) - 1) as f32;
            for step in &tape.steps {
                for &v in step.h.data() {
                    let code = (v + 1.0) / 2.0 * n;
                    assert!((code - code.round()).abs() < 1e-5, "{v} off-grid at {bits} bits");
                }
            }
        }
    }

    #[test]
    fn zero_model_forward_gives_uniform_logits() {
        let model = zero_model(7, 3, 2, QuantSpec::full_precision());
        let (logits, _) = forward_sequence(&model, &[vec![0]], None).unwrap();
        assert_eq!(logits.len(), 1);
        assert_eq!(logits[0], Tensor::zeros(1, 7));
    }

    #[test]
    fn forward_rejects_out_of_range_tokens() {
        let model = zero_model(7, 3, 2, QuantSpec::full_precision());
        assert!(matches!(
            forward_sequence(&model, &[vec![7]], None),
            Err(Error::TokenOutOfRange { token: 7, vocab: 7, .. })
        ));
    }

    #[test]
    fn forward_shapes_and_finiteness() {
        let model = small_random_model(QuantSpec::new(4, 4).unwrap(), 80);
        let inputs = vec![vec![1, 2, 3], vec![4, 5, 6]];
        let (logits, tape) = forward_sequence(&model, &inputs, None).unwrap();
        assert_eq!(logits.len(), 3);
        for l in &logits {
            assert_eq!(l.shape(), (2, 11));
            assert!(l.is_finite());
        }
        assert_eq!(tape.h_final.shape(), (2, 5));
    }

    #[test]
    fn backward_zero_upstream_gives_zero_gradients() {
        // A model whose logits are constant in every parameter-independent
        // way still produces gradients; instead check linearity directly:
        // doubling cannot happen with a zero gradient seed, i.e. uniform
        // targets on uniform logits give exactly zero gradient.
        let model = zero_model(2, 3, 2, QuantSpec::full_precision());
        let inputs = vec![vec![0, 1], vec![1, 0]];
        let targets = vec![vec![0, 1], vec![1, 0]];
        let (_, tape) = forward_sequence(&model, &inputs, None).unwrap();
        let (_, grads) = backward(&tape, &model, &targets).unwrap();
        // Binary vocab with uniform logits: softmax grad is (0.5 - onehot)/N,
        // nonzero per row, but the projection weights are zero so nothing
        // propagates into the recurrent stack.
        assert_eq!(grads.weights, Tensor::zeros(5, 8));
        assert_eq!(grads.embedding, Tensor::zeros(2, 3));
        assert!(grads.bias.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn ste_masks_clipped_hidden_entries() {
        // Saturate the hidden state by running a frozen model whose stored
        // "pre-quant" lookups exceed the clip range: gradient through the
        // embedding quantizer must vanish there.
        let mut model = small_random_model(QuantSpec::new(32, 2).unwrap(), 81);
        model.embedding = model.embedding.map(|_| 3.0);
        let inputs = vec![vec![1, 2]];
        let targets = vec![vec![2, 3]];
        let (_, tape) = forward_sequence(&model, &inputs, None).unwrap();
        for x_pre in &tape.x_pre {
            for &v in x_pre.data() {
                assert!(v.abs() > 1.0);
            }
        }
        let (_, grads) = backward(&tape, &model, &targets).unwrap();
        // All lookups were clipped, so nothing reaches the embedding.
        assert_eq!(grads.embedding, Tensor::zeros(11, 6));
    }

    #[test]
    fn full_precision_quant_calls_are_bitwise_identity() {
        let model = small_random_model(QuantSpec::full_precision(), 82);
        let eff = effective_weights(&model).unwrap();
        for (a, b) in model.lstm.weights.data().iter().zip(eff.weights.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in model.embedding.data().iter().zip(eff.embedding.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
