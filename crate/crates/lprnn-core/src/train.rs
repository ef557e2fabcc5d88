//! SGD training with truncated backpropagation through time, and
//! perplexity-per-word evaluation.

use crate::corpus::{batchify, TokenStream};
use crate::error::{Error, Result};
use crate::lstm::{backward, forward_sequence, Gradients, LmModel};
use crate::tensor::{softmax_rows, Tensor};

/// All knobs of a training run. Every value is caller-supplied; nothing is
/// hard-coded in the loop.
#[derive(Clone, Copy, Debug)]
pub struct TrainSchedule {
    pub lr: f32,
    /// Epochs at constant lr; afterwards the lr halves every epoch.
    pub lr_patience: usize,
    /// Global gradient-norm clipping threshold.
    pub clip: f32,
    pub epochs: usize,
    pub batch: usize,
    pub seqlen: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_nll: f64,
    pub valid_ppw: f64,
}

/// Perplexity per word: exp of the mean per-token NLL in nats.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalReport {
    pub ppw: f64,
    pub mean_nll: f64,
    pub tokens: usize,
}

fn lr_at_epoch(sched: &TrainSchedule, epoch: usize) -> f32 {
    if epoch > sched.lr_patience {
        sched.lr * 0.5f32.powi((epoch - sched.lr_patience) as i32)
    } else {
        sched.lr
    }
}

/// In-place SGD update `p <- p - step * g`.
pub fn sgd_update(param: &mut Tensor, grad: &Tensor, step: f32) {
    debug_assert_eq!(param.shape(), grad.shape());
    for (p, g) in param.data_mut().iter_mut().zip(grad.data()) {
        *p -= step * g;
    }
}

fn sgd_update_vec(param: &mut [f32], grad: &[f32], step: f32) {
    for (p, g) in param.iter_mut().zip(grad) {
        *p -= step * g;
    }
}

/// Global L2 norm over all parameter gradients, accumulated in f64 in a
/// fixed order.
pub fn gradient_norm(grads: &Gradients) -> f64 {
    let mut sq = 0.0f64;
    for t in [&grads.embedding, &grads.weights, &grads.projection] {
        for &g in t.data() {
            sq += g as f64 * g as f64;
        }
    }
    for v in [&grads.bias, &grads.projection_bias] {
        for &g in v.iter() {
            sq += g as f64 * g as f64;
        }
    }
    sq.sqrt()
}

fn apply_update(model: &mut LmModel, grads: &Gradients, lr: f32, clip: f32) {
    let norm = gradient_norm(grads);
    let scale = if clip > 0.0 && norm > clip as f64 { (clip as f64 / norm) as f32 } else { 1.0 };
    let step = lr * scale;
    sgd_update(&mut model.embedding, &grads.embedding, step);
    sgd_update(&mut model.lstm.weights, &grads.weights, step);
    sgd_update_vec(&mut model.lstm.bias, &grads.bias, step);
    sgd_update(&mut model.projection, &grads.projection, step);
    sgd_update_vec(&mut model.projection_bias, &grads.projection_bias, step);
}

/// Trains with truncated BPTT over contiguous windows, carrying the hidden
/// state across windows within an epoch. Master weights stay full precision
/// and are re-quantized on every forward pass. Aborts if the loss becomes
/// non-finite.
pub fn train(
    model: &mut LmModel,
    train_stream: &TokenStream,
    valid_stream: &TokenStream,
    sched: &TrainSchedule,
) -> Result<Vec<EpochLog>> {
    let mut logs = Vec::with_capacity(sched.epochs);
    for epoch in 1..=sched.epochs {
        let lr = lr_at_epoch(sched, epoch);
        let mut state: Option<(Tensor, Tensor)> = None;
        let mut nll_sum = 0.0f64;
        let mut token_count = 0usize;
        for (window, batch) in batchify(train_stream, sched.batch, sched.seqlen)?.enumerate() {
            let (_, tape) = forward_sequence(
                model,
                &batch.inputs,
                state.as_ref().map(|(h, c)| (h, c)),
            )?;
            let (loss, grads) = backward(&tape, model, &batch.targets)?;
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, window });
            }
            apply_update(model, &grads, lr, sched.clip);
            let tokens = sched.batch * sched.seqlen;
            nll_sum += loss * tokens as f64;
            token_count += tokens;
            state = Some((tape.h_final, tape.c_final));
        }
        let report = evaluate_ppw(model, valid_stream, sched.batch, sched.seqlen)?;
        logs.push(EpochLog {
            epoch,
            train_nll: nll_sum / token_count as f64,
            valid_ppw: report.ppw,
        });
    }
    Ok(logs)
}

/// Deterministic, side-effect-free evaluation over contiguous windows
/// (hidden state carried across windows, remainder tokens dropped).
pub fn evaluate_ppw(
    model: &LmModel,
    stream: &TokenStream,
    batch: usize,
    seqlen: usize,
) -> Result<EvalReport> {
    let mut nll_sum = 0.0f64;
    let mut tokens = 0usize;
    let mut state: Option<(Tensor, Tensor)> = None;
    for window in batchify(stream, batch, seqlen)? {
        let (logits, tape) =
            forward_sequence(model, &window.inputs, state.as_ref().map(|(h, c)| (h, c)))?;
        for (t, step_logits) in logits.iter().enumerate() {
            let probs = softmax_rows(step_logits);
            for (b, row) in probs.iter().enumerate() {
                nll_sum -= row[window.targets[b][t] as usize].ln();
                tokens += 1;
            }
        }
        state = Some((tape.h_final, tape.c_final));
    }
    let mean_nll = nll_sum / tokens as f64;
    Ok(EvalReport { ppw: mean_nll.exp(), mean_nll, tokens })
}
